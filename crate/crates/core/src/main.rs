use clap::Parser;

use biclust_tw::commands::{error_json, run, Cli};

fn main() {
    let cli = Cli::parse();
    let level = match cli.global.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    if let Err(e) = run(&cli) {
        eprintln!("{}", error_json(&e));
        std::process::exit(e.exit_code());
    }
}
