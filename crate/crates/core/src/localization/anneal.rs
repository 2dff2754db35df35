//! Simulated annealing over disjoint (not necessarily bi-disjoint) bicluster
//! assignments of a weighted grid.
//!
//! The same engine drives the entry-level search (unit weights) and the
//! compressed search (cell counts as weights). A move adds or removes one
//! row or column of one bicluster; rows and columns share a single routine
//! parameterized by [`Axis`].

use ndarray::Array2;
use rand::seq::index;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::entropy::EntropyFn;
use super::schedule::CoolingSchedule;
use crate::error::{Error, Result};

/// Cells of the search space: per-cell value sums and weights.
#[derive(Debug, Clone)]
pub struct WeightedGrid {
    rows: usize,
    cols: usize,
    sum: Vec<f64>,
    weight: Vec<f64>,
    total: f64,
}

impl WeightedGrid {
    pub fn new(rows: usize, cols: usize, sum: Vec<f64>, weight: Vec<f64>) -> Self {
        assert_eq!(sum.len(), rows * cols);
        assert_eq!(weight.len(), rows * cols);
        let total = weight.iter().sum();
        Self {
            rows,
            cols,
            sum,
            weight,
            total,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    fn objective(&self, group: &[u32], k: usize, f: &EntropyFn) -> f64 {
        let mut s = vec![0.0; k + 1];
        let mut w = vec![0.0; k + 1];
        for ((&g, &x), &m) in group.iter().zip(&self.sum).zip(&self.weight) {
            s[g as usize] += x;
            w[g as usize] += m;
        }
        s.iter()
            .zip(&w)
            .map(|(&s, &w)| term(s, w, self.total, f))
            .sum()
    }
}

#[inline]
fn term(sum: f64, weight: f64, total: f64, f: &EntropyFn) -> f64 {
    if weight == 0.0 {
        0.0
    } else {
        (weight / total) * f.eval(sum / weight)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Axis {
    Row,
    Col,
}

impl Axis {
    fn other(self) -> Axis {
        match self {
            Axis::Row => Axis::Col,
            Axis::Col => Axis::Row,
        }
    }

    fn index(self) -> usize {
        match self {
            Axis::Row => 0,
            Axis::Col => 1,
        }
    }
}

/// Result of a single annealing run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnealOutcome {
    /// Cell-level labels, row-major `rows x cols`.
    pub group_of_cell: Array2<u32>,
    pub k0: usize,
    /// Profile likelihood of the final state, recomputed from scratch.
    pub objective: f64,
    pub steps: u64,
    pub accepted_moves: u64,
    /// Steps where the chosen bicluster/axis admitted no legal move.
    pub noop_steps: u64,
    /// Objective after every step, when requested.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<Vec<f64>>,
}

/// Metropolis rule: uphill moves always, others with `exp(delta / T)`.
pub fn metropolis_accept(delta: f64, temperature: f64, rng: &mut impl Rng) -> bool {
    if delta > 0.0 {
        return true;
    }
    if temperature <= 0.0 {
        return delta == 0.0;
    }
    rng.random::<f64>() < (delta / temperature).exp()
}

struct State<'g> {
    grid: &'g WeightedGrid,
    k: usize,
    group: Vec<u32>,
    /// `member[axis][k][idx]`: row/column `idx` belongs to bicluster `k + 1`.
    member: [Vec<Vec<bool>>; 2],
    size: [Vec<usize>; 2],
    /// `blocked[Row][k][i]` = number of `j` in `J_k` with `(i, j)` outside
    /// the background; `blocked[Col]` symmetrically over `I_k`.
    blocked: [Vec<Vec<u32>>; 2],
    gsum: Vec<f64>,
    gweight: Vec<f64>,
    background_cells: usize,
}

impl<'g> State<'g> {
    fn seeded(grid: &'g WeightedGrid, k: usize, seeds: &[usize]) -> Self {
        let (rows, cols) = (grid.rows, grid.cols);
        let mut state = Self {
            grid,
            k,
            group: vec![0; rows * cols],
            member: [vec![vec![false; rows]; k], vec![vec![false; cols]; k]],
            size: [vec![0; k], vec![0; k]],
            blocked: [vec![vec![0; rows]; k], vec![vec![0; cols]; k]],
            gsum: vec![0.0; k + 1],
            gweight: vec![0.0; k + 1],
            background_cells: rows * cols,
        };
        for (b, &cell) in seeds.iter().enumerate() {
            let (i, j) = (cell / cols, cell % cols);
            state.group[cell] = (b + 1) as u32;
            state.member[0][b][i] = true;
            state.member[1][b][j] = true;
            state.size[0][b] = 1;
            state.size[1][b] = 1;
        }
        state.background_cells -= seeds.len();
        state.rebuild_counters();
        state
    }

    fn rebuild_counters(&mut self) {
        let (rows, cols) = (self.grid.rows, self.grid.cols);
        for b in 0..self.k {
            for i in 0..rows {
                self.blocked[0][b][i] = (0..cols)
                    .filter(|&j| self.member[1][b][j] && self.group[i * cols + j] != 0)
                    .count() as u32;
            }
            for j in 0..cols {
                self.blocked[1][b][j] = (0..rows)
                    .filter(|&i| self.member[0][b][i] && self.group[i * cols + j] != 0)
                    .count() as u32;
            }
        }
        self.gsum.iter_mut().for_each(|x| *x = 0.0);
        self.gweight.iter_mut().for_each(|x| *x = 0.0);
        for ((&g, &s), &w) in self.group.iter().zip(&self.grid.sum).zip(&self.grid.weight) {
            self.gsum[g as usize] += s;
            self.gweight[g as usize] += w;
        }
    }

    fn lines(&self, axis: Axis) -> usize {
        match axis {
            Axis::Row => self.grid.rows,
            Axis::Col => self.grid.cols,
        }
    }

    #[inline]
    fn cell(&self, axis: Axis, line: usize, cross: usize) -> usize {
        match axis {
            Axis::Row => line * self.grid.cols + cross,
            Axis::Col => cross * self.grid.cols + line,
        }
    }

    /// Sum and weight of the cells of `line` inside bicluster `b`'s cross set.
    fn line_mass(&self, axis: Axis, b: usize, line: usize) -> (f64, f64) {
        let cross = Axis::other(axis);
        let mut s = 0.0;
        let mut w = 0.0;
        for c in 0..self.lines(cross) {
            if self.member[cross.index()][b][c] {
                let cell = self.cell(axis, line, c);
                s += self.grid.sum[cell];
                w += self.grid.weight[cell];
            }
        }
        (s, w)
    }

    fn objective_delta(&self, b: usize, add: bool, mass: (f64, f64), f: &EntropyFn) -> f64 {
        let total = self.grid.total;
        let (s, w) = if add { mass } else { (-mass.0, -mass.1) };
        let g = b + 1;
        let old = term(self.gsum[g], self.gweight[g], total, f)
            + term(self.gsum[0], self.gweight[0], total, f);
        let new = term(self.gsum[g] + s, self.gweight[g] + w, total, f)
            + term(self.gsum[0] - s, self.gweight[0] - w, total, f);
        new - old
    }

    /// Moves `line` into (`add`) or out of bicluster `b` along `axis`.
    fn apply(&mut self, axis: Axis, b: usize, line: usize, add: bool, mass: (f64, f64)) {
        let cross = Axis::other(axis);
        let (ai, ci) = (axis.index(), cross.index());
        let label = if add { (b + 1) as u32 } else { 0 };
        for c in 0..self.lines(cross) {
            if !self.member[ci][b][c] {
                continue;
            }
            let cell = self.cell(axis, line, c);
            self.group[cell] = label;
            // the cell flips between background and bicluster
            for other in 0..self.k {
                if self.member[ci][other][c] {
                    if add {
                        self.blocked[ai][other][line] += 1;
                    } else {
                        self.blocked[ai][other][line] -= 1;
                    }
                }
                if self.member[ai][other][line] {
                    if add {
                        self.blocked[ci][other][c] += 1;
                    } else {
                        self.blocked[ci][other][c] -= 1;
                    }
                }
            }
        }
        self.member[ai][b][line] = add;
        for c in 0..self.lines(cross) {
            if self.group[self.cell(axis, line, c)] != 0 {
                if add {
                    self.blocked[ci][b][c] += 1;
                } else {
                    self.blocked[ci][b][c] -= 1;
                }
            }
        }
        let width = self.size[ci][b];
        if add {
            self.size[ai][b] += 1;
            self.background_cells -= width;
            self.gsum[b + 1] += mass.0;
            self.gweight[b + 1] += mass.1;
            self.gsum[0] -= mass.0;
            self.gweight[0] -= mass.1;
        } else {
            self.size[ai][b] -= 1;
            self.background_cells += width;
            self.gsum[b + 1] -= mass.0;
            self.gweight[b + 1] -= mass.1;
            self.gsum[0] += mass.0;
            self.gweight[0] += mass.1;
        }
    }

    /// Checks every assignment invariant and the incremental bookkeeping.
    fn check(&self) {
        let (rows, cols) = (self.grid.rows, self.grid.cols);
        let mut counts = vec![0usize; self.k + 1];
        for i in 0..rows {
            for j in 0..cols {
                let g = self.group[i * cols + j] as usize;
                counts[g] += 1;
                for b in 0..self.k {
                    let inside = self.member[0][b][i] && self.member[1][b][j];
                    assert_eq!(inside, g == b + 1, "bicluster {} is not a submatrix", b + 1);
                }
            }
        }
        assert!(counts[0] > 0, "background became empty");
        assert_eq!(counts[0], self.background_cells);
        for b in 0..self.k {
            assert!(self.size[0][b] >= 1 && self.size[1][b] >= 1);
            assert_eq!(counts[b + 1], self.size[0][b] * self.size[1][b]);
            for i in 0..rows {
                let expect = (0..cols)
                    .filter(|&j| self.member[1][b][j] && self.group[i * cols + j] != 0)
                    .count() as u32;
                assert_eq!(self.blocked[0][b][i], expect);
            }
            for j in 0..cols {
                let expect = (0..rows)
                    .filter(|&i| self.member[0][b][i] && self.group[i * cols + j] != 0)
                    .count() as u32;
                assert_eq!(self.blocked[1][b][j], expect);
            }
        }
        let mut w = vec![0.0; self.k + 1];
        for (&g, &m) in self.group.iter().zip(&self.grid.weight) {
            w[g as usize] += m;
        }
        for (x, y) in w.iter().zip(&self.gweight) {
            assert!((x - y).abs() <= 1e-9 * self.grid.total.max(1.0));
        }
    }
}

/// One proposal: which line moves where.
struct Proposal {
    axis: Axis,
    bicluster: usize,
    line: usize,
    add: bool,
}

fn propose(state: &State<'_>, rng: &mut ChaCha8Rng, scratch: &mut Vec<usize>) -> Option<Proposal> {
    let k = state.k;
    let k0 = rng.random_range(0..2 * k);
    let (axis, b) = if k0 < k {
        (Axis::Row, k0)
    } else {
        (Axis::Col, k0 - k)
    };
    let ai = axis.index();
    let cross_width = state.size[axis.other().index()][b];

    // remove list: current members; add list: lines whose cells across the
    // bicluster's cross set are all background
    scratch.clear();
    let mut members = 0;
    for line in 0..state.lines(axis) {
        if state.member[ai][b][line] {
            scratch.push(line);
            members += 1;
        }
    }
    for line in 0..state.lines(axis) {
        if state.blocked[ai][b][line] == 0 {
            scratch.push(line);
        }
    }
    let candidates = scratch.len() - members;
    let can_add = candidates >= 2 || (candidates == 1 && state.background_cells > cross_width);
    let can_remove = members >= 2;

    let pick = match (can_remove, can_add) {
        (true, true) => rng.random_range(0..members + candidates),
        (true, false) => rng.random_range(0..members),
        (false, true) => members + rng.random_range(0..candidates),
        (false, false) => return None,
    };
    Some(Proposal {
        axis,
        bicluster: b,
        line: scratch[pick],
        add: pick >= members,
    })
}

/// Runs the annealer on `grid` with `k0` biclusters, seeded from `rng`.
pub fn anneal(
    grid: &WeightedGrid,
    k0: usize,
    f: &EntropyFn,
    schedule: &CoolingSchedule,
    rng: &mut ChaCha8Rng,
    record_trace: bool,
) -> Result<AnnealOutcome> {
    schedule.validate()?;
    let cells = grid.rows * grid.cols;
    if k0 == 0 {
        return Err(Error::InvalidConfig("annealing needs K0 >= 1".into()));
    }
    if k0 >= cells {
        return Err(Error::InfeasibleInit {
            k0,
            rows: grid.rows,
            cols: grid.cols,
        });
    }
    let seeds = index::sample(rng, cells, k0).into_vec();
    let mut state = State::seeded(grid, k0, &seeds);
    let mut current = grid.objective(&state.group, k0, f);
    let mut trace = record_trace.then(Vec::new);
    let mut scratch = Vec::with_capacity(grid.rows.max(grid.cols) * 2);
    let mut accepted = 0u64;
    let mut noop = 0u64;
    let mut t = 0u64;

    while let Some(temperature) = schedule.step(t) {
        match propose(&state, rng, &mut scratch) {
            Some(m) => {
                let mass = state.line_mass(m.axis, m.bicluster, m.line);
                let delta = state.objective_delta(m.bicluster, m.add, mass, f);
                if metropolis_accept(delta, temperature, rng) {
                    state.apply(m.axis, m.bicluster, m.line, m.add, mass);
                    current += delta;
                    accepted += 1;
                    if cfg!(debug_assertions) {
                        state.check();
                    }
                }
            }
            None => noop += 1,
        }
        t += 1;
        if t.is_multiple_of(10_000) {
            if cfg!(debug_assertions) {
                let mut fresh = state.clone_counters();
                fresh.rebuild_counters();
                fresh.check();
            }
            // drop accumulated rounding in the running group sums
            state.resync_sums();
        }
        if let Some(trace) = trace.as_mut() {
            trace.push(current);
        }
    }
    state.check();

    let objective = grid.objective(&state.group, k0, f);
    Ok(AnnealOutcome {
        group_of_cell: Array2::from_shape_vec((grid.rows, grid.cols), state.group)
            .expect("grid shape"),
        k0,
        objective,
        steps: t,
        accepted_moves: accepted,
        noop_steps: noop,
        trace,
    })
}

impl<'g> State<'g> {
    fn clone_counters(&self) -> State<'g> {
        State {
            grid: self.grid,
            k: self.k,
            group: self.group.clone(),
            member: self.member.clone(),
            size: self.size.clone(),
            blocked: self.blocked.clone(),
            gsum: self.gsum.clone(),
            gweight: self.gweight.clone(),
            background_cells: self.background_cells,
        }
    }

    fn resync_sums(&mut self) {
        self.gsum.iter_mut().for_each(|x| *x = 0.0);
        self.gweight.iter_mut().for_each(|x| *x = 0.0);
        for ((&g, &s), &w) in self.group.iter().zip(&self.grid.sum).zip(&self.grid.weight) {
            self.gsum[g as usize] += s;
            self.gweight[g as usize] += w;
        }
    }
}
