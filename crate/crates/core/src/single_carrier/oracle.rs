//! Brute-force reference for the single-carrier problem.
//!
//! Every active subset of size at most `M` is solved exactly over a grid of
//! tail values by a monotone-sequence sweep, then the grid is refined around
//! the incumbent. The grid is geometric in `x + eta_min` up to the budget.
//! Rounding every tail of a continuous optimum down to the grid keeps the
//! tails monotone and loses at most `width * max |f'|` per term and cell.

use serde::{Deserialize, Serialize};

use super::expand_tails;
use crate::error::{Error, Result};
use crate::model::SingleCarrierView;

pub const DEFAULT_GRID_POINTS: usize = 20_000;
const REFINE_PASSES: usize = 3;
const REFINE_FACTOR: usize = 10;
const REFINE_HALF_WIDTH: usize = 5;
const MAX_SUBSETS: u128 = 100_000;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScOracleResult {
    pub value: f64,
    /// One tail per position of the view.
    pub tails: Vec<f64>,
    /// Certified upper bound on `optimum - value`.
    pub gap_bound: f64,
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

fn base_grid(view: &SingleCarrierView, budget: f64, points: usize) -> Vec<f64> {
    if budget <= 0.0 {
        return vec![0.0];
    }
    // geometric in `x + eta_min`, so every cell has the same width relative
    // to the steepest log term
    let eta_min = view.users.iter().map(|u| u.eta).fold(f64::INFINITY, f64::min);
    let steps = points.max(2) - 1;
    let log_ratio = (budget / eta_min).ln_1p() / steps as f64;
    let mut grid: Vec<f64> = (0..steps)
        .map(|c| eta_min * (c as f64 * log_ratio).exp_m1())
        .collect();
    grid.push(budget);
    grid.retain(|&g| g <= budget);
    grid.dedup();
    grid
}

fn log_table(view: &SingleCarrierView, grid: &[f64]) -> Vec<Vec<f64>> {
    view.users
        .iter()
        .map(|u| grid.iter().map(|&x| (x + u.eta).log2()).collect())
        .collect()
}

/// Best monotone grid assignment for an ordered subset; returns the reduced
/// objective, the chosen tails and the certified rounding bound.
///
/// `logs[p][c]` must hold `log2(grid[c] + eta_p)` for every position `p`.
fn solve_subset(
    view: &SingleCarrierView,
    subset: &[usize],
    grid: &[f64],
    logs: &[Vec<f64>],
) -> (f64, Vec<f64>, f64) {
    let g = grid.len();
    let s = subset.len();
    let inv_ln2 = std::f64::consts::LOG2_E;
    let w = view.bandwidth;

    // score[t][c] = best objective of the first t+1 subset users with the
    // (t+1)-th at grid cell c; arg[t][c] = cell of user t-1 achieving it.
    let mut prev_best: Vec<f64> = Vec::new();
    let mut args: Vec<Vec<usize>> = Vec::with_capacity(s);
    let mut gap = 0.0;
    for t in 0..s {
        let a = view.users[subset[t]];
        let b = (t > 0).then(|| view.users[subset[t - 1]]);
        let term = |c: usize| {
            let mut v = a.weight * logs[subset[t]][c];
            if let Some(b) = b {
                v -= b.weight * logs[subset[t - 1]][c];
            }
            w * v
        };
        // Lipschitz bound on each cell [grid[c], grid[c+1]].
        let mut worst: f64 = 0.0;
        for c in 0..g.saturating_sub(1) {
            let x = grid[c];
            // both log terms have positive slope, so the slope of their
            // difference is bounded by the larger one
            let mut d = a.weight / (x + a.eta);
            if let Some(b) = b {
                d = d.max(b.weight / (x + b.eta));
            }
            worst = worst.max(w * inv_ln2 * d * (grid[c + 1] - grid[c]));
        }
        gap += worst;

        let mut cur = vec![0.0; g];
        let mut arg = vec![usize::MAX; g];
        if t == 0 {
            for (c, slot) in cur.iter_mut().enumerate() {
                *slot = term(c);
            }
        } else {
            // suffix maximum of prev_best over cells >= c
            let mut best = f64::NEG_INFINITY;
            let mut best_c = g - 1;
            for c in (0..g).rev() {
                if prev_best[c] > best {
                    best = prev_best[c];
                    best_c = c;
                }
                cur[c] = term(c) + best;
                arg[c] = best_c;
            }
        }
        args.push(arg);
        prev_best = cur;
    }
    if s == 0 {
        return (0.0, Vec::new(), 0.0);
    }
    let (mut c, &val) = prev_best
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("grid is non-empty");
    let mut tails = vec![0.0; s];
    for t in (0..s).rev() {
        tails[t] = grid[c];
        c = args[t][c];
    }
    (val, tails, gap)
}

/// Local grid of points 10x finer than `grid` around each center, plus the
/// interval ends.
fn refine(grid: &[f64], centers: &[f64]) -> Vec<f64> {
    let mut out = vec![grid[0], grid[grid.len() - 1]];
    for &x in centers {
        let idx = grid.partition_point(|&g| g < x);
        let lo = idx.saturating_sub(REFINE_HALF_WIDTH);
        let hi = (idx + REFINE_HALF_WIDTH).min(grid.len() - 1);
        for c in lo..hi {
            let step = (grid[c + 1] - grid[c]) / REFINE_FACTOR as f64;
            for r in 0..=REFINE_FACTOR {
                out.push(grid[c] + r as f64 * step);
            }
        }
    }
    out.sort_by(f64::total_cmp);
    out.dedup();
    out
}

fn subsets(k: usize, max_size: usize, mut f: impl FnMut(&[usize])) {
    fn rec(start: usize, k: usize, left: usize, cur: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
        f(cur);
        if left == 0 {
            return;
        }
        for p in start..k {
            cur.push(p);
            rec(p + 1, k, left - 1, cur, f);
            cur.pop();
        }
    }
    rec(0, k, max_size, &mut Vec::new(), &mut f);
}

/// Exhaustive reference solution of the single-carrier problem with at most
/// `max_mux` active users and budget `budget`.
///
/// `grid_points` sets the size of the geometric base grid (at least 100).
/// Refuses views whose subset count exceeds an internal cap.
pub fn sc_oracle(
    view: &SingleCarrierView,
    budget: f64,
    max_mux: usize,
    grid_points: usize,
) -> Result<ScOracleResult> {
    if grid_points < 100 {
        return Err(Error::InvalidArgument(format!(
            "grid_points must be at least 100, got {grid_points}"
        )));
    }
    let k = view.len();
    let m = max_mux.min(k);
    let count: u128 = (0..=m).map(|s| binomial(k, s)).sum();
    if count > MAX_SUBSETS {
        return Err(Error::SearchTooLarge {
            required: count,
            cap: MAX_SUBSETS,
        });
    }
    let base = base_grid(view, budget, grid_points);
    let base_logs = log_table(view, &base);

    let mut best_value = view.value(&vec![0.0; k])?;
    let mut best_tails = vec![0.0; k];
    let mut gap_bound: f64 = 0.0;
    let mut result: Result<()> = Ok(());
    subsets(k, m, |subset| {
        if subset.is_empty() || result.is_err() {
            return;
        }
        let (mut local_value, mut local, bound) = solve_subset(view, subset, &base, &base_logs);
        gap_bound = gap_bound.max(bound);
        // Each pass searches only a finer neighbourhood of the incumbent, so
        // it can improve the value but never invalidates the bound above.
        let mut grid = base.clone();
        for _ in 0..REFINE_PASSES {
            grid = refine(&grid, &local);
            let logs = log_table(view, &grid);
            let (v, t, _) = solve_subset(view, subset, &grid, &logs);
            if v >= local_value {
                local_value = v;
                local = t;
            }
        }
        let full = expand_tails(k, subset, &local);
        match view.value(&full) {
            Ok(v) if v > best_value => {
                best_value = v;
                best_tails = full;
            }
            Ok(_) => {}
            Err(e) => result = Err(e),
        }
    });
    result?;
    Ok(ScOracleResult {
        value: best_value,
        tails: best_tails,
        gap_bound,
    })
}
