use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{full_views, mcpc, second_stage_value, McpcOptions, SolveReport, SubcarrierAssignment};
use crate::error::{Error, Result};
use crate::model::Instance;
use crate::ops::OpCounter;

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct OracleOptions {
    /// Maximum number of assignments to enumerate.
    pub cap: u128,
    pub mcpc: McpcOptions,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions {
            cap: 1_000_000,
            mcpc: McpcOptions {
                epsilon: 1e-10,
                keep_trace: false,
                ..McpcOptions::default()
            },
        }
    }
}

fn combinations(k: usize, m: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, k: usize, m: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == m {
            out.push(cur.clone());
            return;
        }
        for u in start..k {
            cur.push(u);
            rec(u + 1, k, m, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, k, m, &mut Vec::new(), &mut out);
    out
}

/// Best solution over every subcarrier assignment, each solved optimally by
/// [`mcpc`].
///
/// Only assignments with exactly `min(M, K)` users per subcarrier are
/// enumerated: power control on a superset can always switch the extra users
/// off, so smaller sets never win.
pub fn exhaustive_oracle(inst: &Instance, opts: &OracleOptions) -> Result<SolveReport> {
    inst.validate()?;
    let m = inst.max_mux.min(inst.users);
    let sets = combinations(inst.users, m);
    let required = (sets.len() as u128)
        .checked_pow(inst.subcarriers as u32)
        .unwrap_or(u128::MAX);
    if required > opts.cap {
        return Err(Error::SearchTooLarge {
            required,
            cap: opts.cap,
        });
    }
    let per = sets.len() as u128;
    let reports: Result<Vec<SolveReport>> = (0..required)
        .into_par_iter()
        .map(|mut code| {
            let active = (0..inst.subcarriers)
                .map(|_| {
                    let idx = (code % per) as usize;
                    code /= per;
                    sets[idx].clone()
                })
                .collect();
            mcpc(inst, &SubcarrierAssignment { active }, &opts.mcpc)
        })
        .collect();
    let mut ops = OpCounter::new();
    let mut best: Option<SolveReport> = None;
    for r in reports? {
        ops.merge(&r.ops);
        if best.as_ref().is_none_or(|b| r.wsr > b.wsr) {
            best = Some(r);
        }
    }
    let mut best = best.expect("at least one assignment");
    best.solver = "oracle".into();
    best.ops = ops;
    Ok(best)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridOracleResult {
    /// First-stage objective `sum_n F_n(b_n)`.
    pub objective: f64,
    /// Weighted sum-rate of the corresponding allocation.
    pub wsr: f64,
    pub budgets: Vec<f64>,
}

/// Max of `sum_n value[n][c_n]` over choices with `sum_n units[n][c_n] <= limit`.
/// `min_total` is a lower bound on every partial sum of units (zero or less).
fn knapsack(cands: &[Vec<(i64, f64)>], limit: i64, min_total: i64) -> Option<Vec<usize>> {
    // `best[t]` is the best value with running total `t + min_total`; partial
    // sums may exceed `limit` by up to `-min_total` before later negatives.
    let width = (limit - 2 * min_total + 1).max(0) as usize;
    if width == 0 || min_total > 0 {
        return None;
    }
    let mut best = vec![f64::NEG_INFINITY; width];
    best[(-min_total) as usize] = 0.0;
    let mut choice: Vec<Vec<(usize, usize)>> = Vec::with_capacity(cands.len());
    for list in cands {
        let mut next = vec![f64::NEG_INFINITY; width];
        let mut from = vec![(usize::MAX, usize::MAX); width];
        for (t, &v) in best.iter().enumerate() {
            if v == f64::NEG_INFINITY {
                continue;
            }
            for (c, &(u, val)) in list.iter().enumerate() {
                let nt = t as i64 + u;
                if nt < 0 || nt >= width as i64 {
                    continue;
                }
                let cand = v + val;
                if cand > next[nt as usize] {
                    next[nt as usize] = cand;
                    from[nt as usize] = (t, c);
                }
            }
        }
        choice.push(from);
        best = next;
    }
    let (mut t, _) = best
        .iter()
        .enumerate()
        .filter(|&(t, v)| *v > f64::NEG_INFINITY && t as i64 + min_total <= limit)
        .max_by(|a, b| a.1.total_cmp(b.1))?;
    let mut picks = vec![0; cands.len()];
    for n in (0..cands.len()).rev() {
        let (prev, c) = choice[n][t];
        picks[n] = c;
        t = prev;
    }
    Some(picks)
}

/// Reference optimum of the first stage for a fixed assignment: a discrete
/// budget allocation on a `grid_points`-step lattice of `P_max` solved
/// exactly by dynamic programming, then `refine_passes` rounds on a 10x finer
/// lattice around the incumbent.
pub fn grid_budget_oracle(
    inst: &Instance,
    assignment: &SubcarrierAssignment,
    grid_points: usize,
    refine_passes: usize,
) -> Result<GridOracleResult> {
    inst.validate()?;
    let (order, full) = full_views(inst);
    let assignment = SubcarrierAssignment::new(inst, &order, assignment.active.clone())?;
    let views: Vec<_> = (0..inst.subcarriers)
        .map(|n| full[n].restrict(&assignment.positions(&order, n)))
        .collect();
    let mut ops = OpCounter::new();
    let mut f = |n: usize, b: f64| second_stage_value(&views[n], b, &mut ops);

    let mut unit = inst.p_max / grid_points as f64;
    let limit = grid_points as i64;
    let cands: Vec<Vec<(i64, f64)>> = (0..inst.subcarriers)
        .map(|n| {
            let top = ((inst.p_max_n[n] / unit).floor() as i64).min(limit);
            (0..=top).map(|c| (c, f(n, c as f64 * unit))).collect()
        })
        .collect();
    let picks = knapsack(&cands, limit, 0).expect("zero allocation is feasible");
    let mut units: Vec<i64> = picks.iter().zip(&cands).map(|(&p, l)| l[p].0).collect();

    const WINDOW: i64 = 20;
    let mut scale = 1i64;
    for _ in 0..refine_passes {
        unit /= 10.0;
        scale *= 10;
        let base: Vec<i64> = units.iter().map(|u| u * 10).collect();
        let total_limit = limit * scale - base.iter().sum::<i64>();
        let cands: Vec<Vec<(i64, f64)>> = (0..inst.subcarriers)
            .map(|n| {
                let top = (inst.p_max_n[n] / unit).floor() as i64;
                (-WINDOW..=WINDOW)
                    .filter(|d| (0..=top).contains(&(base[n] + d)))
                    .map(|d| (d, f(n, (base[n] + d) as f64 * unit)))
                    .collect()
            })
            .collect();
        let min_total = -WINDOW * inst.subcarriers as i64;
        let picks = knapsack(&cands, total_limit.min(WINDOW * inst.subcarriers as i64), min_total)
            .expect("current incumbent is feasible");
        units = base
            .iter()
            .zip(picks.iter().zip(&cands))
            .map(|(b, (&p, l))| b + l[p].0)
            .collect();
    }
    let budgets: Vec<f64> = units.iter().map(|&u| u as f64 * unit).collect();
    let objective: f64 = budgets.iter().enumerate().map(|(n, &b)| f(n, b)).sum();
    let wsr = objective + views.iter().map(|v| v.rate_offset()).sum::<f64>();
    Ok(GridOracleResult {
        objective,
        wsr,
        budgets,
    })
}
