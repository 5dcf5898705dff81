//! Multi-carrier power control and joint allocation.
//!
//! The outer problem distributes per-subcarrier budgets over the capped
//! simplex by projected gradient ascent with an exact line search; the inner
//! problem is solved per subcarrier either for a fixed active set
//! ([`mcpc`]) or with user selection re-optimized at every query ([`jspa`]).

mod ascent;
mod ftpc;
mod line_search;
mod oracle;
mod projection;

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    decoding_order, powers_from_tails, user_rates, weighted_sum_rate, DecodingOrder, Instance,
    PowerMatrix, SingleCarrierView, TailVector,
};
use crate::ops::OpCounter;

pub use ascent::{
    jspa, mcpc, projected_ascent, second_stage_gradient, second_stage_value, AscentResult,
    SecondStage,
};
pub use ftpc::{ftpc, ftpc_with_decay, FTPC_DECAY};
pub use line_search::{golden_section_max, halving_scan_max};
pub use oracle::{exhaustive_oracle, grid_budget_oracle, GridOracleResult, OracleOptions};
pub use projection::{project_capped_simplex, BudgetVector};

/// Active users per subcarrier, each list sorted in decoding order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubcarrierAssignment {
    pub active: Vec<Vec<usize>>,
}

impl SubcarrierAssignment {
    /// Builds an assignment from arbitrary user lists, sorting each by the
    /// decoding order and checking the multiplexing limit.
    pub fn new(inst: &Instance, order: &DecodingOrder, mut active: Vec<Vec<usize>>) -> Result<Self> {
        if active.len() != inst.subcarriers {
            return Err(Error::InvalidArgument(format!(
                "assignment covers {} subcarriers, instance has {}",
                active.len(),
                inst.subcarriers
            )));
        }
        for (n, users) in active.iter_mut().enumerate() {
            if users.len() > inst.max_mux {
                return Err(Error::InvalidArgument(format!(
                    "subcarrier {n} has {} active users, limit is {}",
                    users.len(),
                    inst.max_mux
                )));
            }
            if let Some(&bad) = users.iter().find(|&&k| k >= inst.users) {
                return Err(Error::InvalidArgument(format!(
                    "subcarrier {n} references unknown user {bad}"
                )));
            }
            users.sort_by_key(|&k| order.pi_inv[n][k]);
            users.dedup();
        }
        Ok(SubcarrierAssignment { active })
    }

    /// Every user active on every subcarrier; ignores the multiplexing limit.
    pub fn full(order: &DecodingOrder) -> Self {
        SubcarrierAssignment {
            active: order.pi.clone(),
        }
    }

    /// The `M` users with the smallest normalized noise on each subcarrier.
    pub fn strongest(inst: &Instance, order: &DecodingOrder) -> Self {
        let m = inst.max_mux.min(inst.users);
        SubcarrierAssignment {
            active: order.pi.iter().map(|pi| pi[pi.len() - m..].to_vec()).collect(),
        }
    }

    /// Decoding positions of the active users on subcarrier `n`.
    pub fn positions(&self, order: &DecodingOrder, n: usize) -> Vec<usize> {
        self.active[n].iter().map(|&k| order.pi_inv[n][k]).collect()
    }
}

/// Knobs shared by [`mcpc`] and [`jspa`].
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct McpcOptions {
    /// Stop when the squared step length falls to this value (W^2).
    pub epsilon: f64,
    pub max_iterations: usize,
    /// Line-search bracket tolerance relative to `P_max`.
    pub line_search_tol: f64,
    pub keep_trace: bool,
}

impl Default for McpcOptions {
    fn default() -> Self {
        McpcOptions {
            epsilon: 1e-4,
            max_iterations: 10_000,
            line_search_tol: 1e-10,
            keep_trace: true,
        }
    }
}

impl McpcOptions {
    pub fn with_epsilon(epsilon: f64) -> Self {
        McpcOptions {
            epsilon,
            ..Self::default()
        }
    }
}

/// Multi-carrier solvers selectable by name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Solver {
    Jspa,
    /// Power control on [`SubcarrierAssignment::strongest`].
    Mcpc,
    Ftpc,
    Oracle,
}

impl Solver {
    pub fn name(self) -> &'static str {
        match self {
            Solver::Jspa => "jspa",
            Solver::Mcpc => "mcpc",
            Solver::Ftpc => "ftpc",
            Solver::Oracle => "oracle",
        }
    }

    pub fn solve(self, inst: &Instance, opts: &McpcOptions) -> Result<SolveReport> {
        match self {
            Solver::Jspa => jspa(inst, opts),
            Solver::Mcpc => {
                let order = decoding_order(inst);
                mcpc(inst, &SubcarrierAssignment::strongest(inst, &order), opts)
            }
            Solver::Ftpc => ftpc(inst),
            Solver::Oracle => exhaustive_oracle(inst, &OracleOptions::default()),
        }
    }
}

impl std::str::FromStr for Solver {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "jspa" => Ok(Solver::Jspa),
            "mcpc" => Ok(Solver::Mcpc),
            "ftpc" => Ok(Solver::Ftpc),
            "oracle" => Ok(Solver::Oracle),
            _ => Err(Error::InvalidArgument(format!(
                "unknown solver `{s}` (expected jspa, mcpc, ftpc or oracle)"
            ))),
        }
    }
}

impl std::fmt::Display for Solver {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Budgets and first-stage objective after one outer iteration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub iteration: usize,
    pub budgets: Vec<f64>,
    pub objective: f64,
}

/// Outcome of a multi-carrier solve.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolveReport {
    pub solver: String,
    pub powers: PowerMatrix,
    pub tails: TailVector,
    /// Weighted sum-rate of `powers`, bit/s.
    pub wsr: f64,
    /// Per-user rate summed over subcarriers, bit/s.
    pub user_rates: Vec<f64>,
    pub budgets: Vec<f64>,
    pub iterations: usize,
    pub ops: OpCounter,
    pub converged: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub trace: Vec<TraceRow>,
}

impl SolveReport {
    pub(crate) fn from_powers(
        solver: &str,
        inst: &Instance,
        order: &DecodingOrder,
        powers: PowerMatrix,
        ascent: Option<&AscentResult>,
        ops: OpCounter,
    ) -> Self {
        let tails = crate::model::tails_from_powers(order, &powers);
        let rates = user_rates(inst, order, &powers);
        let wsr = weighted_sum_rate(inst, order, &powers);
        let budgets = (0..inst.subcarriers).map(|n| powers.subcarrier_total(n)).collect();
        SolveReport {
            solver: solver.to_string(),
            powers,
            tails,
            wsr,
            user_rates: rates,
            budgets,
            iterations: ascent.map_or(0, |a| a.iterations),
            ops,
            converged: ascent.is_none_or(|a| a.converged),
            trace: ascent.map(|a| a.trace.clone()).unwrap_or_default(),
        }
    }

    /// Per-iteration budget trace as CSV with columns
    /// `iteration,n,budget,objective`.
    pub fn write_trace_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["iteration", "n", "budget", "objective"])?;
        for row in &self.trace {
            for (n, b) in row.budgets.iter().enumerate() {
                w.write_record([
                    row.iteration.to_string(),
                    n.to_string(),
                    format!("{b:.12e}"),
                    format!("{:.12e}", row.objective),
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    }

    /// Number of active users per subcarrier.
    pub fn active_counts(&self) -> Vec<usize> {
        (0..self.powers.subcarriers())
            .map(|n| self.powers.active_users(n).len())
            .collect()
    }
}

/// Assembles a power matrix from per-subcarrier tails over full views.
pub(crate) fn powers_from_view_tails(
    order: &DecodingOrder,
    rows: Vec<Vec<f64>>,
) -> PowerMatrix {
    let x = rows
        .into_iter()
        .map(|mut r| {
            r.push(0.0);
            r
        })
        .collect();
    powers_from_tails(order, &TailVector { x }).expect("solver tails are monotone")
}

pub(crate) fn full_views(inst: &Instance) -> (DecodingOrder, Vec<SingleCarrierView>) {
    let order = decoding_order(inst);
    let views = (0..inst.subcarriers)
        .map(|n| SingleCarrierView::new(inst, &order, n))
        .collect();
    (order, views)
}
