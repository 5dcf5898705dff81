use super::{
    full_views, halving_scan_max, powers_from_view_tails, project_capped_simplex, BudgetVector,
    McpcOptions, SolveReport, SubcarrierAssignment, TraceRow,
};
use crate::error::Result;
use crate::model::{Instance, SingleCarrierView};
use crate::ops::OpCounter;
use crate::single_carrier::{expand_tails, scpc_view, scus};

/// Optimal second-stage value `F(budget)` for a view whose users are the
/// active set.
pub fn second_stage_value(active_view: &SingleCarrierView, budget: f64, ops: &mut OpCounter) -> f64 {
    if active_view.is_empty() {
        return 0.0;
    }
    let tails = scpc_view(active_view, budget, ops);
    active_view
        .value(&tails)
        .expect("power control output is monotone")
}

/// Right derivative of [`second_stage_value`] at `budget`.
///
/// The allocation at any budget equals the allocation at the cap clipped to
/// the budget, so only the leading users whose uncapped tail exceeds `budget`
/// move with it; together they form one merged segment.
pub fn second_stage_gradient(
    active_view: &SingleCarrierView,
    budget: f64,
    cap: f64,
    ops: &mut OpCounter,
) -> f64 {
    if active_view.is_empty() {
        return 0.0;
    }
    let uncapped = scpc_view(active_view, cap, ops);
    let lead = uncapped.iter().take_while(|&&x| x > budget).count();
    ops.cmp(lead as u64 + 1);
    if lead == 0 {
        return 0.0;
    }
    ops.add(4);
    ops.mul(4);
    active_view.segment_derivative(0, lead - 1, budget)
}

/// Inner problem of the two-stage scheme, one per subcarrier.
pub trait SecondStage {
    fn carriers(&self) -> usize;
    fn value(&self, n: usize, budget: f64, ops: &mut OpCounter) -> f64;
    fn gradient(&self, n: usize, budget: f64, ops: &mut OpCounter) -> f64;
}

#[derive(Debug, Clone)]
pub struct AscentResult {
    pub budgets: BudgetVector,
    pub objective: f64,
    pub iterations: usize,
    pub converged: bool,
    pub trace: Vec<TraceRow>,
}

fn total_value(stage: &impl SecondStage, b: &[f64], ops: &mut OpCounter) -> f64 {
    b.iter().enumerate().map(|(n, &x)| stage.value(n, x, ops)).sum()
}

/// Projected gradient ascent on `sum_n F_n(b_n)` over the capped simplex,
/// starting from zero, with a line search on the projected path.
pub fn projected_ascent(
    stage: &impl SecondStage,
    p_max: f64,
    caps: &[f64],
    opts: &McpcOptions,
    ops: &mut OpCounter,
) -> AscentResult {
    let nsc = stage.carriers();
    let mut budgets = BudgetVector::zeros(nsc);
    let mut objective = total_value(stage, &budgets.budget, ops);
    let mut trace = Vec::new();
    let mut converged = false;
    let mut iterations = 0;

    while iterations < opts.max_iterations {
        iterations += 1;
        let direction: Vec<f64> = (0..nsc)
            .map(|n| stage.gradient(n, budgets.budget[n], ops))
            .collect();

        // Largest step after which every moving coordinate has left the box.
        let mut alpha_max: f64 = 0.0;
        let mut dir_norm: f64 = 0.0;
        for n in 0..nsc {
            let d = direction[n];
            dir_norm = dir_norm.max(d.abs());
            let room = if d > 0.0 {
                caps[n] - budgets.budget[n]
            } else if d < 0.0 {
                budgets.budget[n]
            } else {
                continue;
            };
            alpha_max = alpha_max.max(room / d.abs());
        }

        let mut next = budgets.clone();
        if alpha_max > 0.0 && dir_norm > 0.0 {
            let tol = opts.line_search_tol * p_max / dir_norm;
            let point = |alpha: f64| {
                let y: Vec<f64> = budgets
                    .budget
                    .iter()
                    .zip(&direction)
                    .map(|(b, d)| b + alpha * d)
                    .collect();
                project_capped_simplex(&y, p_max, caps)
            };
            let mut search_ops = OpCounter::new();
            let (alpha, value) = halving_scan_max(
                |alpha| total_value(stage, &point(alpha).budget, &mut search_ops),
                alpha_max,
                tol,
            );
            ops.merge(&search_ops);
            if alpha > 0.0 && value > objective {
                next = point(alpha);
                objective = value;
            }
        }

        let step = budgets.squared_distance(&next);
        budgets = next;
        if opts.keep_trace {
            trace.push(TraceRow {
                iteration: iterations,
                budgets: budgets.budget.clone(),
                objective,
            });
        }
        if step <= opts.epsilon {
            converged = true;
            break;
        }
    }

    AscentResult {
        budgets,
        objective,
        iterations,
        converged,
        trace,
    }
}

struct FixedAssignment {
    views: Vec<SingleCarrierView>,
    caps: Vec<f64>,
}

impl SecondStage for FixedAssignment {
    fn carriers(&self) -> usize {
        self.views.len()
    }

    fn value(&self, n: usize, budget: f64, ops: &mut OpCounter) -> f64 {
        second_stage_value(&self.views[n], budget, ops)
    }

    fn gradient(&self, n: usize, budget: f64, ops: &mut OpCounter) -> f64 {
        second_stage_gradient(&self.views[n], budget, self.caps[n], ops)
    }
}

/// Optimal multi-carrier power control for a fixed subcarrier assignment.
pub fn mcpc(inst: &Instance, assignment: &SubcarrierAssignment, opts: &McpcOptions) -> Result<SolveReport> {
    inst.validate()?;
    let (order, full) = full_views(inst);
    let assignment = SubcarrierAssignment::new(inst, &order, assignment.active.clone())?;
    let positions: Vec<Vec<usize>> = (0..inst.subcarriers)
        .map(|n| assignment.positions(&order, n))
        .collect();
    let stage = FixedAssignment {
        views: full
            .iter()
            .zip(&positions)
            .map(|(v, p)| v.restrict(p))
            .collect(),
        caps: inst.p_max_n.clone(),
    };
    let mut ops = OpCounter::new();
    let ascent = projected_ascent(&stage, inst.p_max, &inst.p_max_n, opts, &mut ops);

    let rows = (0..inst.subcarriers)
        .map(|n| {
            let active = scpc_view(&stage.views[n], ascent.budgets.budget[n], &mut ops);
            expand_tails(inst.users, &positions[n], &active)
        })
        .collect();
    let powers = powers_from_view_tails(&order, rows);
    Ok(SolveReport::from_powers("mcpc", inst, &order, powers, Some(&ascent), ops))
}

struct UserSelection {
    views: Vec<SingleCarrierView>,
    caps: Vec<f64>,
    max_mux: usize,
}

impl SecondStage for UserSelection {
    fn carriers(&self) -> usize {
        self.views.len()
    }

    fn value(&self, n: usize, budget: f64, ops: &mut OpCounter) -> f64 {
        scus(&self.views[n], budget, self.max_mux, ops).value
    }

    fn gradient(&self, n: usize, budget: f64, ops: &mut OpCounter) -> f64 {
        let view = &self.views[n];
        let mut active = scus(view, budget, self.max_mux, ops).active_positions();
        if active.is_empty() {
            // Nothing is selected at a zero budget; take the selection an
            // infinitesimal budget would make.
            let probe = self.caps[n] * PROBE_FRACTION;
            active = scus(view, probe, self.max_mux, ops).active_positions();
        }
        second_stage_gradient(&view.restrict(&active), budget, self.caps[n], ops)
    }
}

const PROBE_FRACTION: f64 = 1e-9;

/// Joint subcarrier and power allocation heuristic: the outer ascent of
/// [`mcpc`] with user selection re-optimized by the dynamic program at every
/// budget query. The gradient at a budget is taken for the selection made
/// at that budget.
pub fn jspa(inst: &Instance, opts: &McpcOptions) -> Result<SolveReport> {
    inst.validate()?;
    let (order, views) = full_views(inst);
    let stage = UserSelection {
        views,
        caps: inst.p_max_n.clone(),
        max_mux: inst.max_mux,
    };
    let mut ops = OpCounter::new();
    let ascent = projected_ascent(&stage, inst.p_max, &inst.p_max_n, opts, &mut ops);
    let rows = (0..inst.subcarriers)
        .map(|n| scus(&stage.views[n], ascent.budgets.budget[n], inst.max_mux, &mut ops).tails)
        .collect();
    let powers = powers_from_view_tails(&order, rows);
    Ok(SolveReport::from_powers("jspa", inst, &order, powers, Some(&ascent), ops))
}
