//! Single-carrier solvers: the segment maximizer, optimal power control for a
//! fixed active set, and optimal user selection by dynamic programming.
//!
//! All functions take positions in the view's decoding order, zero-based.

mod oracle;
mod scus;

pub use oracle::{sc_oracle, ScOracleResult, DEFAULT_GRID_POINTS};
pub use scus::{scus, DpTables, ScusOutput};

use crate::error::Result;
use crate::model::SingleCarrierView;
use crate::ops::OpCounter;

/// Maximizer of the merged term `f_{j,i}` on `[0, budget]`.
///
/// With `j == 0` or a later-decoded weight at least the earlier one the
/// segment is increasing and the budget is returned. Otherwise the segment is
/// unimodal with peak
/// `c1 = (w_b * eta_a - w_a * eta_b) / (w_a - w_b)` where `a` is position `i`
/// and `b` is position `j - 1`; the peak is clamped into the interval.
pub fn max_f(view: &SingleCarrierView, j: usize, i: usize, budget: f64, ops: &mut OpCounter) -> f64 {
    debug_assert!(j <= i && i < view.len());
    if j == 0 {
        return budget;
    }
    let a = &view.users[i];
    let b = &view.users[j - 1];
    ops.cmp(1);
    if a.weight >= b.weight {
        return budget;
    }
    ops.mul(3);
    ops.add(2);
    ops.cmp(2);
    let c1 = (b.weight * a.eta - a.weight * b.eta) / (a.weight - b.weight);
    c1.min(budget).max(0.0)
}

/// Optimal power control on a view whose users are exactly the active set.
///
/// Walks the users in decoding order, giving each its own maximizer and
/// merging it backwards with earlier tails while it would exceed them. The
/// result is non-increasing and bounded by `budget`.
pub fn scpc_view(view: &SingleCarrierView, budget: f64, ops: &mut OpCounter) -> Vec<f64> {
    let n = view.len();
    let mut x = vec![0.0; n];
    for i in 0..n {
        let mut best = max_f(view, i, i, budget, ops);
        let mut j = i;
        // `j` is one past the candidate predecessor position
        while j > 0 {
            ops.cmp(1);
            if x[j - 1] >= best {
                break;
            }
            best = max_f(view, j - 1, i, budget, ops);
            j -= 1;
        }
        for t in &mut x[j..=i] {
            *t = best;
        }
    }
    x
}

/// Optimal power control for the active positions `active` (ascending) of
/// `view`. Returns one tail per active user.
pub fn scpc(view: &SingleCarrierView, active: &[usize], budget: f64, ops: &mut OpCounter) -> Vec<f64> {
    scpc_view(&view.restrict(active), budget, ops)
}

/// Objective of the single-carrier problem for the given tails.
pub fn sc_value(view: &SingleCarrierView, tails: &[f64]) -> Result<f64> {
    view.value(tails)
}

/// Expands tails of an active subset back to every position of `view`.
/// Inactive positions take the tail of the next active one.
pub fn expand_tails(view_len: usize, active: &[usize], active_tails: &[f64]) -> Vec<f64> {
    let mut full = vec![0.0; view_len];
    let mut prev = 0;
    for (&pos, &t) in active.iter().zip(active_tails) {
        for slot in &mut full[prev..=pos] {
            *slot = t;
        }
        prev = pos + 1;
    }
    full
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ops() -> OpCounter {
        OpCounter::new()
    }

    #[test]
    fn max_f_increasing_branches() {
        let v = SingleCarrierView::from_pairs(1.0, &[(2.0, 4.0), (1.0, 1.0)]);
        assert_eq!(max_f(&v, 0, 1, 0.7, &mut ops()), 0.7);
        let eq = SingleCarrierView::from_pairs(1.0, &[(1.0, 4.0), (1.0, 1.0)]);
        assert_eq!(max_f(&eq, 1, 1, 0.7, &mut ops()), 0.7);
    }

    #[test]
    fn max_f_unimodal_peak() {
        // w_a = 1, w_b = 2, eta_a = 1, eta_b = 4: c1 = (2*1 - 1*4) / (1 - 2) = 2
        let v = SingleCarrierView::from_pairs(1.0, &[(2.0, 4.0), (1.0, 1.0)]);
        assert!((max_f(&v, 1, 1, 10.0, &mut ops()) - 2.0).abs() < 1e-15);
        assert_eq!(max_f(&v, 1, 1, 1.0, &mut ops()), 1.0);
    }

    #[test]
    fn max_f_negative_peak_clamps_to_zero() {
        // c1 = (2*3 - 1*4) / (1 - 2) = -2
        let v = SingleCarrierView::from_pairs(1.0, &[(2.0, 4.0), (1.0, 3.0)]);
        assert_eq!(max_f(&v, 1, 1, 5.0, &mut ops()), 0.0);
    }

    #[test]
    fn scpc_single_user_takes_budget() {
        let v = SingleCarrierView::from_pairs(1.0, &[(0.3, 0.1)]);
        assert_eq!(scpc_view(&v, 0.8, &mut ops()), vec![0.8]);
    }

    #[test]
    fn scpc_equal_weights_all_at_budget() {
        let v = SingleCarrierView::from_pairs(1.0, &[(1.0, 4.0), (1.0, 2.0), (1.0, 0.5)]);
        assert_eq!(scpc_view(&v, 2.0, &mut ops()), vec![2.0; 3]);
    }

    #[test]
    fn scpc_empty() {
        let v = SingleCarrierView::from_pairs(1.0, &[]);
        assert!(scpc_view(&v, 1.0, &mut ops()).is_empty());
    }

    #[test]
    fn expand_fills_gaps() {
        assert_eq!(expand_tails(5, &[1, 3], &[2.0, 1.0]), vec![2.0, 2.0, 1.0, 1.0, 0.0]);
        assert_eq!(expand_tails(2, &[], &[]), vec![0.0, 0.0]);
    }
}
