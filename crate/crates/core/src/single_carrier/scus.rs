use serde::{Deserialize, Serialize};

use super::max_f;
use crate::model::SingleCarrierView;
use crate::ops::OpCounter;

/// Tables of the user-selection dynamic program.
///
/// Indices follow the one-based convention of the recurrence: `j` and `i`
/// range over `1..=K` (position `p` of the view is index `p + 1`) and index
/// `0` is the all-zero sentinel row. Cell `(m, j, i)` holds the best gain over
/// the all-zero allocation when at most `m` users are active, tails `j..=i`
/// are equal and every tail after `i` is zero.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DpTables {
    pub max_mux: usize,
    pub users: usize,
    /// Optimal restricted gain.
    pub v: Vec<f64>,
    /// Common tail of `j..=i` at the optimum, in watts.
    pub x: Vec<f64>,
    /// Backtracking pointer to the cell the value came from.
    pub u: Vec<[u32; 3]>,
}

impl DpTables {
    fn new(max_mux: usize, users: usize) -> Self {
        let len = (max_mux + 1) * (users + 1) * (users + 1);
        DpTables {
            max_mux,
            users,
            v: vec![0.0; len],
            x: vec![0.0; len],
            u: vec![[0; 3]; len],
        }
    }

    #[inline]
    pub fn index(&self, m: usize, j: usize, i: usize) -> usize {
        (m * (self.users + 1) + j) * (self.users + 1) + i
    }

    #[inline]
    pub fn value(&self, m: usize, j: usize, i: usize) -> f64 {
        self.v[self.index(m, j, i)]
    }

    #[inline]
    pub fn tail(&self, m: usize, j: usize, i: usize) -> f64 {
        self.x[self.index(m, j, i)]
    }

    #[inline]
    pub fn back(&self, m: usize, j: usize, i: usize) -> (usize, usize, usize) {
        let [a, b, c] = self.u[self.index(m, j, i)];
        (a as usize, b as usize, c as usize)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScusOutput {
    /// One tail per position of the view.
    pub tails: Vec<f64>,
    /// Objective value of `tails` (same scale as [`SingleCarrierView::value`]).
    pub value: f64,
    pub tables: DpTables,
}

impl ScusOutput {
    pub fn active_positions(&self) -> Vec<usize> {
        SingleCarrierView::active_positions(&self.tails)
    }
}

/// Optimal power allocation on one carrier with at most `max_mux` active
/// users and total power at most `budget`.
///
/// `max_mux` larger than the number of users is clamped. With `max_mux == 0`
/// the all-zero allocation is returned.
pub fn scus(view: &SingleCarrierView, budget: f64, max_mux: usize, ops: &mut OpCounter) -> ScusOutput {
    let k = view.len();
    let m_max = max_mux.min(k);
    let mut t = DpTables::new(m_max, k);

    // Rows m = 0 and j = 0 are the zero allocation, already in place.
    for j in 1..=k {
        for i in j..=k {
            let x_star = max_f(view, j - 1, i - 1, budget, ops);
            ops.cmp(1);
            let positive = 0.0 < x_star;
            // Gain of raising tails j..=i from zero to x_star, computed at most once.
            let mut gain: Option<f64> = None;
            for m in 1..=m_max {
                let v0 = t.value(m, j - 1, j - 1);
                let v2 = t.value(m, j - 1, i);
                // For j == 1 the only bound on the segment is the budget, which
                // max_f already enforces.
                let guard = positive && {
                    if j == 1 {
                        true
                    } else {
                        ops.cmp(1);
                        x_star < t.tail(m - 1, j - 1, j - 1)
                    }
                };
                let cell = t.index(m, j, i);
                let mut chosen = false;
                if guard {
                    let g = *gain.get_or_insert_with(|| {
                        ops.add(5);
                        ops.mul(7);
                        view.segment(j - 1, i - 1, x_star) - view.segment(j - 1, i - 1, 0.0)
                    });
                    ops.add(1);
                    let v1 = t.value(m - 1, j - 1, j - 1) + g;
                    ops.cmp(2);
                    if v1 >= v0 && v1 >= v2 {
                        t.v[cell] = v1;
                        t.x[cell] = x_star;
                        t.u[cell] = [(m - 1) as u32, (j - 1) as u32, (j - 1) as u32];
                        chosen = true;
                    }
                }
                if !chosen {
                    ops.cmp(1);
                    if v2 >= v0 {
                        t.v[cell] = v2;
                        t.x[cell] = t.tail(m, j - 1, i);
                        t.u[cell] = [m as u32, (j - 1) as u32, i as u32];
                    } else {
                        t.v[cell] = v0;
                        t.x[cell] = 0.0;
                        t.u[cell] = [m as u32, (j - 1) as u32, (j - 1) as u32];
                    }
                }
            }
        }
    }

    let mut tails = vec![0.0; k];
    if k > 0 && m_max > 0 {
        let (mut m, mut j, mut i) = (m_max, k, k);
        loop {
            let x = t.tail(m, j, i);
            for slot in &mut tails[j.max(1) - 1..i] {
                *slot = x;
            }
            (m, j, i) = t.back(m, j, i);
            if (m, j, i) == (0, 0, 0) {
                break;
            }
        }
    }
    let value = view
        .value(&tails)
        .expect("backtracked tails are monotone by construction");
    ScusOutput {
        tails,
        value,
        tables: t,
    }
}
