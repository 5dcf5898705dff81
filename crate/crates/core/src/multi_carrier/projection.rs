use serde::{Deserialize, Serialize};

/// Per-subcarrier power budgets in watts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BudgetVector {
    pub budget: Vec<f64>,
}

impl BudgetVector {
    pub fn zeros(n: usize) -> Self {
        BudgetVector {
            budget: vec![0.0; n],
        }
    }

    pub fn total(&self) -> f64 {
        self.budget.iter().sum()
    }

    /// Membership in `{b : sum b <= p_max, 0 <= b[n] <= caps[n]}`.
    pub fn is_feasible(&self, p_max: f64, caps: &[f64]) -> bool {
        self.total() <= p_max
            && self
                .budget
                .iter()
                .zip(caps)
                .all(|(&b, &c)| (0.0..=c).contains(&b))
    }

    pub fn squared_distance(&self, other: &BudgetVector) -> f64 {
        self.budget
            .iter()
            .zip(&other.budget)
            .map(|(a, b)| (a - b) * (a - b))
            .sum()
    }
}

fn clamped_sum(y: &[f64], caps: &[f64], tau: f64) -> f64 {
    y.iter()
        .zip(caps)
        .map(|(&v, &c)| (v - tau).clamp(0.0, c))
        .sum()
}

/// Euclidean projection onto the capped simplex
/// `{b : sum b <= p_max, 0 <= b[n] <= caps[n]}`.
///
/// The result is `clamp(y - tau, 0, caps)` with `tau = 0` when that already
/// fits the total budget, otherwise the shift making the sum equal `p_max`,
/// found by bisection and then solved exactly on the final active set.
pub fn project_capped_simplex(y: &[f64], p_max: f64, caps: &[f64]) -> BudgetVector {
    debug_assert_eq!(y.len(), caps.len());
    if clamped_sum(y, caps, 0.0) <= p_max {
        return BudgetVector {
            budget: y.iter().zip(caps).map(|(&v, &c)| v.clamp(0.0, c)).collect(),
        };
    }
    // sum(tau) is non-increasing; sum(0) > p_max and sum(max y) = 0.
    let mut lo = 0.0;
    let mut hi = y.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= 1e-12 || mid <= lo || mid >= hi {
            break;
        }
        if clamped_sum(y, caps, mid) > p_max {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // Exact shift on the coordinates that are strictly inside their box at `hi`.
    let (mut free_sum, mut free_count, mut fixed) = (0.0, 0usize, 0.0);
    for (&v, &c) in y.iter().zip(caps) {
        let z = v - hi;
        if z >= c {
            fixed += c;
        } else if z > 0.0 {
            free_sum += v;
            free_count += 1;
        }
    }
    let mut tau = hi;
    if free_count > 0 {
        let exact = (free_sum - (p_max - fixed)) / free_count as f64;
        if (lo..=hi).contains(&exact) && clamped_sum(y, caps, exact) <= p_max {
            tau = exact;
        }
    }
    let budget: Vec<f64> = y
        .iter()
        .zip(caps)
        .map(|(&v, &c)| (v - tau).clamp(0.0, c))
        .collect();
    BudgetVector { budget }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &[f64], b: &[f64]) -> bool {
        a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-12)
    }

    #[test]
    fn symmetric_split() {
        let p = project_capped_simplex(&[0.6, 0.6], 1.0, &[1.0, 1.0]);
        assert!(close(&p.budget, &[0.5, 0.5]));
    }

    #[test]
    fn clamps_only() {
        let p = project_capped_simplex(&[2.0, -1.0], 1.0, &[1.0, 1.0]);
        assert!(close(&p.budget, &[1.0, 0.0]));
    }

    #[test]
    fn shift_then_clamp() {
        let y = [0.8, 0.1];
        let p = project_capped_simplex(&y, 0.7, &[1.0, 1.0]);
        assert!(close(&p.budget, &[0.7, 0.0]));
        // KKT: tau = 0.1 is the multiplier; free coordinate has y - b = tau,
        // the zero coordinate has y - 0 <= tau.
        let tau = y[0] - p.budget[0];
        assert!((tau - 0.1).abs() <= 1e-10);
        assert!(y[1] <= tau + 1e-10);
        assert!((p.total() - 0.7).abs() <= 1e-10);
    }

    #[test]
    fn respects_caps_under_shift() {
        let p = project_capped_simplex(&[5.0, 5.0, 0.2], 1.0, &[0.3, 2.0, 2.0]);
        assert!(p.is_feasible(1.0, &[0.3, 2.0, 2.0]));
        assert!((p.total() - 1.0).abs() < 1e-12);
        assert!((p.budget[0] - 0.3).abs() < 1e-12);
    }
}
