//! Problem data, SIC decoding order, Shannon rates and the cumulative-tail
//! change of variables.
//!
//! Powers are in watts, bandwidth in Hz and rates in bit/s. Users are indexed
//! `0..K` and subcarriers `0..N`. Decoding positions are also zero-based:
//! position `0` is decoded first (highest normalized noise).

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Full data of one weighted sum-rate problem.
///
/// The JSON form uses the field names `K, N, M, W_n, P_max, P_max_n, weights,
/// gains, noises`, with `gains[k][n]` and `noises[k][n]` row-major per user.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    #[serde(rename = "K")]
    pub users: usize,
    #[serde(rename = "N")]
    pub subcarriers: usize,
    /// Maximum number of users multiplexed on one subcarrier.
    #[serde(rename = "M")]
    pub max_mux: usize,
    /// Bandwidth of each subcarrier in Hz.
    #[serde(rename = "W_n")]
    pub bandwidth: f64,
    #[serde(rename = "P_max")]
    pub p_max: f64,
    #[serde(rename = "P_max_n")]
    pub p_max_n: Vec<f64>,
    pub weights: Vec<f64>,
    pub gains: Vec<Vec<f64>>,
    pub noises: Vec<Vec<f64>>,
}

fn positive(field: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::field(field, format!("must be finite and > 0, got {v}")))
    }
}

impl Instance {
    pub fn validate(&self) -> Result<()> {
        let (k, n) = (self.users, self.subcarriers);
        if k == 0 {
            return Err(Error::field("K", "must be at least 1"));
        }
        if n == 0 {
            return Err(Error::field("N", "must be at least 1"));
        }
        if self.max_mux == 0 || self.max_mux > k {
            return Err(Error::field(
                "M",
                format!("must satisfy 1 <= M <= K = {k}, got {}", self.max_mux),
            ));
        }
        positive("W_n", self.bandwidth)?;
        positive("P_max", self.p_max)?;
        if self.p_max_n.len() != n {
            return Err(Error::field(
                "P_max_n",
                format!("expected {n} entries, got {}", self.p_max_n.len()),
            ));
        }
        for (i, &cap) in self.p_max_n.iter().enumerate() {
            positive(&format!("P_max_n[{i}]"), cap)?;
        }
        if self.weights.len() != k {
            return Err(Error::field(
                "weights",
                format!("expected {k} entries, got {}", self.weights.len()),
            ));
        }
        for (i, &w) in self.weights.iter().enumerate() {
            positive(&format!("weights[{i}]"), w)?;
        }
        for (name, table) in [("gains", &self.gains), ("noises", &self.noises)] {
            if table.len() != k {
                return Err(Error::field(
                    name,
                    format!("expected {k} rows, got {}", table.len()),
                ));
            }
            for (u, row) in table.iter().enumerate() {
                if row.len() != n {
                    return Err(Error::field(
                        format!("{name}[{u}]"),
                        format!("expected {n} entries, got {}", row.len()),
                    ));
                }
                for (s, &v) in row.iter().enumerate() {
                    positive(&format!("{name}[{u}][{s}]"), v)?;
                }
            }
        }
        Ok(())
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let inst: Instance = serde_json::from_str(s)?;
        inst.validate()?;
        Ok(inst)
    }

    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_json_string(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Copy of this instance with different user weights.
    pub fn with_weights(&self, weights: Vec<f64>) -> Self {
        Instance {
            weights,
            ..self.clone()
        }
    }

    pub fn with_max_mux(&self, m: usize) -> Self {
        Instance {
            max_mux: m,
            ..self.clone()
        }
    }
}

/// Normalized noise power `eta / g` of user `k` on subcarrier `n`, in watts.
#[inline]
pub fn normalized_noise(inst: &Instance, k: usize, n: usize) -> f64 {
    inst.noises[k][n] / inst.gains[k][n]
}

/// SIC decoding order per subcarrier.
///
/// `pi[n][i]` is the user decoded at position `i`; `pi_inv[n][k]` is the
/// position of user `k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecodingOrder {
    pub pi: Vec<Vec<usize>>,
    pub pi_inv: Vec<Vec<usize>>,
}

impl DecodingOrder {
    pub fn subcarriers(&self) -> usize {
        self.pi.len()
    }

    pub fn users(&self) -> usize {
        self.pi.first().map_or(0, Vec::len)
    }
}

/// Sorts users on every subcarrier from highest to lowest normalized noise.
/// Equal noises keep ascending user index.
pub fn decoding_order(inst: &Instance) -> DecodingOrder {
    let k = inst.users;
    let mut pi = Vec::with_capacity(inst.subcarriers);
    let mut pi_inv = Vec::with_capacity(inst.subcarriers);
    for n in 0..inst.subcarriers {
        let eta: Vec<f64> = (0..k).map(|u| normalized_noise(inst, u, n)).collect();
        let mut perm: Vec<usize> = (0..k).collect();
        perm.sort_by(|&a, &b| eta[b].total_cmp(&eta[a]).then(a.cmp(&b)));
        let mut inv = vec![0; k];
        for (pos, &u) in perm.iter().enumerate() {
            inv[u] = pos;
        }
        pi.push(perm);
        pi_inv.push(inv);
    }
    DecodingOrder { pi, pi_inv }
}

/// Transmit powers `p[k][n]` in watts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerMatrix {
    pub p: Vec<Vec<f64>>,
}

impl PowerMatrix {
    pub fn zeros(users: usize, subcarriers: usize) -> Self {
        PowerMatrix {
            p: vec![vec![0.0; subcarriers]; users],
        }
    }

    pub fn users(&self) -> usize {
        self.p.len()
    }

    pub fn subcarriers(&self) -> usize {
        self.p.first().map_or(0, Vec::len)
    }

    /// Powers of all users on subcarrier `n`, indexed by user.
    pub fn column(&self, n: usize) -> Vec<f64> {
        self.p.iter().map(|row| row[n]).collect()
    }

    pub fn subcarrier_total(&self, n: usize) -> f64 {
        self.p.iter().map(|row| row[n]).sum()
    }

    pub fn total(&self) -> f64 {
        self.p.iter().flatten().sum()
    }

    /// Users with strictly positive power on subcarrier `n`.
    pub fn active_users(&self, n: usize) -> Vec<usize> {
        (0..self.users()).filter(|&k| self.p[k][n] > 0.0).collect()
    }
}

/// Achievable rate of user `k` on subcarrier `n` in bit/s under SIC.
///
/// `p_n` holds the powers of every user on subcarrier `n`, indexed by user.
pub fn user_rate(inst: &Instance, order: &DecodingOrder, n: usize, p_n: &[f64], k: usize) -> f64 {
    let pk = p_n[k];
    if pk <= 0.0 {
        return 0.0;
    }
    let pos = order.pi_inv[n][k];
    let interference: f64 = order.pi[n][pos + 1..].iter().map(|&u| p_n[u]).sum();
    let sinr = pk / (interference + normalized_noise(inst, k, n));
    inst.bandwidth * sinr.ln_1p() / std::f64::consts::LN_2
}

/// Per-user total rate summed over subcarriers, in bit/s.
pub fn user_rates(inst: &Instance, order: &DecodingOrder, p: &PowerMatrix) -> Vec<f64> {
    let mut rates = vec![0.0; inst.users];
    for n in 0..inst.subcarriers {
        let col = p.column(n);
        for (k, r) in rates.iter_mut().enumerate() {
            *r += user_rate(inst, order, n, &col, k);
        }
    }
    rates
}

pub fn weighted_sum_rate(inst: &Instance, order: &DecodingOrder, p: &PowerMatrix) -> f64 {
    user_rates(inst, order, p)
        .iter()
        .zip(&inst.weights)
        .map(|(r, w)| w * r)
        .sum()
}

/// Cumulative tail powers per subcarrier.
///
/// `x[n][i]` is the total power of users decoded at position `i` or later.
/// Each row has `K + 1` entries and the last one is always zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailVector {
    pub x: Vec<Vec<f64>>,
}

impl TailVector {
    /// Checks non-negativity, monotonicity and the trailing zero.
    pub fn new(x: Vec<Vec<f64>>) -> Result<Self> {
        for (n, row) in x.iter().enumerate() {
            match row.last() {
                Some(&last) if last == 0.0 => {}
                _ => {
                    return Err(Error::InvalidArgument(format!(
                        "tail row {n} must end with an explicit zero"
                    )))
                }
            }
            check_monotone(n, row)?;
        }
        Ok(TailVector { x })
    }

    /// Whether `x[n][0] <= caps[n]` on every subcarrier.
    pub fn within_caps(&self, caps: &[f64]) -> bool {
        self.x.iter().zip(caps).all(|(row, &c)| row[0] <= c)
    }

    /// Decoding positions `i` with `x[n][i] > x[n][i+1]`.
    pub fn active_positions(&self, n: usize) -> Vec<usize> {
        let row = &self.x[n];
        (0..row.len() - 1).filter(|&i| row[i] > row[i + 1]).collect()
    }
}

pub(crate) fn check_monotone(n: usize, row: &[f64]) -> Result<()> {
    for (i, w) in row.windows(2).enumerate() {
        if w[0] < w[1] {
            return Err(Error::NonMonotoneTails {
                subcarrier: n,
                position: i,
                lower: w[0],
                upper: w[1],
            });
        }
    }
    if let Some(&last) = row.last() {
        if last < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "negative tail on subcarrier {n}"
            )));
        }
    }
    Ok(())
}

pub fn tails_from_powers(order: &DecodingOrder, p: &PowerMatrix) -> TailVector {
    let k = order.users();
    let x = (0..order.subcarriers())
        .map(|n| {
            let mut row = vec![0.0; k + 1];
            for i in (0..k).rev() {
                row[i] = row[i + 1] + p.p[order.pi[n][i]][n];
            }
            row
        })
        .collect();
    TailVector { x }
}

pub fn powers_from_tails(order: &DecodingOrder, tails: &TailVector) -> Result<PowerMatrix> {
    let k = order.users();
    let nsc = order.subcarriers();
    let mut p = PowerMatrix::zeros(k, nsc);
    for n in 0..nsc {
        let row = &tails.x[n];
        if row.len() != k + 1 {
            return Err(Error::InvalidArgument(format!(
                "tail row {n} has {} entries, expected {}",
                row.len(),
                k + 1
            )));
        }
        check_monotone(n, row)?;
        for i in 0..k {
            p.p[order.pi[n][i]][n] = row[i] - row[i + 1];
        }
    }
    Ok(p)
}

/// One user on a single-carrier view, in decoding order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScUser {
    pub user: usize,
    pub weight: f64,
    /// Normalized noise power in watts.
    pub eta: f64,
}

/// A single subcarrier seen by the single-carrier solvers: bandwidth plus the
/// participating users sorted by decoding order.
///
/// A view may cover all users of the subcarrier or a restriction to an
/// active set; the segment functions are always defined over its own list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingleCarrierView {
    pub subcarrier: usize,
    pub bandwidth: f64,
    pub users: Vec<ScUser>,
}

const INV_LN2: f64 = std::f64::consts::LOG2_E;

impl SingleCarrierView {
    pub fn new(inst: &Instance, order: &DecodingOrder, n: usize) -> Self {
        let users = order.pi[n]
            .iter()
            .map(|&k| ScUser {
                user: k,
                weight: inst.weights[k],
                eta: normalized_noise(inst, k, n),
            })
            .collect();
        SingleCarrierView {
            subcarrier: n,
            bandwidth: inst.bandwidth,
            users,
        }
    }

    /// Builds a view directly from `(weight, eta)` pairs already in decoding
    /// order. User ids are the positions.
    pub fn from_pairs(bandwidth: f64, pairs: &[(f64, f64)]) -> Self {
        SingleCarrierView {
            subcarrier: 0,
            bandwidth,
            users: pairs
                .iter()
                .enumerate()
                .map(|(user, &(weight, eta))| ScUser { user, weight, eta })
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.users.len()
    }

    pub fn is_empty(&self) -> bool {
        self.users.is_empty()
    }

    /// Sub-view over the given positions (ascending).
    pub fn restrict(&self, positions: &[usize]) -> Self {
        SingleCarrierView {
            subcarrier: self.subcarrier,
            bandwidth: self.bandwidth,
            users: positions.iter().map(|&i| self.users[i]).collect(),
        }
    }

    /// Value of the merged term `f_{j,i}` at common tail `x`, i.e. the sum of
    /// terms `j..=i` when all their tails equal `x`.
    ///
    /// Evaluated as a difference of weighted logs so large weights cannot
    /// overflow.
    #[inline]
    pub fn segment(&self, j: usize, i: usize, x: f64) -> f64 {
        let a = &self.users[i];
        let mut v = a.weight * (x + a.eta).log2();
        if j > 0 {
            let b = &self.users[j - 1];
            v -= b.weight * (x + b.eta).log2();
        }
        self.bandwidth * v
    }

    #[inline]
    pub fn segment_derivative(&self, j: usize, i: usize, x: f64) -> f64 {
        let a = &self.users[i];
        let mut d = a.weight / (x + a.eta);
        if j > 0 {
            let b = &self.users[j - 1];
            d -= b.weight / (x + b.eta);
        }
        self.bandwidth * d * INV_LN2
    }

    /// The single term `f_i`.
    #[inline]
    pub fn term(&self, i: usize, x: f64) -> f64 {
        self.segment(i, i, x)
    }

    /// Objective over tails (one per position, implicit trailing zero),
    /// evaluated with one segment per run of equal tails.
    pub fn value(&self, tails: &[f64]) -> Result<f64> {
        self.check_tails(tails)?;
        let mut total = 0.0;
        let mut q = 0;
        while q < tails.len() {
            let mut end = q;
            while end + 1 < tails.len() && tails[end + 1] == tails[q] {
                end += 1;
            }
            total += self.segment(q, end, tails[q]);
            q = end + 1;
        }
        Ok(total)
    }

    /// Objective over tails summed term by term.
    pub fn value_termwise(&self, tails: &[f64]) -> Result<f64> {
        self.check_tails(tails)?;
        Ok(tails.iter().enumerate().map(|(i, &x)| self.term(i, x)).sum())
    }

    fn check_tails(&self, tails: &[f64]) -> Result<()> {
        if tails.len() != self.len() {
            return Err(Error::InvalidArgument(format!(
                "expected {} tails, got {}",
                self.len(),
                tails.len()
            )));
        }
        check_monotone(self.subcarrier, tails)
    }

    /// Constant separating the tail objective from the weighted sum-rate on
    /// this carrier: `W * w_last * log2(1 / eta_last)`.
    pub fn rate_offset(&self) -> f64 {
        match self.users.last() {
            Some(u) => self.bandwidth * u.weight * (1.0 / u.eta).log2(),
            None => 0.0,
        }
    }

    /// Weighted sum-rate on this carrier for the given tails.
    pub fn weighted_rate(&self, tails: &[f64]) -> Result<f64> {
        if self.is_empty() {
            return Ok(0.0);
        }
        Ok(self.value(tails)? + self.rate_offset())
    }

    /// Positions whose tail strictly exceeds the next one.
    pub fn active_positions(tails: &[f64]) -> Vec<usize> {
        (0..tails.len())
            .filter(|&i| tails[i] > tails.get(i + 1).copied().unwrap_or(0.0))
            .collect()
    }
}

/// Constant term dropped by the tail reformulation:
/// `sum_n W * w_last(n) * log2(1 / eta_last(n))`.
pub fn objective_offset(inst: &Instance, order: &DecodingOrder) -> f64 {
    (0..inst.subcarriers)
        .map(|n| SingleCarrierView::new(inst, order, n).rate_offset())
        .sum()
}

/// Separable tail objective `f(x) = sum_n sum_i f_i^n(x_i^n)`.
pub fn tail_objective(inst: &Instance, order: &DecodingOrder, tails: &TailVector) -> Result<f64> {
    let mut total = 0.0;
    for n in 0..inst.subcarriers {
        let view = SingleCarrierView::new(inst, order, n);
        let row = &tails.x[n];
        total += view.value_termwise(&row[..row.len() - 1])?;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn tiny(gains: Vec<Vec<f64>>, noises: Vec<Vec<f64>>, weights: Vec<f64>) -> Instance {
        let k = gains.len();
        let n = gains[0].len();
        Instance {
            users: k,
            subcarriers: n,
            max_mux: k,
            bandwidth: 1.0,
            p_max: 1.0,
            p_max_n: vec![1.0; n],
            weights,
            gains,
            noises,
        }
    }

    #[test]
    fn normalized_noise_divides() {
        let inst = tiny(vec![vec![1.0], vec![4.0]], vec![vec![2.0], vec![1.0]], vec![1.0, 1.0]);
        assert_eq!(normalized_noise(&inst, 0, 0), 2.0);
        assert_eq!(normalized_noise(&inst, 1, 0), 0.25);
    }

    #[test]
    fn decoding_order_sorts_descending() {
        let inst = tiny(
            vec![vec![1.0], vec![1.0], vec![1.0]],
            vec![vec![3.0], vec![1.0], vec![2.0]],
            vec![1.0; 3],
        );
        let order = decoding_order(&inst);
        assert_eq!(order.pi[0], vec![0, 2, 1]);
        assert_eq!(order.pi_inv[0], vec![0, 2, 1]);
    }

    #[test]
    fn decoding_order_ties_keep_index() {
        let inst = tiny(vec![vec![1.0]; 4], vec![vec![1.0]; 4], vec![1.0; 4]);
        assert_eq!(decoding_order(&inst).pi[0], vec![0, 1, 2, 3]);
    }

    #[test]
    fn single_user_unit_snr() {
        let inst = tiny(vec![vec![0.5]], vec![vec![1.0]], vec![2.0]);
        let order = decoding_order(&inst);
        let p = PowerMatrix { p: vec![vec![2.0]] };
        assert!((user_rate(&inst, &order, 0, &[2.0], 0) - 1.0).abs() < 1e-15);
        assert!((weighted_sum_rate(&inst, &order, &p) - 2.0).abs() < 1e-15);
        assert_eq!(user_rate(&inst, &order, 0, &[0.0], 0), 0.0);
    }

    #[test]
    fn two_user_rates_by_hand() {
        // user 0: eta~ = 2 (decoded first), user 1: eta~ = 0.5
        let inst = tiny(vec![vec![1.0], vec![2.0]], vec![vec![2.0], vec![1.0]], vec![1.0, 1.0]);
        let order = decoding_order(&inst);
        let p = [3.0, 1.0];
        // user 0 sees user 1 as interference: log2(1 + 3 / (1 + 2))
        assert!((user_rate(&inst, &order, 0, &p, 0) - 1.0).abs() < 1e-15);
        // user 1 cancels user 0: log2(1 + 1 / 0.5)
        assert!((user_rate(&inst, &order, 0, &p, 1) - 3f64.log2()).abs() < 1e-15);
    }

    #[test]
    fn zero_power_gives_zero_wsr() {
        let inst = tiny(vec![vec![1.0, 2.0]; 2], vec![vec![1.0, 1.0]; 2], vec![1.0, 3.0]);
        let order = decoding_order(&inst);
        assert_eq!(weighted_sum_rate(&inst, &order, &PowerMatrix::zeros(2, 2)), 0.0);
    }

    #[test]
    fn tails_cumsum_and_back() {
        let inst = tiny(vec![vec![1.0], vec![1.0]], vec![vec![2.0], vec![1.0]], vec![1.0, 1.0]);
        let order = decoding_order(&inst);
        let p = PowerMatrix { p: vec![vec![1.0], vec![2.0]] };
        let x = tails_from_powers(&order, &p);
        assert_eq!(x.x[0], vec![3.0, 2.0, 0.0]);
        let back = powers_from_tails(&order, &x).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn rejects_increasing_tails() {
        let inst = tiny(vec![vec![1.0], vec![1.0]], vec![vec![2.0], vec![1.0]], vec![1.0, 1.0]);
        let order = decoding_order(&inst);
        let bad = TailVector { x: vec![vec![1.0, 2.0, 0.0]] };
        assert!(matches!(
            powers_from_tails(&order, &bad),
            Err(Error::NonMonotoneTails { position: 0, .. })
        ));
        assert!(TailVector::new(vec![vec![1.0, 0.5, 0.1]]).is_err());
    }

    #[test]
    fn segment_values() {
        let v = SingleCarrierView::from_pairs(1.0, &[(1.0, 1.0)]);
        assert!((v.segment(0, 0, 1.0) - 1.0).abs() < 1e-15);
        let sym = SingleCarrierView::from_pairs(1.0, &[(2.0, 3.0), (2.0, 3.0)]);
        for x in [0.0, 0.3, 5.0] {
            assert_eq!(sym.segment(1, 1, x), 0.0);
        }
    }

    #[test]
    fn offset_examples() {
        let inst = tiny(vec![vec![1.0, 1.0]], vec![vec![1.0, 1.0]], vec![1.0]);
        assert_eq!(objective_offset(&inst, &decoding_order(&inst)), 0.0);
        let inst = tiny(vec![vec![2.0]], vec![vec![1.0]], vec![1.0]);
        assert!((objective_offset(&inst, &decoding_order(&inst)) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn value_rejects_non_monotone() {
        let v = SingleCarrierView::from_pairs(1.0, &[(1.0, 2.0), (1.0, 1.0)]);
        assert!(v.value(&[0.1, 0.5]).is_err());
        assert!(v.value(&[0.5]).is_err());
    }

    #[test]
    fn json_names_offending_field() {
        let inst = tiny(vec![vec![1.0]], vec![vec![1.0]], vec![1.0]);
        let mut json: serde_json::Value = serde_json::to_value(&inst).unwrap();
        json["weights"] = serde_json::json!([-1.0]);
        let err = Instance::from_json_str(&json.to_string()).unwrap_err();
        assert!(err.to_string().contains("weights[0]"), "{err}");
        let round = Instance::from_json_str(&inst.to_json_string().unwrap()).unwrap();
        assert_eq!(round, inst);
    }
}
