use super::SolveReport;
use crate::error::Result;
use crate::model::{decoding_order, normalized_noise, Instance, PowerMatrix};
use crate::ops::OpCounter;

/// Decay exponent of fractional transmit power control.
pub const FTPC_DECAY: f64 = 0.4;

/// Fractional transmit power control with greedy subcarrier allocation.
pub fn ftpc(inst: &Instance) -> Result<SolveReport> {
    ftpc_with_decay(inst, FTPC_DECAY)
}

/// Every subcarrier gets `min(P_max / N, P_max_n)`. It is given to the `M`
/// users with the best weighted single-user rate at that budget (with equal
/// weights: the smallest normalized noises), split in proportion to
/// `eta^decay` so weaker users receive more.
pub fn ftpc_with_decay(inst: &Instance, decay: f64) -> Result<SolveReport> {
    inst.validate()?;
    let order = decoding_order(inst);
    let mut powers = PowerMatrix::zeros(inst.users, inst.subcarriers);
    let mut ops = OpCounter::new();
    for n in 0..inst.subcarriers {
        let budget = (inst.p_max / inst.subcarriers as f64).min(inst.p_max_n[n]);
        let eta: Vec<f64> = (0..inst.users).map(|k| normalized_noise(inst, k, n)).collect();
        let score: Vec<f64> = (0..inst.users)
            .map(|k| inst.weights[k] * (budget / eta[k]).ln_1p())
            .collect();
        ops.add(inst.users as u64 * 2);
        ops.mul(inst.users as u64 * 3);
        let mut users: Vec<usize> = (0..inst.users).collect();
        users.sort_by(|&a, &b| score[b].total_cmp(&score[a]).then(a.cmp(&b)));
        users.truncate(inst.max_mux);
        let shares: Vec<f64> = users.iter().map(|&k| eta[k].powf(decay)).collect();
        let total: f64 = shares.iter().sum();
        for (&k, s) in users.iter().zip(&shares) {
            powers.p[k][n] = budget * s / total;
        }
    }
    Ok(SolveReport::from_powers("ftpc", inst, &order, powers, None, ops))
}
