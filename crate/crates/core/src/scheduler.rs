//! Proportional fair scheduling over one frame with a fixed channel.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::Instance;
use crate::multi_carrier::{McpcOptions, Solver};

/// Frame length used when none is given.
pub const DEFAULT_SLOTS: usize = 20;
/// Lower bound on the initial average rate, bit/s.
pub const DEFAULT_RATE_FLOOR: f64 = 1e3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchedulerState {
    pub t: usize,
    pub avg_rate: Vec<f64>,
    pub weights: Vec<f64>,
    /// Rates served in each completed slot.
    pub history: Vec<Vec<f64>>,
}

impl SchedulerState {
    /// Starts from the given average rates, each raised to at least `floor`.
    pub fn new(initial_rates: &[f64], floor: f64) -> Self {
        let avg_rate: Vec<f64> = initial_rates.iter().map(|&r| r.max(floor)).collect();
        SchedulerState {
            t: 0,
            weights: avg_rate.iter().map(|r| 1.0 / r).collect(),
            avg_rate,
            history: Vec::new(),
        }
    }
}

/// Exponential moving average with window `slots`; weights become the
/// reciprocal averages.
pub fn pf_update(state: &SchedulerState, rates: &[f64], slots: usize) -> SchedulerState {
    let beta = 1.0 / slots as f64;
    let avg_rate: Vec<f64> = state
        .avg_rate
        .iter()
        .zip(rates)
        .map(|(&a, &r)| (1.0 - beta) * a + beta * r)
        .collect();
    let mut history = state.history.clone();
    history.push(rates.to_vec());
    SchedulerState {
        t: state.t + 1,
        weights: avg_rate.iter().map(|r| 1.0 / r).collect(),
        avg_rate,
        history,
    }
}

/// Mean of the natural log of the per-user mean rates.
pub fn fairness_index(mean_rates: &[f64]) -> Result<f64> {
    if mean_rates.is_empty() {
        return Err(Error::InvalidArgument("no users".into()));
    }
    let mut sum = 0.0;
    for (user, &r) in mean_rates.iter().enumerate() {
        if !(r > 0.0) {
            return Err(Error::UndefinedFairness { user });
        }
        sum += r.ln();
    }
    Ok(sum / mean_rates.len() as f64)
}

/// How the average rates are seeded before the first slot.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitRule {
    /// Rates of one solve with unit weights, raised to at least the floor.
    WarmUp,
    /// Every average starts at the floor.
    Floor,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct FrameConfig {
    pub solver: Solver,
    pub slots: usize,
    pub init: InitRule,
    pub rate_floor: f64,
    pub mcpc: McpcOptions,
}

impl FrameConfig {
    pub fn new(solver: Solver) -> Self {
        FrameConfig {
            solver,
            slots: DEFAULT_SLOTS,
            init: InitRule::Floor,
            rate_floor: DEFAULT_RATE_FLOOR,
            mcpc: McpcOptions {
                keep_trace: false,
                ..McpcOptions::default()
            },
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SlotRecord {
    /// One-based slot index.
    pub t: usize,
    pub rates: Vec<f64>,
    /// Averages after this slot's update.
    pub avg_rate: Vec<f64>,
    /// Weights the slot was solved with.
    pub weights: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FrameReport {
    pub solver: Solver,
    pub mean_rates: Vec<f64>,
    /// `None` when some user was never served.
    pub fairness_index: Option<f64>,
    pub sum_rate: f64,
    /// False if any slot's solve hit its iteration cap.
    pub converged: bool,
    pub slots: Vec<SlotRecord>,
}

/// Runs `cfg.slots` proportional-fair slots on `inst`, whose weights are
/// ignored.
pub fn run_frame(inst: &Instance, cfg: &FrameConfig) -> Result<FrameReport> {
    if cfg.slots == 0 {
        return Err(Error::InvalidArgument("frame needs at least one slot".into()));
    }
    let k = inst.users;
    let mut converged = true;
    let initial = match cfg.init {
        InitRule::WarmUp => {
            let warm = cfg.solver.solve(&inst.with_weights(vec![1.0; k]), &cfg.mcpc)?;
            converged = warm.converged;
            warm.user_rates
        }
        InitRule::Floor => vec![0.0; k],
    };
    let mut state = SchedulerState::new(&initial, cfg.rate_floor);
    let mut slots = Vec::with_capacity(cfg.slots);
    for t in 1..=cfg.slots {
        let weights = state.weights.clone();
        let report = cfg.solver.solve(&inst.with_weights(weights.clone()), &cfg.mcpc)?;
        converged &= report.converged;
        state = pf_update(&state, &report.user_rates, cfg.slots);
        slots.push(SlotRecord {
            t,
            rates: report.user_rates,
            avg_rate: state.avg_rate.clone(),
            weights,
        });
    }
    let mean_rates: Vec<f64> = (0..k)
        .map(|u| slots.iter().map(|s| s.rates[u]).sum::<f64>() / cfg.slots as f64)
        .collect();
    Ok(FrameReport {
        solver: cfg.solver,
        fairness_index: fairness_index(&mean_rates).ok(),
        sum_rate: mean_rates.iter().sum(),
        mean_rates,
        converged,
        slots,
    })
}

/// Per-slot rows `seed,t,k,rate,avg_rate,weight`.
pub fn write_frame_csv<W: Write>(out: W, frames: &[(u64, &FrameReport)]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["seed", "t", "k", "rate", "avg_rate", "weight"])?;
    for (seed, frame) in frames {
        for slot in &frame.slots {
            for k in 0..slot.rates.len() {
                w.write_record([
                    seed.to_string(),
                    slot.t.to_string(),
                    k.to_string(),
                    format!("{:.9e}", slot.rates[k]),
                    format!("{:.9e}", slot.avg_rate[k]),
                    format!("{:.9e}", slot.weights[k]),
                ])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

/// Summary rows `seed,solver,K,M,fairness_index,sum_rate`; an undefined
/// index is written as an empty field.
pub fn write_summary_csv<W: Write>(out: W, rows: &[(u64, &Instance, &FrameReport)]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["seed", "solver", "K", "M", "fairness_index", "sum_rate"])?;
    for (seed, inst, frame) in rows {
        w.write_record([
            seed.to_string(),
            frame.solver.to_string(),
            inst.users.to_string(),
            inst.max_mux.to_string(),
            frame.fairness_index.map(|f| format!("{f:.9}")).unwrap_or_default(),
            format!("{:.9e}", frame.sum_rate),
        ])?;
    }
    w.flush()?;
    Ok(())
}
