//! Random downlink instances: users dropped uniformly over an annular cell,
//! log-distance path loss, log-normal shadowing and Rayleigh fading.
//!
//! Randomness comes from [`seeded_stream`], a ChaCha8 generator keyed by the
//! experiment seed with the instance index as its stream number, so instance
//! `i` of a run is reproducible on its own.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::Instance;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PathLossModel {
    /// `128.1 + 37.6 log10(d_km)` dB.
    Macro,
}

impl PathLossModel {
    pub fn loss_db(self, distance_m: f64) -> f64 {
        match self {
            PathLossModel::Macro => 128.1 + 37.6 * (distance_m / 1000.0).log10(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeightDistribution {
    /// Independent draws on `(0, 1]`.
    Uniform,
    /// Every weight equal to 1.
    Equal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ChannelConfig {
    pub cell_radius_m: f64,
    pub min_distance_m: f64,
    pub carrier_ghz: f64,
    pub pathloss: PathLossModel,
    pub shadowing_sigma_db: f64,
    pub noise_psd_dbm_per_hz: f64,
    /// Total system bandwidth, split evenly over the subcarriers.
    pub bandwidth_hz: f64,
    pub subcarriers: usize,
    pub p_max_w: f64,
    /// Per-subcarrier caps; `None` means `P_max` on every subcarrier.
    pub p_max_n_w: Option<Vec<f64>>,
    pub max_mux: usize,
    pub weights: WeightDistribution,
    pub seed: u64,
}

impl Default for ChannelConfig {
    fn default() -> Self {
        ChannelConfig {
            cell_radius_m: 250.0,
            min_distance_m: 35.0,
            carrier_ghz: 2.0,
            pathloss: PathLossModel::Macro,
            shadowing_sigma_db: 8.0,
            noise_psd_dbm_per_hz: -174.0,
            bandwidth_hz: 5e6,
            subcarriers: 10,
            p_max_w: 1.0,
            p_max_n_w: None,
            max_mux: 2,
            weights: WeightDistribution::Uniform,
            seed: 0,
        }
    }
}

impl ChannelConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if !(self.min_distance_m > 0.0 && self.cell_radius_m > self.min_distance_m) {
            return bad(format!(
                "need cell_radius_m > min_distance_m > 0, got {} and {}",
                self.cell_radius_m, self.min_distance_m
            ));
        }
        if !(self.shadowing_sigma_db >= 0.0) {
            return bad(format!("shadowing_sigma_db must be >= 0, got {}", self.shadowing_sigma_db));
        }
        if self.subcarriers == 0 {
            return bad("subcarriers must be at least 1".into());
        }
        if !(self.bandwidth_hz > 0.0 && self.p_max_w > 0.0) {
            return bad("bandwidth_hz and p_max_w must be > 0".into());
        }
        if self.max_mux == 0 {
            return bad("max_mux must be at least 1".into());
        }
        if let Some(caps) = &self.p_max_n_w {
            if caps.len() != self.subcarriers || caps.iter().any(|&c| !(c > 0.0)) {
                return bad(format!(
                    "p_max_n_w needs {} positive entries",
                    self.subcarriers
                ));
            }
        }
        Ok(())
    }

    /// Reads a JSON config; missing fields take their defaults.
    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        let cfg: ChannelConfig = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn subcarrier_bandwidth(&self) -> f64 {
        self.bandwidth_hz / self.subcarriers as f64
    }

    /// Noise power on one subcarrier in watts.
    pub fn noise_power(&self) -> f64 {
        10f64.powf((self.noise_psd_dbm_per_hz - 30.0) / 10.0) * self.subcarrier_bandwidth()
    }
}

/// Independent, reproducible random stream `id` under `seed`.
pub fn seeded_stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

/// User distance with density proportional to `r` on `[min, radius]`.
pub fn sample_distance(rng: &mut impl Rng, min: f64, radius: f64) -> f64 {
    let u: f64 = rng.random();
    (u * (radius * radius - min * min) + min * min).sqrt()
}

/// Unit-mean exponential power gain of a Rayleigh channel.
pub fn sample_fading(rng: &mut impl Rng) -> f64 {
    Exp1.sample(rng)
}

pub fn sample_shadowing_db(rng: &mut impl Rng, sigma_db: f64) -> f64 {
    let z: f64 = StandardNormal.sample(rng);
    sigma_db * z
}

/// Draws instance `id` of a run with `users` users.
///
/// Distance and shadowing are per user; fading is independent per user and
/// subcarrier.
pub fn generate_instance(cfg: &ChannelConfig, users: usize, id: u64) -> Result<Instance> {
    cfg.validate()?;
    if users == 0 {
        return Err(Error::InvalidArgument("need at least one user".into()));
    }
    let mut rng = seeded_stream(cfg.seed, id);
    let n = cfg.subcarriers;
    let noise = cfg.noise_power();
    let mut gains = Vec::with_capacity(users);
    for _ in 0..users {
        let d = sample_distance(&mut rng, cfg.min_distance_m, cfg.cell_radius_m);
        let shadow = sample_shadowing_db(&mut rng, cfg.shadowing_sigma_db);
        let large = 10f64.powf(-(cfg.pathloss.loss_db(d) + shadow) / 10.0);
        gains.push((0..n).map(|_| large * sample_fading(&mut rng)).collect::<Vec<_>>());
    }
    let weights = match cfg.weights {
        WeightDistribution::Equal => vec![1.0; users],
        WeightDistribution::Uniform => (0..users).map(|_| 1.0 - rng.random::<f64>()).collect(),
    };
    let inst = Instance {
        users,
        subcarriers: n,
        max_mux: cfg.max_mux.min(users),
        bandwidth: cfg.subcarrier_bandwidth(),
        p_max: cfg.p_max_w,
        p_max_n: cfg.p_max_n_w.clone().unwrap_or_else(|| vec![cfg.p_max_w; n]),
        weights,
        gains,
        noises: vec![vec![noise; n]; users],
    };
    inst.validate()?;
    Ok(inst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pathloss_at_one_km() {
        assert_eq!(PathLossModel::Macro.loss_db(1000.0), 128.1);
    }

    #[test]
    fn noise_matches_db_arithmetic() {
        let cfg = ChannelConfig::default();
        let expect = 10f64.powf(-20.4) * 5e5;
        assert!((cfg.noise_power() / expect - 1.0).abs() < 1e-12);
    }

    #[test]
    fn same_seed_same_instance() {
        let cfg = ChannelConfig {
            seed: 7,
            ..Default::default()
        };
        let a = generate_instance(&cfg, 5, 3).unwrap();
        let b = generate_instance(&cfg, 5, 3).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, generate_instance(&cfg, 5, 4).unwrap());
    }

    #[test]
    fn rejects_bad_geometry() {
        let cfg = ChannelConfig {
            min_distance_m: 300.0,
            ..Default::default()
        };
        assert!(matches!(generate_instance(&cfg, 2, 0), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn partial_json_uses_defaults() {
        let cfg: ChannelConfig = serde_json::from_str(r#"{"subcarriers": 4, "weights": "equal"}"#).unwrap();
        assert_eq!(cfg.subcarriers, 4);
        assert_eq!(cfg.cell_radius_m, 250.0);
        assert_eq!(cfg.weights, WeightDistribution::Equal);
    }
}
