#![allow(dead_code)]

use noma_wsr::channel::{generate_instance, ChannelConfig};
use noma_wsr::model::{decoding_order, Instance, SingleCarrierView};
use rand::seq::index::sample;
use rand::Rng;

pub fn table_cfg(seed: u64, subcarriers: usize, max_mux: usize) -> ChannelConfig {
    ChannelConfig {
        seed,
        subcarriers,
        max_mux,
        ..ChannelConfig::default()
    }
}

pub fn table_instance(seed: u64, id: u64, users: usize, subcarriers: usize, max_mux: usize) -> Instance {
    generate_instance(&table_cfg(seed, subcarriers, max_mux), users, id).unwrap()
}

/// Single-carrier view of a one-subcarrier instance drawn from the default channel.
pub fn table_view(seed: u64, id: u64, users: usize) -> SingleCarrierView {
    let inst = table_instance(seed, id, users, 1, 1);
    SingleCarrierView::new(&inst, &decoding_order(&inst), 0)
}

/// Random user subsets of size `1..=max_mux` per subcarrier.
pub fn random_assignment(rng: &mut impl Rng, inst: &Instance) -> Vec<Vec<usize>> {
    (0..inst.subcarriers)
        .map(|_| {
            let size = rng.random_range(1..=inst.max_mux.min(inst.users));
            sample(rng, inst.users, size).into_vec()
        })
        .collect()
}

/// Uniform point of the box `[0, caps]` scaled into the budget simplex.
pub fn random_budgets(rng: &mut impl Rng, p_max: f64, caps: &[f64]) -> Vec<f64> {
    let mut b: Vec<f64> = caps.iter().map(|c| c * rng.random::<f64>()).collect();
    let total: f64 = b.iter().sum();
    if total > p_max {
        let scale = p_max / total * rng.random::<f64>();
        b.iter_mut().for_each(|x| *x *= scale);
    }
    b
}

pub fn rel_scale(x: f64) -> f64 {
    x.abs().max(1.0)
}
