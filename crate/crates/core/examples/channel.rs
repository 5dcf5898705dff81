//! Draw reproducible random instances and save one as JSON.

use noma_wsr::channel::{generate_instance, ChannelConfig, WeightDistribution};
use noma_wsr::model::{decoding_order, normalized_noise};

fn main() -> noma_wsr::Result<()> {
    let cfg = ChannelConfig {
        subcarriers: 4,
        weights: WeightDistribution::Uniform,
        seed: 42,
        ..Default::default()
    };
    println!(
        "subcarrier bandwidth {} Hz, noise power {:.3e} W",
        cfg.subcarrier_bandwidth(),
        cfg.noise_power()
    );

    let inst = generate_instance(&cfg, 5, 0)?;
    assert_eq!(inst, generate_instance(&cfg, 5, 0)?);
    let order = decoding_order(&inst);
    for n in 0..inst.subcarriers {
        let etas: Vec<String> = order.pi[n]
            .iter()
            .map(|&k| format!("{k}:{:.2e}", normalized_noise(&inst, k, n)))
            .collect();
        println!("subcarrier {n}, user:normalized noise weakest first: {}", etas.join(" "));
    }

    let path = std::env::temp_dir().join("noma-wsr-instance.json");
    std::fs::write(&path, inst.to_json_string()?)?;
    println!("wrote {}", path.display());
    Ok(())
}
