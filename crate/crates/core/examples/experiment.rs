//! A small weighted sum-rate sweep written as CSV.

use noma_wsr::experiment::{run_and_write, ExperimentId, ExperimentSpec};

fn main() -> noma_wsr::Result<()> {
    let out = std::env::temp_dir().join("noma-wsr-wsr-vs-k.csv");
    let mut spec = ExperimentSpec::new(ExperimentId::WsrVsK, &out);
    spec.k_values = vec![4, 8];
    spec.m_values = vec![1, 2];
    spec.seeds = 10;
    spec.channel.subcarriers = 4;
    for path in run_and_write(&spec)? {
        println!("== {}", path.display());
        print!("{}", std::fs::read_to_string(&path)?);
    }
    Ok(())
}
