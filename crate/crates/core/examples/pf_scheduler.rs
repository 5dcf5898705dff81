//! One proportional-fair frame with the joint solver and the baseline.

use noma_wsr::channel::{generate_instance, ChannelConfig};
use noma_wsr::multi_carrier::Solver;
use noma_wsr::scheduler::{run_frame, FrameConfig};

fn main() -> noma_wsr::Result<()> {
    let cfg = ChannelConfig {
        seed: 9,
        ..Default::default()
    };
    let inst = generate_instance(&cfg, 12, 0)?;
    for solver in [Solver::Jspa, Solver::Ftpc] {
        let frame = run_frame(&inst, &FrameConfig::new(solver))?;
        let served = frame.mean_rates.iter().filter(|&&r| r > 0.0).count();
        let index = frame
            .fairness_index
            .map_or("undefined".to_string(), |f| format!("{f:.3}"));
        println!(
            "{solver}: sum rate {:.4e} bit/s, fairness index {index}, {served}/{} users served",
            frame.sum_rate, inst.users
        );
        let last = frame.slots.last().unwrap();
        let avg: Vec<String> = last.avg_rate.iter().map(|r| format!("{r:.2e}")).collect();
        println!("  final averages {}", avg.join(" "));
    }
    Ok(())
}
