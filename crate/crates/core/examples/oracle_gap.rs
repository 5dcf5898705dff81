//! Compare the joint solver with exhaustive search on a small instance.

use noma_wsr::channel::{generate_instance, ChannelConfig};
use noma_wsr::multi_carrier::{exhaustive_oracle, jspa, McpcOptions, OracleOptions};

fn main() -> noma_wsr::Result<()> {
    let cfg = ChannelConfig {
        subcarriers: 3,
        seed: 5,
        ..Default::default()
    };
    for id in 0..5 {
        let inst = generate_instance(&cfg, 4, id)?;
        let best = exhaustive_oracle(&inst, &OracleOptions::default())?;
        let ours = jspa(&inst, &McpcOptions::default())?;
        println!(
            "instance {id}: jspa {:.6e}, exhaustive {:.6e}, ratio {:.6}",
            ours.wsr,
            best.wsr,
            ours.wsr / best.wsr
        );
    }
    Ok(())
}
