//! Power control over several subcarriers: fixed user sets, joint selection
//! and the fixed-split baseline on the same instance.

use noma_wsr::channel::{generate_instance, ChannelConfig};
use noma_wsr::model::decoding_order;
use noma_wsr::multi_carrier::{ftpc, jspa, mcpc, McpcOptions, SubcarrierAssignment};

fn main() -> noma_wsr::Result<()> {
    let cfg = ChannelConfig {
        subcarriers: 4,
        max_mux: 2,
        seed: 3,
        ..Default::default()
    };
    let inst = generate_instance(&cfg, 8, 0)?;
    let order = decoding_order(&inst);
    let opts = McpcOptions::with_epsilon(1e-8);

    let fixed = SubcarrierAssignment::strongest(&inst, &order);
    let a = mcpc(&inst, &fixed, &opts)?;
    println!("mcpc on the two strongest users per subcarrier");
    for row in a.trace.iter().take(6) {
        println!("  iter {:>2} tail objective {:.6e} budgets {:.4?}", row.iteration, row.objective, row.budgets);
    }
    println!("  wsr {:.6e} after {} iterations", a.wsr, a.iterations);

    let b = jspa(&inst, &opts)?;
    println!("jspa wsr {:.6e}, budgets {:.4?}, {} ops", b.wsr, b.budgets, b.ops.total());
    for n in 0..inst.subcarriers {
        println!("  subcarrier {n} serves {:?}", b.powers.active_users(n));
    }

    let c = ftpc(&inst)?;
    println!("ftpc wsr {:.6e} ({:.1}% of jspa)", c.wsr, 100.0 * c.wsr / b.wsr);
    Ok(())
}
