//! Optimal power and user selection on one subcarrier, checked against the
//! exhaustive grid reference.

use noma_wsr::channel::{generate_instance, ChannelConfig};
use noma_wsr::model::{decoding_order, SingleCarrierView};
use noma_wsr::ops::OpCounter;
use noma_wsr::single_carrier::{sc_oracle, scpc, scus, DEFAULT_GRID_POINTS};

fn main() -> noma_wsr::Result<()> {
    let cfg = ChannelConfig {
        subcarriers: 1,
        seed: 11,
        ..Default::default()
    };
    let inst = generate_instance(&cfg, 6, 0)?;
    let order = decoding_order(&inst);
    let view = SingleCarrierView::new(&inst, &order, 0);
    let budget = inst.p_max_n[0];

    println!("decoding order (weakest first): {:?}", order.pi[0]);
    for m in 1..=3 {
        let mut ops = OpCounter::new();
        let out = scus(&view, budget, m, &mut ops);
        let reference = sc_oracle(&view, budget, m, DEFAULT_GRID_POINTS)?;
        println!(
            "M={m}: wsr {:.6e} bit/s, active positions {:?}, {} ops; reference {:.6e} (gap bound {:.1e})",
            out.value + view.rate_offset(),
            out.active_positions(),
            ops.total(),
            reference.value + view.rate_offset(),
            reference.gap_bound,
        );
    }

    let all: Vec<usize> = (0..view.len()).collect();
    let tails = scpc(&view, &all, budget, &mut OpCounter::new());
    println!("power control with every user allowed, tails: {tails:.4?}");
    println!("wsr {:.6e} bit/s", view.weighted_rate(&tails)?);
    Ok(())
}
