use noma_wsr::model::{
    decoding_order, normalized_noise, objective_offset, powers_from_tails, tail_objective,
    tails_from_powers, weighted_sum_rate, Instance, PowerMatrix, SingleCarrierView,
};
use noma_wsr::multi_carrier::{
    jspa, project_capped_simplex, second_stage_value, McpcOptions, SubcarrierAssignment,
};
use noma_wsr::ops::OpCounter;
use noma_wsr::scheduler::{pf_update, SchedulerState};
use noma_wsr::single_carrier::{expand_tails, max_f, scpc, scus};
use proptest::prelude::*;

fn instance(users: usize, subcarriers: usize, max_mux: usize) -> impl Strategy<Value = Instance> {
    (
        prop::collection::vec(0.05f64..1.0, users),
        prop::collection::vec(prop::collection::vec(-3.0f64..1.0, subcarriers), users),
        0.2f64..2.0,
    )
        .prop_map(move |(weights, log_gains, p_max)| Instance {
            users,
            subcarriers,
            max_mux,
            bandwidth: 1e5,
            p_max,
            p_max_n: vec![p_max; subcarriers],
            weights,
            gains: log_gains
                .iter()
                .map(|row| row.iter().map(|g| 10f64.powf(*g)).collect())
                .collect(),
            noises: vec![vec![1e-2; subcarriers]; users],
        })
}

fn view(max_users: usize) -> impl Strategy<Value = SingleCarrierView> {
    prop::collection::vec((0.05f64..1.0, -3.0f64..0.0), 1..=max_users).prop_map(|mut pairs| {
        pairs.sort_by(|a, b| b.1.total_cmp(&a.1));
        let pairs: Vec<(f64, f64)> = pairs.into_iter().map(|(w, e)| (w, 10f64.powf(e))).collect();
        SingleCarrierView::from_pairs(1.0, &pairs)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn tails_round_trip(inst in instance(4, 3, 4), p in prop::collection::vec(prop::collection::vec(0.0f64..10.0, 3), 4)) {
        let order = decoding_order(&inst);
        let powers = PowerMatrix { p };
        let back = powers_from_tails(&order, &tails_from_powers(&order, &powers)).unwrap();
        for (a, b) in powers.p.iter().flatten().zip(back.p.iter().flatten()) {
            prop_assert!((a - b).abs() <= 1e-12);
        }
    }

    #[test]
    fn wsr_equals_tail_objective(inst in instance(5, 2, 5), p in prop::collection::vec(prop::collection::vec(0.0f64..1.0, 2), 5)) {
        let order = decoding_order(&inst);
        let powers = PowerMatrix { p };
        let wsr = weighted_sum_rate(&inst, &order, &powers);
        let offset = objective_offset(&inst, &order);
        let via = tail_objective(&inst, &order, &tails_from_powers(&order, &powers)).unwrap() + offset;
        prop_assert!((wsr - via).abs() <= 1e-9 * wsr.abs().max(offset.abs()).max(1.0));
    }

    #[test]
    fn decoding_order_is_monotone(inst in instance(6, 3, 2)) {
        let order = decoding_order(&inst);
        for n in 0..3 {
            for w in order.pi[n].windows(2) {
                let (a, b) = (normalized_noise(&inst, w[0], n), normalized_noise(&inst, w[1], n));
                prop_assert!(a > b || (a == b && w[0] < w[1]));
            }
        }
    }

    #[test]
    fn segment_is_sum_of_terms(v in view(5), x in 0.0f64..10.0) {
        let k = v.len();
        for j in 0..k {
            for i in j..k {
                let terms: f64 = (j..=i).map(|l| v.segment(l, l, x)).sum();
                prop_assert!((v.segment(j, i, x) - terms).abs() <= 1e-9 * terms.abs().max(1.0));
            }
        }
    }

    #[test]
    fn max_f_beats_samples(v in view(2), budget in 0.01f64..2.0, s in prop::collection::vec(0.0f64..1.0, 20)) {
        let (j, i) = (0, v.len() - 1);
        let x = max_f(&v, j, i, budget, &mut OpCounter::new());
        prop_assert!((0.0..=budget).contains(&x));
        let best = v.segment(j, i, x);
        for u in s {
            prop_assert!(v.segment(j, i, u * budget) <= best + 1e-12 * best.abs().max(1.0));
        }
    }

    #[test]
    fn scpc_tails_are_feasible(v in view(6), budget in 0.0f64..2.0) {
        let all: Vec<usize> = (0..v.len()).collect();
        let x = scpc(&v, &all, budget, &mut OpCounter::new());
        prop_assert!(x[0] <= budget);
        prop_assert!(x.windows(2).all(|w| w[1] <= w[0]));
        prop_assert!(x.iter().all(|&t| t >= 0.0));
    }

    #[test]
    fn scus_respects_limit_and_beats_single_sets(v in view(6), budget in 0.01f64..2.0, m in 1usize..=3) {
        let out = scus(&v, budget, m, &mut OpCounter::new());
        prop_assert!(out.active_positions().len() <= m);
        prop_assert!((out.value - v.value(&out.tails).unwrap()).abs() <= 1e-9 * out.value.abs().max(1.0));
        for q in 0..v.len() {
            let x = expand_tails(v.len(), &[q], &scpc(&v, &[q], budget, &mut OpCounter::new()));
            prop_assert!(v.value(&x).unwrap() <= out.value + 1e-9 * out.value.abs().max(1.0));
        }
    }

    #[test]
    fn scus_value_grows_with_limit(v in view(6), budget in 0.01f64..2.0) {
        let values: Vec<f64> = (0..=4).map(|m| scus(&v, budget, m, &mut OpCounter::new()).value).collect();
        for w in values.windows(2) {
            prop_assert!(w[1] >= w[0] - 1e-9 * w[0].abs().max(1.0));
        }
    }

    #[test]
    fn second_stage_is_concave(v in view(4), a in 0.0f64..2.0, b in 0.0f64..2.0) {
        let f = |x| second_stage_value(&v, x, &mut OpCounter::new());
        let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
        prop_assert!(fm >= 0.5 * (fa + fb) - 1e-9 * fa.abs().max(fb.abs()).max(1.0));
    }

    #[test]
    fn projection_is_nearest_feasible_point(
        y in prop::collection::vec(-1.0f64..2.0, 4),
        caps in prop::collection::vec(0.1f64..1.0, 4),
        p_max in 0.1f64..2.0,
        probes in prop::collection::vec(prop::collection::vec(0.0f64..1.0, 4), 10),
    ) {
        let proj = project_capped_simplex(&y, p_max, &caps).budget;
        let total: f64 = proj.iter().sum();
        prop_assert!(total <= p_max + 1e-10);
        prop_assert!(proj.iter().zip(&caps).all(|(&b, &c)| (0.0..=c).contains(&b)));
        let dist = |z: &[f64]| z.iter().zip(&y).map(|(a, b)| (a - b).powi(2)).sum::<f64>();
        let d0 = dist(&proj);
        for u in probes {
            let mut z: Vec<f64> = u.iter().zip(&caps).map(|(a, c)| a * c).collect();
            let s: f64 = z.iter().sum();
            if s > p_max {
                z.iter_mut().for_each(|v| *v *= p_max / s);
            }
            prop_assert!(d0 <= dist(&z) + 1e-10);
        }
    }

    #[test]
    fn pf_update_keeps_rates_positive(avg in prop::collection::vec(1.0f64..1e8, 1..6), t in 2usize..40, scale in 0.0f64..1e8) {
        let state = SchedulerState::new(&avg, 1e3);
        let rates: Vec<f64> = avg.iter().enumerate().map(|(k, _)| scale * (k % 2) as f64).collect();
        let next = pf_update(&state, &rates, t);
        prop_assert!(next.avg_rate.iter().all(|&r| r > 0.0));
        for (w, r) in next.weights.iter().zip(&next.avg_rate) {
            prop_assert!((w * r - 1.0).abs() < 1e-12);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn jspa_output_is_feasible(inst in instance(5, 3, 2)) {
        let report = jspa(&inst, &McpcOptions::default()).unwrap();
        let order = decoding_order(&inst);
        prop_assert!(report.powers.p.iter().flatten().all(|&p| p >= 0.0));
        prop_assert!(report.powers.total() <= inst.p_max * (1.0 + 1e-9));
        for n in 0..inst.subcarriers {
            prop_assert!(report.powers.subcarrier_total(n) <= inst.p_max_n[n] * (1.0 + 1e-9));
            prop_assert!(report.powers.active_users(n).len() <= inst.max_mux);
        }
        let wsr = weighted_sum_rate(&inst, &order, &report.powers);
        prop_assert!((wsr - report.wsr).abs() <= 1e-9 * wsr.max(1.0));
        let _ = SubcarrierAssignment::full(&order);
    }
}
