mod common;

use proptest::prelude::*;
use vum_core::model::{Scenario, SequenceNetworkModel};
use vum_core::seqflow::{project_dq, solve_sequence_flow, Injection, InjectionSet};
use vum_core::synth::{random_radial, RandomOptions};

fn injections(s: &Scenario, raw: &[f64]) -> InjectionSet {
    s.ibrs
        .iter()
        .enumerate()
        .map(|(k, i)| (i.bus, Injection::from_array([0, 1, 2, 3].map(|c| raw[(4 * k + c) % raw.len()]))))
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn complex_flow_matches_nodal_reference(seed in 0u64..10_000, raw in proptest::collection::vec(-1.0f64..1.0, 16)) {
        let s = random_radial(seed, RandomOptions::default());
        let model = SequenceNetworkModel::build(&s).unwrap();
        let inj = injections(&s, &raw);
        let ours = solve_sequence_flow(&model, &s.slack, &inj);
        for (b, (vp, vn)) in ours.buses.iter().zip(common::reference_flow(&s, &inj)) {
            prop_assert!((b.dq.positive() - vp).norm() <= 1e-10 * vp.norm().max(1.0));
            prop_assert!((b.dq.negative() - vn).norm() <= 1e-10 * vn.norm().max(1.0));
        }
    }

    #[test]
    fn real_projection_matches_complex_route(seed in 0u64..10_000, raw in proptest::collection::vec(-1.0f64..1.0, 16)) {
        let s = random_radial(seed, RandomOptions::default());
        let model = SequenceNetworkModel::build(&s).unwrap();
        let inj = injections(&s, &raw);
        let complex = solve_sequence_flow(&model, &s.slack, &inj);
        for (a, b) in project_dq(&model, &s.slack, &inj).iter().zip(complex.dq()) {
            prop_assert!(a.max_abs_diff(&b) < 1e-12);
        }
    }

    #[test]
    fn scenario_json_round_trips(seed in 0u64..10_000) {
        let s = random_radial(seed, RandomOptions::default());
        let text = s.to_json_pretty();
        let back = Scenario::from_json(&text).unwrap();
        prop_assert_eq!(back.to_json_pretty(), text);
    }

    #[test]
    fn flow_is_affine_in_injections(seed in 0u64..10_000, raw in proptest::collection::vec(-1.0f64..1.0, 16), t in -2.0f64..2.0) {
        let s = random_radial(seed, RandomOptions::default());
        let model = SequenceNetworkModel::build(&s).unwrap();
        let inj = injections(&s, &raw);
        let zero = solve_sequence_flow(&model, &s.slack, &InjectionSet::new()).dq();
        let one = solve_sequence_flow(&model, &s.slack, &inj).dq();
        let scaled = solve_sequence_flow(&model, &s.slack, &inj.combine(t, &InjectionSet::new(), 0.0)).dq();
        for ((z, o), sc) in zero.iter().zip(&one).zip(&scaled) {
            for k in 0..4 {
                let expect = z.as_array()[k] + t * (o.as_array()[k] - z.as_array()[k]);
                prop_assert!((sc.as_array()[k] - expect).abs() < 1e-10);
            }
        }
    }
}

#[test]
fn ibr_current_raises_local_positive_voltage() {
    // a purely d-axis current at the end of an inductive line lifts V+
    let s = vum_core::synth::two_bus(vum_core::synth::SlackCase::Moderate);
    let model = SequenceNetworkModel::build(&s).unwrap();
    let base = solve_sequence_flow(&model, &s.slack, &InjectionSet::new());
    let inj: InjectionSet = [(1, Injection::new(0.0, -0.3, 0.0, 0.0))].into_iter().collect();
    let lifted = solve_sequence_flow(&model, &s.slack, &inj);
    assert!(lifted.bus(1).v_pos > base.bus(1).v_pos);
}
