use std::collections::BTreeMap;

use proptest::prelude::*;

use raqm::config::{ScenarioConfig, ScenarioId};
use raqm::node::{write_outcome_probs, AtomInternalState, NodeModel, Register};
use raqm::physics::{MHZ, UM};
use raqm::protocol::{format_timeline, make_pattern, parse_timeline, Pattern, TimingRules};
use raqm::qubit::{NamedPolarization, PolarizationQubit};
use raqm::tomography::{reconstruct, Basis, TomographyCounts};

fn bloch() -> impl Strategy<Value = [f64; 3]> {
    (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64, 0.0..1.0f64).prop_map(|(x, y, z, r)| {
        let n = (x * x + y * y + z * z).sqrt().max(1e-9);
        [r * x / n, r * y / n, r * z / n]
    })
}

fn polarization() -> impl Strategy<Value = NamedPolarization> {
    prop::sample::select(NamedPolarization::ALL.to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn channels_keep_states_physical(v in bloch(), p in 0.0..=1.0f64, a in 0.0..=1.0f64, t in 0.0..2e-3f64) {
        let q = PolarizationQubit::from_bloch(v).unwrap();
        let out = q.depolarize(p).unwrap().dephase_amplitude(a).unwrap().apply_larmor(t, 2e5).unwrap();
        prop_assert!(out.validate().is_ok());
        prop_assert!((out.trace() - 1.0).abs() < 1e-12);
        prop_assert!(out.eigenvalues().iter().all(|e| *e >= -1e-12));
    }

    #[test]
    fn depolarizing_composes(v in bloch(), p1 in 0.0..=1.0f64, p2 in 0.0..=1.0f64) {
        let q = PolarizationQubit::from_bloch(v).unwrap();
        let twice = q.depolarize(p1).unwrap().depolarize(p2).unwrap();
        let once = q.depolarize(1.0 - (1.0 - p1) * (1.0 - p2)).unwrap();
        prop_assert!(twice.trace_distance(&once) < 1e-12);
    }

    #[test]
    fn orthogonal_fidelities_sum_to_one(v in bloch(), pol in polarization()) {
        let q = PolarizationQubit::from_bloch(v).unwrap();
        let s = q.fidelity(pol).unwrap() + q.fidelity(pol.orthogonal()).unwrap();
        prop_assert!((s - 1.0).abs() < 1e-12);
    }

    #[test]
    fn exact_counts_reconstruct_the_state(v in bloch()) {
        let q = PolarizationQubit::from_bloch(v).unwrap();
        let n = 1_000_000u64;
        let mut c = TomographyCounts::default();
        for b in Basis::ALL {
            let k = (q.probability(b.plus()) * n as f64).round() as u64;
            c.set(b, k, n - k);
        }
        prop_assert!(reconstruct(&c).unwrap().trace_distance(&q) < 2e-6);
    }

    #[test]
    fn write_outcomes_form_a_distribution(
        d_um in 6.0..20.0f64,
        det in -300.0..-20.0f64,
        b_state in 0usize..5,
    ) {
        let model = NodeModel::reference().with_detuning(det * MHZ).unwrap();
        let mut reg = Register::pair(&model, d_um * UM).unwrap();
        let states = [
            AtomInternalState::ReadyCenter,
            AtomInternalState::ReadyEdgePlus,
            AtomInternalState::ReadyEdgeMinus,
            AtomInternalState::Scrambled,
            AtomInternalState::Holding { qubit: NamedPolarization::R.state(), since: 0.0, origin: raqm::node::Origin::Center },
        ];
        reg.set_state("B", states[b_state].clone()).unwrap();
        let probs = write_outcome_probs(&reg, "A").unwrap();
        prop_assert!(probs.iter().all(|(_, p)| *p >= 0.0));
        prop_assert!((probs.iter().map(|(_, p)| p).sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn timelines_round_trip(a in polarization(), b in polarization(), k in 0usize..6) {
        let inputs = BTreeMap::from([("A".to_string(), a), ("B".to_string(), b)]);
        for p in [Pattern::AWBWARBR, Pattern::AWBWBRAR, Pattern::Extended(k)] {
            let tl = make_pattern(p, &inputs, &TimingRules::default()).unwrap();
            let back = parse_timeline(&format_timeline(&tl)).unwrap();
            prop_assert_eq!(back.len(), tl.len());
            for (x, y) in tl.iter().zip(&back) {
                prop_assert_eq!(&x.kind, &y.kind);
                prop_assert_eq!(&x.target, &y.target);
                prop_assert!((x.time - y.time).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn swept_parameters_land_in_the_config(v in -500.0..-20.0f64) {
        let cfg = ScenarioConfig::new(ScenarioId::Table1);
        let c = cfg.with_parameter("node.detuning.detuning_mhz", v).unwrap();
        prop_assert_eq!(c.node.detuning.detuning_mhz, v);
        prop_assert_eq!(ScenarioConfig::parse(&c.to_toml()).unwrap(), c);
    }
}
