use proptest::prelude::*;

use gme_witness::eval::{biseparable_min_all, white_noise_tolerance, FidelityWitness, SeeSaw};
use gme_witness::lift::{lift, LiftOptions};
use gme_witness::tensorcore::{PureState, C64};

fn state_from(dims: Vec<usize>, raw: &[(f64, f64)]) -> PureState {
    let amps = raw.iter().map(|&(re, im)| C64::new(re, im)).collect();
    PureState::normalized(dims, amps).unwrap()
}

fn amps(len: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), len).prop_filter("nonzero", |v| {
        v.iter().map(|(a, b)| a * a + b * b).sum::<f64>() > 1e-3
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn random_qubit_triples_certify(raw in amps(8)) {
        let s = state_from(vec![2, 2, 2], &raw);
        let run = lift(&s, &LiftOptions::default()).unwrap();
        prop_assert!(run.certify(1e-9).unwrap().passed());
    }

    #[test]
    fn random_qutrit_pairs_beat_fidelity(raw in amps(18)) {
        let s = state_from(vec![3, 3, 2], &raw);
        let run = lift(&s, &LiftOptions::default()).unwrap();
        prop_assert!(run.certify(1e-9).unwrap().passed());
        let ours = white_noise_tolerance(&run.witness, &s).unwrap_or(0.0);
        let fid = white_noise_tolerance(&FidelityWitness::for_state(&s).unwrap(), &s).unwrap_or(0.0);
        prop_assert!(ours >= fid - 1e-9, "{} < {}", ours, fid);
    }
}

#[test]
fn random_lifts_are_nonnegative_on_products() {
    let cfg = SeeSaw {
        restarts: 16,
        iters: 150,
        seed: 3,
    };
    let raw: Vec<(f64, f64)> = (0..16)
        .map(|k| ((k as f64 * 0.7).sin(), (k as f64 * 1.3).cos() * 0.5))
        .collect();
    let s = state_from(vec![2, 2, 2, 2], &raw);
    let run = lift(&s, &LiftOptions::default()).unwrap();
    for (cut, v) in biseparable_min_all(&run.witness.dense(), &cfg).unwrap() {
        assert!(v >= -1e-7, "cut {cut}: {v}");
    }
}
