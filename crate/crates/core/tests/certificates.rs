//! Soundness of certified bounds against exact gaps of longer chains.

use proptest::prelude::*;

use ffgap::coefficients::ThresholdMode;
use ffgap::criteria::{certify_periodic, certify_thm1, certify_thm2};
use ffgap::models::{aklt, random_planted_chain, singlet_chain};
use ffgap::operators::{chain_hamiltonian, ChainModel};
use ffgap::spectra::{gap_profile, spectral_gap, DEFAULT_ZERO_TOL};

fn ed_gap(model: &ChainModel, m: usize) -> f64 {
    spectral_gap(&chain_hamiltonian(model, m).unwrap(), DEFAULT_ZERO_TOL).unwrap().positive_gap().unwrap()
}

#[test]
fn aklt_bounds_are_below_exact_gaps() {
    let spec = aklt();
    let model = spec.chain().unwrap();
    let gaps: Vec<f64> = (6..=10).map(|m| ed_gap(model, m)).collect();
    for n in 4..=6 {
        let p = gap_profile(model, n, DEFAULT_ZERO_TOL).unwrap();
        for cert in [
            certify_thm1(&p, n, ThresholdMode::Exact).unwrap(),
            certify_thm2(&p, n, ThresholdMode::Exact).unwrap(),
        ] {
            assert!(cert.is_certified(), "{:?} at n = {n}", cert.criterion);
            for g in &gaps {
                assert!(cert.bound <= *g, "bound {} exceeds gap {g}", cert.bound);
            }
        }
    }
    let gm = certify_periodic(gap_profile(model, 6, DEFAULT_ZERO_TOL).unwrap().bulk, 6, 14).unwrap();
    assert!(gm.is_certified());
}

#[test]
fn singlet_is_never_certified() {
    let spec = singlet_chain();
    let model = spec.chain().unwrap();
    for n in 4..=8 {
        let p = gap_profile(model, n, DEFAULT_ZERO_TOL).unwrap();
        for mode in [ThresholdMode::Exact, ThresholdMode::Asymptotic] {
            assert!(!certify_thm1(&p, n, mode).unwrap().is_certified());
            assert!(!certify_thm2(&p, n, mode).unwrap().is_certified());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn planted_chain_bounds_are_sound(seed in 0u64..1000, n in 4usize..=6) {
        let spec = random_planted_chain(2, 2, 1, seed).unwrap();
        let model = spec.chain().unwrap();
        let p = gap_profile(model, n, DEFAULT_ZERO_TOL).unwrap();
        let c1 = certify_thm1(&p, n, ThresholdMode::Exact).unwrap();
        let c2 = certify_thm2(&p, n, ThresholdMode::Exact).unwrap();
        prop_assert!(c2.local_gap >= c1.local_gap - 1e-12);
        let best = c1.bound.max(c2.bound);
        if best > 0.0 {
            for m in [2 * n, 2 * n + 2] {
                let g = ed_gap(model, m);
                prop_assert!(best <= g, "bound {} vs gap {} at m = {}", best, g, m);
            }
        }
    }
}
