use std::f64::consts::PI;

use comb_derate::response::{stopband_dominance, BandContext};
use comb_derate::{
    comb_response, derated_response, derating_coeff, direct_fir_oracle, plan_wordlength, run_chain,
    sinc_limit, stream::run_chain_with, CombSpec, FirPlacement, Rational, SampleStream,
};
use proptest::prelude::*;

fn stream(bits: u32, len: usize) -> impl Strategy<Value = SampleStream> {
    let hi = (1i64 << (bits - 1)) - 1;
    prop::collection::vec(-hi..=hi, 0..len)
        .prop_map(move |v| SampleStream::from_i64(&v, bits).unwrap())
}

fn chain_case() -> impl Strategy<Value = (u32, u32, bool, SampleStream)> {
    (1u32..=6, 2u32..=16, any::<bool>(), 2u32..=20)
        .prop_flat_map(|(n, m, d, bits)| (Just(n), Just(m), Just(d), stream(bits, 400)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn coefficient_identity(n in 1u32..=11) {
        let b = derating_coeff(n).unwrap();
        prop_assert_eq!((b + Rational::from_integer(2)) * Rational::from_integer(n as i64),
                        Rational::from_integer(24));
    }

    #[test]
    fn conjugate_symmetry(n in 1u32..=11, m in 2u32..=64, w in 0.0f64..8.0 * PI) {
        let spec = CombSpec::new(n, m).unwrap();
        for f in [|s, w| comb_response(s, w), |s, w| derated_response(s, w).unwrap()] {
            let (a, b) = (f(spec, w), f(spec, -w));
            prop_assert!((a - b.conj()).norm() <= 1e-12 * (1.0 + a.norm()));
        }
    }

    #[test]
    fn magnitude_bounded_by_dc(n in 1u32..=11, m in 2u32..=64, w in 0.0f64..8.0 * PI) {
        let spec = CombSpec::new(n, m).unwrap();
        prop_assert!(comb_response(spec, w).norm() <= 1.0 + 1e-12);
        prop_assert!(derated_response(spec, w).unwrap().norm() <= 1.0 + 1e-12);
    }

    #[test]
    fn derated_passband_monotone(n in 1u32..=6, m in 2u32..=64, a in 0.0f64..PI, b in 0.0f64..PI) {
        let spec = CombSpec::new(n, m).unwrap();
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let g = |w| derated_response(spec, w).unwrap().norm();
        prop_assert!(g(hi) <= g(lo) + 1e-12);
    }

    #[test]
    fn large_m_approaches_sinc(n in 1u32..=6, w in 0.0f64..PI) {
        let spec = CombSpec::new(n, 4096).unwrap();
        let limit = sinc_limit(n, w).abs();
        prop_assert!((comb_response(spec, w).norm() - limit).abs() < 1e-5);
        prop_assert!((derated_response(spec, w).unwrap().norm() - limit).abs() < 1e-9);
    }

    #[test]
    fn stopband_bound(n in 1u32..=11, m in 2u32..=32, w in 0.0f64..1.0) {
        let spec = CombSpec::new(n, m).unwrap();
        let band = BandContext::default();
        let edge = band.band_edge::<f64>();
        let omega = edge + w * (m as f64 * PI - edge);
        let r = stopband_dominance(spec, band, &[omega]).unwrap();
        prop_assert!(r.points_checked == 0 || r.dominated);
    }

    #[test]
    fn chain_matches_oracle((n, m, derated, input) in chain_case()) {
        let plan = plan_wordlength(n, m, input.bits()).unwrap();
        let got = run_chain(&input, plan, derated).unwrap();
        let want = direct_fir_oracle(&input, n, m, derated).unwrap();
        prop_assert_eq!(got.samples(), want.samples());
    }

    #[test]
    fn placement_is_invisible((n, m, derated, input) in chain_case()) {
        let plan = plan_wordlength(n, m, input.bits()).unwrap();
        let a = run_chain_with(&input, plan, derated, FirPlacement::Input).unwrap();
        let b = run_chain_with(&input, plan, derated, FirPlacement::Output).unwrap();
        prop_assert_eq!(a.samples(), b.samples());
    }

    #[test]
    fn output_length(n in 1u32..=6, m in 2u32..=16, len in 0usize..200) {
        let input = SampleStream::from_i64(&vec![1; len], 8).unwrap();
        let plan = plan_wordlength(n, m, 8).unwrap();
        prop_assert_eq!(run_chain(&input, plan, true).unwrap().len(), len / m as usize);
    }
}

#[test]
fn derated_dc_gain_is_exact() {
    for n in 1..=6 {
        for m in [2, 3, 5, 8] {
            let plan = plan_wordlength(n, m, 12).unwrap();
            let input = SampleStream::from_i64(&vec![2047; 64 * m as usize], 12).unwrap();
            let out = run_chain(&input, plan, true).unwrap();
            assert_eq!(
                *out.samples().last().unwrap(),
                2047 * plan.gain(true) as i128
            );
        }
    }
}
