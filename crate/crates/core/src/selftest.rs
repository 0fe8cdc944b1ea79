//! Invariant suites runnable from the command line.
//!
//! Each suite returns a short detail string on success or a failure message.
//! Randomised suites draw from a ChaCha8 stream seeded by the caller, so a
//! given seed always reproduces the same run.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::compensator::{compensated_response, maxflat_coeffs, maxflat_coeffs_derated};
use crate::derating::{coefficient_table, MAX_ORDER};
use crate::response::{
    deviation_sweep, passband_deviation, stopband_dominance, stopband_grid, BandContext, BranchSum,
    CombSpec, Variant, DEFAULT_SWEEP,
};
use crate::stream::{
    direct_fir_oracle, empirical_response, plan_wordlength, run_chain_with, FilterChainState,
    FirPlacement, SampleStream,
};
use crate::{derated_response, Rational};

pub type SuiteResult = std::result::Result<String, String>;

pub struct Suite {
    pub name: &'static str,
    pub run: fn(u64) -> SuiteResult,
}

pub const SUITES: &[Suite] = &[
    Suite {
        name: "coefficient-table",
        run: coefficient_table_suite,
    },
    Suite {
        name: "dc-normalization",
        run: dc_normalization,
    },
    Suite {
        name: "slope-law",
        run: slope_law,
    },
    Suite {
        name: "derating-ratio",
        run: derating_ratio,
    },
    Suite {
        name: "sharpened",
        run: sharpened,
    },
    Suite {
        name: "cascade",
        run: cascade,
    },
    Suite {
        name: "stopband-dominance",
        run: stopband,
    },
    Suite {
        name: "compensator",
        run: compensator,
    },
    Suite {
        name: "oracle-equivalence",
        run: oracle_equivalence,
    },
    Suite {
        name: "placement-equivalence",
        run: placement_equivalence,
    },
    Suite {
        name: "wraparound",
        run: wraparound,
    },
    Suite {
        name: "empirical-response",
        run: empirical,
    },
];

pub struct SuiteOutcome {
    pub name: &'static str,
    pub result: SuiteResult,
}

pub fn run_all(seed: u64) -> Vec<SuiteOutcome> {
    SUITES
        .iter()
        .map(|s| SuiteOutcome {
            name: s.name,
            result: (s.run)(seed),
        })
        .collect()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

const PUBLISHED_TABLE: [(u32, i64, i64, i64, u32); 11] = [
    (1, 22, 1, 1, 5),
    (2, 10, 1, 1, 4),
    (3, 6, 1, 1, 3),
    (4, 4, 1, 1, 3),
    (5, 14, 5, 5, 5),
    (6, 2, 1, 1, 2),
    (7, 10, 7, 7, 5),
    (8, 1, 1, 1, 2),
    (9, 2, 3, 3, 3),
    (10, 2, 5, 5, 4),
    (11, 2, 11, 11, 5),
];

fn coefficient_table_suite(_: u64) -> SuiteResult {
    let rows = coefficient_table();
    ensure(rows.len() == PUBLISHED_TABLE.len(), || {
        format!("{} rows", rows.len())
    })?;
    for (row, &(n, num, den, a, wb)) in rows.iter().zip(&PUBLISHED_TABLE) {
        let got = (row.order(), row.b(), row.scale(), row.extra_bits());
        let want = (n, Rational::new(num, den), a, wb);
        ensure(got == want, || {
            format!("row N={n}: got {got:?}, want {want:?}")
        })?;
    }
    Ok("11 rows match".into())
}

fn dc_normalization(_: u64) -> SuiteResult {
    let mut worst = 0.0f64;
    for v in Variant::ALL {
        for n in 2..=6 {
            for m in [2, 4, 9, 32] {
                let r = v.response::<f64>(n, m, 0.0).map_err(|e| e.to_string())?;
                worst = worst.max((r.norm() - 1.0).abs());
            }
        }
    }
    ensure(worst < 1e-12, || format!("DC error {worst:e}"))?;
    Ok(format!("max DC error {worst:.1e}"))
}

fn slope_law(_: u64) -> SuiteResult {
    let band = BandContext::default();
    let ms = [4, 8, 16, 32];
    let mut detail = String::new();
    for n in 1..=6 {
        let h = deviation_sweep::<f64>(Variant::Conventional, n, &ms, band)
            .map_err(|e| e.to_string())?;
        let g =
            deviation_sweep::<f64>(Variant::Derated, n, &ms, band).map_err(|e| e.to_string())?;
        let (sh, sg) = (h.slope(), g.slope());
        ensure((sh + 2.0).abs() <= 0.15, || {
            format!("N={n}: conventional slope {sh:.3}")
        })?;
        ensure(sg <= -3.5, || format!("N={n}: derated slope {sg:.3}"))?;
        if n == 3 {
            detail = format!("N=3 slopes {sh:.3} / {sg:.3}");
        }
    }
    Ok(detail)
}

fn derating_ratio(_: u64) -> SuiteResult {
    let band = BandContext::default();
    let mut worst: f64 = 0.0;
    for n in 1..=6 {
        for &m in &DEFAULT_SWEEP {
            let dh: f64 =
                passband_deviation(Variant::Conventional, n, m, band).map_err(|e| e.to_string())?;
            let dg: f64 =
                passband_deviation(Variant::Derated, n, m, band).map_err(|e| e.to_string())?;
            ensure(dh > 0.0, || format!("N={n} M={m}: dH = {dh}"))?;
            ensure(dg.abs() <= dh.abs() / 20.0 && dg.abs() <= 0.005, || {
                format!("N={n} M={m}: dG = {dg}, dH = {dh}")
            })?;
            worst = worst.max(dg.abs() / dh.abs());
        }
    }
    Ok(format!("worst |dG|/|dH| = {worst:.4}"))
}

fn sharpened(_: u64) -> SuiteResult {
    let band = BandContext::default();
    let u: f64 = passband_deviation(Variant::Sharpened, 0, 4, band).map_err(|e| e.to_string())?;
    ensure((u - 0.090).abs() <= 0.005, || format!("underated M=4: {u}"))?;
    let curve = deviation_sweep::<f64>(Variant::SharpenedDerated, 0, &DEFAULT_SWEEP, band)
        .map_err(|e| e.to_string())?;
    ensure(curve.deviation_db[0].abs() <= 0.01, || {
        format!("derated M=4: {}", curve.deviation_db[0])
    })?;
    ensure(curve.spread() <= 0.01, || {
        format!("derated spread {}", curve.spread())
    })?;
    let delays = BranchSum::sharpened()
        .group_delays(4, true)
        .map_err(|e| e.to_string())?;
    ensure(delays[0] == delays[1] && delays[0].is_integer(), || {
        format!("delays {delays:?}")
    })?;
    Ok(format!(
        "M=4 {u:.4} dB, derated spread {:.1e} dB",
        curve.spread()
    ))
}

fn cascade(_: u64) -> SuiteResult {
    let band = BandContext::default();
    let conv = deviation_sweep::<f64>(Variant::Conventional, 3, &DEFAULT_SWEEP, band)
        .map_err(|e| e.to_string())?;
    let under = deviation_sweep::<f64>(Variant::Cascade, 3, &DEFAULT_SWEEP, band)
        .map_err(|e| e.to_string())?;
    let der = deviation_sweep::<f64>(Variant::CascadeDerated, 3, &DEFAULT_SWEEP, band)
        .map_err(|e| e.to_string())?;
    for ((m, c), u) in DEFAULT_SWEEP
        .iter()
        .zip(&conv.deviation_db)
        .zip(&under.deviation_db)
    {
        ensure(u >= c, || format!("M={m}: cascade {u} < conventional {c}"))?;
    }
    ensure(der.spread() <= 0.01, || {
        format!("derated spread {}", der.spread())
    })?;
    Ok(format!("derated spread {:.1e} dB", der.spread()))
}

fn stopband(_: u64) -> SuiteResult {
    let band = BandContext::default();
    for n in 1..=MAX_ORDER {
        for m in [4, 8, 16, 32] {
            let spec = CombSpec::new(n, m).map_err(|e| e.to_string())?;
            let grid = stopband_grid::<f64>(spec, band, 4096);
            let r = stopband_dominance(spec, band, &grid).map_err(|e| e.to_string())?;
            ensure(r.dominated, || format!("N={n} M={m}: |G| > |H| somewhere"))?;
            if n <= 6 {
                ensure(r.new_zero_crossings == 0, || {
                    format!("N={n} M={m}: new zeros")
                })?;
            }
        }
    }
    Ok("N=1..11, M=4..32".into())
}

fn compensator(_: u64) -> SuiteResult {
    ensure(maxflat_coeffs(3, 4).c0 == Rational::new(-15, 128), || {
        "c0(3,4)".into()
    })?;
    ensure(maxflat_coeffs_derated(3).c0 == Rational::new(-1, 8), || {
        "c0(3)".into()
    })?;
    let spec = CombSpec::new(3, 4).map_err(|e| e.to_string())?;
    let droop = |w: f64| 1.0 - compensated_response(spec, true, w).unwrap().norm();
    let slope = (droop(0.1) / droop(0.01)).ln() / 10f64.ln();
    ensure((slope - 4.0).abs() <= 0.2, || {
        format!("two-stage droop slope {slope:.3}")
    })?;
    Ok(format!("two-stage droop slope {slope:.3}"))
}

fn random_stream(rng: &mut ChaCha8Rng, len: usize, bits: u32, biased: bool) -> SampleStream {
    let hi = (1i64 << (bits - 1)) - 1;
    let lo = if biased { 0 } else { -hi };
    let v: Vec<i64> = (0..len).map(|_| rng.gen_range(lo..=hi)).collect();
    SampleStream::from_i64(&v, bits).expect("in range by construction")
}

fn oracle_equivalence(seed: u64) -> SuiteResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cases = 0;
    for n in 1..=6 {
        for m in [2, 3, 4, 8] {
            for derated in [false, true] {
                let bits = rng.gen_range(4..=16);
                let biased = rng.gen_bool(0.5);
                let input = random_stream(&mut rng, 1000, bits, biased);
                let plan = plan_wordlength(n, m, bits).map_err(|e| e.to_string())?;
                let got = run_chain_with(&input, plan, derated, FirPlacement::Input)
                    .map_err(|e| e.to_string())?;
                let want = direct_fir_oracle(&input, n, m, derated).map_err(|e| e.to_string())?;
                ensure(got.samples() == want.samples(), || {
                    format!("N={n} M={m} derated={derated}")
                })?;
                cases += 1;
            }
        }
    }
    Ok(format!("{cases} streams bit-exact"))
}

fn placement_equivalence(seed: u64) -> SuiteResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    for n in 1..=6 {
        for m in [2, 5, 8] {
            let input = random_stream(&mut rng, 500, 12, false);
            let plan = plan_wordlength(n, m, 12).map_err(|e| e.to_string())?;
            let a = run_chain_with(&input, plan, true, FirPlacement::Input)
                .map_err(|e| e.to_string())?;
            let b = run_chain_with(&input, plan, true, FirPlacement::Output)
                .map_err(|e| e.to_string())?;
            ensure(a == b, || format!("N={n} M={m}: placements differ"))?;
        }
    }
    Ok("input/output placement identical".into())
}

fn wraparound(_: u64) -> SuiteResult {
    let plan = plan_wordlength(4, 8, 10).map_err(|e| e.to_string())?;
    let input = SampleStream::from_i64(&vec![511; 8000], 10).map_err(|e| e.to_string())?;
    let mut state = FilterChainState::new(plan, true, FirPlacement::Input);
    let out: Vec<i128> = input
        .samples()
        .iter()
        .filter_map(|&x| state.process_sample(x))
        .collect();
    ensure(state.integrator_wraps() > 0, || {
        "integrators never wrapped".into()
    })?;
    let steady = 511 * plan.gain(true) as i128;
    ensure(*out.last().unwrap() == steady, || {
        format!("steady {} != {steady}", out.last().unwrap())
    })?;
    Ok(format!(
        "{} integrator wraps, output exact",
        state.integrator_wraps()
    ))
}

fn empirical(_: u64) -> SuiteResult {
    let omegas: Vec<f64> = (0..16).map(|k| k as f64 * PI / 8.0).collect();
    let measured = empirical_response(3, 4, true, &omegas).map_err(|e| e.to_string())?;
    let spec = CombSpec::new(3, 4).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for (&w, &got) in omegas.iter().zip(&measured) {
        let want = derated_response(spec, w).map_err(|e| e.to_string())?.norm();
        let rel = (got - want).abs() / want;
        ensure(rel <= 1e-3, || format!("ω={w:.4}: {got} vs {want}"))?;
        worst = worst.max(rel);
    }
    Ok(format!("worst relative error {worst:.1e}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_suite_passes() {
        for outcome in run_all(7) {
            assert!(
                outcome.result.is_ok(),
                "{}: {:?}",
                outcome.name,
                outcome.result
            );
        }
    }

    #[test]
    fn suite_names_cover_required_checks() {
        let names: Vec<_> = SUITES.iter().map(|s| s.name).collect();
        for required in [
            "coefficient-table",
            "slope-law",
            "oracle-equivalence",
            "stopband-dominance",
        ] {
            assert!(names.contains(&required));
        }
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let a: Vec<_> = run_all(3).into_iter().map(|o| o.result).collect();
        let b: Vec<_> = run_all(3).into_iter().map(|o| o.result).collect();
        assert_eq!(a, b);
    }
}
