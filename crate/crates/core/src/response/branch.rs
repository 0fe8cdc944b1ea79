//! Weighted sums of delay-aligned comb branches.
//!
//! Both the sharpened comb `3H² − 2H³` and the bifurcated-zero cascade are
//! linear combinations of conventional combs of different orders. Each branch
//! is delayed so that all branches share one group delay; their magnitudes
//! then add on a common linear-phase axis. When derated, each branch of
//! comb order `n` carries its own `D_n`.

use num_complex::Complex;

use super::{comb_factor, derating_factor, sinc_limit};
use crate::derating::DeratingFilter;
use crate::{Error, Rational, Result, Scalar};

/// Weight `κ` of the lower-order branch in the bifurcated cascade
/// `(1+κ)·H_N − κ·H_{N−2}`.
///
/// The triple zero of `H_3` at each folding frequency splits into a simple
/// zero plus a pair where `|H_1| = sqrt(κ/(1+κ)) = 1/3`.
pub const BIFURCATION_WEIGHT: Rational = Rational::new_raw(1, 8);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CombBranch {
    pub weight: Rational,
    /// Total comb order of the branch (number of integrator/differentiator pairs).
    pub order: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BranchSum {
    branches: Vec<CombBranch>,
}

impl BranchSum {
    pub fn new(branches: Vec<CombBranch>) -> Result<Self> {
        if branches.is_empty() {
            return Err(Error::Empty);
        }
        for b in &branches {
            if b.order > crate::derating::MAX_ORDER {
                return Err(Error::InvalidOrder(b.order));
            }
        }
        Ok(Self { branches })
    }

    /// `3·H_{2,M}² − 2·H_{2,M}³`: branches of comb order 4 and 6.
    pub fn sharpened() -> Self {
        Self {
            branches: vec![
                CombBranch {
                    weight: Rational::from_integer(3),
                    order: 4,
                },
                CombBranch {
                    weight: Rational::from_integer(-2),
                    order: 6,
                },
            ],
        }
    }

    /// `(1+κ)·H_N − κ·H_{N−2}`, the "N+(N−2)" bifurcated-zero cascade
    /// (`"3+1"` for N = 3, `"2+0"` for N = 2).
    pub fn bifurcated(order: u32) -> Result<Self> {
        if order < 2 {
            return Err(Error::CascadeOrder(order));
        }
        let k = BIFURCATION_WEIGHT;
        Self::new(vec![
            CombBranch {
                weight: Rational::from_integer(1) + k,
                order,
            },
            CombBranch {
                weight: -k,
                order: order - 2,
            },
        ])
    }

    /// Parses presets of the form `"3+1"`.
    pub fn preset(name: &str) -> Option<Self> {
        let (outer, inner) = name.split_once('+')?;
        let outer: u32 = outer.trim().parse().ok()?;
        let inner: u32 = inner.trim().parse().ok()?;
        if outer >= 2 && inner + 2 == outer {
            Self::bifurcated(outer).ok()
        } else {
            None
        }
    }

    pub fn branches(&self) -> &[CombBranch] {
        &self.branches
    }

    /// Sum of the weights; the DC gain of the structure.
    pub fn dc_gain(&self) -> Rational {
        self.branches.iter().map(|b| b.weight).sum()
    }

    fn half_sample_delays(&self, decim: u32, derated: bool) -> Vec<u64> {
        self.branches
            .iter()
            .map(|b| u64::from(b.order) * u64::from(decim - 1) + if derated { 2 } else { 0 })
            .collect()
    }

    /// Alignment delay of each branch in input samples.
    fn alignment(&self, decim: u32, derated: bool) -> Result<Vec<u64>> {
        if decim < 2 {
            return Err(Error::InvalidDecimation(decim));
        }
        let halves = self.half_sample_delays(decim, derated);
        let top = *halves.iter().max().expect("non-empty");
        let top_branch = self.branches[halves.iter().position(|&h| h == top).unwrap()];
        halves
            .iter()
            .zip(&self.branches)
            .map(|(&h, b)| {
                if (top - h).is_multiple_of(2) {
                    Ok((top - h) / 2)
                } else {
                    Err(Error::Misaligned {
                        first: top_branch.order,
                        second: b.order,
                        decim,
                    })
                }
            })
            .collect()
    }

    /// Total group delay of every branch (comb + derating + alignment), in
    /// input samples. All entries are equal once aligned.
    pub fn group_delays(&self, decim: u32, derated: bool) -> Result<Vec<Rational>> {
        let align = self.alignment(decim, derated)?;
        Ok(self
            .half_sample_delays(decim, derated)
            .iter()
            .zip(align)
            .map(|(&h, a)| Rational::new(h as i64, 2) + Rational::from_integer(a as i64))
            .collect())
    }

    /// Response at `z = e^{jω/M}`, normalised by the DC gain.
    pub fn response<T: Scalar>(&self, decim: u32, omega: T, derated: bool) -> Result<Complex<T>> {
        let align = self.alignment(decim, derated)?;
        let theta = omega / T::of_u32(decim);
        let mut acc = Complex::new(T::zero(), T::zero());
        for (branch, delay) in self.branches.iter().zip(align) {
            let mut term = if branch.order == 0 {
                Complex::new(T::one(), T::zero())
            } else {
                comb_factor(branch.order, decim, theta)
            };
            if derated {
                term = term * derating_factor(&DeratingFilter::new(branch.order)?, theta);
            }
            let phase = -theta * T::of_usize(delay as usize);
            term = term * Complex::new(phase.cos(), phase.sin());
            acc = acc + term * T::from_rational(branch.weight);
        }
        Ok(acc / T::from_rational(self.dc_gain()))
    }

    /// `M → ∞` magnitude: `|Σ w_i · sinc^{n_i}(ω/2)| / Σ w_i`.
    pub fn limit_magnitude<T: Scalar>(&self, omega: T) -> T {
        let sum = self.branches.iter().fold(T::zero(), |acc, b| {
            acc + T::from_rational(b.weight) * sinc_limit(b.order, omega)
        });
        (sum / T::from_rational(self.dc_gain())).abs()
    }
}

/// Sharpened comb with base order 2 at `z = e^{jω/M}`.
pub fn sharpened_response<T: Scalar>(decim: u32, omega: T, derated: bool) -> Result<Complex<T>> {
    BranchSum::sharpened().response(decim, omega, derated)
}

pub fn cascade_response<T: Scalar>(
    cascade: &BranchSum,
    decim: u32,
    omega: T,
    derated: bool,
) -> Result<Complex<T>> {
    cascade.response(decim, omega, derated)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::response::{comb_response, CombSpec};
    use std::f64::consts::PI;

    #[test]
    fn sharpened_dc_and_edge() {
        for m in [2, 4, 7, 32] {
            for derated in [false, true] {
                let dc = sharpened_response(m, 0.0f64, derated).unwrap();
                assert!((dc.norm() - 1.0).abs() < 1e-14);
            }
        }
        // Oracle: 3r^4 − 2r^6 with r = |H_{1,4}(π/2)|, limit with r∞ = sinc(π/4).
        let r = (PI / 4.0).sin() / (4.0 * (PI / 16.0).sin());
        let s = (PI / 4.0).sin() / (PI / 4.0);
        let want = 3.0 * r.powi(4) - 2.0 * r.powi(6);
        let got = sharpened_response(4, PI / 2.0, false).unwrap().norm();
        assert!((got - want).abs() < 1e-12);
        let limit = BranchSum::sharpened().limit_magnitude(PI / 2.0);
        assert!((limit - (3.0 * s.powi(4) - 2.0 * s.powi(6))).abs() < 1e-12);
    }

    #[test]
    fn sharpened_branches_align_on_integer_delay() {
        let sharp = BranchSum::sharpened();
        for m in 2..40 {
            for derated in [false, true] {
                let d = sharp.group_delays(m, derated).unwrap();
                assert_eq!(d[0], d[1]);
                assert!(d[0].is_integer());
                let expect = 3 * m as i64 - 3 + i64::from(derated);
                assert_eq!(d[0], Rational::from_integer(expect));
            }
        }
    }

    #[test]
    fn single_branch_is_conventional() {
        let one = BranchSum::new(vec![CombBranch {
            weight: Rational::from_integer(1),
            order: 3,
        }])
        .unwrap();
        let a = one.response(4, PI / 2.0, false).unwrap();
        let b = comb_response(CombSpec::new(3, 4).unwrap(), PI / 2.0);
        assert!((a - b).norm() < 1e-15);
    }

    #[test]
    fn presets() {
        let c = BranchSum::preset("3+1").unwrap();
        assert_eq!(c, BranchSum::bifurcated(3).unwrap());
        assert!(BranchSum::preset("2+0").is_some());
        assert!(BranchSum::preset("3+2").is_none());
        assert!(BranchSum::preset("x").is_none());
        assert_eq!(BranchSum::bifurcated(1), Err(Error::CascadeOrder(1)));
        assert_eq!(c.dc_gain(), Rational::from_integer(1));
        for derated in [false, true] {
            assert!((c.response(8, 0.0f64, derated).unwrap().norm() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn misaligned_branches_are_rejected() {
        let odd = BranchSum::new(vec![
            CombBranch {
                weight: Rational::from_integer(2),
                order: 2,
            },
            CombBranch {
                weight: Rational::from_integer(-1),
                order: 1,
            },
        ])
        .unwrap();
        assert!(matches!(
            odd.response(4, 0.3, false),
            Err(Error::Misaligned { .. })
        ));
        // Odd M makes (M−1) even, so any order difference aligns.
        assert!(odd.response(5, 0.3, false).is_ok());
    }

    #[test]
    fn bifurcated_zeros_split_around_folding_frequency() {
        // Conventional H_3 has its only zero near 2π at 2π itself. The cascade
        // keeps a zero at 2π and gains a sign change on each side of it.
        let c = BranchSum::bifurcated(3).unwrap();
        let m = 16;
        let amp = |w: f64| {
            let v = c.response(m, w, false).unwrap();
            // remove linear phase: common delay 3(M−1)/2 samples
            let phase = w / m as f64 * 1.5 * (m - 1) as f64;
            (v * Complex::from_polar(1.0, phase)).re
        };
        let ws: Vec<f64> = (0..=4000)
            .map(|k| 1.2 * PI + k as f64 * 1.6 * PI / 4000.0)
            .collect();
        let crossings = ws
            .windows(2)
            .filter(|p| amp(p[0]) * amp(p[1]) < 0.0)
            .count();
        assert!(crossings >= 2, "crossings = {crossings}");
        assert!(amp(2.0 * PI).abs() < 1e-12);
    }
}
