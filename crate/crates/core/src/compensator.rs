//! Maximally flat 3-tap droop compensator.
//!
//! The compensator runs at the output rate,
//! `C(z^M) = c0 + c1·z^-M + c2·z^-2M`, with `c0 = c2` and `c1 = 1 − 2·c0`.
//! For a conventional comb the flat-at-DC coefficient depends on `M`:
//!
//! ```text
//! c0 = −(N/32) · (1 − M^-2) / (1 − 2^-2) = −(N/24)·(1 − M^-2)
//! ```
//!
//! After derating, the `M^-2` term is gone from the comb, so the compensator
//! becomes the `M → ∞` limit `c0 = −N/24` for every `M`.

use num_complex::Complex;

use crate::response::{comb_response, derated_response, CombSpec};
use crate::{Rational, Result, Scalar};

/// Symmetric 3-tap compensator with unit DC gain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CompensatorCoeffs {
    pub c0: Rational,
    pub c1: Rational,
    pub c2: Rational,
}

impl CompensatorCoeffs {
    fn symmetric(c0: Rational) -> Self {
        Self {
            c0,
            c1: Rational::from_integer(1) - c0 - c0,
            c2: c0,
        }
    }

    pub fn dc_gain(&self) -> Rational {
        self.c0 + self.c1 + self.c2
    }

    /// `C(e^{jω})` at the output rate.
    pub fn response<T: Scalar>(&self, omega: T) -> Complex<T> {
        let tap = |c: Rational, k: T| {
            let phase = -omega * k;
            Complex::new(phase.cos(), phase.sin()) * T::from_rational(c)
        };
        tap(self.c0, T::zero()) + tap(self.c1, T::one()) + tap(self.c2, T::lit(2.0))
    }
}

/// Single-stage coefficients, exact: `c0 = −N(M²−1) / (24·M²)`.
pub fn maxflat_coeffs(order: u32, decim: u32) -> CompensatorCoeffs {
    let m2 = i64::from(decim) * i64::from(decim);
    let c0 = -Rational::new(i64::from(order) * (m2 - 1), 24 * m2);
    CompensatorCoeffs::symmetric(c0)
}

/// Coefficients after derating: `c0 = −N/24`, independent of `M`.
pub fn maxflat_coeffs_derated(order: u32) -> CompensatorCoeffs {
    CompensatorCoeffs::symmetric(-Rational::new(i64::from(order), 24))
}

/// The 3-tap form is only maximally flat for narrow bands (`L > 4`).
pub fn narrowband_warning(post_decim: u32) -> Option<String> {
    (post_decim <= 4).then(|| {
        format!(
            "warning: 3-tap maximally flat compensator targets narrow bands (L > 4); got L = {post_decim}"
        )
    })
}

/// Composite response at output-rate frequency `ω`.
///
/// Single stage: `C_M(e^{jω})·H_{N,M}(e^{jω/M})` with `M`-dependent taps.
/// Two stage: `C_∞(e^{jω})·G_{N,M}(e^{jω/M})` with the derated comb.
pub fn compensated_response<T: Scalar>(
    spec: CombSpec,
    two_stage: bool,
    omega: T,
) -> Result<Complex<T>> {
    if two_stage {
        let c = maxflat_coeffs_derated(spec.order());
        Ok(c.response(omega) * derated_response(spec, omega)?)
    } else {
        let c = maxflat_coeffs(spec.order(), spec.decim());
        Ok(c.response(omega) * comb_response(spec, omega))
    }
}
