//! Rate-independent pass-band deviation for comb (CIC) decimators.
//!
//! An `N`-th order comb decimator with decimation factor `M` has a pass-band
//! droop that splits into a `sinc^N` part fixed by `N` and a small deviation
//! that shrinks like `M^-2`. A symmetric 3-tap FIR in the integrator stage,
//!
//! ```text
//! D_N(z) = (1 + b_N z^-1 + z^-2) / (2 + b_N),    b_N = 24/N - 2,
//! ```
//!
//! cancels that deviation to first order for every `M` at once.
//!
//! * [`derating`]: exact coefficients, validity classes and word growth.
//! * [`response`]: closed-form responses of conventional, derated, sharpened
//!   and bifurcated-zero combs, plus pass-band deviation sweeps.
//! * [`stream`]: bit-exact integer streaming decimator with a word-length
//!   planner and a direct-convolution oracle.
//! * [`compensator`]: maximally flat 3-tap droop compensators.
//! * [`cli`] and [`selftest`]: command-line front end and invariant suites.
//!
//! Frequency-domain code is generic over [`Scalar`] (`f32` or `f64`);
//! coefficients are exact [`Rational`]s.

pub mod cli;
pub mod compensator;
pub mod derating;
mod error;
pub mod response;
mod scalar;
pub mod selftest;
pub mod stream;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub use compensator::{
    compensated_response, maxflat_coeffs, maxflat_coeffs_derated, CompensatorCoeffs,
};
pub use derating::{
    coefficient_table, derating_coeff, derating_spec, validity_class, DeratingFilter, DeratingSpec,
    ValidityClass,
};
pub use response::{
    comb_response, derated_response, derating_response, passband_deviation, sinc_limit,
    BandContext, BranchSum, CombSpec, DeviationCurve, FrequencyResponse, Variant,
};
pub use stream::{
    direct_fir_oracle, empirical_response, plan_wordlength, run_chain, FilterChainState,
    FirPlacement, SampleStream, WordLengthPlan,
};

pub use num_complex::Complex;

/// Exact rational numbers (always in lowest terms with a positive denominator).
pub type Rational = num_rational::Ratio<i64>;

pub type Complex32 = Complex<f32>;
pub type Complex64 = Complex<f64>;
pub type FrequencyResponse32 = FrequencyResponse<f32>;
pub type FrequencyResponse64 = FrequencyResponse<f64>;
pub type DeviationCurve32 = DeviationCurve<f32>;
pub type DeviationCurve64 = DeviationCurve<f64>;
pub type StopbandReport64 = response::StopbandReport<f64>;
