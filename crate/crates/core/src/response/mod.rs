//! Closed-form frequency responses.
//!
//! All responses use the output-rate convention: the decimated output runs at
//! 1 Hz, so `ω` is in radians per output sample and the comb is evaluated at
//! `z = e^{jω/M}`. The input Nyquist frequency is then `ω = Mπ` and the
//! folding bands sit around integer multiples of `2π`.

mod branch;
mod deviation;
mod stopband;

pub use branch::{cascade_response, sharpened_response, BranchSum, CombBranch, BIFURCATION_WEIGHT};
pub use deviation::{
    deviation_sweep, loglog_slope, passband_deviation, passband_deviation_linear, DeviationCurve,
    Variant, DEFAULT_SWEEP,
};
pub use stopband::{stopband_dominance, stopband_grid, StopbandReport};

use num_complex::Complex;

use crate::derating::DeratingFilter;
use crate::{Error, Result, Scalar};

/// Grid density used when none is given: points per unit of `ω/π`.
pub const DEFAULT_POINTS_PER_PI: usize = 1024;

/// A conventional comb decimator of order `N` and decimation factor `M`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CombSpec {
    order: u32,
    decim: u32,
}

impl CombSpec {
    pub fn new(order: u32, decim: u32) -> Result<Self> {
        if order == 0 {
            return Err(Error::Degenerate);
        }
        if decim < 2 {
            return Err(Error::InvalidDecimation(decim));
        }
        Ok(Self { order, decim })
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn decim(&self) -> u32 {
        self.decim
    }
}

/// Decimation factor `L` of the stages following the comb, which fixes the
/// pass-band edge `ω_C = π/L` at the comb output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BandContext {
    post_decim: u32,
}

impl BandContext {
    pub fn new(post_decim: u32) -> Result<Self> {
        if post_decim < 2 {
            return Err(Error::InvalidPostDecimation(post_decim));
        }
        Ok(Self { post_decim })
    }

    pub fn post_decim(&self) -> u32 {
        self.post_decim
    }

    pub fn band_edge<T: Scalar>(&self) -> T {
        T::PI() / T::of_u32(self.post_decim)
    }
}

impl Default for BandContext {
    fn default() -> Self {
        Self { post_decim: 2 }
    }
}

/// `sin(len·x) / (len·sin x)`, the normalised Dirichlet kernel.
///
/// Near the removable singularities `x ≡ 0 (mod π)` the quotient is replaced
/// by the equivalent cosine sum `Σ cos((len-1-2i)x) / len`.
pub(crate) fn dirichlet<T: Scalar>(len: u32, x: T) -> T {
    let l = T::of_u32(len);
    let s = x.sin();
    if s.abs() < T::epsilon().sqrt() {
        let top = T::of_u32(len - 1);
        let two = T::lit(2.0);
        let sum = (0..len).fold(T::zero(), |acc, i| {
            acc + ((top - two * T::of_u32(i)) * x).cos()
        });
        sum / l
    } else {
        (l * x).sin() / (l * s)
    }
}

/// Normalised comb of `order` stages, each a length-`len` moving sum,
/// evaluated at input-rate angle `theta`. Includes the linear-phase term.
pub(crate) fn comb_factor<T: Scalar>(order: u32, len: u32, theta: T) -> Complex<T> {
    let half = T::lit(0.5);
    let amp = dirichlet(len, theta * half).powi(order as i32);
    let phase = -theta * half * T::of_u32(len - 1) * T::of_u32(order);
    Complex::new(amp * phase.cos(), amp * phase.sin())
}

/// `H_{N,M}(e^{jω/M})` with unit DC gain.
pub fn comb_response<T: Scalar>(spec: CombSpec, omega: T) -> Complex<T> {
    let theta = omega / T::of_u32(spec.decim);
    comb_factor(spec.order, spec.decim, theta)
}

/// `(sin(ω/2) / (ω/2))^N`, the `M → ∞` limit of the comb magnitude.
pub fn sinc_limit<T: Scalar>(order: u32, omega: T) -> T {
    let x = omega * T::lit(0.5);
    let base = if x.abs() < T::epsilon().sqrt() {
        T::one() - x * x / T::lit(6.0)
    } else {
        x.sin() / x
    };
    base.powi(order as i32)
}

/// Exact `D_N(e^{jω/M}) = e^{-jω/M} (b_N + 2cos(ω/M)) / (2 + b_N)`.
///
/// `N = 0` gives the pure delay `e^{-jω/M}`.
pub fn derating_response<T: Scalar>(order: u32, decim: u32, omega: T) -> Result<Complex<T>> {
    let filter = DeratingFilter::new(order)?;
    Ok(derating_factor(&filter, omega / T::of_u32(decim)))
}

pub(crate) fn derating_factor<T: Scalar>(filter: &DeratingFilter, theta: T) -> Complex<T> {
    let amp = match filter {
        DeratingFilter::Delay => T::one(),
        DeratingFilter::ThreeTap(spec) => {
            let b = T::from_rational(spec.b());
            let two = T::lit(2.0);
            (b + two * theta.cos()) / (two + b)
        }
    };
    Complex::new(amp * theta.cos(), -amp * theta.sin())
}

/// `G_{N,M} = H_{N,M} · D_N`.
pub fn derated_response<T: Scalar>(spec: CombSpec, omega: T) -> Result<Complex<T>> {
    Ok(comb_response(spec, omega) * derating_response(spec.order, spec.decim, omega)?)
}

/// Uniform grid on `[0, span_pi·π]` with `points_per_pi` intervals per unit of `ω/π`.
pub fn uniform_grid<T: Scalar>(span_pi: u32, points_per_pi: usize) -> Vec<T> {
    let intervals = span_pi as usize * points_per_pi.max(1);
    let step = T::PI() * T::of_u32(span_pi) / T::of_usize(intervals.max(1));
    (0..=intervals).map(|k| T::of_usize(k) * step).collect()
}

/// Smallest level reported by [`FrequencyResponse::magnitude_db`].
pub const MIN_DB: f64 = -400.0;

pub(crate) fn to_db<T: Scalar>(magnitude: T) -> T {
    let floor = T::lit(MIN_DB);
    if magnitude <= T::zero() {
        floor
    } else {
        (T::lit(20.0) * magnitude.log10()).max(floor)
    }
}

/// Complex response sampled on a strictly increasing frequency grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyResponse<T> {
    grid: Vec<T>,
    values: Vec<Complex<T>>,
}

impl<T: Scalar> FrequencyResponse<T> {
    pub fn evaluate<F>(grid: Vec<T>, mut response: F) -> Result<Self>
    where
        F: FnMut(T) -> Result<Complex<T>>,
    {
        if grid.is_empty() {
            return Err(Error::Empty);
        }
        assert!(
            grid.windows(2).all(|w| w[0] < w[1]),
            "frequency grid must be strictly increasing"
        );
        let values = grid
            .iter()
            .map(|&w| response(w))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { grid, values })
    }

    pub fn grid(&self) -> &[T] {
        &self.grid
    }

    pub fn values(&self) -> &[Complex<T>] {
        &self.values
    }

    pub fn magnitude(&self) -> Vec<T> {
        self.values.iter().map(|v| v.norm()).collect()
    }

    /// `20·log10|H|`, floored at [`MIN_DB`] so exact nulls stay finite.
    pub fn magnitude_db(&self) -> Vec<T> {
        self.values.iter().map(|v| to_db(v.norm())).collect()
    }
}
