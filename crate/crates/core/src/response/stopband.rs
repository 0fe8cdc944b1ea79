//! Stop-band dominance of the derated comb over the conventional one.

use super::{comb_response, derating_factor, BandContext, CombSpec};
use crate::derating::DeratingFilter;
use crate::{Result, Scalar};

/// Outcome of checking `|G| ≤ |H|` above the band edge.
#[derive(Debug, Clone, PartialEq)]
pub struct StopbandReport<T> {
    /// `|G| ≤ |H|` at every checked point, with equality only where `ω/M ≡ 0 (mod 2π)`.
    pub dominated: bool,
    pub points_checked: usize,
    pub max_derating_gain: T,
    pub min_derating_gain: T,
    /// Sign changes of the real amplitude `b_N + 2cos(ω/M)`, i.e. zeros the
    /// derating filter adds to the unit circle inside the grid.
    pub new_zero_crossings: usize,
}

/// `points` uniformly spaced frequencies on `(ω_C, Mπ]`.
pub fn stopband_grid<T: Scalar>(spec: CombSpec, band: BandContext, points: usize) -> Vec<T> {
    let lo = band.band_edge::<T>();
    let hi = T::PI() * T::of_u32(spec.decim());
    let n = T::of_usize(points);
    (1..=points)
        .map(|k| lo + (hi - lo) * T::of_usize(k) / n)
        .collect()
}

pub fn stopband_dominance<T: Scalar>(
    spec: CombSpec,
    band: BandContext,
    grid: &[T],
) -> Result<StopbandReport<T>> {
    let filter = DeratingFilter::new(spec.order())?;
    let edge = band.band_edge::<T>();
    let decim = T::of_u32(spec.decim());
    let two_pi = T::PI() + T::PI();
    let slack = T::epsilon() * T::lit(8.0);

    let mut dominated = true;
    let mut max_gain = T::neg_infinity();
    let mut min_gain = T::infinity();
    let mut crossings = 0;
    let mut previous_amp: Option<T> = None;
    let mut checked = 0;

    for &omega in grid.iter().filter(|&&w| w > edge) {
        checked += 1;
        let theta = omega / decim;
        let d = derating_factor(&filter, theta).norm();
        let h = comb_response(spec, omega).norm();
        let g = h * d;
        max_gain = max_gain.max(d);
        min_gain = min_gain.min(d);

        let wrapped = theta - two_pi * (theta / two_pi).round();
        let at_multiple_of_2pi = wrapped.abs() < T::epsilon().sqrt();
        let within = g <= h * (T::one() + slack) && d <= T::one() + slack;
        let strict = d < T::one() || at_multiple_of_2pi;
        if !(within && strict) {
            dominated = false;
        }

        let amp = match filter {
            DeratingFilter::Delay => T::one(),
            DeratingFilter::ThreeTap(s) => T::from_rational(s.b()) + T::lit(2.0) * theta.cos(),
        };
        if let Some(prev) = previous_amp {
            if prev * amp < T::zero() {
                crossings += 1;
            }
        }
        previous_amp = Some(amp);
    }

    Ok(StopbandReport {
        dominated,
        points_checked: checked,
        max_derating_gain: max_gain,
        min_derating_gain: min_gain,
        new_zero_crossings: crossings,
    })
}
