//! Pass-band deviation: the rate-dependent part of the droop.
//!
//! For a filter variant at decimation `M`, the deviation is the gap between
//! its magnitude at the band edge `ω = π/L` and the `M → ∞` limit of that
//! magnitude. The limit is evaluated analytically from `sinc^N`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex;

use super::{comb_response, derated_response, sinc_limit, to_db, BandContext, BranchSum, CombSpec};
use crate::{Error, Result, Scalar};

/// `M = 4, 8, ..., 32`.
pub const DEFAULT_SWEEP: [u32; 8] = [4, 8, 12, 16, 20, 24, 28, 32];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    Conventional,
    Derated,
    /// `3H² − 2H³` with base order 2; the order argument is ignored.
    Sharpened,
    SharpenedDerated,
    /// `(1+κ)H_N − κH_{N−2}` for the given order `N ≥ 2`.
    Cascade,
    CascadeDerated,
}

impl Variant {
    pub const ALL: [Variant; 6] = [
        Variant::Conventional,
        Variant::Derated,
        Variant::Sharpened,
        Variant::SharpenedDerated,
        Variant::Cascade,
        Variant::CascadeDerated,
    ];

    pub fn is_derated(self) -> bool {
        matches!(
            self,
            Self::Derated | Self::SharpenedDerated | Self::CascadeDerated
        )
    }

    /// The same structure with the derating filter switched on or off.
    pub fn with_derating(self, derated: bool) -> Self {
        use Variant::*;
        match (self, derated) {
            (Conventional | Derated, false) => Conventional,
            (Conventional | Derated, true) => Derated,
            (Sharpened | SharpenedDerated, false) => Sharpened,
            (Sharpened | SharpenedDerated, true) => SharpenedDerated,
            (Cascade | CascadeDerated, false) => Cascade,
            (Cascade | CascadeDerated, true) => CascadeDerated,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Self::Conventional => "conventional",
            Self::Derated => "derated",
            Self::Sharpened => "sharpened",
            Self::SharpenedDerated => "sharpened-derated",
            Self::Cascade => "cascade",
            Self::CascadeDerated => "cascade-derated",
        }
    }

    fn structure(self, order: u32) -> Result<Option<BranchSum>> {
        match self {
            Self::Conventional | Self::Derated => Ok(None),
            Self::Sharpened | Self::SharpenedDerated => Ok(Some(BranchSum::sharpened())),
            Self::Cascade | Self::CascadeDerated => BranchSum::bifurcated(order).map(Some),
        }
    }

    /// Response at `z = e^{jω/M}` with unit DC gain.
    pub fn response<T: Scalar>(self, order: u32, decim: u32, omega: T) -> Result<Complex<T>> {
        match self.structure(order)? {
            None => {
                let spec = CombSpec::new(order, decim)?;
                if self.is_derated() {
                    derated_response(spec, omega)
                } else {
                    Ok(comb_response(spec, omega))
                }
            }
            Some(sum) => sum.response(decim, omega, self.is_derated()),
        }
    }

    /// `M → ∞` magnitude. The derating filter tends to its DC gain of 1, so
    /// derated and underated variants share the limit.
    pub fn limit_magnitude<T: Scalar>(self, order: u32, omega: T) -> Result<T> {
        match self.structure(order)? {
            None => {
                if order == 0 {
                    return Err(Error::Degenerate);
                }
                Ok(sinc_limit(order, omega).abs())
            }
            Some(sum) => Ok(sum.limit_magnitude(omega)),
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|v| v.label() == s)
            .ok_or_else(|| format!("unknown variant `{s}`"))
    }
}

/// `20·log10|F_M(ω_C)| − 20·log10|F_∞(ω_C)|` in dB.
pub fn passband_deviation<T: Scalar>(
    variant: Variant,
    order: u32,
    decim: u32,
    band: BandContext,
) -> Result<T> {
    let edge = band.band_edge::<T>();
    let finite = variant.response(order, decim, edge)?.norm();
    let limit = variant.limit_magnitude(order, edge)?;
    Ok(to_db(finite) - to_db(limit))
}

/// `|F_M(ω_C)| − |F_∞(ω_C)|` as a plain magnitude difference.
pub fn passband_deviation_linear<T: Scalar>(
    variant: Variant,
    order: u32,
    decim: u32,
    band: BandContext,
) -> Result<T> {
    let edge = band.band_edge::<T>();
    let finite = variant.response(order, decim, edge)?.norm();
    Ok(finite - variant.limit_magnitude(order, edge)?)
}

/// Per-`M` deviation values of one variant.
#[derive(Debug, Clone, PartialEq)]
pub struct DeviationCurve<T> {
    pub variant: Variant,
    pub order: u32,
    pub m_values: Vec<u32>,
    pub deviation_db: Vec<T>,
}

impl<T: Scalar> DeviationCurve<T> {
    /// `max − min` of the deviation over the sweep.
    pub fn spread(&self) -> T {
        let max = self
            .deviation_db
            .iter()
            .copied()
            .fold(T::neg_infinity(), T::max);
        let min = self
            .deviation_db
            .iter()
            .copied()
            .fold(T::infinity(), T::min);
        max - min
    }

    /// Log-log slope of `|deviation|` against `M`.
    pub fn slope(&self) -> T {
        let xs: Vec<T> = self.m_values.iter().map(|&m| T::of_u32(m)).collect();
        let ys: Vec<T> = self.deviation_db.iter().map(|d| d.abs()).collect();
        loglog_slope(&xs, &ys)
    }
}

pub fn deviation_sweep<T: Scalar>(
    variant: Variant,
    order: u32,
    m_values: &[u32],
    band: BandContext,
) -> Result<DeviationCurve<T>> {
    if m_values.is_empty() {
        return Err(Error::Empty);
    }
    let deviation_db = m_values
        .iter()
        .map(|&m| passband_deviation(variant, order, m, band))
        .collect::<Result<Vec<T>>>()?;
    Ok(DeviationCurve {
        variant,
        order,
        m_values: m_values.to_vec(),
        deviation_db,
    })
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope<T: Scalar>(xs: &[T], ys: &[T]) -> T {
    assert_eq!(xs.len(), ys.len());
    assert!(xs.len() >= 2, "slope needs two points");
    let n = T::of_usize(xs.len());
    let lx: Vec<T> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<T> = ys.iter().map(|y| y.ln()).collect();
    let mx = lx.iter().copied().fold(T::zero(), |a, b| a + b) / n;
    let my = ly.iter().copied().fold(T::zero(), |a, b| a + b) / n;
    let (num, den) = lx
        .iter()
        .zip(&ly)
        .fold((T::zero(), T::zero()), |(num, den), (&x, &y)| {
            (num + (x - mx) * (y - my), den + (x - mx) * (x - mx))
        });
    num / den
}

#[cfg(test)]
mod tests {
    use super::*;

    fn band() -> BandContext {
        BandContext::new(2).unwrap()
    }

    #[test]
    fn conventional_and_derated_at_m4() {
        let dh: f64 = passband_deviation(Variant::Conventional, 3, 4, band()).unwrap();
        assert!((dh - 0.168).abs() < 0.002, "{dh}");
        // 20·log10(0.743990 / 0.729767)
        assert!((dh - 20.0 * (0.7439913 / 0.7297689f64).log10()).abs() < 1e-5);
        let dg: f64 = passband_deviation(Variant::Derated, 3, 4, band()).unwrap();
        assert!(dg.abs() <= 0.002, "{dg}");
    }

    #[test]
    fn large_m_vanishes() {
        for n in 1..=11 {
            let d: f64 = passband_deviation(Variant::Conventional, n, 1_000_000, band()).unwrap();
            assert!(d.abs() < 1e-6, "N={n}: {d}");
        }
    }

    #[test]
    fn sweep_examples() {
        let c = deviation_sweep::<f64>(Variant::Conventional, 3, &[4, 8], band()).unwrap();
        assert!((c.deviation_db[0] - 0.168).abs() < 0.002);
        assert!((c.deviation_db[1] - 0.042).abs() < 0.002);
        let ratio = c.deviation_db[0] / c.deviation_db[1];
        assert!((ratio - 4.0).abs() < 0.2);
        let d6 = deviation_sweep::<f64>(Variant::Derated, 6, &[4], band()).unwrap();
        assert!(d6.deviation_db[0].abs() <= 0.002);
        let c6: f64 = passband_deviation(Variant::Conventional, 6, 4, band()).unwrap();
        // 20·log10(0.906127^6 / 0.900316^6)
        assert!((c6 - 0.34).abs() < 0.01);
        assert!(deviation_sweep::<f64>(Variant::Conventional, 3, &[], band()).is_err());
    }

    #[test]
    fn sharpened_deviation() {
        let u: f64 = passband_deviation(Variant::Sharpened, 0, 4, band()).unwrap();
        assert!((u - 0.090).abs() < 0.005, "{u}");
        let d: f64 = passband_deviation(Variant::SharpenedDerated, 0, 4, band()).unwrap();
        assert!(d.abs() <= 0.01, "{d}");
    }

    #[test]
    fn variant_labels_round_trip() {
        for v in Variant::ALL {
            assert_eq!(v.label().parse::<Variant>().unwrap(), v);
            assert!(v.with_derating(true).is_derated());
            assert!(!v.with_derating(false).is_derated());
        }
        assert!("bogus".parse::<Variant>().is_err());
    }

    #[test]
    fn slope_of_power_law() {
        let xs = [4.0, 8.0, 16.0, 32.0];
        let ys: Vec<f64> = xs.iter().map(|x: &f64| 3.0 * x.powf(-2.0)).collect();
        assert!((loglog_slope(&xs, &ys) + 2.0).abs() < 1e-12);
    }
}
