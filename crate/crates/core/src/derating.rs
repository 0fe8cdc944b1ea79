//! Derating filter coefficients.
//!
//! The derating filter of order `N` is the symmetric 3-tap FIR
//!
//! ```text
//! D_N(z) = (1 + b_N z^-1 + z^-2) / (2 + b_N),    b_N = 24/N - 2
//! ```
//!
//! placed in the integrator (input-rate) half of an `N`-th order comb
//! decimator. It cancels the `(ω/M)^2` term of the comb's rate-dependent
//! pass-band deviation, and depends on `N` only.
//!
//! Everything in this module is exact: `b_N` is rational, and scaling by
//! `A_N = N / gcd(24, N)` turns the taps into small integers whose sum is
//! `24 / gcd(24, N)`.

use num_integer::Integer;

use crate::{Error, Rational, Result};

/// Highest order with a positive coefficient (`b_N > 0 ⟺ N < 12`).
pub const MAX_ORDER: u32 = 11;

/// Highest order whose filter adds no unit-circle zeros (`b_N ≥ 2 ⟺ N ≤ 6`).
pub const MAX_STRICT_ORDER: u32 = 6;

/// Classification of a comb order with respect to the 3-tap derating form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ValidityClass {
    /// N = 0: `b_0 → ∞`, the filter is a pure unit delay.
    Degenerate,
    /// 1 ≤ N ≤ 6, `b_N ≥ 2`: stop band preserved and no new zeros on the unit circle.
    StrictlyValid,
    /// 7 ≤ N ≤ 11, `0 < b_N < 2`: stop band preserved, but `|D_N|` has extra zeros.
    Valid,
    /// N ≥ 12, `b_N ≤ 0`: the stop-band guarantee fails.
    Invalid,
}

impl ValidityClass {
    pub fn is_usable(self) -> bool {
        matches!(self, Self::StrictlyValid | Self::Valid)
    }
}

pub fn validity_class(order: u32) -> ValidityClass {
    match order {
        0 => ValidityClass::Degenerate,
        1..=MAX_STRICT_ORDER => ValidityClass::StrictlyValid,
        7..=MAX_ORDER => ValidityClass::Valid,
        _ => ValidityClass::Invalid,
    }
}

/// `b_N = 24/N - 2` in lowest terms.
pub fn derating_coeff(order: u32) -> Result<Rational> {
    match validity_class(order) {
        ValidityClass::Degenerate => Err(Error::Degenerate),
        ValidityClass::Invalid => Err(Error::InvalidOrder(order)),
        _ => Ok(Rational::new(24, i64::from(order)) - Rational::from_integer(2)),
    }
}

/// Integer realisation of `D_N` for 1 ≤ N ≤ 11.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DeratingSpec {
    order: u32,
    b: Rational,
    scale: i64,
    taps: [i64; 3],
    norm: i64,
    extra_bits: u32,
}

impl DeratingSpec {
    pub fn new(order: u32) -> Result<Self> {
        let b = derating_coeff(order)?;
        let n = i64::from(order);
        let scale = n / n.gcd(&24);
        let middle = b * Rational::from_integer(scale);
        debug_assert!(middle.is_integer());
        let taps = [scale, middle.to_integer(), scale];
        let norm = taps.iter().sum::<i64>();
        debug_assert_eq!(norm, 24 / n.gcd(&24));
        Ok(Self {
            order,
            b,
            scale,
            taps,
            norm,
            extra_bits: ceil_log2(norm as u128),
        })
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// The rational coefficient `b_N`.
    pub fn b(&self) -> Rational {
        self.b
    }

    /// Integer scaling `A_N = N / gcd(24, N)`.
    pub fn scale(&self) -> i64 {
        self.scale
    }

    /// `(A_N, A_N·b_N, A_N)`, palindromic and non-negative.
    pub fn int_taps(&self) -> [i64; 3] {
        self.taps
    }

    /// `A_N·(2 + b_N) = 24 / gcd(24, N)`, the integer DC gain of `int_taps`.
    pub fn norm(&self) -> i64 {
        self.norm
    }

    /// Extra output bits `W_b = ⌈log2(norm)⌉` needed by the integer filter.
    pub fn extra_bits(&self) -> u32 {
        self.extra_bits
    }

    pub fn validity(&self) -> ValidityClass {
        validity_class(self.order)
    }
}

/// Shorthand for [`DeratingSpec::new`].
pub fn derating_spec(order: u32) -> Result<DeratingSpec> {
    DeratingSpec::new(order)
}

/// Derating filter for any order the structure admits, including the
/// degenerate delay used by the `N = 0` branch of a cascade.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DeratingFilter {
    /// `D_0(z) = z^-1`.
    Delay,
    ThreeTap(DeratingSpec),
}

impl DeratingFilter {
    pub fn new(order: u32) -> Result<Self> {
        match order {
            0 => Ok(Self::Delay),
            _ => DeratingSpec::new(order).map(Self::ThreeTap),
        }
    }

    pub fn int_taps(&self) -> [i64; 3] {
        match self {
            Self::Delay => [0, 1, 0],
            Self::ThreeTap(spec) => spec.int_taps(),
        }
    }

    pub fn norm(&self) -> i64 {
        match self {
            Self::Delay => 1,
            Self::ThreeTap(spec) => spec.norm(),
        }
    }

    pub fn extra_bits(&self) -> u32 {
        match self {
            Self::Delay => 0,
            Self::ThreeTap(spec) => spec.extra_bits(),
        }
    }
}

/// Rows N = 1..=11 of the coefficient and word-length table.
pub fn coefficient_table() -> Vec<DeratingSpec> {
    (1..=MAX_ORDER)
        .map(|n| DeratingSpec::new(n).expect("orders 1..=11 are valid"))
        .collect()
}

/// `⌈log2 x⌉` for `x ≥ 1`.
pub(crate) fn ceil_log2(x: u128) -> u32 {
    debug_assert!(x >= 1);
    if x <= 1 {
        0
    } else {
        128 - (x - 1).leading_zeros()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // (N, b_num, b_den, A_N, W_b) transcribed from the published table.
    const PUBLISHED: [(u32, i64, i64, i64, u32); 11] = [
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

    #[test]
    fn table_matches_published_values() {
        let rows = coefficient_table();
        assert_eq!(rows.len(), 11);
        for (row, &(n, num, den, a, wb)) in rows.iter().zip(PUBLISHED.iter()) {
            assert_eq!(row.order(), n);
            assert_eq!(row.b(), Rational::new(num, den), "b_{n}");
            assert_eq!(row.scale(), a, "A_{n}");
            assert_eq!(row.extra_bits(), wb, "W_b for N={n}");
        }
    }

    #[test]
    fn coefficient_examples() {
        assert_eq!(derating_coeff(3), Ok(Rational::from_integer(6)));
        assert_eq!(derating_coeff(5), Ok(Rational::new(14, 5)));
        assert_eq!(derating_coeff(12), Err(Error::InvalidOrder(12)));
        assert_eq!(derating_coeff(0), Err(Error::Degenerate));
        assert_eq!(derating_coeff(40), Err(Error::InvalidOrder(40)));
    }

    #[test]
    fn spec_examples() {
        let s5 = derating_spec(5).unwrap();
        assert_eq!(
            (s5.int_taps(), s5.norm(), s5.extra_bits()),
            ([5, 14, 5], 24, 5)
        );
        let s9 = derating_spec(9).unwrap();
        assert_eq!(s9.b(), Rational::new(2, 3));
        assert_eq!(
            (s9.scale(), s9.int_taps(), s9.norm(), s9.extra_bits()),
            (3, [3, 2, 3], 8, 3)
        );
        let s1 = derating_spec(1).unwrap();
        assert_eq!(
            (s1.int_taps(), s1.norm(), s1.extra_bits()),
            ([1, 22, 1], 24, 5)
        );
    }

    #[test]
    fn validity_boundaries() {
        assert_eq!(validity_class(0), ValidityClass::Degenerate);
        assert_eq!(validity_class(6), ValidityClass::StrictlyValid);
        assert_eq!(validity_class(7), ValidityClass::Valid);
        assert_eq!(validity_class(11), ValidityClass::Valid);
        assert_eq!(validity_class(12), ValidityClass::Invalid);
        for n in 1..=MAX_ORDER {
            let b = derating_coeff(n).unwrap();
            let two = Rational::from_integer(2);
            match validity_class(n) {
                ValidityClass::StrictlyValid => assert!(b >= two),
                ValidityClass::Valid => assert!(b > Rational::from_integer(0) && b < two),
                other => panic!("unexpected {other:?} for N={n}"),
            }
        }
    }

    #[test]
    fn exhaustive_identities() {
        for n in 1..=MAX_ORDER {
            let s = derating_spec(n).unwrap();
            let g = i64::from(n).gcd(&24);
            let [t0, t1, t2] = s.int_taps();
            assert_eq!(t0, t2);
            assert!(t0 > 0 && t1 > 0);
            assert_eq!(
                Rational::from_integer(s.scale()) * (Rational::from_integer(2) + s.b()),
                Rational::from_integer(24 / g)
            );
            assert_eq!(t0 + t1 + t2, s.norm());
            assert!(s.extra_bits() <= 5);
            assert!(1i64 << s.extra_bits() >= s.norm());
            assert!(1i64 << (s.extra_bits() - 1) < s.norm());
        }
    }

    #[test]
    fn degenerate_filter_is_a_delay() {
        let d = DeratingFilter::new(0).unwrap();
        assert_eq!(d.int_taps(), [0, 1, 0]);
        assert_eq!(d.norm(), 1);
        assert!(DeratingFilter::new(12).is_err());
    }

    #[test]
    fn ceil_log2_small_values() {
        let expect = [
            (1u128, 0u32),
            (2, 1),
            (3, 2),
            (4, 2),
            (5, 3),
            (8, 3),
            (9, 4),
            (512, 9),
            (513, 10),
        ];
        for (x, e) in expect {
            assert_eq!(ceil_log2(x), e, "x={x}");
        }
    }
}
