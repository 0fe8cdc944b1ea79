//! Bit-exact integer comb decimator with an integral-stage derating filter.
//!
//! ```text
//! x ─► [D_N taps] ─► ∫ ─► ∫ … ∫ ─► ↓M ─► Δ ─► Δ … Δ ─► y
//!                    (N integrators)      (N differentiators)
//! ```
//!
//! Every register is a two's-complement word of `total_bits` bits and every
//! addition wraps. The integrators overflow freely on long inputs; the
//! differentiators undo the wrap as long as the final result fits in the
//! word, which the [`WordLengthPlan`] guarantees.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::derating::{ceil_log2, DeratingFilter, DeratingSpec};
use crate::{Error, Result};

/// Widest register supported by the chain.
pub const MAX_REGISTER_BITS: u32 = 128;

/// Signed integer samples that each fit in `bits` bits (`|x| < 2^(bits-1)`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampleStream {
    bits: u32,
    samples: Vec<i128>,
}

impl SampleStream {
    pub fn new(samples: Vec<i128>, bits: u32) -> Result<Self> {
        if bits == 0 || bits > MAX_REGISTER_BITS {
            return Err(Error::InvalidInputBits(bits));
        }
        let bound = 1u128 << (bits - 1);
        if let Some((index, &value)) = samples
            .iter()
            .enumerate()
            .find(|(_, v)| v.unsigned_abs() >= bound)
        {
            return Err(Error::SampleOutOfRange { index, value, bits });
        }
        Ok(Self { bits, samples })
    }

    pub fn from_i64(samples: &[i64], bits: u32) -> Result<Self> {
        Self::new(samples.iter().map(|&s| i128::from(s)).collect(), bits)
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn samples(&self) -> &[i128] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn into_samples(self) -> Vec<i128> {
        self.samples
    }
}

/// Register budget for one (N, M, B_in) configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct WordLengthPlan {
    pub order: u32,
    pub decim: u32,
    pub input_bits: u32,
    /// `N·⌈log2 M⌉`, the classic comb register growth.
    pub comb_growth_bits: u32,
    /// `W_b` of the derating filter.
    pub derate_bits: u32,
    /// Width of every register in the chain.
    pub total_bits: u32,
}

impl WordLengthPlan {
    pub fn minimum_bits(&self) -> u32 {
        self.input_bits + self.comb_growth_bits + self.derate_bits
    }

    /// Same plan with wider registers. Narrower than the minimum is refused.
    pub fn with_total_bits(self, total_bits: u32) -> Result<Self> {
        if total_bits > MAX_REGISTER_BITS {
            return Err(Error::WordLengthTooWide(total_bits));
        }
        if total_bits < self.minimum_bits() {
            return Err(Error::InvalidInputBits(total_bits));
        }
        Ok(Self { total_bits, ..self })
    }

    /// DC gain of the chain: `M^N`, times `24/gcd(24, N)` when derated.
    pub fn gain(&self, derated: bool) -> u128 {
        let comb = u128::from(self.decim).pow(self.order);
        if derated {
            comb * DeratingSpec::new(self.order).map_or(1, |s| s.norm() as u128)
        } else {
            comb
        }
    }
}

pub fn plan_wordlength(order: u32, decim: u32, input_bits: u32) -> Result<WordLengthPlan> {
    let spec = DeratingSpec::new(order)?;
    if decim < 2 {
        return Err(Error::InvalidDecimation(decim));
    }
    if input_bits == 0 {
        return Err(Error::InvalidInputBits(input_bits));
    }
    let comb_growth_bits = order * ceil_log2(u128::from(decim));
    let derate_bits = spec.extra_bits();
    let total_bits = input_bits + comb_growth_bits + derate_bits;
    if total_bits > MAX_REGISTER_BITS {
        return Err(Error::WordLengthTooWide(total_bits));
    }
    Ok(WordLengthPlan {
        order,
        decim,
        input_bits,
        comb_growth_bits,
        derate_bits,
        total_bits,
    })
}

/// Where the derating FIR sits relative to the integrator cascade.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum FirPlacement {
    /// Before the first integrator.
    #[default]
    Input,
    /// After the last integrator, just before the down-sampler.
    Output,
}

/// Sign-extends the low `bits` bits of `x`.
#[inline]
fn wrap(x: i128, bits: u32) -> i128 {
    if bits >= 128 {
        x
    } else {
        let shift = 128 - bits;
        (x << shift) >> shift
    }
}

/// Running state of one streaming decimator.
#[derive(Debug, Clone)]
pub struct FilterChainState {
    plan: WordLengthPlan,
    taps: Option<[i128; 3]>,
    placement: FirPlacement,
    integrators: Vec<i128>,
    fir_delay: [i128; 2],
    differentiators: Vec<i128>,
    phase: u32,
    integrator_wraps: u64,
}

impl FilterChainState {
    pub fn new(plan: WordLengthPlan, derated: bool, placement: FirPlacement) -> Self {
        let taps = derated.then(|| {
            let [a, b, c] = DeratingFilter::new(plan.order)
                .expect("plan orders are valid")
                .int_taps();
            [i128::from(a), i128::from(b), i128::from(c)]
        });
        Self {
            plan,
            taps,
            placement,
            integrators: vec![0; plan.order as usize],
            fir_delay: [0; 2],
            differentiators: vec![0; plan.order as usize],
            phase: 0,
            integrator_wraps: 0,
        }
    }

    pub fn plan(&self) -> &WordLengthPlan {
        &self.plan
    }

    /// Number of integrator additions that overflowed the register width.
    pub fn integrator_wraps(&self) -> u64 {
        self.integrator_wraps
    }

    pub fn reset(&mut self) {
        self.integrators.fill(0);
        self.differentiators.fill(0);
        self.fir_delay = [0; 2];
        self.phase = 0;
        self.integrator_wraps = 0;
    }

    fn fir(&mut self, x: i128) -> i128 {
        let bits = self.plan.total_bits;
        match self.taps {
            None => x,
            Some([t0, t1, t2]) => {
                let [x1, x2] = self.fir_delay;
                let y = t0
                    .wrapping_mul(x)
                    .wrapping_add(t1.wrapping_mul(x1))
                    .wrapping_add(t2.wrapping_mul(x2));
                self.fir_delay = [x, x1];
                wrap(y, bits)
            }
        }
    }

    /// Feeds one input-rate sample; returns an output every `M` inputs
    /// (on input indices `≡ M−1 (mod M)`).
    pub fn process_sample(&mut self, x: i128) -> Option<i128> {
        let bits = self.plan.total_bits;
        let mut v = wrap(x, bits);
        if self.placement == FirPlacement::Input {
            v = self.fir(v);
        }
        for acc in &mut self.integrators {
            let (sum, overflowed) = acc.overflowing_add(v);
            let wrapped = wrap(sum, bits);
            if overflowed || wrapped != sum {
                self.integrator_wraps += 1;
            }
            *acc = wrapped;
            v = wrapped;
        }
        if self.placement == FirPlacement::Output {
            v = self.fir(v);
        }

        self.phase += 1;
        if self.phase < self.plan.decim {
            return None;
        }
        self.phase = 0;
        for delay in &mut self.differentiators {
            let out = wrap(v.wrapping_sub(*delay), bits);
            *delay = v;
            v = out;
        }
        Some(v)
    }
}

pub fn run_chain(
    input: &SampleStream,
    plan: WordLengthPlan,
    derated: bool,
) -> Result<SampleStream> {
    run_chain_with(input, plan, derated, FirPlacement::default())
}

pub fn run_chain_with(
    input: &SampleStream,
    plan: WordLengthPlan,
    derated: bool,
    placement: FirPlacement,
) -> Result<SampleStream> {
    if input.bits() > plan.input_bits {
        return Err(Error::InvalidInputBits(input.bits()));
    }
    let mut state = FilterChainState::new(plan, derated, placement);
    let out = input
        .samples()
        .iter()
        .filter_map(|&x| state.process_sample(x))
        .collect();
    Ok(SampleStream {
        bits: plan.total_bits,
        samples: out,
    })
}

/// Full-rate impulse response of the chain before decimation: the order-`N`
/// power of a length-`M` box, convolved with the integer derating taps.
pub fn expanded_taps(order: u32, decim: u32, derated: bool) -> Result<Vec<BigInt>> {
    if decim < 2 {
        return Err(Error::InvalidDecimation(decim));
    }
    let filter = DeratingFilter::new(order)?;
    let boxcar = vec![BigInt::from(1); decim as usize];
    let mut taps = vec![BigInt::from(1)];
    for _ in 0..order {
        taps = convolve(&taps, &boxcar);
    }
    if derated {
        let d: Vec<BigInt> = filter.int_taps().iter().map(|&t| BigInt::from(t)).collect();
        taps = convolve(&taps, &d);
    }
    Ok(taps)
}

fn convolve(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Reference model: explicit convolution with [`expanded_taps`] in
/// arbitrary precision, sampled at input indices `≡ M−1 (mod M)`.
pub fn direct_fir_oracle(
    input: &SampleStream,
    order: u32,
    decim: u32,
    derated: bool,
) -> Result<SampleStream> {
    let taps = expanded_taps(order, decim, derated)?;
    let x = input.samples();
    let m = decim as usize;
    let mut out = Vec::with_capacity(x.len() / m);
    for n in (m - 1..x.len()).step_by(m) {
        let mut acc = BigInt::zero();
        for (k, tap) in taps.iter().enumerate().take(n + 1) {
            acc += tap * x[n - k];
        }
        let v = acc.to_i128().ok_or(Error::WordLengthTooWide(129))?;
        out.push(v);
    }
    let gain: BigInt = taps.iter().sum();
    let bits = input.bits() + ceil_log2(gain.to_u128().unwrap_or(u128::MAX));
    Ok(SampleStream {
        bits: bits.min(MAX_REGISTER_BITS),
        samples: out,
    })
}

/// Amplitude of the probe tones used by [`empirical_response`].
const PROBE_AMPLITUDE: f64 = (1u64 << 30) as f64;
const PROBE_BITS: u32 = 32;
const PROBE_OUTPUTS: usize = 512;

/// Measures `|G(ω)|` (or `|H(ω)|`) by driving the integer chain with
/// quantised cosine and sine probes and projecting the decimated output onto
/// `e^{jω k}`. Magnitudes are normalised by the chain gain.
pub fn empirical_response(
    order: u32,
    decim: u32,
    derated: bool,
    omegas: &[f64],
) -> Result<Vec<f64>> {
    let plan = plan_wordlength(order, decim, PROBE_BITS)?;
    let gain = plan.gain(derated) as f64;
    let taps_len = expanded_taps(order, decim, derated)?.len();
    let skip = taps_len.div_ceil(decim as usize) + 1;
    let total_outputs = skip + PROBE_OUTPUTS;
    let n_inputs = total_outputs * decim as usize;

    omegas
        .iter()
        .map(|&omega| {
            let theta = omega / f64::from(decim);
            if !(0.0..std::f64::consts::PI).contains(&theta) {
                return Err(Error::ProbeAboveNyquist(omega));
            }
            let mut cos_chain = FilterChainState::new(plan, derated, FirPlacement::Input);
            let mut sin_chain = FilterChainState::new(plan, derated, FirPlacement::Input);
            let (mut re, mut im) = (0.0, 0.0);
            let mut k = 0;
            for n in 0..n_inputs {
                let phase = theta * n as f64;
                let xc = (PROBE_AMPLITUDE * phase.cos()).round() as i128;
                let xs = (PROBE_AMPLITUDE * phase.sin()).round() as i128;
                let yc = cos_chain.process_sample(xc);
                let ys = sin_chain.process_sample(xs);
                if let (Some(yc), Some(ys)) = (yc, ys) {
                    if k >= skip {
                        // (yc + j·ys)·e^{-jθn}
                        let (c, s) = (phase.cos(), phase.sin());
                        let (yc, ys) = (yc as f64, ys as f64);
                        re += yc * c + ys * s;
                        im += ys * c - yc * s;
                    }
                    k += 1;
                }
            }
            let count = (k - skip) as f64;
            Ok((re / count).hypot(im / count) / (PROBE_AMPLITUDE * gain))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn impulse(len: usize, bits: u32) -> SampleStream {
        let mut v = vec![0; len];
        v[0] = 1;
        SampleStream::new(v, bits).unwrap()
    }

    #[test]
    fn plan_examples() {
        let p = plan_wordlength(3, 4, 8).unwrap();
        assert_eq!((p.derate_bits, p.comb_growth_bits), (3, 6));
        assert!(p.total_bits >= 17);
        // gain 4^3·8 = 512 needs 9 bits on top of the input
        assert_eq!(p.gain(true), 512);
        assert_eq!(ceil_log2(p.gain(true)), 9);

        let p = plan_wordlength(1, 2, 1).unwrap();
        assert_eq!(p.derate_bits, 5);
        assert!(p.total_bits >= 7);

        let p = plan_wordlength(6, 32, 12).unwrap();
        assert_eq!((p.derate_bits, p.comb_growth_bits), (2, 30));

        assert_eq!(plan_wordlength(12, 4, 8), Err(Error::InvalidOrder(12)));
        assert_eq!(plan_wordlength(3, 1, 8), Err(Error::InvalidDecimation(1)));
        assert!(matches!(
            plan_wordlength(11, 1 << 20, 16),
            Err(Error::WordLengthTooWide(_))
        ));
    }

    #[test]
    fn plan_covers_gain_for_every_configuration() {
        for n in 1..=11 {
            for m in [2, 3, 4, 5, 7, 8, 16, 32] {
                let Ok(p) = plan_wordlength(n, m, 8) else {
                    continue;
                };
                assert!(ceil_log2(p.gain(true)) <= p.comb_growth_bits + p.derate_bits);
            }
        }
    }

    #[test]
    fn sample_range_is_checked() {
        assert!(SampleStream::new(vec![127, -127], 8).is_ok());
        assert_eq!(
            SampleStream::new(vec![0, 128], 8),
            Err(Error::SampleOutOfRange {
                index: 1,
                value: 128,
                bits: 8
            })
        );
        assert!(SampleStream::new(vec![-128], 8).is_err());
        assert!(SampleStream::new(vec![], 0).is_err());
    }

    #[test]
    fn wrap_sign_extends() {
        assert_eq!(wrap(127, 8), 127);
        assert_eq!(wrap(128, 8), -128);
        assert_eq!(wrap(-129, 8), 127);
        assert_eq!(wrap(i128::MAX, 128), i128::MAX);
    }

    #[test]
    fn underated_impulse() {
        let plan = plan_wordlength(1, 4, 4).unwrap();
        let out = run_chain(&impulse(16, 4), plan, false).unwrap();
        assert_eq!(out.samples(), &[1, 0, 0, 0]);
    }

    #[test]
    fn derated_impulse_taps() {
        let taps = expanded_taps(1, 4, true).unwrap();
        let want: Vec<BigInt> = [1, 23, 24, 24, 23, 1]
            .iter()
            .map(|&t| BigInt::from(t))
            .collect();
        assert_eq!(taps, want);
        let sum: BigInt = taps.iter().sum();
        assert_eq!(sum, BigInt::from(96));

        let plan = plan_wordlength(1, 4, 4).unwrap();
        let out = run_chain(&impulse(12, 4), plan, true).unwrap();
        // taps sampled at n = 3, 7, 11
        assert_eq!(out.samples(), &[24, 0, 0]);
    }

    #[test]
    fn oracle_examples() {
        let to_big = |v: &[i64]| v.iter().map(|&t| BigInt::from(t)).collect::<Vec<_>>();
        assert_eq!(
            expanded_taps(2, 3, false).unwrap(),
            to_big(&[1, 2, 3, 2, 1])
        );
        let d = expanded_taps(2, 3, true).unwrap();
        assert_eq!(d, to_big(&[1, 12, 24, 34, 24, 12, 1]));
        assert_eq!(d.iter().sum::<BigInt>(), BigInt::from(108));
    }

    #[test]
    fn constant_input_reaches_dc_gain() {
        for (n, m, derated) in [(2, 3, false), (3, 4, true), (5, 2, true), (1, 8, false)] {
            let plan = plan_wordlength(n, m, 8).unwrap();
            let input = SampleStream::new(vec![5; 400], 8).unwrap();
            let out = run_chain(&input, plan, derated).unwrap();
            assert_eq!(
                *out.samples().last().unwrap(),
                5 * plan.gain(derated) as i128
            );
        }
        let plan = plan_wordlength(2, 3, 8).unwrap();
        let out = run_chain(&SampleStream::new(vec![5; 30], 8).unwrap(), plan, false).unwrap();
        assert_eq!(*out.samples().last().unwrap(), 45);
    }

    #[test]
    fn minimum_width_wraps_and_stays_exact() {
        let plan = plan_wordlength(3, 4, 8).unwrap();
        let input = SampleStream::new(vec![127; 20_000], 8).unwrap();
        let mut state = FilterChainState::new(plan, true, FirPlacement::Input);
        let out: Vec<i128> = input
            .samples()
            .iter()
            .filter_map(|&x| state.process_sample(x))
            .collect();
        assert!(state.integrator_wraps() > 0);
        assert_eq!(*out.last().unwrap(), 127 * 512);
        let oracle = direct_fir_oracle(&input, 3, 4, true).unwrap();
        assert_eq!(out, oracle.samples());
    }

    #[test]
    fn input_wider_than_plan_is_refused() {
        let plan = plan_wordlength(2, 4, 8).unwrap();
        let input = SampleStream::new(vec![1000], 12).unwrap();
        assert!(run_chain(&input, plan, false).is_err());
    }

    #[test]
    fn empirical_matches_closed_form_at_dc_and_null() {
        use std::f64::consts::PI;
        let m = empirical_response(3, 4, true, &[0.0, 2.0 * PI]).unwrap();
        assert!((m[0] - 1.0).abs() < 1e-6);
        assert!(m[1] <= 1e-3);
        assert!(empirical_response(3, 4, true, &[4.0 * PI]).is_err());
    }
}
