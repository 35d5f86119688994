//! Error-floor estimate, net coding gain and the decoder cycle model.
//!
//! The numeric routines are generic over [`num_traits::Float`]; `f64` is what
//! the rest of the crate uses.

use num_traits::{Float, FloatConst};
use serde::Serialize;

use crate::error::{Error, Result};

fn cast<F: Float>(x: f64) -> F {
    F::from(x).expect("constant representable in the float type")
}

/// Complementary error function.
///
/// Maclaurin series of `erf` for `|x| < 2`, Lentz continued fraction for the
/// tail beyond.
pub fn erfc<F: Float + FloatConst>(x: F) -> F {
    let two = cast::<F>(2.0);
    if x < F::zero() {
        return two - erfc(-x);
    }
    if x < two {
        // erf(x) = 2/sqrt(pi) * sum (-1)^n x^(2n+1) / (n! (2n+1))
        let x2 = x * x;
        let mut term = x;
        let mut sum = x;
        let mut n = 0.0;
        loop {
            n += 1.0;
            term = -term * x2 / cast(n);
            let contrib = term / cast(2.0 * n + 1.0);
            sum = sum + contrib;
            if contrib.abs() <= F::epsilon() * sum.abs() {
                break;
            }
        }
        return F::one() - sum * two / F::PI().sqrt();
    }
    // erfc(x) = exp(-x^2)/sqrt(pi) * 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))
    let tiny = F::min_positive_value() / F::epsilon();
    let mut f = x;
    let mut c = x;
    let mut d = F::zero();
    let mut k = 1.0;
    loop {
        let a: F = cast(k / 2.0);
        d = x + a * d;
        if d.abs() < tiny {
            d = tiny;
        }
        c = x + a / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = d.recip();
        let delta = c * d;
        f = f * delta;
        if (delta - F::one()).abs() <= F::epsilon() || k > 500.0 {
            break;
        }
        k += 1.0;
    }
    (-x * x).exp() / (f * F::PI().sqrt())
}

/// Standard Gaussian tail `Q(x) = P(Z > x)`.
pub fn q_function<F: Float + FloatConst>(x: F) -> F {
    erfc(x / F::SQRT_2()) / cast(2.0)
}

/// Inverse of [`q_function`] on `(0, 0.5)`, found by bisection.
pub fn qinv<F: Float + FloatConst>(ber: F) -> Result<F> {
    if !(ber > F::zero() && ber < cast(0.5)) {
        return Err(Error::OutOfRange {
            name: "ber",
            value: ber.to_f64().unwrap_or(f64::NAN),
            constraint: "0 < ber < 0.5",
        });
    }
    let (mut lo, mut hi) = (F::zero(), cast::<F>(40.0));
    for _ in 0..200 {
        let mid = (lo + hi) / cast(2.0);
        if mid <= lo || mid >= hi {
            break;
        }
        if q_function(mid) > ber {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo + hi) / cast(2.0))
}

/// Net coding gain in dB, `20 log10(Qinv(ber_out) / Qinv(p_in))`.
pub fn ncg<F: Float + FloatConst>(p_in: F, ber_out: F) -> Result<F> {
    if !(ber_out > F::zero() && ber_out < p_in && p_in < cast(0.5)) {
        return Err(Error::OutOfRange {
            name: "p_in",
            value: p_in.to_f64().unwrap_or(f64::NAN),
            constraint: "0 < ber_out < p_in < 0.5",
        });
    }
    Ok(cast::<F>(20.0) * (qinv(ber_out)? / qinv(p_in)?).log10())
}

/// [`ncg`] plus the rate term `10 log10(rate)`.
pub fn ncg_rate_adjusted<F: Float + FloatConst>(p_in: F, ber_out: F, rate: F) -> Result<F> {
    if !(rate > F::zero() && rate <= F::one()) {
        return Err(Error::OutOfRange {
            name: "rate",
            value: rate.to_f64().unwrap_or(f64::NAN),
            constraint: "0 < rate <= 1",
        });
    }
    Ok(ncg(p_in, ber_out)? + cast::<F>(10.0) * rate.log10())
}

/// Contribution of minimal stall patterns to the error rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FloorEstimate<F> {
    pub p: F,
    pub pp: bool,
    pub fer_floor: F,
    pub ber_floor: F,
    pub pattern_weight: usize,
    pub multiplicity: u128,
}

pub fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) / (i + 1))
}

/// Minimal stall pattern (weight, count) for an `n x n` product code with
/// t = 2 components.
///
/// Without post-processing: a 3 x 3 grid of errors, every affected line
/// carries three errors and fails. With post-processing any pattern touching at
/// most three rows and three columns gets flipped away, so the smallest
/// survivor spans four rows and four columns with three errors in each line:
/// a 4 x 4 grid minus a permutation, 24 arrangements per row/column choice.
pub fn minimal_stall_pattern(n: usize, pp: bool) -> (usize, u128) {
    let n = n as u128;
    if pp {
        let c4 = binomial(n, 4);
        (12, c4 * c4 * 24)
    } else {
        let c3 = binomial(n, 3);
        (9, c3 * c3)
    }
}

/// Union-bound floor estimate `multiplicity * p^w` for the (195,178)^2 code.
pub fn estimate_floor<F: Float>(p: F, pp: bool) -> Result<FloorEstimate<F>> {
    estimate_floor_for(195, p, pp)
}

pub fn estimate_floor_for<F: Float>(n: usize, p: F, pp: bool) -> Result<FloorEstimate<F>> {
    if !(p > F::zero() && p < cast(0.5)) {
        return Err(Error::OutOfRange {
            name: "p",
            value: p.to_f64().unwrap_or(f64::NAN),
            constraint: "0 < p < 0.5",
        });
    }
    let (w, mult) = minimal_stall_pattern(n, pp);
    let mult_f = F::from(mult).expect("multiplicity representable");
    // exp/ln keeps p^w from underflowing in low-precision floats
    let fer = (mult_f.ln() + cast::<F>(w as f64) * p.ln())
        .exp()
        .min(F::one());
    let big_n = F::from(n * n).unwrap();
    Ok(FloorEstimate {
        p,
        pp,
        fer_floor: fer,
        ber_floor: fer * cast(w as f64) / big_n,
        pattern_weight: w,
        multiplicity: mult,
    })
}

/// Parameters of the decoder cycle model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LatencyParams {
    /// Parallel component decoders.
    pub pc: usize,
    /// Loading lanes.
    pub pl: usize,
    /// Component decoder pipeline depth.
    pub np: usize,
    /// Iterations, excluding the post-processing one.
    pub iterations: usize,
    pub n: usize,
    pub k: usize,
}

impl Default for LatencyParams {
    fn default() -> Self {
        LatencyParams {
            pc: 13,
            pl: 2,
            np: 6,
            iterations: 2,
            n: 195,
            k: 178,
        }
    }
}

impl LatencyParams {
    pub fn validate(&self) -> Result<()> {
        if self.pc == 0 || self.pl == 0 || self.iterations == 0 || self.n == 0 {
            return Err(Error::InvalidConfig(
                "pc, pl, iterations and n must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Where the cycles go.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CycleBreakdown {
    pub loading_and_first_half: usize,
    pub standard_half_iterations: usize,
    pub post_processing: usize,
    pub end_signal: usize,
}

impl CycleBreakdown {
    pub fn total(&self) -> usize {
        self.loading_and_first_half
            + self.standard_half_iterations
            + self.post_processing
            + self.end_signal
    }
}

/// Clock cycles to decode one product codeword, worst case (post-processing
/// iteration included).
pub fn cycle_count(p: &LatencyParams) -> Result<usize> {
    p.validate()?;
    let LatencyParams {
        pc,
        pl,
        np,
        iterations: l,
        n,
        ..
    } = *p;
    let per_lane = pc / pl;
    let loading = (per_lane + (pc - pl * per_lane).min(pl)) * (n / pc);
    let remainder = (n + 7) - pc * (n / pc);
    let standard = (2 * l - 1) * n.div_ceil(pc);
    let pipeline = (2 + 2 * l) * np;
    Ok(loading + remainder + standard + pipeline)
}

/// Same total split into phases: loading with the first half-iteration,
/// the remaining `2L - 1` half-iterations, the two three-line post-processing
/// half-iterations, and one cycle to signal completion.
pub fn cycle_breakdown(p: &LatencyParams) -> Result<CycleBreakdown> {
    p.validate()?;
    let LatencyParams {
        pc,
        pl,
        np,
        iterations: l,
        n,
        ..
    } = *p;
    let per_lane = pc / pl;
    let loading = (per_lane + (pc - pl * per_lane).min(pl)) * (n / pc);
    Ok(CycleBreakdown {
        loading_and_first_half: loading + (n - pc * (n / pc)) + np,
        standard_half_iterations: (2 * l - 1) * (n.div_ceil(pc) + np),
        post_processing: 2 * (3 + np),
        end_signal: 1,
    })
}

/// Worst-case information bits per cycle, `floor(k^2 / cycles)`.
pub fn throughput_bits_per_cycle(p: &LatencyParams) -> Result<usize> {
    Ok(p.k * p.k / cycle_count(p)?)
}

/// Information throughput in Gb/s at `clock_mhz`, using the exact ratio
/// `k^2 / cycles` rather than the floored bits/cycle figure.
pub fn info_throughput_gbps(p: &LatencyParams, clock_mhz: f64) -> Result<f64> {
    if !(clock_mhz > 0.0) {
        return Err(Error::OutOfRange {
            name: "clock_mhz",
            value: clock_mhz,
            constraint: "clock_mhz > 0",
        });
    }
    let cycles = cycle_count(p)? as f64;
    Ok((p.k * p.k) as f64 / cycles * clock_mhz * 1e6 / 1e9)
}

/// Decoding latency in nanoseconds at `clock_mhz`.
pub fn latency_ns(p: &LatencyParams, clock_mhz: f64) -> Result<f64> {
    Ok(cycle_count(p)? as f64 * 1e3 / clock_mhz)
}
