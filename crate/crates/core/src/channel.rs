//! Binary symmetric channel and a Gray-mapped 4-PAM link over AWGN with hard
//! detection.

use rand::Rng;
use rand_distr::{Distribution, Geometric, Normal};
use serde::{Deserialize, Serialize};

use crate::analysis::{q_function, qinv};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ChannelConfig {
    Bsc { p: f64 },
    AwgnPam4 { noise_std: f64 },
}

impl ChannelConfig {
    pub fn validate(&self) -> Result<()> {
        match *self {
            ChannelConfig::Bsc { p } if !(0.0..=0.5).contains(&p) => Err(Error::OutOfRange {
                name: "p",
                value: p,
                constraint: "0 <= p <= 0.5",
            }),
            ChannelConfig::AwgnPam4 { noise_std }
                if !(noise_std > 0.0 && noise_std.is_finite()) =>
            {
                Err(Error::OutOfRange {
                    name: "noise_std",
                    value: noise_std,
                    constraint: "noise_std > 0",
                })
            }
            _ => Ok(()),
        }
    }

    /// Expected raw bit error rate at the detector output.
    pub fn nominal_p(&self) -> f64 {
        match *self {
            ChannelConfig::Bsc { p } => p,
            ChannelConfig::AwgnPam4 { noise_std } => pam4_gray_ber(noise_std),
        }
    }

    /// Passes `bits` through the channel in place.
    pub fn transmit(&self, bits: &mut [u8], rng: &mut impl Rng) -> Result<()> {
        match *self {
            ChannelConfig::Bsc { p } => {
                bsc_transmit(bits, p, rng);
                Ok(())
            }
            ChannelConfig::AwgnPam4 { noise_std } => pam4_chain(bits, noise_std, rng),
        }
    }
}

/// Flips every bit independently with probability `p`.
///
/// Gaps between flips are drawn from a geometric distribution, so the cost
/// scales with the number of flips rather than the number of bits.
pub fn bsc_transmit(bits: &mut [u8], p: f64, rng: &mut impl Rng) {
    bsc_error_positions(bits.len(), p, rng, |i| bits[i] ^= 1);
}

/// Calls `flip` with each position in `0..len` hit by a BSC with crossover
/// probability `p`, in increasing order.
pub fn bsc_error_positions(len: usize, p: f64, rng: &mut impl Rng, mut flip: impl FnMut(usize)) {
    if p <= 0.0 {
        return;
    }
    if p >= 1.0 {
        (0..len).for_each(flip);
        return;
    }
    let gap = Geometric::new(p).expect("0 < p < 1");
    let mut i = 0usize;
    loop {
        let skip = gap.sample(rng);
        i = match usize::try_from(skip).ok().and_then(|s| i.checked_add(s)) {
            Some(i) if i < len => i,
            _ => break,
        };
        flip(i);
        i += 1;
    }
}

const SQRT_5: f64 = 2.236_067_977_499_79;

/// Gray map: 00 -> -3, 01 -> -1, 11 -> +1, 10 -> +3, scaled to unit mean
/// symbol energy.
#[inline]
pub fn pam4_level(b0: u8, b1: u8) -> f64 {
    let a = match (b0 & 1, b1 & 1) {
        (0, 0) => -3.0,
        (0, 1) => -1.0,
        (1, 1) => 1.0,
        _ => 3.0,
    };
    a / SQRT_5
}

/// Hard decision with thresholds at -2, 0, +2 (scaled).
#[inline]
pub fn pam4_detect(y: f64) -> (u8, u8) {
    let y = y * SQRT_5;
    if y < -2.0 {
        (0, 0)
    } else if y < 0.0 {
        (0, 1)
    } else if y < 2.0 {
        (1, 1)
    } else {
        (1, 0)
    }
}

/// Modulates bit pairs, adds Gaussian noise and detects, in place.
pub fn pam4_chain(bits: &mut [u8], noise_std: f64, rng: &mut impl Rng) -> Result<()> {
    if !bits.len().is_multiple_of(2) {
        return Err(Error::OddBitCount(bits.len()));
    }
    if !(noise_std >= 0.0 && noise_std.is_finite()) {
        return Err(Error::OutOfRange {
            name: "noise_std",
            value: noise_std,
            constraint: "noise_std >= 0",
        });
    }
    let noise = Normal::new(0.0, noise_std).expect("finite std");
    for pair in bits.chunks_exact_mut(2) {
        let y = pam4_level(pair[0], pair[1]) + noise.sample(rng);
        let (b0, b1) = pam4_detect(y);
        pair[0] = b0;
        pair[1] = b1;
    }
    Ok(())
}

/// Hard-decision bit error rate of Gray 4-PAM, adjacent-level errors only:
/// `(3/4) Q(1 / (sqrt(5) sigma))`.
pub fn pam4_gray_ber(noise_std: f64) -> f64 {
    0.75 * q_function(1.0 / (SQRT_5 * noise_std))
}

/// Noise standard deviation for which [`pam4_gray_ber`] equals `p`.
pub fn pam4_noise_std_for(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 0.375) {
        return Err(Error::OutOfRange {
            name: "p",
            value: p,
            constraint: "0 < p < 0.375",
        });
    }
    Ok(1.0 / (SQRT_5 * qinv(p / 0.75)?))
}
