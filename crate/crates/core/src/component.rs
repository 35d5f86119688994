//! Extended, shortened BCH component code.
//!
//! The mother BCH(255, 239) code is shortened by `l` bits (the `l` highest BCH
//! indices are fixed to zero and never sent) and extended with one overall
//! parity bit at the last position. With the default `l = 61` this gives the
//! (195, 178) component code.
//!
//! Word layout, index by index:
//!
//! ```text
//!   0 .. 16        BCH parity
//!   16 .. n-1      information (k bits)
//!   n-1            extension parity (even overall parity)
//! ```

use crate::bch::{self, BchOutcome, K_BCH, N_BCH, PARITY_BITS, T};
use crate::error::{Error, Result};

/// A component word packed as a little-endian 256-bit set.
pub type Line = [u64; 4];

pub const MAX_SHORTEN: usize = 61;
pub const DEFAULT_SHORTEN: usize = 61;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ComponentStatus {
    NoErrors,
    Corrected,
    Failure,
}

/// Up to `t + 1` bit positions to flip.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Flips {
    len: usize,
    pos: [usize; T + 1],
}

impl Flips {
    fn push(&mut self, p: usize) {
        self.pos[self.len] = p;
        self.len += 1;
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.pos[..self.len]
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }
}

/// Result of decoding one component word. `flips` is empty unless the status
/// is `Corrected`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ComponentOutcome {
    pub status: ComponentStatus,
    pub flips: Flips,
}

impl ComponentOutcome {
    const FAILURE: ComponentOutcome = ComponentOutcome {
        status: ComponentStatus::Failure,
        flips: Flips {
            len: 0,
            pos: [0; T + 1],
        },
    };

    pub fn is_failure(&self) -> bool {
        self.status == ComponentStatus::Failure
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ComponentCode {
    shorten: usize,
}

impl Default for ComponentCode {
    fn default() -> Self {
        ComponentCode {
            shorten: DEFAULT_SHORTEN,
        }
    }
}

impl ComponentCode {
    pub fn new(shorten: usize) -> Result<ComponentCode> {
        if shorten > MAX_SHORTEN {
            return Err(Error::InvalidShortening(shorten));
        }
        Ok(ComponentCode { shorten })
    }

    pub fn shorten(&self) -> usize {
        self.shorten
    }

    /// Word length, `256 - l`.
    pub fn n(&self) -> usize {
        N_BCH - self.shorten + 1
    }

    /// Information length, `239 - l`.
    pub fn k(&self) -> usize {
        K_BCH - self.shorten
    }

    /// Index of the extension parity bit.
    pub fn parity_index(&self) -> usize {
        self.n() - 1
    }

    /// Systematic encoding; see the module docs for the bit layout.
    pub fn encode(&self, info: &[u8]) -> Result<Vec<u8>> {
        if info.len() != self.k() {
            return Err(Error::InvalidLength {
                what: "component information word",
                expected: self.k(),
                got: info.len(),
            });
        }
        let mut out = vec![0u8; self.n()];
        self.encode_into(info, &mut out);
        Ok(out)
    }

    /// Encodes `info` (length `k`) into `out` (length `n`) without checks
    /// beyond debug assertions.
    pub(crate) fn encode_into(&self, info: &[u8], out: &mut [u8]) {
        debug_assert_eq!(info.len(), self.k());
        debug_assert_eq!(out.len(), self.n());
        let parity = bch::parity_of(info);
        let mut total = 0u8;
        for (k, slot) in out[..PARITY_BITS].iter_mut().enumerate() {
            *slot = ((parity >> k) & 1) as u8;
            total ^= *slot;
        }
        for (slot, &b) in out[PARITY_BITS..self.n() - 1].iter_mut().zip(info) {
            *slot = b & 1;
            total ^= *slot;
        }
        out[self.n() - 1] = total;
    }

    /// Packed systematic encoding in place. Bits `16..n-1` of `line` are the
    /// information part; everything else is overwritten or cleared.
    pub fn encode_packed(&self, line: &mut Line) {
        let pidx = self.parity_index();
        line[0] &= !0xffff;
        for (w, word) in line.iter_mut().enumerate() {
            let lo = w * 64;
            if pidx <= lo {
                *word = 0;
            } else if pidx < lo + 64 {
                *word &= (1u64 << (pidx - lo)) - 1;
            }
        }
        line[0] |= bch::parity_packed(line) as u64;
        let weight: u32 = line.iter().map(|w| w.count_ones()).sum();
        line[pidx / 64] |= ((weight & 1) as u64) << (pidx % 64);
    }

    /// Decodes an unpacked word of length `n`.
    pub fn decode(&self, r: &[u8]) -> Result<ComponentOutcome> {
        if r.len() != self.n() {
            return Err(Error::InvalidLength {
                what: "component word",
                expected: self.n(),
                got: r.len(),
            });
        }
        Ok(self.decode_packed(&pack_line(r)))
    }

    /// Extended-BCH decoding of a packed word. Bits at or above `n` must be
    /// clear.
    pub fn decode_packed(&self, line: &Line) -> ComponentOutcome {
        let pidx = self.parity_index();
        let mut bch_part = *line;
        bch_part[pidx / 64] &= !(1u64 << (pidx % 64));

        let outcome = bch::decode_syndromes(bch::syndromes_packed(&bch_part));
        let mut flips = Flips::default();
        match outcome {
            BchOutcome::Failure => return ComponentOutcome::FAILURE,
            BchOutcome::NoError => {}
            BchOutcome::OneError(p) => flips.push(p),
            BchOutcome::TwoErrors(p, q) => {
                flips.push(p);
                flips.push(q);
            }
        }
        // A location inside the shortened region means more than t errors.
        if flips.as_slice().iter().any(|&p| p >= pidx) {
            return ComponentOutcome::FAILURE;
        }

        let d = flips.len();
        let weight: u32 = line.iter().map(|w| w.count_ones()).sum();
        let d_e = (d + weight as usize) % 2;
        if d + d_e > T {
            return ComponentOutcome::FAILURE;
        }
        if d_e == 1 {
            flips.push(pidx);
        }
        let status = if flips.is_empty() {
            ComponentStatus::NoErrors
        } else {
            ComponentStatus::Corrected
        };
        ComponentOutcome { status, flips }
    }
}

pub fn pack_line(bits: &[u8]) -> Line {
    debug_assert!(bits.len() <= 256);
    let mut line = [0u64; 4];
    for (i, &b) in bits.iter().enumerate() {
        line[i / 64] |= ((b & 1) as u64) << (i % 64);
    }
    line
}
