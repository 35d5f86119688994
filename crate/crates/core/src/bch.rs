//! Binary BCH(255, 239) code with t = 2.
//!
//! Codeword bit `i` carries weight `alpha^i`. Encoding is systematic with the
//! 16 parity bits at indices `0..16` and information bits at `16..255`, so
//! shortening removes the highest indices.
//!
//! Decoding works straight from the two syndromes `S1` and `S3`: no
//! Berlekamp-Massey, no Chien search. The two-error locator reduces to
//! `x^2 + x + (S1^3 + S3) / S1^3 = 0`, whose roots come from a table.

use std::sync::LazyLock;

use crate::error::{Error, Result};
use crate::gf256::{solve_quadratic, tables, GfElement, GROUP_ORDER};

pub const N_BCH: usize = 255;
pub const K_BCH: usize = 239;
pub const T: usize = 2;
pub const PARITY_BITS: usize = N_BCH - K_BCH;

/// Parameters of the mother BCH code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BchParams {
    pub n_bch: usize,
    pub k_bch: usize,
    pub t: usize,
    /// Generator polynomial, bit `i` is the coefficient of `x^i`.
    pub generator: u32,
}

/// Syndromes `S1 = r(alpha)` and `S3 = r(alpha^3)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SyndromePair {
    pub s1: GfElement,
    pub s3: GfElement,
}

impl SyndromePair {
    pub fn is_zero(&self) -> bool {
        self.s1.is_zero() && self.s3.is_zero()
    }
}

/// Result of bounded-distance decoding of a 255-bit word.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BchOutcome {
    NoError,
    OneError(usize),
    /// Distinct positions, smaller first.
    TwoErrors(usize, usize),
    Failure,
}

impl BchOutcome {
    /// Number of proposed flips, `None` on failure.
    pub fn weight(&self) -> Option<usize> {
        match self {
            BchOutcome::NoError => Some(0),
            BchOutcome::OneError(_) => Some(1),
            BchOutcome::TwoErrors(..) => Some(2),
            BchOutcome::Failure => None,
        }
    }
}

/// Minimal polynomial of `alpha^j` as a GF(2) bit polynomial.
fn minimal_polynomial(j: usize) -> u32 {
    let mut coset = Vec::new();
    let mut e = j % GROUP_ORDER;
    while !coset.contains(&e) {
        coset.push(e);
        e = (e * 2) % GROUP_ORDER;
    }
    // prod (x + alpha^e), coefficients in GF(2^8), lowest degree first
    let mut poly = vec![GfElement::ONE];
    for &e in &coset {
        let root = GfElement::alpha_pow(e);
        let mut next = vec![GfElement::ZERO; poly.len() + 1];
        for (i, &c) in poly.iter().enumerate() {
            next[i + 1] += c;
            next[i] += c * root;
        }
        poly = next;
    }
    poly.iter().enumerate().fold(0u32, |acc, (i, c)| {
        assert!(c.0 <= 1, "minimal polynomial has a non-binary coefficient");
        acc | ((c.0 as u32) << i)
    })
}

/// Carry-less product of two GF(2) polynomials.
fn poly_mul_gf2(a: u32, b: u32) -> u32 {
    let mut acc = 0u32;
    for i in 0..32 {
        if (b >> i) & 1 == 1 {
            acc ^= a << i;
        }
    }
    acc
}

impl BchParams {
    fn build() -> BchParams {
        let m1 = minimal_polynomial(1);
        let m3 = minimal_polynomial(3);
        let generator = poly_mul_gf2(m1, m3);
        assert_eq!(
            31 - generator.leading_zeros() as usize,
            PARITY_BITS,
            "generator degree must equal n - k"
        );
        BchParams {
            n_bch: N_BCH,
            k_bch: K_BCH,
            t: T,
            generator,
        }
    }
}

static PARAMS: LazyLock<BchParams> = LazyLock::new(BchParams::build);

pub fn params() -> &'static BchParams {
    &PARAMS
}

/// Parity bits of the systematic codeword whose information part is `info`,
/// with `info[j]` sitting at codeword index `16 + j`. `info` may be shorter
/// than 239; the missing high positions are zero.
pub fn parity_of(info: &[u8]) -> u16 {
    debug_assert!(info.len() <= K_BCH);
    let g = (params().generator & 0xffff) as u16;
    let mut reg: u16 = 0;
    for &bit in info.iter().rev() {
        let fb = (bit & 1) ^ (reg >> 15) as u8;
        reg <<= 1;
        if fb != 0 {
            reg ^= g;
        }
    }
    reg
}

static PARITY_TABLE: LazyLock<[u16; 256]> = LazyLock::new(|| {
    let g = (params().generator & 0xffff) as u16;
    let mut table = [0u16; 256];
    for (v, slot) in table.iter_mut().enumerate() {
        let mut reg = (v as u16) << 8;
        for _ in 0..8 {
            let fb = reg >> 15;
            reg <<= 1;
            if fb != 0 {
                reg ^= g;
            }
        }
        *slot = reg;
    }
    table
});

/// Same as [`parity_of`] for a packed word: bits `16..255` of `line` are the
/// information part, anything below 16 or at 255 is ignored.
pub fn parity_packed(line: &[u64; 4]) -> u16 {
    let table = &*PARITY_TABLE;
    let mut reg: u16 = 0;
    // bit 255 sits in the top byte and is masked off
    for byte_idx in (2..32).rev() {
        let mut byte = (line[byte_idx / 8] >> ((byte_idx % 8) * 8)) as u8;
        if byte_idx == 31 {
            byte &= 0x7f;
        }
        reg = (reg << 8) ^ table[((reg >> 8) as u8 ^ byte) as usize];
    }
    reg
}

/// Systematic encoder: 239 information bits to a 255-bit codeword.
pub fn bch_encode(info: &[u8]) -> Result<Vec<u8>> {
    if info.len() != K_BCH {
        return Err(Error::InvalidLength {
            what: "BCH information word",
            expected: K_BCH,
            got: info.len(),
        });
    }
    let parity = parity_of(info);
    let mut out = Vec::with_capacity(N_BCH);
    out.extend((0..PARITY_BITS).map(|k| ((parity >> k) & 1) as u8));
    out.extend(info.iter().map(|b| b & 1));
    Ok(out)
}

/// Syndromes of a received word. Positions beyond `r.len()` count as zero.
///
/// Panics if `r` is longer than 255.
pub fn compute_syndromes(r: &[u8]) -> SyndromePair {
    assert!(r.len() <= N_BCH, "received word longer than {N_BCH}");
    let exp = &tables().exp;
    let mut s = SyndromePair::default();
    for (i, &bit) in r.iter().enumerate() {
        if bit & 1 == 1 {
            s.s1 += exp[i];
            s.s3 += exp[(3 * i) % GROUP_ORDER];
        }
    }
    s
}

type SyndromeTable = [[(u8, u8); 256]; 32];

static PACKED_SYNDROMES: LazyLock<Box<SyndromeTable>> = LazyLock::new(|| {
    let exp = &tables().exp;
    let mut table = Box::new([[(0u8, 0u8); 256]; 32]);
    for (byte_idx, row) in table.iter_mut().enumerate() {
        for (v, entry) in row.iter_mut().enumerate() {
            let (mut s1, mut s3) = (0u8, 0u8);
            for bit in 0..8 {
                if (v >> bit) & 1 == 1 {
                    let i = byte_idx * 8 + bit;
                    s1 ^= exp[i % GROUP_ORDER].0;
                    s3 ^= exp[(3 * i) % GROUP_ORDER].0;
                }
            }
            *entry = (s1, s3);
        }
    }
    table
});

/// Syndromes of a word stored as a 256-bit little-endian bitset (bit `i` of
/// the word is bit `i % 64` of `words[i / 64]`). Bit 255 must be clear.
#[inline]
pub fn syndromes_packed(words: &[u64; 4]) -> SyndromePair {
    debug_assert!(words[3] >> 63 == 0);
    let table = &**PACKED_SYNDROMES;
    let (mut s1, mut s3) = (0u8, 0u8);
    for (w, &word) in words.iter().enumerate() {
        if word == 0 {
            continue;
        }
        for (b, byte) in word.to_le_bytes().into_iter().enumerate() {
            let (a, c) = table[w * 8 + b][byte as usize];
            s1 ^= a;
            s3 ^= c;
        }
    }
    SyndromePair {
        s1: GfElement(s1),
        s3: GfElement(s3),
    }
}

/// Four-case syndrome decoder.
pub fn decode_syndromes(s: SyndromePair) -> BchOutcome {
    let SyndromePair { s1, s3 } = s;
    if s1.is_zero() {
        return if s3.is_zero() {
            BchOutcome::NoError
        } else {
            BchOutcome::Failure
        };
    }
    let s1_cubed = s1 * s1 * s1;
    let num = s1_cubed + s3;
    if num.is_zero() {
        // s1 != 0 so log is defined
        return BchOutcome::OneError(s1.log().unwrap());
    }
    let c = num / s1_cubed;
    match solve_quadratic(c) {
        None => BchOutcome::Failure,
        Some((r1, r2)) => {
            // c != 0 so neither root is zero
            let p1 = (s1 * r1).log().unwrap();
            let p2 = (s1 * r2).log().unwrap();
            BchOutcome::TwoErrors(p1.min(p2), p1.max(p2))
        }
    }
}

/// Bounded-distance decode of a received word (missing high positions count
/// as zero, see [`compute_syndromes`]).
pub fn bch_decode(r: &[u8]) -> BchOutcome {
    decode_syndromes(compute_syndromes(r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Remainder of `a(x)` divided by `g(x)` by schoolbook long division over
    /// dense coefficient vectors.
    fn poly_rem(a: &[u8], g: &[u8]) -> Vec<u8> {
        let mut r = a.to_vec();
        let dg = g.len() - 1;
        for i in (dg..r.len()).rev() {
            if r[i] == 1 {
                for (j, &gj) in g.iter().enumerate() {
                    r[i - dg + j] ^= gj;
                }
            }
        }
        r.truncate(dg);
        r
    }

    fn generator_dense() -> Vec<u8> {
        let g = params().generator;
        (0..=PARITY_BITS).map(|i| ((g >> i) & 1) as u8).collect()
    }

    fn random_codeword(rng: &mut impl Rng) -> Vec<u8> {
        let info: Vec<u8> = (0..K_BCH).map(|_| rng.random_range(0..2u8)).collect();
        bch_encode(&info).unwrap()
    }

    #[test]
    fn generator_has_degree_16_and_divides_x255_plus_1() {
        let g = generator_dense();
        assert_eq!(g.len(), 17);
        assert_eq!(g[16], 1);
        let mut x255 = vec![0u8; 256];
        x255[0] = 1;
        x255[255] = 1;
        assert!(poly_rem(&x255, &g).iter().all(|&b| b == 0));
    }

    #[test]
    fn generator_roots_include_alpha_and_alpha3() {
        let g = params().generator;
        for root in [1usize, 2, 3, 4, 6] {
            let v: GfElement = (0..=16)
                .filter(|i| (g >> i) & 1 == 1)
                .map(|i| GfElement::alpha_pow(root * i))
                .sum();
            assert!(v.is_zero(), "alpha^{root} is not a root");
        }
    }

    #[test]
    fn encoder_matches_long_division() {
        let g = generator_dense();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut cases: Vec<Vec<u8>> = vec![vec![0; K_BCH]];
        let mut unit = vec![0u8; K_BCH];
        unit[0] = 1;
        cases.push(unit);
        for _ in 0..50 {
            cases.push((0..K_BCH).map(|_| rng.random_range(0..2u8)).collect());
        }
        for info in cases {
            let cw = bch_encode(&info).unwrap();
            // m(x) x^16
            let mut shifted = vec![0u8; N_BCH];
            shifted[PARITY_BITS..].copy_from_slice(&info);
            let rem = poly_rem(&shifted, &g);
            assert_eq!(&cw[..PARITY_BITS], &rem[..]);
            assert_eq!(&cw[PARITY_BITS..], &info[..]);
            assert!(poly_rem(&cw, &g).iter().all(|&b| b == 0));
        }
    }

    #[test]
    fn unit_info_parity_is_x16_mod_g() {
        // info bit 0 -> x^16 mod g = g - x^16
        let mut info = vec![0u8; K_BCH];
        info[0] = 1;
        let cw = bch_encode(&info).unwrap();
        let g = params().generator;
        for (k, &bit) in cw.iter().enumerate().take(PARITY_BITS) {
            assert_eq!(bit as u32, (g >> k) & 1);
        }
    }

    #[test]
    fn zero_info_gives_zero_codeword() {
        assert!(bch_encode(&[0; K_BCH]).unwrap().iter().all(|&b| b == 0));
    }

    #[test]
    fn wrong_length_is_rejected() {
        assert!(matches!(
            bch_encode(&[0; 10]),
            Err(Error::InvalidLength { got: 10, .. })
        ));
    }

    #[test]
    fn codeword_syndromes_are_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..100 {
            let cw = random_codeword(&mut rng);
            assert!(compute_syndromes(&cw).is_zero());
            assert_eq!(bch_decode(&cw), BchOutcome::NoError);
        }
    }

    #[test]
    fn single_and_double_flip_syndromes() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let cw = random_codeword(&mut rng);
        let a = GfElement::alpha_pow;
        for j in 0..N_BCH {
            let mut r = cw.clone();
            r[j] ^= 1;
            let s = compute_syndromes(&r);
            assert_eq!(
                s,
                SyndromePair {
                    s1: a(j),
                    s3: a(3 * j)
                }
            );
        }
        for _ in 0..200 {
            let j = rng.random_range(0..N_BCH);
            let k = rng.random_range(0..N_BCH);
            if j == k {
                continue;
            }
            let mut r = cw.clone();
            r[j] ^= 1;
            r[k] ^= 1;
            let s = compute_syndromes(&r);
            assert_eq!(s.s1, a(j) + a(k));
            assert_eq!(s.s3, a(3 * j) + a(3 * k));
        }
    }

    #[test]
    fn corrects_every_single_error() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let cw = random_codeword(&mut rng);
        for j in 0..N_BCH {
            let mut r = cw.clone();
            r[j] ^= 1;
            assert_eq!(bch_decode(&r), BchOutcome::OneError(j));
        }
    }

    #[test]
    fn corrects_every_double_error() {
        // all C(255, 2) = 32385 pairs, which covers the sampled requirement
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let cw = random_codeword(&mut rng);
        let mut r = cw.clone();
        for j in 0..N_BCH {
            for k in j + 1..N_BCH {
                r[j] ^= 1;
                r[k] ^= 1;
                assert_eq!(bch_decode(&r), BchOutcome::TwoErrors(j, k));
                r[j] ^= 1;
                r[k] ^= 1;
            }
        }
    }

    #[test]
    fn weight_three_never_yields_weight_three_outcome() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let mut failures = 0;
        for _ in 0..20_000 {
            let mut e = [0u8; N_BCH];
            let mut placed = 0;
            while placed < 3 {
                let p = rng.random_range(0..N_BCH);
                if e[p] == 0 {
                    e[p] = 1;
                    placed += 1;
                }
            }
            match bch_decode(&e) {
                BchOutcome::Failure => failures += 1,
                BchOutcome::TwoErrors(a, b) => {
                    assert!(a < b && b < N_BCH);
                    // never the injected pattern
                    let mut w = e;
                    w[a] ^= 1;
                    w[b] ^= 1;
                    assert!(compute_syndromes(&w).is_zero());
                }
                BchOutcome::OneError(a) => {
                    let mut w = e;
                    w[a] ^= 1;
                    assert!(compute_syndromes(&w).is_zero());
                }
                BchOutcome::NoError => panic!("weight-3 word has zero syndromes"),
            }
        }
        assert!(failures > 0);
    }

    proptest! {
        #[test]
        fn packed_syndromes_agree_with_bitwise(bits in proptest::collection::vec(0u8..2, N_BCH)) {
            let mut words = [0u64; 4];
            for (i, &b) in bits.iter().enumerate() {
                words[i / 64] |= (b as u64) << (i % 64);
            }
            prop_assert_eq!(syndromes_packed(&words), compute_syndromes(&bits));
        }

        #[test]
        fn packed_parity_agrees_with_shift_register(info in proptest::collection::vec(0u8..2, 0..=K_BCH)) {
            let mut words = [u64::MAX; 4];
            for i in 16..255 {
                words[i / 64] &= !(1u64 << (i % 64));
            }
            for (j, &b) in info.iter().enumerate() {
                words[(16 + j) / 64] |= (b as u64) << ((16 + j) % 64);
            }
            prop_assert_eq!(parity_packed(&words), parity_of(&info));
        }

        #[test]
        fn syndromes_are_linear(seed in any::<u64>(), e in proptest::collection::vec(0u8..2, N_BCH)) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let cw = random_codeword(&mut rng);
            let r: Vec<u8> = cw.iter().zip(&e).map(|(a, b)| a ^ b).collect();
            prop_assert_eq!(compute_syndromes(&r), compute_syndromes(&e));
        }
    }
}
