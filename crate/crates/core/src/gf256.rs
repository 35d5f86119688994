//! Arithmetic over GF(2^8).
//!
//! Elements are bytes interpreted as polynomials over GF(2) reduced modulo
//! [`PRIMITIVE_POLY`]. Multiplication and division go through log/antilog
//! tables built once on first use. The same tables carry a direct lookup of
//! the roots of `x^2 + x + c`, which is what the two-error branch of the
//! component decoder needs.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign};
use std::sync::LazyLock;

/// x^8 + x^4 + x^3 + x^2 + 1.
pub const PRIMITIVE_POLY: u16 = 0x11d;

/// Order of the multiplicative group.
pub const GROUP_ORDER: usize = 255;

/// An element of GF(2^8).
#[derive(Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GfElement(pub u8);

impl GfElement {
    pub const ZERO: GfElement = GfElement(0);
    pub const ONE: GfElement = GfElement(1);

    /// `alpha^i`, with `i` taken modulo 255.
    #[inline]
    pub fn alpha_pow(i: usize) -> GfElement {
        tables().exp[i % GROUP_ORDER]
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    /// Discrete logarithm base alpha, `None` for zero.
    #[inline]
    pub fn log(self) -> Option<usize> {
        if self.is_zero() {
            None
        } else {
            Some(tables().log[self.0 as usize] as usize)
        }
    }

    #[inline]
    pub fn inv(self) -> Option<GfElement> {
        self.log()
            .map(|l| tables().exp[(GROUP_ORDER - l) % GROUP_ORDER])
    }

    pub fn pow(self, e: u32) -> GfElement {
        match self.log() {
            None if e == 0 => GfElement::ONE,
            None => GfElement::ZERO,
            Some(l) => GfElement::alpha_pow(l * (e as usize % GROUP_ORDER)),
        }
    }

    /// Absolute trace Tr(a) = a + a^2 + a^4 + ... + a^128, always 0 or 1.
    pub fn trace(self) -> GfElement {
        let mut acc = GfElement::ZERO;
        let mut sq = self;
        for _ in 0..8 {
            acc += sq;
            sq = sq * sq;
        }
        acc
    }

    pub fn checked_div(self, rhs: GfElement) -> Option<GfElement> {
        rhs.inv().map(|r| self * r)
    }
}

impl fmt::Debug for GfElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GfElement({:#04x})", self.0)
    }
}

impl fmt::Display for GfElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#04x}", self.0)
    }
}

impl From<u8> for GfElement {
    fn from(v: u8) -> Self {
        GfElement(v)
    }
}

impl Add for GfElement {
    type Output = GfElement;
    #[inline]
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn add(self, rhs: GfElement) -> GfElement {
        GfElement(self.0 ^ rhs.0)
    }
}

impl AddAssign for GfElement {
    #[inline]
    #[allow(clippy::suspicious_op_assign_impl)]
    fn add_assign(&mut self, rhs: GfElement) {
        self.0 ^= rhs.0;
    }
}

impl std::iter::Sum for GfElement {
    fn sum<I: Iterator<Item = GfElement>>(iter: I) -> GfElement {
        iter.fold(GfElement::ZERO, |a, b| a + b)
    }
}

impl Mul for GfElement {
    type Output = GfElement;
    #[inline]
    fn mul(self, rhs: GfElement) -> GfElement {
        gf_mul(self, rhs)
    }
}

impl MulAssign for GfElement {
    #[inline]
    fn mul_assign(&mut self, rhs: GfElement) {
        *self = gf_mul(*self, rhs);
    }
}

impl Div for GfElement {
    type Output = GfElement;

    /// Panics on division by zero, like integer division.
    fn div(self, rhs: GfElement) -> GfElement {
        self.checked_div(rhs).expect("division by zero in GF(2^8)")
    }
}

/// Precomputed tables for GF(2^8).
pub struct GfTables {
    /// `exp[i] = alpha^i` for `i` in `0..255`.
    pub exp: [GfElement; GROUP_ORDER],
    /// `log[a] = i` such that `alpha^i = a`; entry 0 is unused.
    pub log: [u8; 256],
    /// Roots of `x^2 + x + c` indexed by `c`, smaller root first.
    pub quad_roots: [Option<(GfElement, GfElement)>; 256],
}

impl GfTables {
    fn build() -> GfTables {
        let mut exp = [GfElement::ZERO; GROUP_ORDER];
        let mut log = [0u8; 256];
        let mut x: u16 = 1;
        for (i, slot) in exp.iter_mut().enumerate() {
            *slot = GfElement(x as u8);
            log[x as usize] = i as u8;
            x <<= 1;
            if x & 0x100 != 0 {
                x ^= PRIMITIVE_POLY;
            }
        }
        debug_assert_eq!(x, 1, "primitive polynomial must generate a cycle of 255");

        let mul = |a: u8, b: u8| -> u8 {
            if a == 0 || b == 0 {
                0
            } else {
                let l = (log[a as usize] as usize + log[b as usize] as usize) % GROUP_ORDER;
                exp[l].0
            }
        };

        // x^2 + x = c, scan every x once and file it under c.
        let mut quad_roots = [None; 256];
        for x in 0..=255u8 {
            let c = mul(x, x) ^ x;
            // Roots come in pairs {x, x+1}; the smaller one is seen first.
            if quad_roots[c as usize].is_none() {
                quad_roots[c as usize] = Some((GfElement(x), GfElement(x ^ 1)));
            }
        }

        GfTables {
            exp,
            log,
            quad_roots,
        }
    }
}

static TABLES: LazyLock<GfTables> = LazyLock::new(GfTables::build);

/// Shared, immutable field tables.
#[inline]
pub fn tables() -> &'static GfTables {
    &TABLES
}

#[inline]
pub fn gf_mul(a: GfElement, b: GfElement) -> GfElement {
    if a.is_zero() || b.is_zero() {
        return GfElement::ZERO;
    }
    let t = tables();
    let l = t.log[a.0 as usize] as usize + t.log[b.0 as usize] as usize;
    t.exp[l % GROUP_ORDER]
}

/// Both roots of `x^2 + x + c = 0`, smaller first, or `None` when `c` has
/// nonzero trace. The roots always differ by one.
#[inline]
pub fn solve_quadratic(c: GfElement) -> Option<(GfElement, GfElement)> {
    tables().quad_roots[c.0 as usize]
}
