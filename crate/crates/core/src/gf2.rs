//! Polynomial arithmetic over GF(2).
//!
//! A polynomial is a `u128` whose bit i is the coefficient of xⁱ. Moduli are
//! limited to degree 64 so that every residue fits in a `u64` hash word.

use crate::error::{Error, Result};
use crate::word::HashWord;

pub type Gf2Poly = u128;

/// x¹⁹ + x⁵ + x² + x + 1, irreducible of degree 19. Default modulus at L = 19.
pub const POLY_DEGREE_19: Gf2Poly = (1 << 19) | (1 << 5) | (1 << 2) | (1 << 1) | 1;

/// 1 + x² + x³ + x⁵ + x⁶ + x⁷ + x¹² + x¹⁶ + x¹⁷ + x¹⁸ + x¹⁹, the degree-19
/// example commonly quoted for this scheme. It is divisible by x² + x + 1, so
/// [`FieldModulus::new`] rejects it.
pub const QUOTED_POLY_DEGREE_19: Gf2Poly = (1 << 0)
    | (1 << 2)
    | (1 << 3)
    | (1 << 5)
    | (1 << 6)
    | (1 << 7)
    | (1 << 12)
    | (1 << 16)
    | (1 << 17)
    | (1 << 18)
    | (1 << 19);

/// x⁸ + x⁴ + x³ + x² + 1, irreducible of degree 8.
pub const POLY_DEGREE_8: Gf2Poly = 0x11d;

const MAX_DEGREE: u32 = 64;

/// Degrees up to this bound are verified by exhaustive trial division.
const TRIAL_DIVISION_MAX_DEGREE: u32 = 32;

pub fn degree(p: Gf2Poly) -> Option<u32> {
    if p == 0 {
        None
    } else {
        Some(127 - p.leading_zeros())
    }
}

/// Remainder of `a` divided by `m` (schoolbook long division).
pub fn rem(mut a: Gf2Poly, m: Gf2Poly) -> Gf2Poly {
    let dm = degree(m).expect("division by the zero polynomial");
    while let Some(da) = degree(a) {
        if da < dm {
            break;
        }
        a ^= m << (da - dm);
    }
    a
}

/// `a·b mod m`; `m` has degree at most 64.
pub fn mul_mod(a: Gf2Poly, b: Gf2Poly, m: Gf2Poly) -> Gf2Poly {
    let dm = degree(m).expect("zero modulus");
    debug_assert!(dm <= MAX_DEGREE);
    let top = 1u128 << dm;
    let mut a = rem(a, m);
    let mut b = rem(b, m);
    let mut acc = 0;
    while b != 0 {
        if b & 1 == 1 {
            acc ^= a;
        }
        b >>= 1;
        a <<= 1;
        if a & top != 0 {
            a ^= m;
        }
    }
    acc
}

pub fn gcd(mut a: Gf2Poly, mut b: Gf2Poly) -> Gf2Poly {
    while b != 0 {
        let r = rem(a, b);
        a = b;
        b = r;
    }
    a
}

/// Irreducibility by trial division against every polynomial of degree
/// 1..=deg/2. Exponential in the degree; practical up to about 32.
pub fn is_irreducible_trial(p: Gf2Poly) -> bool {
    let Some(d) = degree(p) else { return false };
    if d == 0 {
        return false;
    }
    for dd in 1..=d / 2 {
        for divisor in (1u128 << dd)..(1u128 << (dd + 1)) {
            if rem(p, divisor) == 0 {
                return false;
            }
        }
    }
    true
}

/// Rabin's irreducibility test: p of degree d is irreducible iff
/// x^(2^d) ≡ x (mod p) and gcd(x^(2^(d/q)) − x, p) = 1 for every prime q | d.
pub fn is_irreducible_rabin(p: Gf2Poly) -> bool {
    let Some(d) = degree(p) else { return false };
    if d == 0 {
        return false;
    }
    if d == 1 {
        return true;
    }
    let x = 0b10;
    let frobenius = |k: u32| {
        let mut v = x;
        for _ in 0..k {
            v = mul_mod(v, v, p);
        }
        v
    };
    if frobenius(d) != rem(x, p) {
        return false;
    }
    prime_factors(d)
        .into_iter()
        .all(|q| gcd(p, frobenius(d / q) ^ x) == 1)
}

/// Trial division for small degrees, Rabin's test above that.
pub fn is_irreducible(p: Gf2Poly) -> bool {
    match degree(p) {
        Some(d) if d <= TRIAL_DIVISION_MAX_DEGREE => is_irreducible_trial(p),
        Some(_) => is_irreducible_rabin(p),
        None => false,
    }
}

fn prime_factors(mut n: u32) -> Vec<u32> {
    let mut out = Vec::new();
    let mut f = 2;
    while f * f <= n {
        if n.is_multiple_of(f) {
            out.push(f);
            while n.is_multiple_of(f) {
                n /= f;
            }
        }
        f += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// A verified irreducible modulus of degree L, stored as its low L bits so
/// that multiplication by x is a shift plus a conditional XOR.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FieldModulus<W> {
    width: u32,
    low: W,
    mask: W,
    poly: Gf2Poly,
}

impl<W: HashWord> FieldModulus<W> {
    pub fn new(poly: Gf2Poly) -> Result<Self> {
        let width = degree(poly).unwrap_or(0);
        if width == 0 || width > W::BITS {
            return Err(Error::Config(format!(
                "polynomial {poly:#x} must have degree in [1, {}]",
                W::BITS
            )));
        }
        if !is_irreducible(poly) {
            return Err(Error::Config(format!(
                "polynomial {poly:#x} is not irreducible over GF(2)"
            )));
        }
        let mask = W::low_mask(width);
        Ok(Self {
            width,
            low: W::from_u64(poly as u64) & mask,
            mask,
            poly,
        })
    }

    /// Degree L of the modulus, i.e. the hash width.
    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn poly(&self) -> Gf2Poly {
        self.poly
    }

    /// `v·x mod p`.
    #[inline]
    pub fn mul_x(&self, v: W) -> W {
        let carry = (v >> (self.width as usize - 1)) & W::one() == W::one();
        let shifted = (v << 1) & self.mask;
        if carry {
            shifted ^ self.low
        } else {
            shifted
        }
    }

    /// `v·xᵏ mod p` by k successive shifts.
    pub fn mul_x_pow(&self, mut v: W, k: usize) -> W {
        for _ in 0..k {
            v = self.mul_x(v);
        }
        v
    }
}
