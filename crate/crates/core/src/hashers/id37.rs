use super::window::Window;
use super::{check_ngram_len, HashFamily, NgramHasher};
use crate::error::{Error, Result};
use crate::symbols::{Symbol, SymbolTable};
use crate::word::HashWord;

/// Randomized integer-division hashing:
/// h(x₁ … xₙ) = h(x₁) + B·h(x₂) + … + Bⁿ⁻¹·h(xₙ) mod 2^L, oldest symbol at B⁰.
///
/// Sliding divides by B, which is a multiplication by B⁻¹ mod 2^L since B is
/// odd. Not uniform when n is even.
#[derive(Debug, Clone)]
pub struct Id37Hasher<W> {
    n: usize,
    width: u32,
    mask: W,
    multiplier: W,
    inverse: W,
    /// Bⁿ⁻¹ mod 2^L.
    top_power: W,
    table: SymbolTable<W>,
    window: Window<Symbol>,
    values: Window<W>,
    current: Option<W>,
}

impl<W: HashWord> Id37Hasher<W> {
    pub fn new(n: usize, multiplier: u64, table: SymbolTable<W>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Config("n must be at least 1".into()));
        }
        if multiplier.is_multiple_of(2) {
            return Err(Error::Config(format!(
                "multiplier B = {multiplier} must be odd"
            )));
        }
        let width = table.width();
        let mask = W::low_mask(width);
        let b = W::from_u64(multiplier);
        let top_power = (1..n).fold(W::one(), |acc, _| acc.wrapping_mul(&b)) & mask;
        Ok(Self {
            n,
            width,
            mask,
            multiplier: b & mask,
            inverse: odd_inverse(b) & mask,
            top_power,
            table,
            window: Window::new(n),
            values: Window::new(n),
            current: None,
        })
    }

    pub fn table_mut(&mut self) -> &mut SymbolTable<W> {
        &mut self.table
    }

    fn combine(&self, values: &[W]) -> W {
        values
            .iter()
            .rev()
            .fold(W::zero(), |acc, &v| acc.wrapping_mul(&self.multiplier).wrapping_add(&v))
            & self.mask
    }
}

/// Inverse of an odd word modulo 2^BITS by Newton iteration; each step
/// doubles the number of correct low bits.
fn odd_inverse<W: HashWord>(b: W) -> W {
    let two = W::one() + W::one();
    let mut inv = b; // correct to 3 bits: b·b ≡ 1 (mod 8)
    for _ in 0..6 {
        inv = inv.wrapping_mul(&two.wrapping_sub(&b.wrapping_mul(&inv)));
    }
    inv
}

impl<W: HashWord> NgramHasher<W> for Id37Hasher<W> {
    fn family(&self) -> HashFamily {
        HashFamily::Id37
    }

    fn n(&self) -> usize {
        self.n
    }

    fn width(&self) -> u32 {
        self.width
    }

    fn hash_full(&mut self, ngram: &[Symbol]) -> Result<W> {
        check_ngram_len(self.n, ngram)?;
        let mut acc = W::zero();
        for &s in ngram.iter().rev() {
            acc = acc
                .wrapping_mul(&self.multiplier)
                .wrapping_add(&self.table.lookup(s));
        }
        Ok(acc & self.mask)
    }

    #[inline]
    fn push(&mut self, symbol: Symbol) -> Option<W> {
        let v = self.table.lookup(symbol);
        self.window.push(symbol);
        let out = self.values.push(v);
        let h = match (out, self.current) {
            (Some(out), Some(h)) => {
                let rest = h.wrapping_sub(&out).wrapping_mul(&self.inverse);
                rest.wrapping_add(&self.top_power.wrapping_mul(&v)) & self.mask
            }
            _ if self.values.is_full() => self.combine(self.values.as_slice()),
            _ => return None,
        };
        self.current = Some(h);
        Some(h)
    }

    fn current(&self) -> Option<W> {
        self.current
    }

    fn window(&self) -> &[Symbol] {
        self.window.as_slice()
    }

    fn reset(&mut self) {
        self.window.clear();
        self.values.clear();
        self.current = None;
    }
}
