use super::window::Window;
use super::{check_ngram_len, HashFamily, NgramHasher};
use crate::error::{Error, Result};
use crate::symbols::{Symbol, SymbolTable};
use crate::word::HashWord;

/// Recursive hashing by cyclic polynomials: arithmetic in GF(2)[x]/(x^L + 1),
/// where multiplying by x is an L-bit rotate-left.
#[derive(Debug, Clone)]
pub struct CyclicHasher<W> {
    n: usize,
    width: u32,
    mask: W,
    table: SymbolTable<W>,
    window: Window<Symbol>,
    values: Window<W>,
    current: Option<W>,
}

impl<W: HashWord> CyclicHasher<W> {
    pub fn new(n: usize, table: SymbolTable<W>) -> Result<Self> {
        let width = table.width();
        if n == 0 || n > width as usize {
            return Err(Error::Config(format!(
                "cyclic hashing needs 1 ≤ n ≤ L (n = {n}, L = {width})"
            )));
        }
        Ok(Self {
            n,
            width,
            mask: W::low_mask(width),
            table,
            window: Window::new(n),
            values: Window::new(n),
            current: None,
        })
    }

    pub fn table_mut(&mut self) -> &mut SymbolTable<W> {
        &mut self.table
    }

    /// Rotates the low L bits of `v` left by `r` (0 ≤ r < L).
    #[inline]
    pub fn rotate(&self, v: W, r: u32) -> W {
        if r == 0 {
            v
        } else {
            ((v << r as usize) | (v >> (self.width - r) as usize)) & self.mask
        }
    }
}

impl<W: HashWord> NgramHasher<W> for CyclicHasher<W> {
    fn family(&self) -> HashFamily {
        HashFamily::Cyclic
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
        for &s in ngram {
            acc = self.rotate(acc, 1) ^ self.table.lookup(s);
        }
        Ok(acc)
    }

    #[inline]
    fn push(&mut self, symbol: Symbol) -> Option<W> {
        let v = self.table.lookup(symbol);
        self.window.push(symbol);
        let out = self.values.push(v);
        let h = match (out, self.current) {
            (Some(out), Some(h)) => {
                // x^n = x^(n mod L) in GF(2)[x]/(x^L + 1)
                let shift = (self.n as u32) % self.width;
                self.rotate(h, 1) ^ self.rotate(out, shift) ^ v
            }
            _ if self.values.is_full() => {
                let mut acc = W::zero();
                for &hv in self.values.as_slice() {
                    acc = self.rotate(acc, 1) ^ hv;
                }
                acc
            }
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
