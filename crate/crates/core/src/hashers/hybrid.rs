use super::window::Window;
use super::{check_ngram_len, HashFamily, NgramHasher};
use crate::error::{Error, Result};
use crate::symbols::{Symbol, SymbolTable};
use crate::word::HashWord;

/// p-wise independent recursive hashing: the window is cut into p blocks of
/// n/p symbols and block j is hashed with its own table Tⱼ, all XORed.
///
/// Sliding moves the first symbol of each block into the previous block, so
/// each boundary symbol swaps its Tⱼ₊₁ term for a Tⱼ term.
#[derive(Debug, Clone)]
pub struct HybridHasher<W> {
    n: usize,
    width: u32,
    block: usize,
    tables: Vec<SymbolTable<W>>,
    window: Window<Symbol>,
    current: Option<W>,
}

impl<W: HashWord> HybridHasher<W> {
    /// `tables[j]` hashes block j, block 0 holding the oldest symbols.
    pub fn new(n: usize, tables: Vec<SymbolTable<W>>) -> Result<Self> {
        let p = tables.len();
        if p == 0 || !n.is_multiple_of(p) || n < 2 * p {
            return Err(Error::Config(format!(
                "hybrid hashing needs p | n and n ≥ 2p (n = {n}, p = {p})"
            )));
        }
        let width = tables[0].width();
        if tables.iter().any(|t| t.width() != width) {
            return Err(Error::Config("piece tables differ in width".into()));
        }
        Ok(Self {
            n,
            width,
            block: n / p,
            tables,
            window: Window::new(n),
            current: None,
        })
    }

    pub fn pieces(&self) -> usize {
        self.tables.len()
    }

    pub fn table_mut(&mut self, piece: usize) -> &mut SymbolTable<W> {
        &mut self.tables[piece]
    }

    fn hash_slice(&mut self, ngram: &[Symbol]) -> W {
        let block = self.block;
        ngram
            .iter()
            .enumerate()
            .fold(W::zero(), |acc, (i, &s)| acc ^ self.tables[i / block].lookup(s))
    }
}

impl<W: HashWord> NgramHasher<W> for HybridHasher<W> {
    fn family(&self) -> HashFamily {
        HashFamily::Hybrid
    }

    fn n(&self) -> usize {
        self.n
    }

    fn width(&self) -> u32 {
        self.width
    }

    fn hash_full(&mut self, ngram: &[Symbol]) -> Result<W> {
        check_ngram_len(self.n, ngram)?;
        Ok(self.hash_slice(ngram))
    }

    #[inline]
    fn push(&mut self, symbol: Symbol) -> Option<W> {
        let h = match self.current {
            Some(mut h) => {
                let p = self.tables.len();
                let oldest = self.window.back(self.n - 1);
                h = h ^ self.tables[0].lookup(oldest);
                for j in 1..p {
                    // first symbol of block j, counted from the oldest
                    let s = self.window.back(self.n - 1 - j * self.block);
                    h = h ^ self.tables[j].lookup(s) ^ self.tables[j - 1].lookup(s);
                }
                h = h ^ self.tables[p - 1].lookup(symbol);
                self.window.push(symbol);
                h
            }
            None => {
                self.window.push(symbol);
                if !self.window.is_full() {
                    return None;
                }
                let w: Vec<Symbol> = self.window.as_slice().to_vec();
                self.hash_slice(&w)
            }
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
        self.current = None;
    }
}
