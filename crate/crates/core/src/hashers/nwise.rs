use super::window::Window;
use super::{check_ngram_len, HashFamily, NgramHasher};
use crate::error::{Error, Result};
use crate::symbols::{Symbol, SymbolTable};
use crate::word::HashWord;

/// n-wise independent tabulation hashing: one random table per position,
/// combined with XOR.
///
/// Tables are indexed backward from the window end: table 0 hashes the newest
/// symbol, table i the symbol i positions back. A k-gram ending at the newest
/// symbol therefore uses tables 0..k, and appending one older symbol is a
/// single XOR ([`NgramHasher::extend`]).
#[derive(Debug, Clone)]
pub struct NWiseHasher<W> {
    n: usize,
    width: u32,
    tables: Vec<SymbolTable<W>>,
    shared: bool,
    window: Window<Symbol>,
    current: Option<W>,
}

impl<W: HashWord> NWiseHasher<W> {
    /// `tables[i]` hashes the symbol i positions before the newest.
    pub fn new(n: usize, tables: Vec<SymbolTable<W>>) -> Result<Self> {
        if n == 0 || tables.len() != n {
            return Err(Error::Config(format!(
                "n-wise hashing needs n ≥ 1 position tables, got {} for n = {n}",
                tables.len()
            )));
        }
        Self::build(n, tables, false)
    }

    /// Single table reused at every position.
    pub fn shared(n: usize, table: SymbolTable<W>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Config("n must be at least 1".into()));
        }
        Self::build(n, vec![table], true)
    }

    fn build(n: usize, tables: Vec<SymbolTable<W>>, shared: bool) -> Result<Self> {
        let width = tables[0].width();
        if tables.iter().any(|t| t.width() != width) {
            return Err(Error::Config("position tables differ in width".into()));
        }
        Ok(Self {
            n,
            width,
            tables,
            shared,
            window: Window::new(n),
            current: None,
        })
    }

    #[inline]
    fn table(&mut self, back: usize) -> &mut SymbolTable<W> {
        let idx = if self.shared { 0 } else { back };
        &mut self.tables[idx]
    }

    pub fn is_shared(&self) -> bool {
        self.shared
    }

    pub fn table_mut(&mut self, back: usize) -> &mut SymbolTable<W> {
        self.table(back)
    }

    /// Appends a symbol without maintaining the n-gram hash. Used when
    /// hashing all lengths 1..=n with [`Self::unigram`] and `extend`.
    pub fn absorb(&mut self, symbol: Symbol) {
        self.window.push(symbol);
        self.current = None;
    }

    /// Hash of the 1-gram made of the newest symbol.
    pub fn unigram(&mut self) -> Result<W> {
        if self.window.len() == 0 {
            return Err(Error::Usage("window is empty".into()));
        }
        let s = self.window.back(0);
        Ok(self.table(0).lookup(s))
    }

    /// Number of symbols currently held (at most n).
    pub fn filled(&self) -> usize {
        self.window.len()
    }

    fn hash_window(&mut self) -> W {
        let mut acc = W::zero();
        for back in 0..self.n {
            let s = self.window.back(back);
            acc = acc ^ self.table(back).lookup(s);
        }
        acc
    }
}

impl<W: HashWord> NgramHasher<W> for NWiseHasher<W> {
    fn family(&self) -> HashFamily {
        HashFamily::NWise
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
        for (back, &s) in ngram.iter().rev().enumerate() {
            acc = acc ^ self.table(back).lookup(s);
        }
        Ok(acc)
    }

    #[inline]
    fn push(&mut self, symbol: Symbol) -> Option<W> {
        let evicted = self.window.push(symbol);
        let h = match (self.shared, evicted, self.current) {
            (true, Some(out), Some(h)) => {
                let t = &mut self.tables[0];
                h ^ t.lookup(out) ^ t.lookup(symbol)
            }
            _ if self.window.is_full() => self.hash_window(),
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
        self.current = None;
    }

    fn extend(&mut self, k: usize, k_gram_hash: W) -> Result<W> {
        if k == 0 || k >= self.n {
            return Err(Error::Usage(format!(
                "extend needs 1 ≤ k < n (k = {k}, n = {})",
                self.n
            )));
        }
        if self.window.len() <= k {
            return Err(Error::Usage(format!(
                "extend to a {}-gram needs {} symbols, window holds {}",
                k + 1,
                k + 1,
                self.window.len()
            )));
        }
        let s = self.window.back(k);
        Ok(k_gram_hash ^ self.table(k).lookup(s))
    }
}
