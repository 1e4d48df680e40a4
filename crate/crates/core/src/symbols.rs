//! Seeded, lazily populated random tables assigning L-bit values to symbols.
//!
//! A [`SymbolTable`] draws a uniform value the first time a symbol is looked
//! up and returns the same value on every later lookup. The alphabet is never
//! needed up front. The value of symbol `s` is the 64-bit word at position
//! `2s` of the table's ChaCha8 stream, so it depends only on the seed, the
//! table index and `s`, never on the order of lookups.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustc_hash::FxHashMap;

use crate::error::{Error, Result};
use crate::word::HashWord;

/// Symbol identifier: a byte or a Unicode scalar value.
pub type Symbol = u32;

/// Symbols below this id live in a directly indexed vector.
const DENSE_LIMIT: usize = 1 << 16;

/// Odd 64-bit constant used to derive per-table sub-seeds.
const SUB_SEED_MULTIPLIER: u64 = 0x9E37_79B9_7F4A_7C15;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeneratorKind {
    /// ChaCha8 seeded from the configured 64-bit seed.
    DefaultPrng,
    /// ChaCha8 seeded from a 64-bit snapshot of operating-system entropy.
    /// The snapshot is kept as the seed, so a run can be replayed.
    OsEntropySnapshot,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RandomSource {
    pub seed: u64,
    pub kind: GeneratorKind,
}

impl RandomSource {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            kind: GeneratorKind::DefaultPrng,
        }
    }

    pub fn os_entropy() -> Self {
        Self {
            seed: rand::rngs::OsRng.next_u64(),
            kind: GeneratorKind::OsEntropySnapshot,
        }
    }

    /// Sub-seed for the table with the given index: `seed XOR (index+1)·K`.
    pub fn sub_seed(&self, index: u64) -> u64 {
        self.seed ^ index.wrapping_add(1).wrapping_mul(SUB_SEED_MULTIPLIER)
    }

    pub fn generator(&self, index: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.sub_seed(index))
    }
}

/// Growable association from symbols to values with a dense fast path for
/// small ids.
#[derive(Debug, Clone)]
pub(crate) struct SymbolMap<V> {
    dense: Vec<Option<V>>,
    sparse: FxHashMap<Symbol, V>,
    len: usize,
}

impl<V: Copy> SymbolMap<V> {
    pub(crate) fn new() -> Self {
        Self {
            dense: Vec::new(),
            sparse: FxHashMap::default(),
            len: 0,
        }
    }

    #[inline]
    pub(crate) fn get(&self, symbol: Symbol) -> Option<V> {
        let idx = symbol as usize;
        if idx < DENSE_LIMIT {
            self.dense.get(idx).copied().flatten()
        } else {
            self.sparse.get(&symbol).copied()
        }
    }

    #[inline]
    pub(crate) fn get_or_insert_with(&mut self, symbol: Symbol, make: impl FnOnce() -> V) -> V {
        let idx = symbol as usize;
        if idx < DENSE_LIMIT {
            if let Some(Some(v)) = self.dense.get(idx) {
                return *v;
            }
            self.insert_dense(idx, make())
        } else {
            let len = &mut self.len;
            *self.sparse.entry(symbol).or_insert_with(|| {
                *len += 1;
                make()
            })
        }
    }

    #[cold]
    fn insert_dense(&mut self, idx: usize, v: V) -> V {
        if idx >= self.dense.len() {
            let new_len = (idx + 1).next_power_of_two().clamp(256, DENSE_LIMIT);
            self.dense.resize(new_len, None);
        }
        self.dense[idx] = Some(v);
        self.len += 1;
        v
    }

    pub(crate) fn insert(&mut self, symbol: Symbol, v: V) {
        let idx = symbol as usize;
        if idx < DENSE_LIMIT {
            if self.get(symbol).is_some() {
                self.dense[idx] = Some(v);
            } else {
                self.insert_dense(idx, v);
            }
        } else if self.sparse.insert(symbol, v).is_none() {
            self.len += 1;
        }
    }

    pub(crate) fn len(&self) -> usize {
        self.len
    }
}

/// The per-symbol random function h₁ (or one of the position tables hᵢ).
#[derive(Debug, Clone)]
pub struct SymbolTable<W> {
    width: u32,
    mask: W,
    entries: SymbolMap<W>,
    rng: ChaCha8Rng,
    source: RandomSource,
}

impl<W: HashWord> SymbolTable<W> {
    /// Empty table of `width`-bit values drawn from `seed`.
    pub fn new(seed: u64, width: u32) -> Result<Self> {
        Self::from_source(RandomSource::new(seed), 0, width)
    }

    /// Empty table using the sub-stream `index` of `source`.
    pub fn from_source(source: RandomSource, index: u64, width: u32) -> Result<Self> {
        check_width::<W>(width)?;
        Ok(Self {
            width,
            mask: W::low_mask(width),
            entries: SymbolMap::new(),
            rng: source.generator(index),
            source,
        })
    }

    #[inline]
    pub fn lookup(&mut self, symbol: Symbol) -> W {
        let (rng, mask) = (&mut self.rng, self.mask);
        self.entries
            .get_or_insert_with(symbol, || draw(rng, symbol, mask))
    }

    /// Value for `symbol` if it has already been drawn.
    pub fn peek(&self, symbol: Symbol) -> Option<W> {
        self.entries.get(symbol)
    }

    /// Pins `symbol` to a chosen value instead of a random draw.
    pub fn assign(&mut self, symbol: Symbol, value: W) -> Result<()> {
        if value & !self.mask != W::zero() {
            return Err(Error::Config(format!(
                "value {value} does not fit in {} bits",
                self.width
            )));
        }
        self.entries.insert(symbol, value);
        Ok(())
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.len() == 0
    }

    pub fn source(&self) -> RandomSource {
        self.source
    }
}

#[cold]
fn draw<W: HashWord>(rng: &mut ChaCha8Rng, symbol: Symbol, mask: W) -> W {
    rng.set_word_pos(2 * u128::from(symbol));
    W::from_u64(rng.next_u64()) & mask
}

pub(crate) fn check_width<W: HashWord>(width: u32) -> Result<()> {
    if width == 0 || width > W::BITS {
        return Err(Error::Config(format!(
            "hash width L = {width} outside [1, {}]",
            W::BITS
        )));
    }
    Ok(())
}
