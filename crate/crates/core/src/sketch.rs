//! Adaptive sampling sketch over hashed n-grams with exact per-key counts.
//!
//! Keys whose hash has its t low-order bits all zero are buffered together
//! with their occurrence count. When more than M keys are buffered, t grows
//! and keys that no longer qualify are dropped.

use rustc_hash::FxHashMap;

use crate::error::{Error, Result};
use crate::exact::entropy_bits;
use crate::hashers::{NWiseHasher, NgramHasher};
use crate::symbols::Symbol;
use crate::word::HashWord;

#[derive(Debug, Clone, Copy)]
struct Slot {
    count: u64,
    hash: u64,
}

#[derive(Debug, Clone)]
pub struct Sketch {
    capacity: usize,
    level: u32,
    width: u32,
    buffer: FxHashMap<Box<[Symbol]>, Slot>,
    total: u64,
}

/// Occurrence-count predicates for iceberg queries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IcebergPredicate {
    Always,
    /// f ≥ c
    MinCount(u64),
    /// f = c
    ExactCount(u64),
    /// f > c
    GreaterThan(u64),
}

impl IcebergPredicate {
    pub fn test(&self, f: u64) -> bool {
        match *self {
            IcebergPredicate::Always => true,
            IcebergPredicate::MinCount(c) => f >= c,
            IcebergPredicate::ExactCount(c) => f == c,
            IcebergPredicate::GreaterThan(c) => f > c,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StreamStats {
    pub distinct_estimate: f64,
    pub level: u32,
    pub buffered: usize,
    /// None when the buffer is empty.
    pub entropy_estimate: Option<f64>,
    pub iceberg_estimate: Option<f64>,
    pub total: u64,
}

#[inline]
fn low_bits(t: u32) -> u64 {
    if t >= 64 {
        u64::MAX
    } else {
        (1u64 << t) - 1
    }
}

impl Sketch {
    /// Empty sketch holding at most `capacity` keys for hashes of `width` bits.
    pub fn new(capacity: usize, width: u32) -> Result<Self> {
        if capacity == 0 {
            return Err(Error::Config("buffer capacity M must be at least 1".into()));
        }
        if width == 0 || width > 64 {
            return Err(Error::Config(format!("hash width {width} outside [1, 64]")));
        }
        Ok(Self {
            capacity,
            level: 0,
            width,
            buffer: FxHashMap::default(),
            total: 0,
        })
    }

    /// Starts at level `t` instead of 0.
    pub fn with_level(mut self, t: u32) -> Result<Self> {
        if t > self.width {
            return Err(Error::Config(format!(
                "level {t} exceeds hash width {}",
                self.width
            )));
        }
        self.level = t;
        Ok(self)
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn buffered(&self) -> usize {
        self.buffer.len()
    }

    /// Number of n-grams offered so far.
    pub fn total(&self) -> u64 {
        self.total
    }

    /// Buffered keys with their counts, in no particular order.
    pub fn entries(&self) -> impl Iterator<Item = (&[Symbol], u64)> {
        self.buffer.iter().map(|(k, s)| (&**k, s.count))
    }

    /// Buffered keys with their hashes.
    pub fn hashes(&self) -> impl Iterator<Item = (&[Symbol], u64)> {
        self.buffer.iter().map(|(k, s)| (&**k, s.hash))
    }

    /// Records one occurrence of `key`, whose hash is `hash`.
    #[inline]
    pub fn offer(&mut self, key: &[Symbol], hash: u64) -> Result<()> {
        self.total += 1;
        if hash & low_bits(self.level) != 0 {
            return Ok(());
        }
        if let Some(slot) = self.buffer.get_mut(key) {
            slot.count += 1;
            return Ok(());
        }
        self.buffer.insert(key.into(), Slot { count: 1, hash });
        if self.buffer.len() > self.capacity {
            self.purge()?;
        }
        Ok(())
    }

    fn purge(&mut self) -> Result<()> {
        while self.buffer.len() > self.capacity {
            if self.level >= self.width {
                return Err(Error::LevelExhausted {
                    width: self.width,
                    partial_estimate: self.estimate_distinct(),
                });
            }
            self.level += 1;
            let mask = low_bits(self.level);
            self.buffer.retain(|_, s| s.hash & mask == 0);
        }
        Ok(())
    }

    /// m′·2^t.
    pub fn estimate_distinct(&self) -> f64 {
        self.buffer.len() as f64 * self.scale()
    }

    fn scale(&self) -> f64 {
        (self.level as f64).exp2()
    }

    /// −2^t Σ (f/N) log₂(f/N) over buffered keys, in bits.
    pub fn estimate_entropy(&self) -> Result<f64> {
        if self.buffer.is_empty() || self.total == 0 {
            return Err(Error::UndefinedEstimate(
                "entropy needs a nonempty buffer".into(),
            ));
        }
        let h = entropy_bits(self.buffer.values().map(|s| s.count), self.total);
        Ok(h * self.scale())
    }

    /// 2^t times the number of buffered keys whose count satisfies `pred`.
    pub fn estimate_iceberg(&self, pred: impl Fn(u64) -> bool) -> f64 {
        let hits = self.buffer.values().filter(|s| pred(s.count)).count();
        hits as f64 * self.scale()
    }

    pub fn stats(&self, pred: Option<IcebergPredicate>) -> StreamStats {
        StreamStats {
            distinct_estimate: self.estimate_distinct(),
            level: self.level,
            buffered: self.buffer.len(),
            entropy_estimate: self.estimate_entropy().ok(),
            iceberg_estimate: pred.map(|p| self.estimate_iceberg(|f| p.test(f))),
            total: self.total,
        }
    }
}

/// Streams `symbols` through `hasher` into `sketch`.
pub fn ingest<W, H, I>(sketch: &mut Sketch, hasher: &mut H, symbols: I) -> Result<()>
where
    W: HashWord,
    H: NgramHasher<W>,
    I: IntoIterator<Item = Result<Symbol>>,
{
    for s in symbols {
        if let Some(h) = hasher.push(s?) {
            sketch.offer(hasher.window(), h.to_u64())?;
        }
    }
    Ok(())
}

/// One sketch per length 1..=n, fed from a single pass with NWise hashes
/// chained by `extend`.
#[derive(Debug, Clone)]
pub struct MultiSketch<W> {
    hasher: NWiseHasher<W>,
    sketches: Vec<Sketch>,
    /// Lengths whose sketch ran out of levels; they stop receiving keys.
    exhausted: Vec<bool>,
}

impl<W: HashWord> MultiSketch<W> {
    pub fn new(hasher: NWiseHasher<W>, capacity: usize) -> Result<Self> {
        if hasher.is_shared() {
            return Err(Error::Config(
                "simultaneous estimation needs distinct position tables".into(),
            ));
        }
        let sketches = (0..hasher.n())
            .map(|_| Sketch::new(capacity, hasher.width()))
            .collect::<Result<Vec<_>>>()?;
        let exhausted = vec![false; sketches.len()];
        Ok(Self { hasher, sketches, exhausted })
    }

    pub fn n_max(&self) -> usize {
        self.sketches.len()
    }

    /// Sketch for k-grams, 1 ≤ k ≤ n_max.
    pub fn sketch(&self, k: usize) -> &Sketch {
        &self.sketches[k - 1]
    }

    pub fn sketches(&self) -> &[Sketch] {
        &self.sketches
    }

    /// Whether the k-gram sketch hit level exhaustion.
    pub fn exhausted(&self, k: usize) -> bool {
        self.exhausted[k - 1]
    }

    pub fn offer_symbol(&mut self, symbol: Symbol) -> Result<()> {
        self.hasher.absorb(symbol);
        let filled = self.hasher.filled();
        let mut h = self.hasher.unigram()?;
        for k in 1..=filled {
            if k > 1 {
                h = self.hasher.extend(k - 1, h)?;
            }
            if self.exhausted[k - 1] {
                continue;
            }
            let w = self.hasher.window();
            match self.sketches[k - 1].offer(&w[w.len() - k..], h.to_u64()) {
                Err(Error::LevelExhausted { .. }) => self.exhausted[k - 1] = true,
                other => other?,
            }
        }
        Ok(())
    }

    pub fn ingest<I: IntoIterator<Item = Result<Symbol>>>(&mut self, symbols: I) -> Result<()> {
        for s in symbols {
            self.offer_symbol(s?)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{exact_iceberg, exact_stats_of};
    use crate::hashers::{HashFamily, HashFamilyConfig};
    use crate::symbols::{RandomSource, SymbolTable};
    use proptest::prelude::*;

    fn sym(s: &str) -> Vec<Symbol> {
        s.bytes().map(Symbol::from).collect()
    }

    fn run(stream: &[Symbol], family: HashFamily, n: usize, m: usize, seed: u64) -> Sketch {
        let mut cfg = HashFamilyConfig::new(family, n);
        if family == HashFamily::Hybrid {
            cfg = cfg.with_pieces(1);
        }
        let mut h = cfg.build::<u64>(RandomSource::new(seed)).unwrap();
        let mut sk = Sketch::new(m, 19).unwrap();
        ingest(&mut sk, &mut h, stream.iter().map(|&s| Ok(s))).unwrap();
        sk
    }

    #[test]
    fn aabaabb_buffer() {
        let sk = run(&sym("aabaabb"), HashFamily::General, 2, 16, 1);
        assert_eq!(sk.level(), 0);
        let mut got: Vec<(Vec<Symbol>, u64)> =
            sk.entries().map(|(k, c)| (k.to_vec(), c)).collect();
        got.sort();
        let want = vec![
            (sym("aa"), 2),
            (sym("ab"), 2),
            (sym("ba"), 1),
            (sym("bb"), 1),
        ];
        assert_eq!(got, want);
        assert_eq!(sk.estimate_iceberg(|f| f == 2), 2.0);
        assert!((sk.estimate_entropy().unwrap() - 1.9183).abs() < 1e-4);
    }

    #[test]
    fn four_keys_two_slots() {
        let mut sk = Sketch::new(2, 19).unwrap();
        for (i, h) in [0b00u64, 0b10, 0b01, 0b11].into_iter().enumerate() {
            sk.offer(&[i as Symbol], h).unwrap();
        }
        assert_eq!(sk.level(), 1);
        let mut kept: Vec<u64> = sk.hashes().map(|(_, h)| h).collect();
        kept.sort();
        assert_eq!(kept, vec![0b00, 0b10]);
        assert_eq!(sk.estimate_distinct(), 4.0);
    }

    #[test]
    fn formula_values() {
        let mut sk = Sketch::new(1000, 19).unwrap().with_level(3).unwrap();
        for i in 0..100u32 {
            sk.offer(&[i], 8 * i as u64).unwrap();
        }
        assert_eq!(sk.estimate_distinct(), 800.0);
        assert_eq!(sk.estimate_iceberg(|f| f > 1), 0.0);
    }

    #[test]
    fn few_distinct_items_are_exact() {
        let sk = run(&sym("abcabcabc"), HashFamily::Cyclic, 1, 16, 3);
        assert_eq!((sk.estimate_distinct(), sk.level()), (3.0, 0));
    }

    #[test]
    fn single_gram_has_zero_entropy() {
        let sk = run(&sym("aaaaaaa"), HashFamily::Id37, 3, 16, 3);
        assert_eq!(sk.estimate_entropy().unwrap(), 0.0);
    }

    #[test]
    fn uniform_buffer_entropy() {
        let s: Vec<Symbol> = (0..32).collect();
        let sk = run(&s, HashFamily::NWise, 1, 64, 3);
        assert_eq!(sk.estimate_entropy().unwrap(), 5.0);
    }

    #[test]
    fn empty_buffer_entropy_is_undefined() {
        let sk = Sketch::new(4, 19).unwrap();
        assert!(matches!(
            sk.estimate_entropy(),
            Err(Error::UndefinedEstimate(_))
        ));
    }

    #[test]
    fn identical_hashes_exhaust_levels() {
        let mut sk = Sketch::new(2, 4).unwrap();
        let mut err = None;
        for i in 0..3u32 {
            if let Err(e) = sk.offer(&[i], 0) {
                err = Some(e);
            }
        }
        match err {
            Some(Error::LevelExhausted { width: 4, partial_estimate }) => {
                assert_eq!(partial_estimate, 3.0 * 16.0)
            }
            other => panic!("expected level exhaustion, got {other:?}"),
        }
    }

    #[test]
    fn multi_on_aabaabb() {
        let src = RandomSource::new(5);
        let tables = (0..2)
            .map(|i| SymbolTable::from_source(src, i, 19).unwrap())
            .collect();
        let mut ms = MultiSketch::new(NWiseHasher::<u64>::new(2, tables).unwrap(), 16).unwrap();
        ms.ingest(sym("aabaabb").into_iter().map(Ok)).unwrap();
        assert_eq!(ms.sketch(1).estimate_distinct(), 2.0);
        assert_eq!(ms.sketch(2).estimate_distinct(), 4.0);
        assert_eq!(ms.sketch(1).total(), 7);
        assert_eq!(ms.sketch(2).total(), 6);
    }

    #[test]
    fn multi_with_one_length_matches_single_sketch() {
        let stream: Vec<Symbol> = (0..2000u32).map(|i| (i * i + 7) % 97).collect();
        let src = RandomSource::new(9);
        let table = SymbolTable::<u64>::from_source(src, 0, 19).unwrap();
        let mut ms = MultiSketch::new(NWiseHasher::new(1, vec![table.clone()]).unwrap(), 8).unwrap();
        ms.ingest(stream.iter().map(|&s| Ok(s))).unwrap();
        let mut h = NWiseHasher::new(1, vec![table]).unwrap();
        let mut sk = Sketch::new(8, 19).unwrap();
        ingest(&mut sk, &mut h, stream.iter().map(|&s| Ok(s))).unwrap();
        assert_eq!(ms.sketch(1).stats(None), sk.stats(None));
    }

    fn family() -> impl Strategy<Value = HashFamily> {
        prop::sample::select(HashFamily::ALL.to_vec())
    }

    proptest! {
        #[test]
        fn large_buffer_equals_oracle(
            stream in prop::collection::vec(0u32..8, 1..64),
            n in 1usize..5,
            family in family(),
            seed in any::<u64>(),
        ) {
            prop_assume!(stream.len() >= n);
            prop_assume!(family != HashFamily::Hybrid || n >= 2);
            let sk = run(&stream, family, n, 4096, seed);
            let ex = exact_stats_of(&stream, n).unwrap();
            prop_assert_eq!(sk.level(), 0);
            prop_assert_eq!(sk.estimate_distinct(), ex.distinct as f64);
            prop_assert_eq!(sk.estimate_entropy().unwrap(), ex.entropy_bits);
            prop_assert_eq!(sk.estimate_iceberg(|f| f >= 2), exact_iceberg(&ex, |f| f >= 2) as f64);
        }

        #[test]
        fn buffered_counts_and_levels_are_consistent(
            stream in prop::collection::vec(0u32..12, 10..400),
            n in 1usize..4,
            m in 1usize..20,
            seed in any::<u64>(),
        ) {
            let sk = run(&stream, HashFamily::General, n, m, seed);
            let ex = exact_stats_of(&stream, n).unwrap();
            prop_assert!(sk.buffered() <= m);
            let mask = (1u64 << sk.level()) - 1;
            for (key, h) in sk.hashes() {
                prop_assert_eq!(h & mask, 0);
                let _ = key;
            }
            for (key, c) in sk.entries() {
                prop_assert_eq!(c, ex.count(key));
            }
            prop_assert_eq!(sk.estimate_iceberg(|_| true), sk.estimate_distinct());
            prop_assert_eq!(sk.total(), ex.total);
        }
    }

    #[test]
    fn level_never_decreases() {
        let mut sk = Sketch::new(4, 19).unwrap();
        let mut h = HashFamilyConfig::new(HashFamily::Cyclic, 3)
            .build::<u64>(RandomSource::new(2))
            .unwrap();
        let mut last = 0;
        for i in 0..5000u32 {
            if let Some(v) = h.push(i % 251) {
                sk.offer(h.window(), v).unwrap();
                assert!(sk.level() >= last);
                last = sk.level();
            }
        }
    }

    #[test]
    fn deterministic_stats() {
        let s: Vec<Symbol> = (0..3000u32).map(|i| (i * 31 + i / 7) % 53).collect();
        let a = run(&s, HashFamily::Hybrid, 4, 32, 42).stats(Some(IcebergPredicate::MinCount(2)));
        let b = run(&s, HashFamily::Hybrid, 4, 32, 42).stats(Some(IcebergPredicate::MinCount(2)));
        assert_eq!(a, b);
    }
}
