//! Exact n-gram tabulation, the ground truth for relative errors.

use rustc_hash::FxHashMap;

use crate::error::{Error, Result};
use crate::hashers::window::Window;
use crate::symbols::Symbol;

/// Default limit on the number of distinct keys the oracle will hold.
pub const DEFAULT_KEY_CAP: usize = 1 << 26;

#[derive(Debug, Clone)]
pub struct ExactStats {
    pub n: usize,
    pub distinct: u64,
    pub counts: FxHashMap<Box<[Symbol]>, u64>,
    /// Number of n-grams, stream length − n + 1.
    pub total: u64,
    pub entropy_bits: f64,
}

impl ExactStats {
    pub fn count(&self, ngram: &[Symbol]) -> u64 {
        self.counts.get(ngram).copied().unwrap_or(0)
    }

    pub fn max_count(&self) -> u64 {
        self.counts.values().copied().max().unwrap_or(0)
    }
}

/// −Σ (f/N) log₂(f/N) over the given counts. Counts are summed in sorted
/// order so the result does not depend on hash-map iteration order.
pub fn entropy_bits(counts: impl IntoIterator<Item = u64>, total: u64) -> f64 {
    let mut counts: Vec<u64> = counts.into_iter().collect();
    counts.sort_unstable();
    let n = total as f64;
    let sum: f64 = counts
        .iter()
        .map(|&f| {
            let p = f as f64 / n;
            p * p.log2()
        })
        .sum();
    if sum == 0.0 {
        0.0
    } else {
        -sum
    }
}

/// Tabulates every n-gram of `stream` exactly.
pub fn exact_stats<I>(stream: I, n: usize, key_cap: usize) -> Result<ExactStats>
where
    I: IntoIterator<Item = Result<Symbol>>,
{
    if n == 0 {
        return Err(Error::Config("n must be at least 1".into()));
    }
    let mut window = Window::new(n);
    let mut counts: FxHashMap<Box<[Symbol]>, u64> = FxHashMap::default();
    let mut len = 0u64;
    for symbol in stream {
        window.push(symbol?);
        len += 1;
        if !window.is_full() {
            continue;
        }
        let key = window.as_slice();
        if let Some(c) = counts.get_mut(key) {
            *c += 1;
        } else {
            if counts.len() >= key_cap {
                return Err(Error::OracleGuard { cap: key_cap });
            }
            counts.insert(key.into(), 1);
        }
    }
    if len < n as u64 {
        return Err(Error::EmptyInput { len, n });
    }
    let total = len - n as u64 + 1;
    let entropy = entropy_bits(counts.values().copied(), total);
    Ok(ExactStats {
        n,
        distinct: counts.len() as u64,
        counts,
        total,
        entropy_bits: entropy,
    })
}

/// Convenience wrapper for in-memory symbols.
pub fn exact_stats_of(symbols: &[Symbol], n: usize) -> Result<ExactStats> {
    exact_stats(symbols.iter().map(|&s| Ok(s)), n, DEFAULT_KEY_CAP)
}

/// Number of distinct n-grams whose count satisfies `pred`.
pub fn exact_iceberg(stats: &ExactStats, pred: impl Fn(u64) -> bool) -> u64 {
    stats.counts.values().filter(|&&f| pred(f)).count() as u64
}
