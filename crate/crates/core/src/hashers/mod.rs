//! The five n-gram hash families behind one streaming interface.
//!
//! Every hasher can hash an n-gram from scratch ([`NgramHasher::hash_full`])
//! and keep a running hash of the last n symbols of a stream
//! ([`NgramHasher::push`] / [`NgramHasher::slide`]). The running value always
//! equals `hash_full` of the current window.
//!
//! | family  | value of (x₁ … xₙ), x₁ oldest                     | slide cost   |
//! |---------|----------------------------------------------------|--------------|
//! | NWise   | T₍ₙ₋₁₎(x₁) ⊕ … ⊕ T₀(xₙ)                            | n lookups    |
//! | Cyclic  | Σ h(xᵢ)·xⁿ⁻ⁱ in GF(2)[x]/(x^L + 1)                 | O(1)         |
//! | General | Σ h(xᵢ)·xⁿ⁻ⁱ in GF(2)[x]/p(x), p irreducible       | O(1)         |
//! | ID37    | Σ Bⁱ⁻¹·h(xᵢ) mod 2^L                               | O(1)         |
//! | Hybrid  | XOR of p blocks, block j hashed with table Tⱼ      | O(p) lookups |

mod cyclic;
mod general;
mod hybrid;
mod id37;
mod nwise;
pub(crate) mod window;

use std::fmt;
use std::str::FromStr;

pub use cyclic::CyclicHasher;
pub use general::GeneralHasher;
pub use hybrid::HybridHasher;
pub use id37::Id37Hasher;
pub use nwise::NWiseHasher;

use crate::error::{Error, Result};
use crate::gf2::{self, FieldModulus, Gf2Poly};
use crate::symbols::{check_width, RandomSource, Symbol, SymbolTable};
use crate::word::HashWord;

pub const DEFAULT_WIDTH: u32 = 19;
pub const DEFAULT_MULTIPLIER: u64 = 37;
pub const DEFAULT_PIECES: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HashFamily {
    NWise,
    Cyclic,
    General,
    Id37,
    Hybrid,
}

impl HashFamily {
    pub const ALL: [HashFamily; 5] = [
        HashFamily::NWise,
        HashFamily::Cyclic,
        HashFamily::General,
        HashFamily::Id37,
        HashFamily::Hybrid,
    ];

    pub fn name(self) -> &'static str {
        match self {
            HashFamily::NWise => "nwise",
            HashFamily::Cyclic => "cyclic",
            HashFamily::General => "general",
            HashFamily::Id37 => "id37",
            HashFamily::Hybrid => "hybrid",
        }
    }
}

impl fmt::Display for HashFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for HashFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        HashFamily::ALL
            .into_iter()
            .find(|f| f.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Config(format!("unknown hash family `{s}`")))
    }
}

/// Parameters selecting and shaping one hash family.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HashFamilyConfig {
    pub family: HashFamily,
    /// Window length n.
    pub n: usize,
    /// Hash width L in bits.
    pub width: u32,
    /// General only: modulus of degree L. `None` selects the built-in degree-19
    /// polynomial, which requires L = 19.
    pub poly: Option<Gf2Poly>,
    /// ID37 only: the odd multiplier B.
    pub multiplier: u64,
    /// Hybrid only: number of pieces p.
    pub pieces: usize,
    /// NWise only: use one table for every position. The result is recursive
    /// over hashed values but not even pairwise independent; for experiments.
    pub shared_table: bool,
}

impl HashFamilyConfig {
    pub fn new(family: HashFamily, n: usize) -> Self {
        Self {
            family,
            n,
            width: DEFAULT_WIDTH,
            poly: None,
            multiplier: DEFAULT_MULTIPLIER,
            pieces: DEFAULT_PIECES,
            shared_table: false,
        }
    }

    pub fn with_width(mut self, width: u32) -> Self {
        self.width = width;
        self
    }

    pub fn with_poly(mut self, poly: Gf2Poly) -> Self {
        self.poly = Some(poly);
        self
    }

    pub fn with_multiplier(mut self, b: u64) -> Self {
        self.multiplier = b;
        self
    }

    pub fn with_pieces(mut self, p: usize) -> Self {
        self.pieces = p;
        self
    }

    pub fn with_shared_table(mut self, shared: bool) -> Self {
        self.shared_table = shared;
        self
    }

    /// The General modulus this configuration resolves to.
    pub fn general_poly(&self) -> Result<Gf2Poly> {
        match self.poly {
            Some(p) => {
                if gf2::degree(p) != Some(self.width) {
                    return Err(Error::Config(format!(
                        "polynomial {p:#x} does not have degree L = {}",
                        self.width
                    )));
                }
                if !gf2::is_irreducible(p) {
                    return Err(Error::Config(format!(
                        "polynomial {p:#x} is reducible over GF(2)"
                    )));
                }
                Ok(p)
            }
            None if self.width == DEFAULT_WIDTH => Ok(gf2::POLY_DEGREE_19),
            None => Err(Error::Config(format!(
                "General hashing with L = {} needs an explicit polynomial",
                self.width
            ))),
        }
    }

    pub fn validate<W: HashWord>(&self) -> Result<()> {
        check_width::<W>(self.width)?;
        let n = self.n;
        if n == 0 {
            return Err(Error::Config("n must be at least 1".into()));
        }
        let l = self.width as usize;
        match self.family {
            HashFamily::NWise => {}
            HashFamily::Cyclic | HashFamily::General if n > l => {
                return Err(Error::Config(format!(
                    "{} hashing needs n ≤ L (n = {n}, L = {l})",
                    self.family
                )));
            }
            HashFamily::Cyclic => {}
            HashFamily::General => {
                self.general_poly()?;
            }
            HashFamily::Id37 => {
                if self.multiplier.is_multiple_of(2) {
                    return Err(Error::Config(format!(
                        "ID37 multiplier B = {} must be odd",
                        self.multiplier
                    )));
                }
            }
            HashFamily::Hybrid => {
                let p = self.pieces;
                if p == 0 || !n.is_multiple_of(p) || n < 2 * p {
                    return Err(Error::Config(format!(
                        "hybrid hashing needs p | n and n ≥ 2p (n = {n}, p = {p})"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Builds a hasher with fresh tables drawn from `source`.
    pub fn build<W: HashWord>(&self, source: RandomSource) -> Result<AnyHasher<W>> {
        self.validate::<W>()?;
        let (n, width) = (self.n, self.width);
        let table = |i: usize| SymbolTable::<W>::from_source(source, i as u64, width);
        Ok(match self.family {
            HashFamily::NWise if self.shared_table => {
                AnyHasher::NWise(NWiseHasher::shared(n, table(0)?)?)
            }
            HashFamily::NWise => {
                let tables = (0..n).map(table).collect::<Result<Vec<_>>>()?;
                AnyHasher::NWise(NWiseHasher::new(n, tables)?)
            }
            HashFamily::Cyclic => AnyHasher::Cyclic(CyclicHasher::new(n, table(0)?)?),
            HashFamily::General => {
                let modulus = FieldModulus::new(self.general_poly()?)?;
                AnyHasher::General(GeneralHasher::new(n, modulus, table(0)?)?)
            }
            HashFamily::Id37 => {
                AnyHasher::Id37(Id37Hasher::new(n, self.multiplier, table(0)?)?)
            }
            HashFamily::Hybrid => {
                let tables = (0..self.pieces).map(table).collect::<Result<Vec<_>>>()?;
                AnyHasher::Hybrid(HybridHasher::new(n, tables)?)
            }
        })
    }
}

/// Common streaming interface of the n-gram hash families.
pub trait NgramHasher<W: HashWord> {
    fn family(&self) -> HashFamily;

    /// Window length n.
    fn n(&self) -> usize;

    /// Hash width L.
    fn width(&self) -> u32;

    /// Hash of `ngram` computed from scratch. Fails unless `ngram.len() == n`.
    fn hash_full(&mut self, ngram: &[Symbol]) -> Result<W>;

    /// Appends `symbol` to the window. Returns the hash of the window once it
    /// holds n symbols.
    fn push(&mut self, symbol: Symbol) -> Option<W>;

    /// Last returned window hash, if the window is full.
    fn current(&self) -> Option<W>;

    /// The symbols in the window, oldest first.
    fn window(&self) -> &[Symbol];

    /// Empties the window; tables are kept.
    fn reset(&mut self);

    /// Advances a full window by one symbol.
    fn slide(&mut self, incoming: Symbol) -> Result<W> {
        if self.current().is_none() {
            return Err(Error::Usage(
                "slide called before the window holds n symbols".into(),
            ));
        }
        Ok(self.push(incoming).expect("full window yields a hash"))
    }

    /// Fills a fresh window with exactly n symbols.
    fn warm_up(&mut self, symbols: &[Symbol]) -> Result<W> {
        if symbols.len() != self.n() {
            return Err(Error::Usage(format!(
                "warm-up needs exactly n = {} symbols, got {}",
                self.n(),
                symbols.len()
            )));
        }
        self.reset();
        let mut last = None;
        for &s in symbols {
            last = self.push(s);
        }
        Ok(last.expect("window is full after n pushes"))
    }

    /// Turns the hash of the k-gram ending at the newest symbol into the hash
    /// of the (k+1)-gram ending there. Only NWise supports this.
    fn extend(&mut self, k: usize, k_gram_hash: W) -> Result<W> {
        let _ = (k, k_gram_hash);
        Err(Error::Usage(format!(
            "{} hashing is not semi-recursive; extend needs nwise",
            self.family()
        )))
    }
}

/// A hasher of any family, dispatched by match.
#[derive(Debug, Clone)]
pub enum AnyHasher<W> {
    NWise(NWiseHasher<W>),
    Cyclic(CyclicHasher<W>),
    General(GeneralHasher<W>),
    Id37(Id37Hasher<W>),
    Hybrid(HybridHasher<W>),
}

macro_rules! dispatch {
    ($self:ident, $h:ident => $body:expr) => {
        match $self {
            AnyHasher::NWise($h) => $body,
            AnyHasher::Cyclic($h) => $body,
            AnyHasher::General($h) => $body,
            AnyHasher::Id37($h) => $body,
            AnyHasher::Hybrid($h) => $body,
        }
    };
}

impl<W: HashWord> NgramHasher<W> for AnyHasher<W> {
    fn family(&self) -> HashFamily {
        dispatch!(self, h => h.family())
    }

    fn n(&self) -> usize {
        dispatch!(self, h => h.n())
    }

    fn width(&self) -> u32 {
        dispatch!(self, h => h.width())
    }

    fn hash_full(&mut self, ngram: &[Symbol]) -> Result<W> {
        dispatch!(self, h => h.hash_full(ngram))
    }

    #[inline]
    fn push(&mut self, symbol: Symbol) -> Option<W> {
        dispatch!(self, h => h.push(symbol))
    }

    fn current(&self) -> Option<W> {
        dispatch!(self, h => h.current())
    }

    fn window(&self) -> &[Symbol] {
        dispatch!(self, h => h.window())
    }

    fn reset(&mut self) {
        dispatch!(self, h => h.reset())
    }

    fn extend(&mut self, k: usize, k_gram_hash: W) -> Result<W> {
        dispatch!(self, h => h.extend(k, k_gram_hash))
    }
}

pub(crate) fn check_ngram_len(n: usize, ngram: &[Symbol]) -> Result<()> {
    if ngram.len() != n {
        return Err(Error::Usage(format!(
            "expected an n-gram of length {n}, got {}",
            ngram.len()
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn family_names_round_trip() {
        for f in HashFamily::ALL {
            assert_eq!(f.name().parse::<HashFamily>().unwrap(), f);
        }
        assert!("karp-rabin".parse::<HashFamily>().is_err());
    }

    #[test]
    fn config_validation() {
        let ok = |c: HashFamilyConfig| c.validate::<u64>().is_ok();
        assert!(ok(HashFamilyConfig::new(HashFamily::General, 19)));
        assert!(!ok(HashFamilyConfig::new(HashFamily::General, 20)));
        assert!(!ok(HashFamilyConfig::new(HashFamily::General, 5).with_width(20)));
        assert!(ok(HashFamilyConfig::new(HashFamily::General, 5)
            .with_width(8)
            .with_poly(gf2::POLY_DEGREE_8)));
        assert!(!ok(HashFamilyConfig::new(HashFamily::General, 5)
            .with_width(8)
            .with_poly(0x101)));
        assert!(!ok(HashFamilyConfig::new(HashFamily::Cyclic, 9).with_width(8)));
        assert!(!ok(HashFamilyConfig::new(HashFamily::Id37, 3).with_multiplier(38)));
        assert!(ok(HashFamilyConfig::new(HashFamily::Hybrid, 4).with_pieces(2)));
        assert!(!ok(HashFamilyConfig::new(HashFamily::Hybrid, 3).with_pieces(2)));
        assert!(!ok(HashFamilyConfig::new(HashFamily::Hybrid, 2).with_pieces(2)));
        assert!(!ok(HashFamilyConfig::new(HashFamily::NWise, 0)));
        assert!(!ok(HashFamilyConfig::new(HashFamily::NWise, 3).with_width(65)));
        assert!(HashFamilyConfig::new(HashFamily::NWise, 3)
            .with_width(40)
            .validate::<u32>()
            .is_err());
    }

    #[test]
    fn slide_and_warm_up_errors() {
        let mut h = HashFamilyConfig::new(HashFamily::Cyclic, 3)
            .build::<u64>(RandomSource::new(1))
            .unwrap();
        assert!(matches!(h.slide(1), Err(Error::Usage(_))));
        assert!(matches!(h.warm_up(&[1, 2]), Err(Error::Usage(_))));
        assert!(matches!(h.hash_full(&[1, 2]), Err(Error::Usage(_))));
        assert!(matches!(h.extend(1, 0), Err(Error::Usage(_))));
    }

    #[test]
    fn warm_up_matches_hash_full() {
        for family in HashFamily::ALL {
            let mut h = HashFamilyConfig::new(family, 4)
                .build::<u64>(RandomSource::new(9))
                .unwrap();
            let w = h.warm_up(&[1, 1, 2, 3]).unwrap();
            assert_eq!(h.hash_full(&[1, 1, 2, 3]).unwrap(), w, "{family}");
            assert_eq!(h.current(), Some(w));
        }
    }

    #[test]
    fn slide_example_abcd_e() {
        let [a, b, c, d, e] = [97u32, 98, 99, 100, 101];
        for family in HashFamily::ALL {
            let n = if family == HashFamily::Hybrid { 4 } else { 3 };
            let mut h = HashFamilyConfig::new(family, n)
                .build::<u64>(RandomSource::new(5))
                .unwrap();
            for s in [a, b, c, d] {
                h.push(s);
            }
            let got = h.slide(e).unwrap();
            let window: Vec<u32> = [a, b, c, d, e][5 - n..].to_vec();
            assert_eq!(got, h.hash_full(&window).unwrap(), "{family}");
            assert_eq!(h.window(), &window[..]);
        }
    }
}
