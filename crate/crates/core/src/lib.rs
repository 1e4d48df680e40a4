//! One-pass estimation of distinct n-gram counts, n-gram entropy and iceberg
//! counts with recursive hashing and an adaptive sampling sketch.
//!
//! ```
//! use ngram_sketch::{exact_stats_of, HashFamily, HashFamilyConfig, RandomSource, Sketch};
//!
//! let text: Vec<u32> = b"to be or not to be".iter().map(|&b| b as u32).collect();
//! let mut hasher = HashFamilyConfig::new(HashFamily::General, 3)
//!     .build::<u64>(RandomSource::new(1))
//!     .unwrap();
//! let mut sketch = Sketch::new(1024, 19).unwrap();
//! ngram_sketch::sketch::ingest(&mut sketch, &mut hasher, text.iter().map(|&s| Ok(s))).unwrap();
//! assert_eq!(sketch.estimate_distinct(), exact_stats_of(&text, 3).unwrap().distinct as f64);
//! ```

pub mod bounds;
pub mod corpus;
pub mod error;
pub mod exact;
pub mod gf2;
pub mod harness;
pub mod hashers;
pub mod sketch;
pub mod symbols;
pub mod word;

pub use bounds::{AgnosticEstimates, BoundQuery};
pub use corpus::{open_stream, zipf_stream, SymbolMode, ZipfConfig};
pub use error::{Error, Result};
pub use exact::{exact_iceberg, exact_stats, exact_stats_of, ExactStats};
pub use gf2::{FieldModulus, Gf2Poly};
pub use harness::{ExperimentConfig, InputSpec, RunResult, Summary};
pub use hashers::{
    AnyHasher, CyclicHasher, GeneralHasher, HashFamily, HashFamilyConfig, HybridHasher,
    Id37Hasher, NWiseHasher, NgramHasher,
};
pub use sketch::{IcebergPredicate, MultiSketch, Sketch, StreamStats};
pub use symbols::{GeneratorKind, RandomSource, Symbol, SymbolTable};
pub use word::HashWord;

/// Hasher over 64-bit words, the width used by the command-line tool.
pub type Hasher = AnyHasher<u64>;
pub type NWiseHasher64 = NWiseHasher<u64>;
pub type CyclicHasher64 = CyclicHasher<u64>;
pub type GeneralHasher64 = GeneralHasher<u64>;
pub type Id37Hasher64 = Id37Hasher<u64>;
pub type HybridHasher64 = HybridHasher<u64>;
pub type SymbolTable64 = SymbolTable<u64>;
pub type MultiSketch64 = MultiSketch<u64>;

pub type BoundQuery64 = BoundQuery<f64>;
pub type BoundQuery32 = BoundQuery<f32>;
pub type AgnosticEstimates64 = AgnosticEstimates<f64>;
