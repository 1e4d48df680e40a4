//! Symbol streams from files and from a seeded Zipf generator.

use std::fs::File;
use std::io::{BufReader, Read};
use std::path::Path;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::symbols::Symbol;

const CHUNK: usize = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SymbolMode {
    /// One symbol per byte.
    #[default]
    Bytes,
    /// One symbol per Unicode scalar value of UTF-8 input.
    Codepoints,
}

impl FromStr for SymbolMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bytes" => Ok(SymbolMode::Bytes),
            "codepoints" => Ok(SymbolMode::Codepoints),
            other => Err(Error::Usage(format!(
                "unknown mode {other:?}, expected bytes or codepoints"
            ))),
        }
    }
}

/// Streaming symbol reader over any byte source.
pub struct SymbolStream<R> {
    reader: R,
    mode: SymbolMode,
    raw: Vec<u8>,
    /// Undecoded bytes carried over from the previous chunk.
    carry: usize,
    decoded: Vec<Symbol>,
    pos: usize,
    /// Byte offset of `raw[0]` in the source.
    offset: u64,
    consumed: u64,
    done: bool,
}

pub fn open_stream(path: impl AsRef<Path>, mode: SymbolMode) -> Result<SymbolStream<BufReader<File>>> {
    let file = File::open(path)?;
    Ok(SymbolStream::new(BufReader::new(file), mode))
}

impl<R: Read> SymbolStream<R> {
    pub fn new(reader: R, mode: SymbolMode) -> Self {
        Self {
            reader,
            mode,
            raw: vec![0; CHUNK],
            carry: 0,
            decoded: Vec::with_capacity(CHUNK),
            pos: 0,
            offset: 0,
            consumed: 0,
            done: false,
        }
    }

    /// Symbols yielded so far.
    pub fn consumed(&self) -> u64 {
        self.consumed
    }

    fn refill(&mut self) -> Result<()> {
        self.decoded.clear();
        self.pos = 0;
        while self.decoded.is_empty() && !self.done {
            let read = match self.reader.read(&mut self.raw[self.carry..]) {
                Ok(k) => k,
                Err(e) if e.kind() == std::io::ErrorKind::Interrupted => continue,
                Err(e) => return Err(e.into()),
            };
            let end = self.carry + read;
            if read == 0 {
                self.done = true;
                if self.carry > 0 {
                    // truncated multibyte sequence at end of input
                    return Err(Error::Decode { offset: self.offset });
                }
                return Ok(());
            }
            match self.mode {
                SymbolMode::Bytes => {
                    self.decoded.extend(self.raw[..end].iter().map(|&b| Symbol::from(b)));
                    self.offset += end as u64;
                }
                SymbolMode::Codepoints => self.decode_utf8(end)?,
            }
        }
        Ok(())
    }

    fn decode_utf8(&mut self, end: usize) -> Result<()> {
        let (valid, rest) = match std::str::from_utf8(&self.raw[..end]) {
            Ok(s) => (s.len(), 0),
            Err(e) => {
                if e.error_len().is_some() {
                    return Err(Error::Decode {
                        offset: self.offset + e.valid_up_to() as u64,
                    });
                }
                (e.valid_up_to(), end - e.valid_up_to())
            }
        };
        let text = std::str::from_utf8(&self.raw[..valid]).expect("validated above");
        self.decoded.extend(text.chars().map(Symbol::from));
        self.raw.copy_within(valid..end, 0);
        self.carry = rest;
        self.offset += valid as u64;
        Ok(())
    }
}

impl<R: Read> Iterator for SymbolStream<R> {
    type Item = Result<Symbol>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.pos == self.decoded.len() {
            if let Err(e) = self.refill() {
                self.done = true;
                self.carry = 0;
                return Some(Err(e));
            }
            if self.decoded.is_empty() {
                return None;
            }
        }
        let s = self.decoded[self.pos];
        self.pos += 1;
        self.consumed += 1;
        Some(Ok(s))
    }
}

/// Generalized Zipf source: symbol k ∈ 1..=alphabet has probability
/// proportional to k^−s. Emitted ids are 0-based (id k − 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZipfConfig {
    pub s: f64,
    pub alphabet: u32,
    pub length: u64,
    pub seed: u64,
}

impl ZipfConfig {
    /// Parses `s,alphabet,N`.
    pub fn parse(spec: &str, seed: u64) -> Result<Self> {
        let parts: Vec<&str> = spec.split(',').map(str::trim).collect();
        let bad = || Error::Usage(format!("expected --zipf s,alphabet,N, got {spec:?}"));
        if parts.len() != 3 {
            return Err(bad());
        }
        let s: f64 = parts[0].parse().map_err(|_| bad())?;
        let alphabet: u32 = parts[1].parse().map_err(|_| bad())?;
        let length = parse_count(parts[2]).ok_or_else(bad)?;
        let cfg = ZipfConfig { s, alphabet, length, seed };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.s > 0.0 && self.s.is_finite()) {
            return Err(Error::Config(format!("Zipf exponent s = {} must be positive", self.s)));
        }
        if self.alphabet == 0 {
            return Err(Error::Config("Zipf alphabet must have at least one symbol".into()));
        }
        Ok(())
    }

    /// Cumulative distribution over ids 0..alphabet.
    pub fn cdf(&self) -> Vec<f64> {
        let mut acc = 0.0;
        let mut cdf: Vec<f64> = (1..=self.alphabet)
            .map(|k| {
                acc += (k as f64).powf(-self.s);
                acc
            })
            .collect();
        let total = acc;
        for c in cdf.iter_mut() {
            *c /= total;
        }
        *cdf.last_mut().expect("alphabet ≥ 1") = 1.0;
        cdf
    }

    /// P(id = k − 1) = k^−s / Σⱼ j^−s.
    pub fn probability(&self, k: u32) -> f64 {
        let norm: f64 = (1..=self.alphabet).map(|j| (j as f64).powf(-self.s)).sum();
        (k as f64).powf(-self.s) / norm
    }
}

/// Accepts plain integers and scientific forms such as `1e5`.
fn parse_count(s: &str) -> Option<u64> {
    if let Ok(v) = s.parse::<u64>() {
        return Some(v);
    }
    let f: f64 = s.parse().ok()?;
    (f >= 0.0 && f.fract() == 0.0 && f < u64::MAX as f64).then_some(f as u64)
}

#[derive(Debug, Clone)]
pub struct ZipfStream {
    cdf: Vec<f64>,
    rng: ChaCha8Rng,
    remaining: u64,
}

pub fn zipf_stream(cfg: &ZipfConfig) -> Result<ZipfStream> {
    cfg.validate()?;
    Ok(ZipfStream {
        cdf: cfg.cdf(),
        rng: ChaCha8Rng::seed_from_u64(cfg.seed),
        remaining: cfg.length,
    })
}

impl Iterator for ZipfStream {
    type Item = Result<Symbol>;

    #[inline]
    fn next(&mut self) -> Option<Self::Item> {
        if self.remaining == 0 {
            return None;
        }
        self.remaining -= 1;
        let u: f64 = self.rng.gen();
        let k = self.cdf.partition_point(|&c| c <= u).min(self.cdf.len() - 1);
        Some(Ok(k as Symbol))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = usize::try_from(self.remaining).unwrap_or(usize::MAX);
        (n, Some(n))
    }
}
