//! Multi-run experiments, percentile summaries and CSV output.
//!
//! Run i uses tables seeded with `run_seed(base, i)`, a splitmix64 finalizer
//! applied to `base + (i + 1)·0x9E3779B97F4A7C15`. Runs may execute in
//! parallel; results are always reported in run order.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;

use crate::corpus::{open_stream, zipf_stream, SymbolMode, SymbolStream, ZipfConfig, ZipfStream};
use crate::error::{Error, Result};
use crate::exact::{exact_iceberg, exact_stats, ExactStats, DEFAULT_KEY_CAP};
use crate::hashers::{AnyHasher, HashFamily, HashFamilyConfig};
use crate::sketch::{ingest, IcebergPredicate, MultiSketch, Sketch};
use crate::symbols::{RandomSource, Symbol};

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// Seed of run `index` derived from `base`.
pub fn run_seed(base: u64, index: u64) -> u64 {
    let mut z = base.wrapping_add(index.wrapping_add(1).wrapping_mul(GOLDEN));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, PartialEq)]
pub enum InputSpec {
    File { path: PathBuf, mode: SymbolMode },
    Zipf(ZipfConfig),
    Memory(Vec<Symbol>),
}

/// Symbol source re-opened for every run.
#[allow(clippy::large_enum_variant)]
pub enum Source {
    File(SymbolStream<io::BufReader<File>>),
    Zipf(ZipfStream),
    Memory(std::vec::IntoIter<Symbol>),
}

impl Iterator for Source {
    type Item = Result<Symbol>;

    #[inline]
    fn next(&mut self) -> Option<Result<Symbol>> {
        match self {
            Source::File(s) => s.next(),
            Source::Zipf(s) => s.next(),
            Source::Memory(s) => s.next().map(Ok),
        }
    }
}

impl InputSpec {
    pub fn open(&self) -> Result<Source> {
        Ok(match self {
            InputSpec::File { path, mode } => Source::File(open_stream(path, *mode)?),
            InputSpec::Zipf(cfg) => Source::Zipf(zipf_stream(cfg)?),
            InputSpec::Memory(v) => Source::Memory(v.clone().into_iter()),
        })
    }

    /// Reads the whole input into memory.
    pub fn materialize(&self) -> Result<Vec<Symbol>> {
        self.open()?.collect()
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub input: InputSpec,
    pub hash: HashFamilyConfig,
    pub capacity: usize,
    pub runs: usize,
    pub seed: u64,
    pub predicate: Option<IcebergPredicate>,
    pub median_of: Option<usize>,
    /// Record per-run wall time; when false the column is 0.
    pub timing: bool,
    pub parallel: bool,
    pub key_cap: usize,
}

impl ExperimentConfig {
    pub fn new(input: InputSpec, hash: HashFamilyConfig, capacity: usize) -> Self {
        Self {
            input,
            hash,
            capacity,
            runs: 1,
            seed: 0,
            predicate: None,
            median_of: None,
            timing: true,
            parallel: true,
            key_cap: DEFAULT_KEY_CAP,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.runs == 0 {
            return Err(Error::Config("runs must be at least 1".into()));
        }
        if self.capacity == 0 {
            return Err(Error::Config("M must be at least 1".into()));
        }
        if let Some(q) = self.median_of {
            if q == 0 || q > self.runs {
                return Err(Error::Config(format!(
                    "median-of-q needs 1 ≤ q ≤ runs (q = {q}, runs = {})",
                    self.runs
                )));
            }
        }
        self.hash.validate::<u64>()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunStatus {
    Ok,
    LevelExhausted,
}

impl RunStatus {
    pub fn name(&self) -> &'static str {
        match self {
            RunStatus::Ok => "ok",
            RunStatus::LevelExhausted => "level_exhausted",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub run: usize,
    pub seed: u64,
    pub estimate: f64,
    pub exact: f64,
    pub rel_error: f64,
    /// Set when `exact` is 0 and `rel_error` holds the absolute error.
    pub absolute: bool,
    pub level: u32,
    pub buffered: usize,
    pub entropy_est: Option<f64>,
    pub entropy_exact: f64,
    pub iceberg_est: Option<f64>,
    pub iceberg_exact: Option<f64>,
    pub wall_ms: f64,
    pub status: RunStatus,
}

/// |estimate − exact| / exact, or the absolute error when exact is 0.
pub fn relative_error(estimate: f64, exact: f64) -> (f64, bool) {
    if exact == 0.0 {
        ((estimate - exact).abs(), true)
    } else {
        ((estimate - exact).abs() / exact, false)
    }
}

/// Value at ascending 0-based index min(⌊q·R/100⌋, R − 1). For R = 100 and
/// q = 95 this is the 5th largest value.
pub fn percentile(values: &[f64], q: f64) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::Usage("percentile of an empty list".into()));
    }
    if !(0.0..=100.0).contains(&q) {
        return Err(Error::Domain(format!("percentile q = {q} outside [0, 100]")));
    }
    let r = values.len();
    let idx = ((q * r as f64 / 100.0).floor() as usize).min(r - 1);
    let mut v = values.to_vec();
    let (_, x, _) = v.select_nth_unstable_by(idx, f64::total_cmp);
    Ok(*x)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub p25: f64,
    pub p50: f64,
    pub p75: f64,
    pub p95: f64,
    pub mean: f64,
}

impl Summary {
    pub fn of(values: &[f64]) -> Result<Self> {
        let p = |q| percentile(values, q);
        Ok(Summary {
            p25: p(25.0)?,
            p50: p(50.0)?,
            p75: p(75.0)?,
            p95: p(95.0)?,
            mean: values.iter().sum::<f64>() / values.len() as f64,
        })
    }

    pub fn rows(&self) -> [(&'static str, f64); 5] {
        [
            ("p25", self.p25),
            ("p50", self.p50),
            ("p75", self.p75),
            ("p95", self.p95),
            ("mean", self.mean),
        ]
    }
}

/// Exact values a run is compared against.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Truth {
    pub distinct: f64,
    pub entropy: f64,
    pub iceberg: Option<f64>,
}

impl Truth {
    pub fn of(stats: &ExactStats, predicate: Option<IcebergPredicate>) -> Self {
        Truth {
            distinct: stats.distinct as f64,
            entropy: stats.entropy_bits,
            iceberg: predicate.map(|p| exact_iceberg(stats, |f| p.test(f)) as f64),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Experiment {
    pub truth: Truth,
    pub runs: Vec<RunResult>,
    pub summary: Summary,
    /// Relative errors of medians over consecutive groups of q runs.
    pub median_summary: Option<(usize, Summary)>,
}

impl Experiment {
    pub fn failed_runs(&self) -> usize {
        self.runs.iter().filter(|r| r.status != RunStatus::Ok).count()
    }
}

fn par_map<T: Send>(runs: usize, parallel: bool, f: impl Fn(usize) -> Result<T> + Sync + Send) -> Result<Vec<T>> {
    if parallel {
        (0..runs).into_par_iter().map(f).collect()
    } else {
        (0..runs).map(f).collect()
    }
}

#[allow(clippy::too_many_arguments)]
fn finish_run(
    cfg_timing: bool,
    start: Instant,
    run: usize,
    seed: u64,
    sketch: &Sketch,
    outcome: Result<()>,
    truth: &Truth,
    predicate: Option<IcebergPredicate>,
) -> Result<RunResult> {
    let wall_ms = if cfg_timing {
        start.elapsed().as_secs_f64() * 1e3
    } else {
        0.0
    };
    let status = match outcome {
        Ok(()) => RunStatus::Ok,
        Err(Error::LevelExhausted { .. }) => RunStatus::LevelExhausted,
        Err(e) => return Err(e),
    };
    let stats = sketch.stats(predicate);
    let (rel_error, absolute) = relative_error(stats.distinct_estimate, truth.distinct);
    Ok(RunResult {
        run,
        seed,
        estimate: stats.distinct_estimate,
        exact: truth.distinct,
        rel_error,
        absolute,
        level: stats.level,
        buffered: stats.buffered,
        entropy_est: stats.entropy_estimate,
        entropy_exact: truth.entropy,
        iceberg_est: stats.iceberg_estimate,
        iceberg_exact: truth.iceberg,
        wall_ms,
        status,
    })
}

/// Runs one sketch over the input with tables seeded by `seed`.
pub fn single_run(cfg: &ExperimentConfig, run: usize, seed: u64, truth: &Truth) -> Result<RunResult> {
    let mut hasher: AnyHasher<u64> = cfg.hash.build(RandomSource::new(seed))?;
    let mut sketch = Sketch::new(cfg.capacity, cfg.hash.width)?;
    let source = cfg.input.open()?;
    let start = Instant::now();
    let outcome = ingest(&mut sketch, &mut hasher, source);
    finish_run(cfg.timing, start, run, seed, &sketch, outcome, truth, cfg.predicate)
}

fn summarize(runs: &[RunResult], truth: &Truth, median_of: Option<usize>) -> Result<(Summary, Option<(usize, Summary)>)> {
    let errors: Vec<f64> = runs.iter().map(|r| r.rel_error).collect();
    let summary = Summary::of(&errors)?;
    let median_summary = match median_of {
        None => None,
        Some(q) => {
            let medians: Vec<f64> = runs
                .chunks_exact(q)
                .map(|group| {
                    let est: Vec<f64> = group.iter().map(|r| r.estimate).collect();
                    relative_error(percentile(&est, 50.0).expect("nonempty group"), truth.distinct).0
                })
                .collect();
            Some((q, Summary::of(&medians)?))
        }
    };
    Ok((summary, median_summary))
}

/// Exact statistics of the configured input for n-grams of length `n`.
pub fn ground_truth(input: &InputSpec, n: usize, key_cap: usize) -> Result<ExactStats> {
    exact_stats(input.open()?, n, key_cap)
}

pub fn run_estimate(cfg: &ExperimentConfig) -> Result<Experiment> {
    cfg.validate()?;
    let truth = Truth::of(&ground_truth(&cfg.input, cfg.hash.n, cfg.key_cap)?, cfg.predicate);
    run_estimate_against(cfg, truth)
}

/// As [`run_estimate`] with precomputed exact values.
pub fn run_estimate_against(cfg: &ExperimentConfig, truth: Truth) -> Result<Experiment> {
    cfg.validate()?;
    let runs = par_map(cfg.runs, cfg.parallel, |i| {
        single_run(cfg, i, run_seed(cfg.seed, i as u64), &truth)
    })?;
    let (summary, median_summary) = summarize(&runs, &truth, cfg.median_of)?;
    Ok(Experiment { truth, runs, summary, median_summary })
}

/// Simultaneous estimation of every length 1..=n_max; `cfg.hash.n` is n_max
/// and the family must be NWise.
pub fn run_multi(cfg: &ExperimentConfig) -> Result<Vec<Experiment>> {
    cfg.validate()?;
    if cfg.hash.family != HashFamily::NWise || cfg.hash.shared_table {
        return Err(Error::Usage(format!(
            "simultaneous estimation needs nwise hashing with position tables, not {}",
            cfg.hash.family
        )));
    }
    let n_max = cfg.hash.n;
    let truths = (1..=n_max)
        .map(|k| Ok(Truth::of(&ground_truth(&cfg.input, k, cfg.key_cap)?, cfg.predicate)))
        .collect::<Result<Vec<_>>>()?;
    let per_run = par_map(cfg.runs, cfg.parallel, |i| {
        let seed = run_seed(cfg.seed, i as u64);
        let hasher = match cfg.hash.build::<u64>(RandomSource::new(seed))? {
            AnyHasher::NWise(h) => h,
            _ => unreachable!("family checked above"),
        };
        let mut multi = MultiSketch::new(hasher, cfg.capacity)?;
        let source = cfg.input.open()?;
        let start = Instant::now();
        multi.ingest(source)?;
        (1..=n_max)
            .map(|k| {
                let sk = multi.sketch(k);
                let out = if multi.exhausted(k) {
                    Err(Error::LevelExhausted {
                        width: sk.width(),
                        partial_estimate: sk.estimate_distinct(),
                    })
                } else {
                    Ok(())
                };
                finish_run(cfg.timing, start, i, seed, sk, out, &truths[k - 1], cfg.predicate)
            })
            .collect::<Result<Vec<_>>>()
    })?;
    (0..n_max)
        .map(|k| {
            let runs: Vec<RunResult> = per_run.iter().map(|r| r[k].clone()).collect();
            let (summary, median_summary) = summarize(&runs, &truths[k], cfg.median_of)?;
            Ok(Experiment { truth: truths[k], runs, summary, median_summary })
        })
        .collect()
}

pub const CSV_HEADER: [&str; 14] = [
    "run",
    "seed",
    "estimate",
    "exact",
    "rel_error",
    "t",
    "m_prime",
    "entropy_est",
    "entropy_exact",
    "iceberg_est",
    "iceberg_exact",
    "wall_ms",
    "abs_error",
    "status",
];

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn column_summary(values: impl Iterator<Item = Option<f64>>) -> Option<Summary> {
    let v: Vec<f64> = values.flatten().collect();
    Summary::of(&v).ok()
}

fn run_record(r: &RunResult) -> Vec<String> {
    vec![
        r.run.to_string(),
        r.seed.to_string(),
        r.estimate.to_string(),
        r.exact.to_string(),
        r.rel_error.to_string(),
        r.level.to_string(),
        r.buffered.to_string(),
        opt(r.entropy_est),
        r.entropy_exact.to_string(),
        opt(r.iceberg_est),
        opt(r.iceberg_exact),
        r.wall_ms.to_string(),
        u8::from(r.absolute).to_string(),
        r.status.name().to_string(),
    ]
}

/// Summary rows: each numeric column is summarized on its own.
fn summary_records(exp: &Experiment) -> Vec<Vec<String>> {
    let runs = &exp.runs;
    let est = column_summary(runs.iter().map(|r| Some(r.estimate)));
    let ent = column_summary(runs.iter().map(|r| r.entropy_est));
    let ice = column_summary(runs.iter().map(|r| r.iceberg_est));
    let wall = column_summary(runs.iter().map(|r| Some(r.wall_ms)));
    let pick = |s: &Option<Summary>, i: usize| s.map(|s| s.rows()[i].1.to_string()).unwrap_or_default();
    let mut out = Vec::new();
    for (i, (name, err)) in exp.summary.rows().iter().enumerate() {
        out.push(vec![
            "summary".to_string(),
            name.to_string(),
            pick(&est, i),
            exp.truth.distinct.to_string(),
            err.to_string(),
            String::new(),
            String::new(),
            pick(&ent, i),
            exp.truth.entropy.to_string(),
            pick(&ice, i),
            opt(exp.truth.iceberg),
            pick(&wall, i),
            String::new(),
            String::new(),
        ]);
    }
    if let Some((q, s)) = &exp.median_summary {
        for (name, err) in s.rows() {
            let mut row = vec![String::new(); CSV_HEADER.len()];
            row[0] = format!("median_of_{q}");
            row[1] = name.to_string();
            row[3] = exp.truth.distinct.to_string();
            row[4] = err.to_string();
            out.push(row);
        }
    }
    out
}

pub fn write_estimate_csv<W: Write>(out: W, exp: &Experiment) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER).map_err(csv_error)?;
    for r in &exp.runs {
        w.write_record(run_record(r)).map_err(csv_error)?;
    }
    for row in summary_records(exp) {
        w.write_record(row).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

/// Same schema with a leading `n` column, one block per length.
pub fn write_multi_csv<W: Write>(out: W, exps: &[Experiment]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let header: Vec<&str> = std::iter::once("n").chain(CSV_HEADER).collect();
    w.write_record(&header).map_err(csv_error)?;
    for (k, exp) in exps.iter().enumerate() {
        let n = (k + 1).to_string();
        for r in &exp.runs {
            w.write_record(std::iter::once(n.clone()).chain(run_record(r))).map_err(csv_error)?;
        }
        for row in summary_records(exp) {
            w.write_record(std::iter::once(n.clone()).chain(row)).map_err(csv_error)?;
        }
    }
    w.flush()?;
    Ok(())
}

fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(e) => Error::Io(e),
        other => Error::Io(io::Error::other(format!("{other:?}"))),
    }
}

/// ε values for each (p, M) at reliability 1 − δ; `None` marks cells with no
/// guarantee below 100%.
pub fn bounds_table(ps: &[u32], ms: &[u64], delta: f64) -> Result<Vec<Vec<Option<f64>>>> {
    ps.iter()
        .map(|&p| {
            ms.iter()
                .map(|&m| crate::bounds::epsilon_for::<f64>(p, m, delta))
                .collect()
        })
        .collect()
}

fn cell(v: Option<f64>) -> String {
    match v {
        Some(e) => format!("{:.1}%", e * 100.0),
        None => "—".to_string(),
    }
}

pub fn format_bounds_table(ps: &[u32], ms: &[u64], table: &[Vec<Option<f64>>]) -> String {
    let mut rows: Vec<Vec<String>> = vec![std::iter::once(String::new())
        .chain(ms.iter().map(|m| m.to_string()))
        .collect()];
    for (p, row) in ps.iter().zip(table) {
        rows.push(
            std::iter::once(format!("p={p}"))
                .chain(row.iter().map(|&v| cell(v)))
                .collect(),
        );
    }
    let cols = rows[0].len();
    let widths: Vec<usize> = (0..cols)
        .map(|c| rows.iter().map(|r| r[c].chars().count()).max().unwrap_or(0))
        .collect();
    let mut s = String::new();
    for r in &rows {
        let line: Vec<String> = r
            .iter()
            .zip(&widths)
            .map(|(v, &w)| format!("{}{v}", " ".repeat(w - v.chars().count())))
            .collect();
        s.push_str(line.join("  ").trim_end());
        s.push('\n');
    }
    s
}

pub fn write_bounds_csv<W: Write>(out: W, ps: &[u32], ms: &[u64], table: &[Vec<Option<f64>>]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["p", "M", "epsilon"]).map_err(csv_error)?;
    for (p, row) in ps.iter().zip(table) {
        for (m, v) in ms.iter().zip(row) {
            w.write_record([p.to_string(), m.to_string(), opt(*v)]).map_err(csv_error)?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Writes a Zipf stream as one byte per symbol, or as little-endian u32
/// records when `records` is set.
pub fn write_zipf(cfg: &ZipfConfig, path: &Path, records: bool) -> Result<u64> {
    if !records && cfg.alphabet > 256 {
        return Err(Error::Usage(format!(
            "alphabet {} does not fit in bytes; use --records",
            cfg.alphabet
        )));
    }
    let mut out = BufWriter::new(File::create(path)?);
    let mut written = 0u64;
    for s in zipf_stream(cfg)? {
        let s = s?;
        if records {
            out.write_all(&s.to_le_bytes())?;
        } else {
            out.write_all(&[s as u8])?;
        }
        written += 1;
    }
    out.flush()?;
    Ok(written)
}
