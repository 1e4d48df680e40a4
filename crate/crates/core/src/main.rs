use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use ngram_sketch::harness::{self, Experiment, ExperimentConfig, InputSpec};
use ngram_sketch::{
    Error, HashFamily, HashFamilyConfig, IcebergPredicate, Result, SymbolMode, ZipfConfig,
};

#[derive(Parser)]
#[command(name = "ngram-sketch", version, about = "Estimate distinct n-gram counts in one pass")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact n-gram statistics by full tabulation.
    Exact(ExactArgs),
    /// Sketch-based estimates over repeated runs with fresh hash tables.
    Estimate(EstimateArgs),
    /// Estimates for every length 1..=n-max from one pass.
    Multi(MultiArgs),
    /// Table of guaranteed error rates for p-wise independent hashing.
    Bounds(BoundsArgs),
    /// Write a Zipf-distributed stream to a file.
    Zipf(ZipfArgs),
}

#[derive(Args)]
struct InputArgs {
    /// Input file.
    #[arg(long, conflicts_with = "zipf", required_unless_present = "zipf")]
    input: Option<PathBuf>,
    /// Synthetic input `s,alphabet,N`.
    #[arg(long)]
    zipf: Option<String>,
    /// bytes or codepoints.
    #[arg(long, default_value = "bytes")]
    mode: String,
    /// Seed of the synthetic input (defaults to --seed).
    #[arg(long)]
    data_seed: Option<u64>,
}

impl InputArgs {
    fn spec(&self, seed: u64) -> Result<InputSpec> {
        let mode: SymbolMode = self.mode.parse()?;
        match (&self.input, &self.zipf) {
            (Some(path), None) => Ok(InputSpec::File { path: path.clone(), mode }),
            (None, Some(z)) => Ok(InputSpec::Zipf(ZipfConfig::parse(z, self.data_seed.unwrap_or(seed))?)),
            _ => Err(Error::Usage("give exactly one of --input and --zipf".into())),
        }
    }
}

#[derive(Args)]
struct PredicateArgs {
    /// Iceberg predicate f ≥ c.
    #[arg(long, conflicts_with = "exact_count")]
    min_count: Option<u64>,
    /// Iceberg predicate f = c.
    #[arg(long)]
    exact_count: Option<u64>,
}

impl PredicateArgs {
    fn predicate(&self) -> Option<IcebergPredicate> {
        match (self.min_count, self.exact_count) {
            (Some(c), _) => Some(IcebergPredicate::MinCount(c)),
            (_, Some(c)) => Some(IcebergPredicate::ExactCount(c)),
            _ => None,
        }
    }
}

#[derive(Args)]
struct HashArgs {
    /// nwise, cyclic, general, id37 or hybrid.
    #[arg(long, default_value = "general")]
    hash: String,
    /// Hash width in bits.
    #[arg(long = "L", default_value_t = 19)]
    width: u32,
    /// General modulus as hex bit mask, bit i = coefficient of x^i.
    #[arg(long)]
    poly: Option<String>,
    /// ID37 multiplier.
    #[arg(long = "B", default_value_t = 37)]
    multiplier: u64,
    /// Hybrid piece count.
    #[arg(long = "p", default_value_t = 2)]
    pieces: usize,
}

impl HashArgs {
    fn config(&self, n: usize) -> Result<HashFamilyConfig> {
        let family: HashFamily = self.hash.parse()?;
        let mut cfg = HashFamilyConfig::new(family, n)
            .with_width(self.width)
            .with_multiplier(self.multiplier)
            .with_pieces(self.pieces);
        if let Some(p) = &self.poly {
            let digits = p.trim_start_matches("0x").trim_start_matches("0X");
            let poly = u128::from_str_radix(digits, 16)
                .map_err(|_| Error::Usage(format!("--poly expects hex, got {p:?}")))?;
            cfg = cfg.with_poly(poly);
        }
        Ok(cfg)
    }
}

#[derive(Args)]
struct RunArgs {
    /// Buffer capacity M.
    #[arg(long = "M", default_value_t = 1024)]
    capacity: usize,
    #[arg(long, default_value_t = 1)]
    runs: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Also report errors of medians over groups of q runs.
    #[arg(long)]
    median_of: Option<usize>,
    /// CSV output path (stdout when absent).
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Write 0 in the wall_ms column so output is reproducible byte for byte.
    #[arg(long)]
    no_timing: bool,
    /// Run sequentially instead of in parallel.
    #[arg(long)]
    sequential: bool,
}

#[derive(Args)]
struct ExactArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long)]
    n: usize,
    #[command(flatten)]
    predicate: PredicateArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct EstimateArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long)]
    n: usize,
    #[command(flatten)]
    hash: HashArgs,
    #[command(flatten)]
    run: RunArgs,
    #[command(flatten)]
    predicate: PredicateArgs,
}

#[derive(Args)]
struct MultiArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long)]
    n_max: usize,
    #[arg(long, default_value = "nwise")]
    hash: String,
    #[arg(long = "L", default_value_t = 19)]
    width: u32,
    #[command(flatten)]
    run: RunArgs,
    #[command(flatten)]
    predicate: PredicateArgs,
}

#[derive(Args)]
struct BoundsArgs {
    /// Independence degrees.
    #[arg(long = "p", value_delimiter = ',', default_value = "2,4,8")]
    ps: Vec<u32>,
    /// Buffer sizes.
    #[arg(long = "M", value_delimiter = ',', default_value = "256,1024,2048,65536,262144,1048576")]
    ms: Vec<u64>,
    #[arg(long, default_value_t = 0.05)]
    delta: f64,
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct ZipfArgs {
    /// `s,alphabet,N`.
    #[arg(long)]
    zipf: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    /// Write 4-byte little-endian records instead of bytes.
    #[arg(long)]
    records: bool,
}

fn output(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn experiment_config(
    input: InputSpec,
    hash: HashFamilyConfig,
    run: &RunArgs,
    predicate: Option<IcebergPredicate>,
) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::new(input, hash, run.capacity);
    cfg.runs = run.runs;
    cfg.seed = run.seed;
    cfg.predicate = predicate;
    cfg.median_of = run.median_of;
    cfg.timing = !run.no_timing;
    cfg.parallel = !run.sequential;
    cfg
}

fn report(label: &str, exp: &Experiment) {
    let s = exp.summary;
    eprintln!(
        "{label}exact {} | relative error p25 {:.4} p50 {:.4} p75 {:.4} p95 {:.4} mean {:.4}",
        exp.truth.distinct, s.p25, s.p50, s.p75, s.p95, s.mean
    );
}

fn check_failures(exps: &[Experiment], width: u32) -> Result<()> {
    let failed: usize = exps.iter().map(Experiment::failed_runs).sum();
    if failed == 0 {
        return Ok(());
    }
    let first = exps
        .iter()
        .flat_map(|e| &e.runs)
        .find(|r| r.status != harness::RunStatus::Ok)
        .expect("at least one failed run");
    eprintln!("{failed} run(s) ran out of hash levels; increase --L");
    Err(Error::LevelExhausted {
        width,
        partial_estimate: first.estimate,
    })
}

fn cmd_exact(a: ExactArgs) -> Result<()> {
    let input = a.input.spec(a.seed)?;
    let stats = harness::ground_truth(&input, a.n, ngram_sketch::exact::DEFAULT_KEY_CAP)?;
    let mut out = io::stdout().lock();
    writeln!(out, "n {}", a.n)?;
    writeln!(out, "total {}", stats.total)?;
    writeln!(out, "distinct {}", stats.distinct)?;
    writeln!(out, "entropy_bits {}", stats.entropy_bits)?;
    if let Some(p) = a.predicate.predicate() {
        let count = ngram_sketch::exact_iceberg(&stats, |f| p.test(f));
        writeln!(out, "iceberg {count}")?;
    }
    Ok(())
}

fn cmd_estimate(a: EstimateArgs) -> Result<()> {
    let input = a.input.spec(a.run.seed)?;
    let cfg = experiment_config(input, a.hash.config(a.n)?, &a.run, a.predicate.predicate());
    let exp = harness::run_estimate(&cfg)?;
    harness::write_estimate_csv(output(&a.run.csv)?, &exp)?;
    report("", &exp);
    check_failures(std::slice::from_ref(&exp), cfg.hash.width)
}

fn cmd_multi(a: MultiArgs) -> Result<()> {
    let input = a.input.spec(a.run.seed)?;
    let family: HashFamily = a.hash.parse()?;
    let hash = HashFamilyConfig::new(family, a.n_max).with_width(a.width);
    let cfg = experiment_config(input, hash, &a.run, a.predicate.predicate());
    let exps = harness::run_multi(&cfg)?;
    harness::write_multi_csv(output(&a.run.csv)?, &exps)?;
    for (k, exp) in exps.iter().enumerate() {
        report(&format!("n={} ", k + 1), exp);
    }
    check_failures(&exps, cfg.hash.width)
}

fn cmd_bounds(a: BoundsArgs) -> Result<()> {
    let table = harness::bounds_table(&a.ps, &a.ms, a.delta)?;
    print!("{}", harness::format_bounds_table(&a.ps, &a.ms, &table));
    if let Some(path) = &a.csv {
        harness::write_bounds_csv(File::create(path)?, &a.ps, &a.ms, &table)?;
    }
    Ok(())
}

fn cmd_zipf(a: ZipfArgs) -> Result<()> {
    let cfg = ZipfConfig::parse(&a.zipf, a.seed)?;
    let n = harness::write_zipf(&cfg, &a.out, a.records)?;
    eprintln!("wrote {n} symbols to {}", a.out.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Exact(a) => cmd_exact(a),
        Command::Estimate(a) => cmd_estimate(a),
        Command::Multi(a) => cmd_multi(a),
        Command::Bounds(a) => cmd_bounds(a),
        Command::Zipf(a) => cmd_zipf(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
