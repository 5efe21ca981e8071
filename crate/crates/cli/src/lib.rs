//! `lstring` commands. Each command produces an [`Outcome`]; the binary writes it as a
//! JSON report plus CSV tables and maps `passed` to the exit code.

pub mod checks;
mod exact;
mod mc;

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use lstring_core::coeff::CoeffTable;
use lstring_core::word::{parse_loop, parse_sequence};
use lstring_core::LoopSequence;
use lstring_gauge::{config, Group};

#[derive(Parser, Debug, Clone, Serialize)]
#[command(name = "lstring", version, about = "Loop operations, string trajectories and lattice Wilson loops")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Lattice dimension; loop words must live in it
    #[arg(long, global = true)]
    pub dim: Option<usize>,
    /// Worker threads for enumeration and Monte Carlo replicas
    #[arg(long, global = true)]
    #[serde(skip)]
    pub threads: Option<usize>,
    /// Directory for the JSON report and CSV tables
    #[arg(long, global = true, default_value = ".")]
    #[serde(skip)]
    pub out: PathBuf,
}

#[derive(Subcommand, Debug, Clone, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Non-backtracking core and statistics of a loop word
    Core { words: String },
    /// Every loop operation applicable to a sequence, with its result
    Catalog { words: String },
    /// Vanishing trajectories by exact operation counts or by (i, k) grade
    Enumerate(EnumerateArgs),
    /// Table of a_{i,k}(s) and b_{i,k}(s) with the bound checks
    Coeff(CoeffArgs),
    /// Truncated β series of f_{2k}(s) with its tail bound
    Series(SeriesArgs),
    /// Loop-equation residual of the truncated series, or the worked trajectory
    VerifyMaster(VerifyArgs),
    /// Monte Carlo estimate of φ_N(s)
    McEstimate(McEstimateArgs),
    /// Finite-N loop equation by Monte Carlo, or a factorization ladder
    McVerify(McVerifyArgs),
    /// SU(N) at coupling 2β against SO(N) at β
    CompareSoSu(McArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Core { .. } => "core",
            Command::Catalog { .. } => "catalog",
            Command::Enumerate(_) => "enumerate",
            Command::Coeff(_) => "coeff",
            Command::Series(_) => "series",
            Command::VerifyMaster(_) => "verify-master",
            Command::McEstimate(_) => "mc-estimate",
            Command::McVerify(_) => "mc-verify",
            Command::CompareSoSu(_) => "compare-so-su",
        }
    }
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct EnumerateArgs {
    pub words: String,
    /// Deformations (exact-count mode; unset counts default to 0)
    #[arg(long)]
    pub a: Option<u32>,
    /// Expansions
    #[arg(long)]
    pub b: Option<u32>,
    /// Mergers
    #[arg(long)]
    pub c: Option<u32>,
    /// Inactions
    #[arg(long)]
    pub d: Option<u32>,
    /// Graded mode: deformations plus expansions
    #[arg(long)]
    pub imax: Option<u32>,
    /// Graded mode: mergers plus inactions
    #[arg(short = 'k', long = "k")]
    pub k: Option<u32>,
    /// Include every trajectory in the report (exact-count mode)
    #[arg(long)]
    pub list: bool,
    /// Keep inaction steps of weight zero
    #[arg(long)]
    pub include_zero_weight: bool,
    #[arg(long, default_value_t = 1 << 32)]
    pub max_trajectories: u64,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct CoeffArgs {
    pub words: String,
    /// Largest i in the table
    #[arg(long, default_value_t = 3)]
    pub imax: u32,
    /// Largest k in the table
    #[arg(short = 'k', long = "k", default_value_t = 0)]
    pub k: u32,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct SeriesArgs {
    pub words: String,
    #[arg(short = 'k', long = "k", default_value_t = 0)]
    pub k: u32,
    /// Exact decimal or fraction, e.g. 1e-4 or 1/64
    #[arg(long, allow_hyphen_values = true)]
    pub beta: String,
    #[arg(long, default_value_t = 3)]
    pub imax: u32,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct VerifyArgs {
    /// Loop sequence; not needed with --figure7
    #[arg(required_unless_present = "figure7")]
    pub words: Option<String>,
    /// Replay the worked eleven-step trajectory and check its weight
    #[arg(long)]
    pub figure7: bool,
    #[arg(short = 'k', long = "k", default_value_t = 0)]
    pub k: u32,
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub beta: String,
    #[arg(long, default_value_t = 3)]
    pub imax: u32,
    /// Also check the f_0 equation at coupling 2β with the expansion terms dropped
    #[arg(long)]
    pub reduced: bool,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct McArgs {
    pub words: String,
    /// TOML run configuration; the flags below override it
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub group: Option<Group>,
    #[arg(long = "N")]
    pub n: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<f64>,
    /// Vertices per axis: `4`, `4x4` or `4,4`
    #[arg(long = "box")]
    pub extent: Option<String>,
    /// free or periodic
    #[arg(long)]
    pub boundary: Option<String>,
    #[arg(long)]
    pub sweeps: Option<usize>,
    #[arg(long)]
    pub burn_in: Option<usize>,
    #[arg(long)]
    pub replicas: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Proposals per link visit
    #[arg(long)]
    pub hits: Option<usize>,
    /// Initial proposal width
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Start from Haar-random links
    #[arg(long)]
    pub hot: bool,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct McEstimateArgs {
    #[command(flatten)]
    pub mc: McArgs,
    /// Compare with the truncated series of f_0 up to this order, with a 1/N² budget
    #[arg(long)]
    pub imax: Option<u32>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct McVerifyArgs {
    #[command(flatten)]
    pub mc: McArgs,
    /// Comma-separated N values: run the factorization ladder instead
    #[arg(long)]
    pub ladder: Option<String>,
}

/// A CSV table written next to the report.
#[derive(Clone, Debug)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, header: &[&str]) -> Self {
        Table { name: name.into(), header: header.iter().map(|h| h.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push<I: IntoIterator<Item = String>>(&mut self, row: I) {
        self.rows.push(row.into_iter().collect());
    }
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub passed: bool,
    /// One-line human summary printed on stdout.
    pub summary: String,
    pub result: Value,
    pub provenance: Value,
    pub warnings: Vec<String>,
    pub tables: Vec<Table>,
}

/// Parse `;`-separated loop words, reporting erased backtracks as warnings.
pub fn parse_words(text: &str, dim: Option<usize>) -> Result<(LoopSequence, Vec<String>)> {
    let mut warnings = Vec::new();
    for (i, part) in text.split(';').enumerate() {
        if let Ok((l, true)) = parse_loop(part) {
            let what = if l.is_null() { "reduces to the null loop" } else { "had backtracks erased" };
            warnings.push(format!("component {}: {what}", i + 1));
        }
    }
    for w in &warnings {
        eprintln!("warning: {w}");
    }
    let (s, _) = parse_sequence(text).with_context(|| format!("cannot parse {text:?}"))?;
    if let (Some(d), Some(sd)) = (dim, s.dim()) {
        if d != sd {
            bail!("dimension mismatch: --dim {d} but the loops live in d = {sd}");
        }
    }
    Ok((s, warnings))
}

/// Coefficient table, preloaded from `$LSTRING_CACHE` when set.
pub fn cached_table() -> Result<CoeffTable> {
    let t = CoeffTable::new();
    if let Some(dir) = cache_dir() {
        t.load_dir(&dir).with_context(|| format!("reading cache {}", dir.display()))?;
    }
    Ok(t)
}

pub fn save_table(t: &CoeffTable) -> Result<()> {
    if let Some(dir) = cache_dir() {
        t.save_dir(&dir).with_context(|| format!("writing cache {}", dir.display()))?;
    }
    Ok(())
}

fn cache_dir() -> Option<PathBuf> {
    std::env::var_os("LSTRING_CACHE").filter(|v| !v.is_empty()).map(PathBuf::from)
}

/// Provenance of a deterministic command: hash of its arguments.
fn exact_provenance<T: Serialize>(args: &T) -> Value {
    let text = serde_json::to_string(args).expect("arguments serialize");
    let hash: String = Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect();
    json!({
        "seed": Value::Null,
        "config_hash": hash,
        "commit": config::commit(),
        "version": env!("CARGO_PKG_VERSION"),
    })
}

pub fn execute(cli: &Cli) -> Result<Outcome> {
    let mut out = match &cli.command {
        Command::Core { words } => exact::core(words, cli.dim),
        Command::Catalog { words } => exact::catalog(words, cli.dim),
        Command::Enumerate(a) => exact::enumerate(a, cli.dim),
        Command::Coeff(a) => exact::coeff(a, cli.dim),
        Command::Series(a) => exact::series(a, cli.dim),
        Command::VerifyMaster(a) => exact::verify_master(a, cli.dim),
        Command::McEstimate(a) => mc::estimate(a, cli.dim),
        Command::McVerify(a) => mc::verify(a, cli.dim),
        Command::CompareSoSu(a) => mc::compare(a, cli.dim),
    }?;
    if out.provenance.is_null() {
        out.provenance = exact_provenance(cli);
    }
    Ok(out)
}

/// Write `<command>.json` and every table as `<name>.csv` into `dir`.
pub fn write_outputs(cli: &Cli, outcome: &Outcome, dir: &Path) -> Result<PathBuf> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let report = json!({
        "command": cli.command.name(),
        "arguments": cli,
        "provenance": outcome.provenance,
        "passed": outcome.passed,
        "warnings": outcome.warnings,
        "result": outcome.result,
    });
    let path = dir.join(format!("{}.json", cli.command.name()));
    fs::write(&path, serde_json::to_string_pretty(&report)? + "\n")
        .with_context(|| format!("writing {}", path.display()))?;
    for t in &outcome.tables {
        let p = dir.join(format!("{}.csv", t.name));
        let mut w = csv::Writer::from_path(&p).with_context(|| format!("writing {}", p.display()))?;
        w.write_record(&t.header)?;
        for r in &t.rows {
            w.write_record(r)?;
        }
        w.flush()?;
    }
    Ok(path)
}
