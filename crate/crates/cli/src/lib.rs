//! Command-line front end. `main.rs` only parses arguments and maps the
//! returned [`Status`] to a process exit code.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use inveul_core::closed_forms::{i_closed_row, j_closed_row, verify_j_degree, verify_s_recurrence, SnParams};
use inveul_core::conjectures::{scan_with, verify_gamma, verify_invariants, CrossVerify, Property, ScanOptions, ScanStatus};
use inveul_core::oracle::Oracle;
use inveul_core::tables::{computed_cells, render_latex, reproduce, Golden};
use inveul_core::{BigCoeff, DescentRow, Error, Family, Mismatch, TriangleCache, TriangleKind, VerificationReport};
use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

pub const CACHE_ENV: &str = "INVEUL_CACHE";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok = 0,
    VerificationFailed = 1,
    Usage = 2,
    Counterexample = 3,
}

#[derive(Debug, Parser)]
#[command(name = "inveul", version, about = "Exact descent polynomials of involutions and their gamma coefficients")]
pub struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,
    /// Worker threads for parallel work (default: one per core).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// JSON-lines row cache, revalidated on load. Overridden by INVEUL_CACHE.
    #[arg(long, global = true)]
    pub cache: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print rows of I, J, a or b.
    Table(TableArgs),
    /// Cross-check recurrences, closed forms and enumeration.
    Verify(VerifyArgs),
    /// Search a range for violations of a property.
    Scan(ScanArgs),
    /// Recompute the three reference tables and diff them against the embedded copies.
    Reproduce(ReproduceArgs),
    /// Time the main computations.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FamilyArg(pub TriangleKind);

impl FromStr for FamilyArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "I" | "i" => Ok(FamilyArg(TriangleKind::I)),
            "J" | "j" => Ok(FamilyArg(TriangleKind::J)),
            "a" | "A" => Ok(FamilyArg(TriangleKind::A)),
            "b" | "B" => Ok(FamilyArg(TriangleKind::B)),
            _ => Err(format!("unknown family {s:?}, expected I, J, a or b")),
        }
    }
}

#[derive(Debug, Args)]
pub struct TableArgs {
    /// I, J, a or b.
    #[arg(long)]
    pub family: FamilyArg,
    /// A single row; shorthand for `--from N --to N`.
    #[arg(long, conflicts_with_all = ["from", "to"])]
    pub n: Option<usize>,
    #[arg(long)]
    pub from: Option<usize>,
    #[arg(long)]
    pub to: Option<usize>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 50)]
    pub recurrence_max: usize,
    #[arg(long, default_value_t = 12)]
    pub oracle_max: usize,
    #[arg(long, default_value_t = 60)]
    pub gamma_max: usize,
    #[arg(long, default_value_t = 200)]
    pub invariant_max: usize,
    /// Corrupt the J_2 base case before running.
    #[arg(long, hide = true)]
    pub inject_fault: bool,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    #[arg(long)]
    pub property: Property,
    /// Default: the first index the property applies to.
    #[arg(long)]
    pub from: Option<usize>,
    #[arg(long, default_value_t = inveul_core::conjectures::DEFAULT_SCAN_MAX)]
    pub to: usize,
    /// Half-size n from which b_{2n,k} >= 0 is expected.
    #[arg(long, default_value_t = ScanOptions::default().b_threshold_half)]
    pub threshold: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Emit {
    Latex,
}

#[derive(Debug, Args)]
pub struct ReproduceArgs {
    /// Also print the recomputed tables.
    #[arg(long, value_enum)]
    pub emit: Option<Emit>,
    /// Directory with table1.txt, table2.txt and table3.txt to use instead of the embedded data.
    #[arg(long)]
    pub data: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Largest row for the recurrence and closed-form timings.
    #[arg(long, default_value_t = 300)]
    pub n: usize,
    /// Largest size for the enumeration timings.
    #[arg(long, default_value_t = 12)]
    pub oracle_n: usize,
}

/// One coefficient, as exported in CSV, JSON-lines and the cache file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputRecord {
    pub family: String,
    pub n: usize,
    pub k: usize,
    pub value: String,
}

impl OutputRecord {
    pub fn new(family: &str, n: usize, k: usize, value: &BigCoeff) -> Self {
        OutputRecord { family: family.to_string(), n, k, value: value.to_string() }
    }

    pub fn parse_value(&self) -> Result<BigCoeff, String> {
        BigInt::from_str(&self.value).map_err(|e| format!("bad value {:?}: {e}", self.value))
    }

    pub fn csv_line(&self) -> String {
        format!("{},{},{},{}", self.family, self.n, self.k, self.value)
    }

    pub fn from_csv_line(line: &str) -> Result<Self, String> {
        let parts: Vec<&str> = line.trim().split(',').collect();
        let [family, n, k, value] = parts[..] else {
            return Err(format!("expected 4 fields: {line:?}"));
        };
        let rec = OutputRecord {
            family: family.to_string(),
            n: n.parse().map_err(|e| format!("n: {e}"))?,
            k: k.parse().map_err(|e| format!("k: {e}"))?,
            value: value.to_string(),
        };
        rec.parse_value()?;
        Ok(rec)
    }
}

pub const CSV_HEADER: &str = "family,n,k,value";

/// Failure modes of a command that are not a property of the data.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(Error),
    Io(io::Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::OddIndex { .. } | Error::IndexOutOfRange(_) | Error::FeasibilityExceeded { .. } => {
                CliError::Usage(e.to_string())
            }
            e => CliError::Core(e),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.into())
    }
}

impl CliError {
    pub fn status(&self) -> Status {
        match self {
            CliError::Usage(_) => Status::Usage,
            CliError::Core(_) | CliError::Io(_) => Status::VerificationFailed,
        }
    }
}

type CliResult<T = Status> = Result<T, CliError>;

pub fn cache_path(flag: Option<&Path>) -> Option<PathBuf> {
    std::env::var_os(CACHE_ENV)
        .filter(|v| !v.is_empty())
        .map(PathBuf::from)
        .or_else(|| flag.map(Path::to_path_buf))
}

pub fn run(cli: &Cli, out: &mut dyn Write) -> CliResult {
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(CliError::Usage("--threads must be at least 1".into()));
        }
        // ignore the error if a pool already exists (repeated in-process runs)
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    let cache = cache_path(cli.cache.as_deref());
    match &cli.command {
        Command::Table(a) => cmd_table(a, cli.format, cache.as_deref(), out),
        Command::Verify(a) => cmd_verify(a, cli.format, out),
        Command::Scan(a) => cmd_scan(a, cli.format, out),
        Command::Reproduce(a) => cmd_reproduce(a, cli.format, out),
        Command::Bench(a) => cmd_bench(a, cli.format, out),
    }
}

fn family_label(kind: TriangleKind) -> &'static str {
    match kind {
        TriangleKind::I => "I",
        TriangleKind::J => "J",
        TriangleKind::A => "a",
        TriangleKind::B => "b",
    }
}

/// Rows from the cache file that survive revalidation.
fn load_cache(path: &Path) -> CliResult<[TriangleCache; 4]> {
    let mut stored: BTreeMap<TriangleKind, BTreeMap<usize, BTreeMap<usize, BigCoeff>>> = BTreeMap::new();
    if let Ok(text) = fs::read_to_string(path) {
        for line in text.lines().filter(|l| !l.trim().is_empty()) {
            // an unreadable line only costs a recomputation
            let Ok(rec) = serde_json::from_str::<OutputRecord>(line) else { continue };
            let (Ok(FamilyArg(kind)), Ok(v)) = (rec.family.parse::<FamilyArg>(), rec.parse_value()) else {
                continue;
            };
            stored.entry(kind).or_default().entry(rec.n).or_default().insert(rec.k, v);
        }
    }
    Ok(TriangleKind::ALL.map(|kind| {
        let rows = stored
            .remove(&kind)
            .unwrap_or_default()
            .into_iter()
            .map(|(n, r)| (n, r.into_values().collect()))
            .collect();
        TriangleCache::from_stored_rows(kind, rows).0
    }))
}

fn save_cache(path: &Path, caches: &[TriangleCache]) -> CliResult<()> {
    let mut buf = String::new();
    for c in caches {
        let first_k = c.kind().first_k();
        for (n, row) in c.rows() {
            for (i, v) in row.iter().enumerate() {
                buf.push_str(&serde_json::to_string(&OutputRecord::new(family_label(c.kind()), n, i + first_k, v))?);
                buf.push('\n');
            }
        }
    }
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, buf)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

fn table_rows(a: &TableArgs, caches: &mut [TriangleCache; 4]) -> CliResult<Vec<(usize, Vec<OutputRecord>)>> {
    let kind = a.family.0;
    let (lo, hi) = match (a.n, a.from, a.to) {
        (Some(n), _, _) => (n, n),
        (None, from, Some(to)) => (from.unwrap_or(1), to),
        (None, Some(from), None) => (from, from),
        (None, None, None) => return Err(CliError::Usage("give --n or --to".into())),
    };
    if lo == 0 || lo > hi {
        return Err(CliError::Usage(format!("empty or invalid range [{lo}, {hi}]")));
    }
    if kind == TriangleKind::B && lo == hi && lo % 2 == 1 {
        return Err(CliError::Usage(format!("b is defined for even n only, got {lo}")));
    }
    let label = family_label(kind);
    let cache = caches.iter_mut().find(|c| c.kind() == kind).expect("every kind cached");
    let mut rows = Vec::new();
    for n in lo..=hi {
        let values: Vec<BigCoeff> = match kind {
            TriangleKind::J if n % 2 == 1 => DescentRow::zero_fixed_point_free(n).into_coeffs(),
            TriangleKind::B if n % 2 == 1 => continue,
            _ => cache.row(n)?.to_vec(),
        };
        let first_k = kind.first_k();
        let recs = values.iter().enumerate().map(|(i, v)| OutputRecord::new(label, n, i + first_k, v)).collect();
        rows.push((n, recs));
    }
    Ok(rows)
}

fn cmd_table(a: &TableArgs, format: Format, cache: Option<&Path>, out: &mut dyn Write) -> CliResult {
    let mut caches = match cache {
        Some(p) => load_cache(p)?,
        None => TriangleKind::ALL.map(TriangleCache::new),
    };
    let rows = table_rows(a, &mut caches)?;
    if let Some(p) = cache {
        save_cache(p, &caches)?;
    }
    match format {
        Format::Csv => {
            writeln!(out, "{CSV_HEADER}")?;
            for rec in rows.iter().flat_map(|(_, r)| r) {
                writeln!(out, "{}", rec.csv_line())?;
            }
        }
        Format::Json => {
            for rec in rows.iter().flat_map(|(_, r)| r) {
                writeln!(out, "{}", serde_json::to_string(rec)?)?;
            }
        }
        Format::Text => {
            let width = rows.iter().flat_map(|(_, r)| r).map(|r| r.value.len()).max().unwrap_or(1);
            let label_width = rows.iter().map(|(n, _)| n.to_string().len()).max().unwrap_or(1);
            let first_k = a.family.0.first_k();
            let max_len = rows.iter().map(|(_, r)| r.len()).max().unwrap_or(0);
            let header: Vec<String> = (first_k..first_k + max_len).map(|k| format!("{k:>width$}")).collect();
            writeln!(out, "{:>w$}  {}", "n\\k", header.join(" "), w = label_width + 2)?;
            for (n, recs) in &rows {
                let vals: Vec<String> = recs.iter().map(|r| format!("{:>width$}", r.value)).collect();
                let name = format!("{}_{n}", family_label(a.family.0));
                writeln!(out, "{name:>w$}  {}", vals.join(" "), w = label_width + 2)?;
            }
        }
    }
    Ok(Status::Ok)
}

/// Table 1 recomputed by enumeration alone.
fn table1_by_enumeration(oracle_max: usize) -> CliResult<VerificationReport> {
    let top = oracle_max.min(6);
    let mut report = VerificationReport::new("table 1", &["embedded table", "enumeration"], (1, top as i64));
    let golden = Golden::embedded()?;
    let oracle = Oracle { parallel: true, ..Oracle::default() };
    for n in 1..=top {
        for (kind, family) in [(TriangleKind::I, Family::Involution), (TriangleKind::J, Family::FixedPointFree)] {
            let mut want: Vec<(usize, BigCoeff)> =
                golden.table(1).filter(|c| c.kind == kind && c.n == n).map(|c| (c.k, c.value.clone())).collect();
            want.sort();
            let want: Vec<BigCoeff> = want.into_iter().map(|(_, v)| v).collect();
            let got = oracle.row(n, family)?.into_coeffs();
            report.comparisons += 1;
            if want != got {
                report.fail(Mismatch {
                    n: n as i64,
                    k: None,
                    detail: format!("{} row", kind.symbol()),
                    values: vec![
                        ("table".into(), inveul_core::report::fmt_values(&want)),
                        ("enumeration".into(), inveul_core::report::fmt_values(&got)),
                    ],
                });
            }
        }
    }
    Ok(report)
}

fn auxiliary_checks() -> VerificationReport {
    let mut report = VerificationReport::new(
        "auxiliary recurrence and degree in n",
        &["closed sum", "three-term recurrence"],
        (-10, 10),
    );
    for x in -10..=10 {
        for y in -10..=10 {
            let r = verify_s_recurrence(SnParams { x, y }, 40);
            report.comparisons += r.comparisons;
            if let Some(m) = r.first_mismatch {
                report.fail(m);
            }
        }
    }
    for k in 1..=6 {
        let r = verify_j_degree(k, 3);
        report.comparisons += r.comparisons;
        if let Some(m) = r.first_mismatch {
            report.fail(m);
        }
    }
    report
}

fn cmd_verify(a: &VerifyArgs, format: Format, out: &mut dyn Write) -> CliResult {
    let mut cv = CrossVerify::new(a.recurrence_max, a.oracle_max);
    cv.parallel = true;
    if a.inject_fault {
        let base = BTreeMap::from([(2, vec![BigInt::from(0), BigInt::from(2)])]);
        cv.j_cache = TriangleCache::with_base(TriangleKind::J, base)?;
    }
    let mut reports = vec![table1_by_enumeration(a.oracle_max)?, cv.run()];
    reports.push(verify_gamma(a.gamma_max)?);
    reports.extend(verify_invariants(a.invariant_max)?);
    reports.push(auxiliary_checks());

    let ok = reports.iter().all(VerificationReport::holds);
    match format {
        Format::Json => {
            for r in &reports {
                writeln!(out, "{}", serde_json::to_string(r)?)?;
            }
        }
        Format::Text | Format::Csv => {
            for r in &reports {
                writeln!(out, "{}", r.summary())?;
            }
            writeln!(out, "{}", if ok { "verify: all checks hold" } else { "verify: FAILED" })?;
        }
    }
    Ok(if ok { Status::Ok } else { Status::VerificationFailed })
}

fn cmd_scan(a: &ScanArgs, format: Format, out: &mut dyn Write) -> CliResult {
    let lo = a.from.unwrap_or_else(|| a.property.first_index());
    let opts = ScanOptions { b_threshold_half: a.threshold };
    let r = scan_with(a.property, lo, a.to, &opts)?;
    match format {
        Format::Json => writeln!(out, "{}", serde_json::to_string(&r)?)?,
        Format::Csv => {
            writeln!(out, "{CSV_HEADER}")?;
            for w in &r.witnesses {
                writeln!(out, "{}", OutputRecord::new(a.property.name(), w.n, w.k, &w.value).csv_line())?;
            }
        }
        Format::Text => {
            let status = match r.status {
                ScanStatus::AllHold => "all hold".to_string(),
                ScanStatus::Counterexamples => format!("{} witnesses", r.witnesses.len()),
            };
            writeln!(out, "{} on [{}, {}], {} indices: {status}", r.property, r.range.0, r.range.1, r.indices_checked)?;
            for w in &r.witnesses {
                let note = if w.pre_threshold { "  (below threshold)" } else { "" };
                writeln!(out, "  n={} k={} value={}{note}", w.n, w.k, w.value)?;
            }
            for m in &r.identity_mismatches {
                writeln!(
                    out,
                    "  IDENTITY MISMATCH n={}: recurrence {} vs alternating sum {}",
                    m.n, m.recurrence, m.alternating_sum
                )?;
            }
        }
    }
    Ok(if !r.identity_mismatches.is_empty() {
        Status::VerificationFailed
    } else if r.status == ScanStatus::Counterexamples {
        Status::Counterexample
    } else {
        Status::Ok
    })
}

fn cmd_reproduce(a: &ReproduceArgs, format: Format, out: &mut dyn Write) -> CliResult {
    let golden = match &a.data {
        None => Golden::embedded()?,
        Some(dir) => {
            let read = |name: &str| fs::read_to_string(dir.join(name));
            Golden::parse(&read("table1.txt")?, &read("table2.txt")?, &read("table3.txt")?)?
        }
    };
    let report = reproduce(&golden)?;
    match format {
        Format::Json => writeln!(out, "{}", serde_json::to_string(&report)?)?,
        Format::Text | Format::Csv => {
            for d in &report.diffs {
                let show = |v: &Option<String>| v.clone().unwrap_or_else(|| "-".into());
                writeln!(
                    out,
                    "table {} {} n={} k={}: embedded {} computed {}",
                    d.table,
                    d.family,
                    d.n,
                    d.k,
                    show(&d.embedded),
                    show(&d.computed)
                )?;
            }
            let verdict = if report.identical() { "identical".to_string() } else { format!("{} differences", report.diffs.len()) };
            writeln!(out, "reproduce: {} cells, {verdict}", report.cells_checked)?;
        }
    }
    if a.emit == Some(Emit::Latex) {
        writeln!(out, "{}", render_latex(&computed_cells()?))?;
    }
    Ok(if report.identical() { Status::Ok } else { Status::VerificationFailed })
}

#[derive(Serialize)]
struct Timing {
    task: String,
    n: usize,
    millis: f64,
}

fn timed<T>(task: String, n: usize, f: impl FnOnce() -> Result<T, Error>) -> CliResult<Timing> {
    let start = Instant::now();
    f()?;
    Ok(Timing { task, n, millis: start.elapsed().as_secs_f64() * 1e3 })
}

fn cmd_bench(a: &BenchArgs, format: Format, out: &mut dyn Write) -> CliResult {
    if a.n < 2 {
        return Err(CliError::Usage("--n must be at least 2".into()));
    }
    let mut timings = Vec::new();
    for kind in TriangleKind::ALL {
        timings.push(timed(format!("recurrence {}", kind.symbol()), a.n, || {
            TriangleCache::new(kind).extend_to(a.n)
        })?);
    }
    let even = a.n - a.n % 2;
    timings.push(timed("closed form I row".into(), a.n, || i_closed_row(a.n))?);
    timings.push(timed("closed form J row".into(), even, || j_closed_row(even))?);
    let limit = Oracle { max_involution: a.oracle_n, max_fixed_point_free: a.oracle_n, parallel: false };
    for parallel in [false, true] {
        let o = Oracle { parallel, ..limit };
        let how = if parallel { "parallel" } else { "sequential" };
        timings.push(timed(format!("enumeration I {how}"), a.oracle_n, || o.row(a.oracle_n, Family::Involution))?);
    }
    match format {
        Format::Json => {
            for t in &timings {
                writeln!(out, "{}", serde_json::to_string(t)?)?;
            }
        }
        Format::Csv => {
            writeln!(out, "task,n,millis")?;
            for t in &timings {
                writeln!(out, "{},{},{:.3}", t.task, t.n, t.millis)?;
            }
        }
        Format::Text => {
            let w = timings.iter().map(|t| t.task.len()).max().unwrap_or(0);
            for t in &timings {
                writeln!(out, "{:<w$}  n={:<4} {:>10.3} ms", t.task, t.n, t.millis)?;
            }
        }
    }
    Ok(Status::Ok)
}
