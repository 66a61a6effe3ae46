//! Run configuration, artifact rendering and atomic output for the `qcorr` CLI.
//!
//! CSV numbers are written with 17 significant digits in `{:.16e}` form so
//! every `f64` round-trips and artifacts diff byte-exactly. JSON artifacts
//! wrap the same data in a metadata envelope.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write as _};
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::error::Error;
use crate::measures::{bounds_check, BoundsReport, Measure};
use crate::ordering::{
    axiom_audit, counterexample_verify, find_ordering_violations, scan_classical, scan_werner,
    FixedProb, ScanRow, DEFAULT_TOL,
};
use crate::states::{classical_state, random_density, werner, ClassicalProbs, WernerParam};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub const CLASSICAL_COLUMNS: [&str; 8] = ["p00", "p01", "p10", "p11", "c1", "c2", "c3", "c3_prime"];
pub const WERNER_COLUMNS: [&str; 6] = ["F", "c1", "c2", "c3", "c3_prime", "ppt_min"];
pub const BOUNDS_COLUMNS: [&str; 6] = ["label", "c1", "c2", "lower", "upper_loose", "upper_tight"];
pub const COUNTEREXAMPLE_COLUMNS: [&str; 8] =
    ["a", "b", "p_star", "c1_0", "c1_pstar", "c2_0", "c2_pstar", "verdict"];
pub const AXIOM_COLUMNS: [&str; 5] = ["axiom", "measure", "trials", "passed", "worst"];
pub const VIOLATION_COLUMNS: [&str; 8] =
    ["state_a", "state_b", "measure_x", "measure_y", "x_a", "x_b", "y_a", "y_b"];

/// Slack allowed on either side of the Pinsker/Fannes sandwich.
pub const BOUNDS_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    ScanClassical,
    ScanWerner,
    Counterexample,
    Bounds,
    Axioms,
    Violations,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::ScanClassical => "scan-classical",
            Command::ScanWerner => "scan-werner",
            Command::Counterexample => "counterexample",
            Command::Bounds => "bounds",
            Command::Axioms => "axioms",
            Command::Violations => "violations",
        }
    }

    fn default_grid_n(self) -> usize {
        match self {
            Command::ScanWerner => 100,
            _ => 50,
        }
    }

    fn default_pool_size(self) -> usize {
        match self {
            Command::Bounds => 1000,
            _ => 200,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// Validated parameters for one CLI invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub fix: Option<(FixedProb, f64)>,
    pub grid_n: usize,
    pub seed: u64,
    pub pool_size: usize,
    pub tol: f64,
    pub measures: (Measure, Measure),
    pub format: Format,
    pub output_path: PathBuf,
}

/// Raw, optional flag values before per-command validation.
#[derive(Debug, Clone, Default)]
pub struct RawArgs {
    pub fix: Option<String>,
    pub grid_n: Option<usize>,
    pub seed: Option<u64>,
    pub pool_size: Option<usize>,
    pub tol: Option<f64>,
    pub measures: Option<String>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error("invalid arguments: {0}")]
    InvalidArgs(String),
    #[error("i/o failure on {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("verification failed: {0}")]
    Verification(String),
}

impl RunError {
    /// 2 for bad arguments, 3 for I/O, 4 for a failed scientific check.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::InvalidArgs(_) => 2,
            RunError::Io { .. } => 3,
            RunError::Verification(_) => 4,
        }
    }
}

impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        match e {
            Error::BisectionFailure(_) => RunError::Verification(e.to_string()),
            other => RunError::InvalidArgs(other.to_string()),
        }
    }
}

fn parse_fix(s: &str) -> Result<(FixedProb, f64), RunError> {
    let (name, value) = s
        .split_once('=')
        .ok_or_else(|| RunError::InvalidArgs(format!("--fix expects name=value, got '{s}'")))?;
    let which: FixedProb = name.trim().parse().map_err(RunError::InvalidArgs)?;
    let v: f64 = value
        .trim()
        .parse()
        .map_err(|_| RunError::InvalidArgs(format!("bad number in --fix: '{value}'")))?;
    if !(0.0..=1.0).contains(&v) {
        return Err(RunError::InvalidArgs(format!("--fix value {v} outside [0, 1]")));
    }
    Ok((which, v))
}

fn parse_measures(s: &str) -> Result<(Measure, Measure), RunError> {
    let (x, y) = s
        .split_once(',')
        .ok_or_else(|| RunError::InvalidArgs(format!("--measures expects x,y, got '{s}'")))?;
    Ok((
        x.trim().parse().map_err(RunError::InvalidArgs)?,
        y.trim().parse().map_err(RunError::InvalidArgs)?,
    ))
}

impl RunConfig {
    /// Applies defaults and rejects flags the command does not use.
    pub fn from_raw(command: Command, raw: RawArgs) -> Result<Self, RunError> {
        let allowed: &[&str] = match command {
            Command::ScanClassical => &["fix", "grid-n"],
            Command::ScanWerner => &["grid-n"],
            Command::Counterexample => &["tol"],
            Command::Bounds => &["seed", "pool-size", "grid-n"],
            Command::Axioms => &["seed", "pool-size"],
            Command::Violations => &["seed", "pool-size", "measures"],
        };
        let given = [
            ("fix", raw.fix.is_some()),
            ("grid-n", raw.grid_n.is_some()),
            ("seed", raw.seed.is_some()),
            ("pool-size", raw.pool_size.is_some()),
            ("tol", raw.tol.is_some()),
            ("measures", raw.measures.is_some()),
        ];
        if let Some((flag, _)) = given.iter().find(|(f, g)| *g && !allowed.contains(f)) {
            return Err(RunError::InvalidArgs(format!(
                "--{flag} does not apply to {}",
                command.name()
            )));
        }

        let fix = match (command, &raw.fix) {
            (Command::ScanClassical, None) => {
                return Err(RunError::InvalidArgs(
                    "scan-classical requires --fix p10=<v> or --fix p11=<v>".into(),
                ))
            }
            (_, Some(s)) => Some(parse_fix(s)?),
            (_, None) => None,
        };
        let grid_n = raw.grid_n.unwrap_or(command.default_grid_n());
        if grid_n < 2 {
            return Err(RunError::InvalidArgs(format!("--grid-n must be >= 2, got {grid_n}")));
        }
        let pool_size = raw.pool_size.unwrap_or(command.default_pool_size());
        let min_pool = if command == Command::Violations { 2 } else { 1 };
        if pool_size < min_pool {
            return Err(RunError::InvalidArgs(format!(
                "--pool-size must be >= {min_pool}, got {pool_size}"
            )));
        }
        let tol = raw.tol.unwrap_or(DEFAULT_TOL);
        if !(tol > 0.0 && tol <= 1e-6) {
            return Err(RunError::InvalidArgs(format!("--tol must be in (0, 1e-6], got {tol}")));
        }
        let measures = match &raw.measures {
            Some(s) => parse_measures(s)?,
            None => (Measure::C1, Measure::C2),
        };
        let format = raw.format.unwrap_or_default();
        let output_path = raw
            .out
            .unwrap_or_else(|| PathBuf::from(format!("{}.{}", command.name(), format.extension())));
        Ok(Self {
            command,
            fix,
            grid_n,
            seed: raw.seed.unwrap_or(0),
            pool_size,
            tol,
            measures,
            format,
            output_path,
        })
    }

    fn parameters_json(&self) -> Value {
        let mut m = Map::new();
        if let Some((which, v)) = self.fix {
            m.insert("fix".into(), json!({ which.name(): v }));
        }
        match self.command {
            Command::ScanClassical | Command::ScanWerner => {
                m.insert("grid_n".into(), json!(self.grid_n));
            }
            Command::Counterexample => {
                m.insert("tol".into(), json!(self.tol));
            }
            Command::Bounds => {
                m.insert("pool_size".into(), json!(self.pool_size));
                m.insert("grid_n".into(), json!(self.grid_n));
            }
            Command::Axioms => {
                m.insert("pool_size".into(), json!(self.pool_size));
            }
            Command::Violations => {
                m.insert("pool_size".into(), json!(self.pool_size));
                m.insert(
                    "measures".into(),
                    json!([self.measures.0.name(), self.measures.1.name()]),
                );
            }
        }
        Value::Object(m)
    }
}

/// What a successful run produced.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub command: Command,
    pub rows: usize,
    pub verdict: Option<bool>,
    pub path: PathBuf,
}

impl RunSummary {
    pub fn line(&self) -> String {
        let mut s = format!(
            "{}: {} rows written to {}",
            self.command.name(),
            self.rows,
            self.path.display()
        );
        if let Some(v) = self.verdict {
            let _ = write!(s, "; verdict {v}");
        }
        s
    }
}

/// Formats with 17 significant digits, locale independent.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

/// Tabular artifact: header, rows of pre-rendered cells, and a JSON mirror.
struct Table {
    columns: Vec<&'static str>,
    rows: Vec<Vec<Cell>>,
}

enum Cell {
    Num(f64),
    OptNum(Option<f64>),
    Int(usize),
    Text(String),
    Bool(bool),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(x) => fmt_f64(*x),
            Cell::OptNum(x) => x.map(fmt_f64).unwrap_or_default(),
            Cell::Int(n) => n.to_string(),
            Cell::Text(s) => csv_escape(s),
            Cell::Bool(b) => b.to_string(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(x) => json!(x),
            Cell::OptNum(x) => json!(x),
            Cell::Int(n) => json!(n),
            Cell::Text(s) => json!(s),
            Cell::Bool(b) => json!(b),
        }
    }
}

fn csv_escape(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

impl Table {
    fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    fn to_json_rows(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|row| {
                    Value::Object(
                        self.columns
                            .iter()
                            .zip(row)
                            .map(|(c, v)| (c.to_string(), v.json()))
                            .collect(),
                    )
                })
                .collect(),
        )
    }
}

fn scan_table(rows: &[ScanRow], columns: &[&'static str]) -> Table {
    let rows = rows
        .iter()
        .map(|r| {
            columns
                .iter()
                .map(|&c| match c {
                    "c1" => Cell::Num(r.c1),
                    "c2" => Cell::Num(r.c2),
                    "c3" => Cell::Num(r.c3),
                    "c3_prime" => Cell::Num(r.c3_prime),
                    "ppt_min" => Cell::OptNum(r.ppt_min),
                    name => Cell::Num(r.param(name).unwrap_or(f64::NAN)),
                })
                .collect()
        })
        .collect();
    Table {
        columns: columns.to_vec(),
        rows,
    }
}

fn bounds_row(label: String, b: &BoundsReport) -> Vec<Cell> {
    vec![
        Cell::Text(label),
        Cell::Num(b.c1),
        Cell::Num(b.c2),
        Cell::Num(b.lower),
        Cell::Num(b.upper_loose),
        Cell::OptNum(b.upper_tight),
    ]
}

/// States audited by the `bounds` command: the crossing-family endpoints,
/// a Werner grid of `grid_n + 1` points and `pool_size` seeded random states.
pub fn bounds_pool(config: &RunConfig) -> Result<Vec<(String, BoundsReport)>, RunError> {
    let mut out = Vec::new();
    for p00 in [0.0, 0.125, 0.25, 0.5] {
        let rho = classical_state(&ClassicalProbs::crossing_family(p00)?)?;
        out.push((format!("family(p00={p00})"), bounds_check(&rho)?));
    }
    for k in 0..=config.grid_n {
        let f = k as f64 / config.grid_n as f64;
        let rho = werner(WernerParam::new(f)?)?;
        out.push((format!("werner(F={f})"), bounds_check(&rho)?));
    }
    for k in 0..config.pool_size as u64 {
        let s = config.seed.wrapping_add(k);
        out.push((format!("random(seed={s})"), bounds_check(&random_density(4, s)?)?));
    }
    Ok(out)
}

struct Rendered {
    body: String,
    rows: usize,
    verdict: Option<bool>,
    failure: Option<String>,
}

fn envelope(config: &RunConfig, data: Value) -> String {
    let doc = json!({
        "command": config.command.name(),
        "version": VERSION,
        "seed": config.seed,
        "parameters": config.parameters_json(),
        "data": data,
    });
    let mut s = serde_json::to_string_pretty(&doc).expect("serializable");
    s.push('\n');
    s
}

fn render_table(config: &RunConfig, table: Table) -> String {
    match config.format {
        Format::Csv => table.to_csv(),
        Format::Json => envelope(config, table.to_json_rows()),
    }
}

fn render(config: &RunConfig) -> Result<Rendered, RunError> {
    let mut verdict = None;
    let mut failure = None;
    let (body, rows) = match config.command {
        Command::ScanClassical => {
            let (which, value) = config.fix.expect("validated");
            let rows = scan_classical(which, value, config.grid_n)?;
            (render_table(config, scan_table(&rows, &CLASSICAL_COLUMNS)), rows.len())
        }
        Command::ScanWerner => {
            let rows = scan_werner(config.grid_n)?;
            (render_table(config, scan_table(&rows, &WERNER_COLUMNS)), rows.len())
        }
        Command::Counterexample => {
            let report = counterexample_verify(config.tol)?;
            verdict = Some(report.verdict);
            if !report.all_checks_pass(config.tol) {
                failure = Some(format!("counterexample checks failed: {report:?}"));
            }
            let body = match config.format {
                Format::Csv => {
                    let table = Table {
                        columns: COUNTEREXAMPLE_COLUMNS.to_vec(),
                        rows: vec![vec![
                            Cell::Num(report.a),
                            Cell::Num(report.b),
                            Cell::Num(report.p_star),
                            Cell::Num(report.c1_at_zero),
                            Cell::Num(report.c1_at_pstar),
                            Cell::Num(report.c2_at_zero),
                            Cell::Num(report.c2_at_pstar),
                            Cell::Bool(report.verdict),
                        ]],
                    };
                    table.to_csv()
                }
                Format::Json => envelope(config, to_value(&report)),
            };
            (body, 1)
        }
        Command::Bounds => {
            let pool = bounds_pool(config)?;
            let bad: Vec<&str> = pool
                .iter()
                .filter(|(_, b)| !b.holds(BOUNDS_SLACK))
                .map(|(l, _)| l.as_str())
                .collect();
            if !bad.is_empty() {
                failure = Some(format!("bounds violated for {}", bad.join(", ")));
            }
            let table = Table {
                columns: BOUNDS_COLUMNS.to_vec(),
                rows: pool.iter().map(|(l, b)| bounds_row(l.clone(), b)).collect(),
            };
            (render_table(config, table), pool.len())
        }
        Command::Axioms => {
            let audit = axiom_audit(config.pool_size, config.seed)?;
            verdict = Some(audit.all_pass());
            if !audit.all_pass() {
                failure = Some("axiom audit failed".into());
            }
            let table = Table {
                columns: AXIOM_COLUMNS.to_vec(),
                rows: audit
                    .checks
                    .iter()
                    .map(|c| {
                        vec![
                            Cell::Text(to_value(&c.axiom).as_str().unwrap_or_default().into()),
                            Cell::Text(c.measure.name().into()),
                            Cell::Int(c.trials),
                            Cell::Int(c.passed),
                            Cell::Num(c.worst),
                        ]
                    })
                    .collect(),
            };
            (render_table(config, table), audit.checks.len())
        }
        Command::Violations => {
            let found = find_ordering_violations(config.pool_size, config.seed, config.measures)?;
            let table = Table {
                columns: VIOLATION_COLUMNS.to_vec(),
                rows: found
                    .iter()
                    .map(|v| {
                        let mut row = vec![
                            Cell::Text(v.state_a.clone()),
                            Cell::Text(v.state_b.clone()),
                            Cell::Text(v.measure_x.name().into()),
                            Cell::Text(v.measure_y.name().into()),
                        ];
                        row.extend(v.values.iter().map(|&x| Cell::Num(x)));
                        row
                    })
                    .collect(),
            };
            (render_table(config, table), found.len())
        }
    };
    Ok(Rendered {
        body,
        rows,
        verdict,
        failure,
    })
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

/// Writes `contents` to a sibling temp file and renames it over `path`.
pub fn write_atomic(path: &Path, contents: &str) -> io::Result<()> {
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or_else(|| Path::new("."));
    let name = path
        .file_name()
        .ok_or_else(|| io::Error::new(io::ErrorKind::InvalidInput, "output path has no file name"))?;
    let tmp = dir.join(format!(".{}.tmp-{}", name.to_string_lossy(), std::process::id()));
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents.as_bytes())?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result
}

/// Executes one command and writes its artifact.
///
/// The artifact is written even when a verification fails so the failing
/// numbers can be inspected; the error is reported afterwards.
pub fn run(config: &RunConfig) -> Result<RunSummary, RunError> {
    let rendered = render(config)?;
    write_atomic(&config.output_path, &rendered.body).map_err(|source| RunError::Io {
        path: config.output_path.clone(),
        source,
    })?;
    if let Some(msg) = rendered.failure {
        return Err(RunError::Verification(msg));
    }
    Ok(RunSummary {
        command: config.command,
        rows: rendered.rows,
        verdict: rendered.verdict,
        path: config.output_path.clone(),
    })
}
