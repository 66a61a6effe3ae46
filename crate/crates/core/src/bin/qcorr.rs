use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use qcorr::report::{run, Command, Format, RawArgs, RunConfig};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CommandArg {
    ScanClassical,
    ScanWerner,
    Counterexample,
    Bounds,
    Axioms,
    Violations,
}

impl From<CommandArg> for Command {
    fn from(c: CommandArg) -> Self {
        match c {
            CommandArg::ScanClassical => Command::ScanClassical,
            CommandArg::ScanWerner => Command::ScanWerner,
            CommandArg::Counterexample => Command::Counterexample,
            CommandArg::Bounds => Command::Bounds,
            CommandArg::Axioms => Command::Axioms,
            CommandArg::Violations => Command::Violations,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

/// Correlation measures for two-qubit states: scans, the ordering
/// counterexample, inequality and axiom audits.
#[derive(Debug, Parser)]
#[command(name = "qcorr", version)]
struct Cli {
    command: CommandArg,

    /// Hold one probability fixed, e.g. `p10=0.1` (scan-classical).
    #[arg(long, value_name = "NAME=VALUE")]
    fix: Option<String>,

    /// Grid resolution (scans, bounds Werner grid).
    #[arg(long = "grid-n", value_name = "N")]
    grid_n: Option<usize>,

    #[arg(long, value_name = "S")]
    seed: Option<u64>,

    /// Number of seeded random states or trials.
    #[arg(long = "pool-size", value_name = "N")]
    pool_size: Option<usize>,

    /// Bisection width for the counterexample, in (0, 1e-6].
    #[arg(long, value_name = "T")]
    tol: Option<f64>,

    /// Measure pair for `violations`, e.g. `c1,c2`.
    #[arg(long, value_name = "X,Y")]
    measures: Option<String>,

    #[arg(long, value_enum)]
    format: Option<FormatArg>,

    /// Output file; defaults to `<command>.<format>` in the working directory.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let raw = RawArgs {
        fix: cli.fix,
        grid_n: cli.grid_n,
        seed: cli.seed,
        pool_size: cli.pool_size,
        tol: cli.tol,
        measures: cli.measures,
        format: cli.format.map(|f| match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }),
        out: cli.out,
    };
    let result = RunConfig::from_raw(cli.command.into(), raw).and_then(|cfg| run(&cfg));
    match result {
        Ok(summary) => {
            println!("{}", summary.line());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("qcorr: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
