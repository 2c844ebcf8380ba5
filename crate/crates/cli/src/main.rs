//! `oscper`: oscillation periods, light deflection and perihelion
//! precession from the command line. Every command prints a CSV (or JSON)
//! table.

mod commands;
mod spec;
mod table;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{
    AnharmonicArgs, CliError, Context, ConvergeArgs, DeflectArgs, PendulumArgs, PeriodArgs,
    PrecessArgs, SweepArgs, ARCSEC_PER_RAD,
};
use table::{Format, Table};

/// Environment variable overriding the quadrature tolerance.
const TOL_ENV: &str = "OSC_QUAD_TOL";

#[derive(Parser, Debug)]
#[command(
    name = "oscper",
    version,
    about = "Oscillation periods and Schwarzschild observables via the delta expansion"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Write the table to a file instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Report angles in arcseconds instead of radians
    #[arg(long, global = true)]
    arcsec: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Period of a potential from the delta series, with the exact value
    Period(PeriodArgs),
    /// Partial sums against order for several multiples of the PMS lambda
    Converge(ConvergeArgs),
    /// Pendulum PMS period against the elliptic-integral period
    Pendulum(PendulumArgs),
    /// x^2/2 + rho x^{2N}/(2N) oscillator, PMS period against quadrature
    Anharmonic(AnharmonicArgs),
    /// Light deflection: exact, PMS and weak-field
    Deflect(DeflectArgs),
    /// Perihelion precession per orbit: exact, PMS and leading order
    Precess(PrecessArgs),
    /// Repeat a command over a grid of one parameter
    Sweep {
        #[command(subcommand)]
        kind: SweepKind,
    },
}

#[derive(Subcommand, Debug)]
enum SweepKind {
    /// --var amplitude | energy
    Period {
        #[command(flatten)]
        args: PeriodArgs,
        #[command(flatten)]
        sweep: SweepArgs,
    },
    /// --var theta
    Pendulum {
        #[command(flatten)]
        args: PendulumArgs,
        #[command(flatten)]
        sweep: SweepArgs,
    },
    /// --var rho | amplitude
    Anharmonic {
        #[command(flatten)]
        args: AnharmonicArgs,
        #[command(flatten)]
        sweep: SweepArgs,
    },
    /// --var r0 | r0-over-rsun | gm
    Deflect {
        #[command(flatten)]
        args: DeflectArgs,
        #[command(flatten)]
        sweep: SweepArgs,
    },
    /// --var a | a-over-a0 | l-over-gm | ecc | gm
    Precess {
        #[command(flatten)]
        args: PrecessArgs,
        #[command(flatten)]
        sweep: SweepArgs,
    },
}

fn tolerance() -> Result<f64, CliError> {
    match std::env::var(TOL_ENV) {
        Err(_) => Ok(oscper::DEFAULT_QUAD_TOL),
        Ok(v) => v
            .trim()
            .parse::<f64>()
            .ok()
            .filter(|t| *t > 0.0 && t.is_finite())
            .ok_or_else(|| CliError::Usage(format!("{TOL_ENV}={v} is not a positive number"))),
    }
}

fn run(cli: &Cli) -> Result<Table, CliError> {
    let ctx = Context {
        tol: tolerance()?,
        angle: if cli.arcsec { ARCSEC_PER_RAD } else { 1.0 },
    };
    match &cli.command {
        Command::Period(a) => commands::period(a, ctx),
        Command::Converge(a) => commands::converge(a, ctx),
        Command::Pendulum(a) => commands::pendulum(a, ctx),
        Command::Anharmonic(a) => commands::anharmonic(a, ctx),
        Command::Deflect(a) => commands::deflect(a, ctx),
        Command::Precess(a) => commands::precess(a, ctx),
        Command::Sweep { kind } => match kind {
            SweepKind::Period { args, sweep } => commands::sweep_period(args, sweep, ctx),
            SweepKind::Pendulum { args, sweep } => commands::sweep_pendulum(args, sweep, ctx),
            SweepKind::Anharmonic { args, sweep } => commands::sweep_anharmonic(args, sweep, ctx),
            SweepKind::Deflect { args, sweep } => commands::sweep_deflect(args, sweep, ctx),
            SweepKind::Precess { args, sweep } => commands::sweep_precess(args, sweep, ctx),
        },
    }
}

fn emit(table: &Table, cli: &Cli) -> io::Result<()> {
    match &cli.out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            table.write(cli.format, &mut w)?;
            w.flush()
        }
        None => table.write(cli.format, io::stdout().lock()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli).and_then(|t| emit(&t, &cli).map_err(CliError::from));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("oscper: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
