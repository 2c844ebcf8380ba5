use clap::Args;
use rayon::prelude::*;

use oscper::closed_forms::{anharmonic_t_pms, pendulum_t_pms};
use oscper::delta::sum_series;
use oscper::gr::{
    deflection_asymptotic, deflection_exact, deflection_pms, lambda_pms_precession,
    precession_delta, precession_exact, precession_leading, precession_pms,
};
use oscper::pms::{
    closed_form_s, default_bracket, lambda_pms_anharmonic, lambda_pms_pendulum, optimize_series,
};
use oscper::quadrature::{exact_pendulum_period, exact_period_at};
use oscper::{
    InterpolationFamily64, LightPath64, Orbit64, PmsResult64, Potential64, TurningPoints64,
};

use crate::spec::{Grid, LambdaMode, Orders};
use crate::table::Table;

/// Solar `GM` in meters.
pub const GM_SUN: f64 = 14.627_25;
pub const R_SUN: f64 = 6.95e8;
/// Semimajor axis of Mercury's orbit, meters.
pub const A_MERCURY: f64 = 5.971e10;
pub const ECC_MERCURY: f64 = 0.2506;
pub const ARCSEC_PER_RAD: f64 = 206_264.806;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Domain(#[from] oscper::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Domain(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn usage<T>(msg: impl Into<String>) -> Result<T> {
    Err(CliError::Usage(msg.into()))
}

/// Evaluation settings shared by every command.
#[derive(Debug, Clone, Copy)]
pub struct Context {
    pub tol: f64,
    /// Multiplier applied to angle outputs (1 for radians).
    pub angle: f64,
}

#[derive(Args, Debug, Clone)]
pub struct PeriodArgs {
    /// Potential spec: `harmonic[:k=..]`, `duffing:mu=..`, `anharmonic:rho=..,n=..` or `pendulum`
    #[arg(long)]
    pub potential: Potential64,
    /// Amplitude of a symmetric oscillation
    #[arg(long, conflicts_with = "energy")]
    pub amplitude: Option<f64>,
    /// Energy; turning points are solved for
    #[arg(long)]
    pub energy: Option<f64>,
    #[arg(long, default_value_t = 1)]
    pub order: usize,
    /// auto-pms, fixed:<lambda> (suffix `i` for imaginary) or scan
    #[arg(long, default_value = "auto-pms")]
    pub lambda: LambdaMode,
    /// Grid of s = lambda^2 values for `--lambda scan`
    #[arg(long)]
    pub scan_grid: Option<Grid>,
}

#[derive(Args, Debug, Clone)]
pub struct ConvergeArgs {
    #[arg(long)]
    pub potential: Potential64,
    #[arg(long, conflicts_with = "energy")]
    pub amplitude: Option<f64>,
    #[arg(long)]
    pub energy: Option<f64>,
    #[arg(long, default_value = "0..20")]
    pub orders: Orders,
    /// Multiples of the first-order PMS lambda
    #[arg(long, value_delimiter = ',', default_value = "1.0")]
    pub lambda_scale: Vec<f64>,
}

#[derive(Args, Debug, Clone)]
pub struct PendulumArgs {
    /// Amplitudes in radians, comma separated
    #[arg(long, value_delimiter = ',')]
    pub theta: Vec<f64>,
}

#[derive(Args, Debug, Clone)]
pub struct AnharmonicArgs {
    #[arg(long)]
    pub rho: Option<f64>,
    /// Exponent N of the x^{2N} term
    #[arg(long)]
    pub n: Option<u32>,
    #[arg(long)]
    pub amplitude: Option<f64>,
}

#[derive(Args, Debug, Clone)]
pub struct DeflectArgs {
    /// GM in meters
    #[arg(long, default_value_t = GM_SUN)]
    pub gm: f64,
    /// Closest approach in meters
    #[arg(long, conflicts_with = "r0_over_rsun")]
    pub r0: Option<f64>,
    /// Closest approach in solar radii
    #[arg(long)]
    pub r0_over_rsun: Option<f64>,
    #[arg(long, default_value_t = R_SUN)]
    pub rsun: f64,
}

#[derive(Args, Debug, Clone)]
pub struct PrecessArgs {
    #[arg(long, default_value_t = GM_SUN)]
    pub gm: f64,
    /// Semimajor axis in meters
    #[arg(long, conflicts_with_all = ["a_over_a0", "l_over_gm"])]
    pub a: Option<f64>,
    /// Semimajor axis in units of --a0
    #[arg(long, conflicts_with = "l_over_gm")]
    pub a_over_a0: Option<f64>,
    /// Semilatus rectum in units of GM
    #[arg(long)]
    pub l_over_gm: Option<f64>,
    #[arg(long, default_value_t = A_MERCURY)]
    pub a0: f64,
    #[arg(long, default_value_t = ECC_MERCURY)]
    pub ecc: f64,
}

#[derive(Args, Debug, Clone)]
pub struct SweepArgs {
    /// Parameter to vary
    #[arg(long)]
    pub var: String,
    /// start:stop:count
    #[arg(long)]
    pub grid: Grid,
    /// Logarithmic spacing
    #[arg(long)]
    pub log: bool,
}

fn rel(approx: f64, exact: f64) -> f64 {
    (approx - exact) / exact
}

fn turning_points(
    p: &Potential64,
    amplitude: Option<f64>,
    energy: Option<f64>,
) -> Result<TurningPoints64> {
    match (amplitude, energy) {
        (Some(a), None) => Ok(p.turning_points_from_amplitude(a)?),
        (None, Some(e)) => Ok(p.turning_points(e)?),
        (None, None) => usage("one of --amplitude or --energy is required"),
        (Some(_), Some(_)) => usage("--amplitude and --energy are exclusive"),
    }
}

fn auto_pms(p: &Potential64, tp: &TurningPoints64, order: usize) -> Result<PmsResult64> {
    let closed = if p.is_even() && tp.is_symmetric() {
        closed_form_s(p, tp.half_width())
    } else {
        None
    };
    let bracket = default_bracket(-1.0, closed);
    Ok(optimize_series(
        p,
        tp,
        order,
        bracket,
        closed.unwrap_or(0.0),
    )?)
}

pub const PERIOD_COLUMNS: &[&str] = &[
    "potential",
    "x_minus",
    "x_plus",
    "energy",
    "order",
    "s",
    "t_delta",
    "t_exact",
    "rel_error",
    "sup_delta",
    "convergent",
];

pub fn period(args: &PeriodArgs, ctx: Context) -> Result<Table> {
    let p = &args.potential;
    let tp = turning_points(p, args.amplitude, args.energy)?;
    let t_exact = exact_period_at(p, &tp, ctx.tol)?;
    let s_values = match args.lambda {
        LambdaMode::AutoPms => vec![auto_pms(p, &tp, args.order)?.s_star],
        LambdaMode::Fixed(s) => vec![s],
        LambdaMode::Scan => match args.scan_grid {
            Some(g) => g.values(false).map_err(CliError::Usage)?,
            None => return usage("--lambda scan needs --scan-grid start:stop:count"),
        },
    };
    let mut table = Table::new(PERIOD_COLUMNS);
    for s in s_values {
        let series = sum_series(p, &InterpolationFamily64::new(s)?, &tp, args.order)?;
        table.rows.push(vec![
            p.label().into(),
            tp.x_minus().into(),
            tp.x_plus().into(),
            tp.energy().into(),
            args.order.into(),
            s.into(),
            series.value().into(),
            t_exact.into(),
            rel(series.value(), t_exact).into(),
            series.sup_delta().into(),
            series.convergent().into(),
        ]);
    }
    Ok(table)
}

pub const CONVERGE_COLUMNS: &[&str] = &[
    "order",
    "lambda_scale",
    "s",
    "t_partial",
    "t_exact",
    "abs_percent_error",
    "sup_delta",
];

pub fn converge(args: &ConvergeArgs, ctx: Context) -> Result<Table> {
    let p = &args.potential;
    let tp = turning_points(p, args.amplitude, args.energy)?;
    let t_exact = exact_period_at(p, &tp, ctx.tol)?;
    let s_pms = auto_pms(p, &tp, 1)?.s_star;
    let max_order = *args.orders.0.end();
    let mut table = Table::new(CONVERGE_COLUMNS);
    for &scale in &args.lambda_scale {
        let s = scale * scale * s_pms;
        let series = sum_series(p, &InterpolationFamily64::new(s)?, &tp, max_order)?;
        for order in args.orders.0.clone() {
            let t = series.partial_sums()[order];
            table.rows.push(vec![
                order.into(),
                scale.into(),
                s.into(),
                t.into(),
                t_exact.into(),
                (100.0 * rel(t, t_exact).abs()).into(),
                series.sup_delta().into(),
            ]);
        }
    }
    Ok(table)
}

pub const PENDULUM_COLUMNS: &[&str] = &["theta", "s_pms", "t_pms", "t_exact", "rel_error"];

pub fn pendulum(args: &PendulumArgs, _ctx: Context) -> Result<Table> {
    if args.theta.is_empty() {
        return usage("--theta is required");
    }
    let mut table = Table::new(PENDULUM_COLUMNS);
    for &theta in &args.theta {
        let t = pendulum_t_pms(theta)?;
        let exact = exact_pendulum_period(theta)?;
        table.rows.push(vec![
            theta.into(),
            lambda_pms_pendulum(theta)?.into(),
            t.into(),
            exact.into(),
            rel(t, exact).into(),
        ]);
    }
    Ok(table)
}

pub const ANHARMONIC_COLUMNS: &[&str] = &[
    "rho",
    "n",
    "amplitude",
    "lambda_pms",
    "t_pms",
    "t_exact",
    "rel_error",
];

pub fn anharmonic(args: &AnharmonicArgs, ctx: Context) -> Result<Table> {
    let (Some(rho), Some(n), Some(amplitude)) = (args.rho, args.n, args.amplitude) else {
        return usage("--rho, --n and --amplitude are required");
    };
    let p = Potential64::anharmonic(rho, n)?;
    let tp = p.turning_points_from_amplitude(amplitude)?;
    let exact = exact_period_at(&p, &tp, ctx.tol)?;
    let t = anharmonic_t_pms(rho, n, amplitude)?;
    let mut table = Table::new(ANHARMONIC_COLUMNS);
    table.rows.push(vec![
        rho.into(),
        n.into(),
        amplitude.into(),
        lambda_pms_anharmonic(rho, n, amplitude)?.into(),
        t.into(),
        exact.into(),
        rel(t, exact).into(),
    ]);
    Ok(table)
}

pub const DEFLECT_COLUMNS: &[&str] = &[
    "gm",
    "r0",
    "r0_over_rsun",
    "dphi_exact",
    "dphi_pms",
    "dphi_asymptotic",
    "rel_error_pms",
];

pub fn deflect(args: &DeflectArgs, ctx: Context) -> Result<Table> {
    let r0 = match (args.r0, args.r0_over_rsun) {
        (Some(r0), None) => r0,
        (None, Some(x)) => x * args.rsun,
        _ => return usage("exactly one of --r0 or --r0-over-rsun is required"),
    };
    let path = LightPath64::new(args.gm, r0)?;
    let exact = deflection_exact(&path, ctx.tol)?;
    let pms = deflection_pms(&path)?;
    let mut table = Table::new(DEFLECT_COLUMNS);
    table.rows.push(vec![
        args.gm.into(),
        r0.into(),
        (r0 / args.rsun).into(),
        (exact * ctx.angle).into(),
        (pms * ctx.angle).into(),
        (deflection_asymptotic(&path) * ctx.angle).into(),
        rel(pms, exact).into(),
    ]);
    Ok(table)
}

pub const PRECESS_COLUMNS: &[&str] = &[
    "gm",
    "a",
    "ecc",
    "semilatus",
    "l_over_gm",
    "dtheta_exact",
    "dtheta_pms",
    "dtheta_third_order",
    "dtheta_leading",
    "rel_error_pms",
    "rel_error_leading",
];

pub fn precess(args: &PrecessArgs, ctx: Context) -> Result<Table> {
    let orbit = match (args.a, args.a_over_a0, args.l_over_gm) {
        (Some(a), None, None) => Orbit64::from_semimajor(args.gm, a, args.ecc)?,
        (None, Some(x), None) => Orbit64::from_semimajor(args.gm, x * args.a0, args.ecc)?,
        (None, None, Some(l)) => Orbit64::from_semilatus(args.gm, l * args.gm, args.ecc)?,
        (None, None, None) => Orbit64::from_semimajor(args.gm, args.a0, args.ecc)?,
        _ => return usage("--a, --a-over-a0 and --l-over-gm are exclusive"),
    };
    let exact = precession_exact(&orbit, ctx.tol)?;
    let pms = precession_pms(&orbit)?;
    let third = precession_delta(&orbit, 3, lambda_pms_precession(&orbit))?;
    let leading = precession_leading(&orbit);
    let l = orbit.semilatus_rectum();
    let mut table = Table::new(PRECESS_COLUMNS);
    table.rows.push(vec![
        args.gm.into(),
        orbit.semimajor_axis().into(),
        orbit.eccentricity().into(),
        l.into(),
        (l / args.gm).into(),
        (exact * ctx.angle).into(),
        (pms * ctx.angle).into(),
        (third * ctx.angle).into(),
        (leading * ctx.angle).into(),
        rel(pms, exact).into(),
        rel(leading, exact).into(),
    ]);
    Ok(table)
}

/// Evaluates `eval` at every grid point in parallel and concatenates the
/// rows in grid order.
fn sweep_rows<A, F>(
    base: &A,
    sweep: &SweepArgs,
    columns: &'static [&'static str],
    eval: F,
) -> Result<Table>
where
    A: Clone + Sync,
    F: Fn(A, f64) -> Result<Table> + Sync,
{
    let values = sweep.grid.values(sweep.log).map_err(CliError::Usage)?;
    let tables: Vec<Result<Table>> = values.par_iter().map(|&v| eval(base.clone(), v)).collect();
    let mut out = Table::new(columns);
    for t in tables {
        out.rows.extend(t?.rows);
    }
    Ok(out)
}

fn unknown_var<T>(var: &str, allowed: &str) -> Result<T> {
    usage(format!("cannot sweep `{var}`; expected one of {allowed}"))
}

pub fn sweep_period(base: &PeriodArgs, sweep: &SweepArgs, ctx: Context) -> Result<Table> {
    match sweep.var.as_str() {
        "amplitude" | "energy" => {}
        other => return unknown_var(other, "amplitude, energy"),
    }
    sweep_rows(base, sweep, PERIOD_COLUMNS, |mut a, v| {
        if sweep.var == "amplitude" {
            (a.amplitude, a.energy) = (Some(v), None);
        } else {
            (a.amplitude, a.energy) = (None, Some(v));
        }
        period(&a, ctx)
    })
}

pub fn sweep_pendulum(base: &PendulumArgs, sweep: &SweepArgs, ctx: Context) -> Result<Table> {
    if sweep.var != "theta" {
        return unknown_var(&sweep.var, "theta");
    }
    sweep_rows(base, sweep, PENDULUM_COLUMNS, |mut a, v| {
        a.theta = vec![v];
        pendulum(&a, ctx)
    })
}

pub fn sweep_anharmonic(base: &AnharmonicArgs, sweep: &SweepArgs, ctx: Context) -> Result<Table> {
    match sweep.var.as_str() {
        "rho" | "amplitude" => {}
        other => return unknown_var(other, "rho, amplitude"),
    }
    sweep_rows(base, sweep, ANHARMONIC_COLUMNS, |mut a, v| {
        if sweep.var == "rho" {
            a.rho = Some(v);
        } else {
            a.amplitude = Some(v);
        }
        anharmonic(&a, ctx)
    })
}

pub fn sweep_deflect(base: &DeflectArgs, sweep: &SweepArgs, ctx: Context) -> Result<Table> {
    match sweep.var.as_str() {
        "r0" | "r0-over-rsun" | "gm" => {}
        other => return unknown_var(other, "r0, r0-over-rsun, gm"),
    }
    sweep_rows(base, sweep, DEFLECT_COLUMNS, |mut a, v| {
        match sweep.var.as_str() {
            "r0" => (a.r0, a.r0_over_rsun) = (Some(v), None),
            "r0-over-rsun" => (a.r0, a.r0_over_rsun) = (None, Some(v)),
            _ => a.gm = v,
        }
        deflect(&a, ctx)
    })
}

pub fn sweep_precess(base: &PrecessArgs, sweep: &SweepArgs, ctx: Context) -> Result<Table> {
    match sweep.var.as_str() {
        "a" | "a-over-a0" | "l-over-gm" | "ecc" | "gm" => {}
        other => return unknown_var(other, "a, a-over-a0, l-over-gm, ecc, gm"),
    }
    sweep_rows(base, sweep, PRECESS_COLUMNS, |mut a, v| {
        match sweep.var.as_str() {
            "a" => (a.a, a.a_over_a0, a.l_over_gm) = (Some(v), None, None),
            "a-over-a0" => (a.a, a.a_over_a0, a.l_over_gm) = (None, Some(v), None),
            "l-over-gm" => (a.a, a.a_over_a0, a.l_over_gm) = (None, None, Some(v)),
            "ecc" => a.ecc = v,
            _ => a.gm = v,
        }
        precess(&a, ctx)
    })
}
