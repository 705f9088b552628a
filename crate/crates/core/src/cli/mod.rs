//! Command-line front end.

pub mod config;
pub mod output;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::analytic::{ergodic_sum_via, C1Route};
use crate::error::{Error, Result};
use crate::explore::{
    cross_validate, optimize_alpha, optimize_scalar, sweep_scalar, Evaluation, MethodTag, SweptParam,
};
use crate::model::linear_to_db;
use crate::montecarlo::estimate_ergodic;

pub use config::{parse_config, MethodChoice, ScenarioConfig};
pub use output::{emit_csv, emit_plot, format_sig9, render_svg, write_csv};

#[derive(Debug, Parser)]
#[command(name = "noma-wpt", version, about = "Ergodic rates of wireless-powered NOMA cooperative relaying")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print ergodic rates of every configured protocol, Monte Carlo and quadrature side by side.
    Rate(RateArgs),
    /// Sweep one parameter and write a CSV table (and optionally an SVG plot).
    Sweep(SweepArgs),
    /// Maximize the analytic sum rate over rho, xi or alpha.
    Optimize(OptimizeArgs),
    /// Cross-check Monte Carlo against quadrature and report the worst relative error.
    Validate(ValidateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Mc,
    Analytic,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum WhichArg {
    Snr,
    Rho,
    Xi,
    Alpha,
}

impl WhichArg {
    fn param(self) -> SweptParam {
        match self {
            WhichArg::Snr => SweptParam::SnrDb,
            WhichArg::Rho => SweptParam::Rho,
            WhichArg::Xi => SweptParam::Xi,
            WhichArg::Alpha => SweptParam::Alpha,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RouteArg {
    Density,
    Double,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Scenario file in `key = value` format.
    #[arg(long)]
    pub config: PathBuf,
    /// Overrides the config's `method`.
    #[arg(long, value_enum)]
    pub method: Option<MethodArg>,
    /// Overrides the config's `seed`.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct RateArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Integration route for the weak-symbol rate.
    #[arg(long, value_enum, default_value = "density")]
    pub c1_route: RouteArg,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, value_enum, default_value = "snr")]
    pub which: WhichArg,
    /// `start:stop:step` (inclusive).
    #[arg(long)]
    pub grid: Option<String>,
    /// CSV destination; falls back to the config's `out`, then stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub plot: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct OptimizeArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, value_enum)]
    pub which: WhichArg,
    /// Search bracket as `start:stop` (a trailing `:step` is ignored).
    #[arg(long)]
    pub grid: Option<String>,
    #[arg(long, default_value_t = 1e-4)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// SNR grid in dB.
    #[arg(long, default_value = "0:30:10")]
    pub grid: String,
    /// Largest acceptable relative error.
    #[arg(long, default_value_t = 0.02)]
    pub threshold: f64,
    /// Optional CSV of every compared point.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parses `start:stop:step`, `start:stop` or a single number.
pub fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let bad = || Error::Usage(format!("invalid grid {text:?}, expected start:stop:step"));
    let parts: Vec<f64> = text
        .split(':')
        .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
        .collect::<Result<_>>()?;
    match parts.as_slice() {
        [x] => Ok(vec![*x]),
        [start, stop, step] => {
            if !(*step > 0.0) || stop < start {
                return Err(bad());
            }
            let n = ((stop - start) / step + 1e-9).floor() as usize;
            Ok((0..=n).map(|i| start + step * i as f64).collect())
        }
        _ => Err(bad()),
    }
}

fn parse_bracket(text: &str) -> Result<(f64, f64)> {
    let bad = || Error::Usage(format!("invalid bracket {text:?}, expected start:stop"));
    let parts: Vec<f64> = text
        .split(':')
        .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
        .collect::<Result<_>>()?;
    match parts.as_slice() {
        [a, b] | [a, b, _] if a < b => Ok((*a, *b)),
        _ => Err(bad()),
    }
}

fn default_grid(which: SweptParam) -> &'static str {
    match which {
        SweptParam::SnrDb => "0:40:5",
        SweptParam::Rho => "0.01:0.95:0.01",
        SweptParam::Xi => "0.005:0.5:0.005",
        SweptParam::Alpha => "0.01:0.49:0.01",
    }
}

fn load_config(common: &CommonArgs) -> Result<ScenarioConfig> {
    let text = fs::read_to_string(&common.config).map_err(|e| Error::io(&common.config, e))?;
    let mut config = parse_config(&text)?;
    if let Some(seed) = common.seed {
        config.seed = seed;
    }
    if let Some(m) = common.method {
        config.method = match m {
            MethodArg::Mc => MethodChoice::Mc,
            MethodArg::Analytic => MethodChoice::Analytic,
            MethodArg::Both => MethodChoice::Both,
        };
    }
    Ok(config)
}

fn evaluation(config: &ScenarioConfig) -> Evaluation {
    let methods = match config.method {
        MethodChoice::Mc => vec![MethodTag::Mc],
        MethodChoice::Analytic => vec![MethodTag::Analytic],
        MethodChoice::Both => vec![MethodTag::Mc, MethodTag::Analytic],
    };
    Evaluation {
        methods,
        n_trials: config.n_trials,
        seed: config.seed,
        quad: config.quadrature(),
    }
}

fn write_out(out: &mut dyn Write, text: std::fmt::Arguments<'_>) -> Result<()> {
    out.write_fmt(text).map_err(|e| Error::io("<stdout>", e))
}

macro_rules! say {
    ($out:expr, $($arg:tt)*) => {
        write_out($out, format_args!($($arg)*))
    };
}

fn run_rate(args: &RateArgs, out: &mut dyn Write) -> Result<()> {
    let config = load_config(&args.common)?;
    let base = config.base_params();
    let quad = config.quadrature();
    let route = match args.c1_route {
        RouteArg::Density => C1Route::Density,
        RouteArg::Double => C1Route::DoubleIntegral,
    };
    say!(
        out,
        "snr_total = {} dB, alpha = {}, eta = {}\n",
        format_sig9(linear_to_db(config.snr_total)),
        config.alpha,
        config.eta
    )?;
    say!(out, "{:<18} {:>8} {:>12} {:>12} {:>12} {:>12}\n", "protocol", "method", "c1", "c2", "c_sum", "se_sum")?;
    for protocol in config.protocols() {
        let params = base.with_protocol(protocol);
        if config.method != MethodChoice::Analytic {
            let e = estimate_ergodic(&params, config.n_trials, config.seed);
            say!(
                out,
                "{:<18} {:>8} {:>12.6} {:>12.6} {:>12.6} {:>12.2e}\n",
                protocol.to_string(),
                "mc",
                e.c1,
                e.c2,
                e.c_sum,
                e.se_sum
            )?;
        }
        if config.method != MethodChoice::Mc {
            let r = ergodic_sum_via(&params, &quad, route)?;
            say!(
                out,
                "{:<18} {:>8} {:>12.6} {:>12.6} {:>12.6} {:>12}\n",
                protocol.to_string(),
                "analytic",
                r.c1,
                r.c2,
                r.c_sum,
                "-"
            )?;
        }
    }
    Ok(())
}

fn run_sweep(args: &SweepArgs, out: &mut dyn Write) -> Result<()> {
    let config = load_config(&args.common)?;
    let which = args.which.param();
    let grid = parse_grid(args.grid.as_deref().unwrap_or(default_grid(which)))?;
    let table = sweep_scalar(&config.base_params(), which, &grid, &config.protocols(), &evaluation(&config))?;
    match args.out.as_ref().or(config.out.as_ref()) {
        Some(path) => {
            emit_csv(&table, path)?;
            say!(out, "wrote {} rows to {}\n", table.rows.len(), path.display())?;
        }
        None => {
            let mut buf = Vec::new();
            write_csv(&table, &mut buf)?;
            out.write_all(&buf).map_err(|e| Error::io("<stdout>", e))?;
        }
    }
    if let Some(plot) = &args.plot {
        emit_plot(&table, plot)?;
        say!(out, "wrote plot to {}\n", plot.display())?;
    }
    for (i, col) in table.columns.iter().enumerate() {
        if let Some((x, y)) = table.argmax(i) {
            log::info!("{}: max sum rate {y:.6} at {} = {x}", col.label(), which.name());
        }
    }
    Ok(())
}

fn run_optimize(args: &OptimizeArgs, out: &mut dyn Write) -> Result<()> {
    let config = load_config(&args.common)?;
    let which = args.which.param();
    let bracket = match &args.grid {
        Some(g) => parse_bracket(g)?,
        None => which
            .default_bracket()
            .ok_or_else(|| Error::Usage("sum rate is monotone in SNR; optimize rho, xi or alpha".into()))?,
    };
    let base = config.base_params();
    let quad = config.quadrature();
    let report = |out: &mut dyn Write, label: &str, o: &crate::explore::ScalarOptimum| {
        say!(
            out,
            "{label}: {} = {:.6}, sum rate = {:.6}{}{}\n",
            which.name(),
            o.arg,
            o.value,
            if o.flat { " (flat: best at bracket endpoint)" } else { "" },
            if o.unimodal { "" } else { " (not unimodal on bracket)" }
        )
    };
    match which {
        SweptParam::Alpha => {
            let opt = optimize_alpha(&base, &config.protocols(), bracket, args.tol, &quad)?;
            for (p, o) in &opt.per_protocol {
                report(out, &p.to_string(), o)?;
            }
            let (p, o) = opt.best_protocol();
            report(out, &format!("best protocol {p}"), o)?;
            report(out, "all-protocol total", &opt.summary)?;
        }
        _ => {
            let o = optimize_scalar(&base, which, bracket, args.tol, &quad)?;
            let label = if which == SweptParam::Rho { "PS" } else { "TS" };
            report(out, label, &o)?;
        }
    }
    Ok(())
}

fn run_validate(args: &ValidateArgs, out: &mut dyn Write) -> Result<()> {
    let config = load_config(&args.common)?;
    let grid = parse_grid(&args.grid)?;
    let report = cross_validate(
        &config.base_params(),
        &config.protocols(),
        &[config.alpha],
        &grid,
        config.n_trials,
        config.seed,
        &config.quadrature(),
    )?;
    say!(out, "{:<18} {:>6} {:>8} {:>12} {:>12} {:>10}\n", "protocol", "alpha", "snr_db", "analytic", "mc", "rel_err")?;
    for p in &report.points {
        say!(
            out,
            "{:<18} {:>6} {:>8} {:>12.6} {:>12.6} {:>10.2e}\n",
            p.protocol.to_string(),
            p.alpha,
            p.snr_db,
            p.analytic,
            p.mc,
            p.relative_error()
        )?;
    }
    if let Some(path) = &args.out {
        write_validation_csv(&report, path)?;
    }
    let worst = report.max_relative_error();
    say!(out, "max relative error: {:.4e} (threshold {})\n", worst, args.threshold)?;
    if worst < args.threshold {
        Ok(())
    } else {
        Err(Error::Usage(format!(
            "Monte Carlo and quadrature disagree: max relative error {worst:.4e} >= {}",
            args.threshold
        )))
    }
}

fn write_validation_csv(report: &crate::explore::ValidationReport, path: &Path) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)?;
    w.write_record(["protocol", "alpha", "snr_db", "analytic_csum", "mc_csum", "mc_se", "rel_err"])?;
    for p in &report.points {
        w.write_record([
            p.protocol.label(),
            format_sig9(p.alpha),
            format_sig9(p.snr_db),
            format_sig9(p.analytic),
            format_sig9(p.mc),
            format_sig9(p.se),
            format_sig9(p.relative_error()),
        ])?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn execute(cli: &Cli, out: &mut dyn Write) -> Result<()> {
    match &cli.command {
        Command::Rate(a) => run_rate(a, out),
        Command::Sweep(a) => run_sweep(a, out),
        Command::Optimize(a) => run_optimize(a, out),
        Command::Validate(a) => run_validate(a, out),
    }
}

/// Parses `argv` (including the program name), runs the command and returns
/// the process exit status. Diagnostics go to `err`.
pub fn run_command<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            return e.exit_code();
        }
    };
    match execute(&cli, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}
