//! Parameter sweeps and one-dimensional sum-rate maximization.

use rayon::prelude::*;

use crate::analytic::{ergodic_sum, QuadratureSpec};
use crate::error::{Error, Result};
use crate::model::{db_to_linear, EhProtocol, SystemParams};
use crate::montecarlo::estimate_ergodic;

/// Number of points in the coarse scan that precedes golden-section refinement.
pub const COARSE_POINTS: usize = 41;
const DENSE_POINTS: usize = 401;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SweptParam {
    /// Total SNR in dB.
    SnrDb,
    Rho,
    Xi,
    Alpha,
}

impl SweptParam {
    pub fn name(self) -> &'static str {
        match self {
            SweptParam::SnrDb => "snr_db",
            SweptParam::Rho => "rho",
            SweptParam::Xi => "xi",
            SweptParam::Alpha => "alpha",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "snr" | "snr_db" => Some(SweptParam::SnrDb),
            "rho" => Some(SweptParam::Rho),
            "xi" => Some(SweptParam::Xi),
            "alpha" => Some(SweptParam::Alpha),
            _ => None,
        }
    }

    /// Default search bracket for [`optimize_scalar`].
    pub fn default_bracket(self) -> Option<(f64, f64)> {
        match self {
            SweptParam::SnrDb => None,
            SweptParam::Rho => Some((0.005, 0.995)),
            SweptParam::Xi => Some((0.001, 0.5)),
            SweptParam::Alpha => Some((0.005, 0.495)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MethodTag {
    Mc,
    Analytic,
}

impl MethodTag {
    pub fn name(self) -> &'static str {
        match self {
            MethodTag::Mc => "mc",
            MethodTag::Analytic => "analytic",
        }
    }
}

/// Which evaluators run and how.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub methods: Vec<MethodTag>,
    pub n_trials: u64,
    pub seed: u64,
    pub quad: QuadratureSpec,
}

impl Evaluation {
    pub fn analytic(quad: QuadratureSpec) -> Self {
        Evaluation {
            methods: vec![MethodTag::Analytic],
            n_trials: 0,
            seed: 0,
            quad,
        }
    }

    pub fn monte_carlo(n_trials: u64, seed: u64) -> Self {
        Evaluation {
            methods: vec![MethodTag::Mc],
            n_trials,
            seed,
            quad: QuadratureSpec::default(),
        }
    }

    pub fn both(n_trials: u64, seed: u64, quad: QuadratureSpec) -> Self {
        Evaluation {
            methods: vec![MethodTag::Mc, MethodTag::Analytic],
            n_trials,
            seed,
            quad,
        }
    }
}

/// A protocol column of a sweep. `Swept` columns take their parameter from
/// the grid value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ColumnProtocol {
    Fixed(EhProtocol),
    SweptRho,
    SweptXi,
}

impl ColumnProtocol {
    pub fn label(&self) -> String {
        match self {
            ColumnProtocol::Fixed(p) => p.label(),
            ColumnProtocol::SweptRho => "ps".to_string(),
            ColumnProtocol::SweptXi => "ts".to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub protocol: ColumnProtocol,
    pub method: MethodTag,
}

impl Column {
    pub fn label(&self) -> String {
        format!("{}_{}", self.protocol.label(), self.method.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateTriple {
    pub c1: f64,
    pub c2: f64,
    pub c_sum: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    /// One entry per column, in column order.
    pub cells: Vec<RateTriple>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub swept: SweptParam,
    pub columns: Vec<Column>,
    pub rows: Vec<SweepRow>,
    pub fixed_params: SystemParams,
}

impl SweepTable {
    pub fn column_index(&self, label: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.label() == label)
    }

    /// Sum-rate series of one column.
    pub fn sum_series(&self, column: usize) -> Vec<(f64, f64)> {
        self.rows
            .iter()
            .map(|r| (r.value, r.cells[column].c_sum))
            .collect()
    }

    /// Grid value with the largest sum rate in `column`.
    pub fn argmax(&self, column: usize) -> Option<(f64, f64)> {
        self.sum_series(column)
            .into_iter()
            .fold(None, |best: Option<(f64, f64)>, (x, y)| match best {
                Some((_, by)) if by >= y => best,
                _ => Some((x, y)),
            })
    }
}

/// Parameters for one grid point and one column.
fn point_params(base: &SystemParams, swept: SweptParam, value: f64, column: ColumnProtocol) -> Result<SystemParams> {
    let protocol = match column {
        ColumnProtocol::Fixed(p) => p,
        ColumnProtocol::SweptRho => EhProtocol::power_sharing(value)?,
        ColumnProtocol::SweptXi => EhProtocol::time_sharing(value)?,
    };
    let params = base.with_protocol(protocol);
    match swept {
        SweptParam::SnrDb => params.with_snr_total(db_to_linear(value)),
        SweptParam::Alpha => params.with_alpha(value),
        SweptParam::Rho | SweptParam::Xi => Ok(params),
    }
}

fn evaluate(params: &SystemParams, method: MethodTag, eval: &Evaluation) -> Result<RateTriple> {
    match method {
        MethodTag::Analytic => {
            let r = ergodic_sum(params, &eval.quad)?;
            Ok(RateTriple {
                c1: r.c1,
                c2: r.c2,
                c_sum: r.c_sum,
            })
        }
        MethodTag::Mc => {
            let e = estimate_ergodic(params, eval.n_trials.max(1), eval.seed);
            Ok(RateTriple {
                c1: e.c1,
                c2: e.c2,
                c_sum: e.c_sum,
            })
        }
    }
}

fn sweep(
    base: &SystemParams,
    swept: SweptParam,
    grid: &[f64],
    protocols: &[ColumnProtocol],
    eval: &Evaluation,
) -> Result<SweepTable> {
    if grid.is_empty() {
        return Err(Error::Usage("sweep grid is empty".into()));
    }
    let mut grid = grid.to_vec();
    grid.sort_by(f64::total_cmp);
    let columns: Vec<Column> = protocols
        .iter()
        .flat_map(|&protocol| {
            eval.methods.iter().map(move |&method| Column { protocol, method })
        })
        .collect();

    let rows = grid
        .par_iter()
        .map(|&value| {
            let cells = columns
                .iter()
                .map(|col| {
                    let params = point_params(base, swept, value, col.protocol)?;
                    evaluate(&params, col.method, eval)
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(SweepRow { value, cells })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(SweepTable {
        swept,
        columns,
        rows,
        fixed_params: *base,
    })
}

/// Sum rate against total SNR (dB) for each protocol.
pub fn sweep_snr(
    base: &SystemParams,
    snr_db_grid: &[f64],
    protocols: &[EhProtocol],
    eval: &Evaluation,
) -> Result<SweepTable> {
    let cols: Vec<_> = protocols.iter().copied().map(ColumnProtocol::Fixed).collect();
    sweep(base, SweptParam::SnrDb, snr_db_grid, &cols, eval)
}

/// Sum rate against `rho`, `xi` or `alpha`.
///
/// A `rho` sweep evaluates power sharing plus the Ideal and Benchmark
/// reference lines, and likewise for `xi` with time sharing; `protocols` is
/// only used by the `alpha` sweep.
pub fn sweep_scalar(
    base: &SystemParams,
    which: SweptParam,
    grid: &[f64],
    protocols: &[EhProtocol],
    eval: &Evaluation,
) -> Result<SweepTable> {
    let references = [
        ColumnProtocol::Fixed(EhProtocol::Ideal),
        ColumnProtocol::Fixed(EhProtocol::Benchmark),
    ];
    let cols: Vec<ColumnProtocol> = match which {
        SweptParam::Rho => std::iter::once(ColumnProtocol::SweptRho).chain(references).collect(),
        SweptParam::Xi => std::iter::once(ColumnProtocol::SweptXi).chain(references).collect(),
        SweptParam::Alpha => protocols.iter().copied().map(ColumnProtocol::Fixed).collect(),
        SweptParam::SnrDb => {
            return sweep_snr(base, grid, protocols, eval);
        }
    };
    sweep(base, which, grid, &cols, eval)
}

/// Outcome of a one-dimensional maximization.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarOptimum {
    pub arg: f64,
    pub value: f64,
    /// No interior point beat the best bracket endpoint.
    pub flat: bool,
    /// The coarse scan showed a single rise-then-fall pattern.
    pub unimodal: bool,
    /// The coarse scan, kept for inspection.
    pub scan: Vec<(f64, f64)>,
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
        .collect()
}

fn scan<F>(f: &F, xs: Vec<f64>) -> Result<Vec<(f64, f64)>>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    xs.into_par_iter().map(|x| Ok((x, f(x)?))).collect()
}

/// Number of sign changes of the discrete differences, ignoring exact ties.
fn sign_changes(values: &[f64]) -> usize {
    let signs: Vec<f64> = values
        .windows(2)
        .map(|w| (w[1] - w[0]).signum())
        .filter(|s| *s != 0.0)
        .collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

fn best(points: &[(f64, f64)]) -> usize {
    points
        .iter()
        .enumerate()
        .fold(0, |bi, (i, p)| if p.1 > points[bi].1 { i } else { bi })
}

/// Golden-section search for the maximum of a unimodal `f` on `[a, b]`.
pub fn golden_section_max<F>(f: &F, mut a: f64, mut b: f64, tol: f64) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64>,
{
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    while (b - a).abs() > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d)?;
        }
    }
    Ok(if fc >= fd { (c, fc) } else { (d, fd) })
}

/// Maximizes an arbitrary objective: a coarse scan of [`COARSE_POINTS`]
/// points, then golden-section search between the neighbours of the best
/// scan point. If the scan is not unimodal the scan is redone on a dense grid
/// before refining. The result is never worse than the best scanned point.
pub fn maximize<F>(f: F, bracket: (f64, f64), tol: f64) -> Result<ScalarOptimum>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    let (lo, hi) = bracket;
    if !(lo < hi) || !(tol > 0.0) {
        return Err(Error::Usage(format!(
            "invalid bracket [{lo}, {hi}] or tolerance {tol}"
        )));
    }
    let coarse = scan(&f, linspace(lo, hi, COARSE_POINTS))?;
    let values: Vec<f64> = coarse.iter().map(|p| p.1).collect();
    let unimodal = sign_changes(&values) <= 1;
    let points = if unimodal {
        coarse.clone()
    } else {
        log::warn!("objective is not unimodal on [{lo}, {hi}]; rescanning on a dense grid");
        scan(&f, linspace(lo, hi, DENSE_POINTS))?
    };

    let i = best(&points);
    let (mut arg, mut value) = points[i];
    let left = points[i.saturating_sub(1)].0;
    let right = points[(i + 1).min(points.len() - 1)].0;
    let (x, fx) = golden_section_max(&f, left, right, tol)?;
    if fx > value {
        arg = x;
        value = fx;
    }
    let at_endpoint = arg == lo || arg == hi;
    Ok(ScalarOptimum {
        arg,
        value,
        flat: at_endpoint,
        unimodal,
        scan: coarse,
    })
}

/// The protocol whose sum rate is maximized when optimizing `which`.
fn objective_params(base: &SystemParams, which: SweptParam, x: f64) -> Result<SystemParams> {
    match which {
        SweptParam::Rho => Ok(base.with_protocol(EhProtocol::power_sharing(x)?)),
        SweptParam::Xi => Ok(base.with_protocol(EhProtocol::time_sharing(x)?)),
        SweptParam::Alpha => base.with_alpha(x),
        SweptParam::SnrDb => Err(Error::Usage(
            "sum rate is monotone in SNR; optimize rho, xi or alpha".into(),
        )),
    }
}

/// Maximizes the analytic sum rate over `rho` (power sharing), `xi` (time
/// sharing) or `alpha` (the protocol of `base`).
pub fn optimize_scalar(
    base: &SystemParams,
    which: SweptParam,
    bracket: (f64, f64),
    tol: f64,
    quad: &QuadratureSpec,
) -> Result<ScalarOptimum> {
    objective_params(base, which, bracket.0)?;
    objective_params(base, which, bracket.1)?;
    maximize(
        |x| Ok(ergodic_sum(&objective_params(base, which, x)?, quad)?.c_sum),
        bracket,
        tol,
    )
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlphaOptima {
    pub per_protocol: Vec<(EhProtocol, ScalarOptimum)>,
    /// Index into `per_protocol` of the protocol with the highest optimum.
    pub best: usize,
    /// Maximizer of the sum rate added up over every protocol.
    pub summary: ScalarOptimum,
}

impl AlphaOptima {
    pub fn best_protocol(&self) -> (EhProtocol, &ScalarOptimum) {
        let (p, o) = &self.per_protocol[self.best];
        (*p, o)
    }
}

/// Per-protocol optimal power allocation plus an all-protocol summary.
pub fn optimize_alpha(
    base: &SystemParams,
    protocols: &[EhProtocol],
    bracket: (f64, f64),
    tol: f64,
    quad: &QuadratureSpec,
) -> Result<AlphaOptima> {
    if protocols.is_empty() {
        return Err(Error::Usage("no protocols to optimize".into()));
    }
    let per_protocol = protocols
        .iter()
        .map(|&p| {
            optimize_scalar(&base.with_protocol(p), SweptParam::Alpha, bracket, tol, quad).map(|o| (p, o))
        })
        .collect::<Result<Vec<_>>>()?;
    let best = per_protocol
        .iter()
        .enumerate()
        .fold(0, |bi, (i, (_, o))| if o.value > per_protocol[bi].1.value { i } else { bi });
    let summary = maximize(
        |a| {
            protocols.iter().try_fold(0.0, |acc, &p| {
                let params = base.with_protocol(p).with_alpha(a)?;
                Ok(acc + ergodic_sum(&params, quad)?.c_sum)
            })
        },
        bracket,
        tol,
    )?;
    Ok(AlphaOptima {
        per_protocol,
        best,
        summary,
    })
}

/// One point of an MC-versus-quadrature comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationPoint {
    pub protocol: EhProtocol,
    pub alpha: f64,
    pub snr_db: f64,
    pub analytic: f64,
    pub mc: f64,
    pub se: f64,
}

impl ValidationPoint {
    pub fn relative_error(&self) -> f64 {
        (self.mc - self.analytic).abs() / self.analytic
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub points: Vec<ValidationPoint>,
}

impl ValidationReport {
    pub fn max_relative_error(&self) -> f64 {
        self.points
            .iter()
            .map(ValidationPoint::relative_error)
            .fold(0.0, f64::max)
    }
}

/// Compares Monte Carlo and quadrature sum rates on a protocol × alpha × SNR grid.
pub fn cross_validate(
    base: &SystemParams,
    protocols: &[EhProtocol],
    alphas: &[f64],
    snr_db_grid: &[f64],
    n_trials: u64,
    seed: u64,
    quad: &QuadratureSpec,
) -> Result<ValidationReport> {
    let mut cases = Vec::new();
    for &protocol in protocols {
        for &alpha in alphas {
            for &snr_db in snr_db_grid {
                cases.push((protocol, alpha, snr_db));
            }
        }
    }
    let points = cases
        .into_par_iter()
        .map(|(protocol, alpha, snr_db)| {
            let params = base
                .with_protocol(protocol)
                .with_alpha(alpha)?
                .with_snr_total(db_to_linear(snr_db))?;
            let analytic = ergodic_sum(&params, quad)?.c_sum;
            let est = estimate_ergodic(&params, n_trials, seed);
            Ok(ValidationPoint {
                protocol,
                alpha,
                snr_db,
                analytic,
                mc: est.c_sum,
                se: est.se_sum,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ValidationReport { points })
}
