//! Ergodic rates by numerical quadrature.
//!
//! Improper integrals are truncated at [`QuadratureSpec::upper_bound`]; every
//! integrand here decays exponentially, so the default bound of 1000 leaves a
//! negligible tail for channel variances of practical size.

use std::cell::RefCell;

use crate::channel::{density_z, rate_y, ChannelDraw, WLaw};
use crate::error::{Error, Result};
use crate::model::{EhProtocol, PowerBudget, SystemParams};
use crate::quadrature::{integrate_with_breaks, scale_breaks, Tolerance};
use crate::rates::instantaneous_sinrs;

const LN_2: f64 = std::f64::consts::LN_2;

/// Absolute floor of the quadrature error test, so that rates that are
/// genuinely zero still terminate.
const ABS_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub upper_bound: f64,
    pub rel_tol: f64,
    pub max_panels: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            upper_bound: 1e3,
            rel_tol: 1e-7,
            max_panels: 2000,
        }
    }
}

impl QuadratureSpec {
    pub fn new(upper_bound: f64, rel_tol: f64, max_panels: usize) -> Result<Self> {
        if !(upper_bound > 0.0 && upper_bound.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "upper_bound",
                value: upper_bound,
                reason: "must be positive and finite",
            });
        }
        if !(rel_tol > 0.0 && rel_tol < 1e-2) {
            return Err(Error::InvalidParameter {
                name: "rel_tol",
                value: rel_tol,
                reason: "must lie in (0, 1e-2)",
            });
        }
        if max_panels == 0 {
            return Err(Error::InvalidParameter {
                name: "max_panels",
                value: 0.0,
                reason: "must be at least 1",
            });
        }
        Ok(QuadratureSpec {
            upper_bound,
            rel_tol,
            max_panels,
        })
    }

    fn tolerance(&self) -> Tolerance {
        Tolerance::new(self.rel_tol, ABS_FLOOR, self.max_panels)
    }

    fn tighter(&self, factor: f64) -> Tolerance {
        Tolerance::new(self.rel_tol * factor, ABS_FLOOR * factor, self.max_panels)
    }
}

/// How the weak-symbol rate is integrated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum C1Route {
    /// One-dimensional integral against the density of `Z = γ_sr·W`.
    #[default]
    Density,
    /// Direct double integral over `γ_sr` and `γ_rd`. Slow; kept as a
    /// cross-check of the density route.
    DoubleIntegral,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErgodicRates {
    pub c1: f64,
    pub c2: f64,
    pub c_sum: f64,
}

fn with_point(mut breaks: Vec<f64>, x: f64) -> Vec<f64> {
    let lo = breaks[0];
    let hi = *breaks.last().expect("nonempty");
    if x > lo && x < hi && !breaks.contains(&x) {
        breaks.push(x);
        breaks.sort_by(f64::total_cmp);
    }
    breaks
}

/// Ergodic rate of the strong symbol.
///
/// The SINR of the strong symbol is increasing in the gain, so its bottleneck
/// is `Y = min(γ_sr, γ_sd)` and
/// `log2(1 + SINR) = log2(1 + pP_s Y) - log2(1 + αpP_s Y)`.
pub fn ergodic_c2(params: &SystemParams, budget: &PowerBudget, quad: &QuadratureSpec) -> Result<f64> {
    let lambda = rate_y(params);
    let tx = budget.p_factor * budget.p_source;
    let weak = params.alpha() * tx;
    let integrand = |y: f64| ((y * tx).ln_1p() - (y * weak).ln_1p()) * lambda * (-y * lambda).exp();
    let breaks = scale_breaks(1.0 / lambda, quad.upper_bound);
    let integral = integrate_with_breaks(integrand, &breaks, quad.tolerance())?;
    Ok(budget.zeta * integral.value / LN_2)
}

/// Ergodic rate of the weak symbol for a harvesting protocol, integrated
/// against the density of `Z`.
pub fn ergodic_c1(params: &SystemParams, budget: &PowerBudget, quad: &QuadratureSpec) -> Result<f64> {
    let law = WLaw::new(params, budget, "ergodic_c1 (use ergodic_c1_benchmark)")?;
    if law.cap <= 0.0 {
        return Ok(0.0);
    }
    let sigma2_sr = params.variances().sr;
    let ps = budget.p_source;
    let inner_error: RefCell<Option<Error>> = RefCell::new(None);
    let integrand = |z: f64| match density_z(z, sigma2_sr, &law) {
        Ok(f) => (ps * z).ln_1p() * f,
        Err(e) => {
            inner_error.borrow_mut().get_or_insert(e);
            f64::NAN
        }
    };
    let scale = law.cap.min(law.mean) * sigma2_sr;
    let breaks = scale_breaks(scale, quad.upper_bound);
    let result = integrate_with_breaks(integrand, &breaks, quad.tolerance());
    if let Some(e) = inner_error.into_inner() {
        return Err(e);
    }
    Ok(budget.zeta * result?.value / LN_2)
}

/// Ergodic rate of the weak symbol without harvesting.
///
/// With `P_s = P_r = P_t` the bottleneck is `P_t·V`, `V = min(αγ_sr, γ_rd)`,
/// which is exponential with rate `1/(ασ_sr²) + 1/σ_rd²`.
pub fn ergodic_c1_benchmark(params: &SystemParams, quad: &QuadratureSpec) -> Result<f64> {
    let budget = params.budget();
    if budget.protocol != EhProtocol::Benchmark {
        return Err(Error::UnsupportedProtocol {
            operation: "ergodic_c1_benchmark",
            protocol: budget.protocol.name(),
        });
    }
    let v = params.variances();
    let lambda = 1.0 / (params.alpha() * v.sr) + 1.0 / v.rd;
    let pt = budget.p_source;
    let integrand = |x: f64| (pt * x).ln_1p() * lambda * (-x * lambda).exp();
    let breaks = scale_breaks(1.0 / lambda, quad.upper_bound);
    let integral = integrate_with_breaks(integrand, &breaks, quad.tolerance())?;
    Ok(budget.zeta * integral.value / LN_2)
}

/// Weak-symbol rate as the literal double integral over `γ_sr` and `γ_rd` of
/// `ζ log2(1 + min(SINR_sr, SINR_rd))`. Works for every protocol.
pub fn ergodic_c1_double_integral(
    params: &SystemParams,
    budget: &PowerBudget,
    quad: &QuadratureSpec,
) -> Result<f64> {
    let v = params.variances();
    let upper = quad.upper_bound;
    let inner_tol = quad.tighter(1e-2);
    let inner_error: RefCell<Option<Error>> = RefCell::new(None);

    let inner = |gamma_rd: f64| -> f64 {
        let f_rd = (-gamma_rd / v.rd).exp() / v.rd;
        if f_rd == 0.0 {
            return 0.0;
        }
        let integrand = |gamma_sr: f64| {
            let draw = ChannelDraw {
                gamma_sr,
                gamma_sd: 0.0,
                gamma_rd,
            };
            let s = instantaneous_sinrs(params, budget, &draw);
            s.x1_sr.min(s.x1_rd).ln_1p() * (-gamma_sr / v.sr).exp() / v.sr
        };
        let mut breaks = scale_breaks(v.sr, upper);
        if budget.protocol == EhProtocol::Benchmark {
            // min(αP_tγ_sr, P_tγ_rd) switches at γ_sr = γ_rd/α.
            breaks = with_point(breaks, gamma_rd / params.alpha());
        }
        match integrate_with_breaks(integrand, &breaks, inner_tol) {
            Ok(r) => r.value * f_rd,
            Err(e) => {
                inner_error.borrow_mut().get_or_insert(e);
                f64::NAN
            }
        }
    };

    let mut breaks = scale_breaks(v.rd, upper);
    if let Some(upsilon) = budget.upsilon {
        // min(αpP_sγ_sr, ΥP_sγ_srγ_rd) switches at γ_rd = αp/Υ.
        breaks = with_point(breaks, params.alpha() * budget.p_factor / upsilon);
    }
    let result = integrate_with_breaks(inner, &breaks, quad.tolerance());
    if let Some(e) = inner_error.into_inner() {
        return Err(e);
    }
    Ok(budget.zeta * result?.value / LN_2)
}

/// Both ergodic rates and their sum, dispatching on the protocol.
pub fn ergodic_sum(params: &SystemParams, quad: &QuadratureSpec) -> Result<ErgodicRates> {
    ergodic_sum_via(params, quad, C1Route::Density)
}

pub fn ergodic_sum_via(params: &SystemParams, quad: &QuadratureSpec, route: C1Route) -> Result<ErgodicRates> {
    let budget = params.budget();
    let c2 = ergodic_c2(params, &budget, quad)?;
    let c1 = match (route, budget.protocol) {
        (C1Route::DoubleIntegral, _) => ergodic_c1_double_integral(params, &budget, quad)?,
        (C1Route::Density, EhProtocol::Benchmark) => ergodic_c1_benchmark(params, quad)?,
        (C1Route::Density, _) => ergodic_c1(params, &budget, quad)?,
    };
    Ok(ErgodicRates {
        c1,
        c2,
        c_sum: c1 + c2,
    })
}
