//! Rayleigh channel draws and the densities of the min-of-links variables.
//!
//! With `h ~ CN(0, σ²)` the power gain `|h|²` is exponential with mean `σ²`,
//! so draws are taken directly as scaled unit exponentials.
//!
//! The analytical densities are for
//! * `Y = min(γ_sr, γ_sd)`, the bottleneck of the strong symbol;
//! * `W = min(αp, Υ·γ_rd)`, which has an atom at `αp`;
//! * `Z = γ_sr·W`, the bottleneck of the weak symbol scaled by `1/P_s`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;

use crate::error::{Error, Result};
use crate::model::{ChannelVariances, PowerBudget, SystemParams};
use crate::quadrature::{integrate_with_breaks, Tolerance};

/// Instantaneous power gains of the three links.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelDraw {
    pub gamma_sr: f64,
    pub gamma_sd: f64,
    pub gamma_rd: f64,
}

/// Reproducible random substream identified by `(seed, stream_index)`.
///
/// Backed by ChaCha8 with the stream index mapped onto ChaCha's 64-bit stream
/// id, so the sequence is platform independent and distinct indices never
/// overlap.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream_index: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream_index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream_index);
        RngStream {
            seed,
            stream_index,
            rng,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_index(&self) -> u64 {
        self.stream_index
    }

    /// Unit-mean exponential variate.
    pub fn exp1(&mut self) -> f64 {
        self.rng.sample(Exp1)
    }

    pub fn uniform(&mut self) -> f64 {
        self.rng.random()
    }
}

pub fn sample_gains(variances: &ChannelVariances, rng: &mut RngStream) -> ChannelDraw {
    let gamma_sr = variances.sr * rng.exp1();
    let gamma_sd = variances.sd * rng.exp1();
    let gamma_rd = variances.rd * rng.exp1();
    ChannelDraw {
        gamma_sr,
        gamma_sd,
        gamma_rd,
    }
}

/// Draws one channel realization from `rng`.
pub fn sample_draw(params: &SystemParams, rng: &mut RngStream) -> ChannelDraw {
    sample_gains(&params.variances(), rng)
}

/// Rate of the exponential law of `Y = min(γ_sr, γ_sd)`.
pub fn rate_y(params: &SystemParams) -> f64 {
    let v = params.variances();
    1.0 / v.sr + 1.0 / v.sd
}

/// Density of `Y = min(γ_sr, γ_sd)`.
pub fn pdf_y(y: f64, params: &SystemParams) -> Result<f64> {
    if !(y >= 0.0) {
        return Err(Error::Domain {
            what: "y",
            value: y,
        });
    }
    let lambda = rate_y(params);
    Ok(lambda * (-y * lambda).exp())
}

/// Law of `W = min(αp, Υ·γ_rd)`: a point mass at `atom_at` plus a truncated
/// exponential density below it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WDensity {
    pub atom_at: f64,
    pub atom_mass: f64,
    pub density: f64,
}

/// Parameters of `W` shared by the density routines: the cap `αp` and the
/// mean `Υσ_rd²` of the uncapped exponential.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WLaw {
    pub cap: f64,
    pub mean: f64,
}

impl WLaw {
    pub fn new(params: &SystemParams, budget: &PowerBudget, operation: &'static str) -> Result<Self> {
        let upsilon = budget.upsilon.ok_or(Error::UnsupportedProtocol {
            operation,
            protocol: budget.protocol.name(),
        })?;
        Ok(WLaw {
            cap: params.alpha() * budget.p_factor,
            mean: upsilon * params.variances().rd,
        })
    }

    pub fn atom_mass(&self) -> f64 {
        (-self.cap / self.mean).exp()
    }

    pub fn density(&self, w: f64) -> f64 {
        if w < self.cap {
            (-w / self.mean).exp() / self.mean
        } else {
            0.0
        }
    }

    /// Closed-form mass of the continuous part, `1 - exp(-αp/(Υσ_rd²))`.
    pub fn continuous_mass(&self) -> f64 {
        -(-self.cap / self.mean).exp_m1()
    }
}

pub fn pdf_w(w: f64, params: &SystemParams, budget: &PowerBudget) -> Result<WDensity> {
    let law = WLaw::new(params, budget, "pdf_w")?;
    if !(w >= 0.0) {
        return Err(Error::Domain {
            what: "w",
            value: w,
        });
    }
    Ok(WDensity {
        atom_at: law.cap,
        atom_mass: law.atom_mass(),
        density: law.density(w),
    })
}

const INNER_TOL: Tolerance = Tolerance {
    rel: 1e-11,
    abs: 1e-300,
    max_panels: 400,
};

/// Lower cutoff of the inner `w` integral, relative to the cap `αp`.
pub const INNER_CUTOFF: f64 = 1e-12;

/// Density of `Z = γ_sr·W` at `z > 0`.
///
/// The atom of `W` gives the closed-form exponential term; the continuous
/// part is integrated over `w ∈ (ε, αp]` in the variable `t = ln w`, where the
/// integrand `exp(-z/(σ_sr² w) - w/(Υσ_rd²)) / (Υσ_rd² σ_sr² w)` becomes
/// smooth and bounded.
pub fn pdf_z(z: f64, params: &SystemParams, budget: &PowerBudget) -> Result<f64> {
    let law = WLaw::new(params, budget, "pdf_z")?;
    if !(z > 0.0) {
        return Err(Error::Domain {
            what: "z",
            value: z,
        });
    }
    Ok(density_z(z, params.variances().sr, &law)?)
}

pub(crate) fn density_z(z: f64, sigma2_sr: f64, law: &WLaw) -> Result<f64> {
    let cap = law.cap;
    if cap <= 0.0 {
        return Ok(0.0);
    }
    let atom_term =
        (-z / (cap * sigma2_sr) - cap / law.mean).exp() / (cap * sigma2_sr);

    let lo = (INNER_CUTOFF * cap).ln();
    let hi = cap.ln();
    let scale = 1.0 / (law.mean * sigma2_sr);
    let integrand = |t: f64| {
        let w = t.exp();
        scale * (-z / (sigma2_sr * w) - w / law.mean).exp()
    };
    // The integrand switches on around w = z/σ_sr².
    let knee = (z / sigma2_sr).ln();
    let breaks: Vec<f64> = if knee > lo && knee < hi {
        vec![lo, knee, hi]
    } else {
        vec![lo, hi]
    };
    let inner = integrate_with_breaks(integrand, &breaks, INNER_TOL)?;
    Ok(atom_term + inner.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::EhProtocol;
    use approx::assert_relative_eq;

    fn unit_params(protocol: EhProtocol) -> SystemParams {
        SystemParams::new(
            ChannelVariances { sr: 1.0, sd: 1.0, rd: 1.0 },
            0.2,
            0.95,
            10.0,
            protocol,
        )
        .unwrap()
    }

    #[test]
    fn same_stream_same_draws() {
        let p = unit_params(EhProtocol::Ideal);
        let mut a = RngStream::new(7, 3);
        let mut b = RngStream::new(7, 3);
        for _ in 0..10 {
            assert_eq!(sample_draw(&p, &mut a), sample_draw(&p, &mut b));
        }
        let mut c = RngStream::new(7, 4);
        assert_ne!(sample_draw(&p, &mut RngStream::new(7, 3)), sample_draw(&p, &mut c));
    }

    #[test]
    fn pdf_y_values() {
        let p = unit_params(EhProtocol::Ideal);
        assert_relative_eq!(pdf_y(0.0, &p).unwrap(), 2.0);
        assert_relative_eq!(pdf_y(1.0, &p).unwrap(), 2.0 * (-2f64).exp(), epsilon = 1e-15);
        assert_relative_eq!(pdf_y(1.0, &p).unwrap(), 0.270_670_566_473_225_4, epsilon = 1e-12);
        assert!(matches!(pdf_y(-0.1, &p), Err(Error::Domain { .. })));
    }

    #[test]
    fn pdf_w_atom_and_truncation() {
        // αp = 0.1 and Υσ_rd² = 0.1
        let v = ChannelVariances { sr: 1.0, sd: 1.0, rd: 0.1 };
        let p = SystemParams::new(v, 0.1, 1.0, 1.0, EhProtocol::Ideal).unwrap();
        let b = p.budget();
        let w = pdf_w(0.05, &p, &b).unwrap();
        assert_relative_eq!(w.atom_at, 0.1, epsilon = 1e-15);
        assert_relative_eq!(w.atom_mass, (-1f64).exp(), epsilon = 1e-15);
        assert_relative_eq!(w.atom_mass, 0.367_879_441_171_442_3, epsilon = 1e-12);
        assert_relative_eq!(w.density, 10.0 * (-0.5f64).exp(), epsilon = 1e-12);
        assert_eq!(pdf_w(0.1000001, &p, &b).unwrap().density, 0.0);
        assert_eq!(pdf_w(3.0, &p, &b).unwrap().density, 0.0);
        assert!(pdf_w(-1.0, &p, &b).is_err());
    }

    #[test]
    fn w_mass_is_one_in_closed_form() {
        let law = WLaw { cap: 0.37, mean: 0.21 };
        assert_eq!(law.atom_mass() + law.continuous_mass(), 1.0);
    }

    #[test]
    fn benchmark_has_no_w_or_z() {
        let p = unit_params(EhProtocol::Benchmark);
        let b = p.budget();
        assert!(matches!(pdf_w(0.1, &p, &b), Err(Error::UnsupportedProtocol { .. })));
        assert!(matches!(pdf_z(0.1, &p, &b), Err(Error::UnsupportedProtocol { .. })));
    }

    #[test]
    fn pdf_z_domain() {
        let p = unit_params(EhProtocol::Ideal);
        let b = p.budget();
        assert!(pdf_z(0.0, &p, &b).is_err());
        assert!(pdf_z(-1.0, &p, &b).is_err());
        assert!(pdf_z(1e-9, &p, &b).unwrap().is_finite());
    }

    #[test]
    fn pdf_z_large_upsilon_limit() {
        // Υ → ∞ pins W at αp, so Z = αp·γ_sr.
        let p = unit_params(EhProtocol::time_sharing(0.999_999_9).unwrap());
        let b = p.budget();
        let ap = p.alpha() * b.p_factor;
        for z in [0.01, 0.1, 0.5, 1.0] {
            let want = (-z / ap).exp() / ap;
            assert_relative_eq!(pdf_z(z, &p, &b).unwrap(), want, max_relative = 1e-5);
        }
    }
}
