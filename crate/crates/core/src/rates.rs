//! Instantaneous SINRs and achievable rates for one channel draw.

use crate::channel::ChannelDraw;
use crate::model::{PowerBudget, SystemParams};

/// SINRs of both symbols on every hop. Noise power is one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinrSet {
    /// Strong symbol at the relay, weak symbol treated as noise.
    pub x2_sr: f64,
    /// Strong symbol at the destination, weak symbol treated as noise.
    pub x2_sd: f64,
    /// Weak symbol at the relay after SIC.
    pub x1_sr: f64,
    /// Weak symbol forwarded by the relay.
    pub x1_rd: f64,
}

/// Achievable rates in bits/s/Hz.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatePair {
    pub r1: f64,
    pub r2: f64,
    pub sum: f64,
}

impl RatePair {
    pub fn new(r1: f64, r2: f64) -> Self {
        RatePair { r1, r2, sum: r1 + r2 }
    }
}

fn x2_sinr(alpha: f64, received: f64) -> f64 {
    (1.0 - alpha) * received / (alpha * received + 1.0)
}

pub fn instantaneous_sinrs(params: &SystemParams, budget: &PowerBudget, draw: &ChannelDraw) -> SinrSet {
    let alpha = params.alpha();
    let tx = budget.p_factor * budget.p_source;
    let relay = budget.relay_power(draw.gamma_sr);
    SinrSet {
        x2_sr: x2_sinr(alpha, tx * draw.gamma_sr),
        x2_sd: x2_sinr(alpha, tx * draw.gamma_sd),
        x1_sr: alpha * tx * draw.gamma_sr,
        x1_rd: relay * draw.gamma_rd,
    }
}

/// `log2(1 + x)` without cancellation for small `x`.
pub fn log2_1p(x: f64) -> f64 {
    x.ln_1p() / std::f64::consts::LN_2
}

/// Each symbol is limited by its weakest hop.
pub fn instantaneous_rates(sinrs: &SinrSet, zeta: f64) -> RatePair {
    let r1 = zeta * log2_1p(sinrs.x1_sr.min(sinrs.x1_rd));
    let r2 = zeta * log2_1p(sinrs.x2_sr.min(sinrs.x2_sd));
    RatePair::new(r1, r2)
}

pub fn draw_rates(params: &SystemParams, budget: &PowerBudget, draw: &ChannelDraw) -> RatePair {
    instantaneous_rates(&instantaneous_sinrs(params, budget, draw), budget.zeta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ChannelVariances, EhProtocol};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn params(protocol: EhProtocol, alpha: f64, snr: f64) -> SystemParams {
        SystemParams::new(
            ChannelVariances { sr: 1.0, sd: 1.0, rd: 1.0 },
            alpha,
            0.95,
            snr,
            protocol,
        )
        .unwrap()
    }

    #[test]
    fn sinr_examples() {
        // Ideal gives p = 1 and P_s = 2 P_t, so P_t = 5 means P_s/N0 = 10.
        let p = params(EhProtocol::Ideal, 0.2, 5.0);
        let b = p.budget();
        let d = ChannelDraw {
            gamma_sr: 1.0,
            gamma_sd: 1.0,
            gamma_rd: 1.0,
        };
        let s = instantaneous_sinrs(&p, &b, &d);
        assert_relative_eq!(s.x2_sd, 8.0 / 3.0, epsilon = 1e-14);
        assert_relative_eq!(s.x1_sr, 2.0, epsilon = 1e-14);
        assert_relative_eq!(s.x1_rd, 0.95 * 10.0, epsilon = 1e-14);
    }

    #[test]
    fn zero_gains_zero_sinrs() {
        for proto in [EhProtocol::Ideal, EhProtocol::Benchmark, EhProtocol::power_sharing(0.2).unwrap()] {
            let p = params(proto, 0.2, 100.0);
            let d = ChannelDraw {
                gamma_sr: 0.0,
                gamma_sd: 0.0,
                gamma_rd: 0.0,
            };
            let s = instantaneous_sinrs(&p, &p.budget(), &d);
            assert_eq!((s.x2_sr, s.x2_sd, s.x1_sr, s.x1_rd), (0.0, 0.0, 0.0, 0.0));
            let r = instantaneous_rates(&s, 0.5);
            assert_eq!((r.r1, r.r2, r.sum), (0.0, 0.0, 0.0));
        }
    }

    #[test]
    fn rate_examples() {
        let s = SinrSet {
            x2_sr: 3.0,
            x2_sd: 3.0,
            x1_sr: 2.0,
            x1_rd: 5.0,
        };
        let r = instantaneous_rates(&s, 0.5);
        assert_relative_eq!(r.r1, 0.5 * 3f64.log2(), epsilon = 1e-15);
        assert_relative_eq!(r.r1, 0.792_481_250_360_578_1, epsilon = 1e-12);
        assert_relative_eq!(r.r2, 1.0, epsilon = 1e-15);
        let doubled = instantaneous_rates(&s, 1.0);
        assert_relative_eq!(doubled.r1, 2.0 * r.r1, epsilon = 1e-15);
        assert_relative_eq!(doubled.r2, 2.0 * r.r2, epsilon = 1e-15);
    }

    #[test]
    fn strong_symbol_rate_saturates() {
        let alpha = 0.2;
        let p = params(EhProtocol::Ideal, alpha, 1e6);
        let b = p.budget();
        let d = ChannelDraw {
            gamma_sr: 3.0,
            gamma_sd: 2.0,
            gamma_rd: 1.0,
        };
        let r = draw_rates(&p, &b, &d);
        assert!(r.r2 <= b.zeta * (1.0 / alpha).log2() + 1e-3);
    }

    #[test]
    fn power_sharing_applies_rho_once() {
        let rho = 0.3;
        let p = params(EhProtocol::power_sharing(rho).unwrap(), 0.2, 4.0);
        let b = p.budget();
        let d = ChannelDraw {
            gamma_sr: 0.7,
            gamma_sd: 1.3,
            gamma_rd: 0.4,
        };
        let s = instantaneous_sinrs(&p, &b, &d);
        // Wired by hand: decoding sees (1-ρ)P_s, harvester sees ρP_s.
        let ps = 2.0 * 4.0;
        assert_relative_eq!(s.x1_sr, 0.2 * (1.0 - rho) * ps * 0.7, epsilon = 1e-14);
        assert_relative_eq!(s.x1_rd, 0.95 * rho * ps * 0.7 * 0.4, epsilon = 1e-14);
        assert_relative_eq!(
            s.x2_sd,
            0.8 * (1.0 - rho) * ps * 1.3 / (0.2 * (1.0 - rho) * ps * 1.3 + 1.0),
            epsilon = 1e-14
        );
    }

    #[test]
    fn log_difference_identity() {
        // log2(1 + SINR_x2) = log2(1 + pP_sγ) - log2(1 + αpP_sγ)
        for (alpha, g) in [(0.1, 0.3), (0.2, 5.0), (0.45, 1e-3)] {
            let sinr = x2_sinr(alpha, g);
            assert_relative_eq!(log2_1p(sinr), log2_1p(g) - log2_1p(alpha * g), epsilon = 1e-13);
        }
    }

    proptest! {
        #[test]
        fn rates_monotone_in_gains(
            sr in 0.0f64..20.0, sd in 0.0f64..20.0, rd in 0.0f64..20.0,
            bump in 0.0f64..5.0, which in 0usize..3, pick in 0usize..4,
        ) {
            let proto = [
                EhProtocol::Ideal,
                EhProtocol::Benchmark,
                EhProtocol::power_sharing(0.2).unwrap(),
                EhProtocol::time_sharing(0.1).unwrap(),
            ][pick];
            let p = params(proto, 0.15, 30.0);
            let b = p.budget();
            let d = ChannelDraw { gamma_sr: sr, gamma_sd: sd, gamma_rd: rd };
            let mut e = d;
            match which {
                0 => e.gamma_sr += bump,
                1 => e.gamma_sd += bump,
                _ => e.gamma_rd += bump,
            }
            let before = draw_rates(&p, &b, &d);
            let after = draw_rates(&p, &b, &e);
            prop_assert!(after.r1 >= before.r1);
            prop_assert!(after.r2 >= before.r2);
            prop_assert!(before.r1 >= 0.0 && before.r2 >= 0.0);
            prop_assert_eq!(before.sum, before.r1 + before.r2);
        }
    }
}
