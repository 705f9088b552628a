//! Closed-form reference values built on the exponential integral E1.
//!
//! For `X ~ Exp(1)`, `E[ln(1 + cX)] = e^{1/c} E1(1/c)`, which gives every
//! single-exponential rate integral in closed form. Nothing here touches the
//! crate's quadrature.
#![allow(dead_code)]

use noma_wpt::model::{ChannelVariances, EhProtocol, SystemParams};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// `e^x E1(x)` for `x > 0`.
pub fn exp_e1(x: f64) -> f64 {
    assert!(x > 0.0);
    if x <= 1.0 {
        let mut sum = 0.0;
        let mut term = 1.0;
        for k in 1..200 {
            term *= -x / k as f64;
            let add = term / k as f64;
            sum += add;
            if add.abs() < 1e-18 {
                break;
            }
        }
        x.exp() * (-EULER_GAMMA - x.ln() - sum)
    } else {
        // Modified Lentz on the continued fraction 1/(x+1- 1/(x+3- 4/(x+5- ...))).
        let tiny = 1e-300;
        let mut b = x + 1.0;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..10_000 {
            let an = -((i * i) as f64);
            b += 2.0;
            d = 1.0 / (an * d + b);
            c = b + an / c;
            let del = c * d;
            h *= del;
            if (del - 1.0).abs() < 1e-16 {
                break;
            }
        }
        h
    }
}

pub fn e1(x: f64) -> f64 {
    exp_e1(x) * (-x).exp()
}

/// `E[log2(1 + cX)]` for `X ~ Exp(1)`.
pub fn mean_log2_1p(c: f64) -> f64 {
    if c <= 0.0 {
        return 0.0;
    }
    exp_e1(1.0 / c) / std::f64::consts::LN_2
}

fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + h * i as f64);
    }
    s * h / 3.0
}

/// Reference (c1, c2) from closed forms plus a one-dimensional Simpson rule
/// over the continuous part of `W`.
pub fn reference_rates(params: &SystemParams) -> (f64, f64) {
    let b = params.budget();
    let v = params.variances();
    let alpha = params.alpha();
    let tx = b.p_factor * b.p_source;
    let mean_y = 1.0 / (1.0 / v.sr + 1.0 / v.sd);
    let c2 = b.zeta * (mean_log2_1p(tx * mean_y) - mean_log2_1p(alpha * tx * mean_y));
    let c1 = match b.upsilon {
        None => {
            let mean_v = 1.0 / (1.0 / (alpha * v.sr) + 1.0 / v.rd);
            b.zeta * mean_log2_1p(b.p_total * mean_v)
        }
        Some(upsilon) => {
            // Given W = w, Z = w γ_sr is exponential with mean w σ_sr².
            let cap = alpha * b.p_factor;
            let m = upsilon * v.rd;
            let atom = (-cap / m).exp() * mean_log2_1p(b.p_source * cap * v.sr);
            let cont = simpson(
                |w| (-w / m).exp() / m * mean_log2_1p(b.p_source * w * v.sr),
                0.0,
                cap,
                20_000,
            );
            b.zeta * (atom + cont)
        }
    };
    (c1, c2)
}

pub fn weak() -> ChannelVariances {
    ChannelVariances::from_db(3.0, 0.0, 3.0)
}

pub fn strong() -> ChannelVariances {
    ChannelVariances::from_db(10.0, 3.0, 10.0)
}

pub fn params(v: ChannelVariances, alpha: f64, snr_db: f64, protocol: EhProtocol) -> SystemParams {
    SystemParams::new(v, alpha, 0.95, noma_wpt::model::db_to_linear(snr_db), protocol).unwrap()
}

/// PS(0.1), PS(0.3), TS(0.1), TS(0.2), Ideal, Benchmark.
pub fn sample_protocols() -> Vec<EhProtocol> {
    vec![
        EhProtocol::power_sharing(0.1).unwrap(),
        EhProtocol::power_sharing(0.3).unwrap(),
        EhProtocol::time_sharing(0.1).unwrap(),
        EhProtocol::time_sharing(0.2).unwrap(),
        EhProtocol::Ideal,
        EhProtocol::Benchmark,
    ]
}
