//! Flat `key = value` scenario files.
//!
//! ```text
//! # Fig. 4 style channel
//! sigma2_sr = 10 dB
//! sigma2_sd = 3 dB
//! sigma2_rd = 10 dB
//! alpha     = 0.1
//! protocol  = ps, ts, ideal, benchmark
//! rho       = 0.1
//! ```
//!
//! Power and variance keys (`sigma2_*`, `snr_total`) take either a linear
//! value or a value with a `dB` suffix. Everything is stored in linear scale.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use crate::analytic::QuadratureSpec;
use crate::error::{Error, Result};
use crate::model::{db_to_linear, ChannelVariances, EhProtocol, ProtocolKind, SystemParams};

pub const DEFAULT_ETA: f64 = 0.95;
pub const DEFAULT_N_TRIALS: u64 = 100_000;
pub const DEFAULT_SEED: u64 = 20_201;
pub const DEFAULT_ALPHA: f64 = 0.1;
pub const DEFAULT_SNR_DB: f64 = 20.0;
pub const DEFAULT_SPLIT: f64 = 0.1;

pub const KEYS: [&str; 14] = [
    "sigma2_sr",
    "sigma2_sd",
    "sigma2_rd",
    "alpha",
    "eta",
    "snr_total",
    "protocol",
    "rho",
    "xi",
    "n_trials",
    "seed",
    "method",
    "upper_bound",
    "out",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodChoice {
    Mc,
    Analytic,
    Both,
}

impl MethodChoice {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "mc" => Some(MethodChoice::Mc),
            "analytic" => Some(MethodChoice::Analytic),
            "both" => Some(MethodChoice::Both),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            MethodChoice::Mc => "mc",
            MethodChoice::Analytic => "analytic",
            MethodChoice::Both => "both",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub variances: ChannelVariances,
    pub alpha: f64,
    pub eta: f64,
    /// `P_t / N_0`, linear.
    pub snr_total: f64,
    pub protocols: Vec<ProtocolKind>,
    pub rho: f64,
    pub xi: f64,
    pub n_trials: u64,
    pub seed: u64,
    pub method: MethodChoice,
    pub upper_bound: f64,
    pub out: Option<PathBuf>,
}

impl ScenarioConfig {
    pub fn protocols(&self) -> Vec<EhProtocol> {
        self.protocols
            .iter()
            .map(|k| match k {
                ProtocolKind::PowerSharing => EhProtocol::power_sharing(self.rho),
                ProtocolKind::TimeSharing => EhProtocol::time_sharing(self.xi),
                ProtocolKind::Ideal => Ok(EhProtocol::Ideal),
                ProtocolKind::Benchmark => Ok(EhProtocol::Benchmark),
            })
            .collect::<Result<_>>()
            .expect("split factors validated at parse time")
    }

    /// Parameters with the first listed protocol.
    pub fn base_params(&self) -> SystemParams {
        SystemParams::new(
            self.variances,
            self.alpha,
            self.eta,
            self.snr_total,
            self.protocols()[0],
        )
        .expect("validated at parse time")
    }

    pub fn quadrature(&self) -> QuadratureSpec {
        QuadratureSpec {
            upper_bound: self.upper_bound,
            ..QuadratureSpec::default()
        }
    }

    /// Serializes to the same `key = value` format, in linear scale.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let protocols: Vec<&str> = self.protocols.iter().map(|k| k.name()).collect();
        let _ = writeln!(s, "sigma2_sr = {}", self.variances.sr);
        let _ = writeln!(s, "sigma2_sd = {}", self.variances.sd);
        let _ = writeln!(s, "sigma2_rd = {}", self.variances.rd);
        let _ = writeln!(s, "alpha = {}", self.alpha);
        let _ = writeln!(s, "eta = {}", self.eta);
        let _ = writeln!(s, "snr_total = {}", self.snr_total);
        let _ = writeln!(s, "protocol = {}", protocols.join(", "));
        let _ = writeln!(s, "rho = {}", self.rho);
        let _ = writeln!(s, "xi = {}", self.xi);
        let _ = writeln!(s, "n_trials = {}", self.n_trials);
        let _ = writeln!(s, "seed = {}", self.seed);
        let _ = writeln!(s, "method = {}", self.method.name());
        let _ = writeln!(s, "upper_bound = {}", self.upper_bound);
        if let Some(out) = &self.out {
            let _ = writeln!(s, "out = {}", out.display());
        }
        s
    }
}

fn err(line: usize, message: impl Into<String>) -> Error {
    Error::Config {
        line,
        message: message.into(),
    }
}

fn parse_number(line: usize, key: &str, value: &str) -> Result<f64> {
    value
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| err(line, format!("{key}: expected a number, got {value:?}")))
}

/// Linear value, or dB when suffixed with `dB`.
fn parse_power(line: usize, key: &str, value: &str) -> Result<f64> {
    let lower = value.to_ascii_lowercase();
    match lower.strip_suffix("db") {
        Some(num) => Ok(db_to_linear(parse_number(line, key, num.trim())?)),
        None => parse_number(line, key, value),
    }
}

fn parse_protocols(line: usize, value: &str) -> Result<Vec<ProtocolKind>> {
    let mut kinds = Vec::new();
    for item in value.split(',').map(str::trim) {
        let found: &[ProtocolKind] = match item.to_ascii_lowercase().as_str() {
            "all" => &ProtocolKind::ALL,
            "ps" => &[ProtocolKind::PowerSharing],
            "ts" => &[ProtocolKind::TimeSharing],
            "ideal" => &[ProtocolKind::Ideal],
            "benchmark" => &[ProtocolKind::Benchmark],
            _ => {
                return Err(err(
                    line,
                    format!("unknown protocol {item:?} (expected ps, ts, ideal, benchmark or all)"),
                ))
            }
        };
        for k in found {
            if !kinds.contains(k) {
                kinds.push(*k);
            }
        }
    }
    Ok(kinds)
}

pub fn parse_config(text: &str) -> Result<ScenarioConfig> {
    let mut entries: HashMap<&str, (usize, &str)> = HashMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| err(line, format!("expected `key = value`, got {content:?}")))?;
        let (key, value) = (key.trim(), value.trim());
        let Some(&key) = KEYS.iter().find(|k| **k == key) else {
            return Err(err(line, format!("unknown key {key:?}")));
        };
        if value.is_empty() {
            return Err(err(line, format!("{key}: missing value")));
        }
        if let Some((first, _)) = entries.insert(key, (line, value)) {
            return Err(err(line, format!("{key} already set on line {first}")));
        }
    }

    let end = text.lines().count().max(1);
    let required = |key: &str| -> Result<(usize, &str)> {
        entries
            .get(key)
            .copied()
            .ok_or_else(|| err(end, format!("missing required key {key}")))
    };
    let power = |key: &'static str| -> Result<f64> {
        let (line, v) = required(key)?;
        let x = parse_power(line, key, v)?;
        if x > 0.0 {
            Ok(x)
        } else {
            Err(err(line, format!("{key} must be positive")))
        }
    };
    let number_or = |key: &'static str, default: f64| -> Result<(usize, f64)> {
        match entries.get(key) {
            Some(&(line, v)) => Ok((line, parse_number(line, key, v)?)),
            None => Ok((0, default)),
        }
    };
    let integer_or = |key: &'static str, default: u64| -> Result<(usize, u64)> {
        match entries.get(key) {
            Some(&(line, v)) => v
                .parse::<u64>()
                .map(|n| (line, n))
                .map_err(|_| err(line, format!("{key}: expected a nonnegative integer, got {v:?}"))),
            None => Ok((0, default)),
        }
    };

    let variances = ChannelVariances {
        sr: power("sigma2_sr")?,
        sd: power("sigma2_sd")?,
        rd: power("sigma2_rd")?,
    };
    let (proto_line, proto_text) = required("protocol")?;
    let protocols = parse_protocols(proto_line, proto_text)?;

    let snr_total = match entries.get("snr_total") {
        Some(&(line, v)) => {
            let x = parse_power(line, "snr_total", v)?;
            if !(x > 0.0) {
                return Err(err(line, "snr_total must be positive"));
            }
            x
        }
        None => db_to_linear(DEFAULT_SNR_DB),
    };

    let (alpha_line, alpha) = number_or("alpha", DEFAULT_ALPHA)?;
    let (eta_line, eta) = number_or("eta", DEFAULT_ETA)?;
    let (rho_line, rho) = number_or("rho", DEFAULT_SPLIT)?;
    let (xi_line, xi) = number_or("xi", DEFAULT_SPLIT)?;
    let (trials_line, n_trials) = integer_or("n_trials", DEFAULT_N_TRIALS)?;
    let (_, seed) = integer_or("seed", DEFAULT_SEED)?;
    let (bound_line, upper_bound) = number_or("upper_bound", QuadratureSpec::default().upper_bound)?;

    // Domain checks reuse the model's validation so the messages match.
    let reject = |line: usize, e: Error| err(line, e.to_string());
    SystemParams::new(variances, alpha, DEFAULT_ETA, 1.0, EhProtocol::Ideal)
        .map_err(|e| reject(alpha_line, e))?;
    SystemParams::new(variances, DEFAULT_ALPHA, eta, 1.0, EhProtocol::Ideal)
        .map_err(|e| reject(eta_line, e))?;
    EhProtocol::power_sharing(rho).map_err(|e| reject(rho_line, e))?;
    EhProtocol::time_sharing(xi).map_err(|e| reject(xi_line, e))?;
    if n_trials == 0 {
        return Err(err(trials_line, "n_trials must be at least 1"));
    }
    QuadratureSpec::new(upper_bound, QuadratureSpec::default().rel_tol, 1)
        .map_err(|e| reject(bound_line, e))?;

    let method = match entries.get("method") {
        Some(&(line, v)) => MethodChoice::parse(v)
            .ok_or_else(|| err(line, format!("method: expected mc, analytic or both, got {v:?}")))?,
        None => MethodChoice::Both,
    };
    let out = entries.get("out").map(|&(_, v)| PathBuf::from(v));

    Ok(ScenarioConfig {
        variances,
        alpha,
        eta,
        snr_total,
        protocols,
        rho,
        xi,
        n_trials,
        seed,
        method,
        upper_bound,
        out,
    })
}
