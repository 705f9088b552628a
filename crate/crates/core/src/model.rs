//! Scenario parameters and the per-protocol power budget.
//!
//! Noise power is normalized to one, so every power below is an SNR in linear
//! scale and `snr_total` plays the role of the total transmit power `P_t`.
//! The frame duration is normalized to one as well.

use std::fmt;

use crate::error::{Error, Result};

/// Normalized frame duration.
pub const FRAME_DURATION: f64 = 1.0;

/// Converts a decibel value to linear scale.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

/// A fraction strictly inside `(0, 1)`, used for the power-splitting factor
/// and the time-splitting factor.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct SplitFactor(f64);

impl SplitFactor {
    pub fn new(name: &'static str, value: f64) -> Result<Self> {
        if value > 0.0 && value < 1.0 {
            Ok(SplitFactor(value))
        } else {
            Err(Error::InvalidParameter {
                name,
                value,
                reason: "must lie strictly between 0 and 1",
            })
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

/// Energy-harvesting protocol at the relay.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EhProtocol {
    /// A fraction `rho` of the received power at the relay is diverted to the
    /// harvester while the remainder is used for decoding.
    PowerSharing(SplitFactor),
    /// The first `xi` of the frame is spent harvesting; the rest is split
    /// equally between the two transmission phases.
    TimeSharing(SplitFactor),
    /// Harvesting and decoding both see the full received signal.
    Ideal,
    /// No harvesting; the relay has its own supply and the total power is
    /// shared equally with the source.
    Benchmark,
}

/// Protocol family without its parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProtocolKind {
    PowerSharing,
    TimeSharing,
    Ideal,
    Benchmark,
}

impl ProtocolKind {
    pub const ALL: [ProtocolKind; 4] = [
        ProtocolKind::PowerSharing,
        ProtocolKind::TimeSharing,
        ProtocolKind::Ideal,
        ProtocolKind::Benchmark,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ProtocolKind::PowerSharing => "ps",
            ProtocolKind::TimeSharing => "ts",
            ProtocolKind::Ideal => "ideal",
            ProtocolKind::Benchmark => "benchmark",
        }
    }
}

impl EhProtocol {
    pub fn power_sharing(rho: f64) -> Result<Self> {
        SplitFactor::new("rho", rho).map(EhProtocol::PowerSharing)
    }

    pub fn time_sharing(xi: f64) -> Result<Self> {
        SplitFactor::new("xi", xi).map(EhProtocol::TimeSharing)
    }

    pub fn kind(&self) -> ProtocolKind {
        match self {
            EhProtocol::PowerSharing(_) => ProtocolKind::PowerSharing,
            EhProtocol::TimeSharing(_) => ProtocolKind::TimeSharing,
            EhProtocol::Ideal => ProtocolKind::Ideal,
            EhProtocol::Benchmark => ProtocolKind::Benchmark,
        }
    }

    pub fn name(&self) -> &'static str {
        self.kind().name()
    }

    pub fn harvests(&self) -> bool {
        !matches!(self, EhProtocol::Benchmark)
    }

    /// Short identifier used for table columns, e.g. `ps_rho0.1`.
    pub fn label(&self) -> String {
        match self {
            EhProtocol::PowerSharing(rho) => format!("ps_rho{}", rho.get()),
            EhProtocol::TimeSharing(xi) => format!("ts_xi{}", xi.get()),
            EhProtocol::Ideal => "ideal".to_string(),
            EhProtocol::Benchmark => "benchmark".to_string(),
        }
    }

    /// How the frame is divided between harvesting, source transmission and
    /// relay transmission.
    pub fn schedule(&self) -> FrameSchedule {
        match self {
            EhProtocol::TimeSharing(xi) => {
                let xi = xi.get();
                FrameSchedule {
                    harvest_only: xi,
                    source_info: (1.0 - xi) / 2.0,
                    relay: (1.0 - xi) / 2.0,
                }
            }
            _ => FrameSchedule {
                harvest_only: 0.0,
                source_info: 0.5,
                relay: 0.5,
            },
        }
    }
}

impl fmt::Display for EhProtocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EhProtocol::PowerSharing(rho) => write!(f, "PS(rho={})", rho.get()),
            EhProtocol::TimeSharing(xi) => write!(f, "TS(xi={})", xi.get()),
            EhProtocol::Ideal => f.write_str("Ideal"),
            EhProtocol::Benchmark => f.write_str("Benchmark"),
        }
    }
}

/// Fractions of the frame spent in each slot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameSchedule {
    /// Slot where the source transmits only to power the relay.
    pub harvest_only: f64,
    /// First information phase (source broadcasts the superposed symbols).
    pub source_info: f64,
    /// Second phase (relay forwards the low-power symbol).
    pub relay: f64,
}

impl FrameSchedule {
    pub fn source_active(&self) -> f64 {
        self.harvest_only + self.source_info
    }

    pub fn total(&self) -> f64 {
        self.harvest_only + self.source_info + self.relay
    }
}

/// Mean power gains of the three links, linear scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelVariances {
    pub sr: f64,
    pub sd: f64,
    pub rd: f64,
}

impl ChannelVariances {
    pub fn from_db(sr: f64, sd: f64, rd: f64) -> Self {
        ChannelVariances {
            sr: db_to_linear(sr),
            sd: db_to_linear(sd),
            rd: db_to_linear(rd),
        }
    }
}

/// Validated scenario constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    variances: ChannelVariances,
    alpha: f64,
    eta: f64,
    snr_total: f64,
    protocol: EhProtocol,
}

fn positive(name: &'static str, value: f64) -> Result<f64> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be positive and finite",
        })
    }
}

fn check_alpha(alpha: f64) -> Result<f64> {
    if alpha > 0.0 && alpha < 0.5 {
        Ok(alpha)
    } else {
        Err(Error::InvalidParameter {
            name: "alpha",
            value: alpha,
            reason: "power allocation coefficient must satisfy 0 < alpha < 0.5",
        })
    }
}

fn check_eta(eta: f64) -> Result<f64> {
    if eta > 0.0 && eta <= 1.0 {
        Ok(eta)
    } else {
        Err(Error::InvalidParameter {
            name: "eta",
            value: eta,
            reason: "energy conversion coefficient must satisfy 0 < eta <= 1",
        })
    }
}

impl SystemParams {
    pub fn new(
        variances: ChannelVariances,
        alpha: f64,
        eta: f64,
        snr_total: f64,
        protocol: EhProtocol,
    ) -> Result<Self> {
        positive("sigma2_sr", variances.sr)?;
        positive("sigma2_sd", variances.sd)?;
        positive("sigma2_rd", variances.rd)?;
        Ok(SystemParams {
            variances,
            alpha: check_alpha(alpha)?,
            eta: check_eta(eta)?,
            snr_total: positive("snr_total", snr_total)?,
            protocol,
        })
    }

    pub fn variances(&self) -> ChannelVariances {
        self.variances
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// Total transmit SNR `P_t / N_0`, linear.
    pub fn snr_total(&self) -> f64 {
        self.snr_total
    }

    pub fn protocol(&self) -> EhProtocol {
        self.protocol
    }

    pub fn frame_duration(&self) -> f64 {
        FRAME_DURATION
    }

    pub fn with_protocol(mut self, protocol: EhProtocol) -> Self {
        self.protocol = protocol;
        self
    }

    pub fn with_alpha(mut self, alpha: f64) -> Result<Self> {
        self.alpha = check_alpha(alpha)?;
        Ok(self)
    }

    pub fn with_eta(mut self, eta: f64) -> Result<Self> {
        self.eta = check_eta(eta)?;
        Ok(self)
    }

    pub fn with_snr_total(mut self, snr_total: f64) -> Result<Self> {
        self.snr_total = positive("snr_total", snr_total)?;
        Ok(self)
    }

    pub fn with_snr_db(self, snr_db: f64) -> Result<Self> {
        self.with_snr_total(db_to_linear(snr_db))
    }

    pub fn budget(&self) -> PowerBudget {
        power_budget(self)
    }
}

/// Source transmit power for a total budget `p_t`.
pub fn source_power(protocol: EhProtocol, p_t: f64) -> f64 {
    match protocol {
        EhProtocol::PowerSharing(_) | EhProtocol::Ideal => 2.0 * p_t,
        EhProtocol::TimeSharing(xi) => 2.0 * p_t / (1.0 + xi.get()),
        EhProtocol::Benchmark => p_t,
    }
}

/// Relay transmit power given the source power and the S-R gain.
///
/// For the benchmark the relay runs from its own share of the budget, which
/// equals the source power, so `p_s` is returned unchanged.
pub fn relay_power(protocol: EhProtocol, p_s: f64, gamma_sr: f64, eta: f64) -> f64 {
    match protocol {
        EhProtocol::PowerSharing(rho) => eta * rho.get() * p_s * gamma_sr,
        EhProtocol::TimeSharing(xi) => {
            let xi = xi.get();
            2.0 * eta * (xi / (1.0 - xi)) * p_s * gamma_sr
        }
        EhProtocol::Ideal => eta * p_s * gamma_sr,
        EhProtocol::Benchmark => p_s,
    }
}

/// Protocol-dependent constants shared by the instantaneous and ergodic rate
/// computations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerBudget {
    pub protocol: EhProtocol,
    /// Total power `P_t` (as SNR).
    pub p_total: f64,
    /// Source transmit power `P_s` (as SNR).
    pub p_source: f64,
    /// Fraction of the received signal power left for information decoding.
    pub p_factor: f64,
    /// Rate prefactor: share of the frame carrying data on each hop.
    pub zeta: f64,
    /// Harvesting coefficient: relay power is `upsilon * p_source * gamma_sr`.
    /// `None` for the benchmark.
    pub upsilon: Option<f64>,
    pub eta: f64,
}

impl PowerBudget {
    pub fn relay_power(&self, gamma_sr: f64) -> f64 {
        relay_power(self.protocol, self.p_source, gamma_sr, self.eta)
    }

    /// Transmit energy drawn per frame of length `frame`.
    pub fn frame_energy(&self, frame: f64) -> f64 {
        let schedule = self.protocol.schedule();
        let source = self.p_source * schedule.source_active() * frame;
        match self.protocol {
            // The relay spends only what it harvested.
            EhProtocol::Benchmark => source + self.relay_power(0.0) * schedule.relay * frame,
            _ => source,
        }
    }
}

pub fn power_budget(params: &SystemParams) -> PowerBudget {
    let protocol = params.protocol;
    let eta = params.eta;
    let (p_factor, zeta, upsilon) = match protocol {
        EhProtocol::PowerSharing(rho) => (1.0 - rho.get(), 0.5, Some(eta * rho.get())),
        EhProtocol::TimeSharing(xi) => {
            let xi = xi.get();
            (1.0, (1.0 - xi) / 2.0, Some(2.0 * eta * xi / (1.0 - xi)))
        }
        EhProtocol::Ideal => (1.0, 0.5, Some(eta)),
        EhProtocol::Benchmark => (1.0, 0.5, None),
    };
    PowerBudget {
        protocol,
        p_total: params.snr_total,
        p_source: source_power(protocol, params.snr_total),
        p_factor,
        zeta,
        upsilon,
        eta,
    }
}
