//! Experiment configuration: TOML ingestion, defaults, validation.
//!
//! Every key is optional; omitted ones take documented defaults and are
//! reported back in `defaults_applied` so each output records exactly what
//! it ran with. Unknown keys are rejected rather than ignored, and
//! validation collects every violation instead of stopping at the first.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::channel::{BlocklengthMode, ChannelParams};
use crate::error::{Error, Result};
use crate::scenario::ScenarioConfig;

/// 25 dBm in watts.
const DEFAULT_TX_POWER_W: f64 = 0.31622776601683794;
/// -174 dBm/Hz thermal noise floor in W/Hz.
const DEFAULT_NOISE_PSD: f64 = 3.9810717055349695e-21;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Auction,
    AuctionInf,
    Nearest,
    NearestInf,
    Bruteforce,
}

impl Algorithm {
    pub fn token(self) -> &'static str {
        match self {
            Algorithm::Auction => "auction",
            Algorithm::AuctionInf => "auction_inf",
            Algorithm::Nearest => "nearest",
            Algorithm::NearestInf => "nearest_inf",
            Algorithm::Bruteforce => "bruteforce",
        }
    }

    /// Runs against the infinite-blocklength variant of the instance.
    pub fn wants_infinite(self) -> bool {
        matches!(self, Algorithm::AuctionInf | Algorithm::NearestInf)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVar {
    Clusters,
    Delta,
    Epsilon,
}

impl fmt::Display for SweepVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweepVar::Clusters => "clusters",
            SweepVar::Delta => "delta",
            SweepVar::Epsilon => "epsilon",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub var: SweepVar,
    pub grid: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AuctionSettings {
    pub delta: f64,
    pub c_override: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSettings {
    pub seed: u64,
    pub replications: usize,
    pub algorithms: Vec<Algorithm>,
    pub sweep: Option<Sweep>,
    pub trace: bool,
    /// Lets the nearest-cluster baseline ignore capacity for comparison.
    pub baseline_unbounded: bool,
    pub out_dir: String,
}

/// A fully validated experiment description; the JSON summary echoes it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResolvedConfig {
    pub scenario: ScenarioConfig,
    pub channel: ChannelParams,
    pub auction: AuctionSettings,
    pub run: RunSettings,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    area_m: Option<f64>,
    vehicles: Option<usize>,
    clusters: Option<usize>,
    cluster_size: Option<u32>,
    capacity: Option<u32>,
    path_loss_exp: Option<f64>,
    tx_power_w: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawChannel {
    bandwidth_unit_hz: Option<f64>,
    slot_duration_s: Option<f64>,
    max_bandwidth_units: Option<u32>,
    noise_psd_w_per_hz: Option<f64>,
    target_error_prob: Option<f64>,
    blocklength: Option<BlocklengthMode>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAuction {
    delta: Option<f64>,
    c_override: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRun {
    seed: Option<u64>,
    replications: Option<usize>,
    algorithms: Option<Vec<Algorithm>>,
    sweep: Option<Sweep>,
    trace: Option<bool>,
    baseline_unbounded: Option<bool>,
    out_dir: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    scenario: Option<RawScenario>,
    channel: Option<RawChannel>,
    auction: Option<RawAuction>,
    run: Option<RawRun>,
}

/// Tracks which values came from defaults rather than the file.
struct Defaults(Vec<String>);

impl Defaults {
    fn take<T: fmt::Display>(&mut self, given: Option<T>, key: &str, fallback: T) -> T {
        match given {
            Some(v) => v,
            None => {
                self.0.push(format!("{key} = {fallback}"));
                fallback
            }
        }
    }
}

/// Parses and validates a TOML experiment config.
pub fn load_config(path: &Path) -> Result<(ResolvedConfig, Vec<String>)> {
    let text = std::fs::read_to_string(path)?;
    parse_config(&text)
}

/// Same as `load_config` but from an in-memory string.
pub fn parse_config(text: &str) -> Result<(ResolvedConfig, Vec<String>)> {
    let raw: RawConfig =
        toml::from_str(text).map_err(|e| Error::Config(format!("parse error: {e}")))?;
    resolve(raw)
}

fn resolve(raw: RawConfig) -> Result<(ResolvedConfig, Vec<String>)> {
    let mut d = Defaults(Vec::new());
    let s = raw.scenario.unwrap_or_default();
    let ch = raw.channel.unwrap_or_default();
    let a = raw.auction.unwrap_or_default();
    let r = raw.run.unwrap_or_default();

    let cluster_size = d.take(s.cluster_size, "scenario.cluster_size", 5);
    let capacity = d.take(s.capacity, "scenario.capacity", cluster_size);
    let scenario = ScenarioConfig {
        area_m: d.take(s.area_m, "scenario.area_m", 1000.0),
        vehicles: d.take(s.vehicles, "scenario.vehicles", 30),
        clusters: d.take(s.clusters, "scenario.clusters", 10),
        slots_per_cluster: cluster_size,
        capacity,
        path_loss_exp: d.take(s.path_loss_exp, "scenario.path_loss_exp", 3.0),
        tx_power_w: d.take(s.tx_power_w, "scenario.tx_power_w", DEFAULT_TX_POWER_W),
    };
    let channel = ChannelParams {
        bandwidth_unit_hz: d.take(ch.bandwidth_unit_hz, "channel.bandwidth_unit_hz", 180_000.0),
        slot_duration_s: d.take(ch.slot_duration_s, "channel.slot_duration_s", 0.001),
        max_bandwidth_units: d.take(ch.max_bandwidth_units, "channel.max_bandwidth_units", 64),
        noise_psd_w_per_hz: d.take(
            ch.noise_psd_w_per_hz,
            "channel.noise_psd_w_per_hz",
            DEFAULT_NOISE_PSD,
        ),
        target_error_prob: d.take(ch.target_error_prob, "channel.target_error_prob", 1e-3),
        blocklength: match ch.blocklength {
            Some(b) => b,
            None => {
                d.0.push("channel.blocklength = finite".to_string());
                BlocklengthMode::Finite
            }
        },
    };
    let auction = AuctionSettings {
        delta: d.take(a.delta, "auction.delta", 1e-4),
        c_override: a.c_override,
    };
    let algorithms = match r.algorithms {
        Some(v) => v,
        None => {
            d.0.push("run.algorithms = [auction, nearest]".to_string());
            vec![Algorithm::Auction, Algorithm::Nearest]
        }
    };
    let run = RunSettings {
        seed: d.take(r.seed, "run.seed", 1),
        replications: d.take(r.replications, "run.replications", 100),
        algorithms,
        sweep: r.sweep,
        trace: d.take(r.trace, "run.trace", false),
        baseline_unbounded: d.take(r.baseline_unbounded, "run.baseline_unbounded", false),
        out_dir: d.take(r.out_dir, "run.out_dir", "results".to_string()),
    };

    let cfg = ResolvedConfig {
        scenario,
        channel,
        auction,
        run,
    };
    validate_config(&cfg)?;
    Ok((cfg, d.0))
}

/// Re-checks every constraint; call after mutating a loaded config.
pub fn validate_config(cfg: &ResolvedConfig) -> Result<()> {
    let mut faults = Vec::new();
    if let Err(Error::InvalidParameter(msg)) = cfg.scenario.validate() {
        faults.push(msg);
    }
    if let Err(Error::InvalidParameter(msg)) = cfg.channel.validate() {
        faults.push(msg);
    }
    let eps = cfg.channel.target_error_prob;
    if !(eps > 0.0 && eps <= 0.5) {
        faults.push(format!(
            "channel.target_error_prob must lie in (0, 0.5], got {eps}"
        ));
    }
    if !(cfg.auction.delta > 0.0) || !cfg.auction.delta.is_finite() {
        faults.push(format!(
            "auction.delta must be > 0, got {}",
            cfg.auction.delta
        ));
    }
    if let Some(c) = cfg.auction.c_override {
        if !c.is_finite() {
            faults.push(format!("auction.c_override must be finite, got {c}"));
        }
    }
    if cfg.run.replications == 0 {
        faults.push("run.replications must be >= 1".to_string());
    }
    if cfg.run.algorithms.is_empty() {
        faults.push("run.algorithms must name at least one algorithm".to_string());
    }
    let mut sorted = cfg.run.algorithms.clone();
    sorted.sort();
    sorted.dedup();
    if sorted.len() != cfg.run.algorithms.len() {
        faults.push("run.algorithms contains duplicates".to_string());
    }
    if let Some(sweep) = &cfg.run.sweep {
        if sweep.grid.is_empty() {
            faults.push("run.sweep.grid must be non-empty".to_string());
        }
        for &v in &sweep.grid {
            match sweep.var {
                SweepVar::Clusters => {
                    if v.fract() != 0.0 || v < 1.0 || v > 10_000.0 {
                        faults.push(format!(
                            "run.sweep.grid: cluster counts must be positive integers, got {v}"
                        ));
                    }
                }
                SweepVar::Delta => {
                    if !(v > 0.0) || !v.is_finite() {
                        faults.push(format!("run.sweep.grid: delta must be > 0, got {v}"));
                    }
                }
                SweepVar::Epsilon => {
                    if !(v > 0.0 && v <= 0.5) {
                        faults.push(format!(
                            "run.sweep.grid: epsilon must lie in (0, 0.5], got {v}"
                        ));
                    }
                }
            }
        }
    }
    if faults.is_empty() {
        Ok(())
    } else {
        Err(Error::Config(faults.join("; ")))
    }
}
