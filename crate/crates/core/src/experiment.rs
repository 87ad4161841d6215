//! Batch experiment execution: sweeps, replications, and result files.
//!
//! Each (sweep point, replication) pair owns a seed derived from the base
//! seed, so results are a pure function of the config and identical under
//! any thread count or execution order. Rows are computed in parallel,
//! then sorted on (sweep_index, replication, algorithm) before writing.
//!
//! Sweeps over delta and epsilon reuse the replication seed across sweep
//! points: those variables do not touch the sampling sequence, so every
//! point sees the same topologies and fading (paired comparisons). Cluster
//! sweeps change the topology dimensions and get independent draws.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::auction::{round_bound, run_auction, AuctionConfig, RoundRecord};
use crate::baseline::nearest_cluster;
use crate::channel::{BlocklengthMode, ChannelParams};
use crate::config::{Algorithm, ResolvedConfig, SweepVar};
use crate::error::{Error, Result};
use crate::graph::{expand_graph, matching_weight};
use crate::metrics::{aggregate, report, MetricsReport, MetricsSummary};
use crate::oracle::{brute_force_optimal, max_weight_matching};
use crate::scenario::{allocate_bandwidth, build_instance, synthetic_instance, ProblemInstance};

/// One line of `runs.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRow {
    pub sweep_index: usize,
    pub sweep_var: String,
    pub sweep_value: Option<f64>,
    pub replication: usize,
    pub seed: u64,
    pub algorithm: String,
    pub vehicles: usize,
    pub clusters: usize,
    pub capacity: u32,
    pub blocklength: String,
    pub delta: f64,
    pub epsilon: f64,
    pub assigned: usize,
    pub jain_index: Option<f64>,
    pub mismanagement_ratio: f64,
    pub sum_log_utility: f64,
    pub mean_rate_bits_per_s: f64,
    pub available_clusters_per_vehicle: Option<f64>,
    pub rounds: Option<u64>,
    pub round_bound: Option<u64>,
    pub oracle_gap: Option<f64>,
}

impl RunRow {
    fn metrics(&self) -> MetricsReport {
        MetricsReport {
            jain_index: self.jain_index,
            mismanagement_ratio: self.mismanagement_ratio,
            sum_log_utility: self.sum_log_utility,
            mean_rate_bits_per_s: self.mean_rate_bits_per_s,
            available_clusters_per_vehicle: self.available_clusters_per_vehicle,
            rounds: self.rounds,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AggregateRow {
    pub sweep_index: usize,
    pub sweep_var: String,
    pub sweep_value: Option<f64>,
    pub algorithm: String,
    pub metrics: MetricsSummary,
}

#[derive(Debug, Serialize)]
struct SummaryFile<'a> {
    config: &'a ResolvedConfig,
    defaults_applied: &'a [String],
    metric_definitions: BTreeMap<&'static str, &'static str>,
    notices: &'a [String],
    aggregates: &'a [AggregateRow],
}

#[derive(Debug)]
pub struct ExperimentOutput {
    pub out_dir: PathBuf,
    pub csv_path: PathBuf,
    pub summary_path: PathBuf,
    pub trace_path: Option<PathBuf>,
    pub rows: usize,
    pub notices: Vec<String>,
}

fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Keyed hash of (base seed, sweep salt, replication); the instance seed.
pub fn derive_seed(base: u64, salt: u64, replication: u64) -> u64 {
    const GOLDEN: u64 = 0x9e3779b97f4a7c15;
    let keyed = mix(base.wrapping_add(GOLDEN.wrapping_mul(salt.wrapping_add(1))));
    mix(keyed.wrapping_add(GOLDEN.wrapping_mul(replication.wrapping_add(1))))
}

fn mode_token(mode: BlocklengthMode) -> &'static str {
    match mode {
        BlocklengthMode::Finite => "finite",
        BlocklengthMode::Infinite => "infinite",
    }
}

fn metric_definitions() -> BTreeMap<&'static str, &'static str> {
    BTreeMap::from([
        (
            "jain_index",
            "(sum x)^2 / (n sum x^2) over per-vehicle shared rates x = rate/S_j in bits \
             per slot, unassigned vehicles contributing 0; empty when every gain is 0",
        ),
        (
            "mismanagement_ratio",
            "unassigned vehicles divided by total vehicles",
        ),
        (
            "sum_log_utility",
            "sum of ln(rate/S_j) in nats over assigned vehicles",
        ),
        (
            "mean_rate_bits_per_s",
            "mean over all vehicles of (rate/S_j)/slot_duration, unassigned counting 0",
        ),
        (
            "available_clusters_per_vehicle",
            "mean count of reachable clusters whose cheapest terminal slot price leaves \
             c + ln(rate) positive; auction rows only",
        ),
        (
            "rounds",
            "auction rounds to the fixed point, including the final bid-free round",
        ),
        (
            "oracle_gap",
            "exact maximum-weight matching minus the auction matching weight; filled by \
             the validate audit",
        ),
    ])
}

/// Applies one sweep value to the base config.
fn at_sweep_point(cfg: &ResolvedConfig, var: SweepVar, value: f64) -> ResolvedConfig {
    let mut point = cfg.clone();
    match var {
        SweepVar::Clusters => point.scenario.clusters = value as usize,
        SweepVar::Delta => point.auction.delta = value,
        SweepVar::Epsilon => point.channel.target_error_prob = value,
    }
    point
}

struct Job {
    sweep_index: usize,
    sweep_var: Option<SweepVar>,
    sweep_value: Option<f64>,
    replication: usize,
    cfg: ResolvedConfig,
    capture_trace: bool,
}

struct JobResult {
    rows: Vec<RunRow>,
    notices: Vec<(usize, usize, String)>,
    trace: Option<Vec<RoundRecord>>,
}

fn run_job(job: &Job) -> Result<JobResult> {
    let cfg = &job.cfg;
    let salt = match job.sweep_var {
        Some(SweepVar::Clusters) => job.sweep_index as u64,
        // Delta and epsilon never touch the sampling stream; sharing the
        // seed across points pairs the draws for low-variance contrasts.
        Some(SweepVar::Delta) | Some(SweepVar::Epsilon) | None => 0,
    };
    let seed = derive_seed(cfg.run.seed, salt, job.replication as u64);

    let needs_finite = cfg.run.algorithms.iter().any(|a| !a.wants_infinite());
    let needs_infinite = cfg.run.algorithms.iter().any(|a| a.wants_infinite());
    let build = |channel: &ChannelParams| -> Result<ProblemInstance> {
        build_instance(&cfg.scenario, channel, &mut ChaCha8Rng::seed_from_u64(seed))
    };
    let inst_fin = if needs_finite { Some(build(&cfg.channel)?) } else { None };
    let channel_inf = ChannelParams {
        blocklength: BlocklengthMode::Infinite,
        ..cfg.channel
    };
    let inst_inf = if needs_infinite { Some(build(&channel_inf)?) } else { None };

    let mut rows = Vec::new();
    let mut notices = Vec::new();
    let mut trace = None;
    let mut trace_pending = job.capture_trace;
    for &algo in &cfg.run.algorithms {
        let (inst, params) = if algo.wants_infinite() {
            (inst_inf.as_ref().expect("built above"), &channel_inf)
        } else {
            (inst_fin.as_ref().expect("built above"), &cfg.channel)
        };
        let mut bound = None;
        let (matching, metrics) = match algo {
            Algorithm::Auction | Algorithm::AuctionInf => {
                let capture = trace_pending;
                let out = run_auction(
                    inst,
                    &AuctionConfig {
                        delta: cfg.auction.delta,
                        c_override: cfg.auction.c_override,
                        record_trace: capture,
                    },
                )?;
                if capture {
                    trace = out.trace.clone();
                    trace_pending = false;
                }
                bound = Some(round_bound(inst, out.delta, out.c_const));
                let m = report(inst, params, &out.matching, Some(&out))?;
                (out.matching, m)
            }
            Algorithm::Nearest | Algorithm::NearestInf => {
                let m = nearest_cluster(inst, !cfg.run.baseline_unbounded);
                let r = report(inst, params, &m, None)?;
                (m, r)
            }
            Algorithm::Bruteforce => match brute_force_optimal(inst) {
                Ok((m, _)) => {
                    let r = report(inst, params, &m, None)?;
                    (m, r)
                }
                Err(Error::SizeGuard { maps, guard }) => {
                    notices.push((
                        job.sweep_index,
                        job.replication,
                        format!(
                            "sweep {} replication {}: bruteforce skipped, {maps:.3e} maps \
                             exceed the {guard:.1e} guard",
                            job.sweep_index, job.replication
                        ),
                    ));
                    continue;
                }
                Err(e) => return Err(e),
            },
        };
        rows.push(RunRow {
            sweep_index: job.sweep_index,
            sweep_var: job
                .sweep_var
                .map_or_else(|| "none".to_string(), |v| v.to_string()),
            sweep_value: job.sweep_value,
            replication: job.replication,
            seed,
            algorithm: algo.token().to_string(),
            vehicles: cfg.scenario.vehicles,
            clusters: cfg.scenario.clusters,
            capacity: cfg.scenario.capacity,
            blocklength: mode_token(params.blocklength).to_string(),
            delta: cfg.auction.delta,
            epsilon: params.target_error_prob,
            assigned: matching.assigned_count(),
            jain_index: metrics.jain_index,
            mismanagement_ratio: metrics.mismanagement_ratio,
            sum_log_utility: metrics.sum_log_utility,
            mean_rate_bits_per_s: metrics.mean_rate_bits_per_s,
            available_clusters_per_vehicle: metrics.available_clusters_per_vehicle,
            rounds: metrics.rounds,
            round_bound: bound,
            oracle_gap: None,
        });
    }
    Ok(JobResult {
        rows,
        notices,
        trace,
    })
}

fn write_outputs(
    cfg: &ResolvedConfig,
    defaults: &[String],
    out_dir: &Path,
    mut rows: Vec<RunRow>,
    mut notices: Vec<(usize, usize, String)>,
    trace: Option<Vec<RoundRecord>>,
) -> Result<ExperimentOutput> {
    std::fs::create_dir_all(out_dir)?;
    rows.sort_by(|a, b| {
        (a.sweep_index, a.replication, &a.algorithm).cmp(&(
            b.sweep_index,
            b.replication,
            &b.algorithm,
        ))
    });
    notices.sort();
    let notices: Vec<String> = notices.into_iter().map(|(_, _, n)| n).collect();

    let csv_path = out_dir.join("runs.csv");
    let mut w = csv::Writer::from_path(&csv_path)?;
    for row in &rows {
        w.serialize(row)?;
    }
    w.flush()?;

    // Aggregate per (sweep point, algorithm) over replications.
    let mut groups: BTreeMap<(usize, String), Vec<MetricsReport>> = BTreeMap::new();
    for row in &rows {
        groups
            .entry((row.sweep_index, row.algorithm.clone()))
            .or_default()
            .push(row.metrics());
    }
    let mut aggregates = Vec::new();
    for ((sweep_index, algorithm), reports) in groups {
        let template = rows
            .iter()
            .find(|r| r.sweep_index == sweep_index && r.algorithm == algorithm)
            .expect("group came from rows");
        aggregates.push(AggregateRow {
            sweep_index,
            sweep_var: template.sweep_var.clone(),
            sweep_value: template.sweep_value,
            algorithm,
            metrics: aggregate(&reports)?,
        });
    }

    let summary_path = out_dir.join("summary.json");
    let summary = SummaryFile {
        config: cfg,
        defaults_applied: defaults,
        metric_definitions: metric_definitions(),
        notices: &notices,
        aggregates: &aggregates,
    };
    std::fs::write(&summary_path, serde_json::to_string_pretty(&summary)? + "\n")?;

    let trace_path = match trace {
        Some(records) => {
            let path = out_dir.join("trace.ndjson");
            let mut lines = String::new();
            for r in &records {
                lines.push_str(&serde_json::to_string(r)?);
                lines.push('\n');
            }
            std::fs::write(&path, lines)?;
            Some(path)
        }
        None => None,
    };

    Ok(ExperimentOutput {
        out_dir: out_dir.to_path_buf(),
        csv_path,
        summary_path,
        trace_path,
        rows: rows.len(),
        notices,
    })
}

/// Runs the configured experiment and writes `runs.csv`, `summary.json`,
/// and (when tracing) `trace.ndjson` under the output directory.
///
/// `out_override` replaces the config's output directory; `threads` pins
/// the worker count (output is identical for any value).
pub fn run_experiment(
    cfg: &ResolvedConfig,
    defaults: &[String],
    out_override: Option<&Path>,
    threads: Option<usize>,
) -> Result<ExperimentOutput> {
    let out_dir = out_override
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from(&cfg.run.out_dir));

    let points: Vec<(usize, Option<SweepVar>, Option<f64>, ResolvedConfig)> =
        match &cfg.run.sweep {
            None => vec![(0, None, None, cfg.clone())],
            Some(sweep) => sweep
                .grid
                .iter()
                .enumerate()
                .map(|(k, &v)| (k, Some(sweep.var), Some(v), at_sweep_point(cfg, sweep.var, v)))
                .collect(),
        };

    let mut jobs = Vec::new();
    let mut notices: Vec<(usize, usize, String)> = Vec::new();
    let trace_algo = cfg
        .run
        .algorithms
        .iter()
        .any(|a| matches!(a, Algorithm::Auction | Algorithm::AuctionInf));
    if cfg.run.trace && !trace_algo {
        notices.push((
            0,
            0,
            "trace requested but no auction algorithm is selected".to_string(),
        ));
    }
    for (sweep_index, sweep_var, sweep_value, point_cfg) in points {
        // A sweep point that cannot split the band is reported, not fatal.
        if let Err(e) = allocate_bandwidth(
            point_cfg.scenario.vehicles,
            point_cfg.channel.max_bandwidth_units,
        ) {
            notices.push((sweep_index, 0, format!("sweep {sweep_index} skipped: {e}")));
            continue;
        }
        for replication in 0..cfg.run.replications {
            jobs.push(Job {
                sweep_index,
                sweep_var,
                sweep_value,
                replication,
                cfg: point_cfg.clone(),
                capture_trace: cfg.run.trace
                    && trace_algo
                    && sweep_index == 0
                    && replication == 0,
            });
        }
    }

    let execute = || -> Result<Vec<JobResult>> {
        jobs.par_iter().map(run_job).collect()
    };
    let results = match threads {
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?
            .install(execute),
        None => execute(),
    }?;

    let mut rows = Vec::new();
    let mut trace = None;
    for r in results {
        rows.extend(r.rows);
        notices.extend(r.notices);
        if r.trace.is_some() {
            trace = r.trace;
        }
    }
    write_outputs(cfg, defaults, &out_dir, rows, notices, trace)
}

/// Per-round trace of the first replication's auction, for the trace mode.
pub fn trace_single(cfg: &ResolvedConfig) -> Result<Vec<RoundRecord>> {
    let job = Job {
        sweep_index: 0,
        sweep_var: None,
        sweep_value: None,
        replication: 0,
        cfg: ResolvedConfig {
            run: crate::config::RunSettings {
                algorithms: vec![if cfg.run.algorithms.iter().any(|a| *a == Algorithm::AuctionInf)
                    && !cfg.run.algorithms.contains(&Algorithm::Auction)
                {
                    Algorithm::AuctionInf
                } else {
                    Algorithm::Auction
                }],
                ..cfg.run.clone()
            },
            ..cfg.clone()
        },
        capture_trace: true,
    };
    let result = run_job(&job)?;
    Ok(result.trace.unwrap_or_default())
}

/// Audit row produced by the validate mode.
#[derive(Debug, Clone, Serialize)]
pub struct ValidateSummary {
    pub instances: usize,
    pub checks: usize,
    pub violations: usize,
    pub worst_gap: f64,
    pub worst_bound: f64,
}

/// Compares the auction against the exact matching oracle on randomized
/// small instances with every link usable, every edge weight positive, and
/// no more vehicles than slots. In that regime the auction provably lands
/// within `M * delta` of the exact optimum; oversubscribed instances can
/// overshoot it when a bidder pays down to a negative second-best margin,
/// so they are excluded by construction. Writes the same runs.csv and
/// summary.json pair with the gap column filled; a gap above `M * delta`
/// counts as a violation.
pub fn oracle_gap_audit(
    instances: usize,
    base_seed: u64,
    out_dir: &Path,
) -> Result<(ExperimentOutput, ValidateSummary)> {
    use rand::Rng;

    const DELTAS: [f64; 3] = [1e-5, 1e-4, 1e-3];
    let params = ChannelParams {
        bandwidth_unit_hz: 1.0,
        slot_duration_s: 1.0,
        max_bandwidth_units: 64,
        noise_psd_w_per_hz: 1.0,
        target_error_prob: 1e-3,
        blocklength: BlocklengthMode::Finite,
    };
    let mut rows = Vec::new();
    let mut checks = 0usize;
    let mut violations = 0usize;
    let mut worst_gap = f64::NEG_INFINITY;
    let mut worst_bound = f64::INFINITY;
    for k in 0..instances {
        let seed = derive_seed(base_seed, 0xa0d17, k as u64);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(1..=3usize);
        let cap = if n == 1 {
            rng.gen_range(2..=3u32)
        } else {
            rng.gen_range(1..=3u32)
        };
        let m = rng.gen_range(2..=(n * cap as usize).min(6));
        let rates: Vec<Vec<f64>> = (0..m)
            .map(|_| {
                (0..n)
                    .map(|_| f64::exp(rng.gen_range(f64::ln(8.0)..f64::ln(100.0))))
                    .collect()
            })
            .collect();
        let inst = synthetic_instance(rates, cap, cap, params)?;
        let (_, oracle_weight) = max_weight_matching(&expand_graph(&inst), m)?;
        for (di, &delta) in DELTAS.iter().enumerate() {
            let out = run_auction(
                &inst,
                &AuctionConfig {
                    delta,
                    ..Default::default()
                },
            )?;
            let auction_weight = matching_weight(&inst, &out.matching)?;
            let gap = oracle_weight - auction_weight;
            let bound = m as f64 * delta;
            checks += 1;
            if gap > bound + 1e-9 || gap < -1e-9 {
                violations += 1;
            }
            if gap > worst_gap {
                worst_gap = gap;
                worst_bound = bound;
            }
            let metrics = report(&inst, &params, &out.matching, Some(&out))?;
            rows.push(RunRow {
                sweep_index: di,
                sweep_var: "delta".to_string(),
                sweep_value: Some(delta),
                replication: k,
                seed,
                algorithm: Algorithm::Auction.token().to_string(),
                vehicles: m,
                clusters: n,
                capacity: cap,
                blocklength: mode_token(params.blocklength).to_string(),
                delta,
                epsilon: params.target_error_prob,
                assigned: out.matching.assigned_count(),
                jain_index: metrics.jain_index,
                mismanagement_ratio: metrics.mismanagement_ratio,
                sum_log_utility: metrics.sum_log_utility,
                mean_rate_bits_per_s: metrics.mean_rate_bits_per_s,
                available_clusters_per_vehicle: metrics.available_clusters_per_vehicle,
                rounds: metrics.rounds,
                round_bound: Some(round_bound(&inst, delta, out.c_const)),
                oracle_gap: Some(gap),
            });
        }
    }
    let cfg = validate_mode_config(instances, base_seed);
    let notices = vec![format!(
        "validate: {checks} checks over {instances} instances, {violations} violations, \
         worst gap {worst_gap:.3e} against bound {worst_bound:.3e}"
    )];
    let output = write_outputs(
        &cfg,
        &[],
        out_dir,
        rows,
        notices.into_iter().map(|n| (0, 0, n)).collect(),
        None,
    )?;
    Ok((
        output,
        ValidateSummary {
            instances,
            checks,
            violations,
            worst_gap,
            worst_bound,
        },
    ))
}

/// Config echo for the validate audit's summary file.
fn validate_mode_config(instances: usize, seed: u64) -> ResolvedConfig {
    use crate::config::{AuctionSettings, RunSettings};
    use crate::scenario::ScenarioConfig;
    ResolvedConfig {
        scenario: ScenarioConfig {
            area_m: 1.0,
            vehicles: 6,
            clusters: 3,
            slots_per_cluster: 3,
            capacity: 3,
            path_loss_exp: 0.0,
            tx_power_w: 1.0,
        },
        channel: ChannelParams {
            bandwidth_unit_hz: 1.0,
            slot_duration_s: 1.0,
            max_bandwidth_units: 64,
            noise_psd_w_per_hz: 1.0,
            target_error_prob: 1e-3,
            blocklength: BlocklengthMode::Finite,
        },
        auction: AuctionSettings {
            delta: 1e-4,
            c_override: None,
        },
        run: RunSettings {
            seed,
            replications: instances,
            algorithms: vec![Algorithm::Auction],
            sweep: None,
            trace: false,
            baseline_unbounded: false,
            out_dir: "validate".to_string(),
        },
    }
}
