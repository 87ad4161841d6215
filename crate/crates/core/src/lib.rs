//! Deterministic simulator and solvers for auction-based mining-cluster
//! selection in cellular V2X task offloading.
//!
//! The crate models offloading vehicles that pick a mining cluster over a
//! finite-blocklength radio link. Cluster selection runs as a distributed
//! ascending auction over an expanded bipartite graph whose slots encode the
//! load-sharing penalty of joining an already busy cluster. Exact solvers,
//! a nearest-cluster baseline, and a batch experiment runner round out the
//! library.

pub mod auction;
pub mod baseline;
pub mod channel;
pub mod config;
pub mod error;
pub mod experiment;
pub mod graph;
pub mod metrics;
pub mod oracle;
pub mod scenario;

pub use auction::{
    default_c_const, init_prices, round_bound, run_auction, AuctionConfig, AuctionOutcome,
    AuctionState, Award, Bid, RoundRecord,
};
pub use baseline::nearest_cluster;
pub use channel::{
    channel_dispersion, inverse_q, q_function, sample_rayleigh_gain, transmission_rate,
    BlocklengthMode, ChannelParams, LinkState,
};
pub use config::{
    load_config, parse_config, validate_config, Algorithm, ResolvedConfig, Sweep, SweepVar,
};
pub use error::{Error, Result};
pub use experiment::{
    derive_seed, oracle_gap_audit, run_experiment, trace_single, ExperimentOutput, RunRow,
};
pub use graph::{
    edge_weight, expand_graph, matching_weight, objective_value, slot_occupancy_cost,
    verify_matching, ExpandedEdge, Matching,
};
pub use metrics::{
    aggregate, available_clusters_per_vehicle, jain_fairness, mismanagement_ratio, offload_gains,
    report, FieldSummary, MetricsReport, MetricsSummary,
};
pub use oracle::{brute_force_optimal, max_weight_matching};
pub use scenario::{
    allocate_bandwidth, build_instance, generate_topology, synthetic_instance, MiningCluster,
    ProblemInstance, ScenarioConfig, Vehicle,
};
