//! Shared fixtures for the criterion benches.

use offload_core::channel::{BlocklengthMode, ChannelParams};
use offload_core::scenario::{build_instance, ProblemInstance, ScenarioConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn bench_params() -> ChannelParams {
    ChannelParams {
        bandwidth_unit_hz: 180e3,
        slot_duration_s: 1e-3,
        max_bandwidth_units: 64,
        noise_psd_w_per_hz: 3.9810717055349695e-21,
        target_error_prob: 1e-3,
        blocklength: BlocklengthMode::Finite,
    }
}

/// Deterministic instance of the given shape, drawn through the full
/// topology and fading pipeline so benches exercise realistic inputs.
pub fn make_instance(vehicles: usize, clusters: usize, slots: u32, seed: u64) -> ProblemInstance {
    let scenario = ScenarioConfig {
        area_m: 2000.0,
        vehicles,
        clusters,
        slots_per_cluster: slots,
        capacity: slots,
        path_loss_exp: 3.2,
        tx_power_w: 0.05,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    build_instance(&scenario, &bench_params(), &mut rng).unwrap()
}
