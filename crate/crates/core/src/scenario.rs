//! Topology generation and instance assembly.
//!
//! Vehicles and cluster heads are dropped uniformly on a square service area.
//! Bandwidth is split evenly: each vehicle's (single) active link receives
//! `n = floor(n_max / M)` units, so the total over active links never exceeds
//! the cell budget. Rates for every vehicle-to-cluster pair come from the
//! channel model with an independent Rayleigh fading draw per pair.

use rand::Rng;
use serde::Serialize;

use crate::channel::{
    sample_rayleigh_gain, transmission_rate, ChannelParams, LinkState,
};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Vehicle {
    pub id: usize,
    pub x_m: f64,
    pub y_m: f64,
    pub tx_power_w: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MiningCluster {
    pub id: usize,
    /// Position of the cluster head, which terminates the offload link.
    pub x_m: f64,
    pub y_m: f64,
    /// Computing vehicles attached to the cluster (slot count).
    pub v_slots: u32,
    /// Admission cap: at most this many offloading vehicles, <= v_slots.
    pub capacity: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScenarioConfig {
    pub area_m: f64,
    pub vehicles: usize,
    pub clusters: usize,
    pub slots_per_cluster: u32,
    pub capacity: u32,
    pub path_loss_exp: f64,
    pub tx_power_w: f64,
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        let mut faults = Vec::new();
        if !(self.area_m > 0.0) {
            faults.push("area_m must be > 0".to_string());
        }
        if self.vehicles == 0 {
            faults.push("vehicles must be >= 1".to_string());
        }
        if self.clusters == 0 {
            faults.push("clusters must be >= 1".to_string());
        }
        if self.slots_per_cluster == 0 {
            faults.push("slots_per_cluster must be >= 1".to_string());
        }
        if self.capacity == 0 || self.capacity > self.slots_per_cluster {
            faults.push(format!(
                "capacity must lie in 1..={}, got {}",
                self.slots_per_cluster, self.capacity
            ));
        }
        if !(self.tx_power_w > 0.0) {
            faults.push("tx_power_w must be > 0".to_string());
        }
        if !self.path_loss_exp.is_finite() || self.path_loss_exp < 0.0 {
            faults.push("path_loss_exp must be finite and >= 0".to_string());
        }
        if faults.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidParameter(faults.join("; ")))
        }
    }
}

/// A fully materialized offloading problem: players plus the rate matrix.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProblemInstance {
    pub vehicles: Vec<Vehicle>,
    pub clusters: Vec<MiningCluster>,
    pub params: ChannelParams,
    /// Row-major M x N matrix of per-slot rates; 0 marks an unusable link.
    rates: Vec<f64>,
    /// Row-major M x N matrix of bandwidth units granted per link.
    n_alloc: Vec<u32>,
}

impl ProblemInstance {
    pub fn from_parts(
        vehicles: Vec<Vehicle>,
        clusters: Vec<MiningCluster>,
        params: ChannelParams,
        rates: Vec<f64>,
        n_alloc: Vec<u32>,
    ) -> Result<Self> {
        let (m, n) = (vehicles.len(), clusters.len());
        if rates.len() != m * n || n_alloc.len() != m * n {
            return Err(Error::InvalidParameter(format!(
                "rate/allocation matrices must be {m}x{n}"
            )));
        }
        if rates.iter().any(|r| !r.is_finite() || *r < 0.0) {
            return Err(Error::InvalidParameter(
                "rates must be finite and >= 0".to_string(),
            ));
        }
        Ok(Self {
            vehicles,
            clusters,
            params,
            rates,
            n_alloc,
        })
    }

    pub fn num_vehicles(&self) -> usize {
        self.vehicles.len()
    }

    pub fn num_clusters(&self) -> usize {
        self.clusters.len()
    }

    /// Per-slot rate of the vehicle `i` to cluster `j` link.
    pub fn rate(&self, vehicle: usize, cluster: usize) -> f64 {
        self.rates[vehicle * self.clusters.len() + cluster]
    }

    pub fn n_units(&self, vehicle: usize, cluster: usize) -> u32 {
        self.n_alloc[vehicle * self.clusters.len() + cluster]
    }

    pub fn is_feasible(&self, vehicle: usize, cluster: usize) -> bool {
        self.rate(vehicle, cluster) > 0.0
    }

    /// Clusters reachable from the vehicle, i.e. with a positive rate.
    pub fn feasible_clusters(&self, vehicle: usize) -> impl Iterator<Item = usize> + '_ {
        let n = self.clusters.len();
        (0..n).filter(move |&j| self.is_feasible(vehicle, j))
    }

    pub fn max_capacity(&self) -> u32 {
        self.clusters.iter().map(|c| c.capacity).max().unwrap_or(0)
    }
}

/// Draws vehicle and cluster-head positions uniformly on the square area.
///
/// Sampling order is fixed (vehicles first, then clusters, x before y), so a
/// given RNG state always produces the same topology.
pub fn generate_topology<R: Rng + ?Sized>(
    config: &ScenarioConfig,
    rng: &mut R,
) -> Result<(Vec<Vehicle>, Vec<MiningCluster>)> {
    config.validate()?;
    let vehicles = (0..config.vehicles)
        .map(|id| Vehicle {
            id,
            x_m: rng.gen::<f64>() * config.area_m,
            y_m: rng.gen::<f64>() * config.area_m,
            tx_power_w: config.tx_power_w,
        })
        .collect();
    let clusters = (0..config.clusters)
        .map(|id| MiningCluster {
            id,
            x_m: rng.gen::<f64>() * config.area_m,
            y_m: rng.gen::<f64>() * config.area_m,
            v_slots: config.slots_per_cluster,
            capacity: config.capacity,
        })
        .collect();
    Ok((vehicles, clusters))
}

/// Even bandwidth split: units granted to each vehicle's active link.
pub fn allocate_bandwidth(vehicles: usize, max_units: u32) -> Result<u32> {
    if vehicles == 0 {
        return Err(Error::InvalidParameter(
            "allocate_bandwidth requires at least one vehicle".to_string(),
        ));
    }
    let n = max_units / vehicles as u32;
    if n == 0 {
        return Err(Error::InfeasibleBandwidth {
            vehicles,
            units: max_units,
        });
    }
    Ok(n)
}

/// Distance used for path loss, clamped at 1 m to avoid a near-field blowup.
fn link_distance(v: &Vehicle, c: &MiningCluster) -> f64 {
    ((v.x_m - c.x_m).hypot(v.y_m - c.y_m)).max(1.0)
}

/// Builds the full rate matrix for a generated topology.
///
/// One fading draw per vehicle-cluster pair, in row-major order; the draw
/// sequence does not depend on the blocklength mode, so finite and infinite
/// variants built from the same seed share their topology and fading.
pub fn build_instance<R: Rng + ?Sized>(
    config: &ScenarioConfig,
    params: &ChannelParams,
    rng: &mut R,
) -> Result<ProblemInstance> {
    params.validate()?;
    let (vehicles, clusters) = generate_topology(config, rng)?;
    let n_units = allocate_bandwidth(vehicles.len(), params.max_bandwidth_units)?;
    let mut rates = Vec::with_capacity(vehicles.len() * clusters.len());
    let mut n_alloc = Vec::with_capacity(vehicles.len() * clusters.len());
    for v in &vehicles {
        for c in &clusters {
            let d = link_distance(v, c);
            let gain = sample_rayleigh_gain(rng, d, config.path_loss_exp)?;
            let link = LinkState::new(gain, v.tx_power_w, n_units)?;
            rates.push(transmission_rate(params, &link)?);
            n_alloc.push(n_units);
        }
    }
    ProblemInstance::from_parts(vehicles, clusters, *params, rates, n_alloc)
}

/// Synthetic instance with a caller-supplied rate matrix, for solver tests
/// and stress configurations that bypass the channel model.
pub fn synthetic_instance(
    rates: Vec<Vec<f64>>,
    slots_per_cluster: u32,
    capacity: u32,
    params: ChannelParams,
) -> Result<ProblemInstance> {
    let m = rates.len();
    let n = rates.first().map_or(0, |row| row.len());
    if m == 0 || n == 0 {
        return Err(Error::InvalidParameter(
            "synthetic_instance requires a non-empty rate matrix".to_string(),
        ));
    }
    if rates.iter().any(|row| row.len() != n) {
        return Err(Error::InvalidParameter(
            "synthetic_instance requires a rectangular rate matrix".to_string(),
        ));
    }
    let vehicles = (0..m)
        .map(|id| Vehicle {
            id,
            x_m: 0.0,
            y_m: 0.0,
            tx_power_w: 1.0,
        })
        .collect();
    let clusters = (0..n)
        .map(|id| MiningCluster {
            id,
            x_m: 0.0,
            y_m: 0.0,
            v_slots: slots_per_cluster,
            capacity,
        })
        .collect();
    let flat: Vec<f64> = rates.into_iter().flatten().collect();
    let alloc = vec![1u32; m * n];
    ProblemInstance::from_parts(vehicles, clusters, params, flat, alloc)
}
