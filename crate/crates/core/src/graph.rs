//! Expanded bipartite assignment graph.
//!
//! Each cluster with capacity `alpha` is split into slots `s = 1..=alpha`.
//! An edge from vehicle `i` to slot `s` of cluster `j` carries weight
//!
//! ```text
//! w[i][j][s] = ln(rate_ij) - (s*ln(s) - (s-1)*ln(s-1))
//! ```
//!
//! with the `0*ln(0) = 0` convention. The bracketed term is the extra cost
//! of being the s-th tenant: filling slots 1..=S telescopes to `S*ln(S)`, so
//! any matching that packs `S_j` vehicles into cluster `j` has total weight
//! `sum ln(rate_ij) - sum_j S_j*ln(S_j) = sum ln(rate_ij / S_j)`, the
//! sum of effective log-rates after even intra-cluster sharing.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::scenario::ProblemInstance;

/// Extra price of being the s-th vehicle on a cluster: `s ln s - (s-1) ln(s-1)`.
///
/// Strictly increasing in `s`, zero at `s = 1`.
pub fn slot_occupancy_cost(slot: u32) -> f64 {
    assert!(slot >= 1, "slots are 1-based");
    let s = slot as f64;
    let prev = (slot - 1) as f64;
    let prev_term = if slot == 1 { 0.0 } else { prev * prev.ln() };
    s * s.ln() - prev_term
}

/// Weight of the vehicle-to-slot edge for a link with the given per-slot rate.
pub fn edge_weight(rate: f64, slot: u32) -> Result<f64> {
    if !(rate > 0.0) || !rate.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "edge weight needs a positive finite rate, got {rate}"
        )));
    }
    Ok(rate.ln() - slot_occupancy_cost(slot))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpandedEdge {
    pub vehicle: usize,
    pub cluster: usize,
    /// 1-based slot index within the cluster.
    pub slot: u32,
    pub weight: f64,
}

/// All edges of the expanded graph; links with zero rate produce none.
pub fn expand_graph(inst: &ProblemInstance) -> Vec<ExpandedEdge> {
    let mut edges = Vec::new();
    for i in 0..inst.num_vehicles() {
        for (j, cluster) in inst.clusters.iter().enumerate() {
            let rate = inst.rate(i, j);
            if rate <= 0.0 {
                continue;
            }
            for slot in 1..=cluster.capacity {
                edges.push(ExpandedEdge {
                    vehicle: i,
                    cluster: j,
                    slot,
                    weight: edge_weight(rate, slot).expect("positive rate"),
                });
            }
        }
    }
    edges
}

/// A (partial) assignment of vehicles to clusters.
///
/// Slot indices are not stored: by the telescoping identity the weight of a
/// matching depends only on how many vehicles share each cluster, not on
/// which slot each one holds.
#[derive(Debug, Clone, PartialEq)]
pub struct Matching {
    assignment: Vec<Option<usize>>,
    holders: BTreeMap<usize, Vec<usize>>,
}

impl Matching {
    pub fn new(num_vehicles: usize) -> Self {
        Self {
            assignment: vec![None; num_vehicles],
            holders: BTreeMap::new(),
        }
    }

    pub fn num_vehicles(&self) -> usize {
        self.assignment.len()
    }

    pub fn cluster_of(&self, vehicle: usize) -> Option<usize> {
        self.assignment[vehicle]
    }

    /// Vehicles currently on the cluster, in ascending id order.
    pub fn holders(&self, cluster: usize) -> &[usize] {
        self.holders.get(&cluster).map_or(&[], |v| v.as_slice())
    }

    pub fn load(&self, cluster: usize) -> u32 {
        self.holders(cluster).len() as u32
    }

    pub fn assigned_count(&self) -> usize {
        self.assignment.iter().filter(|a| a.is_some()).count()
    }

    pub fn unassigned(&self) -> impl Iterator<Item = usize> + '_ {
        self.assignment
            .iter()
            .enumerate()
            .filter_map(|(i, a)| a.is_none().then_some(i))
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, Option<usize>)> + '_ {
        self.assignment.iter().copied().enumerate()
    }

    /// Puts the vehicle on the cluster, leaving its previous cluster if any.
    pub fn assign(&mut self, vehicle: usize, cluster: usize) {
        self.unassign(vehicle);
        self.assignment[vehicle] = Some(cluster);
        let list = self.holders.entry(cluster).or_default();
        let pos = list.partition_point(|&v| v < vehicle);
        list.insert(pos, vehicle);
    }

    pub fn unassign(&mut self, vehicle: usize) {
        if let Some(old) = self.assignment[vehicle].take() {
            let list = self.holders.get_mut(&old).expect("holder list exists");
            list.retain(|&v| v != vehicle);
            if list.is_empty() {
                self.holders.remove(&old);
            }
        }
    }
}

/// Checks the matching against the instance: indices in range, every assigned
/// link feasible, no cluster over capacity.
pub fn verify_matching(inst: &ProblemInstance, m: &Matching) -> Result<()> {
    if m.num_vehicles() != inst.num_vehicles() {
        return Err(Error::InfeasibleMatching(format!(
            "matching covers {} vehicles, instance has {}",
            m.num_vehicles(),
            inst.num_vehicles()
        )));
    }
    for (i, a) in m.iter() {
        if let Some(j) = a {
            if j >= inst.num_clusters() {
                return Err(Error::UnknownCluster(j));
            }
            if !inst.is_feasible(i, j) {
                return Err(Error::InfeasibleMatching(format!(
                    "vehicle {i} assigned to unreachable cluster {j}"
                )));
            }
        }
    }
    for (&j, list) in &m.holders {
        let cap = inst.clusters[j].capacity;
        if list.len() as u32 > cap {
            return Err(Error::InfeasibleMatching(format!(
                "cluster {j} holds {} vehicles, capacity {cap}",
                list.len()
            )));
        }
    }
    Ok(())
}

/// Social objective: sum of `ln(rate_ij / S_j)` over assigned vehicles, with
/// `S_j` the final load of the chosen cluster. Empty matchings score zero.
pub fn objective_value(inst: &ProblemInstance, m: &Matching) -> Result<f64> {
    verify_matching(inst, m)?;
    let mut total = 0.0;
    for (i, a) in m.iter() {
        if let Some(j) = a {
            let share = inst.rate(i, j) / f64::from(m.load(j));
            total += share.ln();
        }
    }
    Ok(total)
}

/// Same quantity computed the other way: sum of expanded-graph edge weights
/// with each cluster's holders packed into slots `1..=S_j`.
pub fn matching_weight(inst: &ProblemInstance, m: &Matching) -> Result<f64> {
    verify_matching(inst, m)?;
    let mut total = 0.0;
    for (&j, list) in &m.holders {
        for (k, &i) in list.iter().enumerate() {
            total += edge_weight(inst.rate(i, j), k as u32 + 1)?;
        }
    }
    Ok(total)
}
