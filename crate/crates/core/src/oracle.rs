//! Exact reference solvers.
//!
//! Two independent routes to the optimum keep each other honest: an
//! exhaustive map enumerator working directly on the shared-rate objective,
//! and a Hungarian solve over the expanded slot graph. They use different
//! formulations and different tie handling, so agreement on random
//! instances is strong evidence both are right.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::graph::{slot_occupancy_cost, ExpandedEdge, Matching};
use crate::scenario::ProblemInstance;

const ENUMERATION_GUARD: f64 = 1e7;
const MATRIX_GUARD: usize = 2_000;

/// Exhaustively enumerates every vehicle-to-cluster map (including leaving
/// vehicles out) that respects capacity, and returns the best.
///
/// "Best" is lexicographic: first assign as many vehicles as possible, then
/// maximize the sum of `ln(rate / S_j)`. Forcing maximum cardinality mirrors
/// the offloading objective, where a vehicle with any usable link must be
/// served even at a poor shared rate; only coverage holes and capacity
/// deficits leave vehicles out. Ties keep the first map in enumeration
/// order (vehicle 0's choice varies slowest, clusters before none).
pub fn brute_force_optimal(inst: &ProblemInstance) -> Result<(Matching, f64)> {
    let m = inst.num_vehicles();
    let n = inst.num_clusters();
    let maps = ((n + 1) as f64).powi(m as i32);
    if maps > ENUMERATION_GUARD {
        return Err(Error::SizeGuard {
            maps,
            guard: ENUMERATION_GUARD,
        });
    }

    // choice[i] in 0..n is a cluster, n means unassigned.
    let mut choice = vec![0usize; m];
    let mut best: Option<(usize, f64, Vec<usize>)> = None;
    'outer: loop {
        let mut loads = vec![0u32; n];
        let mut valid = true;
        for (i, &c) in choice.iter().enumerate() {
            if c < n {
                if !inst.is_feasible(i, c) {
                    valid = false;
                    break;
                }
                loads[c] += 1;
                if loads[c] > inst.clusters[c].capacity {
                    valid = false;
                    break;
                }
            }
        }
        if valid {
            let assigned = choice.iter().filter(|&&c| c < n).count();
            let mut objective = 0.0;
            for (i, &c) in choice.iter().enumerate() {
                if c < n {
                    objective += (inst.rate(i, c) / f64::from(loads[c])).ln();
                }
            }
            let better = match &best {
                None => true,
                Some((k, obj, _)) => {
                    assigned > *k || (assigned == *k && objective > *obj)
                }
            };
            if better {
                best = Some((assigned, objective, choice.clone()));
            }
        }
        // Odometer increment, vehicle 0 most significant.
        for i in (0..m).rev() {
            choice[i] += 1;
            if choice[i] <= n {
                continue 'outer;
            }
            choice[i] = 0;
        }
        break;
    }

    let (_, objective, choice) = best.expect("all-unassigned map is always valid");
    let mut matching = Matching::new(m);
    for (i, &c) in choice.iter().enumerate() {
        if c < n {
            matching.assign(i, c);
        }
    }
    Ok((matching, objective))
}

/// Exact maximum-weight matching on expanded slot edges, abstention free.
///
/// Unlike the enumerator this one never takes a negative edge: leaving a
/// vehicle out costs nothing. The two agree whenever every edge weight is
/// positive and every pair is feasible; solver cross-checks rely on that
/// regime. Implemented as a shortest-augmenting-path assignment solve with
/// one zero-weight dummy column per vehicle.
pub fn max_weight_matching(
    edges: &[ExpandedEdge],
    num_vehicles: usize,
) -> Result<(Matching, f64)> {
    let mut slot_cols: BTreeMap<(usize, u32), usize> = BTreeMap::new();
    for e in edges {
        let next = slot_cols.len();
        slot_cols.entry((e.cluster, e.slot)).or_insert(next);
    }
    let slots = slot_cols.len();
    let cols = slots + num_vehicles;
    if num_vehicles == 0 {
        return Ok((Matching::new(0), 0.0));
    }
    if cols > MATRIX_GUARD {
        return Err(Error::SizeGuard {
            maps: cols as f64,
            guard: MATRIX_GUARD as f64,
        });
    }

    // Minimization form: cost = -weight on real edges, 0 on the dummies.
    let mut cost = vec![vec![f64::INFINITY; cols]; num_vehicles];
    for e in edges {
        let col = slot_cols[&(e.cluster, e.slot)];
        // Parallel duplicate edges keep the best weight.
        cost[e.vehicle][col] = cost[e.vehicle][col].min(-e.weight);
    }
    for (i, row) in cost.iter_mut().enumerate() {
        row[slots + i] = 0.0;
    }

    let col_of_row = solve_assignment(&cost);

    let mut matching = Matching::new(num_vehicles);
    let mut weight = 0.0;
    let clusters_by_col: BTreeMap<usize, (usize, u32)> =
        slot_cols.iter().map(|(&k, &v)| (v, k)).collect();
    for (i, j) in col_of_row.into_iter().enumerate() {
        if j < slots {
            let (cluster, _) = clusters_by_col[&j];
            matching.assign(i, cluster);
            weight -= cost[i][j];
        }
    }
    Ok((matching, weight))
}

/// Shortest-augmenting-path rectangular assignment (rows <= cols), returning
/// the matched column per row. Every row must have a finite entry.
fn solve_assignment(cost: &[Vec<f64>]) -> Vec<usize> {
    let rows = cost.len();
    let cols = cost[0].len();
    assert!(rows <= cols);
    // 1-based arrays; row_of[0] holds the row currently seeking a column.
    let mut u = vec![0.0f64; rows + 1];
    let mut v = vec![0.0f64; cols + 1];
    let mut row_of = vec![0usize; cols + 1];
    for i in 1..=rows {
        row_of[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![f64::INFINITY; cols + 1];
        let mut used = vec![false; cols + 1];
        let mut way = vec![0usize; cols + 1];
        loop {
            used[j0] = true;
            let i0 = row_of[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;
            for j in 1..=cols {
                if used[j] {
                    continue;
                }
                let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            debug_assert!(delta.is_finite(), "every row needs a finite column");
            for j in 0..=cols {
                if used[j] {
                    u[row_of[j]] += delta;
                    v[j] -= delta;
                } else if minv[j].is_finite() {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if row_of[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            row_of[j0] = row_of[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut col_of_row = vec![usize::MAX; rows];
    for j in 1..=cols {
        if row_of[j] != 0 {
            col_of_row[row_of[j] - 1] = j - 1;
        }
    }
    col_of_row
}

/// Expanded-graph weight of the enumerator's matching, for cross-checks
/// against `max_weight_matching` on all-positive instances.
pub fn packed_weight(inst: &ProblemInstance, matching: &Matching) -> f64 {
    let mut total = 0.0;
    for j in 0..inst.num_clusters() {
        for (k, &i) in matching.holders(j).iter().enumerate() {
            total += inst.rate(i, j).ln() - slot_occupancy_cost(k as u32 + 1);
        }
    }
    total
}
