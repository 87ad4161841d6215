//! Nearest-cluster selection, the geographic baseline.

use crate::graph::Matching;
use crate::scenario::ProblemInstance;

/// Greedy distance-based assignment: vehicles pick, in ascending id order,
/// the closest reachable cluster head. With `respect_capacity` a full
/// cluster stops admitting and the vehicle falls back to the next closest;
/// without it clusters accept unboundedly. Distance ties go to the lower
/// cluster id. Vehicles with no option end unassigned.
pub fn nearest_cluster(inst: &ProblemInstance, respect_capacity: bool) -> Matching {
    let mut m = Matching::new(inst.num_vehicles());
    for (i, v) in inst.vehicles.iter().enumerate() {
        let mut best: Option<(f64, usize)> = None;
        for (j, c) in inst.clusters.iter().enumerate() {
            if !inst.is_feasible(i, j) {
                continue;
            }
            if respect_capacity && m.load(j) >= c.capacity {
                continue;
            }
            let d = (v.x_m - c.x_m).hypot(v.y_m - c.y_m);
            if best.map_or(true, |(bd, _)| d < bd) {
                best = Some((d, j));
            }
        }
        if let Some((_, j)) = best {
            m.assign(i, j);
        }
    }
    m
}
