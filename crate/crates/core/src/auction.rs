//! Distributed ascending auction for cluster selection.
//!
//! Clusters price their slots, vehicles bid, and the highest bid per cluster
//! wins the cheapest slot each round, displacing any previous holder. The
//! loop is a synchronous-round auction on the expanded slot graph:
//!
//! * slot `s` of every cluster opens at `s*ln(s) - (s-1)*ln(s-1)` nats, the
//!   congestion cost of being the s-th tenant;
//! * an unassigned vehicle bids its best margin `U - p` against the
//!   second-best, where `U = c + ln(rate)` and `p` is the cluster's cheapest
//!   slot price, so a win raises the price to the bidder's indifference
//!   point (ties and single-option vehicles bid the increment `delta`);
//! * a round with no bids is a fixed point and ends the auction.
//!
//! Prices only rise, so a vehicle whose best margin ever drops to zero can
//! be retired permanently; those vehicles end unassigned. The final
//! assignment is within `M * delta` of the maximum-weight matching, which
//! the test suite checks against exact solvers.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{slot_occupancy_cost, Matching};
use crate::scenario::{MiningCluster, ProblemInstance};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuctionConfig {
    /// Minimum bid increment, in nats.
    pub delta: f64,
    /// Utility offset; must exceed every initial slot price. Defaults to
    /// one nat above the highest opening price.
    pub c_override: Option<f64>,
    pub record_trace: bool,
}

impl Default for AuctionConfig {
    fn default() -> Self {
        Self {
            delta: 1e-3,
            c_override: None,
            record_trace: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Bid {
    pub vehicle: usize,
    pub cluster: usize,
    /// Price increase offered; strictly positive but may be below delta
    /// when it comes from a margin gap.
    pub amount: f64,
}

/// A bid that won its cluster, with the slot it landed on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Award {
    pub vehicle: usize,
    pub cluster: usize,
    pub slot: u32,
    pub amount: f64,
    /// Vehicle evicted from the slot, if it was occupied.
    pub displaced: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoundRecord {
    pub round: u64,
    pub bids: Vec<Bid>,
    pub awards: Vec<Award>,
    /// Per-cluster slot prices after this round's awards.
    pub prices: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuctionOutcome {
    pub matching: Matching,
    /// Rounds executed, including the final one that sees no bids.
    pub rounds: u64,
    /// Slot prices at termination, indexed `[cluster][slot-1]`.
    pub prices: Vec<Vec<f64>>,
    pub c_const: f64,
    pub delta: f64,
    pub trace: Option<Vec<RoundRecord>>,
}

/// Opening slot prices for one cluster: `s ln s - (s-1) ln(s-1)` per slot.
pub fn init_prices(cluster: &MiningCluster) -> Vec<f64> {
    (1..=cluster.capacity).map(slot_occupancy_cost).collect()
}

/// Default utility offset: one nat above the highest opening price anywhere.
pub fn default_c_const(clusters: &[MiningCluster]) -> f64 {
    let max_init = clusters
        .iter()
        .map(|c| slot_occupancy_cost(c.capacity.max(1)))
        .fold(0.0, f64::max);
    max_init + 1.0
}

/// Worst-case round count `ceil(max U * alpha / delta)`, floored at 1.
pub fn round_bound(inst: &ProblemInstance, delta: f64, c_const: f64) -> u64 {
    let mut max_u = f64::NEG_INFINITY;
    for i in 0..inst.num_vehicles() {
        for j in 0..inst.num_clusters() {
            let rate = inst.rate(i, j);
            if rate > 0.0 {
                max_u = max_u.max(c_const + rate.ln());
            }
        }
    }
    let alpha = f64::from(inst.max_capacity());
    if !max_u.is_finite() || max_u <= 0.0 {
        return 1;
    }
    ((max_u * alpha / delta).ceil() as u64).max(1)
}

#[derive(Debug, Clone)]
pub struct AuctionState {
    /// Current slot prices, indexed `[cluster][slot-1]`.
    pub slot_prices: Vec<Vec<f64>>,
    /// Vehicle utilities `c + ln(rate)`, row-major; -inf marks no link.
    utilities: Vec<f64>,
    num_clusters: usize,
    slot_owner: Vec<Vec<Option<usize>>>,
    matching: Matching,
    /// Bidders retire once their best margin is gone; prices never fall,
    /// so the margin can never come back.
    active: Vec<bool>,
    pub round: u64,
    pub delta: f64,
    pub c_const: f64,
}

impl AuctionState {
    pub fn new(inst: &ProblemInstance, config: &AuctionConfig) -> Result<Self> {
        let c_const = match config.c_override {
            Some(c) => c,
            None => default_c_const(&inst.clusters),
        };
        let mut utilities = Vec::with_capacity(inst.num_vehicles() * inst.num_clusters());
        for i in 0..inst.num_vehicles() {
            for j in 0..inst.num_clusters() {
                let rate = inst.rate(i, j);
                utilities.push(if rate > 0.0 {
                    c_const + rate.ln()
                } else {
                    f64::NEG_INFINITY
                });
            }
        }
        let prices = inst.clusters.iter().map(|c| init_prices(c)).collect();
        Self::from_parts(utilities, prices, inst.num_vehicles(), config.delta, c_const)
    }

    /// Assembles a state from explicit utilities and opening prices. The
    /// auction's decisions are scale-free: multiplying every utility, every
    /// price, and delta by one positive constant yields the same assignment.
    pub fn from_parts(
        utilities: Vec<f64>,
        slot_prices: Vec<Vec<f64>>,
        num_vehicles: usize,
        delta: f64,
        c_const: f64,
    ) -> Result<Self> {
        if !(delta > 0.0) || !delta.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "delta must be a positive finite increment, got {delta}"
            )));
        }
        let num_clusters = slot_prices.len();
        if num_clusters == 0 || num_vehicles == 0 {
            return Err(Error::InvalidParameter(
                "auction needs at least one vehicle and one cluster".to_string(),
            ));
        }
        if utilities.len() != num_vehicles * num_clusters {
            return Err(Error::InvalidParameter(format!(
                "utility matrix must be {num_vehicles}x{num_clusters}"
            )));
        }
        let mut max_init = f64::NEG_INFINITY;
        for col in &slot_prices {
            if col.is_empty() {
                return Err(Error::InvalidParameter(
                    "every cluster needs at least one slot".to_string(),
                ));
            }
            for &p in col {
                if !p.is_finite() {
                    return Err(Error::InvalidParameter(
                        "slot prices must be finite".to_string(),
                    ));
                }
                max_init = max_init.max(p);
            }
        }
        if !(c_const > max_init) {
            return Err(Error::InvalidParameter(format!(
                "utility offset must exceed the highest opening price \
                 ({c_const} <= {max_init})"
            )));
        }
        let slot_owner = slot_prices.iter().map(|c| vec![None; c.len()]).collect();
        Ok(Self {
            slot_prices,
            utilities,
            num_clusters,
            slot_owner,
            matching: Matching::new(num_vehicles),
            active: vec![true; num_vehicles],
            round: 0,
            delta,
            c_const,
        })
    }

    fn utility(&self, vehicle: usize, cluster: usize) -> f64 {
        self.utilities[vehicle * self.num_clusters + cluster]
    }

    /// The cluster's asking price: its cheapest slot, occupied or not, with
    /// ties resolved toward the lowest slot index. Bidding on an occupied
    /// slot is what lets a newcomer displace an incumbent that got in cheap.
    pub fn announce_price(&self, cluster: usize) -> (f64, u32) {
        let col = &self.slot_prices[cluster];
        let mut best = (col[0], 1u32);
        for (k, &p) in col.iter().enumerate().skip(1) {
            if p < best.0 {
                best = (p, k as u32 + 1);
            }
        }
        best
    }

    /// The vehicle's bid against the announced prices, or None when every
    /// reachable cluster is priced beyond its utility (or none is reachable).
    pub fn compute_bid(&self, vehicle: usize, announcements: &[(f64, u32)]) -> Option<Bid> {
        let mut best: Option<(usize, f64)> = None;
        let mut second = f64::NEG_INFINITY;
        for (j, &(price, _)) in announcements.iter().enumerate() {
            let u = self.utility(vehicle, j);
            if u == f64::NEG_INFINITY {
                continue;
            }
            let margin = u - price;
            match best {
                Some((_, top)) if margin <= top => second = second.max(margin),
                _ => {
                    if let Some((_, top)) = best {
                        second = second.max(top);
                    }
                    best = Some((j, margin));
                }
            }
        }
        let (cluster, top) = best?;
        if top <= 0.0 {
            return None;
        }
        let gap = top - second;
        let amount = if second.is_finite() && gap > 0.0 {
            gap
        } else {
            self.delta
        };
        Some(Bid {
            vehicle,
            cluster,
            amount,
        })
    }

    /// Applies one round of bids: per cluster the highest bid (ties to the
    /// lowest vehicle id) takes the announced slot, evicting any holder, and
    /// the slot price rises by the winning amount.
    pub fn resolve_round(
        &mut self,
        bids: &[Bid],
        announcements: &[(f64, u32)],
    ) -> Result<Vec<Award>> {
        let mut winners: Vec<Option<Bid>> = vec![None; self.num_clusters];
        for bid in bids {
            let slot = winners
                .get_mut(bid.cluster)
                .ok_or(Error::UnknownCluster(bid.cluster))?;
            let replace = match slot {
                Some(cur) => {
                    bid.amount > cur.amount
                        || (bid.amount == cur.amount && bid.vehicle < cur.vehicle)
                }
                None => true,
            };
            if replace {
                *slot = Some(*bid);
            }
        }
        let mut awards = Vec::new();
        for (j, winner) in winners.into_iter().enumerate() {
            let Some(bid) = winner else { continue };
            let (_, slot) = announcements[j];
            let idx = slot as usize - 1;
            let displaced = self.slot_owner[j][idx];
            if let Some(old) = displaced {
                self.matching.unassign(old);
            }
            self.slot_owner[j][idx] = Some(bid.vehicle);
            self.matching.assign(bid.vehicle, j);
            self.slot_prices[j][idx] += bid.amount;
            awards.push(Award {
                vehicle: bid.vehicle,
                cluster: j,
                slot,
                amount: bid.amount,
                displaced,
            });
        }
        Ok(awards)
    }

    /// Runs rounds until none produces a bid, consuming the state.
    ///
    /// Exceeding twice the worst-case round bound aborts with a divergence
    /// error; that ceiling is unreachable for a correct bidding rule.
    pub fn run_to_fixed_point(mut self, record_trace: bool) -> Result<AuctionOutcome> {
        let alpha = self
            .slot_prices
            .iter()
            .map(|c| c.len() as u64)
            .max()
            .unwrap_or(1);
        let max_u = self
            .utilities
            .iter()
            .copied()
            .filter(|u| u.is_finite())
            .fold(f64::NEG_INFINITY, f64::max);
        let bound = if max_u.is_finite() && max_u > 0.0 {
            ((max_u * alpha as f64 / self.delta).ceil() as u64).max(1)
        } else {
            1
        };
        let mut trace = record_trace.then(Vec::new);
        loop {
            self.round += 1;
            let announcements: Vec<(f64, u32)> = (0..self.num_clusters)
                .map(|j| self.announce_price(j))
                .collect();
            let mut bids = Vec::new();
            for i in 0..self.matching.num_vehicles() {
                if !self.active[i] || self.matching.cluster_of(i).is_some() {
                    continue;
                }
                match self.compute_bid(i, &announcements) {
                    Some(bid) => bids.push(bid),
                    None => self.active[i] = false,
                }
            }
            if bids.is_empty() {
                if let Some(t) = trace.as_mut() {
                    t.push(RoundRecord {
                        round: self.round,
                        bids: Vec::new(),
                        awards: Vec::new(),
                        prices: self.slot_prices.clone(),
                    });
                }
                break;
            }
            let awards = self.resolve_round(&bids, &announcements)?;
            if let Some(t) = trace.as_mut() {
                t.push(RoundRecord {
                    round: self.round,
                    bids,
                    awards,
                    prices: self.slot_prices.clone(),
                });
            }
            if self.round > bound.saturating_mul(2) {
                return Err(Error::Divergence {
                    rounds: self.round,
                    bound,
                });
            }
        }
        Ok(AuctionOutcome {
            matching: self.matching,
            rounds: self.round,
            prices: self.slot_prices,
            c_const: self.c_const,
            delta: self.delta,
            trace,
        })
    }
}

/// Full auction for an instance: price initialization, synchronous bidding
/// rounds, and the final assignment.
pub fn run_auction(inst: &ProblemInstance, config: &AuctionConfig) -> Result<AuctionOutcome> {
    AuctionState::new(inst, config)?.run_to_fixed_point(config.record_trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{BlocklengthMode, ChannelParams};
    use crate::graph::matching_weight;
    use crate::scenario::synthetic_instance;
    use approx::assert_relative_eq;

    fn params() -> ChannelParams {
        ChannelParams {
            bandwidth_unit_hz: 1.0,
            slot_duration_s: 1.0,
            max_bandwidth_units: 16,
            noise_psd_w_per_hz: 1.0,
            target_error_prob: 1e-3,
            blocklength: BlocklengthMode::Finite,
        }
    }

    fn cluster(capacity: u32) -> MiningCluster {
        MiningCluster {
            id: 0,
            x_m: 0.0,
            y_m: 0.0,
            v_slots: capacity,
            capacity,
        }
    }

    #[test]
    fn opening_prices_follow_slot_costs() {
        let p = init_prices(&cluster(3));
        assert_eq!(p[0], 0.0);
        assert_relative_eq!(p[1], f64::ln(4.0), epsilon = 1e-12);
        assert_relative_eq!(p[2], f64::ln(27.0 / 4.0), epsilon = 1e-12);
    }

    #[test]
    fn default_offset_clears_every_opening_price() {
        let clusters = vec![cluster(3), cluster(5)];
        let c = default_c_const(&clusters);
        assert_relative_eq!(c, slot_occupancy_cost(5) + 1.0, epsilon = 1e-12);
        assert!(init_prices(&clusters[1]).iter().all(|&p| c > p));
    }

    fn bare_state(
        utilities: Vec<f64>,
        prices: Vec<Vec<f64>>,
        vehicles: usize,
        delta: f64,
    ) -> AuctionState {
        let c = prices
            .iter()
            .flatten()
            .fold(0.0f64, |a, &b| a.max(b))
            + 1.0;
        AuctionState::from_parts(utilities, prices, vehicles, delta, c).unwrap()
    }

    #[test]
    fn announcement_picks_cheapest_slot() {
        let st = bare_state(vec![1.0], vec![vec![0.0, f64::ln(4.0)]], 1, 0.1);
        assert_eq!(st.announce_price(0), (0.0, 1));

        let st = bare_state(vec![1.0], vec![vec![2.0, f64::ln(4.0)]], 1, 0.1);
        let (p, s) = st.announce_price(0);
        assert_relative_eq!(p, f64::ln(4.0), epsilon = 1e-12);
        assert_eq!(s, 2);
    }

    #[test]
    fn announcement_covers_occupied_slots() {
        // A cluster at capacity keeps quoting its cheapest slot, so a
        // latecomer can displace whoever got in at a bargain price.
        let mut st = bare_state(
            vec![5.0, 5.0, 5.0],
            vec![vec![0.0, f64::ln(4.0)]],
            3,
            0.1,
        );
        let ann = vec![st.announce_price(0)];
        assert_eq!(ann[0], (0.0, 1));
        st.resolve_round(&[Bid { vehicle: 0, cluster: 0, amount: 2.0 }], &ann)
            .unwrap();
        // Slot 1 now costs 2.0 > ln 4, so slot 2 is the cheapest.
        let ann = vec![st.announce_price(0)];
        assert_eq!(ann[0].1, 2);
        st.resolve_round(&[Bid { vehicle: 1, cluster: 0, amount: 0.2 }], &ann)
            .unwrap();
        // Both slots taken; the quote is still the cheaper of the two.
        let (p, s) = st.announce_price(0);
        assert_relative_eq!(p, f64::ln(4.0) + 0.2, epsilon = 1e-12);
        assert_eq!(s, 2);
        assert_eq!(st.matching.load(0), 2);
    }

    #[test]
    fn bid_is_margin_gap() {
        let st = bare_state(vec![3.0, 2.2], vec![vec![0.0], vec![0.0]], 1, 0.01);
        let bid = st.compute_bid(0, &[(0.0, 1), (0.0, 1)]).unwrap();
        assert_eq!(bid.cluster, 0);
        assert_relative_eq!(bid.amount, 0.8, epsilon = 1e-12);
    }

    #[test]
    fn tied_margins_bid_delta_to_lowest_cluster() {
        let st = bare_state(vec![2.5, 2.5], vec![vec![0.0], vec![0.0]], 1, 0.01);
        let bid = st.compute_bid(0, &[(0.0, 1), (0.0, 1)]).unwrap();
        assert_eq!(bid.cluster, 0);
        assert_eq!(bid.amount, 0.01);
    }

    #[test]
    fn single_option_bids_delta() {
        let st = bare_state(
            vec![3.0, f64::NEG_INFINITY],
            vec![vec![0.0], vec![0.0]],
            1,
            0.01,
        );
        let bid = st.compute_bid(0, &[(0.0, 1), (0.0, 1)]).unwrap();
        assert_eq!((bid.cluster, bid.amount), (0, 0.01));
    }

    #[test]
    fn exhausted_margin_means_no_bid() {
        let st = bare_state(vec![1.0, 0.5], vec![vec![0.0], vec![0.0]], 1, 0.01);
        assert!(st.compute_bid(0, &[(1.5, 1), (2.0, 1)]).is_none());
        let st = bare_state(
            vec![f64::NEG_INFINITY, f64::NEG_INFINITY],
            vec![vec![0.0], vec![0.0]],
            1,
            0.01,
        );
        assert!(st.compute_bid(0, &[(0.0, 1), (0.0, 1)]).is_none());
    }

    #[test]
    fn highest_bid_wins_and_moves_the_price() {
        let mut st = bare_state(vec![9.0, 9.0], vec![vec![0.0, f64::ln(4.0)]], 2, 0.01);
        let ann = vec![st.announce_price(0)];
        let awards = st
            .resolve_round(
                &[
                    Bid { vehicle: 0, cluster: 0, amount: 0.3 },
                    Bid { vehicle: 1, cluster: 0, amount: 0.8 },
                ],
                &ann,
            )
            .unwrap();
        assert_eq!(awards.len(), 1);
        assert_eq!(awards[0].vehicle, 1);
        assert_eq!(awards[0].slot, 1);
        assert_relative_eq!(st.slot_prices[0][0], 0.8, epsilon = 1e-12);
    }

    #[test]
    fn tied_bids_go_to_lowest_vehicle_id() {
        let mut st = bare_state(vec![9.0, 9.0], vec![vec![0.0]], 2, 0.01);
        let ann = vec![st.announce_price(0)];
        let awards = st
            .resolve_round(
                &[
                    Bid { vehicle: 1, cluster: 0, amount: 0.5 },
                    Bid { vehicle: 0, cluster: 0, amount: 0.5 },
                ],
                &ann,
            )
            .unwrap();
        assert_eq!(awards[0].vehicle, 0);
    }

    #[test]
    fn winning_an_occupied_slot_displaces_the_holder() {
        let mut st = bare_state(vec![9.0, 9.0], vec![vec![0.0]], 2, 0.01);
        let ann = vec![st.announce_price(0)];
        st.resolve_round(&[Bid { vehicle: 0, cluster: 0, amount: 0.2 }], &ann)
            .unwrap();
        let ann = vec![st.announce_price(0)];
        let awards = st
            .resolve_round(&[Bid { vehicle: 1, cluster: 0, amount: 0.4 }], &ann)
            .unwrap();
        assert_eq!(awards[0].displaced, Some(0));
        assert_eq!(st.matching.cluster_of(0), None);
        assert_eq!(st.matching.cluster_of(1), Some(0));
        assert_relative_eq!(st.slot_prices[0][0], 0.6, epsilon = 1e-12);
    }

    #[test]
    fn unknown_cluster_in_bid_is_a_protocol_error() {
        let mut st = bare_state(vec![9.0], vec![vec![0.0]], 1, 0.01);
        let err = st.resolve_round(
            &[Bid { vehicle: 0, cluster: 3, amount: 0.2 }],
            &[(0.0, 1)],
        );
        assert!(matches!(err, Err(Error::UnknownCluster(3))));
    }

    #[test]
    fn singleton_instance_settles_in_two_rounds() {
        let inst = synthetic_instance(vec![vec![4.0]], 1, 1, params()).unwrap();
        let out = run_auction(&inst, &AuctionConfig::default()).unwrap();
        assert_eq!(out.rounds, 2);
        assert_eq!(out.matching.cluster_of(0), Some(0));
        assert_eq!(out.matching.assigned_count(), 1);
    }

    #[test]
    fn two_vehicles_share_the_only_cluster() {
        let inst = synthetic_instance(vec![vec![4.0], vec![2.0]], 2, 2, params()).unwrap();
        let out = run_auction(&inst, &AuctionConfig::default()).unwrap();
        assert_eq!(out.matching.cluster_of(0), Some(0));
        assert_eq!(out.matching.cluster_of(1), Some(0));
        let w = matching_weight(&inst, &out.matching).unwrap();
        assert_relative_eq!(w, f64::ln(2.0), epsilon = 1e-9);
    }

    #[test]
    fn losers_retire_once_the_price_passes_their_utility() {
        // One slot, two equally keen vehicles with utility 1.0 and delta
        // 0.25: they trade the slot while the price climbs 0.25 per round,
        // margins hit zero at price 1.0 after round 4, and round 5 sees no
        // bids. The holder after round 4 keeps the slot.
        let st = bare_state(vec![1.0, 1.0], vec![vec![0.0]], 2, 0.25);
        let out = st.run_to_fixed_point(true).unwrap();
        assert_eq!(out.rounds, 5);
        assert_eq!(out.prices[0][0], 1.0);
        assert_eq!(out.matching.cluster_of(1), Some(0));
        assert_eq!(out.matching.cluster_of(0), None);
        let trace = out.trace.unwrap();
        assert_eq!(trace.len(), 5);
        assert!(trace[4].bids.is_empty());
    }

    #[test]
    fn prices_never_fall_along_the_trace() {
        let inst = synthetic_instance(
            vec![
                vec![5.0, 3.0, 0.5],
                vec![4.0, 4.0, 2.0],
                vec![0.0, 2.5, 2.5],
                vec![1.0, 6.0, 3.0],
            ],
            2,
            2,
            params(),
        )
        .unwrap();
        let out = run_auction(
            &inst,
            &AuctionConfig {
                delta: 0.05,
                record_trace: true,
                ..Default::default()
            },
        )
        .unwrap();
        let trace = out.trace.unwrap();
        for w in trace.windows(2) {
            for (a, b) in w[0].prices.iter().zip(&w[1].prices) {
                for (x, y) in a.iter().zip(b) {
                    assert!(y >= x);
                }
            }
        }
    }

    #[test]
    fn reruns_are_bitwise_identical() {
        let inst = synthetic_instance(
            vec![vec![5.0, 3.0], vec![4.0, 4.0], vec![1.5, 2.5]],
            2,
            2,
            params(),
        )
        .unwrap();
        let cfg = AuctionConfig { delta: 1e-4, ..Default::default() };
        let a = run_auction(&inst, &cfg).unwrap();
        let b = run_auction(&inst, &cfg).unwrap();
        assert_eq!(a.matching, b.matching);
        assert_eq!(a.rounds, b.rounds);
        assert_eq!(a.prices, b.prices);
    }

    #[test]
    fn scaling_utilities_prices_and_delta_together_changes_nothing() {
        let utilities = vec![3.0, 2.1, 2.7, 2.9, 1.0, 2.6];
        let prices = vec![vec![0.0, 1.4], vec![0.0, 1.4]];
        let scale = 3.7;
        let a = AuctionState::from_parts(utilities.clone(), prices.clone(), 3, 0.01, 2.0)
            .unwrap()
            .run_to_fixed_point(false)
            .unwrap();
        let b = AuctionState::from_parts(
            utilities.iter().map(|u| u * scale).collect(),
            prices
                .iter()
                .map(|c| c.iter().map(|p| p * scale).collect())
                .collect(),
            3,
            0.01 * scale,
            2.0 * scale,
        )
        .unwrap()
        .run_to_fixed_point(false)
        .unwrap();
        assert_eq!(a.matching, b.matching);
        assert_eq!(a.rounds, b.rounds);
    }

    #[test]
    fn offset_below_opening_prices_is_rejected() {
        let inst = synthetic_instance(vec![vec![4.0]], 3, 3, params()).unwrap();
        let err = run_auction(
            &inst,
            &AuctionConfig {
                c_override: Some(1.0),
                ..Default::default()
            },
        );
        assert!(matches!(err, Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn bound_examples() {
        // max utility 10, two slots, delta 0.1.
        let inst = synthetic_instance(
            vec![vec![f64::exp(10.0 - default_c_const(&[cluster(2)]))]],
            2,
            2,
            params(),
        )
        .unwrap();
        let c = default_c_const(&[cluster(2)]);
        assert_eq!(round_bound(&inst, 0.1, c), 200);
        assert_eq!(round_bound(&inst, 25.0, c), 1);
        assert_eq!(round_bound(&inst, 0.05, c), 400);
    }
}
