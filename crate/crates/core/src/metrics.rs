//! Evaluation quantities for a solved instance and their Monte-Carlo
//! aggregation.
//!
//! The per-vehicle variate behind fairness and throughput is the realized
//! offloading gain `rate_ij / S_j` (bits per slot after intra-cluster
//! sharing), zero for vehicles left unassigned. Auction-only quantities
//! (round count, cluster availability at terminal prices) are optional so
//! one report type covers every solver.

use serde::Serialize;

use crate::auction::AuctionOutcome;
use crate::channel::ChannelParams;
use crate::error::{Error, Result};
use crate::graph::{objective_value, Matching};
use crate::scenario::ProblemInstance;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MetricsReport {
    /// None when every vehicle ends with zero gain (index undefined).
    pub jain_index: Option<f64>,
    pub mismanagement_ratio: f64,
    /// Sum of `ln(rate / S_j)` over assigned vehicles, in nats.
    pub sum_log_utility: f64,
    /// Mean realized throughput across all vehicles, unassigned counting 0.
    pub mean_rate_bits_per_s: f64,
    /// Auction runs only: mean remaining positive-margin clusters.
    pub available_clusters_per_vehicle: Option<f64>,
    /// Auction runs only: rounds to termination.
    pub rounds: Option<u64>,
}

/// Per-vehicle realized gain `rate / S_j` in bits per slot; 0 if unassigned.
pub fn offload_gains(inst: &ProblemInstance, m: &Matching) -> Vec<f64> {
    (0..inst.num_vehicles())
        .map(|i| match m.cluster_of(i) {
            Some(j) => inst.rate(i, j) / f64::from(m.load(j)),
            None => 0.0,
        })
        .collect()
}

/// Jain's index `(sum x)^2 / (n * sum x^2)` over non-negative gains.
pub fn jain_fairness(gains: &[f64]) -> Result<f64> {
    if gains.is_empty() {
        return Err(Error::UndefinedMetric(
            "fairness over an empty gain vector".to_string(),
        ));
    }
    if gains.iter().any(|&g| g < 0.0 || !g.is_finite()) {
        return Err(Error::InvalidParameter(
            "gains must be finite and non-negative".to_string(),
        ));
    }
    let sum: f64 = gains.iter().sum();
    let sum_sq: f64 = gains.iter().map(|g| g * g).sum();
    if sum_sq == 0.0 {
        return Err(Error::UndefinedMetric(
            "fairness of an all-zero gain vector".to_string(),
        ));
    }
    Ok(sum * sum / (gains.len() as f64 * sum_sq))
}

/// Share of vehicles that ended up with no cluster.
pub fn mismanagement_ratio(m: &Matching) -> f64 {
    assert!(m.num_vehicles() >= 1);
    m.unassigned().count() as f64 / m.num_vehicles() as f64
}

/// Mean over vehicles of how many reachable clusters would still be worth
/// joining at the given slot prices: `c + ln(rate) > min_s p_j^s`.
pub fn available_clusters_per_vehicle(
    inst: &ProblemInstance,
    slot_prices: &[Vec<f64>],
    c_const: f64,
) -> f64 {
    let mut total = 0usize;
    for i in 0..inst.num_vehicles() {
        for (j, prices) in slot_prices.iter().enumerate() {
            let rate = inst.rate(i, j);
            if rate <= 0.0 {
                continue;
            }
            let quote = prices.iter().copied().fold(f64::INFINITY, f64::min);
            if c_const + rate.ln() - quote > 0.0 {
                total += 1;
            }
        }
    }
    total as f64 / inst.num_vehicles() as f64
}

/// Full report for one solved instance. Pass the auction outcome when there
/// is one; baseline and oracle runs leave the auction-only fields empty.
pub fn report(
    inst: &ProblemInstance,
    params: &ChannelParams,
    m: &Matching,
    outcome: Option<&AuctionOutcome>,
) -> Result<MetricsReport> {
    let sum_log_utility = objective_value(inst, m)?;
    let gains = offload_gains(inst, m);
    let jain_index = match jain_fairness(&gains) {
        Ok(v) => Some(v),
        Err(Error::UndefinedMetric(_)) => None,
        Err(e) => return Err(e),
    };
    let mean_gain = gains.iter().sum::<f64>() / gains.len() as f64;
    Ok(MetricsReport {
        jain_index,
        mismanagement_ratio: mismanagement_ratio(m),
        sum_log_utility,
        mean_rate_bits_per_s: mean_gain / params.slot_duration_s,
        available_clusters_per_vehicle: outcome
            .map(|o| available_clusters_per_vehicle(inst, &o.prices, o.c_const)),
        rounds: outcome.map(|o| o.rounds),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FieldSummary {
    pub mean: f64,
    /// Sample standard deviation (n-1 denominator); 0 for a single value.
    pub std_dev: f64,
    pub count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MetricsSummary {
    pub jain_index: Option<FieldSummary>,
    pub mismanagement_ratio: FieldSummary,
    pub sum_log_utility: FieldSummary,
    pub mean_rate_bits_per_s: FieldSummary,
    pub available_clusters_per_vehicle: Option<FieldSummary>,
    pub rounds: Option<FieldSummary>,
}

/// Order-independent field summary: values are sorted before summation so
/// any permutation of the inputs produces bit-identical output.
fn summarize(values: &mut Vec<f64>) -> Option<FieldSummary> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(f64::total_cmp);
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let std_dev = if values.len() > 1 {
        let mut sq: Vec<f64> = values.iter().map(|v| (v - mean) * (v - mean)).collect();
        sq.sort_by(f64::total_cmp);
        (sq.iter().sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    Some(FieldSummary {
        mean,
        std_dev,
        count: values.len(),
    })
}

/// Aggregates replication reports field by field. Optional fields are
/// summarized over the reports that carry them.
pub fn aggregate(reports: &[MetricsReport]) -> Result<MetricsSummary> {
    if reports.is_empty() {
        return Err(Error::InvalidParameter(
            "cannot aggregate zero reports".to_string(),
        ));
    }
    let collect = |f: &dyn Fn(&MetricsReport) -> Option<f64>| -> Vec<f64> {
        reports.iter().filter_map(f).collect()
    };
    Ok(MetricsSummary {
        jain_index: summarize(&mut collect(&|r| r.jain_index)),
        mismanagement_ratio: summarize(&mut collect(&|r| Some(r.mismanagement_ratio)))
            .expect("non-empty"),
        sum_log_utility: summarize(&mut collect(&|r| Some(r.sum_log_utility)))
            .expect("non-empty"),
        mean_rate_bits_per_s: summarize(&mut collect(&|r| Some(r.mean_rate_bits_per_s)))
            .expect("non-empty"),
        available_clusters_per_vehicle: summarize(&mut collect(
            &|r| r.available_clusters_per_vehicle,
        )),
        rounds: summarize(&mut collect(&|r| r.rounds.map(|x| x as f64))),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::auction::{run_auction, AuctionConfig};
    use crate::channel::BlocklengthMode;
    use crate::scenario::synthetic_instance;
    use approx::assert_relative_eq;

    fn params() -> ChannelParams {
        ChannelParams {
            bandwidth_unit_hz: 1.0,
            slot_duration_s: 0.001,
            max_bandwidth_units: 16,
            noise_psd_w_per_hz: 1.0,
            target_error_prob: 1e-3,
            blocklength: BlocklengthMode::Finite,
        }
    }

    #[test]
    fn jain_hand_values() {
        assert_eq!(jain_fairness(&[5.0, 5.0, 5.0, 5.0]).unwrap(), 1.0);
        assert_eq!(jain_fairness(&[1.0, 0.0, 0.0, 0.0]).unwrap(), 0.25);
        assert_relative_eq!(jain_fairness(&[3.0, 1.0]).unwrap(), 0.8, epsilon = 1e-15);
    }

    #[test]
    fn jain_rejects_degenerate_inputs() {
        assert!(matches!(
            jain_fairness(&[0.0, 0.0]),
            Err(Error::UndefinedMetric(_))
        ));
        assert!(matches!(jain_fairness(&[]), Err(Error::UndefinedMetric(_))));
        assert!(matches!(
            jain_fairness(&[1.0, -0.5]),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn jain_stays_in_its_range() {
        let vectors: [&[f64]; 4] = [
            &[1.0, 2.0, 3.0],
            &[10.0, 0.1, 0.1, 0.1],
            &[7.0],
            &[0.0, 0.0, 5.0, 9.0],
        ];
        for v in vectors {
            let j = jain_fairness(v).unwrap();
            assert!(j >= 1.0 / v.len() as f64 - 1e-15);
            assert!(j <= 1.0 + 1e-15);
        }
    }

    #[test]
    fn mismanagement_counts_the_unassigned() {
        let mut m = Matching::new(8);
        for i in 0..8 {
            m.assign(i, 0);
        }
        assert_eq!(mismanagement_ratio(&m), 0.0);
        m.unassign(3);
        m.unassign(5);
        assert_eq!(mismanagement_ratio(&m), 0.25);
        let empty = Matching::new(4);
        assert_eq!(mismanagement_ratio(&empty), 1.0);
    }

    #[test]
    fn availability_counts_positive_margins() {
        // Utilities c + ln(rate) with c = 2: rows ln(rate) are
        // v0: [1.0, -3.0], v1: [0.5, 0.5], v2: [-3.0, -3.0].
        let inst = synthetic_instance(
            vec![
                vec![f64::exp(1.0), f64::exp(-3.0)],
                vec![f64::exp(0.5), f64::exp(0.5)],
                vec![f64::exp(-3.0), f64::exp(-3.0)],
            ],
            2,
            2,
            params(),
        )
        .unwrap();
        // Cheapest slots quote 2.9 and 2.4: v0 clears only cluster 0
        // (3.0 > 2.9), v1 only cluster 1 (2.5 > 2.4), v2 neither.
        let prices = vec![vec![2.9, 3.5], vec![2.4, 9.0]];
        let got = available_clusters_per_vehicle(&inst, &prices, 2.0);
        assert_relative_eq!(got, 2.0 / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn availability_at_opening_prices_counts_every_link() {
        let inst = synthetic_instance(
            vec![vec![4.0, 4.0], vec![4.0, 4.0]],
            2,
            2,
            params(),
        )
        .unwrap();
        let prices = vec![vec![0.0, 0.0], vec![0.0, 0.0]];
        assert_eq!(available_clusters_per_vehicle(&inst, &prices, 2.0), 2.0);
        let saturated = vec![vec![99.0, 99.0], vec![99.0, 99.0]];
        assert_eq!(available_clusters_per_vehicle(&inst, &saturated, 2.0), 0.0);
    }

    #[test]
    fn report_collects_all_fields_for_an_auction_run() {
        let inst = synthetic_instance(vec![vec![4.0], vec![2.0]], 2, 2, params()).unwrap();
        let out = run_auction(&inst, &AuctionConfig::default()).unwrap();
        let r = report(&inst, &params(), &out.matching, Some(&out)).unwrap();
        assert_eq!(r.mismanagement_ratio, 0.0);
        assert_relative_eq!(r.sum_log_utility, f64::ln(2.0), epsilon = 1e-9);
        // Gains are [2, 1] bits per slot over a 1 ms slot.
        assert_relative_eq!(r.mean_rate_bits_per_s, 1500.0, epsilon = 1e-9);
        assert_relative_eq!(r.jain_index.unwrap(), 0.9, epsilon = 1e-12);
        assert_eq!(r.rounds, Some(out.rounds));
        assert!(r.available_clusters_per_vehicle.is_some());
    }

    #[test]
    fn report_handles_a_fully_stranded_instance() {
        let inst = synthetic_instance(vec![vec![0.0], vec![0.0]], 2, 2, params()).unwrap();
        let m = Matching::new(2);
        let r = report(&inst, &params(), &m, None).unwrap();
        assert_eq!(r.jain_index, None);
        assert_eq!(r.mismanagement_ratio, 1.0);
        assert_eq!(r.sum_log_utility, 0.0);
        assert_eq!(r.mean_rate_bits_per_s, 0.0);
        assert_eq!(r.rounds, None);
    }

    fn fixed_report(x: f64) -> MetricsReport {
        MetricsReport {
            jain_index: Some(x),
            mismanagement_ratio: x,
            sum_log_utility: x,
            mean_rate_bits_per_s: x,
            available_clusters_per_vehicle: None,
            rounds: None,
        }
    }

    #[test]
    fn aggregate_hand_values() {
        let single = aggregate(&[fixed_report(0.7)]).unwrap();
        assert_eq!(single.mismanagement_ratio.mean, 0.7);
        assert_eq!(single.mismanagement_ratio.std_dev, 0.0);
        assert_eq!(single.mismanagement_ratio.count, 1);
        assert_eq!(single.rounds, None);

        let two = aggregate(&[fixed_report(0.2), fixed_report(0.4)]).unwrap();
        assert_relative_eq!(two.jain_index.unwrap().mean, 0.3, epsilon = 1e-15);
        // Sample std of {0.2, 0.4}.
        assert_relative_eq!(
            two.jain_index.unwrap().std_dev,
            f64::sqrt(0.02),
            epsilon = 1e-12
        );
        assert!(aggregate(&[]).is_err());
    }

    #[test]
    fn aggregate_ignores_order_bit_for_bit() {
        let a = [
            fixed_report(0.123456789),
            fixed_report(0.987654321),
            fixed_report(0.555555555),
            fixed_report(1e-9),
            fixed_report(17.25),
        ];
        let mut b = a;
        b.reverse();
        b.swap(1, 3);
        let sa = aggregate(&a).unwrap();
        let sb = aggregate(&b).unwrap();
        assert_eq!(sa, sb);
        assert_eq!(
            sa.sum_log_utility.mean.to_bits(),
            sb.sum_log_utility.mean.to_bits()
        );
        assert_eq!(
            sa.sum_log_utility.std_dev.to_bits(),
            sb.sum_log_utility.std_dev.to_bits()
        );
    }

    #[test]
    fn aggregate_counts_only_reports_carrying_a_field() {
        let mut with_rounds = fixed_report(0.5);
        with_rounds.rounds = Some(10);
        with_rounds.available_clusters_per_vehicle = Some(2.0);
        let without = fixed_report(0.5);
        let s = aggregate(&[with_rounds, without]).unwrap();
        assert_eq!(s.rounds.unwrap().count, 1);
        assert_eq!(s.rounds.unwrap().mean, 10.0);
        assert_eq!(s.available_clusters_per_vehicle.unwrap().count, 1);
        assert_eq!(s.mismanagement_ratio.count, 2);
    }
}
