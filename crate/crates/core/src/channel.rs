//! Finite-blocklength channel model.
//!
//! A link that is granted `n` bandwidth units of width `b0` for a slot of
//! `t` seconds carries `n * b0 * t` channel uses. In the finite-blocklength
//! (normal approximation) regime the number of bits per slot is
//!
//! ```text
//! omega = n*b0*t * [ log2(1 + P*g/n) - sqrt(U / (n*b0*t)) * Qinv(eps) / ln 2 ]
//! U     = 1 - (1 + P*g/n)^-2
//! g     = |h|^2 / (b0 * sigma2)
//! ```
//!
//! where `eps` is the tolerated decoding error probability. Dropping the
//! square-root penalty recovers the classical capacity `n*b0*t * log2(1+P*g/n)`,
//! which this module exposes as the infinite-blocklength mode. Negative values
//! are clamped to zero and a zero rate marks the link as unusable.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const LN_2: f64 = std::f64::consts::LN_2;
const SQRT_2: f64 = std::f64::consts::SQRT_2;

/// Whether the rate formula keeps the finite-blocklength penalty term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BlocklengthMode {
    Finite,
    Infinite,
}

/// Static channel parameters shared by every link of an instance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelParams {
    /// Width of one bandwidth unit in Hz.
    pub bandwidth_unit_hz: f64,
    /// Slot duration in seconds.
    pub slot_duration_s: f64,
    /// Total number of bandwidth units available to the cell.
    pub max_bandwidth_units: u32,
    /// Noise power spectral density in W/Hz.
    pub noise_psd_w_per_hz: f64,
    /// Tolerated decoding error probability, in (0, 1).
    pub target_error_prob: f64,
    pub blocklength: BlocklengthMode,
}

impl ChannelParams {
    pub fn validate(&self) -> Result<()> {
        let mut faults = Vec::new();
        if !(self.bandwidth_unit_hz > 0.0) {
            faults.push("bandwidth_unit_hz must be > 0");
        }
        if !(self.slot_duration_s > 0.0) {
            faults.push("slot_duration_s must be > 0");
        }
        if self.max_bandwidth_units == 0 {
            faults.push("max_bandwidth_units must be >= 1");
        }
        if !(self.noise_psd_w_per_hz > 0.0) {
            faults.push("noise_psd_w_per_hz must be > 0");
        }
        if !(self.target_error_prob > 0.0 && self.target_error_prob < 1.0) {
            faults.push("target_error_prob must lie in (0, 1)");
        }
        if faults.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidParameter(faults.join("; ")))
        }
    }

    /// Channel uses available to a link holding `n_units` bandwidth units.
    pub fn channel_uses(&self, n_units: u32) -> f64 {
        f64::from(n_units) * self.bandwidth_unit_hz * self.slot_duration_s
    }

    /// Converts a per-slot rate into bits per second.
    pub fn bits_per_second(&self, omega_bits_per_slot: f64) -> f64 {
        omega_bits_per_slot / self.slot_duration_s
    }
}

/// Per-link state: fading power gain, transmit power, and bandwidth share.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkState {
    /// Squared fading envelope including path loss, |h|^2.
    pub gain_mag_sq: f64,
    /// Transmit power in W.
    pub tx_power_w: f64,
    /// Bandwidth units granted to this link; must be >= 1.
    pub n_units: u32,
}

impl LinkState {
    pub fn new(gain_mag_sq: f64, tx_power_w: f64, n_units: u32) -> Result<Self> {
        if !(gain_mag_sq >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "gain_mag_sq must be >= 0, got {gain_mag_sq}"
            )));
        }
        if !(tx_power_w > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "tx_power_w must be > 0, got {tx_power_w}"
            )));
        }
        if n_units == 0 {
            return Err(Error::InvalidParameter(
                "n_units must be >= 1".to_string(),
            ));
        }
        Ok(Self {
            gain_mag_sq,
            tx_power_w,
            n_units,
        })
    }

    /// Noise-normalized gain g = |h|^2 / (b0 * sigma2).
    pub fn normalized_gain(&self, params: &ChannelParams) -> f64 {
        self.gain_mag_sq / (params.bandwidth_unit_hz * params.noise_psd_w_per_hz)
    }

    /// Per-unit SNR, P * g / n.
    pub fn snr_per_unit(&self, params: &ChannelParams) -> f64 {
        self.tx_power_w * self.normalized_gain(params) / f64::from(self.n_units)
    }
}

/// Gaussian tail probability Q(x) = P(Z > x) for Z ~ N(0, 1).
pub fn q_function(x: f64) -> f64 {
    0.5 * libm::erfc(x / SQRT_2)
}

/// Standard normal density.
fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Inverse of [`q_function`]: returns x with Q(x) = eps.
///
/// A rational approximation of the normal quantile seeds a couple of Newton
/// steps against `q_function` itself, so the round trip `Q(Qinv(eps))`
/// reproduces `eps` to about machine precision.
pub fn inverse_q(eps: f64) -> Result<f64> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "inverse_q requires eps in (0, 1), got {eps}"
        )));
    }
    let mut x = -normal_quantile(eps);
    // Newton on f(x) = Q(x) - eps, f'(x) = -pdf(x).
    for _ in 0..4 {
        let f = q_function(x) - eps;
        let d = normal_pdf(x);
        if d == 0.0 {
            break;
        }
        let step = f / d;
        if !step.is_finite() {
            break;
        }
        x += step;
        if step.abs() <= 1e-16 * x.abs().max(1.0) {
            break;
        }
    }
    Ok(x)
}

/// Acklam's rational approximation of the standard normal quantile,
/// accurate to ~1e-9 relative error before refinement.
fn normal_quantile(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.383577518672690e+02,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    const P_LOW: f64 = 0.02425;

    if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        let q = (-2.0 * (1.0 - p).ln()).sqrt();
        -(((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    }
}

/// Channel dispersion U = 1 - (1 + snr)^-2 for the per-unit SNR of the link.
///
/// Approaches 1 from below as the SNR grows and is 0 at zero SNR.
pub fn channel_dispersion(params: &ChannelParams, link: &LinkState) -> f64 {
    let snr = link.snr_per_unit(params);
    let t = 1.0 + snr;
    1.0 - 1.0 / (t * t)
}

/// Bits deliverable in one slot over the given link; zero means unusable.
///
/// Finite mode subtracts the dispersion penalty `sqrt(U/L) * Qinv(eps) / ln 2`
/// per channel use; infinite mode keeps only the log term. Results below zero
/// clamp to zero.
pub fn transmission_rate(params: &ChannelParams, link: &LinkState) -> Result<f64> {
    params.validate()?;
    if link.n_units == 0 {
        return Err(Error::InvalidParameter(
            "transmission_rate requires n_units >= 1".to_string(),
        ));
    }
    let uses = params.channel_uses(link.n_units);
    let snr = link.snr_per_unit(params);
    let per_use = (1.0 + snr).log2();
    let raw = match params.blocklength {
        BlocklengthMode::Infinite => uses * per_use,
        BlocklengthMode::Finite => {
            let u = channel_dispersion(params, link);
            let penalty = (u / uses).sqrt() * inverse_q(params.target_error_prob)? / LN_2;
            uses * (per_use - penalty)
        }
    };
    Ok(raw.max(0.0))
}

/// Samples a fading power gain |h|^2 = E * d^-eta with E a unit-mean
/// exponential draw (Rayleigh envelope) and d the link distance in meters.
pub fn sample_rayleigh_gain<R: Rng + ?Sized>(
    rng: &mut R,
    distance_m: f64,
    path_loss_exp: f64,
) -> Result<f64> {
    if !(distance_m > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "distance must be > 0, got {distance_m}"
        )));
    }
    // Inverse-CDF sampling keeps the draw stable across dependency upgrades.
    let u: f64 = rng.gen();
    let envelope = -(1.0 - u).ln();
    Ok(envelope * distance_m.powf(-path_loss_exp))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn params(eps: f64, mode: BlocklengthMode) -> ChannelParams {
        ChannelParams {
            bandwidth_unit_hz: 100_000.0,
            slot_duration_s: 0.001,
            max_bandwidth_units: 64,
            noise_psd_w_per_hz: 1.0 / 100_000.0,
            target_error_prob: eps,
            blocklength: mode,
        }
    }

    /// Adaptive Simpson quadrature of the normal density on [x, 40],
    /// independent of the erfc-based implementation.
    fn q_by_quadrature(x: f64) -> f64 {
        fn simpson(a: f64, b: f64) -> f64 {
            let m = 0.5 * (a + b);
            (b - a) / 6.0 * (normal_pdf(a) + 4.0 * normal_pdf(m) + normal_pdf(b))
        }
        fn adapt(a: f64, b: f64, whole: f64, depth: u32) -> f64 {
            let m = 0.5 * (a + b);
            let left = simpson(a, m);
            let right = simpson(m, b);
            if depth == 0 || (left + right - whole).abs() < 1e-13 {
                left + right + (left + right - whole) / 15.0
            } else {
                adapt(a, m, left, depth - 1) + adapt(m, b, right, depth - 1)
            }
        }
        adapt(x, 40.0, simpson(x, 40.0), 48)
    }

    /// Plain bisection of q_function, independent of the Newton refinement.
    fn inverse_q_by_bisection(eps: f64) -> f64 {
        let (mut lo, mut hi) = (-40.0_f64, 40.0_f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if q_function(mid) > eps {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn q_at_zero_is_one_half() {
        assert_eq!(q_function(0.0), 0.5);
    }

    #[test]
    fn q_at_one_matches_quadrature_oracle() {
        let oracle = q_by_quadrature(1.0);
        assert_relative_eq!(oracle, 0.15865525393145707, max_relative = 1e-12);
        assert!((q_function(1.0) - oracle).abs() <= 1e-10);
    }

    #[test]
    fn q_tail_saturates_toward_one() {
        assert!(q_function(-8.0) > 1.0 - 1e-14);
    }

    #[test]
    fn inverse_q_at_one_half_is_zero() {
        assert_eq!(inverse_q(0.5).unwrap(), 0.0);
    }

    #[test]
    fn inverse_q_round_trips_near_one() {
        let x = inverse_q(q_function(1.0)).unwrap();
        assert!((x - 1.0).abs() <= 1e-8);
    }

    #[test]
    fn inverse_q_matches_bisection_oracle() {
        let x = inverse_q(1e-3).unwrap();
        let oracle = inverse_q_by_bisection(1e-3);
        assert!((x - oracle).abs() <= 1e-9);
        assert_relative_eq!(x, 3.0902323061678135, max_relative = 1e-12);
    }

    #[test]
    fn inverse_q_rejects_out_of_range() {
        assert!(inverse_q(0.0).is_err());
        assert!(inverse_q(1.0).is_err());
        assert!(inverse_q(-0.3).is_err());
    }

    #[test]
    fn dispersion_zero_snr() {
        let p = params(1e-3, BlocklengthMode::Finite);
        let link = LinkState::new(0.0, 1.0, 1).unwrap();
        assert_eq!(channel_dispersion(&p, &link), 0.0);
    }

    #[test]
    fn dispersion_at_snr_ten() {
        let p = params(1e-3, BlocklengthMode::Finite);
        // g = |h|^2 / (b0 * sigma2) = |h|^2 here, so snr = 10 * 1 / 1.
        let link = LinkState::new(10.0, 1.0, 1).unwrap();
        assert_relative_eq!(
            channel_dispersion(&p, &link),
            0.9917355371900826,
            max_relative = 1e-14
        );
    }

    #[test]
    fn dispersion_stays_below_one() {
        let p = params(1e-3, BlocklengthMode::Finite);
        let link = LinkState::new(1e7, 1.0, 1).unwrap();
        let u = channel_dispersion(&p, &link);
        assert!(u < 1.0);
        assert!(1.0 - u < 1e-13);
    }

    #[test]
    fn worked_rate_value() {
        // 100 channel uses, per-unit SNR 10, eps = 1e-3. The expected value is
        // an independent recomputation: 100*(log2(11) - sqrt(U/100)*Qinv/ln2)
        // with Qinv from the bisection oracle.
        let p = params(1e-3, BlocklengthMode::Finite);
        let link = LinkState::new(10.0, 1.0, 1).unwrap();
        let qinv = inverse_q_by_bisection(1e-3);
        let u: f64 = 1.0 - (11.0f64).powi(-2);
        let expected = 100.0 * ((11.0f64).log2() - (u / 100.0).sqrt() * qinv / LN_2);
        let got = transmission_rate(&p, &link).unwrap();
        assert_relative_eq!(got, expected, max_relative = 1e-12);
        assert_relative_eq!(got, 301.5451415799149, max_relative = 1e-3);
    }

    #[test]
    fn rate_clamps_to_zero_at_weak_snr() {
        let p = params(1e-3, BlocklengthMode::Finite);
        let link = LinkState::new(1e-9, 1.0, 1).unwrap();
        assert_eq!(transmission_rate(&p, &link).unwrap(), 0.0);
    }

    #[test]
    fn rate_zero_at_zero_gain() {
        for mode in [BlocklengthMode::Finite, BlocklengthMode::Infinite] {
            let p = params(1e-3, mode);
            let link = LinkState::new(0.0, 1.0, 1).unwrap();
            assert_eq!(transmission_rate(&p, &link).unwrap(), 0.0);
        }
    }

    #[test]
    fn rate_at_half_eps_equals_infinite_mode() {
        let fin = params(0.5, BlocklengthMode::Finite);
        let inf = params(0.5, BlocklengthMode::Infinite);
        let link = LinkState::new(10.0, 1.0, 1).unwrap();
        let a = transmission_rate(&fin, &link).unwrap();
        let b = transmission_rate(&inf, &link).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn zero_units_rejected() {
        assert!(LinkState::new(1.0, 1.0, 0).is_err());
    }

    #[test]
    fn rayleigh_mean_is_unit_at_unit_distance() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 1_000_000;
        let mut acc = 0.0;
        for _ in 0..n {
            acc += sample_rayleigh_gain(&mut rng, 1.0, 0.0).unwrap();
        }
        let mean = acc / n as f64;
        assert!((mean - 1.0).abs() < 0.01, "mean {mean}");
    }

    #[test]
    fn rayleigh_mean_scales_with_path_loss() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 1_000_000;
        let mut acc = 0.0;
        for _ in 0..n {
            acc += sample_rayleigh_gain(&mut rng, 10.0, 3.0).unwrap();
        }
        let mean = acc / n as f64;
        assert!((mean - 1e-3).abs() < 1e-5, "mean {mean}");
    }

    #[test]
    fn rayleigh_rejects_nonpositive_distance() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(sample_rayleigh_gain(&mut rng, 0.0, 3.0).is_err());
    }
}
