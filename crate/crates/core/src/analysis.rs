//! Closed-form service rates and the stability region of the interacting queues.
//!
//! The secondary user is analysed in the dominant system, where it always has
//! a packet (dummy if its real queue is empty). Each of the `M` symmetric
//! primary queues is then an independent discrete-time queue served with
//! probability `mu_p = P_p (1 - p_md)`, empty with probability
//! `pi = 1 - lambda_p / mu_p`. The secondary service rate sums, over the number
//! of idle bands `eta` and the number `n` of those declared idle, the chance
//! that every busy band is detected times the success probability over `n`
//! aggregated bands.

use serde::{Deserialize, Serialize};

use crate::channel::{self, ChannelParams, PowerMode};
use crate::error::{Error, Result};
use crate::math::binomial_pmf;
use crate::sensing::{decision_probability, SensingParams};

/// Largest band count the enumeration oracle accepts (4^M outcomes).
pub const ORACLE_MAX_BANDS: u32 = 12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrafficParams {
    pub lambda_p: f64,
    pub lambda_s: f64,
}

impl TrafficParams {
    pub fn validate(&self) -> Result<()> {
        for (key, v) in [("lambda_p", self.lambda_p), ("lambda_s", self.lambda_s)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::config(key, format!("{key} ∈ [0,1] (got {v})")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyticalResult {
    pub mu_p: f64,
    pub pi: f64,
    pub mu_s: f64,
    pub primary_stable: bool,
    pub secondary_stable: bool,
}

/// Primary service rate in the dominant system.
pub fn primary_service_rate(c: &ChannelParams, s: &SensingParams) -> Result<f64> {
    Ok(channel::pu_success_prob(c)? * (1.0 - s.p_md))
}

/// Probability that a primary queue is empty, `1 - lambda_p / mu_p`.
pub fn empty_probability(mu_p: f64, t: &TrafficParams) -> Result<f64> {
    if t.lambda_p == 0.0 {
        return Ok(1.0);
    }
    if t.lambda_p > mu_p || mu_p <= 0.0 {
        return Err(Error::UnstablePrimary {
            lambda_p: t.lambda_p,
            mu_p,
        });
    }
    Ok((1.0 - t.lambda_p / mu_p).max(0.0))
}

/// Secondary service rate for a given per-band empty probability.
pub fn secondary_rate_given_pi(c: &ChannelParams, s: &SensingParams, pi: f64) -> f64 {
    let m = c.m_bands;
    let success = channel::su_success_table(c);
    (1..=m)
        .map(|eta| {
            let occupancy = binomial_pmf(m, eta, pi);
            if occupancy == 0.0 {
                return 0.0;
            }
            // decision_probability carries the (1 - p_md)^(M - eta) busy-band factor
            let inner: f64 = (1..=eta)
                .map(|n| {
                    decision_probability(eta, n, true, s, m).expect("n <= eta <= m")
                        * success[n as usize]
                })
                .sum();
            occupancy * inner
        })
        .sum()
}

/// Dominant-system secondary service rate, the stability boundary for `lambda_s`.
pub fn secondary_service_rate(
    c: &ChannelParams,
    s: &SensingParams,
    t: &TrafficParams,
) -> Result<f64> {
    let mu_p = primary_service_rate(c, s)?;
    let pi = empty_probability(mu_p, t)?;
    Ok(secondary_rate_given_pi(c, s, pi))
}

/// Brute-force secondary service rate by enumerating every occupancy pattern
/// and every sensing outcome and applying the access rules literally.
///
/// Refuses `m_bands > ORACLE_MAX_BANDS`.
pub fn mu_s_oracle(c: &ChannelParams, s: &SensingParams, t: &TrafficParams) -> Result<f64> {
    let m = c.m_bands;
    if m > ORACLE_MAX_BANDS {
        return Err(Error::TooLarge {
            m_bands: m,
            limit: ORACLE_MAX_BANDS,
        });
    }
    let mu_p = primary_service_rate(c, s)?;
    let pi = empty_probability(mu_p, t)?;
    let success = channel::su_success_table(c);
    let patterns = 1u32 << m;

    let mut total = 0.0;
    for busy_mask in 0..patterns {
        let p_occupancy: f64 = (0..m)
            .map(|b| if busy_mask >> b & 1 == 1 { 1.0 - pi } else { pi })
            .product();
        if p_occupancy == 0.0 {
            continue;
        }
        for idle_decl_mask in 0..patterns {
            let mut p_decision = 1.0;
            for b in 0..m {
                let busy = busy_mask >> b & 1 == 1;
                let declared_idle = idle_decl_mask >> b & 1 == 1;
                let p_idle = s.idle_probability(busy);
                p_decision *= if declared_idle { p_idle } else { 1.0 - p_idle };
            }
            let width = idle_decl_mask.count_ones();
            let transmits = width > 0;
            let collides = busy_mask & idle_decl_mask != 0;
            if transmits && !collides {
                total += p_occupancy * p_decision * success[width as usize];
            }
        }
    }
    Ok(total)
}

/// One grid point of the stability region boundary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum BoundaryPoint {
    /// `(lambda_p, lambda_s)` is stable iff `lambda_s < lambda_s_max`.
    Inside { lambda_p: f64, lambda_s_max: f64 },
    /// `lambda_p ≥ mu_p`: no secondary rate is stable here.
    Skipped { lambda_p: f64, warning: String },
}

/// Traces the boundary `lambda_s < mu_s(lambda_p)` over a grid of primary rates.
pub fn stability_region(
    c: &ChannelParams,
    s: &SensingParams,
    lambda_p_grid: &[f64],
) -> Result<Vec<BoundaryPoint>> {
    let mu_p = primary_service_rate(c, s)?;
    Ok(lambda_p_grid
        .iter()
        .map(|&lambda_p| {
            if lambda_p >= mu_p || lambda_p < 0.0 {
                BoundaryPoint::Skipped {
                    lambda_p,
                    warning: format!("lambda_p = {lambda_p} outside [0, mu_p = {mu_p})"),
                }
            } else {
                let pi = 1.0 - lambda_p / mu_p;
                BoundaryPoint::Inside {
                    lambda_p,
                    lambda_s_max: secondary_rate_given_pi(c, s, pi),
                }
            }
        })
        .collect())
}

/// True iff `(lambda_p, lambda_s)` lies strictly inside the stability region.
pub fn is_stable(c: &ChannelParams, s: &SensingParams, t: &TrafficParams) -> Result<bool> {
    let mu_p = primary_service_rate(c, s)?;
    if t.lambda_p >= mu_p {
        return Ok(false);
    }
    Ok(t.lambda_s < secondary_service_rate(c, s, t)?)
}

/// Baseline where the secondary user picks a single band among those sensed
/// idle and puts its full slot power on it.
pub fn single_band_service_rate(
    c: &ChannelParams,
    s: &SensingParams,
    t: &TrafficParams,
) -> Result<f64> {
    let mu_p = primary_service_rate(c, s)?;
    let pi = empty_probability(mu_p, t)?;
    let m = c.m_bands;
    // Full power on one band of width W: the eta = 1 case, identical in both modes.
    let p_single = channel::su_success_prob(&c.with_power_mode(PowerMode::Psd), 1)?;
    let rate: f64 = (1..=m)
        .map(|eta| {
            let at_least_one_declared = 1.0 - s.p_fa.powi(eta as i32);
            binomial_pmf(m, eta, pi)
                * (1.0 - s.p_md).powi((m - eta) as i32)
                * at_least_one_declared
        })
        .sum();
    Ok(rate * p_single)
}

/// All closed-form quantities for one operating point.
pub fn analyze(c: &ChannelParams, s: &SensingParams, t: &TrafficParams) -> Result<AnalyticalResult> {
    let mu_p = primary_service_rate(c, s)?;
    let pi = empty_probability(mu_p, t)?;
    let mu_s = secondary_rate_given_pi(c, s, pi);
    Ok(AnalyticalResult {
        mu_p,
        pi,
        mu_s,
        primary_stable: t.lambda_p < mu_p,
        secondary_stable: t.lambda_s < mu_s,
    })
}
