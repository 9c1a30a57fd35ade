//! Choice of how many primary bands the secondary user should sense.
//!
//! Sensing fewer bands shortens the sensing phase and lowers the chance of
//! misdetecting an active primary, at the cost of fewer aggregation
//! opportunities. The profile is evaluated by grid search over `1..=M`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{empty_probability, primary_service_rate, secondary_rate_given_pi, TrafficParams};
use crate::channel::{pu_success_prob, ChannelParams};
use crate::error::{Error, Result};
use crate::sensing::SensingParams;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizeResult {
    /// Smallest maximiser of the profile.
    pub m_opt: u32,
    pub mu_s_opt: f64,
    /// `(m, mu_s(m))` for `m = 1..=M`.
    pub profile: Vec<(u32, f64)>,
    /// Service rate of a primary whose band is sensed.
    pub mu_p_sensed: f64,
    /// Service rate of a primary whose band the secondary never touches.
    pub mu_p_unsensed: f64,
}

pub fn optimize_sensed_bands(
    c: &ChannelParams,
    s: &SensingParams,
    t: &TrafficParams,
) -> Result<OptimizeResult> {
    let mu_p = primary_service_rate(c, s)?;
    if t.lambda_p >= mu_p {
        return Err(Error::UnstablePrimary {
            lambda_p: t.lambda_p,
            mu_p,
        });
    }
    let pi = empty_probability(mu_p, t)?;

    let profile: Vec<(u32, f64)> = (1..=c.m_bands)
        .into_par_iter()
        .map(|m| (m, secondary_rate_given_pi(&c.with_bands(m), s, pi)))
        .collect();

    // strict > keeps the first (smallest) maximiser
    let (m_opt, mu_s_opt) = profile
        .iter()
        .copied()
        .fold((0, f64::NEG_INFINITY), |best, cur| if cur.1 > best.1 { cur } else { best });

    Ok(OptimizeResult {
        m_opt,
        mu_s_opt,
        profile,
        mu_p_sensed: mu_p,
        mu_p_unsensed: pu_success_prob(c)?,
    })
}
