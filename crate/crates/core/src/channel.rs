//! Physical-layer success probabilities under Rayleigh block fading.
//!
//! Everything here works on dimensionless ratios: mean SNRs per Hz, the
//! spectral efficiency `R = b / (W T)` and the per-band sensing time as a
//! fraction of the slot. The secondary user senses `m_bands` bands with
//! `k_antennas` antennas, which takes `ceil(M / K)` band-sensing periods, and
//! transmits one packet over the aggregate of the bands it declared idle.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How the secondary transmitter scales its power with the aggregated bandwidth.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum PowerMode {
    /// Fixed power spectral density: total power grows with the number of bands.
    #[default]
    Psd,
    /// Fixed total power per slot, spread over however many bands are used.
    Limited,
}

impl PowerMode {
    pub const ALL: [PowerMode; 2] = [PowerMode::Psd, PowerMode::Limited];

    pub fn as_str(self) -> &'static str {
        match self {
            PowerMode::Psd => "psd",
            PowerMode::Limited => "limited",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelParams {
    /// Primary link mean SNR. Mutually exclusive with `p_bar_p`.
    pub snr_p: Option<f64>,
    /// Primary success probability given directly.
    pub p_bar_p: Option<f64>,
    /// Secondary link mean SNR on its best antenna.
    pub snr_s: f64,
    pub spectral_eff_r: f64,
    /// Time to sense one band, as a fraction of the slot.
    pub tau_b_frac: f64,
    pub m_bands: u32,
    pub k_antennas: u32,
    pub power_mode: PowerMode,
}

/// Effective secondary spectral efficiency once sensing overhead is paid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Rate {
    Finite(f64),
    /// Sensing consumed the whole slot; nothing can be delivered.
    Infinite,
}

impl Rate {
    pub fn is_infinite(self) -> bool {
        matches!(self, Rate::Infinite)
    }

    pub fn as_f64(self) -> f64 {
        match self {
            Rate::Finite(r) => r,
            Rate::Infinite => f64::INFINITY,
        }
    }
}

fn in_unit(x: f64) -> bool {
    (0.0..=1.0).contains(&x)
}

impl ChannelParams {
    // `!(x > 0.0)` also rejects NaN
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn validate(&self) -> Result<()> {
        match (self.snr_p, self.p_bar_p) {
            (Some(_), Some(_)) => {
                return Err(Error::config(
                    "snr_p",
                    "exactly one of snr_p and p_bar_p may be given, found both",
                ))
            }
            (None, None) => {
                return Err(Error::config(
                    "snr_p",
                    "exactly one of snr_p and p_bar_p must be given, found neither",
                ))
            }
            (Some(snr), None) if !(snr > 0.0) => {
                return Err(Error::config("snr_p", format!("snr_p > 0 (got {snr})")))
            }
            (None, Some(p)) if !in_unit(p) => {
                return Err(Error::config("p_bar_p", format!("p_bar_p ∈ [0,1] (got {p})")))
            }
            _ => {}
        }
        if !(self.snr_s > 0.0) {
            return Err(Error::config("snr_s", format!("snr_s > 0 (got {})", self.snr_s)));
        }
        if !(self.spectral_eff_r > 0.0) || !self.spectral_eff_r.is_finite() {
            return Err(Error::config(
                "spectral_eff_r",
                format!("spectral_eff_r > 0 (got {})", self.spectral_eff_r),
            ));
        }
        if !in_unit(self.tau_b_frac) {
            return Err(Error::config(
                "tau_b_frac",
                format!("tau_b_frac ∈ [0,1] (got {})", self.tau_b_frac),
            ));
        }
        if self.m_bands == 0 {
            return Err(Error::config("m_bands", "m_bands ≥ 1 (got 0)"));
        }
        if self.k_antennas == 0 {
            return Err(Error::config("k_antennas", "k_antennas ≥ 1 (got 0)"));
        }
        Ok(())
    }

    /// Same parameters with a different number of sensed bands.
    pub fn with_bands(&self, m_bands: u32) -> Self {
        ChannelParams {
            m_bands,
            ..self.clone()
        }
    }

    pub fn with_power_mode(&self, power_mode: PowerMode) -> Self {
        ChannelParams {
            power_mode,
            ..self.clone()
        }
    }

    fn check_eta(&self, eta: u32) -> Result<()> {
        if eta == 0 || eta > self.m_bands {
            return Err(Error::Argument(format!(
                "eta must lie in 1..={} (got {eta})",
                self.m_bands
            )));
        }
        Ok(())
    }
}

/// Fraction of the slot spent sensing: `ceil(M / K) * tau_B / T`.
pub fn sensing_fraction(p: &ChannelParams) -> f64 {
    f64::from(p.m_bands.div_ceil(p.k_antennas)) * p.tau_b_frac
}

/// Primary link success probability `exp(-(2^R - 1) / snr_p)`, or `p_bar_p` when given.
pub fn pu_success_prob(p: &ChannelParams) -> Result<f64> {
    match (p.snr_p, p.p_bar_p) {
        (None, Some(prob)) => Ok(prob),
        (Some(snr), None) => Ok((-(p.spectral_eff_r.exp2() - 1.0) / snr).exp()),
        _ => Err(Error::config(
            "snr_p",
            "exactly one of snr_p and p_bar_p must be given",
        )),
    }
}

/// Spectral efficiency needed when the packet is spread over `eta` bands in the
/// time left after sensing.
pub fn su_effective_rate(p: &ChannelParams, eta: u32) -> Result<Rate> {
    p.check_eta(eta)?;
    Ok(effective_rate(p, eta))
}

fn effective_rate(p: &ChannelParams, eta: u32) -> Rate {
    let remaining = (1.0 - sensing_fraction(p)).max(0.0);
    if remaining <= 0.0 {
        Rate::Infinite
    } else {
        Rate::Finite(p.spectral_eff_r / (f64::from(eta) * remaining))
    }
}

/// Secondary success probability over `eta` aggregated, truly idle bands.
pub fn su_success_prob(p: &ChannelParams, eta: u32) -> Result<f64> {
    p.check_eta(eta)?;
    Ok(success_unchecked(p, eta))
}

// Caller guarantees 1 <= eta. eta may exceed m_bands in the single-band baseline
// only through eta == 1, which is always in range.
fn success_unchecked(p: &ChannelParams, eta: u32) -> f64 {
    match effective_rate(p, eta) {
        Rate::Infinite => 0.0,
        Rate::Finite(rate) => {
            let outage_exponent = (rate.exp2() - 1.0) / p.snr_s;
            let scale = match p.power_mode {
                PowerMode::Psd => 1.0,
                PowerMode::Limited => f64::from(eta),
            };
            // 2^rate may overflow to +inf; exp(-inf) is then exactly 0.
            (-scale * outage_exponent).exp()
        }
    }
}

/// Success probabilities for every aggregate width `0..=m_bands`; index 0 is 0.
pub fn su_success_table(p: &ChannelParams) -> Vec<f64> {
    std::iter::once(0.0)
        .chain((1..=p.m_bands).map(|n| success_unchecked(p, n)))
        .collect()
}
