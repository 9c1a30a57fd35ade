//! Per-band binary sensing channel.
//!
//! A busy band is declared idle with probability `p_md` (misdetection); an
//! idle band is declared busy with probability `p_fa` (false alarm). Each band
//! is decided independently every slot.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::binomial;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SensingParams {
    pub p_fa: f64,
    pub p_md: f64,
}

impl SensingParams {
    pub fn new(p_fa: f64, p_md: f64) -> Result<Self> {
        let s = SensingParams { p_fa, p_md };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.p_fa) {
            return Err(Error::config("p_fa", format!("p_fa ∈ [0,1] (got {})", self.p_fa)));
        }
        if !(0.0..=1.0).contains(&self.p_md) {
            return Err(Error::config("p_md", format!("p_md ∈ [0,1] (got {})", self.p_md)));
        }
        Ok(())
    }

    /// Probability that a band in the given state is declared idle.
    pub fn idle_probability(&self, busy: bool) -> f64 {
        if busy {
            self.p_md
        } else {
            1.0 - self.p_fa
        }
    }

    /// Decision for one band from a uniform draw in `[0, 1)`.
    ///
    /// Thresholding a shared uniform keeps decisions monotone across coupled
    /// runs: the same draw on the same band state always gives the same answer.
    pub fn declares_idle(&self, busy: bool, uniform: f64) -> bool {
        uniform < self.idle_probability(busy)
    }
}

/// True at index `m` iff the primary user on band `m` transmits this slot.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BandState(pub Vec<bool>);

/// True at index `m` iff the secondary user declares band `m` idle.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SensingDecision(pub Vec<bool>);

impl BandState {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_busy(&self, band: usize) -> bool {
        self.0[band]
    }
}

impl SensingDecision {
    /// Number of bands declared idle, i.e. the aggregate width used.
    pub fn idle_count(&self) -> usize {
        self.0.iter().filter(|&&idle| idle).count()
    }

    pub fn is_declared_idle(&self, band: usize) -> bool {
        self.0[band]
    }

    /// True iff some band declared idle is actually busy.
    pub fn hits_busy_band(&self, bands: &BandState) -> bool {
        self.0.iter().zip(&bands.0).any(|(&idle, &busy)| idle && busy)
    }
}

/// Draws one sensing decision per band, consuming exactly one uniform per band.
pub fn sense<R: Rng + ?Sized>(bands: &BandState, s: &SensingParams, rng: &mut R) -> SensingDecision {
    SensingDecision(
        bands
            .0
            .iter()
            .map(|&busy| s.declares_idle(busy, rng.random::<f64>()))
            .collect(),
    )
}

/// Probability that, with `eta_free` idle bands out of `m`, exactly
/// `n_declared_free` of the idle ones are declared idle and (when
/// `all_busy_detected`) every busy band is correctly declared busy.
///
/// Without `all_busy_detected` the busy-band factor is dropped.
pub fn decision_probability(
    eta_free: u32,
    n_declared_free: u32,
    all_busy_detected: bool,
    s: &SensingParams,
    m: u32,
) -> Result<f64> {
    if n_declared_free > eta_free || eta_free > m {
        return Err(Error::Argument(format!(
            "need n ≤ eta ≤ M, got n={n_declared_free} eta={eta_free} M={m}"
        )));
    }
    let idle_part = binomial(eta_free, n_declared_free)
        * (1.0 - s.p_fa).powi(n_declared_free as i32)
        * s.p_fa.powi((eta_free - n_declared_free) as i32);
    let busy_part = if all_busy_detected {
        (1.0 - s.p_md).powi((m - eta_free) as i32)
    } else {
        1.0
    };
    Ok(idle_part * busy_part)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn perfect_sensing() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let s = SensingParams::new(0.0, 0.0).unwrap();
        let idle = BandState(vec![false; 16]);
        assert!(sense(&idle, &s, &mut rng).0.iter().all(|&d| d));
        let busy = BandState(vec![true; 16]);
        assert_eq!(sense(&busy, &s, &mut rng).idle_count(), 0);
    }

    #[test]
    fn both_idle_fraction_matches_independence() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let s = SensingParams::new(0.05, 0.0).unwrap();
        let bands = BandState(vec![false, false]);
        let trials = 1_000_000;
        let hits = (0..trials)
            .filter(|_| sense(&bands, &s, &mut rng).idle_count() == 2)
            .count();
        let frac = hits as f64 / trials as f64;
        assert!((frac - 0.9025).abs() <= 0.001, "{frac}");
    }

    #[test]
    fn marginals_within_three_standard_errors() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let s = SensingParams::new(0.07, 0.2).unwrap();
        let bands = BandState(vec![true, false]);
        let n = 1_000_000;
        let (mut md, mut fa) = (0u32, 0u32);
        for _ in 0..n {
            let d = sense(&bands, &s, &mut rng);
            md += d.0[0] as u32;
            fa += !d.0[1] as u32;
        }
        for (count, p) in [(md, s.p_md), (fa, s.p_fa)] {
            let se = (p * (1.0 - p) / n as f64).sqrt();
            let est = f64::from(count) / n as f64;
            assert!((est - p).abs() <= 3.0 * se, "est {est} vs {p}");
        }
    }

    #[test]
    fn decision_probability_examples() {
        let s = SensingParams::new(0.05, 0.05).unwrap();
        let p = decision_probability(1, 1, true, &s, 1).unwrap();
        assert!((p - 0.95).abs() < 1e-15);
        let p = decision_probability(2, 1, true, &s, 2).unwrap();
        assert!((p - 0.095).abs() < 1e-15);
        let p = decision_probability(0, 0, true, &s, 2).unwrap();
        assert!((p - 0.9025).abs() < 1e-15);
    }

    #[test]
    fn decision_probability_rejects_bad_counts() {
        let s = SensingParams::new(0.1, 0.1).unwrap();
        assert!(decision_probability(2, 3, true, &s, 4).is_err());
        assert!(decision_probability(5, 1, true, &s, 4).is_err());
    }

    #[test]
    fn summing_over_declarations_leaves_busy_factor() {
        for &(p_fa, p_md) in &[(0.0, 0.0), (0.05, 0.3), (0.3, 0.05), (0.5, 1.0)] {
            let s = SensingParams::new(p_fa, p_md).unwrap();
            for m in 0..12 {
                for eta in 0..=m {
                    let total: f64 = (0..=eta)
                        .map(|n| decision_probability(eta, n, true, &s, m).unwrap())
                        .sum();
                    let expect = (1.0 - p_md).powi((m - eta) as i32);
                    assert!((total - expect).abs() <= 1e-12, "m={m} eta={eta}");
                }
            }
        }
    }

    #[test]
    fn out_of_range_probabilities_rejected() {
        assert!(SensingParams::new(1.5, 0.0).is_err());
        assert!(SensingParams::new(0.0, -0.1).is_err());
        assert!(SensingParams::new(f64::NAN, 0.0).is_err());
    }
}
