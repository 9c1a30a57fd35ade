//! Slotted Monte Carlo simulation of the primary queues and the secondary queue.
//!
//! Each slot: primaries with a backlog transmit on their bands; the secondary
//! senses every band and, if it has something to send (always, in the dominant
//! system) and at least one band looks idle, sends one packet over all bands
//! declared idle. Any band carrying two transmissions loses both packets.
//! Arrivals are added after departures, so a packet cannot leave in the slot
//! it arrives.

mod rng;
pub mod stats;
pub mod trace;

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::analysis;
use crate::channel::{pu_success_prob, su_success_table};
use crate::error::{Error, Result};
use crate::scenario::ScenarioConfig;
use crate::sensing::{sense, BandState, SensingDecision};
use rng::Streams;
use stats::{BatchMeans, TrendFit};

pub use trace::TraceRecord;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SimMode {
    /// The secondary sends dummy packets when its queue is empty.
    Dominant,
    /// The secondary stays silent when its queue is empty.
    Original,
}

impl SimMode {
    pub fn as_str(self) -> &'static str {
        match self {
            SimMode::Dominant => "dominant",
            SimMode::Original => "original",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Stable,
    Unstable,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Stable => "stable",
            Verdict::Unstable => "unstable",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

/// Slope thresholds (packets/slot) on the secondary backlog trend.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerdictThresholds {
    pub unstable_above: f64,
    pub stable_below: f64,
}

impl Default for VerdictThresholds {
    fn default() -> Self {
        VerdictThresholds {
            unstable_above: 0.01,
            stable_below: 0.001,
        }
    }
}

impl VerdictThresholds {
    pub fn classify(&self, slope: f64) -> Verdict {
        if slope > self.unstable_above {
            Verdict::Unstable
        } else if slope < self.stable_below {
            Verdict::Stable
        } else {
            Verdict::Inconclusive
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub scenario: ScenarioConfig,
    pub mode: SimMode,
    pub slots: u64,
    pub seed: u64,
    /// Leading slots excluded from statistics.
    pub warmup: u64,
    pub thresholds: VerdictThresholds,
    pub batches: u32,
}

impl SimConfig {
    /// Defaults: 10% warmup, 100 batches, standard verdict thresholds.
    pub fn new(scenario: ScenarioConfig, mode: SimMode, slots: u64, seed: u64) -> Self {
        SimConfig {
            scenario,
            mode,
            slots,
            seed,
            warmup: slots / 10,
            thresholds: VerdictThresholds::default(),
            batches: 100,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.scenario.validate()?;
        if self.slots <= self.warmup {
            return Err(Error::Argument(format!(
                "slots ({}) must exceed warmup ({})",
                self.slots, self.warmup
            )));
        }
        Ok(())
    }
}

/// Backlogs at the start of a slot.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueueState {
    pub primary: Vec<u64>,
    pub secondary: u64,
}

impl QueueState {
    pub fn empty(m_bands: usize) -> Self {
        QueueState {
            primary: vec![0; m_bands],
            secondary: 0,
        }
    }

    /// `Q' = (Q - Y)^+ + X` for every queue.
    pub fn apply(&self, outcome: &SlotOutcome) -> QueueState {
        let next = |q: u64, departed: bool, arrived: bool| {
            q.saturating_sub(u64::from(departed)) + u64::from(arrived)
        };
        QueueState {
            primary: self
                .primary
                .iter()
                .zip(outcome.pu_departures.iter().zip(&outcome.pu_arrivals))
                .map(|(&q, (&d, &a))| next(q, d, a))
                .collect(),
            secondary: next(self.secondary, outcome.su_departure, outcome.su_arrival),
        }
    }

    pub fn occupancy(&self) -> BandState {
        BandState(self.primary.iter().map(|&q| q > 0).collect())
    }
}

/// Everything that happened in one slot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlotOutcome {
    pub slot: u64,
    pub occupancy: BandState,
    pub sensing: SensingDecision,
    pub su_transmits: bool,
    /// Some band carried both a primary and the secondary packet.
    pub collision: bool,
    /// The secondary transmission got through, dummy or real.
    pub su_success: bool,
    /// A real secondary packet left the queue.
    pub su_departure: bool,
    pub pu_departures: Vec<bool>,
    pub pu_arrivals: Vec<bool>,
    pub su_arrival: bool,
}

/// One simulated system advancing slot by slot.
#[derive(Debug, Clone)]
pub struct Simulation {
    mode: SimMode,
    scenario: ScenarioConfig,
    state: QueueState,
    streams: Streams,
    su_success: Vec<f64>,
    pu_success: f64,
    slot: u64,
}

impl Simulation {
    pub fn new(scenario: &ScenarioConfig, mode: SimMode, seed: u64) -> Result<Self> {
        scenario.validate()?;
        let channel = scenario.channel();
        let m = scenario.m_bands as usize;
        Ok(Simulation {
            mode,
            scenario: scenario.clone(),
            state: QueueState::empty(m),
            streams: Streams::new(seed, m),
            su_success: su_success_table(&channel),
            pu_success: pu_success_prob(&channel)?,
            slot: 0,
        })
    }

    pub fn state(&self) -> &QueueState {
        &self.state
    }

    pub fn slot(&self) -> u64 {
        self.slot
    }

    /// Runs one slot and advances the queues.
    pub fn step(&mut self) -> SlotOutcome {
        let m = self.state.primary.len();
        let sensing_params = self.scenario.sensing();

        let occupancy = self.state.occupancy();
        let sensing = sense(&occupancy, &sensing_params, &mut self.streams.sensing);
        let width = sensing.idle_count();

        let has_packet = self.state.secondary > 0;
        let su_transmits = width > 0 && (has_packet || self.mode == SimMode::Dominant);
        let collision = su_transmits && sensing.hits_busy_band(&occupancy);

        // Every link draws every slot so coupled runs stay aligned.
        let pu_departures = (0..m)
            .map(|b| {
                let channel_ok = self.streams.pu_channel(b) < self.pu_success;
                let hit = su_transmits && sensing.is_declared_idle(b);
                occupancy.is_busy(b) && !hit && channel_ok
            })
            .collect();
        let su_channel_ok = self.streams.su_channel() < self.su_success[width];
        let su_success = su_transmits && !collision && su_channel_ok;
        let su_departure = su_success && has_packet;

        let pu_arrivals = (0..m)
            .map(|b| self.streams.pu_arrival(b) < self.scenario.lambda_p)
            .collect();
        let su_arrival = self.streams.su_arrival() < self.scenario.lambda_s;

        let outcome = SlotOutcome {
            slot: self.slot,
            occupancy,
            sensing,
            su_transmits,
            collision,
            su_success,
            su_departure,
            pu_departures,
            pu_arrivals,
            su_arrival,
        };
        self.state = self.state.apply(&outcome);
        self.slot += 1;
        outcome
    }
}

/// Summary statistics of one run; rates are over the post-warmup horizon.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimReport {
    pub mode: SimMode,
    pub slots: u64,
    pub warmup: u64,
    pub seed: u64,
    /// Primary departures per busy slot, averaged over primaries that were ever busy.
    pub empirical_mu_p: f64,
    /// Secondary successes per transmission opportunity.
    pub empirical_mu_s: f64,
    pub std_err_mu_s: f64,
    /// Real secondary departures per slot.
    pub throughput_s: f64,
    pub mean_queue_s: f64,
    pub mean_queue_p: f64,
    pub collisions: u64,
    /// Least-squares trend of the secondary backlog, packets/slot.
    pub slope_s: f64,
    pub stability_verdict_s: Verdict,
    /// Whole-horizon secondary accounting.
    pub su_arrivals: u64,
    pub su_departures: u64,
    pub final_queue_s: u64,
}

/// Runs the simulation, calling `observe` with the pre-slot state and outcome of every slot.
pub fn run_observed<F>(cfg: &SimConfig, mut observe: F) -> Result<SimReport>
where
    F: FnMut(&QueueState, &SlotOutcome) -> Result<()>,
{
    cfg.validate()?;
    let mut sim = Simulation::new(&cfg.scenario, cfg.mode, cfg.seed)?;
    let m = cfg.scenario.m_bands as usize;
    let horizon = cfg.slots - cfg.warmup;

    let mut su_rate = BatchMeans::new(horizon, cfg.batches);
    let mut trend = TrendFit::new(horizon);
    let mut pu_busy = vec![0u64; m];
    let mut pu_served = vec![0u64; m];
    let (mut sum_qs, mut sum_qp) = (0u128, 0u128);
    let (mut real_departures, mut collisions) = (0u64, 0u64);
    let (mut su_arrivals, mut su_departures) = (0u64, 0u64);

    for t in 0..cfg.slots {
        let before = sim.state().clone();
        let outcome = sim.step();
        observe(&before, &outcome)?;

        su_arrivals += u64::from(outcome.su_arrival);
        su_departures += u64::from(outcome.su_departure);
        if t < cfg.warmup {
            continue;
        }
        let offset = t - cfg.warmup;
        let opportunity = match cfg.mode {
            SimMode::Dominant => true,
            SimMode::Original => before.secondary > 0,
        };
        su_rate.record(offset, opportunity, outcome.su_success);
        trend.record(offset, before.secondary as f64);
        sum_qs += u128::from(before.secondary);
        for b in 0..m {
            sum_qp += u128::from(before.primary[b]);
            if before.primary[b] > 0 {
                pu_busy[b] += 1;
                pu_served[b] += u64::from(outcome.pu_departures[b]);
            }
        }
        real_departures += u64::from(outcome.su_departure);
        collisions += u64::from(outcome.collision);
    }

    let per_pu: Vec<f64> = pu_busy
        .iter()
        .zip(&pu_served)
        .filter(|(&busy, _)| busy > 0)
        .map(|(&busy, &served)| served as f64 / busy as f64)
        .collect();
    let empirical_mu_p = if per_pu.is_empty() {
        0.0
    } else {
        per_pu.iter().sum::<f64>() / per_pu.len() as f64
    };
    let h = horizon as f64;
    let slope_s = trend.slope();

    Ok(SimReport {
        mode: cfg.mode,
        slots: cfg.slots,
        warmup: cfg.warmup,
        seed: cfg.seed,
        empirical_mu_p,
        empirical_mu_s: su_rate.mean(),
        std_err_mu_s: su_rate.std_err(),
        throughput_s: real_departures as f64 / h,
        mean_queue_s: sum_qs as f64 / h,
        mean_queue_p: sum_qp as f64 / (h * m as f64),
        collisions,
        slope_s,
        stability_verdict_s: cfg.thresholds.classify(slope_s),
        su_arrivals,
        su_departures,
        final_queue_s: sim.state().secondary,
    })
}

pub fn run(cfg: &SimConfig) -> Result<SimReport> {
    run_observed(cfg, |_, _| Ok(()))
}

/// Runs and streams one newline-delimited JSON record per slot to `out`.
pub fn run_with_trace<W: Write>(cfg: &SimConfig, out: &mut W) -> Result<SimReport> {
    run_observed(cfg, |_, outcome| trace::write_record(out, outcome))
}

/// Both systems at one seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoupledRun {
    pub seed: u64,
    pub dominant_verdict: Verdict,
    pub original_verdict: Verdict,
    pub original_throughput_s: f64,
    /// `|throughput_s(original) - min(lambda_s, mu_s)|`.
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryCheck {
    pub lambda_s: f64,
    pub mu_s: f64,
    pub runs: Vec<CoupledRun>,
}

/// Runs the dominant and original systems with the same seeds near the
/// stability boundary and compares their verdicts and throughput.
pub fn boundary_check(scenario: &ScenarioConfig, slots: u64, seeds: &[u64]) -> Result<BoundaryCheck> {
    let mu_s = analysis::secondary_service_rate(
        &scenario.channel(),
        &scenario.sensing(),
        &scenario.traffic(),
    )?;
    let target = scenario.lambda_s.min(mu_s);
    let runs = seeds
        .iter()
        .map(|&seed| {
            let dominant = run(&SimConfig::new(scenario.clone(), SimMode::Dominant, slots, seed))?;
            let original = run(&SimConfig::new(scenario.clone(), SimMode::Original, slots, seed))?;
            Ok(CoupledRun {
                seed,
                dominant_verdict: dominant.stability_verdict_s,
                original_verdict: original.stability_verdict_s,
                original_throughput_s: original.throughput_s,
                gap: (original.throughput_s - target).abs(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BoundaryCheck {
        lambda_s: scenario.lambda_s,
        mu_s,
        runs,
    })
}
