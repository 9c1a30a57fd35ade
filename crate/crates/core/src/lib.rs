//! Analysis and simulation of a cognitive medium access protocol in which a
//! multi-antenna secondary user aggregates every primary band it senses idle
//! into one wide channel.
//!
//! - [`channel`]: outage-based success probabilities and the sensing-time penalty.
//! - [`sensing`]: the per-band false-alarm / misdetection channel.
//! - [`analysis`]: closed-form service rates, stability region, enumeration oracle.
//! - [`optimizer`]: grid search for the number of bands to sense.
//! - [`sim`]: slotted Monte Carlo simulation of the interacting queues.
//! - [`scenario`] and [`sweep`]: config files and tabular outputs for the CLI.

pub mod analysis;
pub mod channel;
pub mod error;
mod math;
pub mod optimizer;
pub mod scenario;
pub mod sensing;
pub mod sim;
pub mod sweep;

pub use analysis::{AnalyticalResult, BoundaryPoint, TrafficParams};
pub use channel::{ChannelParams, PowerMode, Rate};
pub use error::{Error, Result};
pub use math::{binomial, binomial_pmf};
pub use optimizer::OptimizeResult;
pub use scenario::{Config, ScenarioConfig, SweepAxis, SweepSpec};
pub use sensing::{BandState, SensingDecision, SensingParams};
pub use sim::{SimConfig, SimMode, SimReport, Verdict};
