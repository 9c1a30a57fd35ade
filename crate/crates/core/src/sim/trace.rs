//! Newline-delimited JSON slot traces for debugging.
//!
//! Bitmask fields are strings of `0`/`1`, band 0 first.

use std::io::Write;

use serde::{Deserialize, Serialize};

use super::SlotOutcome;
use crate::error::Result;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub slot: u64,
    /// `1` where the primary transmits.
    pub occupancy: String,
    /// `1` where the secondary declared the band idle.
    pub sensed_idle: String,
    pub su_transmit: bool,
    pub collision: bool,
    pub pu_departures: String,
    pub pu_arrivals: String,
    pub su_departure: bool,
    pub su_arrival: bool,
}

fn bits(flags: &[bool]) -> String {
    flags.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

impl From<&SlotOutcome> for TraceRecord {
    fn from(o: &SlotOutcome) -> Self {
        TraceRecord {
            slot: o.slot,
            occupancy: bits(&o.occupancy.0),
            sensed_idle: bits(&o.sensing.0),
            su_transmit: o.su_transmits,
            collision: o.collision,
            pu_departures: bits(&o.pu_departures),
            pu_arrivals: bits(&o.pu_arrivals),
            su_departure: o.su_departure,
            su_arrival: o.su_arrival,
        }
    }
}

pub(crate) fn write_record<W: Write>(out: &mut W, outcome: &SlotOutcome) -> Result<()> {
    serde_json::to_writer(&mut *out, &TraceRecord::from(outcome))?;
    out.write_all(b"\n").map_err(serde_json::Error::io)?;
    Ok(())
}
