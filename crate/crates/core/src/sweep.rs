//! Tabular results for the command-line front end.
//!
//! Every table has a fixed header. CSV uses a comma delimiter, `.` decimals
//! and LF line endings; floats are written in their shortest round-trip form,
//! switching to exponent notation for very small or very large magnitudes.
//! JSON output is an array of row objects with the same field names.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{self, empty_probability, primary_service_rate};
use crate::channel::{sensing_fraction, PowerMode};
use crate::error::{Error, Result};
use crate::optimizer::{optimize_sensed_bands, OptimizeResult};
use crate::scenario::{ScenarioConfig, SweepAxis, SweepSpec};
use crate::sim::{self, SimConfig, SimMode, SimReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

/// A value in one table cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Bool(bool),
    Text(String),
    Empty,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::Num)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v)
    }
}

impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::Int(u64::from(v))
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_owned())
    }
}

/// Shortest string that parses back to exactly `v`.
pub fn format_float(v: f64) -> String {
    let mag = v.abs();
    if v != 0.0 && v.is_finite() && !(1e-5..1e16).contains(&mag) {
        format!("{v:e}")
    } else {
        format!("{v}")
    }
}

impl Cell {
    pub fn render(&self) -> String {
        match self {
            Cell::Num(v) => format_float(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Bool(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }
}

/// A row type with a fixed column layout.
pub trait Tabular: Serialize {
    const HEADER: &'static [&'static str];
    fn cells(&self) -> Vec<Cell>;
}

pub fn write_csv<T: Tabular, W: Write>(rows: &[T], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(T::HEADER)?;
    for row in rows {
        let cells = row.cells();
        debug_assert_eq!(cells.len(), T::HEADER.len());
        w.write_record(cells.iter().map(Cell::render))?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn write_json<T: Serialize + ?Sized, W: Write>(value: &T, mut out: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, value)?;
    out.write_all(b"\n").map_err(serde_json::Error::io)?;
    Ok(())
}

pub fn write_rows<T: Tabular, W: Write>(rows: &[T], format: OutputFormat, out: W) -> Result<()> {
    match format {
        OutputFormat::Csv => write_csv(rows, out),
        OutputFormat::Json => write_json(rows, out),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RowStatus {
    Ok,
    /// Primary queues unstable at this point.
    Skipped,
}

impl RowStatus {
    fn as_str(self) -> &'static str {
        match self {
            RowStatus::Ok => "ok",
            RowStatus::Skipped => "skipped",
        }
    }
}

// ---------------------------------------------------------------- analyze

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyzeRow {
    pub label: Option<String>,
    pub sensing_fraction: f64,
    pub mu_p: f64,
    pub pi: f64,
    pub mu_s: f64,
    pub primary_stable: bool,
    pub secondary_stable: bool,
}

impl Tabular for AnalyzeRow {
    const HEADER: &'static [&'static str] = &[
        "label",
        "sensing_fraction",
        "mu_p",
        "pi",
        "mu_s",
        "primary_stable",
        "secondary_stable",
    ];

    fn cells(&self) -> Vec<Cell> {
        vec![
            Cell::Text(self.label.clone().unwrap_or_default()),
            self.sensing_fraction.into(),
            self.mu_p.into(),
            self.pi.into(),
            self.mu_s.into(),
            self.primary_stable.into(),
            self.secondary_stable.into(),
        ]
    }
}

pub fn analyze_scenario(cfg: &ScenarioConfig) -> Result<AnalyzeRow> {
    let c = cfg.channel();
    let r = analysis::analyze(&c, &cfg.sensing(), &cfg.traffic())?;
    Ok(AnalyzeRow {
        label: cfg.label.clone(),
        sensing_fraction: sensing_fraction(&c),
        mu_p: r.mu_p,
        pi: r.pi,
        mu_s: r.mu_s,
        primary_stable: r.primary_stable,
        secondary_stable: r.secondary_stable,
    })
}

// ---------------------------------------------------------------- optimize

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileRow {
    pub m: u32,
    pub mu_s: f64,
}

impl Tabular for ProfileRow {
    const HEADER: &'static [&'static str] = &["m", "mu_s"];

    fn cells(&self) -> Vec<Cell> {
        vec![self.m.into(), self.mu_s.into()]
    }
}

pub fn optimize_scenario(cfg: &ScenarioConfig) -> Result<OptimizeResult> {
    optimize_sensed_bands(&cfg.channel(), &cfg.sensing(), &cfg.traffic())
}

pub fn profile_rows(r: &OptimizeResult) -> Vec<ProfileRow> {
    r.profile.iter().map(|&(m, mu_s)| ProfileRow { m, mu_s }).collect()
}

// ---------------------------------------------------------------- simulate

/// A simulation report next to the closed-form values it estimates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulateRow {
    #[serde(flatten)]
    pub report: SimReport,
    /// Absent when the primary queues are unstable.
    pub analytical_mu_p: f64,
    pub analytical_mu_s: Option<f64>,
}

impl Tabular for SimulateRow {
    const HEADER: &'static [&'static str] = &[
        "mode",
        "slots",
        "warmup",
        "seed",
        "empirical_mu_p",
        "analytical_mu_p",
        "empirical_mu_s",
        "std_err_mu_s",
        "analytical_mu_s",
        "throughput_s",
        "mean_queue_s",
        "mean_queue_p",
        "collisions",
        "slope_s",
        "stability_verdict_s",
        "su_arrivals",
        "su_departures",
        "final_queue_s",
    ];

    fn cells(&self) -> Vec<Cell> {
        let r = &self.report;
        vec![
            r.mode.as_str().into(),
            r.slots.into(),
            r.warmup.into(),
            r.seed.into(),
            r.empirical_mu_p.into(),
            self.analytical_mu_p.into(),
            r.empirical_mu_s.into(),
            r.std_err_mu_s.into(),
            self.analytical_mu_s.into(),
            r.throughput_s.into(),
            r.mean_queue_s.into(),
            r.mean_queue_p.into(),
            r.collisions.into(),
            r.slope_s.into(),
            r.stability_verdict_s.as_str().into(),
            r.su_arrivals.into(),
            r.su_departures.into(),
            r.final_queue_s.into(),
        ]
    }
}

pub fn simulate_with_analysis(report: SimReport, scenario: &ScenarioConfig) -> Result<SimulateRow> {
    let c = scenario.channel();
    let s = scenario.sensing();
    let analytical_mu_p = primary_service_rate(&c, &s)?;
    let analytical_mu_s = match analysis::secondary_service_rate(&c, &s, &scenario.traffic()) {
        Ok(v) => Some(v),
        Err(Error::UnstablePrimary { .. }) => None,
        Err(e) => return Err(e),
    };
    Ok(SimulateRow {
        report,
        analytical_mu_p,
        analytical_mu_s,
    })
}

// ---------------------------------------------------------------- sweep

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub axis_value: f64,
    pub status: RowStatus,
    pub mu_p: f64,
    pub pi: Option<f64>,
    pub mu_s_analytical: Option<f64>,
    pub mu_s_simulated: Option<f64>,
    pub std_err: Option<f64>,
    /// Only when the axis is not `m_bands`.
    pub m_opt: Option<u32>,
}

impl Tabular for SweepRow {
    const HEADER: &'static [&'static str] = &[
        "axis_value",
        "mu_p",
        "pi",
        "mu_s_analytical",
        "mu_s_simulated",
        "std_err",
        "m_opt",
        "status",
    ];

    fn cells(&self) -> Vec<Cell> {
        vec![
            self.axis_value.into(),
            self.mu_p.into(),
            self.pi.into(),
            self.mu_s_analytical.into(),
            self.mu_s_simulated.into(),
            self.std_err.into(),
            self.m_opt.map_or(Cell::Empty, Cell::from),
            self.status.as_str().into(),
        ]
    }
}

fn sweep_point(spec: &SweepSpec, value: f64) -> Result<SweepRow> {
    let cfg = spec.axis.apply(&spec.base, value)?;
    let c = cfg.channel();
    let s = cfg.sensing();
    let t = cfg.traffic();
    let mu_p = primary_service_rate(&c, &s)?;
    let pi = match empty_probability(mu_p, &t) {
        Ok(pi) => pi,
        Err(Error::UnstablePrimary { .. }) => {
            return Ok(SweepRow {
                axis_value: value,
                status: RowStatus::Skipped,
                mu_p,
                pi: None,
                mu_s_analytical: None,
                mu_s_simulated: None,
                std_err: None,
                m_opt: None,
            })
        }
        Err(e) => return Err(e),
    };
    let mu_s = analysis::secondary_rate_given_pi(&c, &s, pi);
    let m_opt = if spec.axis == SweepAxis::MBands || t.lambda_p >= mu_p {
        None
    } else {
        Some(optimize_sensed_bands(&c, &s, &t)?.m_opt)
    };
    let (mu_s_simulated, std_err) = match spec.simulation {
        Some(sim_spec) => {
            let report = sim::run(&SimConfig::new(
                cfg.clone(),
                SimMode::Dominant,
                sim_spec.slots,
                sim_spec.seed,
            ))?;
            (Some(report.empirical_mu_s), Some(report.std_err_mu_s))
        }
        None => (None, None),
    };
    Ok(SweepRow {
        axis_value: value,
        status: RowStatus::Ok,
        mu_p,
        pi: Some(pi),
        mu_s_analytical: Some(mu_s),
        mu_s_simulated,
        std_err,
        m_opt,
    })
}

/// One row per axis value, in axis order; points are evaluated in parallel.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    spec.values
        .par_iter()
        .map(|&v| sweep_point(spec, v))
        .collect()
}

// ---------------------------------------------------------------- compare

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareRow {
    /// Absent when comparing a single scenario.
    pub axis_value: Option<f64>,
    pub status: RowStatus,
    pub mu_s_psd: Option<f64>,
    pub mu_s_limited: Option<f64>,
    pub mu_s_single_band: Option<f64>,
}

impl Tabular for CompareRow {
    const HEADER: &'static [&'static str] = &[
        "axis_value",
        "mu_s_psd",
        "mu_s_limited",
        "mu_s_single_band",
        "status",
    ];

    fn cells(&self) -> Vec<Cell> {
        vec![
            self.axis_value.into(),
            self.mu_s_psd.into(),
            self.mu_s_limited.into(),
            self.mu_s_single_band.into(),
            self.status.as_str().into(),
        ]
    }
}

/// Aggregation at fixed PSD, aggregation at fixed total power, and single-band selection.
pub fn compare_point(cfg: &ScenarioConfig, axis_value: Option<f64>) -> Result<CompareRow> {
    let c = cfg.channel();
    let s = cfg.sensing();
    let t = cfg.traffic();
    let rates = (|| -> Result<[f64; 3]> {
        Ok([
            analysis::secondary_service_rate(&c.with_power_mode(PowerMode::Psd), &s, &t)?,
            analysis::secondary_service_rate(&c.with_power_mode(PowerMode::Limited), &s, &t)?,
            analysis::single_band_service_rate(&c, &s, &t)?,
        ])
    })();
    match rates {
        Ok([psd, limited, single]) => Ok(CompareRow {
            axis_value,
            status: RowStatus::Ok,
            mu_s_psd: Some(psd),
            mu_s_limited: Some(limited),
            mu_s_single_band: Some(single),
        }),
        Err(Error::UnstablePrimary { .. }) => Ok(CompareRow {
            axis_value,
            status: RowStatus::Skipped,
            mu_s_psd: None,
            mu_s_limited: None,
            mu_s_single_band: None,
        }),
        Err(e) => Err(e),
    }
}

pub fn run_compare(spec: &SweepSpec) -> Result<Vec<CompareRow>> {
    spec.values
        .par_iter()
        .map(|&v| compare_point(&spec.axis.apply(&spec.base, v)?, Some(v)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        for v in [0.0, 1.0, 0.1 + 0.2, 1e-7, 8.580749561925065e-125, 123456.789, 2.0f64.powi(60)] {
            let s = format_float(v);
            assert_eq!(s.parse::<f64>().unwrap(), v, "{s}");
        }
        assert_eq!(format_float(0.5), "0.5");
        assert_eq!(format_float(1e-7), "1e-7");
    }

    #[test]
    fn csv_uses_lf_and_fixed_header() {
        let rows = vec![ProfileRow { m: 1, mu_s: 0.25 }, ProfileRow { m: 2, mu_s: 1e-9 }];
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "m,mu_s\n1,0.25\n2,1e-9\n");
    }
}
