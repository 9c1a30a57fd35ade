//! Scenario and sweep files.
//!
//! A config file is one JSON object. Scenario keys:
//! `m_bands, k_antennas, tau_b_frac, spectral_eff_r, snr_s, snr_p | p_bar_p,
//! p_fa, p_md, lambda_p, lambda_s, power_mode, label`. A sweep file adds
//! `axis, values, with_simulation, sim_slots, sim_seed`. Unknown keys are
//! rejected. `lambda_s` defaults to 0, `power_mode` to `"psd"`.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::analysis::TrafficParams;
use crate::channel::{ChannelParams, PowerMode};
use crate::error::{Error, Result};
use crate::sensing::SensingParams;

const SCENARIO_KEYS: &[&str] = &[
    "m_bands",
    "k_antennas",
    "tau_b_frac",
    "spectral_eff_r",
    "snr_s",
    "snr_p",
    "p_bar_p",
    "p_fa",
    "p_md",
    "lambda_p",
    "lambda_s",
    "power_mode",
    "label",
];

const SWEEP_KEYS: &[&str] = &["axis", "values", "with_simulation", "sim_slots", "sim_seed"];

/// Every parameter of one operating point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub m_bands: u32,
    pub k_antennas: u32,
    pub tau_b_frac: f64,
    pub spectral_eff_r: f64,
    pub snr_s: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub snr_p: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_bar_p: Option<f64>,
    pub p_fa: f64,
    pub p_md: f64,
    pub lambda_p: f64,
    pub lambda_s: f64,
    pub power_mode: PowerMode,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

impl ScenarioConfig {
    pub fn channel(&self) -> ChannelParams {
        ChannelParams {
            snr_p: self.snr_p,
            p_bar_p: self.p_bar_p,
            snr_s: self.snr_s,
            spectral_eff_r: self.spectral_eff_r,
            tau_b_frac: self.tau_b_frac,
            m_bands: self.m_bands,
            k_antennas: self.k_antennas,
            power_mode: self.power_mode,
        }
    }

    pub fn sensing(&self) -> SensingParams {
        SensingParams {
            p_fa: self.p_fa,
            p_md: self.p_md,
        }
    }

    pub fn traffic(&self) -> TrafficParams {
        TrafficParams {
            lambda_p: self.lambda_p,
            lambda_s: self.lambda_s,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.channel().validate()?;
        self.sensing().validate()?;
        self.traffic().validate()
    }

    pub fn from_json(value: &Value) -> Result<Self> {
        let map = as_object(value)?;
        reject_unknown(map, &[SCENARIO_KEYS])?;
        scenario_from_map(map)
    }
}

/// The numeric scenario field varied by a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    MBands,
    KAntennas,
    LambdaP,
    LambdaS,
    SpectralEffR,
    TauBFrac,
    PFa,
    PMd,
}

impl SweepAxis {
    pub const ALL: [SweepAxis; 8] = [
        SweepAxis::MBands,
        SweepAxis::KAntennas,
        SweepAxis::LambdaP,
        SweepAxis::LambdaS,
        SweepAxis::SpectralEffR,
        SweepAxis::TauBFrac,
        SweepAxis::PFa,
        SweepAxis::PMd,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::MBands => "m_bands",
            SweepAxis::KAntennas => "k_antennas",
            SweepAxis::LambdaP => "lambda_p",
            SweepAxis::LambdaS => "lambda_s",
            SweepAxis::SpectralEffR => "spectral_eff_r",
            SweepAxis::TauBFrac => "tau_b_frac",
            SweepAxis::PFa => "p_fa",
            SweepAxis::PMd => "p_md",
        }
    }

    pub fn is_integer(self) -> bool {
        matches!(self, SweepAxis::MBands | SweepAxis::KAntennas)
    }

    /// Copy of `base` with this axis set to `value`, validated.
    pub fn apply(self, base: &ScenarioConfig, value: f64) -> Result<ScenarioConfig> {
        let mut cfg = base.clone();
        if self.is_integer() && !(value >= 1.0 && value.fract() == 0.0 && value <= f64::from(u32::MAX)) {
            return Err(Error::config(
                self.name(),
                format!("{} must be a positive integer (got {value})", self.name()),
            ));
        }
        match self {
            SweepAxis::MBands => cfg.m_bands = value as u32,
            SweepAxis::KAntennas => cfg.k_antennas = value as u32,
            SweepAxis::LambdaP => cfg.lambda_p = value,
            SweepAxis::LambdaS => cfg.lambda_s = value,
            SweepAxis::SpectralEffR => cfg.spectral_eff_r = value,
            SweepAxis::TauBFrac => cfg.tau_b_frac = value,
            SweepAxis::PFa => cfg.p_fa = value,
            SweepAxis::PMd => cfg.p_md = value,
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SweepAxis::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = SweepAxis::ALL.iter().map(|a| a.name()).collect();
                Error::config("axis", format!("unknown axis {s:?}, expected one of {}", names.join(", ")))
            })
    }
}

/// Simulation settings attached to a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepSimulation {
    pub slots: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub base: ScenarioConfig,
    pub axis: SweepAxis,
    pub values: Vec<f64>,
    pub simulation: Option<SweepSimulation>,
}

impl SweepSpec {
    pub fn from_json(value: &Value) -> Result<Self> {
        let map = as_object(value)?;
        reject_unknown(map, &[SCENARIO_KEYS, SWEEP_KEYS])?;
        let base = scenario_from_map(map)?;

        let axis: SweepAxis = match map.get("axis") {
            Some(Value::String(s)) => s.parse()?,
            Some(other) => return Err(type_error("axis", "a string", other)),
            None => return Err(Error::config("axis", "missing required key")),
        };
        let values = match map.get("values") {
            Some(Value::Array(items)) => items
                .iter()
                .enumerate()
                .map(|(i, v)| {
                    v.as_f64()
                        .ok_or_else(|| type_error(&format!("values[{i}]"), "a number", v))
                })
                .collect::<Result<Vec<f64>>>()?,
            Some(other) => return Err(type_error("values", "an array of numbers", other)),
            None => return Err(Error::config("values", "missing required key")),
        };
        if values.is_empty() {
            return Err(Error::config("values", "values must be non-empty"));
        }
        for (i, &v) in values.iter().enumerate() {
            if let Err(Error::Config { reason, .. }) = axis.apply(&base, v) {
                return Err(Error::config(format!("values[{i}]"), reason));
            }
        }

        let with_simulation = match map.get("with_simulation") {
            None => false,
            Some(Value::Bool(b)) => *b,
            Some(other) => return Err(type_error("with_simulation", "a boolean", other)),
        };
        let simulation = if with_simulation {
            let slots = required_u64(map, "sim_slots")?;
            if slots < 2 {
                return Err(Error::config("sim_slots", format!("sim_slots ≥ 2 (got {slots})")));
            }
            Some(SweepSimulation {
                slots,
                seed: required_u64(map, "sim_seed")?,
            })
        } else {
            None
        };

        Ok(SweepSpec {
            base,
            axis,
            values,
            simulation,
        })
    }
}

/// Either kind of config file.
#[derive(Debug, Clone, PartialEq)]
pub enum Config {
    Scenario(ScenarioConfig),
    Sweep(SweepSpec),
}

impl Config {
    pub fn from_json(value: &Value) -> Result<Self> {
        let map = as_object(value)?;
        if map.contains_key("axis") || map.contains_key("values") {
            SweepSpec::from_json(value).map(Config::Sweep)
        } else {
            ScenarioConfig::from_json(value).map(Config::Scenario)
        }
    }

    pub fn scenario(&self) -> &ScenarioConfig {
        match self {
            Config::Scenario(s) => s,
            Config::Sweep(s) => &s.base,
        }
    }
}

/// Reads and validates a scenario or sweep file.
pub fn load_config(path: impl AsRef<Path>) -> Result<Config> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_owned(),
        source,
    })?;
    let value: Value = serde_json::from_str(&text).map_err(|source| Error::Json {
        path: path.to_owned(),
        source,
    })?;
    Config::from_json(&value)
}

fn as_object(value: &Value) -> Result<&Map<String, Value>> {
    value
        .as_object()
        .ok_or_else(|| Error::config("<root>", "config must be a JSON object"))
}

fn reject_unknown(map: &Map<String, Value>, allowed: &[&[&str]]) -> Result<()> {
    match map
        .keys()
        .find(|k| !allowed.iter().any(|set| set.contains(&k.as_str())))
    {
        Some(key) => Err(Error::config(key.clone(), "unknown key")),
        None => Ok(()),
    }
}

fn type_error(key: &str, expected: &str, got: &Value) -> Error {
    Error::config(key, format!("expected {expected}, got {got}"))
}

fn optional_f64(map: &Map<String, Value>, key: &str) -> Result<Option<f64>> {
    match map.get(key) {
        None | Some(Value::Null) => Ok(None),
        Some(v) => v
            .as_f64()
            .map(Some)
            .ok_or_else(|| type_error(key, "a number", v)),
    }
}

fn required_f64(map: &Map<String, Value>, key: &str) -> Result<f64> {
    optional_f64(map, key)?.ok_or_else(|| Error::config(key, "missing required key"))
}

fn required_u64(map: &Map<String, Value>, key: &str) -> Result<u64> {
    match map.get(key) {
        None => Err(Error::config(key, "missing required key")),
        Some(v) => v
            .as_u64()
            .ok_or_else(|| type_error(key, "a non-negative integer", v)),
    }
}

fn required_count(map: &Map<String, Value>, key: &str) -> Result<u32> {
    let n = required_u64(map, key)?;
    if n == 0 {
        return Err(Error::config(key, format!("{key} ≥ 1 (got 0)")));
    }
    u32::try_from(n).map_err(|_| Error::config(key, format!("{key} too large (got {n})")))
}

fn scenario_from_map(map: &Map<String, Value>) -> Result<ScenarioConfig> {
    let power_mode = match map.get("power_mode") {
        None => PowerMode::Psd,
        Some(Value::String(s)) => match s.to_ascii_lowercase().as_str() {
            "psd" => PowerMode::Psd,
            "limited" => PowerMode::Limited,
            _ => {
                return Err(Error::config(
                    "power_mode",
                    format!("expected \"psd\" or \"limited\", got {s:?}"),
                ))
            }
        },
        Some(other) => return Err(type_error("power_mode", "a string", other)),
    };
    let label = match map.get("label") {
        None | Some(Value::Null) => None,
        Some(Value::String(s)) => Some(s.clone()),
        Some(other) => return Err(type_error("label", "a string", other)),
    };
    let cfg = ScenarioConfig {
        m_bands: required_count(map, "m_bands")?,
        k_antennas: required_count(map, "k_antennas")?,
        tau_b_frac: required_f64(map, "tau_b_frac")?,
        spectral_eff_r: required_f64(map, "spectral_eff_r")?,
        snr_s: required_f64(map, "snr_s")?,
        snr_p: optional_f64(map, "snr_p")?,
        p_bar_p: optional_f64(map, "p_bar_p")?,
        p_fa: required_f64(map, "p_fa")?,
        p_md: required_f64(map, "p_md")?,
        lambda_p: required_f64(map, "lambda_p")?,
        lambda_s: optional_f64(map, "lambda_s")?.unwrap_or(0.0),
        power_mode,
        label,
    };
    cfg.validate()?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn baseline() -> Value {
        json!({
            "label": "baseline",
            "m_bands": 13, "k_antennas": 8, "tau_b_frac": 0.01,
            "spectral_eff_r": 2.0, "snr_s": 1.0, "p_bar_p": 0.9,
            "p_fa": 0.05, "p_md": 0.05, "lambda_p": 0.5, "lambda_s": 0.2,
            "power_mode": "psd"
        })
    }

    fn config_err(v: &Value) -> (String, String) {
        match Config::from_json(v) {
            Err(Error::Config { key, reason }) => (key, reason),
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn baseline_parses_with_expected_sensing_fraction() {
        let cfg = ScenarioConfig::from_json(&baseline()).unwrap();
        let frac = crate::channel::sensing_fraction(&cfg.channel());
        assert!((frac - 0.02).abs() < 1e-15);
        assert_eq!(cfg.label.as_deref(), Some("baseline"));
    }

    #[test]
    fn out_of_range_probability_names_the_key() {
        let mut v = baseline();
        v["p_fa"] = json!(1.5);
        let (key, reason) = config_err(&v);
        assert_eq!(key, "p_fa");
        assert!(reason.contains("p_fa ∈ [0,1]"), "{reason}");
    }

    #[test]
    fn both_primary_specs_rejected() {
        let mut v = baseline();
        v["snr_p"] = json!(4.0);
        let (key, reason) = config_err(&v);
        assert_eq!(key, "snr_p");
        assert!(reason.contains("both"));
    }

    #[test]
    fn missing_extra_and_ill_typed_keys() {
        let mut v = baseline();
        v.as_object_mut().unwrap().remove("p_md");
        assert_eq!(config_err(&v).0, "p_md");

        let mut v = baseline();
        v["bogus"] = json!(1);
        assert_eq!(config_err(&v), ("bogus".into(), "unknown key".into()));

        let mut v = baseline();
        v["m_bands"] = json!(2.5);
        assert_eq!(config_err(&v).0, "m_bands");

        let mut v = baseline();
        v["snr_s"] = json!("one");
        assert_eq!(config_err(&v).0, "snr_s");

        let mut v = baseline();
        v["power_mode"] = json!("turbo");
        assert_eq!(config_err(&v).0, "power_mode");

        assert_eq!(config_err(&json!([1, 2])).0, "<root>");
    }

    #[test]
    fn sweep_spec_parses_and_validates_values() {
        let mut v = baseline();
        v["axis"] = json!("k_antennas");
        v["values"] = json!([1, 2, 3]);
        let spec = SweepSpec::from_json(&v).unwrap();
        assert_eq!(spec.axis, SweepAxis::KAntennas);
        assert!(spec.simulation.is_none());

        v["values"] = json!([1, 2.5]);
        assert_eq!(config_err(&v).0, "values[1]");

        v["values"] = json!([]);
        assert_eq!(config_err(&v).0, "values");

        v["values"] = json!([0.1]);
        v["axis"] = json!("snr_s");
        assert_eq!(config_err(&v).0, "axis");
    }

    #[test]
    fn sweep_with_simulation_needs_slots_and_seed() {
        let mut v = baseline();
        v["axis"] = json!("lambda_p");
        v["values"] = json!([0.1, 0.9]);
        v["with_simulation"] = json!(true);
        assert_eq!(config_err(&v).0, "sim_slots");
        v["sim_slots"] = json!(1000);
        assert_eq!(config_err(&v).0, "sim_seed");
        v["sim_seed"] = json!(9);
        match Config::from_json(&v).unwrap() {
            Config::Sweep(s) => {
                assert_eq!(s.simulation, Some(SweepSimulation { slots: 1000, seed: 9 }))
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn scenario_rejects_sweep_keys() {
        let mut v = baseline();
        v["sim_seed"] = json!(1);
        assert_eq!(config_err(&v).0, "sim_seed");
    }

    #[test]
    fn load_reports_missing_file_and_bad_json() {
        let err = load_config("/nonexistent/cfg.json").unwrap_err();
        assert!(matches!(err, Error::Io { .. }) && err.is_config());

        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.json");
        std::fs::write(&path, "{ not json").unwrap();
        assert!(matches!(load_config(&path), Err(Error::Json { .. })));

        std::fs::write(&path, baseline().to_string()).unwrap();
        assert!(matches!(load_config(&path), Ok(Config::Scenario(_))));
    }
}
