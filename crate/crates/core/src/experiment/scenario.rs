//! Scenario files.
//!
//! A scenario file is TOML with an optional `[sweep]` table of defaults and
//! one `[[scenario]]` table per curve:
//!
//! ```toml
//! [sweep]
//! modulation = "bpsk"
//! snr_db = [0, 5, 10, 15, 20, 25, 30]
//! trials_per_point = 1_000_000
//! seed = 7
//!
//! [[scenario]]
//! name = "delay"
//! n_relays = 4
//! rho_f1 = { doppler_hz = 50.0, delay_s = 1e-3 }
//! rho_f2 = 0.9
//! training_power_ratio = "infinite"
//! ```
//!
//! Every scenario key except `name` and `n_relays` may also sit in
//! `[sweep]`. Unknown keys are rejected.

use std::collections::HashSet;
use std::path::Path;

use serde::Deserialize;

use crate::channel::jakes_correlation;
use crate::error::{Error, Result};
use crate::numerics::double_factorial_ratio;
use crate::transceiver::Modulation;

/// Smallest Monte-Carlo budget accepted per SNR point.
pub const MIN_TRIALS: u64 = 10_000;
/// Largest relay count the asymptotic analysis supports.
pub const MAX_RELAYS: u32 = 16;

const DEFAULT_TRIALS: u64 = 1_000_000;
const DEFAULT_SEED: u64 = 1;

/// A fully resolved curve: one SER value per entry of `snr_db`.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub n_relays: u32,
    pub rho_f1: f64,
    pub rho_f2: f64,
    /// Training power over data power, `P / P0`. `f64::INFINITY` means
    /// error-free estimation.
    pub training_power_ratio: f64,
    pub modulation: Modulation,
    pub snr_db: Vec<f64>,
    pub trials_per_point: u64,
    pub seed: u64,
}

impl Scenario {
    /// Check the invariants a hand-built scenario must satisfy.
    pub fn validate(&self) -> Result<()> {
        let field = |f: &str| format!("scenario '{}': {f}", self.name);
        if self.name.trim().is_empty() {
            return Err(Error::config("name", "must not be empty"));
        }
        if !(1..=MAX_RELAYS).contains(&self.n_relays) {
            return Err(Error::config(field("n_relays"), format!("{} outside 1..={MAX_RELAYS}", self.n_relays)));
        }
        for (key, v) in [("rho_f1", self.rho_f1), ("rho_f2", self.rho_f2)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::config(field(key), format!("{v} outside [0, 1]")));
            }
        }
        if !(self.training_power_ratio > 0.0) {
            return Err(Error::config(
                field("training_power_ratio"),
                format!("{} must be positive or \"infinite\"", self.training_power_ratio),
            ));
        }
        self.modulation.validate().map_err(|e| Error::config(field("modulation"), e.to_string()))?;
        if self.snr_db.is_empty() {
            return Err(Error::config(field("snr_db"), "must list at least one value"));
        }
        if let Some(bad) = self.snr_db.iter().find(|v| !v.is_finite()) {
            return Err(Error::config(field("snr_db"), format!("{bad} is not finite")));
        }
        if let Some(w) = self.snr_db.windows(2).find(|w| w[1] <= w[0]) {
            return Err(Error::config(
                field("snr_db"),
                format!("must be strictly increasing ({} then {})", w[0], w[1]),
            ));
        }
        if self.trials_per_point < MIN_TRIALS {
            return Err(Error::config(
                field("trials_per_point"),
                format!("{} below the minimum of {MIN_TRIALS}", self.trials_per_point),
            ));
        }
        debug_assert!(double_factorial_ratio(self.n_relays).is_ok());
        Ok(())
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileRepr {
    #[serde(default)]
    sweep: SweepRepr,
    #[serde(default)]
    scenario: Vec<ScenarioRepr>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepRepr {
    rho_f1: Option<RhoRepr>,
    rho_f2: Option<RhoRepr>,
    training_power_ratio: Option<PowerRepr>,
    modulation: Option<String>,
    snr_db: Option<Vec<f64>>,
    trials_per_point: Option<u64>,
    seed: Option<u64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioRepr {
    name: String,
    n_relays: u32,
    rho_f1: Option<RhoRepr>,
    rho_f2: Option<RhoRepr>,
    training_power_ratio: Option<PowerRepr>,
    modulation: Option<String>,
    snr_db: Option<Vec<f64>>,
    trials_per_point: Option<u64>,
    seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(untagged)]
enum RhoRepr {
    Value(f64),
    Jakes(JakesRepr),
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
struct JakesRepr {
    doppler_hz: f64,
    delay_s: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum PowerRepr {
    Ratio(f64),
    Word(String),
}

fn resolve_rho(name: &str, key: &str, rho: Option<RhoRepr>) -> Result<f64> {
    match rho.unwrap_or(RhoRepr::Value(1.0)) {
        RhoRepr::Value(v) => Ok(v),
        RhoRepr::Jakes(JakesRepr { doppler_hz, delay_s }) => {
            let field = format!("scenario '{name}': {key}");
            let v = jakes_correlation(doppler_hz, delay_s).map_err(|e| Error::config(&field, e.to_string()))?;
            if v < 0.0 {
                return Err(Error::config(
                    field,
                    format!("Jakes correlation J0(2 pi {doppler_hz} {delay_s}) = {v:.6} is negative"),
                ));
            }
            Ok(v)
        }
    }
}

fn resolve_power(name: &str, p: Option<PowerRepr>) -> Result<f64> {
    match p {
        None => Ok(f64::INFINITY),
        Some(PowerRepr::Ratio(r)) => Ok(r),
        Some(PowerRepr::Word(w)) if w.eq_ignore_ascii_case("infinite") => Ok(f64::INFINITY),
        Some(PowerRepr::Word(w)) => Err(Error::config(
            format!("scenario '{name}': training_power_ratio"),
            format!("expected a number or \"infinite\", got \"{w}\""),
        )),
    }
}

/// Parse and validate a scenario file's contents.
pub fn parse_scenarios(text: &str) -> Result<Vec<Scenario>> {
    let file: FileRepr = toml::from_str(text).map_err(|e| Error::config("scenario file", e.to_string()))?;
    if file.scenario.is_empty() {
        return Err(Error::config("scenario", "file defines no [[scenario]] tables"));
    }
    let sweep = file.sweep;
    let mut seen = HashSet::new();
    let mut out = Vec::with_capacity(file.scenario.len());
    for s in file.scenario {
        if !seen.insert(s.name.clone()) {
            return Err(Error::config("name", format!("duplicate scenario name '{}'", s.name)));
        }
        let modulation_text = s.modulation.or_else(|| sweep.modulation.clone()).unwrap_or_else(|| "bpsk".into());
        let modulation = modulation_text
            .parse::<Modulation>()
            .map_err(|e| Error::config(format!("scenario '{}': modulation", s.name), e.to_string()))?;
        let scenario = Scenario {
            rho_f1: resolve_rho(&s.name, "rho_f1", s.rho_f1.or(sweep.rho_f1))?,
            rho_f2: resolve_rho(&s.name, "rho_f2", s.rho_f2.or(sweep.rho_f2))?,
            training_power_ratio: resolve_power(
                &s.name,
                s.training_power_ratio.or(sweep.training_power_ratio.clone()),
            )?,
            modulation,
            snr_db: s
                .snr_db
                .or_else(|| sweep.snr_db.clone())
                .ok_or_else(|| Error::config(format!("scenario '{}': snr_db", s.name), "missing"))?,
            trials_per_point: s.trials_per_point.or(sweep.trials_per_point).unwrap_or(DEFAULT_TRIALS),
            seed: s.seed.or(sweep.seed).unwrap_or(DEFAULT_SEED),
            n_relays: s.n_relays,
            name: s.name,
        };
        scenario.validate()?;
        out.push(scenario);
    }
    Ok(out)
}

pub fn load_scenarios(path: &Path) -> Result<Vec<Scenario>> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
    parse_scenarios(&text)
}
