//! Experiment specifications: presets, the flat `key = value` config format
//! and validation into a [`RunPlan`].

use std::fmt;
use std::str::FromStr;

use nonlocal_signaling::analysis::{linear_grid, log_grid};
use nonlocal_signaling::field::SpectralDensity;
use nonlocal_signaling::quad::MIN_TOLERANCE;
use nonlocal_signaling::signaling::{Configuration, DetectorPair};
use serde::Serialize;

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Scenario {
    LightbandDelta,
    LightbandExtended,
    Timelike,
    Fig3,
    LocalLimit,
    TimelikeSuppression,
    DegenerateRatio,
}

impl Scenario {
    pub const ALL: [Scenario; 7] = [
        Scenario::LightbandDelta,
        Scenario::LightbandExtended,
        Scenario::Timelike,
        Scenario::Fig3,
        Scenario::LocalLimit,
        Scenario::TimelikeSuppression,
        Scenario::DegenerateRatio,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::LightbandDelta => "lightband-delta",
            Scenario::LightbandExtended => "lightband-extended",
            Scenario::Timelike => "timelike",
            Scenario::Fig3 => "fig3",
            Scenario::LocalLimit => "local-limit",
            Scenario::TimelikeSuppression => "timelike-suppression",
            Scenario::DegenerateRatio => "degenerate-ratio",
        }
    }

    /// Whether Bob is kicked (delta switching) rather than switched on for a window.
    pub fn delta_bob(self) -> bool {
        matches!(
            self,
            Scenario::LightbandDelta
                | Scenario::Timelike
                | Scenario::LocalLimit
                | Scenario::TimelikeSuppression
        )
    }

    fn timelike(self) -> bool {
        matches!(self, Scenario::Timelike | Scenario::TimelikeSuppression)
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn normalize(s: &str) -> String {
    s.chars()
        .filter(|c| *c != '-' && *c != '_')
        .flat_map(char::to_lowercase)
        .collect()
}

impl FromStr for Scenario {
    type Err = CliError;

    /// Accepts `fig3`, `Fig3`, `local-limit`, `LocalLimit`, `local_limit`, ...
    fn from_str(s: &str) -> Result<Self, CliError> {
        let want = normalize(s);
        Scenario::ALL
            .into_iter()
            .find(|sc| normalize(sc.name()) == want)
            .ok_or_else(|| {
                let names: Vec<&str> = Scenario::ALL.iter().map(|s| s.name()).collect();
                CliError::Validation(format!(
                    "unknown scenario {s:?}; expected one of {}",
                    names.join(", ")
                ))
            })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Log,
    Linear,
}

impl FromStr for Spacing {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s.to_ascii_lowercase().as_str() {
            "log" => Ok(Spacing::Log),
            "linear" => Ok(Spacing::Linear),
            _ => Err(CliError::Validation(format!(
                "ell spacing must be log or linear, got {s:?}"
            ))),
        }
    }
}

impl fmt::Display for Spacing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Spacing::Log => "log",
            Spacing::Linear => "linear",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub count: usize,
    pub spacing: Spacing,
}

impl GridSpec {
    pub fn log(min: f64, max: f64, count: usize) -> Self {
        GridSpec {
            min,
            max,
            count,
            spacing: Spacing::Log,
        }
    }

    pub fn values(&self) -> Result<Vec<f64>, CliError> {
        let GridSpec {
            min,
            max,
            count,
            spacing,
        } = *self;
        if !(min.is_finite() && max.is_finite() && min > 0.0) {
            return Err(CliError::Validation(format!(
                "ell grid needs 0 < min, got min {min}"
            )));
        }
        if count == 0 {
            return Err(CliError::Validation(
                "ell grid needs at least one point".into(),
            ));
        }
        if count == 1 {
            return if min == max {
                Ok(vec![min])
            } else {
                Err(CliError::Validation(
                    "a one-point ell grid needs min = max".into(),
                ))
            };
        }
        let grid = match spacing {
            Spacing::Log => log_grid(min, max, count),
            Spacing::Linear => linear_grid(min, max, count),
        };
        grid.map_err(|e| CliError::Validation(e.to_string()))
    }
}

/// Named physical parameters; each scenario reads only the subset it needs.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Parameters {
    pub omega: f64,
    #[serde(rename = "R")]
    pub r: f64,
    #[serde(rename = "T")]
    pub t: f64,
    pub tau: f64,
    pub a: f64,
    pub b: f64,
    pub kappa: f64,
    pub amp_product: f64,
    pub alpha: f64,
}

/// Parameter keys in config and output order.
pub const PARAMETER_KEYS: [&str; 9] = [
    "omega",
    "R",
    "T",
    "tau",
    "a",
    "b",
    "kappa",
    "amp_product",
    "alpha",
];

impl Parameters {
    fn slot(&mut self, key: &str) -> Option<&mut f64> {
        Some(match key {
            "omega" => &mut self.omega,
            "R" => &mut self.r,
            "T" => &mut self.t,
            "tau" => &mut self.tau,
            "a" => &mut self.a,
            "b" => &mut self.b,
            "kappa" => &mut self.kappa,
            "amp_product" => &mut self.amp_product,
            "alpha" => &mut self.alpha,
            _ => return None,
        })
    }

    pub fn get(&self, key: &str) -> Option<f64> {
        let mut copy = *self;
        copy.slot(key).map(|v| *v)
    }
}

impl Default for Parameters {
    fn default() -> Self {
        Parameters {
            omega: 1.0,
            r: 7.0,
            t: 2.0,
            tau: 8.0,
            a: 8.0,
            b: 8.1,
            kappa: 1.0,
            amp_product: 1.0,
            alpha: 1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentSpec {
    pub scenario: Scenario,
    pub parameters: Parameters,
    pub ell_grid: GridSpec,
    pub oracle_check: bool,
    pub tolerance: f64,
}

/// Config keys besides the parameters.
pub const SPEC_KEYS: [&str; 7] = [
    "scenario",
    "ell_grid.min",
    "ell_grid.max",
    "ell_grid.count",
    "ell_grid.spacing",
    "oracle_check",
    "tolerance",
];

fn parse_f64(key: &str, value: &str) -> Result<f64, CliError> {
    value
        .parse::<f64>()
        .map_err(|_| CliError::Validation(format!("{key}: expected a number, got {value:?}")))
}

/// Splits a config file into `(key, value)` pairs. Blank lines and lines
/// starting with `#` are skipped; unknown or repeated keys are errors.
pub fn parse_config(text: &str) -> Result<Vec<(String, String)>, CliError> {
    let mut entries: Vec<(String, String)> = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(CliError::Validation(format!(
                "line {}: expected key = value, got {line:?}",
                n + 1
            )));
        };
        let (key, value) = (key.trim(), value.trim());
        if !SPEC_KEYS.contains(&key) && !PARAMETER_KEYS.contains(&key) {
            return Err(CliError::Validation(format!(
                "line {}: unknown key {key:?}",
                n + 1
            )));
        }
        if entries.iter().any(|(k, _)| k == key) {
            return Err(CliError::Validation(format!(
                "line {}: key {key:?} given twice",
                n + 1
            )));
        }
        entries.push((key.to_string(), value.to_string()));
    }
    Ok(entries)
}

impl ExperimentSpec {
    /// Default parameters for `scenario`.
    pub fn preset(scenario: Scenario) -> Self {
        let mut parameters = Parameters::default();
        let mut ell_grid = GridSpec::log(1e-3, 1e-1, 20);
        match scenario {
            Scenario::LightbandDelta | Scenario::LocalLimit | Scenario::Fig3 => {}
            Scenario::LightbandExtended => {
                parameters.a = parameters.r;
                parameters.b = parameters.r + parameters.t;
            }
            Scenario::Timelike => {
                parameters.tau = 9.5;
                ell_grid = GridSpec::log(0.04, 0.3, 20);
            }
            Scenario::TimelikeSuppression => {
                parameters.tau = 12.0;
                ell_grid = GridSpec::log(0.05, 0.3, 20);
            }
            Scenario::DegenerateRatio => {
                parameters.omega = 1e-6;
                parameters.a = parameters.r;
                parameters.b = parameters.r + parameters.t;
                ell_grid = GridSpec::log(0.07, 0.07, 1);
            }
        }
        ExperimentSpec {
            scenario,
            parameters,
            ell_grid,
            oracle_check: false,
            tolerance: 1e-10,
        }
    }

    /// Parses a complete config; the `scenario` key is required.
    pub fn from_config_str(text: &str) -> Result<Self, CliError> {
        Self::from_entries(None, &parse_config(text)?)
    }

    /// Preset for `scenario` (or the config's own `scenario` key), then every entry applied in order.
    pub fn from_entries(
        scenario: Option<Scenario>,
        entries: &[(String, String)],
    ) -> Result<Self, CliError> {
        let from_file = entries
            .iter()
            .find(|(k, _)| k == "scenario")
            .map(|(_, v)| v.parse::<Scenario>());
        let scenario = match (scenario, from_file) {
            (Some(s), _) => s,
            (None, Some(s)) => s?,
            (None, None) => return Err(CliError::Validation("no scenario given".into())),
        };
        let mut spec = Self::preset(scenario);
        for (key, value) in entries.iter().filter(|(k, _)| k != "scenario") {
            spec.set(key, value)?;
        }
        Ok(spec)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        match key {
            "scenario" => self.scenario = value.parse()?,
            "ell_grid.min" => self.ell_grid.min = parse_f64(key, value)?,
            "ell_grid.max" => self.ell_grid.max = parse_f64(key, value)?,
            "ell_grid.count" => {
                self.ell_grid.count = value.parse().map_err(|_| {
                    CliError::Validation(format!("{key}: expected a count, got {value:?}"))
                })?
            }
            "ell_grid.spacing" => self.ell_grid.spacing = value.parse()?,
            "oracle_check" => {
                self.oracle_check = value.parse().map_err(|_| {
                    CliError::Validation(format!("{key}: expected true or false, got {value:?}"))
                })?
            }
            "tolerance" => self.tolerance = parse_f64(key, value)?,
            _ => {
                let v = parse_f64(key, value)?;
                *self
                    .parameters
                    .slot(key)
                    .ok_or_else(|| CliError::Validation(format!("unknown key {key:?}")))? = v;
            }
        }
        Ok(())
    }

    /// Config text that [`ExperimentSpec::from_config_str`] reads back to an equal spec.
    pub fn to_config_string(&self) -> String {
        // `{}` prints the shortest string that parses back to the same f64.
        let mut out = format!("scenario = {}\n", self.scenario);
        for key in PARAMETER_KEYS {
            out += &format!("{key} = {}\n", self.parameters.get(key).unwrap_or(f64::NAN));
        }
        out += &format!("ell_grid.min = {}\n", self.ell_grid.min);
        out += &format!("ell_grid.max = {}\n", self.ell_grid.max);
        out += &format!("ell_grid.count = {}\n", self.ell_grid.count);
        out += &format!("ell_grid.spacing = {}\n", self.ell_grid.spacing);
        out += &format!("oracle_check = {}\n", self.oracle_check);
        out += &format!("tolerance = {}\n", self.tolerance);
        out
    }

    /// Validates the parameters the scenario reads and resolves the grid.
    pub fn plan(&self) -> Result<RunPlan, CliError> {
        let p = &self.parameters;
        if !(self.tolerance >= MIN_TOLERANCE && self.tolerance < 1.0) {
            return Err(CliError::Validation(format!(
                "tolerance must lie in [{MIN_TOLERANCE:e}, 1), got {}",
                self.tolerance
            )));
        }
        if !(p.t > 0.0) {
            return Err(CliError::Validation(format!(
                "T must be positive, got {}",
                p.t
            )));
        }
        if !(p.alpha > 0.0 && p.alpha.is_finite()) {
            return Err(CliError::Validation(format!(
                "alpha must be positive, got {}",
                p.alpha
            )));
        }
        let pair = if self.scenario.delta_bob() {
            DetectorPair::delta_bob(p.omega, p.amp_product, p.r, p.t, p.tau, p.kappa)
        } else {
            if !(p.a < p.b) {
                return Err(CliError::Validation(format!(
                    "Bob's window needs a < b, got a = {}, b = {}",
                    p.a, p.b
                )));
            }
            DetectorPair::extended_bob(p.omega, p.amp_product, p.r, p.t, p.a, p.b)
        }?;
        let want = match (self.scenario.delta_bob(), self.scenario.timelike()) {
            (true, false) => Configuration::LightbandDelta,
            (true, true) => Configuration::TimelikeDelta,
            (false, _) => Configuration::LightbandExtended,
        };
        let got = pair.configuration();
        if got != want {
            let need = match want {
                Configuration::LightbandDelta => "R < tau < R + T",
                Configuration::TimelikeDelta => "tau > R + T",
                _ => "R <= a < b <= R + T",
            };
            return Err(CliError::Validation(format!(
                "scenario {} needs {need}; the parameters give a {got:?} configuration",
                self.scenario
            )));
        }
        let grid = self.ell_grid.values()?;
        for &ell in &grid {
            SpectralDensity::new(ell, p.alpha)?;
        }
        Ok(RunPlan {
            scenario: self.scenario,
            pair,
            alpha: p.alpha,
            grid,
            oracle_check: self.oracle_check,
            tolerance: self.tolerance,
        })
    }
}

/// A validated spec: everything [`crate::run::run`] needs.
#[derive(Clone, Debug, PartialEq)]
pub struct RunPlan {
    pub scenario: Scenario,
    pub pair: DetectorPair,
    pub alpha: f64,
    pub grid: Vec<f64>,
    pub oracle_check: bool,
    pub tolerance: f64,
}
