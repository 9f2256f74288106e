use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::NetworkParams;
use crate::ring::{InitialConditionSpec, RingCoupling, DEFAULT_CLASSIFY_WINDOW, DEFAULT_DT};

/// Fluctuation windows longer than this (in units of `1/kappa1`) get a
/// Gaussian-validity warning.
pub const GAUSSIAN_VALIDITY_WINDOW: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    Chimera,
    Sync,
    Desync,
}

impl Preset {
    pub const ALL: [Preset; 3] = [Preset::Chimera, Preset::Sync, Preset::Desync];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Chimera => "chimera",
            Preset::Sync => "sync",
            Preset::Desync => "desync",
        }
    }

    /// Coupling strength in units of `kappa1`.
    pub fn coupling_strength(self) -> f64 {
        match self {
            Preset::Chimera => 1.2,
            Preset::Sync => 1.6,
            Preset::Desync => 0.8,
        }
    }

    /// The preset whose coupling strength equals `strength`, if any.
    pub fn for_strength(strength: f64) -> Option<Preset> {
        Preset::ALL.into_iter().find(|p| p.coupling_strength() == strength)
    }

    /// Transient before the fluctuation window, in units of `1/kappa1`.
    pub fn t_transient(self) -> f64 {
        match self {
            Preset::Chimera => 3000.0,
            Preset::Sync => 25.0,
            Preset::Desync => 8000.0,
        }
    }
}

impl std::str::FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown preset '{s}' (expected chimera, sync or desync)")))
    }
}

/// Initial-condition settings; `None` amplitude and centre follow the network
/// (limit-cycle radius and `N/2`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IcConfig {
    pub amplitude: Option<f64>,
    pub sigma: f64,
    pub mu: Option<f64>,
    pub theta_range: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub t_transient: f64,
    /// Length of the fluctuation window after the transient.
    pub fluct_window: f64,
    pub dt: f64,
    /// Stride (in steps) of the stored transient trajectory.
    pub sample_every: usize,
    /// Stride (in steps) of stored covariance snapshots.
    pub fluct_sample_every: usize,
    /// Final stretch of the transient used for regime classification.
    pub observe_window: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Analyses {
    pub trajectory: bool,
    pub covariance: bool,
    pub psi: bool,
    /// 1-based nodes for Husimi maps.
    pub husimi_nodes: Vec<usize>,
    pub husimi_resolution: usize,
    pub squeezing: bool,
    pub mi_scan: bool,
    pub mi_timeseries_l: Option<usize>,
    pub classify_window: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub preset: Option<Preset>,
    pub params: NetworkParams,
    pub coupling_strength: f64,
    pub coupling_range: usize,
    pub ic: IcConfig,
    pub schedule: Schedule,
    pub analyses: Analyses,
    pub output_dir: Option<PathBuf>,
}

/// Every key accepted by [`ScenarioConfig::set`].
pub const KEYS: &[&str] = &[
    "preset",
    "params.kappa1",
    "params.kappa2",
    "params.hbar",
    "params.n_nodes",
    "coupling.strength",
    "coupling.range",
    "ic.amplitude",
    "ic.sigma",
    "ic.mu",
    "ic.theta_range",
    "ic.seed",
    "schedule.t_transient",
    "schedule.fluct_window",
    "schedule.dt",
    "schedule.sample_every",
    "schedule.fluct_sample_every",
    "schedule.observe_window",
    "analyses.trajectory",
    "analyses.covariance",
    "analyses.psi",
    "analyses.husimi_nodes",
    "analyses.husimi_resolution",
    "analyses.squeezing",
    "analyses.mi_scan",
    "analyses.mi_timeseries_l",
    "analyses.classify_window",
    "output_dir",
];

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    value
        .trim()
        .parse()
        .map_err(|e| Error::Config(format!("{key}: cannot parse '{value}': {e}")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value.trim() {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        other => Err(Error::Config(format!("{key}: expected a boolean, got '{other}'"))),
    }
}

fn parse_auto<T: std::str::FromStr>(key: &str, value: &str) -> Result<Option<T>>
where
    T::Err: std::fmt::Display,
{
    match value.trim() {
        "auto" | "none" | "" => Ok(None),
        v => parse(key, v).map(Some),
    }
}

fn parse_list(key: &str, value: &str) -> Result<Vec<usize>> {
    let inner = value.trim().trim_start_matches('[').trim_end_matches(']');
    inner
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| parse(key, s))
        .collect()
}

impl ScenarioConfig {
    /// Chimera-regime network (`N = 50`, `d = 10`) with no output directory.
    pub fn base() -> Self {
        Self::from_preset(Preset::Chimera)
    }

    pub fn from_preset(preset: Preset) -> Self {
        Self {
            preset: Some(preset),
            params: NetworkParams::standard(50),
            coupling_strength: preset.coupling_strength(),
            coupling_range: 10,
            ic: IcConfig {
                amplitude: None,
                sigma: 9.0,
                mu: None,
                theta_range: 24.0 * std::f64::consts::PI,
                seed: 0,
            },
            schedule: Schedule {
                t_transient: preset.t_transient(),
                fluct_window: 0.5,
                dt: DEFAULT_DT,
                sample_every: 1000,
                fluct_sample_every: 50,
                observe_window: 1.0,
            },
            analyses: Analyses {
                trajectory: true,
                covariance: true,
                psi: true,
                husimi_nodes: Vec::new(),
                husimi_resolution: 64,
                squeezing: true,
                mi_scan: true,
                mi_timeseries_l: Some(20),
                classify_window: DEFAULT_CLASSIFY_WINDOW,
            },
            output_dir: None,
        }
    }

    /// Applies one dotted `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        let before = self.clone();
        match key {
            "preset" => {
                let out = self.output_dir.take();
                *self = Self::from_preset(v.parse()?);
                self.output_dir = out;
            }
            "params.kappa1" => self.params.kappa1 = parse(key, v)?,
            "params.kappa2" => self.params.kappa2 = parse(key, v)?,
            "params.hbar" => self.params.hbar = parse(key, v)?,
            "params.n_nodes" => self.params.n_nodes = parse(key, v)?,
            "coupling.strength" => self.coupling_strength = parse(key, v)?,
            "coupling.range" => self.coupling_range = parse(key, v)?,
            "ic.amplitude" => self.ic.amplitude = parse_auto(key, v)?,
            "ic.sigma" => self.ic.sigma = parse(key, v)?,
            "ic.mu" => self.ic.mu = parse_auto(key, v)?,
            "ic.theta_range" => self.ic.theta_range = parse(key, v)?,
            "ic.seed" => self.ic.seed = parse(key, v)?,
            "schedule.t_transient" => self.schedule.t_transient = parse(key, v)?,
            "schedule.fluct_window" => self.schedule.fluct_window = parse(key, v)?,
            "schedule.dt" => self.schedule.dt = parse(key, v)?,
            "schedule.sample_every" => self.schedule.sample_every = parse(key, v)?,
            "schedule.fluct_sample_every" => self.schedule.fluct_sample_every = parse(key, v)?,
            "schedule.observe_window" => self.schedule.observe_window = parse(key, v)?,
            "analyses.trajectory" => self.analyses.trajectory = parse_bool(key, v)?,
            "analyses.covariance" => self.analyses.covariance = parse_bool(key, v)?,
            "analyses.psi" => self.analyses.psi = parse_bool(key, v)?,
            "analyses.husimi_nodes" => self.analyses.husimi_nodes = parse_list(key, v)?,
            "analyses.husimi_resolution" => self.analyses.husimi_resolution = parse(key, v)?,
            "analyses.squeezing" => self.analyses.squeezing = parse_bool(key, v)?,
            "analyses.mi_scan" => self.analyses.mi_scan = parse_bool(key, v)?,
            "analyses.mi_timeseries_l" => self.analyses.mi_timeseries_l = parse_auto(key, v)?,
            "analyses.classify_window" => self.analyses.classify_window = parse(key, v)?,
            "output_dir" => self.output_dir = Some(PathBuf::from(v)),
            _ => {
                return Err(Error::Config(format!(
                    "unknown key '{key}' (known keys: {})",
                    KEYS.join(", ")
                )))
            }
        }
        let cosmetic = key.starts_with("analyses.") || matches!(key, "preset" | "output_dir" | "ic.seed");
        if !cosmetic && *self != before {
            self.preset = None;
        }
        Ok(())
    }

    pub fn apply<'a>(&mut self, pairs: impl IntoIterator<Item = (&'a str, &'a str)>) -> Result<()> {
        for (k, v) in pairs {
            self.set(k, v)?;
        }
        Ok(())
    }

    /// Applies a config file on top of `self`. A `preset` line, if present,
    /// must come before any other key.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        let pairs = parse_config_text(text)?;
        if let Some(i) = pairs.iter().position(|(k, _)| k == "preset") {
            if i != 0 {
                return Err(Error::Config("'preset' must be the first key".into()));
            }
        }
        self.apply(pairs.iter().map(|(k, v)| (k.as_str(), v.as_str())))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::base();
        cfg.apply_text(&text)
            .map_err(|e| e.context(format!("in {}", path.display())))?;
        Ok(cfg)
    }

    pub fn initial_spec(&self) -> InitialConditionSpec {
        let standard = InitialConditionSpec::standard(&self.params, self.ic.seed);
        InitialConditionSpec {
            amplitude: self.ic.amplitude.unwrap_or(standard.amplitude),
            sigma: self.ic.sigma,
            mu: self.ic.mu.unwrap_or(standard.mu),
            theta_range: self.ic.theta_range,
            seed: self.ic.seed,
        }
    }

    pub fn coupling(&self) -> Result<RingCoupling> {
        RingCoupling::new(self.params.n_nodes, self.coupling_range, self.coupling_strength)
    }

    /// Checks every component; returns non-fatal warnings.
    pub fn validate(&self) -> Result<Vec<String>> {
        self.params.validate()?;
        self.coupling()?;
        self.initial_spec().validate(self.params.n_nodes)?;
        let s = &self.schedule;
        let positive = [
            ("schedule.dt", s.dt),
            ("schedule.fluct_window", s.fluct_window),
            ("schedule.observe_window", s.observe_window),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter {
                    name,
                    reason: format!("must be positive, got {v}"),
                });
            }
        }
        if !(s.t_transient >= 0.0 && s.t_transient.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "schedule.t_transient",
                reason: format!("must be nonnegative, got {}", s.t_transient),
            });
        }
        if s.sample_every == 0 || s.fluct_sample_every == 0 {
            return Err(Error::InvalidParameter {
                name: "schedule.sample_every",
                reason: "sampling strides must be at least 1".into(),
            });
        }
        let n = self.params.n_nodes;
        let a = &self.analyses;
        if a.classify_window < 1 || a.classify_window > n / 2 {
            return Err(Error::OutOfRange {
                what: "analyses.classify_window",
                value: a.classify_window as f64,
                min: 1.0,
                max: (n / 2) as f64,
            });
        }
        if let Some(&bad) = a.husimi_nodes.iter().find(|&&l| l < 1 || l > n) {
            return Err(Error::OutOfRange {
                what: "analyses.husimi_nodes",
                value: bad as f64,
                min: 1.0,
                max: n as f64,
            });
        }
        if a.husimi_resolution == 0 {
            return Err(Error::InvalidParameter {
                name: "analyses.husimi_resolution",
                reason: "must be at least 1".into(),
            });
        }
        if let Some(l) = a.mi_timeseries_l {
            if l < 1 || l >= n {
                return Err(Error::OutOfRange {
                    what: "analyses.mi_timeseries_l",
                    value: l as f64,
                    min: 1.0,
                    max: (n - 1) as f64,
                });
            }
        }
        let mut warnings = Vec::new();
        let window = s.fluct_window * self.params.kappa1;
        if window > GAUSSIAN_VALIDITY_WINDOW {
            warnings.push(format!(
                "fluctuation window {window} / kappa1 exceeds {GAUSSIAN_VALIDITY_WINDOW}: the Gaussian approximation may no longer hold"
            ));
        }
        Ok(warnings)
    }

    /// Canonical `key = value` listing that reproduces this configuration.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mut line = |k: &str, v: String| {
            let _ = writeln!(out, "{k} = {v}");
        };
        let opt = |v: Option<f64>| v.map_or("auto".to_string(), |x| x.to_string());
        if let Some(p) = self.preset {
            line("preset", p.name().to_string());
        }
        line("params.kappa1", self.params.kappa1.to_string());
        line("params.kappa2", self.params.kappa2.to_string());
        line("params.hbar", self.params.hbar.to_string());
        line("params.n_nodes", self.params.n_nodes.to_string());
        line("coupling.strength", self.coupling_strength.to_string());
        line("coupling.range", self.coupling_range.to_string());
        line("ic.amplitude", opt(self.ic.amplitude));
        line("ic.sigma", self.ic.sigma.to_string());
        line("ic.mu", opt(self.ic.mu));
        line("ic.theta_range", self.ic.theta_range.to_string());
        line("ic.seed", self.ic.seed.to_string());
        let s = &self.schedule;
        line("schedule.t_transient", s.t_transient.to_string());
        line("schedule.fluct_window", s.fluct_window.to_string());
        line("schedule.dt", s.dt.to_string());
        line("schedule.sample_every", s.sample_every.to_string());
        line("schedule.fluct_sample_every", s.fluct_sample_every.to_string());
        line("schedule.observe_window", s.observe_window.to_string());
        let a = &self.analyses;
        line("analyses.trajectory", a.trajectory.to_string());
        line("analyses.covariance", a.covariance.to_string());
        line("analyses.psi", a.psi.to_string());
        let nodes: Vec<String> = a.husimi_nodes.iter().map(|l| l.to_string()).collect();
        line("analyses.husimi_nodes", format!("[{}]", nodes.join(", ")));
        line("analyses.husimi_resolution", a.husimi_resolution.to_string());
        line("analyses.squeezing", a.squeezing.to_string());
        line("analyses.mi_scan", a.mi_scan.to_string());
        line(
            "analyses.mi_timeseries_l",
            a.mi_timeseries_l.map_or("none".into(), |l| l.to_string()),
        );
        line("analyses.classify_window", a.classify_window.to_string());
        if let Some(dir) = &self.output_dir {
            line("output_dir", dir.display().to_string());
        }
        out
    }
}

/// Splits `key = value` lines, dropping blank lines and `#` comments.
/// Duplicate keys are rejected.
pub fn parse_config_text(text: &str) -> Result<Vec<(String, String)>> {
    let mut seen = BTreeSet::new();
    let mut pairs = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("line {}: expected 'key = value'", i + 1)))?;
        let k = k.trim();
        if !KEYS.contains(&k) {
            return Err(Error::Config(format!("line {}: unknown key '{k}'", i + 1)));
        }
        if !seen.insert(k.to_string()) {
            return Err(Error::Config(format!("line {}: duplicate key '{k}'", i + 1)));
        }
        pairs.push((k.to_string(), v.trim().to_string()));
    }
    Ok(pairs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_set_coupling_and_transient() {
        let c = ScenarioConfig::from_preset(Preset::Sync);
        assert_eq!(c.coupling_strength, 1.6);
        assert_eq!(c.schedule.t_transient, 25.0);
        assert_eq!(c.schedule.fluct_window, 0.5);
        assert!(c.validate().unwrap().is_empty());
        assert_eq!("desync".parse::<Preset>().unwrap(), Preset::Desync);
        assert!("other".parse::<Preset>().is_err());
    }

    #[test]
    fn text_round_trip() {
        let mut c = ScenarioConfig::base();
        c.apply_text(
            "# comment\nparams.n_nodes = 20\ncoupling.range = 4 # trailing\nanalyses.husimi_nodes = [1, 7]\nic.seed = 9\noutput_dir = out/x\n",
        )
        .unwrap();
        assert_eq!(c.params.n_nodes, 20);
        assert_eq!(c.analyses.husimi_nodes, vec![1, 7]);
        assert_eq!(c.preset, None);
        let mut seeded = ScenarioConfig::from_preset(Preset::Sync);
        seeded.set("ic.seed", "4").unwrap();
        assert_eq!(seeded.preset, Some(Preset::Sync));
        let mut back = ScenarioConfig::base();
        back.apply_text(&c.to_text()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn preset_survives_round_trip() {
        let c = ScenarioConfig::from_preset(Preset::Desync);
        let mut back = ScenarioConfig::base();
        back.apply_text(&c.to_text()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn unknown_and_duplicate_keys_rejected() {
        let mut c = ScenarioConfig::base();
        assert!(matches!(c.apply_text("coupling.v = 1"), Err(Error::Config(_))));
        assert!(c.apply_text("ic.seed = 1\nic.seed = 2").is_err());
        assert!(c.apply_text("ic.seed = 1\npreset = sync").is_err());
        assert!(c.set("schedule.dt", "fast").is_err());
    }

    #[test]
    fn automatic_amplitude_and_centre_follow_the_network() {
        let mut c = ScenarioConfig::base();
        c.set("params.n_nodes", "30").unwrap();
        c.set("params.kappa2", "0.5").unwrap();
        let spec = c.initial_spec();
        assert_eq!(spec.mu, 15.0);
        assert!((spec.amplitude - 1.0).abs() < 1e-15);
    }

    #[test]
    fn long_fluctuation_window_warns() {
        let mut c = ScenarioConfig::base();
        c.set("schedule.fluct_window", "2").unwrap();
        assert_eq!(c.validate().unwrap().len(), 1);
        c.set("coupling.range", "40").unwrap();
        assert!(c.validate().is_err());
    }
}
