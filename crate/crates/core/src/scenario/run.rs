use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::ScenarioConfig;
use crate::error::{Error, Result};
use crate::gaussian::{
    covering_grid, husimi_node, min_uncertainty_eigenvalue, propagate_covariance, squeezing_axes,
    weighted_correlation, CovarianceState, HusimiField, SqueezingAxes,
};
use crate::info::{log_det_spd, mi_scan, mutual_information, Bipartition, MutualInformation};
use crate::io;
use crate::ring::{
    classify_regime, initial_conditions, integrate_mean_field, local_order_parameter,
    Classification, MeanFieldState, MeanFieldTrajectory, Thresholds, TrajectoryMetadata, RNG_NAME,
};

/// Samples kept in the classification window.
const OBSERVE_SAMPLES: usize = 50;
/// Husimi grids span this many standard deviations either side of the mean.
const HUSIMI_SIGMAS: f64 = 6.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UncertaintySample {
    pub t: f64,
    pub min_eigenvalue: f64,
    /// `ln det(2C/hbar)`, twice the Rényi-2 entropy of the whole network.
    pub log_det: f64,
}

/// Everything computed by a scenario; fields are filled stage by stage so a
/// failed run still carries what finished.
#[derive(Debug, Clone, Default)]
pub struct ScenarioResult {
    pub warnings: Vec<String>,
    pub initial: Option<MeanFieldState>,
    /// Stored transient samples at the configured stride.
    pub transient: Option<MeanFieldTrajectory>,
    /// Dense samples over the observation window ending at `t_transient`.
    pub observation: Option<MeanFieldTrajectory>,
    pub classification: Option<Classification>,
    /// Mean field over the fluctuation window at half-step resolution.
    pub fluct_trajectory: Option<MeanFieldTrajectory>,
    pub covariances: Vec<CovarianceState>,
    pub order_final: Option<Vec<f64>>,
    pub psi_initial: Option<Vec<f64>>,
    pub psi: Option<Vec<f64>>,
    pub squeezing: Option<Vec<SqueezingAxes>>,
    pub mi_scan: Option<Vec<(usize, MutualInformation)>>,
    pub mi_timeseries: Option<Vec<(f64, MutualInformation)>>,
    pub husimi: Vec<HusimiField>,
    pub uncertainty: Vec<UncertaintySample>,
}

impl ScenarioResult {
    pub fn final_covariance(&self) -> Option<&CovarianceState> {
        self.covariances.last()
    }

    pub fn final_state(&self) -> Option<&MeanFieldState> {
        self.fluct_trajectory.as_ref().map(|t| t.last())
    }
}

fn step_index(t: f64, dt: f64) -> usize {
    (t / dt).round() as usize
}

/// What a run computes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunMode {
    /// Transient and classification only.
    MeanField,
    /// Transient, fluctuation window and the configured analyses.
    Quantum,
}

/// Runs the scenario in memory. On failure the partial result is returned
/// alongside the error.
pub fn execute_scenario(config: &ScenarioConfig) -> (ScenarioResult, Option<Error>) {
    execute_mode(config, RunMode::Quantum)
}

pub fn execute_mode(config: &ScenarioConfig, mode: RunMode) -> (ScenarioResult, Option<Error>) {
    let mut out = ScenarioResult::default();
    let err = execute_into(config, mode, &mut out).err();
    (out, err)
}

fn execute_into(config: &ScenarioConfig, mode: RunMode, out: &mut ScenarioResult) -> Result<()> {
    out.warnings = config.validate()?;
    let params = config.params;
    let coupling = config.coupling()?;
    let s = config.schedule;
    let spec = config.initial_spec();
    let state0 = initial_conditions(&spec, &params)?;
    out.initial = Some(state0.clone());

    // transient, split so the classification window is sampled densely
    let total = step_index(s.t_transient, s.dt);
    let observe = step_index(s.observe_window, s.dt).clamp(1, total.max(1));
    let mut transient = MeanFieldTrajectory {
        times: Vec::new(),
        states: Vec::new(),
        metadata: TrajectoryMetadata {
            params,
            coupling_strength: coupling.strength(),
            coupling_range: coupling.range(),
            dt: s.dt,
            sample_every: s.sample_every,
            seed: Some(spec.seed),
            rng: Some(RNG_NAME.to_string()),
        },
    };
    let mut keep = |states: &[MeanFieldState]| {
        for st in states {
            let idx = step_index(st.t, s.dt);
            if idx.is_multiple_of(s.sample_every) || idx == total {
                transient.times.push(st.t);
                transient.states.push(st.clone());
            }
        }
    };
    let mut state = state0.clone();
    if total == 0 {
        keep(std::slice::from_ref(&state));
    }
    if total > observe {
        let t_obs = (total - observe) as f64 * s.dt;
        let seg = integrate_mean_field(&state, &coupling, &params, t_obs, s.dt, s.sample_every)
            .map_err(|e| e.context("transient"))?;
        keep(&seg.states);
        state = seg.last().clone();
    }
    let observation = if total > 0 {
        let stride = (observe / OBSERVE_SAMPLES).max(1);
        let obs = integrate_mean_field(&state, &coupling, &params, s.t_transient, s.dt, stride)
            .map_err(|e| e.context("observation window"))?;
        keep(&obs.states[usize::from(total > observe)..]);
        state = obs.last().clone();
        Some(obs)
    } else {
        None
    };
    out.transient = Some(transient);
    if let Some(obs) = &observation {
        if obs.len() >= 10 {
            out.classification = Some(
                classify_regime(obs, config.analyses.classify_window, Thresholds::default())
                    .map_err(|e| e.context("classification"))?,
            );
        } else {
            out.warnings
                .push("observation window too short to classify the regime".into());
        }
    }
    out.observation = observation;
    if mode == RunMode::MeanField {
        return Ok(());
    }

    // fluctuation window
    let t0 = state.t;
    let t1 = t0 + s.fluct_window;
    let fluct = integrate_mean_field(&state, &coupling, &params, t1, 0.5 * s.dt, 1)
        .map_err(|e| e.context("mean field over the fluctuation window"))?;
    let final_state = fluct.last().clone();
    out.order_final = Some(local_order_parameter(&final_state, config.analyses.classify_window)?);
    out.fluct_trajectory = Some(fluct);
    let fluct = out.fluct_trajectory.as_ref().unwrap();

    let c0 = CovarianceState::coherent(params.n_nodes, params.hbar, t0);
    out.psi_initial = Some(weighted_correlation(&c0, &coupling)?);
    out.covariances = propagate_covariance(&c0, fluct, &coupling, &params, s.dt, s.fluct_sample_every)
        .map_err(|e| e.context("covariance propagation"))?;
    for c in &out.covariances {
        out.uncertainty.push(UncertaintySample {
            t: c.t,
            min_eigenvalue: min_uncertainty_eigenvalue(&c.matrix, params.hbar),
            log_det: log_det_spd(&(&c.matrix * (2.0 / params.hbar)))?,
        });
    }
    let c_final = out.covariances.last().unwrap().clone();

    let a = &config.analyses;
    if a.psi {
        out.psi = Some(weighted_correlation(&c_final, &coupling)?);
    }
    if a.squeezing {
        out.squeezing = Some(
            (1..=params.n_nodes)
                .map(|l| squeezing_axes(&c_final, l))
                .collect::<Result<_>>()?,
        );
    }
    if a.mi_scan {
        out.mi_scan = Some(mi_scan(&c_final, params.hbar).map_err(|e| e.context("MI scan"))?);
    }
    if let Some(l) = a.mi_timeseries_l {
        let part = Bipartition::leading(l, params.n_nodes)?;
        out.mi_timeseries = Some(
            out.covariances
                .iter()
                .map(|c| Ok((c.t, mutual_information(c, &part, params.hbar)?)))
                .collect::<Result<_>>()
                .map_err(|e: Error| e.context("MI time series"))?,
        );
    }
    for &node in &a.husimi_nodes {
        let alpha = final_state.alpha[node - 1];
        let grid = covering_grid(&c_final, alpha, node, params.hbar, HUSIMI_SIGMAS, a.husimi_resolution);
        out.husimi.push(husimi_node(&c_final, alpha, node, &grid, params.hbar)?);
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestFile {
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeSummary {
    pub regime: String,
    pub low_confidence: bool,
    pub fraction_coherent: f64,
    pub fraction_incoherent: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub mode: RunMode,
    pub preset: Option<String>,
    pub seed: u64,
    pub rng: String,
    pub config: ScenarioConfig,
    pub t_fluct_start: Option<f64>,
    pub t_final: Option<f64>,
    pub regime: Option<RegimeSummary>,
    pub i2_half: Option<f64>,
    pub warnings: Vec<String>,
    pub files: Vec<ManifestFile>,
    pub partial: bool,
    pub error: Option<String>,
}

pub const MANIFEST_NAME: &str = "manifest.json";

impl Manifest {
    pub fn load(dir: &Path) -> Result<Self> {
        let path = dir.join(MANIFEST_NAME);
        let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        Ok(serde_json::from_str(&text)?)
    }

    /// Confirms every listed file exists with the recorded checksum.
    pub fn verify(&self, dir: &Path) -> Result<()> {
        for f in &self.files {
            let actual = io::sha256_file(&dir.join(&f.path))?;
            if actual != f.sha256 {
                return Err(Error::InvalidState(format!("checksum mismatch for {}", f.path)));
            }
        }
        Ok(())
    }
}

struct Emitter {
    dir: PathBuf,
    files: Vec<ManifestFile>,
}

impl Emitter {
    fn emit(&mut self, name: &str, write: impl FnOnce(&Path) -> Result<()>) -> Result<()> {
        let path = self.dir.join(name);
        write(&path)?;
        let bytes = std::fs::metadata(&path).map_err(|e| Error::io(&path, e))?.len();
        self.files.push(ManifestFile {
            path: name.to_string(),
            sha256: io::sha256_file(&path)?,
            bytes,
        });
        Ok(())
    }
}

fn write_outputs(config: &ScenarioConfig, r: &ScenarioResult, em: &mut Emitter) -> Result<()> {
    let a = &config.analyses;
    let hbar = config.params.hbar;
    em.emit("config.txt", |p| {
        std::fs::write(p, config.to_text()).map_err(|e| Error::io(p, e))
    })?;
    if let (true, Some(traj)) = (a.trajectory, &r.transient) {
        em.emit("trajectory.csv", |p| io::write_trajectory_csv(p, traj))?;
        em.emit("trajectory.json", |p| io::write_json(p, &traj.metadata))?;
    }
    if let Some(cls) = &r.classification {
        let final_r = r.order_final.clone().unwrap_or_default();
        let rows: Vec<Vec<f64>> = cls
            .mean_order
            .iter()
            .enumerate()
            .map(|(l, &m)| vec![(l + 1) as f64, m, final_r.get(l).copied().unwrap_or(f64::NAN)])
            .collect();
        em.emit("order.csv", |p| io::write_table_csv(p, &["node", "R_observed", "R_final"], &rows))?;
    }
    if let (true, Some(c)) = (a.covariance, r.final_covariance()) {
        em.emit("covariance.csv", |p| io::write_covariance_csv(p, c, hbar))?;
    }
    if !r.uncertainty.is_empty() {
        let rows: Vec<Vec<f64>> = r
            .uncertainty
            .iter()
            .map(|u| vec![u.t, u.min_eigenvalue, u.log_det])
            .collect();
        em.emit("uncertainty.csv", |p| {
            io::write_table_csv(p, &["t", "min_eigenvalue", "log_det_2C_over_hbar"], &rows)
        })?;
    }
    if let (Some(psi), Some(psi0)) = (&r.psi, &r.psi_initial) {
        let rows: Vec<Vec<f64>> = (0..psi.len())
            .map(|l| vec![(l + 1) as f64, psi0[l], psi[l]])
            .collect();
        em.emit("psi.csv", |p| io::write_table_csv(p, &["node", "psi_initial", "psi"], &rows))?;
    }
    if let Some(sq) = &r.squeezing {
        let rows: Vec<Vec<f64>> = sq
            .iter()
            .enumerate()
            .map(|(l, s)| vec![(l + 1) as f64, s.angle, s.minor, s.major, s.isotropic as u8 as f64])
            .collect();
        em.emit("squeezing.csv", |p| {
            io::write_table_csv(p, &["node", "angle", "minor", "major", "isotropic"], &rows)
        })?;
    }
    if let Some(scan) = &r.mi_scan {
        em.emit("mi_scan.csv", |p| io::write_mi_scan_csv(p, scan))?;
    }
    if let Some(ts) = &r.mi_timeseries {
        let rows: Vec<Vec<f64>> = ts
            .iter()
            .map(|(t, mi)| vec![*t, mi.s2_a, mi.s2_b, mi.s2_ab, mi.i2])
            .collect();
        em.emit("mi_timeseries.csv", |p| {
            io::write_table_csv(p, &["t", "S2_A", "S2_B", "S2_AB", "I2"], &rows)
        })?;
    }
    for h in &r.husimi {
        em.emit(&format!("husimi_node{}.csv", h.node), |p| io::write_husimi_csv(p, h))?;
    }
    Ok(())
}

/// Runs a scenario and writes its outputs plus a manifest into
/// `config.output_dir`. The manifest is written even when the run fails,
/// with `partial` set.
pub fn run_scenario(config: &ScenarioConfig) -> Result<(ScenarioResult, Manifest)> {
    run_mode(config, RunMode::Quantum)
}

pub fn run_mode(config: &ScenarioConfig, mode: RunMode) -> Result<(ScenarioResult, Manifest)> {
    let dir = config
        .output_dir
        .clone()
        .ok_or_else(|| Error::Config("output_dir is required to write a scenario".into()))?;
    std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    let (result, run_err) = execute_mode(config, mode);
    let mut em = Emitter {
        dir: dir.clone(),
        files: Vec::new(),
    };
    let write_err = write_outputs(config, &result, &mut em).err();
    let err = run_err.or(write_err);
    let n = config.params.n_nodes;
    let i2_half = result
        .mi_scan
        .as_ref()
        .and_then(|scan| scan.iter().find(|(l, _)| *l == n / 2).map(|(_, mi)| mi.i2));
    let manifest = Manifest {
        mode,
        preset: config.preset.map(|p| p.name().to_string()),
        seed: config.ic.seed,
        rng: RNG_NAME.to_string(),
        config: config.clone(),
        t_fluct_start: result.covariances.first().map(|c| c.t),
        t_final: result.final_covariance().map(|c| c.t),
        regime: result.classification.as_ref().map(|c| RegimeSummary {
            regime: c.regime.to_string(),
            low_confidence: c.low_confidence,
            fraction_coherent: c.fraction_coherent,
            fraction_incoherent: c.fraction_incoherent,
        }),
        i2_half,
        warnings: result.warnings.clone(),
        files: em.files,
        partial: err.is_some(),
        error: err.as_ref().map(|e| e.to_string()),
    };
    io::write_json(&dir.join(MANIFEST_NAME), &manifest)?;
    match err {
        Some(e) => Err(e.context(format!("scenario in {}", dir.display()))),
        None => Ok((result, manifest)),
    }
}
