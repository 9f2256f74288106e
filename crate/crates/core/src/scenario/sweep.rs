use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use super::config::{Preset, ScenarioConfig};
use super::run::run_scenario;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub strength: f64,
    pub seed: u64,
    pub dir: String,
    pub regime: Option<String>,
    pub low_confidence: Option<bool>,
    pub i2_half: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub rows: Vec<SweepRow>,
}

impl SweepReport {
    pub fn failures(&self) -> usize {
        self.rows.iter().filter(|r| r.error.is_some()).count()
    }
}

pub const AGGREGATE_NAME: &str = "sweep.csv";

/// Subdirectory of one sweep cell.
pub fn cell_dir(root: &Path, strength: f64, seed: u64) -> PathBuf {
    root.join(format!("V{strength}_seed{seed}"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SweepOptions {
    pub workers: usize,
    /// Cells whose strength matches a preset take that preset's transient.
    pub preset_transients: bool,
}

/// Runs `base` for every `(strength, seed)` pair on at most
/// `options.workers` threads. Each cell writes into its own subdirectory of
/// `base.output_dir`; failures are recorded and the sweep carries on.
/// Rows and the aggregate CSV follow grid order regardless of scheduling.
pub fn sweep_runner(
    base: &ScenarioConfig,
    strengths: &[f64],
    seeds: &[u64],
    options: SweepOptions,
) -> Result<SweepReport> {
    if strengths.is_empty() || seeds.is_empty() {
        return Err(Error::Config("sweep grid is empty".into()));
    }
    let root = base
        .output_dir
        .clone()
        .ok_or_else(|| Error::Config("output_dir is required for a sweep".into()))?;
    let cells: Vec<(f64, u64)> = strengths
        .iter()
        .flat_map(|&v| seeds.iter().map(move |&s| (v, s)))
        .collect();
    let results: Mutex<Vec<Option<SweepRow>>> = Mutex::new(vec![None; cells.len()]);
    let next = AtomicUsize::new(0);
    let run_cell = |i: usize| -> SweepRow {
        let (strength, seed) = cells[i];
        let dir = cell_dir(&root, strength, seed);
        let mut cfg = base.clone();
        cfg.coupling_strength = strength;
        cfg.ic.seed = seed;
        cfg.output_dir = Some(dir.clone());
        match Preset::for_strength(strength).filter(|_| options.preset_transients) {
            Some(p) => {
                cfg.preset = Some(p);
                cfg.schedule.t_transient = p.t_transient();
            }
            None if base.coupling_strength != strength => cfg.preset = None,
            None => {}
        }
        let rel = dir.strip_prefix(&root).unwrap_or(&dir).display().to_string();
        match run_scenario(&cfg) {
            Ok((_, m)) => SweepRow {
                strength,
                seed,
                dir: rel,
                regime: m.regime.as_ref().map(|r| r.regime.clone()),
                low_confidence: m.regime.as_ref().map(|r| r.low_confidence),
                i2_half: m.i2_half,
                error: None,
            },
            Err(e) => SweepRow {
                strength,
                seed,
                dir: rel,
                regime: None,
                low_confidence: None,
                i2_half: None,
                error: Some(e.to_string()),
            },
        }
    };
    std::thread::scope(|scope| {
        for _ in 0..options.workers.clamp(1, cells.len()) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= cells.len() {
                    break;
                }
                let row = run_cell(i);
                results.lock().unwrap()[i] = Some(row);
            });
        }
    });
    let rows: Vec<SweepRow> = results
        .into_inner()
        .unwrap()
        .into_iter()
        .map(|r| r.expect("every cell produces a row"))
        .collect();
    write_aggregate(&root.join(AGGREGATE_NAME), &rows)?;
    Ok(SweepReport { rows })
}

fn write_aggregate(path: &Path, rows: &[SweepRow]) -> Result<()> {
    use std::io::Write;
    let mut text = Vec::new();
    writeln!(text, "V,seed,regime,low_confidence,I2_half,status").unwrap();
    for r in rows {
        let opt = |v: Option<String>| v.unwrap_or_default();
        writeln!(
            text,
            "{},{},{},{},{},{}",
            r.strength,
            r.seed,
            opt(r.regime.clone()),
            opt(r.low_confidence.map(|b| b.to_string())),
            opt(r.i2_half.map(|x| x.to_string())),
            if r.error.is_some() { "failed" } else { "ok" }
        )
        .unwrap();
    }
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}
