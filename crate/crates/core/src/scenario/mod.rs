//! Scenario configuration, presets, runs and sweeps.

mod config;
mod run;
mod sweep;

pub use config::{
    parse_config_text, Analyses, IcConfig, Preset, ScenarioConfig, Schedule,
    GAUSSIAN_VALIDITY_WINDOW, KEYS,
};
pub use run::{
    execute_mode, execute_scenario, run_mode, run_scenario, RunMode, Manifest, ManifestFile, RegimeSummary, ScenarioResult,
    UncertaintySample, MANIFEST_NAME,
};
pub use sweep::{cell_dir, sweep_runner, SweepOptions, SweepReport, SweepRow, AGGREGATE_NAME};
