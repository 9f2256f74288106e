use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Arg, ArgMatches, Args, Command, CommandFactory, FromArgMatches, Parser, Subcommand};

use qchimera::info::mi_scan;
use qchimera::io;
use qchimera::oracle_check::run_oracle_checks;
use qchimera::scenario::{
    parse_config_text, run_mode, sweep_runner, Manifest, SweepOptions, Preset, RunMode, ScenarioConfig, KEYS,
};
use qchimera::{Error, Result};

const EXIT_PARTIAL_SWEEP: u8 = 4;

/// Chimera states in a ring of quantum Van der Pol oscillators.
#[derive(Parser)]
#[command(name = "qchimera", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Args, Clone)]
struct Common {
    /// Start from a named preset (chimera, sync, desync).
    #[arg(long)]
    preset: Option<Preset>,
    /// Key-value configuration file applied on top of the preset.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Seed for the initial phases.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Mean-field transient and regime classification.
    Simulate(Common),
    /// Mean field, covariance window and analyses.
    Quantum(Common),
    /// Mutual-information scan of a stored covariance or of a fresh run.
    MiScan {
        #[command(flatten)]
        common: Common,
        /// Covariance CSV written by `quantum`.
        #[arg(long)]
        covariance: Option<PathBuf>,
    },
    /// Certify the Gaussian layer against the truncated-Fock oracles.
    OracleCheck,
    /// Grid of coupling strengths and seeds.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Coupling strengths, comma separated.
        #[arg(long, value_delimiter = ',', default_values_t = [0.8, 1.2, 1.6])]
        strengths: Vec<f64>,
        /// Seeds: a comma-separated list or a half-open range `a..b`.
        #[arg(long, default_value = "0..10")]
        seeds: String,
        /// Concurrent scenarios.
        #[arg(long)]
        workers: Option<usize>,
        /// Give strengths that match a preset that preset's transient.
        #[arg(long)]
        preset_transients: bool,
    },
}

/// Dotted config keys exposed as `--key value` flags.
fn override_keys() -> impl Iterator<Item = &'static str> {
    KEYS.iter()
        .copied()
        .filter(|k| !matches!(*k, "preset" | "output_dir" | "ic.seed"))
}

fn command() -> Command {
    let mut cmd = Cli::command();
    for sub in ["simulate", "quantum", "mi-scan", "sweep"] {
        cmd = cmd.mut_subcommand(sub, |s| {
            override_keys().fold(s, |s, key| {
                s.arg(
                    Arg::new(key)
                        .long(key)
                        .value_name("VALUE")
                        .help_heading("Config overrides"),
                )
            })
        });
    }
    cmd
}

fn parse_seeds(text: &str) -> Result<Vec<u64>> {
    let bad = |e: String| Error::Config(format!("--seeds '{text}': {e}"));
    if let Some((a, b)) = text.split_once("..") {
        let a: u64 = a.trim().parse().map_err(|e| bad(format!("{e}")))?;
        let b: u64 = b.trim().parse().map_err(|e| bad(format!("{e}")))?;
        if b <= a {
            return Err(bad("empty range".into()));
        }
        return Ok((a..b).collect());
    }
    text.split(',')
        .map(|s| s.trim().parse().map_err(|e| bad(format!("{e}"))))
        .collect()
}

/// Layers preset, config file, `--seed`/`--out` and dotted overrides.
fn build_config(common: &Common, sub: &ArgMatches, need_seed: bool) -> Result<ScenarioConfig> {
    let mut cfg = common
        .preset
        .map_or_else(ScenarioConfig::base, ScenarioConfig::from_preset);
    let mut from_preset = common.preset.is_some();
    let mut seed_set = common.seed.is_some();
    let mut out_set = common.out.is_some();
    if let Some(path) = &common.config {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let pairs = parse_config_text(&text).map_err(|e| e.context(format!("in {}", path.display())))?;
        from_preset |= pairs.iter().any(|(k, _)| k == "preset");
        seed_set |= pairs.iter().any(|(k, _)| k == "ic.seed");
        out_set |= pairs.iter().any(|(k, _)| k == "output_dir");
        cfg.apply_text(&text)
            .map_err(|e| e.context(format!("in {}", path.display())))?;
    }
    if let Some(seed) = common.seed {
        cfg.ic.seed = seed;
    }
    if let Some(out) = &common.out {
        cfg.output_dir = Some(out.clone());
    }
    for key in override_keys() {
        if let Some(value) = sub.get_one::<String>(key) {
            cfg.set(key, value)?;
        }
    }
    if !from_preset && ((need_seed && !seed_set) || !out_set) {
        return Err(Error::Config(
            "runs without a preset need --seed and --out (or ic.seed and output_dir in the config file)".into(),
        ));
    }
    if cfg.output_dir.is_none() {
        let name = cfg.preset.map_or("run", Preset::name);
        cfg.output_dir = Some(PathBuf::from(format!("qchimera-{name}-seed{}", cfg.ic.seed)));
    }
    Ok(cfg)
}

fn report(manifest: &Manifest, dir: &Path) {
    if let Some(r) = &manifest.regime {
        let flag = if r.low_confidence { " (low confidence)" } else { "" };
        println!("regime: {}{flag}", r.regime);
    }
    if let Some(i2) = manifest.i2_half {
        println!("I2 at L = N/2: {i2}");
    }
    println!("wrote {} files to {}", manifest.files.len() + 1, dir.display());
}

fn run_single(cfg: &ScenarioConfig, mode: RunMode) -> Result<()> {
    let warnings = cfg.validate()?;
    for w in &warnings {
        eprintln!("warning: {w}");
    }
    let (_, manifest) = run_mode(cfg, mode)?;
    report(&manifest, cfg.output_dir.as_deref().unwrap_or(Path::new(".")));
    Ok(())
}

fn scan_file(path: &Path, out: &Path) -> Result<()> {
    let (c, header) = io::read_covariance_csv(path)?;
    let scan = mi_scan(&c, header.hbar)?;
    io::write_mi_scan_csv(&out.join("mi_scan.csv"), &scan)?;
    let meta = serde_json::json!({
        "source": path.display().to_string(),
        "source_sha256": io::sha256_file(path)?,
        "t": header.t,
        "n_nodes": header.n_nodes,
        "hbar": header.hbar,
        "bipartition": "nodes 1..L against L+1..N",
    });
    io::write_json(&out.join("mi_scan.json"), &meta)?;
    for (l, mi) in &scan {
        println!("{l},{}", mi.i2);
    }
    Ok(())
}

fn run(matches: &ArgMatches) -> Result<ExitCode> {
    let cli = Cli::from_arg_matches(matches).map_err(|e| Error::Config(e.to_string()))?;
    let (_, sub) = matches.subcommand().expect("subcommand is required");
    match &cli.command {
        Cmd::Simulate(common) => run_single(&build_config(common, sub, true)?, RunMode::MeanField)?,
        Cmd::Quantum(common) => run_single(&build_config(common, sub, true)?, RunMode::Quantum)?,
        Cmd::MiScan { common, covariance } => match covariance {
            Some(path) => {
                let out = common
                    .out
                    .clone()
                    .ok_or_else(|| Error::Config("--out is required with --covariance".into()))?;
                std::fs::create_dir_all(&out).map_err(|e| Error::io(&out, e))?;
                scan_file(path, &out)?;
            }
            None => {
                let mut cfg = build_config(common, sub, true)?;
                cfg.analyses.mi_scan = true;
                run_single(&cfg, RunMode::Quantum)?;
            }
        },
        Cmd::OracleCheck => {
            let checks = run_oracle_checks();
            for c in &checks {
                println!("{c}");
            }
            let failed = checks.iter().filter(|c| !c.passed).count();
            println!("{} of {} checks passed", checks.len() - failed, checks.len());
            if failed > 0 {
                return Ok(ExitCode::from(3));
            }
        }
        Cmd::Sweep {
            common,
            strengths,
            seeds,
            workers,
            preset_transients,
        } => {
            let cfg = build_config(common, sub, false)?;
            for w in cfg.validate()? {
                eprintln!("warning: {w}");
            }
            let seeds = parse_seeds(seeds)?;
            let workers = workers.unwrap_or_else(|| {
                std::thread::available_parallelism().map_or(1, |n| n.get())
            });
            let options = SweepOptions {
                workers,
                preset_transients: *preset_transients,
            };
            let report = sweep_runner(&cfg, strengths, &seeds, options)?;
            for row in report.rows.iter().filter(|r| r.error.is_some()) {
                eprintln!("cell V={} seed={} failed: {}", row.strength, row.seed, row.error.as_deref().unwrap_or(""));
            }
            println!(
                "{} of {} cells succeeded; aggregate in {}",
                report.rows.len() - report.failures(),
                report.rows.len(),
                cfg.output_dir.as_deref().unwrap_or(Path::new(".")).display()
            );
            if report.failures() > 0 {
                return Ok(ExitCode::from(EXIT_PARTIAL_SWEEP));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let matches = command().get_matches();
    match run(&matches) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
