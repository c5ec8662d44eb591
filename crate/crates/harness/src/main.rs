use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use oamp_harness::emit::{self, Format};
use oamp_harness::{phase_transition, presets, run_experiment, state_evolution, ConfigFile, ResultRow};

#[derive(Parser)]
#[command(name = "oamp", version, about = "AMP/OAMP Monte-Carlo experiments and state evolution")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(clap::Args, Default)]
struct Overrides {
    /// Signal length N.
    #[arg(long)]
    n: Option<usize>,
    /// Measurement ratio M/N.
    #[arg(long)]
    m_ratio: Option<f64>,
    #[arg(long)]
    snr_db: Option<f64>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    iters: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(clap::Args)]
struct Output {
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv or json.
    #[arg(long, default_value = "csv")]
    format: String,
    /// Include per-trial rows, not only trial means.
    #[arg(long)]
    per_trial: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a preset or configuration file.
    Run {
        target: String,
        #[command(flatten)]
        overrides: Overrides,
        #[command(flatten)]
        output: Output,
    },
    /// State-evolution predictions only, without sampling.
    Se {
        target: String,
        #[command(flatten)]
        overrides: Overrides,
        #[command(flatten)]
        output: Output,
    },
    /// Phase-transition sweep.
    Ptc {
        target: String,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        iters: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the available presets.
    ListPresets,
}

fn load(target: &str) -> Result<ConfigFile> {
    if let Some(f) = presets::preset(target) {
        return Ok(f);
    }
    let p = Path::new(target);
    if !p.exists() {
        bail!("`{target}` is neither a preset ({}) nor a file", presets::NAMES.join(", "));
    }
    Ok(ConfigFile::load(p)?)
}

fn apply(file: &mut ConfigFile, o: &Overrides) -> Result<()> {
    for e in &mut file.experiment {
        if let Some(n) = o.n {
            // Keep a fixed row count proportional to the new length.
            if let Some(m) = e.m {
                e.m = Some(((m as f64) * n as f64 / e.n as f64).round().max(1.0) as usize);
            }
            e.n = n;
        }
        if let Some(r) = o.m_ratio {
            e.m_ratio = Some(r);
            e.m = None;
        }
        if let Some(s) = o.snr_db {
            e.snr_db = Some(s);
        }
        if let Some(t) = o.trials {
            e.trials = t;
        }
        if let Some(t) = o.iters {
            e.iterations = t;
        }
        if let Some(s) = o.seed {
            e.seed = s;
        }
        e.validate()?;
    }
    Ok(())
}

fn write(rows: &[ResultRow], output: &Output) -> Result<()> {
    let format: Format = output.format.parse()?;
    match &output.out {
        Some(p) => emit::emit(rows, p, format)?,
        None => emit::write_rows(rows, std::io::stdout().lock(), format)?,
    }
    Ok(())
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match cli.cmd {
        Cmd::ListPresets => {
            let mut out = std::io::stdout().lock();
            for name in presets::NAMES {
                writeln!(out, "{name:6} {}", presets::describe(name).unwrap_or(""))?;
            }
        }
        Cmd::Run { target, overrides, output } => {
            let mut file = load(&target)?;
            apply(&mut file, &overrides)?;
            if file.experiment.is_empty() {
                bail!("`{target}` has no Monte-Carlo experiments; use `ptc`");
            }
            let mut rows = Vec::new();
            for cfg in &file.experiment {
                eprintln!("running {} ({} trials)", cfg.name, cfg.trials);
                let res = run_experiment(cfg).with_context(|| format!("experiment {}", cfg.name))?;
                for c in &res.curves {
                    for (trial, status) in c.failures() {
                        eprintln!("  {} trial {trial}: {status:?}", c.label);
                    }
                    if let Some(e) = &c.se_error {
                        eprintln!("  {}: no SE prediction: {e}", c.label);
                    }
                }
                rows.extend(res.rows(output.per_trial));
            }
            write(&rows, &output)?;
        }
        Cmd::Se { target, overrides, output } => {
            let mut file = load(&target)?;
            apply(&mut file, &overrides)?;
            let mut rows = Vec::new();
            for cfg in &file.experiment {
                for (label, res) in state_evolution(cfg)? {
                    let curve = res.with_context(|| format!("SE of {} / {label}", cfg.name))?;
                    for (t, v) in curve.into_iter().enumerate() {
                        rows.push(ResultRow {
                            experiment: cfg.name.clone(),
                            trial: "se".into(),
                            iteration: t,
                            algorithm: label.clone(),
                            mse_sim: f64::NAN,
                            mse_se: Some(v),
                            e_metric: None,
                            v2_hat: f64::NAN,
                            tau2_hat: f64::NAN,
                            seed: cfg.seed,
                        });
                    }
                }
            }
            write(&rows, &output)?;
        }
        Cmd::Ptc { target, trials, iters, seed, out } => {
            let mut file = load(&target)?;
            if file.ptc.is_empty() {
                bail!("`{target}` has no phase-transition sweep");
            }
            let mut text = String::new();
            for cfg in &mut file.ptc {
                if let Some(t) = trials {
                    cfg.trials = t;
                }
                if let Some(t) = iters {
                    cfg.iterations = t;
                }
                if let Some(s) = seed {
                    cfg.seed = s;
                }
                let res = phase_transition(cfg)?;
                let csv = res.to_csv();
                if text.is_empty() {
                    text = csv;
                } else {
                    text.extend(csv.lines().skip(1).map(|l| format!("{l}\n")));
                }
            }
            match out {
                Some(p) => std::fs::write(&p, text).with_context(|| format!("writing {}", p.display()))?,
                None => print!("{text}"),
            }
        }
    }
    Ok(())
}
