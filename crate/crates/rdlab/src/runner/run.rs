//! Scenario orchestration: builds the objects a mode needs, runs it, and
//! writes its artifacts.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::Serialize;

use crate::dynamics::{evolve_with_lq, TrajectoryRecord};
use crate::equilibrium::{compute_equilibrium, equilibrium_residual};
use crate::error::{Error, Result};
use crate::grid::{Field, Grid, Masses, State};
use crate::lab::{estimate_beta, estimate_ckp, estimate_k1, EmpiricalConstant, SamplerConfig};
use crate::runner::config::{InitialKind, Mode, RunConfig};
use crate::runner::csv::render_trajectory_csv;
use crate::runner::svg::{emit_svg_lineplot, PlotOptions, PlotSeries};
use crate::validation;

/// What a run produced; `messages` is also printed to stdout as it happens.
#[derive(Clone, Debug, Default)]
pub struct RunSummary {
    pub written: Vec<PathBuf>,
    pub messages: Vec<String>,
}

/// Process exit code for an error, following the documented contract:
/// 0 success, 2 config error, 3 numerical failure, 4 validation failure.
pub fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::Config(_) | Error::InvalidParameter(_) | Error::GridMismatch(_) => 2,
        Error::Numerical { .. } | Error::Estimation(_) | Error::NoPositiveEquilibrium { .. } => 3,
        Error::ValidationFailed { .. } => 4,
        Error::Io(_) => 1,
    }
}

/// Executes a validated configuration, printing progress to stdout. Returns
/// an error with exit code 4 semantics when validate mode finds a failure.
pub fn run(config: &RunConfig) -> Result<RunSummary> {
    run_inner(config, false)
}

/// [`run`] without stdout output; the messages stay in the summary.
pub fn run_quiet(config: &RunConfig) -> Result<RunSummary> {
    run_inner(config, true)
}

fn run_inner(config: &RunConfig, quiet: bool) -> Result<RunSummary> {
    match config.mode {
        Mode::Simulate => run_simulate(config, quiet),
        Mode::LabBeta | Mode::LabK1 | Mode::LabCkp => run_lab(config, quiet),
        Mode::Equilibrium => run_equilibrium(config, quiet),
        Mode::Validate => run_validate(config, quiet),
    }
}

fn output_dir(config: &RunConfig) -> Result<PathBuf> {
    let dir = PathBuf::from(
        config
            .output
            .dir
            .clone()
            .unwrap_or_else(|| "out".to_string()),
    );
    std::fs::create_dir_all(&dir)?;
    Ok(dir)
}

fn say(summary: &mut RunSummary, quiet: bool, msg: String) {
    if !quiet {
        println!("{msg}");
    }
    summary.messages.push(msg);
}

/// Builds the initial state a simulate scenario asks for.
pub fn build_initial_state(config: &RunConfig, grid: &Arc<Grid>) -> Result<State> {
    let init = config.initial.as_ref().expect("validated");
    match init.kind {
        InitialKind::Constant => State::constant(grid, init.values.expect("validated"), 0.0),
        InitialKind::CosinePerturbedEquilibrium => {
            let m = init.masses.expect("validated");
            let masses = Masses::new(m[0], m[1], m[2])?;
            let eq = compute_equilibrium(masses, grid.domain().volume())?;
            let species = init.species.expect("validated") - 1;
            let amplitude = init.amplitude.expect("validated");
            let modes = init
                .mode
                .clone()
                .unwrap_or_else(|| vec![1; grid.dimension()]);
            if modes.len() != grid.dimension() {
                return Err(Error::Config(format!(
                    "initial.mode needs {} wavenumbers, got {}",
                    grid.dimension(),
                    modes.len()
                )));
            }
            let lengths = grid.domain().lengths().to_vec();
            let base = eq.component(species);
            let perturbed = Field::from_fn(grid, |x| {
                let mut c = 1.0;
                for (axis, &k) in modes.iter().enumerate() {
                    c *= (k as f64 * std::f64::consts::PI * x[axis] / lengths[axis]).cos();
                }
                (base + amplitude * c).max(0.0)
            });
            let mut fields: Vec<Field> = (0..4)
                .map(|i| Field::constant(grid, eq.component(i)))
                .collect();
            fields[species] = perturbed;
            let [u1, u2, u3, u4]: [Field; 4] = fields.try_into().unwrap();
            State::new(u1, u2, u3, u4, 0.0)
        }
        InitialKind::Sampled => {
            let m = init.masses.expect("validated");
            let cfg = SamplerConfig::new(
                Arc::clone(grid),
                Masses::new(m[0], m[1], m[2])?,
                init.roughness.expect("validated"),
                init.amplitude.unwrap_or(0.5),
                config.seed,
            )?;
            Ok(crate::lab::sample_state(&cfg))
        }
    }
}

fn run_simulate(config: &RunConfig, quiet: bool) -> Result<RunSummary> {
    let mut summary = RunSummary::default();
    let grid = config.build_grid()?;
    let d = config.build_diffusion()?;
    let (icfg, sample_every) = config.build_integrator()?;
    let initial = build_initial_state(config, &grid)?;
    let q = lq_exponent_for(config, grid.dimension());

    let traj = evolve_with_lq(&initial, &d, &icfg, sample_every, q)?;

    let dir = output_dir(config)?;
    let csv_name = config
        .output
        .csv
        .clone()
        .unwrap_or_else(|| "trajectory.csv".to_string());
    let csv_path = dir.join(csv_name);
    std::fs::write(&csv_path, render_trajectory_csv(&traj.records))?;
    summary.written.push(csv_path.clone());

    let last = traj.records.last().expect("at least the initial record");
    say(
        &mut summary,
        quiet,
        format!(
            "simulate: {} samples to t = {:.4}, H(end) = {:.6e}, max dist to equilibrium = {:.6e}",
            traj.records.len(),
            last.t,
            last.entropy,
            last.linf_dist.iter().cloned().fold(0.0, f64::max),
        ),
    );
    say(&mut summary, quiet, format!("wrote {}", csv_path.display()));

    if config.output.svg {
        for path in write_svg_plots(&traj, &dir)? {
            say(&mut summary, quiet, format!("wrote {}", path.display()));
            summary.written.push(path);
        }
    }
    Ok(summary)
}

fn lq_exponent_for(config: &RunConfig, dimension: usize) -> f64 {
    match dimension {
        1 => 1.0,
        _ => 1.0 + config.lab_gamma(),
    }
}

fn write_svg_plots(traj: &TrajectoryRecord, dir: &Path) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    let records = &traj.records;

    // Entropy on a log axis; drop the tail where it touches zero.
    let h_points: Vec<(f64, f64)> = records
        .iter()
        .filter(|r| r.entropy > 0.0)
        .map(|r| (r.t, r.entropy))
        .collect();
    if h_points.len() >= 2 {
        let path = dir.join("entropy.svg");
        emit_svg_lineplot(
            &[PlotSeries {
                label: "H".to_string(),
                points: h_points,
            }],
            &PlotOptions {
                title: "relative entropy".to_string(),
                y_label: "H".to_string(),
                log_y: true,
                ..Default::default()
            },
            &path,
        )?;
        written.push(path);
    }

    let dist_series: Vec<PlotSeries> = (0..4)
        .map(|i| PlotSeries {
            label: format!("|u{} - u{}_inf|", i + 1, i + 1),
            points: records.iter().map(|r| (r.t, r.linf_dist[i])).collect(),
        })
        .collect();
    let path = dir.join("linf_dist.svg");
    emit_svg_lineplot(
        &dist_series,
        &PlotOptions {
            title: "sup-norm distance to equilibrium".to_string(),
            y_label: "distance".to_string(),
            log_y: false,
            ..Default::default()
        },
        &path,
    )?;
    written.push(path);

    let m0 = records[0].masses;
    let drift_series: Vec<PlotSeries> = [("m13", m0.m13()), ("m14", m0.m14()), ("m23", m0.m23())]
        .iter()
        .enumerate()
        .map(|(k, (name, base))| PlotSeries {
            label: name.to_string(),
            points: records
                .iter()
                .map(|r| {
                    let m = [r.masses.m13(), r.masses.m14(), r.masses.m23()][k];
                    (r.t, (m - base).abs() / base.abs().max(1e-300))
                })
                .collect(),
        })
        .collect();
    let path = dir.join("mass_drift.svg");
    emit_svg_lineplot(
        &drift_series,
        &PlotOptions {
            title: "relative drift of the conserved totals".to_string(),
            y_label: "relative drift".to_string(),
            log_y: false,
            ..Default::default()
        },
        &path,
    )?;
    written.push(path);
    Ok(written)
}

#[derive(Serialize)]
struct LabReport<'a> {
    constant: &'a str,
    kind: &'a str,
    value: f64,
    samples: u64,
    excluded: u64,
    seed: u64,
    extremal_index: u64,
    config_echo: &'a RunConfig,
}

fn run_lab(config: &RunConfig, quiet: bool) -> Result<RunSummary> {
    let mut summary = RunSummary::default();
    let grid = config.build_grid()?;
    let masses = config.build_masses()?;
    let sampler = config.sampler_section()?;
    let cfg = SamplerConfig::new(
        Arc::clone(&grid),
        masses,
        sampler.roughness,
        sampler.amplitude,
        config.seed,
    )?;
    let n = sampler.samples;

    let (name, result): (&str, EmpiricalConstant) = match config.mode {
        Mode::LabBeta => {
            let d = config.build_diffusion()?;
            ("beta", estimate_beta(&cfg, &d, n)?)
        }
        Mode::LabK1 => {
            let d = config.build_diffusion()?;
            let eq = compute_equilibrium(masses, grid.domain().volume())?;
            let q = match grid.dimension() {
                1 => 1.0,
                _ => 1.0 + config.lab_gamma(),
            };
            ("k1", estimate_k1(&cfg, &d, &eq, q, n)?)
        }
        Mode::LabCkp => {
            let eq = compute_equilibrium(masses, grid.domain().volume())?;
            ("c_ckp", estimate_ckp(&cfg, &eq, n)?)
        }
        _ => unreachable!("run_lab only handles lab modes"),
    };

    let report = LabReport {
        constant: name,
        kind: match result.kind {
            crate::lab::BoundKind::Inf => "inf",
            crate::lab::BoundKind::Sup => "sup",
        },
        value: result.value,
        samples: result.sample_count,
        excluded: result.excluded,
        seed: result.extremal.seed,
        extremal_index: result.extremal.index,
        config_echo: config,
    };
    let json = serde_json::to_string_pretty(&report).expect("report serializes");

    let dir = output_dir(config)?;
    let json_name = config
        .output
        .json
        .clone()
        .unwrap_or_else(|| "report.json".to_string());
    let path = dir.join(json_name);
    std::fs::write(&path, json + "\n")?;
    say(
        &mut summary,
        quiet,
        format!(
            "{name}: {} = {:.6e} over {} samples ({} excluded), extremal index {}",
            report.kind, result.value, result.sample_count, result.excluded, result.extremal.index
        ),
    );
    say(&mut summary, quiet, format!("wrote {}", path.display()));
    summary.written.push(path);
    Ok(summary)
}

fn run_equilibrium(config: &RunConfig, quiet: bool) -> Result<RunSummary> {
    let mut summary = RunSummary::default();
    let masses = config.build_masses()?;
    let volume = config.masses_volume()?;
    let eq = compute_equilibrium(masses, volume)?;
    let r = equilibrium_residual(&eq);
    say(
        &mut summary,
        quiet,
        format!(
            "equilibrium: ({}, {}, {}, {})",
            eq.u1_inf, eq.u2_inf, eq.u3_inf, eq.u4_inf
        ),
    );
    say(
        &mut summary,
        quiet,
        format!(
            "residuals: detailed balance {:.3e}, m13 {:.3e}, m14 {:.3e}, m23 {:.3e}",
            r[0], r[1], r[2], r[3]
        ),
    );
    Ok(summary)
}

fn run_validate(_config: &RunConfig, quiet: bool) -> Result<RunSummary> {
    let mut summary = RunSummary::default();
    let outcomes = validation::run_all();
    let mut failed = 0;
    for o in &outcomes {
        say(&mut summary, quiet, o.report_line());
        if !o.passed {
            failed += 1;
        }
    }
    if failed > 0 {
        return Err(Error::ValidationFailed {
            failed,
            total: outcomes.len(),
        });
    }
    say(
        &mut summary,
        quiet,
        format!("all {} checks passed", outcomes.len()),
    );
    Ok(summary)
}
