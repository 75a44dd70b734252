use std::path::Path;
use std::time::Instant;

use ergocap::bosonic::{two_mode_gap_parts, SeriesConfig};
use ergocap::capacitance::{
    concave_envelope, output_curve, CapacitanceSweep, Objective, PointDiagnostics,
};
use ergocap::ergotropy::{
    ergotropy, find_beta_star, mean_energy, total_ergotropy, von_neumann_entropy,
};
use ergocap::qops::Hamiltonian;
use ergocap::Execution;
use serde::Serialize;

use crate::config::{parse_state, Output, SweepConfig};
use crate::error::CliError;
use crate::output::{render_csv, report_path, write_file};

/// Command-line overrides of a sweep config.
#[derive(Debug, Clone, Default)]
pub struct SweepOverrides {
    pub jobs: Option<usize>,
    pub seed: Option<u64>,
    pub grid: Option<usize>,
    pub unit_scale: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct PointReport {
    pub index: usize,
    pub e: f64,
    pub e1: PointDiagnostics,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub e1_tot: Option<PointDiagnostics>,
}

#[derive(Debug, Serialize)]
pub struct RunReport {
    pub config: SweepConfig,
    pub channel_label: String,
    pub unit_scale: f64,
    pub jobs: Option<usize>,
    pub total_wall_time_s: f64,
    pub points: Vec<PointReport>,
}

/// Curves on the sweep grid, by column.
pub struct SweepResult {
    pub e_grid: Vec<f64>,
    pub columns: Vec<(Output, Vec<f64>)>,
    pub report: RunReport,
}

pub fn run_sweep(cfg: &SweepConfig, overrides: &SweepOverrides) -> Result<SweepResult, CliError> {
    let mut cfg = cfg.clone();
    if let Some(seed) = overrides.seed {
        cfg.optimizer.seed = seed;
    }
    if let Some(grid) = overrides.grid {
        cfg.grid_size = grid;
    }
    cfg.validate()?;
    let scale = overrides.unit_scale.unwrap_or(1.0);
    if scale.is_nan() || scale <= 0.0 || scale.is_infinite() {
        return Err(CliError::Invalid("--unit-scale must be positive".into()));
    }
    if overrides.jobs == Some(0) {
        return Err(CliError::Invalid("--jobs must be at least 1".into()));
    }

    let ch = cfg.channel.build()?;
    let h = Hamiltonian::from_levels(&cfg.hamiltonian)?;
    let label = cfg.channel.label();
    let started = Instant::now();

    let compute = || -> Result<_, CliError> {
        if cfg.outputs.iter().any(|o| o.needs_total()) {
            let s = CapacitanceSweep::run(
                &ch,
                &h,
                cfg.grid_size,
                &cfg.optimizer,
                Execution::Parallel,
                &label,
            )?;
            Ok((
                s.e1,
                Some(s.e1_tot),
                s.chi.values,
                Some(s.chi_tot.values),
                Some(s.gap.values),
            ))
        } else {
            let e1 = output_curve(
                &ch,
                &h,
                cfg.grid_size,
                Objective::Ergotropy,
                &cfg.optimizer,
                Execution::Parallel,
            )?;
            let chi = concave_envelope(&e1.curve)?.values;
            Ok((e1, None, chi, None, None))
        }
    };
    let (e1, e1_tot, chi, chi_tot, gap) = match overrides.jobs {
        Some(jobs) => rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| CliError::Invalid(format!("--jobs: {e}")))?
            .install(compute)?,
        None => compute()?,
    };

    let pick = |o: Output| -> Vec<f64> {
        let v = match o {
            Output::E1 => e1.curve.values.clone(),
            Output::E1Tot => e1_tot
                .as_ref()
                .expect("total computed")
                .curve
                .values
                .clone(),
            Output::Chi => chi.clone(),
            Output::ChiTot => chi_tot.clone().expect("total computed"),
            Output::Gap => gap.clone().expect("total computed"),
        };
        v.into_iter().map(|x| x * scale).collect()
    };
    let columns = cfg.columns().into_iter().map(|o| (o, pick(o))).collect();
    let e_grid: Vec<f64> = e1.curve.e_grid.iter().map(|e| e * scale).collect();

    let points = e1
        .points
        .iter()
        .enumerate()
        .map(|(i, p)| PointReport {
            index: i,
            e: e_grid[i],
            e1: p.clone(),
            e1_tot: e1_tot.as_ref().map(|t| t.points[i].clone()),
        })
        .collect();
    let report = RunReport {
        config: cfg.clone(),
        channel_label: label,
        unit_scale: scale,
        jobs: overrides.jobs,
        total_wall_time_s: started.elapsed().as_secs_f64(),
        points,
    };
    Ok(SweepResult {
        e_grid,
        columns,
        report,
    })
}

impl SweepResult {
    pub fn to_csv(&self) -> String {
        let mut header = vec!["e"];
        header.extend(self.columns.iter().map(|(o, _)| o.column()));
        let rows: Vec<Vec<f64>> = (0..self.e_grid.len())
            .map(|i| {
                std::iter::once(self.e_grid[i])
                    .chain(self.columns.iter().map(|(_, v)| v[i]))
                    .collect()
            })
            .collect();
        render_csv(&header, &rows)
    }
}

/// `sweep`: writes the CSV and its `.report.json` sidecar.
pub fn cmd_sweep(config: &Path, out: &Path, overrides: &SweepOverrides) -> Result<(), CliError> {
    let cfg = SweepConfig::load(config)?;
    let result = run_sweep(&cfg, overrides)?;
    write_file(out, &result.to_csv())?;
    let report = serde_json::to_string_pretty(&result.report).expect("report serializes");
    write_file(&report_path(out), &(report + "\n"))
}

/// Rows `beta, beta_star, e_pass, e_cpass, gap` for `steps` evenly spaced β.
pub fn bosonic_gap_rows(
    beta_min: f64,
    beta_max: f64,
    steps: usize,
    unit_scale: f64,
) -> Result<Vec<Vec<f64>>, CliError> {
    if !(beta_min > 0.0 && beta_min < beta_max && beta_max.is_finite()) {
        return Err(CliError::Invalid(format!(
            "need 0 < beta-min < beta-max, got [{beta_min}, {beta_max}]"
        )));
    }
    if steps < 2 {
        return Err(CliError::Invalid(format!("--steps = {steps} is below 2")));
    }
    let cfg = SeriesConfig::default();
    (0..steps)
        .map(|i| {
            let beta = beta_min + (beta_max - beta_min) * i as f64 / (steps - 1) as f64;
            let g = two_mode_gap_parts(beta, &cfg)?;
            Ok(vec![
                beta,
                g.beta_star,
                g.e_pass * unit_scale,
                g.e_cpass * unit_scale,
                g.gap * unit_scale,
            ])
        })
        .collect()
}

pub fn cmd_bosonic_gap(
    beta_min: f64,
    beta_max: f64,
    steps: usize,
    out: &Path,
    unit_scale: f64,
) -> Result<(), CliError> {
    let rows = bosonic_gap_rows(beta_min, beta_max, steps, unit_scale)?;
    write_file(
        out,
        &render_csv(&["beta", "beta_star", "e_pass", "e_cpass", "gap"], &rows),
    )
}

/// Labeled summary of one state, one `key = value` per line.
pub fn ergotropy_summary(
    state_json: &str,
    source: &str,
    levels: &[f64],
) -> Result<String, CliError> {
    let rho = parse_state(state_json, source)?;
    if levels.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(CliError::Invalid(
            "--hamiltonian: eigenvalues must be non-negative".into(),
        ));
    }
    let h = Hamiltonian::from_levels(levels)?;
    if h.dim() != rho.dim() {
        return Err(CliError::Invalid(format!(
            "--hamiltonian has {} eigenvalues but the state has dimension {}",
            h.dim(),
            rho.dim()
        )));
    }
    let entropy = von_neumann_entropy(&rho);
    let star = find_beta_star(&h, entropy)?;
    Ok(format!(
        "mean_energy = {}\nergotropy = {}\ntotal_ergotropy = {}\nbeta_star = {}\nentropy = {}\n",
        mean_energy(&rho, &h)?,
        ergotropy(&rho, &h)?,
        total_ergotropy(&rho, &h)?,
        star.beta,
        entropy
    ))
}

pub fn cmd_ergotropy(state: &Path, levels: &[f64]) -> Result<String, CliError> {
    let text = std::fs::read_to_string(state).map_err(|e| CliError::io(state, e))?;
    ergotropy_summary(&text, &state.display().to_string(), levels)
}
