//! Energy-constrained output ergotropy and the capacitances built from it.
//!
//! For a channel Λ and an input energy budget 𝔢, [`max_output_ergotropy`]
//! maximizes the ergotropy of Λ(ρ) over inputs with Tr[ρĥ] ≤ 𝔢. Sampling it
//! on a uniform grid gives the single-shot curve 𝓔⁽¹⁾; its least concave
//! majorant is the local capacitance χ. The same construction with total
//! ergotropy gives χ_tot, a lower bound on the separable-input capacitance,
//! and `χ_tot − χ` lower-bounds the gap between the two.
//!
//! Every maximization here is a multi-start local search, so the reported
//! values are achieved by explicit feasible inputs (lower bounds on the true
//! maxima), not certified global optima.

mod envelope;
mod search;

use serde::{Deserialize, Serialize};

pub use envelope::{concave_envelope, envelope_at, envelope_support, EnergyDistribution};
pub use search::{PointDiagnostics, PointOptimum};

use crate::ergotropy::ergotropy;
use crate::error::{Error, Result};
use crate::exec::{map_indexed, Execution};
use crate::optim::{nelder_mead, NelderMeadOptions};
use crate::qops::{
    apply_channel, partial_trace_keep, tensor_hamiltonian, tensor_power, Complex64, DensityMatrix,
    Hamiltonian, KrausChannel, Matrix, DEFAULT_DIM_CAP,
};
use search::OutputProblem;

/// Default number of grid intervals on [0, e_max].
pub const DEFAULT_GRID_SIZE: usize = 64;

/// Multi-start Nelder–Mead settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizerConfig {
    /// Random starts per energy point, on top of the deterministic seeds.
    pub n_starts: usize,
    pub max_iters: usize,
    pub ftol: f64,
    pub seed: u64,
    pub penalty_weight: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            n_starts: 32,
            max_iters: 2000,
            ftol: 1e-9,
            seed: 0,
            penalty_weight: 10.0,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_starts == 0 {
            return Err(Error::InvalidParams(
                "optimizer.n_starts must be at least 1".into(),
            ));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidParams(
                "optimizer.max_iters must be positive".into(),
            ));
        }
        if !(self.ftol > 0.0) {
            return Err(Error::InvalidParams(
                "optimizer.ftol must be positive".into(),
            ));
        }
        if !(self.penalty_weight > 0.0) {
            return Err(Error::InvalidParams(
                "optimizer.penalty_weight must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Output functional being maximized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    Ergotropy,
    TotalErgotropy,
}

/// Provenance attached to a curve.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CurveMeta {
    pub channel: String,
    pub quantity: String,
    pub optimizer: OptimizerConfig,
}

/// Function of the energy budget sampled on a uniform grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyCurve {
    pub e_grid: Vec<f64>,
    pub values: Vec<f64>,
    pub meta: CurveMeta,
}

impl EnergyCurve {
    pub fn len(&self) -> usize {
        self.e_grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.e_grid.is_empty()
    }

    fn with_quantity(&self, quantity: &str, values: Vec<f64>) -> EnergyCurve {
        EnergyCurve {
            e_grid: self.e_grid.clone(),
            values,
            meta: CurveMeta {
                quantity: quantity.into(),
                ..self.meta.clone()
            },
        }
    }
}

/// `grid_size + 1` equally spaced energies from 0 to `e_max`.
pub fn uniform_grid(e_max: f64, grid_size: usize) -> Vec<f64> {
    (0..=grid_size)
        .map(|i| e_max * i as f64 / grid_size as f64)
        .collect()
}

fn check_energy(h: &Hamiltonian, e: f64) -> Result<()> {
    if !(0.0..=h.e_max() + 1e-12).contains(&e) {
        return Err(Error::EnergyOutOfRange {
            energy: e,
            e_max: h.e_max(),
        });
    }
    Ok(())
}

fn check_setup(h: &Hamiltonian, grid_size: usize, cfg: &OptimizerConfig) -> Result<()> {
    cfg.validate()?;
    if grid_size < 2 {
        return Err(Error::InvalidParams(format!(
            "grid_size = {grid_size} below 2"
        )));
    }
    if h.e_max() <= 0.0 {
        return Err(Error::InvalidParams(
            "Hamiltonian has no excited levels".into(),
        ));
    }
    Ok(())
}

/// Best input found at a single energy budget, with its diagnostics.
pub fn maximize_output(
    ch: &KrausChannel,
    h: &Hamiltonian,
    e: f64,
    objective: Objective,
    cfg: &OptimizerConfig,
) -> Result<PointOptimum> {
    cfg.validate()?;
    check_energy(h, e)?;
    OutputProblem::new(ch, h)?.optimize(e.min(h.e_max()), objective, cfg, 0, &[])
}

/// Best ergotropy of Λ(ρ) over inputs with Tr[ρh] ≤ e.
pub fn max_output_ergotropy(
    ch: &KrausChannel,
    h: &Hamiltonian,
    e: f64,
    cfg: &OptimizerConfig,
) -> Result<f64> {
    maximize_output(ch, h, e, Objective::Ergotropy, cfg).map(|p| p.value)
}

/// Best total ergotropy of Λ(ρ) over inputs with Tr[ρh] ≤ e. The best
/// ergotropy input is also scored, so the result never falls below
/// [`max_output_ergotropy`] for the same arguments.
pub fn max_output_total_ergotropy(
    ch: &KrausChannel,
    h: &Hamiltonian,
    e: f64,
    cfg: &OptimizerConfig,
) -> Result<f64> {
    cfg.validate()?;
    check_energy(h, e)?;
    let problem = OutputProblem::new(ch, h)?;
    let e = e.min(h.e_max());
    let ergo = problem.optimize(e, Objective::Ergotropy, cfg, 0, &[])?;
    let total = problem.optimize(
        e,
        Objective::TotalErgotropy,
        cfg,
        0,
        std::slice::from_ref(&ergo.params),
    )?;
    let crossed = problem.objective(&ergo.state, Objective::TotalErgotropy)?;
    Ok(total.value.max(crossed))
}

/// Single-shot output curve with per-point diagnostics and best inputs.
#[derive(Debug, Clone)]
pub struct OutputCurve {
    pub curve: EnergyCurve,
    pub points: Vec<PointDiagnostics>,
    /// Best input at each grid point, in the computational basis.
    pub inputs: Vec<DensityMatrix>,
}

struct RawCurve {
    grid: Vec<f64>,
    points: Vec<PointOptimum>,
}

fn raw_curve(
    problem: &OutputProblem,
    grid: &[f64],
    objective: Objective,
    cfg: &OptimizerConfig,
    exec: Execution,
    warm: Option<&RawCurve>,
) -> Result<RawCurve> {
    let results = map_indexed(grid.len(), exec, |i| {
        let extra: Vec<Vec<f64>> = warm
            .map(|w| vec![w.points[i].params.clone()])
            .unwrap_or_default();
        problem.optimize(grid[i], objective, cfg, i as u64, &extra)
    });
    let mut points = results.into_iter().collect::<Result<Vec<_>>>()?;

    if let Some(w) = warm {
        for (p, other) in points.iter_mut().zip(&w.points) {
            let crossed = problem.objective(&other.state, objective)?;
            if crossed > p.value {
                p.value = crossed;
                p.state = other.state.clone();
                p.params = other.params.clone();
            }
        }
    }

    monotonize(problem, grid, objective, cfg, &mut points)?;
    Ok(RawCurve {
        grid: grid.to_vec(),
        points,
    })
}

/// Sequential post-pass: each point is re-searched from its left neighbour's
/// best parameters, and inherits the neighbour's input outright when that
/// still scores higher (it is feasible because the grid is increasing).
fn monotonize(
    problem: &OutputProblem,
    grid: &[f64],
    objective: Objective,
    cfg: &OptimizerConfig,
    points: &mut [PointOptimum],
) -> Result<()> {
    let opts = NelderMeadOptions {
        max_iters: cfg.max_iters,
        ftol: cfg.ftol,
        initial_step: 0.1,
    };
    for i in 1..points.len() {
        let e = grid[i];
        let left_params = points[i - 1].params.clone();
        let warm = nelder_mead(
            |x| {
                let rho = problem.state_from_params(x);
                let excess = (problem.energy(&rho) - e).max(0.0);
                match problem.objective(&problem.project(&rho, e), objective) {
                    Ok(v) => -v + cfg.penalty_weight * excess,
                    Err(_) => f64::INFINITY,
                }
            },
            &left_params,
            &opts,
        );
        let warm_state = problem.project(&problem.state_from_params(&warm.x), e);
        let warm_value = problem.objective(&warm_state, objective)?;
        if warm_value > points[i].value {
            points[i].value = warm_value;
            points[i].state = warm_state;
            points[i].params = warm.x;
        }
        if points[i].value < points[i - 1].value {
            let (left, right) = points.split_at_mut(i);
            let prev = &left[i - 1];
            right[0].value = prev.value;
            right[0].state = prev.state.clone();
            right[0].params = prev.params.clone();
        }
        points[i].diagnostics.feasibility_residual =
            (problem.energy(&points[i].state) - e).max(0.0);
    }
    Ok(())
}

fn finish_curve(
    problem: &OutputProblem,
    raw: RawCurve,
    channel: &str,
    objective: Objective,
    cfg: &OptimizerConfig,
) -> OutputCurve {
    let quantity = match objective {
        Objective::Ergotropy => "e1",
        Objective::TotalErgotropy => "e1_tot",
    };
    OutputCurve {
        curve: EnergyCurve {
            e_grid: raw.grid,
            values: raw.points.iter().map(|p| p.value).collect(),
            meta: CurveMeta {
                channel: channel.into(),
                quantity: quantity.into(),
                optimizer: cfg.clone(),
            },
        },
        points: raw.points.iter().map(|p| p.diagnostics.clone()).collect(),
        inputs: raw
            .points
            .iter()
            .map(|p| DensityMatrix::from_matrix_unchecked(problem.to_computational(&p.state)))
            .collect(),
    }
}

/// 𝓔⁽¹⁾ (or 𝓔⁽¹⁾_tot) sampled on `grid_size + 1` points of [0, e_max].
pub fn output_curve(
    ch: &KrausChannel,
    h: &Hamiltonian,
    grid_size: usize,
    objective: Objective,
    cfg: &OptimizerConfig,
    exec: Execution,
) -> Result<OutputCurve> {
    check_setup(h, grid_size, cfg)?;
    let problem = OutputProblem::new(ch, h)?;
    let grid = uniform_grid(h.e_max(), grid_size);
    let raw = raw_curve(&problem, &grid, objective, cfg, exec, None)?;
    Ok(finish_curve(&problem, raw, "", objective, cfg))
}

/// All curves of a capacitance sweep over one channel.
#[derive(Debug, Clone)]
pub struct CapacitanceSweep {
    pub e1: OutputCurve,
    pub e1_tot: OutputCurve,
    pub chi: EnergyCurve,
    pub chi_tot: EnergyCurve,
    pub gap: EnergyCurve,
}

impl CapacitanceSweep {
    /// Computes 𝓔⁽¹⁾ and 𝓔⁽¹⁾_tot on the grid, then their envelopes and the
    /// gap. The total-ergotropy search is warm-started from (and scores) the
    /// ergotropy optima, so `e1_tot ≥ e1` holds pointwise.
    pub fn run(
        ch: &KrausChannel,
        h: &Hamiltonian,
        grid_size: usize,
        cfg: &OptimizerConfig,
        exec: Execution,
        label: &str,
    ) -> Result<Self> {
        check_setup(h, grid_size, cfg)?;
        let problem = OutputProblem::new(ch, h)?;
        let grid = uniform_grid(h.e_max(), grid_size);
        let ergo = raw_curve(&problem, &grid, Objective::Ergotropy, cfg, exec, None)?;
        let total = raw_curve(
            &problem,
            &grid,
            Objective::TotalErgotropy,
            cfg,
            exec,
            Some(&ergo),
        )?;
        let e1 = finish_curve(&problem, ergo, label, Objective::Ergotropy, cfg);
        let e1_tot = finish_curve(&problem, total, label, Objective::TotalErgotropy, cfg);
        let chi_env = concave_envelope(&e1.curve)?;
        let chi = chi_env.with_quantity("chi", chi_env.values.clone());
        let chi_tot_values = concave_envelope(&e1_tot.curve)?.values;
        let chi_tot = chi.with_quantity("chi_tot", chi_tot_values);
        let gap_values = chi_tot
            .values
            .iter()
            .zip(&chi.values)
            .map(|(a, b)| a - b)
            .collect();
        let gap = chi.with_quantity("gap", gap_values);
        Ok(Self {
            e1,
            e1_tot,
            chi,
            chi_tot,
            gap,
        })
    }
}

/// Local capacitance χ(Λ; 𝔢): the concave envelope of 𝓔⁽¹⁾.
pub fn chi(
    ch: &KrausChannel,
    h: &Hamiltonian,
    grid_size: usize,
    cfg: &OptimizerConfig,
) -> Result<EnergyCurve> {
    let raw = output_curve(
        ch,
        h,
        grid_size,
        Objective::Ergotropy,
        cfg,
        Execution::default(),
    )?;
    let env = concave_envelope(&raw.curve)?;
    Ok(env.with_quantity("chi", env.values.clone()))
}

/// χ_tot(Λ; 𝔢): the concave envelope of 𝓔⁽¹⁾_tot, never below [`chi`].
pub fn chi_tot(
    ch: &KrausChannel,
    h: &Hamiltonian,
    grid_size: usize,
    cfg: &OptimizerConfig,
) -> Result<EnergyCurve> {
    Ok(CapacitanceSweep::run(ch, h, grid_size, cfg, Execution::default(), "")?.chi_tot)
}

/// χ_tot − χ on the grid, a lower bound on the separable/local gap.
pub fn gap_curve(
    ch: &KrausChannel,
    h: &Hamiltonian,
    grid_size: usize,
    cfg: &OptimizerConfig,
) -> Result<EnergyCurve> {
    Ok(CapacitanceSweep::run(ch, h, grid_size, cfg, Execution::default(), "")?.gap)
}

/// Outcome of the n-cell product-input check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiniteNReport {
    pub n: usize,
    pub e: f64,
    /// Best Σᵢ 𝓔(Λ(ρᵢ); ĥ)/n found over product inputs with Σᵢ Tr[ρᵢĥ] ≤ n·𝔢,
    /// evaluated through Λ^{⊗n} on the joint state.
    pub lhs_per_cell: f64,
    pub chi_at_e: f64,
    /// Per-cell input energies of the best product input.
    pub cell_energies: Vec<f64>,
    /// lhs_per_cell ≤ chi_at_e + 1e-3
    pub ok: bool,
}

/// Compositions of `total` into `parts` non-negative integers, each at most `max`.
fn compositions(total: usize, parts: usize, max: usize) -> Vec<Vec<usize>> {
    if parts == 1 {
        return if total <= max {
            vec![vec![total]]
        } else {
            Vec::new()
        };
    }
    let mut out = Vec::new();
    for first in 0..=total.min(max) {
        for mut rest in compositions(total - first, parts - 1, max) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Compares the best product-input per-cell ergotropy of n cells against χ.
///
/// Energy splits of the joint budget are first searched on the grid, where
/// the single-cell optima are already known; the best split then seeds a
/// joint Nelder–Mead search over all n cell states, with the total energy
/// enforced by mixing every cell towards the ground state by the same
/// fraction. The final value is recomputed on the joint state
/// Λ^{⊗n}(ρ₁⊗⋯⊗ρₙ) by summing the ergotropies of its single-cell marginals.
pub fn finite_n_check(
    ch: &KrausChannel,
    h: &Hamiltonian,
    n: usize,
    e: f64,
    grid_size: usize,
    cfg: &OptimizerConfig,
) -> Result<FiniteNReport> {
    if !(2..=3).contains(&n) {
        return Err(Error::InvalidParams(format!(
            "finite-n check needs n in {{2, 3}}, got {n}"
        )));
    }
    check_setup(h, grid_size, cfg)?;
    check_energy(h, e)?;
    let joint_channel = tensor_power(ch, n, DEFAULT_DIM_CAP)?;
    tensor_hamiltonian(h, n, DEFAULT_DIM_CAP)?;

    let problem = OutputProblem::new(ch, h)?;
    let grid = uniform_grid(h.e_max(), grid_size);
    let raw = raw_curve(
        &problem,
        &grid,
        Objective::Ergotropy,
        cfg,
        Execution::default(),
        None,
    )?;
    let curve = EnergyCurve {
        e_grid: grid.clone(),
        values: raw.points.iter().map(|p| p.value).collect(),
        meta: CurveMeta::default(),
    };
    let chi_at_e = envelope_at(&curve, e)?;

    // grid splits with Σ e_i ≤ n·e
    let step = grid[1] - grid[0];
    let budget_steps = ((n as f64 * e) / step + 1e-9).floor() as usize;
    let mut best_split: Vec<usize> = vec![0; n];
    let mut best_value = f64::NEG_INFINITY;
    for split in compositions(budget_steps, n, grid_size) {
        let v: f64 = split.iter().map(|&k| raw.points[k].value).sum::<f64>() / n as f64;
        if v > best_value {
            best_value = v;
            best_split = split;
        }
    }
    let mut best_states: Vec<Matrix> = best_split
        .iter()
        .map(|&k| raw.points[k].state.clone())
        .collect();

    // joint refinement
    let d = problem.dim();
    let np = problem.n_params();
    let budget = n as f64 * e;
    let joint_states = |x: &[f64]| -> Vec<Matrix> {
        let cells: Vec<Matrix> = (0..n)
            .map(|c| problem.state_from_params(&x[c * np..(c + 1) * np]))
            .collect();
        let total: f64 = cells.iter().map(|r| problem.energy(r)).sum();
        if total <= budget {
            return cells;
        }
        let keep = if total > 0.0 { budget / total } else { 0.0 };
        cells
            .into_iter()
            .map(|r| {
                let mut m = r.scale_real(keep);
                m[(0, 0)] += Complex64::new(1.0 - keep, 0.0);
                m
            })
            .collect()
    };
    let joint_value = |cells: &[Matrix]| -> f64 {
        cells
            .iter()
            .map(|r| {
                problem
                    .objective(r, Objective::Ergotropy)
                    .unwrap_or(f64::NEG_INFINITY)
            })
            .sum::<f64>()
            / n as f64
    };
    let objective = |x: &[f64]| {
        let raw_cells: Vec<Matrix> = (0..n)
            .map(|c| problem.state_from_params(&x[c * np..(c + 1) * np]))
            .collect();
        let total: f64 = raw_cells.iter().map(|r| problem.energy(r)).sum();
        -joint_value(&joint_states(x)) + cfg.penalty_weight * (total - budget).max(0.0)
    };
    let mut x0 = Vec::with_capacity(n * np);
    for &k in &best_split {
        x0.extend_from_slice(&raw.points[k].params);
    }
    let opts = NelderMeadOptions {
        max_iters: cfg.max_iters * n,
        ftol: cfg.ftol,
        initial_step: 0.2,
    };
    let refined = nelder_mead(objective, &x0, &opts);
    let refined_states = joint_states(&refined.x);
    if joint_value(&refined_states) > best_value {
        best_states = refined_states;
    }
    debug_assert_eq!(best_states[0].rows(), d);

    // evaluate through the joint channel and single-cell marginals
    let cells: Vec<DensityMatrix> = best_states
        .iter()
        .map(|m| DensityMatrix::from_matrix_unchecked(problem.to_computational(m)))
        .collect();
    let mut joint = cells[0].clone();
    for c in &cells[1..] {
        joint = joint.kron(c);
    }
    let out = apply_channel(&joint_channel, &joint)?;
    let mut total = 0.0;
    for site in 0..n {
        let marginal = partial_trace_keep(&out, h.dim(), n, site)?;
        total += ergotropy(&marginal, h)?;
    }
    let lhs_per_cell = total / n as f64;
    let cell_energies = best_states.iter().map(|m| problem.energy(m)).collect();
    Ok(FiniteNReport {
        n,
        e,
        lhs_per_cell,
        chi_at_e,
        cell_energies,
        ok: lhs_per_cell <= chi_at_e + 1e-3,
    })
}
