//! Energy-constrained maximization of an output functional over input states.
//!
//! Inputs are parametrized as ρ = V diag(softmax(w)) V†, with V a product of
//! d(d−1)/2 complex Givens rotations (one angle and one phase each), so the
//! search space is unconstrained ℝ^{d²}. All work happens in the eigenbasis
//! of the Hamiltonian, where the energy is a weighted diagonal sum and the
//! ground state is |0⟩. States above the energy budget are mixed with the
//! ground state down to the budget before the objective is evaluated; the
//! violation itself is also charged as a penalty so the simplex is pulled
//! back towards the feasible region.

use std::f64::consts::{FRAC_PI_2, TAU};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Objective, OptimizerConfig};
use crate::ergotropy::{ergotropy_from_spectrum, total_ergotropy_from_spectrum};
use crate::error::{Error, Result};
use crate::optim::{nelder_mead, NelderMeadOptions};
use crate::qops::{eigenvalues, Complex64, Hamiltonian, KrausChannel, Matrix};

/// Logit used to suppress a population in the seed states (e^{-40} ≈ 4e-18).
const SUPPRESSED_LOGIT: f64 = -40.0;

/// Per-point optimizer diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointDiagnostics {
    /// Index of the winning start; deterministic seeds come first.
    pub best_start: usize,
    pub iterations: usize,
    pub evaluations: usize,
    /// max(0, Tr[ρh] − 𝔢) of the returned input state.
    pub feasibility_residual: f64,
    pub wall_time_s: f64,
    /// Whether the best input has negligible coherences in the energy basis.
    pub diagonal_input: bool,
}

/// Best input found at one energy budget.
#[derive(Debug, Clone)]
pub struct PointOptimum {
    pub value: f64,
    /// Unprojected parameters of the best start.
    pub(crate) params: Vec<f64>,
    /// Feasible input state in the Hamiltonian eigenbasis.
    pub(crate) state: Matrix,
    pub diagnostics: PointDiagnostics,
}

pub(crate) struct OutputProblem {
    dim: usize,
    kraus: Vec<Matrix>,
    levels: Vec<f64>,
    pairs: Vec<(usize, usize)>,
    /// Columns are the Hamiltonian eigenvectors.
    basis: Matrix,
}

impl OutputProblem {
    pub fn new(ch: &KrausChannel, h: &Hamiltonian) -> Result<Self> {
        if ch.dim_in() != h.dim() || ch.dim_out() != h.dim() {
            return Err(Error::DimensionMismatch {
                expected: h.dim(),
                got: ch.dim_in(),
            });
        }
        let basis = h.spectrum().eigenvectors.clone();
        let rotated = ch.rotated(&basis, &basis);
        let dim = h.dim();
        let pairs = (0..dim)
            .flat_map(|i| ((i + 1)..dim).map(move |j| (i, j)))
            .collect();
        Ok(Self {
            dim,
            kraus: rotated.kraus_ops().to_vec(),
            levels: h.levels().to_vec(),
            pairs,
            basis,
        })
    }

    pub fn n_params(&self) -> usize {
        self.dim + 2 * self.pairs.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Rotates an eigenbasis matrix back to the computational basis.
    pub fn to_computational(&self, m: &Matrix) -> Matrix {
        self.basis.matmul(m).matmul_adjoint(&self.basis)
    }

    pub fn state_from_params(&self, x: &[f64]) -> Matrix {
        let d = self.dim;
        let logits = &x[..d];
        let top = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let weights: Vec<f64> = logits.iter().map(|l| (l - top).exp()).collect();
        let z: f64 = weights.iter().sum();

        let mut v = Matrix::identity(d);
        for (k, &(i, j)) in self.pairs.iter().enumerate() {
            let theta = x[d + 2 * k];
            let phi = x[d + 2 * k + 1];
            let (s, c) = theta.sin_cos();
            let e = Complex64::from_polar(1.0, phi);
            let g_ij = -e * s;
            let g_ji = e.conj() * s;
            // V ← V G, G acting on columns i and j
            for r in 0..d {
                let vi = v[(r, i)];
                let vj = v[(r, j)];
                v[(r, i)] = vi * c + vj * g_ji;
                v[(r, j)] = vi * g_ij + vj * c;
            }
        }
        let mut rho = Matrix::zeros(d, d);
        for k in 0..d {
            let p = weights[k] / z;
            if p == 0.0 {
                continue;
            }
            for a in 0..d {
                let va = v[(a, k)] * p;
                for b in 0..d {
                    rho[(a, b)] += va * v[(b, k)].conj();
                }
            }
        }
        rho
    }

    pub fn energy(&self, rho: &Matrix) -> f64 {
        self.levels
            .iter()
            .enumerate()
            .map(|(i, e)| e * rho[(i, i)].re)
            .sum()
    }

    /// Mixes `rho` with the ground state so that its energy does not exceed `e`.
    pub fn project(&self, rho: &Matrix, e: f64) -> Matrix {
        let energy = self.energy(rho);
        if energy <= e {
            return rho.clone();
        }
        let keep = if energy > 0.0 {
            (e / energy).clamp(0.0, 1.0)
        } else {
            0.0
        };
        let mut out = rho.scale_real(keep);
        out[(0, 0)] += Complex64::new(1.0 - keep, 0.0);
        out
    }

    pub fn output(&self, rho: &Matrix) -> Matrix {
        let mut out = Matrix::zeros(self.dim, self.dim);
        for k in &self.kraus {
            out = &out + &k.matmul(rho).matmul_adjoint(k);
        }
        out
    }

    pub fn objective(&self, rho: &Matrix, objective: Objective) -> Result<f64> {
        let out = self.output(rho);
        let out_energy = self.energy(&out);
        let spectrum = eigenvalues(&out);
        match objective {
            Objective::Ergotropy => {
                Ok(ergotropy_from_spectrum(out_energy, &spectrum, &self.levels))
            }
            Objective::TotalErgotropy => {
                let clipped: Vec<f64> = spectrum.iter().map(|p| p.max(0.0)).collect();
                total_ergotropy_from_spectrum(out_energy, &clipped, &self.levels)
            }
        }
    }

    fn penalized(&self, x: &[f64], e: f64, objective: Objective, weight: f64) -> f64 {
        let rho = self.state_from_params(x);
        let excess = (self.energy(&rho) - e).max(0.0);
        let feasible = self.project(&rho, e);
        match self.objective(&feasible, objective) {
            Ok(v) => -v + weight * excess,
            Err(_) => f64::INFINITY,
        }
    }

    /// Deterministic starting points: ground state, maximally mixed state,
    /// each energy eigenstate, and for every level above the budget the pure
    /// superposition with the ground state whose energy equals the budget.
    pub fn seeds(&self, e: f64) -> Vec<Vec<f64>> {
        let d = self.dim;
        let n = self.n_params();
        let eigenstate = |k: usize| {
            let mut x = vec![0.0; n];
            for (i, xi) in x.iter_mut().enumerate().take(d) {
                *xi = if i == k { 0.0 } else { SUPPRESSED_LOGIT };
            }
            x
        };
        let mut seeds = vec![eigenstate(0), vec![0.0; n]];
        for k in 1..d {
            seeds.push(eigenstate(k));
        }
        for k in 1..d {
            let ek = self.levels[k];
            if ek > e && ek > 0.0 {
                let mut x = eigenstate(0);
                let pair = self
                    .pairs
                    .iter()
                    .position(|&p| p == (0, k))
                    .expect("pair (0, k) exists");
                x[d + 2 * pair] = (e / ek).sqrt().asin();
                seeds.push(x);
            }
        }
        seeds
    }

    pub fn random_start(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let d = self.dim;
        let mut x = Vec::with_capacity(self.n_params());
        for _ in 0..d {
            x.push(rng.random_range(-3.0..3.0));
        }
        for _ in &self.pairs {
            x.push(rng.random_range(0.0..FRAC_PI_2));
            x.push(rng.random_range(0.0..TAU));
        }
        x
    }

    /// Multi-start Nelder–Mead at energy budget `e`. `stream` selects the
    /// random stream so independent points draw independent starts.
    pub fn optimize(
        &self,
        e: f64,
        objective: Objective,
        cfg: &OptimizerConfig,
        stream: u64,
        extra_starts: &[Vec<f64>],
    ) -> Result<PointOptimum> {
        let clock = Instant::now();
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(stream);
        let mut starts = self.seeds(e);
        starts.extend(extra_starts.iter().cloned());
        for _ in 0..cfg.n_starts {
            starts.push(self.random_start(&mut rng));
        }

        let opts = NelderMeadOptions {
            max_iters: cfg.max_iters,
            ftol: cfg.ftol,
            initial_step: 0.5,
        };
        let f = |x: &[f64]| self.penalized(x, e, objective, cfg.penalty_weight);
        let mut best: Option<(usize, crate::optim::NelderMeadResult)> = None;
        let mut evaluations = 0;
        for (idx, x0) in starts.iter().enumerate() {
            let r = nelder_mead(f, x0, &opts);
            evaluations += r.evals;
            if best.as_ref().is_none_or(|(_, b)| r.f < b.f) {
                best = Some((idx, r));
            }
        }
        let (best_start, mut best) = best.expect("at least one start");

        // polish the winner with a fresh, smaller simplex
        let polish = nelder_mead(
            f,
            &best.x,
            &NelderMeadOptions {
                initial_step: 0.05,
                ..opts
            },
        );
        evaluations += polish.evals;
        let iterations = best.iters + polish.iters;
        if polish.f < best.f {
            best = polish;
        }

        let state = self.project(&self.state_from_params(&best.x), e);
        let value = self.objective(&state, objective)?;
        let off_diagonal: f64 = (0..self.dim)
            .flat_map(|i| (0..self.dim).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| state[(i, j)].norm())
            .fold(0.0, f64::max);
        Ok(PointOptimum {
            value,
            params: best.x,
            diagnostics: PointDiagnostics {
                best_start,
                iterations,
                evaluations,
                feasibility_residual: (self.energy(&state) - e).max(0.0),
                wall_time_s: clock.elapsed().as_secs_f64(),
                diagonal_input: off_diagonal < 1e-6,
            },
            state,
        })
    }
}
