//! Ergotropy, passive states, von Neumann entropy and total ergotropy.
//!
//! Everything here depends on a state only through its spectrum, so each
//! operation has a spectral form (`*_from_spectrum`, [`thermal_profile`],
//! [`entropy_matched_profile`]) that works on plain population and level
//! lists. The matrix-level functions are thin wrappers; the spectral forms
//! are what the optimizer and the truncated-Fock checks call.

use crate::error::{Error, Result};
use crate::qops::{rebuild, DensityMatrix, Hamiltonian};

/// Eigenvalues below this contribute nothing to the entropy.
const ENTROPY_FLOOR: f64 = 1e-14;
/// Levels within this of zero count as ground-space levels.
const GROUND_TOL: f64 = 1e-12;
/// Requested accuracy of the entropy match.
const ENTROPY_MATCH_TOL: f64 = 1e-10;

fn check_dims(rho: &DensityMatrix, h: &Hamiltonian) -> Result<()> {
    if rho.dim() != h.dim() {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            got: rho.dim(),
        });
    }
    Ok(())
}

/// Tr[ρ h]
pub fn mean_energy(rho: &DensityMatrix, h: &Hamiltonian) -> Result<f64> {
    check_dims(rho, h)?;
    Ok(rho.matrix().trace_product_re(h.matrix()))
}

/// Energy of the passive rearrangement: largest population on the lowest
/// level. `levels` must be ascending.
pub fn passive_energy_from_spectrum(populations: &[f64], levels: &[f64]) -> f64 {
    let mut p = populations.to_vec();
    p.sort_by(|a, b| b.total_cmp(a));
    p.iter().zip(levels).map(|(p, e)| p * e).sum()
}

/// −Σ p ln p over populations above the floor.
pub fn shannon_entropy(populations: &[f64]) -> f64 {
    populations
        .iter()
        .filter(|&&p| p > ENTROPY_FLOOR)
        .fold(0.0, |s, &p| s - p * p.ln())
}

/// State, energy and ergotropy of the passive counterpart.
#[derive(Debug, Clone)]
pub struct PassiveDecomposition {
    pub passive_state: DensityMatrix,
    pub passive_energy: f64,
    pub ergotropy: f64,
}

pub fn passive_decompose(rho: &DensityMatrix, h: &Hamiltonian) -> Result<PassiveDecomposition> {
    let energy = mean_energy(rho, h)?;
    let mut populations = rho.eigenvalues();
    populations.reverse();
    let passive_energy: f64 = populations.iter().zip(h.levels()).map(|(p, e)| p * e).sum();
    let passive_state =
        DensityMatrix::from_matrix_unchecked(rebuild(&populations, &h.spectrum().eigenvectors));
    Ok(PassiveDecomposition {
        passive_state,
        passive_energy,
        ergotropy: (energy - passive_energy).max(0.0),
    })
}

pub fn ergotropy(rho: &DensityMatrix, h: &Hamiltonian) -> Result<f64> {
    let energy = mean_energy(rho, h)?;
    Ok(ergotropy_from_spectrum(
        energy,
        &rho.eigenvalues(),
        h.levels(),
    ))
}

/// Ergotropy from the mean energy and the state's eigenvalues.
pub fn ergotropy_from_spectrum(mean_energy: f64, populations: &[f64], levels: &[f64]) -> f64 {
    (mean_energy - passive_energy_from_spectrum(populations, levels)).max(0.0)
}

pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    shannon_entropy(&rho.eigenvalues())
}

/// Gibbs populations over a list of levels (ground level at zero).
#[derive(Debug, Clone, PartialEq)]
pub struct ThermalProfile {
    /// Inverse temperature; `f64::INFINITY` for the ground-space projector.
    pub beta: f64,
    pub populations: Vec<f64>,
    pub energy: f64,
    pub entropy: f64,
}

/// exp(−β E_l)/Z over `levels`; at β = ∞ the populations are uniform over
/// the ground space.
pub fn thermal_profile(levels: &[f64], beta: f64) -> ThermalProfile {
    let weights: Vec<f64> = if beta.is_infinite() {
        levels
            .iter()
            .map(|&e| if e <= GROUND_TOL { 1.0 } else { 0.0 })
            .collect()
    } else {
        levels.iter().map(|&e| (-beta * e).exp()).collect()
    };
    let z: f64 = weights.iter().sum();
    let populations: Vec<f64> = weights.iter().map(|w| w / z).collect();
    let energy: f64 = populations.iter().zip(levels).map(|(p, e)| p * e).sum();
    let entropy = if beta.is_infinite() {
        z.ln()
    } else {
        (beta * energy + z.ln()).max(0.0)
    };
    ThermalProfile {
        beta,
        populations,
        energy,
        entropy,
    }
}

/// Gibbs profile whose entropy equals `target`.
///
/// β is bracketed by doubling from 1 and then refined by safeguarded Newton
/// steps on S(β), using dS/dβ = −β Var(E). When the target does not exceed
/// the ground-space entropy ln g₀ the ground projector (β = ∞) is returned.
pub fn entropy_matched_profile(levels: &[f64], target: f64) -> Result<ThermalProfile> {
    let d = levels.len();
    let max = (d as f64).ln();
    if !(target >= -ENTROPY_MATCH_TOL && target <= max + ENTROPY_MATCH_TOL) || d == 0 {
        return Err(Error::TargetOutOfRange { target, max });
    }
    if target >= max - 1e-15 {
        return Ok(thermal_profile(levels, 0.0));
    }
    let ground_degeneracy = levels.iter().filter(|&&e| e <= GROUND_TOL).count();
    if target <= (ground_degeneracy as f64).ln() + 1e-15 {
        return Ok(thermal_profile(levels, f64::INFINITY));
    }
    let gap = levels
        .iter()
        .copied()
        .find(|&e| e > GROUND_TOL)
        .expect("non-degenerate Hamiltonian has a positive level");
    let beta_cap = 1e6 / gap;

    let mut lo = 0.0;
    let mut hi = 1.0;
    loop {
        let s = thermal_profile(levels, hi).entropy;
        if s < target {
            break;
        }
        lo = hi;
        hi *= 2.0;
        if hi > beta_cap {
            return Ok(thermal_profile(levels, f64::INFINITY));
        }
    }

    let mut beta = 0.5 * (lo + hi);
    let mut best = thermal_profile(levels, beta);
    for _ in 0..200 {
        let residual = best.entropy - target;
        if residual.abs() <= 1e-14 {
            break;
        }
        if residual > 0.0 {
            lo = beta;
        } else {
            hi = beta;
        }
        let variance: f64 = best
            .populations
            .iter()
            .zip(levels)
            .map(|(p, e)| p * (e - best.energy).powi(2))
            .sum();
        let slope = -beta * variance;
        let newton = if slope < 0.0 {
            beta - residual / slope
        } else {
            f64::NAN
        };
        beta = if newton.is_finite() && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if hi - lo <= f64::EPSILON * hi {
            best = thermal_profile(levels, beta);
            break;
        }
        best = thermal_profile(levels, beta);
    }
    if (best.entropy - target).abs() > ENTROPY_MATCH_TOL {
        return Err(Error::NoConvergence(format!(
            "entropy match residual {:.3e}",
            best.entropy - target
        )));
    }
    Ok(best)
}

/// Thermal state of a Hamiltonian together with its energy and entropy.
#[derive(Debug, Clone)]
pub struct GibbsState {
    pub beta: f64,
    pub state: DensityMatrix,
    pub energy: f64,
    pub entropy: f64,
}

impl GibbsState {
    fn from_profile(h: &Hamiltonian, profile: ThermalProfile) -> Self {
        let state = DensityMatrix::from_matrix_unchecked(rebuild(
            &profile.populations,
            &h.spectrum().eigenvectors,
        ));
        Self {
            beta: profile.beta,
            state,
            energy: profile.energy,
            entropy: profile.entropy,
        }
    }
}

pub fn gibbs_state(h: &Hamiltonian, beta: f64) -> GibbsState {
    GibbsState::from_profile(h, thermal_profile(h.levels(), beta))
}

/// Gibbs state of `h` with von Neumann entropy `target_entropy`.
pub fn find_beta_star(h: &Hamiltonian, target_entropy: f64) -> Result<GibbsState> {
    let profile = entropy_matched_profile(h.levels(), target_entropy)?;
    Ok(GibbsState::from_profile(h, profile))
}

/// Energy of the completely passive counterpart of a state with the given
/// populations.
pub fn completely_passive_energy(populations: &[f64], levels: &[f64]) -> Result<f64> {
    let target = shannon_entropy(populations).min((levels.len() as f64).ln());
    Ok(entropy_matched_profile(levels, target)?.energy)
}

pub fn total_ergotropy_from_spectrum(
    mean_energy: f64,
    populations: &[f64],
    levels: &[f64],
) -> Result<f64> {
    Ok((mean_energy - completely_passive_energy(populations, levels)?).max(0.0))
}

/// Mean energy minus the energy of the entropy-matched Gibbs state.
pub fn total_ergotropy(rho: &DensityMatrix, h: &Hamiltonian) -> Result<f64> {
    let energy = mean_energy(rho, h)?;
    total_ergotropy_from_spectrum(energy, &rho.eigenvalues(), h.levels())
}
