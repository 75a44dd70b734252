//! Closed-form capacitances of phase-insensitive bosonic Gaussian channels
//! and the two-mode attenuator gap.
//!
//! The two-mode channel acts as a thermal attenuator on one mode and
//! discards the other to vacuum. With coherent inputs its output is a
//! displaced copy of τ_β ⊗ |0⟩⟨0|, where β is the attenuator's effective
//! inverse temperature, so the gap between the separable and local
//! capacitances reduces to
//!
//! ```text
//! ΔC = E_pass(τ_β ⊗ |0⟩⟨0|) − E(τ_β⋆ ⊗ τ_β⋆),   𝒮(β⋆) = 𝒮(β)/2,
//! ```
//!
//! which does not depend on the input energy. All energies are in units of
//! ħω.

use serde::{Deserialize, Serialize};

use crate::ergotropy::{entropy_matched_profile, passive_energy_from_spectrum, shannon_entropy};
use crate::error::{Error, Result};

/// Thermal attenuator ℒ_{λ,N}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AttenuatorParams {
    pub lambda: f64,
    pub n_thermal: f64,
    /// Energy unit applied only when reporting.
    pub hbar_omega: f64,
}

impl AttenuatorParams {
    pub fn new(lambda: f64, n_thermal: f64) -> Result<Self> {
        let p = Self {
            lambda,
            n_thermal,
            hbar_omega: 1.0,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.lambda) {
            return Err(Error::InvalidParams(format!(
                "lambda = {} outside [0, 1)",
                self.lambda
            )));
        }
        if !(self.n_thermal >= 0.0) || !self.n_thermal.is_finite() {
            return Err(Error::InvalidParams(format!(
                "n_thermal = {} must be finite and non-negative",
                self.n_thermal
            )));
        }
        if !(self.hbar_omega > 0.0) {
            return Err(Error::InvalidParams("hbar_omega must be positive".into()));
        }
        Ok(())
    }
}

/// Series truncation settings for [`pass_energy`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesConfig {
    pub rel_tol: f64,
    pub max_terms: usize,
}

impl Default for SeriesConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-12,
            max_terms: 10_000,
        }
    }
}

const MIN_TERMS: usize = 50;
const SMALL_BETA: f64 = 0.05;

/// β_{λ,N} = ln(((1−λ)N + 1)/((1−λ)N)); `f64::INFINITY` when (1−λ)N = 0.
pub fn beta_eff(p: &AttenuatorParams) -> Result<f64> {
    p.validate()?;
    let mean = (1.0 - p.lambda) * p.n_thermal;
    if mean == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok((1.0 / mean).ln_1p())
}

fn check_beta(beta: f64) -> Result<()> {
    if !(beta > 0.0) {
        return Err(Error::InvalidParams(format!(
            "beta = {beta} must be positive"
        )));
    }
    Ok(())
}

/// Von Neumann entropy of the single-mode thermal state,
/// 𝒮(β) = −ln(1 − e^{−β}) + β e^{−β}/(1 − e^{−β}).
pub fn thermal_entropy(beta: f64) -> Result<f64> {
    check_beta(beta)?;
    if beta.is_infinite() {
        return Ok(0.0);
    }
    Ok(-(-(-beta).exp_m1()).ln() + beta / beta.exp_m1())
}

/// Mean photon number of τ_β, 1/(e^β − 1).
pub fn thermal_energy(beta: f64) -> Result<f64> {
    check_beta(beta)?;
    if beta.is_infinite() {
        return Ok(0.0);
    }
    Ok(1.0 / beta.exp_m1())
}

/// β⋆ with 𝒮(β⋆) = 𝒮(β)/2, by bracketing on [β, B] and bisection.
pub fn beta_star_bosonic(beta_eff: f64) -> Result<f64> {
    check_beta(beta_eff)?;
    if beta_eff.is_infinite() {
        return Ok(f64::INFINITY);
    }
    let target = thermal_entropy(beta_eff)? / 2.0;
    if target == 0.0 {
        return Ok(f64::INFINITY);
    }
    let mut lo = beta_eff;
    let mut hi = 2.0 * beta_eff;
    while thermal_entropy(hi)? > target {
        lo = hi;
        hi *= 2.0;
        if hi > 1e300 {
            return Err(Error::NoConvergence("beta_star bracket".into()));
        }
    }
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if thermal_entropy(mid)? > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // pick the endpoint closer in entropy
    let s_lo = (thermal_entropy(lo)? - target).abs();
    let s_hi = (thermal_entropy(hi)? - target).abs();
    Ok(if s_lo <= s_hi { lo } else { hi })
}

/// Energy of the completely passive state τ_β⋆ ⊗ τ_β⋆: 2/(e^{β⋆} − 1).
pub fn cpass_energy(beta_star: f64) -> Result<f64> {
    Ok(2.0 * thermal_energy(beta_star)?)
}

/// Energy of the passive counterpart of τ_β ⊗ |0⟩⟨0| under the two-mode
/// number Hamiltonian.
///
/// The eigenvalues e^{−k'β}(1 − e^{−β}) of the state, sorted, fill the
/// (k+1)-fold degenerate level k with the indices k' ∈ I_k =
/// {k(k+1)/2, …, k(k+1)/2 + k}. Two forms are summed: the telescoped
/// closed form Σ_k k [e^{−k(k+1)β/2} − e^{−(k(k+3)/2+1)β}] and the explicit
/// inner sum over I_k. They must agree to 1e-12.
pub fn pass_energy(beta_eff: f64, cfg: &SeriesConfig) -> Result<f64> {
    check_beta(beta_eff)?;
    if beta_eff.is_infinite() {
        return Ok(0.0);
    }
    let mut max_terms = cfg.max_terms;
    if beta_eff < SMALL_BETA {
        log::warn!("beta = {beta_eff} is small; series convergence is slow");
        max_terms = max_terms.saturating_mul(10);
    }
    let beta = beta_eff;
    let one_minus_q = -(-beta).exp_m1();

    let mut closed = 0.0;
    let mut explicit = 0.0;
    let mut converged = false;
    for k in 0..max_terms {
        let kf = k as f64;
        let first = kf * (kf + 1.0) / 2.0;
        let term_closed =
            kf * ((-first * beta).exp() - (-(kf * (kf + 3.0) / 2.0 + 1.0) * beta).exp());
        let inner: f64 = (0..=k)
            .map(|j| (-(first + j as f64) * beta).exp())
            .sum::<f64>()
            * one_minus_q;
        closed += term_closed;
        explicit += kf * inner;

        if k + 1 >= MIN_TERMS && k > 0 {
            // successive terms shrink at least by r = ((k+1)/k)·e^{−(k+1)β}
            let r = (kf + 1.0) / kf * (-(kf + 1.0) * beta).exp();
            let tail = if r < 1.0 {
                term_closed * r / (1.0 - r)
            } else {
                f64::INFINITY
            };
            let scale = cfg.rel_tol * closed.abs().max(f64::MIN_POSITIVE);
            if term_closed <= scale && tail <= scale {
                converged = true;
                break;
            }
        }
    }
    if !converged {
        return Err(Error::NoConvergence(format!(
            "pass_energy series did not converge in {max_terms} terms at beta = {beta_eff}"
        )));
    }
    if (closed - explicit).abs() > 1e-12 * closed.abs().max(1.0) {
        return Err(Error::NoConvergence(format!(
            "pass_energy forms disagree: {closed} vs {explicit}"
        )));
    }
    Ok(closed)
}

/// Components of the two-mode gap at one effective temperature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoModeGap {
    pub beta: f64,
    pub beta_star: f64,
    pub e_pass: f64,
    pub e_cpass: f64,
    pub gap: f64,
}

/// ΔC(β) = E_pass − E_c-pass; independent of the input energy.
pub fn two_mode_gap(beta_eff: f64, cfg: &SeriesConfig) -> Result<f64> {
    two_mode_gap_parts(beta_eff, cfg).map(|g| g.gap)
}

pub fn two_mode_gap_parts(beta_eff: f64, cfg: &SeriesConfig) -> Result<TwoModeGap> {
    let beta_star = beta_star_bosonic(beta_eff)?;
    let e_pass = pass_energy(beta_eff, cfg)?;
    let e_cpass = cpass_energy(beta_star)?;
    Ok(TwoModeGap {
        beta: beta_eff,
        beta_star,
        e_pass,
        e_cpass,
        gap: e_pass - e_cpass,
    })
}

/// Passive and completely passive energies of τ_β ⊗ |0⟩⟨0| computed by
/// brute force in a Fock space truncated to `cutoff` levels per mode, using
/// the generic finite-dimensional ergotropy routines.
pub fn fock_truncated_energies(beta: f64, cutoff: usize) -> Result<(f64, f64)> {
    check_beta(beta)?;
    if cutoff < 2 {
        return Err(Error::InvalidParams("cutoff must be at least 2".into()));
    }
    let mut levels = Vec::with_capacity(cutoff * cutoff);
    let mut populations = Vec::with_capacity(cutoff * cutoff);
    let weights: Vec<f64> = (0..cutoff).map(|n| (-(n as f64) * beta).exp()).collect();
    let z: f64 = weights.iter().sum();
    for (n1, w) in weights.iter().enumerate() {
        for n2 in 0..cutoff {
            levels.push((n1 + n2) as f64);
            populations.push(if n2 == 0 { w / z } else { 0.0 });
        }
    }
    let mut order: Vec<usize> = (0..levels.len()).collect();
    order.sort_by(|&a, &b| levels[a].total_cmp(&levels[b]));
    let levels: Vec<f64> = order.iter().map(|&i| levels[i]).collect();
    let populations: Vec<f64> = order.iter().map(|&i| populations[i]).collect();

    let e_pass = passive_energy_from_spectrum(&populations, &levels);
    let profile = entropy_matched_profile(&levels, shannon_entropy(&populations))?;
    Ok((e_pass, profile.energy))
}

/// Single-mode phase-insensitive Gaussian channels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SingleModeChannel {
    Attenuator { lambda: f64, n_thermal: f64 },
    Amplifier { mu: f64, n_thermal: f64 },
    AdditiveNoise { n_thermal: f64 },
}

/// Capacitance of a single-mode channel at input energy `e`: λ𝔢, μ𝔢 or 𝔢.
/// Separable and local capacitances coincide for these channels.
pub fn single_mode_capacitance(channel: SingleModeChannel, e: f64) -> Result<f64> {
    if !(e >= 0.0) || !e.is_finite() {
        return Err(Error::InvalidParams(format!(
            "energy {e} must be non-negative"
        )));
    }
    let check_n = |n: f64| {
        if n >= 0.0 && n.is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidParams(format!(
                "n_thermal = {n} must be non-negative"
            )))
        }
    };
    match channel {
        SingleModeChannel::Attenuator { lambda, n_thermal } => {
            check_n(n_thermal)?;
            if !(0.0..1.0).contains(&lambda) {
                return Err(Error::InvalidParams(format!(
                    "lambda = {lambda} outside [0, 1)"
                )));
            }
            Ok(lambda * e)
        }
        SingleModeChannel::Amplifier { mu, n_thermal } => {
            check_n(n_thermal)?;
            if !(mu >= 1.0) || !mu.is_finite() {
                return Err(Error::InvalidParams(format!("mu = {mu} below 1")));
            }
            Ok(mu * e)
        }
        SingleModeChannel::AdditiveNoise { n_thermal } => {
            check_n(n_thermal)?;
            Ok(e)
        }
    }
}
