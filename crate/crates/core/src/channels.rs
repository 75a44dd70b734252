//! Named noise channels as Kraus maps.
//!
//! MAD and ReMAD are defined by their action on the qutrit density matrix;
//! their Kraus operators come from the Choi matrix, which also rejects
//! parameter choices that are not completely positive.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qops::{Complex64, KrausChannel, Matrix};

/// Damping rates of the qutrit amplitude-damping family:
/// `gamma1` for 1→0, `gamma2` for 2→1, `gamma3` for 2→0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MadParams {
    pub gamma1: f64,
    pub gamma2: f64,
    pub gamma3: f64,
}

impl MadParams {
    pub fn new(gamma1: f64, gamma2: f64, gamma3: f64) -> Result<Self> {
        let p = Self {
            gamma1,
            gamma2,
            gamma3,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, g) in [
            ("gamma1", self.gamma1),
            ("gamma2", self.gamma2),
            ("gamma3", self.gamma3),
        ] {
            if !(0.0..=1.0).contains(&g) {
                return Err(Error::InvalidParams(format!("{name} = {g} outside [0, 1]")));
            }
        }
        let sum = self.gamma2 + self.gamma3;
        if sum > 1.0 + 1e-15 {
            return Err(Error::InvalidParams(format!(
                "gamma2 + gamma3 = {sum} exceeds 1"
            )));
        }
        Ok(())
    }
}

fn mad_action(p: &MadParams, resonant: bool, rho: &Matrix) -> Matrix {
    let keep2 = (1.0 - p.gamma2 - p.gamma3).max(0.0);
    let c01 = (1.0 - p.gamma1).sqrt();
    let c02 = keep2.sqrt();
    let c12 = ((1.0 - p.gamma1) * keep2).sqrt();
    let mix = (p.gamma1 * p.gamma2).sqrt();
    let r = |i, j| rho[(i, j)];

    let mut out = Matrix::zeros(3, 3);
    out[(0, 0)] = r(0, 0) + r(1, 1) * p.gamma1 + r(2, 2) * p.gamma3;
    out[(1, 1)] = r(1, 1) * (1.0 - p.gamma1) + r(2, 2) * p.gamma2;
    out[(2, 2)] = r(2, 2) * keep2;
    out[(0, 1)] = r(0, 1) * c01;
    out[(1, 0)] = r(1, 0) * c01;
    if resonant {
        out[(0, 1)] += r(1, 2) * mix;
        out[(1, 0)] += r(2, 1) * mix;
    }
    out[(0, 2)] = r(0, 2) * c02;
    out[(2, 0)] = r(2, 0) * c02;
    out[(1, 2)] = r(1, 2) * c12;
    out[(2, 1)] = r(2, 1) * c12;
    out
}

/// Multilevel amplitude damping on a qutrit.
pub fn make_mad(p: MadParams) -> Result<KrausChannel> {
    p.validate()?;
    KrausChannel::from_linear_map(3, 3, |m| mad_action(&p, false, m))
}

/// Resonant multilevel amplitude damping: as MAD, plus the ρ₁₂ → ρ₀₁
/// coherence transfer with amplitude √(γ₁γ₂).
pub fn make_remad(p: MadParams) -> Result<KrausChannel> {
    p.validate()?;
    KrausChannel::from_linear_map(3, 3, |m| mad_action(&p, true, m))
}

/// ρ ↦ (1−p)ρ + p·I/d
pub fn make_depolarizing(dim: usize, p: f64) -> Result<KrausChannel> {
    if dim < 2 {
        return Err(Error::InvalidParams(format!(
            "depolarizing dim = {dim} below 2"
        )));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParams(format!(
            "depolarizing p = {p} outside [0, 1]"
        )));
    }
    let mut kraus = Vec::with_capacity(dim * dim + 1);
    if p < 1.0 {
        kraus.push(Matrix::identity(dim).scale_real((1.0 - p).sqrt()));
    }
    if p > 0.0 {
        let amp = (p / dim as f64).sqrt();
        for i in 0..dim {
            for j in 0..dim {
                let mut k = Matrix::zeros(dim, dim);
                k[(i, j)] = Complex64::new(amp, 0.0);
                kraus.push(k);
            }
        }
    }
    KrausChannel::new(kraus)
}

/// Two-Kraus qubit amplitude damping.
pub fn make_qubit_ad(gamma: f64) -> Result<KrausChannel> {
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::InvalidParams(format!(
            "gamma = {gamma} outside [0, 1]"
        )));
    }
    let mut k0 = Matrix::identity(2);
    k0[(1, 1)] = Complex64::new((1.0 - gamma).sqrt(), 0.0);
    let mut k1 = Matrix::zeros(2, 2);
    k1[(0, 1)] = Complex64::new(gamma.sqrt(), 0.0);
    KrausChannel::new(vec![k0, k1])
}

/// A complex matrix entry serialized as `[re, im]`.
pub type ComplexPair = [f64; 2];

/// Declarative channel description, the JSON form used by the CLI.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ChannelSpec {
    Identity {
        dim: usize,
    },
    Depolarizing {
        dim: usize,
        p: f64,
    },
    QubitAmplitudeDamping {
        gamma: f64,
    },
    Mad {
        gamma1: f64,
        gamma2: f64,
        gamma3: f64,
    },
    Remad {
        gamma1: f64,
        gamma2: f64,
        gamma3: f64,
    },
    CustomKraus {
        /// Kraus operators, each a row-major list of `[re, im]` entries.
        kraus: Vec<Vec<Vec<ComplexPair>>>,
    },
}

impl ChannelSpec {
    pub fn build(&self) -> Result<KrausChannel> {
        match *self {
            ChannelSpec::Identity { dim } => {
                if dim == 0 {
                    return Err(Error::InvalidParams("identity dim must be positive".into()));
                }
                Ok(KrausChannel::identity(dim))
            }
            ChannelSpec::Depolarizing { dim, p } => make_depolarizing(dim, p),
            ChannelSpec::QubitAmplitudeDamping { gamma } => make_qubit_ad(gamma),
            ChannelSpec::Mad {
                gamma1,
                gamma2,
                gamma3,
            } => make_mad(MadParams::new(gamma1, gamma2, gamma3)?),
            ChannelSpec::Remad {
                gamma1,
                gamma2,
                gamma3,
            } => make_remad(MadParams::new(gamma1, gamma2, gamma3)?),
            ChannelSpec::CustomKraus { ref kraus } => {
                let ops = kraus
                    .iter()
                    .enumerate()
                    .map(|(k, rows)| {
                        let cols = rows.first().map_or(0, Vec::len);
                        if rows.is_empty() || rows.iter().any(|r| r.len() != cols) {
                            return Err(Error::InvalidParams(format!(
                                "kraus[{k}] is empty or ragged"
                            )));
                        }
                        let rows: Vec<Vec<Complex64>> = rows
                            .iter()
                            .map(|r| r.iter().map(|&[re, im]| Complex64::new(re, im)).collect())
                            .collect();
                        Ok(Matrix::from_rows(&rows))
                    })
                    .collect::<Result<Vec<_>>>()?;
                KrausChannel::new(ops)
            }
        }
    }

    /// Input dimension implied by the description.
    pub fn dim(&self) -> usize {
        match self {
            ChannelSpec::Identity { dim } | ChannelSpec::Depolarizing { dim, .. } => *dim,
            ChannelSpec::QubitAmplitudeDamping { .. } => 2,
            ChannelSpec::Mad { .. } | ChannelSpec::Remad { .. } => 3,
            ChannelSpec::CustomKraus { kraus } => {
                kraus.first().and_then(|k| k.first()).map_or(0, Vec::len)
            }
        }
    }

    /// Short human-readable label, e.g. `mad(0.3,0.2,0.6)`.
    pub fn label(&self) -> String {
        match self {
            ChannelSpec::Identity { dim } => format!("identity(dim={dim})"),
            ChannelSpec::Depolarizing { dim, p } => format!("depolarizing(dim={dim},p={p})"),
            ChannelSpec::QubitAmplitudeDamping { gamma } => format!("qubit_ad(gamma={gamma})"),
            ChannelSpec::Mad {
                gamma1,
                gamma2,
                gamma3,
            } => format!("mad({gamma1},{gamma2},{gamma3})"),
            ChannelSpec::Remad {
                gamma1,
                gamma2,
                gamma3,
            } => format!("remad({gamma1},{gamma2},{gamma3})"),
            ChannelSpec::CustomKraus { kraus } => format!("custom_kraus(n={})", kraus.len()),
        }
    }
}
