//! Dense linear algebra for small Hermitian operators, density matrices and
//! Kraus channels.

mod eig;
mod matrix;
pub mod random;

pub use eig::Spectrum;
pub use matrix::Matrix;
pub use num_complex::Complex64;

pub(crate) use eig::{decompose, eigenvalues, rebuild};

use crate::error::{Error, Result};

/// Largest Hilbert-space dimension accepted by the tensor constructions.
pub const DEFAULT_DIM_CAP: usize = 64;

const HERMITIAN_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-10;
const PSD_TOL: f64 = 1e-10;
const TP_TOL: f64 = 1e-10;

/// A square matrix equal to its conjugate transpose.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix(Matrix);

impl HermitianMatrix {
    /// Validates Hermiticity to `1e-12` (relative to the largest entry when
    /// that exceeds one) and removes the residual asymmetry.
    pub fn new(mut m: Matrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch {
                expected: m.rows(),
                got: m.cols(),
            });
        }
        let scale = m.as_slice().iter().map(|z| z.norm()).fold(1.0, f64::max);
        let defect = m.hermiticity_defect();
        if defect > HERMITIAN_TOL * scale {
            return Err(Error::NonHermitian(defect));
        }
        m.symmetrize();
        Ok(Self(m))
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        Self(Matrix::from_real_diagonal(diag))
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix {
        self.0
    }
}

/// Spectral decomposition with ascending eigenvalues.
pub fn eig_hermitian(m: &HermitianMatrix) -> Spectrum {
    decompose(m.matrix())
}

/// Checked variant for raw matrices.
pub fn eig_hermitian_checked(m: &Matrix) -> Result<Spectrum> {
    HermitianMatrix::new(m.clone()).map(|h| eig_hermitian(&h))
}

/// Unit-trace positive semidefinite operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    op: HermitianMatrix,
}

impl DensityMatrix {
    /// Validates trace and positivity. Eigenvalues in `[-1e-10, 0)` are clipped
    /// to zero and the state renormalized; anything more negative is rejected.
    pub fn new(m: Matrix) -> Result<Self> {
        let op = HermitianMatrix::new(m)?;
        let trace = op.matrix().trace().re;
        if (trace - 1.0).abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace {trace} differs from 1")));
        }
        let spec = eig_hermitian(&op);
        let min = spec.eigenvalues.first().copied().unwrap_or(0.0);
        if min < -PSD_TOL {
            return Err(Error::InvalidState(format!(
                "negative eigenvalue {min:.3e}"
            )));
        }
        if min < 0.0 {
            let clipped: Vec<f64> = spec.eigenvalues.iter().map(|&l| l.max(0.0)).collect();
            let total: f64 = clipped.iter().sum();
            let values: Vec<f64> = clipped.iter().map(|l| l / total).collect();
            let mut rebuilt = rebuild(&values, &spec.eigenvectors);
            rebuilt.symmetrize();
            return Ok(Self {
                op: HermitianMatrix(rebuilt),
            });
        }
        Ok(Self { op })
    }

    /// Skips validation. Used on hot paths whose outputs are valid by
    /// construction (channel outputs, convex mixtures).
    pub(crate) fn from_matrix_unchecked(mut m: Matrix) -> Self {
        m.symmetrize();
        Self {
            op: HermitianMatrix(m),
        }
    }

    pub fn from_diagonal(probs: &[f64]) -> Result<Self> {
        Self::new(Matrix::from_real_diagonal(probs))
    }

    /// |ψ⟩⟨ψ| for a (not necessarily normalized) vector.
    pub fn pure(psi: &[Complex64]) -> Result<Self> {
        let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::InvalidState("zero state vector".into()));
        }
        let unit: Vec<Complex64> = psi.iter().map(|z| z / norm).collect();
        Ok(Self::from_matrix_unchecked(Matrix::outer(&unit, &unit)))
    }

    /// |k⟩⟨k| in dimension `dim`.
    pub fn basis(dim: usize, k: usize) -> Self {
        let mut probs = vec![0.0; dim];
        probs[k] = 1.0;
        Self::from_matrix_unchecked(Matrix::from_real_diagonal(&probs))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self::from_matrix_unchecked(Matrix::identity(dim).scale_real(1.0 / dim as f64))
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn matrix(&self) -> &Matrix {
        self.op.matrix()
    }

    pub fn hermitian(&self) -> &HermitianMatrix {
        &self.op
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        eigenvalues(self.matrix())
    }

    pub fn spectrum(&self) -> Spectrum {
        eig_hermitian(&self.op)
    }

    pub fn kron(&self, other: &DensityMatrix) -> DensityMatrix {
        Self::from_matrix_unchecked(self.matrix().kron(other.matrix()))
    }

    /// U ρ U†
    pub fn conjugate_by(&self, u: &Matrix) -> DensityMatrix {
        Self::from_matrix_unchecked(u.matmul(self.matrix()).matmul_adjoint(u))
    }
}

/// Battery Hamiltonian with the ground energy shifted to zero.
#[derive(Debug, Clone, PartialEq)]
pub struct Hamiltonian {
    op: HermitianMatrix,
    spectrum: Spectrum,
    e_max: f64,
}

impl Hamiltonian {
    /// Shifts `op` so that its smallest eigenvalue is exactly zero.
    pub fn new(op: HermitianMatrix) -> Self {
        let spec = eig_hermitian(&op);
        let ground = spec.eigenvalues[0];
        let n = op.dim();
        let shifted = op.matrix() - &Matrix::identity(n).scale_real(ground);
        let levels: Vec<f64> = spec.eigenvalues.iter().map(|&e| e - ground).collect();
        let mut levels = levels;
        levels[0] = 0.0;
        let e_max = *levels.last().expect("non-empty");
        Self {
            op: HermitianMatrix(shifted),
            spectrum: Spectrum {
                eigenvalues: levels,
                eigenvectors: spec.eigenvectors,
            },
            e_max,
        }
    }

    /// Diagonal Hamiltonian in the computational basis.
    pub fn from_levels(levels: &[f64]) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::InvalidParams("empty Hamiltonian".into()));
        }
        if levels.iter().any(|e| !e.is_finite()) {
            return Err(Error::InvalidParams("non-finite energy level".into()));
        }
        Ok(Self::new(HermitianMatrix::from_real_diagonal(levels)))
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn matrix(&self) -> &Matrix {
        self.op.matrix()
    }

    pub fn hermitian(&self) -> &HermitianMatrix {
        &self.op
    }

    /// Energy levels, ascending, starting at zero.
    pub fn levels(&self) -> &[f64] {
        &self.spectrum.eigenvalues
    }

    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    /// Largest energy level.
    pub fn e_max(&self) -> f64 {
        self.e_max
    }

    /// Smallest strictly positive level spacing above the ground energy.
    pub fn smallest_gap(&self) -> Option<f64> {
        self.levels().iter().copied().find(|&e| e > 1e-12)
    }

    /// Eigenstate of the lowest level.
    pub fn ground_state(&self) -> DensityMatrix {
        self.eigenstate(0)
    }

    pub fn eigenstate(&self, k: usize) -> DensityMatrix {
        let v = self.spectrum.eigenvectors.column(k);
        DensityMatrix::from_matrix_unchecked(Matrix::outer(&v, &v))
    }
}

/// Completely positive trace-preserving map stored as Kraus operators.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel {
    dim_in: usize,
    dim_out: usize,
    kraus: Vec<Matrix>,
}

impl KrausChannel {
    pub fn new(kraus: Vec<Matrix>) -> Result<Self> {
        let first = kraus
            .first()
            .ok_or_else(|| Error::InvalidParams("empty Kraus list".into()))?;
        let (dim_out, dim_in) = (first.rows(), first.cols());
        for k in &kraus {
            if k.rows() != dim_out || k.cols() != dim_in {
                return Err(Error::DimensionMismatch {
                    expected: dim_out * dim_in,
                    got: k.rows() * k.cols(),
                });
            }
        }
        let residual = tp_residual(&kraus, dim_in);
        if residual > TP_TOL {
            return Err(Error::NotTracePreserving(residual));
        }
        Ok(Self {
            dim_in,
            dim_out,
            kraus,
        })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            dim_in: dim,
            dim_out: dim,
            kraus: vec![Matrix::identity(dim)],
        }
    }

    /// Builds a Kraus representation of a linear map given by its action on
    /// matrix units, via the spectral decomposition of the Choi matrix
    /// `J = Σ_ij |i⟩⟨j| ⊗ Φ(|i⟩⟨j|)`.
    pub fn from_linear_map(
        dim_in: usize,
        dim_out: usize,
        map: impl Fn(&Matrix) -> Matrix,
    ) -> Result<Self> {
        let n = dim_in * dim_out;
        let mut choi = Matrix::zeros(n, n);
        for i in 0..dim_in {
            for j in 0..dim_in {
                let mut unit = Matrix::zeros(dim_in, dim_in);
                unit[(i, j)] = Complex64::new(1.0, 0.0);
                let image = map(&unit);
                for a in 0..dim_out {
                    for b in 0..dim_out {
                        choi[(i * dim_out + a, j * dim_out + b)] = image[(a, b)];
                    }
                }
            }
        }
        let choi = HermitianMatrix::new(choi)?;
        let spec = eig_hermitian(&choi);
        let min = spec.eigenvalues[0];
        if min < -PSD_TOL {
            return Err(Error::NotCompletelyPositive(min));
        }
        let mut kraus = Vec::new();
        for (k, &lam) in spec.eigenvalues.iter().enumerate().rev() {
            if lam <= 1e-12 {
                continue;
            }
            let amp = lam.sqrt();
            kraus.push(Matrix::from_fn(dim_out, dim_in, |a, i| {
                spec.eigenvectors[(i * dim_out + a, k)] * amp
            }));
        }
        Self::new(kraus)
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn kraus_ops(&self) -> &[Matrix] {
        &self.kraus
    }

    /// ‖Σ K†K − I‖_F
    pub fn trace_preservation_residual(&self) -> f64 {
        tp_residual(&self.kraus, self.dim_in)
    }

    /// Σ_k K ρ K† on a raw matrix.
    pub fn apply_matrix(&self, rho: &Matrix) -> Matrix {
        let mut out = Matrix::zeros(self.dim_out, self.dim_out);
        for k in &self.kraus {
            let term = k.matmul(rho).matmul_adjoint(k);
            out = &out + &term;
        }
        out
    }

    /// Same channel expressed in rotated bases: K ↦ U_out† K U_in.
    pub(crate) fn rotated(&self, u_in: &Matrix, u_out: &Matrix) -> Self {
        let u_out_dag = u_out.adjoint();
        Self {
            dim_in: self.dim_in,
            dim_out: self.dim_out,
            kraus: self
                .kraus
                .iter()
                .map(|k| u_out_dag.matmul(k).matmul(u_in))
                .collect(),
        }
    }
}

fn tp_residual(kraus: &[Matrix], dim_in: usize) -> f64 {
    let mut sum = Matrix::zeros(dim_in, dim_in);
    for k in kraus {
        sum = &sum + &k.adjoint().matmul(k);
    }
    (&sum - &Matrix::identity(dim_in)).frobenius_norm()
}

/// Λ(ρ) = Σ_k K_k ρ K_k†
pub fn apply_channel(ch: &KrausChannel, rho: &DensityMatrix) -> Result<DensityMatrix> {
    if rho.dim() != ch.dim_in {
        return Err(Error::DimensionMismatch {
            expected: ch.dim_in,
            got: rho.dim(),
        });
    }
    Ok(DensityMatrix::from_matrix_unchecked(
        ch.apply_matrix(rho.matrix()),
    ))
}

fn checked_power(dim: usize, n: usize, cap: usize) -> Result<usize> {
    let mut total: usize = 1;
    for _ in 0..n {
        total = total.saturating_mul(dim);
        if total > cap {
            return Err(Error::DimensionCap { dim: total, cap });
        }
    }
    Ok(total)
}

/// Λ^{⊗n}, with all products of Kraus operators.
pub fn tensor_power(ch: &KrausChannel, n: usize, cap: usize) -> Result<KrausChannel> {
    if n == 0 {
        return Err(Error::InvalidParams("tensor power must be positive".into()));
    }
    checked_power(ch.dim_in.max(ch.dim_out), n, cap)?;
    let mut kraus = ch.kraus.clone();
    for _ in 1..n {
        kraus = kraus
            .iter()
            .flat_map(|a| ch.kraus.iter().map(move |b| a.kron(b)))
            .collect();
    }
    Ok(KrausChannel {
        dim_in: ch.dim_in.pow(n as u32),
        dim_out: ch.dim_out.pow(n as u32),
        kraus,
    })
}

/// H⁽ⁿ⁾ = h ⊗ I ⊗ … + … + I ⊗ … ⊗ h
pub fn tensor_hamiltonian(h: &Hamiltonian, n: usize, cap: usize) -> Result<Hamiltonian> {
    if n == 0 {
        return Err(Error::InvalidParams("tensor power must be positive".into()));
    }
    let d = h.dim();
    let total = checked_power(d, n, cap)?;
    let mut sum = Matrix::zeros(total, total);
    for site in 0..n {
        let mut term = Matrix::identity(1);
        for k in 0..n {
            let factor = if k == site {
                h.matrix().clone()
            } else {
                Matrix::identity(d)
            };
            term = term.kron(&factor);
        }
        sum = &sum + &term;
    }
    Ok(Hamiltonian::new(HermitianMatrix::new(sum)?))
}

/// Reduced state of subsystem `site` of an `n`-fold product space of
/// local dimension `dim`.
pub fn partial_trace_keep(
    rho: &DensityMatrix,
    dim: usize,
    n: usize,
    site: usize,
) -> Result<DensityMatrix> {
    let total = checked_power(dim, n, usize::MAX)?;
    if rho.dim() != total || site >= n {
        return Err(Error::DimensionMismatch {
            expected: total,
            got: rho.dim(),
        });
    }
    let stride = dim.pow((n - 1 - site) as u32);
    let m = rho.matrix();
    let mut out = Matrix::zeros(dim, dim);
    for i in 0..total {
        let a = (i / stride) % dim;
        let rest_i = i - a * stride;
        for b in 0..dim {
            let j = rest_i + b * stride;
            out[(a, b)] += m[(i, j)];
        }
    }
    Ok(DensityMatrix::from_matrix_unchecked(out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_hermitian(vals: &[f64], d: usize) -> Matrix {
        let mut m = Matrix::from_fn(d, d, |i, j| {
            c(
                vals[(i * d + j) % vals.len()],
                vals[(j * d + i + 7) % vals.len()],
            )
        });
        m.symmetrize();
        m
    }

    fn random_density(vals: &[f64], d: usize) -> DensityMatrix {
        let a = Matrix::from_fn(d, d, |i, j| {
            c(
                vals[(i * d + j) % vals.len()],
                vals[(i + 3 * j + 1) % vals.len()],
            )
        });
        let mut rho = a.matmul_adjoint(&a);
        let tr = rho.trace().re;
        rho = rho.scale_real(1.0 / tr);
        DensityMatrix::new(rho).unwrap()
    }

    #[test]
    fn eig_of_diagonal_sorts_and_permutes_basis() {
        let h = HermitianMatrix::from_real_diagonal(&[2.0, 0.0, 1.0]);
        let s = eig_hermitian(&h);
        assert_eq!(s.eigenvalues, vec![0.0, 1.0, 2.0]);
        assert!((s.eigenvectors[(1, 0)].norm() - 1.0).abs() < 1e-15);
        assert!((s.eigenvectors[(2, 1)].norm() - 1.0).abs() < 1e-15);
        assert!((s.eigenvectors[(0, 2)].norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn eig_of_identity_is_degenerate() {
        let s = eig_hermitian(&HermitianMatrix::new(Matrix::identity(3)).unwrap());
        assert_eq!(s.eigenvalues, vec![1.0; 3]);
        let gram = s.eigenvectors.adjoint().matmul(&s.eigenvectors);
        assert!(gram.max_abs_diff(&Matrix::identity(3)) < 1e-14);
    }

    #[test]
    fn non_hermitian_rejected() {
        let m = Matrix::from_rows(&[
            vec![c(1.0, 0.0), c(1.0, 0.0)],
            vec![c(0.0, 0.0), c(1.0, 0.0)],
        ]);
        assert!(matches!(
            HermitianMatrix::new(m),
            Err(Error::NonHermitian(_))
        ));
    }

    #[test]
    fn density_clips_tiny_negative_eigenvalues() {
        let rho = DensityMatrix::from_diagonal(&[1.0 + 5e-11, -5e-11, 0.0]).unwrap();
        assert!(rho.eigenvalues().iter().all(|&l| l >= 0.0));
        assert!((rho.matrix().trace().re - 1.0).abs() < 1e-14);
    }

    #[test]
    fn density_rejects_negative_and_bad_trace() {
        assert!(DensityMatrix::from_diagonal(&[1.1, -0.1]).is_err());
        assert!(DensityMatrix::from_diagonal(&[0.5, 0.4]).is_err());
    }

    #[test]
    fn hamiltonian_ground_shifted_to_zero() {
        let h = Hamiltonian::from_levels(&[3.0, 1.5, 2.0]).unwrap();
        assert_eq!(h.levels()[0], 0.0);
        assert!((h.e_max() - 1.5).abs() < 1e-15);
        assert!((h.matrix()[(1, 1)].re).abs() < 1e-15);
    }

    #[test]
    fn identity_channel_is_noop() {
        let rho = random_density(&[0.3, -0.2, 0.9, 0.1, 0.5, -0.7], 3);
        let out = apply_channel(&KrausChannel::identity(3), &rho).unwrap();
        assert!(out.matrix().max_abs_diff(rho.matrix()) < 1e-15);
    }

    #[test]
    fn apply_channel_dimension_mismatch() {
        let rho = DensityMatrix::maximally_mixed(2);
        assert!(matches!(
            apply_channel(&KrausChannel::identity(3), &rho),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn non_trace_preserving_rejected() {
        let k = Matrix::identity(2).scale_real(0.9);
        assert!(matches!(
            KrausChannel::new(vec![k]),
            Err(Error::NotTracePreserving(_))
        ));
    }

    #[test]
    fn tensor_power_one_is_same_channel() {
        let ch = KrausChannel::identity(3);
        assert_eq!(tensor_power(&ch, 1, DEFAULT_DIM_CAP).unwrap(), ch);
    }

    #[test]
    fn tensor_power_of_identity() {
        let ch = tensor_power(&KrausChannel::identity(3), 2, DEFAULT_DIM_CAP).unwrap();
        assert_eq!(ch.dim_in(), 9);
        assert!(ch.kraus_ops()[0].max_abs_diff(&Matrix::identity(9)) < 1e-15);
    }

    #[test]
    fn tensor_power_respects_cap() {
        assert!(matches!(
            tensor_power(&KrausChannel::identity(3), 4, DEFAULT_DIM_CAP),
            Err(Error::DimensionCap { dim: 81, cap: 64 })
        ));
    }

    fn sorted_levels(h: &Hamiltonian) -> Vec<f64> {
        h.levels().iter().map(|e| (e * 1e9).round() / 1e9).collect()
    }

    #[test]
    fn tensor_hamiltonian_spectra() {
        let h = Hamiltonian::from_levels(&[0.0, 1.0, 2.0]).unwrap();
        assert_eq!(
            sorted_levels(&tensor_hamiltonian(&h, 1, 64).unwrap()),
            vec![0.0, 1.0, 2.0]
        );
        assert_eq!(
            sorted_levels(&tensor_hamiltonian(&h, 2, 64).unwrap()),
            vec![0.0, 1.0, 1.0, 2.0, 2.0, 2.0, 3.0, 3.0, 4.0]
        );
        let q = Hamiltonian::from_levels(&[0.0, 1.0]).unwrap();
        assert_eq!(
            sorted_levels(&tensor_hamiltonian(&q, 3, 64).unwrap()),
            vec![0.0, 1.0, 1.0, 1.0, 2.0, 2.0, 2.0, 3.0]
        );
    }

    #[test]
    fn partial_trace_of_product() {
        let a = DensityMatrix::from_diagonal(&[0.2, 0.3, 0.5]).unwrap();
        let b = DensityMatrix::maximally_mixed(3);
        let ab = a.kron(&b);
        let ra = partial_trace_keep(&ab, 3, 2, 0).unwrap();
        let rb = partial_trace_keep(&ab, 3, 2, 1).unwrap();
        assert!(ra.matrix().max_abs_diff(a.matrix()) < 1e-15);
        assert!(rb.matrix().max_abs_diff(b.matrix()) < 1e-15);
    }

    proptest! {
        #[test]
        fn eig_reconstructs_random_hermitian(vals in prop::collection::vec(-2.0f64..2.0, 16..40), d in 2usize..7) {
            let m = random_hermitian(&vals, d);
            let s = eig_hermitian(&HermitianMatrix::new(m.clone()).unwrap());
            prop_assert!((&s.reconstruct() - &m).frobenius_norm() < 1e-10);
            let gram = s.eigenvectors.adjoint().matmul(&s.eigenvectors);
            prop_assert!(gram.max_abs_diff(&Matrix::identity(d)) < 1e-10);
            prop_assert!(s.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
        }

        #[test]
        fn apply_channel_preserves_trace_and_hermiticity(vals in prop::collection::vec(-1.0f64..1.0, 20..40)) {
            let rho = random_density(&vals, 3);
            let ch = KrausChannel::from_linear_map(3, 3, |m| {
                // dephasing mixed with a level swap 0↔2
                let mut out = Matrix::zeros(3, 3);
                for i in 0..3 { out[(i, i)] = m[(i, i)] * 0.7; }
                out[(0, 0)] += m[(2, 2)] * 0.3;
                out[(2, 2)] += m[(0, 0)] * 0.3;
                out[(1, 1)] += m[(1, 1)] * 0.3;
                out[(0, 1)] = m[(0, 1)] * 0.5; out[(1, 0)] = m[(1, 0)] * 0.5;
                out
            }).unwrap();
            prop_assert!(ch.trace_preservation_residual() < 1e-10);
            let out = apply_channel(&ch, &rho).unwrap();
            prop_assert!((out.matrix().trace().re - 1.0).abs() < 1e-10);
            let raw = ch.apply_matrix(rho.matrix());
            prop_assert!(raw.hermiticity_defect() < 1e-14);
        }

        #[test]
        fn tensor_power_factorizes_on_products(
            a in prop::collection::vec(-1.0f64..1.0, 18),
            b in prop::collection::vec(-1.0f64..1.0, 18),
            n in 2usize..4,
        ) {
            let ch = KrausChannel::from_linear_map(3, 3, |m| {
                let mut out = Matrix::zeros(3, 3);
                out[(0, 0)] = m[(0, 0)] + m[(1, 1)] * 0.4 + m[(2, 2)] * 0.1;
                out[(1, 1)] = m[(1, 1)] * 0.6 + m[(2, 2)] * 0.5;
                out[(2, 2)] = m[(2, 2)] * 0.4;
                out[(0, 1)] = m[(0, 1)] * 0.6f64.sqrt(); out[(1, 0)] = m[(1, 0)] * 0.6f64.sqrt();
                out[(0, 2)] = m[(0, 2)] * 0.4f64.sqrt(); out[(2, 0)] = m[(2, 0)] * 0.4f64.sqrt();
                out[(1, 2)] = m[(1, 2)] * 0.24f64.sqrt(); out[(2, 1)] = m[(2, 1)] * 0.24f64.sqrt();
                out
            }).unwrap();
            let states = [random_density(&a, 3), random_density(&b, 3), random_density(&a[3..], 3)];
            let mut joint = states[0].clone();
            let mut factorwise = apply_channel(&ch, &states[0]).unwrap();
            for s in states.iter().take(n).skip(1) {
                joint = joint.kron(s);
                factorwise = factorwise.kron(&apply_channel(&ch, s).unwrap());
            }
            let power = tensor_power(&ch, n, DEFAULT_DIM_CAP).unwrap();
            let out = apply_channel(&power, &joint).unwrap();
            prop_assert!(out.matrix().max_abs_diff(factorwise.matrix()) < 1e-10);
        }
    }
}
