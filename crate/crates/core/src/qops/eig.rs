//! Cyclic Jacobi eigensolver for small dense Hermitian matrices.
//!
//! Each rotation first absorbs the phase of the pivot `a_pq`, then applies a
//! real Jacobi rotation, so the working matrix stays Hermitian throughout.
//! Sweeps stop once the off-diagonal Frobenius mass drops below
//! `1e-14 · max(1, ‖A‖_F)`.

use num_complex::Complex64;

use super::matrix::Matrix;

const OFF_DIAGONAL_TOL: f64 = 1e-14;
const MAX_SWEEPS: usize = 100;

/// Eigenvalues (ascending) and the matching orthonormal eigenvectors.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    /// Column `k` is the eigenvector of `eigenvalues[k]`.
    pub eigenvectors: Matrix,
}

impl Spectrum {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Σ λ_k |v_k⟩⟨v_k|
    pub fn reconstruct(&self) -> Matrix {
        rebuild(&self.eigenvalues, &self.eigenvectors)
    }
}

/// V diag(values) V†
pub(crate) fn rebuild(values: &[f64], vectors: &Matrix) -> Matrix {
    let n = vectors.rows();
    let mut out = Matrix::zeros(n, n);
    for (k, &lam) in values.iter().enumerate() {
        if lam == 0.0 {
            continue;
        }
        for i in 0..n {
            let vi = vectors[(i, k)] * lam;
            for j in 0..n {
                out[(i, j)] += vi * vectors[(j, k)].conj();
            }
        }
    }
    out
}

fn off_diagonal_norm(a: &Matrix) -> f64 {
    let n = a.rows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += a[(i, j)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// Diagonalizes a Hermitian matrix. The caller guarantees Hermiticity; only
/// the upper triangle and the real part of the diagonal are trusted.
pub(crate) fn jacobi(m: &Matrix, want_vectors: bool) -> (Vec<f64>, Option<Matrix>) {
    let n = m.rows();
    let mut a = m.clone();
    a.symmetrize();
    let mut v = want_vectors.then(|| Matrix::identity(n));
    let tol = OFF_DIAGONAL_TOL * a.frobenius_norm().max(1.0);

    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&a) < tol {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag == 0.0 {
                    continue;
                }
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let phase = apq / mag;
                let tau = (aqq - app) / (2.0 * mag);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // J_pq = s·e^{iφ}, J_qp = −s·e^{−iφ}
                let jpq = phase * s;
                let jqp = -phase.conj() * s;

                // A ← A J
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * c + akq * jqp;
                    a[(k, q)] = akp * jpq + akq * c;
                }
                // A ← J† A
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = apk * c + aqk * jqp.conj();
                    a[(q, k)] = apk * jpq.conj() + aqk * c;
                }
                a[(p, q)] = Complex64::new(0.0, 0.0);
                a[(q, p)] = Complex64::new(0.0, 0.0);
                a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);

                if let Some(v) = v.as_mut() {
                    for k in 0..n {
                        let vkp = v[(k, p)];
                        let vkq = v[(k, q)];
                        v[(k, p)] = vkp * c + vkq * jqp;
                        v[(k, q)] = vkp * jpq + vkq * c;
                    }
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag = a.real_diagonal();
    order.sort_by(|&i, &j| diag[i].total_cmp(&diag[j]));
    let values = order.iter().map(|&i| diag[i]).collect();
    let vectors = v.map(|v| Matrix::from_fn(n, n, |i, k| v[(i, order[k])]));
    (values, vectors)
}

/// Ascending eigenvalues only.
pub(crate) fn eigenvalues(m: &Matrix) -> Vec<f64> {
    jacobi(m, false).0
}

pub(crate) fn decompose(m: &Matrix) -> Spectrum {
    let (eigenvalues, vectors) = jacobi(m, true);
    Spectrum {
        eigenvalues,
        eigenvectors: vectors.expect("vectors requested"),
    }
}
