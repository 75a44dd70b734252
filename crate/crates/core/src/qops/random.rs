//! Random states and unitaries for sampling-based checks and optimizer starts.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::{DensityMatrix, Matrix};

/// Complex Ginibre matrix with i.i.d. standard normal entries.
pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// Hilbert–Schmidt random mixed state.
pub fn random_density<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DensityMatrix {
    let g = ginibre(dim, dim, rng);
    let rho = g.matmul_adjoint(&g);
    let tr = rho.trace().re;
    DensityMatrix::from_matrix_unchecked(rho.scale_real(1.0 / tr))
}

/// Haar-random pure state.
pub fn random_pure<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DensityMatrix {
    let psi: Vec<Complex64> = ginibre(dim, 1, rng).column(0);
    DensityMatrix::pure(&psi).expect("gaussian vector is non-zero")
}

/// Haar-random unitary via Gram–Schmidt on a Ginibre matrix.
pub fn random_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Matrix {
    let g = ginibre(dim, dim, rng);
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(dim);
    for j in 0..dim {
        let mut v = g.column(j);
        for q in &cols {
            let overlap: Complex64 = q.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (vi, qi) in v.iter_mut().zip(q) {
                *vi -= overlap * qi;
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        v.iter_mut().for_each(|z| *z /= norm);
        cols.push(v);
    }
    Matrix::from_fn(dim, dim, |i, j| cols[j][i])
}

/// Random state with a prescribed spectrum in a Haar-random basis.
pub fn random_with_spectrum<R: Rng + ?Sized>(probs: &[f64], rng: &mut R) -> DensityMatrix {
    let u = random_unitary(probs.len(), rng);
    DensityMatrix::from_matrix_unchecked(Matrix::from_real_diagonal(probs)).conjugate_by(&u)
}

/// Random Hermitian matrix with entries of unit scale.
pub fn random_hermitian<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Matrix {
    let g = ginibre(dim, dim, rng);
    let mut h = &g + &g.adjoint();
    h = h.scale_real(0.5);
    h.symmetrize();
    h
}
