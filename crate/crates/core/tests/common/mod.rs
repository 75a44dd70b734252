//! Brute-force reference searches shared by the integration tests.
#![allow(dead_code)]

use ergocap::ergotropy::{ergotropy, total_ergotropy};
use ergocap::qops::{apply_channel, Complex64, DensityMatrix, Hamiltonian, KrausChannel, Matrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

#[derive(Clone, Copy)]
pub enum Quantity {
    Ergotropy,
    Total,
}

fn score(ch: &KrausChannel, h: &Hamiltonian, rho: &DensityMatrix, q: Quantity) -> f64 {
    let out = apply_channel(ch, rho).unwrap();
    match q {
        Quantity::Ergotropy => ergotropy(&out, h).unwrap(),
        Quantity::Total => total_ergotropy(&out, h).unwrap(),
    }
}

/// ρ = AA†/Tr[AA†], then mixed with |0⟩⟨0| until Tr[ρh] ≤ e.
/// `h` must be diagonal in the computational basis.
fn state_from(a: &[f64], d: usize, levels: &[f64], e: f64) -> DensityMatrix {
    let m = Matrix::from_fn(d, d, |i, j| {
        Complex64::new(a[2 * (i * d + j)], a[2 * (i * d + j) + 1])
    });
    let mut rho = m.matmul_adjoint(&m);
    let tr = rho.trace().re;
    rho = rho.scale_real(1.0 / tr);
    let energy: f64 = (0..d).map(|k| rho[(k, k)].re * levels[k]).sum();
    if energy > e {
        let keep = e / energy;
        rho = rho.scale_real(keep);
        rho = &rho
            + &Matrix::from_real_diagonal(&{
                let mut g = vec![0.0; d];
                g[0] = 1.0 - keep;
                g
            });
    }
    DensityMatrix::new(rho).unwrap()
}

/// Best value over diagonal inputs on a simplex grid with `steps` divisions.
pub fn diagonal_grid(ch: &KrausChannel, h: &Hamiltonian, e: f64, steps: usize, q: Quantity) -> f64 {
    let d = h.dim();
    let levels = h.levels();
    let mut best = f64::NEG_INFINITY;
    let mut counts = vec![0usize; d];
    loop {
        let used: usize = counts[1..].iter().sum();
        if used <= steps {
            let mut p: Vec<f64> = counts.iter().map(|&c| c as f64 / steps as f64).collect();
            p[0] = (steps - used) as f64 / steps as f64;
            let energy: f64 = p.iter().zip(levels).map(|(a, b)| a * b).sum();
            if energy <= e + 1e-12 {
                let rho = DensityMatrix::from_diagonal(&p).unwrap();
                best = best.max(score(ch, h, &rho, q));
            }
        }
        // odometer over counts[1..]
        let mut k = 1;
        while k < d {
            counts[k] += 1;
            if counts[k] <= steps {
                break;
            }
            counts[k] = 0;
            k += 1;
        }
        if k == d {
            break;
        }
    }
    best
}

/// Multi-start adaptive random-walk hill climb over ρ = AA†/Tr.
pub fn random_walk(
    ch: &KrausChannel,
    h: &Hamiltonian,
    e: f64,
    starts: usize,
    seed: u64,
    q: Quantity,
) -> f64 {
    let d = h.dim();
    let levels = h.levels().to_vec();
    let n = 2 * d * d;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = f64::NEG_INFINITY;
    for _ in 0..starts {
        let mut x: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let mut fx = score(ch, h, &state_from(&x, d, &levels, e), q);
        let mut step = 0.5;
        let mut fails = 0;
        while step > 1e-7 {
            let y: Vec<f64> = x
                .iter()
                .map(|v| v + step * rng.sample::<f64, _>(StandardNormal))
                .collect();
            let fy = score(ch, h, &state_from(&y, d, &levels, e), q);
            if fy > fx {
                x = y;
                fx = fy;
                fails = 0;
                step *= 1.5;
            } else {
                fails += 1;
                if fails >= 20 {
                    step *= 0.5;
                    fails = 0;
                }
            }
        }
        best = best.max(fx);
    }
    best
}

/// Maximum of the two reference searches.
pub fn reference_max(
    ch: &KrausChannel,
    h: &Hamiltonian,
    e: f64,
    starts: usize,
    q: Quantity,
) -> f64 {
    diagonal_grid(ch, h, e, 100, q).max(random_walk(ch, h, e, starts, 7, q))
}
