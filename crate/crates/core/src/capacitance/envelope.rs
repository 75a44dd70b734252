//! Least concave majorant of a sampled curve.

use serde::{Deserialize, Serialize};

use super::EnergyCurve;
use crate::error::{Error, Result};

/// Indices of the upper-hull vertices of `(xs, ys)`, left to right.
/// `xs` must be strictly increasing.
pub(crate) fn upper_hull(xs: &[f64], ys: &[f64]) -> Vec<usize> {
    let mut hull: Vec<usize> = Vec::with_capacity(xs.len());
    for i in 0..xs.len() {
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            // drop b when it lies on or below the chord a → i
            let cross = (xs[b] - xs[a]) * (ys[i] - ys[a]) - (ys[b] - ys[a]) * (xs[i] - xs[a]);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(i);
    }
    hull
}

/// Hull segment `(left, right)` containing `x`; equal indices when `x` sits
/// on a vertex.
fn bracket(xs: &[f64], hull: &[usize], x: f64) -> (usize, usize) {
    for w in hull.windows(2) {
        let (a, b) = (w[0], w[1]);
        if x == xs[a] {
            return (a, a);
        }
        if x == xs[b] {
            return (b, b);
        }
        if x > xs[a] && x < xs[b] {
            return (a, b);
        }
    }
    let last = *hull.last().expect("non-empty hull");
    if x <= xs[hull[0]] {
        (hull[0], hull[0])
    } else {
        (last, last)
    }
}

fn interpolate(xs: &[f64], ys: &[f64], hull: &[usize], x: f64) -> f64 {
    let (a, b) = bracket(xs, hull, x);
    if a == b {
        return ys[a];
    }
    let t = (x - xs[a]) / (xs[b] - xs[a]);
    ys[a] + t * (ys[b] - ys[a])
}

/// Smallest concave function above the piecewise-linear interpolant of
/// `curve`, sampled on the same grid.
pub fn concave_envelope(curve: &EnergyCurve) -> Result<EnergyCurve> {
    if curve.e_grid.is_empty() {
        return Err(Error::EmptyCurve);
    }
    let hull = upper_hull(&curve.e_grid, &curve.values);
    let values = curve
        .e_grid
        .iter()
        .map(|&x| interpolate(&curve.e_grid, &curve.values, &hull, x))
        .collect();
    Ok(EnergyCurve {
        e_grid: curve.e_grid.clone(),
        values,
        meta: curve.meta.clone(),
    })
}

/// Envelope value at an arbitrary energy inside the grid range.
pub fn envelope_at(curve: &EnergyCurve, e: f64) -> Result<f64> {
    if curve.e_grid.is_empty() {
        return Err(Error::EmptyCurve);
    }
    check_range(curve, e)?;
    let hull = upper_hull(&curve.e_grid, &curve.values);
    Ok(interpolate(&curve.e_grid, &curve.values, &hull, e))
}

fn check_range(curve: &EnergyCurve, e: f64) -> Result<()> {
    let e_max = *curve.e_grid.last().expect("non-empty");
    if !(curve.e_grid[0]..=e_max).contains(&e) {
        return Err(Error::EnergyOutOfRange { energy: e, e_max });
    }
    Ok(())
}

/// Energy distribution {(p_j, 𝔢_j)} over which single-cell values are averaged.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyDistribution {
    /// `(probability, energy)` pairs.
    pub points: Vec<(f64, f64)>,
}

impl EnergyDistribution {
    pub fn total_probability(&self) -> f64 {
        self.points.iter().map(|(p, _)| p).sum()
    }

    pub fn mean_energy(&self) -> f64 {
        self.points.iter().map(|(p, e)| p * e).sum()
    }

    /// Σ_j p_j f(𝔢_j)
    pub fn average(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.points.iter().map(|&(p, e)| p * f(e)).sum()
    }
}

/// At most two-point distribution with mean `e` whose average of the raw
/// curve equals the envelope at `e` (the supporting chord of the hull).
pub fn envelope_support(curve: &EnergyCurve, e: f64) -> Result<EnergyDistribution> {
    if curve.e_grid.is_empty() {
        return Err(Error::EmptyCurve);
    }
    check_range(curve, e)?;
    let xs = &curve.e_grid;
    let hull = upper_hull(xs, &curve.values);
    let (a, b) = bracket(xs, &hull, e);
    if a == b {
        return Ok(EnergyDistribution {
            points: vec![(1.0, xs[a])],
        });
    }
    let p_left = (xs[b] - e) / (xs[b] - xs[a]);
    Ok(EnergyDistribution {
        points: vec![(p_left, xs[a]), (1.0 - p_left, xs[b])],
    })
}
