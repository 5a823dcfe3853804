//! Approximate roots of a polynomial given by coefficients.
//!
//! Aberth–Ehrlich simultaneous iteration followed by single-linkage clustering
//! of the `d` approximations into distinct roots with multiplicities. The
//! results carry floating-point error and are flagged as approximate wherever
//! they are reported.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::poly::{coefficient_inf_norm, Polynomial, RootMultiset};
use crate::{Error, Result};

pub const MAX_ITERATIONS: usize = 200;
/// Per-root acceptance `|f(z)| ≤ RESIDUAL_TOL · ‖f‖∞`.
pub const RESIDUAL_TOL: f64 = 1e-10;
pub const CLUSTER_RADIUS: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApproximateRoots {
    /// All `d` approximations, unclustered.
    pub approximations: Vec<Complex64>,
    pub iterations: usize,
    /// `max |f(z_k)| / ‖f‖∞`.
    pub max_relative_residual: f64,
    pub multiset: RootMultiset,
}

fn eval_with_derivative(c: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &a in c.iter().rev() {
        dp = dp * z + p;
        p = p * z + a;
    }
    (p, dp)
}

/// Aberth–Ehrlich iteration on the monic normalization of `coefficients`
/// (lowest degree first). Returns the `d` approximations and the number of
/// sweeps used.
pub fn aberth(coefficients: &[Complex64]) -> Result<(Vec<Complex64>, usize, f64)> {
    let p = Polynomial::new(coefficients.to_vec())?;
    let d = p.degree();
    if d == 0 {
        return Err(Error::InvalidInput("polynomial has degree 0".into()));
    }
    let c = p.coefficients();
    let norm = coefficient_inf_norm(&p);
    // Cauchy radius bounds every root; start on a rotated circle inside it.
    let radius = 1.0 + c[..d].iter().map(|a| a.norm()).fold(0.0, f64::max);
    let start = radius.clamp(0.5, 2.0);
    let mut z: Vec<Complex64> = (0..d)
        .map(|k| Complex64::from_polar(start, 0.4 + std::f64::consts::TAU * k as f64 / d as f64))
        .collect();

    let residual = |z: &[Complex64]| {
        z.iter()
            .map(|&x| p.eval(x).norm() / norm)
            .fold(0.0, f64::max)
    };

    let mut converged_at = None;
    let mut last_step = f64::INFINITY;
    for it in 1..=MAX_ITERATIONS {
        let mut step = 0.0f64;
        for k in 0..d {
            let (f, df) = eval_with_derivative(c, z[k]);
            if f.norm() == 0.0 {
                continue;
            }
            let ratio = f / df;
            let sum: Complex64 = (0..d)
                .filter(|&j| j != k)
                .map(|j| {
                    let diff = z[k] - z[j];
                    if diff.norm() == 0.0 {
                        Complex64::new(0.0, 0.0)
                    } else {
                        diff.inv()
                    }
                })
                .sum();
            let delta = ratio / (Complex64::new(1.0, 0.0) - ratio * sum);
            if delta.is_finite() {
                z[k] -= delta;
                step = step.max(delta.norm());
            }
        }
        if converged_at.is_none() && residual(&z) <= RESIDUAL_TOL {
            converged_at = Some(it);
        }
        // keep polishing multiple roots while the steps still shrink
        if converged_at.is_some() && (step == 0.0 || step >= last_step || step < 1e-15) {
            let res = residual(&z);
            return Ok((z, it, res));
        }
        last_step = step;
    }
    let res = residual(&z);
    if res <= RESIDUAL_TOL {
        Ok((z, MAX_ITERATIONS, res))
    } else {
        Err(Error::RootsNotConverged {
            iterations: MAX_ITERATIONS,
        })
    }
}

/// Single-linkage clusters of radius `radius`; each cluster becomes its mean
/// with multiplicity equal to its size. Clusters are sorted by real then
/// imaginary part.
pub fn cluster(points: &[Complex64], radius: f64) -> Result<RootMultiset> {
    let n = points.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for i in 0..n {
        for j in i + 1..n {
            if (points[i] - points[j]).norm() <= radius {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a] = b;
            }
        }
    }
    let mut groups: Vec<(usize, Complex64, u32)> = Vec::new();
    for i in 0..n {
        let root = find(&mut parent, i);
        match groups.iter_mut().find(|g| g.0 == root) {
            Some(g) => {
                g.1 += points[i];
                g.2 += 1;
            }
            None => groups.push((root, points[i], 1)),
        }
    }
    let mut clusters: Vec<(Complex64, u32)> = groups
        .into_iter()
        .map(|(_, sum, m)| (sum / m as f64, m))
        .collect();
    clusters.sort_by(|a, b| a.0.re.total_cmp(&b.0.re).then(a.0.im.total_cmp(&b.0.im)));
    let (roots, mults) = clusters.into_iter().unzip();
    RootMultiset::new(roots, mults)
}

/// Roots of the polynomial with the given coefficients (lowest degree first).
pub fn roots_from_coefficients(coefficients: &[Complex64]) -> Result<ApproximateRoots> {
    let (approximations, iterations, max_relative_residual) = aberth(coefficients)?;
    let multiset = cluster(&approximations, CLUSTER_RADIUS)?;
    Ok(ApproximateRoots {
        approximations,
        iterations,
        max_relative_residual,
        multiset,
    })
}
