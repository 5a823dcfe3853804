//! Root-level representation of polynomials.
//!
//! Everything here is computed from the distinct roots and their
//! multiplicities; no coefficient-side algebra is involved.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{max1, Error, Result};

/// Relative threshold under which two roots count as coincident.
pub const DISTINCT_TOL: f64 = 1e-12;

pub(crate) fn check_finite(z: Complex64, what: &str) -> Result<()> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("{what} is not finite: {z}")))
    }
}

/// Returns the first pair `(i, j)` closer than the distinctness threshold.
pub(crate) fn find_coincident(points: &[Complex64]) -> Option<(usize, usize)> {
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            let scale = 1f64.max(points[i].norm()).max(points[j].norm());
            if (points[i] - points[j]).norm() <= DISTINCT_TOL * scale {
                return Some((i, j));
            }
        }
    }
    None
}

/// Distinct roots `α_1..α_r` with positive multiplicities `m_1..m_r`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootMultiset {
    roots: Vec<Complex64>,
    multiplicities: Vec<u32>,
}

impl RootMultiset {
    pub fn new(roots: Vec<Complex64>, multiplicities: Vec<u32>) -> Result<Self> {
        if roots.is_empty() {
            return Err(Error::InvalidInput("at least one root is required".into()));
        }
        if roots.len() != multiplicities.len() {
            return Err(Error::InvalidInput(format!(
                "{} roots but {} multiplicities",
                roots.len(),
                multiplicities.len()
            )));
        }
        for &z in &roots {
            check_finite(z, "root")?;
        }
        if let Some(k) = multiplicities.iter().position(|&m| m == 0) {
            return Err(Error::InvalidInput(format!("multiplicity of root {k} is zero")));
        }
        if let Some((i, j)) = find_coincident(&roots) {
            return Err(Error::CoincidentRoots { i, j });
        }
        Ok(Self {
            roots,
            multiplicities,
        })
    }

    /// All multiplicities one.
    pub fn simple(roots: Vec<Complex64>) -> Result<Self> {
        let m = vec![1; roots.len()];
        Self::new(roots, m)
    }

    pub fn roots(&self) -> &[Complex64] {
        &self.roots
    }

    pub fn multiplicities(&self) -> &[u32] {
        &self.multiplicities
    }

    /// Number of distinct roots.
    pub fn r(&self) -> usize {
        self.roots.len()
    }

    /// Degree `d = Σ m_i`.
    pub fn degree(&self) -> usize {
        self.multiplicities.iter().map(|&m| m as usize).sum()
    }

    pub fn is_square_free(&self) -> bool {
        self.multiplicities.iter().all(|&m| m == 1)
    }

    /// The same roots with every multiplicity set to one.
    pub fn square_free_part(&self) -> RootMultiset {
        RootMultiset {
            roots: self.roots.clone(),
            multiplicities: vec![1; self.roots.len()],
        }
    }
}

/// Coefficients lowest degree first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polynomial {
    coefficients: Vec<Complex64>,
}

impl Polynomial {
    /// Normalizes to a monic polynomial; trailing zero coefficients are dropped.
    pub fn new(mut coefficients: Vec<Complex64>) -> Result<Self> {
        for &c in &coefficients {
            check_finite(c, "coefficient")?;
        }
        while coefficients.last().is_some_and(|c| *c == Complex64::new(0.0, 0.0)) {
            coefficients.pop();
        }
        let lead = *coefficients
            .last()
            .ok_or_else(|| Error::InvalidInput("zero polynomial".into()))?;
        for c in coefficients.iter_mut() {
            *c /= lead;
        }
        Ok(Self { coefficients })
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    /// Horner evaluation.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coefficients
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    pub fn derivative(&self) -> Vec<Complex64> {
        self.coefficients
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, &c)| c * k as f64)
            .collect()
    }
}

/// `∏ (z − α_i)^{m_i}` by repeated convolution with linear factors.
pub fn expand_from_roots(rm: &RootMultiset) -> Polynomial {
    let mut coeffs = vec![Complex64::new(1.0, 0.0)];
    for (&alpha, &m) in rm.roots.iter().zip(&rm.multiplicities) {
        for _ in 0..m {
            let mut next = vec![Complex64::new(0.0, 0.0); coeffs.len() + 1];
            for (k, &c) in coeffs.iter().enumerate() {
                next[k + 1] += c;
                next[k] -= alpha * c;
            }
            coeffs = next;
        }
    }
    Polynomial {
        coefficients: coeffs,
    }
}

/// `M(f) = ∏ max{1,|α_i|}^{m_i}` when `use_multiplicity`, else `M(α) = ∏ max{1,|α_i|}`.
pub fn mahler_measure(rm: &RootMultiset, use_multiplicity: bool) -> f64 {
    log2_mahler_measure(rm, use_multiplicity).exp2()
}

/// `log₂` of [`mahler_measure`].
pub fn log2_mahler_measure(rm: &RootMultiset, use_multiplicity: bool) -> f64 {
    rm.roots
        .iter()
        .zip(&rm.multiplicities)
        .map(|(&a, &m)| {
            let e = if use_multiplicity { m as f64 } else { 1.0 };
            e * max1(a).log2()
        })
        .sum()
}

/// Minimum distance between distinct roots.
pub fn separation(rm: &RootMultiset) -> Result<f64> {
    nearest_distinct_distances(rm).map(|d| d.into_iter().fold(f64::INFINITY, f64::min))
}

/// `Δ_i`, the distance from each root to its nearest distinct root.
pub fn nearest_distinct_distances(rm: &RootMultiset) -> Result<Vec<f64>> {
    if rm.r() < 2 {
        return Err(Error::SeparationUndefined);
    }
    Ok(rm
        .roots
        .iter()
        .enumerate()
        .map(|(i, &a)| {
            rm.roots
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, &b)| (a - b).norm())
                .fold(f64::INFINITY, f64::min)
        })
        .collect())
}

/// `∏_{i<j} (α_i − α_j)²` over the distinct roots; 1 when `r < 2`.
pub fn discriminant(rm: &RootMultiset) -> Complex64 {
    let mut acc = Complex64::new(1.0, 0.0);
    for i in 0..rm.r() {
        for j in i + 1..rm.r() {
            let d = rm.roots[i] - rm.roots[j];
            acc *= d * d;
        }
    }
    acc
}

/// `det V(α)` for the standard Vandermonde matrix on the distinct roots.
pub fn vandermonde_det(rm: &RootMultiset) -> Complex64 {
    let mut acc = Complex64::new(1.0, 0.0);
    for i in 0..rm.r() {
        for j in i + 1..rm.r() {
            acc *= rm.roots[j] - rm.roots[i];
        }
    }
    acc
}

/// `log₂ |det V(α)|`.
pub fn log2_abs_vandermonde_det(rm: &RootMultiset) -> f64 {
    let mut acc = 0.0;
    for i in 0..rm.r() {
        for j in i + 1..rm.r() {
            acc += (rm.roots[j] - rm.roots[i]).norm().log2();
        }
    }
    acc
}

/// The `(d − r)`-th subdiscriminant in the form `det V(α) · ∏ m_i`.
pub fn subdiscriminant(rm: &RootMultiset) -> Complex64 {
    let prod_m: f64 = rm.multiplicities.iter().map(|&m| m as f64).product();
    vandermonde_det(rm) * prod_m
}

/// `res(f, f̂′) = ∏ f̂′(α_i)^{m_i}` with `f̂ = ∏ (z − α_j)` the square-free part.
pub fn resultant_with_sqfree_derivative(rm: &RootMultiset) -> Complex64 {
    let mut acc = Complex64::new(1.0, 0.0);
    for (i, &a) in rm.roots.iter().enumerate() {
        let deriv: Complex64 = rm
            .roots
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, &b)| a - b)
            .product();
        acc *= deriv.powu(rm.multiplicities[i]);
    }
    acc
}

/// `log₂ |res(f, f̂′)|`, immune to overflow.
pub fn log2_abs_resultant_with_sqfree_derivative(rm: &RootMultiset) -> f64 {
    let mut acc = 0.0;
    for (i, &a) in rm.roots.iter().enumerate() {
        for (j, &b) in rm.roots.iter().enumerate() {
            if i != j {
                acc += rm.multiplicities[i] as f64 * (a - b).norm().log2();
            }
        }
    }
    acc
}

/// `‖p‖∞`, the largest coefficient magnitude.
pub fn coefficient_inf_norm(p: &Polynomial) -> f64 {
    p.coefficients.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn real(xs: &[f64]) -> Vec<Complex64> {
        xs.iter().map(|&x| c(x, 0.0)).collect()
    }

    fn assert_coeffs(p: &Polynomial, expected: &[f64]) {
        assert_eq!(p.coefficients().len(), expected.len());
        for (got, want) in p.coefficients().iter().zip(expected) {
            assert_abs_diff_eq!(got.re, want, epsilon = 1e-12);
            assert_abs_diff_eq!(got.im, 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn expand_examples() {
        let rm = RootMultiset::simple(real(&[1.0, -1.0])).unwrap();
        assert_coeffs(&expand_from_roots(&rm), &[-1.0, 0.0, 1.0]);

        let rm = RootMultiset::new(real(&[0.0]), vec![3]).unwrap();
        assert_coeffs(&expand_from_roots(&rm), &[0.0, 0.0, 0.0, 1.0]);

        let rm = RootMultiset::new(real(&[1.0, 2.0]), vec![2, 1]).unwrap();
        let p = expand_from_roots(&rm);
        assert_coeffs(&p, &[-2.0, 5.0, -4.0, 1.0]);
        // (3−1)²(3−2) = 4
        assert_abs_diff_eq!(p.eval(c(3.0, 0.0)).re, 4.0, epsilon = 1e-12);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            RootMultiset::simple(real(&[1.0, 1.0])),
            Err(Error::CoincidentRoots { i: 0, j: 1 })
        ));
        assert!(RootMultiset::new(real(&[1.0]), vec![0]).is_err());
        assert!(RootMultiset::new(real(&[1.0, 2.0]), vec![1]).is_err());
        assert!(RootMultiset::simple(vec![c(f64::NAN, 0.0)]).is_err());
        assert!(RootMultiset::simple(vec![]).is_err());
        // just above the relative threshold
        assert!(RootMultiset::simple(real(&[1e6, 1e6 + 1e-5])).is_ok());
    }

    #[test]
    fn mahler_examples() {
        let rm = RootMultiset::simple(real(&[2.0, 0.5, -3.0])).unwrap();
        assert_abs_diff_eq!(mahler_measure(&rm, false), 6.0, epsilon = 1e-12);
        let rm = RootMultiset::new(real(&[0.5]), vec![4]).unwrap();
        assert_abs_diff_eq!(mahler_measure(&rm, true), 1.0, epsilon = 1e-12);
        let rm = RootMultiset::new(real(&[2.0]), vec![3]).unwrap();
        assert_abs_diff_eq!(mahler_measure(&rm, true), 8.0, epsilon = 1e-12);
        assert_abs_diff_eq!(mahler_measure(&rm, false), 2.0, epsilon = 1e-12);
    }

    #[test]
    fn separation_examples() {
        let rm = RootMultiset::simple(real(&[-1.0, 0.0, 1.0])).unwrap();
        assert_abs_diff_eq!(separation(&rm).unwrap(), 1.0);
        let rm = RootMultiset::simple(vec![c(0.0, 0.0), c(3.0, 4.0)]).unwrap();
        assert_abs_diff_eq!(separation(&rm).unwrap(), 5.0);
        let rm = RootMultiset::simple(real(&[0.0, 1.0, 1.25])).unwrap();
        assert_abs_diff_eq!(separation(&rm).unwrap(), 0.25);
        let rm = RootMultiset::simple(real(&[0.0])).unwrap();
        assert_eq!(separation(&rm), Err(Error::SeparationUndefined));
    }

    #[test]
    fn nearest_distance_examples() {
        let rm = RootMultiset::simple(real(&[0.0, 1.0, 3.0])).unwrap();
        assert_eq!(nearest_distinct_distances(&rm).unwrap(), vec![1.0, 1.0, 2.0]);
        let rm = RootMultiset::simple(vec![c(0.0, 0.0), c(0.0, 1.0), c(0.0, -1.0)]).unwrap();
        assert_eq!(nearest_distinct_distances(&rm).unwrap(), vec![1.0, 1.0, 1.0]);
        let rm = RootMultiset::simple(real(&[0.0, 10.0])).unwrap();
        assert_eq!(nearest_distinct_distances(&rm).unwrap(), vec![10.0, 10.0]);
        let rm = RootMultiset::simple(real(&[5.0])).unwrap();
        assert!(nearest_distinct_distances(&rm).is_err());
    }

    #[test]
    fn discriminant_examples() {
        let rm = RootMultiset::simple(real(&[1.0, -1.0])).unwrap();
        assert_abs_diff_eq!(discriminant(&rm).re, 4.0);
        let rm = RootMultiset::simple(real(&[0.0, 1.0, -1.0])).unwrap();
        assert_abs_diff_eq!(discriminant(&rm).re, 4.0);
        let rm = RootMultiset::simple(vec![c(0.3, 0.7)]).unwrap();
        assert_eq!(discriminant(&rm), c(1.0, 0.0));
    }

    #[test]
    fn subdiscriminant_examples() {
        let rm = RootMultiset::simple(real(&[0.0, 1.0])).unwrap();
        assert_abs_diff_eq!(subdiscriminant(&rm).re, 1.0);
        let rm = RootMultiset::new(real(&[0.0, 1.0]), vec![2, 3]).unwrap();
        assert_abs_diff_eq!(subdiscriminant(&rm).re, 6.0);
        let rm = RootMultiset::simple(real(&[0.0, 1.0, -1.0])).unwrap();
        assert_abs_diff_eq!(subdiscriminant(&rm).norm(), 2.0, epsilon = 1e-12);
    }

    #[test]
    fn resultant_examples() {
        let rm = RootMultiset::simple(real(&[1.0, -1.0])).unwrap();
        assert_abs_diff_eq!(resultant_with_sqfree_derivative(&rm).re, -4.0);
        let rm = RootMultiset::new(real(&[0.0]), vec![2]).unwrap();
        assert_abs_diff_eq!(resultant_with_sqfree_derivative(&rm).re, 1.0);
        let rm = RootMultiset::new(real(&[0.0, 1.0]), vec![2, 1]).unwrap();
        assert_abs_diff_eq!(resultant_with_sqfree_derivative(&rm).re, 1.0);
        assert_abs_diff_eq!(log2_abs_resultant_with_sqfree_derivative(&rm), 0.0);
    }

    #[test]
    fn inf_norm_examples() {
        let p = expand_from_roots(&RootMultiset::simple(real(&[1.0, -1.0])).unwrap());
        assert_abs_diff_eq!(coefficient_inf_norm(&p), 1.0);
        let p = expand_from_roots(&RootMultiset::new(real(&[1.0, 2.0]), vec![2, 1]).unwrap());
        assert_abs_diff_eq!(coefficient_inf_norm(&p), 5.0, epsilon = 1e-12);
        let p = Polynomial::new(real(&[0.0, 1.0])).unwrap();
        assert_abs_diff_eq!(coefficient_inf_norm(&p), 1.0);
    }

    #[test]
    fn polynomial_normalizes_to_monic() {
        let p = Polynomial::new(real(&[2.0, 4.0, 0.0])).unwrap();
        assert_eq!(p.degree(), 1);
        assert_eq!(p.coefficients()[1], c(1.0, 0.0));
        assert_eq!(p.coefficients()[0], c(0.5, 0.0));
        assert!(Polynomial::new(real(&[0.0, 0.0])).is_err());
    }
}
