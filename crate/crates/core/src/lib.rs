//! Lower bounds on weighted products of root distances.
//!
//! Given the distinct roots of a polynomial and a weighted graph on them, this
//! crate computes the actual product `∏ |α_i − α_j|^w` over the edges together
//! with a family of lower bounds for it, and replays the confluent Vandermonde
//! column reduction that proves the amortized bound so every intermediate
//! identity and inequality can be checked numerically.
//!
//! Module map:
//!
//! * [`poly`] roots with multiplicities and the symmetric functions built on them
//! * [`vandermonde`] confluent Vandermonde matrices and their determinants
//! * [`findiff`] divided differences of monomials and their partial derivatives
//! * [`spectral`] weighted root graphs, Jacobi eigenvalues and potential selection
//! * [`reduction`] the column-replacement pipeline and the Hadamard chain
//! * [`exact`] Gaussian-integer determinants for lattice roots
//! * [`bounds`] every bound formula and the comparison report
//! * [`roots`] approximate roots from coefficients (Aberth–Ehrlich)
//! * [`instance`] JSON documents shared by the CLI and the Python bindings
//! * [`sampling`] seeded random instance families

// dense matrix kernels read more clearly with explicit indices
#![allow(clippy::needless_range_loop)]

pub mod bounds;
pub mod error;
pub mod exact;
pub mod findiff;
pub mod instance;
pub mod poly;
pub mod reduction;
pub mod roots;
pub mod sampling;
pub mod spectral;
pub mod vandermonde;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use poly::{Polynomial, RootMultiset};
pub use spectral::{Edge, PotentialVector, WeightedRootGraph};
pub use vandermonde::{ConfluentSpec, DenseMatrix};

/// Complex scalar used throughout.
pub type ComplexScalar = Complex64;

/// Binomial coefficient as `f64`, zero when `k > n`.
pub(crate) fn binomial_f64(n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0f64;
    for t in 0..k {
        acc = acc * (n - t) as f64 / (t + 1) as f64;
    }
    acc.round()
}

/// Exact binomial coefficient, zero when `k > n`.
pub(crate) fn binomial_u128(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for t in 0..k as u128 {
        acc = acc * (n as u128 - t) / (t + 1);
    }
    acc
}

pub(crate) fn factorial_f64(k: u64) -> f64 {
    (1..=k).fold(1.0, |acc, t| acc * t as f64)
}

/// `max{1, |z|}`.
pub(crate) fn max1(z: Complex64) -> f64 {
    z.norm().max(1.0)
}
