//! Confluent Vandermonde matrices.
//!
//! Column `j` of the block for `β` is the normalized derivative
//! `v_j(β) = (C(m−1, j) β^{m−1−j})_{m=1..n}`; blocks appear in input order.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::poly::{check_finite, find_coincident};
use crate::{binomial_f64, Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Nodes `β_1..β_r` with block sizes `μ_1..μ_r`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfluentSpec {
    betas: Vec<Complex64>,
    mus: Vec<u32>,
}

impl ConfluentSpec {
    pub fn new(betas: Vec<Complex64>, mus: Vec<u32>) -> Result<Self> {
        if betas.len() != mus.len() {
            return Err(Error::InvalidInput(format!(
                "{} nodes but {} block sizes",
                betas.len(),
                mus.len()
            )));
        }
        if betas.is_empty() {
            return Err(Error::InvalidInput("empty confluent spec".into()));
        }
        if let Some(k) = mus.iter().position(|&m| m == 0) {
            return Err(Error::InvalidInput(format!("block {k} has size zero")));
        }
        for &b in &betas {
            check_finite(b, "node")?;
        }
        if let Some((i, j)) = find_coincident(&betas) {
            return Err(Error::CoincidentRoots { i, j });
        }
        Ok(Self { betas, mus })
    }

    pub fn betas(&self) -> &[Complex64] {
        &self.betas
    }

    pub fn mus(&self) -> &[u32] {
        &self.mus
    }

    /// Matrix order `n = Σ μ_i`.
    pub fn n(&self) -> usize {
        self.mus.iter().map(|&m| m as usize).sum()
    }

    /// Index of the first column of each block.
    pub fn block_offsets(&self) -> Vec<usize> {
        let mut offsets = Vec::with_capacity(self.mus.len());
        let mut acc = 0;
        for &m in &self.mus {
            offsets.push(acc);
            acc += m as usize;
        }
        offsets
    }
}

/// Row-major complex matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseMatrix {
    n_rows: usize,
    n_cols: usize,
    entries: Vec<Complex64>,
}

impl DenseMatrix {
    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        Self {
            n_rows,
            n_cols,
            entries: vec![ZERO; n_rows * n_cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, ONE);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n_cols) {
            return Err(Error::InvalidInput("ragged rows".into()));
        }
        Ok(Self {
            n_rows,
            n_cols,
            entries: rows.concat(),
        })
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.n_cols + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: Complex64) {
        self.entries[row * self.n_cols + col] = value;
    }

    pub fn column(&self, col: usize) -> Vec<Complex64> {
        (0..self.n_rows).map(|r| self.get(r, col)).collect()
    }

    pub fn set_column(&mut self, col: usize, values: &[Complex64]) {
        assert_eq!(values.len(), self.n_rows, "column length mismatch");
        for (r, &v) in values.iter().enumerate() {
            self.set(r, col, v);
        }
    }

    /// Euclidean norm of a column.
    pub fn column_norm(&self, col: usize) -> f64 {
        (0..self.n_rows)
            .map(|r| self.get(r, col).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn rows(&self) -> Vec<Vec<Complex64>> {
        self.entries.chunks(self.n_cols.max(1)).map(<[_]>::to_vec).collect()
    }
}

/// `v_i(x)` of length `n`: entry `m` is `C(m−1, i) x^{m−1−i}`, zero for `m−1 < i`.
pub fn column_v_i(x: Complex64, i: usize, n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|row| {
            if row < i {
                ZERO
            } else {
                x.powu((row - i) as u32) * binomial_f64(row as u64, i as u64)
            }
        })
        .collect()
}

pub fn build_confluent(spec: &ConfluentSpec) -> DenseMatrix {
    let n = spec.n();
    let mut m = DenseMatrix::zeros(n, n);
    let mut col = 0;
    for (&beta, &mu) in spec.betas.iter().zip(&spec.mus) {
        for j in 0..mu as usize {
            m.set_column(col, &column_v_i(beta, j, n));
            col += 1;
        }
    }
    m
}

/// `∏_{i<j} (β_j − β_i)^{μ_i μ_j}`.
pub fn det_product_formula(spec: &ConfluentSpec) -> Complex64 {
    let mut acc = ONE;
    for i in 0..spec.betas.len() {
        for j in i + 1..spec.betas.len() {
            acc *= (spec.betas[j] - spec.betas[i]).powu(spec.mus[i] * spec.mus[j]);
        }
    }
    acc
}

/// `log₂ |det V(β; μ)|` from the product formula.
pub fn log2_abs_det_product_formula(spec: &ConfluentSpec) -> f64 {
    let mut acc = 0.0;
    for i in 0..spec.betas.len() {
        for j in i + 1..spec.betas.len() {
            let e = (spec.mus[i] * spec.mus[j]) as f64;
            acc += e * (spec.betas[j] - spec.betas[i]).norm().log2();
        }
    }
    acc
}

/// Partial-pivot LU; returns the pivots and the permutation parity,
/// or `None` when a pivot column is exactly zero.
fn lu_pivots(m: &DenseMatrix) -> Option<(Vec<Complex64>, bool)> {
    assert_eq!(m.n_rows, m.n_cols, "determinant of a non-square matrix");
    let n = m.n_rows;
    let mut a = m.entries.clone();
    let mut pivots = Vec::with_capacity(n);
    let mut odd = false;
    for k in 0..n {
        let (p, best) = (k..n)
            .map(|r| (r, a[r * n + k].norm()))
            .fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if best == 0.0 {
            return None;
        }
        if p != k {
            for c in 0..n {
                a.swap(k * n + c, p * n + c);
            }
            odd = !odd;
        }
        let pivot = a[k * n + k];
        pivots.push(pivot);
        for r in k + 1..n {
            let factor = a[r * n + k] / pivot;
            if factor == ZERO {
                continue;
            }
            for c in k + 1..n {
                let v = a[k * n + c];
                a[r * n + c] -= factor * v;
            }
        }
    }
    Some((pivots, odd))
}

/// Determinant by partial-pivot elimination; exactly singular input gives 0.
pub fn det_direct(m: &DenseMatrix) -> Complex64 {
    match lu_pivots(m) {
        None => ZERO,
        Some((pivots, odd)) => {
            let d: Complex64 = pivots.into_iter().product();
            if odd {
                -d
            } else {
                d
            }
        }
    }
}

/// `log₂ |det m|` by the same elimination, without overflow; `None` if singular.
pub fn log2_abs_det_direct(m: &DenseMatrix) -> Option<f64> {
    lu_pivots(m).map(|(pivots, _)| pivots.iter().map(|p| p.norm().log2()).sum())
}

/// Residual between `det V(β;μ)` and `𝒱^{(μ_i−1)}(β_i)/(μ_i−1)!`, where `𝒱(y)`
/// is the determinant with the last column of block `i` replaced by `v(y)`.
///
/// `𝒱` is recovered from `n` samples on a circle of radius `2·max|β|+1`
/// (interpolation at scaled roots of unity, i.e. an inverse DFT).
pub fn vydiff_residual(spec: &ConfluentSpec, block: usize) -> Result<f64> {
    let mu = *spec
        .mus
        .get(block)
        .ok_or_else(|| Error::InvalidInput(format!("block {block} out of range")))?;
    if mu < 2 {
        return Err(Error::NoColumnToReplace(block));
    }
    let n = spec.n();
    let radius = 2.0 * spec.betas.iter().map(|b| b.norm()).fold(0.0, f64::max) + 1.0;

    let mut betas = spec.betas.clone();
    let mut mus = spec.mus.clone();
    mus[block] = mu - 1;
    betas.insert(block + 1, ZERO);
    mus.insert(block + 1, 1);

    let samples: Vec<Complex64> = (0..n)
        .map(|k| {
            let y = Complex64::from_polar(radius, std::f64::consts::TAU * k as f64 / n as f64);
            betas[block + 1] = y;
            let replaced = ConfluentSpec {
                betas: betas.clone(),
                mus: mus.clone(),
            };
            det_direct(&build_confluent(&replaced))
        })
        .collect();

    // c_p = (1/(n R^p)) Σ_k 𝒱(y_k) ω^{−kp}
    let coeffs: Vec<Complex64> = (0..n)
        .map(|p| {
            let s: Complex64 = samples
                .iter()
                .enumerate()
                .map(|(k, &v)| {
                    let angle = -std::f64::consts::TAU * ((k * p) % n) as f64 / n as f64;
                    v * Complex64::from_polar(1.0, angle)
                })
                .sum();
            s / (n as f64 * radius.powi(p as i32))
        })
        .collect();

    let order = (mu - 1) as usize;
    let beta = spec.betas[block];
    let derivative: Complex64 = coeffs
        .iter()
        .enumerate()
        .skip(order)
        .map(|(p, &c)| c * binomial_f64(p as u64, order as u64) * beta.powu((p - order) as u32))
        .sum();

    let det = det_direct(&build_confluent(spec));
    Ok((det - derivative).norm())
}
