//! Divided differences of monomials and their normalized partial derivatives.
//!
//! For `f(z) = z^m` on `n` distinct nodes the divided difference is the
//! complete homogeneous symmetric polynomial `h_{m−n+1}(y_1..y_n)`, and
//! applying `(1/i_j!) ∂^{i_j}/∂y_j^{i_j}` to every node replaces each factor
//! `y_j^{t_j}` by `C(t_j, i_j) y_j^{t_j−i_j}`.

use num_complex::Complex64;

use crate::poly::{check_finite, find_coincident};
use crate::{binomial_f64, factorial_f64, Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Pairwise distinct interpolation nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeList {
    nodes: Vec<Complex64>,
}

impl NodeList {
    pub fn new(nodes: Vec<Complex64>) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::InvalidInput("empty node list".into()));
        }
        for &y in &nodes {
            check_finite(y, "node")?;
        }
        if let Some((i, j)) = find_coincident(&nodes) {
            return Err(Error::ConfluentNodes { i, j });
        }
        Ok(Self { nodes })
    }

    pub fn nodes(&self) -> &[Complex64] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Calls `visit` with every `t ∈ ℤ_{≥0}^parts` summing to `total`.
pub fn for_each_composition(total: usize, parts: usize, mut visit: impl FnMut(&[usize])) {
    fn rec(rest: usize, slot: usize, buf: &mut Vec<usize>, visit: &mut dyn FnMut(&[usize])) {
        if slot + 1 == buf.len() {
            buf[slot] = rest;
            visit(buf);
            return;
        }
        for t in 0..=rest {
            buf[slot] = t;
            rec(rest - t, slot + 1, buf, visit);
        }
    }
    if parts == 0 {
        if total == 0 {
            visit(&[]);
        }
        return;
    }
    let mut buf = vec![0; parts];
    rec(total, 0, &mut buf, &mut visit);
}

/// `Σ_k y_k^m / ∏_{ℓ≠k} (y_k − y_ℓ)`.
pub fn divided_difference_monomial(m: u32, nodes: &NodeList) -> Complex64 {
    let ys = &nodes.nodes;
    ys.iter()
        .enumerate()
        .map(|(k, &yk)| {
            let denom: Complex64 = ys
                .iter()
                .enumerate()
                .filter(|&(l, _)| l != k)
                .map(|(_, &yl)| yk - yl)
                .product();
            yk.powu(m) / denom
        })
        .sum()
}

/// `h_{m−n+1}(y)` by explicit enumeration of exponent tuples; 0 when `n > m+1`.
pub fn monomial_dd_closed(m: u32, nodes: &NodeList) -> Complex64 {
    let n = nodes.len();
    if n > m as usize + 1 {
        return ZERO;
    }
    let mut acc = ZERO;
    for_each_composition(m as usize + 1 - n, n, |t| {
        acc += t
            .iter()
            .zip(&nodes.nodes)
            .map(|(&tj, &yj)| yj.powu(tj as u32))
            .product::<Complex64>();
    });
    acc
}

fn check_orders(nodes: &NodeList, orders: &[u32]) -> Result<()> {
    if orders.len() != nodes.len() {
        return Err(Error::InvalidInput(format!(
            "{} derivative orders for {} nodes",
            orders.len(),
            nodes.len()
        )));
    }
    Ok(())
}

/// Coefficients `[x^T] ∏_j Σ_t C(t, i_j) y_j^{t−i_j} x^t` for `T = 0..=max_total`.
fn derivative_series(nodes: &[Complex64], orders: &[u32], max_total: usize) -> Vec<Complex64> {
    let mut acc = vec![ZERO; max_total + 1];
    acc[0] = ONE;
    let mut factor = vec![ZERO; max_total + 1];
    for (&y, &i) in nodes.iter().zip(orders) {
        let i = i as usize;
        for (t, slot) in factor.iter_mut().enumerate() {
            *slot = if t < i {
                ZERO
            } else {
                y.powu((t - i) as u32) * binomial_f64(t as u64, i as u64)
            };
        }
        let mut next = vec![ZERO; max_total + 1];
        for (a, &ca) in acc.iter().enumerate() {
            if ca == ZERO {
                continue;
            }
            for (b, &fb) in factor.iter().enumerate().take(max_total + 1 - a) {
                next[a + b] += ca * fb;
            }
        }
        acc = next;
    }
    acc
}

/// `(1/i_1!) ∂^{i_1}_{y_1} ⋯ (1/i_n!) ∂^{i_n}_{y_n} f[y_1..y_n]` for `f = z^m`.
///
/// Evaluates `Σ_{Σt = m−n+1} ∏ C(t_j, i_j) y_j^{t_j−i_j}` (zero when `n > m+1`),
/// grouping the sum as a truncated product of one power series per node.
pub fn partial_dd_monomial(m: u32, nodes: &NodeList, orders: &[u32]) -> Result<Complex64> {
    check_orders(nodes, orders)?;
    let n = nodes.len();
    if n > m as usize + 1 {
        return Ok(ZERO);
    }
    let total = m as usize + 1 - n;
    Ok(derivative_series(&nodes.nodes, orders, total)[total])
}

/// The values of [`partial_dd_monomial`] for `m = 0..len`, sharing one series product.
pub fn partial_dd_column(nodes: &NodeList, orders: &[u32], len: usize) -> Result<Vec<Complex64>> {
    check_orders(nodes, orders)?;
    let n = nodes.len();
    if len < n {
        return Ok(vec![ZERO; len]);
    }
    let series = derivative_series(&nodes.nodes, orders, len - n);
    Ok((0..len)
        .map(|m| if m + 1 < n { ZERO } else { series[m + 1 - n] })
        .collect())
}

/// Coefficient of `f^{(i_j)}(y_j)` in the expansion of the differentiated divided
/// difference: `(1/i_j!) ∏_{ℓ≠j} (y_j − y_ℓ)^{−(i_ℓ+1)}`. `j` is 0-based.
pub fn leading_coefficient_of_derivative(
    nodes: &NodeList,
    orders: &[u32],
    j: usize,
) -> Result<Complex64> {
    check_orders(nodes, orders)?;
    if j >= nodes.len() {
        return Err(Error::InvalidInput(format!("node index {j} out of range")));
    }
    let yj = nodes.nodes[j];
    let denom: Complex64 = nodes
        .nodes
        .iter()
        .zip(orders)
        .enumerate()
        .filter(|&(l, _)| l != j)
        .map(|(_, (&yl, &il))| (yj - yl).powu(il + 1))
        .product();
    Ok(ONE / (denom * factorial_f64(orders[j] as u64)))
}
