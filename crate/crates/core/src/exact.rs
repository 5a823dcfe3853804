//! Exact determinants for nodes on the Gaussian integer lattice.
//!
//! When every root is a Gaussian integer, all entries of `V_0` and of the
//! rewritten matrix `V_r` are Gaussian integers: both are integer
//! polynomials in the nodes. Fraction-free elimination then gives both
//! determinants exactly, which floating-point elimination cannot do once the
//! confluent Vandermonde matrix grows past a dozen columns.

use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint, Sign};
use num_complex::Complex64;

use crate::findiff::NodeList;
use crate::poly::RootMultiset;
use crate::reduction::{assign_columns, orient};
use crate::spectral::{PotentialVector, WeightedRootGraph};
use crate::{binomial_u128, Error, Result};

/// `re + i·im` with arbitrary-precision parts.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GaussInt {
    pub re: BigInt,
    pub im: BigInt,
}

impl GaussInt {
    pub fn new(re: impl Into<BigInt>, im: impl Into<BigInt>) -> Self {
        Self {
            re: re.into(),
            im: im.into(),
        }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::new(1, 0)
    }

    pub fn is_zero(&self) -> bool {
        self.re.sign() == Sign::NoSign && self.im.sign() == Sign::NoSign
    }

    /// `Some` when both parts of `z` are integers of magnitude below `2⁵³`.
    pub fn from_complex(z: Complex64) -> Option<Self> {
        let ok = |x: f64| x.fract() == 0.0 && x.abs() < 9.007_199_254_740_992e15;
        (ok(z.re) && ok(z.im)).then(|| Self::new(z.re as i64, z.im as i64))
    }

    pub fn conj(&self) -> Self {
        Self {
            re: self.re.clone(),
            im: -&self.im,
        }
    }

    /// `|z|²`.
    pub fn norm_sqr(&self) -> BigUint {
        (&self.re * &self.re + &self.im * &self.im)
            .to_biguint()
            .expect("sum of squares is non-negative")
    }

    /// `log₂ |z|`; `−∞` for zero.
    pub fn log2_abs(&self) -> f64 {
        0.5 * log2_biguint(&self.norm_sqr())
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        Self {
            re: &self.re * k,
            im: &self.im * k,
        }
    }

    /// `self / d` when the quotient is a Gaussian integer.
    pub fn div_exact(&self, d: &Self) -> Self {
        let num = self * &d.conj();
        let den = BigInt::from(d.norm_sqr());
        debug_assert!((&num.re % &den).sign() == Sign::NoSign);
        debug_assert!((&num.im % &den).sign() == Sign::NoSign);
        Self {
            re: num.re / &den,
            im: num.im / den,
        }
    }

    pub fn to_complex(&self) -> Complex64 {
        fn f(x: &BigInt) -> f64 {
            let (sign, mag) = x.clone().into_parts();
            let v = 2f64.powf(log2_biguint(&mag));
            if sign == Sign::Minus {
                -v
            } else {
                v
            }
        }
        Complex64::new(f(&self.re), f(&self.im))
    }
}

/// `log₂ x` from the leading 64 bits; `−∞` for zero.
pub fn log2_biguint(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits == 0 {
        return f64::NEG_INFINITY;
    }
    let shift = bits.saturating_sub(64);
    let top: BigUint = x >> shift;
    let digits = top.to_u64_digits();
    let lead = digits.first().copied().unwrap_or(0) as f64;
    lead.log2() + shift as f64
}

impl Add for &GaussInt {
    type Output = GaussInt;
    fn add(self, o: &GaussInt) -> GaussInt {
        GaussInt {
            re: &self.re + &o.re,
            im: &self.im + &o.im,
        }
    }
}

impl Sub for &GaussInt {
    type Output = GaussInt;
    fn sub(self, o: &GaussInt) -> GaussInt {
        GaussInt {
            re: &self.re - &o.re,
            im: &self.im - &o.im,
        }
    }
}

impl Mul for &GaussInt {
    type Output = GaussInt;
    fn mul(self, o: &GaussInt) -> GaussInt {
        GaussInt {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }
}

impl Neg for GaussInt {
    type Output = GaussInt;
    fn neg(self) -> GaussInt {
        GaussInt {
            re: -self.re,
            im: -self.im,
        }
    }
}

/// Determinant by Bareiss fraction-free elimination with row swaps.
/// `columns[j][m]` is entry `(m, j)`.
pub fn bareiss_det(columns: &[Vec<GaussInt>]) -> GaussInt {
    let n = columns.len();
    if n == 0 {
        return GaussInt::one();
    }
    // row-major working copy
    let mut a: Vec<Vec<GaussInt>> = (0..n)
        .map(|m| (0..n).map(|j| columns[j][m].clone()).collect())
        .collect();
    let mut negate = false;
    let mut prev = GaussInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(k, i);
                    negate = !negate;
                }
                None => return GaussInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = &(&a[i][j] * &a[k][k]) - &(&a[i][k] * &a[k][j]);
                a[i][j] = t.div_exact(&prev);
            }
        }
        prev = a[k][k].clone();
    }
    let det = a[n - 1][n - 1].clone();
    if negate {
        -det
    } else {
        det
    }
}

/// Column `v_i(x)` of length `n`: entry `m` is `C(m, i) x^{m−i}`.
pub fn column_v_i(x: &GaussInt, i: usize, n: usize) -> Vec<GaussInt> {
    let mut out = Vec::with_capacity(n);
    let mut power = GaussInt::one();
    for m in 0..n {
        if m < i {
            out.push(GaussInt::zero());
        } else {
            out.push(power.scale(&BigInt::from(binomial_u128(m as u64, i as u64))));
            power = &power * x;
        }
    }
    out
}

/// Exact counterpart of `findiff::partial_dd_column`.
pub fn partial_dd_column(nodes: &[GaussInt], orders: &[u32], len: usize) -> Vec<GaussInt> {
    let n = nodes.len();
    if len < n {
        return vec![GaussInt::zero(); len];
    }
    let max_total = len - n;
    let mut acc = vec![GaussInt::zero(); max_total + 1];
    acc[0] = GaussInt::one();
    for (y, &i) in nodes.iter().zip(orders) {
        let i = i as usize;
        let mut factor = vec![GaussInt::zero(); max_total + 1];
        let mut power = GaussInt::one();
        for (t, slot) in factor.iter_mut().enumerate().skip(i) {
            *slot = power.scale(&BigInt::from(binomial_u128(t as u64, i as u64)));
            power = &power * y;
        }
        let mut next = vec![GaussInt::zero(); max_total + 1];
        for (a, ca) in acc.iter().enumerate() {
            if ca.is_zero() {
                continue;
            }
            for (b, fb) in factor.iter().enumerate().take(max_total + 1 - a) {
                next[a + b] = &next[a + b] + &(ca * fb);
            }
        }
        acc = next;
    }
    (0..len)
        .map(|m| {
            if m + 1 < n {
                GaussInt::zero()
            } else {
                acc[m + 1 - n].clone()
            }
        })
        .collect()
}

/// Exact determinants of the reduction endpoints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactReduction {
    pub det_v0: GaussInt,
    pub det_vr: GaussInt,
    /// `∏ (α − β)^{w}` over directed edges `β → α`.
    pub factor: GaussInt,
}

impl ExactReduction {
    /// `det V_0 = det V_r · ∏ (α − β)^{w}` as an identity of Gaussian integers.
    pub fn identity_holds(&self) -> bool {
        self.det_v0 == &self.det_vr * &self.factor
    }

    pub fn log2_det_v0(&self) -> f64 {
        self.det_v0.log2_abs()
    }

    pub fn log2_det_vr(&self) -> f64 {
        self.det_vr.log2_abs()
    }

    pub fn log2_factor(&self) -> f64 {
        self.factor.log2_abs()
    }
}

/// Whether every root is a Gaussian integer.
pub fn on_lattice(rm: &RootMultiset) -> bool {
    rm.roots().iter().all(|&z| GaussInt::from_complex(z).is_some())
}

/// Rebuilds `V_0` and `V_r` exactly. Errors with `InvalidInput` when a root
/// is off the Gaussian integer lattice.
pub fn exact_reduction(
    rm: &RootMultiset,
    g: &WeightedRootGraph,
    mu: &PotentialVector,
) -> Result<ExactReduction> {
    mu.check_feasible(g)?;
    let nodes: Vec<GaussInt> = rm
        .roots()
        .iter()
        .map(|&z| {
            GaussInt::from_complex(z)
                .ok_or_else(|| Error::InvalidInput(format!("root {z} is not a Gaussian integer")))
        })
        .collect::<Result<_>>()?;
    if mu.mus().len() != nodes.len() {
        return Err(Error::PotentialLength {
            got: mu.mus().len(),
            expected: nodes.len(),
        });
    }
    let n = mu.n();
    let mut v0 = Vec::with_capacity(n);
    for (x, &m) in nodes.iter().zip(mu.mus()) {
        for i in 0..m as usize {
            v0.push(column_v_i(x, i, n));
        }
    }
    let oriented = orient(rm, g)?;
    let mut vr = v0.clone();
    let mut factor = GaussInt::one();
    let mut offset = vec![0usize; nodes.len()];
    for k in 1..nodes.len() {
        offset[k] = offset[k - 1] + mu.mus()[k - 1] as usize;
    }
    for &vertex in oriented.order() {
        let sources = oriented.in_set(vertex);
        let in_weights: Vec<(u32, u32)> = sources
            .iter()
            .map(|&(src, w)| (w, mu.mus()[src]))
            .collect();
        let assignment = assign_columns(&in_weights, mu.mus()[vertex])?;
        for j in 1..=mu.mus()[vertex] as usize {
            let mut col_nodes = vec![nodes[vertex].clone()];
            let mut orders = vec![j as u32 - 1];
            for (pos, order) in assignment.column_nodes(j, &in_weights) {
                col_nodes.push(nodes[sources[pos].0].clone());
                orders.push(order);
            }
            vr[offset[vertex] + j - 1] = partial_dd_column(&col_nodes, &orders, n);
        }
        for &(src, w) in sources {
            factor = &factor * &(&nodes[vertex] - &nodes[src]).pow(w);
        }
    }
    Ok(ExactReduction {
        det_v0: bareiss_det(&v0),
        det_vr: bareiss_det(&vr),
        factor,
    })
}

/// Checks that the lattice nodes are distinct, mirroring [`NodeList`].
pub fn lattice_nodes(points: &[Complex64]) -> Result<Vec<GaussInt>> {
    NodeList::new(points.to_vec())?;
    points
        .iter()
        .map(|&z| {
            GaussInt::from_complex(z)
                .ok_or_else(|| Error::InvalidInput(format!("{z} is not a Gaussian integer")))
        })
        .collect()
}
