//! Weighted root graphs, symmetric eigenvalues and potential selection.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Undirected edge between root indices `i < j` with positive integer weight.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Edge {
    pub i: usize,
    pub j: usize,
    pub w: u32,
}

/// Simple undirected graph on the root index space `0..r`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightedRootGraph {
    r: usize,
    edges: Vec<Edge>,
}

impl WeightedRootGraph {
    /// Endpoints are normalized to `i < j` and edges sorted.
    pub fn new(r: usize, edges: impl IntoIterator<Item = (usize, usize, u32)>) -> Result<Self> {
        let mut out: Vec<Edge> = Vec::new();
        for (a, b, w) in edges {
            if a == b {
                return Err(Error::InvalidInput(format!("self-loop at vertex {a}")));
            }
            if a >= r || b >= r {
                return Err(Error::InvalidInput(format!(
                    "edge ({a}, {b}) references a vertex outside 0..{r}"
                )));
            }
            if w == 0 {
                return Err(Error::InvalidInput(format!("edge ({a}, {b}) has weight zero")));
            }
            out.push(Edge {
                i: a.min(b),
                j: a.max(b),
                w,
            });
        }
        out.sort();
        if let Some(pair) = out.windows(2).find(|p| (p[0].i, p[0].j) == (p[1].i, p[1].j)) {
            return Err(Error::InvalidInput(format!(
                "duplicate edge ({}, {})",
                pair[0].i, pair[0].j
            )));
        }
        Ok(Self { r, edges: out })
    }

    pub fn empty(r: usize) -> Self {
        Self { r, edges: Vec::new() }
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// `w(E)`.
    pub fn total_weight(&self) -> u64 {
        self.edges.iter().map(|e| e.w as u64).sum()
    }

    pub fn w_max(&self) -> u32 {
        self.edges.iter().map(|e| e.w).max().unwrap_or(0)
    }

    /// `A_w` as integers.
    pub fn adjacency(&self) -> Vec<Vec<u32>> {
        let mut a = vec![vec![0; self.r]; self.r];
        for e in &self.edges {
            a[e.i][e.j] = e.w;
            a[e.j][e.i] = e.w;
        }
        a
    }

    pub fn adjacency_f64(&self) -> Vec<Vec<f64>> {
        self.adjacency()
            .into_iter()
            .map(|row| row.into_iter().map(f64::from).collect())
            .collect()
    }

    /// True when every vertex is reachable from vertex 0.
    pub fn is_connected(&self) -> bool {
        if self.r == 0 {
            return true;
        }
        let mut seen = vec![false; self.r];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for e in &self.edges {
                let other = if e.i == v {
                    e.j
                } else if e.j == v {
                    e.i
                } else {
                    continue;
                };
                if !seen[other] {
                    seen[other] = true;
                    stack.push(other);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }
}

/// Positive integer potentials `μ_1..μ_r`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PotentialVector {
    mus: Vec<u32>,
}

impl PotentialVector {
    pub fn new(mus: Vec<u32>) -> Result<Self> {
        if let Some(k) = mus.iter().position(|&m| m == 0) {
            return Err(Error::InvalidInput(format!("potential {k} is zero")));
        }
        Ok(Self { mus })
    }

    pub fn ones(r: usize) -> Self {
        Self { mus: vec![1; r] }
    }

    pub fn uniform(r: usize, value: u32) -> Self {
        Self {
            mus: vec![value.max(1); r],
        }
    }

    pub fn mus(&self) -> &[u32] {
        &self.mus
    }

    /// `n = Σ μ_i`.
    pub fn n(&self) -> usize {
        self.mus.iter().map(|&m| m as usize).sum()
    }

    /// `Σ C(μ_i, 2)`.
    pub fn sum_choose2(&self) -> u64 {
        self.mus
            .iter()
            .map(|&m| m as u64 * (m as u64).saturating_sub(1) / 2)
            .sum()
    }

    /// Checks length and `w ≤ μ_i μ_j` on every edge.
    pub fn check_feasible(&self, g: &WeightedRootGraph) -> Result<()> {
        if self.mus.len() != g.r() {
            return Err(Error::PotentialLength {
                got: self.mus.len(),
                expected: g.r(),
            });
        }
        for e in g.edges() {
            let (mi, mj) = (self.mus[e.i], self.mus[e.j]);
            if e.w as u64 > mi as u64 * mj as u64 {
                return Err(Error::InfeasibleEdge {
                    i: e.i,
                    j: e.j,
                    weight: e.w,
                    mu_i: mi,
                    mu_j: mj,
                });
            }
        }
        Ok(())
    }

    pub fn is_feasible(&self, g: &WeightedRootGraph) -> bool {
        self.check_feasible(g).is_ok()
    }
}

impl fmt::Display for PotentialVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.mus.iter().map(u32::to_string).collect();
        f.write_str(&parts.join(","))
    }
}

impl FromStr for PotentialVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mus = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<u32>()
                    .map_err(|_| Error::InvalidInput(format!("bad potential entry {t:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(mus)
    }
}

const JACOBI_MAX_SWEEPS: usize = 100;

/// Eigenvalues of a real symmetric matrix by cyclic Jacobi rotations, ascending.
///
/// Sweeps until the off-diagonal Frobenius mass is at most `1e−12 ‖A‖_F`.
pub fn jacobi_eigenvalues(a: &[Vec<f64>]) -> Result<Vec<f64>> {
    let n = a.len();
    if a.iter().any(|row| row.len() != n) {
        return Err(Error::InvalidInput("matrix is not square".into()));
    }
    let scale = a.iter().flatten().map(|x| x.abs()).fold(0.0, f64::max).max(1.0);
    for i in 0..n {
        for j in i + 1..n {
            if (a[i][j] - a[j][i]).abs() > 1e-12 * scale {
                return Err(Error::NotSymmetric);
            }
        }
    }
    let mut m: Vec<Vec<f64>> = a.to_vec();
    let frob = m.iter().flatten().map(|x| x * x).sum::<f64>().sqrt();
    let off = |m: &Vec<Vec<f64>>| {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += m[i][j] * m[i][j];
                }
            }
        }
        s.sqrt()
    };

    let mut sweeps = 0;
    while off(&m) > 1e-12 * frob {
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::NoConvergence(JACOBI_MAX_SWEEPS));
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[p][q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (m[q][q] - m[p][p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (mkp, mkq) = (m[k][p], m[k][q]);
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let (mpk, mqk) = (m[p][k], m[q][k]);
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
            }
        }
    }
    let mut eig: Vec<f64> = (0..n).map(|i| m[i][i]).collect();
    eig.sort_by(f64::total_cmp);
    Ok(eig)
}

/// `‖A_w‖⋆ = Σ |λ_k|`.
pub fn nuclear_norm(g: &WeightedRootGraph) -> f64 {
    if g.is_empty() {
        return 0.0;
    }
    jacobi_eigenvalues(&g.adjacency_f64())
        .expect("adjacency matrices are symmetric and small")
        .iter()
        .map(|l| l.abs())
        .sum()
}

/// Smallest integer `c` with `c² ≥ x`, tolerant of rounding in `x`.
pub(crate) fn ceil_sqrt(x: f64) -> u32 {
    let mut c = x.max(0.0).sqrt().ceil() as u32;
    while c > 0 {
        let below = (c - 1) as f64;
        if below * below >= x * (1.0 - 1e-9) {
            c -= 1;
        } else {
            break;
        }
    }
    c
}

/// `⌈√‖A_w‖⋆⌉ · (1..1)`; all-ones for an empty graph.
pub fn potentials_nuclear(g: &WeightedRootGraph) -> PotentialVector {
    if g.is_empty() {
        return PotentialVector::ones(g.r());
    }
    PotentialVector::uniform(g.r(), ceil_sqrt(nuclear_norm(g)))
}

/// `⌈√w_max⌉ · (1..1)`; all-ones for an empty graph.
pub fn potentials_uniform_wmax(g: &WeightedRootGraph) -> PotentialVector {
    if g.is_empty() {
        return PotentialVector::ones(g.r());
    }
    PotentialVector::uniform(g.r(), ceil_sqrt(g.w_max() as f64))
}

/// Feasible `μ ∈ [1, cap]^r` minimizing `‖μμᵗ − A_w‖∞`; ties go to the smaller
/// `n`, then to the lexicographically smaller vector.
pub fn potentials_exhaustive(g: &WeightedRootGraph, cap: u32) -> Result<PotentialVector> {
    let r = g.r();
    if r > 8 {
        return Err(Error::SearchTooLarge(r));
    }
    if g.is_empty() {
        return Ok(PotentialVector::ones(r));
    }
    let needed = ceil_sqrt(g.w_max() as f64);
    if cap < needed {
        return Err(Error::InvalidInput(format!(
            "cap {cap} is below ⌈√w_max⌉ = {needed}"
        )));
    }
    let mut current = vec![1u32; r];
    let mut best: Option<(i64, usize, Vec<u32>)> = None;
    loop {
        let candidate = PotentialVector {
            mus: current.clone(),
        };
        if candidate.is_feasible(g) {
            let (obj, _) = potential_error_terms(g, &candidate);
            let key = (obj, candidate.n());
            if best.as_ref().is_none_or(|b| key < (b.0, b.1)) {
                best = Some((obj, candidate.n(), current.clone()));
            }
        }
        // odometer, last coordinate fastest, so the scan is lexicographic
        let mut k = r;
        loop {
            if k == 0 {
                let (_, _, mus) = best.expect("uniform ⌈√w_max⌉ lies in the search box");
                return Ok(PotentialVector { mus });
            }
            k -= 1;
            if current[k] < cap {
                current[k] += 1;
                break;
            }
            current[k] = 1;
        }
    }
}

/// Default search cap: large enough for every `w ≤ μ_i μ_j` with one side equal to one.
pub fn default_exhaustive_cap(g: &WeightedRootGraph) -> u32 {
    g.w_max().max(1)
}

/// `(‖μμᵗ − A_w‖∞, Σ C(μ_i, 2))`, both exact.
pub fn potential_error_terms(g: &WeightedRootGraph, mu: &PotentialVector) -> (i64, u64) {
    let a = g.adjacency();
    let inf_norm = (0..g.r())
        .map(|i| {
            (0..g.r())
                .map(|j| (mu.mus[i] as i64 * mu.mus[j] as i64 - a[i][j] as i64).abs())
                .sum::<i64>()
        })
        .max()
        .unwrap_or(0);
    (inf_norm, mu.sum_choose2())
}

/// Potential-selection strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    /// `μ = (1..1)`, feasible only for unit weights.
    Ones,
    /// `μ_i = ⌈√w_max⌉`.
    Uniform,
    /// `μ_i = ⌈√‖A_w‖⋆⌉`.
    Nuclear,
    /// Integer search for `r ≤ 8`.
    Exhaustive,
}

impl Strategy {
    pub const ALL: [Strategy; 4] = [
        Strategy::Ones,
        Strategy::Uniform,
        Strategy::Nuclear,
        Strategy::Exhaustive,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::Ones => "ones",
            Strategy::Uniform => "uniform",
            Strategy::Nuclear => "nuclear",
            Strategy::Exhaustive => "exhaustive",
        }
    }

    /// The strategy's potentials. `Ones` is returned even when infeasible.
    pub fn potentials(self, g: &WeightedRootGraph) -> Result<PotentialVector> {
        match self {
            Strategy::Ones => Ok(PotentialVector::ones(g.r())),
            Strategy::Uniform => Ok(potentials_uniform_wmax(g)),
            Strategy::Nuclear => Ok(potentials_nuclear(g)),
            Strategy::Exhaustive => potentials_exhaustive(g, default_exhaustive_cap(g)),
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Strategy::ALL
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown strategy {s:?}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn single_edge(w: u32) -> WeightedRootGraph {
        WeightedRootGraph::new(2, [(0, 1, w)]).unwrap()
    }

    fn triangle() -> WeightedRootGraph {
        WeightedRootGraph::new(3, [(0, 1, 1), (1, 2, 1), (0, 2, 1)]).unwrap()
    }

    #[test]
    fn graph_validation() {
        assert!(WeightedRootGraph::new(2, [(0, 0, 1)]).is_err());
        assert!(WeightedRootGraph::new(2, [(0, 2, 1)]).is_err());
        assert!(WeightedRootGraph::new(2, [(0, 1, 0)]).is_err());
        assert!(WeightedRootGraph::new(2, [(0, 1, 1), (1, 0, 2)]).is_err());
        let g = WeightedRootGraph::new(3, [(2, 0, 4), (0, 1, 2)]).unwrap();
        assert_eq!(g.edges()[1], Edge { i: 0, j: 2, w: 4 });
        assert_eq!(g.total_weight(), 6);
        assert_eq!(g.w_max(), 4);
        assert!(g.is_connected());
        assert!(!WeightedRootGraph::new(3, [(0, 1, 1)]).unwrap().is_connected());
    }

    #[test]
    fn jacobi_examples() {
        let e = jacobi_eigenvalues(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert_abs_diff_eq!(e[0], -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(e[1], 1.0, epsilon = 1e-12);
        let e = jacobi_eigenvalues(&[vec![3.0, 0.0], vec![0.0, 5.0]]).unwrap();
        assert_eq!(e, vec![3.0, 5.0]);
        let e = jacobi_eigenvalues(&[vec![0.0, 2.0], vec![2.0, 0.0]]).unwrap();
        assert_abs_diff_eq!(e[0], -2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(e[1], 2.0, epsilon = 1e-12);
        assert_eq!(
            jacobi_eigenvalues(&[vec![0.0, 1.0], vec![2.0, 0.0]]),
            Err(Error::NotSymmetric)
        );
    }

    #[test]
    fn nuclear_norm_examples() {
        assert_abs_diff_eq!(nuclear_norm(&single_edge(2)), 4.0, epsilon = 1e-12);
        assert_eq!(nuclear_norm(&WeightedRootGraph::empty(3)), 0.0);
        assert_abs_diff_eq!(nuclear_norm(&triangle()), 4.0, epsilon = 1e-12);
    }

    #[test]
    fn nuclear_potentials() {
        let mu = potentials_nuclear(&single_edge(2));
        assert_eq!(mu.mus(), &[2, 2]);
        assert_eq!(mu.n(), 4);
        // ‖A‖⋆ = 2 for a unit edge, so ⌈√2⌉ = 2 even though (1,1) is feasible
        assert_eq!(potentials_nuclear(&single_edge(1)).mus(), &[2, 2]);
        assert_eq!(potentials_nuclear(&triangle()).mus(), &[2, 2, 2]);
        assert_eq!(potentials_nuclear(&WeightedRootGraph::empty(2)).mus(), &[1, 1]);
    }

    #[test]
    fn uniform_potentials() {
        assert_eq!(potentials_uniform_wmax(&single_edge(4)).mus(), &[2, 2]);
        assert_eq!(potentials_uniform_wmax(&single_edge(5)).mus(), &[3, 3]);
        assert_eq!(potentials_uniform_wmax(&single_edge(1)).mus(), &[1, 1]);
        assert_eq!(potentials_uniform_wmax(&WeightedRootGraph::empty(3)).mus(), &[1, 1, 1]);
    }

    #[test]
    fn exhaustive_potentials() {
        let g = single_edge(1);
        let mu = potentials_exhaustive(&g, 2).unwrap();
        assert_eq!(mu.mus(), &[1, 1]);
        assert_eq!(potential_error_terms(&g, &mu).0, 1);

        let g = single_edge(4);
        let mu = potentials_exhaustive(&g, 3).unwrap();
        assert_eq!(mu.mus(), &[2, 2]);
        assert_eq!(potential_error_terms(&g, &mu).0, 4);
        assert_eq!(potential_error_terms(&g, &PotentialVector::new(vec![1, 4]).unwrap()).0, 16);

        assert_eq!(
            potentials_exhaustive(&WeightedRootGraph::empty(2), 1).unwrap().mus(),
            &[1, 1]
        );
        assert_eq!(
            potentials_exhaustive(&WeightedRootGraph::empty(9), 2),
            Err(Error::SearchTooLarge(9))
        );
        assert!(potentials_exhaustive(&single_edge(5), 2).is_err());
    }

    #[test]
    fn error_term_examples() {
        let g = single_edge(1);
        assert_eq!(potential_error_terms(&g, &PotentialVector::ones(2)), (1, 0));
        let g = single_edge(2);
        let mu = PotentialVector::new(vec![2, 2]).unwrap();
        assert_eq!(potential_error_terms(&g, &mu), (6, 2));
        let g = WeightedRootGraph::empty(4);
        assert_eq!(potential_error_terms(&g, &PotentialVector::ones(4)), (4, 0));
    }

    #[test]
    fn feasibility_names_edge() {
        let g = single_edge(5);
        let mu = PotentialVector::new(vec![1, 2]).unwrap();
        assert_eq!(
            mu.check_feasible(&g),
            Err(Error::InfeasibleEdge {
                i: 0,
                j: 1,
                weight: 5,
                mu_i: 1,
                mu_j: 2
            })
        );
        assert!(matches!(
            PotentialVector::ones(3).check_feasible(&g),
            Err(Error::PotentialLength { got: 3, expected: 2 })
        ));
    }

    #[test]
    fn parse_potentials_and_strategies() {
        let mu: PotentialVector = "2, 3,1".parse().unwrap();
        assert_eq!(mu.mus(), &[2, 3, 1]);
        assert_eq!(mu.to_string(), "2,3,1");
        assert!("2,0".parse::<PotentialVector>().is_err());
        assert!("2,x".parse::<PotentialVector>().is_err());
        assert_eq!("nuclear".parse::<Strategy>().unwrap(), Strategy::Nuclear);
        assert!("best".parse::<Strategy>().is_err());
    }

    #[test]
    fn ceil_sqrt_is_robust() {
        assert_eq!(ceil_sqrt(4.0), 2);
        assert_eq!(ceil_sqrt(4.0 + 1e-12), 2);
        assert_eq!(ceil_sqrt(3.999_999_999_999), 2);
        assert_eq!(ceil_sqrt(4.01), 3);
        assert_eq!(ceil_sqrt(1.0), 1);
        assert_eq!(ceil_sqrt(0.0), 0);
    }
}
