//! Constructive replay of the amortized bound.
//!
//! Edges are directed from the root of smaller modulus to the one of larger
//! modulus. Vertices are processed sinks first, so when a block is rewritten
//! the blocks of its in-neighbours are still the original confluent columns.
//! Column `j` of the block of `α` becomes
//! `f_m^{(j−1, i_1..i_N)}[α, β_1..β_N]` for `f_m = z^{m−1}`, which divides the
//! determinant by `∏ (β_ℓ − α)^{i_ℓ+1}` up to sign. After all blocks,
//! `|det V_0| = |det V_r| · ∏_E |α_i − α_j|^{w}`.

use std::cmp::Ordering;

use num_bigint::BigUint;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::exact::{exact_reduction, on_lattice};
use crate::findiff::{for_each_composition, partial_dd_column, NodeList};
use crate::poly::{log2_mahler_measure, RootMultiset};
use crate::spectral::{potential_error_terms, PotentialVector, WeightedRootGraph};
use crate::vandermonde::{
    build_confluent, log2_abs_det_direct, log2_abs_det_product_formula, ConfluentSpec,
    DenseMatrix,
};
use crate::{binomial_u128, max1, Error, Result};

/// `log₂(1e−300)`: accumulated factors below this are treated as degenerate.
const LOG2_FACTOR_FLOOR: f64 = -996.578_428_466_208_7;

/// Orientation of a weighted root graph by modulus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrientedGraph {
    order: Vec<usize>,
    in_sets: Vec<Vec<(usize, u32)>>,
}

impl OrientedGraph {
    /// Processing order: every vertex precedes all of its in-neighbours.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// `In(α_i)` as `(source, weight)` pairs.
    pub fn in_set(&self, vertex: usize) -> &[(usize, u32)] {
        &self.in_sets[vertex]
    }

    /// `d_i`.
    pub fn in_degree(&self, vertex: usize) -> usize {
        self.in_sets[vertex].len()
    }

    /// `w_i`, the total weight entering the vertex.
    pub fn in_weight(&self, vertex: usize) -> u64 {
        self.in_sets[vertex].iter().map(|&(_, w)| w as u64).sum()
    }

    /// Directed edges `(source, sink, weight)`.
    pub fn directed_edges(&self) -> Vec<(usize, usize, u32)> {
        let mut out = Vec::new();
        for (sink, set) in self.in_sets.iter().enumerate() {
            for &(src, w) in set {
                out.push((src, sink, w));
            }
        }
        out.sort();
        out
    }
}

fn modulus_order(roots: &[Complex64], a: usize, b: usize) -> Ordering {
    let (x, y) = (roots[a], roots[b]);
    x.norm_sqr()
        .total_cmp(&y.norm_sqr())
        .then(x.re.total_cmp(&y.re))
        .then(x.im.total_cmp(&y.im))
        .then(a.cmp(&b))
}

/// Directs each edge from smaller to larger `(|α|, re α, im α, index)`.
pub fn orient(rm: &RootMultiset, g: &WeightedRootGraph) -> Result<OrientedGraph> {
    if g.r() != rm.r() {
        return Err(Error::InvalidInput(format!(
            "graph has {} vertices but there are {} distinct roots",
            g.r(),
            rm.r()
        )));
    }
    let roots = rm.roots();
    let mut in_sets = vec![Vec::new(); rm.r()];
    for e in g.edges() {
        let (src, sink) = match modulus_order(roots, e.i, e.j) {
            Ordering::Less => (e.i, e.j),
            _ => (e.j, e.i),
        };
        in_sets[sink].push((src, e.w));
    }
    let mut order: Vec<usize> = (0..rm.r()).collect();
    order.sort_by(|&a, &b| modulus_order(roots, b, a));
    Ok(OrientedGraph { order, in_sets })
}

/// Assignment of in-edges to the columns of one block.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnAssignment {
    /// `S_1..S_μα` as positions into the in-weight list.
    pub sets: Vec<Vec<usize>>,
    /// `r_ℓ` per in-neighbour.
    pub residues: Vec<u32>,
    /// `N_j` per column.
    pub n_counts: Vec<usize>,
    /// `M_j` per column.
    pub m_values: Vec<u64>,
}

impl ColumnAssignment {
    /// Block size `μ_α`.
    pub fn block_size(&self) -> usize {
        self.sets.len()
    }

    /// In-neighbour positions used by column `j` (1-based), `S_j` first, and the
    /// derivative order `i_ℓ` of each: `r_ℓ − 1` on `S_j`, `μ_ℓ − 1` beyond.
    pub fn column_nodes(&self, j: usize, in_weights: &[(u32, u32)]) -> Vec<(usize, u32)> {
        let mut out = Vec::new();
        for &pos in &self.sets[j - 1] {
            out.push((pos, self.residues[pos] - 1));
        }
        for set in &self.sets[j..] {
            for &pos in set {
                out.push((pos, in_weights[pos].1 - 1));
            }
        }
        out
    }

    /// `Σ_j M_j`.
    pub fn m_sum(&self) -> u64 {
        self.m_values.iter().sum()
    }
}

/// Assigns in-edge `ℓ` with weight `w_ℓ` and source block size `μ_ℓ` to column
/// `⌈w_ℓ/μ_ℓ⌉` of a block of size `mu_alpha`.
pub fn assign_columns(in_weights: &[(u32, u32)], mu_alpha: u32) -> Result<ColumnAssignment> {
    let mu_alpha = mu_alpha as usize;
    if mu_alpha == 0 {
        return Err(Error::InvalidInput("block size zero".into()));
    }
    let mut sets = vec![Vec::new(); mu_alpha];
    let mut residues = Vec::with_capacity(in_weights.len());
    for (pos, &(w, mu)) in in_weights.iter().enumerate() {
        if w == 0 || mu == 0 || w as u64 > mu as u64 * mu_alpha as u64 {
            return Err(Error::InfeasibleInEdge {
                position: pos,
                weight: w,
                mu_source: mu,
                mu_sink: mu_alpha as u32,
            });
        }
        let column = w.div_ceil(mu) as usize;
        sets[column - 1].push(pos);
        residues.push(if w % mu == 0 { mu } else { w % mu });
    }
    let mut n_counts = vec![0; mu_alpha];
    let mut m_values = vec![0u64; mu_alpha];
    for j in (1..=mu_alpha).rev() {
        let later: usize = sets[j..].iter().map(Vec::len).sum();
        n_counts[j - 1] = sets[j - 1].len() + later;
        let own: u64 = sets[j - 1].iter().map(|&p| residues[p] as u64 - 1).sum();
        let beyond: u64 = sets[j..]
            .iter()
            .flatten()
            .map(|&p| in_weights[p].1 as u64 - 1)
            .sum();
        m_values[j - 1] = n_counts[j - 1] as u64 + (j as u64 - 1) + own + beyond;
    }
    Ok(ColumnAssignment {
        sets,
        residues,
        n_counts,
        m_values,
    })
}

/// The evolving matrix and the factor split off so far.
#[derive(Debug, Clone, PartialEq)]
pub struct ReductionState {
    matrix: DenseMatrix,
    log2_factor: f64,
    arg_factor: f64,
    column_m: Vec<u64>,
    assignments: Vec<Option<ColumnAssignment>>,
}

impl ReductionState {
    /// Starts from `V_0 = V(β; μ)`; column `j` of an untouched block has `M_j = j − 1`.
    pub fn new(spec: &ConfluentSpec) -> Self {
        let column_m = spec
            .mus()
            .iter()
            .flat_map(|&mu| 0..mu as u64)
            .collect();
        Self {
            matrix: build_confluent(spec),
            log2_factor: 0.0,
            arg_factor: 0.0,
            column_m,
            assignments: vec![None; spec.mus().len()],
        }
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.matrix
    }

    /// `log₂ |∏ (β_ℓ − α)^{w_ℓ}|` over the blocks processed so far.
    pub fn log2_factor(&self) -> f64 {
        self.log2_factor
    }

    /// Argument of the same product, modulo `2π`.
    pub fn arg_factor(&self) -> f64 {
        self.arg_factor.rem_euclid(std::f64::consts::TAU)
    }

    /// `M_j` of every column, in matrix order.
    pub fn column_m(&self) -> &[u64] {
        &self.column_m
    }

    pub fn assignment(&self, vertex: usize) -> Option<&ColumnAssignment> {
        self.assignments[vertex].as_ref()
    }

    pub fn is_processed(&self, vertex: usize) -> bool {
        self.assignments[vertex].is_some()
    }
}

/// Rewrites the block of `vertex`, right to left, and accumulates the factor.
pub fn replace_block(
    mut state: ReductionState,
    vertex: usize,
    oriented: &OrientedGraph,
    spec: &ConfluentSpec,
) -> Result<ReductionState> {
    let n = spec.n();
    let alpha = spec.betas()[vertex];
    let mu_alpha = spec.mus()[vertex];
    let offset = spec.block_offsets()[vertex];

    let sources = oriented.in_set(vertex);
    if let Some(&(src, _)) = sources.iter().find(|&&(src, _)| state.is_processed(src)) {
        return Err(Error::InvalidInput(format!(
            "in-neighbour {src} of vertex {vertex} was already rewritten"
        )));
    }
    let in_weights: Vec<(u32, u32)> = sources
        .iter()
        .map(|&(src, w)| (w, spec.mus()[src]))
        .collect();
    let assignment = assign_columns(&in_weights, mu_alpha).map_err(|e| match e {
        Error::InfeasibleInEdge { position, .. } => {
            let (src, w) = sources[position];
            Error::InfeasibleEdge {
                i: src.min(vertex),
                j: src.max(vertex),
                weight: w,
                mu_i: spec.mus()[src.min(vertex)],
                mu_j: spec.mus()[src.max(vertex)],
            }
        }
        other => other,
    })?;

    for j in (1..=mu_alpha as usize).rev() {
        let used = assignment.column_nodes(j, &in_weights);
        let mut nodes = vec![alpha];
        let mut orders = vec![j as u32 - 1];
        for &(pos, order) in &used {
            nodes.push(spec.betas()[sources[pos].0]);
            orders.push(order);
        }
        let column = partial_dd_column(&NodeList::new(nodes)?, &orders, n)?;
        state.matrix.set_column(offset + j - 1, &column);
        state.column_m[offset + j - 1] = assignment.m_values[j - 1];
    }

    for &(src, w) in sources {
        let diff = alpha - spec.betas()[src];
        state.log2_factor += w as f64 * diff.norm().log2();
        state.arg_factor += w as f64 * diff.arg();
    }
    if state.log2_factor < LOG2_FACTOR_FLOOR {
        return Err(Error::Degenerate(format!(
            "accumulated factor 2^{:.1} underflows",
            state.log2_factor
        )));
    }
    state.assignments[vertex] = Some(assignment);
    Ok(state)
}

/// How the determinants in a [`ReductionOutcome`] were obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeterminantMethod {
    /// Fraction-free elimination over the Gaussian integers.
    Exact,
    /// Floating-point LU with partial pivoting.
    Elimination,
}

/// Floating-point LU determinants of the replayed matrices.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EliminationCheck {
    pub log2_det_v0: f64,
    pub log2_det_vr: f64,
    pub residual: f64,
}

/// Result of a full reduction `V_0 → V_r`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReductionOutcome {
    pub spec: ConfluentSpec,
    pub oriented: OrientedGraph,
    pub v0: DenseMatrix,
    pub v_r: DenseMatrix,
    /// `Σ_E w · log₂ |α_i − α_j|`.
    pub log2_factor: f64,
    pub method: DeterminantMethod,
    /// `log₂ |det V_0|`.
    pub log2_det_v0: f64,
    /// `log₂ |det V_0|` by the product formula.
    pub log2_det_v0_formula: f64,
    /// `log₂ |det V_r|`.
    pub log2_det_vr: f64,
    /// `|log₂|det V_0| − log₂|det V_r| − log2_factor|`.
    pub residual: f64,
    /// `det V_0 = det V_r · ∏ (α − β)^{w}` as an exact identity, when exact.
    pub exact_identity: Option<bool>,
    /// LU on the floating-point matrices; `None` when either is numerically singular.
    pub elimination: Option<EliminationCheck>,
    /// `M_j` of every column of `V_r`, in matrix order.
    pub column_m: Vec<u64>,
    /// Column assignment per vertex.
    pub assignments: Vec<ColumnAssignment>,
}

/// Processes every vertex and checks `det V_0 = det V_r · ∏ (α_i − α_j)^{w}` in magnitude.
///
/// Determinants are exact when every root is a Gaussian integer and come from
/// floating-point LU otherwise; the LU values are reported in both cases.
pub fn run_reduction(
    rm: &RootMultiset,
    g: &WeightedRootGraph,
    mu: &PotentialVector,
) -> Result<ReductionOutcome> {
    mu.check_feasible(g)?;
    let spec = ConfluentSpec::new(rm.roots().to_vec(), mu.mus().to_vec())?;
    let oriented = orient(rm, g)?;
    let mut state = ReductionState::new(&spec);
    let v0 = state.matrix.clone();
    for &vertex in oriented.order() {
        state = replace_block(state, vertex, &oriented, &spec)?;
    }
    let elimination = match (log2_abs_det_direct(&v0), log2_abs_det_direct(&state.matrix)) {
        (Some(a), Some(b)) => Some(EliminationCheck {
            log2_det_v0: a,
            log2_det_vr: b,
            residual: (a - b - state.log2_factor).abs(),
        }),
        _ => None,
    };
    let (method, log2_det_v0, log2_det_vr, exact_identity) = if on_lattice(rm) {
        let ex = exact_reduction(rm, g, mu)?;
        if ex.det_vr.is_zero() {
            return Err(Error::Degenerate("V_r is singular".into()));
        }
        let holds = ex.identity_holds();
        (DeterminantMethod::Exact, ex.log2_det_v0(), ex.log2_det_vr(), Some(holds))
    } else {
        let e = elimination
            .ok_or_else(|| Error::Degenerate("V_0 or V_r is numerically singular".into()))?;
        (DeterminantMethod::Elimination, e.log2_det_v0, e.log2_det_vr, None)
    };
    Ok(ReductionOutcome {
        log2_det_v0_formula: log2_abs_det_product_formula(&spec),
        spec,
        oriented,
        v0,
        v_r: state.matrix,
        log2_factor: state.log2_factor,
        method,
        log2_det_v0,
        log2_det_vr,
        residual: (log2_det_v0 - log2_det_vr - state.log2_factor).abs(),
        exact_identity,
        elimination,
        column_m: state.column_m,
        assignments: state
            .assignments
            .into_iter()
            .map(|a| a.expect("every vertex is processed"))
            .collect(),
    })
}

/// `max₁|α|^{n−1−M} (n/√3)^M √n`, bounding the two-norm of a column with parameter `M`.
pub fn column_norm_bound(alpha: Complex64, m_j: u64, n: usize) -> Result<f64> {
    log2_column_norm_bound(alpha, m_j, n).map(f64::exp2)
}

/// `log₂` of [`column_norm_bound`].
pub fn log2_column_norm_bound(alpha: Complex64, m_j: u64, n: usize) -> Result<f64> {
    if m_j >= n as u64 {
        return Err(Error::ColumnVanishes { m_j, n });
    }
    let nf = n as f64;
    Ok((n as u64 - 1 - m_j) as f64 * max1(alpha).log2()
        + m_j as f64 * (nf / 3f64.sqrt()).log2()
        + 0.5 * nf.log2())
}

/// `Σ_{m=M}^{n−1} C(m, M)²`, exactly.
pub fn binom_sq_sum(n: u64, m: u64) -> u128 {
    (m..n).map(|k| binomial_u128(k, m).pow(2)).sum()
}

/// `Σ ∏_ℓ C(i_ℓ + j_ℓ, i_ℓ)` over all `j_0 + … + j_N = total`, by enumeration.
///
/// With `Σ (i_ℓ + 1) = M + 1` and `total = m − 1 − M` this is the coefficient
/// of `x^{m−1−M}` in `∏ (1 − x)^{−(i_ℓ+1)}`, i.e. `C(m − 1, M)`.
pub fn composition_binomial_sum(total: usize, orders: &[u32]) -> u128 {
    let mut acc = 0u128;
    for_each_composition(total, orders.len(), |js| {
        acc += js
            .iter()
            .zip(orders)
            .map(|(&j, &i)| binomial_u128(i as u64 + j as u64, i as u64))
            .product::<u128>();
    });
    acc
}

/// Exact test of `Σ_{m=M}^{n−1} C(m,M)² ≤ (n/√3)^{2M} n`, i.e. `S · 3^M ≤ n^{2M+1}`.
pub fn binom_sq_sum_within_bound(n: u64, m: u64) -> bool {
    let lhs = BigUint::from(binom_sq_sum(n, m)) * BigUint::from(3u32).pow(m as u32);
    let rhs = BigUint::from(n).pow(2 * m as u32 + 1);
    lhs <= rhs
}

/// Two-norm check of one column of `V_r`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnCheck {
    pub vertex: usize,
    /// 1-based column within the block.
    pub column: usize,
    pub m_j: u64,
    pub norm_log2: f64,
    /// `None` when `M_j ≥ n`.
    pub bound_log2: Option<f64>,
    pub ok: bool,
}

/// `Σ_j M_j = C(μ_i, 2) + w_i` for one vertex.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MSumCheck {
    pub vertex: usize,
    pub m_sum: u64,
    pub expected: u64,
    pub ok: bool,
}

/// Margins of the Hadamard chain, all in `log₂` units; non-negative means satisfied.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HadamardReport {
    pub columns: Vec<ColumnCheck>,
    pub m_sums: Vec<MSumCheck>,
    pub log2_det_vr: f64,
    pub log2_column_norm_product: f64,
    /// `Σ log₂‖col‖ − log₂|det V_r|`.
    pub hadamard_margin: f64,
    /// `log₂( M(α)^{‖μμᵗ−A_w‖∞} (n/√3)^{ΣC(μ_i,2)+w(E)} n^{n/2} )`.
    pub closing_bound_log2: f64,
    /// `closing_bound_log2 − log₂|det V_r|`.
    pub closing_margin: f64,
    pub tolerance: f64,
}

impl HadamardReport {
    pub fn columns_ok(&self) -> bool {
        self.columns.iter().all(|c| c.ok)
    }

    pub fn m_sums_ok(&self) -> bool {
        self.m_sums.iter().all(|c| c.ok)
    }

    pub fn all_ok(&self) -> bool {
        self.columns_ok()
            && self.m_sums_ok()
            && self.hadamard_margin >= -self.tolerance
            && self.closing_margin >= -self.tolerance
    }
}

/// Per-column norms against their bounds, the `Σ M_j` identity per vertex,
/// Hadamard's inequality on `V_r`, and the closing bound on `|det V_r|`.
///
/// `tolerance` absorbs rounding in the measured `log₂|det V_r|`; per-column
/// checks use a relative slack of `1e−9`.
pub fn hadamard_chain_check(
    outcome: &ReductionOutcome,
    rm: &RootMultiset,
    g: &WeightedRootGraph,
    mu: &PotentialVector,
    tolerance: f64,
) -> HadamardReport {
    let n = outcome.spec.n();
    let offsets = outcome.spec.block_offsets();
    let column_slack = (1.0 + 1e-9f64).log2();
    let mut columns = Vec::new();
    let mut m_sums = Vec::new();
    let mut norm_product = 0.0;
    for (vertex, &alpha) in rm.roots().iter().enumerate() {
        let mu_i = mu.mus()[vertex] as usize;
        for j in 1..=mu_i {
            let col = offsets[vertex] + j - 1;
            let m_j = outcome.column_m[col];
            let norm_log2 = outcome.v_r.column_norm(col).log2();
            norm_product += norm_log2;
            let bound_log2 = log2_column_norm_bound(alpha, m_j, n).ok();
            let ok = bound_log2.is_some_and(|b| norm_log2 <= b + column_slack);
            columns.push(ColumnCheck {
                vertex,
                column: j,
                m_j,
                norm_log2,
                bound_log2,
                ok,
            });
        }
        let m_sum = outcome.assignments[vertex].m_sum();
        let expected = (mu_i * mu_i.saturating_sub(1) / 2) as u64 + outcome.oriented.in_weight(vertex);
        m_sums.push(MSumCheck {
            vertex,
            m_sum,
            expected,
            ok: m_sum == expected,
        });
    }
    let (inf_norm, sum_choose2) = potential_error_terms(g, mu);
    let nf = n as f64;
    let closing_bound_log2 = inf_norm as f64 * log2_mahler_measure(rm, false)
        + (sum_choose2 + g.total_weight()) as f64 * (nf / 3f64.sqrt()).log2()
        + 0.5 * nf * nf.log2();
    HadamardReport {
        columns,
        m_sums,
        log2_det_vr: outcome.log2_det_vr,
        log2_column_norm_product: norm_product,
        hadamard_margin: norm_product - outcome.log2_det_vr,
        closing_bound_log2,
        closing_margin: closing_bound_log2 - outcome.log2_det_vr,
        tolerance,
    }
}
