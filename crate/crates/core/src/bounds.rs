//! Lower bounds on products of root distances, all in `log₂` scale.

use serde::{Deserialize, Serialize};

use crate::poly::{
    coefficient_inf_norm, expand_from_roots, log2_abs_resultant_with_sqfree_derivative,
    log2_abs_vandermonde_det, log2_mahler_measure, nearest_distinct_distances, separation,
    RootMultiset,
};
use crate::spectral::{
    nuclear_norm, potential_error_terms, potentials_nuclear, potentials_uniform_wmax,
    PotentialVector, Strategy, WeightedRootGraph,
};
use crate::vandermonde::{log2_abs_det_product_formula, ConfluentSpec};
use crate::{Error, Result};

/// Default slack for soundness checks in `log₂` units.
pub const DEFAULT_TOLERANCE: f64 = 1e-6;

fn log2_sqrt3() -> f64 {
    0.5 * 3f64.log2()
}

/// `log₂ ∏_E |α_i − α_j|^{w}`.
pub fn actual_weighted_product(rm: &RootMultiset, g: &WeightedRootGraph) -> f64 {
    let roots = rm.roots();
    g.edges()
        .iter()
        .map(|e| e.w as f64 * (roots[e.i] - roots[e.j]).norm().log2())
        .fold(0.0, |a, b| a + b)
}

/// `log₂ ∏_E |α_i − α_j|`, ignoring weights.
pub fn actual_edge_product(rm: &RootMultiset, g: &WeightedRootGraph) -> f64 {
    let roots = rm.roots();
    g.edges()
        .iter()
        .map(|e| (roots[e.i] - roots[e.j]).norm().log2())
        .fold(0.0, |a, b| a + b)
}

/// `sep > r^{−(r+2)/2} |Δ|^{1/2} M(α)^{1−r}` on the distinct roots.
pub fn classic_sep_bound(rm: &RootMultiset) -> Result<f64> {
    let r = rm.r();
    if r < 2 {
        return Err(Error::SeparationUndefined);
    }
    let rf = r as f64;
    // |Δ|^{1/2} = |det V(α)|
    Ok(-(rf + 2.0) / 2.0 * rf.log2() + log2_abs_vandermonde_det(rm)
        + (1.0 - rf) * log2_mahler_measure(rm, false))
}

/// `|det V(α)| M(α)^{−(r−1)} (r/√3)^{−|E|} r^{−r/2}`.
pub fn dmm_unweighted(rm: &RootMultiset, g: &WeightedRootGraph) -> f64 {
    let rf = rm.r() as f64;
    let edges = g.edges().len() as f64;
    log2_abs_vandermonde_det(rm)
        - (rf - 1.0) * log2_mahler_measure(rm, false)
        - edges * (rf.log2() - log2_sqrt3())
        - rf / 2.0 * rf.log2()
}

/// `log₂` of Eigenwillig's cap `3^{min{d, 2(d−r)}/6}` on `∏ √m_i`.
pub fn eigenwillig_cap_log2(multiplicities: &[u32]) -> f64 {
    let d: u64 = multiplicities.iter().map(|&m| m as u64).sum();
    let r = multiplicities.len() as u64;
    d.min(2 * (d - r)) as f64 / 6.0 * 3f64.log2()
}

/// `log₂` of the AM-GM cap `(d/r)^{r/2}` on `∏ √m_i`.
pub fn amgm_cap_log2(multiplicities: &[u32]) -> f64 {
    let d: u64 = multiplicities.iter().map(|&m| m as u64).sum();
    let r = multiplicities.len() as f64;
    r / 2.0 * (d as f64 / r).log2()
}

/// `log₂ ∏ √m_i`.
pub fn sqrt_multiplicity_product_log2(multiplicities: &[u32]) -> f64 {
    multiplicities.iter().map(|&m| 0.5 * (m as f64).log2()).sum()
}

/// The two subdiscriminant forms of the unweighted bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SdiscForms {
    pub eigenwillig_log2: f64,
    pub amgm_log2: f64,
}

/// `|sDisc|^{1/2} M(f)^{−(r−1)} (r/√3)^{−|E|} r^{−r/2} / cap` with either cap on
/// `∏ √m_i`; the AM-GM form simplifies to `… d^{−r/2}`.
///
/// The square root is taken of `|det V(α)|² ∏ m_i`.
pub fn dmm_sdisc_forms(rm: &RootMultiset, g: &WeightedRootGraph) -> SdiscForms {
    let rf = rm.r() as f64;
    let d = rm.degree() as f64;
    let edges = g.edges().len() as f64;
    let half_log2_sdisc =
        log2_abs_vandermonde_det(rm) + sqrt_multiplicity_product_log2(rm.multiplicities());
    let base = half_log2_sdisc
        - (rf - 1.0) * log2_mahler_measure(rm, true)
        - edges * (rf.log2() - log2_sqrt3());
    SdiscForms {
        eigenwillig_log2: base - rf / 2.0 * rf.log2() - eigenwillig_cap_log2(rm.multiplicities()),
        amgm_log2: base - rf / 2.0 * d.log2(),
    }
}

/// Raising the unweighted bound to `w_max` and paying `(2M)^{w_max}` per edge:
/// `|det V(α)|^{w_max} M(α)^{−((r−1)+|E|) w_max} 2^{−|E| w_max} (r/√3)^{−|E| w_max} r^{−r w_max/2}`.
/// Zero for an empty graph.
pub fn naive_weighted(rm: &RootMultiset, g: &WeightedRootGraph) -> f64 {
    if g.is_empty() {
        return 0.0;
    }
    let rf = rm.r() as f64;
    let wmax = g.w_max() as f64;
    let ew = g.edges().len() as f64 * wmax;
    wmax * log2_abs_vandermonde_det(rm)
        - ((rf - 1.0) * wmax + ew) * log2_mahler_measure(rm, false)
        - ew
        - ew * (rf.log2() - log2_sqrt3())
        - rf * wmax / 2.0 * rf.log2()
}

/// `|det V(α;μ)| M(α)^{−‖μμᵗ−A_w‖∞} (n/√3)^{−ΣC(μ_i,2)−w(E)} n^{−n/2}`.
pub fn weighted_main(rm: &RootMultiset, g: &WeightedRootGraph, mu: &PotentialVector) -> Result<f64> {
    mu.check_feasible(g)?;
    let spec = ConfluentSpec::new(rm.roots().to_vec(), mu.mus().to_vec())?;
    let (inf_norm, sum_choose2) = potential_error_terms(g, mu);
    let n = mu.n() as f64;
    Ok(log2_abs_det_product_formula(&spec)
        - inf_norm as f64 * log2_mahler_measure(rm, false)
        - (sum_choose2 + g.total_weight()) as f64 * (n.log2() - log2_sqrt3())
        - n / 2.0 * n.log2())
}

/// The closed-form nuclear-norm bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NuclearBound {
    pub nuclear_norm: f64,
    pub mu: PotentialVector,
    /// `M(f)^{−2r‖A‖⋆} (n/√3)^{−1.5 r‖A‖⋆ − w(E)} n^{−n/2}`, with `|det V(α;μ)|` dropped.
    pub log2_value: f64,
    /// The same with `|det V(α;μ)|` kept.
    pub log2_value_with_det: f64,
    /// `log₂ |det V(α;μ)|`.
    pub log2_det: f64,
    /// Dropping the determinant is valid only when `|det V(α;μ)| ≥ 1`.
    pub valid_without_det: bool,
    /// [`weighted_main`] at the same potentials.
    pub main_at_mu: f64,
}

/// The nuclear-norm bound with `μ = ⌈√‖A_w‖⋆⌉ (1..1)`; all values zero for an empty graph.
pub fn weighted_nuclear(rm: &RootMultiset, g: &WeightedRootGraph) -> Result<NuclearBound> {
    let mu = potentials_nuclear(g);
    if g.is_empty() {
        return Ok(NuclearBound {
            nuclear_norm: 0.0,
            mu,
            log2_value: 0.0,
            log2_value_with_det: 0.0,
            log2_det: 0.0,
            valid_without_det: true,
            main_at_mu: 0.0,
        });
    }
    let norm = nuclear_norm(g);
    let rf = rm.r() as f64;
    let n = mu.n() as f64;
    let spec = ConfluentSpec::new(rm.roots().to_vec(), mu.mus().to_vec())?;
    let log2_det = log2_abs_det_product_formula(&spec);
    let log2_value = -2.0 * rf * norm * log2_mahler_measure(rm, true)
        - (1.5 * rf * norm + g.total_weight() as f64) * (n.log2() - log2_sqrt3())
        - n / 2.0 * n.log2();
    Ok(NuclearBound {
        nuclear_norm: norm,
        log2_value,
        log2_value_with_det: log2_value + log2_det,
        log2_det,
        valid_without_det: log2_det >= 0.0,
        main_at_mu: weighted_main(rm, g, &mu)?,
        mu,
    })
}

/// Both sides of the multiplicity-weighted nearest-root bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmtBound {
    /// `log₂ ∏_{i∈K} Δ_i^{w_i}`.
    pub lhs_log2: f64,
    /// `log₂( 2^{−d(r+2)} (‖f‖∞‖f̂‖∞)^{−d} M(f)^{1−r} |res(f, f̂′)| )`.
    pub bound_log2: f64,
}

/// Requires `w_i ≤ m_i` on `K`; the right-hand side does not depend on `K` or `w`.
pub fn emt_bound(rm: &RootMultiset, k: &[usize], w: &[u32]) -> Result<EmtBound> {
    if k.len() != w.len() {
        return Err(Error::InvalidInput("K and w differ in length".into()));
    }
    for (&i, &wi) in k.iter().zip(w) {
        let m = *rm
            .multiplicities()
            .get(i)
            .ok_or_else(|| Error::InvalidInput(format!("root index {i} out of range")))?;
        if wi > m {
            return Err(Error::MultiplicityViolated { index: i, w: wi, m });
        }
    }
    let deltas = nearest_distinct_distances(rm)?;
    let lhs_log2 = k
        .iter()
        .zip(w)
        .map(|(&i, &wi)| wi as f64 * deltas[i].log2())
        .sum();
    let d = rm.degree() as f64;
    let r = rm.r() as f64;
    let f_norm = coefficient_inf_norm(&expand_from_roots(rm));
    let fhat_norm = coefficient_inf_norm(&expand_from_roots(&rm.square_free_part()));
    let bound_log2 = -d * (r + 2.0) - d * (f_norm.log2() + fhat_norm.log2())
        + (1.0 - r) * log2_mahler_measure(rm, true)
        + log2_abs_resultant_with_sqfree_derivative(rm);
    Ok(EmtBound {
        lhs_log2,
        bound_log2,
    })
}

/// The quantity a bound entry bounds from below.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    /// `sep(f)`.
    Separation,
    /// `∏_E |α_i − α_j|`.
    EdgeProduct,
    /// `∏_E |α_i − α_j|^{w}`.
    WeightedProduct,
    /// `∏_i Δ_i^{m_i}`.
    NearestDistances,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundEntry {
    pub name: String,
    pub target: Target,
    /// `log₂` of the quantity being bounded.
    pub target_log2: f64,
    /// `None` when the bound does not apply (infeasible potentials, search refused).
    pub log2_value: Option<f64>,
    /// False for entries valid only under the integer-polynomial convention
    /// whose premise fails on this input.
    pub valid: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl BoundEntry {
    fn new(name: impl Into<String>, target: Target, target_log2: f64, value: f64) -> Self {
        Self {
            name: name.into(),
            target,
            target_log2,
            log2_value: Some(value),
            valid: true,
            mu: None,
            n: None,
            note: None,
        }
    }

    pub fn feasible(&self) -> bool {
        self.log2_value.is_some()
    }

    /// `log₂_value ≤ target_log2 + tolerance`, vacuous for inapplicable entries.
    pub fn is_sound(&self, tolerance: f64) -> bool {
        !self.valid || self.log2_value.is_none_or(|v| v <= self.target_log2 + tolerance)
    }
}

/// Term-by-term comparison of the amortized and the naive weighted bound at
/// `μ_i = ⌈√w_max⌉`; every quantity is the magnitude of a `log₂` exponent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermComparison {
    pub mu_value: u32,
    pub n: usize,
    /// `‖μμᵗ − A_w‖∞`.
    pub main_m_exponent: i64,
    /// `((r−1) + |E|) w_max`.
    pub naive_m_exponent: u64,
    pub main_m_exponent_smaller: bool,
    /// `(ΣC(μ_i,2) + w(E)) log₂(n/√3)`.
    pub main_sqrt3_term: f64,
    /// `|E| w_max log₂(r/√3)`.
    pub naive_sqrt3_term: f64,
    /// `(n/2) log₂ n`.
    pub main_nn_term: f64,
    /// `(r w_max/2) log₂ r`.
    pub naive_nn_term: f64,
}

impl TermComparison {
    pub fn m_exponent_gap(&self) -> i64 {
        self.naive_m_exponent as i64 - self.main_m_exponent
    }

    pub fn sqrt3_gap(&self) -> f64 {
        self.naive_sqrt3_term - self.main_sqrt3_term
    }

    pub fn nn_gap(&self) -> f64 {
        self.naive_nn_term - self.main_nn_term
    }
}

/// `None` for an empty graph.
pub fn term_comparison(g: &WeightedRootGraph) -> Option<TermComparison> {
    if g.is_empty() {
        return None;
    }
    let mu = potentials_uniform_wmax(g);
    let (inf_norm, sum_choose2) = potential_error_terms(g, &mu);
    let r = g.r() as f64;
    let n = mu.n() as f64;
    let wmax = g.w_max() as u64;
    let edges = g.edges().len() as u64;
    let naive_m_exponent = (g.r() as u64 - 1 + edges) * wmax;
    Some(TermComparison {
        mu_value: mu.mus()[0],
        n: mu.n(),
        main_m_exponent: inf_norm,
        naive_m_exponent,
        main_m_exponent_smaller: inf_norm < naive_m_exponent as i64,
        main_sqrt3_term: (sum_choose2 + g.total_weight()) as f64 * (n.log2() - log2_sqrt3()),
        naive_sqrt3_term: (edges * wmax) as f64 * (r.log2() - log2_sqrt3()),
        main_nn_term: n / 2.0 * n.log2(),
        naive_nn_term: r * wmax as f64 / 2.0 * r.log2(),
    })
}

/// Potentials chosen by one strategy, or given explicitly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategyOutcome {
    /// Strategy name, or `"explicit"`.
    pub label: String,
    pub mu: Option<Vec<u32>>,
    pub feasible: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl StrategyOutcome {
    pub fn from_strategy(strategy: Strategy, g: &WeightedRootGraph) -> Self {
        match strategy.potentials(g) {
            Ok(mu) => Self::labelled(strategy.name(), &mu, g),
            Err(e) => Self {
                label: strategy.name().into(),
                mu: None,
                feasible: false,
                error: Some(e.to_string()),
            },
        }
    }

    pub fn explicit(mu: &PotentialVector, g: &WeightedRootGraph) -> Self {
        Self::labelled("explicit", mu, g)
    }

    fn labelled(label: &str, mu: &PotentialVector, g: &WeightedRootGraph) -> Self {
        let check = mu.check_feasible(g);
        Self {
            label: label.into(),
            mu: Some(mu.mus().to_vec()),
            feasible: check.is_ok(),
            error: check.err().map(|e| e.to_string()),
        }
    }
}

/// Every bound next to the quantity it bounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    /// `log₂ ∏_E |α_i − α_j|^{w}`.
    pub actual_log2: f64,
    pub entries: Vec<BoundEntry>,
    /// Largest applicable bound on the weighted product.
    pub tightest: Option<String>,
    pub strategies: Vec<StrategyOutcome>,
    pub terms: Option<TermComparison>,
}

impl BoundReport {
    pub fn entry(&self, name: &str) -> Option<&BoundEntry> {
        self.entries.iter().find(|e| e.name == name)
    }

    pub fn unsound_entries(&self, tolerance: f64) -> Vec<&BoundEntry> {
        self.entries.iter().filter(|e| !e.is_sound(tolerance)).collect()
    }

    pub fn all_sound(&self, tolerance: f64) -> bool {
        self.unsound_entries(tolerance).is_empty()
    }
}

/// Name of the amortized bound entry for a strategy label.
pub fn main_entry_name(label: &str) -> String {
    format!("weighted_main[{label}]")
}

/// Evaluates the actual products and every bound; `weighted_main` once per strategy.
pub fn compare_all(
    rm: &RootMultiset,
    g: &WeightedRootGraph,
    strategies: &[Strategy],
) -> Result<BoundReport> {
    let outcomes = strategies
        .iter()
        .map(|&s| StrategyOutcome::from_strategy(s, g))
        .collect();
    compare_with_potentials(rm, g, outcomes)
}

/// As [`compare_all`] but with the potentials already chosen.
pub fn compare_with_potentials(
    rm: &RootMultiset,
    g: &WeightedRootGraph,
    outcomes: Vec<StrategyOutcome>,
) -> Result<BoundReport> {
    if g.r() != rm.r() {
        return Err(Error::InvalidInput(format!(
            "graph has {} vertices but there are {} distinct roots",
            g.r(),
            rm.r()
        )));
    }
    let actual = actual_weighted_product(rm, g);
    let unweighted = actual_edge_product(rm, g);
    let mut entries = Vec::new();

    if let (Ok(sep), Ok(bound)) = (separation(rm), classic_sep_bound(rm)) {
        entries.push(BoundEntry::new("classic_sep", Target::Separation, sep.log2(), bound));
    }
    entries.push(BoundEntry::new(
        "dmm_unweighted",
        Target::EdgeProduct,
        unweighted,
        dmm_unweighted(rm, g),
    ));
    let forms = dmm_sdisc_forms(rm, g);
    entries.push(BoundEntry::new(
        "dmm_sdisc_eigenwillig",
        Target::EdgeProduct,
        unweighted,
        forms.eigenwillig_log2,
    ));
    entries.push(BoundEntry::new(
        "dmm_sdisc_amgm",
        Target::EdgeProduct,
        unweighted,
        forms.amgm_log2,
    ));
    entries.push(BoundEntry::new(
        "naive_weighted",
        Target::WeightedProduct,
        actual,
        naive_weighted(rm, g),
    ));

    for outcome in &outcomes {
        let name = main_entry_name(&outcome.label);
        let mut entry = BoundEntry::new(&name, Target::WeightedProduct, actual, 0.0);
        entry.log2_value = None;
        match &outcome.mu {
            Some(mus) => {
                let mu = PotentialVector::new(mus.clone())?;
                entry.n = Some(mu.n());
                entry.mu = Some(mus.clone());
                match weighted_main(rm, g, &mu) {
                    Ok(v) => entry.log2_value = Some(v),
                    Err(e) => entry.note = Some(e.to_string()),
                }
            }
            None => entry.note = outcome.error.clone(),
        }
        entries.push(entry);
    }

    let nuclear = weighted_nuclear(rm, g)?;
    let mut plain = BoundEntry::new(
        "weighted_nuclear",
        Target::WeightedProduct,
        actual,
        nuclear.log2_value,
    );
    plain.valid = nuclear.valid_without_det;
    plain.mu = Some(nuclear.mu.mus().to_vec());
    plain.n = Some(nuclear.mu.n());
    if !plain.valid {
        plain.note = Some("|det V(α;μ)| < 1: valid only for integer polynomials".into());
    }
    let mut with_det = BoundEntry::new(
        "weighted_nuclear_with_det",
        Target::WeightedProduct,
        actual,
        nuclear.log2_value_with_det,
    );
    with_det.mu = plain.mu.clone();
    with_det.n = plain.n;
    entries.push(plain);
    entries.push(with_det);

    if rm.r() >= 2 {
        let k: Vec<usize> = (0..rm.r()).collect();
        let emt = emt_bound(rm, &k, rm.multiplicities())?;
        entries.push(BoundEntry::new(
            "emt",
            Target::NearestDistances,
            emt.lhs_log2,
            emt.bound_log2,
        ));
    }

    let tightest = entries
        .iter()
        .filter(|e| e.target == Target::WeightedProduct && e.valid)
        .filter_map(|e| e.log2_value.map(|v| (v, &e.name)))
        .fold(None::<(f64, &String)>, |best, (v, name)| match best {
            Some((bv, _)) if bv >= v => best,
            _ => Some((v, name)),
        })
        .map(|(_, name)| name.clone());

    Ok(BoundReport {
        actual_log2: actual,
        entries,
        tightest,
        strategies: outcomes,
        terms: term_comparison(g),
    })
}
