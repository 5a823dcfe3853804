//! JSON documents: instances in, reports out.
//!
//! Indices are 0-based. An instance gives either its distinct roots (with
//! optional multiplicities) or polynomial coefficients, lowest degree first;
//! in the latter case edges refer to the clustered roots sorted by real then
//! imaginary part, and every report is flagged as approximate.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bounds::{BoundReport, StrategyOutcome};
use crate::poly::RootMultiset;
use crate::reduction::{
    hadamard_chain_check, run_reduction, DeterminantMethod, EliminationCheck, HadamardReport,
};
use crate::roots::{roots_from_coefficients, ApproximateRoots};
use crate::spectral::{PotentialVector, Strategy, WeightedRootGraph};
use crate::{Error, Result};

pub const INSTANCE_SCHEMA: &str = "dmm-instance/1";
pub const REPORT_SCHEMA: &str = "dmm-report/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schema: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub roots: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub multiplicities: Option<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coefficients: Option<Vec<[f64; 2]>>,
    #[serde(default)]
    pub edges: Vec<(usize, usize, u32)>,
}

/// A validated instance.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub roots: RootMultiset,
    pub graph: WeightedRootGraph,
    /// Present when the roots were computed from coefficients.
    pub approximation: Option<ApproximateRoots>,
}

impl Instance {
    pub fn is_approximate(&self) -> bool {
        self.approximation.is_some()
    }
}

fn to_complex(pairs: &[[f64; 2]]) -> Vec<Complex64> {
    pairs.iter().map(|&[re, im]| Complex64::new(re, im)).collect()
}

impl InstanceDocument {
    pub fn from_instance(rm: &RootMultiset, g: &WeightedRootGraph) -> Self {
        Self {
            schema: Some(INSTANCE_SCHEMA.into()),
            roots: Some(rm.roots().iter().map(|z| [z.re, z.im]).collect()),
            multiplicities: Some(rm.multiplicities().to_vec()),
            coefficients: None,
            edges: g.edges().iter().map(|e| (e.i, e.j, e.w)).collect(),
        }
    }

    pub fn resolve(&self) -> Result<Instance> {
        if let Some(schema) = &self.schema {
            if schema != INSTANCE_SCHEMA {
                return Err(Error::InvalidInput(format!(
                    "unsupported schema {schema:?}, expected {INSTANCE_SCHEMA:?}"
                )));
            }
        }
        let (roots, approximation) = match (&self.roots, &self.coefficients) {
            (Some(roots), None) => {
                let roots = to_complex(roots);
                let rm = match &self.multiplicities {
                    Some(m) => RootMultiset::new(roots, m.clone())?,
                    None => RootMultiset::simple(roots)?,
                };
                (rm, None)
            }
            (None, Some(coefficients)) => {
                if self.multiplicities.is_some() {
                    return Err(Error::InvalidInput(
                        "multiplicities are derived from coefficients and cannot be given".into(),
                    ));
                }
                let approx = roots_from_coefficients(&to_complex(coefficients))?;
                (approx.multiset.clone(), Some(approx))
            }
            _ => {
                return Err(Error::InvalidInput(
                    "exactly one of `roots` and `coefficients` is required".into(),
                ))
            }
        };
        let graph = WeightedRootGraph::new(roots.r(), self.edges.iter().copied())?;
        Ok(Instance {
            roots,
            graph,
            approximation,
        })
    }
}

/// Parses and validates an instance document.
pub fn parse_instance(json: &str) -> Result<Instance> {
    let doc: InstanceDocument =
        serde_json::from_str(json).map_err(|e| Error::InvalidInput(format!("malformed JSON: {e}")))?;
    doc.resolve()
}

/// One replay of the column reduction at fixed potentials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReductionSummary {
    /// Strategy name, or `"explicit"`.
    pub label: String,
    pub mu: Vec<u32>,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub method: Option<DeterminantMethod>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub log2_det_v0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub log2_det_v0_formula: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub log2_det_vr: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub log2_factor: Option<f64>,
    /// `|log₂|det V_0| − log₂|det V_r| − log2_factor|`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    /// Exact Gaussian-integer identity, for lattice roots.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact_identity: Option<bool>,
    /// Floating-point LU replay, reported alongside.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elimination: Option<EliminationCheck>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hadamard: Option<HadamardReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub passed: bool,
}

/// Runs the reduction and the Hadamard chain; numeric failures are recorded, not returned.
pub fn summarize_reduction(
    instance: &Instance,
    label: &str,
    mu: &PotentialVector,
    tolerance: f64,
) -> ReductionSummary {
    let mut summary = ReductionSummary {
        label: label.into(),
        mu: mu.mus().to_vec(),
        n: mu.n(),
        method: None,
        log2_det_v0: None,
        log2_det_v0_formula: None,
        log2_det_vr: None,
        log2_factor: None,
        residual: None,
        exact_identity: None,
        elimination: None,
        hadamard: None,
        error: None,
        passed: false,
    };
    match run_reduction(&instance.roots, &instance.graph, mu) {
        Ok(outcome) => {
            let hadamard =
                hadamard_chain_check(&outcome, &instance.roots, &instance.graph, mu, tolerance);
            summary.passed = outcome.residual <= tolerance
                && outcome.exact_identity != Some(false)
                && hadamard.all_ok();
            summary.method = Some(outcome.method);
            summary.exact_identity = outcome.exact_identity;
            summary.elimination = outcome.elimination;
            summary.log2_det_v0 = Some(outcome.log2_det_v0);
            summary.log2_det_v0_formula = Some(outcome.log2_det_v0_formula);
            summary.log2_det_vr = Some(outcome.log2_det_vr);
            summary.log2_factor = Some(outcome.log2_factor);
            summary.residual = Some(outcome.residual);
            summary.hadamard = Some(hadamard);
        }
        Err(e) => summary.error = Some(e.to_string()),
    }
    summary
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub schema: String,
    /// Roots came from numeric root finding.
    pub approximate_roots: bool,
    pub roots: Vec<[f64; 2]>,
    pub multiplicities: Vec<u32>,
    pub tolerance: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bounds: Option<BoundReport>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub reductions: Vec<ReductionSummary>,
    /// Potentials considered for the reductions, including refused ones.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub potentials: Vec<StrategyOutcome>,
    /// Every applicable bound sound and every reduction check passed.
    pub ok: bool,
}

impl ReportDocument {
    pub fn new(
        instance: &Instance,
        tolerance: f64,
        bounds: Option<BoundReport>,
        reductions: Vec<ReductionSummary>,
    ) -> Self {
        let ok = bounds.as_ref().is_none_or(|b| b.all_sound(tolerance))
            && reductions.iter().all(|r| r.passed);
        Self {
            schema: REPORT_SCHEMA.into(),
            approximate_roots: instance.is_approximate(),
            roots: instance.roots.roots().iter().map(|z| [z.re, z.im]).collect(),
            multiplicities: instance.roots.multiplicities().to_vec(),
            tolerance,
            bounds,
            reductions,
            potentials: Vec::new(),
            ok,
        }
    }
}

/// Potentials per strategy, `Err` when a strategy refuses (e.g. search too large).
pub fn strategy_potentials(
    g: &WeightedRootGraph,
    strategies: &[Strategy],
) -> Vec<(Strategy, Result<PotentialVector>)> {
    strategies.iter().map(|&s| (s, s.potentials(g))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::compare_all;

    #[test]
    fn parses_roots_with_default_multiplicities() {
        let inst = parse_instance(r#"{"roots": [[0,0],[2,0]], "edges": [[0,1,3]]}"#).unwrap();
        assert_eq!(inst.roots.multiplicities(), &[1, 1]);
        assert_eq!(inst.graph.total_weight(), 3);
        assert!(!inst.is_approximate());
    }

    #[test]
    fn parses_coefficients() {
        let inst =
            parse_instance(r#"{"coefficients": [[1,0],[-2,0],[1,0]], "edges": []}"#).unwrap();
        assert!(inst.is_approximate());
        assert_eq!(inst.roots.multiplicities(), &[2]);
    }

    #[test]
    fn rejects_bad_documents() {
        for bad in [
            "{",
            r#"{"edges": []}"#,
            r#"{"roots": [[0,0]], "coefficients": [[0,0],[1,0]]}"#,
            r#"{"roots": [[0,0],[1,0]], "edges": [[0,2,1]]}"#,
            r#"{"roots": [[0,0],[1,0]], "edges": [[0,1,0]]}"#,
            r#"{"roots": [[0,0],[0,0]]}"#,
            r#"{"schema": "other/2", "roots": [[0,0]]}"#,
            r#"{"roots": [[0,0]], "bogus": 1}"#,
        ] {
            assert!(parse_instance(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn report_round_trips() {
        let inst = parse_instance(r#"{"roots": [[0,0],[2,0]], "edges": [[0,1,3]]}"#).unwrap();
        let report = compare_all(&inst.roots, &inst.graph, &Strategy::ALL).unwrap();
        let mu = PotentialVector::new(vec![2, 2]).unwrap();
        let red = summarize_reduction(&inst, "explicit", &mu, 1e-6);
        assert!(red.passed, "{red:?}");
        let doc = ReportDocument::new(&inst, 1e-6, Some(report), vec![red]);
        assert!(doc.ok);
        let text = serde_json::to_string(&doc).unwrap();
        let back: ReportDocument = serde_json::from_str(&text).unwrap();
        assert_eq!(back, doc);
    }

    #[test]
    fn instance_document_round_trips() {
        let inst = parse_instance(r#"{"roots": [[0,0],[1,1]], "multiplicities": [2,1], "edges": [[1,0,2]]}"#)
            .unwrap();
        let doc = InstanceDocument::from_instance(&inst.roots, &inst.graph);
        let again = doc.resolve().unwrap();
        assert_eq!(again, inst);
    }
}
