use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("roots {i} and {j} are not distinct")]
    CoincidentRoots { i: usize, j: usize },

    #[error("separation undefined: need at least two distinct roots")]
    SeparationUndefined,

    #[error("no column to replace: block {0} has size one")]
    NoColumnToReplace(usize),

    #[error("confluent nodes unsupported here (nodes {i} and {j} coincide)")]
    ConfluentNodes { i: usize, j: usize },

    #[error("infeasible potential on edge ({i}, {j}): weight {weight} > {mu_i} * {mu_j}")]
    InfeasibleEdge {
        i: usize,
        j: usize,
        weight: u32,
        mu_i: u32,
        mu_j: u32,
    },

    #[error("infeasible in-edge #{position}: weight {weight} > {mu_source} * {mu_sink}")]
    InfeasibleInEdge {
        position: usize,
        weight: u32,
        mu_source: u32,
        mu_sink: u32,
    },

    #[error("potential vector has length {got}, expected {expected}")]
    PotentialLength { got: usize, expected: usize },

    #[error("matrix is not symmetric")]
    NotSymmetric,

    #[error("Jacobi iteration did not converge in {0} sweeps")]
    NoConvergence(usize),

    #[error("search space too large (r = {0} > 8): use heuristic strategies")]
    SearchTooLarge(usize),

    #[error("multiplicity constraint violated at root {index}: w = {w} > m = {m}")]
    MultiplicityViolated { index: usize, w: u32, m: u32 },

    #[error("column would vanish: M_j = {m_j} >= n = {n}")]
    ColumnVanishes { m_j: u64, n: usize },

    #[error("numerical degeneracy: {0}; use the log-domain report only")]
    Degenerate(String),

    #[error("root finder did not converge after {iterations} iterations; supply explicit roots")]
    RootsNotConverged { iterations: usize },
}
