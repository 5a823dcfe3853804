//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Two criteria state identities that do not hold on the whole instance
//! family. Their lines read FAIL; the run still succeeds when every failing
//! instance matches the diagnosed cause (`EXPLAINED`). Anything else, including
//! an unexplained failure, makes the process exit non-zero.

use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rootsep_cli::{cmd_bench, cmd_bounds, cmd_verify, BenchParams, Potentials};
use rootsep_core::bounds::{compare_all, dmm_unweighted, weighted_main, weighted_nuclear};
use rootsep_core::findiff::{
    divided_difference_monomial, monomial_dd_closed, partial_dd_monomial, NodeList,
};
use rootsep_core::instance::parse_instance;
use rootsep_core::poly::log2_mahler_measure;
use rootsep_core::reduction::{
    binom_sq_sum_within_bound, composition_binomial_sum, run_reduction, DeterminantMethod,
};
use rootsep_core::sampling::{instances, random_confluent_spec, InstanceFamily};
use rootsep_core::spectral::{
    jacobi_eigenvalues, nuclear_norm, potential_error_terms, potentials_nuclear, Strategy,
};
use rootsep_core::vandermonde::{build_confluent, det_direct, det_product_formula, vydiff_residual};
use rootsep_core::{Complex64, PotentialVector, RootMultiset, WeightedRootGraph};

const SEED: u64 = 20_240_501;
const INSTANCES: usize = 500;
const TOL: f64 = 1e-6;

type Family = Vec<(RootMultiset, WeightedRootGraph)>;

#[derive(Debug, PartialEq)]
enum Verdict {
    Pass,
    /// The criterion fails, and every failure matches the diagnosis.
    Explained,
    Fail,
}

struct Line {
    verdict: Verdict,
    detail: String,
}

fn pass_if(ok: bool, detail: String) -> Line {
    Line {
        verdict: if ok { Verdict::Pass } else { Verdict::Fail },
        detail,
    }
}

fn family() -> Family {
    instances(SEED, INSTANCES, &InstanceFamily::default()).expect("default family is valid")
}

const REDUCTION_STRATEGIES: [Strategy; 3] = [Strategy::Ones, Strategy::Uniform, Strategy::Nuclear];

/// Factorization identity on every feasible (instance, strategy) pair.
fn criterion_1(fam: &Family) -> Line {
    let start = Instant::now();
    let (mut runs, mut skipped, mut exact, mut bad) = (0, 0, 0, 0);
    let mut worst: f64 = 0.0;
    let (mut lu_runs, mut lu_ok) = (0, 0);
    let mut lu_worst: f64 = 0.0;
    for (rm, g) in fam {
        for s in REDUCTION_STRATEGIES {
            let mu = s.potentials(g).expect("heuristic strategies always answer");
            if !mu.is_feasible(g) {
                skipped += 1;
                continue;
            }
            runs += 1;
            let Ok(out) = run_reduction(rm, g, &mu) else {
                bad += 1;
                continue;
            };
            worst = worst.max(out.residual);
            if out.method == DeterminantMethod::Exact {
                exact += 1;
            }
            if out.residual > TOL || out.exact_identity == Some(false) {
                bad += 1;
            }
            if let Some(lu) = out.elimination {
                lu_runs += 1;
                lu_worst = lu_worst.max(lu.residual);
                if lu.residual <= TOL {
                    lu_ok += 1;
                }
            }
        }
    }
    let elapsed = start.elapsed();
    pass_if(
        bad == 0 && elapsed <= Duration::from_secs(60),
        format!(
            "{runs} reductions ({skipped} infeasible pairs skipped), {exact} exact, max residual {worst:.2e}, \
             {bad} over {TOL:e}; floating LU alone within {TOL:e} on {lu_ok}/{lu_runs} (max {lu_worst:.2e}); {:.1}s",
            elapsed.as_secs_f64()
        ),
    )
}

/// Product formula against elimination, and the derivative identity.
fn criterion_2() -> Line {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst_det: f64 = 0.0;
    for _ in 0..200 {
        let spec = random_confluent_spec(&mut rng, 10, 2.0, 0.3).unwrap();
        let f = det_product_formula(&spec);
        let d = det_direct(&build_confluent(&spec));
        worst_det = worst_det.max((f - d).norm() / f.norm());
    }
    let mut worst_vy: f64 = 0.0;
    let mut specs = 0;
    while specs < 50 {
        let spec = random_confluent_spec(&mut rng, 8, 1.0, 0.3).unwrap();
        let blocks: Vec<usize> = (0..spec.mus().len()).filter(|&b| spec.mus()[b] >= 2).collect();
        if blocks.is_empty() {
            continue;
        }
        for b in blocks {
            worst_vy = worst_vy.max(vydiff_residual(&spec, b).unwrap());
        }
        specs += 1;
    }
    pass_if(
        worst_det <= 1e-8 && worst_vy <= 1e-8,
        format!("200 specs n ≤ 10: max relative error {worst_det:.2e}; 50 specs: max derivative residual {worst_vy:.2e}"),
    )
}

/// Every feasible bound below its target.
fn criterion_3(fam: &Family) -> Line {
    let mut violations = Vec::new();
    let mut entries = 0;
    for (k, (rm, g)) in fam.iter().enumerate() {
        let report = compare_all(rm, g, &Strategy::ALL).unwrap();
        entries += report.entries.iter().filter(|e| e.feasible()).count();
        for e in report.unsound_entries(TOL) {
            violations.push(format!("#{k} {}", e.name));
        }
    }
    pass_if(
        violations.is_empty(),
        format!("{entries} feasible bound values, {} violations {violations:?}", violations.len()),
    )
}

fn binomial(n: u64, k: u64) -> u128 {
    (0..k).fold(1u128, |acc, t| acc * (n - t) as u128 / (t + 1) as u128)
}

/// Integer identities, all checked exactly.
fn criterion_4(fam: &Family) -> Line {
    let (mut vertices, mut mj_bad) = (0, 0);
    for (rm, g) in fam {
        for s in REDUCTION_STRATEGIES {
            let mu = s.potentials(g).unwrap();
            if !mu.is_feasible(g) {
                continue;
            }
            let out = run_reduction(rm, g, &mu).unwrap();
            for (v, a) in out.assignments.iter().enumerate() {
                let m = mu.mus()[v] as u64;
                vertices += 1;
                if a.m_sum() != m * (m - 1) / 2 + out.oriented.in_weight(v) {
                    mj_bad += 1;
                }
            }
        }
    }
    let mut sq_bad = 0;
    let mut sq_pairs = 0;
    for n in 1..=30u64 {
        for m in 0..n {
            sq_pairs += 1;
            if !binom_sq_sum_within_bound(n, m) {
                sq_bad += 1;
            }
        }
    }
    let (mut gf_cases, mut gf_bad) = (0, 0);
    for m in 1..=12u64 {
        for big_n in 0..=3usize {
            for mm in big_n as u64..m {
                let free = (mm - big_n as u64) as usize;
                rootsep_core::findiff::for_each_composition(free, big_n + 1, |orders| {
                    let orders: Vec<u32> = orders.iter().map(|&i| i as u32).collect();
                    gf_cases += 1;
                    if composition_binomial_sum((m - 1 - mm) as usize, &orders) != binomial(m - 1, mm) {
                        gf_bad += 1;
                    }
                });
            }
        }
    }
    pass_if(
        mj_bad + sq_bad + gf_bad == 0,
        format!(
            "column sums on {vertices} vertices ({mj_bad} wrong); square-sum bound on {sq_pairs} pairs ({sq_bad} wrong); \
             generating function on {gf_cases} order vectors ({gf_bad} wrong)"
        ),
    )
}

fn separated_nodes(rng: &mut ChaCha8Rng, n: usize, radius: f64, gap: f64) -> NodeList {
    use rand::Rng;
    let mut ys: Vec<Complex64> = Vec::new();
    while ys.len() < n {
        let z = Complex64::new(rng.gen_range(-radius..radius), rng.gen_range(-radius..radius));
        if ys.iter().all(|y| (y - z).norm() >= gap) {
            ys.push(z);
        }
    }
    NodeList::new(ys).unwrap()
}

/// Central differences of the explicit divided difference; total order at most two.
fn numeric_partial(m: u32, nodes: &[Complex64], orders: &[u32]) -> Complex64 {
    let dd = |ys: &[Complex64]| divided_difference_monomial(m, &NodeList::new(ys.to_vec()).unwrap());
    let shifted = |shifts: &[(usize, f64)]| {
        let mut ys = nodes.to_vec();
        for &(k, s) in shifts {
            ys[k] += s;
        }
        dd(&ys)
    };
    let active: Vec<usize> = (0..orders.len()).filter(|&k| orders[k] > 0).collect();
    match active.as_slice() {
        [k] if orders[*k] == 1 => {
            let h = 1e-5;
            (shifted(&[(*k, h)]) - shifted(&[(*k, -h)])) / (2.0 * h)
        }
        [k] => {
            let h = 1e-4;
            (shifted(&[(*k, h)]) - dd(nodes) * 2.0 + shifted(&[(*k, -h)])) / (2.0 * h * h)
        }
        [k, l] => {
            let h = 1e-4;
            (shifted(&[(*k, h), (*l, h)]) - shifted(&[(*k, h), (*l, -h)]) - shifted(&[(*k, -h), (*l, h)])
                + shifted(&[(*k, -h), (*l, -h)]))
                / (4.0 * h * h)
        }
        _ => dd(nodes),
    }
}

/// Closed forms against explicit sums and finite differences.
fn criterion_5() -> Line {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 5);
    let mut worst_closed: f64 = 0.0;
    for n in 1..=6 {
        for _ in 0..20 {
            let nodes = separated_nodes(&mut rng, n, 3.0, 0.3);
            for m in 0..=12 {
                let a = divided_difference_monomial(m, &nodes);
                let b = monomial_dd_closed(m, &nodes);
                worst_closed = worst_closed.max((a - b).norm() / a.norm().max(b.norm()).max(1.0));
            }
        }
    }
    let mut worst_fd: f64 = 0.0;
    let order_sets: &[&[u32]] = &[&[1, 0], &[0, 1, 0], &[2, 0], &[1, 1], &[0, 2, 0], &[1, 0, 1], &[0, 0, 1, 1]];
    for orders in order_sets {
        for _ in 0..10 {
            let nodes = separated_nodes(&mut rng, orders.len(), 1.5, 0.5);
            for m in orders.len() as u32..=8 {
                let exact = partial_dd_monomial(m, &nodes, orders).unwrap();
                let numeric = numeric_partial(m, nodes.nodes(), orders);
                worst_fd = worst_fd.max((exact - numeric).norm() / exact.norm().max(1.0));
            }
        }
    }
    pass_if(
        worst_closed <= 1e-9 && worst_fd <= 1e-4,
        format!("closed form vs explicit sum: max relative error {worst_closed:.2e}; partial derivatives vs finite differences: {worst_fd:.2e}"),
    )
}

/// Unit weights and unit potentials against the unweighted bound.
///
/// `‖J − A‖∞ = r − δ` with `δ` the minimum degree, where the unweighted bound
/// has `r − 1`; the two agree only when `δ = 1` or `M(α) = 1`.
fn criterion_6() -> Line {
    let fam = instances(SEED + 6, 100, &InstanceFamily::default()).unwrap();
    let (mut equal, mut explained, mut predicted_equal) = (0, 0, 0);
    for (rm, g) in &fam {
        let g = WeightedRootGraph::new(g.r(), g.edges().iter().map(|e| (e.i, e.j, 1))).unwrap();
        let ones = PotentialVector::ones(rm.r());
        let gap = weighted_main(rm, &g, &ones).unwrap() - dmm_unweighted(rm, &g);
        let (inf_norm, _) = potential_error_terms(&g, &ones);
        let min_degree = (0..g.r())
            .map(|v| g.edges().iter().filter(|e| e.i == v || e.j == v).count())
            .min()
            .unwrap();
        let log2_m = log2_mahler_measure(rm, false);
        let predicted = (min_degree as f64 - 1.0) * log2_m;
        if gap.abs() <= 1e-12 {
            equal += 1;
        }
        if inf_norm == (g.r() - min_degree) as i64 && (gap - predicted).abs() <= 1e-9 {
            explained += 1;
        }
        if min_degree == 1 || log2_m == 0.0 {
            predicted_equal += 1;
        }
    }
    let detail = format!(
        "equal to 1e-12 on {equal}/100; gap equals (min degree − 1)·log2 M(α) on {explained}/100; \
         min degree 1 or M(α) = 1 on {predicted_equal}/100"
    );
    let verdict = if equal == 100 {
        Verdict::Pass
    } else if explained == 100 && equal >= predicted_equal {
        Verdict::Explained
    } else {
        Verdict::Fail
    };
    Line { verdict, detail }
}

/// Nuclear-norm potentials and the two estimates built on them.
///
/// With `μ = ⌈√N⌉`, `N = ‖A‖⋆`, a row of `μμᵗ − A` sums to at most `rμ² < r(√N + 1)²`,
/// which is below `2rN` once `N ≥ (1 + √2)²`. Smaller norms can exceed it.
fn criterion_7(fam: &Family) -> Line {
    // relative slack for the eigensolver's rounding on exact equality cases
    const ROUNDING: f64 = 1e-12;
    let threshold = (1.0 + 2f64.sqrt()).powi(2);
    let (mut infeasible, mut inf_bad, mut sc_bad, mut unexplained, mut spectral_bad) = (0, 0, 0, 0, 0);
    let mut examples = Vec::new();
    for (k, (_, g)) in fam.iter().enumerate() {
        let mu = potentials_nuclear(g);
        if !mu.is_feasible(g) {
            infeasible += 1;
        }
        let norm = nuclear_norm(g);
        let r = g.r() as f64;
        let (inf_norm, sum_c2) = potential_error_terms(g, &mu);
        if inf_norm as f64 > 2.0 * r * norm * (1.0 + ROUNDING) {
            inf_bad += 1;
            let m2 = (mu.mus()[0] as i64).pow(2);
            if norm >= threshold || inf_norm > g.r() as i64 * m2 {
                unexplained += 1;
            }
            if examples.len() < 3 {
                examples.push(format!("#{k} r={} ‖A‖⋆={norm:.3} μ={} inf={inf_norm}", g.r(), mu.mus()[0]));
            }
        }
        if sum_c2 as f64 > 1.5 * r * norm * (1.0 + ROUNDING) {
            sc_bad += 1;
        }
        let a = g.adjacency_f64();
        let eig = jacobi_eigenvalues(&a).unwrap();
        let frob: f64 = a.iter().flatten().map(|x| x * x).sum();
        let trace: f64 = eig.iter().sum();
        let eig_sq: f64 = eig.iter().map(|x| x * x).sum();
        if trace.abs() > 1e-10 * frob.max(1.0) || (eig_sq - frob).abs() > 1e-10 * frob.max(1.0) {
            spectral_bad += 1;
        }
    }
    let detail = format!(
        "potentials infeasible on {infeasible}/{INSTANCES}; inf-norm estimate fails on {inf_bad} (all with ‖A‖⋆ < (1+√2)²: {}) {examples:?}; \
         binomial-sum estimate fails on {sc_bad}; trace/Frobenius identities fail on {spectral_bad}",
        unexplained == 0
    );
    let verdict = if infeasible + inf_bad + sc_bad + spectral_bad == 0 {
        Verdict::Pass
    } else if infeasible + sc_bad + spectral_bad + unexplained == 0 {
        Verdict::Explained
    } else {
        Verdict::Fail
    };
    Line { verdict, detail }
}

/// Worked spot checks through the command layer.
fn criterion_8() -> Line {
    let unweighted = parse_instance(r#"{"roots": [[0,0],[1,0],[-1,0]], "edges": [[0,1,1]]}"#).unwrap();
    let report = cmd_bounds(&unweighted, &Potentials::Strategies(vec![Strategy::Ones]), TOL).unwrap();
    let dmm = report.bounds.as_ref().unwrap().entry("dmm_unweighted").unwrap().log2_value.unwrap();
    let dmm_err = (dmm - (2.0f64 / 9.0).log2()).abs();

    let two = parse_instance(r#"{"roots": [[0,0],[2,0]], "edges": [[0,1,3]]}"#).unwrap();
    let mu = Potentials::Explicit(PotentialVector::new(vec![2, 2]).unwrap());
    let bounds_ok = cmd_bounds(&two, &mu, TOL).unwrap().ok;
    let verify = cmd_verify(&two, &mu, TOL).unwrap();
    let red = &verify.reductions[0];
    let det_v0 = red.log2_det_v0.unwrap().exp2();
    let factor = red.log2_factor.unwrap().exp2();
    pass_if(
        dmm_err <= 1e-9 && (det_v0 - 16.0).abs() <= 1e-9 && (factor - 8.0).abs() <= 1e-12 && bounds_ok && verify.ok,
        format!("dmm_unweighted off log2(2/9) by {dmm_err:.1e}; |det V0| = {det_v0}, factor = {factor}"),
    )
}

/// The bench sweep reports per-term gaps, and the nuclear bound relaxes the amortized one.
fn criterion_9(fam: &Family) -> Line {
    let csv = cmd_bench(&BenchParams::default()).unwrap();
    let mut lines = csv.lines();
    lines.next();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let col = |name: &str| header.iter().position(|h| *h == name).unwrap();
    let (viol, gap_m, gap_s, gap_n, smaller) =
        (col("violations"), col("m_exponent_gap"), col("sqrt3_gap"), col("nn_gap"), col("main_m_exponent_smaller"));
    let (mut rows, mut violations, mut gaps_present, mut main_smaller) = (0, 0, 0, 0);
    for line in lines {
        let f: Vec<&str> = line.split(',').collect();
        rows += 1;
        violations += f[viol].parse::<usize>().unwrap();
        if [gap_m, gap_s, gap_n].iter().all(|&c| f[c].parse::<f64>().is_ok()) {
            gaps_present += 1;
        }
        if f[smaller] == "true" {
            main_smaller += 1;
        }
    }
    let mut relax_bad = 0;
    for (rm, g) in fam {
        let b = weighted_nuclear(rm, g).unwrap();
        if b.log2_value_with_det > b.main_at_mu + 1e-9 || (b.valid_without_det && b.log2_value > b.main_at_mu + 1e-9) {
            relax_bad += 1;
        }
    }
    pass_if(
        violations == 0 && gaps_present == rows && rows == 500 && relax_bad == 0,
        format!(
            "bench: {rows} rows, {violations} soundness violations, gap columns on {gaps_present}, smaller M exponent on {main_smaller}; \
             nuclear bound above amortized bound on {relax_bad}/{INSTANCES}"
        ),
    )
}

fn main() {
    // `cargo test -- --list` and filters: this target has no named cases
    if std::env::args().any(|a| a == "--list") {
        return;
    }
    let fam = family();
    let criteria: Vec<(u32, Box<dyn Fn() -> Line + '_>)> = vec![
        (1, Box::new(|| criterion_1(&fam))),
        (2, Box::new(criterion_2)),
        (3, Box::new(|| criterion_3(&fam))),
        (4, Box::new(|| criterion_4(&fam))),
        (5, Box::new(criterion_5)),
        (6, Box::new(criterion_6)),
        (7, Box::new(|| criterion_7(&fam))),
        (8, Box::new(criterion_8)),
        (9, Box::new(|| criterion_9(&fam))),
    ];
    let mut unexpected = 0;
    for (k, run) in criteria {
        let line = run();
        let word = match line.verdict {
            Verdict::Pass => "PASS",
            Verdict::Explained => "FAIL (explained)",
            Verdict::Fail => {
                unexpected += 1;
                "FAIL"
            }
        };
        println!("criterion {k}: {word}: {}", line.detail);
    }
    if unexpected > 0 {
        eprintln!("{unexpected} criteria failed without a diagnosis");
        std::process::exit(1);
    }
}
