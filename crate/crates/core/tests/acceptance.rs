//! End-to-end acceptance checks. Runs without the libtest harness so that
//! every check prints its PASS/FAIL line; the process exits non-zero if any
//! check fails.
//!
//! All tolerances, sample counts, runtime budgets and seeds are pinned here.

use std::io;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::Rng;

use elemfactor::batch::{run_batch, RoundtripCase, RoundtripOutcome};
use elemfactor::cli;
use elemfactor::elementary::{blocks_to_factors, certified_residual, group_ik_normal_form, product_of_factors, Side};
use elemfactor::json::matrix_to_json;
use elemfactor::par::Strategy;
use elemfactor::pipeline::{choose_radius, cohn_matrix, split_dilation, Mode};
use elemfactor::random::{near_identity_product, random_polynomial, rng_from_seed, ProductSpec};
use elemfactor::{factor, whitehead, AlgMatrix, AlgebraConfig, Error, FactorRequest, TruncatedSeries};

const NORM_LAW_SLACK: f64 = 1.0 + 1e-10;
const SERIES_PAIRS: u64 = 200;
const MATRIX_PAIRS: u64 = 100;
const NORM_BUDGET: Duration = Duration::from_secs(10);

const ENCLOSURE_PRODUCTS: u64 = 100;
const ENCLOSURE_BUDGET: Duration = Duration::from_secs(30);

const WHITEHEAD_UNITS: u64 = 100;
const WHITEHEAD_TOL: f64 = 1e-10;
const WHITEHEAD_BUDGET: Duration = Duration::from_secs(10);

const NEAR_ID_PRODUCTS: u64 = 50;
const NEAR_ID_DISTANCE: f64 = 0.3;
const NEAR_ID_TOL: f64 = 1e-8;
const NEAR_ID_BUDGET: Duration = Duration::from_secs(120);

const EUCLID_PRODUCTS: u64 = 50;
const EUCLID_FACTORS: usize = 10;
const EUCLID_DEGREE: u32 = 3;
const EUCLID_TOL: f64 = 1e-6;
const EUCLID_BUDGET: Duration = Duration::from_secs(60);

const DILATION_SAMPLES: u64 = 50;
const SPLIT_TOL: f64 = 1e-9;
const DILATION_BUDGET: Duration = Duration::from_secs(30);

const COHN_DET_TOL: f64 = 1e-12;
const COHN_BUDGET: Duration = Duration::from_secs(1);

const NORMAL_FORM_FACTOR: f64 = 10.0;

const SUITE_BUDGET: Duration = Duration::from_secs(300);

/// Degree cap per variable count for the near-identity runs; beyond it the
/// truncated mass is carried as tail.
fn near_identity_cap(d: usize) -> u32 {
    match d {
        1 => 64,
        2 => 24,
        _ => 16,
    }
}

struct Report {
    failures: usize,
}

impl Report {
    fn line(&mut self, id: u32, name: &str, ok: bool, elapsed: Duration, detail: String) {
        if !ok {
            self.failures += 1;
        }
        println!(
            "{:<4} {id:>2} {name:<28} {:>8.2}s  {detail}",
            if ok { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64()
        );
    }
}

fn random_series<R: Rng>(rng: &mut R, config: AlgebraConfig, max_degree: u32, with_tail: bool) -> TruncatedSeries {
    let degree = rng.gen_range(0..=max_degree);
    let complex = rng.gen_bool(0.5);
    let s = random_polynomial(rng, config, degree, complex).unwrap();
    if with_tail {
        s.with_tail(rng.gen_range(0.0..0.1))
    } else {
        s
    }
}

fn random_matrix<R: Rng>(rng: &mut R, n: usize, config: AlgebraConfig) -> AlgMatrix {
    let entries = (0..n * n).map(|_| random_series(rng, config, 3, true)).collect();
    AlgMatrix::from_entries(n, entries).unwrap()
}

fn norm_laws() -> (bool, String) {
    let mut rng = rng_from_seed(1001);
    let mut worst: f64 = 0.0;
    for _ in 0..SERIES_PAIRS {
        let d = rng.gen_range(1..=3);
        let config = AlgebraConfig::vars(d).unwrap();
        let f = random_series(&mut rng, config, 10, true);
        let g = random_series(&mut rng, config, 10, true);
        let bound = f.norm() * g.norm();
        if bound > 0.0 {
            worst = worst.max(f.mul(&g).unwrap().norm() / bound);
        }
    }
    let mut worst_mat: f64 = 0.0;
    for _ in 0..MATRIX_PAIRS {
        let n = rng.gen_range(1..=4);
        let config = AlgebraConfig::vars(rng.gen_range(1..=2)).unwrap();
        let a = random_matrix(&mut rng, n, config);
        let b = random_matrix(&mut rng, n, config);
        let bound = a.norm() * b.norm();
        if bound > 0.0 {
            worst_mat = worst_mat.max(a.mul(&b).unwrap().norm() / bound);
        }
    }
    (
        worst <= NORM_LAW_SLACK && worst_mat <= NORM_LAW_SLACK,
        format!("max |fg|/(|f||g|) = {worst:.6}, max |FG|/(|F||G|) = {worst_mat:.6}"),
    )
}

/// Re-expresses `s` under another configuration with the same variables.
fn recast(s: &TruncatedSeries, config: AlgebraConfig) -> TruncatedSeries {
    TruncatedSeries::from_terms(config, s.terms().iter().cloned(), s.tail()).unwrap()
}

fn enclosure_soundness() -> (bool, String) {
    let mut rng = rng_from_seed(1002);
    let mut worst_ratio: f64 = 0.0;
    let mut violations = 0;
    for _ in 0..ENCLOSURE_PRODUCTS {
        let d = rng.gen_range(1..=3);
        let cap = rng.gen_range(2..=6);
        let reduced = AlgebraConfig::new(d, cap).unwrap();
        let full = AlgebraConfig::new(d, 64).unwrap();
        // A chain of three products, so truncation compounds.
        let factors: Vec<TruncatedSeries> = (0..3)
            .map(|_| {
                let deg = rng.gen_range(1..=cap);
                let complex = rng.gen_bool(0.5);
                random_polynomial(&mut rng, reduced, deg, complex).unwrap()
            })
            .collect();
        let mut approx = factors[0].clone();
        let mut exact = recast(&factors[0], full);
        for f in &factors[1..] {
            approx = approx.mul(f).unwrap();
            exact = exact.mul(&recast(f, full)).unwrap();
        }
        // Everything the reduced product dropped or got wrong.
        let kept = recast(&approx.polynomial_part(), full);
        let excluded = exact.polynomial_part().sub(&kept).unwrap().poly_norm();
        if excluded > approx.tail() {
            violations += 1;
        }
        if approx.tail() > 0.0 {
            worst_ratio = worst_ratio.max(excluded / approx.tail());
        }
    }
    (violations == 0, format!("violations = {violations}, max excluded/tail = {worst_ratio:.6}"))
}

fn whitehead_identity() -> (bool, String) {
    let mut rng = rng_from_seed(1003);
    let mut worst: f64 = 0.0;
    let mut worst_tails: f64 = 0.0;
    let mut failures = 0;
    for _ in 0..WHITEHEAD_UNITS {
        let d = rng.gen_range(1..=2);
        let config = AlgebraConfig::new(d, 32).unwrap();
        let deg = rng.gen_range(1..=4);
        let complex = rng.gen_bool(0.5);
        let e = random_polynomial(&mut rng, config, deg, complex).unwrap();
        let target = rng.gen_range(0.01..=0.5);
        let e = e.scale(Complex64::new(target / e.norm(), 0.0));
        let u = e.add_constant(Complex64::new(1.0, 0.0));
        let fs = whitehead(&u, 0, 2, 1e-14).unwrap();
        let p = product_of_factors(&fs, 2, config).unwrap();
        let u_inv = u.reciprocal(1e-14).unwrap();
        let diag = AlgMatrix::diagonal(vec![u, u_inv]).unwrap();
        let diff = p.sub(&diag).unwrap();
        let residual = diff.polynomial_part().norm();
        worst = worst.max(residual);
        worst_tails = worst_tails.max(diff.total_tail());
        if residual > WHITEHEAD_TOL + diff.total_tail() {
            failures += 1;
        }
    }
    (failures == 0, format!("failures = {failures}, max residual = {worst:.3e}, max tails = {worst_tails:.3e}"))
}

fn roundtrip_cases(
    seed_base: u64,
    count: u64,
    make: impl Fn(u64) -> RoundtripCase,
) -> Vec<RoundtripCase> {
    (0..count).map(|k| make(seed_base + k)).collect()
}

/// Checks the normal form of one factorization; returns a failure message.
fn normal_form_problem(o: &RoundtripOutcome) -> Option<String> {
    let n = o.matrix.n();
    let blocks = match group_ik_normal_form(&o.factorization.factors, n) {
        Ok(b) => b,
        Err(e) => return Some(format!("seed {}: {e}", o.seed)),
    };
    if blocks.first().map(|b| b.side) != Some(Side::Lower) && !blocks.is_empty() {
        return Some(format!("seed {}: first block is not lower", o.seed));
    }
    if blocks.windows(2).any(|w| w[0].side == w[1].side) {
        return Some(format!("seed {}: blocks do not alternate", o.seed));
    }
    if blocks.iter().any(|b| b.g.len() != n * (n - 1) / 2) {
        return Some(format!("seed {}: block vector of wrong length", o.seed));
    }
    let residual = match certified_residual(&o.matrix, &blocks_to_factors(&blocks, n).unwrap()) {
        Ok(r) => r,
        Err(e) => return Some(format!("seed {}: {e}", o.seed)),
    };
    let allowed = NORMAL_FORM_FACTOR * o.factorization.residual_bound.max(f64::MIN_POSITIVE);
    if residual > allowed {
        return Some(format!(
            "seed {}: block residual {residual:.3e} > {NORMAL_FORM_FACTOR} x {:.3e}",
            o.seed, o.factorization.residual_bound
        ));
    }
    None
}

fn near_identity_roundtrip(outcomes: &mut Vec<RoundtripOutcome>) -> (bool, String) {
    let mut failures = Vec::new();
    let mut worst: f64 = 0.0;
    for n in 2..=4 {
        for d in 1..=3 {
            let config = AlgebraConfig::new(d, near_identity_cap(d)).unwrap();
            let cases = roundtrip_cases(10_000 * n as u64 + 1_000 * d as u64, NEAR_ID_PRODUCTS, |seed| {
                RoundtripCase {
                    seed,
                    spec: ProductSpec {
                        n,
                        config,
                        factors: 1 + (seed % 10) as usize,
                        degree: 1 + (seed % 2) as u32,
                        scale: None,
                        complex: seed % 3 == 0,
                    },
                    near_identity_target: Some(NEAR_ID_DISTANCE),
                    mode: Mode::NearIdentity,
                    tol: NEAR_ID_TOL,
                }
            });
            for (case, result) in cases.iter().zip(run_batch(&cases, Strategy::default())) {
                match result {
                    Ok(o) => {
                        let allowed = NEAR_ID_TOL + o.matrix.total_tail();
                        worst = worst.max(o.report.residual);
                        if o.report.residual > allowed {
                            failures.push(format!("n={n} d={d} seed {}: {:.3e}", case.seed, o.report.residual));
                        }
                        outcomes.push(o);
                    }
                    Err(e) => failures.push(format!("n={n} d={d} seed {}: {e}", case.seed)),
                }
            }
        }
    }
    let detail = if failures.is_empty() {
        format!("450 products, max residual = {worst:.3e}")
    } else {
        format!("{} failures: {}", failures.len(), failures.join("; "))
    };
    (failures.is_empty(), detail)
}

fn euclid_roundtrip(outcomes: &mut Vec<RoundtripOutcome>) -> (bool, String) {
    let config = AlgebraConfig::vars(1).unwrap();
    let mut failures = Vec::new();
    let mut worst: f64 = 0.0;
    for n in 2..=3 {
        let cases = roundtrip_cases(1, EUCLID_PRODUCTS, |seed| RoundtripCase {
            seed,
            spec: ProductSpec {
                n,
                config,
                factors: EUCLID_FACTORS,
                degree: EUCLID_DEGREE,
                scale: None,
                complex: false,
            },
            near_identity_target: None,
            mode: Mode::Euclid,
            tol: EUCLID_TOL,
        });
        for (case, result) in cases.iter().zip(run_batch(&cases, Strategy::default())) {
            match result {
                Ok(o) => {
                    worst = worst.max(o.report.residual);
                    if !o.report.passed {
                        failures.push(format!("n={n} seed {}: {:.3e}", case.seed, o.report.residual));
                    }
                    outcomes.push(o);
                }
                Err(e) => failures.push(format!("n={n} seed {}: {e}", case.seed)),
            }
        }
    }
    let detail = if failures.is_empty() {
        format!("100 products of {EUCLID_FACTORS} factors, max residual = {worst:.3e}")
    } else {
        format!("{} failures: {}", failures.len(), failures.join("; "))
    };
    (failures.is_empty(), detail)
}

fn random_dilation_input<R: Rng>(rng: &mut R) -> AlgMatrix {
    let n = rng.gen_range(2..=3);
    let d = rng.gen_range(1..=2);
    let config = AlgebraConfig::new(d, 24).unwrap();
    let k = rng.gen_range(1..=6);
    let complex = rng.gen_bool(0.5);
    let (_, m) = near_identity_product(rng, n, config, k, 2, 0.3, complex).unwrap();
    let tail = if rng.gen_bool(0.5) { rng.gen_range(0.0..1e-10) } else { 0.0 };
    m.map_entries(|e| Ok(e.clone().widen(tail))).unwrap()
}

fn dilation_identities() -> (bool, String) {
    let mut rng = rng_from_seed(1006);
    let mut radius_failures = 0;
    let mut split_failures = 0;
    let mut worst_split: f64 = 0.0;
    let mut worst_tails: f64 = 0.0;
    for _ in 0..DILATION_SAMPLES {
        let f = random_dilation_input(&mut rng);
        let eta = 10f64.powf(rng.gen_range(-6.0..-1.0));
        let r = choose_radius(&f, eta).unwrap();
        let gap = f.sub(&f.dilate(r).unwrap()).unwrap().norm();
        if gap > eta {
            radius_failures += 1;
        }
        let (f_r, g) = split_dilation(&f, r, 1e-14).unwrap();
        let diff = f.mul(&g).unwrap().sub(&f_r).unwrap();
        let residual = diff.polynomial_part().norm();
        worst_split = worst_split.max(residual);
        worst_tails = worst_tails.max(diff.total_tail());
        if residual > SPLIT_TOL + diff.total_tail() {
            split_failures += 1;
        }
    }
    (
        radius_failures == 0 && split_failures == 0,
        format!(
            "radius misses = {radius_failures}, split failures = {split_failures}, max |FG - F_r| = {worst_split:.3e}, max tails = {worst_tails:.3e}"
        ),
    )
}

fn cohn_fixture() -> (bool, String) {
    let config = AlgebraConfig::vars(2).unwrap();
    let c = cohn_matrix(config).unwrap();
    let dev = c.det().unwrap().sub(&TruncatedSeries::one(config)).unwrap();
    let det_ok = dev.max_abs_coeff() <= COHN_DET_TOL && dev.tail() <= COHN_DET_TOL;
    let refused = matches!(factor(&FactorRequest::new(c.clone(), Mode::Auto, 1e-8)), Err(Error::Unsupported(_)));

    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("cohn.json");
    let output = dir.path().join("factors.json");
    std::fs::write(&input, matrix_to_json(&c).unwrap()).unwrap();
    let args = ["elemfactor", "factor", "--input", input.to_str().unwrap(), "--output", output.to_str().unwrap()];
    let code = cli::run(args, &mut io::sink(), &mut io::sink());
    (
        det_ok && refused && code == cli::EXIT_REFUSED,
        format!("max |det - 1| = {:.1e}, refused = {refused}, exit code = {code}", dev.max_abs_coeff()),
    )
}

fn normal_form(outcomes: &[RoundtripOutcome]) -> (bool, String) {
    let problems: Vec<String> = outcomes.iter().filter_map(normal_form_problem).collect();
    if problems.is_empty() {
        (true, format!("{} factorizations", outcomes.len()))
    } else {
        (false, format!("{} problems: {}", problems.len(), problems.join("; ")))
    }
}

fn reciprocal_refusal() -> (bool, String) {
    let config = AlgebraConfig::vars(1).unwrap();
    let f = TruncatedSeries::univariate_real(config, &[1.0, 2.0]).unwrap();
    let result = f.reciprocal(1e-12);
    (matches!(result, Err(Error::NotInvertible(_))), format!("{result:?}").chars().take(80).collect())
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

fn main() -> ExitCode {
    let suite_start = Instant::now();
    let mut report = Report { failures: 0 };

    let ((ok, detail), t) = timed(norm_laws);
    report.line(1, "norm laws", ok && t < NORM_BUDGET, t, detail);

    let ((ok, detail), t) = timed(enclosure_soundness);
    report.line(2, "enclosure soundness", ok && t < ENCLOSURE_BUDGET, t, detail);

    let ((ok, detail), t) = timed(whitehead_identity);
    report.line(3, "whitehead identity", ok && t < WHITEHEAD_BUDGET, t, detail);

    let mut outcomes = Vec::new();
    let ((ok, detail), t) = timed(|| near_identity_roundtrip(&mut outcomes));
    report.line(4, "near-identity round trip", ok && t < NEAR_ID_BUDGET, t, detail);

    let ((ok, detail), t) = timed(|| euclid_roundtrip(&mut outcomes));
    report.line(5, "univariate euclid round trip", ok && t < EUCLID_BUDGET, t, detail);

    let ((ok, detail), t) = timed(dilation_identities);
    report.line(6, "dilation identities", ok && t < DILATION_BUDGET, t, detail);

    let ((ok, detail), t) = timed(cohn_fixture);
    report.line(7, "cohn fixture", ok && t < COHN_BUDGET, t, detail);

    let ((ok, detail), t) = timed(|| normal_form(&outcomes));
    report.line(8, "normal form", ok, t, detail);

    let ((ok, detail), t) = timed(reciprocal_refusal);
    report.line(9, "reciprocal refusal", ok, t, detail);

    let total = suite_start.elapsed();
    report.line(10, "suite runtime", total < SUITE_BUDGET, total, format!("budget {}s", SUITE_BUDGET.as_secs()));

    if report.failures == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{} checks failed", report.failures);
        ExitCode::FAILURE
    }
}
