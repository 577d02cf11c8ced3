//! Generate, factor and verify: single round trips and data-parallel
//! batches of them.

use crate::elementary::Method;
use crate::error::Result;
use crate::matrix::AlgMatrix;
use crate::par::{self, Strategy};
use crate::pipeline::{factor, verify, FactorRequest, Mode, VerificationReport};
use crate::random::{near_identity_product, random_product, rng_from_seed, ProductSpec};
use crate::elementary::Factorization;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoundtripCase {
    pub seed: u64,
    pub spec: ProductSpec,
    /// Shrink the coefficients until `||F - I||` is at most this.
    pub near_identity_target: Option<f64>,
    pub mode: Mode,
    /// Tolerance for the factorization and for verification.
    pub tol: f64,
}

#[derive(Debug, Clone)]
pub struct RoundtripOutcome {
    pub seed: u64,
    pub matrix: AlgMatrix,
    pub factorization: Factorization,
    pub method: Method,
    pub report: VerificationReport,
}

pub fn generate(case: &RoundtripCase) -> Result<AlgMatrix> {
    let mut rng = rng_from_seed(case.seed);
    let s = &case.spec;
    let (_, m) = match case.near_identity_target {
        Some(target) => near_identity_product(&mut rng, s.n, s.config, s.factors, s.degree, target, s.complex)?,
        None => random_product(&mut rng, s)?,
    };
    Ok(m)
}

pub fn run_roundtrip(case: &RoundtripCase) -> Result<RoundtripOutcome> {
    let matrix = generate(case)?;
    let fac = factor(&FactorRequest::new(matrix.clone(), case.mode, case.tol))?;
    let report = verify(&matrix, &fac, case.tol)?;
    Ok(RoundtripOutcome { seed: case.seed, method: fac.method, matrix, factorization: fac, report })
}

/// Runs every case; results keep the input order.
pub fn run_batch(cases: &[RoundtripCase], strategy: Strategy) -> Vec<Result<RoundtripOutcome>> {
    par::map_range(cases.len(), strategy, |i| run_roundtrip(&cases[i]))
}
