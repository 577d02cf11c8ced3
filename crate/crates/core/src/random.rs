//! Seeded random elementary products for round-trip checks.
//!
//! The generator is `ChaCha8Rng::seed_from_u64(seed)`, so a seed pins the
//! generated matrix on every platform.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::elementary::{product_of_factors, ElementaryFactor};
use crate::error::Result;
use crate::matrix::AlgMatrix;
use crate::monomial::monomials_of_degree;
use crate::series::{AlgebraConfig, TruncatedSeries};

pub const GENERATOR_NAME: &str = "ChaCha8Rng (rand_chacha 0.3), seed_from_u64";

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Polynomial with every monomial of total degree `<= degree` carrying a
/// coefficient uniform in `[-1, 1]` (both parts when `complex`).
pub fn random_polynomial<R: Rng>(
    rng: &mut R,
    config: AlgebraConfig,
    degree: u32,
    complex: bool,
) -> Result<TruncatedSeries> {
    let mut terms = Vec::new();
    for t in 0..=degree.min(config.degree_cap()) {
        for m in monomials_of_degree(config.num_vars(), t) {
            let re = rng.gen_range(-1.0..=1.0);
            let im = if complex { rng.gen_range(-1.0..=1.0) } else { 0.0 };
            terms.push((m, Complex64::new(re, im)));
        }
    }
    TruncatedSeries::from_terms(config, terms, 0.0)
}

/// Random position `(i, j)`, `i != j`, with a random polynomial coefficient,
/// rescaled to norm `scale` when given.
pub fn random_factor<R: Rng>(
    rng: &mut R,
    n: usize,
    config: AlgebraConfig,
    degree: u32,
    scale: Option<f64>,
    complex: bool,
) -> Result<ElementaryFactor> {
    let i = rng.gen_range(0..n);
    let mut j = rng.gen_range(0..n - 1);
    if j >= i {
        j += 1;
    }
    let mut alpha = random_polynomial(rng, config, degree, complex)?;
    if let Some(s) = scale {
        let norm = alpha.norm();
        if norm > 0.0 {
            alpha = alpha.scale(Complex64::new(s / norm, 0.0));
        }
    }
    ElementaryFactor::new(i, j, alpha)
}

/// Parameters of one generated test matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProductSpec {
    pub n: usize,
    pub config: AlgebraConfig,
    pub factors: usize,
    pub degree: u32,
    /// Norm of every coefficient; raw `[-1, 1]` coefficients when `None`.
    pub scale: Option<f64>,
    pub complex: bool,
}

pub fn random_factors<R: Rng>(rng: &mut R, spec: &ProductSpec) -> Result<Vec<ElementaryFactor>> {
    (0..spec.factors)
        .map(|_| random_factor(rng, spec.n, spec.config, spec.degree, spec.scale, spec.complex))
        .collect()
}

/// Generated factors and their product.
pub fn random_product<R: Rng>(rng: &mut R, spec: &ProductSpec) -> Result<(Vec<ElementaryFactor>, AlgMatrix)> {
    let fs = random_factors(rng, spec)?;
    let m = product_of_factors(&fs, spec.n, spec.config)?;
    Ok((fs, m))
}

/// Random product shrunk until `||F - I|| <= target`: every coefficient
/// starts at norm `target / factors` and is scaled by 0.8 until the bound
/// holds.
pub fn near_identity_product<R: Rng>(
    rng: &mut R,
    n: usize,
    config: AlgebraConfig,
    factors: usize,
    degree: u32,
    target: f64,
    complex: bool,
) -> Result<(Vec<ElementaryFactor>, AlgMatrix)> {
    let spec = ProductSpec { n, config, factors, degree, scale: Some(1.0), complex };
    let unit = random_factors(rng, &spec)?;
    let mut s = target / factors.max(1) as f64;
    loop {
        let fs: Vec<ElementaryFactor> = unit
            .iter()
            .map(|f| ElementaryFactor::new(f.i(), f.j(), f.alpha().scale(Complex64::new(s, 0.0))))
            .collect::<Result<_>>()?;
        let m = product_of_factors(&fs, n, config)?;
        if m.distance_to_identity() <= target {
            return Ok((fs, m));
        }
        s *= 0.8;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_generation_is_reproducible() {
        let config = AlgebraConfig::vars(2).unwrap();
        let spec = ProductSpec { n: 3, config, factors: 5, degree: 2, scale: Some(0.1), complex: true };
        let a = random_product(&mut rng_from_seed(7), &spec).unwrap();
        let b = random_product(&mut rng_from_seed(7), &spec).unwrap();
        assert_eq!(a, b);
        assert!(a.0.iter().all(|f| (f.alpha().norm() - 0.1).abs() < 1e-12 && f.i() != f.j()));
    }

    #[test]
    fn near_identity_target_met() {
        let config = AlgebraConfig::vars(1).unwrap();
        let (_, m) = near_identity_product(&mut rng_from_seed(1), 4, config, 10, 1, 0.3, false).unwrap();
        assert!(m.distance_to_identity() <= 0.3);
    }
}
