//! Request driver: route selection, the dilation splitting
//! `F = F_r G^{-1}` with `G = I + F^{-1}(F_r - F)`, and certificate checks.

use num_complex::Complex64;

use crate::elementary::{certified_residual, group_ik_normal_form, invert_factors, Factorization, Method};
use crate::error::{Error, Result};
use crate::matrix::AlgMatrix;
use crate::monomial::Monomial;
use crate::nearid::factor_near_identity;
use crate::series::{AlgebraConfig, TruncatedSeries};
use crate::unipoly::{self, euclid_search, unimodular_deviation, UNIMODULAR_TOL};

/// Auto mode takes the near-identity route below this distance to `I`.
pub const AUTO_NEAR_IDENTITY_RADIUS: f64 = 0.5;

/// Radius grid `1 - 2^{-m}` is searched for `m` up to this exponent.
const MAX_RADIUS_EXPONENT: i32 = 53;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Auto,
    NearIdentity,
    Euclid,
    Dilation,
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(Mode::Auto),
            "near-identity" | "near_identity" => Ok(Mode::NearIdentity),
            "euclid" => Ok(Mode::Euclid),
            "dilation" => Ok(Mode::Dilation),
            other => Err(Error::Schema(format!("unknown mode '{other}'"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct FactorRequest {
    pub matrix: AlgMatrix,
    pub mode: Mode,
    pub tol: f64,
    pub radius: Option<f64>,
    /// Skip the `det F = 1` gate.
    pub promise_unimodular: bool,
}

impl FactorRequest {
    pub fn new(matrix: AlgMatrix, mode: Mode, tol: f64) -> Self {
        Self { matrix, mode, tol, radius: None, promise_unimodular: false }
    }

    fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(Error::Schema(format!("tolerance must be positive, got {}", self.tol)));
        }
        if let Some(r) = self.radius {
            if !(r > 0.0 && r < 1.0) {
                return Err(Error::RadiusOutOfRange(r));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub residual: f64,
    pub tol: f64,
    pub passed: bool,
    pub factor_count: usize,
    pub normal_form_blocks: usize,
}

/// Smallest `r = 1 - 2^{-m}` with `sum_ij gap(F_ij, r) <= eta`.
pub fn choose_radius(f: &AlgMatrix, eta: f64) -> Result<f64> {
    let floor = 2.0 * f.total_tail();
    if !(eta > floor) {
        return Err(Error::Unreachable { eta, floor });
    }
    for m in 1..=MAX_RADIUS_EXPONENT {
        let r = 1.0 - 2f64.powi(-m);
        let gap: f64 = f
            .entries()
            .iter()
            .map(|e| e.dilation_gap_bound(r))
            .sum::<Result<f64>>()?;
        if gap <= eta {
            return Ok(r);
        }
    }
    Err(Error::Unreachable { eta, floor })
}

/// Returns `(F_r, G)` with `G = I + F^{-1}(F_r - F)`, so that `F G = F_r`.
/// `F^{-1}` comes from the certified Neumann inverse.
pub fn split_dilation(f: &AlgMatrix, r: f64, tol: f64) -> Result<(AlgMatrix, AlgMatrix)> {
    let f_r = f.dilate(r)?;
    let f_inv = f.inverse_near_identity(tol).map_err(|e| match e {
        Error::NotNearIdentity(q) => {
            Error::InverseUnavailable(format!("no Neumann certificate, |F - I| = {q:.3e} >= 1"))
        }
        other => other,
    })?;
    let g = AlgMatrix::identity(f.n(), *f.config()).add(&f_inv.mul(&f_r.sub(f)?)?)?;
    Ok((f_r, g))
}

/// Factors `req.matrix` into elementary matrices on the constructive
/// subclasses: univariate polynomials (Euclid), matrices near the identity,
/// and univariate series through the dilation splitting.
pub fn factor(req: &FactorRequest) -> Result<Factorization> {
    req.validate()?;
    let f = &req.matrix;
    if !req.promise_unimodular {
        let dev = unimodular_deviation(f)?;
        if dev > UNIMODULAR_TOL {
            return Err(Error::NotUnimodular(dev));
        }
    }
    let d = f.config().num_vars();
    let tail_free = f.entries().iter().all(unipoly::has_rounding_tail_only);
    match req.mode {
        Mode::Euclid => euclid_route(f, req.tol),
        Mode::NearIdentity => factor_near_identity(f, req.tol),
        Mode::Dilation => dilation_route(f, req.tol, req.radius),
        Mode::Auto => {
            if d == 1 && tail_free {
                euclid_route(f, req.tol)
            } else if f.distance_to_identity() < AUTO_NEAR_IDENTITY_RADIUS {
                factor_near_identity(f, req.tol)
            } else if d == 1 {
                dilation_route(f, req.tol, req.radius)
            } else {
                Err(unsupported_far_multivariate(d))
            }
        }
    }
}

fn unsupported_far_multivariate(d: usize) -> Error {
    Error::Unsupported(format!(
        "matrix in {d} variables is far from the identity; factoring it needs the \
         Ivarsson-Kutzschebauch holomorphic factorization (Oka principle), which is \
         non-constructive and not implemented"
    ))
}

fn euclid_route(f: &AlgMatrix, tol: f64) -> Result<Factorization> {
    unipoly::check_euclid_input(f)?;
    let factors = euclid_search(f, tol)?;
    Factorization::certify(f, factors, Method::Euclid)
}

fn dilation_route(f: &AlgMatrix, tol: f64, radius: Option<f64>) -> Result<Factorization> {
    let d = f.config().num_vars();
    let q = f.distance_to_identity();
    let r = match radius {
        Some(r) => r,
        None => {
            let f_inv = f.inverse_near_identity(tol).map_err(|_| {
                Error::InverseUnavailable(format!("no Neumann certificate, |F - I| = {q:.3e} >= 1"))
            })?;
            let eta = tol.min((1.0 - q).max(0.0)).min(0.1) / f_inv.norm().max(1.0);
            choose_radius(f, eta)?
        }
    };
    let (f_r, g) = split_dilation(f, r, tol)?;

    let mut factors = if d == 1 {
        // Tails of F_r are dropped; the residual certificate accounts for them.
        euclid_search(&f_r.polynomial_part(), tol)?
    } else if f_r.distance_to_identity() < 1.0 {
        factor_near_identity(&f_r, tol)?.factors
    } else {
        return Err(unsupported_far_multivariate(d));
    };
    let g_factors = factor_near_identity(&g, tol)?.factors;
    factors.extend(invert_factors(&g_factors));
    Factorization::certify(f, factors, Method::DilationPipeline)
}

/// Multiplies the factors back out and compares with `f`.
pub fn verify(f: &AlgMatrix, fac: &Factorization, tol: f64) -> Result<VerificationReport> {
    if fac.n != f.n() {
        return Err(Error::DimensionMismatch { expected: f.n(), found: fac.n });
    }
    let residual = certified_residual(f, &fac.factors)?;
    let blocks = group_ik_normal_form(&fac.factors, f.n())?;
    Ok(VerificationReport {
        residual,
        tol,
        passed: residual <= tol,
        factor_count: fac.factors.len(),
        normal_form_blocks: blocks.len(),
    })
}

/// `[[1 + z1 z2, z1^2], [-z2^2, 1 - z1 z2]]`, unimodular over `C[z1, z2]`
/// but not a product of elementary matrices there.
pub fn cohn_matrix(config: AlgebraConfig) -> Result<AlgMatrix> {
    if config.num_vars() != 2 {
        return Err(Error::InvalidConfig(format!(
            "the Cohn matrix lives in two variables, config has {}",
            config.num_vars()
        )));
    }
    let term = |e: [u32; 2], c: f64| (Monomial::new(&e).expect("two exponents"), Complex64::new(c, 0.0));
    let s = |terms: Vec<(Monomial, Complex64)>| TruncatedSeries::from_terms(config, terms, 0.0);
    AlgMatrix::from_rows(vec![
        vec![s(vec![term([0, 0], 1.0), term([1, 1], 1.0)])?, s(vec![term([2, 0], 1.0)])?],
        vec![s(vec![term([0, 2], -1.0)])?, s(vec![term([0, 0], 1.0), term([1, 1], -1.0)])?],
    ])
}
