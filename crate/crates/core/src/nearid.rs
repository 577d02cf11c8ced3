//! Elementary factorization of matrices close to the identity.
//!
//! Gaussian elimination without pivoting, each pivot inverted by a certified
//! reciprocal, reduces `F` to a diagonal of units; the diagonal is then
//! written as a telescoping product of Whitehead blocks
//! `diag(v, v^{-1})`, leaving `diag(1, ..., 1, prod u_i)` whose deviation
//! from the identity is part of the certified residual.
//!
//! A sufficient a-priori condition is `||F - I|| <= 1/(4n)`; in practice the
//! pivots are checked stage by stage (`||p - 1|| < 1`), which accepts far more
//! inputs.

use num_complex::Complex64;

use crate::elementary::{ElementaryFactor, Factorization, Method};
use crate::error::{Error, Result};
use crate::matrix::AlgMatrix;
use crate::series::TruncatedSeries;

/// Six factors realizing `diag(u, u^{-1})` in rows/columns `k, k+1`:
/// `E12(u) E21(-u^{-1}) E12(u) E12(-1) E21(1) E12(-1)`.
///
/// Constant units with zero tail use the scalar inverse; anything else goes
/// through [`TruncatedSeries::reciprocal`].
pub fn whitehead(u: &TruncatedSeries, k: usize, n: usize, tol: f64) -> Result<Vec<ElementaryFactor>> {
    if k + 1 >= n {
        return Err(Error::IndexOutOfRange { i: k, j: k + 1, n });
    }
    let config = *u.config();
    let u_inv = if u.is_constant() && u.tail() == 0.0 {
        let c = u.constant_term();
        if c.norm() == 0.0 {
            return Err(Error::NotInvertible("zero diagonal unit".into()));
        }
        TruncatedSeries::constant(config, Complex64::new(1.0, 0.0) / c)
    } else {
        u.reciprocal(tol)?
    };
    let one = TruncatedSeries::one(config);
    let minus_one = one.neg();
    let (a, b) = (k, k + 1);
    Ok(vec![
        ElementaryFactor::new(a, b, u.clone())?,
        ElementaryFactor::new(b, a, u_inv.neg())?,
        ElementaryFactor::new(a, b, u.clone())?,
        ElementaryFactor::new(a, b, minus_one.clone())?,
        ElementaryFactor::new(b, a, one)?,
        ElementaryFactor::new(a, b, minus_one)?,
    ])
}

/// Writes `diag(u_1, ..., u_n)` as Whitehead blocks for the running products
/// `v_k = u_1 ... u_k` (k < n) times `diag(1, ..., 1, prod u_i)`. Returns the
/// factors and the leftover `prod u_i`.
pub fn diagonal_to_factors(d: &AlgMatrix, tol: f64) -> Result<(Vec<ElementaryFactor>, TruncatedSeries)> {
    if !d.is_diagonal() {
        return Err(Error::Schema("diagonal_to_factors expects a diagonal matrix".into()));
    }
    let n = d.n();
    let mut factors = Vec::new();
    let mut running = d.get(0, 0).clone();
    for k in 0..n - 1 {
        if !running.is_exact_one() {
            factors.extend(whitehead(&running, k, n, tol)?);
        }
        running = running.mul(d.get(k + 1, k + 1))?;
    }
    Ok((factors, running))
}

/// Row and column operations recorded by the elimination, already inverted,
/// plus the diagonal left behind.
#[derive(Debug, Clone)]
pub(crate) struct Elimination {
    /// Inverses of the applied row operations, in application order.
    pub left: Vec<ElementaryFactor>,
    /// Inverses of the applied column operations, in application order.
    pub right: Vec<ElementaryFactor>,
    pub diagonal: Vec<TruncatedSeries>,
}

pub(crate) fn eliminate(f: &AlgMatrix, tol: f64) -> Result<Elimination> {
    let n = f.n();
    let config = *f.config();
    let zero = TruncatedSeries::zero(config);
    let one = TruncatedSeries::one(config);
    let is_zero = |s: &TruncatedSeries| s.is_zero_poly() && s.tail() == 0.0;

    let mut w = f.clone();
    let mut left = Vec::new();
    let mut right = Vec::new();
    for k in 0..n.saturating_sub(1) {
        let pivot = w.get(k, k).clone();
        let deviation = pivot.sub(&one)?.norm();
        if !(deviation < 1.0) {
            return Err(Error::NearIdentityDiverged { stage: k + 1, deviation });
        }
        let pivot_inv = pivot.reciprocal(tol)?;
        for i in k + 1..n {
            if is_zero(w.get(i, k)) {
                continue;
            }
            let m = w.get(i, k).mul(&pivot_inv)?;
            for j in k + 1..n {
                let updated = w.get(i, j).sub(&m.mul(w.get(k, j))?)?;
                w.set(i, j, updated);
            }
            w.set(i, k, zero.clone());
            left.push(ElementaryFactor::new(i, k, m)?);
        }
        for j in k + 1..n {
            if is_zero(w.get(k, j)) {
                continue;
            }
            let m = pivot_inv.mul(w.get(k, j))?;
            w.set(k, j, zero.clone());
            right.push(ElementaryFactor::new(k, j, m)?);
        }
    }
    let diagonal = w.diagonal_entries();
    for (k, u) in diagonal.iter().enumerate() {
        let deviation = u.sub(&one)?.norm();
        if !(deviation < 1.0) {
            return Err(Error::NearIdentityDiverged { stage: k + 1, deviation });
        }
    }
    Ok(Elimination { left, right, diagonal })
}

/// Factors a matrix with `||F - I|| < 1`; the residual bound is certified by
/// multiplying the factors back out.
pub fn factor_near_identity(f: &AlgMatrix, tol: f64) -> Result<Factorization> {
    let q = f.distance_to_identity();
    if !(q < 1.0) {
        return Err(Error::NotNearIdentity(q));
    }
    let elim = eliminate(f, tol)?;
    let d = AlgMatrix::diagonal(elim.diagonal)?;
    let (diag_factors, _leftover) = diagonal_to_factors(&d, tol)?;
    let mut factors = elim.left;
    factors.extend(diag_factors);
    factors.extend(elim.right.into_iter().rev());
    Factorization::certify(f, factors, Method::NearIdentity)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elementary::product_of_factors;
    use crate::series::AlgebraConfig;

    fn cfg(d: usize) -> AlgebraConfig {
        AlgebraConfig::vars(d).unwrap()
    }

    fn poly(coeffs: &[f64]) -> TruncatedSeries {
        TruncatedSeries::univariate_real(cfg(1), coeffs).unwrap()
    }

    #[test]
    fn whitehead_of_one() {
        let fs = whitehead(&poly(&[1.0]), 0, 2, 1e-14).unwrap();
        let alphas: Vec<f64> = fs.iter().map(|f| f.alpha().constant_term().re).collect();
        assert_eq!(alphas, vec![1.0, -1.0, 1.0, -1.0, 1.0, -1.0]);
        assert_eq!(product_of_factors(&fs, 2, cfg(1)).unwrap(), AlgMatrix::identity(2, cfg(1)));
    }

    #[test]
    fn whitehead_nonconstant_unit() {
        let u = poly(&[1.0, 0.3]);
        let fs = whitehead(&u, 0, 2, 1e-14).unwrap();
        let u_inv = u.reciprocal(1e-14).unwrap();
        let d = AlgMatrix::diagonal(vec![u, u_inv]).unwrap();
        let p = product_of_factors(&fs, 2, cfg(1)).unwrap();
        assert!(p.sub(&d).unwrap().norm() <= 1e-10);
    }

    #[test]
    fn whitehead_embedding() {
        let fs = whitehead(&poly(&[2.0]), 1, 3, 1e-14).unwrap();
        assert!(fs.iter().all(|f| f.i() >= 1 && f.j() >= 1));
        let p = product_of_factors(&fs, 3, cfg(1)).unwrap();
        assert_eq!(p.get(0, 0), &poly(&[1.0]));
        assert_eq!(p.get(1, 1), &poly(&[2.0]));
        assert_eq!(p.get(2, 2), &poly(&[0.5]));
        assert!(whitehead(&poly(&[2.0]), 2, 3, 1e-14).is_err());
    }

    #[test]
    fn diagonal_identity_emits_nothing() {
        let (fs, left) = diagonal_to_factors(&AlgMatrix::identity(4, cfg(2)), 1e-14).unwrap();
        assert!(fs.is_empty());
        assert!(left.is_exact_one());
    }

    #[test]
    fn diagonal_unit_pair() {
        let u = poly(&[1.0, -0.25]);
        let u_inv = u.reciprocal(1e-15).unwrap();
        let d = AlgMatrix::diagonal(vec![u.clone(), u_inv]).unwrap();
        let (fs, leftover) = diagonal_to_factors(&d, 1e-15).unwrap();
        assert_eq!(fs, whitehead(&u, 0, 2, 1e-15).unwrap());
        let dev = leftover.sub(&TruncatedSeries::one(cfg(1))).unwrap();
        assert!(dev.poly_norm() < 1e-14);
    }

    #[test]
    fn diagonal_constants() {
        let d = AlgMatrix::diagonal(vec![poly(&[1.1]), poly(&[1.0 / 1.1])]).unwrap();
        let (fs, _) = diagonal_to_factors(&d, 1e-15).unwrap();
        let p = product_of_factors(&fs, 2, cfg(1)).unwrap();
        assert!(p.sub(&d).unwrap().norm() <= 1e-12);
    }

    #[test]
    fn identity_factors_to_nothing() {
        let fac = factor_near_identity(&AlgMatrix::identity(3, cfg(2)), 1e-12).unwrap();
        assert!(fac.is_empty());
        assert_eq!(fac.residual_bound, 0.0);
    }

    #[test]
    fn single_elementary() {
        let c = cfg(1);
        let f = ElementaryFactor::new(0, 2, poly(&[0.0, 0.1])).unwrap().to_matrix(3).unwrap();
        let fac = factor_near_identity(&f, 1e-12).unwrap();
        assert!(fac.residual_bound <= 1e-10);
        let p = product_of_factors(&fac.factors, 3, c).unwrap();
        assert!(p.sub(&f).unwrap().norm() <= 1e-10);
    }

    #[test]
    fn refuses_far_from_identity() {
        let f = AlgMatrix::diagonal(vec![poly(&[3.0]), poly(&[1.0 / 3.0])]).unwrap();
        assert!(matches!(factor_near_identity(&f, 1e-12), Err(Error::NotNearIdentity(_))));
    }

    #[test]
    fn elimination_preserves_determinant() {
        let c = cfg(2);
        let z1 = TruncatedSeries::var(c, 0).unwrap();
        let z2 = TruncatedSeries::var(c, 1).unwrap();
        let fs = vec![
            ElementaryFactor::new(0, 1, z1.scale(Complex64::new(0.1, 0.0))).unwrap(),
            ElementaryFactor::new(1, 0, z2.scale(Complex64::new(-0.1, 0.0))).unwrap(),
            ElementaryFactor::new(2, 1, z1.mul(&z2).unwrap().scale(Complex64::new(0.05, 0.0))).unwrap(),
        ];
        let f = product_of_factors(&fs, 3, c).unwrap();
        let det_f = f.det().unwrap();
        let elim = eliminate(&f, 1e-14).unwrap();
        let mut w = f.clone();
        for op in &elim.left {
            w = op.inverse().to_matrix(3).unwrap().mul(&w).unwrap();
            let gap = w.det().unwrap().sub(&det_f).unwrap();
            assert!(gap.poly_norm() <= 1e-9 + gap.tail());
        }
        for op in &elim.right {
            w = w.mul(&op.inverse().to_matrix(3).unwrap()).unwrap();
            let gap = w.det().unwrap().sub(&det_f).unwrap();
            assert!(gap.poly_norm() <= 1e-9 + gap.tail());
        }
    }
}
