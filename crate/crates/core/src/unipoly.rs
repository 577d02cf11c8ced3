//! Euclidean elimination for `SL_n(C[z])`.
//!
//! Column by column, polynomial row operations with quotients from long
//! division drive all but one entry of the column to zero (gcd-style, the
//! pivot being the entry of least degree). The triangular result is cleared
//! above the diagonal by dividing through the diagonal units, and the
//! remaining diagonal goes through the Whitehead telescoping of
//! [`crate::nearid::diagonal_to_factors`].
//!
//! The elimination runs in plain floating-point polynomial arithmetic; the
//! final residual is certified by multiplying the factors back out.

use num_complex::Complex64;

use crate::dd;
use crate::elementary::{certified_residual, ElementaryFactor, Factorization, Method};
use crate::error::{Error, Result};
use crate::matrix::AlgMatrix;
use crate::monomial::Monomial;
use crate::nearid::{diagonal_to_factors, factor_near_identity};
use crate::series::{AlgebraConfig, TruncatedSeries};

/// Relative threshold for degree decisions.
pub const DEFAULT_DROP_TOL: f64 = 1e-12;

/// Degree-decision tolerances tried in turn until the factors certify.
/// Rounding noise in the input, amplified by divisions through small
/// leading coefficients, can exceed the default threshold; genuine leading
/// coefficients of random inputs sit orders of magnitude above it.
pub const DROP_TOL_LADDER: [f64; 6] = [DEFAULT_DROP_TOL, 1e-10, 1e-8, 1e-6, 1e-5, 1e-4];

/// Tolerance on the coefficients of `det F - 1`.
pub const UNIMODULAR_TOL: f64 = 1e-9;

type Poly = Vec<Complex64>;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

fn max_abs(p: &[Complex64]) -> f64 {
    p.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

fn trim(p: &mut Poly, threshold: f64) {
    while p.last().is_some_and(|c| c.norm() <= threshold) {
        p.pop();
    }
}

fn poly_degree(p: &[Complex64]) -> usize {
    p.len().saturating_sub(1)
}

fn poly_mul(a: &[Complex64], b: &[Complex64]) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![ZERO; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// `a + c * b`.
fn poly_add_scaled(a: &[Complex64], c: &[Complex64], b: &[Complex64]) -> Poly {
    let prod = poly_mul(c, b);
    let mut out = a.to_vec();
    if out.len() < prod.len() {
        out.resize(prod.len(), ZERO);
    }
    for (o, p) in out.iter_mut().zip(prod) {
        *o += p;
    }
    trim(&mut out, 0.0);
    out
}

/// Long division with degree decisions at `drop_tol` relative to the larger
/// input magnitude.
fn divmod(a: &[Complex64], b: &[Complex64], drop_tol: f64) -> Result<(Poly, Poly)> {
    let (q, rem, _) = divmod_tracked(a, 0.0, b, 0.0, drop_tol)?;
    Ok((q, rem))
}

fn l1(p: &[Complex64]) -> f64 {
    p.iter().map(|c| c.norm()).sum()
}

/// Long division where `a` and `b` came out of computations whose
/// intermediate coefficients reached magnitudes `ma` and `mb`. A coefficient
/// counts as zero when it is below `drop_tol` times the magnitude that went
/// into it, so cancellation does not promote rounding noise to a leading
/// coefficient. Returns the quotient, the remainder and the remainder's
/// magnitude.
fn divmod_tracked(
    a: &[Complex64],
    ma: f64,
    b: &[Complex64],
    mb: f64,
    drop_tol: f64,
) -> Result<(Poly, Poly, f64)> {
    let ma = ma.max(max_abs(a));
    let mb = mb.max(max_abs(b));
    let relative = drop_tol * max_abs(a).max(max_abs(b));
    let mut divisor = b.to_vec();
    trim(&mut divisor, relative.max(drop_tol * mb));
    if divisor.is_empty() {
        return Err(Error::DivisionByZero);
    }
    let mut rem = a.to_vec();
    trim(&mut rem, relative.max(drop_tol * ma));
    let db = poly_degree(&divisor);
    let lead = divisor[db];
    let mut quot = vec![ZERO; rem.len().saturating_sub(db)];
    let mut mag = ma;
    while rem.len() > db {
        let shift = rem.len() - 1 - db;
        let c = rem[rem.len() - 1] / lead;
        quot[shift] = c;
        for (t, d) in divisor.iter().enumerate().take(db) {
            rem[shift + t] -= c * d;
        }
        rem.pop();
        mag = ma.max(l1(&quot) * mb);
        trim(&mut rem, relative.max(drop_tol * mag));
    }
    trim(&mut quot, 0.0);
    Ok((quot, rem, mag))
}

fn require_univariate_polynomial(s: &TruncatedSeries) -> Result<()> {
    if s.config().num_vars() != 1 {
        return Err(Error::Unsupported(format!(
            "Euclidean elimination needs one variable, got {}",
            s.config().num_vars()
        )));
    }
    if !has_rounding_tail_only(s) {
        return Err(Error::Unsupported(format!(
            "Euclidean elimination needs polynomial entries, got a tail of {:e}",
            s.tail()
        )));
    }
    Ok(())
}

/// Tails up to this fraction of `max(1, ||poly||)` are taken to be rounding
/// enclosures of an exact polynomial. They are dropped during elimination
/// and come back through the certified residual.
pub const ROUNDING_TAIL_REL: f64 = 1e-10;

pub(crate) fn has_rounding_tail_only(s: &TruncatedSeries) -> bool {
    s.tail() <= ROUNDING_TAIL_REL * s.poly_norm().max(1.0)
}

fn to_poly(s: &TruncatedSeries) -> Poly {
    let mut out = vec![ZERO; s.degree() as usize + 1];
    for (m, c) in s.terms() {
        out[m.exp(0) as usize] = *c;
    }
    trim(&mut out, 0.0);
    out
}

/// Polynomial to series; coefficients beyond the degree cap go to the tail.
fn to_series(config: AlgebraConfig, p: &[Complex64]) -> TruncatedSeries {
    let cap = config.degree_cap() as usize;
    let overflow: f64 = p.iter().skip(cap + 1).map(|c| c.norm()).sum();
    let terms = p
        .iter()
        .take(cap + 1)
        .enumerate()
        .map(|(k, &c)| (Monomial::new(&[k as u32]).expect("small exponent"), c));
    TruncatedSeries::from_terms(config, terms, 0.0)
        .expect("within cap")
        .widen(overflow)
}

/// `a = b q + rem` with `deg rem < deg b`.
pub fn poly_divmod(
    a: &TruncatedSeries,
    b: &TruncatedSeries,
    drop_tol: f64,
) -> Result<(TruncatedSeries, TruncatedSeries)> {
    require_univariate_polynomial(a)?;
    require_univariate_polynomial(b)?;
    if a.config() != b.config() {
        return Err(Error::ConfigMismatch);
    }
    let (q, r) = divmod(&to_poly(a), &to_poly(b), drop_tol)?;
    let config = *a.config();
    Ok((to_series(config, &q), to_series(config, &r)))
}

/// Largest coefficient of `det F - 1` beyond the determinant's own rounding
/// enclosure.
pub fn unimodular_deviation(f: &AlgMatrix) -> Result<f64> {
    let det = f.det()?;
    let dev = det.sub(&TruncatedSeries::one(*f.config()))?;
    Ok((dev.max_abs_coeff() - det.tail()).max(0.0))
}

/// Knobs of one elimination attempt.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct EliminationOptions {
    pub drop_tol: f64,
    /// Magnitudes compound along chains of row operations (conservative)
    /// instead of looking only at the operands of the current operation.
    pub compounding: bool,
    /// Keep only the constant term of each diagonal unit. Under the
    /// unimodularity promise the units are constants and anything else is
    /// rounding residue; the final residual accounts for what is dropped.
    pub constant_diagonal: bool,
}

#[cfg(test)]
impl EliminationOptions {
    pub fn new(drop_tol: f64) -> Self {
        Self { drop_tol, compounding: true, constant_diagonal: false }
    }
}

struct Reducer {
    n: usize,
    rows: Vec<Vec<Poly>>,
    /// Coefficient magnitude that went into each entry; degree decisions
    /// are made relative to it.
    mag: Vec<Vec<f64>>,
    /// Inverses of the applied row operations, in application order.
    recorded: Vec<(usize, usize, Poly)>,
    opts: EliminationOptions,
}

impl Reducer {
    fn new(f: &AlgMatrix, opts: EliminationOptions) -> Self {
        let n = f.n();
        let rows: Vec<Vec<Poly>> = (0..n).map(|i| (0..n).map(|j| to_poly(f.get(i, j))).collect()).collect();
        let mag = rows.iter().map(|row| row.iter().map(|p| max_abs(p)).collect()).collect();
        Self { n, rows, mag, recorded: Vec::new(), opts }
    }

    fn magnitude(&self, i: usize, j: usize) -> f64 {
        if self.opts.compounding {
            self.mag[i][j]
        } else {
            max_abs(&self.rows[i][j])
        }
    }

    /// `row_i += c * row_k`.
    fn row_op(&mut self, i: usize, k: usize, c: Poly) {
        let cn = l1(&c);
        for j in 0..self.n {
            self.mag[i][j] = self.magnitude(i, j).max(cn * self.magnitude(k, j));
            let updated = poly_add_scaled(&self.rows[i][j], &c, &self.rows[k][j]);
            self.rows[i][j] = updated;
        }
        let neg = c.iter().map(|x| -x).collect();
        self.recorded.push((i, k, neg));
    }

    /// Signed swap realized by three elementary operations:
    /// row k becomes row p, row p becomes minus row k.
    fn swap(&mut self, k: usize, p: usize) {
        let one = vec![Complex64::new(1.0, 0.0)];
        let minus_one = vec![Complex64::new(-1.0, 0.0)];
        self.row_op(k, p, one.clone());
        self.row_op(p, k, minus_one);
        self.row_op(k, p, one);
    }

    /// Trims column `k` below the magnitude-relative threshold, or below the
    /// column-relative one alone if the former leaves nothing.
    fn trim_column(&mut self, k: usize) {
        let drop_tol = self.opts.drop_tol;
        let scale = (k..self.n).map(|r| max_abs(&self.rows[r][k])).fold(0.0, f64::max);
        let relative = drop_tol * scale;
        let trimmed: Vec<Poly> = (k..self.n)
            .map(|r| {
                let mut p = self.rows[r][k].clone();
                trim(&mut p, relative.max(drop_tol * self.magnitude(r, k)));
                p
            })
            .collect();
        if trimmed.iter().all(|p| p.is_empty()) {
            for r in k..self.n {
                trim(&mut self.rows[r][k], relative);
            }
        } else {
            for (r, p) in (k..self.n).zip(trimmed) {
                self.rows[r][k] = p;
            }
        }
    }

    fn reduce_column(&mut self, k: usize) -> Result<()> {
        let mut last_degree = usize::MAX;
        loop {
            self.trim_column(k);
            let live: Vec<usize> = (k..self.n).filter(|&r| !self.rows[r][k].is_empty()).collect();
            let Some(&pivot) = live.iter().min_by_key(|&&r| (poly_degree(&self.rows[r][k]), r)) else {
                return Err(Error::PivotBreakdown(k));
            };
            if live.len() == 1 {
                if pivot != k {
                    self.swap(k, pivot);
                }
                return Ok(());
            }
            let pivot_degree = poly_degree(&self.rows[pivot][k]);
            if pivot_degree >= last_degree {
                // Euclidean steps must strictly lower the working degree.
                return Err(Error::PivotBreakdown(k));
            }
            last_degree = pivot_degree;
            for &r in live.iter().filter(|&&r| r != pivot) {
                let (q, rem, mag) = divmod_tracked(
                    &self.rows[r][k],
                    self.magnitude(r, k),
                    &self.rows[pivot][k],
                    self.magnitude(pivot, k),
                    self.opts.drop_tol,
                )?;
                if !q.is_empty() {
                    let neg_q: Poly = q.iter().map(|x| -x).collect();
                    self.row_op(r, pivot, neg_q);
                }
                self.rows[r][k] = rem;
                self.mag[r][k] = mag;
            }
        }
    }
}

/// Euclidean factorization of a univariate, tail-free unimodular matrix.
pub fn factor_univariate(f: &AlgMatrix, tol: f64) -> Result<Factorization> {
    check_euclid_input(f)?;
    let dev = unimodular_deviation(f)?;
    if dev > UNIMODULAR_TOL {
        return Err(Error::NotUnimodular(dev));
    }
    let factors = euclid_search(f, tol)?;
    Factorization::certify(f, factors, Method::Euclid)
}

/// Relabelling of rows and columns together (`G = P F P^-1`), optionally
/// followed by transposition. Each gives a different elimination order for
/// the same matrix, and elementary factors of `G` map back to elementary
/// factors of `F` one for one.
#[derive(Debug, Clone, PartialEq)]
struct Variant {
    perm: Vec<usize>,
    transposed: bool,
}

impl Variant {
    fn apply(&self, f: &AlgMatrix) -> Result<AlgMatrix> {
        let n = f.n();
        let mut g = f.clone();
        for i in 0..n {
            for j in 0..n {
                g.set(self.perm[i], self.perm[j], f.get(i, j).clone());
            }
        }
        Ok(if self.transposed { g.transpose() } else { g })
    }

    fn pull_back(&self, factors: Vec<ElementaryFactor>) -> Vec<ElementaryFactor> {
        let mut inv = vec![0; self.perm.len()];
        for (i, &p) in self.perm.iter().enumerate() {
            inv[p] = i;
        }
        // (E_1 ... E_k)^T = E_k^T ... E_1^T with E_ij(a)^T = E_ji(a).
        let oriented: Vec<ElementaryFactor> = if self.transposed {
            factors
                .into_iter()
                .rev()
                .map(|e| ElementaryFactor::new(e.j(), e.i(), e.alpha().clone()).expect("i != j"))
                .collect()
        } else {
            factors
        };
        oriented
            .into_iter()
            .map(|e| ElementaryFactor::new(inv[e.i()], inv[e.j()], e.alpha().clone()).expect("i != j"))
            .collect()
    }
}

/// Identity first, then the remaining permutations of `0..n` in
/// lexicographic order (only the reversal beyond `n = 4`).
fn relabellings(n: usize) -> Vec<Vec<usize>> {
    let identity: Vec<usize> = (0..n).collect();
    if n > 4 {
        return vec![identity.clone(), identity.into_iter().rev().collect()];
    }
    let mut out = vec![identity.clone()];
    let mut p = identity;
    // Next lexicographic permutation.
    loop {
        let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| p[i] < p[i + 1]) else { break };
        let j = (i + 1..n).rev().find(|&j| p[j] > p[i]).expect("a larger element exists");
        p.swap(i, j);
        p[i + 1..].reverse();
        out.push(p.clone());
    }
    out
}

/// Searches elimination settings until the factors certify within `tol`.
///
/// Rounding noise in the input, amplified by divisions through small leading
/// coefficients, can pass for genuine coefficients; the row order and the
/// orientation decide how large the intermediate entries grow. The search
/// runs over [`DROP_TOL_LADDER`], over relabellings and transposition, and
/// over the two magnitude models, and returns the first certified factor
/// list. Failing that, each candidate is corrected by near-identity factors
/// of `P^-1 F`, `P` being its product. The smallest residual found is
/// returned if nothing certifies, or the first error if nothing completed.
pub(crate) fn euclid_search(f: &AlgMatrix, tol: f64) -> Result<Vec<ElementaryFactor>> {
    let mut variants = Vec::new();
    for perm in relabellings(f.n()) {
        for transposed in [false, true] {
            variants.push(Variant { perm: perm.clone(), transposed });
        }
    }
    let inputs: Vec<AlgMatrix> = variants.iter().map(|v| v.apply(f)).collect::<Result<_>>()?;

    let mut candidates: Vec<(f64, Vec<ElementaryFactor>)> = Vec::new();
    let mut first_err = None;
    for constant_diagonal in [false, true] {
        for compounding in [true, false] {
            for drop_tol in DROP_TOL_LADDER {
                let opts = EliminationOptions { drop_tol, compounding, constant_diagonal };
                for (variant, g) in variants.iter().zip(&inputs) {
                    match euclid_factors(g, tol, opts) {
                        Ok(factors) => {
                            let factors = variant.pull_back(factors);
                            let residual = match certified_residual(f, &factors) {
                                Ok(r) => r,
                                Err(e) => {
                                    first_err.get_or_insert(e);
                                    continue;
                                }
                            };
                            if residual <= tol {
                                return Ok(factors);
                            }
                            candidates.push((residual, factors));
                        }
                        Err(e) => {
                            first_err.get_or_insert(e);
                        }
                    }
                }
            }
        }
    }

    candidates.sort_by(|a, b| a.0.total_cmp(&b.0));
    candidates.dedup_by(|a, b| a.1 == b.1);
    let mut best = candidates.first().cloned();
    for (_, factors) in candidates.iter().take(REFINE_CANDIDATES) {
        let mut current = factors.clone();
        let mut current_residual = f64::INFINITY;
        for _ in 0..REFINE_ROUNDS {
            let Some((residual, refined)) = refine(f, &current, tol)? else { break };
            if residual <= tol {
                return Ok(refined);
            }
            if best.as_ref().is_none_or(|(r, _)| residual < *r) {
                best = Some((residual, refined.clone()));
            }
            if residual >= current_residual {
                break;
            }
            (current, current_residual) = (refined, residual);
        }
    }
    match (best, first_err) {
        (Some((_, factors)), _) => Ok(factors),
        (None, Some(e)) => Err(e),
        (None, None) => unreachable!("the search is not empty"),
    }
}

/// How many of the closest candidates get a near-identity correction.
const REFINE_CANDIDATES: usize = 8;

/// Corrections applied in turn to one candidate while the residual shrinks.
const REFINE_ROUNDS: usize = 3;

/// Corrects an inaccurate factor list `E_1 ... E_K`. For a split point `k`,
/// with `A = E_1 ... E_k` and `B = E_(k+1) ... E_K`, the matrix
/// `X = A^-1 F B^-1` is near the identity when `AB` is close to `F`, and
/// `F = A X B` exactly. `X` is formed in double-double arithmetic and its
/// near-identity factors are spliced in at `k`. Where the error is amplified
/// depends on the norms on either side of the split, so every `k` is tried.
/// Returns the first certified list, or the one with the smallest residual.
fn refine(f: &AlgMatrix, factors: &[ElementaryFactor], tol: f64) -> Result<Option<(f64, Vec<ElementaryFactor>)>> {
    let inverses: Vec<ElementaryFactor> = factors.iter().map(ElementaryFactor::inverse).collect();
    let mut best: Option<(f64, Vec<ElementaryFactor>)> = None;
    for k in 0..=factors.len() {
        let right: Vec<ElementaryFactor> = inverses[k..].iter().rev().cloned().collect();
        // Overflowing splits are skipped.
        let Ok(x) = dd::univariate_sandwich(&inverses[..k], f, &right) else { continue };
        let Ok(correction) = factor_near_identity(&x, tol) else { continue };
        let mut out = factors[..k].to_vec();
        out.extend(correction.factors);
        out.extend_from_slice(&factors[k..]);
        let Ok(residual) = certified_residual(f, &out) else { continue };
        if residual <= tol {
            return Ok(Some((residual, out)));
        }
        if best.as_ref().is_none_or(|(r, _)| residual < *r) {
            best = Some((residual, out));
        }
    }
    Ok(best)
}

pub(crate) fn check_euclid_input(f: &AlgMatrix) -> Result<()> {
    f.entries().iter().try_for_each(require_univariate_polynomial)
}

/// The elimination itself, without the unimodularity gate. A determinant
/// that drifts from 1 ends up in the last diagonal unit.
pub(crate) fn euclid_factors(f: &AlgMatrix, tol: f64, opts: EliminationOptions) -> Result<Vec<ElementaryFactor>> {
    check_euclid_input(f)?;
    let n = f.n();
    let config = *f.config();
    let drop_tol = opts.drop_tol;
    let mut red = Reducer::new(f, opts);
    for k in 0..n {
        red.reduce_column(k)?;
    }

    // Diagonal units: constants when the trimmed degree is zero.
    let mut diag = Vec::with_capacity(n);
    let mut inverses = Vec::with_capacity(n);
    for k in 0..n {
        let mut u = red.rows[k][k].clone();
        let relative = drop_tol * max_abs(&u);
        let mut cut = relative.max(drop_tol * red.magnitude(k, k));
        if u.iter().all(|c| c.norm() <= cut) {
            cut = relative;
        }
        trim(&mut u, cut);
        if u.is_empty() {
            return Err(Error::NotInvertibleDiagonal(k));
        }
        if opts.constant_diagonal {
            u.truncate(1);
        }
        let unit = to_series(config, &u);
        let inv = if u.len() == 1 {
            TruncatedSeries::constant(config, Complex64::new(1.0, 0.0) / u[0])
        } else {
            let normalized = unit.scale(Complex64::new(1.0, 0.0) / u[0]);
            let off = normalized.sub(&TruncatedSeries::one(config))?.norm();
            if !(off < 1.0) {
                return Err(Error::NotInvertibleDiagonal(k));
            }
            unit.reciprocal(tol).map_err(|_| Error::NotInvertibleDiagonal(k))?
        };
        diag.push(unit);
        inverses.push(inv);
    }

    let mut factors: Vec<ElementaryFactor> = red
        .recorded
        .into_iter()
        .filter(|(_, _, c)| !c.is_empty())
        .map(|(i, k, c)| ElementaryFactor::new(i, k, to_series(config, &c)))
        .collect::<Result<_>>()?;

    // Above the diagonal: row_r -= (W_rk / u_k) row_k touches only column k
    // once the rows below are cleared, so the multipliers can be read off.
    let upper: Vec<Vec<TruncatedSeries>> = red
        .rows
        .iter()
        .map(|row| row.iter().map(|p| to_series(config, p)).collect())
        .collect();
    for k in (1..n).rev() {
        for r in 0..k {
            if upper[r][k].is_zero_poly() {
                continue;
            }
            let m = upper[r][k].mul(&inverses[k])?;
            factors.push(ElementaryFactor::new(r, k, m)?);
        }
    }

    let d = AlgMatrix::diagonal(diag)?;
    let (diag_factors, _leftover) = diagonal_to_factors(&d, tol)?;
    factors.extend(diag_factors);
    Ok(factors)
}
