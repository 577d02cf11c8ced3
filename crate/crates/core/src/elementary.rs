//! Elementary matrices `E_ij(alpha) = I + alpha e_ij`, factor lists, and the
//! alternating lower/upper unipotent normal form.
//!
//! Indices are zero-based in the API; the JSON interchange format is
//! one-based.

use serde::{Deserialize, Serialize};

use crate::dd;
use crate::error::{Error, Result};
use crate::matrix::AlgMatrix;
use crate::series::{AlgebraConfig, TruncatedSeries};

#[derive(Debug, Clone, PartialEq)]
pub struct ElementaryFactor {
    i: usize,
    j: usize,
    alpha: TruncatedSeries,
}

impl ElementaryFactor {
    pub fn new(i: usize, j: usize, alpha: TruncatedSeries) -> Result<Self> {
        if i == j {
            return Err(Error::IndexOutOfRange { i, j, n: 0 });
        }
        Ok(Self { i, j, alpha })
    }

    pub fn i(&self) -> usize {
        self.i
    }

    pub fn j(&self) -> usize {
        self.j
    }

    pub fn alpha(&self) -> &TruncatedSeries {
        &self.alpha
    }

    /// Strictly below the diagonal.
    pub fn is_lower(&self) -> bool {
        self.i > self.j
    }

    pub fn inverse(&self) -> Self {
        Self { i: self.i, j: self.j, alpha: self.alpha.neg() }
    }

    pub(crate) fn check_index(&self, n: usize) -> Result<()> {
        if self.i >= n || self.j >= n {
            return Err(Error::IndexOutOfRange { i: self.i, j: self.j, n });
        }
        Ok(())
    }

    pub fn to_matrix(&self, n: usize) -> Result<AlgMatrix> {
        self.check_index(n)?;
        let mut m = AlgMatrix::identity(n, *self.alpha.config());
        m.set(self.i, self.j, self.alpha.clone());
        Ok(m)
    }
}

/// `E_1 E_2 ... E_K`, associated left to right. Each step is the column
/// operation `col_j += col_i * alpha`.
pub fn product_of_factors(
    factors: &[ElementaryFactor],
    n: usize,
    config: AlgebraConfig,
) -> Result<AlgMatrix> {
    let mut acc = AlgMatrix::identity(n, config);
    for f in factors {
        f.check_index(n)?;
        if *f.alpha.config() != config {
            return Err(Error::ConfigMismatch);
        }
        for r in 0..n {
            let src = acc.get(r, f.i);
            if src.is_zero_poly() && src.tail() == 0.0 {
                continue;
            }
            let updated = acc.get(r, f.j).add(&src.mul(&f.alpha)?)?;
            acc.set(r, f.j, updated);
        }
    }
    Ok(acc)
}

/// For every `k`, the norm of row `j_k` of `S_k = E_(k+1) ... E_K`, in
/// enclosure arithmetic: `S_(k-1) = E_k S_k` is the row operation
/// `row_i += alpha * row_j`. Step `k` of a left-to-right product only
/// touches column `j_k`, so an error `v` committed there reaches the final
/// product as `v e_(j_k)^T S_k`, of norm at most `||v||` times this row norm.
fn suffix_row_norms(factors: &[ElementaryFactor], n: usize, config: AlgebraConfig) -> Result<Vec<f64>> {
    for f in factors {
        f.check_index(n)?;
        if *f.alpha.config() != config {
            return Err(Error::ConfigMismatch);
        }
    }
    let mut norms = vec![0.0; factors.len()];
    let mut suffix = AlgMatrix::identity(n, config);
    for (k, f) in factors.iter().enumerate().rev() {
        norms[k] = (0..n).map(|c| suffix.get(f.j, c).norm()).sum();
        for c in 0..n {
            let src = suffix.get(f.j, c);
            if src.is_zero_poly() && src.tail() == 0.0 {
                continue;
            }
            let updated = suffix.get(f.i, c).add(&f.alpha.mul(src)?)?;
            suffix.set(f.i, c, updated);
        }
    }
    Ok(norms)
}

/// Product of `factors` as a tail-free matrix, with a bound on its l1
/// distance to the exact product.
///
/// With `P_k` the computed prefix products and `D_k` the rounding committed
/// at step `k`, the exact product is `P_K - sum_k D_k S_k` where
/// `S_k = E_(k+1) ... E_K`. `D_k` is confined to column `j_k`, so
/// `||D_k S_k||` is at most `||D_k||` times the norm of row `j_k` of `S_k`.
/// This is far tighter than carrying every rounding error through the norm
/// of each later factor in turn, which is what plain enclosure arithmetic
/// does.
pub fn product_with_error_bound(
    factors: &[ElementaryFactor],
    n: usize,
    config: AlgebraConfig,
) -> Result<(AlgMatrix, f64)> {
    let suffix_norms = suffix_row_norms(factors, n, config)?;
    let mut acc = AlgMatrix::identity(n, config);
    let mut bound = 0.0;
    for (f, s_norm) in factors.iter().zip(&suffix_norms) {
        let mut step = 0.0;
        for r in 0..n {
            let src = acc.get(r, f.i);
            if src.is_zero_poly() {
                continue;
            }
            let updated = acc.get(r, f.j).add(&src.mul(&f.alpha)?)?;
            step += updated.tail();
            acc.set(r, f.j, updated.with_tail(0.0));
        }
        bound += step * s_norm;
    }
    let slack = 1.0 + 2.0 * (factors.len() + 1) as f64 * f64::EPSILON;
    Ok((acc, bound * slack))
}

/// Certified `||E_1 ... E_K - target||`. One-variable products are formed
/// in double-double arithmetic, which keeps the bound close to the actual
/// error even when the factors are large and cancel.
pub fn certified_residual(target: &AlgMatrix, factors: &[ElementaryFactor]) -> Result<f64> {
    if target.config().num_vars() == 1 {
        let norms = suffix_row_norms(factors, target.n(), *target.config())?;
        return dd::univariate_residual(target, factors, &norms);
    }
    let (p, err) = product_with_error_bound(factors, target.n(), *target.config())?;
    let slack = 1.0 + 4.0 * f64::EPSILON;
    Ok((p.sub(target)?.norm() + err) * slack)
}

/// Inverse list: reversed order, negated coefficients.
pub fn invert_factors(factors: &[ElementaryFactor]) -> Vec<ElementaryFactor> {
    factors.iter().rev().map(ElementaryFactor::inverse).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Euclid,
    NearIdentity,
    DilationPipeline,
    Manual,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Euclid => "euclid",
            Method::NearIdentity => "near_identity",
            Method::DilationPipeline => "dilation_pipeline",
            Method::Manual => "manual",
        }
    }
}

/// A witness that a matrix lies in the elementary subgroup: the product of
/// `factors` is within `residual_bound` (summed l1 norm) of the target.
#[derive(Debug, Clone, PartialEq)]
pub struct Factorization {
    pub n: usize,
    pub factors: Vec<ElementaryFactor>,
    pub residual_bound: f64,
    pub method: Method,
}

impl Factorization {
    /// Builds the witness and certifies its residual against `target`.
    pub fn certify(target: &AlgMatrix, factors: Vec<ElementaryFactor>, method: Method) -> Result<Self> {
        let residual_bound = certified_residual(target, &factors)?;
        Ok(Self { n: target.n(), factors, residual_bound, method })
    }

    pub fn product(&self, config: AlgebraConfig) -> Result<AlgMatrix> {
        product_of_factors(&self.factors, self.n, config)
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Lower,
    Upper,
}

/// Unipotent triangular matrix; `g` holds the strict-triangle entries in
/// row-major order, `n(n-1)/2` of them.
#[derive(Debug, Clone, PartialEq)]
pub struct UnipotentBlock {
    pub side: Side,
    pub g: Vec<TruncatedSeries>,
}

fn triangle_positions(side: Side, n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(n * (n.saturating_sub(1)) / 2);
    for i in 0..n {
        for j in 0..n {
            let keep = match side {
                Side::Lower => i > j,
                Side::Upper => i < j,
            };
            if keep {
                out.push((i, j));
            }
        }
    }
    out
}

impl UnipotentBlock {
    pub fn identity(side: Side, n: usize, config: AlgebraConfig) -> Self {
        Self { side, g: vec![TruncatedSeries::zero(config); n * (n - 1) / 2] }
    }

    pub fn to_matrix(&self, n: usize, config: AlgebraConfig) -> Result<AlgMatrix> {
        let positions = triangle_positions(self.side, n);
        if positions.len() != self.g.len() {
            return Err(Error::DimensionMismatch { expected: positions.len(), found: self.g.len() });
        }
        let mut m = AlgMatrix::identity(n, config);
        for (&(i, j), v) in positions.iter().zip(&self.g) {
            m.set(i, j, v.clone());
        }
        Ok(m)
    }

    /// Elementary factors whose product is exactly this block: a lower
    /// block is the product of its columns taken left to right, an upper
    /// block the product of its rows taken bottom to top.
    pub fn to_factors(&self, n: usize) -> Result<Vec<ElementaryFactor>> {
        let positions = triangle_positions(self.side, n);
        if positions.len() != self.g.len() {
            return Err(Error::DimensionMismatch { expected: positions.len(), found: self.g.len() });
        }
        let mut entries: Vec<((usize, usize), &TruncatedSeries)> = positions.into_iter().zip(&self.g).collect();
        match self.side {
            Side::Lower => entries.sort_by_key(|&((i, j), _)| (j, i)),
            Side::Upper => entries.sort_by_key(|&((i, j), _)| (std::cmp::Reverse(i), j)),
        }
        entries
            .into_iter()
            .filter(|(_, v)| !(v.is_zero_poly() && v.tail() == 0.0))
            .map(|((i, j), v)| ElementaryFactor::new(i, j, v.clone()))
            .collect()
    }

    fn from_matrix(side: Side, m: &AlgMatrix) -> Result<Self> {
        let n = m.n();
        let exact_zero = |s: &TruncatedSeries| s.is_zero_poly() && s.tail() == 0.0;
        for i in 0..n {
            if !m.get(i, i).is_exact_one() {
                return Err(Error::MergeOverflow);
            }
            for j in 0..n {
                let opposite = match side {
                    Side::Lower => i < j,
                    Side::Upper => i > j,
                };
                if opposite && !exact_zero(m.get(i, j)) {
                    return Err(Error::MergeOverflow);
                }
            }
        }
        let g = triangle_positions(side, n)
            .into_iter()
            .map(|(i, j)| m.get(i, j).clone())
            .collect();
        Ok(Self { side, g })
    }
}

/// Regroups a factor list into alternating lower/upper unipotent blocks,
/// starting with a lower block (an identity lower block is prepended when
/// the list opens with an upper factor).
pub fn group_ik_normal_form(factors: &[ElementaryFactor], n: usize) -> Result<Vec<UnipotentBlock>> {
    let Some(first) = factors.first() else {
        return Ok(Vec::new());
    };
    let config = *first.alpha.config();
    let mut blocks = Vec::new();
    if !first.is_lower() {
        blocks.push(UnipotentBlock::identity(Side::Lower, n, config));
    }
    for run in factors.chunk_by(|a, b| a.is_lower() == b.is_lower()) {
        let side = if run[0].is_lower() { Side::Lower } else { Side::Upper };
        let product = product_of_factors(run, n, config)?;
        blocks.push(UnipotentBlock::from_matrix(side, &product)?);
    }
    Ok(blocks)
}

/// Factor list equivalent to `blocks`, for certified products.
pub fn blocks_to_factors(blocks: &[UnipotentBlock], n: usize) -> Result<Vec<ElementaryFactor>> {
    let mut out = Vec::new();
    for b in blocks {
        out.extend(b.to_factors(n)?);
    }
    Ok(out)
}

/// Product of the blocks, left to right.
pub fn product_of_blocks(blocks: &[UnipotentBlock], n: usize, config: AlgebraConfig) -> Result<AlgMatrix> {
    let mut acc = AlgMatrix::identity(n, config);
    for b in blocks {
        acc = acc.mul(&b.to_matrix(n, config)?)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> AlgebraConfig {
        AlgebraConfig::vars(1).unwrap()
    }

    fn poly(coeffs: &[f64]) -> TruncatedSeries {
        TruncatedSeries::univariate_real(cfg(), coeffs).unwrap()
    }

    fn e(i: usize, j: usize, coeffs: &[f64]) -> ElementaryFactor {
        ElementaryFactor::new(i, j, poly(coeffs)).unwrap()
    }

    #[test]
    fn elem_to_matrix_examples() {
        assert_eq!(e(0, 1, &[]).to_matrix(2).unwrap(), AlgMatrix::identity(2, cfg()));
        let m = e(0, 1, &[0.0, 1.0]).to_matrix(2).unwrap();
        assert_eq!(m.get(0, 1), &poly(&[0.0, 1.0]));
        let m = e(2, 0, &[1.0, -1.0]).to_matrix(3).unwrap();
        assert_eq!(m.get(2, 0), &poly(&[1.0, -1.0]));
        assert_eq!(m.norm(), 3.0 + 2.0);
        assert!(matches!(e(2, 0, &[1.0]).to_matrix(2), Err(Error::IndexOutOfRange { .. })));
        assert!(ElementaryFactor::new(1, 1, poly(&[1.0])).is_err());
    }

    #[test]
    fn product_examples() {
        assert_eq!(product_of_factors(&[], 3, cfg()).unwrap(), AlgMatrix::identity(3, cfg()));
        let p = product_of_factors(&[e(0, 1, &[0.0, 1.0])], 2, cfg()).unwrap();
        assert_eq!(p, e(0, 1, &[0.0, 1.0]).to_matrix(2).unwrap());

        // E12(z) E21(-1) = [[1 - z, z], [-1, 1]]
        let p = product_of_factors(&[e(0, 1, &[0.0, 1.0]), e(1, 0, &[-1.0])], 2, cfg()).unwrap();
        let expect = AlgMatrix::from_rows(vec![
            vec![poly(&[1.0, -1.0]), poly(&[0.0, 1.0])],
            vec![poly(&[-1.0]), poly(&[1.0])],
        ])
        .unwrap();
        assert_eq!(p, expect);
        assert!(p.det().unwrap().is_exact_one());
    }

    #[test]
    fn product_matches_matrix_multiplication() {
        let fs = vec![e(0, 2, &[0.5, 1.0]), e(1, 0, &[0.0, -2.0]), e(2, 1, &[3.0]), e(0, 1, &[1.0, 0.0, 1.0])];
        let mut m = AlgMatrix::identity(3, cfg());
        for f in &fs {
            m = m.mul(&f.to_matrix(3).unwrap()).unwrap();
        }
        assert_eq!(product_of_factors(&fs, 3, cfg()).unwrap(), m);
    }

    #[test]
    fn invert_examples() {
        let inv = invert_factors(&[e(0, 1, &[0.0, 1.0])]);
        assert_eq!(inv, vec![e(0, 1, &[0.0, -1.0])]);
        let a = e(0, 1, &[1.0, 2.0]);
        let b = e(1, 0, &[0.0, 0.5]);
        assert_eq!(invert_factors(&[a.clone(), b.clone()]), vec![b.inverse(), a.inverse()]);
        let mut all = vec![a, b];
        all.extend(invert_factors(&all.clone()));
        assert_eq!(product_of_factors(&all, 2, cfg()).unwrap(), AlgMatrix::identity(2, cfg()));
    }

    #[test]
    fn normal_form_same_side_merge() {
        let (a, b, c) = (poly(&[1.0, 1.0]), poly(&[0.0, 2.0]), poly(&[-1.0]));
        let fs = vec![
            ElementaryFactor::new(1, 0, a.clone()).unwrap(),
            ElementaryFactor::new(2, 0, b.clone()).unwrap(),
            ElementaryFactor::new(2, 1, c.clone()).unwrap(),
        ];
        let blocks = group_ik_normal_form(&fs, 3).unwrap();
        assert_eq!(blocks.len(), 1);
        assert_eq!(blocks[0].side, Side::Lower);
        assert_eq!(blocks[0].g, vec![a, b, c]);
    }

    #[test]
    fn normal_form_pads_leading_upper() {
        let blocks = group_ik_normal_form(&[e(0, 1, &[0.0, 1.0])], 2).unwrap();
        assert_eq!(blocks.len(), 2);
        assert_eq!(blocks[0], UnipotentBlock::identity(Side::Lower, 2, cfg()));
        assert_eq!(blocks[1].side, Side::Upper);
        assert_eq!(blocks[1].g, vec![poly(&[0.0, 1.0])]);
    }

    #[test]
    fn normal_form_mixed_product() {
        let fs = vec![
            e(0, 1, &[0.5]),
            e(0, 2, &[0.0, 1.0]),
            e(2, 0, &[1.0, 1.0]),
            e(1, 0, &[-0.5]),
            e(1, 2, &[0.0, 0.0, 2.0]),
            e(2, 1, &[0.25, -1.0]),
        ];
        let blocks = group_ik_normal_form(&fs, 3).unwrap();
        let sides: Vec<Side> = blocks.iter().map(|b| b.side).collect();
        assert_eq!(sides, vec![Side::Lower, Side::Upper, Side::Lower, Side::Upper, Side::Lower]);
        assert!(blocks.iter().all(|b| b.g.len() == 3));
        let lhs = product_of_blocks(&blocks, 3, cfg()).unwrap();
        let rhs = product_of_factors(&fs, 3, cfg()).unwrap();
        assert!(lhs.sub(&rhs).unwrap().norm() <= 1e-10);
    }

    #[test]
    fn blocks_expand_to_exact_factors() {
        let l = UnipotentBlock {
            side: Side::Lower,
            g: vec![poly(&[1.0]), poly(&[0.0, 2.0]), poly(&[-3.0, 1.0])],
        };
        let u = UnipotentBlock {
            side: Side::Upper,
            g: vec![poly(&[0.5]), poly(&[]), poly(&[1.0, 1.0, 1.0])],
        };
        for b in [l, u] {
            let fs = b.to_factors(3).unwrap();
            assert_eq!(product_of_factors(&fs, 3, cfg()).unwrap(), b.to_matrix(3, cfg()).unwrap());
        }
    }

    #[test]
    fn method_tags() {
        assert_eq!(serde_json::to_string(&Method::DilationPipeline).unwrap(), "\"dilation_pipeline\"");
        assert_eq!(Method::NearIdentity.as_str(), "near_identity");
    }
}
