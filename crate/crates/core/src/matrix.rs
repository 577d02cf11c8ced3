//! Square matrices over [`TruncatedSeries`] with the summed entry norm
//! `||F|| = sum_{i,j} ||F_ij||_1`, which is submultiplicative.

use std::collections::HashMap;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::par::{self, Strategy};
use crate::series::{AlgebraConfig, TruncatedSeries};

/// Largest size accepted by [`AlgMatrix::det`].
pub const MAX_DET_DIM: usize = 8;

const MAX_NEUMANN_TERMS: usize = 4096;

#[derive(Clone, PartialEq)]
pub struct AlgMatrix {
    n: usize,
    config: AlgebraConfig,
    /// Row-major.
    entries: Vec<TruncatedSeries>,
}

impl AlgMatrix {
    pub fn identity(n: usize, config: AlgebraConfig) -> Self {
        let entries = (0..n * n)
            .map(|idx| {
                if idx / n == idx % n {
                    TruncatedSeries::one(config)
                } else {
                    TruncatedSeries::zero(config)
                }
            })
            .collect();
        Self { n, config, entries }
    }

    pub fn zero(n: usize, config: AlgebraConfig) -> Self {
        Self { n, config, entries: vec![TruncatedSeries::zero(config); n * n] }
    }

    /// Row-major entries; all must share one configuration.
    pub fn from_entries(n: usize, entries: Vec<TruncatedSeries>) -> Result<Self> {
        if n == 0 {
            return Err(Error::DimensionMismatch { expected: 1, found: 0 });
        }
        if entries.len() != n * n {
            return Err(Error::DimensionMismatch { expected: n * n, found: entries.len() });
        }
        let config = *entries[0].config();
        if entries.iter().any(|e| *e.config() != config) {
            return Err(Error::ConfigMismatch);
        }
        Ok(Self { n, config, entries })
    }

    pub fn from_rows(rows: Vec<Vec<TruncatedSeries>>) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Schema("matrix rows must all have length n".into()));
        }
        Self::from_entries(n, rows.into_iter().flatten().collect())
    }

    /// Diagonal matrix with the given entries.
    pub fn diagonal(diag: Vec<TruncatedSeries>) -> Result<Self> {
        let n = diag.len();
        let config = *diag
            .first()
            .ok_or(Error::DimensionMismatch { expected: 1, found: 0 })?
            .config();
        let mut m = Self::zero(n, config);
        for (k, u) in diag.into_iter().enumerate() {
            if *u.config() != config {
                return Err(Error::ConfigMismatch);
            }
            m.entries[k * n + k] = u;
        }
        Ok(m)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn config(&self) -> &AlgebraConfig {
        &self.config
    }

    pub fn entries(&self) -> &[TruncatedSeries] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> &TruncatedSeries {
        &self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: TruncatedSeries) {
        assert_eq!(*value.config(), self.config, "entry config must match the matrix");
        self.entries[i * self.n + j] = value;
    }

    pub fn diagonal_entries(&self) -> Vec<TruncatedSeries> {
        (0..self.n).map(|k| self.get(k, k).clone()).collect()
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.n).all(|i| {
            (0..self.n).all(|j| i == j || (self.get(i, j).is_zero_poly() && self.get(i, j).tail() == 0.0))
        })
    }

    /// `sum_{i,j} ||F_ij||_1`.
    pub fn norm(&self) -> f64 {
        self.entries.iter().map(TruncatedSeries::norm).sum()
    }

    /// Sum of the entry tails.
    pub fn total_tail(&self) -> f64 {
        self.entries.iter().map(TruncatedSeries::tail).sum()
    }

    /// `||F - I||`.
    pub fn distance_to_identity(&self) -> f64 {
        self.sub(&Self::identity(self.n, self.config))
            .expect("same shape")
            .norm()
    }

    fn check_shape(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: other.n });
        }
        if self.config != other.config {
            return Err(Error::ConfigMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_shape(other)?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.add(b))
            .collect::<Result<_>>()?;
        Ok(Self { n: self.n, config: self.config, entries })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_shape(other)?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.sub(b))
            .collect::<Result<_>>()?;
        Ok(Self { n: self.n, config: self.config, entries })
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.mul_with(other, Strategy::default())
    }

    /// Ring product; entries are computed independently under `strategy`.
    pub fn mul_with(&self, other: &Self, strategy: Strategy) -> Result<Self> {
        self.check_shape(other)?;
        let n = self.n;
        let entries = par::try_map_range(n * n, strategy, |idx| {
            let (i, j) = (idx / n, idx % n);
            let mut acc = TruncatedSeries::zero(self.config);
            for k in 0..n {
                let a = self.get(i, k);
                let b = other.get(k, j);
                if (a.is_zero_poly() && a.tail() == 0.0) || (b.is_zero_poly() && b.tail() == 0.0) {
                    continue;
                }
                acc = acc.add(&a.mul(b)?)?;
            }
            Ok::<_, Error>(acc)
        })?;
        Ok(Self { n, config: self.config, entries })
    }

    pub fn transpose(&self) -> Self {
        let n = self.n;
        let entries = (0..n * n).map(|idx| self.get(idx % n, idx / n).clone()).collect();
        Self { n, config: self.config, entries }
    }

    pub fn map_entries<F>(&self, f: F) -> Result<Self>
    where
        F: Fn(&TruncatedSeries) -> Result<TruncatedSeries>,
    {
        let entries = self.entries.iter().map(f).collect::<Result<_>>()?;
        Ok(Self { n: self.n, config: self.config, entries })
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            n: self.n,
            config: self.config,
            entries: self.entries.iter().map(|e| e.scale(c)).collect(),
        }
    }

    /// `F_r(z) = F(r z)` entrywise.
    pub fn dilate(&self, r: f64) -> Result<Self> {
        self.map_entries(|e| e.dilate(r))
    }

    /// Tails dropped from every entry.
    pub fn polynomial_part(&self) -> Self {
        Self {
            n: self.n,
            config: self.config,
            entries: self.entries.iter().map(TruncatedSeries::polynomial_part).collect(),
        }
    }

    /// Determinant by Laplace expansion along rows, memoized over column
    /// subsets. Division free, so it stays inside the series ring.
    pub fn det(&self) -> Result<TruncatedSeries> {
        if self.n > MAX_DET_DIM {
            return Err(Error::DimensionTooLarge(self.n));
        }
        let mut memo: HashMap<u32, TruncatedSeries> = HashMap::new();
        let full: u32 = (1u32 << self.n) - 1;
        self.minor_det(0, full, &mut memo)
    }

    fn minor_det(
        &self,
        row: usize,
        cols: u32,
        memo: &mut HashMap<u32, TruncatedSeries>,
    ) -> Result<TruncatedSeries> {
        if cols == 0 {
            return Ok(TruncatedSeries::one(self.config));
        }
        if let Some(v) = memo.get(&cols) {
            return Ok(v.clone());
        }
        let mut acc = TruncatedSeries::zero(self.config);
        let mut position = 0;
        for c in 0..self.n {
            if cols & (1 << c) == 0 {
                continue;
            }
            let entry = self.get(row, c);
            if !(entry.is_zero_poly() && entry.tail() == 0.0) {
                let sub = self.minor_det(row + 1, cols & !(1 << c), memo)?;
                let term = entry.mul(&sub)?;
                acc = if position % 2 == 0 { acc.add(&term)? } else { acc.sub(&term)? };
            }
            position += 1;
        }
        memo.insert(cols, acc.clone());
        Ok(acc)
    }

    /// Certified inverse of a matrix with `q = ||F - I|| < 1` by the Neumann
    /// series `sum_k (I - F)^k`, stopped once `q^{m+1}/(1-q) < tol`. The
    /// remainder bound is added to every entry tail.
    pub fn inverse_near_identity(&self, tol: f64) -> Result<Self> {
        let id = Self::identity(self.n, self.config);
        let step = id.sub(self)?;
        let q = step.norm();
        if !(q < 1.0) {
            return Err(Error::NotNearIdentity(q));
        }
        let mut sum = id.clone();
        let mut power = id;
        let mut q_pow = q;
        let mut terms = 0;
        while q_pow / (1.0 - q) >= tol && terms < MAX_NEUMANN_TERMS {
            power = power.mul(&step)?;
            sum = sum.add(&power)?;
            q_pow *= q;
            terms += 1;
        }
        let remainder = q_pow / (1.0 - q);
        if remainder > 0.0 {
            sum.entries = sum.entries.into_iter().map(|e| e.widen(remainder)).collect();
        }
        Ok(sum)
    }
}

impl fmt::Debug for AlgMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for AlgMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n {
            write!(f, "[")?;
            for j in 0..self.n {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}
