//! Enclosure arithmetic for the Wiener algebra `W+` of the closed polydisc.
//!
//! A [`TruncatedSeries`] stores a polynomial `p` (every monomial within the
//! total-degree cap) and a tail radius `tau >= 0`. It stands for the set of
//! all absolutely summable power series `p + g` with `||g||_1 <= tau`. Every
//! operation maps members of its inputs to members of its output.
//!
//! Rounding errors of the coefficient arithmetic are captured exactly with
//! error-free transformations (`two_sum`, `two_prod`) and added to the tail;
//! the accumulated tail increments are then inflated by `float_slack` to cover
//! the rounding of the tail sums themselves. Exactly representable
//! computations therefore keep a zero tail.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::monomial::{Monomial, MAX_VARS};

pub const DEFAULT_DEGREE_CAP: u32 = 64;
pub const DEFAULT_FLOAT_SLACK: f64 = 1.0 + 1e-12;

/// Coefficients smaller than this are moved into the tail.
pub const DROP_BELOW: f64 = 1e-300;

/// Reciprocal candidates ignore coefficients below this fraction of `|b_0|`;
/// the certification step accounts for what is lost.
const CANDIDATE_CUTOFF: f64 = 1e-22;

/// Hard stop for the Neumann summation; the remaining geometric bound is
/// folded into the tail even if it exceeds the requested tolerance.
const MAX_NEUMANN_TERMS: usize = 4096;

/// Dense accumulation is used while the exponent box stays below this size.
const DENSE_BOX_LIMIT: u64 = 1 << 22;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlgebraConfig {
    num_vars: usize,
    degree_cap: u32,
    float_slack: f64,
}

impl AlgebraConfig {
    pub fn new(num_vars: usize, degree_cap: u32) -> Result<Self> {
        Self::with_slack(num_vars, degree_cap, DEFAULT_FLOAT_SLACK)
    }

    pub fn with_slack(num_vars: usize, degree_cap: u32, float_slack: f64) -> Result<Self> {
        if num_vars == 0 || num_vars > MAX_VARS {
            return Err(Error::InvalidConfig(format!(
                "number of variables must be in 1..={MAX_VARS}, got {num_vars}"
            )));
        }
        if degree_cap == 0 || degree_cap > u32::from(u16::MAX) / 2 {
            return Err(Error::InvalidConfig(format!("degree cap {degree_cap} out of range")));
        }
        if !(float_slack >= 1.0) || !float_slack.is_finite() {
            return Err(Error::InvalidConfig(format!("float slack {float_slack} must be >= 1")));
        }
        Ok(Self { num_vars, degree_cap, float_slack })
    }

    /// `d` variables with the default cap of 64.
    pub fn vars(num_vars: usize) -> Result<Self> {
        Self::new(num_vars, DEFAULT_DEGREE_CAP)
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn degree_cap(&self) -> u32 {
        self.degree_cap
    }

    pub fn float_slack(&self) -> f64 {
        self.float_slack
    }
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

/// `a + b` rounded upward.
fn add_up(a: f64, b: f64) -> f64 {
    let (s, e) = two_sum(a, b);
    if e > 0.0 {
        s.next_up()
    } else {
        s
    }
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

/// Complex sum plus an upper bound on its rounding error.
#[inline]
fn cadd(a: Complex64, b: Complex64) -> (Complex64, f64) {
    let (re, e1) = two_sum(a.re, b.re);
    let (im, e2) = two_sum(a.im, b.im);
    (Complex64::new(re, im), e1.abs() + e2.abs())
}

/// Complex product plus an upper bound on its rounding error.
#[inline]
fn cmul(a: Complex64, b: Complex64) -> (Complex64, f64) {
    let (p1, e1) = two_prod(a.re, b.re);
    let (p2, e2) = two_prod(a.im, b.im);
    let (re, e3) = two_sum(p1, -p2);
    let (p3, e4) = two_prod(a.re, b.im);
    let (p4, e5) = two_prod(a.im, b.re);
    let (im, e6) = two_sum(p3, p4);
    (
        Complex64::new(re, im),
        e1.abs() + e2.abs() + e3.abs() + e4.abs() + e5.abs() + e6.abs(),
    )
}

/// A complex value with an error radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexBall {
    pub mid: Complex64,
    pub rad: f64,
}

impl ComplexBall {
    pub fn contains(&self, z: Complex64) -> bool {
        (z - self.mid).norm() <= self.rad
    }
}

#[derive(Clone, PartialEq)]
pub struct TruncatedSeries {
    config: AlgebraConfig,
    /// Sorted by graded order, no zero coefficients.
    terms: Vec<(Monomial, Complex64)>,
    tail: f64,
}

impl TruncatedSeries {
    pub fn zero(config: AlgebraConfig) -> Self {
        Self { config, terms: Vec::new(), tail: 0.0 }
    }

    pub fn one(config: AlgebraConfig) -> Self {
        Self::constant(config, Complex64::new(1.0, 0.0))
    }

    pub fn constant(config: AlgebraConfig, c: Complex64) -> Self {
        Self::zero(config).with_terms_unchecked(vec![(Monomial::one(), c)])
    }

    pub fn real(config: AlgebraConfig, c: f64) -> Self {
        Self::constant(config, Complex64::new(c, 0.0))
    }

    /// The coordinate function `z_{var+1}`.
    pub fn var(config: AlgebraConfig, var: usize) -> Result<Self> {
        if var >= config.num_vars {
            return Err(Error::InvalidConfig(format!(
                "variable index {var} out of range for {} variables",
                config.num_vars
            )));
        }
        Self::from_terms(config, [(Monomial::var(var)?, Complex64::new(1.0, 0.0))], 0.0)
    }

    /// Builds a series from `(monomial, coefficient)` pairs. Repeated
    /// monomials are summed; monomials above the degree cap or using
    /// variables beyond `num_vars` are rejected.
    pub fn from_terms<I>(config: AlgebraConfig, terms: I, tail: f64) -> Result<Self>
    where
        I: IntoIterator<Item = (Monomial, Complex64)>,
    {
        if !(tail >= 0.0) || !tail.is_finite() {
            return Err(Error::InvalidConfig(format!("tail {tail} must be finite and >= 0")));
        }
        let mut acc: BTreeMap<Monomial, Complex64> = BTreeMap::new();
        let mut err = 0.0;
        for (m, c) in terms {
            if m.support_width() > config.num_vars {
                return Err(Error::InvalidConfig(format!(
                    "monomial {m} uses more than {} variables",
                    config.num_vars
                )));
            }
            if m.degree() > config.degree_cap {
                return Err(Error::DegreeExceedsCap { degree: m.degree(), cap: config.degree_cap });
            }
            if !c.re.is_finite() || !c.im.is_finite() {
                return Err(Error::InvalidConfig(format!("non-finite coefficient at {m}")));
            }
            let slot = acc.entry(m).or_insert(Complex64::new(0.0, 0.0));
            let (s, e) = cadd(*slot, c);
            *slot = s;
            err += e;
        }
        Ok(Self::assemble(config, acc.into_iter().collect(), tail, err))
    }

    /// Univariate convenience: `coeffs[k]` multiplies `z_1^k`.
    pub fn univariate(config: AlgebraConfig, coeffs: &[Complex64]) -> Result<Self> {
        let terms = coeffs
            .iter()
            .enumerate()
            .map(|(k, &c)| Ok((Monomial::new(&[k as u32])?, c)))
            .collect::<Result<Vec<_>>>()?;
        Self::from_terms(config, terms, 0.0)
    }

    pub fn univariate_real(config: AlgebraConfig, coeffs: &[f64]) -> Result<Self> {
        let cs: Vec<Complex64> = coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect();
        Self::univariate(config, &cs)
    }

    /// Same polynomial, tail replaced.
    pub fn with_tail(mut self, tail: f64) -> Self {
        assert!(tail >= 0.0 && tail.is_finite(), "tail must be finite and nonnegative");
        self.tail = tail;
        self
    }

    /// Enlarges the tail by `extra` (slack applied to the new tail).
    pub fn widen(mut self, extra: f64) -> Self {
        if extra > 0.0 {
            self.tail = (self.tail + extra) * self.config.float_slack;
        }
        self
    }

    fn with_terms_unchecked(mut self, terms: Vec<(Monomial, Complex64)>) -> Self {
        self.terms = terms;
        self.terms.retain(|(_, c)| *c != Complex64::new(0.0, 0.0));
        self
    }

    /// Final normalization shared by all operations: drops exact zeros,
    /// sweeps negligible coefficients into the tail and applies the slack to
    /// the tail increment `extra` on top of `base_tail`.
    fn assemble(
        config: AlgebraConfig,
        mut terms: Vec<(Monomial, Complex64)>,
        base_tail: f64,
        extra: f64,
    ) -> Self {
        let mut swept = 0.0;
        terms.retain(|(_, c)| {
            let a = c.norm();
            if a == 0.0 {
                false
            } else if a < DROP_BELOW {
                swept += a;
                false
            } else {
                true
            }
        });
        let incr = extra + swept;
        let tail = if incr > 0.0 { (base_tail + incr) * config.float_slack } else { base_tail };
        Self { config, terms, tail }
    }

    pub fn config(&self) -> &AlgebraConfig {
        &self.config
    }

    pub fn tail(&self) -> f64 {
        self.tail
    }

    pub fn terms(&self) -> &[(Monomial, Complex64)] {
        &self.terms
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, m: &Monomial) -> Complex64 {
        self.terms
            .binary_search_by(|(k, _)| k.cmp(m))
            .map_or(Complex64::new(0.0, 0.0), |i| self.terms[i].1)
    }

    pub fn constant_term(&self) -> Complex64 {
        self.coeff(&Monomial::one())
    }

    /// Highest total degree with a stored coefficient (0 for the zero polynomial).
    pub fn degree(&self) -> u32 {
        self.terms.last().map_or(0, |(m, _)| m.degree())
    }

    pub fn is_zero_poly(&self) -> bool {
        self.terms.is_empty()
    }

    /// True when the polynomial part is a constant.
    pub fn is_constant(&self) -> bool {
        self.terms.iter().all(|(m, _)| m.is_one())
    }

    /// Exactly the polynomial 1 with no tail.
    pub fn is_exact_one(&self) -> bool {
        self.tail == 0.0
            && self.terms.len() == 1
            && self.terms[0].0.is_one()
            && self.terms[0].1 == Complex64::new(1.0, 0.0)
    }

    /// Stored polynomial, tail discarded.
    pub fn polynomial_part(&self) -> Self {
        Self { config: self.config, terms: self.terms.clone(), tail: 0.0 }
    }

    /// `sum_k |a_k|` over the stored polynomial.
    pub fn poly_norm(&self) -> f64 {
        self.terms.iter().map(|(_, c)| c.norm()).sum()
    }

    /// `||f||_1` bound: `sum_k |a_k| + tau`.
    pub fn norm(&self) -> f64 {
        self.poly_norm() + self.tail
    }

    /// Largest coefficient modulus of the polynomial part.
    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.iter().map(|(_, c)| c.norm()).fold(0.0, f64::max)
    }

    fn check_config(&self, other: &Self) -> Result<()> {
        if self.config == other.config {
            Ok(())
        } else {
            Err(Error::ConfigMismatch)
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.combine(other, false)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.combine(other, true)
    }

    fn combine(&self, other: &Self, negate: bool) -> Result<Self> {
        self.check_config(other)?;
        let sign = if negate { -1.0 } else { 1.0 };
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let mut err = 0.0;
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() || j < other.terms.len() {
            let ord = match (self.terms.get(i), other.terms.get(j)) {
                (Some(a), Some(b)) => a.0.cmp(&b.0),
                (Some(_), None) => std::cmp::Ordering::Less,
                _ => std::cmp::Ordering::Greater,
            };
            match ord {
                std::cmp::Ordering::Less => {
                    out.push(self.terms[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    let (m, c) = other.terms[j];
                    out.push((m, c * sign));
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let (m, a) = self.terms[i];
                    let (s, e) = cadd(a, other.terms[j].1 * sign);
                    out.push((m, s));
                    err += e;
                    i += 1;
                    j += 1;
                }
            }
        }
        Ok(Self::assemble(self.config, out, add_up(self.tail, other.tail), err))
    }

    pub fn neg(&self) -> Self {
        Self {
            config: self.config,
            terms: self.terms.iter().map(|&(m, c)| (m, -c)).collect(),
            tail: self.tail,
        }
    }

    /// `c * f`.
    pub fn scale(&self, c: Complex64) -> Self {
        let mut err = 0.0;
        let terms = self
            .terms
            .iter()
            .map(|&(m, a)| {
                let (p, e) = cmul(a, c);
                err += e;
                (m, p)
            })
            .collect();
        Self::assemble(self.config, terms, 0.0, self.tail * c.norm() + err)
    }

    /// `f + c`.
    pub fn add_constant(&self, c: Complex64) -> Self {
        let k = TruncatedSeries::constant(self.config, c);
        self.add(&k).expect("same config")
    }

    /// Product with overflow folding: terms of total degree above the cap
    /// enter the tail by absolute value.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_config(other)?;
        let d = self.config.num_vars;
        let cap = self.config.degree_cap;
        let prop = self.norm() * other.tail + self.tail * other.poly_norm();

        if self.terms.is_empty() || other.terms.is_empty() {
            return Ok(Self::assemble(self.config, Vec::new(), 0.0, prop));
        }

        // Mixed-radix keys: per variable radix = max exponent sum + 1, so the
        // key of a product monomial is the sum of the factor keys.
        let mut strides = [0u64; MAX_VARS];
        let mut box_size: u64 = 1;
        let mut dense_ok = true;
        for v in 0..d {
            let ma = self.terms.iter().map(|(m, _)| m.exp(v)).max().unwrap_or(0);
            let mb = other.terms.iter().map(|(m, _)| m.exp(v)).max().unwrap_or(0);
            let radix = u64::from(ma.min(cap) + mb.min(cap)) + 1;
            strides[v] = box_size;
            match box_size.checked_mul(radix) {
                Some(b) => box_size = b,
                None => {
                    dense_ok = false;
                    break;
                }
            }
        }
        dense_ok &= box_size <= DENSE_BOX_LIMIT;

        let key = |m: &Monomial| -> u64 { (0..d).map(|v| u64::from(m.exp(v)) * strides[v]).sum() };

        // Terms are in graded order, so the partners of a term that stay
        // within the cap form a prefix of `other.terms`; `beyond[k]` is the
        // norm of everything from index `k` on.
        let mut beyond = vec![0.0; other.terms.len() + 1];
        for (k, (_, b)) in other.terms.iter().enumerate().rev() {
            beyond[k] = beyond[k + 1] + b.norm();
        }
        let fitting = |da: u32| other.terms.partition_point(|(mb, _)| da + mb.degree() <= cap);

        let mut overflow = 0.0;
        let mut err = 0.0;
        let mut out: Vec<(Monomial, Complex64)>;

        if dense_ok {
            let mut acc = vec![Complex64::new(0.0, 0.0); box_size as usize];
            let mut touched = vec![false; box_size as usize];
            let bk: Vec<u64> = other.terms.iter().map(|(m, _)| key(m)).collect();
            for (ma, a) in &self.terms {
                let ka = key(ma);
                let fit = fitting(ma.degree());
                overflow += a.norm() * beyond[fit];
                for ((_, b), &kb) in other.terms[..fit].iter().zip(&bk) {
                    let (p, e1) = cmul(*a, *b);
                    let slot = &mut acc[(ka + kb) as usize];
                    let (s, e2) = cadd(*slot, p);
                    *slot = s;
                    touched[(ka + kb) as usize] = true;
                    err += e1 + e2;
                }
            }
            out = Vec::new();
            for (idx, c) in acc.into_iter().enumerate() {
                if !touched[idx] || c == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let mut rest = idx as u64;
                let mut exps = [0u32; MAX_VARS];
                for v in (0..d).rev() {
                    exps[v] = (rest / strides[v]) as u32;
                    rest %= strides[v];
                }
                out.push((Monomial::new(&exps[..d]).expect("within range"), c));
            }
        } else {
            let mut acc: HashMap<Monomial, Complex64> = HashMap::new();
            for (ma, a) in &self.terms {
                let fit = fitting(ma.degree());
                overflow += a.norm() * beyond[fit];
                for (mb, b) in &other.terms[..fit] {
                    let m = ma.mul(mb);
                    let (p, e1) = cmul(*a, *b);
                    let slot = acc.entry(m).or_insert(Complex64::new(0.0, 0.0));
                    let (s, e2) = cadd(*slot, p);
                    *slot = s;
                    err += e1 + e2;
                }
            }
            out = acc.into_iter().collect();
        }
        out.sort_unstable_by(|a, b| a.0.cmp(&b.0));
        // Covers the rounding of the long sums behind `overflow` and `err`.
        let sums = (self.terms.len() * other.terms.len() + 2) as f64;
        let bookkeeping = (overflow + err) * (1.0 + sums * f64::EPSILON);
        Ok(Self::assemble(self.config, out, 0.0, prop + bookkeeping))
    }

    /// `f_r(z) = f(r z)`: coefficient `a_k` becomes `a_k r^{|k|}`. The tail is
    /// kept as is since dilation does not increase the l1 norm.
    pub fn dilate(&self, r: f64) -> Result<Self> {
        check_radius(r)?;
        let (pows, errs) = radius_powers(r, self.degree());
        let mut err = 0.0;
        let terms = self
            .terms
            .iter()
            .map(|&(m, a)| {
                let k = m.degree() as usize;
                let (re, e1) = two_prod(a.re, pows[k]);
                let (im, e2) = two_prod(a.im, pows[k]);
                err += e1.abs() + e2.abs() + a.norm() * errs[k];
                (m, Complex64::new(re, im))
            })
            .collect();
        Ok(Self::assemble(self.config, terms, self.tail, err))
    }

    /// Certified upper bound on `||f_r - f||_1`:
    /// `sum_k |a_k| (1 - r^{|k|}) + 2 tau`.
    pub fn dilation_gap_bound(&self, r: f64) -> Result<f64> {
        check_radius(r)?;
        let (pows, errs) = radius_powers(r, self.degree());
        let poly: f64 = self
            .terms
            .iter()
            .map(|(m, a)| {
                let k = m.degree() as usize;
                a.norm() * ((1.0 - pows[k]) + errs[k])
            })
            .sum();
        Ok(poly + 2.0 * self.tail)
    }

    /// Certified reciprocal.
    ///
    /// A candidate `b` comes from the power-series division recurrence
    /// `b_0 = 1/a_0`, `b_k = -(1/a_0) sum_{0<j<=k} a_j b_{k-j}`. With
    /// `e = 1 - f b` and `rho = ||e|| < 1`, the output is `b * sum_{k<=m} e^k`
    /// with the geometric remainder `rho^{m+1}/(1-rho) < tol` in the tail.
    pub fn reciprocal(&self, tol: f64) -> Result<Self> {
        let a0 = self.constant_term();
        if a0.norm() < DROP_BELOW {
            return Err(Error::NotInvertible("constant coefficient vanishes".into()));
        }
        let candidate = self.reciprocal_candidate(a0);
        let e = TruncatedSeries::one(self.config).sub(&self.mul(&candidate)?)?;
        let rho = e.norm();
        if !(rho < 1.0) {
            return Err(Error::NotInvertible(format!(
                "certification failed: |1 - f b| = {rho:.3e} >= 1"
            )));
        }
        let sum = neumann_sum(&e, rho, tol)?;
        candidate.mul(&sum)
    }

    fn reciprocal_candidate(&self, a0: Complex64) -> Self {
        let inv_a0 = Complex64::new(1.0, 0.0) / a0;
        let cap = self.config.degree_cap;
        let cutoff = CANDIDATE_CUTOFF * inv_a0.norm();
        let higher: Vec<(Monomial, Complex64)> =
            self.terms.iter().filter(|(m, _)| !m.is_one()).copied().collect();

        let mut b: HashMap<Monomial, Complex64> = HashMap::new();
        b.insert(Monomial::one(), inv_a0);
        let mut pending: BTreeSet<Monomial> = BTreeSet::new();
        let push_successors = |k: &Monomial, pending: &mut BTreeSet<Monomial>| {
            for (j, _) in &higher {
                let next = k.mul(j);
                if next.degree() <= cap {
                    pending.insert(next);
                }
            }
        };
        push_successors(&Monomial::one(), &mut pending);
        while let Some(k) = pending.pop_first() {
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, aj) in &higher {
                if let Some(rest) = k.checked_div(j) {
                    if let Some(br) = b.get(&rest) {
                        acc += aj * br;
                    }
                }
            }
            let bk = -inv_a0 * acc;
            if bk.norm() >= cutoff {
                b.insert(k, bk);
                push_successors(&k, &mut pending);
            }
        }
        let mut terms: Vec<_> = b.into_iter().collect();
        terms.sort_unstable_by(|x, y| x.0.cmp(&y.0));
        Self::zero(self.config).with_terms_unchecked(terms)
    }

    /// Value at a point of the closed polydisc, with radius `tau`.
    pub fn evaluate(&self, point: &[Complex64]) -> Result<ComplexBall> {
        if point.len() != self.config.num_vars {
            return Err(Error::DimensionMismatch { expected: self.config.num_vars, found: point.len() });
        }
        if let Some(z) = point.iter().find(|z| !(z.norm() <= 1.0)) {
            return Err(Error::PointOutsidePolydisc(format!("|{z}| > 1")));
        }
        let mut mid = Complex64::new(0.0, 0.0);
        for (m, a) in &self.terms {
            let mut t = *a;
            for (v, z) in point.iter().enumerate() {
                t *= z.powu(m.exp(v));
            }
            mid += t;
        }
        Ok(ComplexBall { mid, rad: self.tail })
    }
}

fn check_radius(r: f64) -> Result<()> {
    if r > 0.0 && r <= 1.0 {
        Ok(())
    } else {
        Err(Error::RadiusOutOfRange(r))
    }
}

/// `r^k` for `k = 0..=max_degree` with absolute error bounds on each power.
fn radius_powers(r: f64, max_degree: u32) -> (Vec<f64>, Vec<f64>) {
    let n = max_degree as usize + 1;
    let mut pows = Vec::with_capacity(n);
    let mut errs = Vec::with_capacity(n);
    pows.push(1.0);
    errs.push(0.0);
    for k in 1..n {
        let (p, e) = two_prod(pows[k - 1], r);
        errs.push(errs[k - 1] * r + e.abs());
        pows.push(p);
    }
    (pows, errs)
}

/// `sum_{k=0}^{m} e^k` with the remainder `rho^{m+1}/(1-rho)` in the tail,
/// `m` the first index with remainder below `tol`.
pub(crate) fn neumann_sum(e: &TruncatedSeries, rho: f64, tol: f64) -> Result<TruncatedSeries> {
    let config = *e.config();
    let mut sum = TruncatedSeries::one(config);
    let mut power = TruncatedSeries::one(config);
    let mut rho_pow = rho;
    let mut terms = 0;
    while rho_pow / (1.0 - rho) >= tol && terms < MAX_NEUMANN_TERMS {
        power = power.mul(e)?;
        sum = sum.add(&power)?;
        rho_pow *= rho;
        terms += 1;
    }
    Ok(sum.widen(rho_pow / (1.0 - rho)))
}

impl fmt::Debug for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            write!(f, "0")?;
        }
        for (idx, (m, c)) in self.terms.iter().enumerate() {
            if idx > 0 {
                write!(f, " + ")?;
            }
            if c.im == 0.0 {
                write!(f, "{}", c.re)?;
            } else {
                write!(f, "({}{:+}i)", c.re, c.im)?;
            }
            if !m.is_one() {
                write!(f, "*{m}")?;
            }
        }
        if self.tail > 0.0 {
            write!(f, " +/- {:e}", self.tail)?;
        }
        Ok(())
    }
}
