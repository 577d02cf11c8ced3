//! Double-double arithmetic for certifying univariate factor products.
//!
//! A value is an unevaluated sum `hi + lo` with `|lo| <= ulp(hi) / 2`.
//! Addition follows the accurate double-word sum (relative error at most
//! `3u^2`) and multiplication the double-word product (at most `7u^2`),
//! with `u = 2^-53`; see Joldes, Muller and Popescu, "Tight and rigorous
//! error bounds for basic building blocks of double-word arithmetic" (2017).

use num_complex::Complex64;

use crate::elementary::ElementaryFactor;
use crate::error::{Error, Result};
use crate::matrix::AlgMatrix;
use crate::monomial::Monomial;
use crate::series::TruncatedSeries;

const U: f64 = f64::EPSILON / 2.0;

#[derive(Debug, Clone, Copy, Default, PartialEq)]
struct Dd {
    hi: f64,
    lo: f64,
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn fast_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

impl Dd {
    fn from_f64(x: f64) -> Self {
        Self { hi: x, lo: 0.0 }
    }

    fn add(self, o: Self) -> Self {
        let (sh, sl) = two_sum(self.hi, o.hi);
        let (th, tl) = two_sum(self.lo, o.lo);
        let (sh, sl) = fast_two_sum(sh, sl + th);
        let (hi, lo) = fast_two_sum(sh, sl + tl);
        Self { hi, lo }
    }

    fn neg(self) -> Self {
        Self { hi: -self.hi, lo: -self.lo }
    }

    fn mul(self, o: Self) -> Self {
        let p = self.hi * o.hi;
        let e = self.hi.mul_add(o.hi, -p);
        let t = self.hi.mul_add(o.lo, self.lo * o.hi);
        let (hi, lo) = fast_two_sum(p, e + t);
        Self { hi, lo }
    }

    fn abs_upper(self) -> f64 {
        (self.hi.abs() + self.lo.abs()) * (1.0 + 2.0 * U)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
struct DdComplex {
    re: Dd,
    im: Dd,
}

impl DdComplex {
    fn from_c64(z: Complex64) -> Self {
        Self { re: Dd::from_f64(z.re), im: Dd::from_f64(z.im) }
    }

    fn is_zero(&self) -> bool {
        self.re.hi == 0.0 && self.im.hi == 0.0
    }

    fn add(self, o: Self) -> Self {
        Self { re: self.re.add(o.re), im: self.im.add(o.im) }
    }

    fn sub(self, o: Self) -> Self {
        Self { re: self.re.add(o.re.neg()), im: self.im.add(o.im.neg()) }
    }

    fn mul(self, o: Self) -> Self {
        Self {
            re: self.re.mul(o.re).add(self.im.mul(o.im).neg()),
            im: self.re.mul(o.im).add(self.im.mul(o.re)),
        }
    }

    /// Upper bound on the modulus.
    fn abs_upper(&self) -> f64 {
        self.re.abs_upper().hypot(self.im.abs_upper()) * (1.0 + 2.0 * U)
    }
}

type DdPoly = Vec<DdComplex>;

fn l1(p: &[DdComplex]) -> f64 {
    p.iter().map(DdComplex::abs_upper).sum()
}

/// Certified `||E_1 ... E_K - target||` for one-variable configurations.
///
/// The product is formed in double-double arithmetic. The rounding of step
/// `k`, together with the coefficient tails of its factor and any mass
/// beyond the degree cap, is bounded by `delta_k`. All of it sits in column
/// `j_k`, so propagated through the later factors it contributes at most
/// `delta_k` times the norm of row `j_k` of `S_k`, the product of the factors
/// after step `k`; `suffix_row_norms` holds those row norms.
pub(crate) fn univariate_residual(
    target: &AlgMatrix,
    factors: &[ElementaryFactor],
    suffix_row_norms: &[f64],
) -> Result<f64> {
    let n = target.n();
    let config = *target.config();
    if config.num_vars() != 1 {
        return Err(Error::InvalidConfig("double-double residual needs one variable".into()));
    }
    let cap = config.degree_cap() as usize;
    let mut acc: Vec<Vec<DdPoly>> = (0..n)
        .map(|r| {
            (0..n)
                .map(|c| if r == c { vec![DdComplex::from_c64(Complex64::new(1.0, 0.0))] } else { Vec::new() })
                .collect()
        })
        .collect();

    let mut bound = 0.0;
    for (f, s_norm) in factors.iter().zip(suffix_row_norms) {
        let alpha = f.alpha();
        let mut a: DdPoly = Vec::new();
        for (m, c) in alpha.terms() {
            let k = m.exp(0) as usize;
            if a.len() <= k {
                a.resize(k + 1, DdComplex::default());
            }
            a[k] = DdComplex::from_c64(*c);
        }
        let mut delta = 0.0;
        for row in acc.iter_mut() {
            let src = row[f.i()].clone();
            if src.iter().all(DdComplex::is_zero) {
                continue;
            }
            let src_norm = l1(&src);
            delta += alpha.tail() * src_norm;
            let dst = &mut row[f.j()];
            let len = (src.len() + a.len() - 1).min(cap + 1);
            if dst.len() < len {
                dst.resize(len, DdComplex::default());
            }
            let mut magnitude = l1(dst);
            for (s, x) in src.iter().enumerate() {
                if x.is_zero() {
                    continue;
                }
                let xm = x.abs_upper();
                for (t, y) in a.iter().enumerate() {
                    if y.is_zero() {
                        continue;
                    }
                    let ym = y.abs_upper();
                    if s + t > cap {
                        delta += xm * ym;
                        continue;
                    }
                    dst[s + t] = dst[s + t].add(x.mul(*y));
                    magnitude += xm * ym;
                }
            }
            // Each coefficient takes at most `min(len src, len alpha)`
            // products, each followed by one addition.
            let per_op = 16.0 + 3.0 * (src.len().min(a.len()) + 1) as f64;
            delta += per_op * U * U * magnitude;
        }
        bound += delta * s_norm;
    }

    let mut residual = 0.0;
    for r in 0..n {
        for c in 0..n {
            let t = target.get(r, c);
            let mut diff = acc[r][c].clone();
            for (m, v) in t.terms() {
                let k = m.exp(0) as usize;
                if diff.len() <= k {
                    diff.resize(k + 1, DdComplex::default());
                }
                diff[k] = diff[k].sub(DdComplex::from_c64(*v));
            }
            // The subtraction is one more double-word addition per coefficient.
            residual += l1(&diff) * (1.0 + 4.0 * U * U) + t.tail();
        }
    }
    let slack = 1.0 + 4.0 * (n * n + factors.len() + 2) as f64 * U;
    Ok((residual + bound) * slack)
}

fn dd_poly(s: &TruncatedSeries) -> DdPoly {
    let mut p: DdPoly = Vec::new();
    for (m, c) in s.terms() {
        let k = m.exp(0) as usize;
        if p.len() <= k {
            p.resize(k + 1, DdComplex::default());
        }
        p[k] = DdComplex::from_c64(*c);
    }
    p
}

/// `dst += src * a`, dropping degrees above `cap`.
fn add_product(dst: &mut DdPoly, src: &[DdComplex], a: &[DdComplex], cap: usize) {
    if src.is_empty() || a.is_empty() {
        return;
    }
    let len = (src.len() + a.len() - 1).min(cap + 1);
    if dst.len() < len {
        dst.resize(len, DdComplex::default());
    }
    for (s, x) in src.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (t, y) in a.iter().enumerate().take((cap + 1).saturating_sub(s)) {
            dst[s + t] = dst[s + t].add(x.mul(*y));
        }
    }
}

/// Approximates `L_m ... L_1 T R_1 ... R_p` for one-variable `T`, where `left`
/// lists `L_1, ..., L_m` and `right` lists `R_1, ..., R_p`. The products are
/// formed in double-double arithmetic and rounded once at the end; the result
/// carries no tail, so it is an approximation, not an enclosure.
pub(crate) fn univariate_sandwich(
    left: &[ElementaryFactor],
    target: &AlgMatrix,
    right: &[ElementaryFactor],
) -> Result<AlgMatrix> {
    let n = target.n();
    let config = *target.config();
    if config.num_vars() != 1 {
        return Err(Error::InvalidConfig("double-double products need one variable".into()));
    }
    let cap = config.degree_cap() as usize;
    let mut m: Vec<Vec<DdPoly>> =
        (0..n).map(|r| (0..n).map(|c| dd_poly(target.get(r, c))).collect()).collect();
    for f in left {
        f.check_index(n)?;
        let a = dd_poly(f.alpha());
        // Row i += alpha * row j.
        for c in 0..n {
            let src = m[f.j()][c].clone();
            add_product(&mut m[f.i()][c], &src, &a, cap);
        }
    }
    for f in right {
        f.check_index(n)?;
        let a = dd_poly(f.alpha());
        // Column j += column i * alpha.
        for row in m.iter_mut() {
            let src = row[f.i()].clone();
            add_product(&mut row[f.j()], &src, &a, cap);
        }
    }
    let mut out = AlgMatrix::identity(n, config);
    for (r, row) in m.into_iter().enumerate() {
        for (c, p) in row.into_iter().enumerate() {
            let terms = p
                .into_iter()
                .enumerate()
                .filter(|(_, z)| !z.is_zero())
                .map(|(k, z)| {
                    let mono = Monomial::new(&[k as u32]).expect("degree within cap");
                    (mono, Complex64::new(z.re.hi + z.re.lo, z.im.hi + z.im.lo))
                })
                .collect::<Vec<_>>();
            out.set(r, c, TruncatedSeries::from_terms(config, terms, 0.0)?);
        }
    }
    Ok(out)
}
