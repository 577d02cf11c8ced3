//! Multi-indices `(k_1, ..., k_d)` and their graded ordering.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

/// Largest number of variables a series may carry.
pub const MAX_VARS: usize = 8;

/// Exponent vector of a monomial `z_1^{k_1} ... z_d^{k_d}`.
///
/// Unused trailing slots are zero, so monomials from configurations with a
/// different number of variables still compare consistently.
///
/// Ordering is graded: lower total degree first, and within one degree the
/// monomial with the larger leading exponent comes first (`z_1` before `z_2`,
/// `z_1^2` before `z_1 z_2` before `z_2^2`).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Monomial {
    exps: [u16; MAX_VARS],
}

impl Monomial {
    pub fn one() -> Self {
        Self::default()
    }

    /// The monomial `z_{var+1}` (zero-based variable index).
    pub fn var(var: usize) -> Result<Self> {
        let mut m = Self::one();
        *m.exps
            .get_mut(var)
            .ok_or_else(|| Error::InvalidConfig(format!("variable index {var} >= {MAX_VARS}")))? = 1;
        Ok(m)
    }

    pub fn new(exps: &[u32]) -> Result<Self> {
        if exps.len() > MAX_VARS {
            return Err(Error::InvalidConfig(format!(
                "{} exponents given, at most {MAX_VARS} variables supported",
                exps.len()
            )));
        }
        let mut m = Self::one();
        for (slot, &e) in m.exps.iter_mut().zip(exps) {
            *slot = u16::try_from(e)
                .map_err(|_| Error::InvalidConfig(format!("exponent {e} too large")))?;
        }
        Ok(m)
    }

    pub fn degree(&self) -> u32 {
        self.exps.iter().map(|&e| u32::from(e)).sum()
    }

    pub fn exp(&self, var: usize) -> u32 {
        u32::from(self.exps[var])
    }

    /// The first `num_vars` exponents.
    pub fn exponents(&self, num_vars: usize) -> Vec<u32> {
        self.exps[..num_vars].iter().map(|&e| u32::from(e)).collect()
    }

    /// Highest variable index carrying a nonzero exponent, plus one.
    pub fn support_width(&self) -> usize {
        self.exps.iter().rposition(|&e| e != 0).map_or(0, |p| p + 1)
    }

    pub fn is_one(&self) -> bool {
        self.exps.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = *self;
        for (a, b) in out.exps.iter_mut().zip(other.exps.iter()) {
            *a += *b;
        }
        out
    }

    /// `self / other` when `other` divides `self` componentwise.
    pub fn checked_div(&self, other: &Self) -> Option<Self> {
        let mut out = *self;
        for (a, b) in out.exps.iter_mut().zip(other.exps.iter()) {
            *a = a.checked_sub(*b)?;
        }
        Some(out)
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| other.exps.cmp(&self.exps))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return write!(f, "1");
        }
        let mut first = true;
        for (v, &e) in self.exps.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !first {
                write!(f, "*")?;
            }
            first = false;
            write!(f, "z{}", v + 1)?;
            if e > 1 {
                write!(f, "^{e}")?;
            }
        }
        Ok(())
    }
}

/// All monomials in `num_vars` variables of total degree exactly `degree`,
/// in ascending graded order.
pub fn monomials_of_degree(num_vars: usize, degree: u32) -> Vec<Monomial> {
    fn rec(var: usize, num_vars: usize, left: u32, cur: &mut [u16; MAX_VARS], out: &mut Vec<Monomial>) {
        if var + 1 == num_vars {
            cur[var] = left as u16;
            out.push(Monomial { exps: *cur });
            cur[var] = 0;
            return;
        }
        for e in (0..=left).rev() {
            cur[var] = e as u16;
            rec(var + 1, num_vars, left - e, cur, out);
        }
        cur[var] = 0;
    }
    let mut out = Vec::new();
    if num_vars == 0 {
        if degree == 0 {
            out.push(Monomial::one());
        }
        return out;
    }
    rec(0, num_vars, degree, &mut [0; MAX_VARS], &mut out);
    out
}
