//! JSON interchange for series, matrices and factorizations.
//!
//! ```text
//! series:        {"vars": d, "tail": t, "coeffs": [{"k": [k1, ..., kd], "re": x, "im": y}, ...]}
//! matrix:        {"n": n, "vars": d, "entries": [series, ...]}        (row-major)
//! factorization: {"n": n, "method": m, "residual": r, "factors": [{"i": i, "j": j, "alpha": series}, ...]}
//! ```
//!
//! Factor indices are one-based. Coefficients are listed in graded order and
//! floats are written in shortest round-trip form, so parse/emit is exact.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::elementary::{ElementaryFactor, Factorization, Method};
use crate::error::{Error, Result};
use crate::matrix::AlgMatrix;
use crate::monomial::Monomial;
use crate::series::{AlgebraConfig, TruncatedSeries};

#[derive(Debug, Serialize)]
struct CoeffOut {
    k: Vec<u32>,
    re: f64,
    im: f64,
}

#[derive(Debug, Serialize)]
struct SeriesOut {
    vars: usize,
    tail: f64,
    coeffs: Vec<CoeffOut>,
}

#[derive(Debug, Serialize)]
struct MatrixOut {
    n: usize,
    vars: usize,
    entries: Vec<SeriesOut>,
}

#[derive(Debug, Serialize)]
struct FactorOut {
    i: usize,
    j: usize,
    alpha: SeriesOut,
}

#[derive(Debug, Serialize)]
struct FactorizationOut {
    n: usize,
    method: Method,
    residual: f64,
    factors: Vec<FactorOut>,
}

#[derive(Debug, Deserialize)]
struct CoeffIn {
    k: Option<Vec<u32>>,
    re: Option<f64>,
    im: Option<f64>,
}

#[derive(Debug, Deserialize)]
struct SeriesIn {
    vars: Option<usize>,
    tail: Option<f64>,
    coeffs: Option<Vec<CoeffIn>>,
}

#[derive(Debug, Deserialize)]
struct MatrixIn {
    n: Option<usize>,
    vars: Option<usize>,
    entries: Option<Vec<SeriesIn>>,
}

#[derive(Debug, Deserialize)]
struct FactorIn {
    i: Option<usize>,
    j: Option<usize>,
    alpha: Option<SeriesIn>,
}

#[derive(Debug, Deserialize)]
struct FactorizationIn {
    n: Option<usize>,
    method: Option<Method>,
    residual: Option<f64>,
    factors: Option<Vec<FactorIn>>,
}

fn finite(x: f64, what: &str) -> Result<f64> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(Error::Schema(format!("{what} is not finite")))
    }
}

fn series_out(s: &TruncatedSeries) -> Result<SeriesOut> {
    let d = s.config().num_vars();
    Ok(SeriesOut {
        vars: d,
        tail: finite(s.tail(), "tail")?,
        coeffs: s
            .terms()
            .iter()
            .map(|(m, c)| {
                Ok(CoeffOut { k: m.exponents(d), re: finite(c.re, "coefficient")?, im: finite(c.im, "coefficient")? })
            })
            .collect::<Result<_>>()?,
    })
}

fn missing(path: &str, field: &str) -> Error {
    Error::Schema(format!("{path}: missing field \"{field}\""))
}

fn series_in(raw: SeriesIn, config: AlgebraConfig, path: &str) -> Result<TruncatedSeries> {
    let vars = raw.vars.ok_or_else(|| missing(path, "vars"))?;
    if vars != config.num_vars() {
        return Err(Error::Schema(format!(
            "{path}: config mismatch, vars = {vars} but expected {}",
            config.num_vars()
        )));
    }
    let tail = raw.tail.ok_or_else(|| missing(path, "tail"))?;
    if !(tail >= 0.0) {
        return Err(Error::Schema(format!("{path}.tail: must be nonnegative, got {tail}")));
    }
    let coeffs = raw.coeffs.ok_or_else(|| missing(path, "coeffs"))?;
    let mut terms = Vec::with_capacity(coeffs.len());
    for (idx, c) in coeffs.into_iter().enumerate() {
        let cpath = format!("{path}.coeffs[{idx}]");
        let k = c.k.ok_or_else(|| missing(&cpath, "k"))?;
        if k.len() != vars {
            return Err(Error::Schema(format!("{cpath}.k: expected {vars} exponents, got {}", k.len())));
        }
        let re = c.re.ok_or_else(|| missing(&cpath, "re"))?;
        let im = c.im.ok_or_else(|| missing(&cpath, "im"))?;
        let m = Monomial::new(&k).map_err(|e| Error::Schema(format!("{cpath}.k: {e}")))?;
        terms.push((m, Complex64::new(re, im)));
    }
    TruncatedSeries::from_terms(config, terms, tail).map_err(|e| Error::Schema(format!("{path}: {e}")))
}

fn parse_value<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Schema(format!("invalid JSON: {e}")))
}

fn to_text<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Error::Schema(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

pub fn series_to_json(s: &TruncatedSeries) -> Result<String> {
    to_text(&series_out(s)?)
}

pub fn series_from_json(text: &str, config: AlgebraConfig) -> Result<TruncatedSeries> {
    series_in(parse_value(text)?, config, "series")
}

pub fn matrix_to_json(m: &AlgMatrix) -> Result<String> {
    to_text(&MatrixOut {
        n: m.n(),
        vars: m.config().num_vars(),
        entries: m.entries().iter().map(series_out).collect::<Result<_>>()?,
    })
}

/// Parses a matrix; the number of variables comes from the file and the
/// degree cap from `degree_cap`. Coefficients above the cap are rejected.
pub fn matrix_from_json(text: &str, degree_cap: u32) -> Result<AlgMatrix> {
    let raw: MatrixIn = parse_value(text)?;
    let n = raw.n.ok_or_else(|| missing("matrix", "n"))?;
    let vars = raw.vars.ok_or_else(|| missing("matrix", "vars"))?;
    let config = AlgebraConfig::new(vars, degree_cap).map_err(|e| Error::Schema(format!("matrix.vars: {e}")))?;
    let entries = raw.entries.ok_or_else(|| missing("matrix", "entries"))?;
    if n == 0 || entries.len() != n * n {
        return Err(Error::Schema(format!("matrix.entries: expected {} entries, got {}", n * n, entries.len())));
    }
    let entries = entries
        .into_iter()
        .enumerate()
        .map(|(idx, e)| series_in(e, config, &format!("entries[{idx}]")))
        .collect::<Result<Vec<_>>>()?;
    AlgMatrix::from_entries(n, entries)
}

pub fn factorization_to_json(fac: &Factorization) -> Result<String> {
    to_text(&FactorizationOut {
        n: fac.n,
        method: fac.method,
        residual: finite(fac.residual_bound, "residual")?,
        factors: fac
            .factors
            .iter()
            .map(|f| Ok(FactorOut { i: f.i() + 1, j: f.j() + 1, alpha: series_out(f.alpha())? }))
            .collect::<Result<_>>()?,
    })
}

/// Parses a factorization whose coefficients live in `config`.
pub fn factorization_from_json(text: &str, config: AlgebraConfig) -> Result<Factorization> {
    let raw: FactorizationIn = parse_value(text)?;
    let n = raw.n.ok_or_else(|| missing("factorization", "n"))?;
    let method = raw.method.ok_or_else(|| missing("factorization", "method"))?;
    let residual = raw.residual.ok_or_else(|| missing("factorization", "residual"))?;
    let list = raw.factors.ok_or_else(|| missing("factorization", "factors"))?;
    let mut factors = Vec::with_capacity(list.len());
    for (idx, f) in list.into_iter().enumerate() {
        let path = format!("factors[{idx}]");
        let i = f.i.ok_or_else(|| missing(&path, "i"))?;
        let j = f.j.ok_or_else(|| missing(&path, "j"))?;
        if i == 0 || j == 0 || i > n || j > n || i == j {
            return Err(Error::Schema(format!("{path}: invalid indices ({i}, {j}) for n = {n}")));
        }
        let alpha = series_in(f.alpha.ok_or_else(|| missing(&path, "alpha"))?, config, &format!("{path}.alpha"))?;
        factors.push(ElementaryFactor::new(i - 1, j - 1, alpha)?);
    }
    Ok(Factorization { n, factors, residual_bound: residual, method })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(d: usize) -> AlgebraConfig {
        AlgebraConfig::vars(d).unwrap()
    }

    #[test]
    fn series_format() {
        let s = TruncatedSeries::from_terms(
            cfg(2),
            [
                (Monomial::new(&[0, 1]).unwrap(), Complex64::new(0.1, -2.0)),
                (Monomial::one(), Complex64::new(1.0, 0.0)),
            ],
            0.25,
        )
        .unwrap();
        let text = series_to_json(&s).unwrap();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["vars"], 2);
        assert_eq!(v["tail"], 0.25);
        assert_eq!(v["coeffs"][0]["k"], serde_json::json!([0, 0]));
        assert_eq!(v["coeffs"][1]["im"], -2.0);
        assert_eq!(series_from_json(&text, cfg(2)).unwrap(), s);
    }

    #[test]
    fn missing_tail_names_entry() {
        let text = r#"{"n": 1, "vars": 1, "entries": [{"vars": 1, "coeffs": []}]}"#;
        let err = matrix_from_json(text, 64).unwrap_err();
        assert!(err.to_string().contains("entries[0]"), "{err}");
        assert!(err.to_string().contains("tail"), "{err}");
    }

    #[test]
    fn vars_mismatch_rejected() {
        let text = r#"{"n": 1, "vars": 2, "entries": [{"vars": 1, "tail": 0, "coeffs": []}]}"#;
        let err = matrix_from_json(text, 64).unwrap_err();
        assert!(err.to_string().contains("config mismatch"), "{err}");
    }

    #[test]
    fn malformed_inputs() {
        assert!(matrix_from_json("not json", 64).is_err());
        let wrong_count = r#"{"n": 2, "vars": 1, "entries": []}"#;
        assert!(matrix_from_json(wrong_count, 64).is_err());
        let bad_k = r#"{"n": 1, "vars": 1, "entries": [{"vars": 1, "tail": 0, "coeffs": [{"k": [1, 2], "re": 1, "im": 0}]}]}"#;
        assert!(matrix_from_json(bad_k, 64).unwrap_err().to_string().contains("coeffs[0].k"));
        let too_high = r#"{"n": 1, "vars": 1, "entries": [{"vars": 1, "tail": 0, "coeffs": [{"k": [9], "re": 1, "im": 0}]}]}"#;
        assert!(matrix_from_json(too_high, 8).is_err());
        let neg_tail = r#"{"n": 1, "vars": 1, "entries": [{"vars": 1, "tail": -1, "coeffs": []}]}"#;
        assert!(matrix_from_json(neg_tail, 8).is_err());
    }

    #[test]
    fn factorization_roundtrip_one_based() {
        let alpha = TruncatedSeries::univariate_real(cfg(1), &[0.1, 1.0 / 3.0]).unwrap();
        let fac = Factorization {
            n: 3,
            factors: vec![ElementaryFactor::new(2, 0, alpha).unwrap()],
            residual_bound: 1.2345678901234567e-13,
            method: Method::Euclid,
        };
        let text = factorization_to_json(&fac).unwrap();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["factors"][0]["i"], 3);
        assert_eq!(v["factors"][0]["j"], 1);
        assert_eq!(v["method"], "euclid");
        assert_eq!(factorization_from_json(&text, cfg(1)).unwrap(), fac);

        let bad = text.replace("\"i\": 3", "\"i\": 1");
        assert!(factorization_from_json(&bad, cfg(1)).is_err());
    }
}
