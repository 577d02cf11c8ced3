//! Factorization of `SL_n` matrices over univariate polynomials and
//! truncated Wiener-algebra series into elementary matrices, with
//! certified residual bounds.
//!
//! Series carry a polynomial part and an l1 tail bound that encloses both
//! truncation and floating-point rounding, so every norm reported by the
//! crate is an upper bound on the true value.

pub mod batch;
pub mod cli;
mod dd;
pub mod elementary;
pub mod error;
pub mod json;
pub mod matrix;
pub mod monomial;
pub mod nearid;
pub mod par;
pub mod pipeline;
pub mod random;
pub mod series;
pub mod unipoly;

pub use elementary::{ElementaryFactor, Factorization, Method, Side, UnipotentBlock};
pub use error::{Error, Result};
pub use matrix::AlgMatrix;
pub use monomial::Monomial;
pub use nearid::{factor_near_identity, whitehead};
pub use par::Strategy;
pub use pipeline::{factor, verify, FactorRequest, Mode, VerificationReport};
pub use series::{AlgebraConfig, ComplexBall, TruncatedSeries};
pub use unipoly::{factor_univariate, poly_divmod};
