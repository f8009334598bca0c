//! Constructive Croot–Lev–Pach bounds for difference-free sets of
//! polynomials over finite fields.
//!
//! Given a finite field F_q, a polynomial F with zero constant term and a
//! length n, the crate builds the substitution map Φ (b ↦ F(b) on
//! coefficient vectors), the weight polynomial μ, the indicator polynomial
//! P, and the rank certificate for the difference matrix `P(u - v)`. It
//! evaluates the explicit bound `c·t^n` and compares it with exact maximum
//! free-set sizes found by exhaustive search.

pub mod bounds;
pub mod cli;
pub mod clpcore;
pub mod config;
pub mod error;
pub mod extremal;
pub mod field;
pub mod phimap;
pub mod pipeline;
pub mod polynomial;
pub mod rankcert;
pub mod space;

pub use error::{Error, Result};
pub use field::{Elem, FieldElement, FieldSpec};
pub use polynomial::{Monomial, MultiPoly, UniPoly, WeightedDegree};
