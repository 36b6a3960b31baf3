//! Exact symbolic kernel.
//!
//! Everything downstream of this module computes with one shape of scalar: a
//! rational function in the equivariant parameters, represented as a sparse
//! numerator over a *factored* denominator.  The factored form is the load
//! bearing design choice: every denominator the localization engine ever
//! produces is a product of linear forms in the symbols (tangent weights,
//! top-Chern factors, t-free parts of substituted weights), and cancelling
//! syntactically equal factors plus attempting exact division of the numerator
//! by each factor yields a canonical reduced form on that domain without a
//! general multivariate gcd.
//!
//! The submodules are layered: [`symbols`] fixes the generator list and order,
//! [`poly`] implements graded-lex sparse polynomials, [`ratfunc`] the factored
//! fractions, [`series`] truncated Lambda-series over any coefficient ring,
//! [`direction`] the substitution (eps1, eps2) = t (x1, x2) and exact Laurent
//! expansion at t = 0, and [`laurent2`] the small two-variable integer Laurent
//! ring used by the character layer.

pub mod symbols;
pub mod poly;
pub mod ratfunc;
pub mod series;
pub mod direction;
pub mod laurent2;

pub use direction::{laurent_at_zero, substitute_direction, DirectionSeries};
pub use poly::SparsePoly;
pub use ratfunc::RatFunc;
pub use series::{LambdaSeries, SeriesCoeff};
pub use symbols::{LinearForm, Sym, SymbolTable};

use thiserror::Error;

/// Errors surfaced by the exact kernel.
#[derive(Debug, Error)]
pub enum AlgebraError {
    /// Division by the zero rational function.
    #[error("division by zero rational function")]
    DivisionByZero,
    /// A denominator factor vanished identically under a direction
    /// substitution; the direction is resonant for this function.
    #[error("resonant direction ({x1}, {x2}): denominator factor `{factor}` vanishes identically")]
    ResonantDirection { x1: i64, x2: i64, factor: String },
    /// series_log requires the constant term to be exactly 1.
    #[error("series log requires constant term 1, found {found}")]
    LogConstantTerm { found: String },
    /// series_exp requires the constant term to be exactly 0.
    #[error("series exp requires constant term 0")]
    ExpConstantTerm,
    /// Mixed symbol tables (different variable counts) in one operation.
    #[error("operands use different symbol layouts ({0} vs {1} variables)")]
    MixedTables(usize, usize),
}
