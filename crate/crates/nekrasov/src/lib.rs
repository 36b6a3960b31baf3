//! Instanton partition functions on noncompact toric surfaces by equivariant
//! localization.
//!
//! The engine computes the generating series of equivariant integrals over
//! moduli of framed sheaves on a toric chain surface (a C^2 resolution glued
//! along a line at infinity), entirely in exact rational arithmetic over the
//! torus weights eps1, eps2 and the Coulomb/mass parameters.  On top of the
//! series it extracts the eps -> 0 prepotential by substituting a direction
//! (eps1, eps2) = t (x1, x2) and expanding exactly at t = 0, so analyticity
//! claims and limit identities are verified symbolically, not by floating
//! point extrapolation.
//!
//! Organization:
//!
//! * [`algebra`] - the exact kernel: sparse polynomials, factored rational
//!   functions, truncated Lambda-series, direction substitution and Laurent
//!   expansion in t.
//! * [`partitions`] - Young diagrams, arm/leg statistics, and the two weight
//!   multisets (tangent-type and section-type) attached to a pair of diagrams.
//! * [`geometry`] - toric chain data: vertex tangent weights, edge divisors,
//!   the intersection form, the line at infinity, and fixed-point enumeration.
//! * [`characters`] - H^1 weight multisets of divisor differences on a chain
//!   (by exact two-variable Laurent division) and the assembled tangent and
//!   natural-bundle characters at a fixed point.
//! * [`classes`] - multiplicative characteristic classes (Euler, linear shift,
//!   A-hat, chi_y, elliptic) evaluated on weight multisets, exactly where the
//!   class is rational and in high-precision numerics otherwise.
//! * [`partition_function`] - the C^2 vertex series, the master formula over
//!   divisor tuples, instanton free energies, and the limit checker for the
//!   surface-vs-C^2 scaling identity.
//! * [`perturbative`] - the zeta-regularized double-gamma building block in 4d
//!   and 5d and the perturbative free energy with its small-weight limit.
//! * [`sworacle`] - an independent numerical oracle: periods of the rank-two
//!   Seiberg-Witten curve and a prepotential coefficient fit to compare with
//!   the localization limit.
//! * [`hp`] - shared high-precision (MPFR/MPC) helpers: contexts, tanh-sinh
//!   and Gauss-Legendre quadrature.
//!
//! All potentially ambiguous conventions (0-based arm/leg colengths, the sign
//! of the free energy, the Lambda-grading of the master series) are documented
//! on the item that implements them and exercised by the test suite.

pub mod algebra;
pub mod partitions;
pub mod geometry;
pub mod characters;
pub mod classes;
pub mod hp;
pub mod partition_function;
pub mod perturbative;
pub mod sworacle;

/// Exact scalar used throughout the symbolic layer.
pub type Q = num::BigRational;

/// Convenience constructor for small rationals.
pub fn q(n: i64, d: i64) -> Q {
    use num::BigInt;
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Convenience constructor for integers as rationals.
pub fn qi(n: i64) -> Q {
    use num::BigInt;
    Q::from(BigInt::from(n))
}
