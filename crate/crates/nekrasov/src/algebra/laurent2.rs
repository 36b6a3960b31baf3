//! Two-variable integer Laurent polynomials.
//!
//! The character layer manipulates torus characters as elements of
//! Z[t1^{±1}, t2^{±1}]: a monomial `t1^i t2^j` stands for the weight
//! `i eps1 + j eps2` and its coefficient for a multiplicity (possibly
//! negative in intermediate virtual characters).  The only nontrivial
//! operation is exact division by products of binomials `(1 - monomial)`,
//! which is how the H^1 weight multisets of a divisor difference are read off
//! a closed rational expression: the quotient is known to be a genuine Laurent
//! polynomial, so division proceeds factor by factor, cancelling leading
//! terms under a fixed total order, and any step that cannot cancel certifies
//! non-divisibility (a hard error here, because it falsifies a vanishing
//! theorem upstream).

use std::collections::BTreeMap;
use std::fmt;

/// Exponent pair `(i, j)` for `t1^i t2^j`.
pub type Exp2 = (i64, i64);

/// Sparse Laurent polynomial in two variables over Z.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Laurent2 {
    terms: BTreeMap<Exp2, i64>,
}

impl Laurent2 {
    pub fn zero() -> Self {
        Laurent2 { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::monomial(0, 0)
    }

    pub fn monomial(i: i64, j: i64) -> Self {
        let mut p = Self::zero();
        p.terms.insert((i, j), 1);
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn n_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, e: Exp2) -> i64 {
        self.terms.get(&e).copied().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exp2, &i64)> {
        self.terms.iter()
    }

    pub fn add_term(&mut self, e: Exp2, c: i64) {
        if c == 0 {
            return;
        }
        let entry = self.terms.entry(e).or_insert(0);
        *entry += c;
        if *entry == 0 {
            self.terms.remove(&e);
        }
    }

    pub fn add(&self, rhs: &Laurent2) -> Laurent2 {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, *c);
        }
        out
    }

    pub fn sub(&self, rhs: &Laurent2) -> Laurent2 {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, -c);
        }
        out
    }

    pub fn neg(&self) -> Laurent2 {
        Laurent2 { terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect() }
    }

    pub fn mul(&self, rhs: &Laurent2) -> Laurent2 {
        let mut out = Laurent2::zero();
        for ((i1, j1), c1) in &self.terms {
            for ((i2, j2), c2) in &rhs.terms {
                out.add_term((i1 + i2, j1 + j2), c1 * c2);
            }
        }
        out
    }

    /// Substitute `t1 -> t1^{-1}, t2 -> t2^{-1}`.
    pub fn invert_vars(&self) -> Laurent2 {
        Laurent2 { terms: self.terms.iter().map(|((i, j), c)| ((-i, -j), *c)).collect() }
    }

    /// `1 - t1^i t2^j`.
    pub fn one_minus(i: i64, j: i64) -> Laurent2 {
        let mut p = Self::one();
        p.add_term((i, j), -1);
        p
    }

    fn leading(&self) -> Option<(Exp2, i64)> {
        // order: total degree, then (i, j) lexicographic - any fixed total
        // order on exponents works for the divisibility argument
        self.terms
            .iter()
            .max_by_key(|((i, j), _)| (i + j, *i, *j))
            .map(|(e, c)| (*e, *c))
    }

    /// Exact division, `Some(q)` iff `self == q * d`.
    ///
    /// Standard single-divisor reduction: repeatedly cancel the leading term
    /// of the remainder against the leading term of `d` (always possible in a
    /// Laurent ring since monomials are units); if the integer coefficient
    /// division fails, or the iteration exceeds a generous cap, the division
    /// is not exact.
    pub fn exact_div(&self, d: &Laurent2) -> Option<Laurent2> {
        let (de, dc) = d.leading()?;
        if self.is_zero() {
            return Some(Laurent2::zero());
        }
        let mut rem = self.clone();
        let mut quot = Laurent2::zero();
        // each reduction step strictly lowers the leading term within a
        // support set bounded by self's and d's exponents; the cap is a
        // safety net against pathological inputs
        let cap = 16 * (self.n_terms() + 4) * (d.n_terms() + 4) * 64;
        for _ in 0..cap {
            let (re, rc) = match rem.leading() {
                Some(l) => l,
                None => return Some(quot),
            };
            if rc % dc != 0 {
                return None;
            }
            let qe = (re.0 - de.0, re.1 - de.1);
            let qc = rc / dc;
            quot.add_term(qe, qc);
            for (e, c) in &d.terms {
                rem.add_term((qe.0 + e.0, qe.1 + e.1), -qc * c);
            }
        }
        None
    }

    /// Divide by a product of binomial factors, failing loudly if any step is
    /// not exact.
    pub fn exact_div_binomials(&self, factors: &[Laurent2]) -> Option<Laurent2> {
        let mut acc = self.clone();
        for f in factors {
            acc = acc.exact_div(f)?;
        }
        Some(acc)
    }

    /// All coefficients nonnegative (a genuine character, not just virtual).
    pub fn is_effective(&self) -> bool {
        self.terms.values().all(|&c| c >= 0)
    }

    /// Sum of coefficients (dimension of the character).
    pub fn dimension(&self) -> i64 {
        self.terms.values().sum()
    }
}

impl fmt::Display for Laurent2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for ((i, j), c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if *c != 1 || (*i == 0 && *j == 0) {
                write!(f, "{c}")?;
                if *i != 0 || *j != 0 {
                    write!(f, "*")?;
                }
            }
            if *i != 0 {
                write!(f, "t1^{i}")?;
            }
            if *j != 0 {
                if *i != 0 {
                    write!(f, "*")?;
                }
                write!(f, "t2^{j}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric_sum_division() {
        // (1 - t1^3) / (1 - t1) = 1 + t1 + t1^2
        let num = Laurent2::one_minus(3, 0);
        let den = Laurent2::one_minus(1, 0);
        let q = num.exact_div(&den).unwrap();
        let mut expect = Laurent2::one();
        expect.add_term((1, 0), 1);
        expect.add_term((2, 0), 1);
        assert_eq!(q, expect);
    }

    #[test]
    fn negative_exponent_division() {
        // (1 - t1^{-2}) / (1 - t1^{-1}) = 1 + t1^{-1}
        let num = Laurent2::one_minus(-2, 0);
        let den = Laurent2::one_minus(-1, 0);
        let q = num.exact_div(&den).unwrap();
        let mut expect = Laurent2::one();
        expect.add_term((-1, 0), 1);
        assert_eq!(q, expect);
    }

    #[test]
    fn inexact_division_detected() {
        let num = Laurent2::one_minus(3, 0);
        let den = Laurent2::one_minus(2, 0);
        assert!(num.exact_div(&den).is_none());
    }

    #[test]
    fn product_roundtrip() {
        let a = Laurent2::one_minus(1, 2);
        let b = Laurent2::one_minus(-2, 1);
        let mut c = Laurent2::monomial(3, -1);
        c.add_term((0, 4), 2);
        let prod = a.mul(&b).mul(&c);
        assert_eq!(prod.exact_div_binomials(&[a.clone(), b.clone()]).unwrap(), c);
    }
}
