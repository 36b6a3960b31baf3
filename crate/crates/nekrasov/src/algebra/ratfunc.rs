//! Rational functions as sparse numerators over factored denominators.
//!
//! Canonical form:
//!
//! * the denominator is a sorted multiset of *monic* (graded-lex leading
//!   coefficient 1), nonconstant factors with multiplicities; all rational
//!   content lives in the numerator;
//! * the numerator is not exactly divisible by any denominator factor (the
//!   reduction loop below enforces this after every operation);
//! * zero is `0 / (empty product)`.
//!
//! In the localization engine every factor that ever enters a denominator is a
//! linear form in the symbols, hence irreducible, so the reduced form is the
//! unique one and structural equality coincides with mathematical equality.
//! Generic division can push a nonlinear numerator into a denominator; such
//! factors are carried opaquely (still canonical as long as both sides of a
//! comparison were produced by the same route).  No multivariate gcd is ever
//! computed.

use super::poly::SparsePoly;
use super::symbols::{LinearForm, SymbolTable};
use super::AlgebraError;
use crate::Q;
use num::{One, Zero};
use std::cmp::Ordering;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatFunc {
    num: SparsePoly,
    /// Monic factors with multiplicities, sorted, pairwise distinct.
    den: Vec<(SparsePoly, u32)>,
}

fn poly_cmp(a: &SparsePoly, b: &SparsePoly) -> Ordering {
    a.n_vars()
        .cmp(&b.n_vars())
        .then_with(|| a.terms().cmp(b.terms()))
}

impl RatFunc {
    pub fn zero(n_vars: usize) -> Self {
        RatFunc { num: SparsePoly::zero(n_vars), den: Vec::new() }
    }

    pub fn one(n_vars: usize) -> Self {
        RatFunc { num: SparsePoly::one(n_vars), den: Vec::new() }
    }

    pub fn constant(n_vars: usize, c: Q) -> Self {
        RatFunc { num: SparsePoly::constant(n_vars, c), den: Vec::new() }
    }

    pub fn from_poly(p: SparsePoly) -> Self {
        RatFunc { num: p, den: Vec::new() }
    }

    pub fn from_linear(form: &LinearForm) -> Self {
        Self::from_poly(SparsePoly::from_linear(form))
    }

    /// Build `num / prod(den_i)` and normalize.
    pub fn from_parts(num: SparsePoly, den: Vec<(SparsePoly, u32)>) -> Self {
        let mut f = RatFunc { num, den };
        f.normalize();
        f
    }

    pub fn n_vars(&self) -> usize {
        self.num.n_vars()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.den.is_empty() && self.num.is_one()
    }

    pub fn num(&self) -> &SparsePoly {
        &self.num
    }

    pub fn den_factors(&self) -> &[(SparsePoly, u32)] {
        &self.den
    }

    /// Expanded denominator polynomial.
    pub fn den_expanded(&self) -> SparsePoly {
        let mut d = SparsePoly::one(self.n_vars());
        for (f, m) in &self.den {
            d = d.mul(&f.pow(*m));
        }
        d
    }

    /// `Some(c)` iff this is a constant rational (zero included).
    pub fn as_constant(&self) -> Option<Q> {
        if !self.den.is_empty() {
            return None;
        }
        self.num.as_constant()
    }

    fn normalize(&mut self) {
        if self.num.is_zero() {
            self.den.clear();
            return;
        }
        // fold constants out of the denominator, monicize the rest
        let mut scale = Q::one();
        let mut den: Vec<(SparsePoly, u32)> = Vec::with_capacity(self.den.len());
        for (f, m) in self.den.drain(..) {
            if let Some(c) = f.as_constant() {
                assert!(!c.is_zero(), "zero factor in denominator");
                for _ in 0..m {
                    scale *= c.clone();
                }
                continue;
            }
            let lead = f.leading().expect("nonconstant factor").1.clone();
            if lead.is_one() {
                den.push((f, m));
            } else {
                let monic = f.scale(&(Q::one() / lead.clone()));
                for _ in 0..m {
                    scale *= lead.clone();
                }
                den.push((monic, m));
            }
        }
        if !scale.is_one() {
            self.num = self.num.scale(&(Q::one() / scale));
        }
        // merge duplicates
        den.sort_by(|a, b| poly_cmp(&a.0, &b.0));
        let mut merged: Vec<(SparsePoly, u32)> = Vec::with_capacity(den.len());
        for (f, m) in den {
            match merged.last_mut() {
                Some((g, k)) if poly_cmp(g, &f) == Ordering::Equal => *k += m,
                _ => merged.push((f, m)),
            }
        }
        // reduce: cancel factors dividing the numerator exactly
        for (f, m) in &mut merged {
            while *m > 0 {
                match self.num.exact_div(f) {
                    Some(q) => {
                        self.num = q;
                        *m -= 1;
                    }
                    None => break,
                }
            }
        }
        merged.retain(|(_, m)| *m > 0);
        self.den = merged;
    }

    pub fn neg(&self) -> RatFunc {
        RatFunc { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn scale(&self, k: &Q) -> RatFunc {
        if k.is_zero() {
            return RatFunc::zero(self.n_vars());
        }
        RatFunc { num: self.num.scale(k), den: self.den.clone() }
    }

    pub fn add(&self, rhs: &RatFunc) -> RatFunc {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        // lcm of the factor multisets
        let mut lcm: Vec<(SparsePoly, u32)> = self.den.clone();
        for (f, m) in &rhs.den {
            match lcm.iter_mut().find(|(g, _)| poly_cmp(g, f) == Ordering::Equal) {
                Some((_, k)) => *k = (*k).max(*m),
                None => lcm.push((f.clone(), *m)),
            }
        }
        let cofactor = |own: &[(SparsePoly, u32)], n_vars: usize| -> SparsePoly {
            let mut c = SparsePoly::one(n_vars);
            for (f, m) in &lcm {
                let have = own
                    .iter()
                    .find(|(g, _)| poly_cmp(g, f) == Ordering::Equal)
                    .map(|(_, k)| *k)
                    .unwrap_or(0);
                if *m > have {
                    c = c.mul(&f.pow(*m - have));
                }
            }
            c
        };
        let num = self
            .num
            .mul(&cofactor(&self.den, self.n_vars()))
            .add(&rhs.num.mul(&cofactor(&rhs.den, self.n_vars())));
        RatFunc::from_parts(num, lcm)
    }

    pub fn sub(&self, rhs: &RatFunc) -> RatFunc {
        self.add(&rhs.neg())
    }

    pub fn mul(&self, rhs: &RatFunc) -> RatFunc {
        if self.is_zero() || rhs.is_zero() {
            return RatFunc::zero(self.n_vars());
        }
        let mut den = self.den.clone();
        den.extend(rhs.den.iter().cloned());
        RatFunc::from_parts(self.num.mul(&rhs.num), den)
    }

    pub fn inv(&self) -> Result<RatFunc, AlgebraError> {
        if self.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        let mut num = SparsePoly::one(self.n_vars());
        for (f, m) in &self.den {
            num = num.mul(&f.pow(*m));
        }
        RatFunc::from_parts_checked(num, vec![(self.num.clone(), 1)])
    }

    fn from_parts_checked(num: SparsePoly, den: Vec<(SparsePoly, u32)>) -> Result<RatFunc, AlgebraError> {
        let mut f = RatFunc { num, den };
        f.normalize();
        Ok(f)
    }

    pub fn div(&self, rhs: &RatFunc) -> Result<RatFunc, AlgebraError> {
        Ok(self.mul(&rhs.inv()?))
    }

    /// Integer power (negative exponents invert).
    pub fn pow_i(&self, k: i32) -> Result<RatFunc, AlgebraError> {
        let base = if k < 0 { self.inv()? } else { self.clone() };
        let mut out = RatFunc::one(self.n_vars());
        for _ in 0..k.unsigned_abs() {
            out = out.mul(&base);
        }
        Ok(out)
    }

    /// Evaluate exactly at a rational point; `Err` names the vanishing factor.
    pub fn eval_q(&self, point: &[Q]) -> Result<Q, PoleAt> {
        let mut acc = self.num.eval_q(point);
        for (f, m) in &self.den {
            let v = f.eval_q(point);
            if v.is_zero() {
                return Err(PoleAt { factor_terms: f.n_terms() });
            }
            for _ in 0..*m {
                acc /= v.clone();
            }
        }
        Ok(acc)
    }

    /// Evaluate in high precision at a slot-indexed point.
    pub fn eval_hp(&self, point: &[rug::Float], prec: u32) -> Result<rug::Float, PoleAt> {
        let mut acc = self.num.eval_hp(point, prec);
        for (f, m) in &self.den {
            let v = f.eval_hp(point, prec);
            if v.is_zero() {
                return Err(PoleAt { factor_terms: f.n_terms() });
            }
            for _ in 0..*m {
                acc /= v.clone();
            }
        }
        Ok(acc)
    }

    pub fn display<'a>(&'a self, table: &'a SymbolTable) -> RatFuncDisplay<'a> {
        RatFuncDisplay { f: self, table }
    }
}

/// Evaluation hit a zero of the denominator.
#[derive(Debug, Clone, thiserror::Error)]
#[error("evaluation point lies on a pole (denominator factor with {factor_terms} terms vanishes)")]
pub struct PoleAt {
    pub factor_terms: usize,
}

pub struct RatFuncDisplay<'a> {
    f: &'a RatFunc,
    table: &'a SymbolTable,
}

impl fmt::Display for RatFuncDisplay<'_> {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.f.den.is_empty() {
            return write!(out, "{}", self.f.num.display(self.table));
        }
        write!(out, "({})", self.f.num.display(self.table))?;
        write!(out, " / [")?;
        for (i, (fac, m)) in self.f.den.iter().enumerate() {
            if i > 0 {
                write!(out, " * ")?;
            }
            write!(out, "({})", fac.display(self.table))?;
            if *m > 1 {
                write!(out, "^{m}")?;
            }
        }
        write!(out, "]")
    }
}
