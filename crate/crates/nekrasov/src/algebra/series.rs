//! Truncated series in Lambda with an optional Q-multigrading.
//!
//! A [`LambdaSeries`] maps `(lambda_exp, q_multidegree)` to a coefficient in
//! any ring implementing [`SeriesCoeff`]; the exact engine uses `RatFunc`
//! coefficients, numeric mode uses high-precision floats.  Terms beyond the
//! stored truncation order are dropped on every operation, so products and
//! logs are exact through the order and silently truncated above it.  The
//! Q-multidegree is an integer vector over the surface's edge set (empty for
//! the C^2 vertex series and for a single master-formula series).

use super::AlgebraError;
use crate::Q;
use std::collections::BTreeMap;

/// Coefficient ring operations needed by series arithmetic.
pub trait SeriesCoeff: Clone {
    fn is_zero(&self) -> bool;
    fn is_one(&self) -> bool;
    fn add(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    /// Multiply by an exact rational scalar.
    fn scale_q(&self, k: &Q) -> Self;
}

impl SeriesCoeff for super::ratfunc::RatFunc {
    fn is_zero(&self) -> bool {
        RatFuncExt::is_zero(self)
    }
    fn is_one(&self) -> bool {
        RatFuncExt::is_one(self)
    }
    fn add(&self, rhs: &Self) -> Self {
        RatFuncExt::add(self, rhs)
    }
    fn neg(&self) -> Self {
        RatFuncExt::neg(self)
    }
    fn mul(&self, rhs: &Self) -> Self {
        RatFuncExt::mul(self, rhs)
    }
    fn scale_q(&self, k: &Q) -> Self {
        self.scale(k)
    }
}

// Inherent methods win over trait methods of the same name; the alias keeps
// the impl above readable.
use super::ratfunc::RatFunc as RatFuncExt;

/// High-precision float coefficients (numeric mode).
#[derive(Debug, Clone, PartialEq)]
pub struct HpCoeff(pub rug::Float);

impl SeriesCoeff for HpCoeff {
    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
    fn is_one(&self) -> bool {
        self.0 == 1u32
    }
    fn add(&self, rhs: &Self) -> Self {
        HpCoeff(rug::Float::with_val(self.0.prec().max(rhs.0.prec()), &self.0 + &rhs.0))
    }
    fn neg(&self) -> Self {
        HpCoeff(-self.0.clone())
    }
    fn mul(&self, rhs: &Self) -> Self {
        HpCoeff(rug::Float::with_val(self.0.prec().max(rhs.0.prec()), &self.0 * &rhs.0))
    }
    fn scale_q(&self, k: &Q) -> Self {
        let prec = self.0.prec();
        HpCoeff(rug::Float::with_val(prec, &self.0 * &crate::hp::q_to_float(k, prec)))
    }
}

/// Key of one series term.
pub type SeriesKey = (u32, Vec<i64>);

#[derive(Debug, Clone, PartialEq)]
pub struct LambdaSeries<C> {
    order: u32,
    qdims: usize,
    terms: BTreeMap<SeriesKey, C>,
}

impl<C: SeriesCoeff> LambdaSeries<C> {
    /// Empty series truncated at `Lambda^order` (inclusive), with `qdims`
    /// Q-grading slots.
    pub fn new(order: u32, qdims: usize) -> Self {
        LambdaSeries { order, qdims, terms: BTreeMap::new() }
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn qdims(&self) -> usize {
        self.qdims
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn n_terms(&self) -> usize {
        self.terms.len()
    }

    /// Add `c * Lambda^k Q^qdeg`, dropping it if beyond the truncation order.
    pub fn add_term(&mut self, k: u32, qdeg: Vec<i64>, c: C) {
        assert_eq!(qdeg.len(), self.qdims, "q-multidegree dimension mismatch");
        if k > self.order || c.is_zero() {
            return;
        }
        let key = (k, qdeg);
        match self.terms.remove(&key) {
            Some(prev) => {
                let sum = prev.add(&c);
                if !sum.is_zero() {
                    self.terms.insert(key, sum);
                }
            }
            None => {
                self.terms.insert(key, c);
            }
        }
    }

    pub fn coeff(&self, k: u32, qdeg: &[i64]) -> Option<&C> {
        self.terms.get(&(k, qdeg.to_vec()))
    }

    /// Iterate terms in (lambda_exp, q_multidegree) order.
    pub fn iter(&self) -> impl Iterator<Item = (&SeriesKey, &C)> {
        self.terms.iter()
    }

    /// Lambda-exponents present (sorted, deduplicated).
    pub fn lambda_exponents(&self) -> Vec<u32> {
        let mut v: Vec<u32> = self.terms.keys().map(|(k, _)| *k).collect();
        v.dedup();
        v
    }

    /// Smallest lambda exponent with a nonzero term.
    pub fn min_lambda(&self) -> Option<u32> {
        self.terms.keys().map(|(k, _)| *k).min()
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let order = self.order.min(rhs.order);
        let mut out = LambdaSeries::new(order, self.qdims);
        for ((k, q), c) in self.terms.iter().chain(rhs.terms.iter()) {
            out.add_term(*k, q.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        LambdaSeries {
            order: self.order,
            qdims: self.qdims,
            terms: self.terms.iter().map(|(k, c)| (k.clone(), c.neg())).collect(),
        }
    }

    /// Multiply, truncating at the smaller of the two orders.
    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.qdims, rhs.qdims);
        let order = self.order.min(rhs.order);
        let mut out = LambdaSeries::new(order, self.qdims);
        for ((ka, qa), ca) in &self.terms {
            if *ka > order {
                continue;
            }
            for ((kb, qb), cb) in &rhs.terms {
                let k = ka + kb;
                if k > order {
                    continue;
                }
                let qdeg: Vec<i64> = qa.iter().zip(qb).map(|(x, y)| x + y).collect();
                out.add_term(k, qdeg, ca.mul(cb));
            }
        }
        out
    }

    /// Multiply every coefficient by a fixed ring element.
    pub fn scale_coeff(&self, c: &C) -> Self {
        let mut out = LambdaSeries::new(self.order, self.qdims);
        for ((k, q), v) in &self.terms {
            out.add_term(*k, q.clone(), v.mul(c));
        }
        out
    }

    /// Multiply by an exact rational scalar.
    pub fn scale_q(&self, k: &Q) -> Self {
        let mut out = LambdaSeries::new(self.order, self.qdims);
        for ((l, q), v) in &self.terms {
            out.add_term(*l, q.clone(), v.scale_q(k));
        }
        out
    }

    /// Shift every lambda exponent up by `dk` (truncating at the order).
    pub fn shift_lambda(&self, dk: u32) -> Self {
        let mut out = LambdaSeries::new(self.order, self.qdims);
        for ((k, q), v) in &self.terms {
            out.add_term(k + dk, q.clone(), v.clone());
        }
        out
    }

    /// Map coefficients through a fallible function, dropping exact zeros.
    pub fn map_coeffs<D: SeriesCoeff, E>(
        &self,
        mut f: impl FnMut(&SeriesKey, &C) -> Result<D, E>,
    ) -> Result<LambdaSeries<D>, E> {
        let mut out = LambdaSeries::new(self.order, self.qdims);
        for (key, c) in &self.terms {
            out.add_term(key.0, key.1.clone(), f(key, c)?);
        }
        Ok(out)
    }

    fn constant_key(&self) -> SeriesKey {
        (0, vec![0; self.qdims])
    }

    /// log of a series with constant term exactly 1 (and no other Lambda^0
    /// terms): `log(1 + s) = sum (-1)^{k+1} s^k / k` through the order.
    pub fn log(&self) -> Result<Self, AlgebraError> {
        let ckey = self.constant_key();
        match self.terms.get(&ckey) {
            Some(c) if c.is_one() => {}
            other => {
                return Err(AlgebraError::LogConstantTerm {
                    found: match other {
                        Some(_) => "non-unit constant term".to_string(),
                        None => "no constant term".to_string(),
                    },
                })
            }
        }
        for (k, q) in self.terms.keys() {
            if *k == 0 && (k, q.as_slice()) != (&0, ckey.1.as_slice()) {
                return Err(AlgebraError::LogConstantTerm {
                    found: "additional Lambda^0 terms in the Q-grading".to_string(),
                });
            }
        }
        let mut s = self.clone();
        s.terms.remove(&ckey);
        let mut acc = LambdaSeries::new(self.order, self.qdims);
        let mut power = s.clone(); // s^k
        for k in 1..=self.order.max(1) {
            if power.is_zero() {
                break;
            }
            let sign = if k % 2 == 1 { crate::qi(1) } else { crate::qi(-1) };
            let coeff = sign / crate::qi(k as i64);
            acc = acc.add(&power.scale_q(&coeff));
            power = power.mul(&s);
        }
        Ok(acc)
    }

    /// exp of a series with zero constant term.
    pub fn exp(&self) -> Result<Self, AlgebraError> {
        if self.terms.contains_key(&self.constant_key()) {
            return Err(AlgebraError::ExpConstantTerm);
        }
        for (k, _) in self.terms.keys() {
            if *k == 0 {
                return Err(AlgebraError::ExpConstantTerm);
            }
        }
        let mut acc = LambdaSeries::new(self.order, self.qdims);
        let mut power: Option<Self> = None; // s^k starting at k = 1
        let mut factorial = crate::qi(1);
        for k in 1..=self.order.max(1) {
            factorial *= crate::qi(k as i64);
            let p = match power {
                None => self.clone(),
                Some(prev) => prev.mul(self),
            };
            if p.is_zero() {
                power = Some(p);
                break;
            }
            acc = acc.add(&p.scale_q(&(crate::qi(1) / factorial.clone())));
            power = Some(p);
        }
        let _ = power;
        Ok(acc)
    }

    /// Insert the unit constant term (used to build `1 + ...` shapes).
    pub fn with_one(mut self, one: C) -> Self {
        assert!(one.is_one());
        self.add_term(0, vec![0; self.qdims], one);
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::ratfunc::RatFunc;
    use crate::algebra::symbols::SymbolTable;
    use crate::qi;

    fn one_term(st: &SymbolTable, order: u32, k: u32, c: i64) -> LambdaSeries<RatFunc> {
        let mut s = LambdaSeries::new(order, 0);
        s.add_term(k, vec![], RatFunc::constant(st.n_vars(), qi(c)));
        s
    }

    #[test]
    fn log_exp_roundtrip_simple() {
        let st = SymbolTable::new(1, 0, false);
        // z = 1 + 3 Lambda^2 + 5 Lambda^3
        let z = one_term(&st, 8, 2, 3)
            .add(&one_term(&st, 8, 3, 5))
            .with_one(RatFunc::one(st.n_vars()));
        let back = z.log().unwrap().exp().unwrap().with_one(RatFunc::one(st.n_vars()));
        assert_eq!(back, z);
    }

    #[test]
    fn log_of_exponential_is_linear() {
        let st = SymbolTable::new(1, 0, false);
        // exp(c Lambda^2) has log equal to c Lambda^2 exactly
        let s = one_term(&st, 12, 2, 7);
        let z = s.exp().unwrap().with_one(RatFunc::one(st.n_vars()));
        assert_eq!(z.log().unwrap(), s);
    }

    #[test]
    fn log_requires_unit_constant() {
        let st = SymbolTable::new(1, 0, false);
        assert!(one_term(&st, 4, 1, 1).log().is_err());
    }
}
