//! Sparse multivariate polynomials over Q in graded-lex order.
//!
//! Exponent vectors are dense over the symbol table's slots (including the
//! trailing `t` slot).  The monomial order is graded lexicographic: compare
//! total degree first, then exponents from the *highest* slot down, so later
//! generators (`t`, masses, `a`'s) dominate earlier ones (`eps1`).  Storage is
//! a `BTreeMap` keyed by monomial, which makes every polynomial canonically
//! ordered by construction; the no-zero-coefficients invariant is restored
//! after every mutation.

use super::symbols::{LinearForm, Sym, SymbolTable};
use crate::Q;
use num::{One, Signed, Zero};
use smallvec::SmallVec;
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

/// Exponent vector of one monomial.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial(pub(crate) SmallVec<[u16; 10]>);

impl Monomial {
    pub fn unit(n_vars: usize) -> Self {
        Monomial(smallvec::smallvec![0; n_vars])
    }

    pub fn var(n_vars: usize, s: Sym) -> Self {
        let mut m = Self::unit(n_vars);
        m.0[s.0] = 1;
        m
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn exp(&self, s: Sym) -> u16 {
        self.0[s.0]
    }

    fn mul(&self, rhs: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(rhs.0.iter()).map(|(a, b)| a + b).collect())
    }

    /// Componentwise divisibility.
    fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(other.0.iter()).all(|(a, b)| a <= b)
    }

    /// `other / self`, assuming divisibility.
    fn div_into(&self, other: &Monomial) -> Monomial {
        Monomial(other.0.iter().zip(self.0.iter()).map(|(b, a)| b - a).collect())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.total_degree().cmp(&other.total_degree()) {
            Ordering::Equal => {}
            ord => return ord,
        }
        for (a, b) in self.0.iter().rev().zip(other.0.iter().rev()) {
            match a.cmp(b) {
                Ordering::Equal => {}
                ord => return ord,
            }
        }
        Ordering::Equal
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse polynomial with rational coefficients.
///
/// Invariants: all keys have the same length (`n_vars`), no stored coefficient
/// is zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparsePoly {
    n_vars: usize,
    terms: BTreeMap<Monomial, Q>,
}

impl SparsePoly {
    pub fn zero(n_vars: usize) -> Self {
        SparsePoly { n_vars, terms: BTreeMap::new() }
    }

    pub fn constant(n_vars: usize, c: Q) -> Self {
        let mut p = Self::zero(n_vars);
        if !c.is_zero() {
            p.terms.insert(Monomial::unit(n_vars), c);
        }
        p
    }

    pub fn one(n_vars: usize) -> Self {
        Self::constant(n_vars, Q::one())
    }

    pub fn var(n_vars: usize, s: Sym) -> Self {
        let mut p = Self::zero(n_vars);
        p.terms.insert(Monomial::var(n_vars, s), Q::one());
        p
    }

    pub fn from_linear(form: &LinearForm) -> Self {
        let n = form.n_vars();
        let mut p = Self::zero(n);
        for (i, c) in form.coeffs.iter().enumerate() {
            if !c.is_zero() {
                p.terms.insert(Monomial::var(n, Sym(i)), c.clone());
            }
        }
        p
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .get(&Monomial::unit(self.n_vars))
                .map(Q::is_one)
                .unwrap_or(false)
    }

    /// The constant term (zero if absent).
    pub fn constant_term(&self) -> Q {
        self.terms
            .get(&Monomial::unit(self.n_vars))
            .cloned()
            .unwrap_or_else(Q::zero)
    }

    /// `Some(c)` iff the polynomial is the constant `c` (including zero).
    pub fn as_constant(&self) -> Option<Q> {
        match self.terms.len() {
            0 => Some(Q::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                (m.total_degree() == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn n_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Q)> {
        self.terms.iter()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::total_degree).max().unwrap_or(0)
    }

    /// Largest monomial and its coefficient under graded-lex.
    pub fn leading(&self) -> Option<(&Monomial, &Q)> {
        self.terms.iter().next_back()
    }

    /// Accumulate a single term, maintaining the no-zero invariant.
    pub(crate) fn insert_raw(&mut self, m: Monomial, c: Q) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(m.clone()).or_insert_with(Q::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn add_assign(&mut self, rhs: &SparsePoly) {
        debug_assert_eq!(self.n_vars, rhs.n_vars);
        for (m, c) in &rhs.terms {
            let entry = self.terms.entry(m.clone()).or_insert_with(Q::zero);
            *entry += c.clone();
            if entry.is_zero() {
                self.terms.remove(m);
            }
        }
    }

    pub fn add(&self, rhs: &SparsePoly) -> SparsePoly {
        let mut out = self.clone();
        out.add_assign(rhs);
        out
    }

    pub fn sub(&self, rhs: &SparsePoly) -> SparsePoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            let entry = out.terms.entry(m.clone()).or_insert_with(Q::zero);
            *entry -= c.clone();
            if entry.is_zero() {
                out.terms.remove(m);
            }
        }
        out
    }

    pub fn neg(&self) -> SparsePoly {
        SparsePoly {
            n_vars: self.n_vars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect(),
        }
    }

    pub fn scale(&self, k: &Q) -> SparsePoly {
        if k.is_zero() {
            return Self::zero(self.n_vars);
        }
        SparsePoly {
            n_vars: self.n_vars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c.clone() * k.clone())).collect(),
        }
    }

    pub fn mul(&self, rhs: &SparsePoly) -> SparsePoly {
        debug_assert_eq!(self.n_vars, rhs.n_vars);
        let mut out = SparsePoly::zero(self.n_vars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                let m = ma.mul(mb);
                let entry = out.terms.entry(m.clone()).or_insert_with(Q::zero);
                *entry += ca.clone() * cb.clone();
                if entry.is_zero() {
                    out.terms.remove(&m);
                }
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> SparsePoly {
        let mut out = SparsePoly::one(self.n_vars);
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    /// Exact division: `Some(q)` with `self == q * d`, or `None` if `d` does
    /// not divide `self` exactly.
    ///
    /// Single-divisor multivariate division in graded-lex order.  When the
    /// quotient exists the leading term of the remainder is always divisible
    /// by the leading term of `d`, so a divisibility failure at any step
    /// certifies inexactness and the attempt aborts early.
    pub fn exact_div(&self, d: &SparsePoly) -> Option<SparsePoly> {
        debug_assert_eq!(self.n_vars, d.n_vars);
        let (dm, dc) = d.leading()?;
        if self.is_zero() {
            return Some(SparsePoly::zero(self.n_vars));
        }
        let mut rem = self.clone();
        let mut quot = SparsePoly::zero(self.n_vars);
        while let Some((rm, rc)) = rem.leading() {
            if !dm.divides(rm) {
                return None;
            }
            let qm = dm.div_into(rm);
            let qc = rc.clone() / dc.clone();
            // rem -= (qc * qm) * d
            for (m, c) in &d.terms {
                let t = qm.mul(m);
                let entry = rem.terms.entry(t.clone()).or_insert_with(Q::zero);
                *entry -= qc.clone() * c.clone();
                if entry.is_zero() {
                    rem.terms.remove(&t);
                }
            }
            quot.terms.insert(qm, qc);
            if rem.is_zero() {
                return Some(quot);
            }
        }
        Some(quot)
    }

    /// Degree in a single variable.
    pub fn degree_in(&self, s: Sym) -> u16 {
        self.terms.keys().map(|m| m.exp(s)).max().unwrap_or(0)
    }

    /// Lowest power of `s` appearing in any term (0 for the zero polynomial).
    pub fn min_degree_in(&self, s: Sym) -> u16 {
        self.terms.keys().map(|m| m.exp(s)).min().unwrap_or(0)
    }

    /// Split by powers of `s`: returns `power -> coefficient polynomial` with
    /// the `s`-exponent removed from each coefficient.
    pub fn split_by(&self, s: Sym) -> BTreeMap<u16, SparsePoly> {
        let mut out: BTreeMap<u16, SparsePoly> = BTreeMap::new();
        for (m, c) in &self.terms {
            let e = m.exp(s);
            let mut stripped = m.clone();
            stripped.0[s.0] = 0;
            out.entry(e)
                .or_insert_with(|| SparsePoly::zero(self.n_vars))
                .terms
                .insert(stripped, c.clone());
        }
        out
    }

    /// Divide every term by `s^k` (all terms must carry at least `s^k`).
    pub fn shift_down(&self, s: Sym, k: u16) -> SparsePoly {
        let mut out = SparsePoly::zero(self.n_vars);
        for (m, c) in &self.terms {
            assert!(m.exp(s) >= k, "shift_down underflow");
            let mut m2 = m.clone();
            m2.0[s.0] -= k;
            out.terms.insert(m2, c.clone());
        }
        out
    }

    /// Whether the variable occurs at all.
    pub fn uses_var(&self, s: Sym) -> bool {
        self.terms.keys().any(|m| m.exp(s) > 0)
    }

    /// Evaluate at a rational point (slot-indexed, length `n_vars`).
    pub fn eval_q(&self, point: &[Q]) -> Q {
        assert_eq!(point.len(), self.n_vars);
        let mut acc = Q::zero();
        for (m, c) in &self.terms {
            let mut term = c.clone();
            for (i, &e) in m.0.iter().enumerate() {
                for _ in 0..e {
                    term *= point[i].clone();
                }
            }
            acc += term;
        }
        acc
    }

    /// Evaluate at a high-precision point (slot-indexed, length `n_vars`).
    pub fn eval_hp(&self, point: &[rug::Float], prec: u32) -> rug::Float {
        assert_eq!(point.len(), self.n_vars);
        let mut acc = rug::Float::with_val(prec, 0);
        for (m, c) in &self.terms {
            let mut term = crate::hp::q_to_float(c, prec);
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    term *= rug::Float::with_val(prec, rug::ops::Pow::pow(&point[i], e as u32));
                }
            }
            acc += term;
        }
        acc
    }

    /// Render against a table (diagnostics only; canonical order, descending).
    pub fn display<'a>(&'a self, table: &'a SymbolTable) -> PolyDisplay<'a> {
        PolyDisplay { poly: self, table }
    }
}

pub struct PolyDisplay<'a> {
    poly: &'a SparsePoly,
    table: &'a SymbolTable,
}

impl fmt::Display for PolyDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.poly.is_zero() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.poly.terms.iter().rev().enumerate() {
            let mut mono = String::new();
            for (slot, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                if !mono.is_empty() {
                    mono.push('*');
                }
                mono.push_str(&self.table.name(Sym(slot)));
                if e > 1 {
                    mono.push_str(&format!("^{e}"));
                }
            }
            let abs = c.abs();
            let sign = c.is_negative();
            if i == 0 {
                if sign {
                    write!(f, "-")?;
                }
            } else if sign {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            if mono.is_empty() {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write!(f, "{mono}")?;
            } else {
                write!(f, "{abs}*{mono}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{q, qi};

    fn table() -> SymbolTable {
        SymbolTable::new(2, 0, false)
    }

    #[test]
    fn graded_lex_ordering() {
        let st = table();
        let n = st.n_vars();
        let e1 = Monomial::var(n, st.eps1());
        let e2 = Monomial::var(n, st.eps2());
        let a1 = Monomial::var(n, st.a(0));
        // degree dominates
        assert!(e1.mul(&e1) > a1);
        // within a degree, higher slot wins
        assert!(e2 > e1);
        assert!(a1 > e2);
    }

    #[test]
    fn mul_and_exact_div_roundtrip() {
        let st = table();
        let n = st.n_vars();
        let x = SparsePoly::var(n, st.eps1());
        let y = SparsePoly::var(n, st.eps2());
        let p = x.add(&y); // eps1 + eps2
        let d = x.sub(&y); // eps1 - eps2
        let prod = p.mul(&d); // eps1^2 - eps2^2
        assert_eq!(prod.exact_div(&d).unwrap(), p);
        assert_eq!(prod.exact_div(&p).unwrap(), d);
        // not divisible
        assert!(prod.add(&SparsePoly::one(n)).exact_div(&d).is_none());
    }

    #[test]
    fn split_and_eval() {
        let st = table();
        let n = st.n_vars();
        let t = SparsePoly::var(n, st.t());
        let a = SparsePoly::var(n, st.a(0));
        // p = a + 2 a t + t^2
        let p = a.add(&a.mul(&t).scale(&qi(2))).add(&t.mul(&t));
        let by_t = p.split_by(st.t());
        assert_eq!(by_t.len(), 3);
        assert_eq!(by_t[&0], a);
        assert_eq!(by_t[&1], a.scale(&qi(2)));
        assert!(by_t[&2].is_one());

        let mut pt = vec![Q::zero(); n];
        pt[st.a(0).index()] = q(1, 2);
        pt[st.t().index()] = qi(3);
        // 1/2 + 2*(1/2)*3 + 9 = 1/2 + 3 + 9
        assert_eq!(p.eval_q(&pt), q(25, 2));
    }
}
