//! Generator list and linear forms.
//!
//! A [`SymbolTable`] fixes, once per computation, the ordered list of
//! generators
//!
//! ```text
//!   eps1 < eps2 < a_1 < ... < a_r [< m_1 < ... < m_nf] [< m_adj] < t
//! ```
//!
//! The trailing `t` slot is reserved for the direction parameter introduced by
//! the eps -> 0 substitution; symbolic input never uses it directly.  The
//! order of the list is the variable precedence of the graded-lex monomial
//! order used everywhere downstream, so two computations over the same table
//! produce literally identical canonical forms.

use crate::{qi, Q};
use num::{One, Zero};
use std::fmt;

/// Index of a generator in a fixed [`SymbolTable`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Sym(pub(crate) usize);

impl Sym {
    /// Raw slot index (position in exponent vectors).
    pub fn index(self) -> usize {
        self.0
    }
}

/// Fixed, ordered generator list for one computation.
///
/// `r` is the rank (number of Coulomb parameters `a_alpha`), `n_fund` the
/// number of fundamental masses, and `adjoint` whether an adjoint mass slot is
/// present.  Tables with the same shape are interchangeable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolTable {
    r: usize,
    n_fund: usize,
    adjoint: bool,
}

impl SymbolTable {
    /// A table with `r` Coulomb parameters, `n_fund` fundamental masses and an
    /// optional adjoint mass.
    ///
    /// Panics if `r == 0`; rank-zero theories do not occur.
    pub fn new(r: usize, n_fund: usize, adjoint: bool) -> Self {
        assert!(r >= 1, "rank must be at least 1");
        SymbolTable { r, n_fund, adjoint }
    }

    /// Rank `r`.
    pub fn rank(&self) -> usize {
        self.r
    }

    /// Number of fundamental mass symbols.
    pub fn n_fund(&self) -> usize {
        self.n_fund
    }

    /// Whether an adjoint mass symbol is present.
    pub fn has_adjoint(&self) -> bool {
        self.adjoint
    }

    /// Total number of exponent slots (generators plus the `t` slot).
    pub fn n_vars(&self) -> usize {
        2 + self.r + self.n_fund + usize::from(self.adjoint) + 1
    }

    pub fn eps1(&self) -> Sym {
        Sym(0)
    }

    pub fn eps2(&self) -> Sym {
        Sym(1)
    }

    /// Coulomb parameter `a_alpha`, `alpha` 0-based in `0..r`.
    pub fn a(&self, alpha: usize) -> Sym {
        assert!(alpha < self.r, "a index {alpha} out of range (r = {})", self.r);
        Sym(2 + alpha)
    }

    /// Fundamental mass `m_f`, `f` 0-based in `0..n_fund`.
    pub fn mass(&self, f: usize) -> Sym {
        assert!(f < self.n_fund, "mass index {f} out of range (n_fund = {})", self.n_fund);
        Sym(2 + self.r + f)
    }

    /// The adjoint mass symbol, if the table has one.
    pub fn adjoint_mass(&self) -> Option<Sym> {
        self.adjoint.then(|| Sym(2 + self.r + self.n_fund))
    }

    /// The reserved direction parameter slot.
    pub fn t(&self) -> Sym {
        Sym(self.n_vars() - 1)
    }

    /// Printable name of a slot.
    pub fn name(&self, s: Sym) -> String {
        let i = s.0;
        if i == 0 {
            return "eps1".into();
        }
        if i == 1 {
            return "eps2".into();
        }
        let i = i - 2;
        if i < self.r {
            return format!("a{}", i + 1);
        }
        let i = i - self.r;
        if i < self.n_fund {
            return format!("m{}", i + 1);
        }
        let i = i - self.n_fund;
        if self.adjoint && i == 0 {
            return "m".into();
        }
        "t".into()
    }

    /// Linear form with the given rational coefficients on symbols.
    pub fn form(&self, terms: &[(Sym, Q)]) -> LinearForm {
        let mut coeffs = vec![Q::zero(); self.n_vars()];
        for (s, c) in terms {
            assert!(s.0 != self.t().0, "linear forms never involve t");
            coeffs[s.0] += c.clone();
        }
        LinearForm { coeffs }
    }

    /// Linear form with integer coefficients on symbols.
    pub fn form_i(&self, terms: &[(Sym, i64)]) -> LinearForm {
        let terms: Vec<(Sym, Q)> = terms.iter().map(|&(s, c)| (s, qi(c))).collect();
        self.form(&terms)
    }

    /// `c1*eps1 + c2*eps2`.
    pub fn eps_form(&self, c1: i64, c2: i64) -> LinearForm {
        self.form_i(&[(self.eps1(), c1), (self.eps2(), c2)])
    }

    /// The zero form.
    pub fn zero_form(&self) -> LinearForm {
        LinearForm { coeffs: vec![Q::zero(); self.n_vars()] }
    }
}

/// A rational linear combination of generators with no constant term.
///
/// Equivariant weights, Coulomb shifts and mass arguments are all values of
/// this type; it is the only shape of data the geometry and character layers
/// hand to the algebra layer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearForm {
    /// Coefficient per slot; the `t` slot is always zero.
    pub(crate) coeffs: Vec<Q>,
}

impl LinearForm {
    pub fn n_vars(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Q::is_zero)
    }

    pub fn coeff(&self, s: Sym) -> &Q {
        &self.coeffs[s.0]
    }

    pub fn add(&self, rhs: &LinearForm) -> LinearForm {
        assert_eq!(self.coeffs.len(), rhs.coeffs.len());
        LinearForm {
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        }
    }

    pub fn sub(&self, rhs: &LinearForm) -> LinearForm {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> LinearForm {
        LinearForm { coeffs: self.coeffs.iter().map(|c| -c.clone()).collect() }
    }

    pub fn scale(&self, k: &Q) -> LinearForm {
        LinearForm { coeffs: self.coeffs.iter().map(|c| c.clone() * k.clone()).collect() }
    }

    pub fn scale_i(&self, k: i64) -> LinearForm {
        self.scale(&qi(k))
    }

    /// Render against a table (used in diagnostics and error messages).
    pub fn display<'a>(&'a self, table: &'a SymbolTable) -> LinearFormDisplay<'a> {
        LinearFormDisplay { form: self, table }
    }
}

pub struct LinearFormDisplay<'a> {
    form: &'a LinearForm,
    table: &'a SymbolTable,
}

impl fmt::Display for LinearFormDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.form.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let name = self.table.name(Sym(i));
            if first {
                if c.is_one() {
                    write!(f, "{name}")?;
                } else if (-c.clone()).is_one() {
                    write!(f, "-{name}")?;
                } else {
                    write!(f, "{c}*{name}")?;
                }
                first = false;
            } else if c.is_one() {
                write!(f, " + {name}")?;
            } else if (-c.clone()).is_one() {
                write!(f, " - {name}")?;
            } else if c < &Q::zero() {
                write!(f, " - {}*{name}", -c.clone())?;
            } else {
                write!(f, " + {c}*{name}")?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slot_layout_is_stable() {
        let st = SymbolTable::new(2, 2, true);
        assert_eq!(st.n_vars(), 2 + 2 + 2 + 1 + 1);
        assert_eq!(st.name(st.eps1()), "eps1");
        assert_eq!(st.name(st.eps2()), "eps2");
        assert_eq!(st.name(st.a(0)), "a1");
        assert_eq!(st.name(st.a(1)), "a2");
        assert_eq!(st.name(st.mass(1)), "m2");
        assert_eq!(st.name(st.adjoint_mass().unwrap()), "m");
        assert_eq!(st.name(st.t()), "t");
        assert_eq!(st.t().index(), st.n_vars() - 1);
    }

    #[test]
    fn form_arithmetic() {
        let st = SymbolTable::new(1, 0, false);
        let w = st.eps_form(1, -1);
        let u = st.eps_form(0, -1);
        // u - 1*w = eps1*(-1) + eps2*0
        let v = u.sub(&w);
        assert_eq!(v, st.eps_form(-1, 0));
        assert!(v.sub(&v).is_zero());
        assert_eq!(format!("{}", w.display(&st)), "eps1 - eps2");
    }
}
