//! Multiplicative characteristic classes as evaluators on weight multisets.
//!
//! A multiplicative class is determined by a single-variable kernel `f`; its
//! value on a bundle with Chern roots `x_1..x_r` is `f(x_1)...f(x_r)`.  The
//! algebraic kernels (`1`, `x`, `s + x`) evaluate symbolically to rational
//! functions; the transcendental ones (circle-compactified `A-hat`, the
//! chi_y genus, the elliptic genus) only ever evaluate numerically at a
//! sampled point — expanding `sinh` or infinite products symbolically is a
//! dead end, and every statement we need about those theories is a limit
//! checked at high precision.

use crate::algebra::poly::SparsePoly;
use crate::algebra::ratfunc::RatFunc;
use crate::algebra::symbols::{LinearForm, Sym, SymbolTable};
use crate::characters::WeightMultiset;
use crate::hp::q_to_float;
use crate::Q;
use num::{Signed, Zero};
use rug::ops::Pow;
use rug::Float;
use std::fmt::Write as _;

#[derive(Debug, thiserror::Error)]
pub enum ClassError {
    #[error("class {0} has a transcendental kernel and cannot be evaluated symbolically")]
    ExactUnsupported(String),
    #[error("numeric point assigns {got} symbols, weights use {expected}")]
    MissingAssignment { got: usize, expected: usize },
    #[error("numeric evaluation hit a pole of the class kernel")]
    Pole,
    #[error("invalid class parameter: {0}")]
    InvalidParameter(String),
    #[error("cannot parse class spec {0:?}")]
    ParseError(String),
}

/// Argument of the linear kernel `f(x) = shift + x`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Shift {
    Symbol(Sym),
    Constant(Q),
}

/// A multiplicative class, identified by its kernel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MultClassSpec {
    /// `f(x) = 1`.
    One,
    /// `f(x) = x` (Euler class).
    Euler,
    /// `f(x) = shift + x` (matter classes; the shift is a mass).
    LinearShift(Shift),
    /// `f(x) = (bx/2) / sinh(bx/2)` for circumference `b > 0`.
    AhatBeta(Q),
    /// `f(x) = x (1 - y e^{-x}) / (1 - e^{-x})`; `y = 0` is Todd, `y = 1`
    /// is Euler.
    ChiY(Q),
    /// Elliptic-genus kernel, truncated at order `n_q` in `q`:
    /// `y^{-1/2} x prod_{n>=1} (1 - y q^{n-1} e^{-x})(1 - y^{-1} q^n e^x)
    ///  / ((1 - q^{n-1} e^{-x})(1 - q^n e^x))`.
    EllipticYQ { y: Q, q: Q, n_q: u32 },
}

impl MultClassSpec {
    /// Whether the kernel is algebraic, i.e. evaluates to a rational
    /// function of the weights.
    pub fn exact_capable(&self) -> bool {
        matches!(
            self,
            MultClassSpec::One | MultClassSpec::Euler | MultClassSpec::LinearShift(_)
        )
    }

    /// Manifest form, e.g. `one`, `euler`, `shift:m1`, `shift:-3/4`,
    /// `ahat:1/1000`, `chiy:1`, `elliptic:y=1/2,q=1/100,nq=8`.
    pub fn manifest(&self, table: &SymbolTable) -> String {
        match self {
            MultClassSpec::One => "one".into(),
            MultClassSpec::Euler => "euler".into(),
            MultClassSpec::LinearShift(Shift::Symbol(s)) => format!("shift:{}", table.name(*s)),
            MultClassSpec::LinearShift(Shift::Constant(c)) => format!("shift:{c}"),
            MultClassSpec::AhatBeta(b) => format!("ahat:{b}"),
            MultClassSpec::ChiY(y) => format!("chiy:{y}"),
            MultClassSpec::EllipticYQ { y, q, n_q } => {
                let mut s = String::from("elliptic:y=");
                let _ = write!(s, "{y},q={q},nq={n_q}");
                s
            }
        }
    }

    /// Inverse of [`MultClassSpec::manifest`].
    pub fn parse(text: &str, table: &SymbolTable) -> Result<Self, ClassError> {
        let bad = || ClassError::ParseError(text.to_string());
        match text {
            "one" => return Ok(MultClassSpec::One),
            "euler" => return Ok(MultClassSpec::Euler),
            _ => {}
        }
        let (head, rest) = text.split_once(':').ok_or_else(bad)?;
        let parse_q = |s: &str| s.parse::<Q>().map_err(|_| bad());
        match head {
            "shift" => {
                if let Some(sym) = symbol_by_name(table, rest) {
                    Ok(MultClassSpec::LinearShift(Shift::Symbol(sym)))
                } else {
                    Ok(MultClassSpec::LinearShift(Shift::Constant(parse_q(rest)?)))
                }
            }
            "ahat" => {
                let b = parse_q(rest)?;
                if !b.is_positive() {
                    return Err(ClassError::InvalidParameter(format!(
                        "circumference must be positive, got {b}"
                    )));
                }
                Ok(MultClassSpec::AhatBeta(b))
            }
            "chiy" => Ok(MultClassSpec::ChiY(parse_q(rest)?)),
            "elliptic" => {
                let mut y = None;
                let mut q = None;
                let mut n_q = 8u32;
                for piece in rest.split(',') {
                    let (k, v) = piece.split_once('=').ok_or_else(bad)?;
                    match k {
                        "y" => y = Some(parse_q(v)?),
                        "q" => q = Some(parse_q(v)?),
                        "nq" => n_q = v.parse().map_err(|_| bad())?,
                        _ => return Err(bad()),
                    }
                }
                let spec = MultClassSpec::EllipticYQ {
                    y: y.ok_or_else(bad)?,
                    q: q.ok_or_else(bad)?,
                    n_q,
                };
                spec.validate()?;
                Ok(spec)
            }
            _ => Err(bad()),
        }
    }

    fn validate(&self) -> Result<(), ClassError> {
        match self {
            MultClassSpec::AhatBeta(b) if !b.is_positive() => Err(
                ClassError::InvalidParameter(format!("circumference must be positive, got {b}")),
            ),
            MultClassSpec::EllipticYQ { y, q, n_q } => {
                if !y.is_positive() {
                    return Err(ClassError::InvalidParameter(format!(
                        "elliptic parameter y must be positive, got {y}"
                    )));
                }
                if q.abs() >= Q::new(1.into(), 1.into()) {
                    return Err(ClassError::InvalidParameter(format!(
                        "elliptic parameter q must satisfy |q| < 1, got {q}"
                    )));
                }
                if *n_q == 0 {
                    return Err(ClassError::InvalidParameter(
                        "elliptic truncation order must be at least 1".into(),
                    ));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

fn symbol_by_name(table: &SymbolTable, name: &str) -> Option<Sym> {
    (0..table.n_vars()).map(Sym).find(|&s| table.name(s) == name)
}

/// Symbolic evaluation: `prod_w f(w)^{mult(w)}` as a rational function.
/// Only the algebraic kernels support this.
pub fn eval_exact(
    spec: &MultClassSpec,
    weights: &WeightMultiset,
    table: &SymbolTable,
) -> Result<RatFunc, ClassError> {
    spec.validate()?;
    let n = table.n_vars();
    match spec {
        MultClassSpec::One => Ok(RatFunc::one(n)),
        MultClassSpec::Euler => {
            let mut acc = RatFunc::one(n);
            for e in &weights.entries {
                let f = RatFunc::from_linear(&e.form);
                for _ in 0..e.mult {
                    acc = acc.mul(&f);
                }
            }
            Ok(acc)
        }
        MultClassSpec::LinearShift(shift) => {
            let shift_poly = match shift {
                Shift::Symbol(s) => SparsePoly::var(n, *s),
                Shift::Constant(c) => SparsePoly::constant(n, c.clone()),
            };
            let mut acc = RatFunc::one(n);
            for e in &weights.entries {
                let f = RatFunc::from_poly(
                    shift_poly.add(&SparsePoly::from_linear(&e.form)),
                );
                for _ in 0..e.mult {
                    acc = acc.mul(&f);
                }
            }
            Ok(acc)
        }
        other => Err(ClassError::ExactUnsupported(other.manifest(table))),
    }
}

/// Value of one weight form at a numeric point.
fn form_value(form: &LinearForm, point: &[Float], prec: u32) -> Result<Float, ClassError> {
    if form.n_vars() != point.len() {
        return Err(ClassError::MissingAssignment {
            got: point.len(),
            expected: form.n_vars(),
        });
    }
    let mut acc = Float::with_val(prec, 0);
    for (c, p) in form.coeffs.iter().zip(point) {
        if !c.is_zero() {
            acc += q_to_float(c, prec) * p;
        }
    }
    Ok(acc)
}

/// Numeric evaluation of `prod_w f(w)^{mult(w)}` at a point assignment
/// (one value per symbol slot), at `prec` bits.
pub fn eval_numeric(
    spec: &MultClassSpec,
    weights: &WeightMultiset,
    point: &[Float],
    prec: u32,
) -> Result<Float, ClassError> {
    spec.validate()?;
    let mut acc = Float::with_val(prec, 1);
    for e in &weights.entries {
        let x = form_value(&e.form, point, prec)?;
        let f = kernel_value(spec, &x, point, prec)?;
        acc *= f.pow(e.mult);
    }
    Ok(acc)
}

fn kernel_value(
    spec: &MultClassSpec,
    x: &Float,
    point: &[Float],
    prec: u32,
) -> Result<Float, ClassError> {
    // a denominator this small at working precision is a pole, not roundoff:
    // legitimate kernel denominators at O(1) rational parameters never get
    // anywhere near 2^{-prec/2}
    let tiny = Float::with_val(prec, 2).pow(-(prec as i32) / 2);
    let guard = |v: Float| if v.clone().abs() < tiny { Err(ClassError::Pole) } else { Ok(v) };
    match spec {
        MultClassSpec::One => Ok(Float::with_val(prec, 1)),
        MultClassSpec::Euler => Ok(x.clone()),
        MultClassSpec::LinearShift(shift) => {
            let s = match shift {
                Shift::Symbol(sym) => {
                    if sym.index() >= point.len() {
                        return Err(ClassError::MissingAssignment {
                            got: point.len(),
                            expected: sym.index() + 1,
                        });
                    }
                    point[sym.index()].clone()
                }
                Shift::Constant(c) => q_to_float(c, prec),
            };
            Ok(s + x)
        }
        MultClassSpec::AhatBeta(b) => {
            if x.is_zero() {
                return Ok(Float::with_val(prec, 1));
            }
            let half = Float::with_val(prec, q_to_float(b, prec) * x) / 2u32;
            let s = guard(half.clone().sinh())?;
            Ok(half / s)
        }
        MultClassSpec::ChiY(y) => {
            let yv = q_to_float(y, prec);
            if x.is_zero() {
                return Ok(Float::with_val(prec, 1 - yv));
            }
            let em = Float::with_val(prec, -x.clone()).exp();
            let den = guard(Float::with_val(prec, 1 - &em))?;
            Ok(x.clone() * (Float::with_val(prec, 1) - yv * em) / den)
        }
        MultClassSpec::EllipticYQ { y, q, n_q } => {
            let yv = q_to_float(y, prec);
            let qv = q_to_float(q, prec);
            let y_root = Float::with_val(prec, yv.clone()).sqrt().recip();
            let y_inv = Float::with_val(prec, yv.clone()).recip();
            if x.is_zero() {
                // only the n=1 pair x (1 - y e^{-x})/(1 - e^{-x}) is
                // singular; its limit at 0 is (1 - y)
                let mut acc = y_root * Float::with_val(prec, 1 - &yv);
                for n in 2..=*n_q {
                    let qn1 = Float::with_val(prec, qv.clone()).pow(n - 1);
                    let qn = Float::with_val(prec, qv.clone()).pow(n);
                    let num = Float::with_val(prec, 1 - Float::with_val(prec, &yv * &qn1))
                        * Float::with_val(prec, 1 - Float::with_val(prec, &y_inv * &qn));
                    let den = guard(
                        Float::with_val(prec, 1 - &qn1) * Float::with_val(prec, 1 - &qn),
                    )?;
                    acc *= num / den;
                }
                return Ok(acc);
            }
            let ex = Float::with_val(prec, x.clone()).exp();
            let emx = Float::with_val(prec, -x.clone()).exp();
            let mut acc = y_root * x.clone();
            for n in 1..=*n_q {
                let qn1 = Float::with_val(prec, qv.clone()).pow(n - 1);
                let qn = Float::with_val(prec, qv.clone()).pow(n);
                let num = Float::with_val(prec, 1 - Float::with_val(prec, &yv * &qn1) * &emx)
                    * Float::with_val(prec, 1 - Float::with_val(prec, &y_inv * &qn) * &ex);
                let den = guard(
                    Float::with_val(prec, 1 - qn1 * &emx)
                        * Float::with_val(prec, 1 - qn * &ex),
                )?;
                acc *= num / den;
            }
            Ok(acc)
        }
    }
}

/// First-order relative truncation bound for the elliptic product cut at
/// `n_q`: each omitted factor is `1 + O(q^n)`, so the log of the tail is
/// bounded by a geometric series starting at `q^{n_q}`.
pub fn elliptic_tail_bound(
    y: &Q,
    q: &Q,
    n_q: u32,
    weight_values: &[Float],
    prec: u32,
) -> Float {
    let yv = q_to_float(y, prec);
    let qv = q_to_float(q, prec).abs();
    let one = Float::with_val(prec, 1);
    let geom = Float::with_val(prec, qv.clone()).pow(n_q)
        / Float::with_val(prec, &one - &qv);
    let mut acc = Float::with_val(prec, 0);
    for x in weight_values {
        let grow = Float::with_val(prec, x.clone()).abs().exp();
        let coeff = Float::with_val(prec, &yv + &one)
            + (Float::with_val(prec, yv.clone()).recip() + &one) * qv.clone();
        acc += coeff * &grow * geom.clone();
    }
    acc
}

/// Evaluation of the circle-compactified class at small circumference for
/// degeneration tests: returns the value at the given `b` (the check target
/// is `b = 1/1000`), which must approach the trivial class as `b -> 0`.
pub fn ahat_limit_check(
    b: &Q,
    weights: &WeightMultiset,
    point: &[Float],
    prec: u32,
) -> Result<Float, ClassError> {
    eval_numeric(&MultClassSpec::AhatBeta(b.clone()), weights, point, prec)
}
