//! Instanton sums over a toric chain: the `C^2` vertex series, divisor
//! l-factors, the master-formula assembly, the Q-graded generating function,
//! `F^inst = -u(u - kw) log Z`, and the direction-based `eps -> 0` checker
//! for the instanton part of the prepotential statement.
//!
//! The exact pipeline keeps every series coefficient a rational function of
//! `(eps1, eps2, a_1..a_r, masses)`; limits are Laurent valuations along
//! integer directions and identities are decided by exact subtraction.
//! Theories with transcendental kernels (5d, chi_y, elliptic) run the same
//! assembly with high-precision float coefficients at sampled rational
//! points.
//!
//! Conventions: a fixed-point term of the `C^2` series sits at
//! `Lambda^{2 r |Y|}`; a divisor tuple contributes `Lambda^{|D|^2}` with
//! `|D|^2 = -1/2 sum_{alpha != beta} (D_alpha - D_beta)^2 >= 0`.  The
//! master series for `d != 0` therefore starts at a positive exponent; the
//! log is taken after factoring the leading term out (see
//! [`normalize_leading`]), and the exponents of the logarithm are genuine
//! Lambda powers directly comparable with the `C^2` side.

use crate::algebra::direction::{laurent_at_zero, substitute_direction, DIRECTIONS};
use crate::algebra::poly::SparsePoly;
use crate::algebra::ratfunc::RatFunc;
use crate::algebra::series::{HpCoeff, LambdaSeries, SeriesCoeff};
use crate::algebra::symbols::{LinearForm, SymbolTable};
use crate::algebra::AlgebraError;
use crate::characters::{h1_weights, lift_eps_form, CharacterError, WeightMultiset, WeightOrigin};
use crate::classes::{eval_exact, eval_numeric, ClassError, MultClassSpec, Shift};
use crate::geometry::{DivisorTuple, DivisorVector, GeometryError, ToricChain};
use crate::hp::q_to_float;
use crate::partitions::{enumerate_tuples, ns_weights, nst_weights, PartitionTuple};
use crate::{q, qi, Q};
use num::{Signed, Zero};
use rayon::prelude::*;
use rug::ops::Pow;
use rug::Float;
use std::collections::HashMap;

#[derive(Debug, thiserror::Error)]
pub enum PartitionFnError {
    #[error("theory {0:?} has no exact mode; use the numeric pipeline")]
    ExactUnsupported(String),
    #[error("unrecognized theory spec {0:?}")]
    BadTheory(String),
    #[error("series has no nonzero term to normalize against")]
    ZeroSeries,
    #[error("fewer than two usable limit directions (all candidates resonant)")]
    NoUsableDirection,
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Character(#[from] CharacterError),
    #[error(transparent)]
    Class(#[from] ClassError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Which pair of multiplicative classes the integrand carries.
///
/// The A class acts on the tangent-type weight multisets (one per ordered
/// color pair), the B class on the natural-bundle multisets (one per
/// color); the Euler class of the tangent data always divides.  `Pure` is
/// `(1, 1)`; fundamental matter multiplies mass shifts into B; adjoint
/// matter shifts A; the 5d, chi_y and elliptic kernels are transcendental
/// deformations of A.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TheorySpec {
    Pure,
    Fundamental { n_f: usize },
    Adjoint,
    FiveD { beta: Q },
    ChiY { y: Q },
    Elliptic { y: Q, q: Q, n_q: u32 },
}

impl TheorySpec {
    /// Symbol table for this theory at gauge rank `r`.
    pub fn table(&self, r: usize) -> SymbolTable {
        match self {
            TheorySpec::Fundamental { n_f } => SymbolTable::new(r, *n_f, false),
            TheorySpec::Adjoint => SymbolTable::new(r, 0, true),
            _ => SymbolTable::new(r, 0, false),
        }
    }

    /// The A-class kernel, if any (`None` means A = 1).
    pub fn a_class(&self, table: &SymbolTable) -> Option<MultClassSpec> {
        match self {
            TheorySpec::Pure | TheorySpec::Fundamental { .. } => None,
            TheorySpec::Adjoint => Some(MultClassSpec::LinearShift(Shift::Symbol(
                table.adjoint_mass().expect("adjoint table carries a mass"),
            ))),
            TheorySpec::FiveD { beta } => Some(MultClassSpec::AhatBeta(beta.clone())),
            TheorySpec::ChiY { y } => Some(MultClassSpec::ChiY(y.clone())),
            TheorySpec::Elliptic { y, q, n_q } => Some(MultClassSpec::EllipticYQ {
                y: y.clone(),
                q: q.clone(),
                n_q: *n_q,
            }),
        }
    }

    /// The B-class kernels (one linear shift per fundamental mass).
    pub fn b_classes(&self, table: &SymbolTable) -> Vec<MultClassSpec> {
        match self {
            TheorySpec::Fundamental { n_f } => (0..*n_f)
                .map(|f| MultClassSpec::LinearShift(Shift::Symbol(table.mass(f))))
                .collect(),
            _ => vec![],
        }
    }

    /// Whether all kernels are algebraic, so series coefficients stay exact.
    pub fn exact_capable(&self) -> bool {
        matches!(
            self,
            TheorySpec::Pure | TheorySpec::Fundamental { .. } | TheorySpec::Adjoint
        )
    }

    /// Manifest form: `pure`, `fundamental:2`, `adjoint`, `5d:1/1000`,
    /// `chiy:1`, `elliptic:y=1/2,q=1/100,nq=8`.
    pub fn manifest(&self) -> String {
        match self {
            TheorySpec::Pure => "pure".into(),
            TheorySpec::Fundamental { n_f } => format!("fundamental:{n_f}"),
            TheorySpec::Adjoint => "adjoint".into(),
            TheorySpec::FiveD { beta } => format!("5d:{beta}"),
            TheorySpec::ChiY { y } => format!("chiy:{y}"),
            TheorySpec::Elliptic { y, q, n_q } => format!("elliptic:y={y},q={q},nq={n_q}"),
        }
    }

    /// Inverse of [`TheorySpec::manifest`] (elliptic `nq` defaults to 8).
    pub fn parse(text: &str) -> Result<Self, PartitionFnError> {
        let bad = || PartitionFnError::BadTheory(text.to_string());
        match text {
            "pure" => return Ok(TheorySpec::Pure),
            "adjoint" => return Ok(TheorySpec::Adjoint),
            _ => {}
        }
        let (head, rest) = text.split_once(':').ok_or_else(bad)?;
        let parse_q = |s: &str| s.parse::<Q>().map_err(|_| bad());
        match head {
            "fundamental" => Ok(TheorySpec::Fundamental {
                n_f: rest.parse().map_err(|_| bad())?,
            }),
            "5d" => {
                let beta = parse_q(rest)?;
                if !beta.is_positive() {
                    return Err(bad());
                }
                Ok(TheorySpec::FiveD { beta })
            }
            "chiy" => Ok(TheorySpec::ChiY { y: parse_q(rest)? }),
            "elliptic" => {
                let (mut y, mut qq, mut n_q) = (None, None, 8u32);
                for part in rest.split(',') {
                    let (k, v) = part.split_once('=').ok_or_else(bad)?;
                    match k {
                        "y" => y = Some(parse_q(v)?),
                        "q" => qq = Some(parse_q(v)?),
                        "nq" => n_q = v.parse().map_err(|_| bad())?,
                        _ => return Err(bad()),
                    }
                }
                Ok(TheorySpec::Elliptic {
                    y: y.ok_or_else(bad)?,
                    q: qq.ok_or_else(bad)?,
                    n_q,
                })
            }
            _ => Err(bad()),
        }
    }
}

/// `a_alpha` as a linear form, for each color.
pub fn plain_a_forms(table: &SymbolTable) -> Vec<LinearForm> {
    (0..table.rank())
        .map(|al| table.form_i(&[(table.a(al), 1)]))
        .collect()
}

/// Which factor of a fixed-point weight to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MFactorKind {
    /// Tangent-type box multiset for an ordered color pair (fed to A).
    Pair { alpha: usize, beta: usize },
    /// Natural-bundle box multiset for one color (fed to B).
    Beta { beta: usize },
    /// Same multiset as `Pair`, always evaluated with the Euler kernel.
    EulerPair { alpha: usize, beta: usize },
}

/// The weight multiset behind one m-factor: arm/leg box weights in
/// `(w1, w2)` shifted by differences (or values) of the effective Coulomb
/// forms.  `a_forms[alpha]` is `a_alpha` plus any divisor weight shift.
pub fn m_factor_multiset(
    w1: &LinearForm,
    w2: &LinearForm,
    a_forms: &[LinearForm],
    yv: &PartitionTuple,
    kind: MFactorKind,
) -> WeightMultiset {
    let mut out = WeightMultiset::new();
    match kind {
        MFactorKind::Pair { alpha, beta } | MFactorKind::EulerPair { alpha, beta } => {
            let shift = a_forms[beta].sub(&a_forms[alpha]);
            for w in nst_weights(&yv.parts[alpha], &yv.parts[beta], w1, w2) {
                out.push(shift.add(&w), 1, WeightOrigin::Vertex(0));
            }
        }
        MFactorKind::Beta { beta } => {
            for w in ns_weights(&yv.parts[beta], w1, w2) {
                out.push(a_forms[beta].add(&w), 1, WeightOrigin::Vertex(0));
            }
        }
    }
    out
}

/// One m-factor as an exact rational function.  `class` is ignored for
/// [`MFactorKind::EulerPair`], which always uses the Euler kernel.
pub fn m_factor(
    table: &SymbolTable,
    w1: &LinearForm,
    w2: &LinearForm,
    a_forms: &[LinearForm],
    yv: &PartitionTuple,
    class: &MultClassSpec,
    kind: MFactorKind,
) -> Result<RatFunc, PartitionFnError> {
    let ms = m_factor_multiset(w1, w2, a_forms, yv, kind);
    let spec = match kind {
        MFactorKind::EulerPair { .. } => &MultClassSpec::Euler,
        _ => class,
    };
    Ok(eval_exact(spec, &ms, table)?)
}

/// Numeric m-factor at a point (one float per table symbol).
pub fn m_factor_numeric(
    w1: &LinearForm,
    w2: &LinearForm,
    a_forms: &[LinearForm],
    yv: &PartitionTuple,
    class: &MultClassSpec,
    kind: MFactorKind,
    point: &[Float],
    prec: u32,
) -> Result<Float, PartitionFnError> {
    let ms = m_factor_multiset(w1, w2, a_forms, yv, kind);
    let spec = match kind {
        MFactorKind::EulerPair { .. } => &MultClassSpec::Euler,
        _ => class,
    };
    Ok(eval_numeric(spec, &ms, point, prec)?)
}

/// Full weight of one partition tuple: A over Euler for every ordered color
/// pair, times B per color.  The Euler denominator is kept as individual
/// linear factors so downstream Laurent expansions see small t-free parts.
fn config_weight_exact(
    table: &SymbolTable,
    w1: &LinearForm,
    w2: &LinearForm,
    a_forms: &[LinearForm],
    a_class: Option<&MultClassSpec>,
    b_classes: &[MultClassSpec],
    yv: &PartitionTuple,
) -> Result<RatFunc, PartitionFnError> {
    let r = a_forms.len();
    let mut acc = RatFunc::one(table.n_vars());
    for alpha in 0..r {
        for beta in 0..r {
            let ms = m_factor_multiset(w1, w2, a_forms, yv, MFactorKind::Pair { alpha, beta });
            if let Some(a) = a_class {
                acc = acc.mul(&eval_exact(a, &ms, table)?);
            }
            for form in ms.forms_expanded() {
                acc = acc.div(&RatFunc::from_linear(&form))?;
            }
        }
    }
    if !b_classes.is_empty() {
        for beta in 0..r {
            let ms = m_factor_multiset(w1, w2, a_forms, yv, MFactorKind::Beta { beta });
            for b in b_classes {
                acc = acc.mul(&eval_exact(b, &ms, table)?);
            }
        }
    }
    Ok(acc)
}

fn form_value_at(form: &LinearForm, point: &[Float], prec: u32) -> Float {
    let mut acc = Float::with_val(prec, 0);
    for (i, c) in form.coeffs.iter().enumerate() {
        if !c.is_zero() {
            acc += q_to_float(c, prec) * &point[i];
        }
    }
    acc
}

fn config_weight_numeric(
    w1: &LinearForm,
    w2: &LinearForm,
    a_forms: &[LinearForm],
    a_class: Option<&MultClassSpec>,
    b_classes: &[MultClassSpec],
    yv: &PartitionTuple,
    point: &[Float],
    prec: u32,
) -> Result<Float, PartitionFnError> {
    let r = a_forms.len();
    let tiny = Float::with_val(prec, 2).pow(-(prec as i32) / 2);
    let mut acc = Float::with_val(prec, 1);
    for alpha in 0..r {
        for beta in 0..r {
            let ms = m_factor_multiset(w1, w2, a_forms, yv, MFactorKind::Pair { alpha, beta });
            if let Some(a) = a_class {
                acc *= eval_numeric(a, &ms, point, prec)?;
            }
            for form in ms.forms_expanded() {
                let v = form_value_at(&form, point, prec);
                if v.clone().abs() < tiny {
                    return Err(ClassError::Pole.into());
                }
                acc /= v;
            }
        }
    }
    if !b_classes.is_empty() {
        for beta in 0..r {
            let ms = m_factor_multiset(w1, w2, a_forms, yv, MFactorKind::Beta { beta });
            for b in b_classes {
                acc *= eval_numeric(b, &ms, point, prec)?;
            }
        }
    }
    Ok(acc)
}

/// The `C^2` instanton series in tangent weights `(w1, w2)` with effective
/// Coulomb forms `a_forms`, truncated at `order`.  Terms sit at
/// `Lambda^{2 r n}` where `n` is the total box count; the constant term is
/// an exact 1.
pub fn z_c2_at(
    table: &SymbolTable,
    w1: &LinearForm,
    w2: &LinearForm,
    a_forms: &[LinearForm],
    theory: &TheorySpec,
    order: u32,
) -> Result<LambdaSeries<RatFunc>, PartitionFnError> {
    if !theory.exact_capable() {
        return Err(PartitionFnError::ExactUnsupported(theory.manifest()));
    }
    let r = a_forms.len();
    assert_eq!(r, table.rank(), "one Coulomb form per color");
    let a_class = theory.a_class(table);
    let b_classes = theory.b_classes(table);
    let two_r = 2 * r as u32;
    let mut out = LambdaSeries::new(order, 0).with_one(RatFunc::one(table.n_vars()));
    for n in 1..=order / two_r {
        let tuples = enumerate_tuples(r, n);
        let weights = tuples
            .par_iter()
            .map(|yv| {
                config_weight_exact(table, w1, w2, a_forms, a_class.as_ref(), &b_classes, yv)
            })
            .collect::<Result<Vec<_>, _>>()?;
        let mut sum = RatFunc::zero(table.n_vars());
        for w in &weights {
            sum = sum.add(w);
        }
        out.add_term(two_r * n, vec![], sum);
    }
    Ok(out)
}

/// Standard `C^2`: tangent weights `(eps1, eps2)` and plain Coulomb forms.
pub fn z_c2(
    table: &SymbolTable,
    theory: &TheorySpec,
    order: u32,
) -> Result<LambdaSeries<RatFunc>, PartitionFnError> {
    z_c2_at(
        table,
        &table.eps_form(1, 0),
        &table.eps_form(0, 1),
        &plain_a_forms(table),
        theory,
        order,
    )
}

/// Numeric twin of [`z_c2_at`]: coefficients are floats at `point`.
pub fn z_c2_at_numeric(
    table: &SymbolTable,
    w1: &LinearForm,
    w2: &LinearForm,
    a_forms: &[LinearForm],
    theory: &TheorySpec,
    order: u32,
    point: &[Float],
    prec: u32,
) -> Result<LambdaSeries<HpCoeff>, PartitionFnError> {
    let r = a_forms.len();
    assert_eq!(r, table.rank(), "one Coulomb form per color");
    let a_class = theory.a_class(table);
    let b_classes = theory.b_classes(table);
    let two_r = 2 * r as u32;
    let mut out = LambdaSeries::new(order, 0).with_one(HpCoeff(Float::with_val(prec, 1)));
    for n in 1..=order / two_r {
        let mut sum = Float::with_val(prec, 0);
        for yv in enumerate_tuples(r, n) {
            sum += config_weight_numeric(
                w1,
                w2,
                a_forms,
                a_class.as_ref(),
                &b_classes,
                &yv,
                point,
                prec,
            )?;
        }
        out.add_term(two_r * n, vec![], HpCoeff(sum));
    }
    Ok(out)
}

/// Numeric twin of [`z_c2`].
pub fn z_c2_numeric(
    table: &SymbolTable,
    theory: &TheorySpec,
    order: u32,
    point: &[Float],
    prec: u32,
) -> Result<LambdaSeries<HpCoeff>, PartitionFnError> {
    z_c2_at_numeric(
        table,
        &table.eps_form(1, 0),
        &table.eps_form(0, 1),
        &plain_a_forms(table),
        theory,
        order,
        point,
        prec,
    )
}

/// `H^1` weight multisets keyed by divisor coordinates.  Built sequentially
/// up front, then shared read-only across parallel workers.
type H1Cache = HashMap<Vec<i64>, WeightMultiset>;

fn cache_h1(
    cache: &mut H1Cache,
    chain: &ToricChain,
    d: &DivisorVector,
) -> Result<(), PartitionFnError> {
    if !cache.contains_key(&d.0) {
        cache.insert(d.0.clone(), h1_weights(chain, d)?);
    }
    Ok(())
}

fn build_h1_cache(
    chain: &ToricChain,
    tuples: &[DivisorTuple],
    need_beta: bool,
) -> Result<H1Cache, PartitionFnError> {
    let mut cache = H1Cache::new();
    for t in tuples {
        let r = t.parts.len();
        for alpha in 0..r {
            for beta in 0..r {
                if alpha != beta {
                    cache_h1(&mut cache, chain, &t.parts[beta].sub(&t.parts[alpha]))?;
                }
            }
            if need_beta {
                cache_h1(&mut cache, chain, &t.parts[alpha])?;
            }
        }
    }
    Ok(cache)
}

/// Shift a cached eps-only multiset into the theory table.
fn shifted_multiset(
    ms: &WeightMultiset,
    shift: &LinearForm,
    table: &SymbolTable,
) -> WeightMultiset {
    let mut out = WeightMultiset::new();
    for e in &ms.entries {
        out.push(shift.add(&lift_eps_form(&e.form, table)), e.mult, e.origin);
    }
    out
}

fn l_factors_with(
    dt: &DivisorTuple,
    theory: &TheorySpec,
    table: &SymbolTable,
    cache: &H1Cache,
) -> Result<RatFunc, PartitionFnError> {
    let r = table.rank();
    assert_eq!(dt.parts.len(), r, "one divisor per color");
    let a_class = theory.a_class(table);
    let b_classes = theory.b_classes(table);
    let mut acc = RatFunc::one(table.n_vars());
    for alpha in 0..r {
        for beta in 0..r {
            if alpha == beta {
                continue;
            }
            let key = dt.parts[beta].sub(&dt.parts[alpha]);
            let ms = cache.get(&key.0).expect("cache covers every pair difference");
            let shift = table.form_i(&[(table.a(beta), 1), (table.a(alpha), -1)]);
            let shifted = shifted_multiset(ms, &shift, table);
            if let Some(a) = &a_class {
                acc = acc.mul(&eval_exact(a, &shifted, table)?);
            }
            for form in shifted.forms_expanded() {
                acc = acc.div(&RatFunc::from_linear(&form))?;
            }
        }
    }
    if !b_classes.is_empty() {
        for beta in 0..r {
            let ms = cache.get(&dt.parts[beta].0).expect("cache covers every part");
            let shift = table.form_i(&[(table.a(beta), 1)]);
            let shifted = shifted_multiset(ms, &shift, table);
            for b in &b_classes {
                acc = acc.mul(&eval_exact(b, &shifted, table)?);
            }
        }
    }
    Ok(acc)
}

/// The divisor-tuple prefactor of the master formula: per ordered color
/// pair, A over Euler on the `H^1` weights of `D_beta - D_alpha` shifted by
/// `a_beta - a_alpha`; then the B classes on the `H^1` weights of each
/// `D_beta` shifted by `a_beta`.  An exact 1 when all `D_alpha` coincide.
pub fn l_factors(
    chain: &ToricChain,
    dt: &DivisorTuple,
    theory: &TheorySpec,
    table: &SymbolTable,
) -> Result<RatFunc, PartitionFnError> {
    let need_beta = !theory.b_classes(table).is_empty();
    let cache = build_h1_cache(chain, std::slice::from_ref(dt), need_beta)?;
    l_factors_with(dt, theory, table, &cache)
}

fn l_factors_numeric_with(
    dt: &DivisorTuple,
    theory: &TheorySpec,
    table: &SymbolTable,
    cache: &H1Cache,
    point: &[Float],
    prec: u32,
) -> Result<Float, PartitionFnError> {
    let r = table.rank();
    assert_eq!(dt.parts.len(), r, "one divisor per color");
    let a_class = theory.a_class(table);
    let b_classes = theory.b_classes(table);
    let tiny = Float::with_val(prec, 2).pow(-(prec as i32) / 2);
    let mut acc = Float::with_val(prec, 1);
    for alpha in 0..r {
        for beta in 0..r {
            if alpha == beta {
                continue;
            }
            let key = dt.parts[beta].sub(&dt.parts[alpha]);
            let ms = cache.get(&key.0).expect("cache covers every pair difference");
            let shift = table.form_i(&[(table.a(beta), 1), (table.a(alpha), -1)]);
            let shifted = shifted_multiset(ms, &shift, table);
            if let Some(a) = &a_class {
                acc *= eval_numeric(a, &shifted, point, prec)?;
            }
            for form in shifted.forms_expanded() {
                let v = form_value_at(&form, point, prec);
                if v.clone().abs() < tiny {
                    return Err(ClassError::Pole.into());
                }
                acc /= v;
            }
        }
    }
    if !b_classes.is_empty() {
        for beta in 0..r {
            let ms = cache.get(&dt.parts[beta].0).expect("cache covers every part");
            let shift = table.form_i(&[(table.a(beta), 1)]);
            let shifted = shifted_multiset(ms, &shift, table);
            for b in &b_classes {
                acc *= eval_numeric(b, &shifted, point, prec)?;
            }
        }
    }
    Ok(acc)
}

/// Effective Coulomb forms at chain vertex `v` for a divisor tuple:
/// `a_alpha` plus the weight of `O(D_alpha)` there.
fn vertex_a_forms(
    chain: &ToricChain,
    dt: &DivisorTuple,
    v: usize,
    table: &SymbolTable,
) -> Vec<LinearForm> {
    (0..dt.parts.len())
        .map(|al| {
            table
                .form_i(&[(table.a(al), 1)])
                .add(&chain.divisor_weight_at(&dt.parts[al], v).form(table))
        })
        .collect()
}

/// The master formula for a fixed total divisor class `d`: the sum over
/// tuples with `sum D_alpha = d` and `|D|^2 <= order` of `Lambda^{|D|^2}`
/// times the l-factors times the product over chain vertices of the `C^2`
/// series at that vertex's tangent weights with shifted Coulomb forms.
pub fn z_master(
    chain: &ToricChain,
    d: &DivisorVector,
    theory: &TheorySpec,
    table: &SymbolTable,
    order: u32,
) -> Result<LambdaSeries<RatFunc>, PartitionFnError> {
    if !theory.exact_capable() {
        return Err(PartitionFnError::ExactUnsupported(theory.manifest()));
    }
    let r = table.rank();
    let tuples = chain.enumerate_divisor_tuples(r, d, order as i64)?;
    let cache = build_h1_cache(chain, &tuples, !theory.b_classes(table).is_empty())?;
    let pieces = tuples
        .par_iter()
        .map(|dt| -> Result<(u32, RatFunc, LambdaSeries<RatFunc>), PartitionFnError> {
            let dsq = u32::try_from(chain.dsq_norm(dt)).expect("|D|^2 is nonnegative");
            let sub_order = order - dsq;
            let l = l_factors_with(dt, theory, table, &cache)?;
            let mut prod =
                LambdaSeries::new(sub_order, 0).with_one(RatFunc::one(table.n_vars()));
            for (v, vert) in chain.vertices().iter().enumerate() {
                let w1 = vert.w1.form(table);
                let w2 = vert.w2.form(table);
                let a_forms = vertex_a_forms(chain, dt, v, table);
                prod = prod.mul(&z_c2_at(table, &w1, &w2, &a_forms, theory, sub_order)?);
            }
            Ok((dsq, l, prod))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut out = LambdaSeries::new(order, 0);
    for (dsq, l, prod) in pieces {
        for (key, c) in prod.iter() {
            out.add_term(key.0 + dsq, vec![], c.mul(&l));
        }
    }
    Ok(out)
}

/// Numeric twin of [`z_master`].
pub fn z_master_numeric(
    chain: &ToricChain,
    d: &DivisorVector,
    theory: &TheorySpec,
    table: &SymbolTable,
    order: u32,
    point: &[Float],
    prec: u32,
) -> Result<LambdaSeries<HpCoeff>, PartitionFnError> {
    let r = table.rank();
    let tuples = chain.enumerate_divisor_tuples(r, d, order as i64)?;
    let cache = build_h1_cache(chain, &tuples, !theory.b_classes(table).is_empty())?;
    let mut out = LambdaSeries::new(order, 0);
    for dt in &tuples {
        let dsq = u32::try_from(chain.dsq_norm(dt)).expect("|D|^2 is nonnegative");
        let sub_order = order - dsq;
        let l = l_factors_numeric_with(dt, theory, table, &cache, point, prec)?;
        let mut prod = LambdaSeries::new(sub_order, 0).with_one(HpCoeff(Float::with_val(prec, 1)));
        for (v, vert) in chain.vertices().iter().enumerate() {
            let w1 = vert.w1.form(table);
            let w2 = vert.w2.form(table);
            let a_forms = vertex_a_forms(chain, dt, v, table);
            prod = prod.mul(&z_c2_at_numeric(
                table, &w1, &w2, &a_forms, theory, sub_order, point, prec,
            )?);
        }
        let lc = HpCoeff(l);
        for (key, c) in prod.iter() {
            out.add_term(key.0 + dsq, vec![], c.mul(&lc));
        }
    }
    Ok(out)
}

/// Q-graded generating function: every divisor whose edge degrees lie in
/// `[-dbound, dbound]` contributes its master series at multidegree
/// `(int_{l_e} d)_e`.
pub fn z_generating(
    chain: &ToricChain,
    theory: &TheorySpec,
    table: &SymbolTable,
    order: u32,
    dbound: i64,
) -> Result<LambdaSeries<RatFunc>, PartitionFnError> {
    let mut out = LambdaSeries::new(order, chain.n_edges());
    for d in chain.divisors_with_degree_bound(dbound) {
        let qdeg = chain.edge_degrees(&d);
        let zm = z_master(chain, &d, theory, table, order)?;
        for (key, c) in zm.iter() {
            out.add_term(key.0, qdeg.clone(), c.clone());
        }
    }
    Ok(out)
}

/// `F^inst = -u(u - kw) log z` with `(w, u, k)` read off the chain's
/// infinity line; for the `C^2` chain the prefactor is exactly
/// `-eps1 eps2`.  `z` must have constant term 1 — normalize first when the
/// minimal Lambda exponent is positive (see [`normalize_leading`]).
pub fn f_inst(
    chain: &ToricChain,
    table: &SymbolTable,
    z: &LambdaSeries<RatFunc>,
) -> Result<LambdaSeries<RatFunc>, PartitionFnError> {
    let lg = z.log()?;
    let linf = chain.linf();
    let u = RatFunc::from_linear(&linf.u.form(table));
    let v = RatFunc::from_linear(&linf.v().form(table));
    Ok(lg.scale_coeff(&u.mul(&v).neg()))
}

/// A series rewritten as `Lambda^shift * leading * (1 + ...)`.
#[derive(Debug, Clone)]
pub struct Normalized {
    /// The `(1 + ...)` part; exponents are offsets above `shift`.
    pub series: LambdaSeries<RatFunc>,
    /// Minimal Lambda exponent carrying a nonzero coefficient.
    pub shift: u32,
    /// That leading coefficient.
    pub leading: RatFunc,
}

/// Factor the leading term out so the series logarithm applies.  Exact
/// zeros never reach series storage, so `min_lambda` is the true leading
/// exponent even when low-order contributions cancel.
pub fn normalize_leading(z: &LambdaSeries<RatFunc>) -> Result<Normalized, PartitionFnError> {
    assert_eq!(z.qdims(), 0, "normalization applies at a fixed divisor class");
    let shift = z.min_lambda().ok_or(PartitionFnError::ZeroSeries)?;
    let leading = z.coeff(shift, &[]).expect("min_lambda points at a term").clone();
    let inv = leading.inv()?;
    let n = leading.n_vars();
    let mut series = LambdaSeries::new(z.order() - shift, 0).with_one(RatFunc::one(n));
    for (key, c) in z.iter() {
        if key.0 == shift {
            continue; // becomes the exact unit constant term
        }
        series.add_term(key.0 - shift, vec![], c.mul(&inv));
    }
    Ok(Normalized { series, shift, leading })
}

/// Limit data for one series coefficient.
#[derive(Debug, Clone)]
pub struct CoeffLimit {
    pub lambda_exp: u32,
    pub q_exp: Vec<i64>,
    /// Laurent valuation in `t` along each used direction.
    pub valuations: Vec<i64>,
    /// No negative `t` power along any used direction.
    pub analytic: bool,
    /// The `t^0` coefficient along the first direction.
    pub limit: RatFunc,
    /// Directions disagree on the `t^0` coefficient.
    pub direction_dependent: bool,
}

/// Per-coefficient `eps -> 0` report along two rational directions.
#[derive(Debug, Clone)]
pub struct EpsLimitReport {
    pub directions: Vec<(i64, i64)>,
    pub coeffs: Vec<CoeffLimit>,
    pub analytic: bool,
    pub direction_dependent: bool,
}

impl EpsLimitReport {
    /// Limit of the plain-Lambda coefficient at `lambda_exp` (zero when
    /// absent).
    pub fn limit_at(&self, lambda_exp: u32, n_vars: usize) -> RatFunc {
        self.coeffs
            .iter()
            .find(|c| c.lambda_exp == lambda_exp && c.q_exp.iter().all(|&x| x == 0))
            .map(|c| c.limit.clone())
            .unwrap_or_else(|| RatFunc::zero(n_vars))
    }
}

/// Walk `wanted` then [`DIRECTIONS`], keeping the first two candidates that
/// are resonant for no coefficient of the series.
fn usable_directions(
    series: &LambdaSeries<RatFunc>,
    table: &SymbolTable,
    wanted: &[(i64, i64)],
) -> Result<Vec<(i64, i64)>, PartitionFnError> {
    let mut out: Vec<(i64, i64)> = Vec::new();
    for &dir in wanted.iter().chain(DIRECTIONS.iter()) {
        if out.contains(&dir) {
            continue;
        }
        let ok = series
            .iter()
            .all(|(_, c)| substitute_direction(c, table, dir).is_ok());
        if ok {
            out.push(dir);
            if out.len() == 2 {
                return Ok(out);
            }
        }
    }
    Err(PartitionFnError::NoUsableDirection)
}

/// `eps -> 0` of every coefficient along rational directions.
///
/// Analyticity is "no negative t-power along any tested direction"; the
/// limit is the `t^0` coefficient, compared exactly across directions.  A
/// direction resonant for any coefficient is skipped wholesale and the
/// candidate walk continues into [`DIRECTIONS`].
pub fn eps_limit(
    series: &LambdaSeries<RatFunc>,
    table: &SymbolTable,
    directions: &[(i64, i64)],
) -> Result<EpsLimitReport, PartitionFnError> {
    let dirs = usable_directions(series, table, directions)?;
    let n = table.n_vars();
    let mut coeffs = Vec::new();
    let mut analytic = true;
    let mut direction_dependent = false;
    for (key, c) in series.iter() {
        let mut valuations = Vec::new();
        let mut limits: Vec<RatFunc> = Vec::new();
        let mut coeff_analytic = true;
        for &dir in &dirs {
            let g = substitute_direction(c, table, dir)?;
            let s = laurent_at_zero(&g, table, 0)?;
            valuations.push(s.valuation);
            coeff_analytic &= s.is_analytic();
            limits.push(s.limit(n));
        }
        let dd = limits.windows(2).any(|w| !w[0].sub(&w[1]).is_zero());
        analytic &= coeff_analytic;
        direction_dependent |= dd;
        coeffs.push(CoeffLimit {
            lambda_exp: key.0,
            q_exp: key.1.clone(),
            valuations,
            analytic: coeff_analytic,
            limit: limits[0].clone(),
            direction_dependent: dd,
        });
    }
    Ok(EpsLimitReport { directions: dirs, coeffs, analytic, direction_dependent })
}

/// One compared Lambda offset in the conjecture report.
#[derive(Debug, Clone)]
pub struct ConjectureEntry {
    /// Offset exponent (powers of Lambda above the leading term).
    pub lambda_exp: u32,
    pub x0_analytic: bool,
    pub x0_limit: RatFunc,
    /// `k` times the `C^2` limit at the same exponent.
    pub c2_limit_scaled: RatFunc,
    pub matches: bool,
}

/// Outcome of the instanton-part check on one chain and divisor class.
#[derive(Debug, Clone)]
pub struct ConjectureReport {
    pub surface: String,
    pub theory: String,
    pub rank: usize,
    pub d: Vec<i64>,
    pub order: u32,
    /// Self-intersection of the infinity line.
    pub k: i64,
    /// Display-normalization exponent `(1 - r) d.d` (recorded, not applied;
    /// the series carries the equivalent `|D|^2` grading directly).
    pub lambda_prefactor_exp: i64,
    /// Minimal Lambda exponent of the master series (0 when `d = 0`).
    pub leading_exp: u32,
    /// Laurent valuations of the leading coefficient along the non-resonant
    /// analysis directions (informational).
    pub leading_valuations: Vec<i64>,
    pub directions: Vec<(i64, i64)>,
    pub entries: Vec<ConjectureEntry>,
    /// Every `F^inst` coefficient analytic with direction-independent limit.
    pub x0_analytic: bool,
    /// Every offset limit equals `k` times the `C^2` limit.
    pub limits_match: bool,
    /// The log of `Z_X0 * Z_C2(w, u) * Z_C2(-w, u - kw)`, leading term
    /// factored out, has only nonnegative valuations — no prefactor needed.
    pub aux_analytic: bool,
    pub pass: bool,
}

/// Exact-mode check of the instanton statement: `F^inst_{X0,d}` is analytic
/// at `eps = 0` and its limit is `k` times the `C^2` limit, coefficient by
/// coefficient in Lambda, as identities of rational functions in the
/// Coulomb and mass symbols.
pub fn check_instanton_conjecture(
    chain: &ToricChain,
    d: &DivisorVector,
    theory: &TheorySpec,
    table: &SymbolTable,
    order: u32,
) -> Result<ConjectureReport, PartitionFnError> {
    let r = table.rank();
    let n = table.n_vars();
    let zx = z_master(chain, d, theory, table, order)?;
    let norm = normalize_leading(&zx)?;
    let fx = f_inst(chain, table, &norm.series)?;

    let c2_chain = ToricChain::builtin("C2")?;
    let zc2 = z_c2(table, theory, order - norm.shift)?;
    let fc2 = f_inst(&c2_chain, table, &zc2)?;

    let fx_report = eps_limit(&fx, table, DIRECTIONS)?;
    let fc2_report = eps_limit(&fc2, table, &fx_report.directions)?;

    let k = chain.linf().k;
    let mut exponents = fx.lambda_exponents();
    for e in fc2.lambda_exponents() {
        if !exponents.contains(&e) {
            exponents.push(e);
        }
    }
    exponents.sort_unstable();

    let mut entries = Vec::new();
    let mut x0_analytic = true;
    let mut limits_match = true;
    for m in exponents {
        let x0_ok = fx_report
            .coeffs
            .iter()
            .find(|c| c.lambda_exp == m)
            .map(|c| c.analytic && !c.direction_dependent)
            .unwrap_or(true);
        let x0_limit = fx_report.limit_at(m, n);
        let c2_limit_scaled = fc2_report.limit_at(m, n).scale(&qi(k));
        let matches = x0_ok && x0_limit.sub(&c2_limit_scaled).is_zero();
        x0_analytic &= x0_ok;
        limits_match &= matches;
        entries.push(ConjectureEntry { lambda_exp: m, x0_analytic: x0_ok, x0_limit, c2_limit_scaled, matches });
    }

    let mut leading_valuations = Vec::new();
    for &dir in &fx_report.directions {
        if let Ok(g) = substitute_direction(&norm.leading, table, dir) {
            leading_valuations.push(laurent_at_zero(&g, table, 0)?.valuation);
        }
    }

    // the auxiliary statement: the triple product absorbs every eps pole of
    // log Z_X0 without the -u(u-kw) prefactor
    let linf = chain.linf();
    let a_plain = plain_a_forms(table);
    let z_wu = z_c2_at(table, &linf.w.form(table), &linf.u.form(table), &a_plain, theory, order)?;
    let z_mwv = z_c2_at(
        table,
        &linf.w.form(table).neg(),
        &linf.v().form(table),
        &a_plain,
        theory,
        order,
    )?;
    let triple = zx.mul(&z_wu).mul(&z_mwv);
    let aux_log = normalize_leading(&triple)?.series.log()?;
    let aux_report = eps_limit(&aux_log, table, &fx_report.directions)?;
    let aux_analytic = aux_report.analytic && !aux_report.direction_dependent;

    let pass = x0_analytic && limits_match && aux_analytic;
    Ok(ConjectureReport {
        surface: chain.name().to_string(),
        theory: theory.manifest(),
        rank: r,
        d: d.0.clone(),
        order,
        k,
        lambda_prefactor_exp: (1 - r as i64) * chain.dot(d, d),
        leading_exp: norm.shift,
        leading_valuations,
        directions: fx_report.directions,
        entries,
        x0_analytic,
        limits_match,
        aux_analytic,
        pass,
    })
}

/// One extrapolated Lambda coefficient in the numeric-mode report.
#[derive(Debug, Clone)]
pub struct NumericConjectureEntry {
    pub lambda_exp: u32,
    pub x0_limit: f64,
    pub c2_limit_scaled: f64,
    pub abs_error: f64,
    pub matches: bool,
}

/// Numeric-mode outcome: limits extrapolated to `eps = 0` along one
/// direction at a sampled rational point.
#[derive(Debug, Clone)]
pub struct NumericConjectureReport {
    pub surface: String,
    pub theory: String,
    pub rank: usize,
    pub order: u32,
    pub k: i64,
    pub direction: (i64, i64),
    pub t_values: Vec<Q>,
    pub point: Vec<Q>,
    pub tolerance: f64,
    pub entries: Vec<NumericConjectureEntry>,
    pub pass: bool,
}

/// Polynomial extrapolation (Neville at 0) of samples `vals[i] = f(ts[i])`.
pub(crate) fn extrapolate_to_zero(ts: &[Float], vals: &[Float], prec: u32) -> Float {
    let m = vals.len();
    let mut p = vals.to_vec();
    for level in 1..m {
        for i in 0..m - level {
            let num = Float::with_val(prec, &ts[i + level] * &p[i])
                - Float::with_val(prec, &ts[i] * &p[i + 1]);
            let den = Float::with_val(prec, &ts[i + level] - &ts[i]);
            p[i] = num / den;
        }
    }
    p[0].clone()
}

fn f_inst_numeric(
    chain: &ToricChain,
    table: &SymbolTable,
    z: &LambdaSeries<HpCoeff>,
    point: &[Float],
    prec: u32,
) -> Result<LambdaSeries<HpCoeff>, PartitionFnError> {
    let lg = z.log()?;
    let linf = chain.linf();
    let u = form_value_at(&linf.u.form(table), point, prec);
    let v = form_value_at(&linf.v().form(table), point, prec);
    Ok(lg.scale_coeff(&HpCoeff(-(u * v))))
}

/// Numeric-mode check for transcendental theories: both `F^inst` series are
/// evaluated at `eps = t * (x1, x2)` for each `t`, extrapolated to `t = 0`
/// per Lambda coefficient, and compared at `tolerance` (relative to the
/// `C^2` side when that is above 1).
///
/// Restricted to `d = 0`, where the master series has an exact unit
/// constant term; a numeric leading-coefficient pivot would be
/// ill-conditioned under the exact cancellations that occur at `d != 0`.
pub fn check_instanton_conjecture_numeric(
    chain: &ToricChain,
    theory: &TheorySpec,
    table: &SymbolTable,
    order: u32,
    point: &[Q],
    direction: (i64, i64),
    t_values: &[Q],
    prec: u32,
    tolerance: f64,
) -> Result<NumericConjectureReport, PartitionFnError> {
    let d = DivisorVector::zero(chain.n_edges());
    let c2_chain = ToricChain::builtin("C2")?;
    let k = chain.linf().k;

    let mut ts = Vec::with_capacity(t_values.len());
    let mut fx_samples: HashMap<u32, Vec<Float>> = HashMap::new();
    let mut fc2_samples: HashMap<u32, Vec<Float>> = HashMap::new();
    let mut exponents: Vec<u32> = Vec::new();
    for (i, t) in t_values.iter().enumerate() {
        let mut pt: Vec<Float> = point.iter().map(|v| q_to_float(v, prec)).collect();
        pt[table.eps1().index()] = q_to_float(&(qi(direction.0) * t), prec);
        pt[table.eps2().index()] = q_to_float(&(qi(direction.1) * t), prec);
        ts.push(q_to_float(t, prec));

        let zx = z_master_numeric(chain, &d, theory, table, order, &pt, prec)?;
        let fx = f_inst_numeric(chain, table, &zx, &pt, prec)?;
        let zc2 = z_c2_numeric(table, theory, order, &pt, prec)?;
        let fc2 = f_inst_numeric(&c2_chain, table, &zc2, &pt, prec)?;

        for (key, c) in fx.iter() {
            if !exponents.contains(&key.0) {
                exponents.push(key.0);
            }
            fx_samples
                .entry(key.0)
                .or_insert_with(|| vec![Float::with_val(prec, 0); t_values.len()])[i] =
                c.0.clone();
        }
        for (key, c) in fc2.iter() {
            if !exponents.contains(&key.0) {
                exponents.push(key.0);
            }
            fc2_samples
                .entry(key.0)
                .or_insert_with(|| vec![Float::with_val(prec, 0); t_values.len()])[i] =
                c.0.clone();
        }
    }
    exponents.sort_unstable();

    let zero_row = || vec![Float::with_val(prec, 0); t_values.len()];
    let mut entries = Vec::new();
    let mut pass = true;
    for m in exponents {
        let x0_row = fx_samples.remove(&m).unwrap_or_else(zero_row);
        let c2_row = fc2_samples.remove(&m).unwrap_or_else(zero_row);
        let x0 = extrapolate_to_zero(&ts, &x0_row, prec).to_f64();
        let c2 = extrapolate_to_zero(&ts, &c2_row, prec).to_f64() * k as f64;
        let abs_error = (x0 - c2).abs();
        let matches = abs_error <= tolerance * c2.abs().max(1.0);
        pass &= matches;
        entries.push(NumericConjectureEntry {
            lambda_exp: m,
            x0_limit: x0,
            c2_limit_scaled: c2,
            abs_error,
            matches,
        });
    }

    Ok(NumericConjectureReport {
        surface: chain.name().to_string(),
        theory: theory.manifest(),
        rank: table.rank(),
        order,
        k,
        direction,
        t_values: t_values.to_vec(),
        point: point.to_vec(),
        tolerance,
        entries,
        pass,
    })
}

/// Deterministic sample assignments for numeric runs: every Coulomb symbol
/// gets a small rational with consecutive gaps between 1 and 3, masses get
/// small rationals, and the eps and direction slots stay zero for the
/// caller to fill.
pub fn sample_points(table: &SymbolTable, count: usize, seed: u64) -> Vec<Vec<Q>> {
    use rand::Rng;
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let mut point = vec![Q::zero(); table.n_vars()];
        let mut a_val = q(rng.random_range(-8i64..=8), 8);
        for al in 0..table.rank() {
            point[table.a(al).index()] = a_val.clone();
            a_val += q(rng.random_range(8i64..=24), 8);
        }
        for f in 0..table.n_fund() {
            point[table.mass(f).index()] = q(rng.random_range(-24i64..=24), 8);
        }
        if let Some(m) = table.adjoint_mass() {
            point[m.index()] = q(rng.random_range(-24i64..=24), 8);
        }
        out.push(point);
    }
    out
}

/// JSON form of an exact series: a list of terms
/// `{lambda_exp, q_exp, coeff}` where a coefficient is `{num, den}`, `num`
/// a list of `[rational, exponents]` monomials and `den` a list of
/// `[multiplicity, monomials]` factors.  Exponents are per table symbol.
pub fn series_to_json(z: &LambdaSeries<RatFunc>, table: &SymbolTable) -> serde_json::Value {
    let poly_json = |p: &SparsePoly| -> serde_json::Value {
        let terms: Vec<serde_json::Value> = p
            .terms()
            .map(|(m, c)| {
                let exps: Vec<u64> = (0..table.n_vars())
                    .map(|i| m.0.get(i).copied().unwrap_or(0) as u64)
                    .collect();
                serde_json::json!([c.to_string(), exps])
            })
            .collect();
        serde_json::Value::Array(terms)
    };
    let terms: Vec<serde_json::Value> = z
        .iter()
        .map(|(key, c)| {
            serde_json::json!({
                "lambda_exp": key.0,
                "q_exp": key.1,
                "coeff": {
                    "num": poly_json(c.num()),
                    "den": c
                        .den_factors()
                        .iter()
                        .map(|(f, m)| serde_json::json!([m, poly_json(f)]))
                        .collect::<Vec<_>>(),
                },
            })
        })
        .collect();
    serde_json::json!({ "order": z.order(), "qdims": z.qdims(), "terms": terms })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::{tangent_character, FixedPointConfig};
    use crate::hp::PREC_NUMERIC;
    use crate::partitions::Partition;

    fn rf_linear(table: &SymbolTable, terms: &[(crate::algebra::symbols::Sym, i64)]) -> RatFunc {
        RatFunc::from_linear(&table.form_i(terms))
    }

    fn eps_rf(table: &SymbolTable, c1: i64, c2: i64) -> RatFunc {
        RatFunc::from_linear(&table.eps_form(c1, c2))
    }

    fn assert_rf_eq(got: &RatFunc, want: &RatFunc) {
        assert!(got.sub(want).is_zero(), "rational functions differ");
    }

    /// Mathematical equality of two exact series (coefficients compared by
    /// exact subtraction over the union of keys).
    fn series_math_eq(x: &LambdaSeries<RatFunc>, y: &LambdaSeries<RatFunc>, n: usize) -> bool {
        let mut keys: Vec<_> = x.iter().map(|(k, _)| k.clone()).collect();
        for (k, _) in y.iter() {
            if !keys.contains(k) {
                keys.push(k.clone());
            }
        }
        keys.iter().all(|key| {
            let cx = x.coeff(key.0, &key.1).cloned().unwrap_or_else(|| RatFunc::zero(n));
            let cy = y.coeff(key.0, &key.1).cloned().unwrap_or_else(|| RatFunc::zero(n));
            cx.sub(&cy).is_zero()
        })
    }

    /// Exchange variable slots in every monomial (num and den factors).
    fn permute_vars(f: &RatFunc, swaps: &[(usize, usize)]) -> RatFunc {
        let permute_poly = |p: &SparsePoly| {
            let mut out = SparsePoly::zero(p.n_vars());
            for (m, c) in p.terms() {
                let mut mono = m.clone();
                for &(i, j) in swaps {
                    mono.0.swap(i, j);
                }
                out.insert_raw(mono, c.clone());
            }
            out
        };
        RatFunc::from_parts(
            permute_poly(f.num()),
            f.den_factors().iter().map(|(g, k)| (permute_poly(g), *k)).collect(),
        )
    }

    #[test]
    fn theory_spec_round_trip() {
        let specs = [
            TheorySpec::Pure,
            TheorySpec::Fundamental { n_f: 2 },
            TheorySpec::Adjoint,
            TheorySpec::FiveD { beta: q(1, 1000) },
            TheorySpec::ChiY { y: qi(1) },
            TheorySpec::Elliptic { y: q(1, 2), q: q(1, 100), n_q: 8 },
        ];
        for s in &specs {
            assert_eq!(&TheorySpec::parse(&s.manifest()).unwrap(), s);
        }
        assert!(TheorySpec::parse("su5").is_err());
        assert!(TheorySpec::parse("5d:-1").is_err());
        assert!(TheorySpec::parse("elliptic:y=1/2").is_err());

        let t = TheorySpec::Fundamental { n_f: 2 }.table(2);
        assert_eq!((t.rank(), t.n_fund()), (2, 2));
        assert!(TheorySpec::Adjoint.table(3).adjoint_mass().is_some());

        assert!(TheorySpec::Pure.exact_capable());
        assert!(TheorySpec::Adjoint.exact_capable());
        assert!(!TheorySpec::FiveD { beta: qi(1) }.exact_capable());

        // adjoint matter shifts A; fundamental matter shifts B
        let adj = TheorySpec::Adjoint;
        let ta = adj.table(2);
        assert!(matches!(adj.a_class(&ta), Some(MultClassSpec::LinearShift(_))));
        assert!(adj.b_classes(&ta).is_empty());
        let fund = TheorySpec::Fundamental { n_f: 2 };
        let tf = fund.table(1);
        assert!(fund.a_class(&tf).is_none());
        assert_eq!(fund.b_classes(&tf).len(), 2);
    }

    #[test]
    fn m_factor_examples() {
        let table = TheorySpec::Pure.table(1);
        let (w1, w2) = (table.eps_form(1, 0), table.eps_form(0, 1));
        let a = plain_a_forms(&table);

        // empty tuple: every factor is the empty product
        let empty = PartitionTuple::new(vec![Partition::empty()]);
        let f = m_factor(&table, &w1, &w2, &a, &empty, &MultClassSpec::One,
            MFactorKind::EulerPair { alpha: 0, beta: 0 }).unwrap();
        assert!(f.is_one());

        // one box, same color: tangent weights {eps2, eps1}
        let y1 = PartitionTuple::new(vec![Partition::new(vec![1]).unwrap()]);
        let f = m_factor(&table, &w1, &w2, &a, &y1, &MultClassSpec::One,
            MFactorKind::EulerPair { alpha: 0, beta: 0 }).unwrap();
        assert_rf_eq(&f, &eps_rf(&table, 0, 1).mul(&eps_rf(&table, 1, 0)));

        // rank 2, ((1), empty): the cross factor is a2 - a1 + eps1 + eps2
        let t2 = TheorySpec::Pure.table(2);
        let (w1, w2) = (t2.eps_form(1, 0), t2.eps_form(0, 1));
        let a2 = plain_a_forms(&t2);
        let yv = PartitionTuple::new(vec![Partition::new(vec![1]).unwrap(), Partition::empty()]);
        let f = m_factor(&t2, &w1, &w2, &a2, &yv, &MultClassSpec::One,
            MFactorKind::EulerPair { alpha: 0, beta: 1 }).unwrap();
        let expect = RatFunc::from_linear(
            &t2.form_i(&[(t2.a(1), 1), (t2.a(0), -1)]).add(&t2.eps_form(1, 1)),
        );
        assert_rf_eq(&f, &expect);
    }

    #[test]
    fn z_c2_rank_one_matches_exponential() {
        let pure = TheorySpec::Pure;
        let table = pure.table(1);
        let n = table.n_vars();
        let z = z_c2(&table, &pure, 8).unwrap();
        assert!(z.coeff(0, &[]).unwrap().is_one());

        let inv_ee = RatFunc::one(n)
            .div(&eps_rf(&table, 1, 0).mul(&eps_rf(&table, 0, 1)))
            .unwrap();
        assert_rf_eq(z.coeff(2, &[]).unwrap(), &inv_ee);
        assert_rf_eq(z.coeff(4, &[]).unwrap(), &inv_ee.mul(&inv_ee).scale(&q(1, 2)));

        // the whole rank-1 series is exp(Lambda^2 / (eps1 eps2))
        let mut arg = LambdaSeries::new(8, 0);
        arg.add_term(2, vec![], inv_ee);
        let expect = arg.exp().unwrap().with_one(RatFunc::one(n));
        assert!(series_math_eq(&z, &expect, n));

        assert!(z_c2(&pure.table(2), &pure, 4).unwrap().coeff(0, &[]).unwrap().is_one());
    }

    #[test]
    fn z_c2_symmetry_invariances() {
        // eps1 <-> eps2 (transposing all partitions permutes the terms)
        for (spec, r, order) in [
            (TheorySpec::Pure, 1usize, 6u32),
            (TheorySpec::Pure, 2, 8),
            (TheorySpec::Adjoint, 1, 4),
        ] {
            let table = spec.table(r);
            let z = z_c2(&table, &spec, order).unwrap();
            let swap = [(table.eps1().index(), table.eps2().index())];
            for (_, c) in z.iter() {
                assert!(c.sub(&permute_vars(c, &swap)).is_zero(), "eps swap broke {spec:?}");
            }
        }

        // color permutation of the Coulomb symbols, C^2 and d = 0 master
        let pure = TheorySpec::Pure;
        let table = pure.table(2);
        let swap = [(table.a(0).index(), table.a(1).index())];
        let z = z_c2(&table, &pure, 8).unwrap();
        for (_, c) in z.iter() {
            assert!(c.sub(&permute_vars(c, &swap)).is_zero());
        }
        let f1 = ToricChain::builtin("F1").unwrap();
        let zm = z_master(&f1, &DivisorVector::zero(1), &pure, &table, 4).unwrap();
        for (_, c) in zm.iter() {
            assert!(c.sub(&permute_vars(c, &swap)).is_zero());
        }
    }

    #[test]
    fn l_factor_examples() {
        let pure = TheorySpec::Pure;
        let f1 = ToricChain::builtin("F1").unwrap();
        let table = pure.table(2);

        // coincident divisors: an exact unit
        let dt = DivisorTuple { parts: vec![DivisorVector(vec![1]), DivisorVector(vec![1])] };
        assert!(l_factors(&f1, &dt, &pure, &table).unwrap().is_one());

        // (-l0, 0): only h1(-l0) = {0} contributes, shifted by a1 - a2
        let dt = DivisorTuple { parts: vec![DivisorVector(vec![-1]), DivisorVector(vec![0])] };
        let l = l_factors(&f1, &dt, &pure, &table).unwrap();
        let expect = RatFunc::one(table.n_vars())
            .div(&rf_linear(&table, &[(table.a(0), 1), (table.a(1), -1)]))
            .unwrap();
        assert_rf_eq(&l, &expect);

        // rank 1 fundamental on F2: B shifts the natural h1 weight by the mass
        let fund = TheorySpec::Fundamental { n_f: 1 };
        let f2 = ToricChain::builtin("F2").unwrap();
        let t1 = fund.table(1);
        let dt = DivisorTuple { parts: vec![DivisorVector(vec![1])] };
        let l = l_factors(&f2, &dt, &fund, &t1).unwrap();
        let expect = RatFunc::from_linear(
            &t1.form_i(&[(t1.mass(0), 1), (t1.a(0), 1)]).add(&t1.eps_form(1, 1)),
        );
        assert_rf_eq(&l, &expect);
    }

    #[test]
    fn z_master_vertex_assembly() {
        let pure = TheorySpec::Pure;
        let t1 = pure.table(1);
        let n = t1.n_vars();
        for k in 1..=3i64 {
            let chain = ToricChain::builtin(&format!("F{k}")).unwrap();
            let z = z_master(&chain, &DivisorVector::zero(1), &pure, &t1, 2).unwrap();
            // Lambda^2 assembles the two vertex poles
            let a = RatFunc::one(n).div(&eps_rf(&t1, 1, 0).mul(&eps_rf(&t1, 0, 1))).unwrap();
            let b = RatFunc::one(n).div(&eps_rf(&t1, -1, 0).mul(&eps_rf(&t1, k, 1))).unwrap();
            assert_rf_eq(z.coeff(2, &[]).unwrap(), &a.add(&b));
        }

        // order 0 at d = 0: the exact unit series
        let f1 = ToricChain::builtin("F1").unwrap();
        let z = z_master(&f1, &DivisorVector::zero(1), &pure, &t1, 0).unwrap();
        assert_eq!(z.n_terms(), 1);
        assert!(z.coeff(0, &[]).unwrap().is_one());
    }

    #[test]
    fn z_master_matches_direct_fixed_point_sum() {
        // independent oracle: sum 1 / e(T) over fixed points (D, Y) using
        // the tangent character, with no l-factor / vertex factorization
        let pure = TheorySpec::Pure;
        let table = pure.table(2);
        let n = table.n_vars();
        let f1 = ToricChain::builtin("F1").unwrap();
        let order = 4u32;
        let z = z_master(&f1, &DivisorVector::zero(1), &pure, &table, order).unwrap();

        let mut direct: HashMap<u32, RatFunc> = HashMap::new();
        for dt in f1.enumerate_divisor_tuples(2, &DivisorVector::zero(1), order as i64).unwrap()
        {
            let dsq = f1.dsq_norm(&dt) as u32;
            let budget = (order - dsq) / 4;
            for n0 in 0..=budget {
                for n1 in 0..=(budget - n0) {
                    for y0 in enumerate_tuples(2, n0) {
                        for y1 in enumerate_tuples(2, n1) {
                            let cfg = FixedPointConfig {
                                divisors: dt.clone(),
                                partitions: vec![y0.clone(), y1.clone()],
                            };
                            let tangent = tangent_character(&f1, &cfg, &table).unwrap();
                            let mut inv_euler = RatFunc::one(n);
                            for form in tangent.forms_expanded() {
                                inv_euler =
                                    inv_euler.div(&RatFunc::from_linear(&form)).unwrap();
                            }
                            let exp = dsq + 4 * (n0 + n1);
                            let entry =
                                direct.entry(exp).or_insert_with(|| RatFunc::zero(n));
                            *entry = entry.add(&inv_euler);
                        }
                    }
                }
            }
        }

        for (k, want) in &direct {
            let got = z.coeff(*k, &[]).cloned().unwrap_or_else(|| RatFunc::zero(n));
            assert!(got.sub(want).is_zero(), "Lambda^{k} disagrees with the direct sum");
        }
        for (key, _) in z.iter() {
            assert!(direct.contains_key(&key.0), "unexpected exponent {}", key.0);
        }
    }

    #[test]
    fn z_master_lambda_grading() {
        let pure = TheorySpec::Pure;
        let table = pure.table(2);
        let f1 = ToricChain::builtin("F1").unwrap();
        let f2 = ToricChain::builtin("F2").unwrap();
        for (chain, d, order) in [
            (&f1, DivisorVector::zero(1), 8u32),
            (&f1, DivisorVector(vec![2]), 8),
            (&f2, DivisorVector::zero(1), 8),
        ] {
            let z = z_master(chain, &d, &pure, &table, order).unwrap();
            assert!(!z.is_zero());
            // every exponent is congruent to (1 - r) d.d modulo 2r
            let offset = (1 - 2i64) * chain.dot(&d, &d);
            for (key, _) in z.iter() {
                let m = key.0 as i64 - offset;
                assert!(m.rem_euclid(4) == 0, "exponent {} breaks the grading", key.0);
            }
        }
    }

    #[test]
    fn odd_flux_sector_vanishes() {
        // at rank 2 the l-factor is odd under the color swap while the
        // vertex product is even, so sectors with D_1 - D_2 in an odd
        // divisor class cancel pairwise; the whole series is exactly zero
        let pure = TheorySpec::Pure;
        let table = pure.table(2);
        let f1 = ToricChain::builtin("F1").unwrap();
        let z = z_master(&f1, &DivisorVector(vec![1]), &pure, &table, 9).unwrap();
        assert!(z.is_zero());
    }

    #[test]
    fn z_generating_assembles_masters() {
        let pure = TheorySpec::Pure;
        let t1 = pure.table(1);
        let n = t1.n_vars();

        // dbound 0 reduces to the d = 0 master series
        let f2 = ToricChain::builtin("F2").unwrap();
        let g0 = z_generating(&f2, &pure, &t1, 4, 0).unwrap();
        let m0 = z_master(&f2, &DivisorVector::zero(1), &pure, &t1, 4).unwrap();
        for (key, c) in m0.iter() {
            assert!(g0.coeff(key.0, &[0]).unwrap().sub(c).is_zero());
        }

        // the D = l0 term enters at Lambda^0 with unit coefficient
        let g = z_generating(&f2, &pure, &t1, 2, 2).unwrap();
        let qd = f2.edge_degrees(&DivisorVector(vec![1]));
        assert!(g.coeff(0, &qd).unwrap().is_one());

        // rank 1 factorizes into shifted vertex series, degree by degree
        let f1 = ToricChain::builtin("F1").unwrap();
        let g = z_generating(&f1, &pure, &t1, 4, 1).unwrap();
        let ds = f1.divisors_with_degree_bound(1);
        assert_eq!(ds.len(), 3);
        for d in ds {
            let dt = DivisorTuple { parts: vec![d.clone()] };
            let mut prod = LambdaSeries::new(4, 0).with_one(RatFunc::one(n));
            for (v, vert) in f1.vertices().iter().enumerate() {
                let a_forms = vertex_a_forms(&f1, &dt, v, &t1);
                prod = prod
                    .mul(&z_c2_at(&t1, &vert.w1.form(&t1), &vert.w2.form(&t1), &a_forms, &pure, 4)
                        .unwrap());
            }
            let qd = f1.edge_degrees(&d);
            for (key, c) in prod.iter() {
                assert!(g.coeff(key.0, &qd).unwrap().sub(c).is_zero());
            }
        }
    }

    #[test]
    fn f_inst_examples() {
        let pure = TheorySpec::Pure;
        let t1 = pure.table(1);
        let n = t1.n_vars();
        let c2 = ToricChain::builtin("C2").unwrap();

        // C^2 rank 1: -eps1 eps2 log exp(Lambda^2/(eps1 eps2)) = -Lambda^2
        let z = z_master(&c2, &DivisorVector::zero(0), &pure, &t1, 6).unwrap();
        let f = f_inst(&c2, &t1, &z).unwrap();
        assert_rf_eq(f.coeff(2, &[]).unwrap(), &RatFunc::constant(n, qi(-1)));
        assert!(f.coeff(4, &[]).is_none());
        assert!(f.coeff(6, &[]).is_none());

        // the unit series maps to zero
        let one = LambdaSeries::new(4, 0).with_one(RatFunc::one(n));
        assert!(f_inst(&c2, &t1, &one).unwrap().is_zero());

        // F1 rank 1: -u(u - kw) times the two-vertex pole sum, which
        // telescopes to the constant -1
        let f1 = ToricChain::builtin("F1").unwrap();
        let z = z_master(&f1, &DivisorVector::zero(1), &pure, &t1, 2).unwrap();
        let f = f_inst(&f1, &t1, &z).unwrap();
        let log2 = RatFunc::one(n)
            .div(&eps_rf(&t1, 1, 0).mul(&eps_rf(&t1, 0, 1)))
            .unwrap()
            .add(&RatFunc::one(n).div(&eps_rf(&t1, -1, 0).mul(&eps_rf(&t1, 1, 1))).unwrap());
        let pref = eps_rf(&t1, 0, -1).mul(&eps_rf(&t1, -1, -1)).neg();
        assert_rf_eq(f.coeff(2, &[]).unwrap(), &pref.mul(&log2));
        assert_rf_eq(f.coeff(2, &[]).unwrap(), &RatFunc::constant(n, qi(-1)));
    }

    #[test]
    fn normalization_strips_leading_term() {
        let pure = TheorySpec::Pure;
        let t1 = pure.table(1);
        let n = t1.n_vars();
        let mut z = LambdaSeries::new(6, 0);
        z.add_term(2, vec![], RatFunc::constant(n, qi(3)));
        z.add_term(4, vec![], RatFunc::constant(n, qi(6)));
        let norm = normalize_leading(&z).unwrap();
        assert_eq!(norm.shift, 2);
        assert_rf_eq(&norm.leading, &RatFunc::constant(n, qi(3)));
        assert!(norm.series.coeff(0, &[]).unwrap().is_one());
        assert_rf_eq(norm.series.coeff(2, &[]).unwrap(), &RatFunc::constant(n, qi(2)));

        let empty: LambdaSeries<RatFunc> = LambdaSeries::new(4, 0);
        assert!(matches!(normalize_leading(&empty), Err(PartitionFnError::ZeroSeries)));
    }

    #[test]
    fn eps_limit_examples() {
        let pure = TheorySpec::Pure;
        let t1 = pure.table(1);
        let n = t1.n_vars();

        // the C^2 rank-1 F^inst: analytic with limits (-1, 0, 0, ...)
        let c2 = ToricChain::builtin("C2").unwrap();
        let z = z_master(&c2, &DivisorVector::zero(0), &pure, &t1, 6).unwrap();
        let f = f_inst(&c2, &t1, &z).unwrap();
        let rep = eps_limit(&f, &t1, DIRECTIONS).unwrap();
        assert!(rep.analytic && !rep.direction_dependent);
        assert_rf_eq(&rep.limit_at(2, n), &RatFunc::constant(n, qi(-1)));
        assert!(rep.limit_at(4, n).is_zero());

        // a bare double pole: valuation -2 along both directions
        let mut s = LambdaSeries::new(2, 0);
        s.add_term(2, vec![], RatFunc::one(n).div(&eps_rf(&t1, 1, 0).mul(&eps_rf(&t1, 0, 1))).unwrap());
        let rep = eps_limit(&s, &t1, DIRECTIONS).unwrap();
        assert!(!rep.analytic);
        assert_eq!(rep.coeffs[0].valuations, vec![-2, -2]);

        // (eps1 + eps2)/(a1 - a2): analytic with limit zero
        let t2 = pure.table(2);
        let n2 = t2.n_vars();
        let mut s = LambdaSeries::new(2, 0);
        s.add_term(
            2,
            vec![],
            RatFunc::from_linear(&t2.eps_form(1, 1))
                .div(&rf_linear(&t2, &[(t2.a(0), 1), (t2.a(1), -1)]))
                .unwrap(),
        );
        let rep = eps_limit(&s, &t2, DIRECTIONS).unwrap();
        assert!(rep.analytic);
        assert!(rep.limit_at(2, n2).is_zero());

        // resonant candidates are skipped wholesale: 1/(3 eps1 + eps2)
        // kills (1, -3), so the first two usable directions follow it
        let mut s = LambdaSeries::new(2, 0);
        s.add_term(2, vec![], RatFunc::one(n).div(&eps_rf(&t1, 3, 1)).unwrap());
        let rep = eps_limit(&s, &t1, DIRECTIONS).unwrap();
        assert_eq!(rep.directions, vec![(2, -5), (3, -7)]);
        assert!(!rep.analytic);

        // a slice-analytic function with direction-dependent limit is
        // flagged, not crashed: eps1 eps2 / (eps1 + eps2)^2
        let f = eps_rf(&t1, 1, 0)
            .mul(&eps_rf(&t1, 0, 1))
            .div(&eps_rf(&t1, 1, 1).mul(&eps_rf(&t1, 1, 1)))
            .unwrap();
        let mut s = LambdaSeries::new(2, 0);
        s.add_term(2, vec![], f);
        let rep = eps_limit(&s, &t1, DIRECTIONS).unwrap();
        assert!(rep.analytic);
        assert!(rep.direction_dependent);
    }

    #[test]
    fn conjecture_rank_two_hirzebruch() {
        let pure = TheorySpec::Pure;
        let table = pure.table(2);
        let n = table.n_vars();
        let a12 = rf_linear(&table, &[(table.a(0), 1), (table.a(1), -1)]);
        let one_inst = RatFunc::constant(n, qi(2)).div(&a12.mul(&a12)).unwrap();

        let f1 = ToricChain::builtin("F1").unwrap();
        let rep = check_instanton_conjecture(&f1, &DivisorVector::zero(1), &pure, &table, 4).unwrap();
        assert!(rep.pass, "instanton statement failed on F1: {rep:?}");
        assert_eq!((rep.k, rep.leading_exp, rep.lambda_prefactor_exp), (1, 0, 0));
        let e4 = rep.entries.iter().find(|e| e.lambda_exp == 4).unwrap();
        assert!(e4.matches);
        // the shared limit is the known one-instanton term 2/(a1 - a2)^2
        assert_rf_eq(&e4.x0_limit, &one_inst);
        assert_rf_eq(&e4.c2_limit_scaled, &one_inst);
        assert!(rep.aux_analytic);

        let f2 = ToricChain::builtin("F2").unwrap();
        let rep = check_instanton_conjecture(&f2, &DivisorVector::zero(1), &pure, &table, 4).unwrap();
        assert!(rep.pass, "instanton statement failed on F2: {rep:?}");
        assert_eq!(rep.k, 2);
        let e4 = rep.entries.iter().find(|e| e.lambda_exp == 4).unwrap();
        assert_rf_eq(&e4.c2_limit_scaled, &one_inst.scale(&qi(2)));
        assert_rf_eq(&e4.x0_limit, &one_inst.scale(&qi(2)));
    }

    #[test]
    fn conjecture_rank_one_all_k() {
        let pure = TheorySpec::Pure;
        let t1 = pure.table(1);
        let n = t1.n_vars();
        for (name, k) in [("F1", 1i64), ("F2", 2), ("F3", 3)] {
            let chain = ToricChain::builtin(name).unwrap();
            let rep =
                check_instanton_conjecture(&chain, &DivisorVector::zero(1), &pure, &t1, 6).unwrap();
            assert!(rep.pass, "rank-1 statement failed on {name}");
            assert_eq!(rep.k, k);
            // rank-1 limits are the a-independent constants (-k, 0, 0, ...)
            let e2 = rep.entries.iter().find(|e| e.lambda_exp == 2).unwrap();
            assert_rf_eq(&e2.x0_limit, &RatFunc::constant(n, qi(-k)));
            for e in &rep.entries {
                if e.lambda_exp > 2 {
                    assert!(e.x0_limit.is_zero());
                }
            }
        }

        // C^2 against itself: the k = 1 identity case
        let c2 = ToricChain::builtin("C2").unwrap();
        let rep = check_instanton_conjecture(&c2, &DivisorVector::zero(0), &pure, &t1, 4).unwrap();
        assert!(rep.pass);
        assert_eq!(rep.k, 1);
    }

    #[test]
    fn conjecture_matter_theories_exact() {
        // fundamental and adjoint matter run the exact pipeline end to end
        let fund = TheorySpec::Fundamental { n_f: 2 };
        let tf = fund.table(1);
        let f2 = ToricChain::builtin("F2").unwrap();
        let rep = check_instanton_conjecture(&f2, &DivisorVector::zero(1), &fund, &tf, 4).unwrap();
        assert!(rep.pass, "fundamental matter failed: {rep:?}");
        assert_eq!(rep.k, 2);
        assert!(rep.aux_analytic);

        let adj = TheorySpec::Adjoint;
        let ta = adj.table(1);
        let f1 = ToricChain::builtin("F1").unwrap();
        let rep = check_instanton_conjecture(&f1, &DivisorVector::zero(1), &adj, &ta, 4).unwrap();
        assert!(rep.pass, "adjoint matter failed: {rep:?}");
        assert!(rep.aux_analytic);
    }

    #[test]
    fn conjecture_nonzero_divisor_class() {
        // d = 2 l0 on F1 at rank 2: the even sector survives, led by the
        // balanced tuple (l0, l0) at Lambda^0, with the unbalanced tuples
        // (2 l0, 0) and (0, 2 l0) joining at Lambda^4; limits still match
        // the C^2 side because the divisor shifts vanish with eps
        let pure = TheorySpec::Pure;
        let table = pure.table(2);
        let f1 = ToricChain::builtin("F1").unwrap();
        let rep =
            check_instanton_conjecture(&f1, &DivisorVector(vec![2]), &pure, &table, 4).unwrap();
        assert_eq!(rep.leading_exp, 0);
        assert_eq!(rep.lambda_prefactor_exp, 4);
        assert!(rep.pass, "nonzero divisor class failed: {rep:?}");
        let e4 = rep.entries.iter().find(|e| e.lambda_exp == 4).unwrap();
        assert!(e4.matches);
        let n = table.n_vars();
        let a12 = rf_linear(&table, &[(table.a(0), 1), (table.a(1), -1)]);
        let one_inst = RatFunc::constant(n, qi(2)).div(&a12.mul(&a12)).unwrap();
        assert_rf_eq(&e4.x0_limit, &one_inst);
    }

    #[test]
    fn transcendental_kernels_degenerate_numerically() {
        let pure = TheorySpec::Pure;
        let table = pure.table(2);
        let order = 8u32;
        let pts = sample_points(&table, 3, 0x5eed_cafe);
        for p in &pts {
            let mut pt: Vec<Float> = p.iter().map(|v| q_to_float(v, PREC_NUMERIC)).collect();
            pt[table.eps1().index()] = q_to_float(&q(1, 3), PREC_NUMERIC);
            pt[table.eps2().index()] = q_to_float(&q(-2, 7), PREC_NUMERIC);

            let zp = z_c2_numeric(&table, &pure, order, &pt, PREC_NUMERIC).unwrap();

            // small-circumference 5d matches 4d to 1e-4 relative
            let z5 = z_c2_numeric(&table, &TheorySpec::FiveD { beta: q(1, 1000) }, order, &pt,
                PREC_NUMERIC).unwrap();
            for (key, c) in zp.iter() {
                if key.0 == 0 {
                    continue;
                }
                let v5 = z5.coeff(key.0, &[]).unwrap();
                let rel = (Float::with_val(PREC_NUMERIC, &v5.0 / &c.0) - 1u32).abs();
                assert!(rel < 1e-4, "5d degeneration off at Lambda^{}: {rel}", key.0);
            }

            // chi_y at y = 1 is the Euler kernel, so the A factor cancels
            // the Euler denominator identically and each coefficient
            // collapses to the fixed-point count
            let zy = z_c2_numeric(&table, &TheorySpec::ChiY { y: qi(1) }, order, &pt,
                PREC_NUMERIC).unwrap();
            for (key, c) in zy.iter() {
                let count = enumerate_tuples(2, key.0 / 4).len() as u32;
                let rel = (Float::with_val(PREC_NUMERIC, &c.0 / count) - 1u32).abs();
                assert!(rel < 1e-20, "chi_y(1) is not the point count at Lambda^{}", key.0);
            }
        }

        // elliptic kernel at q -> 0 approaches chi_y up to the y^{-1/2}
        // factor per weight (2rn of them at level n)
        let t1 = pure.table(1);
        let pts = sample_points(&t1, 1, 0xe11);
        let mut pt: Vec<Float> = pts[0].iter().map(|v| q_to_float(v, PREC_NUMERIC)).collect();
        pt[t1.eps1().index()] = q_to_float(&q(2, 5), PREC_NUMERIC);
        pt[t1.eps2().index()] = q_to_float(&q(-3, 4), PREC_NUMERIC);
        let y = q(1, 2);
        let ze = z_c2_numeric(&t1, &TheorySpec::Elliptic { y: y.clone(), q: q(1, 1000000), n_q: 8 },
            4, &pt, PREC_NUMERIC).unwrap();
        let zy = z_c2_numeric(&t1, &TheorySpec::ChiY { y: y.clone() }, 4, &pt, PREC_NUMERIC)
            .unwrap();
        for (key, c) in ze.iter() {
            if key.0 == 0 {
                continue;
            }
            let rn = key.0 / 2; // r n at r = 1
            let scale = q_to_float(&y, PREC_NUMERIC).pow(-(rn as i32));
            let want = Float::with_val(PREC_NUMERIC, &zy.coeff(key.0, &[]).unwrap().0 * &scale);
            let rel = (Float::with_val(PREC_NUMERIC, &c.0 / &want) - 1u32).abs();
            assert!(rel < 1e-3, "elliptic q->0 off at Lambda^{}: {rel}", key.0);
        }
    }

    #[test]
    fn numeric_mode_conjecture_fived() {
        let theory = TheorySpec::FiveD { beta: q(1, 100) };
        let table = theory.table(1);
        let f2 = ToricChain::builtin("F2").unwrap();
        let pts = sample_points(&table, 1, 0xabad1dea);
        let ts: Vec<Q> = vec![q(1, 16), q(1, 32), q(1, 64), q(1, 128), q(1, 256)];
        // (1, -3) is resonant for the second F2 vertex (the weight
        // (l + 2a + 2) eps1 + (a + 1) eps2 vanishes on it at level 2), so
        // sample along (2, -5) instead
        let rep = check_instanton_conjecture_numeric(
            &f2, &theory, &table, 4, &pts[0], (2, -5), &ts, PREC_NUMERIC, 1e-6,
        )
        .unwrap();
        assert!(rep.pass, "numeric 5d check failed: {rep:?}");
        assert_eq!(rep.k, 2);
        // at small circumference the Lambda^2 limit is close to -k
        let e2 = rep.entries.iter().find(|e| e.lambda_exp == 2).unwrap();
        assert!((e2.x0_limit + 2.0).abs() < 0.05, "got {}", e2.x0_limit);
    }

    #[test]
    fn series_json_shape() {
        let pure = TheorySpec::Pure;
        let t1 = pure.table(1);
        let z = z_c2(&t1, &pure, 2).unwrap();
        let j = series_to_json(&z, &t1);
        assert_eq!(j["order"], 2);
        assert_eq!(j["qdims"], 0);
        let terms = j["terms"].as_array().unwrap();
        assert_eq!(terms.len(), 2);
        let t2 = terms.iter().find(|t| t["lambda_exp"] == 2).unwrap();
        // 1/(eps1 eps2): unit numerator, two denominator factors
        assert_eq!(t2["coeff"]["num"].as_array().unwrap().len(), 1);
        assert_eq!(t2["coeff"]["den"].as_array().unwrap().len(), 2);
    }
}
