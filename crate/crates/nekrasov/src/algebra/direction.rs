//! Direction substitution and exact Laurent expansion at t = 0.
//!
//! The eps -> 0 limit is always taken along a rational direction: substitute
//! `eps1 = x1 t`, `eps2 = x2 t` with a fixed coprime integer pair `(x1, x2)`,
//! then expand the resulting rational function of `t` (coefficients still
//! exact rational functions of the Coulomb/mass symbols) as a Laurent series
//! at t = 0.  Analyticity of a limit claim is the statement "valuation >= 0";
//! the limit itself is the t^0 coefficient.  Everything here is exact: a zero
//! coefficient is an exact zero, so valuations are decided, not estimated.
//!
//! A direction is *resonant* for a function if some denominator factor
//! vanishes identically under the substitution (e.g. 3 eps1 + eps2 along
//! (1, -3)); this is reported as an error so callers can retry with the next
//! direction from their list.

use super::poly::SparsePoly;
use super::ratfunc::RatFunc;
use super::symbols::SymbolTable;
use super::AlgebraError;
use crate::qi;
use num::Zero;

/// Substitute `eps1 = x1 t, eps2 = x2 t` in a rational function.
///
/// The input must not use the `t` slot already.  The result's denominator
/// stays factored; factors that vanish identically raise
/// [`AlgebraError::ResonantDirection`].
pub fn substitute_direction(
    f: &RatFunc,
    table: &SymbolTable,
    dir: (i64, i64),
) -> Result<RatFunc, AlgebraError> {
    let (x1, x2) = dir;
    let subst_poly = |p: &SparsePoly| -> SparsePoly {
        let mut out = SparsePoly::zero(p.n_vars());
        let e1 = table.eps1().index();
        let e2 = table.eps2().index();
        let tslot = table.t().index();
        for (m, c) in p.terms() {
            assert_eq!(m.exp(table.t()), 0, "input already uses the direction parameter");
            let k1 = m.exp(table.eps1());
            let k2 = m.exp(table.eps2());
            let mut scale = c.clone();
            for _ in 0..k1 {
                scale *= qi(x1);
            }
            for _ in 0..k2 {
                scale *= qi(x2);
            }
            if scale.is_zero() {
                continue;
            }
            let mut mono = m.clone();
            mono.0[e1] = 0;
            mono.0[e2] = 0;
            mono.0[tslot] = k1 + k2;
            out.insert_raw(mono, scale);
        }
        out
    };

    let num = subst_poly(f.num());
    let mut den = Vec::with_capacity(f.den_factors().len());
    for (fac, m) in f.den_factors() {
        let mapped = subst_poly(fac);
        if mapped.is_zero() {
            return Err(AlgebraError::ResonantDirection {
                x1,
                x2,
                factor: format!("{}", fac.display(table)),
            });
        }
        den.push((mapped, *m));
    }
    Ok(RatFunc::from_parts(num, den))
}

/// Exact Laurent expansion of a substituted function at t = 0.
///
/// `coeffs[i]` is the coefficient of `t^{valuation + i}`; the first entry is
/// nonzero unless the function is zero (empty `coeffs`).  Coefficients are
/// rational functions of the remaining symbols with denominators built from
/// the t-free parts of the input's denominator factors.  Expansion runs
/// through `t^order` inclusive; `zero_through_order` distinguishes an exactly
/// zero function from one whose valuation merely exceeds `order`.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionSeries {
    pub valuation: i64,
    pub coeffs: Vec<RatFunc>,
    pub order: i64,
}

impl DirectionSeries {
    pub fn is_zero_through_order(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient of `t^p` (zero if outside the stored window).
    pub fn coeff_at(&self, p: i64, n_vars: usize) -> RatFunc {
        if self.coeffs.is_empty() {
            return RatFunc::zero(n_vars);
        }
        let i = p - self.valuation;
        if i < 0 || i as usize >= self.coeffs.len() {
            return RatFunc::zero(n_vars);
        }
        self.coeffs[i as usize].clone()
    }

    /// True if no negative power of t survives (limit exists at t = 0).
    pub fn is_analytic(&self) -> bool {
        self.coeffs.is_empty() || self.valuation >= 0
    }

    /// The t^0 coefficient (the eps -> 0 limit when analytic).
    pub fn limit(&self, n_vars: usize) -> RatFunc {
        self.coeff_at(0, n_vars)
    }
}

/// Laurent-expand `f` (already substituted, so a rational function of `t` and
/// the Coulomb/mass symbols) at `t = 0`, through `t^order`.
pub fn laurent_at_zero(
    f: &RatFunc,
    table: &SymbolTable,
    order: i64,
) -> Result<DirectionSeries, AlgebraError> {
    let t = table.t();
    let n = f.n_vars();
    if f.is_zero() {
        return Ok(DirectionSeries { valuation: 0, coeffs: vec![], order });
    }

    // numerator as a polynomial in t with t-free polynomial coefficients
    let num_by_t = f.num().split_by(t);
    let num_val = *num_by_t.keys().next().expect("nonzero numerator") as i64;

    // each denominator factor g = t^{v_g} * (g0 + g1 t + ...), g0 != 0
    let mut den_val = 0i64;
    struct Regular {
        parts: Vec<(u16, SparsePoly)>, // t-power -> t-free coefficient, ascending
        mult: u32,
    }
    let mut regulars: Vec<Regular> = Vec::new();
    for (fac, m) in f.den_factors() {
        let v = fac.min_degree_in(t);
        den_val += (v as i64) * (*m as i64);
        let shifted = fac.shift_down(t, v);
        let parts: Vec<(u16, SparsePoly)> = shifted.split_by(t).into_iter().collect();
        if parts.len() == 1 && parts[0].0 == 0 {
            // pure t-free factor: handled by the inverse recurrence trivially,
            // but skip the series machinery
        }
        regulars.push(Regular { parts, mult: *m });
    }

    let low = num_val - den_val;
    if low > order {
        return Ok(DirectionSeries { valuation: low, coeffs: vec![], order });
    }
    let len = (order - low + 1) as usize;

    // truncated power series in t with RatFunc coefficients, index = t-power
    let mut series: Vec<RatFunc> = vec![RatFunc::zero(n); len];
    for (k, p) in &num_by_t {
        let i = (*k as i64) - num_val;
        if (i as usize) < len {
            series[i as usize] = RatFunc::from_poly(p.clone());
        }
    }

    for reg in &regulars {
        let g0 = &reg.parts[0].1;
        debug_assert_eq!(reg.parts[0].0, 0);
        for _ in 0..reg.mult {
            // inverse series of (g0 + g1 t + ...): c_0 = 1/g0,
            // c_k = -(sum_{j>=1} g_j c_{k-j}) / g0
            let mut inv: Vec<RatFunc> = Vec::with_capacity(len);
            inv.push(RatFunc::from_parts(
                SparsePoly::one(n),
                vec![(g0.clone(), 1)],
            ));
            for k in 1..len {
                let mut acc = RatFunc::zero(n);
                for (j, gj) in reg.parts.iter().skip(1) {
                    let j = *j as usize;
                    if j > k {
                        break;
                    }
                    acc = acc.add(&inv[k - j].mul(&RatFunc::from_poly(gj.clone())));
                }
                if acc.is_zero() {
                    inv.push(RatFunc::zero(n));
                } else {
                    inv.push(
                        acc.neg()
                            .mul(&RatFunc::from_parts(SparsePoly::one(n), vec![(g0.clone(), 1)])),
                    );
                }
            }
            // series *= inv (truncated convolution)
            let mut next: Vec<RatFunc> = vec![RatFunc::zero(n); len];
            for i in 0..len {
                if series[i].is_zero() {
                    continue;
                }
                for j in 0..len - i {
                    if inv[j].is_zero() {
                        continue;
                    }
                    next[i + j] = next[i + j].add(&series[i].mul(&inv[j]));
                }
            }
            series = next;
        }
    }

    // strip exact leading zeros
    let mut val = low;
    let mut coeffs = series;
    while let Some(first) = coeffs.first() {
        if first.is_zero() {
            coeffs.remove(0);
            val += 1;
        } else {
            break;
        }
    }
    if coeffs.is_empty() {
        // function is nonzero but vanishes through the requested order
        return Ok(DirectionSeries { valuation: order + 1, coeffs: vec![], order });
    }
    // drop trailing zeros for a tidy canonical form (window end stays `order`)
    while coeffs.last().map(RatFunc::is_zero).unwrap_or(false) {
        coeffs.pop();
    }
    Ok(DirectionSeries { valuation: val, coeffs, order })
}

/// Candidate directions, mixed sign and pairwise non-proportional; callers
/// walk this list skipping resonant entries.
pub const DIRECTIONS: &[(i64, i64)] = &[
    (1, -3),
    (2, -5),
    (3, -7),
    (1, -4),
    (3, -5),
    (2, -7),
    (4, -9),
    (5, -2),
];
