//! Equivariant characters at the torus-fixed points of the instanton moduli
//! space: tangent and natural bundle weight multisets, assembled from vertex
//! (plane-partition) data and edge (divisor cohomology) data.
//!
//! The edge piece is where the real work happens.  For an edge-supported
//! divisor difference the weights of `H^1(X, O(D - linf))` are read off a
//! closed rational expression in two torus characters `t1, t2`: bring it over
//! the common denominator, then divide *exactly* in the Laurent ring.  The
//! cohomology vanishing guarantees the quotient is a genuine character — a
//! Laurent polynomial with nonnegative coefficients — so any failure of
//! exactness or effectivity is reported as a hard error, not smoothed over.

use crate::algebra::laurent2::Laurent2;
use crate::algebra::symbols::{LinearForm, SymbolTable};
use crate::geometry::{DivisorTuple, DivisorVector, EpsWeight, GeometryError, ToricChain};
use crate::partitions::{ns_weights, nst_weights, PartitionTuple};
use std::fmt;

#[derive(Debug, thiserror::Error)]
pub enum CharacterError {
    #[error("cohomology character is not a Laurent polynomial (remainder after exact division); surface data is inconsistent")]
    NotLaurentPolynomial,
    #[error("cohomology character has a negative multiplicity at t1^{0} t2^{1}")]
    NegativeMultiplicity(i64, i64),
    #[error("configuration has {got} divisor components, expected rank {expected}")]
    RankMismatch { got: usize, expected: usize },
    #[error("configuration has {got} partition tuples, surface has {expected} vertices")]
    VertexCountMismatch { got: usize, expected: usize },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Where a weight came from, kept for diagnostics when a count law fails.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightOrigin {
    /// Box combinatorics at a chain vertex.
    Vertex(usize),
    /// Divisor cohomology along the compact edges.
    DivisorH1,
    /// Correction terms supported on the infinity line.
    Boundary,
}

#[derive(Debug, Clone)]
pub struct WeightEntry {
    pub form: LinearForm,
    pub mult: u32,
    pub origin: WeightOrigin,
}

/// Multiset of equivariant weights with positive multiplicities.
#[derive(Debug, Clone, Default)]
pub struct WeightMultiset {
    pub entries: Vec<WeightEntry>,
}

impl WeightMultiset {
    pub fn new() -> Self {
        WeightMultiset { entries: Vec::new() }
    }

    pub fn push(&mut self, form: LinearForm, mult: u32, origin: WeightOrigin) {
        assert!(mult > 0, "weight multiplicities must be positive");
        self.entries.push(WeightEntry { form, mult, origin });
    }

    /// Total size counted with multiplicity.
    pub fn total(&self) -> u64 {
        self.entries.iter().map(|e| u64::from(e.mult)).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Weights repeated by multiplicity, in insertion order.
    pub fn forms_expanded(&self) -> Vec<LinearForm> {
        let mut out = Vec::new();
        for e in &self.entries {
            for _ in 0..e.mult {
                out.push(e.form.clone());
            }
        }
        out
    }

    /// Origin-blind canonical form: sorted, merged `(coefficient vector,
    /// multiplicity)` pairs, suitable for equality comparisons.
    pub fn canonical(&self) -> Vec<(Vec<crate::Q>, u64)> {
        let mut flat: Vec<Vec<crate::Q>> = self
            .forms_expanded()
            .into_iter()
            .map(|f| f.coeffs.clone())
            .collect();
        flat.sort();
        let mut out: Vec<(Vec<crate::Q>, u64)> = Vec::new();
        for f in flat {
            match out.last_mut() {
                Some((prev, m)) if *prev == f => *m += 1,
                _ => out.push((f, 1)),
            }
        }
        out
    }

    /// View a pure `eps1, eps2` multiset as a two-variable character.
    /// Panics if some weight involves other symbols.
    pub fn to_laurent2(&self, table: &SymbolTable) -> Laurent2 {
        use num::ToPrimitive;
        let mut out = Laurent2::zero();
        for e in &self.entries {
            let mut c1 = None;
            let mut c2 = None;
            for (slot, c) in e.form.coeffs.iter().enumerate() {
                if slot == table.eps1().index() {
                    c1 = c.to_i64();
                } else if slot == table.eps2().index() {
                    c2 = c.to_i64();
                } else {
                    assert!(
                        num::Zero::is_zero(c),
                        "weight involves symbols beyond eps1, eps2"
                    );
                }
            }
            out.add_term(
                (c1.expect("integer eps1 coefficient"), c2.expect("integer eps2 coefficient")),
                i64::from(e.mult),
            );
        }
        out
    }
}

impl fmt::Display for WeightMultiset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, e) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "<{:?} x{}>", e.origin, e.mult)?;
        }
        write!(f, "}}")
    }
}

/// A torus-fixed point of the moduli space: one divisor per color and one
/// partition tuple per chain vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixedPointConfig {
    pub divisors: DivisorTuple,
    pub partitions: Vec<PartitionTuple>,
}

impl FixedPointConfig {
    pub fn rank(&self) -> usize {
        self.divisors.parts.len()
    }

    pub fn total_boxes(&self) -> u64 {
        self.partitions.iter().map(PartitionTuple::total_size).sum()
    }

    fn check(&self, chain: &ToricChain, r: usize) -> Result<(), CharacterError> {
        if self.divisors.parts.len() != r {
            return Err(CharacterError::RankMismatch {
                got: self.divisors.parts.len(),
                expected: r,
            });
        }
        if self.partitions.len() != chain.n_vertices() {
            return Err(CharacterError::VertexCountMismatch {
                got: self.partitions.len(),
                expected: chain.n_vertices(),
            });
        }
        for pt in &self.partitions {
            if pt.rank() != r {
                return Err(CharacterError::RankMismatch { got: pt.rank(), expected: r });
            }
        }
        Ok(())
    }
}

/// Weight multiset of `H^1(X, O(D - linf))` for an edge-supported divisor
/// `D`, via exact Laurent division of the localized Euler characteristic
///
/// ```text
///   sum_v -t^{w_D^v} / ((1 - t^{-w1^v})(1 - t^{-w2^v}))
///   + 1 / ((1 - t^{-w})(1 - t^{u}))  + 1 / ((1 - t^{w})(1 - t^{u-kw}))
/// ```
///
/// over the common denominator.  `H^0` and `H^2` vanish for such divisors, so
/// minus this expression is a genuine character of size
/// `-(D.D + c1.D)/2`.
pub fn h1_weights(
    chain: &ToricChain,
    ddiff: &DivisorVector,
) -> Result<WeightMultiset, CharacterError> {
    let character = h1_character(chain, ddiff)?;
    if !character.is_effective() {
        let (&(i, j), _) = character
            .terms()
            .find(|(_, &c)| c < 0)
            .expect("ineffective character has a negative term");
        return Err(CharacterError::NegativeMultiplicity(i, j));
    }
    let mut out = WeightMultiset::new();
    for (&(i, j), &c) in character.terms() {
        out.push(
            EpsWeight::new(i, j).form(&SymbolTable::new(1, 0, false)),
            u32::try_from(c).expect("multiplicity fits u32"),
            WeightOrigin::DivisorH1,
        );
    }
    Ok(out)
}

/// The `H^1` character as a Laurent polynomial in `(t1, t2)` (not yet
/// checked for effectivity).
fn h1_character(chain: &ToricChain, ddiff: &DivisorVector) -> Result<Laurent2, CharacterError> {
    let binom = |w: EpsWeight| Laurent2::one_minus(w.c1, w.c2);
    let mono = |w: EpsWeight| Laurent2::monomial(w.c1, w.c2);

    // denominator factors per localization chart: two at each vertex, two at
    // each of the two fixed points on the infinity line
    let linf = chain.linf();
    let mut charts: Vec<(Laurent2, [Laurent2; 2])> = Vec::new();
    for (v, vert) in chain.vertices().iter().enumerate() {
        let num = mono(chain.divisor_weight_at(ddiff, v)).neg();
        charts.push((num, [binom(vert.w1.neg()), binom(vert.w2.neg())]));
    }
    charts.push((Laurent2::one(), [binom(linf.w.neg()), binom(linf.u)]));
    charts.push((Laurent2::one(), [binom(linf.w), binom(linf.v())]));

    let mut numerator = Laurent2::zero();
    for (i, (num, _)) in charts.iter().enumerate() {
        let mut term = num.clone();
        for (j, (_, factors)) in charts.iter().enumerate() {
            if i == j {
                continue;
            }
            term = term.mul(&factors[0]).mul(&factors[1]);
        }
        numerator = numerator.add(&term);
    }

    let all_factors: Vec<Laurent2> = charts
        .iter()
        .flat_map(|(_, f)| f.iter().cloned())
        .collect();
    numerator
        .exact_div_binomials(&all_factors)
        .ok_or(CharacterError::NotLaurentPolynomial)
}

/// Tangent weights at a fixed point: for every ordered color pair
/// `(alpha, beta)`, box combinatorics at each vertex (shifted by the divisor
/// weights there) plus the `H^1` weights of `D_beta - D_alpha`, all offset by
/// `a_beta - a_alpha`.
pub fn tangent_character(
    chain: &ToricChain,
    config: &FixedPointConfig,
    table: &SymbolTable,
) -> Result<WeightMultiset, CharacterError> {
    let r = table.rank();
    config.check(chain, r)?;
    let mut out = WeightMultiset::new();
    for alpha in 0..r {
        for beta in 0..r {
            let a_shift = table.form_i(&[(table.a(beta), 1), (table.a(alpha), -1)]);
            for (v, vert) in chain.vertices().iter().enumerate() {
                let w1 = vert.w1.form(table);
                let w2 = vert.w2.form(table);
                let d_shift = chain
                    .divisor_weight_at(&config.divisors.parts[beta], v)
                    .sub(chain.divisor_weight_at(&config.divisors.parts[alpha], v))
                    .form(table);
                let shift = a_shift.add(&d_shift);
                for w in nst_weights(
                    &config.partitions[v].parts[alpha],
                    &config.partitions[v].parts[beta],
                    &w1,
                    &w2,
                ) {
                    out.push(shift.add(&w), 1, WeightOrigin::Vertex(v));
                }
            }
            if alpha != beta {
                let ddiff = config.divisors.parts[beta].sub(&config.divisors.parts[alpha]);
                for entry in h1_weights(chain, &ddiff)?.entries {
                    out.push(
                        a_shift.add(&lift_eps_form(&entry.form, table)),
                        entry.mult,
                        WeightOrigin::DivisorH1,
                    );
                }
            }
        }
    }
    Ok(out)
}

/// Natural-bundle weights at a fixed point: per color `beta`, the box
/// weights at each vertex shifted by the divisor weight there, plus the
/// `H^1` weights of `D_beta`, all offset by `a_beta`.
pub fn natural_character(
    chain: &ToricChain,
    config: &FixedPointConfig,
    table: &SymbolTable,
) -> Result<WeightMultiset, CharacterError> {
    let r = table.rank();
    config.check(chain, r)?;
    let mut out = WeightMultiset::new();
    for beta in 0..r {
        let a_form = table.form_i(&[(table.a(beta), 1)]);
        for (v, vert) in chain.vertices().iter().enumerate() {
            let w1 = vert.w1.form(table);
            let w2 = vert.w2.form(table);
            let shift = a_form.add(
                &chain
                    .divisor_weight_at(&config.divisors.parts[beta], v)
                    .form(table),
            );
            for w in ns_weights(&config.partitions[v].parts[beta], &w1, &w2) {
                out.push(shift.add(&w), 1, WeightOrigin::Vertex(v));
            }
        }
        for entry in h1_weights(chain, &config.divisors.parts[beta])?.entries {
            out.push(
                a_form.add(&lift_eps_form(&entry.form, table)),
                entry.mult,
                WeightOrigin::DivisorH1,
            );
        }
    }
    Ok(out)
}

/// Re-express a form living over the minimal `(eps1, eps2)` table in a
/// richer table.
pub(crate) fn lift_eps_form(form: &LinearForm, table: &SymbolTable) -> LinearForm {
    use num::ToPrimitive;
    let c1 = form.coeffs[0].to_i64().expect("integer eps1 coefficient");
    let c2 = form.coeffs[1].to_i64().expect("integer eps2 coefficient");
    debug_assert!(form.coeffs.iter().skip(2).all(num::Zero::is_zero));
    table.eps_form(c1, c2)
}

/// Closed-form edge character for the Hirzebruch surface of index `k`,
/// with `d_diff = d_alpha - d_beta` for divisors `d_alpha l0, d_beta l0`:
///
/// ```text
///   d_diff > 0:  sum_{j=0}^{d_diff-1} sum_{i=0}^{kj}   t1^{-i} t2^{-j}
///   d_diff < 0:  sum_{j=1}^{-d_diff}  sum_{i=1}^{kj-1} t1^{i}  t2^{j}
///   d_diff = 0:  0
/// ```
///
/// Used as an independent oracle for [`h1_weights`].
pub fn edge_character_closed_form_fk(k: i64, d_diff: i64) -> Laurent2 {
    assert!(k >= 1);
    let mut out = Laurent2::zero();
    if d_diff > 0 {
        for j in 0..d_diff {
            for i in 0..=(k * j) {
                out.add_term((-i, -j), 1);
            }
        }
    } else {
        for j in 1..=(-d_diff) {
            for i in 1..=(k * j - 1) {
                out.add_term((i, j), 1);
            }
        }
    }
    out
}
