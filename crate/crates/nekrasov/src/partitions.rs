//! Young-diagram combinatorics.
//!
//! Partitions are stored as weakly decreasing rows of positive lengths; cells
//! are addressed `(row, col)` with 0-based indices, row 0 the longest.  The
//! two statistics everything else is built from are the arm and leg of a cell
//! measured against an arbitrary diagram: for `s = (i, j)`,
//!
//! ```text
//!   arm_S(s) = S_i - j - 1        (boxes strictly right of s in its row)
//!   leg_S(s) = S'_j - i - 1       (boxes strictly below s in its column)
//! ```
//!
//! where `S'` is the transpose.  Both are defined for cells *outside* `S` as
//! well, where they go negative; the mixed-diagram weight lists below rely on
//! that.  The transpose is computed once per diagram and memoized, since
//! arm/leg queries dominate everything downstream.
//!
//! The two weight multisets exported here are the tangent-space character of
//! a pair of monomial ideals on a chart with weights `(w1, w2)`,
//!
//! ```text
//!   N_{S,T} = { -leg_T(s) w1 + (arm_S(s)+1) w2 : s in S }
//!           u { (leg_S(t)+1) w1 - arm_T(t) w2  : t in T }
//! ```
//!
//! and the character of a single staircase, `N_S = { -i w1 - j w2 : (i,j) in
//! S }` (colength exponents).  Tests pin `N_{S,T}` against the independent
//! generating-function form
//! `Q_S t1 t2 + Q_T(1/t1, 1/t2) - Q_S Q_T(1/t1, 1/t2)(1-t1)(1-t2)`.

use crate::algebra::symbols::LinearForm;
use std::fmt;
use std::sync::OnceLock;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum PartitionError {
    #[error("rows must be positive and weakly decreasing, got {0:?}")]
    InvalidRows(Vec<u32>),
    #[error("cell ({0}, {1}) lies outside the diagram")]
    CellOutside(usize, usize),
}

/// A partition / Young diagram.
///
/// Invariants: every row length is positive and the list is weakly
/// decreasing.  Equality, ordering and hashing look only at the rows; the
/// memoized transpose is ignored.
#[derive(Debug, Default)]
pub struct Partition {
    rows: Vec<u32>,
    cols: OnceLock<Vec<u32>>,
}

impl Clone for Partition {
    fn clone(&self) -> Self {
        let cols = OnceLock::new();
        if let Some(c) = self.cols.get() {
            let _ = cols.set(c.clone());
        }
        Partition { rows: self.rows.clone(), cols }
    }
}

impl PartialEq for Partition {
    fn eq(&self, other: &Self) -> bool {
        self.rows == other.rows
    }
}
impl Eq for Partition {}

impl PartialOrd for Partition {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Lexicographic on rows; enumeration emits diagrams in descending order.
impl Ord for Partition {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.rows.cmp(&other.rows)
    }
}

impl std::hash::Hash for Partition {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.rows.hash(state);
    }
}

impl Partition {
    /// Build from row lengths, validating the shape.
    pub fn new(rows: Vec<u32>) -> Result<Self, PartitionError> {
        let ok = rows.iter().all(|&r| r > 0) && rows.windows(2).all(|w| w[0] >= w[1]);
        if !ok {
            return Err(PartitionError::InvalidRows(rows));
        }
        Ok(Partition { rows, cols: OnceLock::new() })
    }

    pub fn empty() -> Self {
        Partition::default()
    }

    pub fn rows(&self) -> &[u32] {
        &self.rows
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    /// Total number of boxes.
    pub fn size(&self) -> u64 {
        self.rows.iter().map(|&r| r as u64).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Length of row `i`, zero beyond the diagram.
    pub fn row_len(&self, i: usize) -> u32 {
        self.rows.get(i).copied().unwrap_or(0)
    }

    /// Length of column `j`, zero beyond the diagram.
    pub fn col_len(&self, j: usize) -> u32 {
        self.col_lens().get(j).copied().unwrap_or(0)
    }

    fn col_lens(&self) -> &[u32] {
        self.cols.get_or_init(|| {
            let width = self.rows.first().copied().unwrap_or(0) as usize;
            let mut cols = vec![0u32; width];
            for (j, c) in cols.iter_mut().enumerate() {
                *c = self.rows.iter().take_while(|&&r| r as usize > j).count() as u32;
            }
            cols
        })
    }

    /// The transposed diagram.
    pub fn transposed(&self) -> Partition {
        Partition { rows: self.col_lens().to_vec(), cols: OnceLock::new() }
    }

    pub fn contains(&self, cell: (usize, usize)) -> bool {
        (cell.1 as u64) < self.row_len(cell.0) as u64
    }

    /// Cells in row-major order.
    pub fn cells(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(i, &r)| (0..r as usize).map(move |j| (i, j)))
    }

    /// Arm of `cell` measured in this diagram; negative when outside.
    pub fn arm(&self, cell: (usize, usize)) -> i64 {
        self.row_len(cell.0) as i64 - cell.1 as i64 - 1
    }

    /// Leg of `cell` measured in this diagram; negative when outside.
    pub fn leg(&self, cell: (usize, usize)) -> i64 {
        self.col_len(cell.1) as i64 - cell.0 as i64 - 1
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, r) in self.rows.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{r}")?;
        }
        write!(f, ")")
    }
}

/// Arm of `cell` in `s` and leg of `cell` in `t`.
///
/// The cell must lie in `s` (its arm there is the standard nonnegative
/// statistic); the leg against `t` may be negative when `t` is smaller.
pub fn arm_leg(
    s: &Partition,
    t: &Partition,
    cell: (usize, usize),
) -> Result<(i64, i64), PartitionError> {
    if !s.contains(cell) {
        return Err(PartitionError::CellOutside(cell.0, cell.1));
    }
    Ok((s.arm(cell), t.leg(cell)))
}

/// Tangent weight multiset `N_{S,T}(w1, w2)`.
///
/// Size is always `|S| + |T|`; order is row-major over `S` then row-major
/// over `T`, so output is deterministic but only multiset equality is
/// meaningful.
pub fn nst_weights(
    s: &Partition,
    t: &Partition,
    w1: &LinearForm,
    w2: &LinearForm,
) -> Vec<LinearForm> {
    let mut out = Vec::with_capacity((s.size() + t.size()) as usize);
    for cell in s.cells() {
        out.push(w1.scale_i(-t.leg(cell)).add(&w2.scale_i(s.arm(cell) + 1)));
    }
    for cell in t.cells() {
        out.push(w1.scale_i(s.leg(cell) + 1).add(&w2.scale_i(-t.arm(cell))));
    }
    out
}

/// Staircase weight multiset `N_S(w1, w2) = { -i w1 - j w2 : (i,j) in S }`.
///
/// The exponents are the colengths of each box, so the box at the origin
/// contributes the zero form.
pub fn ns_weights(s: &Partition, w1: &LinearForm, w2: &LinearForm) -> Vec<LinearForm> {
    s.cells()
        .map(|(i, j)| w1.scale_i(-(i as i64)).add(&w2.scale_i(-(j as i64))))
        .collect()
}

/// An ordered `r`-tuple of partitions, one per color.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PartitionTuple {
    pub parts: Vec<Partition>,
}

impl PartitionTuple {
    pub fn new(parts: Vec<Partition>) -> Self {
        PartitionTuple { parts }
    }

    pub fn rank(&self) -> usize {
        self.parts.len()
    }

    /// `|Y| = sum of the component sizes`.
    pub fn total_size(&self) -> u64 {
        self.parts.iter().map(Partition::size).sum()
    }
}

impl fmt::Display for PartitionTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, "]")
    }
}

/// All partitions of `n` in descending lexicographic order:
/// `(n), (n-1,1), ..., (1,...,1)`.
pub fn enumerate_partitions(n: u32) -> Vec<Partition> {
    fn rec(remaining: u32, max_part: u32, prefix: &mut Vec<u32>, out: &mut Vec<Partition>) {
        if remaining == 0 {
            out.push(Partition { rows: prefix.clone(), cols: OnceLock::new() });
            return;
        }
        let hi = max_part.min(remaining);
        for part in (1..=hi).rev() {
            prefix.push(part);
            rec(remaining - part, part, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, n, &mut Vec::new(), &mut out);
    out
}

/// All `r`-tuples with total size `n`.
///
/// Order: size splits `(n_1, ..., n_r)` with `n_1` descending (then `n_2`,
/// ...), and within a split the cross product of the per-slot partition lists
/// in their descending order.  Deterministic across runs and platforms.
pub fn enumerate_tuples(r: usize, n: u32) -> Vec<PartitionTuple> {
    assert!(r >= 1, "rank must be at least 1");
    fn rec(
        slots_left: usize,
        remaining: u32,
        prefix: &mut Vec<Partition>,
        out: &mut Vec<PartitionTuple>,
    ) {
        if slots_left == 1 {
            for p in enumerate_partitions(remaining) {
                prefix.push(p);
                out.push(PartitionTuple { parts: prefix.clone() });
                prefix.pop();
            }
            return;
        }
        for k in (0..=remaining).rev() {
            for p in enumerate_partitions(k) {
                prefix.push(p);
                rec(slots_left - 1, remaining - k, prefix, out);
                prefix.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(r, n, &mut Vec::new(), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::laurent2::Laurent2;
    use crate::algebra::symbols::SymbolTable;
    use crate::Q;

    fn pt(rows: &[u32]) -> Partition {
        Partition::new(rows.to_vec()).unwrap()
    }

    fn st() -> SymbolTable {
        SymbolTable::new(1, 0, false)
    }

    /// Multisets of linear forms compared as sorted coefficient vectors.
    fn sorted_coeffs(v: &[LinearForm]) -> Vec<Vec<Q>> {
        let mut out: Vec<Vec<Q>> = v
            .iter()
            .map(|f| {
                (0..f.n_vars())
                    .map(|i| f.coeff(crate::algebra::symbols::Sym(i)).clone())
                    .collect()
            })
            .collect();
        out.sort();
        out
    }

    #[test]
    fn shape_validation() {
        assert!(Partition::new(vec![3, 1]).is_ok());
        assert_eq!(
            Partition::new(vec![1, 2]),
            Err(PartitionError::InvalidRows(vec![1, 2]))
        );
        assert_eq!(
            Partition::new(vec![2, 0]),
            Err(PartitionError::InvalidRows(vec![2, 0]))
        );
    }

    #[test]
    fn arm_leg_examples() {
        // single box against the empty diagram
        let (a, l) = arm_leg(&pt(&[1]), &Partition::empty(), (0, 0)).unwrap();
        assert_eq!((a, l), (0, -1));

        // hook (3,1): corner box has arm 2, leg 1
        let s = pt(&[3, 1]);
        assert_eq!(s.arm((0, 0)), 2);
        assert_eq!(s.leg((0, 0)), 1);

        // cell (1,1) of the square against the single box: column 1 of (1)
        // is empty, so the leg is 0 - 1 - 1 = -2.  (The value is pinned by
        // the generating-function cross-check below: -1 here would break
        // nst_matches_generating_function_form for S=(2,2), T=(1).)
        let (_, l) = arm_leg(&pt(&[2, 2]), &pt(&[1]), (1, 1)).unwrap();
        assert_eq!(l, -2);

        assert_eq!(
            arm_leg(&pt(&[1]), &pt(&[1]), (0, 1)),
            Err(PartitionError::CellOutside(0, 1))
        );
    }

    #[test]
    fn transpose_involution_and_duality() {
        for n in 0..=6u32 {
            for p in enumerate_partitions(n) {
                let tp = p.transposed();
                assert_eq!(tp.size(), p.size());
                assert_eq!(tp.transposed(), p);
                // arm/leg swap under transpose at mirrored cells
                for (i, j) in p.cells() {
                    assert_eq!(tp.arm((j, i)), p.leg((i, j)));
                    assert_eq!(tp.leg((j, i)), p.arm((i, j)));
                }
            }
        }
    }

    #[test]
    fn nst_known_values() {
        let t = st();
        let (e1, e2) = (t.eps_form(1, 0), t.eps_form(0, 1));

        assert!(nst_weights(&Partition::empty(), &Partition::empty(), &e1, &e2).is_empty());

        let w = nst_weights(&pt(&[1]), &pt(&[1]), &e1, &e2);
        assert_eq!(sorted_coeffs(&w), sorted_coeffs(&[e2.clone(), e1.clone()]));

        let w = nst_weights(&pt(&[1]), &Partition::empty(), &e1, &e2);
        assert_eq!(sorted_coeffs(&w), sorted_coeffs(&[e1.add(&e2)]));
    }

    #[test]
    fn ns_known_values() {
        let t = st();
        let (e1, e2) = (t.eps_form(1, 0), t.eps_form(0, 1));
        assert!(ns_weights(&Partition::empty(), &e1, &e2).is_empty());

        let w = ns_weights(&pt(&[1]), &e1, &e2);
        assert_eq!(sorted_coeffs(&w), sorted_coeffs(&[t.zero_form()]));

        let w = ns_weights(&pt(&[2, 1]), &e1, &e2);
        assert_eq!(
            sorted_coeffs(&w),
            sorted_coeffs(&[t.zero_form(), e2.neg(), e1.neg()])
        );
    }

    /// `Q_Y(s1, s2) = sum over boxes of s1^row s2^col`.
    fn q_poly(y: &Partition) -> Laurent2 {
        let mut q = Laurent2::zero();
        for (i, j) in y.cells() {
            q.add_term((i as i64, j as i64), 1);
        }
        q
    }

    /// Independent generating-function form of the pair character.
    fn nst_via_q(s: &Partition, t: &Partition) -> Laurent2 {
        let qs = q_poly(s);
        let qt_inv = q_poly(t).invert_vars();
        let mut out = qs.mul(&Laurent2::monomial(1, 1));
        out = out.add(&qt_inv);
        let corr = qs
            .mul(&qt_inv)
            .mul(&Laurent2::one_minus(1, 0))
            .mul(&Laurent2::one_minus(0, 1));
        out.sub(&corr)
    }

    #[test]
    fn nst_matches_generating_function_form() {
        let t = st();
        let (e1, e2) = (t.eps_form(1, 0), t.eps_form(0, 1));
        for ns in 0..=4u32 {
            for nt in 0..=4u32 {
                for s in enumerate_partitions(ns) {
                    for tt in enumerate_partitions(nt) {
                        let weights = nst_weights(&s, &tt, &e1, &e2);
                        assert_eq!(weights.len() as u64, s.size() + tt.size());
                        let mut from_weights = Laurent2::zero();
                        for w in &weights {
                            let c1 = w.coeff(t.eps1()).to_integer();
                            let c2 = w.coeff(t.eps2()).to_integer();
                            use num::ToPrimitive;
                            from_weights
                                .add_term((c1.to_i64().unwrap(), c2.to_i64().unwrap()), 1);
                        }
                        assert_eq!(from_weights, nst_via_q(&s, &tt), "S={s} T={tt}");
                    }
                }
            }
        }
    }

    #[test]
    fn nst_transpose_duality() {
        let t = st();
        let (e1, e2) = (t.eps_form(1, 0), t.eps_form(0, 1));
        for ns in 0..=4u32 {
            for nt in 0..=4u32 {
                for s in enumerate_partitions(ns) {
                    for tt in enumerate_partitions(nt) {
                        let a = nst_weights(&s, &tt, &e1, &e2);
                        let b = nst_weights(&s.transposed(), &tt.transposed(), &e2, &e1);
                        assert_eq!(sorted_coeffs(&a), sorted_coeffs(&b), "S={s} T={tt}");
                    }
                }
            }
        }
    }

    #[test]
    fn diagonal_tangent_weights_are_nonzero() {
        let t = st();
        let (e1, e2) = (t.eps_form(1, 0), t.eps_form(0, 1));
        for n in 0..=6u32 {
            for y in enumerate_partitions(n) {
                for w in nst_weights(&y, &y, &e1, &e2) {
                    assert!(!w.is_zero(), "zero tangent weight at Y={y}");
                }
            }
        }
    }

    #[test]
    fn enumeration_counts_and_order() {
        assert_eq!(enumerate_partitions(0).len(), 1);
        assert_eq!(
            enumerate_partitions(4)
                .iter()
                .map(|p| p.rows().to_vec())
                .collect::<Vec<_>>(),
            vec![vec![4], vec![3, 1], vec![2, 2], vec![2, 1, 1], vec![1, 1, 1, 1]]
        );

        let t = enumerate_tuples(1, 2);
        assert_eq!(t.len(), 2);

        let t = enumerate_tuples(2, 1);
        assert_eq!(t.len(), 2);
        assert_eq!(t[0].parts, vec![pt(&[1]), Partition::empty()]);
        assert_eq!(t[1].parts, vec![Partition::empty(), pt(&[1])]);

        // sum_k p(k) p(3-k) = 3 + 2 + 2 + 3 = 10
        assert_eq!(enumerate_tuples(2, 3).len(), 10);

        // all tuples distinct and of the right size
        let t = enumerate_tuples(3, 4);
        for tuple in &t {
            assert_eq!(tuple.total_size(), 4);
            assert_eq!(tuple.rank(), 3);
        }
        let mut seen = t.clone();
        seen.sort();
        seen.dedup();
        assert_eq!(seen.len(), t.len());
    }
}
