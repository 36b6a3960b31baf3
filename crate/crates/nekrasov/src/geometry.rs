//! Toric surface data: the chain of fixed points, edge divisors, the
//! infinity-line data, intersection numbers, and divisor-tuple enumeration.
//!
//! A surface enters the engine as a [`ToricChain`]: the fixed points of the
//! open part `X0` form a chain graph whose vertices carry tangent weight
//! pairs and whose edges are the compact invariant curves `l_e`.  Each edge
//! stores the weight of `O(l_e)` at *every* vertex, so the weight of an
//! arbitrary divisor `D = sum m_e l_e` at a vertex is a plain linear
//! combination.  The line at infinity is summarized by its tangent weight
//! `w`, normal weight `u` and self-intersection `k > 0` at one of its two
//! fixed points; the weights at the other are then forced to `(-w, u - kw)`.
//!
//! All weights here are integer combinations of `eps1, eps2`, stored as
//! [`EpsWeight`] pairs so one chain can serve computations over any symbol
//! table; they convert to [`LinearForm`]s on demand.
//!
//! Every invariant is checked at construction/load time, never trusted:
//! chain shape, negative definiteness of the intersection form on the edge
//! span (leading principal minors), tangent-weight opposition along each
//! edge, degree consistency of the edge line-bundle weights, and the normal
//! weight relation at infinity.

use crate::algebra::ratfunc::RatFunc;
use crate::algebra::symbols::{LinearForm, SymbolTable};
use crate::{qi, Q};
use num::Zero;
use std::fmt;
use std::path::Path;

#[derive(Debug, thiserror::Error)]
pub enum GeometryError {
    #[error("unknown surface name {0:?} (expected \"C2\" or \"Fk\" with k >= 1)")]
    UnknownSurface(String),
    #[error("surface file: {0}")]
    Io(#[from] std::io::Error),
    #[error("surface file: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("vertex list is empty")]
    EmptyVertexList,
    #[error("not a chain: {vertices} vertices, {edges} edges")]
    NotAChain { vertices: usize, edges: usize },
    #[error("infinity line must have positive self-intersection, got k = {0}")]
    BadInfinityK(i64),
    #[error("normal weight relation violated: expected v = u - kw")]
    NormalWeightRelation,
    #[error("tangent weights at vertex {0} are linearly dependent")]
    DependentTangentWeights(usize),
    #[error("intersection matrix must be {edges}x{edges} and symmetric")]
    IntersectionMatrixShape { edges: usize },
    #[error("intersection matrix diagonal [{edge}] disagrees with the edge self-intersection")]
    DiagonalMismatch { edge: usize },
    #[error("chain edges {0} and {1} must meet with intersection number {2}")]
    OffDiagonal(usize, usize, i64),
    #[error("edge {0}: tangent weights at its endpoints are not opposite")]
    NoOppositeTangent(usize),
    #[error("edge {edge}: needs one line-bundle weight per vertex ({vertices})")]
    EdgeWeightCount { edge: usize, vertices: usize },
    #[error("edge {edge}: line-bundle weight at vertex {vertex} is inconsistent with the intersection numbers")]
    EdgeWeightInconsistent { edge: usize, vertex: usize },
    #[error("intersection form is not negative definite (leading minor {0})")]
    NotNegativeDefinite(usize),
    #[error("integrand list has {got} entries, surface has {expected} fixed points")]
    IntegrandCount { got: usize, expected: usize },
    #[error("divisor has {got} coefficients, surface has {expected} edges")]
    DivisorLength { got: usize, expected: usize },
    #[error(transparent)]
    Algebra(#[from] crate::algebra::AlgebraError),
}

/// An integer combination `c1*eps1 + c2*eps2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct EpsWeight {
    pub c1: i64,
    pub c2: i64,
}

impl EpsWeight {
    pub const ZERO: EpsWeight = EpsWeight { c1: 0, c2: 0 };

    pub fn new(c1: i64, c2: i64) -> Self {
        EpsWeight { c1, c2 }
    }

    pub fn is_zero(self) -> bool {
        self.c1 == 0 && self.c2 == 0
    }

    pub fn add(self, rhs: EpsWeight) -> EpsWeight {
        EpsWeight { c1: self.c1 + rhs.c1, c2: self.c2 + rhs.c2 }
    }

    pub fn sub(self, rhs: EpsWeight) -> EpsWeight {
        EpsWeight { c1: self.c1 - rhs.c1, c2: self.c2 - rhs.c2 }
    }

    pub fn neg(self) -> EpsWeight {
        EpsWeight { c1: -self.c1, c2: -self.c2 }
    }

    pub fn scale(self, m: i64) -> EpsWeight {
        EpsWeight { c1: self.c1 * m, c2: self.c2 * m }
    }

    /// Realize against a symbol table.
    pub fn form(self, table: &SymbolTable) -> LinearForm {
        table.eps_form(self.c1, self.c2)
    }
}

impl fmt::Display for EpsWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.c1, self.c2) {
            (0, 0) => write!(f, "0"),
            (c1, 0) => write!(f, "{c1}*eps1"),
            (0, c2) => write!(f, "{c2}*eps2"),
            (c1, c2) if c2 < 0 => write!(f, "{c1}*eps1 - {}*eps2", -c2),
            (c1, c2) => write!(f, "{c1}*eps1 + {c2}*eps2"),
        }
    }
}

/// A fixed point of the open surface with its two tangent weights.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Vertex {
    pub w1: EpsWeight,
    pub w2: EpsWeight,
}

/// A compact invariant curve `l_e` with its self-intersection and the weight
/// of `O(l_e)` at every vertex of the chain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub self_int: i64,
    pub weights_at: Vec<EpsWeight>,
}

/// Tangent/normal weights of the infinity line at its first fixed point,
/// plus `k`.  The second fixed point carries `(-w, u - kw)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InfinityLine {
    pub w: EpsWeight,
    pub u: EpsWeight,
    pub k: i64,
}

impl InfinityLine {
    /// Normal weight at the second fixed point, `u - kw`.
    pub fn v(&self) -> EpsWeight {
        self.u.sub(self.w.scale(self.k))
    }
}

/// Validated toric surface data.  Immutable after construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ToricChain {
    name: String,
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
    intersections: Vec<Vec<i64>>,
    linf: InfinityLine,
}

/// Divisor supported on the chain edges, `D = sum_e coeffs[e] * l_e`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DivisorVector(pub Vec<i64>);

impl DivisorVector {
    pub fn zero(n_edges: usize) -> Self {
        DivisorVector(vec![0; n_edges])
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&m| m == 0)
    }

    pub fn add(&self, rhs: &DivisorVector) -> DivisorVector {
        DivisorVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, rhs: &DivisorVector) -> DivisorVector {
        DivisorVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl fmt::Display for DivisorVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, m) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{m}")?;
        }
        write!(f, ")")
    }
}

/// One divisor per color.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DivisorTuple {
    pub parts: Vec<DivisorVector>,
}

impl fmt::Display for DivisorTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, d) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{d}")?;
        }
        write!(f, "]")
    }
}

impl ToricChain {
    /// Named built-in surface: `"C2"` (the plane, as the projective plane
    /// minus a line) or `"Fk"` for the k-th Hirzebruch surface, `k >= 1`.
    pub fn builtin(name: &str) -> Result<ToricChain, GeometryError> {
        if name == "C2" {
            let chain = ToricChain {
                name: "C2".into(),
                vertices: vec![Vertex {
                    w1: EpsWeight::new(1, 0),
                    w2: EpsWeight::new(0, 1),
                }],
                edges: vec![],
                intersections: vec![],
                // standard projective-plane action: the infinity line is
                // {Z0 = 0}, its first fixed point has tangent eps1 - eps2
                // and normal -eps2
                linf: InfinityLine {
                    w: EpsWeight::new(1, -1),
                    u: EpsWeight::new(0, -1),
                    k: 1,
                },
            };
            chain.validate()?;
            return Ok(chain);
        }
        if let Some(k) = name.strip_prefix('F').and_then(|s| s.parse::<i64>().ok()) {
            if k >= 1 {
                let chain = ToricChain {
                    name: format!("F{k}"),
                    vertices: vec![
                        Vertex { w1: EpsWeight::new(1, 0), w2: EpsWeight::new(0, 1) },
                        Vertex { w1: EpsWeight::new(-1, 0), w2: EpsWeight::new(k, 1) },
                    ],
                    edges: vec![Edge {
                        self_int: -k,
                        weights_at: vec![EpsWeight::new(0, 1), EpsWeight::new(k, 1)],
                    }],
                    intersections: vec![vec![-k]],
                    linf: InfinityLine {
                        w: EpsWeight::new(1, 0),
                        u: EpsWeight::new(0, -1),
                        k,
                    },
                };
                chain.validate()?;
                return Ok(chain);
            }
        }
        Err(GeometryError::UnknownSurface(name.to_string()))
    }

    /// Load and fully validate a surface description file.
    pub fn load(path: &Path) -> Result<ToricChain, GeometryError> {
        let text = std::fs::read_to_string(path)?;
        ToricChain::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<ToricChain, GeometryError> {
        let raw: RawSurface = serde_json::from_str(text)?;
        let chain = ToricChain {
            name: raw.name.unwrap_or_else(|| "custom".into()),
            vertices: raw
                .vertices
                .iter()
                .map(|v| Vertex {
                    w1: EpsWeight::new(v.w1[0], v.w1[1]),
                    w2: EpsWeight::new(v.w2[0], v.w2[1]),
                })
                .collect(),
            edges: raw
                .edges
                .iter()
                .map(|e| Edge {
                    self_int: e.self_intersection,
                    weights_at: e
                        .weights_at
                        .iter()
                        .map(|w| EpsWeight::new(w[0], w[1]))
                        .collect(),
                })
                .collect(),
            intersections: raw.intersections,
            linf: InfinityLine {
                w: EpsWeight::new(raw.linf.w[0], raw.linf.w[1]),
                u: EpsWeight::new(raw.linf.u[0], raw.linf.u[1]),
                k: raw.linf.k,
            },
        };
        if let Some(v) = raw.linf.v {
            if EpsWeight::new(v[0], v[1]) != chain.linf.v() {
                return Err(GeometryError::NormalWeightRelation);
            }
        }
        chain.validate()?;
        Ok(chain)
    }

    fn validate(&self) -> Result<(), GeometryError> {
        let nv = self.vertices.len();
        let ne = self.edges.len();
        if nv == 0 {
            return Err(GeometryError::EmptyVertexList);
        }
        if nv != ne + 1 {
            return Err(GeometryError::NotAChain { vertices: nv, edges: ne });
        }
        if self.linf.k < 1 {
            return Err(GeometryError::BadInfinityK(self.linf.k));
        }
        for (i, v) in self.vertices.iter().enumerate() {
            if v.w1.c1 * v.w2.c2 - v.w1.c2 * v.w2.c1 == 0 {
                return Err(GeometryError::DependentTangentWeights(i));
            }
        }
        if self.linf.w.is_zero() || self.linf.u.is_zero() {
            return Err(GeometryError::NormalWeightRelation);
        }

        // intersection matrix: shape, symmetry, diagonal, chain off-diagonal
        if self.intersections.len() != ne
            || self.intersections.iter().any(|row| row.len() != ne)
        {
            return Err(GeometryError::IntersectionMatrixShape { edges: ne });
        }
        for e in 0..ne {
            if self.intersections[e][e] != self.edges[e].self_int {
                return Err(GeometryError::DiagonalMismatch { edge: e });
            }
            for f in 0..ne {
                if self.intersections[e][f] != self.intersections[f][e] {
                    return Err(GeometryError::IntersectionMatrixShape { edges: ne });
                }
                // consecutive curves of a chain meet once, others are disjoint
                if e != f {
                    let expected = i64::from(e.abs_diff(f) == 1);
                    if self.intersections[e][f] != expected {
                        return Err(GeometryError::OffDiagonal(e, f, expected));
                    }
                }
            }
        }

        // negative definiteness: (-1)^m * (leading principal minor of size m) > 0
        for m in 1..=ne {
            let det = det_i128(&self.intersections, m);
            let sign = if m % 2 == 0 { 1 } else { -1 };
            if sign * det <= 0 {
                return Err(GeometryError::NotNegativeDefinite(m));
            }
        }

        // per-edge data: one weight per vertex, and degree consistency: for
        // consecutive vertices v_i, v_{i+1} joined by l_f with tangent tau at
        // v_{i+1}, the weight of O(l_e) satisfies
        //   w_e^{v_{i+1}} - w_e^{v_i} = (l_e . l_f) tau
        let mut edge_tangents = Vec::with_capacity(ne); // tau at the right endpoint
        for f in 0..ne {
            let lo = &self.vertices[f];
            let hi = &self.vertices[f + 1];
            let tau = [hi.w1, hi.w2]
                .into_iter()
                .find(|t| [lo.w1, lo.w2].contains(&t.neg()))
                .ok_or(GeometryError::NoOppositeTangent(f))?;
            edge_tangents.push(tau);
        }
        for (e, edge) in self.edges.iter().enumerate() {
            if edge.weights_at.len() != nv {
                return Err(GeometryError::EdgeWeightCount { edge: e, vertices: nv });
            }
            for f in 0..ne {
                let step = edge.weights_at[f + 1].sub(edge.weights_at[f]);
                if step != edge_tangents[f].scale(self.intersections[e][f]) {
                    return Err(GeometryError::EdgeWeightInconsistent { edge: e, vertex: f + 1 });
                }
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn linf(&self) -> &InfinityLine {
        &self.linf
    }

    /// `l_e . l_f`.
    pub fn edge_pairing(&self, e: usize, f: usize) -> i64 {
        self.intersections[e][f]
    }

    /// `c1(X) . l_e = 2 + l_e . l_e` (adjunction for rational curves).
    pub fn c1_dot_edge(&self, e: usize) -> i64 {
        2 + self.edges[e].self_int
    }

    fn check_len(&self, d: &DivisorVector) -> Result<(), GeometryError> {
        if d.0.len() != self.n_edges() {
            return Err(GeometryError::DivisorLength {
                got: d.0.len(),
                expected: self.n_edges(),
            });
        }
        Ok(())
    }

    /// Intersection number `D . D'`.
    pub fn dot(&self, d1: &DivisorVector, d2: &DivisorVector) -> i64 {
        let mut acc = 0i64;
        for (e, &me) in d1.0.iter().enumerate() {
            for (f, &mf) in d2.0.iter().enumerate() {
                acc += me * mf * self.intersections[e][f];
            }
        }
        acc
    }

    /// `c1(X) . D`.
    pub fn c1_dot(&self, d: &DivisorVector) -> i64 {
        d.0.iter()
            .enumerate()
            .map(|(e, &m)| m * self.c1_dot_edge(e))
            .sum()
    }

    /// Degrees `(int_{l_e} D)_e`, the exponents of the box-counting variables.
    pub fn edge_degrees(&self, d: &DivisorVector) -> Vec<i64> {
        (0..self.n_edges())
            .map(|e| {
                d.0.iter()
                    .enumerate()
                    .map(|(f, &m)| m * self.intersections[e][f])
                    .sum()
            })
            .collect()
    }

    /// Weight of `O(D)` at vertex `v`: the same linear combination of edge
    /// weights that defines `D`.
    pub fn divisor_weight_at(&self, d: &DivisorVector, v: usize) -> EpsWeight {
        let mut acc = EpsWeight::ZERO;
        for (e, &m) in d.0.iter().enumerate() {
            acc = acc.add(self.edges[e].weights_at[v].scale(m));
        }
        acc
    }

    /// `|D_vec|^2 = -1/2 sum_{alpha != beta} (D_alpha - D_beta)^2`; a
    /// nonnegative integer by negative definiteness.
    pub fn dsq_norm(&self, t: &DivisorTuple) -> i64 {
        let mut acc = 0i64;
        for a in 0..t.parts.len() {
            for b in (a + 1)..t.parts.len() {
                let diff = t.parts[a].sub(&t.parts[b]);
                acc -= self.dot(&diff, &diff);
            }
        }
        debug_assert!(acc >= 0, "negative |D|^2 on a validated chain");
        acc
    }

    /// All tuples `(D_1, ..., D_r)` with `sum D_alpha = d` and
    /// `|D_vec|^2 <= bound`, in deterministic (lexicographic) order.
    ///
    /// Finiteness comes from negative definiteness: each pairwise difference
    /// lies in the ellipsoid `-x.S.x <= bound`, which meets the lattice in
    /// finitely many points; per-coordinate bounds are read off the inverse
    /// form exactly.
    pub fn enumerate_divisor_tuples(
        &self,
        r: usize,
        d: &DivisorVector,
        bound: i64,
    ) -> Result<Vec<DivisorTuple>, GeometryError> {
        assert!(r >= 1, "rank must be at least 1");
        self.check_len(d)?;
        let ne = self.n_edges();
        if r == 1 {
            return Ok(vec![DivisorTuple { parts: vec![d.clone()] }]);
        }
        if bound < 0 {
            return Ok(vec![]);
        }

        // candidate displacements x with -x.S.x <= bound
        let candidates = self.lattice_points_in_ellipsoid(bound);

        // D_alpha = x_alpha + D_r for alpha < r; the constraint sum D = d
        // pins r*D_r = d - sum x_alpha, which must be divisible by r
        let mut out = Vec::new();
        let mut choice = vec![0usize; r - 1];
        'outer: loop {
            let mut total = DivisorVector::zero(ne);
            for &c in &choice {
                total = total.add(&candidates[c]);
            }
            let rem = d.sub(&total);
            if rem.0.iter().all(|&m| m % (r as i64) == 0) {
                let dr = DivisorVector(rem.0.iter().map(|&m| m / (r as i64)).collect());
                let mut parts: Vec<DivisorVector> =
                    choice.iter().map(|&c| candidates[c].add(&dr)).collect();
                parts.push(dr);
                let tuple = DivisorTuple { parts };
                if self.dsq_norm(&tuple) <= bound {
                    out.push(tuple);
                }
            }
            // odometer over candidate indices
            for slot in (0..r - 1).rev() {
                choice[slot] += 1;
                if choice[slot] < candidates.len() {
                    continue 'outer;
                }
                choice[slot] = 0;
            }
            break;
        }
        out.sort();
        out.dedup();
        Ok(out)
    }

    /// Lattice vectors `x` with `-x.S.x <= bound`, sorted.
    fn lattice_points_in_ellipsoid(&self, bound: i64) -> Vec<DivisorVector> {
        let ne = self.n_edges();
        if ne == 0 {
            return vec![DivisorVector::zero(0)];
        }
        // x_e^2 <= bound * (A^{-1})_{ee} for A = -S positive definite
        let ainv = invert_rational(&self.intersections, -1);
        let box_bounds = box_bounds_from_inverse(&ainv, bound);
        let mut out = Vec::new();
        let mut x = box_bounds.iter().map(|&b| -b).collect::<Vec<i64>>();
        loop {
            let dv = DivisorVector(x.clone());
            if -self.dot(&dv, &dv) <= bound {
                out.push(dv);
            }
            let mut slot = ne;
            loop {
                if slot == 0 {
                    out.sort();
                    return out;
                }
                slot -= 1;
                x[slot] += 1;
                if x[slot] <= box_bounds[slot] {
                    break;
                }
                x[slot] = -box_bounds[slot];
            }
        }
    }

    /// Divisors whose edge degrees all lie in `[-dbound, dbound]`, in
    /// lexicographic order of the degree vector.
    ///
    /// The intersection form is invertible, so degree vectors parameterize
    /// divisors bijectively; a degree box pulls back to the finite set of
    /// integral preimages under `S^{-1}`.
    pub fn divisors_with_degree_bound(&self, dbound: i64) -> Vec<DivisorVector> {
        assert!(dbound >= 0, "degree bound must be nonnegative");
        let ne = self.n_edges();
        if ne == 0 {
            return vec![DivisorVector::zero(0)];
        }
        let sinv = invert_rational(&self.intersections, 1);
        let mut out = Vec::new();
        let mut q = vec![-dbound; ne];
        loop {
            let mut coords = Vec::with_capacity(ne);
            for row in &sinv {
                let mut acc = Q::from_integer(0.into());
                for (f, &qf) in q.iter().enumerate() {
                    acc += row[f].clone() * Q::from_integer(qf.into());
                }
                coords.push(acc);
            }
            if coords.iter().all(num::BigRational::is_integer) {
                use num::ToPrimitive;
                out.push(DivisorVector(
                    coords
                        .iter()
                        .map(|c| c.to_integer().to_i64().expect("divisor coordinate fits i64"))
                        .collect(),
                ));
            }
            let mut slot = ne;
            loop {
                if slot == 0 {
                    return out;
                }
                slot -= 1;
                q[slot] += 1;
                if q[slot] <= dbound {
                    break;
                }
                q[slot] = -dbound;
            }
        }
    }

    /// Tangent weight pairs at the fixed points of the open surface.
    pub fn x0_fixed_points(&self) -> Vec<(EpsWeight, EpsWeight)> {
        self.vertices.iter().map(|v| (v.w1, v.w2)).collect()
    }

    /// Tangent weight pairs at all fixed points of the compact surface: the
    /// chain vertices followed by the two points on the infinity line.
    pub fn compact_fixed_points(&self) -> Vec<(EpsWeight, EpsWeight)> {
        let mut out = self.x0_fixed_points();
        let l = &self.linf;
        out.push((l.w, l.u));
        out.push((l.w.neg(), l.v()));
        out
    }

    /// Localization sum over the open surface: one integrand value per
    /// vertex, divided by the product of the tangent weights there.
    pub fn integral_x0(
        &self,
        integrand: &[RatFunc],
        table: &SymbolTable,
    ) -> Result<RatFunc, GeometryError> {
        self.localize(&self.x0_fixed_points(), integrand, table)
    }

    /// Localization sum over the compact surface (integrand values in the
    /// order of [`ToricChain::compact_fixed_points`]).
    pub fn integral_compact(
        &self,
        integrand: &[RatFunc],
        table: &SymbolTable,
    ) -> Result<RatFunc, GeometryError> {
        self.localize(&self.compact_fixed_points(), integrand, table)
    }

    fn localize(
        &self,
        points: &[(EpsWeight, EpsWeight)],
        integrand: &[RatFunc],
        table: &SymbolTable,
    ) -> Result<RatFunc, GeometryError> {
        if integrand.len() != points.len() {
            return Err(GeometryError::IntegrandCount {
                got: integrand.len(),
                expected: points.len(),
            });
        }
        let n = table.n_vars();
        let mut acc = RatFunc::zero(n);
        for ((w1, w2), val) in points.iter().zip(integrand) {
            let euler = RatFunc::from_linear(&w1.form(table))
                .mul(&RatFunc::from_linear(&w2.form(table)));
            acc = acc.add(&val.div(&euler)?);
        }
        Ok(acc)
    }
}

impl fmt::Display for ToricChain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "surface {}:", self.name)?;
        for (i, v) in self.vertices.iter().enumerate() {
            writeln!(f, "  vertex {i}: tangent weights ({}, {})", v.w1, v.w2)?;
        }
        for (e, edge) in self.edges.iter().enumerate() {
            write!(f, "  edge {e}: self-intersection {}, weights", edge.self_int)?;
            for w in &edge.weights_at {
                write!(f, " [{w}]")?;
            }
            writeln!(f)?;
        }
        writeln!(
            f,
            "  infinity line: w = {}, u = {}, k = {}",
            self.linf.w, self.linf.u, self.linf.k
        )
    }
}

/// Leading principal `m x m` minor determinant (cofactor expansion; the
/// matrices here have at most a handful of rows).
fn det_i128(mat: &[Vec<i64>], m: usize) -> i64 {
    fn rec(mat: &[Vec<i64>], rows: &[usize], cols: &[usize]) -> i128 {
        if rows.is_empty() {
            return 1;
        }
        let r = rows[0];
        let rest: Vec<usize> = rows[1..].to_vec();
        let mut acc = 0i128;
        for (i, &c) in cols.iter().enumerate() {
            let entry = mat[r][c] as i128;
            if entry == 0 {
                continue;
            }
            let sub: Vec<usize> = cols
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, &cc)| cc)
                .collect();
            let sign = if i % 2 == 0 { 1 } else { -1 };
            acc += sign * entry * rec(mat, &rest, &sub);
        }
        acc
    }
    let idx: Vec<usize> = (0..m).collect();
    i64::try_from(rec(mat, &idx, &idx)).expect("minor determinant overflow")
}

/// Exact inverse of `scale * mat` (rational Gauss-Jordan; panics if
/// singular, which negative definiteness rules out).
fn invert_rational(mat: &[Vec<i64>], scale: i64) -> Vec<Vec<Q>> {
    let n = mat.len();
    let mut a: Vec<Vec<Q>> = (0..n)
        .map(|i| (0..n).map(|j| qi(scale * mat[i][j])).collect())
        .collect();
    let mut inv: Vec<Vec<Q>> = (0..n)
        .map(|i| (0..n).map(|j| qi(i64::from(i == j))).collect())
        .collect();
    for col in 0..n {
        let pivot = (col..n)
            .find(|&row| !a[row][col].is_zero())
            .expect("singular matrix");
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let p = a[col][col].clone();
        for j in 0..n {
            a[col][j] = a[col][j].clone() / p.clone();
            inv[col][j] = inv[col][j].clone() / p.clone();
        }
        for row in 0..n {
            if row == col || a[row][col].is_zero() {
                continue;
            }
            let factor = a[row][col].clone();
            for j in 0..n {
                a[row][j] = a[row][j].clone() - factor.clone() * a[col][j].clone();
                inv[row][j] = inv[row][j].clone() - factor.clone() * inv[col][j].clone();
            }
        }
    }
    inv
}

/// Per-coordinate bound for `x.A.x <= c`: the largest integer `b_e` with
/// `b_e^2 <= c * (A^{-1})_{ee}`.
fn box_bounds_from_inverse(ainv: &[Vec<Q>], c: i64) -> Vec<i64> {
    use num::ToPrimitive;
    (0..ainv.len())
        .map(|e| {
            let val = ainv[e][e].clone() * qi(c);
            if val < Q::zero() {
                return 0;
            }
            // floor(sqrt(p/q)) = isqrt(floor(p/q)) for integer results
            let fl = val.to_integer();
            fl.sqrt().to_i64().expect("box bound overflow")
        })
        .collect()
}

#[derive(serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSurface {
    name: Option<String>,
    vertices: Vec<RawVertex>,
    edges: Vec<RawEdge>,
    intersections: Vec<Vec<i64>>,
    linf: RawLinf,
}

#[derive(serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct RawVertex {
    w1: [i64; 2],
    w2: [i64; 2],
}

#[derive(serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEdge {
    self_intersection: i64,
    weights_at: Vec<[i64; 2]>,
}

#[derive(serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLinf {
    w: [i64; 2],
    u: [i64; 2],
    k: i64,
    v: Option<[i64; 2]>,
}
