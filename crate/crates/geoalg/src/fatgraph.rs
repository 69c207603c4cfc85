//! Fat graphs with pending edges, SL(2) words for the Fuchsian generators,
//! geodesic functions and the Goldman bracket in shear coordinates.
//!
//! Shear exponentials are the half-variables `s_i = e^{Z_i/2}` (atom `S(i)`)
//! and `t_j = e^{Y_j/2}` (atom `T(j)`).

use std::collections::BTreeMap;

use thiserror::Error;

use crate::poly_core::{Atom, SymExpr};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("rank {0} is below 3")]
    RankTooSmall(usize),
    #[error("index pair ({0},{1}) out of range for rank {2}")]
    IndexOutOfRange(usize, usize, usize),
    #[error("variable {0} does not belong to this graph")]
    ForeignVariable(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Edge {
    Pending(usize),
    Inner(usize),
}

impl Edge {
    pub fn atom(self) -> Atom {
        match self {
            Edge::Pending(i) => Atom::S(i as u16),
            Edge::Inner(j) => Atom::T(j as u16),
        }
    }
}

/// Trivalent fat graph of a disc with `n` pending edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FatGraph {
    n: usize,
    /// Counterclockwise cyclic order of edge-ends at each trivalent vertex.
    vertices: Vec<[Edge; 3]>,
}

/// The caterpillar graph: vertex 1 carries `Z_1, Z_2, Y_1`, vertex k carries
/// `Y_{k-1}, Z_{k+1}, Y_k`, the last carries `Y_{n-3}, Z_{n-1}, Z_n`.
pub fn canonical_disc_graph(n: usize) -> Result<FatGraph, GraphError> {
    if n < 3 {
        return Err(GraphError::RankTooSmall(n));
    }
    let vertices = if n == 3 {
        vec![[Edge::Pending(1), Edge::Pending(2), Edge::Pending(3)]]
    } else {
        let mut v = vec![[Edge::Pending(1), Edge::Pending(2), Edge::Inner(1)]];
        for k in 2..n - 2 {
            v.push([Edge::Inner(k - 1), Edge::Pending(k + 1), Edge::Inner(k)]);
        }
        v.push([Edge::Inner(n - 3), Edge::Pending(n - 1), Edge::Pending(n)]);
        v
    };
    Ok(FatGraph { n, vertices })
}

impl FatGraph {
    pub fn rank(&self) -> usize {
        self.n
    }

    pub fn vertices(&self) -> &[[Edge; 3]] {
        &self.vertices
    }

    pub fn pending_edges(&self) -> usize {
        self.n
    }

    pub fn inner_edges(&self) -> usize {
        self.n.saturating_sub(3)
    }

    /// Pending vertices, one per pending edge.
    pub fn pending_vertices(&self) -> usize {
        self.n
    }

    /// All edges, pending first.
    pub fn edges(&self) -> Vec<Edge> {
        (1..=self.n)
            .map(Edge::Pending)
            .chain((1..=self.inner_edges()).map(Edge::Inner))
            .collect()
    }

    fn vertex_of(&self, e: Edge, exclude: Option<usize>) -> Option<usize> {
        (0..self.vertices.len()).find(|&v| Some(v) != exclude && self.vertices[v].contains(&e))
    }

    /// Word from the base pending edge `Z_1` to the pending edge `Z_i`:
    /// `X_{Z_1}`, then for every vertex crossed the turn (L to the next
    /// edge counterclockwise, R to the one after) and the next edge.
    fn path_word(&self, i: usize) -> Mat2Word {
        let mut letters = vec![Letter::X(Edge::Pending(1))];
        if i == 1 {
            return Mat2Word::new(1, vec![]);
        }
        let target = Edge::Pending(i);
        let mut edge = Edge::Pending(1);
        let mut prev = None;
        loop {
            let v = self.vertex_of(edge, prev).expect("connected graph");
            let ends = self.vertices[v];
            let a = ends.iter().position(|&e| e == edge).unwrap();
            let next = if ends.contains(&target) {
                target
            } else {
                // Continue along the inner edge leading away from the base.
                *ends
                    .iter()
                    .filter(|e| matches!(e, Edge::Inner(_)) && **e != edge)
                    .max()
                    .expect("caterpillar has a forward inner edge")
            };
            let b = ends.iter().position(|&e| e == next).unwrap();
            letters.push(if (a + 1) % 3 == b { Letter::L } else { Letter::R });
            letters.push(Letter::X(next));
            if next == target {
                return Mat2Word::new(1, letters);
            }
            prev = Some(v);
            edge = next;
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Letter {
    R,
    L,
    F,
    X(Edge),
}

/// Signed word in the letters `R, L, F, X_e`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mat2Word {
    pub sign: i8,
    pub letters: Vec<Letter>,
}

/// 2×2 matrix over [`SymExpr`], row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mat2(pub [SymExpr; 4]);

impl Mat2 {
    pub fn from_ints(a: i64, b: i64, c: i64, d: i64) -> Self {
        Mat2([a.into(), b.into(), c.into(), d.into()])
    }

    pub fn identity() -> Self {
        Self::from_ints(1, 0, 0, 1)
    }

    pub fn mul(&self, o: &Mat2) -> Mat2 {
        let [a, b, c, d] = &self.0;
        let [e, f, g, h] = &o.0;
        Mat2([a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h])
    }

    pub fn scale(&self, s: &SymExpr) -> Mat2 {
        Mat2(self.0.clone().map(|x| &x * s))
    }

    pub fn neg(&self) -> Mat2 {
        Mat2(self.0.clone().map(|x| -x))
    }

    pub fn trace(&self) -> SymExpr {
        &self.0[0] + &self.0[3]
    }

    pub fn det(&self) -> SymExpr {
        &self.0[0] * &self.0[3] - &self.0[1] * &self.0[2]
    }

    /// Adjugate; equals the inverse on SL(2).
    pub fn adjugate(&self) -> Mat2 {
        let [a, b, c, d] = &self.0;
        Mat2([d.clone(), -b, -c, a.clone()])
    }

    pub fn subst(&self, b: &BTreeMap<Atom, SymExpr>) -> Mat2 {
        Mat2(self.0.clone().map(|x| x.subst_unchecked(b)))
    }

    pub fn eval_f64(&self, val: &dyn Fn(&Atom) -> f64) -> [f64; 4] {
        [0, 1, 2, 3].map(|i| self.0[i].eval_f64(val))
    }
}

/// `X_Z = [[0, -u], [u^{-1}, 0]]` with `u = e^{Z/2}`.
pub fn x_matrix(u: &SymExpr) -> Mat2 {
    let inv = u.inverse_monomial().expect("edge variable must be a monomial");
    Mat2([SymExpr::zero(), -u, inv, SymExpr::zero()])
}

pub fn r_matrix() -> Mat2 {
    Mat2::from_ints(1, 1, -1, 0)
}

pub fn l_matrix() -> Mat2 {
    Mat2::from_ints(0, 1, -1, -1)
}

pub fn f_matrix() -> Mat2 {
    Mat2::from_ints(0, 1, -1, 0)
}

impl Mat2Word {
    pub fn new(sign: i8, letters: Vec<Letter>) -> Self {
        Mat2Word { sign, letters }
    }

    /// Inverse word: reversed with R and L exchanged; every letter inverts
    /// to minus a letter (`R^{-1} = -L`, `F^{-1} = -F`, `X^{-1} = -X`).
    pub fn inverse(&self) -> Mat2Word {
        let letters: Vec<Letter> = self
            .letters
            .iter()
            .rev()
            .map(|l| match l {
                Letter::R => Letter::L,
                Letter::L => Letter::R,
                other => *other,
            })
            .collect();
        let sign = if letters.len().is_multiple_of(2) { self.sign } else { -self.sign };
        Mat2Word { sign, letters }
    }

    pub fn concat(&self, o: &Mat2Word) -> Mat2Word {
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&o.letters);
        Mat2Word {
            sign: self.sign * o.sign,
            letters,
        }
    }

    pub fn evaluate(&self) -> Mat2 {
        let mut m = Mat2::identity();
        for l in &self.letters {
            let x = match l {
                Letter::R => r_matrix(),
                Letter::L => l_matrix(),
                Letter::F => f_matrix(),
                Letter::X(e) => x_matrix(&SymExpr::atom(e.atom())),
            };
            m = m.mul(&x);
        }
        if self.sign < 0 {
            m.neg()
        } else {
            m
        }
    }
}

/// `γ_i = −W_i F W_i^{-1}` where `W_i` is the path word to `Z_i`; `γ_1 = −F`.
pub fn basis_words(n: usize) -> Result<Vec<Mat2Word>, GraphError> {
    let g = canonical_disc_graph(n)?;
    Ok((1..=n)
        .map(|i| {
            let w = g.path_word(i);
            let f = Mat2Word::new(-1, vec![Letter::F]);
            w.concat(&f).concat(&w.inverse())
        })
        .collect())
}

/// Evaluated basis matrices `γ_1..γ_n`.
pub fn basis_matrices(n: usize) -> Result<Vec<Mat2>, GraphError> {
    Ok(basis_words(n)?.iter().map(Mat2Word::evaluate).collect())
}

/// `G_{i,j} = −Tr(γ_i γ_j)` for `1 ≤ i < j ≤ n`.
pub fn geodesic_function(n: usize, i: usize, j: usize) -> Result<SymExpr, GraphError> {
    if !(1 <= i && i < j && j <= n) {
        return Err(GraphError::IndexOutOfRange(i, j, n));
    }
    let g = basis_matrices(n)?;
    Ok(-g[i - 1].mul(&g[j - 1]).trace())
}

/// All geodesic functions `G_{i,j}`, `i < j`, keyed by the pair.
pub fn geodesic_table(n: usize) -> Result<BTreeMap<(usize, usize), SymExpr>, GraphError> {
    let g = basis_matrices(n)?;
    let mut out = BTreeMap::new();
    for i in 1..=n {
        for j in i + 1..=n {
            out.insert((i, j), -g[i - 1].mul(&g[j - 1]).trace());
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PerimeterReport {
    pub holds: bool,
    pub lhs: SymExpr,
    pub rhs: SymExpr,
}

/// `Tr((γ_1⋯γ_n)^{-1}) = (−1)^{n−1}(e^{P/2} + e^{−P/2})` with
/// `e^{P/2} = ∏ s_i² ∏ t_j²`.
pub fn perimeter_identity(n: usize) -> Result<PerimeterReport, GraphError> {
    let g = basis_matrices(n)?;
    let mut prod = Mat2::identity();
    for m in &g {
        prod = prod.mul(m);
    }
    let lhs = prod.adjugate().trace();
    let graph = canonical_disc_graph(n)?;
    let ep: SymExpr = graph
        .edges()
        .into_iter()
        .map(|e| SymExpr::atom_pow(e.atom(), 2))
        .product();
    let sign = if (n - 1).is_multiple_of(2) { 1 } else { -1 };
    let rhs = (&ep + &ep.inverse_monomial().unwrap()).scale_int(sign);
    Ok(PerimeterReport {
        holds: lhs == rhs,
        lhs,
        rhs,
    })
}

/// Goldman bracket on functions of the shear variables of `graph`.
///
/// At every trivalent vertex with cyclic edge order `(x_0, x_1, x_2)` the
/// pairs `(x_a, x_{a+1})` contribute `{Z_x, Z_y} = 1`; with `u = e^{Z/2}`
/// the chain rule gives `∂/∂Z = (u/2) ∂/∂u`.
pub fn goldman_bracket(f: &SymExpr, g: &SymExpr, graph: &FatGraph) -> Result<SymExpr, GraphError> {
    let allowed: Vec<Atom> = graph.edges().into_iter().map(Edge::atom).collect();
    for a in f.atoms().into_iter().chain(g.atoms()) {
        if !allowed.contains(&a) {
            return Err(GraphError::ForeignVariable(a.to_string()));
        }
    }
    let half = SymExpr::constant(crate::poly_core::qf(1, 2));
    let dz = |h: &SymExpr, a: Atom| -> SymExpr {
        let d = h.partial(&a);
        if d.is_zero() {
            d
        } else {
            &(&d * &SymExpr::atom(a)) * &half
        }
    };
    let mut df = BTreeMap::new();
    let mut dg = BTreeMap::new();
    for a in &allowed {
        df.insert(*a, dz(f, *a));
        dg.insert(*a, dz(g, *a));
    }
    let mut total = SymExpr::zero();
    for v in graph.vertices() {
        for idx in 0..3 {
            let x = v[idx].atom();
            let y = v[(idx + 1) % 3].atom();
            total += &df[&x] * &dg[&y];
            total -= &dg[&x] * &df[&y];
        }
    }
    Ok(total)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SkeinReport {
    pub holds: bool,
    pub lhs: SymExpr,
    pub rhs: SymExpr,
}

/// `Tr A · Tr B = Tr(AB) + Tr(AB^{-1})` on evaluated words.
pub fn skein_check(a: &Mat2Word, b: &Mat2Word) -> SkeinReport {
    let ma = a.evaluate();
    let mb = b.evaluate();
    let lhs = &ma.trace() * &mb.trace();
    let rhs = ma.mul(&mb).trace() + ma.mul(&mb.adjugate()).trace();
    SkeinReport {
        holds: lhs == rhs,
        lhs,
        rhs,
    }
}

/// Outcome of the clashed-hole identity check.
#[derive(Clone, Debug)]
pub struct ClashReport {
    /// Entrywise difference of the two sides reduces to zero modulo the
    /// relation for `e^{Z_h/2}`.
    pub identity_holds: bool,
    /// Trace of the loop `X_b F X_b R X_a F X_a L` around both pending
    /// vertices equals
    /// `e^{Z_{n+1}+Z_{n+2}} + e^{−Z_{n+1}−Z_{n+2}} + e^{Z_{n+1}−Z_{n+2}}`.
    pub geodesic_holds: bool,
    /// Largest entrywise deviation at sampled numeric points.
    pub numeric_max_error: f64,
}

/// Atoms used for the clashed hole: `a = e^{Z_{n+1}/2}`, `b = e^{Z_{n+2}/2}`,
/// `y = e^{Y/2}` and `w = e^{Z_h/4}`.
pub fn clash_atoms() -> [Atom; 4] {
    [Atom::sym("a"), Atom::sym("b"), Atom::sym("y"), Atom::sym("w")]
}

fn clash_sides() -> (Mat2, Mat2, SymExpr) {
    let [a, b, y, w] = clash_atoms().map(SymExpr::atom);
    let (r, f) = (r_matrix(), f_matrix());
    let lhs = [
        x_matrix(&y),
        r.clone(),
        x_matrix(&b),
        f.clone(),
        x_matrix(&b),
        r.clone(),
        x_matrix(&a),
        f,
        x_matrix(&a),
        r.clone(),
        x_matrix(&y),
    ]
    .iter()
    .fold(Mat2::identity(), |acc, m| acc.mul(m));
    // e^{Y_h/2} = y·a·b/w and e^{Z_h/2} = w².
    let yh = &(&(&y * &a) * &b) * &w.inverse_monomial().unwrap();
    let zh = w.pow(2).unwrap();
    let rhs = [x_matrix(&yh), r.clone(), x_matrix(&zh), r, x_matrix(&yh)]
        .iter()
        .fold(Mat2::identity(), |acc, m| acc.mul(m));
    // e^{Z_h/2} + e^{−Z_h/2} = a²b² + a^{-2}b^{-2} + a²b^{-2}.
    let rel = [(2, 2), (-2, -2), (2, -2)]
        .iter()
        .map(|&(p, q)| a.pow(p).unwrap() * b.pow(q).unwrap())
        .sum();
    (lhs, rhs, rel)
}

/// Normal form modulo `z + z^{-1} = rel` with `z = w²`: every power of `w`
/// is reduced to `w^0` or `w^2`.
fn reduce_mod_hole(e: &SymExpr, rel: &SymExpr) -> Option<SymExpr> {
    let w = clash_atoms()[3];
    let coeffs = e.coefficients_in(&w);
    // z^k expressed as α_k + β_k z.
    let mut out = SymExpr::zero();
    let z = SymExpr::atom_pow(w, 2);
    for (k, c) in coeffs {
        if k % 2 != 0 {
            return None;
        }
        let k = k / 2;
        let (mut alpha, mut beta) = (SymExpr::one(), SymExpr::zero());
        if k > 0 {
            for _ in 0..k {
                // z·(α + βz) = α z + β(rel·z − 1)
                let na = -&beta;
                let nb = &alpha + &(&beta * rel);
                alpha = na;
                beta = nb;
            }
        } else {
            for _ in 0..(-k) {
                // z^{-1}(α + βz) = α(rel − z) + β
                let na = &(&alpha * rel) + &beta;
                let nb = -&alpha;
                alpha = na;
                beta = nb;
            }
        }
        out += &c * &(alpha + &beta * &z);
    }
    Some(out)
}

/// Checks `X_Y R X_b F X_b R X_a F X_a R X_Y = X_{Y_h} R X_{Z_h} R X_{Y_h}`
/// under the hole coordinate relations, symbolically and numerically.
pub fn clashed_hole_coords() -> ClashReport {
    let (lhs, rhs, rel) = clash_sides();
    let identity_holds = (0..4).all(|i| {
        let d = &lhs.0[i] - &rhs.0[i];
        matches!(reduce_mod_hole(&d, &rel), Some(r) if r.is_zero())
    });
    let [a, b, _, _] = clash_atoms().map(SymExpr::atom);
    let loop_word = [
        x_matrix(&b),
        f_matrix(),
        x_matrix(&b),
        r_matrix(),
        x_matrix(&a),
        f_matrix(),
        x_matrix(&a),
        l_matrix(),
    ]
    .iter()
    .fold(Mat2::identity(), |acc, m| acc.mul(m));
    let geodesic_holds = loop_word.trace() == rel;

    let mut worst: f64 = 0.0;
    for &(av, bv, yv) in &[(1.0, 1.0, 1.0), (1.3, 0.7, 1.9), (0.6, 1.45, 0.8)] {
        let g: f64 = av * av * bv * bv + 1.0 / (av * av * bv * bv) + av * av / (bv * bv);
        let z = (g + (g * g - 4.0).sqrt()) / 2.0;
        for zz in [z, 1.0 / z] {
            let wv = zz.sqrt();
            let [aa, bb, yy, ww] = clash_atoms();
            let val = |x: &Atom| {
                if *x == aa {
                    av
                } else if *x == bb {
                    bv
                } else if *x == yy {
                    yv
                } else if *x == ww {
                    wv
                } else {
                    f64::NAN
                }
            };
            let l = lhs.eval_f64(&val);
            let r = rhs.eval_f64(&val);
            for i in 0..4 {
                worst = worst.max((l[i] - r[i]).abs());
            }
        }
    }
    ClashReport {
        identity_holds,
        geodesic_holds,
        numeric_max_error: worst,
    }
}

/// Geodesic functions at the symmetric point of rank 3 (`s_i = 1`).
pub fn a3_star() -> BTreeMap<(usize, usize), SymExpr> {
    let b = shear_bindings(&[SymExpr::one(), SymExpr::one(), SymExpr::one()], &[]);
    geodesic_table(3)
        .expect("rank 3")
        .into_iter()
        .map(|(k, g)| (k, g.subst_unchecked(&b)))
        .collect()
}

/// Geodesic functions at the rank 4 point `s = (r, 1/r, r, 1/r)`, `t_1 = 1`
/// with `r = 2^{1/4}`, reduced exactly using `r^4 = 2`.
pub fn a4_star() -> BTreeMap<(usize, usize), SymExpr> {
    let r = Atom::sym("r");
    let rr = SymExpr::atom(r);
    let ri = SymExpr::atom_pow(r, -1);
    let b = shear_bindings(&[rr.clone(), ri.clone(), rr, ri], &[SymExpr::one()]);
    geodesic_table(4)
        .expect("rank 4")
        .into_iter()
        .map(|(k, g)| (k, reduce_fourth_root(&g.subst_unchecked(&b), r, 2)))
        .collect()
}

/// Rewrite powers of `r` modulo `r^4 = c`.
fn reduce_fourth_root(e: &SymExpr, r: Atom, c: i64) -> SymExpr {
    let mut out = SymExpr::zero();
    for (k, coeff) in e.coefficients_in(&r) {
        let m = k.div_euclid(4);
        let rem = k.rem_euclid(4);
        let scale = if m >= 0 {
            SymExpr::constant(crate::poly_core::q(c.pow(m as u32)))
        } else {
            SymExpr::constant(crate::poly_core::qf(1, c.pow((-m) as u32)))
        };
        out += coeff * scale * SymExpr::atom_pow(r, rem);
    }
    out
}

/// Positive shear assignment used for numeric spot checks.
pub fn eval_at(e: &SymExpr, s: &[f64], t: &[f64]) -> f64 {
    e.eval_f64(&|a| match a {
        Atom::S(i) => s[*i as usize - 1],
        Atom::T(j) => t[*j as usize - 1],
        _ => f64::NAN,
    })
}

/// Substitution `s_i ↦ values[i]`, `t_j ↦ values[j]` as a binding table.
pub fn shear_bindings(s: &[SymExpr], t: &[SymExpr]) -> BTreeMap<Atom, SymExpr> {
    let mut b = BTreeMap::new();
    for (i, v) in s.iter().enumerate() {
        b.insert(Atom::S(i as u16 + 1), v.clone());
    }
    for (j, v) in t.iter().enumerate() {
        b.insert(Atom::T(j as u16 + 1), v.clone());
    }
    b
}

/// Coefficients of a geodesic function as integers (for positivity checks).
pub fn integer_coefficients(e: &SymExpr) -> Option<Vec<i64>> {
    use num_traits::ToPrimitive;
    e.terms()
        .map(|(_, c)| c.is_integer().then(|| c.to_integer().to_i64()).flatten())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly_core::ex;
    use proptest::prelude::*;

    #[test]
    fn graph_counts() {
        let g3 = canonical_disc_graph(3).unwrap();
        assert_eq!((g3.vertices().len(), g3.pending_edges(), g3.inner_edges()), (1, 3, 0));
        let g4 = canonical_disc_graph(4).unwrap();
        assert_eq!((g4.vertices().len(), g4.pending_edges(), g4.inner_edges()), (2, 4, 1));
        assert_eq!(canonical_disc_graph(2), Err(GraphError::RankTooSmall(2)));
        for n in 3..8 {
            let g = canonical_disc_graph(n).unwrap();
            assert_eq!(g.vertices().len(), n - 2);
            for e in g.edges() {
                let deg = g.vertices().iter().filter(|v| v.contains(&e)).count();
                assert_eq!(deg, if matches!(e, Edge::Inner(_)) { 2 } else { 1 });
            }
        }
    }

    #[test]
    fn first_basis_word_is_f() {
        for n in 3..6 {
            let w = &basis_words(n).unwrap()[0];
            assert_eq!(w.letters, vec![Letter::F]);
        }
    }

    #[test]
    fn explicit_words() {
        use Edge::*;
        use Letter::*;
        let w = basis_words(4).unwrap();
        let s = |i| X(Pending(i));
        let t = |j| X(Inner(j));
        assert_eq!(w[1].letters, vec![s(1), L, s(2), F, s(2), R, s(1)]);
        assert_eq!(w[2].letters, vec![s(1), R, t(1), L, s(3), F, s(3), R, t(1), L, s(1)]);
        assert_eq!(w[3].letters, vec![s(1), R, t(1), R, s(4), F, s(4), L, t(1), L, s(1)]);
    }

    #[test]
    fn traceless_unimodular() {
        for n in 3..=6 {
            for g in basis_matrices(n).unwrap() {
                assert!(g.trace().is_zero());
                assert_eq!(g.det(), SymExpr::one());
            }
        }
    }

    #[test]
    fn perimeter_small_ranks() {
        for n in 3..=5 {
            let r = perimeter_identity(n).unwrap();
            assert!(r.holds, "n={n}: {} vs {}", r.lhs, r.rhs);
        }
    }

    #[test]
    fn geodesic_functions_positive_laurent() {
        let g = geodesic_function(4, 1, 2).unwrap();
        let c = integer_coefficients(&g).unwrap();
        assert!(c.iter().all(|&x| x > 0));
        assert!(g.atoms().iter().all(|a| matches!(a, Atom::S(1) | Atom::S(2))));
        assert!(matches!(geodesic_function(4, 2, 2), Err(GraphError::IndexOutOfRange(..))));
        assert!(matches!(geodesic_function(4, 1, 5), Err(GraphError::IndexOutOfRange(..))));
    }

    #[test]
    fn a3_star_point() {
        let b = shear_bindings(&[SymExpr::one(), SymExpr::one(), SymExpr::one()], &[]);
        for ((i, j), g) in geodesic_table(3).unwrap() {
            assert_eq!(g.subst_unchecked(&b), SymExpr::int(3), "G_{i}{j}");
        }
    }

    #[test]
    fn a4_star_point() {
        let v = a4_star();
        let expect = [((1, 2), 4), ((1, 3), 6), ((1, 4), 4), ((2, 3), 4), ((2, 4), 6), ((3, 4), 4)];
        for (k, e) in expect {
            assert_eq!(v[&k], SymExpr::int(e), "{k:?}");
        }
        assert!(a3_star().values().all(|g| *g == SymExpr::int(3)));
    }

    #[test]
    fn goldman_reproduces_nr_n3() {
        let g = canonical_disc_graph(3).unwrap();
        let t = geodesic_table(3).unwrap();
        let b = goldman_bracket(&t[&(1, 2)], &t[&(2, 3)], &g).unwrap();
        assert_eq!(b, &t[&(1, 2)] * &t[&(2, 3)] - t[&(1, 3)].scale_int(2));
    }

    #[test]
    fn goldman_disjoint_pairs_commute() {
        let g = canonical_disc_graph(4).unwrap();
        let t = geodesic_table(4).unwrap();
        assert!(goldman_bracket(&t[&(1, 2)], &t[&(3, 4)], &g).unwrap().is_zero());
    }

    #[test]
    fn goldman_rejects_foreign_variables() {
        let g = canonical_disc_graph(3).unwrap();
        assert!(matches!(
            goldman_bracket(&ex("t1"), &ex("s1"), &g),
            Err(GraphError::ForeignVariable(_))
        ));
    }

    #[test]
    fn skein_examples() {
        let f = Mat2Word::new(1, vec![Letter::F]);
        let r = skein_check(&f, &f);
        assert!(r.holds);
        assert!(r.lhs.is_zero());
        let w3 = basis_words(3).unwrap();
        assert!(skein_check(&w3[0], &w3[1]).holds);
        let w4 = basis_words(4).unwrap();
        assert!(skein_check(&w4[1], &w4[2]).holds);
    }

    #[test]
    fn clashed_hole() {
        let r = clashed_hole_coords();
        assert!(r.identity_holds);
        assert!(r.geodesic_holds);
        assert!(r.numeric_max_error < 1e-9, "{}", r.numeric_max_error);
    }

    #[test]
    fn geodesics_exceed_two_at_random_positive_points() {
        let mut rng = crate::sampling::RationalSampler::new(11);
        for n in [3, 4] {
            let t = geodesic_table(n).unwrap();
            for _ in 0..100 {
                let s: Vec<f64> = (0..n).map(|_| rng.uniform(0.2, 3.0)).collect();
                let tt: Vec<f64> = (0..n.saturating_sub(3)).map(|_| rng.uniform(0.2, 3.0)).collect();
                for g in t.values() {
                    assert!(eval_at(g, &s, &tt) >= 2.0 - 1e-12);
                }
            }
        }
    }

    fn shear_poly(n: usize) -> impl Strategy<Value = SymExpr> {
        let atoms: Vec<Atom> = canonical_disc_graph(n).unwrap().edges().into_iter().map(Edge::atom).collect();
        prop::collection::vec((-3i64..=3, prop::collection::vec((0..atoms.len(), -2i32..=2), 1..3)), 1..4)
            .prop_map(move |terms| {
                terms
                    .into_iter()
                    .map(|(c, fs)| {
                        fs.into_iter()
                            .map(|(i, e)| SymExpr::atom_pow(atoms[i], e))
                            .product::<SymExpr>()
                            .scale_int(c)
                    })
                    .sum()
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn goldman_antisymmetric(f in shear_poly(4), g in shear_poly(4)) {
            let gr = canonical_disc_graph(4).unwrap();
            let a = goldman_bracket(&f, &g, &gr).unwrap();
            let b = goldman_bracket(&g, &f, &gr).unwrap();
            prop_assert!((a + b).is_zero());
            prop_assert!(goldman_bracket(&f, &f, &gr).unwrap().is_zero());
        }

        #[test]
        fn goldman_leibniz(f in shear_poly(4), g in shear_poly(4), h in shear_poly(4)) {
            let gr = canonical_disc_graph(4).unwrap();
            let lhs = goldman_bracket(&(&f * &g), &h, &gr).unwrap();
            let rhs = &f * &goldman_bracket(&g, &h, &gr).unwrap() + &g * &goldman_bracket(&f, &h, &gr).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }
}
