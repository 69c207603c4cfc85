//! Central elements: determinant generating functions for `A_n`,
//! `𝔇_n^{(p)}` and `D_n`, centrality, braid invariance and independence.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::braid::{self, BraidGen, HatFamily, LevelFamily};
use crate::dn_algebra::GenAlgebra;
use crate::poly_core::{lam, Atom, Coeff, GenIndex, RatMatrix, SymExpr};
use crate::reductions;
use crate::sampling::RationalSampler;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CenterError {
    #[error("determinant does not have the expected factorized form: {0}")]
    Factorization(String),
    #[error(transparent)]
    Braid(#[from] braid::BraidError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CenterFlavor {
    An(usize),
    Dnp(usize, u32),
    Dn(usize),
}

impl CenterFlavor {
    pub fn rank(self) -> usize {
        match self {
            CenterFlavor::An(n) | CenterFlavor::Dnp(n, _) | CenterFlavor::Dn(n) => n,
        }
    }

    /// Number of algebraically independent central elements.
    pub fn expected_count(self) -> usize {
        match self {
            CenterFlavor::An(n) => n / 2,
            CenterFlavor::Dnp(n, p) => n * p as usize / 2,
            CenterFlavor::Dn(n) => n,
        }
    }

    /// Coordinates the centers are functions of.
    pub fn coordinates(self) -> Vec<Atom> {
        match self {
            CenterFlavor::An(n) => GenAlgebra::an(n).generators(0).into_iter().map(Atom::G).collect(),
            CenterFlavor::Dnp(n, p) => GenAlgebra::dnp(n, p).generators(0).into_iter().map(Atom::G).collect(),
            CenterFlavor::Dn(n) => (1..=n).flat_map(|i| (1..=n).map(move |j| Atom::ghat(i, j))).collect(),
        }
    }
}

/// Nonconstant coefficients of a generating determinant.
#[derive(Clone, Debug)]
pub struct CenterSet {
    pub flavor: CenterFlavor,
    /// The generating function itself.
    pub generating: SymExpr,
    pub coeffs: Vec<SymExpr>,
}

fn nonconstant_coeffs(det: &SymExpr) -> Vec<SymExpr> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for (_, c) in det.coefficients_in(&Atom::Lam) {
        if c.is_constant() {
            continue;
        }
        let key = c.to_string();
        let neg = (-c.clone()).to_string();
        if seen.insert(key) && !seen.contains(&neg) {
            out.push(c);
        }
    }
    out
}

/// `det(λ𝒜 + λ^{−1}𝒜ᵀ)`; its coefficients are the centers of `A_n`.
pub fn centers_an(n: usize) -> CenterSet {
    let a = braid::generic_a(n);
    let m = a.scale(&lam(1)).add(&a.transpose().scale(&lam(-1))).unwrap();
    let generating = m.det();
    CenterSet { flavor: CenterFlavor::An(n), coeffs: nonconstant_coeffs(&generating), generating }
}

/// `det 𝒢_p(λ)`.
pub fn centers_dnp(n: usize, p: u32) -> CenterSet {
    let generating = reductions::build_gp(n, p).det();
    CenterSet { flavor: CenterFlavor::Dnp(n, p), coeffs: nonconstant_coeffs(&generating), generating }
}

/// Divides a Laurent polynomial in `λ` by `(λ − 1)^m`, failing on a
/// nonzero remainder.
fn divide_by_lambda_minus_one(e: &SymExpr, m: usize) -> Option<SymExpr> {
    let coeffs = e.coefficients_in(&Atom::Lam);
    let (Some((&lo, _)), Some((&hi, _))) = (coeffs.iter().next(), coeffs.iter().next_back()) else {
        return Some(SymExpr::zero());
    };
    // Dense descending coefficient list, lowest exponent `lo`.
    let mut c: Vec<SymExpr> = (lo..=hi).rev().map(|k| coeffs.get(&k).cloned().unwrap_or_else(SymExpr::zero)).collect();
    for _ in 0..m {
        // synthetic division by (λ − 1)
        let mut q = Vec::with_capacity(c.len() - 1);
        let mut acc = SymExpr::zero();
        for x in &c[..c.len() - 1] {
            acc = &acc + x;
            q.push(acc.clone());
        }
        if !(&acc + c.last().unwrap()).is_zero() {
            return None;
        }
        c = q;
    }
    let top = hi - m as i32;
    Some(c.into_iter().enumerate().map(|(d, x)| x * lam(top - d as i32)).sum())
}

/// Centers `c_1..c_n` of `D_n` from
/// `det M(λ) = (λ−1)^{n−1}[λ^{n+1} + Σλ^i c_i + (−1)^{n+1}Σλ^{1−i}c_i + (−1)^{n+1}λ^{−n}]`.
pub fn centers_dn(n: usize) -> Result<CenterSet, CenterError> {
    let g = braid::generic_hat(n);
    let det = reductions::m_lambda(n, &g).det();
    let q = divide_by_lambda_minus_one(&det, n - 1)
        .ok_or_else(|| CenterError::Factorization(format!("(λ−1)^{} does not divide the determinant", n - 1)))?;
    let coeffs: Vec<SymExpr> = (1..=n as i32).map(|i| q.coeff_of(&Atom::Lam, i)).collect();
    let sign = if n % 2 == 1 { 1 } else { -1 };
    let mut rebuilt = lam(n as i32 + 1) + lam(-(n as i32)).scale_int(sign);
    for (i, c) in coeffs.iter().enumerate() {
        let i = i as i32 + 1;
        rebuilt += c * &lam(i) + (c * &lam(1 - i)).scale_int(sign);
    }
    if rebuilt != q {
        return Err(CenterError::Factorization("coefficients are not palindromic as expected".into()));
    }
    Ok(CenterSet { flavor: CenterFlavor::Dn(n), generating: det, coeffs })
}

/// `{c, g} = 0` for every center and every generator (`A_n`, `𝔇_n^{(p)}`).
/// `D_n` has no bracket table here; `None` is returned for it.
pub fn centrality(set: &CenterSet) -> Option<bool> {
    let alg = match set.flavor {
        CenterFlavor::An(n) => GenAlgebra::an(n),
        CenterFlavor::Dnp(n, p) => GenAlgebra::dnp(n, p),
        CenterFlavor::Dn(_) => return None,
    };
    let gens = alg.generators(0);
    Some(set.coeffs.iter().all(|c| {
        gens.iter().all(|&g| alg.bracket(c, &SymExpr::atom(Atom::G(g))).map(|v| v.is_zero()).unwrap_or(false))
    }))
}

fn dnp_images(n: usize, p: u32, b: BraidGen) -> Result<BTreeMap<Atom, SymExpr>, CenterError> {
    let top = (p / 2) as i32;
    let fam = LevelFamily::from_fn(n, top + 2, |g| match reductions::level_p_canonical(g, p) {
        Some(c) => SymExpr::atom(Atom::G(c)),
        None => SymExpr::int(2),
    });
    let acted = braid::act_frak_dn(b, &fam)?;
    let alg = GenAlgebra::dnp(n, p);
    let mut out = BTreeMap::new();
    for g in alg.generators(0) {
        let v = acted.get(g.i as usize, g.j as usize, g.k)?;
        out.insert(Atom::G(g), alg.canonicalize(&v).expect("indices in range"));
    }
    Ok(out)
}

fn generators_of(flavor: CenterFlavor) -> Vec<BraidGen> {
    let n = flavor.rank();
    let mut gens: Vec<BraidGen> = (1..n).map(BraidGen::adjacent).collect();
    if !matches!(flavor, CenterFlavor::An(_)) {
        gens.push(BraidGen::wrap());
    }
    gens.into_iter().flat_map(|b| [b, b.inv()]).collect()
}

/// Image of an expression under one braid generator, for the given flavor.
pub fn push_forward(flavor: CenterFlavor, b: BraidGen, e: &SymExpr) -> Result<SymExpr, CenterError> {
    Ok(match flavor {
        CenterFlavor::An(n) => {
            let a = braid::act_an(b, &braid::generic_a(n))?;
            let mut bind = BTreeMap::new();
            for g in GenAlgebra::an(n).generators(0) {
                bind.insert(Atom::G(g), a.get(g.i as usize - 1, g.j as usize - 1).clone());
            }
            e.subst_unchecked(&bind)
        }
        CenterFlavor::Dnp(n, p) => {
            let img = dnp_images(n, p, b)?;
            GenAlgebra::dnp(n, p).canonicalize(&e.subst_unchecked(&img)).expect("indices in range")
        }
        CenterFlavor::Dn(n) => {
            let img = braid::act_dn(b, &braid::generic_hat(n))?;
            let bind: BTreeMap<Atom, SymExpr> = img.into_iter().map(|((i, j), v)| (Atom::ghat(i, j), v)).collect();
            e.subst_unchecked(&bind)
        }
    })
}

/// Every braid generator (wrap included where defined) and its inverse
/// fixes every listed expression.
pub fn braid_invariance(flavor: CenterFlavor, exprs: &[SymExpr]) -> Result<bool, CenterError> {
    for b in generators_of(flavor) {
        for e in exprs {
            if &push_forward(flavor, b, e)? != e {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn eval_rational(e: &SymExpr, point: &BTreeMap<Atom, SymExpr>) -> Coeff {
    e.subst_unchecked(point).as_constant().expect("all coordinates bound")
}

/// Rank of the Jacobian of `exprs` with respect to `coords` at a rational
/// point.
pub fn jacobian_rank(exprs: &[SymExpr], coords: &[Atom], point: &BTreeMap<Atom, SymExpr>) -> usize {
    let m = RatMatrix::from_fn(exprs.len(), coords.len(), |r, c| eval_rational(&exprs[r].partial(&coords[c]), point));
    m.rank()
}

pub fn random_point(coords: &[Atom], seed: u64) -> BTreeMap<Atom, SymExpr> {
    let mut s = RationalSampler::new(seed);
    coords.iter().map(|a| (*a, SymExpr::constant(s.rational()))).collect()
}

pub fn all_ones_point(coords: &[Atom]) -> BTreeMap<Atom, SymExpr> {
    coords.iter().map(|a| (*a, SymExpr::one())).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndependenceReport {
    pub expected: usize,
    pub ranks: Vec<usize>,
    pub all_ones_rank: usize,
}

impl IndependenceReport {
    pub fn ok(&self) -> bool {
        self.ranks.iter().all(|&r| r == self.expected) && self.all_ones_rank <= self.expected
    }
}

/// Jacobian ranks at `points` seeded rational points plus the all-ones point.
pub fn independence(set: &CenterSet, points: u64, seed: u64) -> IndependenceReport {
    let coords = set.flavor.coordinates();
    let ranks = (0..points).map(|s| jacobian_rank(&set.coeffs, &coords, &random_point(&coords, seed + s))).collect();
    IndependenceReport {
        expected: set.flavor.expected_count(),
        ranks,
        all_ones_rank: jacobian_rank(&set.coeffs, &coords, &all_ones_point(&coords)),
    }
}

/// Affine match `target = Σ α_i c_i + β` (or `target²` when `squared`),
/// fitted at seeded rational points and then checked exactly.
pub fn affine_match(target: &SymExpr, basis: &[SymExpr], coords: &[Atom], squared: bool, seed: u64) -> Option<(Vec<Coeff>, Coeff)> {
    let t = if squared { target * target } else { target.clone() };
    let m = basis.len() + 1;
    for attempt in 0..4u64 {
        let pts: Vec<_> = (0..m as u64).map(|s| random_point(coords, seed + 100 * attempt + s)).collect();
        let a = RatMatrix::from_fn(m, m, |r, c| if c < basis.len() { eval_rational(&basis[c], &pts[r]) } else { Coeff::from_integer(1.into()) });
        let rhs: Vec<Coeff> = pts.iter().map(|p| eval_rational(&t, p)).collect();
        let Some(sol) = a.solve(&rhs) else { continue };
        let mut fit = SymExpr::constant(sol[m - 1].clone());
        for (c, b) in sol.iter().zip(basis) {
            fit += b.scale(c);
        }
        return (fit == t).then(|| (sol[..m - 1].to_vec(), sol[m - 1].clone()));
    }
    None
}

/// Printed Casimirs of `D_2`.
pub fn printed_d2() -> [SymExpr; 2] {
    use crate::poly_core::ex;
    [
        ex("Ghat[1,1]*Ghat[2,2] - Ghat[1,2] - Ghat[2,1]"),
        ex("Ghat[1,2]*Ghat[2,1] - Ghat[1,1]^2 - Ghat[2,2]^2"),
    ]
}

/// Printed Casimirs of `D_3`, verbatim.
pub fn printed_d3() -> [SymExpr; 3] {
    use crate::poly_core::ex;
    let c1 = ex("Ghat[1,1]*Ghat[2,2]*Ghat[3,3] - Ghat[1,1]*(Ghat[3,2] + Ghat[2,3]) - Ghat[2,2]*(Ghat[1,3] + Ghat[3,1]) - Ghat[3,3]*(Ghat[2,1] + Ghat[1,2])");
    let c2 = ex("Ghat[1,2]*Ghat[2,3]*Ghat[3,1] - Ghat[1,2]*Ghat[2,1] - Ghat[2,3]*Ghat[3,2] - Ghat[3,1]*Ghat[1,3] + Ghat[1,1]^2 + Ghat[2,2]^2 + Ghat[3,3]^2");
    let c3 = ex("Ghat[1,3]*Ghat[2,1]*Ghat[3,2] - Ghat[1,2]*Ghat[2,1]*Ghat[3,3]^2 - Ghat[2,3]*Ghat[3,2]*Ghat[1,1]^2 - Ghat[3,1]*Ghat[1,3]*Ghat[2,2]^2 \
        + 2*Ghat[1,1]*Ghat[2,2]*(Ghat[2,3]*Ghat[3,1] - Ghat[2,1] - Ghat[1,2]) + 2*Ghat[2,2]*Ghat[3,3]*(Ghat[3,1]*Ghat[1,2] - Ghat[3,2] - Ghat[2,3]) \
        + 2*Ghat[3,3]*Ghat[1,1]*(Ghat[3,1]*Ghat[1,2] - Ghat[3,2] - Ghat[2,3]) + Ghat[2,1]^2 + Ghat[3,2]^2 + Ghat[1,3]^2 \
        - Ghat[1,2]*Ghat[2,3]*Ghat[1,3] - Ghat[2,3]*Ghat[3,1]*Ghat[2,1] - Ghat[3,1]*Ghat[1,2]*Ghat[3,2] + Ghat[1,2]^2 + Ghat[2,3]^2 + Ghat[3,1]^2 \
        + (Ghat[1,1]^2 + 1)*(Ghat[2,2]^2 + 1) + (Ghat[2,2]^2 + 1)*(Ghat[3,3]^2 + 1) + (Ghat[3,3]^2 + 1)*(Ghat[1,1]^2 + 1)");
    [c1, c2, c3]
}

/// `D_3` Casimirs with the two misprints repaired: the cubic with antisymmetric
/// differences, and the cyclic third line of `C_3`.
pub fn repaired_d3() -> [SymExpr; 3] {
    use crate::poly_core::ex;
    let [_, c2, c3] = printed_d3();
    let c1 = ex("Ghat[1,1]*Ghat[2,2]*Ghat[3,3] + Ghat[1,1]*(Ghat[2,3] - Ghat[3,2]) + Ghat[3,3]*(Ghat[1,2] - Ghat[2,1]) + Ghat[2,2]*(Ghat[3,1] - Ghat[1,3])");
    let wrong = ex("2*Ghat[3,3]*Ghat[1,1]*(Ghat[3,1]*Ghat[1,2] - Ghat[3,2] - Ghat[2,3])");
    let right = ex("2*Ghat[3,3]*Ghat[1,1]*(Ghat[1,2]*Ghat[2,3] - Ghat[1,3] - Ghat[3,1])");
    [c1, c2, c3 - wrong + right]
}

/// `det M(λ)` at `Ĝ_{ij} = 0` (i ≠ j) against `Σ_k c^{n−k} m_k SYM_k` with
/// `c = (λ−1)²(λ+1)/λ`, `m_k = (λ−1)^{2⌊k/2⌋}(λ+1)^{k mod 2}`.
/// Returns `(corrected form holds, printed form holds)`.
pub fn diagonal_specialization(n: usize) -> (bool, bool) {
    let g = braid::generic_hat(n);
    let mut diag = BTreeMap::new();
    for i in 1..=n {
        for j in 1..=n {
            if i != j {
                diag.insert(Atom::ghat(i, j), SymExpr::zero());
            }
        }
    }
    let det = reductions::m_lambda(n, &g).det().subst_unchecked(&diag);
    let x: Vec<SymExpr> = (1..=n).map(|i| &g[&(i, i)] * &g[&(i, i)]).collect();
    let sym = |k: usize| -> SymExpr {
        let mut total = SymExpr::zero();
        for mask in 0u32..(1 << n) {
            if mask.count_ones() as usize == k {
                total += (0..n).filter(|b| mask >> b & 1 == 1).map(|b| x[b].clone()).product::<SymExpr>();
            }
        }
        total
    };
    let one = SymExpr::one();
    let lm1 = lam(1) - one.clone();
    let lp1 = lam(1) + one.clone();
    let pw = |e: &SymExpr, k: usize| -> SymExpr { (0..k).map(|_| e.clone()).product() };
    let c = &(&lm1 * &lm1) * &(&lp1 * &lam(-1));
    let corrected: SymExpr = (0..=n).map(|k| pw(&c, n - k) * pw(&lm1, 2 * (k / 2)) * pw(&lp1, k % 2) * sym(k)).sum();
    // Printed form times (λ−1) when n is odd, to clear the fraction.
    let odd = n % 2 == 1;
    let printed: SymExpr = (0..=n)
        .map(|k| pw(&lm1, if odd { n - 1 } else { n }) * pw(&(lam(1) + lam(-1)), n - k) * pw(&lp1, odd as usize) * sym(k))
        .sum();
    let scaled_det = if odd { &det * &lm1 } else { det.clone() };
    (corrected == det, printed == scaled_det)
}

/// Leading-order brackets near `Ĝ_{ij} = 0` (i ≠ j): `{Ĝ_ij, Ĝ_ii} = 2Ĝ_jj`,
/// `{Ĝ_ij, Ĝ_jj} = −2Ĝ_ii`, `{Ĝ_ij, Ĝ_ji} = 2Ĝ²_jj − 2Ĝ²_ii`. Returns the
/// ranks of the off-diagonal block and of the full `n² × n²` matrix at the
/// given diagonal values.
pub fn vicinity_ranks(diag: &[Coeff]) -> (usize, usize) {
    let n = diag.len();
    let idx = |i: usize, j: usize| i * n + j;
    let two = Coeff::from_integer(2.into());
    let mut m = RatMatrix::zeros(n * n, n * n);
    let put = |a: usize, b: usize, v: Coeff, m: &mut RatMatrix| {
        m.set(b, a, -v.clone());
        m.set(a, b, v);
    };
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            put(idx(i, j), idx(i, i), &two * &diag[j], &mut m);
            put(idx(i, j), idx(j, j), -(&two * &diag[i]), &mut m);
            if i < j {
                put(idx(i, j), idx(j, i), &two * &(&diag[j] * &diag[j] - &diag[i] * &diag[i]), &mut m);
            }
        }
    }
    let off: Vec<usize> = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| idx(i, j))).collect();
    let sub = RatMatrix::from_fn(off.len(), off.len(), |r, c| m.get(off[r], off[c]).clone());
    (sub.rank(), m.rank())
}

/// Ĝ family at a point, for numeric spot checks.
pub fn hat_point(n: usize, seed: u64) -> HatFamily {
    let mut s = RationalSampler::new(seed);
    let mut h = HatFamily::new();
    for i in 1..=n {
        for j in 1..=n {
            h.insert((i, j), SymExpr::constant(s.rational()));
        }
    }
    h
}

/// Keys of a canonical generator list, for display.
pub fn generator_names(gens: &[GenIndex]) -> Vec<String> {
    gens.iter().map(|g| g.to_string()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly_core::{ex, q};

    #[test]
    fn a2_generating_polynomial() {
        let s = centers_an(2);
        assert_eq!(s.generating, ex("lam^2 + 2 + lam^-2 - G[1,2,0]^2"));
        assert_eq!(s.coeffs.len(), 1);
    }

    #[test]
    fn a_n_centers() {
        for n in 3..=4 {
            let s = centers_an(n);
            assert_eq!(centrality(&s), Some(true));
            assert!(braid_invariance(CenterFlavor::An(n), &s.coeffs).unwrap());
            let rep = independence(&s, 3, 1);
            assert!(rep.ok(), "{rep:?}");
        }
    }

    #[test]
    fn level_p_centers() {
        for (n, p) in [(2, 2), (2, 3)] {
            let s = centers_dnp(n, p);
            assert_eq!(centrality(&s), Some(true), "n={n} p={p}");
            assert!(braid_invariance(CenterFlavor::Dnp(n, p), &s.coeffs).unwrap());
            let rep = independence(&s, 2, 3);
            assert!(rep.ok(), "{rep:?}");
        }
    }

    #[test]
    fn d_n_centers() {
        for n in 2..=3 {
            let s = centers_dn(n).unwrap();
            assert_eq!(s.coeffs.len(), n);
            assert!(braid_invariance(CenterFlavor::Dn(n), &s.coeffs).unwrap());
            let rep = independence(&s, 2, 9);
            assert!(rep.ok(), "{rep:?}");
        }
    }

    #[test]
    fn printed_casimirs() {
        let coords = CenterFlavor::Dn(2).coordinates();
        let c = centers_dn(2).unwrap().coeffs;
        let [p1, p2] = printed_d2();
        assert!(braid_invariance(CenterFlavor::Dn(2), &[p1.clone(), p2.clone()]).unwrap());
        let (w, b) = affine_match(&p2, &c, &coords, false, 5).unwrap();
        assert_eq!((w, b), (vec![q(0), q(-1)], q(-1)));
        assert!(affine_match(&p1, &c, &coords, true, 5).is_some());

        let coords = CenterFlavor::Dn(3).coordinates();
        let c = centers_dn(3).unwrap().coeffs;
        let printed = printed_d3();
        let fixed = repaired_d3();
        assert!(!braid_invariance(CenterFlavor::Dn(3), &printed[..1]).unwrap());
        assert!(!braid_invariance(CenterFlavor::Dn(3), &printed[2..]).unwrap());
        assert!(braid_invariance(CenterFlavor::Dn(3), &fixed).unwrap());
        assert_eq!(printed[1], fixed[1]);
        assert!(affine_match(&fixed[1], &c, &coords, false, 5).is_some());
        assert!(affine_match(&fixed[2], &c, &coords, false, 5).is_some());
        assert!(affine_match(&fixed[0], &c, &coords, true, 5).is_some());
        assert!(affine_match(&printed[2], &c, &coords, false, 5).is_none());
    }

    #[test]
    fn diagonal_formula() {
        for n in 2..=3 {
            assert_eq!(diagonal_specialization(n), (true, false));
        }
    }

    #[test]
    fn vicinity() {
        let d: Vec<Coeff> = [2, 3, 5].iter().map(|&x| Coeff::from_integer(x.into())).collect();
        assert_eq!(vicinity_ranks(&d), (6, 6));
        let d: Vec<Coeff> = [2, 3].iter().map(|&x| Coeff::from_integer(x.into())).collect();
        assert_eq!(vicinity_ranks(&d), (2, 2));
        // Coinciding squares lose rank.
        let d: Vec<Coeff> = [2, -2, 5].iter().map(|&x| Coeff::from_integer(x.into())).collect();
        assert!(vicinity_ranks(&d).0 < 6);
    }

    #[test]
    fn synthetic_division() {
        let e = ex("(lam - 1)^2*(lam + 3*lam^-1)");
        assert_eq!(divide_by_lambda_minus_one(&e, 2).unwrap(), ex("lam + 3*lam^-1"));
        assert!(divide_by_lambda_minus_one(&ex("lam + 1"), 1).is_none());
    }
}
