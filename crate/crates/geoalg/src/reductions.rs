//! Level-p and D_n reductions of the 𝔇_n algebra.
//!
//! `h = e^{P_h/2}` is the ring variable, `E = h²` and `Π = h + h^{−1}`.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::braid::{self, BraidGen, BraidKind, HatFamily, LevelFamily, SeriesMatrix};
use crate::poly_core::{lam, Atom, GenIndex, LambdaMatrix, SymExpr};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReductionError {
    #[error("negative level {0}: use G^(k)_ij = G^(-k)_ji")]
    NegativeLevel(i32),
    #[error(transparent)]
    Braid(#[from] braid::BraidError),
}

/// Canonical representative under `G^{(k)}_{ij} = G^{(p−k)}_{ji}` and
/// `k ≡ k mod p`; `None` for the constant `G^{(0)}_{ii} = 2`.
pub fn level_p_canonical(g: GenIndex, p: u32) -> Option<GenIndex> {
    assert!(p >= 1, "period must be positive");
    let p = p as i32;
    let r = g.k.rem_euclid(p);
    if r == 0 {
        GenIndex { k: 0, ..g }.canonical()
    } else if 2 * r > p {
        Some(GenIndex { i: g.j, j: g.i, k: p - r })
    } else if 2 * r == p && g.i > g.j {
        Some(GenIndex { i: g.j, j: g.i, k: r })
    } else {
        Some(GenIndex { k: r, ..g })
    }
}

fn canonical_value(g: GenIndex, p: u32) -> SymExpr {
    match level_p_canonical(g, p) {
        Some(c) => SymExpr::atom(Atom::G(c)),
        None => SymExpr::int(2),
    }
}

/// Level-k matrix of generators with level-p identification.
fn level_matrix(n: usize, p: u32, k: i32) -> LambdaMatrix {
    LambdaMatrix::from_fn(n, |r, c| canonical_value(GenIndex::new(r + 1, c + 1, k), p))
}

/// Upper-triangular level-0 matrix with unit diagonal.
fn a_matrix(n: usize) -> LambdaMatrix {
    LambdaMatrix::from_fn(n, |r, c| match r.cmp(&c) {
        std::cmp::Ordering::Less => SymExpr::g(r + 1, c + 1, 0),
        std::cmp::Ordering::Equal => SymExpr::one(),
        std::cmp::Ordering::Greater => SymExpr::zero(),
    })
}

/// `𝒢_p(λ) = 𝒜 + Σ_{k=1}^{p−1} 𝒢^{(k)} λ^{−k} + 𝒜ᵀ λ^{−p}` over canonical
/// level-p generators.
pub fn build_gp(n: usize, p: u32) -> LambdaMatrix {
    let a = a_matrix(n);
    let mut m = a.add(&a.transpose().scale(&lam(-(p as i32)))).unwrap();
    for k in 1..p as i32 {
        m = m.add(&level_matrix(n, p, k).scale(&lam(-k))).unwrap();
    }
    m
}

/// Truncated `𝒢(λ)` up to `λ^{−cap}` with level-p identification.
pub fn level_p_series(n: usize, p: u32, cap: i32) -> LambdaMatrix {
    let mut m = a_matrix(n);
    for k in 1..=cap {
        m = m.add(&level_matrix(n, p, k).scale(&lam(-k))).unwrap();
    }
    m
}

/// `(1 − λ^{−p}) 𝒢(λ) = 𝒢_p(λ)` coefficientwise down to `λ^{−cap}`.
pub fn level_p_series_check(n: usize, p: u32, cap: i32) -> bool {
    let g = level_p_series(n, p, cap);
    let lhs = g.sub(&g.scale(&lam(-(p as i32)))).unwrap().truncate_below(-cap);
    lhs == build_gp(n, p).truncate_below(-cap)
}

/// With `λ = u²`, `u^p 𝒢_p` is invariant under `u → u^{−1}` plus
/// transposition.
pub fn u_symmetry_check(n: usize, p: u32) -> bool {
    let u = Atom::sym("u");
    let mut to_u = BTreeMap::new();
    to_u.insert(Atom::Lam, SymExpr::atom_pow(u, 2));
    let mut flip = BTreeMap::new();
    flip.insert(u, SymExpr::atom_pow(u, -1));
    let m = build_gp(n, p).subst(&to_u).unwrap().scale(&SymExpr::atom_pow(u, p as i32));
    m == m.subst(&flip).unwrap().transpose()
}

fn h() -> SymExpr {
    SymExpr::atom(Atom::H)
}

fn e_pow(k: i32) -> SymExpr {
    SymExpr::atom_pow(Atom::H, 2 * k)
}

/// `Π² − 2 = h² + h^{−2}`.
fn rotation() -> SymExpr {
    e_pow(1) + e_pow(-1)
}

/// `𝒢^{(k)} = r R̂ᵀ + s Ŝ + a Â − a_t Âᵀ`, coefficients Laurent in `h`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionRow {
    pub k: i32,
    pub r: SymExpr,
    pub s: SymExpr,
    pub a: SymExpr,
    pub a_t: SymExpr,
}

impl ReductionRow {
    fn from_vec(k: i32, c: &[SymExpr; 4]) -> Self {
        ReductionRow { k, r: c[0].clone(), s: c[1].clone(), a: c[2].clone(), a_t: -c[3].clone() }
    }

    pub fn coefficients(&self) -> [SymExpr; 4] {
        [self.r.clone(), self.s.clone(), self.a.clone(), self.a_t.clone()]
    }
}

/// Rows of the D_n reduction, produced by the rotation recursion
/// `c(k+1) = (Π²−2) c(k) − c(k−1) + (0, 2, 0, 0)` from the full symmetric
/// level 0 and the skein resolution at level 1.
#[derive(Clone, Debug)]
pub struct ReductionMapDn {
    pub n: usize,
    /// Coefficients of `(R̂ᵀ, Ŝ, Â, Âᵀ)`, index = level.
    rows: Vec<[SymExpr; 4]>,
}

impl ReductionMapDn {
    pub fn new(n: usize, max_level: usize) -> Self {
        let pi2 = rotation() + SymExpr::int(2);
        let mut rows = vec![
            [SymExpr::zero(), SymExpr::zero(), SymExpr::one(), SymExpr::one()],
            [SymExpr::one(), SymExpr::one(), pi2 - SymExpr::one(), SymExpr::int(-1)],
        ];
        let rot = rotation();
        while rows.len() <= max_level {
            let (a, b) = (&rows[rows.len() - 1], &rows[rows.len() - 2]);
            let next: [SymExpr; 4] = std::array::from_fn(|q| {
                let mut v = &rot * &a[q] - b[q].clone();
                if q == 1 {
                    v += SymExpr::int(2);
                }
                v
            });
            rows.push(next);
        }
        ReductionMapDn { n, rows }
    }

    pub fn max_level(&self) -> usize {
        self.rows.len() - 1
    }

    /// Row for level `k`; level 0 is the stored triangle `Â`.
    pub fn row(&self, k: i32) -> Result<ReductionRow, ReductionError> {
        if k < 0 {
            return Err(ReductionError::NegativeLevel(k));
        }
        if k == 0 {
            return Ok(ReductionRow {
                k,
                r: SymExpr::zero(),
                s: SymExpr::zero(),
                a: SymExpr::one(),
                a_t: SymExpr::zero(),
            });
        }
        Ok(ReductionRow::from_vec(k, &self.rows[k as usize]))
    }

    /// Row for the full level-k matrix (level 0 is `Â + Âᵀ`).
    pub fn full_row(&self, k: usize) -> ReductionRow {
        ReductionRow::from_vec(k as i32, &self.rows[k])
    }
}

/// Convenience: one row of the reduction.
pub fn dn_reduce(k: i32) -> Result<ReductionRow, ReductionError> {
    if k < 0 {
        return Err(ReductionError::NegativeLevel(k));
    }
    ReductionMapDn::new(0, k.max(1) as usize).row(k)
}

/// Closed forms for the full level-k matrix (level 0 is `Â + Âᵀ`), as
/// Laurent polynomials: `r = (E^k − E^{−k})/(E − E^{−1})`,
/// `s = (E^k − 2 + E^{−k})/((E − 1)(1 − E^{−1}))`, `a = (E^{k+1} − E^{−k})/(E − 1)`,
/// `a_t = (E^k − E^{1−k})/(E − 1)`.
pub fn closed_form(k: i32) -> ReductionRow {
    let u = |x: i32, step: i32| -> SymExpr { (0..x).map(|j| SymExpr::atom_pow(Atom::H, step * (x - 1 - 2 * j))).sum() };
    let r = u(k, 2);
    let uk = u(k, 1);
    let s = &uk * &uk;
    let a = (-k..=k).map(e_pow).sum();
    let a_t = if k == 0 { SymExpr::int(-1) } else { (1 - k..k).map(e_pow).sum() };
    ReductionRow { k, r, s, a, a_t }
}

/// Each closed form satisfies its defining relation after clearing
/// denominators.
pub fn closed_form_certified(row: &ReductionRow) -> bool {
    let k = row.k;
    let e = e_pow(1);
    let one = SymExpr::one();
    row.r.clone() * (&e - &e_pow(-1)) == e_pow(k) - e_pow(-k)
        && row.s.clone() * (&e - &one) * (&one - &e_pow(-1)) == e_pow(k) - SymExpr::int(2) + e_pow(-k)
        && row.a.clone() * (&e - &one) == e_pow(k + 1) - e_pow(-k)
        && row.a_t.clone() * (&e - &one) == e_pow(k) - e_pow(1 - k)
}

/// `(R̂, Ŝ, Â)` of the D_n braid formulas.
pub fn hat_matrices(n: usize, g: &HatFamily) -> (LambdaMatrix, LambdaMatrix, LambdaMatrix) {
    let at = |i: usize, j: usize| g[&(i, j)].clone();
    let s = LambdaMatrix::from_fn(n, |r, c| &at(r + 1, r + 1) * &at(c + 1, c + 1));
    let rr = LambdaMatrix::from_fn(n, |r, c| {
        let (i, j) = (r + 1, c + 1);
        let v = at(j, i) + at(i, j) - &at(i, i) * &at(j, j);
        match i.cmp(&j) {
            std::cmp::Ordering::Less => v,
            std::cmp::Ordering::Greater => -v,
            std::cmp::Ordering::Equal => SymExpr::zero(),
        }
    });
    let a = LambdaMatrix::from_fn(n, |r, c| match r.cmp(&c) {
        std::cmp::Ordering::Less => at(r + 1, c + 1),
        std::cmp::Ordering::Equal => SymExpr::one(),
        std::cmp::Ordering::Greater => SymExpr::zero(),
    });
    (rr, s, a)
}

/// Reduced level-k matrix `r R̂ᵀ + s Ŝ + a Â − a_t Âᵀ`.
pub fn reduced_level(row: &ReductionRow, mats: &(LambdaMatrix, LambdaMatrix, LambdaMatrix)) -> LambdaMatrix {
    let (rr, s, a) = mats;
    rr.transpose()
        .scale(&row.r)
        .add(&s.scale(&row.s))
        .and_then(|m| m.add(&a.scale(&row.a)))
        .and_then(|m| m.sub(&a.transpose().scale(&row.a_t)))
        .expect("equal sizes")
}

/// Level family `G^{(k)}_{ij}` obtained by the D_n reduction.
pub fn reduction_family(map: &ReductionMapDn, g: &HatFamily, cap: i32) -> LevelFamily {
    let mats = hat_matrices(map.n, g);
    let levels: Vec<LambdaMatrix> = (0..=cap).map(|k| reduced_level(&map.full_row(k as usize), &mats)).collect();
    LevelFamily::from_fn(map.n, cap, |x| levels[x.k as usize].get(x.i as usize - 1, x.j as usize - 1).clone())
}

/// `M(λ) = −(λ−1)R̂ + (λ+1)Ŝ + (λ²−1)Â − (λ−λ^{−1})Âᵀ`.
pub fn m_lambda(n: usize, g: &HatFamily) -> LambdaMatrix {
    let (rr, s, a) = hat_matrices(n, g);
    rr.scale(&(SymExpr::one() - lam(1)))
        .add(&s.scale(&(lam(1) + SymExpr::one())))
        .and_then(|m| m.add(&a.scale(&(lam(2) - SymExpr::one()))))
        .and_then(|m| m.sub(&a.transpose().scale(&(lam(1) - lam(-1)))))
        .expect("equal sizes")
}

/// `D(λ) = (λ−1)(h^{−2}λ−1)(h²λ−1)`.
pub fn d_lambda() -> SymExpr {
    let one = SymExpr::one();
    (lam(1) - one.clone()) * (&e_pow(-1) * &lam(1) - one.clone()) * (&e_pow(1) * &lam(1) - one)
}

/// `D(λ) Σ_{k=0}^{cap} 𝒢^{(k)} λ^{−k} = λ M(λ)` for the coefficients of
/// `λ^e`, `e ≥ 3 − cap` (those not touched by truncation).
pub fn sum_dn_check(n: usize, cap: i32) -> bool {
    let map = ReductionMapDn::new(n, cap as usize);
    let g = braid::generic_hat(n);
    let mats = hat_matrices(n, &g);
    let mut series = LambdaMatrix::zeros(n);
    for k in 0..=cap {
        let lvl = reduced_level(&map.row(k).unwrap(), &mats);
        series = series.add(&lvl.scale(&lam(-k))).unwrap();
    }
    let lhs = series.scale(&d_lambda()).truncate_below(3 - cap);
    let rhs = m_lambda(n, &g).scale(&lam(1)).truncate_below(3 - cap);
    lhs == rhs
}

/// Reduces a Laurent polynomial in `h` modulo the polynomial in `E = h²`
/// whose roots are the `p`-th roots of unity other than `E = ±1`:
/// `1 + E + … + E^{p−1}` for odd `p`, `1 + E² + … + E^{p−2}` for even `p`.
/// `E = −1` is `Π = 0`, where the reduction degenerates. Other atoms are
/// carried along in the coefficients.
pub fn reduce_mod_cyclotomic(e: &SymExpr, p: u32) -> SymExpr {
    let p = p as i32;
    if p <= 2 {
        // no admissible root
        return SymExpr::zero();
    }
    let step = if p % 2 == 0 { 4 } else { 2 };
    let deg = if p % 2 == 0 { 2 * p - 4 } else { 2 * p - 2 };
    let mut buckets: BTreeMap<i32, SymExpr> = BTreeMap::new();
    for (m, c) in e.coefficients_in(&Atom::H) {
        *buckets.entry(m.rem_euclid(2 * p)).or_insert_with(SymExpr::zero) += c;
    }
    // h^deg = −Σ_{j<deg, step | j} h^j, applied from the top down.
    for m in (deg..2 * p).rev() {
        if let Some(c) = buckets.remove(&m) {
            for j in (0..deg).step_by(step as usize) {
                *buckets.entry(m - deg + j).or_insert_with(SymExpr::zero) -= c.clone();
            }
        }
    }
    buckets.into_iter().map(|(m, c)| c * SymExpr::atom_pow(Atom::H, m)).sum()
}

/// `c(k + p) ≡ c(k)` modulo the cyclotomic relation, for `k = 0..kmax`, on
/// full level matrices.
pub fn periodicity_check(p: u32, kmax: usize) -> bool {
    let map = ReductionMapDn::new(0, kmax + p as usize);
    (0..=kmax).all(|k| {
        let a = map.full_row(k).coefficients();
        let b = map.full_row(k + p as usize).coefficients();
        a.iter().zip(&b).all(|(x, y)| reduce_mod_cyclotomic(&(y - x), p).is_zero())
    })
}

/// The reduction intertwines the matrix braid action with the componentwise
/// D_n action, for every generator: in closed form
/// `B M(λ) B(λ^{−1})ᵀ = M(λ)|_{Ĝ → β·Ĝ}`, and on the truncated series
/// up to level `cap` (at least 2, since the wrap costs two levels).
pub fn th_dn_check(n: usize, cap: i32) -> Result<bool, ReductionError> {
    let map = ReductionMapDn::new(n, cap as usize);
    let g = braid::generic_hat(n);
    let m = m_lambda(n, &g);
    let gens = (1..n).map(BraidGen::adjacent).chain([BraidGen::wrap()]);
    for b in gens {
        let img = braid::act_dn(b, &g)?;
        let push: BTreeMap<Atom, SymExpr> = img.iter().map(|(&(i, j), v)| (Atom::ghat(i, j), v.clone())).collect();
        let (bl, br) = match b.kind {
            BraidKind::Adjacent(i) => {
                let x = braid::adjacent_matrix(n, i, &g[&(i, i + 1)], false);
                (x.clone(), x)
            }
            BraidKind::Wrap => {
                let x = braid::wrap_matrix(n, &g[&(n, 1)], false);
                (x.clone(), x.invert_lambda())
            }
        };
        let lhs = bl.mul(&m).unwrap().mul(&br.transpose()).unwrap();
        if lhs != m.subst(&push).unwrap() {
            return Ok(false);
        }
        let series = reduction_family(&map, &g, cap).to_series();
        let acted = braid::act_matrix(b, &series)?;
        let expected: SeriesMatrix = reduction_family(&map, &img, acted.cap).to_series();
        if acted != expected {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `G^{(1)}_{ij} = 2Ĝ_{ii}Ĝ_{jj} − G^{(1)}_{ji} + (Π²−2)G^{(0)}_{ij}` for
/// `i < j` under the reduction.
pub fn resolution_check(n: usize) -> bool {
    let map = ReductionMapDn::new(n, 1);
    let g = braid::generic_hat(n);
    let l1 = reduced_level(&map.row(1).unwrap(), &hat_matrices(n, &g));
    let pi2m2 = rotation();
    (1..=n).all(|i| {
        (i + 1..=n).all(|j| {
            let rhs = (&g[&(i, i)] * &g[&(j, j)]).scale_int(2) - l1.get(j - 1, i - 1).clone() + &pi2m2 * &g[&(i, j)];
            l1.get(i - 1, j - 1) == &rhs
        })
    })
}

/// `Π = h + h^{−1}` as an expression.
pub fn pi() -> SymExpr {
    h() + SymExpr::atom_pow(Atom::H, -1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly_core::ex;

    #[test]
    fn level_p_examples() {
        let c = |i, j, k, p| level_p_canonical(GenIndex::new(i, j, k), p);
        assert_eq!(c(1, 2, 3, 2), Some(GenIndex::new(1, 2, 1)));
        assert_eq!(c(2, 1, 1, 2), Some(GenIndex::new(1, 2, 1)));
        assert_eq!(c(2, 1, 5, 1), Some(GenIndex::new(1, 2, 0)));
        assert_eq!(c(3, 3, 7, 1), None);
        for p in 1..5 {
            for k in -6..6 {
                for (i, j) in [(1, 2), (2, 1), (2, 2)] {
                    if let Some(g) = c(i, j, k, p) {
                        assert_eq!(level_p_canonical(g, p), Some(g));
                    }
                }
            }
        }
    }

    #[test]
    fn gp_matrix() {
        let g1 = build_gp(3, 1);
        let a = a_matrix(3);
        assert_eq!(g1, a.add(&a.transpose().scale(&lam(-1))).unwrap());
        for (n, p) in [(2, 2), (3, 2), (2, 3), (3, 3)] {
            assert!(level_p_series_check(n, p, 3 * p as i32 + 1), "n={n} p={p}");
            assert!(u_symmetry_check(n, p));
        }
    }

    #[test]
    fn reduction_rows() {
        assert_eq!(dn_reduce(1).unwrap().coefficients(), [SymExpr::one(), SymExpr::one(), &pi() * &pi() - SymExpr::one(), SymExpr::one()]);
        assert_eq!(dn_reduce(0).unwrap().coefficients(), [SymExpr::zero(), SymExpr::zero(), SymExpr::one(), SymExpr::zero()]);
        assert!(matches!(dn_reduce(-1), Err(ReductionError::NegativeLevel(-1))));
        let map = ReductionMapDn::new(3, 9);
        for k in 0..=9 {
            let row = map.full_row(k as usize);
            assert_eq!(row, closed_form(k), "k={k}");
            assert!(closed_form_certified(&row));
        }
    }

    #[test]
    fn diagonal_reduction() {
        let map = ReductionMapDn::new(3, 1);
        let g = braid::generic_hat(3);
        let l1 = reduced_level(&map.row(1).unwrap(), &hat_matrices(3, &g));
        assert_eq!(l1.get(0, 0), &(ex("Ghat[1,1]^2 - 2") + &pi() * &pi()));
        assert_eq!(l1.get(2, 0), &ex("Ghat[3,1]"));
        assert!(resolution_check(3));
    }

    #[test]
    fn summation() {
        assert!(sum_dn_check(2, 8));
        assert!(sum_dn_check(3, 7));
    }

    #[test]
    fn periodicity() {
        for p in 3..8 {
            assert!(periodicity_check(p, 6), "p={p}");
        }
        // Without the relation the sequence is not periodic.
        let map = ReductionMapDn::new(0, 4);
        assert_ne!(map.full_row(1), map.full_row(3));
        assert!(!reduce_mod_cyclotomic(&ex("h^2"), 3).is_zero());
        assert!(reduce_mod_cyclotomic(&ex("1 + h^2 + h^4"), 3).is_zero());
        assert!(reduce_mod_cyclotomic(&ex("h^6 - 1"), 3).is_zero());
        assert!(reduce_mod_cyclotomic(&ex("1 + h^4"), 4).is_zero());
        assert!(!reduce_mod_cyclotomic(&ex("1 + h^2"), 4).is_zero());
    }

    #[test]
    fn braid_representation() {
        assert!(th_dn_check(2, 4).unwrap());
        assert!(th_dn_check(3, 4).unwrap());
    }
}
