//! Stokes-matrix realization: monodromies `ℳ_k = 1 − E_k G`, the clashed
//! product `ℳ_h`, the family `G^{(k)} = G ℳ_h^k`, level-`p` conditions and the
//! quantum-cohomology points.

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::DMatrix;
use thiserror::Error;

use crate::braid::{self, BraidGen};
use crate::dn_algebra::GenAlgebra;
use crate::fatgraph;
use crate::ks_calculus::{self, KsError, NumPoint, NumWord, TracePoly};
use crate::poly_core::{lam, q, Atom, Coeff, GenIndex, RatMatrix, SymExpr};
use crate::sampling::RationalSampler;

/// `{G^{(k)}_{ij}, G^{(m)}_{pl}}` computed from the monodromies equals this
/// factor times the `𝔇_n` structure constants.
pub const RAW_FACTOR: f64 = 0.25;
/// Rescaling of the monodromy bracket under which the factor reads `−½`.
pub const BRACKET_RESCALING: f64 = -2.0;
/// `RAW_FACTOR · BRACKET_RESCALING`.
pub const PRINTED_FACTOR: f64 = -0.5;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FrobError {
    #[error("Stokes matrix must be unit upper triangular")]
    NotUnipotent,
    #[error("index {0} out of range 1..={1}")]
    IndexOutOfRange(usize, usize),
    #[error("matrix is singular")]
    Singular,
    #[error(transparent)]
    Ks(#[from] KsError),
}

/// Unit upper-triangular Stokes matrix over the rationals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StokesMatrix(RatMatrix);

impl StokesMatrix {
    pub fn new(m: RatMatrix) -> Result<Self, FrobError> {
        if m.rows() != m.cols() {
            return Err(FrobError::NotUnipotent);
        }
        for i in 0..m.rows() {
            for j in 0..=i {
                let want = if i == j { q(1) } else { q(0) };
                if *m.get(i, j) != want {
                    return Err(FrobError::NotUnipotent);
                }
            }
        }
        Ok(StokesMatrix(m))
    }

    /// Strictly upper entries in row order.
    pub fn from_upper(n: usize, upper: &[Coeff]) -> Result<Self, FrobError> {
        let mut it = upper.iter();
        let mut m = RatMatrix::identity(n);
        for i in 0..n {
            for j in i + 1..n {
                m.set(i, j, it.next().ok_or(FrobError::NotUnipotent)?.clone());
            }
        }
        Self::new(m)
    }

    /// Random entries with numerators and denominators bounded by 3.
    pub fn random(n: usize, seed: u64) -> Self {
        let mut s = RationalSampler::new(seed);
        let upper: Vec<Coeff> = (0..n * (n - 1) / 2).map(|_| s.bounded(3)).collect();
        Self::from_upper(n, &upper).expect("well-formed")
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn matrix(&self) -> &RatMatrix {
        &self.0
    }

    /// `G = S + Sᵀ`.
    pub fn gram(&self) -> RatMatrix {
        self.0.add(&self.0.transpose())
    }

    /// Trailing principal block from index `from` (1-based).
    pub fn trailing(&self, from: usize) -> StokesMatrix {
        let n = self.dim();
        StokesMatrix(self.0.block(from - 1, n, from - 1, n))
    }
}

impl fmt::Display for StokesMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.dim();
        for i in 0..n {
            let row: Vec<String> = (0..n).map(|j| self.0.get(i, j).to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// `ℳ_k = 1 − E_k (S + Sᵀ)`.
pub fn monodromy_from_stokes(s: &StokesMatrix, k: usize) -> Result<RatMatrix, FrobError> {
    let n = s.dim();
    if k == 0 || k > n {
        return Err(FrobError::IndexOutOfRange(k, n));
    }
    let g = s.gram();
    Ok(RatMatrix::from_fn(n, n, |i, j| {
        let id = if i == j { q(1) } else { q(0) };
        if i == k - 1 {
            id - g.get(i, j)
        } else {
            id
        }
    }))
}

/// `ℳ_a ℳ_{a+1} ⋯ ℳ_b`.
pub fn monodromy_product(s: &StokesMatrix, a: usize, b: usize) -> Result<RatMatrix, FrobError> {
    let mut out = RatMatrix::identity(s.dim());
    for k in a..=b {
        out = out.mul(&monodromy_from_stokes(s, k)?);
    }
    Ok(out)
}

/// `S ℳ_1 ⋯ ℳ_n = −Sᵀ`.
pub fn product_identity(s: &StokesMatrix) -> bool {
    let m = monodromy_product(s, 1, s.dim()).expect("in range");
    s.0.mul(&m) == s.0.transpose().neg()
}

/// Block structure of `ℳ_h = ℳ_ñ ⋯ ℳ_n`.
#[derive(Clone, Debug)]
pub struct ClashBlock {
    pub mh: RatMatrix,
    /// Lower-left `(n−ñ+1) × (ñ−1)` block.
    pub b: RatMatrix,
    pub identity_block: bool,
    pub zero_block: bool,
    pub lower_right: bool,
    /// `G ℳ_h = ℳ_h^{−T} G`.
    pub intertwining: bool,
}

impl ClashBlock {
    pub fn ok(&self) -> bool {
        self.identity_block && self.zero_block && self.lower_right && self.intertwining
    }
}

/// `−S̃^{−1} S̃ᵀ`.
pub fn reduced_monodromy(st: &StokesMatrix) -> RatMatrix {
    st.0.inverse().expect("unipotent").mul(&st.0.transpose()).neg()
}

pub fn clash_block(s: &StokesMatrix, nt: usize) -> Result<ClashBlock, FrobError> {
    let n = s.dim();
    if nt == 0 || nt > n {
        return Err(FrobError::IndexOutOfRange(nt, n));
    }
    let mh = monodromy_product(s, nt, n)?;
    let c = nt - 1;
    let identity_block = mh.block(0, c, 0, c).is_identity() || c == 0;
    let zero_block = mh.block(0, c, c, n) == RatMatrix::zeros(c, n - c);
    let lower_right = mh.block(c, n, c, n) == reduced_monodromy(&s.trailing(nt));
    let g = s.gram();
    let inv_t = mh.inverse().ok_or(FrobError::Singular)?.transpose();
    let intertwining = g.mul(&mh) == inv_t.mul(&g);
    Ok(ClashBlock { b: mh.block(c, n, 0, c), mh, identity_block, zero_block, lower_right, intertwining })
}

/// `G^{(k)} = G ℳ_h^k` with `ℳ_h = ℳ_ñ ⋯ ℳ_n`.
pub fn gk_family(s: &StokesMatrix, nt: usize, k: i64) -> Result<RatMatrix, FrobError> {
    let mh = monodromy_product(s, nt, s.dim())?;
    Ok(s.gram().mul(&mh.pow(k).ok_or(FrobError::Singular)?))
}

/// Outcome of the Poisson comparison on one Stokes matrix.
#[derive(Clone, Debug)]
pub struct RealizationReport {
    pub pairs: usize,
    /// Largest relative deviation of `{G², G'²}` from `4GG'·¼·c(G, G')`.
    pub max_error: f64,
    pub worst: Option<(GenIndex, GenIndex)>,
}

/// Compares the monodromy bracket of `G^{(k)}_{ij}` (levels ≤ `max_level`,
/// `i, j ≤ n`) with the `𝔇_n` structure constants on a Stokes matrix of size
/// `n + 2` whose last two monodromies form the hole.
pub fn realization_check(n: usize, max_level: u32, s: &StokesMatrix) -> Result<RealizationReport, FrobError> {
    let big = s.dim();
    if big != n + 2 {
        return Err(FrobError::IndexOutOfRange(big, n + 2));
    }
    let hole = [n + 1, n + 2];
    let mats: Vec<DMatrix<f64>> =
        (1..=big).map(|k| monodromy_from_stokes(s, k).map(|m| m.to_f64())).collect::<Result<_, _>>()?;
    let pt = NumPoint::new(mats)?;
    let gram = s.gram().to_f64();
    let mh = monodromy_product(s, n + 1, big)?.to_f64();
    let top = max_level as i32 + max_level as i32;
    let mut powers = vec![DMatrix::identity(big, big)];
    for _ in 0..top {
        let next = powers.last().unwrap() * &mh;
        powers.push(next);
    }
    let gval = |g: &GenIndex| -> f64 { (&gram * &powers[g.k as usize])[(g.i as usize - 1, g.j as usize - 1)] };
    let alg = GenAlgebra::dn(n);
    let gens = alg.generators(max_level);
    let mut report = RealizationReport { pairs: 0, max_error: 0.0, worst: None };
    for a in &gens {
        for b in &gens {
            let fa = TracePoly::trace(NumWord::generator(a.i as usize, a.j as usize, a.k, &hole));
            let fb = TracePoly::trace(NumWord::generator(b.i as usize, b.j as usize, b.k, &hole));
            let raw = ks_calculus::ks_bracket_numeric(&fa, &fb, &pt)?;
            let (ga, gb) = (gval(a), gval(b));
            // {G², G'²} = 4 G G' {G, G'}; compared without dividing so that
            // vanishing G values are harmless.
            let c = alg.structure_constant(*a, *b).expect("canonical").eval_f64(&|atom| match atom {
                Atom::G(g) => gval(g),
                _ => f64::NAN,
            });
            let rhs = 4.0 * ga * gb * RAW_FACTOR * c;
            let err = (raw - rhs).abs() / rhs.abs().max(raw.abs()).max(1.0);
            report.pairs += 1;
            if err.is_nan() || err > report.max_error {
                report.max_error = err;
                report.worst = Some((*a, *b));
            }
        }
    }
    Ok(report)
}

/// The literal three-point clash: with `n = 3`, `ñ = 2` only `G^{(k)}_{11}`
/// survives. Returns `Tr(ℳ_1 ℳ_h^k ℳ_1 ℳ_h^{−k}) − (n − 4) − (G^{(k)}_{11})²`
/// for `k = 0..=2`, and the self-bracket, all of which vanish.
pub fn literal_three_point(s: &StokesMatrix) -> Result<Vec<f64>, FrobError> {
    let mats: Vec<DMatrix<f64>> = (1..=3).map(|k| monodromy_from_stokes(s, k).map(|m| m.to_f64())).collect::<Result<_, _>>()?;
    let pt = NumPoint::new(mats)?;
    let mut out = Vec::new();
    for k in 0..=2 {
        let w = NumWord::generator(1, 1, k, &[2, 3]);
        let g = gk_family(s, 2, k as i64)?.to_f64()[(0, 0)];
        out.push(pt.trace(&w)? + 1.0 - g * g);
        let f = TracePoly::trace(w);
        out.push(ks_calculus::ks_bracket_numeric(&f, &f, &pt)?);
    }
    Ok(out)
}

/// Level-`p` conditions for `ℳ_h = ℳ_ñ ⋯ ℳ_n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelPReport {
    /// `(−S̃^{−1}S̃ᵀ)^p = 1`.
    pub reduced_power: bool,
    /// `S̃ + S̃ᵀ` nondegenerate.
    pub nondegenerate: bool,
    /// `ℳ_h^p = 1`; only evaluated when both hypotheses hold.
    pub full_power: Option<bool>,
}

impl LevelPReport {
    pub fn describe(&self) -> &'static str {
        match (self.reduced_power, self.nondegenerate, self.full_power) {
            (_, false, _) => "nondegeneracy failed",
            (false, _, _) => "reduced power is not the identity",
            (_, _, Some(true)) => "level-p condition holds",
            _ => "level-p condition fails",
        }
    }
}

pub fn level_p_condition(s: &StokesMatrix, nt: usize, p: u32) -> Result<LevelPReport, FrobError> {
    let st = s.trailing(nt);
    let reduced_power = reduced_monodromy(&st).pow(p as i64).expect("unipotent").is_identity();
    let nondegenerate = st.gram().rank() == st.dim();
    let full_power = (reduced_power && nondegenerate)
        .then(|| monodromy_product(s, nt, s.dim()).map(|m| m.pow(p as i64).map(|x| x.is_identity()) == Some(true)))
        .transpose()?;
    Ok(LevelPReport { reduced_power, nondegenerate, full_power })
}

/// `det(η·1 − M)` as a polynomial in `η` (written with `lam`).
pub fn char_poly(m: &RatMatrix) -> SymExpr {
    let n = m.rows();
    let eta = lam(1);
    let lm = m.to_lambda();
    crate::poly_core::LambdaMatrix::from_fn(n, |i, j| {
        let d = if i == j { eta.clone() } else { SymExpr::zero() };
        &d - lm.get(i, j)
    })
    .det()
}

/// Stokes matrix of size `n` with all trailing entries `G_{ij} = 1`
/// (`ñ ≤ i < j`) and seeded entries elsewhere.
pub fn all_ones_trailing(n: usize, nt: usize, seed: u64) -> StokesMatrix {
    let mut s = RationalSampler::new(seed);
    let mut m = RatMatrix::identity(n);
    for i in 0..n {
        for j in i + 1..n {
            m.set(i, j, if i + 1 >= nt { q(1) } else { s.bounded(3) });
        }
    }
    StokesMatrix::new(m).expect("unipotent")
}

/// `𝒜` from geodesic functions at the given shears (symbolic entries).
pub fn teich_stokes(n: usize, s: &[SymExpr], t: &[SymExpr]) -> Result<crate::poly_core::LambdaMatrix, fatgraph::GraphError> {
    let table = fatgraph::geodesic_table(n)?;
    let b = fatgraph::shear_bindings(s, t);
    Ok(crate::poly_core::LambdaMatrix::from_fn(n, |i, j| match i.cmp(&j) {
        std::cmp::Ordering::Less => table[&(i + 1, j + 1)].subst_unchecked(&b),
        std::cmp::Ordering::Equal => SymExpr::one(),
        std::cmp::Ordering::Greater => SymExpr::zero(),
    }))
}

fn table_to_stokes(n: usize, table: &BTreeMap<(usize, usize), SymExpr>) -> Option<StokesMatrix> {
    let mut m = RatMatrix::identity(n);
    for (&(i, j), v) in table {
        m.set(i - 1, j - 1, v.as_constant()?);
    }
    StokesMatrix::new(m).ok()
}

/// `A_3^*`: all shears at the origin.
pub fn a3_star() -> StokesMatrix {
    table_to_stokes(3, &fatgraph::a3_star()).expect("rational point")
}

/// `A_4^*`: alternating shears `±log 2 / 2`, `Y = 0`.
pub fn a4_star() -> StokesMatrix {
    table_to_stokes(4, &fatgraph::a4_star()).expect("rational point")
}

/// Smallest `|G_{ij}|`, `i < j`, along random braid words of length `len`
/// applied to `s`, one value per word.
pub fn braid_orbit_monitor(s: &StokesMatrix, words: usize, len: usize, seed: u64) -> Result<Vec<Coeff>, FrobError> {
    let n = s.dim();
    let mut rng = RationalSampler::new(seed);
    let mut out = Vec::with_capacity(words);
    for _ in 0..words {
        let mut a = s.0.to_lambda();
        for _ in 0..len {
            let i = 1 + rng.index(n - 1);
            let b = if rng.small_int(1) > 0 { BraidGen::adjacent(i) } else { BraidGen::adjacent(i).inv() };
            a = braid::act_an(b, &a).map_err(|_| FrobError::Singular)?;
        }
        let m = RatMatrix::from_lambda(&a).map_err(|_| FrobError::Singular)?;
        let min = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .map(|(i, j)| num_traits::Signed::abs(m.get(i, j)))
            .min()
            .unwrap_or_else(|| q(0));
        out.push(min);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn monodromy_instance() {
        let s = StokesMatrix::from_upper(2, &[q(5)]).unwrap();
        let m1 = monodromy_from_stokes(&s, 1).unwrap();
        assert_eq!(m1, RatMatrix::from_rows(vec![vec![q(-1), q(-5)], vec![q(0), q(1)]]));
        assert!(StokesMatrix::new(RatMatrix::from_rows(vec![vec![q(1), q(0)], vec![q(1), q(1)]])).is_err());
        assert!(monodromy_from_stokes(&s, 3).is_err());
    }

    #[test]
    fn whole_product_is_reduced_monodromy() {
        let s = StokesMatrix::random(4, 3);
        let blk = clash_block(&s, 1).unwrap();
        assert_eq!(blk.mh, reduced_monodromy(&s));
        assert!(blk.ok());
    }

    #[test]
    fn literal_three_point_is_degenerate() {
        for v in literal_three_point(&StokesMatrix::random(3, 8)).unwrap() {
            assert!(v.abs() < 1e-9, "{v}");
        }
    }

    #[test]
    fn realization_matches_quarter() {
        for seed in 0..3 {
            let r = realization_check(3, 1, &StokesMatrix::random(5, seed)).unwrap();
            assert_eq!(r.pairs, 144);
            assert!(r.max_error < 1e-9, "{r:?}");
        }
        assert_eq!(RAW_FACTOR * BRACKET_RESCALING, PRINTED_FACTOR);
    }

    #[test]
    fn level_p_example() {
        for m in 2..=3usize {
            let p = m as u32 + 1;
            let st = all_ones_trailing(m, 1, 0);
            let cp = char_poly(&reduced_monodromy(&st));
            let want: SymExpr = (0..=m as i32).map(lam).sum();
            assert_eq!(cp, want);
            let s = all_ones_trailing(m + 2, 3, 11);
            let rep = level_p_condition(&s, 3, p).unwrap();
            assert_eq!(rep.full_power, Some(true), "{}", rep.describe());
            assert_eq!(rep.describe(), "level-p condition holds");
        }
        // m = 2: the reduced block has order exactly 3.
        let st = all_ones_trailing(2, 1, 0);
        assert!(!reduced_monodromy(&st).is_identity());
        assert!(reduced_monodromy(&st).pow(3).unwrap().is_identity());
    }

    #[test]
    fn degenerate_form_is_reported() {
        // S̃ = [[1, −2], [0, 1]] gives S̃ + S̃ᵀ = [[2, −2], [−2, 2]].
        let s = StokesMatrix::from_upper(3, &[q(1), q(1), q(-2)]).unwrap();
        let rep = level_p_condition(&s, 2, 1).unwrap();
        assert!(!rep.nondegenerate);
        assert_eq!(rep.full_power, None);
        assert_eq!(rep.describe(), "nondegeneracy failed");
    }

    #[test]
    fn quantum_cohomology_points() {
        let a3 = a3_star();
        assert_eq!(a3, StokesMatrix::from_upper(3, &[q(3), q(3), q(3)]).unwrap());
        let a4 = a4_star();
        assert_eq!(a4, StokesMatrix::from_upper(4, &[q(4), q(6), q(4), q(4), q(6), q(4)]).unwrap());
        for min in braid_orbit_monitor(&a3, 10, 6, 1).unwrap() {
            assert!(min > q(2));
        }
    }

    #[test]
    fn generic_teich_entries() {
        let z = SymExpr::zero();
        let m = teich_stokes(3, &[SymExpr::atom(Atom::S(1)), SymExpr::atom(Atom::S(2)), SymExpr::atom(Atom::S(3))], &[]).unwrap();
        assert_eq!(*m.get(1, 0), z);
        assert_eq!(*m.get(0, 1), fatgraph::geodesic_function(3, 1, 2).unwrap());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn exact_identities(seed in 0u64..10_000, n in 2usize..6) {
            let s = StokesMatrix::random(n, seed);
            prop_assert!(product_identity(&s));
            for k in 1..=n {
                let m = monodromy_from_stokes(&s, k).unwrap();
                prop_assert!(m.mul(&m).is_identity());
            }
            for nt in 1..=n {
                prop_assert!(clash_block(&s, nt).unwrap().ok());
            }
            let g1 = gk_family(&s, 2.min(n), 1).unwrap();
            let gm1 = gk_family(&s, 2.min(n), -1).unwrap();
            prop_assert_eq!(gm1, g1.transpose());
            prop_assert_eq!(gk_family(&s, 1, 0).unwrap(), s.gram());
        }
    }
}
