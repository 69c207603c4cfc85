//! Braid group actions on `A_n`, `𝔇_n` and `D_n` data: componentwise maps,
//! matrix-conjugation forms and relation checks.
//!
//! Words act as operators: in `b12 b23` the generator `b23` acts first.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::dn_algebra::GenAlgebra;
use crate::poly_core::{lam, Atom, GenIndex, LambdaMatrix, SymExpr};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BraidError {
    #[error("the wrap generator is not defined for A_n")]
    WrapUndefined,
    #[error("generator {0} does not act on rank {1}")]
    IndexOutOfRange(String, usize),
    #[error("wrap action needs input levels up to {need}, data is certified up to {cap}")]
    InsufficientLevels { need: i32, cap: i32 },
    #[error("level {level} is not certified (data certified up to {cap})")]
    Uncertified { level: i32, cap: i32 },
    #[error("shape mismatch: expected {expected}, got {got}")]
    Shape { expected: usize, got: usize },
    #[error("cannot parse braid word: {0}")]
    Parse(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BraidKind {
    /// `β_{i,i+1}`.
    Adjacent(usize),
    /// `β_{n,1}`.
    Wrap,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BraidGen {
    pub kind: BraidKind,
    pub inverse: bool,
}

impl BraidGen {
    pub fn adjacent(i: usize) -> Self {
        BraidGen { kind: BraidKind::Adjacent(i), inverse: false }
    }

    pub fn wrap() -> Self {
        BraidGen { kind: BraidKind::Wrap, inverse: false }
    }

    pub fn inv(self) -> Self {
        BraidGen { inverse: !self.inverse, ..self }
    }

    /// The two indices the generator exchanges.
    pub fn pair(self, n: usize) -> (usize, usize) {
        match self.kind {
            BraidKind::Adjacent(i) => (i, i + 1),
            BraidKind::Wrap => (n, 1),
        }
    }

    fn check(self, n: usize) -> Result<(), BraidError> {
        match self.kind {
            BraidKind::Adjacent(i) if i == 0 || i >= n => Err(BraidError::IndexOutOfRange(self.to_string(), n)),
            BraidKind::Wrap if n < 2 => Err(BraidError::IndexOutOfRange(self.to_string(), n)),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for BraidGen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            BraidKind::Adjacent(i) => write!(f, "b{},{}", i, i + 1)?,
            BraidKind::Wrap => write!(f, "bn,1")?,
        }
        if self.inverse {
            write!(f, "^-1")?;
        }
        Ok(())
    }
}

/// A sequence of generators; the rightmost acts first.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BraidWord(pub Vec<BraidGen>);

impl BraidWord {
    pub fn inverse(&self) -> Self {
        BraidWord(self.0.iter().rev().map(|b| b.inv()).collect())
    }

    pub fn pow(&self, k: usize) -> Self {
        BraidWord(self.0.iter().copied().cycle().take(self.0.len() * k).collect())
    }

    pub fn then(&self, other: &BraidWord) -> Self {
        // `other` acts after `self`
        BraidWord(other.0.iter().chain(self.0.iter()).copied().collect())
    }

    /// Generators in the order they act.
    pub fn acting_order(&self) -> impl Iterator<Item = BraidGen> + '_ {
        self.0.iter().rev().copied()
    }

    /// Parses words like `b12 b23 b31^-1` for rank `n`; `b{n}1` is the wrap
    /// generator. Two-digit indices may be separated by a comma (`b10,11`).
    pub fn parse(text: &str, n: usize) -> Result<Self, BraidError> {
        let mut out = Vec::new();
        for tok in text.split_whitespace() {
            let (body, inv) = match tok.strip_suffix("^-1") {
                Some(b) => (b, true),
                None => (tok, false),
            };
            let digits = body.strip_prefix('b').ok_or_else(|| BraidError::Parse(tok.into()))?;
            let (a, b): (usize, usize) = if let Some((x, y)) = digits.split_once(',') {
                (x.parse().map_err(|_| BraidError::Parse(tok.into()))?, y.parse().map_err(|_| BraidError::Parse(tok.into()))?)
            } else if digits.len() == 2 {
                let d: Vec<u32> = digits.chars().filter_map(|c| c.to_digit(10)).collect();
                if d.len() != 2 {
                    return Err(BraidError::Parse(tok.into()));
                }
                (d[0] as usize, d[1] as usize)
            } else {
                return Err(BraidError::Parse(tok.into()));
            };
            let g = if b == a + 1 && a >= 1 && b <= n {
                BraidGen::adjacent(a)
            } else if a == n && b == 1 {
                BraidGen::wrap()
            } else {
                return Err(BraidError::IndexOutOfRange(tok.into(), n));
            };
            out.push(if inv { g.inv() } else { g });
        }
        Ok(BraidWord(out))
    }
}

impl FromStr for BraidGen {
    type Err = BraidError;

    /// Parses `b12`, `b23^-1`; the wrap generator is written `bw`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (body, inv) = match s.strip_suffix("^-1") {
            Some(b) => (b, true),
            None => (s, false),
        };
        let g = if body == "bw" {
            BraidGen::wrap()
        } else {
            let w = BraidWord::parse(body, usize::MAX)?;
            *w.0.first().ok_or_else(|| BraidError::Parse(s.into()))?
        };
        Ok(if inv { g.inv() } else { g })
    }
}

/// Level-indexed generator family `G^{(k)}_{ij}`, stored at canonical
/// indices for levels `0..=cap`; other indices are read through
/// `G^{(k)}_{ij} = G^{(−k)}_{ji}` and `G^{(0)}_{ii} = 2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelFamily {
    pub n: usize,
    pub cap: i32,
    entries: BTreeMap<GenIndex, SymExpr>,
}

impl LevelFamily {
    pub fn keys(n: usize, cap: i32) -> Vec<GenIndex> {
        let mut out = Vec::new();
        for k in 0..=cap {
            for i in 1..=n {
                for j in 1..=n {
                    if k > 0 || i < j {
                        out.push(GenIndex::new(i, j, k));
                    }
                }
            }
        }
        out
    }

    /// Every generator mapped to its own atom.
    pub fn generic(n: usize, cap: i32) -> Self {
        let entries = Self::keys(n, cap).into_iter().map(|g| (g, SymExpr::atom(Atom::G(g)))).collect();
        LevelFamily { n, cap, entries }
    }

    pub fn from_fn(n: usize, cap: i32, mut f: impl FnMut(GenIndex) -> SymExpr) -> Self {
        let entries = Self::keys(n, cap).into_iter().map(|g| (g, f(g))).collect();
        LevelFamily { n, cap, entries }
    }

    pub fn get(&self, i: usize, j: usize, k: i32) -> Result<SymExpr, BraidError> {
        match GenIndex::new(i, j, k).canonical() {
            None => Ok(SymExpr::int(2)),
            Some(c) if c.k > self.cap => Err(BraidError::Uncertified { level: c.k, cap: self.cap }),
            Some(c) => Ok(self.entries[&c].clone()),
        }
    }

    pub fn entries(&self) -> &BTreeMap<GenIndex, SymExpr> {
        &self.entries
    }

    /// Substitution sending each generator atom to its entry.
    pub fn bindings(&self) -> BTreeMap<Atom, SymExpr> {
        self.entries.iter().map(|(g, v)| (Atom::G(*g), v.clone())).collect()
    }

    /// Restrict to levels `0..=cap`.
    pub fn truncate(&self, cap: i32) -> Self {
        let cap = cap.min(self.cap);
        LevelFamily {
            n: self.n,
            cap,
            entries: self.entries.iter().filter(|(g, _)| g.k <= cap).map(|(g, v)| (*g, v.clone())).collect(),
        }
    }

    /// `𝒢(λ) = 𝒜 + Σ_{k=1}^{cap} 𝒢^{(k)} λ^{−k}` with `𝒜` upper triangular,
    /// unit diagonal.
    pub fn to_series(&self) -> SeriesMatrix {
        let n = self.n;
        let m = LambdaMatrix::from_fn(n, |r, c| {
            let (i, j) = (r + 1, c + 1);
            let mut e = if i < j {
                self.entries[&GenIndex::new(i, j, 0)].clone()
            } else if i == j {
                SymExpr::one()
            } else {
                SymExpr::zero()
            };
            for k in 1..=self.cap {
                e += &self.entries[&GenIndex::new(i, j, k)] * &lam(-k);
            }
            e
        });
        SeriesMatrix { m, cap: self.cap }
    }
}

/// Truncated `𝒢(λ)` with its certified level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeriesMatrix {
    pub m: LambdaMatrix,
    pub cap: i32,
}

impl SeriesMatrix {
    pub fn truncate(&self, cap: i32) -> Self {
        let cap = cap.min(self.cap);
        SeriesMatrix { m: self.m.truncate_below(-cap), cap }
    }
}

/// One term of a row of a (possibly `λ`-dependent) braid matrix:
/// column index, coefficient, power of `λ`.
type RowTerm = (usize, SymExpr, i32);

/// Rows of the braid matrix (left factor) and of the right factor before
/// transposition, for the two exchanged indices. `g` is the fixed generator.
fn row_maps(b: BraidGen, n: usize, g: &SymExpr) -> (BTreeMap<usize, Vec<RowTerm>>, BTreeMap<usize, Vec<RowTerm>>) {
    let one = SymExpr::one;
    let neg = || SymExpr::int(-1);
    let (x, y) = b.pair(n);
    let mut left = BTreeMap::new();
    let mut right = BTreeMap::new();
    match (b.kind, b.inverse) {
        (BraidKind::Adjacent(_), false) => {
            left.insert(x, vec![(x, g.clone(), 0), (y, neg(), 0)]);
            left.insert(y, vec![(x, one(), 0)]);
            right = left.clone();
        }
        (BraidKind::Adjacent(_), true) => {
            left.insert(x, vec![(y, one(), 0)]);
            left.insert(y, vec![(x, neg(), 0), (y, g.clone(), 0)]);
            right = left.clone();
        }
        // B(λ): row 1 = λ e_n, row n = −λ^{−1} e_1 + g e_n.
        (BraidKind::Wrap, false) => {
            left.insert(y, vec![(x, one(), 1)]);
            left.insert(x, vec![(y, neg(), -1), (x, g.clone(), 0)]);
            right.insert(y, vec![(x, one(), -1)]);
            right.insert(x, vec![(y, neg(), 1), (x, g.clone(), 0)]);
        }
        // B(λ)^{−1}: row 1 = g e_1 − λ e_n, row n = λ^{−1} e_1.
        (BraidKind::Wrap, true) => {
            left.insert(y, vec![(y, g.clone(), 0), (x, neg(), 1)]);
            left.insert(x, vec![(y, one(), -1)]);
            right.insert(y, vec![(y, g.clone(), 0), (x, neg(), -1)]);
            right.insert(x, vec![(y, one(), 1)]);
        }
    }
    (left, right)
}

/// Componentwise action on a level family. Adjacent generators preserve
/// levels; the wrap generator (either direction) reads levels `k ± 2`, so the
/// output is certified two levels below the input.
pub fn act_frak_dn(b: BraidGen, fam: &LevelFamily) -> Result<LevelFamily, BraidError> {
    let n = fam.n;
    b.check(n)?;
    let (g, cap) = match b.kind {
        BraidKind::Adjacent(i) => (fam.get(i, i + 1, 0)?, fam.cap),
        BraidKind::Wrap => {
            if fam.cap < 2 {
                return Err(BraidError::InsufficientLevels { need: 2, cap: fam.cap });
            }
            (fam.get(n, 1, 1)?, fam.cap - 2)
        }
    };
    let (left, right) = row_maps(b, n, &g);
    let ident = |r: usize| vec![(r, SymExpr::one(), 0)];
    let mut entries = BTreeMap::new();
    for key in LevelFamily::keys(n, cap) {
        let (i, j, k) = (key.i as usize, key.j as usize, key.k);
        let li = left.get(&i).cloned().unwrap_or_else(|| ident(i));
        let rj = right.get(&j).cloned().unwrap_or_else(|| ident(j));
        let mut e = SymExpr::zero();
        for (r, cr, sr) in &li {
            for (c, cc, sc) in &rj {
                e += &(cr * cc) * &fam.get(*r, *c, k + sr + sc)?;
            }
        }
        entries.insert(key, e);
    }
    Ok(LevelFamily { n, cap, entries })
}

/// Matrix-form action: `B 𝒢(λ) Bᵀ` for adjacent generators,
/// `B_{n,1}(λ) 𝒢(λ) B_{n,1}(λ^{−1})ᵀ` for the wrap generator.
pub fn act_matrix(b: BraidGen, s: &SeriesMatrix) -> Result<SeriesMatrix, BraidError> {
    let n = s.m.dim();
    b.check(n)?;
    let (bl, br, cap) = match b.kind {
        BraidKind::Adjacent(i) => {
            let g = s.m.get(i - 1, i).coeff_of(&Atom::Lam, 0);
            let m = adjacent_matrix(n, i, &g, b.inverse);
            (m.clone(), m, s.cap)
        }
        BraidKind::Wrap => {
            if s.cap < 2 {
                return Err(BraidError::InsufficientLevels { need: 2, cap: s.cap });
            }
            let g = s.m.get(n - 1, 0).coeff_of(&Atom::Lam, -1);
            let m = wrap_matrix(n, &g, b.inverse);
            (m.clone(), m.invert_lambda(), s.cap - 2)
        }
    };
    let out = bl.mul(&s.m).and_then(|x| x.mul(&br.transpose())).expect("square matrices of equal size");
    Ok(SeriesMatrix { m: out, cap: s.cap }.truncate(cap))
}

/// `B_{i,i+1}` (or its inverse) with block `[[g, −1], [1, 0]]`.
pub fn adjacent_matrix(n: usize, i: usize, g: &SymExpr, inverse: bool) -> LambdaMatrix {
    let mut m = LambdaMatrix::identity(n);
    let (a, b) = (i - 1, i);
    if inverse {
        m.set(a, a, SymExpr::zero());
        m.set(a, b, SymExpr::one());
        m.set(b, a, SymExpr::int(-1));
        m.set(b, b, g.clone());
    } else {
        m.set(a, a, g.clone());
        m.set(a, b, SymExpr::int(-1));
        m.set(b, a, SymExpr::one());
        m.set(b, b, SymExpr::zero());
    }
    m
}

/// `B_{n,1}(λ)` (or its inverse): corner entries `λ`, `−λ^{−1}`, `g`.
pub fn wrap_matrix(n: usize, g: &SymExpr, inverse: bool) -> LambdaMatrix {
    let mut m = LambdaMatrix::identity(n);
    let z = n - 1;
    if inverse {
        m.set(0, 0, g.clone());
        m.set(0, z, -lam(1));
        m.set(z, 0, lam(-1));
        m.set(z, z, SymExpr::zero());
    } else {
        m.set(0, 0, SymExpr::zero());
        m.set(0, z, lam(1));
        m.set(z, 0, -lam(-1));
        m.set(z, z, g.clone());
    }
    m
}

/// Generic upper-triangular `𝒜` with atoms `G[i,j,0]`.
pub fn generic_a(n: usize) -> LambdaMatrix {
    LambdaMatrix::from_fn(n, |r, c| match r.cmp(&c) {
        std::cmp::Ordering::Less => SymExpr::g(r + 1, c + 1, 0),
        std::cmp::Ordering::Equal => SymExpr::one(),
        std::cmp::Ordering::Greater => SymExpr::zero(),
    })
}

fn a_to_family(a: &LambdaMatrix) -> LevelFamily {
    LevelFamily::from_fn(a.dim(), 0, |g| a.get(g.i as usize - 1, g.j as usize - 1).clone())
}

/// Componentwise `A_n` action on an upper-triangular `𝒜`.
pub fn act_an(b: BraidGen, a: &LambdaMatrix) -> Result<LambdaMatrix, BraidError> {
    if b.kind == BraidKind::Wrap {
        return Err(BraidError::WrapUndefined);
    }
    let f = act_frak_dn(b, &a_to_family(a))?;
    Ok(f.to_series().m)
}

/// Matrix form `B 𝒜 Bᵀ` of the `A_n` action.
pub fn act_an_matrix(b: BraidGen, a: &LambdaMatrix) -> Result<LambdaMatrix, BraidError> {
    if b.kind == BraidKind::Wrap {
        return Err(BraidError::WrapUndefined);
    }
    Ok(act_matrix(b, &SeriesMatrix { m: a.clone(), cap: 0 })?.m)
}

pub fn act_an_word(w: &BraidWord, a: &LambdaMatrix) -> Result<LambdaMatrix, BraidError> {
    w.acting_order().try_fold(a.clone(), |acc, b| act_an(b, &acc))
}

pub fn act_frak_dn_word(w: &BraidWord, fam: &LevelFamily) -> Result<LevelFamily, BraidError> {
    w.acting_order().try_fold(fam.clone(), |acc, b| act_frak_dn(b, &acc))
}

pub fn act_matrix_word(w: &BraidWord, s: &SeriesMatrix) -> Result<SeriesMatrix, BraidError> {
    w.acting_order().try_fold(s.clone(), |acc, b| act_matrix(b, &acc))
}

/// `n × n` family `Ĝ_{ij}` of the `D_n` algebra.
pub type HatFamily = BTreeMap<(usize, usize), SymExpr>;

pub fn generic_hat(n: usize) -> HatFamily {
    let mut h = HatFamily::new();
    for i in 1..=n {
        for j in 1..=n {
            h.insert((i, j), SymExpr::atom(Atom::ghat(i, j)));
        }
    }
    h
}

/// Componentwise `D_n` action; the wrap generator is the adjacent formula
/// for the pair `(n, 1)`.
pub fn act_dn(b: BraidGen, g: &HatFamily) -> Result<HatFamily, BraidError> {
    let n = (g.len() as f64).sqrt() as usize;
    if n * n != g.len() {
        return Err(BraidError::Shape { expected: n * n, got: g.len() });
    }
    b.check(n)?;
    let (x, y) = b.pair(n);
    let at = |i: usize, j: usize| g[&(i, j)].clone();
    let mut t = g.clone();
    let p = at(x, y);
    for k in 1..=n {
        if k == x || k == y {
            continue;
        }
        if !b.inverse {
            t.insert((y, k), at(x, k));
            t.insert((x, k), &at(x, k) * &p - at(y, k));
            t.insert((k, y), at(k, x));
            t.insert((k, x), &at(k, x) * &p - at(k, y));
        } else {
            t.insert((x, k), at(y, k));
            t.insert((y, k), &at(y, k) * &p - at(x, k));
            t.insert((k, x), at(k, y));
            t.insert((k, y), &at(k, y) * &p - at(k, x));
        }
    }
    if !b.inverse {
        t.insert((y, y), at(x, x));
        t.insert((x, x), &at(x, x) * &p - at(y, y));
        t.insert((y, x), at(y, x) + &p * &(&at(x, x) * &at(x, x)) - (&at(x, x) * &at(y, y)).scale_int(2));
    } else {
        let gx = at(y, y);
        let gy = &at(y, y) * &p - at(x, x);
        t.insert((y, x), at(y, x) - &p * &(&gx * &gx) + (&gx * &gy).scale_int(2));
        t.insert((x, x), gx);
        t.insert((y, y), gy);
    }
    Ok(t)
}

pub fn act_dn_word(w: &BraidWord, g: &HatFamily) -> Result<HatFamily, BraidError> {
    w.acting_order().try_fold(g.clone(), |acc, b| act_dn(b, &acc))
}

/// Quantum braid matrices: block `[[qG, −q²], [1, 0]]`, or the wrap matrix
/// with corners `λ`, `−q²λ^{−1}`, `qG^{(1)}_{n,1}`. Constructors only.
pub fn quantum_matrix(b: BraidGen, n: usize, q: &SymExpr) -> Result<LambdaMatrix, BraidError> {
    b.check(n)?;
    let q2 = q * q;
    let mut m = LambdaMatrix::identity(n);
    match b.kind {
        BraidKind::Adjacent(i) => {
            m.set(i - 1, i - 1, q * &SymExpr::g(i, i + 1, 0));
            m.set(i - 1, i, -q2);
            m.set(i, i - 1, SymExpr::one());
            m.set(i, i, SymExpr::zero());
        }
        BraidKind::Wrap => {
            m.set(0, 0, SymExpr::zero());
            m.set(0, n - 1, lam(1));
            m.set(n - 1, 0, -(&q2 * &lam(-1)));
            m.set(n - 1, n - 1, q * &SymExpr::g(n, 1, 1));
        }
    }
    Ok(m)
}

/// Algebra flavor for relation checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BraidFlavor {
    An,
    /// Componentwise level families.
    FrakDn,
    /// Matrix form on truncated series.
    FrakDnMatrix,
    Dn,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationCheck {
    pub relation: String,
    pub holds: bool,
    /// Certified level of the compared data (−1 when not applicable).
    pub level: i32,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RelationReport {
    pub checks: Vec<RelationCheck>,
}

impl RelationReport {
    pub fn ok(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(|c| c.holds)
    }
}

fn adjacent_pairs(flavor: BraidFlavor, n: usize) -> Vec<(BraidGen, BraidGen)> {
    let next = |i: usize| if i == n { BraidGen::wrap() } else { BraidGen::adjacent(i) };
    match flavor {
        BraidFlavor::An => (2..n).map(|i| (BraidGen::adjacent(i - 1), BraidGen::adjacent(i))).collect(),
        _ => (1..=n).map(|i| (next(if i == 1 { n } else { i - 1 }), next(i))).collect(),
    }
}

/// Compares the actions of two words on generic data of the given flavor.
pub fn words_agree(flavor: BraidFlavor, n: usize, cap: i32, u: &BraidWord, v: &BraidWord) -> Result<(bool, i32), BraidError> {
    Ok(match flavor {
        BraidFlavor::An => (act_an_word(u, &generic_a(n))? == act_an_word(v, &generic_a(n))?, 0),
        BraidFlavor::FrakDn => {
            let f = LevelFamily::generic(n, cap);
            let a = act_frak_dn_word(u, &f)?;
            let b = act_frak_dn_word(v, &f)?;
            let c = a.cap.min(b.cap);
            (a.truncate(c) == b.truncate(c), c)
        }
        BraidFlavor::FrakDnMatrix => {
            let s = LevelFamily::generic(n, cap).to_series();
            let a = act_matrix_word(u, &s)?;
            let b = act_matrix_word(v, &s)?;
            let c = a.cap.min(b.cap);
            (a.truncate(c) == b.truncate(c), c)
        }
        BraidFlavor::Dn => (act_dn_word(u, &generic_hat(n))? == act_dn_word(v, &generic_hat(n))?, -1),
    })
}

/// All braid relations `β_a β_b β_a = β_b β_a β_b` for neighbouring
/// generators (cyclically, with the wrap generator, except for `A_n`), and
/// for `A_n` also `(β_{n−1,n}⋯β_{1,2})ⁿ = Id`.
pub fn verify_relations(flavor: BraidFlavor, n: usize, cap: i32) -> Result<RelationReport, BraidError> {
    let mut rep = RelationReport::default();
    for (a, b) in adjacent_pairs(flavor, n) {
        let u = BraidWord(vec![a, b, a]);
        let v = BraidWord(vec![b, a, b]);
        let (holds, level) = words_agree(flavor, n, cap, &u, &v)?;
        rep.checks.push(RelationCheck { relation: format!("{a} {b} {a} = {b} {a} {b}"), holds, level });
    }
    if flavor == BraidFlavor::An {
        let cox = BraidWord((1..n).rev().map(BraidGen::adjacent).collect());
        let (holds, level) = words_agree(flavor, n, cap, &cox.pow(n), &BraidWord::default())?;
        rep.checks.push(RelationCheck { relation: format!("(b{},{} ... b1,2)^{n} = Id", n - 1, n), holds, level });
    }
    Ok(rep)
}

/// Componentwise against matrix form for every single generator and its
/// inverse on generic data; `𝔇_n` data at levels `0..=cap`.
pub fn componentwise_matches_matrix(n: usize, cap: i32) -> Result<bool, BraidError> {
    let a = generic_a(n);
    for i in 1..n {
        for b in [BraidGen::adjacent(i), BraidGen::adjacent(i).inv()] {
            if act_an(b, &a)? != act_an_matrix(b, &a)? {
                return Ok(false);
            }
        }
    }
    let f = LevelFamily::generic(n, cap);
    let s = f.to_series();
    let gens = (1..n).map(BraidGen::adjacent).chain([BraidGen::wrap()]);
    for b in gens.flat_map(|b| [b, b.inv()]) {
        if act_frak_dn(b, &f)?.to_series() != act_matrix(b, &s)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `{b·f, b·g} = b·{f, g}` on all generator pairs up to `max_level`, for
/// every generator and its inverse.
pub fn poisson_map_check(alg: &GenAlgebra, max_level: i32) -> Result<bool, BraidError> {
    let n = alg.n;
    let an = alg.flavor == crate::dn_algebra::Flavor::An;
    let top = if an { 0 } else { max_level };
    let fam = LevelFamily::generic(n, if an { 0 } else { 2 * top + 2 });
    let mut gens: Vec<BraidGen> = (1..n).map(BraidGen::adjacent).collect();
    if !an {
        gens.push(BraidGen::wrap());
    }
    let keys = LevelFamily::keys(n, top);
    for b in gens.into_iter().flat_map(|b| [b, b.inv()]) {
        let img = act_frak_dn(b, &fam)?.bindings();
        let push = |e: &SymExpr| e.subst_unchecked(&img);
        for (x, &p) in keys.iter().enumerate() {
            for &q in &keys[x + 1..] {
                let (gp, gq) = (SymExpr::atom(Atom::G(p)), SymExpr::atom(Atom::G(q)));
                let lhs = alg.bracket(&push(&gp), &push(&gq)).expect("indices in range");
                let rhs = push(&alg.bracket(&gp, &gq).expect("indices in range"));
                if lhs != rhs {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dn_algebra::GenAlgebra;
    use crate::poly_core::ex;
    use proptest::prelude::*;

    fn a3(g12: i64, g13: i64, g23: i64) -> LambdaMatrix {
        LambdaMatrix::from_rows(vec![
            vec![SymExpr::one(), SymExpr::int(g12), SymExpr::int(g13)],
            vec![SymExpr::zero(), SymExpr::one(), SymExpr::int(g23)],
            vec![SymExpr::zero(), SymExpr::zero(), SymExpr::one()],
        ])
    }

    #[test]
    fn a_n_numeric_instance() {
        let b = BraidGen::adjacent(1);
        assert_eq!(act_an(b, &a3(2, 3, 4)).unwrap(), a3(2, 2, 3));
        assert_eq!(act_an_matrix(b, &a3(2, 3, 4)).unwrap(), a3(2, 2, 3));
        assert_eq!(act_an(BraidGen::wrap(), &a3(2, 3, 4)), Err(BraidError::WrapUndefined));
    }

    #[test]
    fn fixed_entries() {
        let a = generic_a(4);
        for i in 1..4 {
            let t = act_an(BraidGen::adjacent(i), &a).unwrap();
            assert_eq!(t.get(i - 1, i), a.get(i - 1, i));
        }
        let f = LevelFamily::generic(3, 4);
        let t = act_frak_dn(BraidGen::wrap(), &f).unwrap();
        assert_eq!(t.get(3, 1, 1).unwrap(), f.get(3, 1, 1).unwrap());
        for k in 0..=2 {
            assert_eq!(t.get(1, 1, k).unwrap(), f.get(3, 3, k).unwrap());
            let s = act_frak_dn(BraidGen::adjacent(1), &f).unwrap();
            assert_eq!(s.get(2, 2, k).unwrap(), f.get(1, 1, k).unwrap());
        }
        let h = generic_hat(3);
        assert_eq!(act_dn(BraidGen::adjacent(1), &h).unwrap()[&(1, 2)], h[&(1, 2)]);
        assert_eq!(act_dn(BraidGen::wrap(), &h).unwrap()[&(3, 1)], h[&(3, 1)]);
        assert_eq!(
            act_dn(BraidGen::adjacent(1), &h).unwrap()[&(2, 1)],
            ex("Ghat[2,1] + Ghat[1,2]*Ghat[1,1]^2 - 2*Ghat[1,1]*Ghat[2,2]")
        );
    }

    #[test]
    fn printed_wrap_formulas() {
        let n = 3;
        let f = LevelFamily::generic(n, 5);
        let t = act_frak_dn(BraidGen::wrap(), &f).unwrap();
        let g = |i, j, k| f.get(i, j, k).unwrap();
        let gn1 = g(n, 1, 1);
        for k in 0..=3 {
            assert_eq!(t.get(1, 2, k).unwrap(), g(n, 2, k + 1));
            assert_eq!(t.get(2, 1, k).unwrap(), g(2, n, k - 1));
            assert_eq!(t.get(n, 2, k).unwrap(), &g(n, 2, k) * &gn1 - g(1, 2, k - 1));
            assert_eq!(t.get(2, n, k).unwrap(), &g(2, n, k) * &gn1 - g(2, 1, k + 1));
            assert_eq!(
                t.get(n, n, k).unwrap(),
                &g(n, n, k) * &(&gn1 * &gn1) - &g(n, 1, k + 1) * &gn1 - &g(1, n, k - 1) * &gn1 + g(1, 1, k)
            );
            if k >= 1 {
                assert_eq!(t.get(n, 1, k).unwrap(), &g(n, n, k - 1) * &gn1 - g(1, n, k - 2));
            }
            assert_eq!(t.get(1, n, k).unwrap(), &g(n, n, k + 1) * &gn1 - g(n, 1, k + 2));
        }
        assert!(matches!(t.get(1, 2, 4), Err(BraidError::Uncertified { .. })));
        let low = LevelFamily::generic(n, 1);
        assert!(matches!(act_frak_dn(BraidGen::wrap(), &low), Err(BraidError::InsufficientLevels { .. })));
    }

    #[test]
    fn inverses() {
        let a = generic_a(4);
        for i in 1..4 {
            let b = BraidGen::adjacent(i);
            assert_eq!(act_an(b.inv(), &act_an(b, &a).unwrap()).unwrap(), a);
        }
        let f = LevelFamily::generic(3, 6);
        for b in [BraidGen::adjacent(1), BraidGen::adjacent(2), BraidGen::wrap()] {
            let back = act_frak_dn(b.inv(), &act_frak_dn(b, &f).unwrap()).unwrap();
            assert_eq!(back, f.truncate(back.cap));
            let back = act_frak_dn(b, &act_frak_dn(b.inv(), &f).unwrap()).unwrap();
            assert_eq!(back, f.truncate(back.cap));
        }
        let h = generic_hat(3);
        for b in [BraidGen::adjacent(1), BraidGen::adjacent(2), BraidGen::wrap()] {
            assert_eq!(act_dn(b.inv(), &act_dn(b, &h).unwrap()).unwrap(), h);
            assert_eq!(act_dn(b, &act_dn(b.inv(), &h).unwrap()).unwrap(), h);
        }
    }

    #[test]
    fn relations_small() {
        assert!(verify_relations(BraidFlavor::An, 3, 0).unwrap().ok());
        assert!(verify_relations(BraidFlavor::An, 4, 0).unwrap().ok());
        assert!(verify_relations(BraidFlavor::Dn, 3, 0).unwrap().ok());
        assert!(verify_relations(BraidFlavor::FrakDn, 3, 4).unwrap().ok());
    }

    #[test]
    fn second_relation_fails_for_d_n() {
        let cox = BraidWord(vec![BraidGen::adjacent(2), BraidGen::adjacent(1)]);
        let (holds, _) = words_agree(BraidFlavor::Dn, 3, 0, &cox.pow(3), &BraidWord::default()).unwrap();
        assert!(!holds);
    }

    #[test]
    fn matrix_and_componentwise_agree() {
        assert!(componentwise_matches_matrix(3, 4).unwrap());
        assert!(componentwise_matches_matrix(4, 2).unwrap());
    }

    #[test]
    fn wrap_matrix_determinant() {
        let g = ex("G[3,1,1]");
        let b = wrap_matrix(3, &g, false);
        let p = b.mul(&b.invert_lambda()).unwrap();
        assert_eq!(p.det(), SymExpr::one());
        let bi = wrap_matrix(3, &g, true);
        assert_eq!(b.mul(&bi).unwrap(), LambdaMatrix::identity(3));
    }

    #[test]
    fn poisson_maps() {
        assert!(poisson_map_check(&GenAlgebra::an(3), 0).unwrap());
        assert!(poisson_map_check(&GenAlgebra::an(4), 0).unwrap());
        assert!(poisson_map_check(&GenAlgebra::dn(3), 1).unwrap());
    }

    #[test]
    fn hat_matrix_lemma() {
        let n = 3;
        let h = generic_hat(n);
        let (w1, w2, rho, sigma) = (SymExpr::sym("w1"), SymExpr::sym("w2"), SymExpr::sym("rho"), SymExpr::sym("sigma"));
        let comb = |h: &HatFamily| {
            LambdaMatrix::from_fn(n, |r, c| {
                let (i, j) = (r + 1, c + 1);
                let gij = &h[&(i, j)];
                let gji = &h[&(j, i)];
                let s = &h[&(i, i)] * &h[&(j, j)];
                let rr = match i.cmp(&j) {
                    std::cmp::Ordering::Less => gji + gij - s.clone(),
                    std::cmp::Ordering::Greater => -(gji + gij - s.clone()),
                    std::cmp::Ordering::Equal => SymExpr::zero(),
                };
                let a = match i.cmp(&j) {
                    std::cmp::Ordering::Less => &w1 * gij,
                    std::cmp::Ordering::Equal => &w1 + &w2,
                    std::cmp::Ordering::Greater => &w2 * gji,
                };
                a + &rho * &rr + &sigma * &s
            })
        };
        let m = comb(&h);
        for i in 1..n {
            let b = BraidGen::adjacent(i);
            let bm = adjacent_matrix(n, i, &h[&(i, i + 1)], false);
            let lhs = bm.mul(&m).unwrap().mul(&bm.transpose()).unwrap();
            assert_eq!(lhs, comb(&act_dn(b, &h).unwrap()));
        }
    }

    #[test]
    fn quantum_constructors() {
        let q = SymExpr::sym("q");
        let m = quantum_matrix(BraidGen::adjacent(1), 3, &q).unwrap();
        assert_eq!(m.get(0, 0), &ex("q*G[1,2,0]"));
        assert_eq!(m.get(0, 1), &ex("-q^2"));
        let w = quantum_matrix(BraidGen::wrap(), 3, &q).unwrap();
        assert_eq!(w.get(0, 2), &lam(1));
        assert_eq!(w.get(2, 0), &ex("-q^2*lam^-1"));
        assert_eq!(w.get(2, 2), &ex("q*G[3,1,1]"));
        let mut one = BTreeMap::new();
        one.insert(Atom::sym("q"), SymExpr::one());
        assert_eq!(m.subst(&one).unwrap(), adjacent_matrix(3, 1, &ex("G[1,2,0]"), false));
    }

    #[test]
    fn word_parsing() {
        let w = BraidWord::parse("b12 b23 b31^-1", 3).unwrap();
        assert_eq!(w.0, vec![BraidGen::adjacent(1), BraidGen::adjacent(2), BraidGen::wrap().inv()]);
        assert!(BraidWord::parse("b13", 3).is_err());
        assert!(BraidWord::parse("x12", 3).is_err());
        assert_eq!("b23^-1".parse::<BraidGen>().unwrap(), BraidGen::adjacent(2).inv());
        assert_eq!(BraidWord::parse("b10,11", 11).unwrap().0, vec![BraidGen::adjacent(10)]);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn word_then_inverse_is_identity(seq in prop::collection::vec((1usize..4, any::<bool>()), 1..6)) {
            let w = BraidWord(seq.iter().map(|&(i, inv)| {
                let b = BraidGen::adjacent(i);
                if inv { b.inv() } else { b }
            }).collect());
            let a = generic_a(4);
            prop_assert_eq!(act_an_word(&w.then(&w.inverse()), &a).unwrap(), a);
            let h = generic_hat(4);
            prop_assert_eq!(act_dn_word(&w.then(&w.inverse()), &h).unwrap(), h);
        }
    }
}
