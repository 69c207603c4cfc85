//! Structure constants of `A_n`, `𝔇_n` and `𝔇_n^{(p)}`, their Leibniz
//! extension, the generating-function and reflection-equation forms, and
//! cross-checks against the trace calculus and the Goldman bracket.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::Mutex;

use thiserror::Error;

use crate::fatgraph;
use crate::ks_calculus::{self, ClashPoint};
use crate::poly_core::{Atom, Fp, GenIndex, LambdaMatrix, SymExpr};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgError {
    #[error("generator {0} has an index outside 1..{1}")]
    IndexOutOfRange(String, usize),
    #[error("generator {0} is not in {1}")]
    LevelNotInAlgebra(String, String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Flavor {
    /// Level 0 only.
    An,
    Dn,
    /// Levels identified by `G^{(k)}_{ij} = G^{(p−k)}_{ji}`.
    Dnp(u32),
}

pub struct GenAlgebra {
    pub n: usize,
    pub flavor: Flavor,
    cache: Mutex<HashMap<(GenIndex, GenIndex), SymExpr>>,
}

impl Clone for GenAlgebra {
    fn clone(&self) -> Self {
        GenAlgebra::new(self.n, self.flavor)
    }
}

impl fmt::Debug for GenAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GenAlgebra({self})")
    }
}

impl fmt::Display for GenAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.flavor {
            Flavor::An => write!(f, "A_{}", self.n),
            Flavor::Dn => write!(f, "D_{}", self.n),
            Flavor::Dnp(p) => write!(f, "D_{}^({p})", self.n),
        }
    }
}

fn eps(x: i64) -> i64 {
    x.signum()
}

impl GenAlgebra {
    pub fn new(n: usize, flavor: Flavor) -> Self {
        if let Flavor::Dnp(p) = flavor {
            assert!(p >= 1, "period must be positive");
        }
        GenAlgebra {
            n,
            flavor,
            cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn an(n: usize) -> Self {
        Self::new(n, Flavor::An)
    }

    pub fn dn(n: usize) -> Self {
        Self::new(n, Flavor::Dn)
    }

    pub fn dnp(n: usize, p: u32) -> Self {
        Self::new(n, Flavor::Dnp(p))
    }

    fn check(&self, g: GenIndex) -> Result<(), AlgError> {
        let n = self.n as u16;
        if g.i == 0 || g.j == 0 || g.i > n || g.j > n {
            return Err(AlgError::IndexOutOfRange(g.to_string(), self.n));
        }
        if self.flavor == Flavor::An && g.k != 0 {
            return Err(AlgError::LevelNotInAlgebra(g.to_string(), self.to_string()));
        }
        Ok(())
    }

    /// Canonical representative; `None` for the constant 2.
    pub fn canonical(&self, g: GenIndex) -> Option<GenIndex> {
        match self.flavor {
            Flavor::An | Flavor::Dn => g.canonical(),
            Flavor::Dnp(p) => crate::reductions::level_p_canonical(g, p),
        }
    }

    /// Canonical generator as an expression.
    pub fn gen(&self, i: usize, j: usize, k: i32) -> SymExpr {
        match self.canonical(GenIndex::new(i, j, k)) {
            Some(g) => SymExpr::atom(Atom::G(g)),
            None => SymExpr::int(2),
        }
    }

    /// Rewrite every generator atom into canonical form.
    pub fn canonicalize(&self, e: &SymExpr) -> Result<SymExpr, AlgError> {
        let mut b = BTreeMap::new();
        for a in e.atoms() {
            if let Atom::G(g) = a {
                self.check(g)?;
                let c = self.gen(g.i as usize, g.j as usize, g.k);
                if c != SymExpr::atom(a) {
                    b.insert(a, c);
                }
            }
        }
        Ok(if b.is_empty() { e.clone() } else { e.subst_unchecked(&b) })
    }

    /// Canonical generators with levels up to `max_level` (all levels for
    /// `𝔇_n^{(p)}`, only level 0 for `A_n`).
    pub fn generators(&self, max_level: u32) -> Vec<GenIndex> {
        let top = match self.flavor {
            Flavor::An => 0,
            Flavor::Dn => max_level as i32,
            Flavor::Dnp(p) => (p / 2) as i32,
        };
        let mut out = BTreeSet::new();
        for k in 0..=top {
            for i in 1..=self.n {
                for j in 1..=self.n {
                    if let Some(g) = self.canonical(GenIndex::new(i, j, k)) {
                        out.insert(g);
                    }
                }
            }
        }
        out.into_iter().collect()
    }

    /// `{G[a], G[b]}` for canonical generators.
    pub fn structure_constant(&self, a: GenIndex, b: GenIndex) -> Result<SymExpr, AlgError> {
        self.check(a)?;
        self.check(b)?;
        let (Some(a), Some(b)) = (self.canonical(a), self.canonical(b)) else {
            return Ok(SymExpr::zero());
        };
        if let Some(v) = self.cache.lock().unwrap().get(&(a, b)) {
            return Ok(v.clone());
        }
        let raw = dn_constant(a, b);
        let v = match self.flavor {
            Flavor::Dnp(_) => self.canonicalize(&raw)?,
            _ => raw,
        };
        self.cache.lock().unwrap().insert((a, b), v.clone());
        Ok(v)
    }

    /// Bilinear Leibniz extension of the structure constants.
    pub fn bracket(&self, f: &SymExpr, g: &SymExpr) -> Result<SymExpr, AlgError> {
        let f = self.canonicalize(f)?;
        let g = self.canonicalize(g)?;
        let gens = |e: &SymExpr| -> Vec<(GenIndex, SymExpr)> {
            e.atoms()
                .into_iter()
                .filter_map(|a| match a {
                    Atom::G(x) => Some((x, e.partial(&a))),
                    _ => None,
                })
                .collect()
        };
        let df = gens(&f);
        let dg = gens(&g);
        let mut out = SymExpr::zero();
        for (a, fa) in &df {
            for (b, gb) in &dg {
                let c = self.structure_constant(*a, *b)?;
                if !c.is_zero() {
                    out += &(fa * gb) * &c;
                }
            }
        }
        Ok(out)
    }

    /// `{{f,g},h} + {{g,h},f} + {{h,f},g}`.
    pub fn jacobiator(&self, f: &SymExpr, g: &SymExpr, h: &SymExpr) -> Result<SymExpr, AlgError> {
        Ok(self.bracket(&self.bracket(f, g)?, h)?
            + self.bracket(&self.bracket(g, h)?, f)?
            + self.bracket(&self.bracket(h, f)?, g)?)
    }
}

/// `𝔇_n` constant for canonical `a = G^{(m)}_{ji}`, `b = G^{(k)}_{pl}`.
fn dn_constant(a: GenIndex, b: GenIndex) -> SymExpr {
    if a.k > b.k {
        return -dn_constant(b, a);
    }
    let (j, i, m) = (a.i as i64, a.j as i64, a.k);
    let (p, l, k) = (b.i as i64, b.j as i64, b.k);
    if m == 0 {
        rhs0(j, i, p, l, k)
    } else {
        rhs1(j, i, m, p, l, k)
    }
}

fn g(i: i64, j: i64, k: i32) -> SymExpr {
    SymExpr::gen(i as usize, j as usize, k)
}

/// `{G^{(0)}_{ji}, G^{(k)}_{pl}}`.
fn rhs0(j: i64, i: i64, p: i64, l: i64, k: i32) -> SymExpr {
    let c1 = eps(j - l) - eps(i - l);
    let c2 = eps(j - p) - eps(i - p);
    let mut out = SymExpr::zero();
    if c1 != 0 {
        out += (g(l, i, 0) * g(p, j, k) - g(l, j, 0) * g(p, i, k)).scale_int(c1);
    }
    if c2 != 0 {
        out += (g(p, i, 0) * g(j, l, k) - g(p, j, 0) * g(i, l, k)).scale_int(c2);
    }
    out
}

/// `{G^{(m)}_{ji}, G^{(k)}_{pl}}` for `0 < m ≤ k`.
fn rhs1(j: i64, i: i64, m: i32, p: i64, l: i64, k: i32) -> SymExpr {
    let mut r = SymExpr::zero();
    let mut part = |e: i64, x: SymExpr| {
        if e != 0 {
            r += x.scale_int(e);
        }
    };
    part(eps(i - l), g(p, i, k) * g(j, l, m) - g(i, l, 0) * g(p, j, k - m));
    part(eps(i - p), g(j, p, m) * g(i, l, k) - g(i, p, 0) * g(j, l, k + m));
    part(eps(j - l), g(p, j, k) * g(l, i, m) - g(j, l, 0) * g(p, i, k + m));
    part(eps(j - p), g(p, i, m) * g(j, l, k) - g(j, p, 0) * g(i, l, k - m));
    for a in 0..=m {
        let w = if a == 0 || a == m { 1 } else { 2 };
        let s = g(p, i, k + m - a) * g(j, l, a) - g(p, i, m - a) * g(j, l, k + a)
            + g(i, l, k - m + a) * g(j, p, a)
            - g(l, i, a) * g(p, j, k - m + a);
        r += s.scale_int(w);
    }
    r
}

/// One mismatch in a coefficientwise comparison.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mismatch {
    pub case: String,
    pub lhs: SymExpr,
    pub rhs: SymExpr,
}

/// Outcome of a batch of exact comparisons.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CheckReport {
    pub checked: usize,
    pub mismatches: Vec<Mismatch>,
}

impl CheckReport {
    pub fn ok(&self) -> bool {
        self.mismatches.is_empty()
    }

    fn record(&mut self, case: impl FnOnce() -> String, lhs: SymExpr, rhs: SymExpr) {
        self.checked += 1;
        if lhs != rhs {
            self.mismatches.push(Mismatch { case: case(), lhs, rhs });
        }
    }

    pub fn merge(&mut self, o: CheckReport) {
        self.checked += o.checked;
        self.mismatches.extend(o.mismatches);
    }
}

/// Exhaustive Jacobi identity over generator triples.
pub fn jacobi_check(alg: &GenAlgebra, max_level: u32) -> CheckReport {
    let gens = alg.generators(max_level);
    let mut rep = CheckReport::default();
    for x in 0..gens.len() {
        for y in x + 1..gens.len() {
            for z in y + 1..gens.len() {
                let (a, b, c) = (gens[x], gens[y], gens[z]);
                let v = alg
                    .jacobiator(&SymExpr::atom(Atom::G(a)), &SymExpr::atom(Atom::G(b)), &SymExpr::atom(Atom::G(c)))
                    .expect("canonical generators");
                rep.record(|| format!("({a}, {b}, {c})"), v, SymExpr::zero());
            }
        }
    }
    rep
}

/// Jacobiator of one triple.
pub fn jacobi_triple(alg: &GenAlgebra, a: GenIndex, b: GenIndex, c: GenIndex) -> Result<SymExpr, AlgError> {
    let e = |x: GenIndex| alg.gen(x.i as usize, x.j as usize, x.k);
    alg.jacobiator(&e(a), &e(b), &e(c))
}

/// Series coefficient `c_a(j, i)` of `𝒢_{j,i}(λ) = Σ_a c_a λ^{−a}`: the
/// level-0 part is upper triangular with unit diagonal.
pub fn series_coeff(a: i32, j: usize, i: usize) -> SymExpr {
    if a > 0 {
        SymExpr::gen(j, i, a)
    } else if a < 0 {
        SymExpr::zero()
    } else if j < i {
        SymExpr::gen(j, i, 0)
    } else if j == i {
        SymExpr::one()
    } else {
        SymExpr::zero()
    }
}

fn series_is_constant(a: i32, j: usize, i: usize) -> bool {
    a == 0 && j >= i
}

/// Both sides of the generating-function bracket for one index quadruple:
/// coefficient `(a, b)` of `λ^{−a} μ^{−b}` in `{𝒢_{j,i}(λ), 𝒢_{p,l}(μ)}`.
#[derive(Clone, Debug)]
pub struct YangianSeries {
    pub lhs: BTreeMap<(i32, i32), SymExpr>,
    pub rhs: BTreeMap<(i32, i32), SymExpr>,
}

/// Expands the generating-function bracket to order `λ^{−cap} μ^{−cap}`.
///
/// Kernels: `(λ+μ)/(λ−μ) = 1 + 2Σ_{r≥1} (μ/λ)^r` and
/// `(1+λμ)/(1−λμ) = −1 − 2Σ_{r≥1} (λμ)^{−r}`.
pub fn generating_bracket(n: usize, (j, i): (usize, usize), (p, l): (usize, usize), cap: i32) -> YangianSeries {
    let alg = GenAlgebra::dn(n);
    let c = series_coeff;
    let e = |x: i64| eps(x);
    let (ji, jj, pi, ll) = (i as i64, j as i64, p as i64, l as i64);
    let mut lhs = BTreeMap::new();
    let mut rhs = BTreeMap::new();
    for a in 0..=cap {
        for b in 0..=cap {
            let left = if series_is_constant(a, j, i) || series_is_constant(b, p, l) {
                SymExpr::zero()
            } else {
                alg.structure_constant(GenIndex::new(j, i, a), GenIndex::new(p, l, b)).expect("indices in range")
            };
            let mut r = SymExpr::zero();
            r += (c(a, p, i) * c(b, j, l)).scale_int(e(jj - pi) - 1);
            for s in 1..=a {
                r -= (c(a - s, p, i) * c(b + s, j, l)).scale_int(2);
            }
            r += (c(a, j, l) * c(b, p, i)).scale_int(e(ji - ll) + 1);
            for s in 1..=a {
                r += (c(a - s, j, l) * c(b + s, p, i)).scale_int(2);
            }
            r += (c(a, j, p) * c(b, i, l)).scale_int(e(ji - pi) + 1);
            for s in 1..=a.min(b) {
                r += (c(a - s, j, p) * c(b - s, i, l)).scale_int(2);
            }
            r += (c(a, l, i) * c(b, p, j)).scale_int(e(jj - ll) - 1);
            for s in 1..=a.min(b) {
                r -= (c(a - s, l, i) * c(b - s, p, j)).scale_int(2);
            }
            lhs.insert((a, b), left);
            rhs.insert((a, b), r);
        }
    }
    YangianSeries { lhs, rhs }
}

/// Coefficientwise comparison of the generating-function bracket with the
/// structure constants over all index quadruples.
pub fn yangian_check(n: usize, cap: i32) -> CheckReport {
    let mut rep = CheckReport::default();
    for j in 1..=n {
        for i in 1..=n {
            for p in 1..=n {
                for l in 1..=n {
                    let s = generating_bracket(n, (j, i), (p, l), cap);
                    for (key, lv) in s.lhs {
                        let rv = s.rhs[&key].clone();
                        rep.record(|| format!("({j},{i}),({p},{l}) at {key:?}"), lv, rv);
                    }
                }
            }
        }
    }
    rep
}

/// Two-variable series in `λ^{−1}`, `μ^{−1}`: key `(x, y)` is the power of
/// `λ^{−1}` and of `μ^{−1}`.
type Series = BTreeMap<(i32, i32), SymExpr>;

fn s_mul(s: &Series, t: &Series, cap: i32) -> Series {
    let mut r = Series::new();
    for ((a1, b1), c1) in s {
        for ((a2, b2), c2) in t {
            let a = a1 + a2;
            if a > cap {
                continue;
            }
            let e = r.entry((a, b1 + b2)).or_insert_with(SymExpr::zero);
            *e += c1 * c2;
        }
    }
    r.retain(|_, v| !v.is_zero());
    r
}

fn s_add(s: &mut Series, t: &Series, f: i64) {
    for (k, v) in t {
        let e = s.entry(*k).or_insert_with(SymExpr::zero);
        *e += v.scale_int(f);
    }
    s.retain(|_, v| !v.is_zero());
}

/// Sparse `n² × n²` tensor: key `((a, c), (b, d))` is the coefficient of
/// `E_ab ⊗ E_cd`.
type Tensor = BTreeMap<((usize, usize), (usize, usize)), Series>;

fn t_mul(x: &Tensor, y: &Tensor, cap: i32) -> Tensor {
    let mut by_row: BTreeMap<(usize, usize), Vec<((usize, usize), &Series)>> = BTreeMap::new();
    for ((r, col), v) in y {
        by_row.entry(*r).or_default().push((*col, v));
    }
    let mut out = Tensor::new();
    for ((r, k), v) in x {
        if let Some(row) = by_row.get(k) {
            for (col, w) in row {
                let prod = s_mul(v, w, cap);
                s_add(out.entry((*r, *col)).or_default(), &prod, 1);
            }
        }
    }
    out
}

fn t_add(x: &mut Tensor, y: &Tensor, f: i64) {
    for (k, v) in y {
        s_add(x.entry(*k).or_default(), v, f);
    }
}

/// Checks `{𝒢¹(λ) ⊗ 𝒢²(μ)}` against the reflection form
/// `[r/(λ−μ), 𝒢¹𝒢²] + 𝒢¹ r̃ 𝒢² − 𝒢² r̃ 𝒢¹`, `r̃ = r(λ^{−1},μ)^{T₁}/(λ^{−1}−μ)`,
/// entrywise to order `cap` in both variables. The bracket equals minus the
/// assembled right-hand side.
pub fn semiclassical_reflection_check(n: usize, cap: i32) -> CheckReport {
    let len = 2 * cap + 1;
    let alg = GenAlgebra::dn(n);
    let glam = |i: usize, j: usize| -> Series {
        (0..=len).map(|a| ((a, 0), series_coeff(a, i, j))).filter(|(_, v)| !v.is_zero()).collect()
    };
    let gmu = |i: usize, j: usize| -> Series {
        (0..=len).map(|b| ((0, b), series_coeff(b, i, j))).filter(|(_, v)| !v.is_zero()).collect()
    };
    let kern = |c0: i64, pairs: Vec<((i32, i32), i64)>| -> Series {
        let mut s = Series::new();
        if c0 != 0 {
            s.insert((0, 0), SymExpr::int(c0));
        }
        for (k, v) in pairs {
            s.insert(k, SymExpr::int(v));
        }
        s
    };
    let k1 = kern(1, (1..=cap).map(|r| ((r, -r), 2)).collect());
    let k1_up = kern(0, (0..=cap).map(|r| ((r, -r), 2)).collect());
    let k1_lo = kern(0, (1..=cap).map(|r| ((r, -r), 2)).collect());
    let k2 = kern(-1, (1..=cap).map(|r| ((r, r), -2)).collect());
    let k2_up = kern(0, (1..=cap).map(|r| ((r, r), -2)).collect());
    let k2_lo = kern(0, (0..=cap).map(|r| ((r, r), -2)).collect());
    let rmat = |d: &Series, up: &Series, lo: &Series| -> Tensor {
        let mut t = Tensor::new();
        for i in 1..=n {
            t.insert(((i, i), (i, i)), d.clone());
            for j in 1..=n {
                if i < j {
                    t.insert(((i, j), (j, i)), up.clone());
                } else if i > j {
                    t.insert(((i, j), (j, i)), lo.clone());
                }
            }
        }
        t
    };
    let r1 = rmat(&k1, &k1_up, &k1_lo);
    let r2 = rmat(&k2, &k2_up, &k2_lo);
    let r2t: Tensor = r2.into_iter().map(|(((a, c), (b, d)), v)| (((b, c), (a, d)), v)).collect();
    let mut g1 = Tensor::new();
    let mut g2 = Tensor::new();
    for a in 1..=n {
        for b in 1..=n {
            for c in 1..=n {
                g1.insert(((a, c), (b, c)), glam(a, b));
                g2.insert(((c, a), (c, b)), gmu(a, b));
            }
        }
    }
    let p = t_mul(&g1, &g2, cap);
    let mut rhs = t_mul(&r1, &p, cap);
    t_add(&mut rhs, &t_mul(&p, &r1, cap), -1);
    t_add(&mut rhs, &t_mul(&t_mul(&g1, &r2t, cap), &g2, cap), 1);
    t_add(&mut rhs, &t_mul(&t_mul(&g2, &r2t, cap), &g1, cap), -1);
    let mut rep = CheckReport::default();
    for a in 1..=n {
        for c in 1..=n {
            for b in 1..=n {
                for d in 1..=n {
                    let s = rhs.get(&((a, c), (b, d)));
                    for x in 0..=cap {
                        for y in 0..=cap {
                            let lhs = if series_is_constant(x, a, b) || series_is_constant(y, c, d) {
                                SymExpr::zero()
                            } else {
                                alg.structure_constant(GenIndex::new(a, b, x), GenIndex::new(c, d, y)).unwrap()
                            };
                            let r = s.and_then(|s| s.get(&(x, y))).cloned().unwrap_or_else(SymExpr::zero);
                            rep.record(|| format!("E{a}{b}⊗E{c}{d} at ({x},{y})"), lhs, -r);
                        }
                    }
                }
            }
        }
    }
    rep
}

fn tensor_index(n: usize, a: usize, c: usize) -> usize {
    (a - 1) * n + (c - 1)
}

/// The trigonometric R-matrix in `λ` and a free symbol `mu`, with `q` and
/// `q^{−1}` supplied separately (so either may be a truncated series).
pub fn quantum_r(n: usize, q: &SymExpr, qinv: &SymExpr) -> LambdaMatrix {
    let lam = SymExpr::atom(Atom::Lam);
    let mu = SymExpr::sym("mu");
    let mut m = LambdaMatrix::zeros(n * n);
    let diff = qinv - q;
    for i in 1..=n {
        for j in 1..=n {
            let (r, c) = (tensor_index(n, i, j), tensor_index(n, i, j));
            if i == j {
                m.set(r, c, qinv * &lam - q * &mu);
            } else {
                m.set(r, c, &lam - &mu);
                // E_ij ⊗ E_ji
                let (r2, c2) = (tensor_index(n, i, j), tensor_index(n, j, i));
                let v = if i < j { &diff * &lam } else { &diff * &mu };
                m.set(r2, c2, v);
            }
        }
    }
    m
}

/// Classical r-matrix `(λ+μ)ΣE_ii⊗E_ii + 2λΣ_{i<j}E_ij⊗E_ji + 2μΣ_{i>j}E_ij⊗E_ji`.
pub fn classical_r(n: usize) -> LambdaMatrix {
    let lam = SymExpr::atom(Atom::Lam);
    let mu = SymExpr::sym("mu");
    let mut m = LambdaMatrix::zeros(n * n);
    for i in 1..=n {
        for j in 1..=n {
            let r = tensor_index(n, i, j);
            if i == j {
                m.set(r, r, &lam + &mu);
            } else {
                let c = tensor_index(n, j, i);
                m.set(r, c, if i < j { lam.scale_int(2) } else { mu.scale_int(2) });
            }
        }
    }
    m
}

/// First two orders of `quantum_r` in `x = iπħ` for `q = s·e^{σx}`:
/// `(ħ⁰ term, coefficient of x)`.
pub fn r_expansion(n: usize, sign: i64, exp_sign: i64) -> (LambdaMatrix, LambdaMatrix) {
    let x = Atom::sym("x");
    let xe = SymExpr::atom(x);
    let q = SymExpr::int(sign) + xe.scale_int(sign * exp_sign);
    let qinv = SymExpr::int(sign) - xe.scale_int(sign * exp_sign);
    let r = quantum_r(n, &q, &qinv);
    (r.map(|e| e.coeff_of(&x, 0)), r.map(|e| e.coeff_of(&x, 1)))
}

/// Structure constants against the symbolic trace calculus with an opaque
/// hole letter, for all generator pairs with levels up to `max_level`.
pub fn ks_agreement(n: usize, max_level: u32) -> CheckReport {
    let alg = GenAlgebra::dn(n);
    let gens = alg.generators(max_level);
    let mut rep = CheckReport::default();
    for &a in &gens {
        for &b in &gens {
            let ks = ks_calculus::ks_generator_bracket(n as u16, a, b).expect("balanced generator words");
            let sc = alg.structure_constant(a, b).unwrap();
            rep.record(|| format!("{{{a}, {b}}}"), ks, sc);
        }
    }
    rep
}

/// Level-0 structure constants against the Goldman bracket of geodesic
/// functions on the caterpillar graph.
pub fn goldman_agreement(n: usize) -> Result<CheckReport, fatgraph::GraphError> {
    let alg = GenAlgebra::an(n);
    let graph = fatgraph::canonical_disc_graph(n)?;
    let table = fatgraph::geodesic_table(n)?;
    let mut bind = BTreeMap::new();
    for ((i, j), v) in &table {
        bind.insert(Atom::g(*i, *j, 0), v.clone());
    }
    let gens = alg.generators(0);
    let mut rep = CheckReport::default();
    for &a in &gens {
        for &b in &gens {
            let ga = &table[&(a.i as usize, a.j as usize)];
            let gb = &table[&(b.i as usize, b.j as usize)];
            let lhs = fatgraph::goldman_bracket(ga, gb, &graph)?;
            let rhs = alg.structure_constant(a, b).unwrap().subst_unchecked(&bind);
            rep.record(|| format!("{{{a}, {b}}}"), lhs, rhs);
        }
    }
    Ok(rep)
}

/// Clash independence: the trace-calculus bracket with `H = M_{n+1}⋯M_{n+m}`
/// spelled out, evaluated exactly in `F_p` at `points` random points,
/// against the structure constants evaluated at the same points.
pub fn clashed_agreement(n: usize, m: usize, max_level: u32, points: u64, seed: u64) -> (usize, Vec<String>) {
    let alg = GenAlgebra::dn(n);
    let gens = alg.generators(max_level);
    let mut checked = 0;
    let mut bad = Vec::new();
    for s in 0..points {
        let pt = ClashPoint::random(n, m, seed.wrapping_add(s));
        let memo: RefCell<HashMap<GenIndex, Fp>> = RefCell::new(HashMap::new());
        let val = |a: &Atom| -> Option<Fp> {
            match a {
                Atom::G(g) => Some(
                    *memo
                        .borrow_mut()
                        .entry(*g)
                        .or_insert_with(|| pt.generator(g.i as usize, g.j as usize, g.k)),
                ),
                _ => None,
            }
        };
        for (x, &a) in gens.iter().enumerate() {
            for &b in &gens[x..] {
                let sc = alg.structure_constant(a, b).unwrap();
                let rhs = sc.eval_mod_p(&val).expect("no poles");
                let lhs = pt.bracket(a, b);
                checked += 1;
                if lhs != rhs {
                    bad.push(format!("m={m} seed={} {{{a}, {b}}}", seed.wrapping_add(s)));
                }
            }
        }
    }
    (checked, bad)
}
