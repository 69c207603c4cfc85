use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use smallvec::SmallVec;

use super::{Atom, GenIndex, PolyError};

pub type Coeff = BigRational;

pub fn q(n: i64) -> Coeff {
    BigRational::from_integer(BigInt::from(n))
}

pub fn qf(num: i64, den: i64) -> Coeff {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Product of atoms with nonzero integer exponents, sorted by atom.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Monomial(SmallVec<[(Atom, i32); 4]>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(SmallVec::new())
    }

    pub fn atom(a: Atom, e: i32) -> Self {
        let mut m = Monomial::one();
        if e != 0 {
            m.0.push((a, e));
        }
        m
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn factors(&self) -> &[(Atom, i32)] {
        &self.0
    }

    pub fn exponent(&self, a: &Atom) -> i32 {
        self.0
            .binary_search_by(|(x, _)| x.cmp(a))
            .map(|p| self.0[p].1)
            .unwrap_or(0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.0, &other.0);
        let mut out = SmallVec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let e = a[i].1 + b[j].1;
                    if e != 0 {
                        out.push((a[i].0, e));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial(out)
    }

    pub fn inverse(&self) -> Monomial {
        Monomial(self.0.iter().map(|&(a, e)| (a, -e)).collect())
    }

    pub fn pow(&self, k: i32) -> Monomial {
        if k == 0 {
            return Monomial::one();
        }
        Monomial(self.0.iter().map(|&(a, e)| (a, e * k)).collect())
    }

    /// Remove the factor `a` entirely, returning its exponent.
    pub fn split_off(&self, a: &Atom) -> (i32, Monomial) {
        let e = self.exponent(a);
        if e == 0 {
            return (0, self.clone());
        }
        (e, Monomial(self.0.iter().filter(|(x, _)| x != a).copied().collect()))
    }

    pub fn total_degree(&self) -> i32 {
        self.0.iter().map(|(_, e)| e).sum()
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (idx, (a, e)) in self.0.iter().enumerate() {
            if idx > 0 {
                write!(f, "*")?;
            }
            if *e == 1 {
                write!(f, "{a}")?;
            } else {
                write!(f, "{a}^{e}")?;
            }
        }
        Ok(())
    }
}

/// Exact Laurent polynomial with rational coefficients over [`Atom`]s.
///
/// The map never stores zero coefficients, so structural equality is
/// semantic equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct SymExpr {
    terms: BTreeMap<Monomial, Coeff>,
}

impl SymExpr {
    pub fn zero() -> Self {
        SymExpr::default()
    }

    pub fn one() -> Self {
        SymExpr::constant(Coeff::one())
    }

    pub fn constant(c: Coeff) -> Self {
        SymExpr::term(Monomial::one(), c)
    }

    pub fn int(n: i64) -> Self {
        SymExpr::constant(q(n))
    }

    pub fn rational(num: i64, den: i64) -> Self {
        SymExpr::constant(qf(num, den))
    }

    pub fn atom(a: Atom) -> Self {
        SymExpr::term(Monomial::atom(a, 1), Coeff::one())
    }

    pub fn atom_pow(a: Atom, e: i32) -> Self {
        SymExpr::term(Monomial::atom(a, e), Coeff::one())
    }

    pub fn term(m: Monomial, c: Coeff) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        SymExpr { terms }
    }

    /// Generator in canonical form; `G[i,i,0]` is the constant 2.
    pub fn gen(i: usize, j: usize, k: i32) -> Self {
        match GenIndex::new(i, j, k).canonical() {
            Some(g) => SymExpr::atom(Atom::G(g)),
            None => SymExpr::int(2),
        }
    }

    pub fn g(i: usize, j: usize, k: i32) -> Self {
        SymExpr::atom(Atom::g(i, j, k))
    }

    pub fn sym(name: &str) -> Self {
        SymExpr::atom(Atom::sym(name))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Coeff)> {
        self.terms.iter()
    }

    pub fn into_terms(self) -> impl Iterator<Item = (Monomial, Coeff)> {
        self.terms.into_iter()
    }

    /// The value if the expression is a constant.
    pub fn as_constant(&self) -> Option<Coeff> {
        match self.terms.len() {
            0 => Some(Coeff::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.as_constant().is_some()
    }

    /// The single term if the expression is a nonzero monomial.
    pub fn as_monomial(&self) -> Option<(&Monomial, &Coeff)> {
        if self.terms.len() == 1 {
            self.terms.iter().next()
        } else {
            None
        }
    }

    pub fn atoms(&self) -> BTreeSet<Atom> {
        self.terms
            .keys()
            .flat_map(|m| m.factors().iter().map(|(a, _)| *a))
            .collect()
    }

    pub fn add_term(&mut self, m: Monomial, c: Coeff) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    fn add_scaled(&mut self, other: &SymExpr, s: &Coeff) {
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c * s);
        }
    }

    pub fn scale(&self, s: &Coeff) -> SymExpr {
        if s.is_zero() {
            return SymExpr::zero();
        }
        SymExpr {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * s)).collect(),
        }
    }

    pub fn scale_int(&self, s: i64) -> SymExpr {
        self.scale(&q(s))
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &Coeff) -> SymExpr {
        if c.is_zero() {
            return SymExpr::zero();
        }
        SymExpr {
            terms: self
                .terms
                .iter()
                .map(|(m2, c2)| (m2.mul(m), c2 * c))
                .collect(),
        }
    }

    /// Multiplicative inverse of a single nonzero term.
    pub fn inverse_monomial(&self) -> Result<SymExpr, PolyError> {
        if self.is_zero() {
            return Err(PolyError::Pole);
        }
        match self.as_monomial() {
            Some((m, c)) => Ok(SymExpr::term(m.inverse(), c.recip())),
            None => Err(PolyError::NotInvertible(self.to_string())),
        }
    }

    /// Integer power; negative powers require an invertible single term.
    pub fn pow(&self, k: i32) -> Result<SymExpr, PolyError> {
        if k < 0 {
            return self.inverse_monomial()?.pow(-k);
        }
        if let Some((m, c)) = self.as_monomial() {
            let mut cc = Coeff::one();
            for _ in 0..k {
                cc *= c;
            }
            return Ok(SymExpr::term(m.pow(k), cc));
        }
        let mut result = SymExpr::one();
        let mut base = self.clone();
        let mut e = k as u32;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        Ok(result)
    }

    /// Partial derivative with respect to any atom.
    pub fn partial(&self, a: &Atom) -> SymExpr {
        let mut out = SymExpr::zero();
        for (m, c) in &self.terms {
            let e = m.exponent(a);
            if e != 0 {
                let dm = m.mul(&Monomial::atom(*a, -1));
                out.add_term(dm, c * q(e as i64));
            }
        }
        out
    }

    /// Formal derivative in a ring variable; generators are rejected.
    pub fn diff(&self, v: &Atom) -> Result<SymExpr, PolyError> {
        if v.is_generator() {
            return Err(PolyError::NotAVariable(v.to_string()));
        }
        Ok(self.partial(v))
    }

    /// Simultaneous substitution of atoms.
    pub fn subst(&self, bindings: &BTreeMap<Atom, SymExpr>) -> Result<SymExpr, PolyError> {
        let mut cache: BTreeMap<(Atom, i32), SymExpr> = BTreeMap::new();
        let mut out = SymExpr::zero();
        for (m, c) in &self.terms {
            let mut kept = Monomial::one();
            let mut factor = SymExpr::constant(c.clone());
            for &(a, e) in m.factors() {
                match bindings.get(&a) {
                    None => kept = kept.mul(&Monomial::atom(a, e)),
                    Some(v) => {
                        let p = match cache.get(&(a, e)) {
                            Some(p) => p.clone(),
                            None => {
                                let p = v.pow(e)?;
                                cache.insert((a, e), p.clone());
                                p
                            }
                        };
                        factor = &factor * &p;
                    }
                }
            }
            out.add_scaled(&factor.mul_monomial(&kept, &Coeff::one()), &Coeff::one());
        }
        Ok(out)
    }

    /// Substitution where every binding is known to be invertible or
    /// appears only with nonnegative exponents.
    pub fn subst_unchecked(&self, bindings: &BTreeMap<Atom, SymExpr>) -> SymExpr {
        self.subst(bindings).expect("substitution into a pole")
    }

    /// Laurent coefficients with respect to one atom.
    pub fn coefficients_in(&self, a: &Atom) -> BTreeMap<i32, SymExpr> {
        let mut out: BTreeMap<i32, SymExpr> = BTreeMap::new();
        for (m, c) in &self.terms {
            let (e, rest) = m.split_off(a);
            out.entry(e).or_default().add_term(rest, c.clone());
        }
        out.retain(|_, v| !v.is_zero());
        out
    }

    /// Coefficient of `a^e`.
    pub fn coeff_of(&self, a: &Atom, e: i32) -> SymExpr {
        let mut out = SymExpr::zero();
        for (m, c) in &self.terms {
            if m.exponent(a) == e {
                out.add_term(m.split_off(a).1, c.clone());
            }
        }
        out
    }

    /// Floating-point evaluation.
    pub fn eval_f64(&self, val: &dyn Fn(&Atom) -> f64) -> f64 {
        let mut total = 0.0;
        for (m, c) in &self.terms {
            let mut t = c.to_f64().unwrap_or(f64::NAN);
            for (a, e) in m.factors() {
                t *= val(a).powi(*e);
            }
            total += t;
        }
        total
    }

    /// Apply a map to every coefficient, dropping zeros.
    pub fn map_coeffs(&self, f: impl Fn(&Coeff) -> Coeff) -> SymExpr {
        let mut out = SymExpr::zero();
        for (m, c) in &self.terms {
            out.add_term(m.clone(), f(c));
        }
        out
    }

    /// Rewrite every monomial, collecting terms.
    pub fn map_monomials(&self, f: impl Fn(&Monomial, &Coeff) -> SymExpr) -> SymExpr {
        let mut out = SymExpr::zero();
        for (m, c) in &self.terms {
            out += f(m, c);
        }
        out
    }

    /// Maximum total degree over the atoms selected by `pred`.
    pub fn degree_in(&self, pred: impl Fn(&Atom) -> bool) -> i32 {
        self.terms
            .keys()
            .map(|m| {
                m.factors()
                    .iter()
                    .filter(|(a, _)| pred(a))
                    .map(|(_, e)| *e)
                    .sum::<i32>()
            })
            .max()
            .unwrap_or(0)
    }
}

impl From<i64> for SymExpr {
    fn from(n: i64) -> Self {
        SymExpr::int(n)
    }
}

impl From<Atom> for SymExpr {
    fn from(a: Atom) -> Self {
        SymExpr::atom(a)
    }
}

impl From<Coeff> for SymExpr {
    fn from(c: Coeff) -> Self {
        SymExpr::constant(c)
    }
}

fn write_coeff(f: &mut fmt::Formatter<'_>, c: &Coeff) -> fmt::Result {
    if c.is_integer() {
        write!(f, "{}", c.numer())
    } else {
        write!(f, "{}/{}", c.numer(), c.denom())
    }
}

impl fmt::Display for SymExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, (m, c)) in self.terms.iter().enumerate() {
            let abs = c.abs();
            if idx == 0 {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            if m.is_one() {
                write_coeff(f, &abs)?;
            } else if abs.is_one() {
                write!(f, "{m}")?;
            } else {
                write_coeff(f, &abs)?;
                write!(f, "*{m}")?;
            }
        }
        Ok(())
    }
}

impl<'a> Add<&'a SymExpr> for &'a SymExpr {
    type Output = SymExpr;
    fn add(self, rhs: &SymExpr) -> SymExpr {
        let (big, small) = if self.len() >= rhs.len() {
            (self, rhs)
        } else {
            (rhs, self)
        };
        let mut out = big.clone();
        out.add_scaled(small, &Coeff::one());
        out
    }
}

impl<'a> Sub<&'a SymExpr> for &'a SymExpr {
    type Output = SymExpr;
    fn sub(self, rhs: &SymExpr) -> SymExpr {
        let mut out = self.clone();
        out.add_scaled(rhs, &-Coeff::one());
        out
    }
}

impl<'a> Mul<&'a SymExpr> for &'a SymExpr {
    type Output = SymExpr;
    fn mul(self, rhs: &SymExpr) -> SymExpr {
        if self.is_zero() || rhs.is_zero() {
            return SymExpr::zero();
        }
        if let Some(c) = self.as_constant() {
            return rhs.scale(&c);
        }
        if let Some(c) = rhs.as_constant() {
            return self.scale(&c);
        }
        let mut out = SymExpr::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }
}

impl Neg for &SymExpr {
    type Output = SymExpr;
    fn neg(self) -> SymExpr {
        SymExpr {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl Neg for SymExpr {
    type Output = SymExpr;
    fn neg(mut self) -> SymExpr {
        for c in self.terms.values_mut() {
            *c = -c.clone();
        }
        self
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident) => {
        impl $tr<SymExpr> for SymExpr {
            type Output = SymExpr;
            fn $m(self, rhs: SymExpr) -> SymExpr {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a SymExpr> for SymExpr {
            type Output = SymExpr;
            fn $m(self, rhs: &SymExpr) -> SymExpr {
                (&self).$m(rhs)
            }
        }
        impl<'a> $tr<SymExpr> for &'a SymExpr {
            type Output = SymExpr;
            fn $m(self, rhs: SymExpr) -> SymExpr {
                self.$m(&rhs)
            }
        }
    };
}
forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl AddAssign<&SymExpr> for SymExpr {
    fn add_assign(&mut self, rhs: &SymExpr) {
        self.add_scaled(rhs, &Coeff::one());
    }
}

impl AddAssign<SymExpr> for SymExpr {
    fn add_assign(&mut self, rhs: SymExpr) {
        if self.is_empty() {
            *self = rhs;
        } else {
            for (m, c) in rhs.terms {
                self.add_term(m, c);
            }
        }
    }
}

impl SubAssign<&SymExpr> for SymExpr {
    fn sub_assign(&mut self, rhs: &SymExpr) {
        self.add_scaled(rhs, &-Coeff::one());
    }
}

impl SubAssign<SymExpr> for SymExpr {
    fn sub_assign(&mut self, rhs: SymExpr) {
        for (m, c) in rhs.terms {
            self.add_term(m, -c);
        }
    }
}

impl std::iter::Sum for SymExpr {
    fn sum<I: Iterator<Item = SymExpr>>(iter: I) -> SymExpr {
        let mut out = SymExpr::zero();
        for x in iter {
            out += x;
        }
        out
    }
}

impl std::iter::Product for SymExpr {
    fn product<I: Iterator<Item = SymExpr>>(iter: I) -> SymExpr {
        let mut out = SymExpr::one();
        for x in iter {
            out = &out * &x;
        }
        out
    }
}
