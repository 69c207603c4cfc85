use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};

use super::{Atom, Coeff, SymExpr};

/// Element of the prime field `Z / (2^61 − 1)`, for exact identity testing
/// by evaluation at random points.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct Fp(u64);

impl Fp {
    pub const P: u64 = (1 << 61) - 1;

    pub fn new(v: u64) -> Self {
        Fp(v % Self::P)
    }

    pub fn from_i64(v: i64) -> Self {
        let r = v.rem_euclid(Self::P as i64);
        Fp(r as u64)
    }

    pub fn zero() -> Self {
        Fp(0)
    }

    pub fn one() -> Self {
        Fp(1)
    }

    pub fn value(self) -> u64 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    pub fn pow(self, mut e: u64) -> Self {
        let mut base = self;
        let mut acc = Fp::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(self) -> Option<Self> {
        (!self.is_zero()).then(|| self.pow(Self::P - 2))
    }

    pub fn powi(self, e: i32) -> Option<Self> {
        if e >= 0 {
            Some(self.pow(e as u64))
        } else {
            self.inv().map(|x| x.pow(e.unsigned_abs() as u64))
        }
    }

    fn from_bigint(v: &BigInt) -> Self {
        let p = BigInt::from(Self::P);
        let r = ((v % &p) + &p) % &p;
        Fp(r.to_u64().expect("reduced residue fits"))
    }

    /// Image of a rational; `None` if the denominator vanishes mod p.
    pub fn from_coeff(c: &Coeff) -> Option<Self> {
        let n = Self::from_bigint(c.numer());
        let d = Self::from_bigint(&c.denom().abs());
        let s = if c.denom().is_negative() { -Fp::one() } else { Fp::one() };
        d.inv().map(|di| n * di * s)
    }
}

impl Add for Fp {
    type Output = Fp;
    fn add(self, o: Fp) -> Fp {
        let s = self.0 + o.0;
        Fp(if s >= Self::P { s - Self::P } else { s })
    }
}

impl Sub for Fp {
    type Output = Fp;
    fn sub(self, o: Fp) -> Fp {
        self + (-o)
    }
}

impl Neg for Fp {
    type Output = Fp;
    fn neg(self) -> Fp {
        Fp(if self.0 == 0 { 0 } else { Self::P - self.0 })
    }
}

impl Mul for Fp {
    type Output = Fp;
    fn mul(self, o: Fp) -> Fp {
        let prod = self.0 as u128 * o.0 as u128;
        let lo = (prod as u64) & Self::P;
        let hi = (prod >> 61) as u64;
        let s = lo + hi;
        Fp(if s >= Self::P { s - Self::P } else { s })
    }
}

impl fmt::Display for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl SymExpr {
    /// Evaluate in `Fp`; `None` on a pole or an unassigned atom.
    pub fn eval_mod_p(&self, val: &dyn Fn(&Atom) -> Option<Fp>) -> Option<Fp> {
        let mut acc = Fp::zero();
        for (m, c) in self.terms() {
            let mut t = Fp::from_coeff(c)?;
            for (a, e) in m.factors() {
                t = t * val(a)?.powi(*e)?;
            }
            acc = acc + t;
        }
        Some(acc)
    }
}
