//! Exact commutative algebra: multivariate Laurent polynomials with rational
//! coefficients over shear, spectral and hole variables and abstract
//! generators, plus matrices over that ring.

mod atom;
mod expr;
mod matrix;
mod modp;
mod parse;
mod ratmat;

use std::collections::BTreeMap;

use thiserror::Error;

pub use atom::{Atom, GenIndex};
pub use expr::{q, qf, Coeff, Monomial, SymExpr};
pub use matrix::LambdaMatrix;
pub use modp::Fp;
pub use parse::parse_expr;
pub use ratmat::RatMatrix;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("{0} is a generator, not a ring variable")]
    NotAVariable(String),
    #[error("substitution of zero into a negative power")]
    Pole,
    #[error("expression {0} is not invertible")]
    NotInvertible(String),
    #[error("expression {0} is not a constant")]
    NotConstant(String),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

pub fn poly_mul(a: &SymExpr, b: &SymExpr) -> SymExpr {
    a * b
}

pub fn poly_add(a: &SymExpr, b: &SymExpr) -> SymExpr {
    a + b
}

pub fn poly_diff(a: &SymExpr, v: &Atom) -> Result<SymExpr, PolyError> {
    a.diff(v)
}

pub fn poly_subst(a: &SymExpr, bindings: &BTreeMap<Atom, SymExpr>) -> Result<SymExpr, PolyError> {
    a.subst(bindings)
}

pub fn mat_mul(a: &LambdaMatrix, b: &LambdaMatrix) -> Result<LambdaMatrix, PolyError> {
    a.mul(b)
}

pub fn mat_det(a: &LambdaMatrix) -> SymExpr {
    a.det()
}

/// Shorthand for `lam^e`.
pub fn lam(e: i32) -> SymExpr {
    SymExpr::atom_pow(Atom::Lam, e)
}

/// Parse, panicking on malformed input; for literals in code and tests.
pub fn ex(text: &str) -> SymExpr {
    parse_expr(text).unwrap_or_else(|e| panic!("bad expression literal {text:?}: {e}"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn bind(pairs: &[(Atom, SymExpr)]) -> BTreeMap<Atom, SymExpr> {
        pairs.iter().cloned().collect()
    }

    #[test]
    fn difference_of_squares() {
        let a = ex("s1 + s1^-1");
        let b = ex("s1 - s1^-1");
        assert_eq!(poly_mul(&a, &b), ex("s1^2 - s1^-2"));
    }

    #[test]
    fn annihilator_and_scalars() {
        assert!(poly_mul(&ex("x"), &SymExpr::zero()).is_zero());
        assert_eq!(poly_mul(&ex("1/2*lam + 3"), &SymExpr::int(2)), ex("lam + 6"));
    }

    #[test]
    fn derivatives() {
        let s1 = Atom::S(1);
        assert_eq!(poly_diff(&ex("s1^2 + s1^-2"), &s1).unwrap(), ex("2*s1 - 2*s1^-3"));
        assert!(poly_diff(&ex("t1^3"), &s1).unwrap().is_zero());
        assert_eq!(poly_diff(&ex("s1*t1"), &s1).unwrap(), ex("t1"));
        assert!(matches!(
            poly_diff(&ex("G[1,2,0]"), &Atom::g(1, 2, 0)),
            Err(PolyError::NotAVariable(_))
        ));
    }

    #[test]
    fn substitutions() {
        let b = bind(&[(Atom::S(1), SymExpr::one())]);
        assert_eq!(poly_subst(&ex("s1^2 + s1^-2"), &b).unwrap(), SymExpr::int(2));
        let b = bind(&[(Atom::H, SymExpr::one())]);
        assert_eq!(poly_subst(&ex("lam*h"), &b).unwrap(), ex("lam"));
        let b = bind(&[(Atom::S(1), SymExpr::zero())]);
        assert_eq!(poly_subst(&ex("s1^-1"), &b), Err(PolyError::Pole));
        let b = bind(&[(Atom::S(1), ex("1 + t1"))]);
        assert!(matches!(poly_subst(&ex("s1^-1"), &b), Err(PolyError::NotInvertible(_))));
    }

    #[test]
    fn matrix_products() {
        let a = LambdaMatrix::from_rows(vec![
            vec![ex("1"), ex("G[1,2,0]")],
            vec![ex("lam"), ex("s1")],
        ]);
        assert_eq!(mat_mul(&LambdaMatrix::identity(2), &a).unwrap(), a);
        let d = LambdaMatrix::from_rows(vec![vec![lam(1), ex("0")], vec![ex("0"), lam(1)]]);
        assert_eq!(mat_mul(&d, &d.invert_lambda()).unwrap(), LambdaMatrix::identity(2));
        let x = LambdaMatrix::from_rows(vec![vec![ex("0"), ex("-s1")], vec![ex("s1^-1"), ex("0")]]);
        assert_eq!(mat_mul(&x, &x).unwrap(), LambdaMatrix::identity(2).scale(&SymExpr::int(-1)));
        assert!(matches!(
            mat_mul(&x, &LambdaMatrix::identity(3)),
            Err(PolyError::DimensionMismatch(2, 3))
        ));
    }

    #[test]
    fn determinants() {
        assert_eq!(mat_det(&LambdaMatrix::identity(4)), SymExpr::one());
        let u = LambdaMatrix::from_rows(vec![vec![ex("1"), ex("g")], vec![ex("0"), ex("1")]]);
        assert_eq!(mat_det(&u), SymExpr::one());
        // Hand expansion: (λ+λ^{-1})² − g².
        let m = u.scale(&lam(1)).add(&u.transpose().scale(&lam(-1))).unwrap();
        assert_eq!(mat_det(&m), ex("(lam + lam^-1)^2 - g^2"));
    }

    #[test]
    fn canonical_printing() {
        let e = ex("2*G[3,4,0]*G[1,2,0] - 2*G[2,3,0]*G[1,4,0]");
        assert_eq!(e.to_string(), "2*G[1,2,0]*G[3,4,0] - 2*G[1,4,0]*G[2,3,0]");
        assert_eq!(ex("-3/2*s1^-2 + 1").to_string(), "1 - 3/2*s1^-2");
        assert_eq!(ex("x - x").to_string(), "0");
        assert_eq!(ex("-x^2"), -ex("x^2"));
        assert_eq!(ex("Ghat[1,2]*TrH[2]*hbar*Pi*h").to_string(), "h*Pi*hbar*TrH[2]*Ghat[1,2]");
    }

    #[test]
    fn round_trip_text() {
        for t in ["0", "1 - 3/2*s1^-2", "2*G[1,2,0]*G[3,4,0] - 2*G[1,4,0]*G[2,3,0]", "lam^-3*G[2,1,1]"] {
            assert_eq!(ex(t).to_string(), t);
        }
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(parse_expr("G[1,2"), Err(PolyError::Parse { .. })));
        assert!(matches!(parse_expr("1 +"), Err(PolyError::Parse { .. })));
        assert!(matches!(parse_expr("x / (1 + x)"), Err(PolyError::NotInvertible(_))));
        assert!(matches!(parse_expr("2 )"), Err(PolyError::Parse { .. })));
    }

    #[test]
    fn rational_rank_and_inverse() {
        let m = RatMatrix::from_rows(vec![vec![q(1), q(2)], vec![q(2), q(4)]]);
        assert_eq!(m.rank(), 1);
        assert!(m.inverse().is_none());
        let m = RatMatrix::from_rows(vec![vec![q(1), q(2)], vec![q(3), q(4)]]);
        assert!(m.mul(&m.inverse().unwrap()).is_identity());
        assert_eq!(m.solve(&[q(5), q(11)]).unwrap(), vec![q(1), q(2)]);
    }

    #[test]
    fn prime_field() {
        let a = Fp::from_i64(-3);
        assert_eq!(a + Fp::from_i64(3), Fp::zero());
        assert_eq!(a * a.inv().unwrap(), Fp::one());
        assert_eq!(Fp::from_coeff(&qf(1, 2)).unwrap() * Fp::from_i64(2), Fp::one());
        assert_eq!(Fp::new(Fp::P - 1) * Fp::new(Fp::P - 1), Fp::one());
        let e = ex("3/4*x^2*y^-1 - 2");
        let v = e.eval_mod_p(&|_| Some(Fp::from_i64(2))).unwrap();
        assert_eq!(v, -Fp::from_coeff(&qf(1, 2)).unwrap());
        assert_eq!(SymExpr::gen(2, 1, 0), ex("G[1,2,0]"));
        assert_eq!(SymExpr::gen(2, 2, 0), SymExpr::int(2));
        assert_eq!(SymExpr::gen(2, 1, -3), ex("G[1,2,3]"));
    }

    fn atom_strategy() -> impl Strategy<Value = Atom> {
        prop_oneof![
            Just(Atom::S(1)),
            Just(Atom::S(2)),
            Just(Atom::T(1)),
            Just(Atom::Lam),
            Just(Atom::g(1, 2, 0)),
        ]
    }

    fn expr_strategy() -> impl Strategy<Value = SymExpr> {
        prop::collection::vec(
            (-5i64..=5, 1i64..=3, prop::collection::vec((atom_strategy(), -2i32..=2), 0..3)),
            0..4,
        )
        .prop_map(|terms| {
            terms
                .into_iter()
                .map(|(n, d, fs)| {
                    let mut m = Monomial::one();
                    for (a, e) in fs {
                        m = m.mul(&Monomial::atom(a, e));
                    }
                    SymExpr::term(m, qf(n, d))
                })
                .sum()
        })
    }

    fn mat_strategy(n: usize) -> impl Strategy<Value = LambdaMatrix> {
        prop::collection::vec(expr_strategy(), n * n).prop_map(move |v| {
            let mut it = v.into_iter();
            LambdaMatrix::from_fn(n, |_, _| it.next().unwrap())
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn ring_axioms(a in expr_strategy(), b in expr_strategy(), c in expr_strategy()) {
            prop_assert_eq!((&a + &b) + &c, &a + (&b + &c));
            prop_assert_eq!(&a * (&b + &c), &a * &b + &a * &c);
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!((&a * &b) * &c, &a * (&b * &c));
            prop_assert!((&a - &a).is_zero());
        }

        #[test]
        fn leibniz_rule(a in expr_strategy(), b in expr_strategy()) {
            let s = Atom::S(1);
            let lhs = poly_diff(&(&a * &b), &s).unwrap();
            let rhs = &poly_diff(&a, &s).unwrap() * &b + &a * &poly_diff(&b, &s).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn printing_round_trips(a in expr_strategy()) {
            prop_assert_eq!(parse_expr(&a.to_string()).unwrap(), a);
        }

        #[test]
        fn det_multiplicative_2x2(a in mat_strategy(2), b in mat_strategy(2)) {
            prop_assert_eq!(mat_det(&mat_mul(&a, &b).unwrap()), &mat_det(&a) * &mat_det(&b));
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]

        #[test]
        fn det_multiplicative_3x3(a in mat_strategy(3), b in mat_strategy(3)) {
            prop_assert_eq!(mat_det(&mat_mul(&a, &b).unwrap()), &mat_det(&a) * &mat_det(&b));
        }
    }
}
