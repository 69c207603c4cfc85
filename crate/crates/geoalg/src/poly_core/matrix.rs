use std::collections::{BTreeMap, HashMap};
use std::fmt;

use super::{Atom, PolyError, SymExpr};

/// Square matrix over [`SymExpr`], typically with Laurent entries in `lam`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LambdaMatrix {
    n: usize,
    data: Vec<SymExpr>,
}

impl LambdaMatrix {
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> SymExpr) -> Self {
        assert!(n >= 1, "matrix dimension must be at least 1");
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        LambdaMatrix { n, data }
    }

    pub fn zeros(n: usize) -> Self {
        Self::from_fn(n, |_, _| SymExpr::zero())
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, |i, j| if i == j { SymExpr::one() } else { SymExpr::zero() })
    }

    pub fn from_rows(rows: Vec<Vec<SymExpr>>) -> Self {
        let n = rows.len();
        assert!(rows.iter().all(|r| r.len() == n), "rows must form a square matrix");
        LambdaMatrix {
            n,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Zero-based entry access.
    pub fn get(&self, i: usize, j: usize) -> &SymExpr {
        &self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: SymExpr) {
        self.data[i * self.n + j] = v;
    }

    pub fn entries(&self) -> &[SymExpr] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self.get(j, i).clone())
    }

    pub fn map(&self, f: impl Fn(&SymExpr) -> SymExpr) -> Self {
        LambdaMatrix {
            n: self.n,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn try_map(
        &self,
        f: impl Fn(&SymExpr) -> Result<SymExpr, PolyError>,
    ) -> Result<Self, PolyError> {
        Ok(LambdaMatrix {
            n: self.n,
            data: self.data.iter().map(f).collect::<Result<_, _>>()?,
        })
    }

    pub fn scale(&self, s: &SymExpr) -> Self {
        self.map(|e| e * s)
    }

    fn check_dim(&self, other: &Self) -> Result<(), PolyError> {
        if self.n != other.n {
            return Err(PolyError::DimensionMismatch(self.n, other.n));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, PolyError> {
        self.check_dim(other)?;
        Ok(Self::from_fn(self.n, |i, j| self.get(i, j) + other.get(i, j)))
    }

    pub fn sub(&self, other: &Self) -> Result<Self, PolyError> {
        self.check_dim(other)?;
        Ok(Self::from_fn(self.n, |i, j| self.get(i, j) - other.get(i, j)))
    }

    pub fn mul(&self, other: &Self) -> Result<Self, PolyError> {
        self.check_dim(other)?;
        let n = self.n;
        Ok(Self::from_fn(n, |i, j| {
            let mut acc = SymExpr::zero();
            for k in 0..n {
                let a = self.get(i, k);
                let b = other.get(k, j);
                if !a.is_zero() && !b.is_zero() {
                    acc += a * b;
                }
            }
            acc
        }))
    }

    /// Product of a sequence of equally sized matrices.
    pub fn product<'a>(items: impl IntoIterator<Item = &'a LambdaMatrix>) -> Result<Self, PolyError> {
        let mut it = items.into_iter();
        let mut acc = it.next().expect("empty product").clone();
        for m in it {
            acc = acc.mul(m)?;
        }
        Ok(acc)
    }

    pub fn trace(&self) -> SymExpr {
        (0..self.n).map(|i| self.get(i, i).clone()).sum()
    }

    /// Exact determinant by Laplace expansion memoized over column subsets.
    pub fn det(&self) -> SymExpr {
        let n = self.n;
        assert!(n <= 20, "determinant dimension too large");
        let mut memo: HashMap<u32, SymExpr> = HashMap::new();
        self.det_rec(0, 0, &mut memo)
    }

    fn det_rec(&self, row: usize, used: u32, memo: &mut HashMap<u32, SymExpr>) -> SymExpr {
        if row == self.n {
            return SymExpr::one();
        }
        if let Some(v) = memo.get(&used) {
            return v.clone();
        }
        let mut acc = SymExpr::zero();
        let mut pos = 0;
        for col in 0..self.n {
            if used & (1 << col) != 0 {
                continue;
            }
            let a = self.get(row, col);
            if !a.is_zero() {
                let minor = self.det_rec(row + 1, used | (1 << col), memo);
                if !minor.is_zero() {
                    let t = a * &minor;
                    if pos % 2 == 0 {
                        acc += t;
                    } else {
                        acc -= t;
                    }
                }
            }
            pos += 1;
        }
        memo.insert(used, acc.clone());
        acc
    }

    /// Substitute atoms in every entry.
    pub fn subst(&self, bindings: &BTreeMap<Atom, SymExpr>) -> Result<Self, PolyError> {
        self.try_map(|e| e.subst(bindings))
    }

    /// Replace `lam` by `lam^{-1}`.
    pub fn invert_lambda(&self) -> Self {
        let mut b = BTreeMap::new();
        b.insert(Atom::Lam, SymExpr::atom_pow(Atom::Lam, -1));
        self.subst(&b).expect("monomial substitution is invertible")
    }

    /// Coefficient matrix of `lam^e`.
    pub fn lambda_coeff(&self, e: i32) -> Self {
        self.map(|x| x.coeff_of(&Atom::Lam, e))
    }

    /// Range of `lam` exponents present in the entries.
    pub fn lambda_range(&self) -> Option<(i32, i32)> {
        let mut lo = i32::MAX;
        let mut hi = i32::MIN;
        for e in &self.data {
            for k in e.coefficients_in(&Atom::Lam).keys() {
                lo = lo.min(*k);
                hi = hi.max(*k);
            }
        }
        (lo <= hi).then_some((lo, hi))
    }

    /// Drop every term with a `lam` exponent below `min_exp`.
    pub fn truncate_below(&self, min_exp: i32) -> Self {
        self.map(|x| {
            x.coefficients_in(&Atom::Lam)
                .into_iter()
                .filter(|(k, _)| *k >= min_exp)
                .map(|(k, c)| c * SymExpr::atom_pow(Atom::Lam, k))
                .sum()
        })
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|e| e.is_zero())
    }
}

impl fmt::Display for LambdaMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.n {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for j in 0..self.n {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}
