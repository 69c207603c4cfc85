use num_traits::{One, ToPrimitive, Zero};

use super::expr::{q, Coeff};
use super::{LambdaMatrix, PolyError, SymExpr};

/// Dense matrix over exact rationals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Coeff>,
}

impl RatMatrix {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Coeff) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        RatMatrix { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |_, _| Coeff::zero())
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { Coeff::one() } else { Coeff::zero() })
    }

    pub fn from_rows(rows: Vec<Vec<Coeff>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged rows");
        RatMatrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Coeff {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Coeff) {
        self.data[i * self.cols + j] = v;
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Self::from_fn(self.rows, self.cols, |i, j| self.get(i, j) + o.get(i, j))
    }

    pub fn sub(&self, o: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Self::from_fn(self.rows, self.cols, |i, j| self.get(i, j) - o.get(i, j))
    }

    pub fn neg(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| -self.get(i, j))
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.cols, o.rows, "dimension mismatch");
        Self::from_fn(self.rows, o.cols, |i, j| {
            let mut acc = Coeff::zero();
            for k in 0..self.cols {
                let a = self.get(i, k);
                if !a.is_zero() {
                    acc += a * o.get(k, j);
                }
            }
            acc
        })
    }

    /// Block of rows `r0..r1` and columns `c0..c1`.
    pub fn block(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> Self {
        Self::from_fn(r1 - r0, c1 - c0, |i, j| self.get(r0 + i, c0 + j).clone())
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols && *self == Self::identity(self.rows)
    }

    /// Gauss–Jordan inverse; `None` when singular.
    pub fn inverse(&self) -> Option<Self> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for col in 0..n {
            let piv = (col..n).find(|&r| !a.get(r, col).is_zero())?;
            if piv != col {
                for j in 0..n {
                    a.data.swap(piv * n + j, col * n + j);
                    inv.data.swap(piv * n + j, col * n + j);
                }
            }
            let p = a.get(col, col).recip();
            for j in 0..n {
                let v = a.get(col, j) * &p;
                a.set(col, j, v);
                let v = inv.get(col, j) * &p;
                inv.set(col, j, v);
            }
            for r in 0..n {
                if r != col && !a.get(r, col).is_zero() {
                    let f = a.get(r, col).clone();
                    for j in 0..n {
                        let v = a.get(r, j) - &f * a.get(col, j);
                        a.set(r, j, v);
                        let v = inv.get(r, j) - &f * inv.get(col, j);
                        inv.set(r, j, v);
                    }
                }
            }
        }
        Some(inv)
    }

    pub fn pow(&self, k: i64) -> Option<Self> {
        let base = if k < 0 { self.inverse()? } else { self.clone() };
        let mut result = Self::identity(self.rows);
        for _ in 0..k.unsigned_abs() {
            result = result.mul(&base);
        }
        Some(result)
    }

    /// Rank by fraction-exact row reduction.
    pub fn rank(&self) -> usize {
        let mut a = self.clone();
        let mut rank = 0;
        for col in 0..self.cols {
            if rank == self.rows {
                break;
            }
            let Some(piv) = (rank..self.rows).find(|&r| !a.get(r, col).is_zero()) else {
                continue;
            };
            if piv != rank {
                for j in 0..self.cols {
                    a.data.swap(piv * self.cols + j, rank * self.cols + j);
                }
            }
            let p = a.get(rank, col).clone();
            for r in rank + 1..self.rows {
                if !a.get(r, col).is_zero() {
                    let f = a.get(r, col) / &p;
                    for j in col..self.cols {
                        let v = a.get(r, j) - &f * a.get(rank, j);
                        a.set(r, j, v);
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    /// Solve `A x = b` for a square or overdetermined consistent system;
    /// returns `None` when inconsistent or underdetermined.
    pub fn solve(&self, b: &[Coeff]) -> Option<Vec<Coeff>> {
        assert_eq!(b.len(), self.rows);
        let cols = self.cols;
        let mut aug = Self::from_fn(self.rows, cols + 1, |i, j| {
            if j < cols {
                self.get(i, j).clone()
            } else {
                b[i].clone()
            }
        });
        let mut row = 0;
        let mut pivots = Vec::new();
        for col in 0..cols {
            let Some(piv) = (row..aug.rows).find(|&r| !aug.get(r, col).is_zero()) else {
                continue;
            };
            for j in 0..=cols {
                aug.data.swap(piv * (cols + 1) + j, row * (cols + 1) + j);
            }
            let p = aug.get(row, col).recip();
            for j in 0..=cols {
                let v = aug.get(row, j) * &p;
                aug.set(row, j, v);
            }
            for r in 0..aug.rows {
                if r != row && !aug.get(r, col).is_zero() {
                    let f = aug.get(r, col).clone();
                    for j in 0..=cols {
                        let v = aug.get(r, j) - &f * aug.get(row, j);
                        aug.set(r, j, v);
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        if pivots.len() < cols {
            return None;
        }
        if (row..aug.rows).any(|r| !aug.get(r, cols).is_zero()) {
            return None;
        }
        Some((0..cols).map(|i| aug.get(i, cols).clone()).collect())
    }

    pub fn to_f64(&self) -> nalgebra::DMatrix<f64> {
        nalgebra::DMatrix::from_fn(self.rows, self.cols, |i, j| {
            self.get(i, j).to_f64().unwrap_or(f64::NAN)
        })
    }

    /// Square matrix as a [`LambdaMatrix`] of constants.
    pub fn to_lambda(&self) -> LambdaMatrix {
        assert_eq!(self.rows, self.cols);
        LambdaMatrix::from_fn(self.rows, |i, j| SymExpr::constant(self.get(i, j).clone()))
    }

    /// Constant [`LambdaMatrix`] back to rationals.
    pub fn from_lambda(m: &LambdaMatrix) -> Result<Self, PolyError> {
        let n = m.dim();
        let mut out = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let c = m
                    .get(i, j)
                    .as_constant()
                    .ok_or_else(|| PolyError::NotConstant(m.get(i, j).to_string()))?;
                out.set(i, j, c);
            }
        }
        Ok(out)
    }

    pub fn scale_int(&self, s: i64) -> Self {
        let s = q(s);
        Self::from_fn(self.rows, self.cols, |i, j| self.get(i, j) * &s)
    }
}
