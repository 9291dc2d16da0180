//! Exact integer and rational linear algebra.
//!
//! Everything here works over `BigInt`: determinants and echelon forms use
//! Bareiss fraction-free elimination, and lattice questions go through the
//! Smith and Hermite normal forms in [`snf`].

pub mod coprime;
pub mod roots;
pub mod snf;

use std::fmt;
use std::ops::{Index, IndexMut};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

pub use snf::{hermite_rows, integer_kernel, saturate_rows, smith, Smith};

/// Dense integer matrix, row-major.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn scalar(n: usize, s: i64) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::from(s);
        }
        m
    }

    pub fn from_rows<T: Into<BigInt> + Clone>(rows: &[Vec<T>]) -> Self {
        let r = rows.len();
        let c = rows.first().map(Vec::len).unwrap_or(0);
        assert!(rows.iter().all(|row| row.len() == c), "ragged matrix");
        IntMatrix {
            rows: r,
            cols: c,
            data: rows
                .iter()
                .flat_map(|row| row.iter().cloned().map(Into::into))
                .collect(),
        }
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    /// Entries as `i64`, if they all fit.
    pub fn to_i64_rows(&self) -> Option<Vec<Vec<i64>>> {
        use num_traits::ToPrimitive;
        (0..self.rows)
            .map(|i| self.row(i).iter().map(ToPrimitive::to_i64).collect())
            .collect()
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut t = IntMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn sub(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        IntMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn pow(&self, k: u32) -> IntMatrix {
        assert!(self.is_square());
        let mut result = IntMatrix::identity(self.rows);
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    pub fn is_scalar(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    if i == j {
                        self[(i, j)] == self[(0, 0)]
                    } else {
                        self[(i, j)].is_zero()
                    }
                })
            })
    }

    pub fn det(&self) -> BigInt {
        assert!(self.is_square(), "determinant of non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.to_rows();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n {
            let Some(p) = (k..n).find(|&i| !a[i][k].is_zero()) else {
                return BigInt::zero();
            };
            if p != k {
                a.swap(p, k);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (&a[k][k] * &a[i][j] - &a[i][k] * &a[k][j]) / &prev;
                    a[i][j] = v;
                }
                a[i][k] = BigInt::zero();
            }
            prev = a[k][k].clone();
        }
        sign * &a[n - 1][n - 1]
    }

    pub fn rank(&self) -> usize {
        let rows: Vec<Vec<BigRational>> = self
            .to_rows()
            .into_iter()
            .map(|r| r.into_iter().map(BigRational::from_integer).collect())
            .collect();
        echelon(&rows, self.cols).pivots.len()
    }

    /// Matrix of `k × k` minors, rows and columns indexed by `k`-subsets in
    /// lexicographic order.
    pub fn compound(&self, k: usize) -> IntMatrix {
        let rs = subsets(self.rows, k);
        let cs = subsets(self.cols, k);
        let mut out = IntMatrix::zeros(rs.len(), cs.len());
        for (a, r) in rs.iter().enumerate() {
            for (b, c) in cs.iter().enumerate() {
                let sub: Vec<Vec<BigInt>> = r
                    .iter()
                    .map(|&i| c.iter().map(|&j| self[(i, j)].clone()).collect())
                    .collect();
                out[(a, b)] = IntMatrix::from_rows(&sub).det();
            }
        }
        out
    }

    /// Characteristic polynomial `det(λI − A)`, coefficients from the
    /// constant term upward (monic, length `n + 1`). Faddeev–LeVerrier.
    pub fn charpoly(&self) -> Vec<BigInt> {
        assert!(self.is_square());
        let n = self.rows;
        let mut c = vec![BigInt::zero(); n + 1];
        c[n] = BigInt::one();
        let mut m = IntMatrix::zeros(n, n);
        for k in 1..=n {
            // M_k = A M_{k-1} + c_{n-k+1} I
            let mut next = self.mul(&m);
            for i in 0..n {
                next[(i, i)] += &c[n - k + 1];
            }
            m = next;
            let am = self.mul(&m);
            let tr: BigInt = (0..n).map(|i| am[(i, i)].clone()).sum();
            let (q, r) = (-tr).div_rem(&BigInt::from(k));
            debug_assert!(r.is_zero());
            c[n - k] = q;
        }
        c
    }
}

impl Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<Vec<String>> = self
            .to_rows()
            .into_iter()
            .map(|r| r.into_iter().map(|x| x.to_string()).collect())
            .collect();
        write!(f, "{rows:?}")
    }
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Integer row echelon form produced by Bareiss elimination.
#[derive(Debug, Clone)]
pub struct Echelon {
    pub rows: Vec<Vec<BigInt>>,
    pub pivots: Vec<usize>,
}

/// Fraction-free echelon form of a rational matrix: each row is first
/// scaled to integers, then eliminated with exact Bareiss divisions.
pub fn echelon(rows: &[Vec<BigRational>], ncols: usize) -> Echelon {
    let mut a: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|r| {
            assert_eq!(r.len(), ncols);
            let l = crate::arith::lcm_all(r.iter().map(|x| x.denom()));
            r.iter()
                .map(|x| (x * BigRational::from_integer(l.clone())).to_integer())
                .collect()
        })
        .collect();
    let m = a.len();
    let mut prev = BigInt::one();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == m {
            break;
        }
        let Some(p) = (r..m).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(p, r);
        for i in r + 1..m {
            for j in c + 1..ncols {
                let v = (&a[r][c] * &a[i][j] - &a[i][c] * &a[r][j]) / &prev;
                a[i][j] = v;
            }
            a[i][c] = BigInt::zero();
        }
        prev = a[r][c].clone();
        pivots.push(c);
        r += 1;
    }
    a.truncate(r);
    Echelon { rows: a, pivots }
}

/// Kernel basis of a rational matrix, one vector per free column.
///
/// The vector for free column `f` has a positive entry at `f`, zeros at all
/// other free columns, and is scaled to a primitive integer vector. Its last
/// nonzero entry is at `f`.
pub fn kernel_basis(rows: &[Vec<BigRational>], ncols: usize) -> Vec<Vec<BigInt>> {
    let ech = echelon(rows, ncols);
    let free: Vec<usize> = (0..ncols).filter(|c| !ech.pivots.contains(c)).collect();
    let r = ech.pivots.len();
    let mut out = Vec::with_capacity(free.len());
    for &f in &free {
        let mut x = vec![BigRational::zero(); ncols];
        x[f] = BigRational::one();
        for i in (0..r).rev() {
            let pc = ech.pivots[i];
            let mut s = BigRational::zero();
            for j in pc + 1..ncols {
                if !x[j].is_zero() && !ech.rows[i][j].is_zero() {
                    s += BigRational::from_integer(ech.rows[i][j].clone()) * &x[j];
                }
            }
            x[pc] = -s / BigRational::from_integer(ech.rows[i][pc].clone());
        }
        out.push(primitive_vector(&x));
    }
    out
}

/// Smallest positive multiple of a rational vector that is integral, with
/// sign chosen so that the last nonzero entry is positive.
pub fn primitive_vector(x: &[BigRational]) -> Vec<BigInt> {
    let l = crate::arith::lcm_all(x.iter().map(|v| v.denom()));
    let ints: Vec<BigInt> = x
        .iter()
        .map(|v| (v * BigRational::from_integer(l.clone())).to_integer())
        .collect();
    let g = crate::arith::gcd_all(&ints);
    if g.is_zero() {
        return ints;
    }
    let last_neg = ints
        .iter()
        .rev()
        .find(|v| !v.is_zero())
        .map(|v| v.is_negative())
        .unwrap_or(false);
    let g = if last_neg { -g } else { g };
    ints.into_iter().map(|v| v / &g).collect()
}

/// Normalizes an integer vector to content 1 with its first nonzero entry
/// positive.
pub fn primitive_int_vector(v: &[BigInt]) -> Vec<BigInt> {
    let g = crate::arith::gcd_all(v);
    if g.is_zero() {
        return v.to_vec();
    }
    let first_neg = v
        .iter()
        .find(|x| !x.is_zero())
        .map(|x| x.is_negative())
        .unwrap_or(false);
    let g = if first_neg { -g } else { g };
    v.iter().map(|x| x / &g).collect()
}
