//! Smith and Hermite normal forms over ℤ.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::IntMatrix;

/// `u · a · v = d` with `u`, `v` unimodular and `d` diagonal, each invariant
/// factor dividing the next. The inverses of `u` and `v` are kept as well.
#[derive(Debug, Clone)]
pub struct Smith {
    pub d: IntMatrix,
    pub u: IntMatrix,
    pub u_inv: IntMatrix,
    pub v: IntMatrix,
    pub v_inv: IntMatrix,
}

impl Smith {
    /// Diagonal entries `d_0, …, d_{min(r,c)−1}`, zeros included.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        let k = self.d.nrows().min(self.d.ncols());
        (0..k).map(|i| self.d[(i, i)].clone()).collect()
    }

    pub fn rank(&self) -> usize {
        self.invariant_factors()
            .iter()
            .filter(|x| !x.is_zero())
            .count()
    }
}

struct Work {
    a: IntMatrix,
    u: IntMatrix,
    u_inv: IntMatrix,
    v: IntMatrix,
    v_inv: IntMatrix,
}

impl Work {
    // row_i += k * row_t
    fn add_row(&mut self, i: usize, t: usize, k: &BigInt) {
        if k.is_zero() {
            return;
        }
        for j in 0..self.a.ncols() {
            let x = &self.a[(t, j)] * k;
            self.a[(i, j)] += x;
        }
        for j in 0..self.u.ncols() {
            let x = &self.u[(t, j)] * k;
            self.u[(i, j)] += x;
        }
        for r in 0..self.u_inv.nrows() {
            let x = &self.u_inv[(r, i)] * k;
            self.u_inv[(r, t)] -= x;
        }
    }

    fn swap_rows(&mut self, i: usize, t: usize) {
        if i == t {
            return;
        }
        for j in 0..self.a.ncols() {
            let x = self.a[(i, j)].clone();
            self.a[(i, j)] = std::mem::replace(&mut self.a[(t, j)], x);
        }
        for j in 0..self.u.ncols() {
            let x = self.u[(i, j)].clone();
            self.u[(i, j)] = std::mem::replace(&mut self.u[(t, j)], x);
        }
        for r in 0..self.u_inv.nrows() {
            let x = self.u_inv[(r, i)].clone();
            self.u_inv[(r, i)] = std::mem::replace(&mut self.u_inv[(r, t)], x);
        }
    }

    fn negate_row(&mut self, t: usize) {
        for j in 0..self.a.ncols() {
            self.a[(t, j)] = -&self.a[(t, j)];
        }
        for j in 0..self.u.ncols() {
            self.u[(t, j)] = -&self.u[(t, j)];
        }
        for r in 0..self.u_inv.nrows() {
            self.u_inv[(r, t)] = -&self.u_inv[(r, t)];
        }
    }

    // col_j += k * col_t
    fn add_col(&mut self, j: usize, t: usize, k: &BigInt) {
        if k.is_zero() {
            return;
        }
        for r in 0..self.a.nrows() {
            let x = &self.a[(r, t)] * k;
            self.a[(r, j)] += x;
        }
        for r in 0..self.v.nrows() {
            let x = &self.v[(r, t)] * k;
            self.v[(r, j)] += x;
        }
        for c in 0..self.v_inv.ncols() {
            let x = &self.v_inv[(j, c)] * k;
            self.v_inv[(t, c)] -= x;
        }
    }

    fn swap_cols(&mut self, j: usize, t: usize) {
        if j == t {
            return;
        }
        for r in 0..self.a.nrows() {
            let x = self.a[(r, j)].clone();
            self.a[(r, j)] = std::mem::replace(&mut self.a[(r, t)], x);
        }
        for r in 0..self.v.nrows() {
            let x = self.v[(r, j)].clone();
            self.v[(r, j)] = std::mem::replace(&mut self.v[(r, t)], x);
        }
        for c in 0..self.v_inv.ncols() {
            let x = self.v_inv[(j, c)].clone();
            self.v_inv[(j, c)] = std::mem::replace(&mut self.v_inv[(t, c)], x);
        }
    }
}

pub fn smith(a: &IntMatrix) -> Smith {
    let (r, c) = (a.nrows(), a.ncols());
    let mut w = Work {
        a: a.clone(),
        u: IntMatrix::identity(r),
        u_inv: IntMatrix::identity(r),
        v: IntMatrix::identity(c),
        v_inv: IntMatrix::identity(c),
    };
    for t in 0..r.min(c) {
        // smallest nonzero entry of the trailing block becomes the pivot
        let mut best: Option<(usize, usize)> = None;
        for i in t..r {
            for j in t..c {
                if !w.a[(i, j)].is_zero()
                    && best.is_none_or(|(bi, bj)| w.a[(i, j)].abs() < w.a[(bi, bj)].abs())
                {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        w.swap_rows(t, pi);
        w.swap_cols(t, pj);
        loop {
            let mut dirty = false;
            for i in t + 1..r {
                if w.a[(i, t)].is_zero() {
                    continue;
                }
                let q = w.a[(i, t)].div_floor(&w.a[(t, t)]);
                w.add_row(i, t, &-q);
                if !w.a[(i, t)].is_zero() {
                    w.swap_rows(t, i);
                    dirty = true;
                }
            }
            for j in t + 1..c {
                if w.a[(t, j)].is_zero() {
                    continue;
                }
                let q = w.a[(t, j)].div_floor(&w.a[(t, t)]);
                w.add_col(j, t, &-q);
                if !w.a[(t, j)].is_zero() {
                    w.swap_cols(t, j);
                    dirty = true;
                }
            }
            if dirty {
                continue;
            }
            // divisibility: fold an offending row into the pivot row
            let piv = w.a[(t, t)].clone();
            let bad = (t + 1..r).find(|&i| (t + 1..c).any(|j| !w.a[(i, j)].is_multiple_of(&piv)));
            match bad {
                Some(i) => w.add_row(t, i, &BigInt::one()),
                None => break,
            }
        }
        if w.a[(t, t)].is_negative() {
            w.negate_row(t);
        }
    }
    Smith {
        d: w.a,
        u: w.u,
        u_inv: w.u_inv,
        v: w.v,
        v_inv: w.v_inv,
    }
}

/// Row Hermite normal form of the row lattice of `rows`; zero rows dropped.
/// Pivots are positive and entries above each pivot lie in `[0, pivot)`.
pub fn hermite_rows(rows: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let mut a: Vec<Vec<BigInt>> = rows.to_vec();
    let ncols = a.first().map(Vec::len).unwrap_or(0);
    let m = a.len();
    let mut t = 0;
    for c in 0..ncols {
        if t == m {
            break;
        }
        loop {
            let nz: Vec<usize> = (t..m).filter(|&i| !a[i][c].is_zero()).collect();
            if nz.is_empty() {
                break;
            }
            let p = *nz.iter().min_by_key(|&&i| a[i][c].abs()).unwrap();
            a.swap(t, p);
            let mut done = true;
            for i in t + 1..m {
                if a[i][c].is_zero() {
                    continue;
                }
                let q = a[i][c].div_floor(&a[t][c]);
                for j in 0..ncols {
                    let x = &a[t][j] * &q;
                    a[i][j] -= x;
                }
                if !a[i][c].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if a[t][c].is_zero() {
            continue;
        }
        if a[t][c].is_negative() {
            for x in a[t].iter_mut() {
                *x = -&*x;
            }
        }
        for i in 0..t {
            let q = a[i][c].div_floor(&a[t][c]);
            if q.is_zero() {
                continue;
            }
            for j in 0..ncols {
                let x = &a[t][j] * &q;
                a[i][j] -= x;
            }
        }
        t += 1;
    }
    a.truncate(t);
    a
}

/// Basis (Hermite form) of the saturation `(span_ℚ rows) ∩ ℤⁿ`.
pub fn saturate_rows(rows: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    if rows.is_empty() {
        return Vec::new();
    }
    let s = smith(&IntMatrix::from_rows(rows));
    let r = s.rank();
    let basis: Vec<Vec<BigInt>> = (0..r).map(|i| s.v_inv.row(i).to_vec()).collect();
    hermite_rows(&basis)
}

/// Basis (Hermite form) of the integer kernel `{x ∈ ℤⁿ : a·x = 0}`.
pub fn integer_kernel(a: &IntMatrix) -> Vec<Vec<BigInt>> {
    let s = smith(a);
    let r = s.rank();
    let basis: Vec<Vec<BigInt>> = (r..a.ncols())
        .map(|j| (0..a.ncols()).map(|i| s.v[(i, j)].clone()).collect())
        .collect();
    hermite_rows(&basis)
}

/// `true` when every invariant factor of the row lattice is 1.
pub fn is_saturated(rows: &[Vec<BigInt>]) -> bool {
    if rows.is_empty() {
        return true;
    }
    smith(&IntMatrix::from_rows(rows))
        .invariant_factors()
        .iter()
        .all(|d| d.is_one())
}
