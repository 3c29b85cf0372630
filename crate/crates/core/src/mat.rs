//! Dense integer matrices and Smith normal form with transforms.
//!
//! Entries are arbitrary-precision; intermediate coefficient growth during
//! elimination is absorbed rather than worked around with modular tricks.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

#[derive(Clone, PartialEq, Eq)]
pub struct IntMat {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMat {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMat::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> BigInt) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        IntMat { rows, cols, data }
    }

    /// Build from row slices of machine integers. Panics on ragged input.
    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        IntMat::from_fn(r, c, |i, j| {
            assert_eq!(rows[i].len(), c, "ragged rows");
            BigInt::from(rows[i][j])
        })
    }

    pub fn from_big_rows(rows: &[Vec<BigInt>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        IntMat::from_fn(r, c, |i, j| {
            assert_eq!(rows[i].len(), c, "ragged rows");
            rows[i][j].clone()
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.data[i * self.cols + j] = v;
    }

    pub fn col(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn row(&self, i: usize) -> Vec<BigInt> {
        (0..self.cols).map(|j| self.get(i, j).clone()).collect()
    }

    pub fn transpose(&self) -> IntMat {
        IntMat::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn mul(&self, rhs: &IntMat) -> IntMat {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch in mul");
        IntMat::from_fn(self.rows, rhs.cols, |i, j| {
            let mut acc = BigInt::zero();
            for k in 0..self.cols {
                if !self.get(i, k).is_zero() && !rhs.get(k, j).is_zero() {
                    acc += self.get(i, k) * rhs.get(k, j);
                }
            }
            acc
        })
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.cols, v.len(), "dimension mismatch in mul_vec");
        (0..self.rows)
            .map(|i| {
                let mut acc = BigInt::zero();
                for k in 0..self.cols {
                    if !self.get(i, k).is_zero() && !v[k].is_zero() {
                        acc += self.get(i, k) * &v[k];
                    }
                }
                acc
            })
            .collect()
    }

    pub fn add(&self, rhs: &IntMat) -> IntMat {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        IntMat::from_fn(self.rows, self.cols, |i, j| self.get(i, j) + rhs.get(i, j))
    }

    pub fn neg(&self) -> IntMat {
        IntMat::from_fn(self.rows, self.cols, |i, j| -self.get(i, j))
    }

    pub fn scale(&self, c: &BigInt) -> IntMat {
        IntMat::from_fn(self.rows, self.cols, |i, j| self.get(i, j) * c)
    }

    /// Columns of `self` followed by columns of `rhs`.
    pub fn hstack(&self, rhs: &IntMat) -> IntMat {
        assert_eq!(self.rows, rhs.rows, "row mismatch in hstack");
        IntMat::from_fn(self.rows, self.cols + rhs.cols, |i, j| {
            if j < self.cols {
                self.get(i, j).clone()
            } else {
                rhs.get(i, j - self.cols).clone()
            }
        })
    }

    pub fn vstack(&self, rhs: &IntMat) -> IntMat {
        assert_eq!(self.cols, rhs.cols, "col mismatch in vstack");
        IntMat::from_fn(self.rows + rhs.rows, self.cols, |i, j| {
            if i < self.rows {
                self.get(i, j).clone()
            } else {
                rhs.get(i - self.rows, j).clone()
            }
        })
    }

    pub fn take_rows(&self, n: usize) -> IntMat {
        IntMat::from_fn(n, self.cols, |i, j| self.get(i, j).clone())
    }

    pub fn take_cols(&self, n: usize) -> IntMat {
        IntMat::from_fn(self.rows, n, |i, j| self.get(i, j).clone())
    }

    pub fn select_rows(&self, idx: &[usize]) -> IntMat {
        IntMat::from_fn(idx.len(), self.cols, |i, j| self.get(idx[i], j).clone())
    }

    pub fn select_cols(&self, idx: &[usize]) -> IntMat {
        IntMat::from_fn(self.rows, idx.len(), |i, j| self.get(i, idx[j]).clone())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -self.get(i, j).clone();
            self.set(i, j, v);
        }
    }

    /// row[i] += c * row[k]
    fn add_row_mul(&mut self, i: usize, k: usize, c: &BigInt) {
        if c.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let v = self.get(i, j) + c * self.get(k, j);
            self.set(i, j, v);
        }
    }

    /// col[j] += c * col[k]
    fn add_col_mul(&mut self, j: usize, k: usize, c: &BigInt) {
        if c.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let v = self.get(i, j) + c * self.get(i, k);
            self.set(i, j, v);
        }
    }
}

impl std::fmt::Debug for IntMat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "[{}x{}]", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Smith normal form `d = left * a * right` with all four transforms kept,
/// so cokernel coordinates can be moved both ways without re-inverting.
pub struct Smith {
    pub d: IntMat,
    pub left: IntMat,
    pub left_inv: IntMat,
    pub right: IntMat,
    pub right_inv: IntMat,
    pub rank: usize,
}

pub fn smith(a: &IntMat) -> Smith {
    let rows = a.rows();
    let cols = a.cols();
    let mut d = a.clone();
    let mut left = IntMat::identity(rows);
    let mut left_inv = IntMat::identity(rows);
    let mut right = IntMat::identity(cols);
    let mut right_inv = IntMat::identity(cols);

    let n = rows.min(cols);
    let mut t = 0;
    while t < n {
        // Smallest nonzero entry of the trailing block becomes the pivot.
        let mut pivot: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if !d.get(i, j).is_zero()
                    && pivot.map_or(true, |(pi, pj)| d.get(i, j).abs() < d.get(pi, pj).abs())
                {
                    pivot = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = pivot else { break };
        d.swap_rows(t, pi);
        left.swap_rows(t, pi);
        left_inv.swap_cols(t, pi);
        d.swap_cols(t, pj);
        right.swap_cols(t, pj);
        right_inv.swap_rows(t, pj);

        loop {
            let mut clean = true;
            for i in t + 1..rows {
                if !d.get(i, t).is_zero() {
                    let q = floor_div(d.get(i, t), d.get(t, t));
                    if !q.is_zero() {
                        let c = -q;
                        d.add_row_mul(i, t, &c);
                        left.add_row_mul(i, t, &c);
                        left_inv.add_col_mul(t, i, &(-&c));
                    }
                    if !d.get(i, t).is_zero() {
                        clean = false;
                    }
                }
            }
            for j in t + 1..cols {
                if !d.get(t, j).is_zero() {
                    let q = floor_div(d.get(t, j), d.get(t, t));
                    if !q.is_zero() {
                        let c = -q;
                        d.add_col_mul(j, t, &c);
                        right.add_col_mul(j, t, &c);
                        right_inv.add_row_mul(t, j, &(-&c));
                    }
                    if !d.get(t, j).is_zero() {
                        clean = false;
                    }
                }
            }
            if !clean {
                // Remainders smaller than the pivot are left in row/column t;
                // move the smallest back to the pivot slot and repeat.
                let mut best: Option<(usize, usize)> = None;
                for i in t..rows {
                    for j in t..cols {
                        if (i == t || j == t)
                            && !d.get(i, j).is_zero()
                            && best.map_or(true, |(bi, bj)| {
                                d.get(i, j).abs() < d.get(bi, bj).abs()
                            })
                        {
                            best = Some((i, j));
                        }
                    }
                }
                let (bi, bj) = best.expect("nonzero remainder exists");
                d.swap_rows(t, bi);
                left.swap_rows(t, bi);
                left_inv.swap_cols(t, bi);
                d.swap_cols(t, bj);
                right.swap_cols(t, bj);
                right_inv.swap_rows(t, bj);
                continue;
            }
            // Pivot divides its row and column; enforce divisibility of the
            // trailing block so the diagonal comes out as a chain.
            let mut fixed = true;
            'scan: for i in t + 1..rows {
                for j in t + 1..cols {
                    if !(d.get(i, j) % d.get(t, t)).is_zero() {
                        let one = BigInt::one();
                        d.add_row_mul(t, i, &one);
                        left.add_row_mul(t, i, &one);
                        left_inv.add_col_mul(i, t, &(-&one));
                        fixed = false;
                        break 'scan;
                    }
                }
            }
            if fixed {
                break;
            }
        }
        if d.get(t, t).is_negative() {
            d.negate_row(t);
            left.negate_row(t);
            // Inverse of a row negation is itself, applied as a column op.
            for i in 0..rows {
                let v = -left_inv.get(i, t).clone();
                left_inv.set(i, t, v);
            }
        }
        t += 1;
    }

    let rank = (0..n).take_while(|&i| !d.get(i, i).is_zero()).count();
    debug_assert_eq!(left.mul(a).mul(&right), d, "transform identity violated");
    debug_assert_eq!(left.mul(&left_inv), IntMat::identity(rows));
    debug_assert_eq!(right.mul(&right_inv), IntMat::identity(cols));
    Smith {
        d,
        left,
        left_inv,
        right,
        right_inv,
        rank,
    }
}

fn floor_div(a: &BigInt, b: &BigInt) -> BigInt {
    // Quotient with remainder of minimal absolute value, so elimination
    // shrinks entries as fast as plain Euclid.
    let (q, r) = num_integer::Integer::div_rem(a, b);
    let half = b.abs();
    if r.abs() * 2 > half {
        if (r.sign() == b.sign()) || r.is_zero() {
            q + 1
        } else {
            q - 1
        }
    } else {
        q
    }
}

/// Basis of the integer kernel of `a`, one basis vector per column.
pub fn kernel(a: &IntMat) -> IntMat {
    let s = smith(a);
    let idx: Vec<usize> = (s.rank..a.cols()).collect();
    s.right.select_cols(&idx)
}

/// Some integer solution of `a x = b`, or None. Deterministic: the solution
/// with zero coordinates along the kernel directions of the Smith basis.
pub fn solve(a: &IntMat, b: &[BigInt]) -> Option<Vec<BigInt>> {
    assert_eq!(a.rows(), b.len(), "rhs length mismatch");
    let s = smith(a);
    let ub = s.left.mul_vec(b);
    let mut y = vec![BigInt::zero(); a.cols()];
    for (i, ub_i) in ub.iter().enumerate() {
        if i < s.rank {
            let d = s.d.get(i, i);
            let (q, r) = num_integer::Integer::div_rem(ub_i, d);
            if !r.is_zero() {
                return None;
            }
            y[i] = q;
        } else if !ub_i.is_zero() {
            return None;
        }
    }
    Some(s.right.mul_vec(&y))
}
