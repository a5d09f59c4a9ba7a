//! Dense exact rational matrices.  Everything here is small (ranks <= a few
//! dozen), so a simple row-major Vec is the right representation.

use std::fmt;

use num::{BigInt, One, Signed, Zero};

use crate::scalar::{Int, Rat};

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<Rat>,
}

impl Mat {
    pub fn zero(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![Rat::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zero(n, n);
        for i in 0..n {
            m.set(i, i, Rat::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Self {
        let r = rows.len();
        let c = rows.first().map(|x| x.len()).unwrap_or(0);
        assert!(rows.iter().all(|x| x.len() == c), "ragged rows");
        Mat {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_int_rows(rows: &[&[i64]]) -> Self {
        Mat::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&n| Rat::from(Int::from(n))).collect())
                .collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Rat {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rat) {
        self.data[i * self.cols + j] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn add(&self, other: &Mat) -> Mat {
        assert_eq!(
            (self.rows, self.cols),
            (other.rows, other.cols),
            "matrix shape mismatch"
        );
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + b)
            .collect();
        Mat {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn neg(&self) -> Mat {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| -a).collect(),
        }
    }

    pub fn sub(&self, other: &Mat) -> Mat {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Rat) -> Mat {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a * c).collect(),
        }
    }

    pub fn mul(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.rows, "matrix shape mismatch in product");
        let mut out = Mat::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let v = out.get(i, j) + a * b;
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    /// Writes `block` into self with upper-left corner at (r0, c0).
    pub fn insert_block(&mut self, r0: usize, c0: usize, block: &Mat) {
        assert!(r0 + block.rows <= self.rows && c0 + block.cols <= self.cols);
        for i in 0..block.rows {
            for j in 0..block.cols {
                self.set(r0 + i, c0 + j, block.get(i, j).clone());
            }
        }
    }

    pub fn sub_block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Mat {
        assert!(r0 + rows <= self.rows && c0 + cols <= self.cols);
        let mut out = Mat::zero(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                out.set(i, j, self.get(r0 + i, c0 + j).clone());
            }
        }
        out
    }

    /// Exact inverse by Gauss-Jordan; None for singular or non-square input.
    pub fn inverse(&self) -> Option<Mat> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Mat::identity(n);
        for col in 0..n {
            let pivot = (col..n).find(|&r| !a.get(r, col).is_zero())?;
            if pivot != col {
                for j in 0..n {
                    let (x, y) = (a.get(pivot, j).clone(), a.get(col, j).clone());
                    a.set(pivot, j, y);
                    a.set(col, j, x);
                    let (x, y) = (inv.get(pivot, j).clone(), inv.get(col, j).clone());
                    inv.set(pivot, j, y);
                    inv.set(col, j, x);
                }
            }
            let p = a.get(col, col).clone();
            for j in 0..n {
                a.set(col, j, a.get(col, j) / &p);
                inv.set(col, j, inv.get(col, j) / &p);
            }
            for r in 0..n {
                if r == col || a.get(r, col).is_zero() {
                    continue;
                }
                let f = a.get(r, col).clone();
                for j in 0..n {
                    let v = a.get(r, j) - &f * a.get(col, j);
                    a.set(r, j, v);
                    let v = inv.get(r, j) - &f * inv.get(col, j);
                    inv.set(r, j, v);
                }
            }
        }
        Some(inv)
    }

    /// Rank by fraction-free (Bareiss) elimination over the integers, after
    /// clearing denominators row by row.
    pub fn rank(&self) -> usize {
        if self.rows == 0 || self.cols == 0 {
            return 0;
        }
        let mut m: Vec<Vec<BigInt>> = Vec::with_capacity(self.rows);
        for i in 0..self.rows {
            let mut lcm = BigInt::one();
            for j in 0..self.cols {
                let d = self.get(i, j).denom();
                lcm = num::integer::lcm(lcm, d.abs());
            }
            m.push(
                (0..self.cols)
                    .map(|j| {
                        let e = self.get(i, j);
                        e.numer() * (&lcm / e.denom())
                    })
                    .collect(),
            );
        }
        let (rows, cols) = (self.rows, self.cols);
        let mut rank = 0;
        let mut prev = BigInt::one();
        for col in 0..cols {
            let Some(pivot) = (rank..rows).find(|&r| !m[r][col].is_zero()) else {
                continue;
            };
            m.swap(rank, pivot);
            for r in rank + 1..rows {
                for c in col + 1..cols {
                    let v = (&m[rank][col] * &m[r][c] - &m[r][col] * &m[rank][c]) / &prev;
                    m[r][c] = v;
                }
                m[r][col] = BigInt::zero();
            }
            prev = m[rank][col].clone();
            rank += 1;
            if rank == rows {
                break;
            }
        }
        rank
    }
}

impl fmt::Display for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}
