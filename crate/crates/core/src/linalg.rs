//! Dense LU factorization with partial pivoting.
//!
//! Systems in this crate are at most a few hundred unknowns (one per grid
//! node or observation), so a straightforward O(n³) row-major factorization
//! is all that is needed. The factorization keeps a copy of the original
//! matrix so every solve can apply one step of iterative refinement.

use crate::error::{Error, Result};

/// Square matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    n: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Matrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Matrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.data[i * n + j] = f(i, j);
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    pub fn add_diagonal(&mut self, v: f64) {
        for i in 0..self.n {
            self.data[i * self.n + i] += v;
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        self.data
            .chunks_exact(self.n)
            .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }
}

/// PA = LU with unit-lower L and upper U packed into one buffer.
#[derive(Debug, Clone)]
pub struct LuFactorization {
    original: Matrix,
    lu: Matrix,
    perm: Vec<usize>,
    condition: f64,
}

impl LuFactorization {
    /// Factorizes `a`. `context` names the system in the singular-matrix error.
    ///
    /// A pivot whose magnitude falls below `n · ε · max|a_ij|` is treated as
    /// zero and reported as [`Error::SingularSystem`].
    pub fn new(a: Matrix, context: &'static str) -> Result<Self> {
        let n = a.n;
        let scale = a.max_abs();
        let threshold = (n as f64) * f64::EPSILON * scale;
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut max_pivot = 0.0_f64;
        let mut min_pivot = f64::INFINITY;

        for k in 0..n {
            let (p, pivot_abs) = (k..n)
                .map(|i| (i, lu.get(i, k).abs()))
                .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            max_pivot = max_pivot.max(pivot_abs);
            min_pivot = min_pivot.min(pivot_abs);
            if pivot_abs <= threshold || scale == 0.0 {
                let condition = if pivot_abs > 0.0 {
                    max_pivot / pivot_abs
                } else {
                    f64::INFINITY
                };
                return Err(Error::SingularSystem { context, condition });
            }
            if p != k {
                for j in 0..n {
                    lu.data.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
            }
            let pivot = lu.get(k, k);
            for i in (k + 1)..n {
                let factor = lu.get(i, k) / pivot;
                lu.set(i, k, factor);
                if factor != 0.0 {
                    for j in (k + 1)..n {
                        let v = lu.get(i, j) - factor * lu.get(k, j);
                        lu.set(i, j, v);
                    }
                }
            }
        }

        Ok(LuFactorization {
            original: a,
            lu,
            perm,
            condition: if n == 0 { 1.0 } else { max_pivot / min_pivot },
        })
    }

    pub fn dim(&self) -> usize {
        self.lu.n
    }

    /// Ratio of largest to smallest pivot magnitude; a cheap lower-bound
    /// style indicator of conditioning, not the true 2-norm condition number.
    pub fn condition_indicator(&self) -> f64 {
        self.condition
    }

    fn solve_raw(&self, b: &[f64]) -> Vec<f64> {
        let n = self.lu.n;
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let mut s = x[i];
            for j in 0..i {
                s -= self.lu.get(i, j) * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in (i + 1)..n {
                s -= self.lu.get(i, j) * x[j];
            }
            x[i] = s / self.lu.get(i, i);
        }
        x
    }

    /// Solves `A x = b` followed by one step of iterative refinement.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        assert_eq!(b.len(), self.lu.n, "right-hand side length mismatch");
        let mut x = self.solve_raw(b);
        let ax = self.original.mul_vec(&x);
        let residual: Vec<f64> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
        let correction = self.solve_raw(&residual);
        for (xi, ci) in x.iter_mut().zip(correction) {
            *xi += ci;
        }
        x
    }
}
