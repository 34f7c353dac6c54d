//! Symmetric banded storage and Cholesky factorization.
//!
//! Structured plate meshes numbered row by row have a half-bandwidth of
//! roughly `5 (nx + 2)`, so banded storage is both compact and cheap to
//! factor (`O(n b^2)`).

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Lower band of a symmetric matrix: row `i` stores columns `i - bw ..= i`.
#[derive(Debug, Clone, PartialEq)]
pub struct BandMatrix {
    n: usize,
    bw: usize,
    data: Vec<f64>,
}

impl BandMatrix {
    pub fn zeros(n: usize, bw: usize) -> Self {
        let bw = bw.min(n.saturating_sub(1));
        Self {
            n,
            bw,
            data: vec![0.0; n * (bw + 1)],
        }
    }

    pub fn from_dense(a: &DMatrix<f64>) -> Self {
        let n = a.nrows();
        let bw = (0..n)
            .flat_map(|i| (0..i).map(move |j| (i, j)))
            .filter(|&(i, j)| a[(i, j)] != 0.0 || a[(j, i)] != 0.0)
            .map(|(i, j)| i - j)
            .max()
            .unwrap_or(0);
        let mut m = Self::zeros(n, bw);
        for i in 0..n {
            for j in i.saturating_sub(bw)..=i {
                m.data[i * (m.bw + 1) + j + m.bw - i] = a[(i, j)];
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn half_bandwidth(&self) -> usize {
        self.bw
    }

    #[inline]
    fn slot(&self, i: usize, j: usize) -> Option<usize> {
        let (i, j) = if j > i { (j, i) } else { (i, j) };
        if i - j > self.bw {
            None
        } else {
            Some(i * (self.bw + 1) + j + self.bw - i)
        }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.slot(i, j).map_or(0.0, |s| self.data[s])
    }

    /// Adds `v` to entry `(i, j)` (and implicitly `(j, i)`).
    ///
    /// # Panics
    /// If `|i - j|` exceeds the half-bandwidth.
    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let s = self
            .slot(i, j)
            .unwrap_or_else(|| panic!("entry ({i}, {j}) outside half-bandwidth {}", self.bw));
        self.data[s] += v;
    }

    pub fn diagonal(&self, i: usize) -> f64 {
        self.data[i * (self.bw + 1) + self.bw]
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn scaled(&self, s: f64) -> BandMatrix {
        BandMatrix {
            n: self.n,
            bw: self.bw,
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }

    /// `self + s * other`; bandwidths may differ.
    pub fn add_scaled(&self, other: &BandMatrix, s: f64) -> BandMatrix {
        assert_eq!(self.n, other.n);
        let mut out = BandMatrix::zeros(self.n, self.bw.max(other.bw));
        for src in [(self, 1.0), (other, s)] {
            let (m, scale) = src;
            for i in 0..m.n {
                for j in i.saturating_sub(m.bw)..=i {
                    let v = m.data[i * (m.bw + 1) + j + m.bw - i];
                    if v != 0.0 {
                        out.add(i, j, scale * v);
                    }
                }
            }
        }
        out
    }

    /// Keep rows/columns flagged in `keep`, renumbered in order.
    pub fn restrict(&self, keep: &[bool]) -> BandMatrix {
        assert_eq!(keep.len(), self.n);
        let mut new_id = vec![usize::MAX; self.n];
        let mut count = 0;
        for (i, &k) in keep.iter().enumerate() {
            if k {
                new_id[i] = count;
                count += 1;
            }
        }
        let mut out = BandMatrix::zeros(count, self.bw);
        for i in 0..self.n {
            if !keep[i] {
                continue;
            }
            for j in i.saturating_sub(self.bw)..=i {
                if keep[j] {
                    let v = self.data[i * (self.bw + 1) + j + self.bw - i];
                    if v != 0.0 {
                        out.add(new_id[i], new_id[j], v);
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n);
        let mut y = vec![0.0; self.n];
        let w = self.bw + 1;
        for i in 0..self.n {
            let j0 = i.saturating_sub(self.bw);
            let row = &self.data[i * w + j0 + self.bw - i..(i + 1) * w];
            let mut acc = 0.0;
            for (k, &a) in row.iter().enumerate() {
                let j = j0 + k;
                acc += a * x[j];
                if j != i {
                    y[j] += a * x[i];
                }
            }
            y[i] += acc;
        }
        y
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |i, j| self.get(i, j))
    }

    /// Banded Cholesky `A = L L^T`. Fails on a pivot that is not positive
    /// relative to its diagonal entry.
    pub fn cholesky(&self) -> Result<BandCholesky> {
        let (n, bw) = (self.n, self.bw);
        let w = bw + 1;
        let mut l = self.data.clone();
        for i in 0..n {
            let j0 = i.saturating_sub(bw);
            for j in j0..=i {
                let k0 = j0.max(j.saturating_sub(bw));
                let mut sum = l[i * w + j + bw - i];
                let ri = i * w + bw - i;
                let rj = j * w + bw - j;
                for k in k0..j {
                    sum -= l[ri + k] * l[rj + k];
                }
                if j == i {
                    let diag = self.data[i * w + bw];
                    if !(sum > 1e-14 * diag.abs()) || !sum.is_finite() {
                        return Err(Error::SingularSystem(format!(
                            "non-positive pivot {sum:e} at row {i} (diagonal {diag:e})"
                        )));
                    }
                    l[i * w + bw] = sum.sqrt();
                } else {
                    l[i * w + j + bw - i] = sum / l[j * w + bw];
                }
            }
        }
        Ok(BandCholesky { n, bw, l })
    }
}

/// Lower-triangular banded Cholesky factor.
#[derive(Debug, Clone)]
pub struct BandCholesky {
    n: usize,
    bw: usize,
    l: Vec<f64>,
}

impl BandCholesky {
    pub fn dim(&self) -> usize {
        self.n
    }

    /// Solve `L y = b` in place.
    pub fn forward(&self, b: &mut [f64]) {
        let w = self.bw + 1;
        for i in 0..self.n {
            let j0 = i.saturating_sub(self.bw);
            let base = i * w + self.bw - i;
            let mut s = b[i];
            for k in j0..i {
                s -= self.l[base + k] * b[k];
            }
            b[i] = s / self.l[i * w + self.bw];
        }
    }

    /// Solve `L^T x = y` in place.
    pub fn backward(&self, y: &mut [f64]) {
        let w = self.bw + 1;
        for i in (0..self.n).rev() {
            y[i] /= self.l[i * w + self.bw];
            let xi = y[i];
            let j0 = i.saturating_sub(self.bw);
            let base = i * w + self.bw - i;
            for k in j0..i {
                y[k] -= self.l[base + k] * xi;
            }
        }
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        self.forward(&mut x);
        self.backward(&mut x);
        x
    }

    pub fn solve_vec(&self, b: &DVector<f64>) -> DVector<f64> {
        DVector::from_vec(self.solve(b.as_slice()))
    }
}
