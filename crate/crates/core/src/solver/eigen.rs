//! Generalized symmetric eigensolvers.
//!
//! The core routine finds the largest eigenvalues `mu` of `T v = mu S v`
//! with `S` symmetric positive definite and `T` symmetric, through the
//! standard form `C = L^-1 T L^-T` (`S = L L^T`). Vibration uses `T = M`,
//! `S = K + K_R` (so `omega^2 = 1 / mu`); buckling uses `T = K_G`.
//!
//! Large problems use Lanczos with full reorthogonalization. Converged
//! vectors are locked and the iteration restarted orthogonally to them
//! until no new eigenvalue enters the wanted set, which also recovers
//! multiple eigenvalues. Small problems use a dense decomposition.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::band::{BandCholesky, BandMatrix};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenOptions {
    /// Problems with fewer dofs than this use the dense path.
    pub dense_below: usize,
    /// Relative Ritz-residual target for Lanczos convergence.
    pub lanczos_tolerance: f64,
    /// Largest Krylov dimension of a single Lanczos run.
    pub max_krylov: usize,
    /// Seed of the start vectors.
    pub seed: u64,
}

impl Default for EigenOptions {
    fn default() -> Self {
        Self {
            dense_below: 600,
            lanczos_tolerance: 1e-11,
            max_krylov: 400,
            seed: 0x5eed,
        }
    }
}

/// Eigenpairs in the requested order with vectors normalized to `v^T S v = 1`.
#[derive(Debug, Clone)]
pub struct EigenPairs {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
}

/// Largest `count` eigenvalues of `T v = mu S v`, in descending order.
pub fn largest_pencil(
    t: &BandMatrix,
    s: &BandMatrix,
    count: usize,
    opts: &EigenOptions,
) -> Result<EigenPairs> {
    let chol = s.cholesky()?;
    largest_pencil_factored(t, &chol, count, opts)
}

pub fn largest_pencil_factored(
    t: &BandMatrix,
    chol: &BandCholesky,
    count: usize,
    opts: &EigenOptions,
) -> Result<EigenPairs> {
    let n = chol.dim();
    let count = count.min(n);
    if count == 0 {
        return Ok(EigenPairs {
            values: Vec::new(),
            vectors: Vec::new(),
        });
    }
    let (values, ys) = if n < opts.dense_below {
        dense_standard(t, chol, count)
    } else {
        lanczos_standard(t, chol, count, opts)?
    };
    let vectors = ys
        .into_iter()
        .map(|mut y| {
            chol.backward(&mut y);
            y
        })
        .collect();
    Ok(EigenPairs { values, vectors })
}

/// Smallest `count` eigenvalues of `A v = lambda B v` (`A` symmetric, `B`
/// SPD), ascending. A shift `sigma` below the spectrum (found by trying
/// Cholesky of `A - sigma B`) turns them into the largest eigenvalues of
/// `B v = nu (A - sigma B) v`, `lambda = sigma + 1 / nu`.
pub fn generalized_symmetric_eig(
    a: &BandMatrix,
    b: &BandMatrix,
    count: usize,
    opts: &EigenOptions,
) -> Result<EigenPairs> {
    let (sigma, chol) = shift_below_spectrum(a, b)?;
    let pairs = largest_pencil_factored(b, &chol, count, opts)?;
    let mut values = Vec::with_capacity(pairs.values.len());
    let mut vectors = Vec::with_capacity(pairs.values.len());
    for (nu, v) in pairs.values.into_iter().zip(pairs.vectors) {
        if nu > 0.0 {
            values.push(sigma + 1.0 / nu);
            vectors.push(v);
        }
    }
    Ok(EigenPairs { values, vectors })
}

fn shift_below_spectrum(a: &BandMatrix, b: &BandMatrix) -> Result<(f64, BandCholesky)> {
    if let Ok(c) = a.cholesky() {
        return Ok((0.0, c));
    }
    let scale = a.max_abs() / b.max_abs().max(f64::MIN_POSITIVE);
    let mut s = 1e-10 * scale;
    for _ in 0..40 {
        if let Ok(c) = a.add_scaled(b, s).cholesky() {
            return Ok((-s, c));
        }
        s *= 4.0;
    }
    Err(Error::SingularSystem(
        "no shift makes the pencil positive definite".into(),
    ))
}

fn apply_operator(t: &BandMatrix, chol: &BandCholesky, x: &[f64]) -> Vec<f64> {
    let mut y = x.to_vec();
    chol.backward(&mut y);
    let mut z = t.mul_vec(&y);
    chol.forward(&mut z);
    z
}

fn dense_standard(t: &BandMatrix, chol: &BandCholesky, count: usize) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = chol.dim();
    let mut c = DMatrix::<f64>::zeros(n, n);
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        let col = apply_operator(t, chol, &e);
        c.column_mut(j).copy_from_slice(&col);
    }
    let c = (&c + c.transpose()) * 0.5;
    let eig = SymmetricEigen::new(c);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let values = order[..count].iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = order[..count]
        .iter()
        .map(|&i| eig.eigenvectors.column(i).iter().copied().collect())
        .collect();
    (values, vectors)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(y: &mut [f64], a: f64, x: &[f64]) {
    y.iter_mut().zip(x).for_each(|(yi, xi)| *yi += a * xi);
}

fn orthogonalize(w: &mut [f64], basis: &[Vec<f64>]) {
    for _ in 0..2 {
        for q in basis {
            let c = dot(w, q);
            axpy(w, -c, q);
        }
    }
}

/// Random unit vector orthogonal to `basis`.
fn fresh_vector(rng: &mut ChaCha8Rng, n: usize, basis: &[Vec<f64>]) -> Option<Vec<f64>> {
    for _ in 0..5 {
        let mut v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        orthogonalize(&mut v, basis);
        let nv = dot(&v, &v).sqrt();
        if nv > 1e-8 {
            v.iter_mut().for_each(|x| *x /= nv);
            return Some(v);
        }
    }
    None
}

/// One Lanczos run orthogonal to `locked`, returning up to `count` largest
/// converged Ritz pairs.
fn lanczos_run(
    t: &BandMatrix,
    chol: &BandCholesky,
    count: usize,
    locked: &[Vec<f64>],
    rng: &mut ChaCha8Rng,
    opts: &EigenOptions,
) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let n = chol.dim();
    let room = n - locked.len();
    let max_dim = opts.max_krylov.min(room);
    let Some(q0) = fresh_vector(rng, n, locked) else {
        return Ok((Vec::new(), Vec::new()));
    };
    let mut q: Vec<Vec<f64>> = vec![q0];
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let want = count.min(room);
    let mut check_at = (2 * want + 10).min(max_dim);
    loop {
        let j = q.len() - 1;
        let mut w = apply_operator(t, chol, &q[j]);
        let a = dot(&w, &q[j]);
        axpy(&mut w, -a, &q[j]);
        if j > 0 {
            axpy(&mut w, -beta[j - 1], &q[j - 1]);
        }
        orthogonalize(&mut w, locked);
        orthogonalize(&mut w, &q);
        alpha.push(a);
        let b = dot(&w, &w).sqrt();
        let dim = q.len();
        let scale = alpha.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(f64::MIN_POSITIVE);
        let exhausted = dim >= max_dim;
        let breakdown = b <= 1e-12 * scale;
        if dim >= check_at || exhausted || breakdown {
            let tri = DMatrix::from_fn(dim, dim, |r, c| {
                if r == c {
                    alpha[r]
                } else if r == c + 1 {
                    beta[c]
                } else if c == r + 1 {
                    beta[r]
                } else {
                    0.0
                }
            });
            let eig = SymmetricEigen::new(tri);
            let mut order: Vec<usize> = (0..dim).collect();
            order.sort_by(|&x, &y| eig.eigenvalues[y].total_cmp(&eig.eigenvalues[x]));
            let top = &order[..want.min(dim)];
            let theta_max = eig.eigenvalues.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            let converged = top.iter().all(|&i| {
                (b * eig.eigenvectors[(dim - 1, i)]).abs()
                    <= opts.lanczos_tolerance * theta_max.max(f64::MIN_POSITIVE)
            });
            if converged || breakdown || exhausted {
                if !converged && !breakdown && dim < room {
                    return Err(Error::NonConvergence(format!(
                        "Lanczos did not converge within {dim} vectors"
                    )));
                }
                let values = top.iter().map(|&i| eig.eigenvalues[i]).collect();
                let vectors = top
                    .iter()
                    .map(|&i| {
                        let mut y = vec![0.0; n];
                        for (k, qk) in q.iter().enumerate() {
                            axpy(&mut y, eig.eigenvectors[(k, i)], qk);
                        }
                        y
                    })
                    .collect();
                return Ok((values, vectors));
            }
            check_at = (dim + 10).min(max_dim);
        }
        beta.push(b);
        w.iter_mut().for_each(|x| *x /= b);
        q.push(w);
    }
}

fn lanczos_standard(
    t: &BandMatrix,
    chol: &BandCholesky,
    count: usize,
    opts: &EigenOptions,
) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let n = chol.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut values: Vec<f64> = Vec::new();
    let mut vectors: Vec<Vec<f64>> = Vec::new();
    loop {
        let (vals, vecs) = lanczos_run(t, chol, count, &vectors, &mut rng, opts)?;
        let kth = if values.len() >= count {
            values[count - 1]
        } else {
            f64::NEG_INFINITY
        };
        let tol = 1e-9 * values.first().map_or(1.0, |v| v.abs());
        let mut added = false;
        for (v, y) in vals.into_iter().zip(vecs) {
            if v > kth + tol || values.len() < count {
                let mut y = y;
                orthogonalize(&mut y, &vectors);
                let ny = dot(&y, &y).sqrt();
                if ny < 1e-6 {
                    continue;
                }
                y.iter_mut().for_each(|x| *x /= ny);
                values.push(v);
                vectors.push(y);
                added = true;
            }
        }
        let mut order: Vec<usize> = (0..values.len()).collect();
        order.sort_by(|&i, &j| values[j].total_cmp(&values[i]));
        values = order.iter().map(|&i| values[i]).collect();
        vectors = order.iter().map(|&i| vectors[i].clone()).collect();
        if !added || vectors.len() >= n {
            break;
        }
    }
    values.truncate(count);
    vectors.truncate(count);
    Ok((values, vectors))
}

/// `|T v - mu S v| / (|mu| |S v|)`, or `|T v| / |S v|` when `mu = 0`.
pub fn pencil_residual(t: &BandMatrix, s: &BandMatrix, mu: f64, v: &[f64]) -> f64 {
    let tv = t.mul_vec(v);
    let sv = s.mul_vec(v);
    let r: Vec<f64> = tv.iter().zip(&sv).map(|(a, b)| a - mu * b).collect();
    let denom = (mu.abs() * dot(&sv, &sv).sqrt()).max(f64::MIN_POSITIVE);
    dot(&r, &r).sqrt() / denom
}

/// Dense generalized eigenvalues of `(A, B)`, `B` SPD, for reference checks.
pub fn dense_generalized_eigenvalues(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Option<Vec<f64>> {
    let l = b.clone().cholesky()?.l();
    let x = l.solve_lower_triangular(a)?;
    let c = l.solve_lower_triangular(&x.transpose())?;
    let c = (&c + c.transpose()) * 0.5;
    let mut v: Vec<f64> = SymmetricEigen::new(c).eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    Some(v)
}
