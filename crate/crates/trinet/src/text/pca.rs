//! Principal component analysis for small matrices.
//!
//! Power iteration with deflation on the covariance matrix. The matrices
//! here are embedding tables (a few hundred rows by a few dozen columns),
//! so a dense O(d^2) iteration is plenty.

use crate::error::{Error, Result};
use crate::rng::seeded;
use crate::rng::std_normal;

const MAX_ITERS: usize = 200_000;
const CONVERGENCE_TOL: f64 = 1e-14;
/// Eigenvalues below this fraction of the total variance are treated as
/// zero; their components project to all-zero coordinates.
const RANK_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct PcaProjection {
    /// N x k row-major coordinates.
    pub coordinates: Vec<Vec<f64>>,
    /// Eigenvalues of the covariance matrix, descending.
    pub explained_variance: Vec<f64>,
    /// k x d principal axes (unit rows).
    pub components: Vec<Vec<f64>>,
}

/// Project the rows of `matrix` onto the top-`k` principal components.
///
/// Rows are centered first. Component signs are fixed so that each
/// component's largest-magnitude loading is positive. A zero-variance
/// input produces all-zero coordinates rather than an error.
pub fn pca_project(matrix: &[Vec<f64>], k: usize) -> Result<PcaProjection> {
    let n = matrix.len();
    if n < 2 {
        return Err(Error::Shape(format!("PCA needs >= 2 rows, got {n}")));
    }
    let d = matrix[0].len();
    if matrix.iter().any(|row| row.len() != d) {
        return Err(Error::Shape("PCA rows must all have the same length".to_string()));
    }
    if k > d {
        return Err(Error::Shape(format!("PCA k={k} exceeds input dimension {d}")));
    }

    // Center columns.
    let mut means = vec![0.0; d];
    for row in matrix {
        for (m, &x) in means.iter_mut().zip(row) {
            *m += x;
        }
    }
    for m in &mut means {
        *m /= n as f64;
    }
    let centered: Vec<Vec<f64>> = matrix
        .iter()
        .map(|row| row.iter().zip(&means).map(|(&x, &m)| x - m).collect())
        .collect();

    // Covariance (d x d), sample normalization.
    let mut cov = vec![vec![0.0; d]; d];
    for row in &centered {
        for i in 0..d {
            let xi = row[i];
            if xi == 0.0 {
                continue;
            }
            for j in 0..d {
                cov[i][j] += xi * row[j];
            }
        }
    }
    let denom = (n - 1) as f64;
    for row in &mut cov {
        for v in row.iter_mut() {
            *v /= denom;
        }
    }
    let total_scale: f64 = (0..d).map(|i| cov[i][i]).sum();

    let mut components: Vec<Vec<f64>> = Vec::with_capacity(k);
    let mut eigenvalues: Vec<f64> = Vec::with_capacity(k);
    let mut deflated = cov;
    for comp in 0..k {
        match dominant_eigenpair(&deflated, &components, comp, total_scale) {
            Some((lambda, v)) => {
                // Deflate before the sign fix; the outer product is
                // sign-invariant but keeping the order explicit.
                for i in 0..d {
                    for j in 0..d {
                        deflated[i][j] -= lambda * v[i] * v[j];
                    }
                }
                eigenvalues.push(lambda);
                components.push(fix_sign(v));
            }
            None => {
                // Remaining variance is numerically zero.
                eigenvalues.push(0.0);
                components.push(vec![0.0; d]);
            }
        }
    }

    let coordinates = centered
        .iter()
        .map(|row| {
            components
                .iter()
                .map(|axis| row.iter().zip(axis).map(|(&x, &a)| x * a).sum())
                .collect()
        })
        .collect();

    Ok(PcaProjection {
        coordinates,
        explained_variance: eigenvalues,
        components,
    })
}

/// Largest eigenpair of `m`, orthogonal to `previous`. Returns None when
/// the remaining spectrum is numerically zero.
fn dominant_eigenpair(
    m: &[Vec<f64>],
    previous: &[Vec<f64>],
    comp: usize,
    total_scale: f64,
) -> Option<(f64, Vec<f64>)> {
    let d = m.len();
    let mut rng = seeded(0x9ca_u64, comp as u64);
    let mut v: Vec<f64> = (0..d).map(|_| std_normal(&mut rng)).collect();
    orthogonalize(&mut v, previous);
    if normalize(&mut v) < 1e-12 {
        // Degenerate start; retry with a basis vector.
        v = vec![0.0; d];
        v[comp % d] = 1.0;
        orthogonalize(&mut v, previous);
        if normalize(&mut v) < 1e-12 {
            return None;
        }
    }

    for _ in 0..MAX_ITERS {
        let mut next = mat_vec(m, &v);
        orthogonalize(&mut next, previous);
        let norm = normalize(&mut next);
        if norm <= RANK_TOL * total_scale.max(1e-300) {
            return None;
        }
        let delta: f64 = next
            .iter()
            .zip(&v)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        v = next;
        if delta < CONVERGENCE_TOL {
            break;
        }
    }
    let lambda = dot(&v, &mat_vec(m, &v));
    if lambda <= RANK_TOL * total_scale.max(1e-300) {
        return None;
    }
    Some((lambda, v))
}

fn fix_sign(mut v: Vec<f64>) -> Vec<f64> {
    let mut best = 0usize;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() {
            best = i;
        }
    }
    if v[best] < 0.0 {
        for x in &mut v {
            *x = -*x;
        }
    }
    v
}

fn mat_vec(m: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    m.iter().map(|row| dot(row, v)).collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize(v: &mut [f64]) -> f64 {
    let norm = dot(v, v).sqrt();
    if norm > 0.0 {
        for x in v.iter_mut() {
            *x /= norm;
        }
    }
    norm
}

fn orthogonalize(v: &mut [f64], basis: &[Vec<f64>]) {
    for b in basis {
        let proj = dot(v, b);
        for (x, &bi) in v.iter_mut().zip(b) {
            *x -= proj * bi;
        }
    }
}
