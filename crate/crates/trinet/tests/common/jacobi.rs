//! Dense symmetric eigendecomposition by cyclic Jacobi rotations.
//! Serves as the independent oracle for the PCA projection.

/// Eigenvalues (descending) and matching eigenvectors (rows) of a
/// symmetric matrix.
pub fn eigen_symmetric(matrix: &[Vec<f64>]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = matrix.len();
    let mut a: Vec<Vec<f64>> = matrix.to_vec();
    let mut v = vec![vec![0.0; n]; n];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }

    for _sweep in 0..200 {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[p][q] * a[p][q];
            }
        }
        if off < 1e-24 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if a[p][q].abs() < 1e-30 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[k][p];
                    let vkq = v[k][q];
                    v[k][p] = c * vkp - s * vkq;
                    v[k][q] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[j][j].total_cmp(&a[i][i]));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| a[i][i]).collect();
    let eigenvectors: Vec<Vec<f64>> = order
        .iter()
        .map(|&col| (0..n).map(|row| v[row][col]).collect())
        .collect();
    (eigenvalues, eigenvectors)
}

/// Center columns, eigendecompose the covariance, and project onto the
/// top-k axes. Mirrors the PCA contract without sharing any code with it.
pub fn pca_reference(matrix: &[Vec<f64>], k: usize) -> (Vec<Vec<f64>>, Vec<f64>) {
    let n = matrix.len();
    let d = matrix[0].len();
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
    let mut cov = vec![vec![0.0; d]; d];
    for row in &centered {
        for i in 0..d {
            for j in 0..d {
                cov[i][j] += row[i] * row[j];
            }
        }
    }
    for row in &mut cov {
        for x in row.iter_mut() {
            *x /= (n - 1) as f64;
        }
    }
    let (eigenvalues, eigenvectors) = eigen_symmetric(&cov);
    let coords = centered
        .iter()
        .map(|row| {
            eigenvectors[..k]
                .iter()
                .map(|axis| row.iter().zip(axis).map(|(&x, &a)| x * a).sum())
                .collect()
        })
        .collect();
    (coords, eigenvalues[..k].to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonalizes_a_known_matrix() {
        // Eigenvalues of [[2,1],[1,2]] are 3 and 1.
        let m = vec![vec![2.0, 1.0], vec![1.0, 2.0]];
        let (vals, vecs) = eigen_symmetric(&m);
        assert!((vals[0] - 3.0).abs() < 1e-12);
        assert!((vals[1] - 1.0).abs() < 1e-12);
        // Eigenvector for 3 is (1,1)/sqrt(2) up to sign.
        let r = vecs[0][0] / vecs[0][1];
        assert!((r - 1.0).abs() < 1e-9);
    }
}
