#![allow(clippy::needless_range_loop)]

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Stop once the off-diagonal Frobenius norm falls to this.
pub const JACOBI_TOL: f64 = 1e-12;
const MAX_SWEEPS: usize = 100;

/// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
///
/// Returns `(eigenvalues, eigenvectors)` with `eigenvectors[k]` paired with
/// `eigenvalues[k]`, in no particular order. Sweeps stop at [`JACOBI_TOL`],
/// or earlier if a sweep no longer shrinks the off-diagonal mass.
pub fn jacobi_eigen(matrix: &[Vec<f64>]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = matrix.len();
    let mut a: Vec<Vec<f64>> = matrix.to_vec();
    let mut v: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    let off = |a: &[Vec<f64>]| -> f64 {
        let mut s = 0.0;
        for (i, row) in a.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                if i != j {
                    s += x * x;
                }
            }
        }
        s.sqrt()
    };

    let mut last = f64::INFINITY;
    for _ in 0..MAX_SWEEPS {
        let o = off(&a);
        if o <= JACOBI_TOL || o >= last {
            break;
        }
        last = o;
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p][q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for row in a.iter_mut() {
                    let (akp, akq) = (row[p], row[q]);
                    row[p] = c * akp - s * akq;
                    row[q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                a[p][q] = 0.0;
                a[q][p] = 0.0;
                for row in v.iter_mut() {
                    let (vkp, vkq) = (row[p], row[q]);
                    row[p] = c * vkp - s * vkq;
                    row[q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let values = (0..n).map(|i| a[i][i]).collect();
    let vectors = (0..n).map(|k| (0..n).map(|i| v[i][k]).collect()).collect();
    (values, vectors)
}

/// Principal axes of a centered data matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PcaModel {
    pub mean: Vec<f64>,
    /// `k × d`, orthonormal rows.
    pub components: Vec<Vec<f64>>,
    /// Eigenvalues of the kept components, non-increasing.
    pub explained_variance: Vec<f64>,
    /// Trace of the covariance matrix.
    pub total_variance: f64,
}

/// Sample covariance `XcᵀXc / (m − 1)` of the column-centered data, and the means.
pub fn covariance(x: &[Vec<f64>]) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let m = x.len();
    if m < 2 {
        return Err(Error::validation("covariance needs at least two rows"));
    }
    let d = x[0].len();
    if let Some(i) = x.iter().position(|r| r.len() != d) {
        return Err(Error::validation(format!(
            "row {i} has {} columns, expected {d}",
            x[i].len()
        )));
    }
    if x.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::validation("non-finite entry in data matrix"));
    }
    let mean: Vec<f64> = (0..d).map(|j| x.iter().map(|r| r[j]).sum::<f64>() / m as f64).collect();
    let mut cov = vec![vec![0.0; d]; d];
    for row in x {
        let c: Vec<f64> = row.iter().zip(&mean).map(|(v, mu)| v - mu).collect();
        for i in 0..d {
            for j in i..d {
                cov[i][j] += c[i] * c[j];
            }
        }
    }
    for i in 0..d {
        for j in i..d {
            cov[i][j] /= (m - 1) as f64;
            cov[j][i] = cov[i][j];
        }
    }
    Ok((mean, cov))
}

/// Keeps the top `k` eigenvectors of the covariance. Each component is
/// signed so that its largest-magnitude entry is positive.
pub fn pca_fit(x: &[Vec<f64>], k: usize) -> Result<PcaModel> {
    if k == 0 {
        return Err(Error::validation("PCA needs at least one component"));
    }
    if x.len() <= k {
        return Err(Error::validation(format!(
            "PCA with {k} components needs more than {k} rows, got {}",
            x.len()
        )));
    }
    let (mean, cov) = covariance(x)?;
    let d = mean.len();
    if k > d {
        return Err(Error::validation(format!("{k} components requested from {d} columns")));
    }
    let total_variance = (0..d).map(|i| cov[i][i]).sum();
    let (values, vectors) = jacobi_eigen(&cov);
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    let mut components = Vec::with_capacity(k);
    let mut explained_variance = Vec::with_capacity(k);
    for &i in order.iter().take(k) {
        let mut comp = vectors[i].clone();
        let lead = comp
            .iter()
            .enumerate()
            .fold(0, |best, (j, v)| if v.abs() > comp[best].abs() { j } else { best });
        if comp[lead] < 0.0 {
            comp.iter_mut().for_each(|v| *v = -*v);
        }
        components.push(comp);
        explained_variance.push(values[i]);
    }
    Ok(PcaModel {
        mean,
        components,
        explained_variance,
        total_variance,
    })
}

impl PcaModel {
    pub fn num_components(&self) -> usize {
        self.components.len()
    }

    pub fn explained_variance_ratio(&self) -> Vec<f64> {
        self.explained_variance
            .iter()
            .map(|v| {
                if self.total_variance > 0.0 {
                    v / self.total_variance
                } else {
                    0.0
                }
            })
            .collect()
    }

    pub fn transform_row(&self, row: &[f64]) -> Result<Vec<f64>> {
        if row.len() != self.mean.len() {
            return Err(Error::validation(format!(
                "row has {} columns, PCA was fitted on {}",
                row.len(),
                self.mean.len()
            )));
        }
        Ok(self
            .components
            .iter()
            .map(|c| c.iter().zip(row).zip(&self.mean).map(|((w, v), mu)| w * (v - mu)).sum())
            .collect())
    }

    /// `(X − mean)·componentsᵀ`.
    pub fn transform(&self, x: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
        x.iter().map(|r| self.transform_row(r)).collect()
    }

    /// `Z·components + mean`; exact only when all components are kept.
    pub fn inverse_transform(&self, z: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
        z.iter()
            .map(|r| {
                if r.len() != self.num_components() {
                    return Err(Error::validation(format!(
                        "row has {} scores for {} components",
                        r.len(),
                        self.num_components()
                    )));
                }
                let mut out = self.mean.clone();
                for (score, comp) in r.iter().zip(&self.components) {
                    for (o, w) in out.iter_mut().zip(comp) {
                        *o += score * w;
                    }
                }
                Ok(out)
            })
            .collect()
    }
}
