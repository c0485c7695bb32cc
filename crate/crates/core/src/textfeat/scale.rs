use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn check_matrix(x: &[Vec<f64>]) -> Result<usize> {
    let d = x
        .first()
        .map(Vec::len)
        .ok_or_else(|| Error::validation("cannot fit on zero rows"))?;
    if let Some(i) = x.iter().position(|r| r.len() != d) {
        return Err(Error::validation(format!(
            "row {i} has {} columns, expected {d}",
            x[i].len()
        )));
    }
    Ok(d)
}

fn check_row(row: &[f64], d: usize) -> Result<()> {
    if row.len() != d {
        return Err(Error::validation(format!(
            "row has {} columns, scaler expects {d}",
            row.len()
        )));
    }
    Ok(())
}

/// Per-column min-max map onto `[0, π]`, for angle encoding.
///
/// Values outside the fitted range clamp to the ends; a constant column maps to π/2.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinMaxScaler {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

impl MinMaxScaler {
    pub fn fit(x: &[Vec<f64>]) -> Result<Self> {
        let d = check_matrix(x)?;
        let mut min = vec![f64::INFINITY; d];
        let mut max = vec![f64::NEG_INFINITY; d];
        for row in x {
            for j in 0..d {
                min[j] = min[j].min(row[j]);
                max[j] = max[j].max(row[j]);
            }
        }
        Ok(MinMaxScaler { min, max })
    }

    pub fn transform_row(&self, row: &[f64]) -> Result<Vec<f64>> {
        check_row(row, self.min.len())?;
        Ok(row
            .iter()
            .zip(self.min.iter().zip(&self.max))
            .map(|(&v, (&lo, &hi))| {
                if hi > lo {
                    ((v - lo) / (hi - lo)).clamp(0.0, 1.0) * PI
                } else {
                    PI / 2.0
                }
            })
            .collect())
    }

    pub fn transform(&self, x: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
        x.iter().map(|r| self.transform_row(r)).collect()
    }
}

/// Zero mean, unit sample standard deviation per column. Constant columns
/// are only centered.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub mean: Vec<f64>,
    pub scale: Vec<f64>,
}

impl Standardizer {
    pub fn fit(x: &[Vec<f64>]) -> Result<Self> {
        let d = check_matrix(x)?;
        let m = x.len() as f64;
        let mean: Vec<f64> = (0..d).map(|j| x.iter().map(|r| r[j]).sum::<f64>() / m).collect();
        let scale = (0..d)
            .map(|j| {
                let ss: f64 = x.iter().map(|r| (r[j] - mean[j]).powi(2)).sum();
                let sd = if x.len() > 1 { (ss / (m - 1.0)).sqrt() } else { 0.0 };
                if sd > 0.0 {
                    sd
                } else {
                    1.0
                }
            })
            .collect();
        Ok(Standardizer { mean, scale })
    }

    pub fn transform_row(&self, row: &[f64]) -> Result<Vec<f64>> {
        check_row(row, self.mean.len())?;
        Ok(row
            .iter()
            .zip(self.mean.iter().zip(&self.scale))
            .map(|(v, (mu, s))| (v - mu) / s)
            .collect())
    }

    pub fn transform(&self, x: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
        x.iter().map(|r| self.transform_row(r)).collect()
    }
}
