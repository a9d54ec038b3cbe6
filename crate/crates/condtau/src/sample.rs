use crate::error::{Error, Result};

/// An i.i.d. dataset of observations (x1, x2, z) with z in R^p.
///
/// Stored column-wise; the covariate columns are flattened row-major,
/// so observation `i` has covariates `z[i*p .. (i+1)*p]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    x1: Vec<f64>,
    x2: Vec<f64>,
    z: Vec<f64>,
    p: usize,
}

impl Sample {
    pub fn new(x1: Vec<f64>, x2: Vec<f64>, z: Vec<f64>, p: usize) -> Result<Self> {
        if p == 0 {
            return Err(Error::InvalidArgument("covariate dimension p must be >= 1".into()));
        }
        let n = x1.len();
        if x2.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: x2.len() });
        }
        if z.len() != n * p {
            return Err(Error::DimensionMismatch { expected: n * p, got: z.len() });
        }
        if n < 2 {
            return Err(Error::SampleTooSmall { need: 2, got: n });
        }
        Ok(Sample { x1, x2, z, p })
    }

    /// Convenience constructor for a univariate covariate.
    pub fn univariate(x1: Vec<f64>, x2: Vec<f64>, z: Vec<f64>) -> Result<Self> {
        Sample::new(x1, x2, z, 1)
    }

    pub fn len(&self) -> usize {
        self.x1.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x1.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.p
    }

    pub fn x1(&self) -> &[f64] {
        &self.x1
    }

    pub fn x2(&self) -> &[f64] {
        &self.x2
    }

    pub fn x(&self, i: usize) -> (f64, f64) {
        (self.x1[i], self.x2[i])
    }

    /// Covariate vector of observation `i`.
    pub fn z(&self, i: usize) -> &[f64] {
        &self.z[i * self.p..(i + 1) * self.p]
    }

    pub fn z_flat(&self) -> &[f64] {
        &self.z
    }

    /// Sup-norm distance between the covariates of observations `i` and `j`.
    pub fn z_dist_inf(&self, i: usize, j: usize) -> f64 {
        self.z(i)
            .iter()
            .zip(self.z(j))
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Componentwise midpoint of the covariates of observations `i` and `j`.
    pub fn z_midpoint(&self, i: usize, j: usize) -> Vec<f64> {
        self.z(i)
            .iter()
            .zip(self.z(j))
            .map(|(a, b)| (a + b) / 2.0)
            .collect()
    }

    /// Sample standard deviation (denominator n-1) of covariate coordinate `coord`.
    pub fn z_std(&self, coord: usize) -> f64 {
        let n = self.len();
        let mean = (0..n).map(|i| self.z(i)[coord]).sum::<f64>() / n as f64;
        let ss = (0..n).map(|i| (self.z(i)[coord] - mean).powi(2)).sum::<f64>();
        (ss / (n - 1) as f64).sqrt()
    }

    /// New sample keeping only the listed rows, in order.
    pub fn subset(&self, rows: &[usize]) -> Result<Sample> {
        let x1 = rows.iter().map(|&i| self.x1[i]).collect();
        let x2 = rows.iter().map(|&i| self.x2[i]).collect();
        let mut z = Vec::with_capacity(rows.len() * self.p);
        for &i in rows {
            z.extend_from_slice(self.z(i));
        }
        Sample::new(x1, x2, z, self.p)
    }
}
