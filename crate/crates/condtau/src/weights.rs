//! Nadaraya-Watson weights, the kernel density estimate of the covariate
//! and its Ktilde-smoothed variant used by the bound evaluators.

use crate::error::{Error, Result};
use crate::kernels::KernelSpec;
use crate::sample::Sample;

/// Normalized kernel weights at a query point, with s_n = sum of squares.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector {
    pub weights: Vec<f64>,
    pub s_n: f64,
    pub z: Vec<f64>,
    pub h: f64,
}

impl WeightVector {
    /// Number of strictly nonzero weights.
    pub fn n_effective(&self) -> usize {
        self.weights.iter().filter(|&&w| w != 0.0).count()
    }
}

/// Raw (unnormalized) kernel values K_h(Z_i - z) for every observation.
pub(crate) fn kernel_column(
    sample: &Sample,
    z: &[f64],
    spec: &KernelSpec,
    h: f64,
) -> Result<Vec<f64>> {
    if h <= 0.0 {
        return Err(Error::NonPositiveBandwidth(h));
    }
    if z.len() != sample.dim() || spec.p != sample.dim() {
        return Err(Error::DimensionMismatch { expected: sample.dim(), got: z.len() });
    }
    let n = sample.len();
    let mut col = Vec::with_capacity(n);
    if sample.dim() == 1 {
        let z0 = z[0];
        for &zi in sample.z_flat() {
            col.push(spec.scaled_eval1(h, zi - z0));
        }
    } else {
        let mut diff = vec![0.0; sample.dim()];
        for i in 0..n {
            for (d, (&zi, &zq)) in sample.z(i).iter().zip(z).enumerate() {
                diff[d] = zi - zq;
            }
            col.push(spec.scaled_evaluate(h, &diff)?);
        }
    }
    Ok(col)
}

/// Nadaraya-Watson weights w_i = K_h(Z_i - z) / sum_j K_h(Z_j - z).
pub fn nw_weights(sample: &Sample, z: &[f64], spec: &KernelSpec, h: f64) -> Result<WeightVector> {
    let col = kernel_column(sample, z, spec, h)?;
    let total: f64 = col.iter().sum();
    if total == 0.0 {
        return Err(Error::AllWeightsZero { z: z.to_vec() });
    }
    let weights: Vec<f64> = col.iter().map(|&k| k / total).collect();
    let s_n: f64 = weights.iter().map(|&w| w * w).sum();
    Ok(WeightVector { weights, s_n, z: z.to_vec(), h })
}

/// Kernel density estimate f_hat_Z(z) = n^{-1} sum_j K_h(Z_j - z).
pub fn kde(sample: &Sample, z: &[f64], spec: &KernelSpec, h: f64) -> Result<f64> {
    let col = kernel_column(sample, z, spec, h)?;
    Ok(col.iter().sum::<f64>() / sample.len() as f64)
}

/// Density estimate with the kernel Ktilde = K^2 / int K^2.
pub fn kde_squared_kernel(sample: &Sample, z: &[f64], spec: &KernelSpec, h: f64) -> Result<f64> {
    if h <= 0.0 {
        return Err(Error::NonPositiveBandwidth(h));
    }
    let n = sample.len();
    let mut acc = 0.0;
    let mut diff = vec![0.0; sample.dim()];
    for i in 0..n {
        for (d, (&zi, &zq)) in sample.z(i).iter().zip(z).enumerate() {
            diff[d] = zi - zq;
        }
        acc += spec.scaled_evaluate_ktilde(h, &diff)?;
    }
    Ok(acc / n as f64)
}
