//! Kernel functions on R^p, their scaled versions K_h(v) = h^{-p} K(v/h),
//! and the analytic constants used by the weights, inference and bound modules.
//!
//! Multivariate kernels are coordinate-wise products of a univariate base,
//! which keeps every constant computable in closed form. Compact kernels use
//! open support: the value at the support boundary is 0.

use crate::error::{Error, Result};

const INV_SQRT_2PI: f64 = 0.3989422804014327; // 1/sqrt(2*pi)

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelFamily {
    Epanechnikov,
    Gaussian,
    UniformBox,
}

impl KernelFamily {
    pub fn parse(name: &str) -> Result<Self> {
        match name.to_ascii_lowercase().as_str() {
            "epanechnikov" | "epa" => Ok(KernelFamily::Epanechnikov),
            "gaussian" | "normal" => Ok(KernelFamily::Gaussian),
            "uniform" | "box" | "uniformbox" => Ok(KernelFamily::UniformBox),
            other => Err(Error::InvalidArgument(format!("unknown kernel '{other}'"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            KernelFamily::Epanechnikov => "epanechnikov",
            KernelFamily::Gaussian => "gaussian",
            KernelFamily::UniformBox => "uniform",
        }
    }

    /// Univariate base kernel. Compact supports are open: K(u) = 0 for |u| >= 1.
    #[inline]
    pub fn eval1(&self, u: f64) -> f64 {
        match self {
            KernelFamily::Epanechnikov => {
                if u.abs() < 1.0 {
                    0.75 * (1.0 - u * u)
                } else {
                    0.0
                }
            }
            KernelFamily::Gaussian => INV_SQRT_2PI * (-0.5 * u * u).exp(),
            KernelFamily::UniformBox => {
                if u.abs() < 1.0 {
                    0.5
                } else {
                    0.0
                }
            }
        }
    }
}

/// Kernel family together with the covariate dimension p and the kernel order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KernelSpec {
    pub family: KernelFamily,
    pub p: usize,
    pub order: u32,
}

/// Analytic constants of a kernel: sup |K|, integrals of K^2 and |K|,
/// and the constants of Ktilde := K^2 / int K^2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelConstants {
    pub c_k: f64,
    pub int_k2: f64,
    pub int_abs_k: f64,
    pub c_ktilde: f64,
    pub int_ktilde2: f64,
    /// Sup-norm support radius; `None` for unbounded kernels.
    pub support_radius: Option<f64>,
}

impl KernelSpec {
    pub fn new(family: KernelFamily, p: usize, order: u32) -> Result<Self> {
        if p == 0 {
            return Err(Error::InvalidArgument("kernel dimension p must be >= 1".into()));
        }
        if order < 2 {
            return Err(Error::InvalidArgument("kernel order must be >= 2".into()));
        }
        Ok(KernelSpec { family, p, order })
    }

    /// Default kernel: second-order Epanechnikov.
    pub fn epanechnikov(p: usize) -> Self {
        KernelSpec { family: KernelFamily::Epanechnikov, p, order: 2 }
    }

    /// K(u) for u in R^p, as a product of univariate factors.
    pub fn evaluate(&self, u: &[f64]) -> Result<f64> {
        if u.len() != self.p {
            return Err(Error::DimensionMismatch { expected: self.p, got: u.len() });
        }
        Ok(u.iter().map(|&ui| self.family.eval1(ui)).product())
    }

    /// K_h(v) = h^{-p} K(v/h).
    pub fn scaled_evaluate(&self, h: f64, v: &[f64]) -> Result<f64> {
        if h <= 0.0 {
            return Err(Error::NonPositiveBandwidth(h));
        }
        if v.len() != self.p {
            return Err(Error::DimensionMismatch { expected: self.p, got: v.len() });
        }
        let mut k = 1.0;
        for &vi in v {
            k *= self.family.eval1(vi / h);
        }
        Ok(k / h.powi(self.p as i32))
    }

    /// Fast path for p = 1; callers must have checked h > 0.
    #[inline]
    pub(crate) fn scaled_eval1(&self, h: f64, v: f64) -> f64 {
        self.family.eval1(v / h) / h
    }

    /// Ktilde(u) := K(u)^2 / int K^2, evaluated at u and scaled by h:
    /// Ktilde_h(v) = h^{-p} Ktilde(v/h).
    pub fn scaled_evaluate_ktilde(&self, h: f64, v: &[f64]) -> Result<f64> {
        if h <= 0.0 {
            return Err(Error::NonPositiveBandwidth(h));
        }
        if v.len() != self.p {
            return Err(Error::DimensionMismatch { expected: self.p, got: v.len() });
        }
        let int_k2 = self.constants().int_k2;
        let mut k = 1.0;
        for &vi in v {
            k *= self.family.eval1(vi / h);
        }
        Ok(k * k / int_k2 / h.powi(self.p as i32))
    }

    /// Closed-form constants of the (product) kernel.
    pub fn constants(&self) -> KernelConstants {
        // Univariate values; products raise them to the power p.
        let (c1, i2, ia, ct1, it2, radius): (f64, f64, f64, f64, f64, Option<f64>) = match self.family {
            KernelFamily::Epanechnikov => {
                // int K^2 = 3/5, int K^4 = 9/35, Ktilde = K^2/(3/5):
                // sup Ktilde = (3/4)^2/(3/5) = 15/16, int Ktilde^2 = (9/35)/(9/25) = 5/7.
                (0.75, 0.6, 1.0, 0.9375, 5.0 / 7.0, Some(1.0))
            }
            KernelFamily::Gaussian => {
                // int K^2 = 1/(2 sqrt(pi)); Ktilde is the N(0, 1/2) density,
                // so sup Ktilde = 1/sqrt(pi) and int Ktilde^2 = 1/sqrt(2 pi).
                let sqrt_pi = std::f64::consts::PI.sqrt();
                (
                    INV_SQRT_2PI,
                    1.0 / (2.0 * sqrt_pi),
                    1.0,
                    1.0 / sqrt_pi,
                    1.0 / (2.0 * std::f64::consts::PI).sqrt(),
                    None,
                )
            }
            KernelFamily::UniformBox => {
                // K = 1/2 on (-1,1); Ktilde = K.
                (0.5, 0.5, 1.0, 0.5, 0.5, Some(1.0))
            }
        };
        let p = self.p as i32;
        KernelConstants {
            c_k: c1.powi(p),
            int_k2: i2.powi(p),
            int_abs_k: ia.powi(p),
            c_ktilde: ct1.powi(p),
            int_ktilde2: it2.powi(p),
            support_radius: radius,
        }
    }
}
