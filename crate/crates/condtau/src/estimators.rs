//! Kernel-based estimators of the conditional Kendall's tau and the
//! concordance functions g1, g2, g3.
//!
//! All three raw estimators are affine transformations of a weighted double
//! sum over ordered pairs (i, j). One pass accumulates the three underlying
//! sums in row-major pair order; observations with an exactly-zero weight are
//! skipped, which leaves every accumulated floating-point sum unchanged.

use crate::error::{Error, Result};
use crate::kernels::KernelSpec;
use crate::sample::Sample;
use crate::weights;
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TauKind {
    Tau1,
    Tau2,
    Tau3,
    TauTilde,
}

impl TauKind {
    pub fn parse(name: &str) -> Result<Self> {
        match name.to_ascii_lowercase().as_str() {
            "tau1" | "1" => Ok(TauKind::Tau1),
            "tau2" | "2" => Ok(TauKind::Tau2),
            "tau3" | "3" => Ok(TauKind::Tau3),
            "tilde" | "tautilde" => Ok(TauKind::TauTilde),
            other => Err(Error::InvalidArgument(format!("unknown estimator '{other}'"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            TauKind::Tau1 => "tau1",
            TauKind::Tau2 => "tau2",
            TauKind::Tau3 => "tau3",
            TauKind::TauTilde => "tilde",
        }
    }
}

/// Which concordance function g_k drives a computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConcordanceKind {
    G1,
    G2,
    G3,
}

impl ConcordanceKind {
    pub fn index(&self) -> u8 {
        match self {
            ConcordanceKind::G1 => 1,
            ConcordanceKind::G2 => 2,
            ConcordanceKind::G3 => 3,
        }
    }

    pub fn from_index(k: u8) -> Result<Self> {
        match k {
            1 => Ok(ConcordanceKind::G1),
            2 => Ok(ConcordanceKind::G2),
            3 => Ok(ConcordanceKind::G3),
            other => Err(Error::InvalidArgument(format!("k must be 1, 2 or 3, got {other}"))),
        }
    }
}

/// g_k(x_i, x_j) with strict inequalities; ties contribute zero.
pub fn g(kind: ConcordanceKind, xi: (f64, f64), xj: (f64, f64)) -> f64 {
    match kind {
        ConcordanceKind::G1 => {
            if xi.0 < xj.0 && xi.1 < xj.1 {
                3.0
            } else {
                -1.0
            }
        }
        ConcordanceKind::G2 => {
            let prod = (xi.0 - xj.0) * (xi.1 - xj.1);
            if prod > 0.0 {
                1.0
            } else if prod < 0.0 {
                -1.0
            } else {
                0.0
            }
        }
        ConcordanceKind::G3 => {
            if xi.0 < xj.0 && xi.1 > xj.1 {
                -3.0
            } else {
                1.0
            }
        }
    }
}

/// A conditional Kendall's tau estimate at one query point.
#[derive(Debug, Clone, PartialEq)]
pub struct TauEstimate {
    pub kind: TauKind,
    pub z: Vec<f64>,
    pub value: f64,
    pub s_n: f64,
    pub h: f64,
    pub n_effective: usize,
    /// Pairs among effective observations with a tie in either coordinate.
    pub tied_pairs: usize,
}

/// All four estimators computed in a single pass at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct TauAll {
    pub tau1: f64,
    pub tau2: f64,
    pub tau3: f64,
    /// `None` when a single observation carries all weight (s_n = 1).
    pub tau_tilde: Option<f64>,
    pub s_n: f64,
    pub n_effective: usize,
    pub tied_pairs: usize,
}

impl TauAll {
    pub fn get(&self, kind: TauKind) -> Option<f64> {
        match kind {
            TauKind::Tau1 => Some(self.tau1),
            TauKind::Tau2 => Some(self.tau2),
            TauKind::Tau3 => Some(self.tau3),
            TauKind::TauTilde => self.tau_tilde,
        }
    }
}

/// One pass over ordered pairs of effective observations.
///
/// `exclude` removes the two listed rows before the weights are normalized,
/// exactly as if the reduced sample had been materialized.
pub(crate) fn tau_all_excluding(
    sample: &Sample,
    z: &[f64],
    spec: &KernelSpec,
    h: f64,
    exclude: Option<(usize, usize)>,
) -> Result<TauAll> {
    let mut col = weights::kernel_column(sample, z, spec, h)?;
    if let Some((i, j)) = exclude {
        col[i] = 0.0;
        col[j] = 0.0;
    }
    let mut total = 0.0;
    for (i, &k) in col.iter().enumerate() {
        if let Some((a, b)) = exclude {
            if i == a || i == b {
                continue;
            }
        }
        total += k;
    }
    if total == 0.0 {
        return Err(Error::AllWeightsZero { z: z.to_vec() });
    }

    let mut idx: Vec<usize> = Vec::new();
    let mut w: Vec<f64> = Vec::new();
    let mut s_n = 0.0;
    for (i, &k) in col.iter().enumerate() {
        if k != 0.0 {
            let wi = k / total;
            idx.push(i);
            w.push(wi);
            s_n += wi * wi;
        }
    }
    let x1 = sample.x1();
    let x2 = sample.x2();

    // sum1: 1{Xi1 < Xj1, Xi2 < Xj2}; sum2: g2; sum3: 1{Xi1 < Xj1, Xi2 > Xj2}
    let mut sum1 = 0.0;
    let mut sum2 = 0.0;
    let mut sum3 = 0.0;
    let mut ties = 0usize;
    for (a, &ia) in idx.iter().enumerate() {
        let (xa1, xa2) = (x1[ia], x2[ia]);
        let wa = w[a];
        for (b, &ib) in idx.iter().enumerate() {
            let (xb1, xb2) = (x1[ib], x2[ib]);
            let ww = wa * w[b];
            if xa1 < xb1 {
                if xa2 < xb2 {
                    sum1 += ww;
                } else if xa2 > xb2 {
                    sum3 += ww;
                }
            }
            let prod = (xa1 - xb1) * (xa2 - xb2);
            if prod > 0.0 {
                sum2 += ww;
            } else if prod < 0.0 {
                sum2 -= ww;
            }
            if a < b && (xa1 == xb1 || xa2 == xb2) {
                ties += 1;
            }
        }
    }

    let tau1 = 4.0 * sum1 - 1.0;
    let tau2 = sum2;
    let tau3 = 1.0 - 4.0 * sum3;
    let tau_tilde = if s_n < 1.0 { Some(tau2 / (1.0 - s_n)) } else { None };
    Ok(TauAll {
        tau1,
        tau2,
        tau3,
        tau_tilde,
        s_n,
        n_effective: idx.len(),
        tied_pairs: ties,
    })
}

/// Value-only leave-pair-out path used by the cross-validation hot loop.
///
/// Computes exactly the accumulator of the requested kind, in the same pair
/// order as [`tau_all_excluding`], so the returned value is bit-identical to
/// the general path.
pub(crate) fn tau_value_excluding(
    sample: &Sample,
    z: &[f64],
    spec: &KernelSpec,
    h: f64,
    exclude: (usize, usize),
    kind: TauKind,
) -> Result<f64> {
    let mut col = weights::kernel_column(sample, z, spec, h)?;
    col[exclude.0] = 0.0;
    col[exclude.1] = 0.0;
    let mut total = 0.0;
    for (i, &k) in col.iter().enumerate() {
        if i == exclude.0 || i == exclude.1 {
            continue;
        }
        total += k;
    }
    if total == 0.0 {
        return Err(Error::AllWeightsZero { z: z.to_vec() });
    }
    let mut idx: Vec<usize> = Vec::new();
    let mut w: Vec<f64> = Vec::new();
    let mut s_n = 0.0;
    for (i, &k) in col.iter().enumerate() {
        if k != 0.0 {
            let wi = k / total;
            idx.push(i);
            w.push(wi);
            s_n += wi * wi;
        }
    }
    let x1 = sample.x1();
    let x2 = sample.x2();
    let m = idx.len();
    // gather the effective rows into contiguous buffers and accumulate
    // branch-free: excluded terms enter as exact 0.0 or a sign factor of
    // +/-1, so the running sums match the general path bit for bit
    let mut gx1 = Vec::with_capacity(m);
    let mut gx2 = Vec::with_capacity(m);
    for &i in &idx {
        gx1.push(x1[i]);
        gx2.push(x2[i]);
    }
    let value = match kind {
        TauKind::Tau1 => {
            let mut sum1 = 0.0;
            for a in 0..m {
                let (xa1, xa2, wa) = (gx1[a], gx2[a], w[a]);
                for b in 0..m {
                    let both = (xa1 < gx1[b]) & (xa2 < gx2[b]);
                    sum1 += (both as u8 as f64) * (wa * w[b]);
                }
            }
            4.0 * sum1 - 1.0
        }
        TauKind::Tau2 | TauKind::TauTilde => {
            let mut sum2 = 0.0;
            for a in 0..m {
                let (xa1, xa2, wa) = (gx1[a], gx2[a], w[a]);
                for b in 0..m {
                    let prod = (xa1 - gx1[b]) * (xa2 - gx2[b]);
                    let sign = ((prod > 0.0) as i8 - (prod < 0.0) as i8) as f64;
                    sum2 += sign * (wa * w[b]);
                }
            }
            if kind == TauKind::TauTilde {
                if s_n >= 1.0 {
                    return Err(Error::DegenerateWindow { z: z.to_vec() });
                }
                sum2 / (1.0 - s_n)
            } else {
                sum2
            }
        }
        TauKind::Tau3 => {
            let mut sum3 = 0.0;
            for a in 0..m {
                let (xa1, xa2, wa) = (gx1[a], gx2[a], w[a]);
                for b in 0..m {
                    let both = (xa1 < gx1[b]) & (xa2 > gx2[b]);
                    sum3 += (both as u8 as f64) * (wa * w[b]);
                }
            }
            1.0 - 4.0 * sum3
        }
    };
    Ok(value)
}

/// All four estimators at one point.
pub fn tau_all(sample: &Sample, z: &[f64], spec: &KernelSpec, h: f64) -> Result<TauAll> {
    tau_all_excluding(sample, z, spec, h, None)
}

/// One of the three raw estimators at one point.
pub fn tau_hat(
    kind: TauKind,
    sample: &Sample,
    z: &[f64],
    spec: &KernelSpec,
    h: f64,
) -> Result<TauEstimate> {
    let all = tau_all(sample, z, spec, h)?;
    let value = match kind {
        TauKind::Tau1 => all.tau1,
        TauKind::Tau2 => all.tau2,
        TauKind::Tau3 => all.tau3,
        TauKind::TauTilde => {
            all.tau_tilde.ok_or(Error::DegenerateWindow { z: z.to_vec() })?
        }
    };
    Ok(TauEstimate {
        kind,
        z: z.to_vec(),
        value,
        s_n: all.s_n,
        h,
        n_effective: all.n_effective,
        tied_pairs: all.tied_pairs,
    })
}

/// Rescaled estimator tau_tilde = tau_hat2 / (1 - s_n), valued in [-1, 1].
pub fn tau_tilde(sample: &Sample, z: &[f64], spec: &KernelSpec, h: f64) -> Result<TauEstimate> {
    tau_hat(TauKind::TauTilde, sample, z, spec, h)
}

/// Elementwise estimates on a grid of query points; per-point errors are
/// recorded in the output rather than aborting the whole grid.
pub fn tau_hat_grid(
    kind: TauKind,
    sample: &Sample,
    zgrid: &[Vec<f64>],
    spec: &KernelSpec,
    h: f64,
) -> Vec<Result<TauEstimate>> {
    zgrid
        .par_iter()
        .map(|z| tau_hat(kind, sample, z, spec, h))
        .collect()
}
