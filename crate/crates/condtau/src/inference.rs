//! Plug-in estimation of the asymptotic variance of the conditional
//! Kendall's tau estimators and pointwise confidence intervals.
//!
//! The asymptotic variance at z is 4 int K^2 / f_Z(z) times
//! E[g_k(X_1, X) g_k(X_2, X) | Z = Z_1 = Z_2 = z] - tau^2. The conditional
//! moment is estimated by a weighted sum over distinct index triples
//! (a, b, c), normalized by the total included weight, and computed in
//! O(n^2) through per-a accumulators and inclusion-exclusion.

use crate::error::{Error, Result};
use crate::estimators::{self, ConcordanceKind, TauEstimate, TauKind};
use crate::kernels::KernelSpec;
use crate::sample::Sample;
use crate::weights;
use statrs::distribution::{ContinuousCDF, Normal};

/// Estimated diagonal entry of the asymptotic variance matrix at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct VarianceEstimate {
    pub z: Vec<f64>,
    pub kind: TauKind,
    /// max(0, raw plug-in); see `clamped`.
    pub h_entry: f64,
    pub clamped: bool,
    pub f_z_hat: f64,
    pub gg_moment: f64,
    pub tau_hat: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConfidenceInterval {
    pub level: f64,
    pub lower: f64,
    pub upper: f64,
    pub center: f64,
    pub standard_error: f64,
}

fn concordance_of(kind: TauKind) -> ConcordanceKind {
    match kind {
        TauKind::Tau1 => ConcordanceKind::G1,
        TauKind::Tau2 | TauKind::TauTilde => ConcordanceKind::G2,
        TauKind::Tau3 => ConcordanceKind::G3,
    }
}

/// Plug-in estimate of E[g_k(X_1, X) g_k(X_2, X) | Z = Z_1 = Z_2 = z]
/// over distinct index triples, renormalized by the included weight mass.
pub fn estimate_gg_moment(
    k: ConcordanceKind,
    sample: &Sample,
    z: &[f64],
    spec: &KernelSpec,
    h: f64,
) -> Result<f64> {
    if sample.len() < 3 {
        return Err(Error::SampleTooSmall { need: 3, got: sample.len() });
    }
    let wv = weights::nw_weights(sample, z, spec, h)?;
    let idx: Vec<usize> = (0..sample.len()).filter(|&i| wv.weights[i] != 0.0).collect();
    if idx.len() < 3 {
        return Err(Error::TooFewEffective { need: 3, z: z.to_vec() });
    }
    let w = &wv.weights;
    let s_n = wv.s_n;
    let mut num = 0.0;
    let mut den = 0.0;
    for &a in &idx {
        let xa = sample.x(a);
        let mut m_a = 0.0;
        let mut q_a = 0.0;
        for &b in &idx {
            if b == a {
                continue;
            }
            let gv = estimators::g(k, sample.x(b), xa);
            m_a += w[b] * gv;
            q_a += w[b] * w[b] * gv * gv;
        }
        num += w[a] * (m_a * m_a - q_a);
        let s_a = 1.0 - w[a];
        let q_tot = s_n - w[a] * w[a];
        den += w[a] * (s_a * s_a - q_tot);
    }
    if den <= 0.0 {
        return Err(Error::TooFewEffective { need: 3, z: z.to_vec() });
    }
    Ok(num / den)
}

/// Plug-in asymptotic variance entry for the estimator of the given kind.
pub fn estimate_variance(
    kind: TauKind,
    sample: &Sample,
    z: &[f64],
    spec: &KernelSpec,
    h: f64,
) -> Result<VarianceEstimate> {
    let k = concordance_of(kind);
    let f_z = weights::kde(sample, z, spec, h)?;
    if f_z == 0.0 {
        return Err(Error::ZeroDensity { z: z.to_vec() });
    }
    let gg = estimate_gg_moment(k, sample, z, spec, h)?;
    let tau = estimators::tau_hat(kind, sample, z, spec, h)?.value;
    let raw = 4.0 * spec.constants().int_k2 / f_z * (gg - tau * tau);
    let clamped = raw < 0.0;
    Ok(VarianceEstimate {
        z: z.to_vec(),
        kind,
        h_entry: raw.max(0.0),
        clamped,
        f_z_hat: f_z,
        gg_moment: gg,
        tau_hat: tau,
    })
}

/// CI from the CLT form: center +/- q * sqrt(h_entry / (n h^p)).
/// With `truncate`, the endpoints are clipped to [-1, 1].
pub fn confidence_interval(
    estimate: &TauEstimate,
    var: &VarianceEstimate,
    n: usize,
    h: f64,
    p: usize,
    level: f64,
    truncate: bool,
) -> Result<ConfidenceInterval> {
    if !(0.0 < level && level < 1.0) {
        return Err(Error::InvalidArgument(format!("level must be in (0,1), got {level}")));
    }
    if var.h_entry < 0.0 {
        return Err(Error::InvalidArgument("negative variance entry".into()));
    }
    let se = (var.h_entry / (n as f64 * h.powi(p as i32))).sqrt();
    let q = Normal::standard().inverse_cdf(1.0 - (1.0 - level) / 2.0);
    let (mut lower, mut upper) = (estimate.value - q * se, estimate.value + q * se);
    if truncate {
        lower = lower.max(-1.0);
        upper = upper.min(1.0);
    }
    Ok(ConfidenceInterval { level, lower, upper, center: estimate.value, standard_error: se })
}
