//! Data generators for the two Monte Carlo settings, the replication engine,
//! and the local and integrated performance measures.
//!
//! Setting 1: Z uniform on (0,1), tau(z) = 2z - 1, normal margins N(z, 1).
//! Setting 2: Z standard normal, tau(z) = 2 Phi(z) - 1, margins N(Phi(z), 1).
//! In both, (X1, X2) given Z = z follow a Gaussian copula with correlation
//! rho(z) = sin(pi tau(z) / 2), the Kendall inversion for that family.

use crate::bandwidth::{self, CvConfig};
use crate::error::{Error, Result};
use crate::estimators::{self, ConcordanceKind, TauKind};
use crate::kernels::KernelSpec;
use crate::sample::Sample;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use statrs::distribution::{ContinuousCDF, Normal};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SettingId {
    Setting1,
    Setting2,
}

impl SettingId {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "1" | "setting1" => Ok(SettingId::Setting1),
            "2" | "setting2" => Ok(SettingId::Setting2),
            other => Err(Error::InvalidArgument(format!("unknown setting '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SettingSpec {
    pub id: SettingId,
    pub n: usize,
    pub seed: u64,
}

/// True conditional Kendall's tau of the setting at z.
pub fn true_tau(id: SettingId, z: f64) -> Result<f64> {
    match id {
        SettingId::Setting1 => {
            if !(0.0..=1.0).contains(&z) {
                return Err(Error::InvalidArgument(format!("z must be in [0,1], got {z}")));
            }
            Ok(2.0 * z - 1.0)
        }
        SettingId::Setting2 => Ok(2.0 * Normal::standard().cdf(z) - 1.0),
    }
}

/// Default evaluation grid: 99 equispaced interior points for Setting 1,
/// 101 points on [-2.5, 2.5] for Setting 2.
pub fn default_grid(id: SettingId) -> Vec<f64> {
    match id {
        SettingId::Setting1 => (1..=99).map(|i| i as f64 / 100.0).collect(),
        SettingId::Setting2 => (0..=100).map(|i| -2.5 + i as f64 * 0.05).collect(),
    }
}

fn conditional_mean(id: SettingId, z: f64) -> f64 {
    match id {
        SettingId::Setting1 => z,
        SettingId::Setting2 => Normal::standard().cdf(z),
    }
}

/// One sample from the setting, on the replication substream `rep` of the
/// master seed. Identical (spec, rep) gives a bit-identical sample.
pub fn generate_replication(spec: &SettingSpec, rep: u64) -> Sample {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(rep);
    let stdnorm = Normal::standard();
    let n = spec.n;
    let mut x1 = Vec::with_capacity(n);
    let mut x2 = Vec::with_capacity(n);
    let mut z = Vec::with_capacity(n);
    for _ in 0..n {
        let zi = match spec.id {
            SettingId::Setting1 => rng.gen::<f64>(),
            SettingId::Setting2 => stdnorm.sample(&mut rng),
        };
        let tau = true_tau(spec.id, zi).expect("z drawn inside the support");
        let rho = (std::f64::consts::FRAC_PI_2 * tau).sin();
        let e1: f64 = stdnorm.sample(&mut rng);
        let e2: f64 = rho * e1 + (1.0 - rho * rho).sqrt() * stdnorm.sample(&mut rng);
        let m = conditional_mean(spec.id, zi);
        x1.push(m + e1);
        x2.push(m + e2);
        z.push(zi);
    }
    Sample::univariate(x1, x2, z).expect("n >= 2")
}

/// Sample on the first replication substream.
pub fn generate(spec: &SettingSpec) -> Sample {
    generate_replication(spec, 0)
}

/// Bandwidth policy of the Monte Carlo engine: each multiplier scales either
/// the per-replication rule-of-thumb bandwidth or the cross-validated one.
#[derive(Debug, Clone, PartialEq)]
pub enum HSource {
    RuleOfThumb { alpha_h: Vec<f64> },
    CrossValidation { n_pairs: usize, alpha_h: Vec<f64> },
}

impl HSource {
    fn alphas(&self) -> &[f64] {
        match self {
            HSource::RuleOfThumb { alpha_h } => alpha_h,
            HSource::CrossValidation { alpha_h, .. } => alpha_h,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MCConfig {
    pub setting: SettingSpec,
    pub reps: usize,
    pub kinds: Vec<TauKind>,
    pub bandwidth: HSource,
    pub z_grid: Vec<f64>,
    pub kernel: KernelSpec,
}

impl MCConfig {
    fn validate(&self) -> Result<()> {
        if self.reps < 2 {
            return Err(Error::InvalidArgument(format!("reps must be >= 2, got {}", self.reps)));
        }
        if self.kinds.is_empty() || self.bandwidth.alphas().is_empty() {
            return Err(Error::InvalidArgument("need at least one estimator and one alpha_h".into()));
        }
        if self.z_grid.len() < 2 || self.z_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument("z_grid must be strictly increasing, len >= 2".into()));
        }
        Ok(())
    }
}

/// Local statistics at one grid point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalStats {
    pub z: f64,
    pub bias: f64,
    /// Population standard deviation (divisor = defined replications), so
    /// mse = bias^2 + sd^2 exactly.
    pub sd: f64,
    pub mse: f64,
    /// Replications where the estimator was undefined at z.
    pub undefined: usize,
}

/// Aggregated curves for one (estimator, alpha_h) pair.
#[derive(Debug, Clone, PartialEq)]
pub struct MCCell {
    pub kind: TauKind,
    pub alpha_h: f64,
    pub local: Vec<LocalStats>,
    pub ibias: f64,
    pub isd: f64,
    pub imse: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MCReport {
    pub z_grid: Vec<f64>,
    pub cells: Vec<MCCell>,
}

/// Trapezoid quadrature of f over the (possibly nonuniform) grid.
pub fn trapezoid(z: &[f64], f: &[f64]) -> f64 {
    assert_eq!(z.len(), f.len());
    let mut acc = 0.0;
    for i in 1..z.len() {
        acc += 0.5 * (z[i] - z[i - 1]) * (f[i] + f[i - 1]);
    }
    acc
}

/// Runs the Monte Carlo study. Replications execute in parallel on
/// independent RNG substreams; aggregation is a serial reduction in fixed
/// replication order, so the report does not depend on the thread count.
pub fn run_mc(config: &MCConfig) -> Result<MCReport> {
    config.validate()?;
    let alphas = config.bandwidth.alphas().to_vec();
    let grid = &config.z_grid;
    // per rep: alphas x grid, None where every estimator is undefined
    let per_rep: Vec<Result<Vec<Vec<Option<estimators::TauAll>>>>> = (0..config.reps)
        .into_par_iter()
        .map(|rep| {
            let sample = generate_replication(&config.setting, rep as u64);
            let hs: Vec<f64> = match &config.bandwidth {
                HSource::RuleOfThumb { alpha_h } => {
                    let rot = bandwidth::rule_of_thumb(&sample, 1.0)?;
                    alpha_h.iter().map(|a| a * rot).collect()
                }
                HSource::CrossValidation { n_pairs, alpha_h } => {
                    let cv_config = CvConfig::default_for(&sample, ConcordanceKind::G2, *n_pairs)?;
                    let h_cv = bandwidth::cv_select(&sample, &cv_config)?.h_cv;
                    alpha_h.iter().map(|a| a * h_cv).collect()
                }
            };
            let mut out = Vec::with_capacity(hs.len());
            for &h in &hs {
                let mut row = Vec::with_capacity(grid.len());
                for &z in grid {
                    match estimators::tau_all(&sample, &[z], &config.kernel, h) {
                        Ok(all) => row.push(Some(all)),
                        Err(Error::AllWeightsZero { .. }) => row.push(None),
                        Err(e) => return Err(e),
                    }
                }
                out.push(row);
            }
            Ok(out)
        })
        .collect();
    let per_rep: Vec<Vec<Vec<Option<estimators::TauAll>>>> =
        per_rep.into_iter().collect::<Result<_>>()?;

    let mut cells = Vec::new();
    for (ai, &alpha) in alphas.iter().enumerate() {
        for &kind in &config.kinds {
            let mut local = Vec::with_capacity(grid.len());
            for (zi, &z) in grid.iter().enumerate() {
                let tau = true_tau(config.setting.id, z)?;
                let mut vals = Vec::with_capacity(config.reps);
                for rep in &per_rep {
                    if let Some(all) = &rep[ai][zi] {
                        if let Some(v) = all.get(kind) {
                            vals.push(v);
                        }
                    }
                }
                let m = vals.len();
                let (bias, sd, mse) = if m == 0 {
                    (f64::NAN, f64::NAN, f64::NAN)
                } else {
                    let mean = vals.iter().sum::<f64>() / m as f64;
                    let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / m as f64;
                    let mse = vals.iter().map(|v| (v - tau).powi(2)).sum::<f64>() / m as f64;
                    (mean - tau, var.sqrt(), mse)
                };
                local.push(LocalStats { z, bias, sd, mse, undefined: config.reps - m });
            }
            let ibias = trapezoid(grid, &local.iter().map(|l| l.bias).collect::<Vec<_>>());
            let isd = trapezoid(grid, &local.iter().map(|l| l.sd).collect::<Vec<_>>());
            let imse = trapezoid(grid, &local.iter().map(|l| l.mse).collect::<Vec<_>>());
            cells.push(MCCell { kind, alpha_h: alpha, local, ibias, isd, imse });
        }
    }
    Ok(MCReport { z_grid: grid.clone(), cells })
}

/// One row of the cross-validation bandwidth study.
#[derive(Debug, Clone, PartialEq)]
pub struct CvStudyRow {
    pub n: usize,
    pub mean_h_cv: f64,
    pub sd_h_cv: f64,
    /// Reference rate n^{-1/5}.
    pub h_ref: f64,
    /// Integrated MSE of tau_tilde at h = multiplier * h_cv, per multiplier.
    pub multiplier_imse: Vec<(f64, f64)>,
}

/// Distribution of the cross-validated bandwidth over replications of the
/// setting, per sample size, with optional integrated error at multiples of
/// the selected bandwidth.
pub fn run_cv_study(
    id: SettingId,
    n_values: &[usize],
    reps: usize,
    n_pairs: usize,
    multipliers: &[f64],
    seed: u64,
    z_grid: &[f64],
) -> Result<Vec<CvStudyRow>> {
    if reps < 2 {
        return Err(Error::InvalidArgument(format!("reps must be >= 2, got {reps}")));
    }
    let mut rows = Vec::with_capacity(n_values.len());
    for &n in n_values {
        let spec = SettingSpec { id, n, seed };
        let per_rep: Vec<Result<(f64, Vec<Vec<f64>>)>> = (0..reps)
            .into_par_iter()
            .map(|rep| {
                let sample = generate_replication(&spec, rep as u64);
                let config = CvConfig::default_for(&sample, ConcordanceKind::G2, n_pairs)?;
                let h_cv = bandwidth::cv_select(&sample, &config)?.h_cv;
                let mut curves = Vec::with_capacity(multipliers.len());
                for &mult in multipliers {
                    let h = mult * h_cv;
                    let mut curve = Vec::with_capacity(z_grid.len());
                    for &z in z_grid {
                        let v = match estimators::tau_tilde(&sample, &[z], &config.kernel, h) {
                            Ok(est) => est.value,
                            Err(Error::AllWeightsZero { .. })
                            | Err(Error::DegenerateWindow { .. }) => f64::NAN,
                            Err(e) => return Err(e),
                        };
                        curve.push(v);
                    }
                    curves.push(curve);
                }
                Ok((h_cv, curves))
            })
            .collect();
        let per_rep: Vec<(f64, Vec<Vec<f64>>)> = per_rep.into_iter().collect::<Result<_>>()?;
        let hs: Vec<f64> = per_rep.iter().map(|r| r.0).collect();
        let mean = hs.iter().sum::<f64>() / reps as f64;
        let sd = (hs.iter().map(|h| (h - mean).powi(2)).sum::<f64>() / reps as f64).sqrt();
        let mut multiplier_imse = Vec::with_capacity(multipliers.len());
        for (mi, &mult) in multipliers.iter().enumerate() {
            let mut mse_curve = Vec::with_capacity(z_grid.len());
            for (zi, &z) in z_grid.iter().enumerate() {
                let tau = true_tau(id, z)?;
                let vals: Vec<f64> = per_rep
                    .iter()
                    .map(|r| r.1[mi][zi])
                    .filter(|v| v.is_finite())
                    .collect();
                let mse = if vals.is_empty() {
                    f64::NAN
                } else {
                    vals.iter().map(|v| (v - tau).powi(2)).sum::<f64>() / vals.len() as f64
                };
                mse_curve.push(mse);
            }
            multiplier_imse.push((mult, trapezoid(z_grid, &mse_curve)));
        }
        rows.push(CvStudyRow {
            n,
            mean_h_cv: mean,
            sd_h_cv: sd,
            h_ref: (n as f64).powf(-0.2),
            multiplier_imse,
        });
    }
    Ok(rows)
}
