//! Rule-of-thumb bandwidth and leave-pair-out cross-validation.
//!
//! The criterion compares g_k(X_i, X_j) with the estimator recomputed without
//! observations i and j at the covariate midpoint, restricted to the pairs
//! whose covariates are within a data-driven sup-norm distance h_tilde. The
//! pair-selection kernel is a fixed box 1{|z|_inf <= 1}, scaled by
//! h_tilde^{-p}; scaling by a positive constant cannot change the argmin.

use crate::error::{Error, Result};
use crate::estimators::{self, ConcordanceKind, TauEstimate, TauKind};
use crate::kernels::KernelSpec;
use crate::sample::Sample;
use rayon::prelude::*;

/// h = alpha_h * sigma_hat(Z) * n^{-1/5} for p = 1.
///
/// For p > 1 the scale is the geometric mean of the coordinate standard
/// deviations and the exponent becomes n^{-1/(4+p)}.
pub fn rule_of_thumb(sample: &Sample, alpha_h: f64) -> Result<f64> {
    if alpha_h <= 0.0 {
        return Err(Error::InvalidArgument(format!("alpha_h must be > 0, got {alpha_h}")));
    }
    let p = sample.dim();
    let n = sample.len() as f64;
    let mut log_sigma = 0.0;
    for d in 0..p {
        let sd = sample.z_std(d);
        if sd == 0.0 {
            return Err(Error::ZeroVariance);
        }
        log_sigma += sd.ln();
    }
    let sigma = (log_sigma / p as f64).exp();
    Ok(alpha_h * sigma * n.powf(-1.0 / (4.0 + p as f64)))
}

/// Configuration of the cross-validation bandwidth search.
#[derive(Debug, Clone)]
pub struct CvConfig {
    pub k: ConcordanceKind,
    pub n_pairs: usize,
    pub h_grid: Vec<f64>,
    pub kernel: KernelSpec,
}

impl CvConfig {
    /// Default search: 20 geometric points spanning [0.25, 4] x rule_of_thumb(1).
    pub fn default_for(sample: &Sample, k: ConcordanceKind, n_pairs: usize) -> Result<Self> {
        let rot = rule_of_thumb(sample, 1.0)?;
        Ok(CvConfig {
            k,
            n_pairs,
            h_grid: geometric_grid(0.25 * rot, 4.0 * rot, 20),
            kernel: KernelSpec::epanechnikov(sample.dim()),
        })
    }
}

pub fn geometric_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi >= lo && count >= 1);
    if count == 1 {
        return vec![lo];
    }
    let ratio = (hi / lo).ln() / (count - 1) as f64;
    (0..count).map(|i| lo * (ratio * i as f64).exp()).collect()
}

/// The pairs kept by the CV criterion together with the distance threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct PairSelection {
    /// Index pairs with i < j and |Z_i - Z_j|_inf <= tilde_h.
    pub pairs: Vec<(usize, usize)>,
    pub tilde_h: f64,
}

/// Keeps the pairs whose sup-norm covariate distance is at most the empirical
/// quantile of order 2 * n_pairs / (n (n-1)) of all pairwise distances.
pub fn select_pairs(sample: &Sample, n_pairs: usize) -> Result<PairSelection> {
    let n = sample.len();
    let total_pairs = n * (n - 1) / 2;
    if n_pairs == 0 || n_pairs > total_pairs {
        return Err(Error::InvalidArgument(format!(
            "n_pairs must be in [1, {total_pairs}], got {n_pairs}"
        )));
    }
    let mut dists = Vec::with_capacity(total_pairs);
    for i in 0..n {
        for j in (i + 1)..n {
            dists.push(sample.z_dist_inf(i, j));
        }
    }
    // quantile of order 2 n_pairs / (n(n-1)) over n(n-1)/2 distances is the
    // n_pairs-th order statistic
    let mut scratch = dists.clone();
    let (_, kth, _) = scratch.select_nth_unstable_by(n_pairs - 1, f64::total_cmp);
    let tilde_h = *kth;
    let mut pairs = Vec::with_capacity(n_pairs);
    let mut idx = 0;
    for i in 0..n {
        for j in (i + 1)..n {
            if dists[idx] <= tilde_h {
                pairs.push((i, j));
            }
            idx += 1;
        }
    }
    Ok(PairSelection { pairs, tilde_h })
}

/// The k-th estimator at the covariate midpoint of the excluded pair,
/// computed on the n - 2 remaining observations.
pub fn tau_hat_leave_pair_out(
    kind: TauKind,
    sample: &Sample,
    exclude: (usize, usize),
    spec: &KernelSpec,
    h: f64,
) -> Result<TauEstimate> {
    if sample.len() < 4 {
        return Err(Error::SampleTooSmall { need: 4, got: sample.len() });
    }
    let (i, j) = exclude;
    let z = sample.z_midpoint(i, j);
    let all = estimators::tau_all_excluding(sample, &z, spec, h, Some((i, j)))?;
    let value = all
        .get(kind)
        .ok_or(Error::DegenerateWindow { z: z.clone() })?;
    Ok(TauEstimate {
        kind,
        z,
        value,
        s_n: all.s_n,
        h,
        n_effective: all.n_effective,
        tied_pairs: all.tied_pairs,
    })
}

/// Criterion value together with the number of skipped pairs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriterionValue {
    pub value: f64,
    pub skipped_pairs: usize,
}

fn tau_kind_of(k: ConcordanceKind) -> TauKind {
    match k {
        ConcordanceKind::G1 => TauKind::Tau1,
        ConcordanceKind::G2 => TauKind::Tau2,
        ConcordanceKind::G3 => TauKind::Tau3,
    }
}

/// Leave-pair-out cross-validation criterion at one bandwidth.
///
/// Sums over ordered pairs (both orientations of each selected pair); the
/// g_1 and g_3 terms are not symmetric in (i, j), so both orientations are
/// evaluated against the shared leave-out estimate at the midpoint.
pub fn cv_criterion(
    sample: &Sample,
    h: f64,
    config: &CvConfig,
    selection: &PairSelection,
) -> Result<CriterionValue> {
    if selection.pairs.is_empty() {
        return Err(Error::InvalidArgument("empty pair selection".into()));
    }
    let n = sample.len();
    let kind = tau_kind_of(config.k);
    let box_scale = selection.tilde_h.powi(-(sample.dim() as i32));
    let mut acc = 0.0;
    let mut skipped = 0usize;
    for &(i, j) in &selection.pairs {
        let z = sample.z_midpoint(i, j);
        match estimators::tau_value_excluding(sample, &z, &config.kernel, h, (i, j), kind) {
            Ok(t) => {
                let gi = estimators::g(config.k, sample.x(i), sample.x(j));
                let gj = estimators::g(config.k, sample.x(j), sample.x(i));
                acc += ((gi - t).powi(2) + (gj - t).powi(2)) * box_scale;
            }
            Err(Error::AllWeightsZero { .. }) | Err(Error::DegenerateWindow { .. }) => {
                skipped += 1;
            }
            Err(e) => return Err(e),
        }
    }
    Ok(CriterionValue {
        value: 2.0 / (n * (n - 1)) as f64 * acc,
        skipped_pairs: skipped,
    })
}

/// One point of the cross-validation curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CvPoint {
    pub h: f64,
    /// `None` when every selected pair was undefined at this bandwidth.
    pub value: Option<f64>,
    pub skipped_pairs: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CvSelection {
    pub h_cv: f64,
    pub curve: Vec<CvPoint>,
    pub selection: PairSelection,
}

/// Grid search for the minimizer of the cross-validation criterion.
/// Ties are broken toward the smallest bandwidth.
pub fn cv_select(sample: &Sample, config: &CvConfig) -> Result<CvSelection> {
    if config.h_grid.is_empty() {
        return Err(Error::InvalidArgument("empty bandwidth grid".into()));
    }
    let selection = select_pairs(sample, config.n_pairs)?;
    let n_selected = selection.pairs.len();
    let curve: Vec<CvPoint> = config
        .h_grid
        .par_iter()
        .map(|&h| {
            let cv = cv_criterion(sample, h, config, &selection)
                .expect("selection is nonempty");
            let value = if cv.skipped_pairs == n_selected { None } else { Some(cv.value) };
            CvPoint { h, value, skipped_pairs: cv.skipped_pairs }
        })
        .collect();
    let best = curve
        .iter()
        .filter_map(|pt| pt.value.map(|v| (pt.h, v)))
        .reduce(|a, b| if b.1 < a.1 { b } else { a })
        .ok_or_else(|| {
            Error::InvalidArgument("cross-validation criterion undefined on the whole grid".into())
        })?;
    Ok(CvSelection { h_cv: best.0, curve, selection })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn random_sample(n: usize, seed: u64) -> Sample {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x1 = (0..n).map(|_| rng.gen::<f64>()).collect();
        let x2 = (0..n).map(|_| rng.gen::<f64>()).collect();
        let z = (0..n).map(|_| rng.gen::<f64>()).collect();
        Sample::univariate(x1, x2, z).unwrap()
    }

    #[test]
    fn rule_of_thumb_values() {
        // sigma_hat = 1 cases checked through direct construction below
        let s = random_sample(100, 1);
        let rot = rule_of_thumb(&s, 1.0).unwrap();
        let sd = s.z_std(0);
        assert_abs_diff_eq!(rot, sd * (100f64).powf(-0.2), epsilon = 1e-15);
        assert_eq!(rule_of_thumb(&s, 2.0).unwrap(), 2.0 * rot);
        // n^{-1/5} reference values from the unit-variance normalization
        assert_abs_diff_eq!((100f64).powf(-0.2), 0.40, epsilon = 5e-3);
        assert_abs_diff_eq!((2000f64).powf(-0.2), 0.22, epsilon = 5e-3);
    }

    #[test]
    fn rule_of_thumb_zero_variance() {
        let s = Sample::univariate(vec![0.0, 1.0], vec![0.0, 1.0], vec![0.5, 0.5]).unwrap();
        assert!(matches!(rule_of_thumb(&s, 1.0), Err(Error::ZeroVariance)));
    }

    #[test]
    fn select_pairs_examples() {
        let s = Sample::univariate(vec![0.0; 3], vec![0.0; 3], vec![0.0, 1.0, 10.0]).unwrap();
        let sel = select_pairs(&s, 1).unwrap();
        assert_eq!(sel.tilde_h, 1.0);
        assert_eq!(sel.pairs, vec![(0, 1)]);
        // full quantile keeps every pair
        let sel = select_pairs(&s, 3).unwrap();
        assert_eq!(sel.tilde_h, 10.0);
        assert_eq!(sel.pairs.len(), 3);
    }

    #[test]
    fn select_pairs_matches_sort_oracle() {
        let s = random_sample(50, 5);
        let sel = select_pairs(&s, 100).unwrap();
        let mut dists: Vec<f64> = Vec::new();
        for i in 0..50 {
            for j in (i + 1)..50 {
                dists.push((s.z(i)[0] - s.z(j)[0]).abs());
            }
        }
        dists.sort_by(f64::total_cmp);
        assert_eq!(sel.tilde_h, dists[99]);
        assert!(sel.pairs.len() >= 100);
        assert!(sel.pairs.iter().all(|&(i, j)| s.z_dist_inf(i, j) <= sel.tilde_h));
    }

    #[test]
    fn leave_pair_out_equals_reduced_sample() {
        let s = random_sample(25, 8);
        let spec = KernelSpec::epanechnikov(1);
        let (i, j) = (3, 17);
        let z = s.z_midpoint(i, j);
        let keep: Vec<usize> = (0..25).filter(|&r| r != i && r != j).collect();
        let reduced = s.subset(&keep).unwrap();
        for kind in [TauKind::Tau1, TauKind::Tau2, TauKind::Tau3] {
            let a = tau_hat_leave_pair_out(kind, &s, (i, j), &spec, 0.4);
            let b = estimators::tau_hat(kind, &reduced, &z, &spec, 0.4);
            match (a, b) {
                (Ok(a), Ok(b)) => assert_eq!(a.value, b.value),
                (Err(_), Err(_)) => {}
                _ => panic!("leave-pair-out and reduced sample disagree"),
            }
        }
        // unordered exclusion
        let a = tau_hat_leave_pair_out(TauKind::Tau2, &s, (i, j), &spec, 0.4).unwrap();
        let b = tau_hat_leave_pair_out(TauKind::Tau2, &s, (j, i), &spec, 0.4).unwrap();
        assert_eq!(a.value, b.value);
    }

    #[test]
    fn criterion_manual_expansion() {
        // n = 5, a single selected pair, evaluated by hand against the
        // definition of the criterion.
        let s = Sample::univariate(
            vec![0.1, 0.9, 0.3, 0.7, 0.5],
            vec![0.2, 0.8, 0.1, 0.9, 0.5],
            vec![0.50, 0.52, 0.10, 0.90, 0.30],
        )
        .unwrap();
        let sel = select_pairs(&s, 1).unwrap();
        assert_eq!(sel.pairs, vec![(0, 1)]);
        assert_eq!(sel.tilde_h, 0.52 - 0.50);
        let spec = KernelSpec::epanechnikov(1);
        let config = CvConfig {
            k: ConcordanceKind::G2,
            n_pairs: 1,
            h_grid: vec![0.5],
            kernel: spec,
        };
        let cv = cv_criterion(&s, 0.5, &config, &sel).unwrap();
        let t = tau_hat_leave_pair_out(TauKind::Tau2, &s, (0, 1), &spec, 0.5)
            .unwrap()
            .value;
        let g01 = estimators::g(ConcordanceKind::G2, s.x(0), s.x(1));
        let expected =
            2.0 / 20.0 * ((g01 - t).powi(2) + (g01 - t).powi(2)) / sel.tilde_h;
        assert_abs_diff_eq!(cv.value, expected, epsilon = 1e-14);
        assert!(cv.value >= 0.0);
    }

    #[test]
    fn criterion_positive_on_concordant_data() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let x1: Vec<f64> = (0..30).map(|_| rng.gen::<f64>()).collect();
        let z: Vec<f64> = (0..30).map(|_| rng.gen::<f64>()).collect();
        let s = Sample::univariate(x1.clone(), x1, z).unwrap();
        let config = CvConfig {
            k: ConcordanceKind::G2,
            n_pairs: 20,
            h_grid: vec![0.3],
            kernel: KernelSpec::epanechnikov(1),
        };
        let sel = select_pairs(&s, 20).unwrap();
        let cv = cv_criterion(&s, 0.3, &config, &sel).unwrap();
        assert!(cv.value > 0.0);
    }

    #[test]
    fn criterion_invariant_to_pair_order_and_translation() {
        let s = random_sample(30, 13);
        let config = CvConfig {
            k: ConcordanceKind::G2,
            n_pairs: 25,
            h_grid: vec![0.25],
            kernel: KernelSpec::epanechnikov(1),
        };
        let sel = select_pairs(&s, 25).unwrap();
        let mut rev = sel.clone();
        rev.pairs.reverse();
        let a = cv_criterion(&s, 0.25, &config, &sel).unwrap();
        let b = cv_criterion(&s, 0.25, &config, &rev).unwrap();
        assert_abs_diff_eq!(a.value, b.value, epsilon = 1e-13);

        let shifted = Sample::univariate(
            s.x1().to_vec(),
            s.x2().to_vec(),
            s.z_flat().iter().map(|&z| z + 5.0).collect(),
        )
        .unwrap();
        let sel_shifted = select_pairs(&shifted, 25).unwrap();
        assert_eq!(sel.pairs, sel_shifted.pairs);
        let c = cv_criterion(&shifted, 0.25, &config, &sel_shifted).unwrap();
        assert_abs_diff_eq!(a.value, c.value, epsilon = 1e-10);
    }

    #[test]
    fn cv_select_basics() {
        let s = random_sample(40, 4);
        let mut config = CvConfig::default_for(&s, ConcordanceKind::G2, 50).unwrap();
        config.h_grid = vec![0.3];
        let one = cv_select(&s, &config).unwrap();
        assert_eq!(one.h_cv, 0.3);

        config.h_grid = geometric_grid(0.05, 1.0, 10);
        let sel = cv_select(&s, &config).unwrap();
        assert!(config.h_grid.contains(&sel.h_cv));
        // duplicated grid entry does not change the selection
        let mut dup = config.clone();
        dup.h_grid.push(config.h_grid[3]);
        dup.h_grid.sort_by(f64::total_cmp);
        let sel2 = cv_select(&s, &dup).unwrap();
        assert_eq!(sel.h_cv, sel2.h_cv);
    }

    /// The "naively localized" criterion that weights pairs by K_h(Z_i - Z_j)
    /// itself. Kept as a negative example: it tends to decrease with h, so it
    /// does not select a useful bandwidth. Not exposed in the CLI.
    fn cv_dm(sample: &Sample, h: f64, k: ConcordanceKind, kernel: &KernelSpec) -> f64 {
        let n = sample.len();
        let kind = tau_kind_of(k);
        let mut acc = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                let mut v = vec![0.0; sample.dim()];
                for (d, (a, b)) in sample.z(i).iter().zip(sample.z(j)).enumerate() {
                    v[d] = a - b;
                }
                let w = kernel.scaled_evaluate(h, &v).unwrap();
                if w == 0.0 {
                    continue;
                }
                if let Ok(t) = tau_hat_leave_pair_out(kind, sample, (i, j), kernel, h) {
                    let gi = estimators::g(k, sample.x(i), sample.x(j));
                    let gj = estimators::g(k, sample.x(j), sample.x(i));
                    acc += ((gi - t.value).powi(2) + (gj - t.value).powi(2)) * w;
                }
            }
        }
        2.0 / (n * (n - 1)) as f64 * acc
    }

    #[test]
    fn cv_dm_is_typically_decreasing_in_h() {
        let s = random_sample(60, 21);
        let spec = KernelSpec::epanechnikov(1);
        let hs = [0.1, 0.2, 0.4, 0.8];
        let vals: Vec<f64> = hs
            .iter()
            .map(|&h| cv_dm(&s, h, ConcordanceKind::G2, &spec))
            .collect();
        // mostly decreasing: the last value is below the first
        assert!(vals.last().unwrap() < vals.first().unwrap(), "{vals:?}");
    }
}
