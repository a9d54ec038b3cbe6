//! Acceptance suite: one test per shipped guarantee, each printing a
//! PASS line (visible with --nocapture). Oracles here are independent
//! transcriptions of the defining formulas, not calls into the optimized
//! code paths they check.

use condtau::bandwidth;
use condtau::bounds::{self, DensityConstants};
use condtau::estimators::{self, ConcordanceKind, TauKind};
use condtau::inference;
use condtau::kernels::{KernelConstants, KernelSpec};
use condtau::sample::Sample;
use condtau::simulation::{self, HSource, MCConfig, SettingId, SettingSpec};
use condtau::weights;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

fn random_sample(n: usize, seed: u64) -> Sample {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x1 = (0..n).map(|_| rng.gen::<f64>()).collect();
    let x2 = (0..n).map(|_| rng.gen::<f64>()).collect();
    let z = (0..n).map(|_| rng.gen::<f64>()).collect();
    Sample::univariate(x1, x2, z).unwrap()
}

#[test]
fn acceptance_01_algebraic_identity() {
    let start = Instant::now();
    let spec = KernelSpec::epanechnikov(1);
    let mut rng = ChaCha8Rng::seed_from_u64(1001);
    let mut checked = 0;
    while checked < 500 {
        let n = rng.gen_range(5..60);
        let s = random_sample(n, rng.gen());
        let z = rng.gen::<f64>();
        let h = rng.gen_range(0.05..1.5);
        if let Ok(all) = estimators::tau_all(&s, &[z], &spec, h) {
            assert!((all.tau1 + all.s_n - all.tau2).abs() < 1e-12);
            assert!((all.tau3 - all.s_n - all.tau2).abs() < 1e-12);
            checked += 1;
        }
    }
    assert!(start.elapsed().as_secs_f64() < 5.0, "took {:?}", start.elapsed());
    println!("criterion 1: PASS - tau1 + s_n = tau2 = tau3 - s_n on 500 draws (1e-12)");
}

#[test]
fn acceptance_02_range_invariants() {
    let spec = KernelSpec::epanechnikov(1);
    let mut rng = ChaCha8Rng::seed_from_u64(1002);
    let mut checked = 0;
    while checked < 500 {
        let n = rng.gen_range(5..60);
        let s = random_sample(n, rng.gen());
        let z = rng.gen::<f64>();
        let h = rng.gen_range(0.05..1.5);
        if let Ok(all) = estimators::tau_all(&s, &[z], &spec, h) {
            let eps = 1e-12;
            let sn = all.s_n;
            assert!(all.tau1 >= -1.0 - eps && all.tau1 <= 1.0 - 2.0 * sn + eps);
            assert!(all.tau2 >= -1.0 + sn - eps && all.tau2 <= 1.0 - sn + eps);
            assert!(all.tau3 >= -1.0 + 2.0 * sn - eps && all.tau3 <= 1.0 + eps);
            if let Some(t) = all.tau_tilde {
                assert!((-1.0 - eps..=1.0 + eps).contains(&t));
            }
            checked += 1;
        }
    }
    println!("criterion 2: PASS - range invariants on 500 tie-free cases");
}

/// Independent double-loop transcription of the three weighted sums, in the
/// same row-major pair order as the production path but over all indices
/// (zero weights contribute exact 0.0 terms).
fn oracle_tau_all(s: &Sample, z: f64, spec: &KernelSpec, h: f64) -> Option<(f64, f64, f64, f64)> {
    let wv = weights::nw_weights(s, &[z], spec, h).ok()?;
    let w = &wv.weights;
    let n = s.len();
    let (mut sum1, mut sum2, mut sum3) = (0.0, 0.0, 0.0);
    for i in 0..n {
        if w[i] == 0.0 {
            continue;
        }
        for j in 0..n {
            if w[j] == 0.0 {
                continue;
            }
            let ww = w[i] * w[j];
            let (xi, xj) = (s.x(i), s.x(j));
            if xi.0 < xj.0 && xi.1 < xj.1 {
                sum1 += ww;
            }
            let prod = (xi.0 - xj.0) * (xi.1 - xj.1);
            if prod > 0.0 {
                sum2 += ww;
            } else if prod < 0.0 {
                sum2 -= ww;
            }
            if xi.0 < xj.0 && xi.1 > xj.1 {
                sum3 += ww;
            }
        }
    }
    Some((4.0 * sum1 - 1.0, sum2, 1.0 - 4.0 * sum3, wv.s_n))
}

/// Brute-force triple loop for the conditional moment of the plug-in
/// variance.
fn oracle_gg(k: ConcordanceKind, s: &Sample, z: f64, spec: &KernelSpec, h: f64) -> Option<f64> {
    let wv = weights::nw_weights(s, &[z], spec, h).ok()?;
    let w = &wv.weights;
    let n = s.len();
    let (mut num, mut den) = (0.0, 0.0);
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                if a == b || a == c || b == c {
                    continue;
                }
                let p = w[a] * w[b] * w[c];
                num += p * estimators::g(k, s.x(b), s.x(a)) * estimators::g(k, s.x(c), s.x(a));
                den += p;
            }
        }
    }
    if den <= 0.0 {
        return None;
    }
    Some(num / den)
}

#[test]
fn acceptance_03_oracle_equivalence() {
    let spec = KernelSpec::epanechnikov(1);
    let mut rng = ChaCha8Rng::seed_from_u64(1003);
    let mut checked = 0;
    while checked < 200 {
        let n = rng.gen_range(5..=200);
        let s = random_sample(n, rng.gen());
        let z = rng.gen::<f64>();
        let h = rng.gen_range(0.05..1.0);
        if let (Ok(all), Some((t1, t2, t3, sn))) = (
            estimators::tau_all(&s, &[z], &spec, h),
            oracle_tau_all(&s, z, &spec, h),
        ) {
            assert_eq!(all.tau1, t1);
            assert_eq!(all.tau2, t2);
            assert_eq!(all.tau3, t3);
            assert_eq!(all.s_n, sn);
            checked += 1;
        }
    }
    let mut var_checked = 0;
    while var_checked < 20 {
        let n = rng.gen_range(8..=15);
        let s = random_sample(n, rng.gen());
        let (z, h) = (0.5, 0.5);
        for kind in [TauKind::Tau1, TauKind::Tau2, TauKind::Tau3] {
            let k = match kind {
                TauKind::Tau1 => ConcordanceKind::G1,
                TauKind::Tau3 => ConcordanceKind::G3,
                _ => ConcordanceKind::G2,
            };
            if let (Ok(v), Some(gg)) = (
                inference::estimate_variance(kind, &s, &[z], &spec, h),
                oracle_gg(k, &s, z, &spec, h),
            ) {
                let f_z = weights::kde(&s, &[z], &spec, h).unwrap();
                let tau = estimators::tau_hat(kind, &s, &[z], &spec, h).unwrap().value;
                let raw = 4.0 * spec.constants().int_k2 / f_z * (gg - tau * tau);
                assert!((v.h_entry - raw.max(0.0)).abs() < 1e-12);
                var_checked += 1;
            }
        }
    }
    println!("criterion 3: PASS - estimators exact vs double loop (200); variance vs triple loop (1e-12)");
}

#[test]
fn acceptance_04_rank_invariance() {
    let spec = KernelSpec::epanechnikov(1);
    let mut rng = ChaCha8Rng::seed_from_u64(1004);
    let rank_map = |v: &[f64]| -> Vec<f64> {
        let mut order: Vec<usize> = (0..v.len()).collect();
        order.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
        let mut ranks = vec![0.0; v.len()];
        for (r, &i) in order.iter().enumerate() {
            ranks[i] = r as f64;
        }
        ranks
    };
    for _ in 0..100 {
        let n = rng.gen_range(10..50);
        let s = random_sample(n, rng.gen());
        let z = rng.gen::<f64>();
        let h = rng.gen_range(0.1..1.0);
        let base: Vec<Option<f64>> = [TauKind::Tau1, TauKind::Tau2, TauKind::Tau3, TauKind::TauTilde]
            .iter()
            .map(|&k| estimators::tau_hat(k, &s, &[z], &spec, h).ok().map(|e| e.value))
            .collect();
        type Transform<'a> = Box<dyn Fn(&[f64]) -> Vec<f64> + 'a>;
        let transforms: [(&str, Transform); 3] = [
            ("exp", Box::new(|v: &[f64]| v.iter().map(|&x| x.exp()).collect())),
            ("cubic", Box::new(|v: &[f64]| v.iter().map(|&x| x * x * x + x).collect())),
            ("rank", Box::new(|v: &[f64]| rank_map(v))),
        ];
        for (name, f) in &transforms {
            let mapped =
                Sample::univariate(f(s.x1()), f(s.x2()), s.z_flat().to_vec()).unwrap();
            for (i, &k) in [TauKind::Tau1, TauKind::Tau2, TauKind::Tau3, TauKind::TauTilde]
                .iter()
                .enumerate()
            {
                let v = estimators::tau_hat(k, &mapped, &[z], &spec, h).ok().map(|e| e.value);
                assert_eq!(v, base[i], "transform {name}, kind {k:?}");
            }
        }
    }
    println!("criterion 4: PASS - exp, cubic and rank transforms leave estimates bit-identical (100 instances)");
}

fn imse_and_max_mse(id: SettingId, n: usize, reps: usize, seed: u64) -> (f64, f64) {
    let config = MCConfig {
        setting: SettingSpec { id, n, seed },
        reps,
        kinds: vec![TauKind::TauTilde],
        bandwidth: HSource::RuleOfThumb { alpha_h: vec![1.5] },
        z_grid: simulation::default_grid(id),
        kernel: KernelSpec::epanechnikov(1),
    };
    let report = simulation::run_mc(&config).unwrap();
    let cell = &report.cells[0];
    let max_mse = cell
        .local
        .iter()
        .map(|l| l.mse)
        .filter(|m| m.is_finite())
        .fold(f64::NEG_INFINITY, f64::max);
    (cell.imse, max_mse)
}

#[test]
fn acceptance_05_integrated_mse_ladder() {
    let start = Instant::now();
    let ns = [100usize, 500, 1000, 2000];
    let imse: Vec<f64> = ns
        .iter()
        .map(|&n| imse_and_max_mse(SettingId::Setting1, n, 500, 2024).0)
        .collect();
    let within = |value: f64, reference: f64| (value - reference).abs() <= 0.35 * reference;
    assert!(within(imse[0], 13.4e-3), "n=100: IMSE {} vs 13.4e-3", imse[0]);
    assert!(within(imse[1], 3.57e-3), "n=500: IMSE {} vs 3.57e-3", imse[1]);
    for w in imse.windows(2) {
        assert!(w[1] < w[0], "IMSE not decreasing: {imse:?}");
    }
    assert!(start.elapsed().as_secs() < 1200, "took {:?}", start.elapsed());
    println!(
        "criterion 5: PASS - IMSE ladder {:?} within 35% of references, decreasing ({:?})",
        imse,
        start.elapsed()
    );
}

#[test]
fn acceptance_06_cv_bandwidth_study() {
    let start = Instant::now();
    for (n, want) in [(100usize, 0.40), (500, 0.29), (1000, 0.25), (2000, 0.22)] {
        let h_ref = (n as f64).powf(-0.2);
        assert!((h_ref - want).abs() < 5e-3, "n={n}: h_ref {h_ref}");
    }
    let grid = simulation::default_grid(SettingId::Setting2);
    let rows =
        simulation::run_cv_study(SettingId::Setting2, &[100, 2000], 100, 1000, &[], 2025, &grid)
            .unwrap();
    let (small, large) = (&rows[0], &rows[1]);
    assert!(
        (0.60..=0.94).contains(&small.mean_h_cv),
        "n=100: mean h_cv {}",
        small.mean_h_cv
    );
    assert!(
        (0.21..=0.33).contains(&large.mean_h_cv),
        "n=2000: mean h_cv {}",
        large.mean_h_cv
    );
    assert!(large.sd_h_cv < small.sd_h_cv, "sd not decreasing: {rows:?}");
    assert!(start.elapsed().as_secs() < 1800, "took {:?}", start.elapsed());
    println!(
        "criterion 6: PASS - mean h_cv {:.3} (n=100) and {:.3} (n=2000) in the expected bands, sd decreasing ({:?})",
        small.mean_h_cv,
        large.mean_h_cv,
        start.elapsed()
    );
}

#[test]
fn acceptance_07_clt_coverage() {
    let spec = KernelSpec::epanechnikov(1);
    let setting = SettingSpec { id: SettingId::Setting1, n: 2000, seed: 2026 };
    let reps = 500;
    let mut covered = 0usize;
    let mut standardized = Vec::with_capacity(reps);
    for rep in 0..reps {
        let s = simulation::generate_replication(&setting, rep as u64);
        let h = bandwidth::rule_of_thumb(&s, 1.5).unwrap();
        let est = estimators::tau_tilde(&s, &[0.5], &spec, h).unwrap();
        let var = inference::estimate_variance(TauKind::TauTilde, &s, &[0.5], &spec, h).unwrap();
        let ci = inference::confidence_interval(&est, &var, s.len(), h, 1, 0.95, false).unwrap();
        if ci.lower <= 0.0 && 0.0 <= ci.upper {
            covered += 1;
        }
        if var.h_entry > 0.0 {
            let scale = (s.len() as f64 * h).sqrt();
            standardized.push(scale * est.value / var.h_entry.sqrt());
        }
    }
    let coverage = covered as f64 / reps as f64;
    let m = standardized.len() as f64;
    let mean = standardized.iter().sum::<f64>() / m;
    let var = standardized.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (m - 1.0);
    assert!((0.91..=0.98).contains(&coverage), "coverage {coverage}");
    assert!((0.8..=1.25).contains(&var), "standardized variance {var}");
    println!("criterion 7: PASS - 95% CI coverage {coverage:.3}, standardized variance {var:.3}");
}

#[test]
fn acceptance_08_bound_validity() {
    // regression against the pre-build transcription of the bound formulas
    let kc: KernelConstants = KernelSpec::epanechnikov(1).constants();
    let unit = DensityConstants {
        f_min: 1.0,
        f_max: 1.0,
        f_z: 1.0,
        c_k_alpha: 0.0,
        c_ktilde2: 0.0,
        c_xz_alpha: 1.0,
        alpha: 2,
    };
    let b = bounds::positivity_bound(100, 0.1, 1, &kc, &unit).unwrap();
    assert!((b.raw_bound - 0.9944235659199011).abs() < 1e-12);
    let b = bounds::deviation_bound(1, 100_000, 0.05, 1, 0.1, 0.05, &kc, &unit).unwrap();
    assert!((b.threshold_x - 0.534872).abs() < 1e-12);
    assert!((b.raw_bound - 1.3239372363835962).abs() < 1e-12);

    // empirical validity on simulated data
    let dc = DensityConstants::setting1_interior();
    let spec = KernelSpec::epanechnikov(1);
    let reps = 2000;
    let report = bounds::bound_validity_check(
        SettingSpec { id: SettingId::Setting1, n: 2000, seed: 2027 },
        0.5,
        2,
        0.25,
        0.1,
        0.1,
        &dc,
        reps,
        &spec,
    )
    .unwrap();
    let three_se = |p: f64| 3.0 * (p * (1.0 - p) / reps as f64).sqrt();
    if report.deviation_prob_bound < 1.0 {
        let p = report.deviation_prob_bound;
        assert!(
            report.deviation_violation_freq <= p + three_se(p),
            "deviation: freq {} vs bound {}",
            report.deviation_violation_freq,
            p
        );
    }
    let report_pos = bounds::bound_validity_check(
        SettingSpec { id: SettingId::Setting1, n: 100, seed: 2028 },
        0.5,
        2,
        0.1,
        0.1,
        0.1,
        &dc,
        reps,
        &spec,
    )
    .unwrap();
    let p_zero = 1.0 - report_pos.positivity_prob_bound;
    assert!(report_pos.positivity_prob_bound < 1.0);
    assert!(
        report_pos.zero_density_freq <= p_zero + three_se(p_zero),
        "positivity: freq {} vs allowance {}",
        report_pos.zero_density_freq,
        p_zero
    );
    println!(
        "criterion 8: PASS - regression values match to 1e-12; violation freqs {:.4}/{:.4} within bounds",
        report.deviation_violation_freq, report_pos.zero_density_freq
    );
}

#[test]
fn acceptance_09_consistency_trend() {
    let start = Instant::now();
    for id in [SettingId::Setting1, SettingId::Setting2] {
        let (_, small) = imse_and_max_mse(id, 100, 500, 2029);
        let (_, large) = imse_and_max_mse(id, 2000, 500, 2029);
        assert!(
            large < small,
            "{id:?}: max MSE {large} at n=2000 not below {small} at n=100"
        );
    }
    println!(
        "criterion 9: PASS - max-over-grid MSE decreases from n=100 to n=2000 in both settings ({:?})",
        start.elapsed()
    );
}

#[test]
fn acceptance_10_determinism_golden() {
    let bin = env!("CARGO_BIN_EXE_condtau");
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for threads in ["1", "4", "8"] {
        let out = dir.path().join(format!("report_{threads}.csv"));
        let status = std::process::Command::new(bin)
            .args([
                "--threads", threads,
                "simulate",
                "--setting", "1",
                "--n", "80",
                "--reps", "50",
                "--alpha-h", "1,2",
                "--estimators", "all",
                "--seed", "42",
                "--out", out.to_str().unwrap(),
            ])
            .status()
            .unwrap();
        assert!(status.success());
        outputs.push(std::fs::read(&out).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[1], outputs[2]);
    let golden = include_bytes!("golden/simulate_report.csv");
    assert_eq!(
        outputs[0],
        golden.to_vec(),
        "simulate output differs from the committed golden file"
    );
    println!("criterion 10: PASS - simulate output byte-identical across threads 1/4/8 and to the golden file");
}
