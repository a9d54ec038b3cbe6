//! Command-line front end: estimate, cv-bandwidth, bounds, simulate,
//! cv-study. Every stochastic command takes a --seed; outputs are
//! deterministic given the resolved parameters, independent of --threads.

use clap::{Args, Parser, Subcommand};
use condtau::bandwidth::{self, CvConfig};
use condtau::bounds::{self, DensityConstants};
use condtau::error::Error;
use condtau::estimators::{self, ConcordanceKind, TauKind};
use condtau::inference;
use condtau::io;
use condtau::kernels::{KernelFamily, KernelSpec};
use condtau::sample::Sample;
use condtau::simulation::{self, HSource, MCConfig, SettingId, SettingSpec};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "condtau", version, about = "Conditional Kendall's tau estimation")]
struct Cli {
    /// Number of worker threads (default: machine parallelism).
    /// Also settable through CONDTAU_THREADS.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate the conditional Kendall's tau at query points.
    Estimate(EstimateArgs),
    /// Select a bandwidth by leave-pair-out cross-validation.
    CvBandwidth(CvBandwidthArgs),
    /// Evaluate the finite-sample positivity or deviation bound.
    Bounds(BoundsArgs),
    /// Run the Monte Carlo study on a simulation setting.
    Simulate(SimulateArgs),
    /// Study the distribution of the cross-validated bandwidth over
    /// sample sizes.
    CvStudy(CvStudyArgs),
}

#[derive(Args)]
struct EstimateArgs {
    /// CSV file with header x1,x2,z1[,z2,...].
    #[arg(long)]
    input: PathBuf,
    /// Query points: comma-separated, coordinates joined by ':' when p > 1.
    #[arg(long, conflicts_with = "z_grid")]
    z: Option<String>,
    /// Linear grid lo:hi:count of query points (p = 1 only).
    #[arg(long)]
    z_grid: Option<String>,
    #[arg(long, default_value = "tilde")]
    estimator: String,
    #[arg(long, default_value = "epanechnikov")]
    kernel: String,
    /// A number, rot:<alpha>, or cv.
    #[arg(long, default_value = "rot:1.0")]
    bandwidth: String,
    /// Pairs kept by cross-validation when --bandwidth cv.
    #[arg(long, default_value_t = 1000)]
    n_pairs: usize,
    /// Confidence level; adds se,ci_lo,ci_hi,var_clamped columns.
    #[arg(long)]
    ci: Option<f64>,
    /// Clip confidence intervals to [-1, 1].
    #[arg(long, default_value_t = false)]
    truncate_ci: bool,
    /// Output CSV path (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CvBandwidthArgs {
    #[arg(long)]
    input: PathBuf,
    /// Concordance function index 1, 2 or 3.
    #[arg(long, default_value_t = 2)]
    k: u8,
    #[arg(long, default_value_t = 1000)]
    n_pairs: usize,
    /// Geometric bandwidth grid lo:hi:count (default: [0.25,4] x rule of thumb).
    #[arg(long)]
    grid: Option<String>,
    #[arg(long, default_value = "epanechnikov")]
    kernel: String,
    /// Output CSV path for the h,cv curve (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BoundsArgs {
    /// positivity or deviation.
    #[arg(long)]
    prop: String,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    h: f64,
    #[arg(long, default_value_t = 1)]
    p: usize,
    /// Estimator index (deviation only).
    #[arg(long, default_value_t = 2)]
    k: u8,
    #[arg(long)]
    t: Option<f64>,
    #[arg(long)]
    t_prime: Option<f64>,
    #[arg(long, default_value = "epanechnikov")]
    kernel: String,
    /// TOML file with f_min, f_max, f_z, c_k_alpha, c_ktilde2, c_xz_alpha, alpha.
    #[arg(long)]
    constants: PathBuf,
}

#[derive(Args)]
struct SimulateArgs {
    /// TOML file supplying any of the flags below; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// 1 or 2.
    #[arg(long)]
    setting: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    reps: Option<usize>,
    /// Comma-separated multipliers of the base bandwidth.
    #[arg(long)]
    alpha_h: Option<String>,
    /// Comma-separated estimator names, or "all".
    #[arg(long)]
    estimators: Option<String>,
    /// rot or cv.
    #[arg(long)]
    bandwidth_source: Option<String>,
    #[arg(long)]
    n_pairs: Option<usize>,
    #[arg(long)]
    kernel: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Integrated-metrics CSV.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Local-curves CSV (z,estimator,alpha_h,bias,sd,mse).
    #[arg(long)]
    local_out: Option<PathBuf>,
}

#[derive(Deserialize, Default)]
struct SimulateFile {
    setting: Option<String>,
    n: Option<usize>,
    reps: Option<usize>,
    alpha_h: Option<Vec<f64>>,
    estimators: Option<Vec<String>>,
    bandwidth_source: Option<String>,
    n_pairs: Option<usize>,
    kernel: Option<String>,
    seed: Option<u64>,
    out: Option<PathBuf>,
    local_out: Option<PathBuf>,
}

#[derive(Args)]
struct CvStudyArgs {
    /// 1 or 2.
    #[arg(long, default_value = "2")]
    setting: String,
    /// Comma-separated sample sizes.
    #[arg(long, default_value = "100,500,1000,2000")]
    n: String,
    #[arg(long, default_value_t = 100)]
    reps: usize,
    #[arg(long, default_value_t = 1000)]
    n_pairs: usize,
    /// Comma-separated multipliers of the selected bandwidth; adds an
    /// integrated-MSE table per multiplier.
    #[arg(long)]
    multipliers: Option<String>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Per-multiplier integrated MSE CSV.
    #[arg(long)]
    imse_out: Option<PathBuf>,
}

/// Parameters and provenance written next to every file output.
#[derive(Serialize)]
struct RunManifest {
    command: String,
    version: String,
    seed: Option<u64>,
    timestamp_unix: u64,
    parameters: BTreeMap<String, String>,
}

impl RunManifest {
    fn new(command: &str, seed: Option<u64>, parameters: BTreeMap<String, String>) -> Self {
        RunManifest {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed,
            timestamp_unix: std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
            parameters,
        }
    }

    fn write_alongside(&self, out: &Path) -> Result<(), String> {
        let path = out.with_extension(format!(
            "{}manifest.toml",
            out.extension().map(|e| format!("{}.", e.to_string_lossy())).unwrap_or_default()
        ));
        let body = toml::to_string_pretty(self).map_err(|e| e.to_string())?;
        std::fs::write(&path, body).map_err(|e| format!("{}: {e}", path.display()))
    }
}

fn parse_f64_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| format!("not a number: '{t}'")))
        .collect()
}

fn parse_usize_list(s: &str) -> Result<Vec<usize>, String> {
    s.split(',')
        .map(|t| t.trim().parse::<usize>().map_err(|_| format!("not an integer: '{t}'")))
        .collect()
}

/// lo:hi:count, linearly spaced.
fn parse_linear_grid(s: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("expected lo:hi:count, got '{s}'"));
    }
    let lo: f64 = parts[0].parse().map_err(|_| format!("bad grid lo '{}'", parts[0]))?;
    let hi: f64 = parts[1].parse().map_err(|_| format!("bad grid hi '{}'", parts[1]))?;
    let count: usize = parts[2].parse().map_err(|_| format!("bad grid count '{}'", parts[2]))?;
    if count < 1 || hi < lo {
        return Err(format!("invalid grid '{s}'"));
    }
    if count == 1 {
        return Ok(vec![lo]);
    }
    let step = (hi - lo) / (count - 1) as f64;
    Ok((0..count).map(|i| lo + step * i as f64).collect())
}

fn parse_query_points(args: &EstimateArgs, p: usize) -> Result<Vec<Vec<f64>>, String> {
    if let Some(grid) = &args.z_grid {
        if p != 1 {
            return Err("--z-grid requires a univariate covariate".into());
        }
        return Ok(parse_linear_grid(grid)?.into_iter().map(|z| vec![z]).collect());
    }
    let spec = args.z.as_deref().ok_or("one of --z or --z-grid is required")?;
    spec.split(',')
        .map(|point| {
            let coords: Result<Vec<f64>, String> = point
                .split(':')
                .map(|c| c.trim().parse::<f64>().map_err(|_| format!("bad coordinate '{c}'")))
                .collect();
            let coords = coords?;
            if coords.len() != p {
                return Err(format!("query point '{point}' has {} coordinates, covariate dimension is {p}", coords.len()));
            }
            Ok(coords)
        })
        .collect()
}

fn parse_estimators(s: &str) -> Result<Vec<TauKind>, String> {
    if s == "all" {
        return Ok(vec![TauKind::Tau1, TauKind::Tau2, TauKind::Tau3, TauKind::TauTilde]);
    }
    s.split(',')
        .map(|t| TauKind::parse(t.trim()).map_err(|e| e.to_string()))
        .collect()
}

fn concordance_of(kind: TauKind) -> ConcordanceKind {
    match kind {
        TauKind::Tau1 => ConcordanceKind::G1,
        TauKind::Tau2 | TauKind::TauTilde => ConcordanceKind::G2,
        TauKind::Tau3 => ConcordanceKind::G3,
    }
}

fn emit(out: Option<&Path>, header: &str, rows: &[Vec<String>]) -> Result<(), String> {
    match out {
        Some(path) => io::write_table(path, header, rows).map_err(|e| e.to_string()),
        None => {
            println!("{header}");
            for row in rows {
                println!("{}", row.join(","));
            }
            Ok(())
        }
    }
}

fn load_sample(path: &Path, kernel_name: &str) -> Result<(Sample, KernelSpec), String> {
    let sample = io::read_sample_csv(path).map_err(|e| e.to_string())?;
    let family = KernelFamily::parse(kernel_name).map_err(|e| e.to_string())?;
    let spec = KernelSpec::new(family, sample.dim(), 2).map_err(|e| e.to_string())?;
    Ok((sample, spec))
}

fn resolve_bandwidth(
    sample: &Sample,
    spec: &KernelSpec,
    bandwidth: &str,
    kind: TauKind,
    n_pairs: usize,
) -> Result<f64, String> {
    if let Some(alpha) = bandwidth.strip_prefix("rot:") {
        let alpha: f64 = alpha.parse().map_err(|_| format!("bad rot multiplier '{alpha}'"))?;
        return bandwidth::rule_of_thumb(sample, alpha).map_err(|e| e.to_string());
    }
    if bandwidth == "rot" {
        return bandwidth::rule_of_thumb(sample, 1.0).map_err(|e| e.to_string());
    }
    if bandwidth == "cv" {
        let total = sample.len() * (sample.len() - 1) / 2;
        let mut config = CvConfig::default_for(sample, concordance_of(kind), n_pairs.min(total))
            .map_err(|e| e.to_string())?;
        config.kernel = *spec;
        return Ok(bandwidth::cv_select(sample, &config).map_err(|e| e.to_string())?.h_cv);
    }
    bandwidth
        .parse::<f64>()
        .map_err(|_| format!("bandwidth must be a number, rot:<alpha> or cv, got '{bandwidth}'"))
}

fn fmt(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else {
        format!("{v}")
    }
}

fn cmd_estimate(args: &EstimateArgs) -> Result<(), String> {
    let (sample, spec) = load_sample(&args.input, &args.kernel)?;
    let kind = TauKind::parse(&args.estimator).map_err(|e| e.to_string())?;
    let points = parse_query_points(args, sample.dim())?;
    let h = resolve_bandwidth(&sample, &spec, &args.bandwidth, kind, args.n_pairs)?;
    if let Some(level) = args.ci {
        if !(0.0 < level && level < 1.0) {
            return Err(format!("--ci level must be in (0,1), got {level}"));
        }
    }
    let mut header = if sample.dim() == 1 {
        "z,estimate,s_n,n_effective".to_string()
    } else {
        let zs: Vec<String> = (1..=sample.dim()).map(|d| format!("z{d}")).collect();
        format!("{},estimate,s_n,n_effective", zs.join(","))
    };
    if args.ci.is_some() {
        header.push_str(",se,ci_lo,ci_hi,var_clamped");
    }
    let mut rows = Vec::with_capacity(points.len());
    for z in &points {
        let mut row: Vec<String> = z.iter().map(|&c| fmt(c)).collect();
        match estimators::tau_hat(kind, &sample, z, &spec, h) {
            Ok(est) => {
                row.push(fmt(est.value));
                row.push(fmt(est.s_n));
                row.push(est.n_effective.to_string());
                if let Some(level) = args.ci {
                    match inference::estimate_variance(kind, &sample, z, &spec, h) {
                        Ok(var) => {
                            let ci = inference::confidence_interval(
                                &est,
                                &var,
                                sample.len(),
                                h,
                                sample.dim(),
                                level,
                                args.truncate_ci,
                            )
                            .map_err(|e| e.to_string())?;
                            row.push(fmt(ci.standard_error));
                            row.push(fmt(ci.lower));
                            row.push(fmt(ci.upper));
                            row.push(var.clamped.to_string());
                        }
                        Err(e) => {
                            eprintln!("warning: no variance at z = {z:?}: {e}");
                            row.extend(["nan".into(), "nan".into(), "nan".into(), "false".into()]);
                        }
                    }
                }
            }
            Err(e @ (Error::AllWeightsZero { .. } | Error::DegenerateWindow { .. })) => {
                eprintln!("warning: estimator undefined at z = {z:?}: {e}");
                row.extend(["nan".into(), "nan".into(), "0".into()]);
                if args.ci.is_some() {
                    row.extend(["nan".into(), "nan".into(), "nan".into(), "false".into()]);
                }
            }
            Err(e) => return Err(e.to_string()),
        }
        rows.push(row);
    }
    emit(args.out.as_deref(), &header, &rows)?;
    if let Some(out) = &args.out {
        let mut params = BTreeMap::new();
        params.insert("input".into(), args.input.display().to_string());
        params.insert("estimator".into(), kind.name().into());
        params.insert("kernel".into(), args.kernel.clone());
        params.insert("bandwidth".into(), args.bandwidth.clone());
        params.insert("h_resolved".into(), fmt(h));
        if let Some(level) = args.ci {
            params.insert("ci".into(), fmt(level));
            params.insert("truncate_ci".into(), args.truncate_ci.to_string());
        }
        RunManifest::new("estimate", None, params).write_alongside(out)?;
    }
    Ok(())
}

fn cmd_cv_bandwidth(args: &CvBandwidthArgs) -> Result<(), String> {
    let (sample, spec) = load_sample(&args.input, &args.kernel)?;
    let k = ConcordanceKind::from_index(args.k).map_err(|e| e.to_string())?;
    let total = sample.len() * (sample.len() - 1) / 2;
    let mut config = CvConfig::default_for(&sample, k, args.n_pairs.min(total))
        .map_err(|e| e.to_string())?;
    config.kernel = spec;
    if let Some(grid) = &args.grid {
        let parts: Vec<&str> = grid.split(':').collect();
        if parts.len() != 3 {
            return Err(format!("expected --grid lo:hi:count, got '{grid}'"));
        }
        let lo: f64 = parts[0].parse().map_err(|_| "bad grid lo".to_string())?;
        let hi: f64 = parts[1].parse().map_err(|_| "bad grid hi".to_string())?;
        let count: usize = parts[2].parse().map_err(|_| "bad grid count".to_string())?;
        if !(lo > 0.0 && hi >= lo && count >= 1) {
            return Err(format!("invalid bandwidth grid '{grid}'"));
        }
        config.h_grid = bandwidth::geometric_grid(lo, hi, count);
    }
    let sel = bandwidth::cv_select(&sample, &config).map_err(|e| e.to_string())?;
    let rows: Vec<Vec<String>> = sel
        .curve
        .iter()
        .map(|pt| vec![fmt(pt.h), pt.value.map(fmt).unwrap_or_else(|| "nan".into())])
        .collect();
    emit(args.out.as_deref(), "h,cv", &rows)?;
    eprintln!("selected h = {}", sel.h_cv);
    if let Some(out) = &args.out {
        let mut params = BTreeMap::new();
        params.insert("input".into(), args.input.display().to_string());
        params.insert("k".into(), args.k.to_string());
        params.insert("n_pairs".into(), args.n_pairs.to_string());
        params.insert("h_cv".into(), fmt(sel.h_cv));
        RunManifest::new("cv-bandwidth", None, params).write_alongside(out)?;
    }
    Ok(())
}

fn cmd_bounds(args: &BoundsArgs) -> Result<(), String> {
    let body = std::fs::read_to_string(&args.constants)
        .map_err(|e| format!("{}: {e}", args.constants.display()))?;
    let dc: DensityConstants =
        toml::from_str(&body).map_err(|e| format!("{}: {e}", args.constants.display()))?;
    let family = KernelFamily::parse(&args.kernel).map_err(|e| e.to_string())?;
    let kc = KernelSpec::new(family, args.p, 2).map_err(|e| e.to_string())?.constants();
    let result = match args.prop.as_str() {
        "positivity" => bounds::positivity_bound(args.n, args.h, args.p, &kc, &dc),
        "deviation" => {
            let t = args.t.ok_or("--t is required for the deviation bound")?;
            let tp = args.t_prime.ok_or("--t-prime is required for the deviation bound")?;
            bounds::deviation_bound(args.k, args.n, args.h, args.p, t, tp, &kc, &dc)
        }
        other => return Err(format!("--prop must be positivity or deviation, got '{other}'")),
    }
    .map_err(|e| e.to_string())?;
    println!("prop,{}", args.prop);
    for (name, ok) in &result.conditions {
        println!("condition,{name},{ok}");
    }
    println!("threshold_x,{}", fmt(result.threshold_x));
    println!("raw_bound,{}", fmt(result.raw_bound));
    println!("prob_bound,{}", fmt(result.prob_bound));
    Ok(())
}

fn cmd_simulate(args: &SimulateArgs) -> Result<(), String> {
    let file: SimulateFile = match &args.config {
        Some(path) => {
            let body = std::fs::read_to_string(path)
                .map_err(|e| format!("{}: {e}", path.display()))?;
            toml::from_str(&body).map_err(|e| format!("{}: {e}", path.display()))?
        }
        None => SimulateFile::default(),
    };
    let setting_name = args
        .setting
        .clone()
        .or(file.setting)
        .ok_or("--setting is required (flag or config file)")?;
    let id = SettingId::parse(&setting_name).map_err(|e| e.to_string())?;
    let n = args.n.or(file.n).ok_or("--n is required")?;
    let reps = args.reps.or(file.reps).unwrap_or(500);
    let alpha_h = match &args.alpha_h {
        Some(s) => parse_f64_list(s)?,
        None => file.alpha_h.unwrap_or_else(|| vec![1.0]),
    };
    let kinds = match &args.estimators {
        Some(s) => parse_estimators(s)?,
        None => match file.estimators {
            Some(names) => parse_estimators(&names.join(","))?,
            None => parse_estimators("all")?,
        },
    };
    let source = args
        .bandwidth_source
        .clone()
        .or(file.bandwidth_source)
        .unwrap_or_else(|| "rot".into());
    let n_pairs = args.n_pairs.or(file.n_pairs).unwrap_or(1000);
    let bandwidth = match source.as_str() {
        "rot" => HSource::RuleOfThumb { alpha_h: alpha_h.clone() },
        "cv" => HSource::CrossValidation { n_pairs, alpha_h: alpha_h.clone() },
        other => return Err(format!("--bandwidth-source must be rot or cv, got '{other}'")),
    };
    let kernel_name = args.kernel.clone().or(file.kernel).unwrap_or_else(|| "epanechnikov".into());
    let family = KernelFamily::parse(&kernel_name).map_err(|e| e.to_string())?;
    let seed = args.seed.or(file.seed).unwrap_or(1);
    let out = args.out.clone().or(file.out);
    let local_out = args.local_out.clone().or(file.local_out);

    let config = MCConfig {
        setting: SettingSpec { id, n, seed },
        reps,
        kinds: kinds.clone(),
        bandwidth,
        z_grid: simulation::default_grid(id),
        kernel: KernelSpec::new(family, 1, 2).map_err(|e| e.to_string())?,
    };
    let report = simulation::run_mc(&config).map_err(|e| e.to_string())?;

    let rows: Vec<Vec<String>> = report
        .cells
        .iter()
        .map(|c| {
            let undefined: usize = c.local.iter().map(|l| l.undefined).sum();
            vec![
                c.kind.name().to_string(),
                fmt(c.alpha_h),
                fmt(c.ibias),
                fmt(c.isd),
                fmt(c.imse),
                undefined.to_string(),
            ]
        })
        .collect();
    emit(out.as_deref(), "estimator,alpha_h,ibias,isd,imse,undefined", &rows)?;

    if let Some(path) = &local_out {
        let mut rows = Vec::new();
        for c in &report.cells {
            for l in &c.local {
                rows.push(vec![
                    fmt(l.z),
                    c.kind.name().to_string(),
                    fmt(c.alpha_h),
                    fmt(l.bias),
                    fmt(l.sd),
                    fmt(l.mse),
                ]);
            }
        }
        io::write_table(path, "z,estimator,alpha_h,bias,sd,mse", &rows)
            .map_err(|e| e.to_string())?;
    }

    let mut params = BTreeMap::new();
    params.insert("setting".into(), setting_name);
    params.insert("n".into(), n.to_string());
    params.insert("reps".into(), reps.to_string());
    params.insert(
        "alpha_h".into(),
        alpha_h.iter().map(|a| fmt(*a)).collect::<Vec<_>>().join(","),
    );
    params.insert(
        "estimators".into(),
        kinds.iter().map(|k| k.name()).collect::<Vec<_>>().join(","),
    );
    params.insert("bandwidth_source".into(), source);
    params.insert("n_pairs".into(), n_pairs.to_string());
    params.insert("kernel".into(), kernel_name);
    let manifest = RunManifest::new("simulate", Some(seed), params);
    if let Some(out) = &out {
        manifest.write_alongside(out)?;
    }
    if let Some(path) = &local_out {
        manifest.write_alongside(path)?;
    }
    Ok(())
}

fn cmd_cv_study(args: &CvStudyArgs) -> Result<(), String> {
    let id = SettingId::parse(&args.setting).map_err(|e| e.to_string())?;
    let n_values = parse_usize_list(&args.n)?;
    let multipliers = match &args.multipliers {
        Some(s) => parse_f64_list(s)?,
        None => Vec::new(),
    };
    let grid = simulation::default_grid(id);
    let rows = simulation::run_cv_study(
        id,
        &n_values,
        args.reps,
        args.n_pairs,
        &multipliers,
        args.seed,
        &grid,
    )
    .map_err(|e| e.to_string())?;
    let table: Vec<Vec<String>> = rows
        .iter()
        .map(|r| vec![r.n.to_string(), fmt(r.mean_h_cv), fmt(r.sd_h_cv), fmt(r.h_ref)])
        .collect();
    emit(args.out.as_deref(), "n,mean_h_cv,sd_h_cv,h_ref", &table)?;
    if let Some(path) = &args.imse_out {
        let mut imse_rows = Vec::new();
        for r in &rows {
            for &(mult, imse) in &r.multiplier_imse {
                imse_rows.push(vec![r.n.to_string(), fmt(mult), fmt(imse)]);
            }
        }
        io::write_table(path, "n,multiplier,imse", &imse_rows).map_err(|e| e.to_string())?;
    }
    if let Some(out) = &args.out {
        let mut params = BTreeMap::new();
        params.insert("setting".into(), args.setting.clone());
        params.insert("n".into(), args.n.clone());
        params.insert("reps".into(), args.reps.to_string());
        params.insert("n_pairs".into(), args.n_pairs.to_string());
        RunManifest::new("cv-study", Some(args.seed), params).write_alongside(out)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let threads = cli.threads.or_else(|| {
        std::env::var("CONDTAU_THREADS").ok().and_then(|v| v.parse().ok())
    });
    if let Some(t) = threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    let result = match &cli.command {
        Command::Estimate(args) => cmd_estimate(args),
        Command::CvBandwidth(args) => cmd_cv_bandwidth(args),
        Command::Bounds(args) => cmd_bounds(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::CvStudy(args) => cmd_cv_study(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(1)
        }
    }
}
