//! Mode drivers.

use fex_core::certificates::{chain_check, khinchin_check};
use fex_core::extension::{sign_stats, DEFAULT_MAX_SIGN_POINTS};
use fex_core::{
    build_peak, canonical_operator, difference_set, greedy_base_set, norm_certified_with_budget,
    optimize_alpha, theorem_bounds, validate_peak, AlphaOptions, Complex64, GroupSpec,
    PeakFunction, PointSet,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::config::{InstanceConfig, Mode, SCHEMA_VERSION};
use crate::error::{CliError, Result};
use crate::report::*;

/// Slack on the canonical `grid_max ≤ √n` check.
pub const UPPER_TOLERANCE: f64 = 1e-6;
/// Slack on every other bound.
pub const BOUND_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    pub progress: bool,
}

impl RunOptions {
    fn note(&self, msg: impl FnOnce() -> String) {
        if self.progress {
            eprintln!("fex: {}", msg());
        }
    }
}

pub fn run(config: &InstanceConfig, mode: Mode, opts: RunOptions) -> Result<ReportDocument> {
    config.validate()?;
    let mut resolved = config.clone();
    resolved.mode = Some(mode);
    let body = match mode {
        Mode::Bounds => ReportBody::Bounds(run_bounds(&resolved, opts)?),
        Mode::Alpha => ReportBody::Alpha(run_alpha(&resolved, opts)?),
        Mode::Chain => ReportBody::Chain(run_chain(&resolved, opts)?),
        Mode::Khinchin => ReportBody::Khinchin(run_khinchin(&resolved, opts)?),
        Mode::Sweep => ReportBody::Sweep(run_sweep(&resolved, opts)?),
    };
    Ok(ReportDocument { schema_version: SCHEMA_VERSION, config: resolved, body })
}

fn alpha_options(config: &InstanceConfig, seed: u64) -> AlphaOptions {
    AlphaOptions {
        resolution: config.phase_grid,
        budget: config.budget,
        seed,
        grid_budget: config.grid_budget,
        ..AlphaOptions::default()
    }
}

fn peak_for(config: &InstanceConfig, spec: &GroupSpec, points: &PointSet) -> Result<PeakFunction> {
    let base = match config.base_set(spec)? {
        Some(base) => base,
        None => greedy_base_set(spec, &difference_set(spec, points)),
    };
    Ok(build_peak(spec, &base)?)
}

fn run_bounds(config: &InstanceConfig, opts: RunOptions) -> Result<BoundsReport> {
    let spec = config.spec()?;
    let points = config.point_set(&spec)?;
    let n = points.len();
    opts.note(|| format!("bounds on {spec} with n = {n}"));
    let (theorem_lower, theorem_upper) = theorem_bounds(n as i64)?;
    let peak = peak_for(config, &spec, &points)?;
    let peak_validation = validate_peak(&peak, &difference_set(&spec, &points))?;

    let mut violations = Vec::new();
    for c in peak_validation.failures() {
        violations.push(format!("peak property {} violated by {:e}", c.name, c.violation));
    }
    if !violations.is_empty() {
        return Ok(BoundsReport {
            n,
            points: points.points().to_vec(),
            theorem_lower,
            theorem_upper,
            base_set: peak.base_set().to_vec(),
            peak_validation,
            canonical: empty_certificate(config.phase_grid),
            sign_max: None,
            rademacher_average: None,
            violations,
        });
    }

    let op = canonical_operator(&spec, &points, &peak)?;
    let canonical = norm_certified_with_budget(&op, config.phase_grid, config.grid_budget)?;
    let signs = if n <= DEFAULT_MAX_SIGN_POINTS { Some(sign_stats(&op)?) } else { None };

    if canonical.grid_max > theorem_upper + UPPER_TOLERANCE {
        violations.push(format!("canonical grid_max {} exceeds √n = {}", canonical.grid_max, theorem_upper));
    }
    if canonical.hi() < theorem_lower - BOUND_TOLERANCE {
        violations.push(format!("certified hi {} is below √(n/2) = {}", canonical.hi(), theorem_lower));
    }
    if let Some(s) = signs {
        if s.max > canonical.hi() + BOUND_TOLERANCE {
            violations.push(format!("sign maximum {} exceeds certified hi {}", s.max, canonical.hi()));
        }
    }

    Ok(BoundsReport {
        n,
        points: points.points().to_vec(),
        theorem_lower,
        theorem_upper,
        base_set: peak.base_set().to_vec(),
        peak_validation,
        canonical,
        sign_max: signs.map(|s| s.max),
        rademacher_average: signs.map(|s| s.average),
        violations,
    })
}

fn empty_certificate(resolution: u32) -> fex_core::NormCertificate {
    fex_core::NormCertificate {
        grid_max: 0.0,
        slack: 0.0,
        interval: [0.0, 0.0],
        resolution,
        maximizer: Vec::new(),
    }
}

fn alpha_violations(report: &fex_core::AlphaReport) -> Vec<String> {
    let mut v = Vec::new();
    if report.optimized.hi() > report.canonical.hi() + BOUND_TOLERANCE {
        v.push(format!(
            "optimized hi {} exceeds canonical hi {}",
            report.optimized.hi(),
            report.canonical.hi()
        ));
    }
    if report.optimized.hi() < report.theorem_lower - BOUND_TOLERANCE {
        v.push(format!("optimized hi {} is below √(n/2) = {}", report.optimized.hi(), report.theorem_lower));
    }
    if report.canonical.grid_max > report.theorem_upper + UPPER_TOLERANCE {
        v.push(format!("canonical grid_max {} exceeds √n", report.canonical.grid_max));
    }
    if report.converged_objective_trace.windows(2).any(|w| w[1] > w[0]) {
        v.push("best-so-far objective trace increases".into());
    }
    v
}

fn run_alpha(config: &InstanceConfig, opts: RunOptions) -> Result<AlphaModeReport> {
    let spec = config.spec()?;
    let points = config.point_set(&spec)?;
    opts.note(|| format!("alpha search on {spec} with n = {}", points.len()));
    let peak = peak_for(config, &spec, &points)?;
    let search = optimize_alpha(&spec, &points, &peak, &alpha_options(config, config.seed))?;
    let violations = alpha_violations(&search.report);
    Ok(AlphaModeReport {
        points: points.points().to_vec(),
        base_set: peak.base_set().to_vec(),
        alpha: search.report,
        violations,
    })
}

fn run_chain(config: &InstanceConfig, opts: RunOptions) -> Result<ChainModeReport> {
    let spec = config.spec()?;
    let points = config.point_set(&spec)?;
    let n = points.len();
    opts.note(|| format!("proof-chain check on {spec} with n = {n}"));
    let (theorem_lower, theorem_upper) = theorem_bounds(n as i64)?;
    let peak = peak_for(config, &spec, &points)?;
    let op = canonical_operator(&spec, &points, &peak)?;
    fex_core::extension::check_grid(n, config.phase_grid, config.grid_budget)?;
    let canonical = chain_check(&op, config.phase_grid)?;
    let search = optimize_alpha(&spec, &points, &peak, &alpha_options(config, config.seed))?;
    let optimized = chain_check(&search.operator, config.phase_grid)?;

    let mut violations = Vec::new();
    for (label, report) in [("canonical", &canonical), ("optimized", &optimized)] {
        for ineq in report.inequalities.iter().filter(|i| !i.passed) {
            violations.push(format!("{label}: {} fails with margin {:e}", ineq.name, ineq.margin));
        }
    }
    Ok(ChainModeReport {
        n,
        points: points.points().to_vec(),
        base_set: peak.base_set().to_vec(),
        theorem_lower,
        theorem_upper,
        canonical,
        optimized,
        violations,
    })
}

fn gaussian(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

fn run_khinchin(config: &InstanceConfig, opts: RunOptions) -> Result<KhinchinBatchReport> {
    let n_max = config.khinchin_n_max;
    if n_max == 0 || n_max > DEFAULT_MAX_SIGN_POINTS {
        return Err(CliError::config(
            "config field `khinchin_n_max`",
            format!("must lie in 1..={DEFAULT_MAX_SIGN_POINTS}"),
        ));
    }
    let vectors: Vec<Vec<Complex64>> = match &config.vectors {
        Some(explicit) => explicit
            .iter()
            .map(|v| v.iter().map(|&[re, im]| Complex64::new(re, im)).collect())
            .collect(),
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            (0..config.samples)
                .map(|_| {
                    let n = rng.random_range(1..=n_max);
                    (0..n).map(|_| gaussian(&mut rng)).collect()
                })
                .collect()
        }
    };
    opts.note(|| format!("exact sign averages for {} vectors", vectors.len()));
    let reports = vectors
        .par_iter()
        .map(|a| khinchin_check(a))
        .collect::<fex_core::Result<Vec<_>>>()?;
    let equality_case = khinchin_check(&[Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)])?;

    let mut violations: Vec<String> = reports
        .iter()
        .enumerate()
        .filter(|(_, r)| !r.passed)
        .map(|(i, r)| format!("vector {i}: ratio {} < 1", r.ratio))
        .collect();
    if (equality_case.ratio - 1.0).abs() > 1e-12 {
        violations.push(format!("equality case ratio {} != 1", equality_case.ratio));
    }
    let worst_ratio = reports.iter().map(|r| r.ratio).fold(f64::INFINITY, f64::min);
    Ok(KhinchinBatchReport {
        samples: reports.len(),
        n_max,
        worst_ratio: if worst_ratio.is_finite() { worst_ratio } else { 1.0 },
        equality_case,
        reports,
        violations,
    })
}

/// Uniform sample of `n` distinct points, reproducible from `(seed, n)`.
pub fn sample_points(spec: &GroupSpec, n: usize, seed: u64) -> Result<PointSet> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(n as u64);
    let mut idx = rand::seq::index::sample(&mut rng, spec.order(), n).into_vec();
    idx.sort_unstable();
    Ok(PointSet::from_indices(spec, &idx)?)
}

fn run_sweep(config: &InstanceConfig, opts: RunOptions) -> Result<SweepReport> {
    let spec = config.spec()?;
    let n_max = config
        .n_max
        .ok_or_else(|| CliError::config("config field `n_max`", "required for sweep mode"))?;
    if n_max == 0 || n_max > spec.order() {
        return Err(CliError::config(
            "config field `n_max`",
            format!("must lie in 1..={}", spec.order()),
        ));
    }
    fex_core::extension::check_grid(n_max, config.phase_grid, config.grid_budget)?;
    let mut seeds = config.sweep_seeds();
    seeds.sort_unstable();
    seeds.dedup();

    let jobs: Vec<(usize, u64)> =
        (1..=n_max).flat_map(|n| seeds.iter().map(move |&s| (n, s))).collect();
    let rows = jobs
        .par_iter()
        .map(|&(n, seed)| -> Result<SweepRow> {
            let points = sample_points(&spec, n, seed)?;
            let peak = build_peak(&spec, &greedy_base_set(&spec, &difference_set(&spec, &points)))?;
            let search = optimize_alpha(&spec, &points, &peak, &alpha_options(config, seed))?;
            opts.note(|| format!("sweep n = {n} seed = {seed}: hi = {}", search.report.optimized.hi()));
            let r = search.report;
            Ok(SweepRow {
                n,
                seed,
                points: points.points().to_vec(),
                theorem_lower: r.theorem_lower,
                canonical_grid_max: r.canonical.grid_max,
                canonical_hi: r.canonical.hi(),
                optimized_hi: r.optimized.hi(),
                theorem_upper: r.theorem_upper,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut violations = Vec::new();
    for row in &rows {
        if row.optimized_hi < row.theorem_lower - BOUND_TOLERANCE {
            violations.push(format!("n = {} seed = {}: optimized hi below √(n/2)", row.n, row.seed));
        }
        if row.optimized_hi > row.canonical_hi + BOUND_TOLERANCE {
            violations.push(format!("n = {} seed = {}: optimized hi above canonical", row.n, row.seed));
        }
        if row.canonical_grid_max > row.theorem_upper + UPPER_TOLERANCE {
            violations.push(format!("n = {} seed = {}: canonical grid_max above √n", row.n, row.seed));
        }
    }
    let summary = (1..=n_max)
        .map(|n| {
            let best = rows
                .iter()
                .filter(|r| r.n == n)
                .map(|r| r.optimized_hi)
                .fold(f64::INFINITY, f64::min);
            let (lo, up) = theorem_bounds(n as i64).expect("n is positive");
            SweepSummary { n, theorem_lower: lo, best_norm_hi: best, theorem_upper: up, margin: best - lo }
        })
        .collect();

    Ok(SweepReport { n_max, seeds, rows, summary, violations })
}
