//! Upper estimates of `α_Γ(K)`, the infimum of `‖𝓔‖` over all linear
//! extension operators, by projected subgradient descent on the generators.
//!
//! The feasible set `{Φ : Φ̂_j(t_i) = δ_ij}` is affine with mutually orthogonal
//! constraint rows `c_i(x) = (−x, t_i)`, each of squared norm `|G|`, so the
//! Euclidean projection onto it is closed-form.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extension::{
    canonical_operator, certify_rows, check_grid, grid_max, ExtensionOperator, NormCertificate,
    DEFAULT_GRID_BUDGET,
};
use crate::group::{GroupSpec, PointSet};
use crate::numeric::{self, phase_of, unit_root, CompensatedComplexSum};
use crate::peak::PeakFunction;
use crate::spectral::{GroupFunction, Side};

/// `(√(n/2), √n)`.
pub fn theorem_bounds(n: i64) -> Result<(f64, f64)> {
    if n <= 0 {
        return Err(Error::NonPositiveCount);
    }
    let n = n as f64;
    Ok(((n / 2.0).sqrt(), n.sqrt()))
}

/// Projects each generator onto `{Φ : Φ̂(t_i) = δ_ij}`.
pub fn project_constraints(
    spec: &GroupSpec,
    points: &PointSet,
    generators: &[GroupFunction],
) -> Result<Vec<GroupFunction>> {
    if generators.len() != points.len() {
        return Err(Error::LengthMismatch { expected: points.len(), found: generators.len() });
    }
    let mut rows = Vec::with_capacity(generators.len());
    for g in generators {
        g.expect_side(Side::Time)?;
        if g.spec() != spec {
            return Err(Error::GroupMismatch);
        }
        rows.push(g.values().to_vec());
    }
    project_rows(spec, points.indices(), &mut rows);
    rows.into_iter()
        .map(|r| GroupFunction::new(spec, Side::Time, r))
        .collect()
}

pub(crate) fn project_rows(spec: &GroupSpec, points: &[usize], rows: &mut [Vec<Complex64>]) {
    let order = spec.order();
    let inv = 1.0 / order as f64;
    for (j, row) in rows.iter_mut().enumerate() {
        let residuals: Vec<Complex64> = points
            .iter()
            .enumerate()
            .map(|(i, &t)| {
                let mut acc = CompensatedComplexSum::new();
                for (x, v) in row.iter().enumerate() {
                    acc.add(spec.pairing_idx(x, t).conj() * v);
                }
                let target = if i == j { 1.0 } else { 0.0 };
                acc.value() - Complex64::new(target, 0.0)
            })
            .collect();
        for (x, v) in row.iter_mut().enumerate() {
            let mut corr = Complex64::new(0.0, 0.0);
            for (&t, r) in points.iter().zip(&residuals) {
                corr += spec.pairing_idx(x, t) * r;
            }
            *v -= corr * inv;
        }
    }
}

/// A feasible operator with generators drawn from a complex Gaussian and
/// then projected onto the interpolation constraints.
pub fn random_feasible_operator<R: Rng + ?Sized>(
    spec: &GroupSpec,
    points: &PointSet,
    rng: &mut R,
) -> Result<ExtensionOperator> {
    let scale = 1.0 / spec.order() as f64;
    let mut rows: Vec<Vec<Complex64>> = (0..points.len())
        .map(|_| (0..spec.order()).map(|_| gaussian(rng) * scale).collect())
        .collect();
    project_rows(spec, points.indices(), &mut rows);
    operator_from_rows(spec, points, rows)
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

fn operator_from_rows(
    spec: &GroupSpec,
    points: &PointSet,
    rows: Vec<Vec<Complex64>>,
) -> Result<ExtensionOperator> {
    let generators = rows
        .into_iter()
        .map(|r| GroupFunction::new(spec, Side::Time, r))
        .collect::<Result<Vec<_>>>()?;
    ExtensionOperator::from_generators(spec, points, generators)
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlphaOptions {
    /// Phase-grid resolution `M` used both for the objective and the final certificates.
    pub resolution: u32,
    /// Total iterations, split evenly across the canonical run and the restarts.
    pub budget: usize,
    pub seed: u64,
    /// Perturbed restarts in addition to the run from the canonical operator.
    pub restarts: usize,
    /// Relative scale of the restart perturbation.
    pub noise: f64,
    /// Multiplier on the calibrated step constant.
    pub step_scale: f64,
    pub grid_budget: f64,
}

impl Default for AlphaOptions {
    fn default() -> Self {
        Self {
            resolution: 32,
            budget: 2000,
            seed: 0,
            restarts: 3,
            noise: 0.1,
            step_scale: 0.5,
            grid_budget: DEFAULT_GRID_BUDGET,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaReport {
    pub n: usize,
    pub theorem_lower: f64,
    pub theorem_upper: f64,
    pub canonical: NormCertificate,
    pub optimized: NormCertificate,
    pub iterations: usize,
    /// Best grid objective seen so far, one entry per iteration.
    pub converged_objective_trace: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct AlphaSearch {
    pub report: AlphaReport,
    /// The operator whose certificate is reported as `optimized`.
    pub operator: ExtensionOperator,
}

struct Run {
    rows: Vec<Vec<Complex64>>,
    objective: f64,
}

fn descend(
    spec: &GroupSpec,
    points: &[usize],
    mut rows: Vec<Vec<Complex64>>,
    iterations: usize,
    opts: &AlphaOptions,
    roots: &[Complex64],
    trace: &mut Vec<f64>,
) -> Run {
    let mut best = Run { rows: rows.clone(), objective: f64::INFINITY };
    let mut step_constant = None;
    let order = spec.order();

    for k in 1..=iterations {
        let view: Vec<&[Complex64]> = rows.iter().map(|r| r.as_slice()).collect();
        let gm = grid_max(&view, opts.resolution, 0);
        if gm.value < best.objective {
            best = Run { rows: rows.clone(), objective: gm.value };
        }
        let best_so_far = trace.last().map_or(gm.value, |&b| b.min(gm.value));
        trace.push(best_so_far);
        if k == iterations {
            break;
        }

        let coefs: Vec<Complex64> = gm.phases.iter().map(|&p| roots[p as usize]).collect();
        let mut combined = vec![Complex64::new(0.0, 0.0); order];
        for (c, row) in coefs.iter().zip(&rows) {
            for (s, v) in combined.iter_mut().zip(row) {
                *s += c * v;
            }
        }
        let signs: Vec<Complex64> = combined.into_iter().map(phase_of).collect();

        let c = *step_constant.get_or_insert_with(|| {
            let magnitude = numeric::sum(signs.iter().map(|s| s.norm())) * rows.len() as f64;
            if magnitude > 0.0 {
                opts.step_scale * gm.value / magnitude
            } else {
                0.0
            }
        });
        if c == 0.0 {
            break;
        }
        let step = c / (k as f64).sqrt();
        for (coef, row) in coefs.iter().zip(rows.iter_mut()) {
            let g = coef.conj() * step;
            for (v, s) in row.iter_mut().zip(&signs) {
                *v -= s * g;
            }
        }
        project_rows(spec, points, &mut rows);
    }
    best
}

/// Starts from the canonical operator and descends on the phase-grid
/// objective `max_f ‖Σ_j f_j Φ_j‖₁`, keeping the best certified operator.
pub fn optimize_alpha(
    spec: &GroupSpec,
    points: &PointSet,
    peak: &PeakFunction,
    opts: &AlphaOptions,
) -> Result<AlphaSearch> {
    let n = points.len();
    check_grid(n, opts.resolution, opts.grid_budget)?;
    let (theorem_lower, theorem_upper) = theorem_bounds(n as i64)?;

    let canonical = canonical_operator(spec, points, peak)?;
    let canonical_rows: Vec<Vec<Complex64>> =
        canonical.generators().iter().map(|g| g.values().to_vec()).collect();
    let roots: Vec<Complex64> =
        (0..opts.resolution as u64).map(|k| unit_root(k, opts.resolution as u64)).collect();

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut trace = Vec::new();
    let mut runs = Vec::new();
    let run_count = opts.restarts + 1;
    for restart in 0..run_count {
        let iterations = opts.budget / run_count + usize::from(restart < opts.budget % run_count);
        let mut start = canonical_rows.clone();
        if restart > 0 {
            for row in start.iter_mut() {
                let rms = (row.iter().map(|v| v.norm_sqr()).sum::<f64>() / row.len() as f64).sqrt();
                for v in row.iter_mut() {
                    *v += gaussian(&mut rng) * (opts.noise * rms);
                }
            }
            project_rows(spec, points.indices(), &mut start);
        }
        if iterations > 0 {
            runs.push(descend(
                spec,
                points.indices(),
                start,
                iterations,
                opts,
                &roots,
                &mut trace,
            ));
        }
    }

    let certify = |rows: &[Vec<Complex64>]| {
        let view: Vec<&[Complex64]> = rows.iter().map(|r| r.as_slice()).collect();
        let norms: Vec<f64> = rows.iter().map(|r| numeric::l1(r)).collect();
        certify_rows(&view, &norms, opts.resolution, opts.grid_budget)
    };
    let canonical_cert = certify(&canonical_rows)?;

    let mut chosen: Option<(Vec<Vec<Complex64>>, NormCertificate)> = None;
    for run in runs {
        let cert = certify(&run.rows)?;
        let current = chosen.as_ref().map_or(canonical_cert.hi(), |(_, c)| c.hi());
        if cert.hi() < current {
            chosen = Some((run.rows, cert));
        }
    }

    let (operator, optimized) = match chosen {
        Some((rows, cert)) => match operator_from_rows(spec, points, rows) {
            Ok(op) => (op, cert),
            Err(_) => (canonical.clone(), canonical_cert.clone()),
        },
        None => (canonical.clone(), canonical_cert.clone()),
    };

    Ok(AlphaSearch {
        report: AlphaReport {
            n,
            theorem_lower,
            theorem_upper,
            canonical: canonical_cert,
            optimized,
            iterations: trace.len(),
            converged_objective_trace: trace,
        },
        operator,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::difference_set;
    use crate::peak::{build_peak, greedy_base_set};

    fn setup(factors: &[i64], k: &[usize]) -> (GroupSpec, PointSet, PeakFunction) {
        let spec = GroupSpec::new(factors).unwrap();
        let points = PointSet::from_indices(&spec, k).unwrap();
        let base = greedy_base_set(&spec, &difference_set(&spec, &points));
        let peak = build_peak(&spec, &base).unwrap();
        (spec, points, peak)
    }

    #[test]
    fn bounds() {
        let (lo, hi) = theorem_bounds(1).unwrap();
        assert!((lo - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15 && hi == 1.0);
        let (lo, hi) = theorem_bounds(2).unwrap();
        assert!((lo - 1.0).abs() < 1e-15 && (hi - 2f64.sqrt()).abs() < 1e-15);
        let (lo, hi) = theorem_bounds(8).unwrap();
        assert!((lo - 2.0).abs() < 1e-15 && (hi - 8f64.sqrt()).abs() < 1e-15);
        assert_eq!(theorem_bounds(0), Err(Error::NonPositiveCount));
    }

    #[test]
    fn projection_of_zero_is_minimum_norm_interpolant() {
        let spec = GroupSpec::new(&[6]).unwrap();
        let points = PointSet::from_indices(&spec, &[4]).unwrap();
        let p = project_constraints(&spec, &points, &[GroupFunction::zeros(&spec, Side::Time)]).unwrap();
        for (x, v) in p[0].values().iter().enumerate() {
            let want = Complex64::from_polar(1.0 / 6.0, std::f64::consts::TAU * (x * 4) as f64 / 6.0);
            assert!((v - want).norm() < 1e-15);
        }
    }

    #[test]
    fn projection_fixes_feasible_points_and_is_idempotent() {
        let (spec, points, peak) = setup(&[12], &[0, 5, 7]);
        let op = canonical_operator(&spec, &points, &peak).unwrap();
        let p = project_constraints(&spec, &points, op.generators()).unwrap();
        for (a, b) in p.iter().zip(op.generators()) {
            assert!(a.max_abs_diff(b).unwrap() < 1e-12);
        }

        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let raw: Vec<GroupFunction> = (0..3)
            .map(|_| {
                GroupFunction::new(&spec, Side::Time, (0..12).map(|_| gaussian(&mut rng)).collect())
                    .unwrap()
            })
            .collect();
        let once = project_constraints(&spec, &points, &raw).unwrap();
        let twice = project_constraints(&spec, &points, &once).unwrap();
        for (a, b) in once.iter().zip(&twice) {
            assert!(a.max_abs_diff(b).unwrap() < 1e-12);
        }
        assert!(ExtensionOperator::from_generators(&spec, &points, once).is_ok());
    }

    #[test]
    fn singleton_alpha_is_one() {
        let (spec, points, peak) = setup(&[2, 4], &[5]);
        let opts = AlphaOptions { budget: 50, ..Default::default() };
        let out = optimize_alpha(&spec, &points, &peak, &opts).unwrap();
        assert!((out.report.optimized.hi() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn z2_full_group() {
        let (spec, points, peak) = setup(&[2], &[0, 1]);
        let opts = AlphaOptions { resolution: 64, budget: 50, ..Default::default() };
        let out = optimize_alpha(&spec, &points, &peak, &opts).unwrap();
        assert!((out.report.optimized.grid_max - 2f64.sqrt()).abs() < 1e-3);
    }

    #[test]
    fn optimizer_never_worse_and_deterministic() {
        let (spec, points, peak) = setup(&[8], &[0, 1]);
        let opts = AlphaOptions { resolution: 16, budget: 200, seed: 3, ..Default::default() };
        let a = optimize_alpha(&spec, &points, &peak, &opts).unwrap();
        let b = optimize_alpha(&spec, &points, &peak, &opts).unwrap();
        assert_eq!(a.report, b.report);
        let r = &a.report;
        assert!(r.optimized.hi() <= r.canonical.hi() + 1e-9);
        assert!(r.optimized.hi() >= r.theorem_lower - 1e-9);
        assert!(r.converged_objective_trace.windows(2).all(|w| w[1] <= w[0]));
        assert_eq!(r.iterations, 200);
    }

    #[test]
    fn grid_guard_is_an_error() {
        let (spec, points, peak) = setup(&[16], &[0, 3, 7, 12]);
        let opts = AlphaOptions { resolution: 128, ..Default::default() };
        assert!(matches!(optimize_alpha(&spec, &points, &peak, &opts), Err(Error::Budget { .. })));
    }
}
