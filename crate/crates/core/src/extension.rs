//! Linear extension operators `C₀(K) → A(Γ)` and certified operator norms.
//!
//! An operator is stored through its time-side generators `Φ_j`, with
//! `Ψ_j = Φ̂_j` the image of the `j`-th point indicator. For `f` on `K`,
//! `‖𝓔f‖_A = ‖Σ_j f_j Φ_j‖_{ℓ¹(G)}`, so every norm evaluation below happens on
//! the time side.
//!
//! The norm over the complex `ℓ∞` unit ball is attained on the torus of
//! unimodular vectors (the objective is convex). The torus is sampled on the
//! grid of `M`-th roots of unity with one coordinate pinned to `1`, which
//! loses nothing because the norm is invariant under a global phase. Any
//! unimodular `f` is then within `2 sin(π/2M)` of a grid point in every other
//! coordinate, which gives the slack.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{difference_set, GroupSpec, PointSet};
use crate::numeric::{self, unit_root, CompensatedSum};
use crate::peak::{validate_peak, PeakFunction};
use crate::spectral::{self, GroupFunction, Side};

/// Tolerance for `Ψ_j(t_i) = δ_ij`.
pub const INTERPOLATION_TOLERANCE: f64 = 1e-9;
/// Default cap on `Mⁿ` for phase-grid enumeration.
pub const DEFAULT_GRID_BUDGET: f64 = 1e7;
/// Default cap on `n` for sign-pattern enumeration.
pub const DEFAULT_MAX_SIGN_POINTS: usize = 20;

#[derive(Debug, Clone, PartialEq)]
pub struct ExtensionOperator {
    spec: GroupSpec,
    points: PointSet,
    generators: Vec<GroupFunction>,
    images: Vec<GroupFunction>,
    image_norms: Vec<f64>,
}

impl ExtensionOperator {
    /// Builds an operator from time-side generators, checking the
    /// interpolation property.
    pub fn from_generators(
        spec: &GroupSpec,
        points: &PointSet,
        generators: Vec<GroupFunction>,
    ) -> Result<Self> {
        if generators.len() != points.len() {
            return Err(Error::LengthMismatch { expected: points.len(), found: generators.len() });
        }
        for phi in &generators {
            phi.expect_side(Side::Time)?;
            if phi.spec() != spec {
                return Err(Error::GroupMismatch);
            }
        }
        let images = generators
            .iter()
            .map(spectral::synthesize)
            .collect::<Result<Vec<_>>>()?;
        let op = Self::assemble(spec, points, generators, images);
        let err = op.interpolation_error();
        if err.is_nan() || err > INTERPOLATION_TOLERANCE {
            return Err(Error::NotAnExtension(format!(
                "max |Ψ_j(t_i) − δ_ij| = {err:e} exceeds {INTERPOLATION_TOLERANCE:e}"
            )));
        }
        Ok(op)
    }

    fn assemble(
        spec: &GroupSpec,
        points: &PointSet,
        generators: Vec<GroupFunction>,
        images: Vec<GroupFunction>,
    ) -> Self {
        let image_norms = generators.iter().map(spectral::l1_time_norm).collect();
        Self { spec: spec.clone(), points: points.clone(), generators, images, image_norms }
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn points(&self) -> &PointSet {
        &self.points
    }

    pub fn n(&self) -> usize {
        self.points.len()
    }

    /// Time-side generators `Φ_j`.
    pub fn generators(&self) -> &[GroupFunction] {
        &self.generators
    }

    /// Frequency-side images `Ψ_j = 𝓔ψ_j`.
    pub fn images(&self) -> &[GroupFunction] {
        &self.images
    }

    /// `‖Ψ_j‖_{A(Γ)}` for each `j`.
    pub fn image_norms(&self) -> &[f64] {
        &self.image_norms
    }

    /// `max_{i,j} |Ψ_j(t_i) − δ_ij|`.
    pub fn interpolation_error(&self) -> f64 {
        let mut worst = 0.0f64;
        for (j, psi) in self.images.iter().enumerate() {
            for (i, &t) in self.points.indices().iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((psi.values()[t] - Complex64::new(want, 0.0)).norm());
            }
        }
        worst
    }

    fn generator_rows(&self) -> Vec<&[Complex64]> {
        self.generators.iter().map(|g| g.values()).collect()
    }
}

/// The operator `f ↦ Σ_{γ∈K} f(γ) Δ(· − γ)` built from a peak function.
pub fn canonical_operator(
    spec: &GroupSpec,
    points: &PointSet,
    peak: &PeakFunction,
) -> Result<ExtensionOperator> {
    if peak.spec() != spec {
        return Err(Error::GroupMismatch);
    }
    let forbidden = difference_set(spec, points);
    let report = validate_peak(peak, &forbidden)?;
    if !report.passed() {
        let names: Vec<_> = report.failures().iter().map(|c| c.name.clone()).collect();
        return Err(Error::InvalidPeak(names.join(", ")));
    }
    let order = spec.order();
    let delta = peak.delta().values();
    let lambda = peak.lambda().values();
    let mut generators = Vec::with_capacity(points.len());
    let mut images = Vec::with_capacity(points.len());
    for &t in points.indices() {
        let phi = (0..order).map(|x| spec.pairing_idx(x, t) * lambda[x]).collect();
        generators.push(GroupFunction::new(spec, Side::Time, phi)?);
        let psi = (0..order).map(|s| delta[spec.sub_idx(s, t)]).collect();
        images.push(GroupFunction::new(spec, Side::Frequency, psi)?);
    }
    Ok(ExtensionOperator::assemble(spec, points, generators, images))
}

/// `𝓔f = Σ_j f_j Ψ_j`.
pub fn apply(op: &ExtensionOperator, f: &[Complex64]) -> Result<GroupFunction> {
    combine(op, &op.images, Side::Frequency, f)
}

/// Time-side density of `𝓔f`, i.e. `Σ_j f_j Φ_j`.
pub fn apply_time(op: &ExtensionOperator, f: &[Complex64]) -> Result<GroupFunction> {
    combine(op, &op.generators, Side::Time, f)
}

fn combine(
    op: &ExtensionOperator,
    basis: &[GroupFunction],
    side: Side,
    f: &[Complex64],
) -> Result<GroupFunction> {
    if f.len() != op.n() {
        return Err(Error::LengthMismatch { expected: op.n(), found: f.len() });
    }
    let mut out = vec![Complex64::new(0.0, 0.0); op.spec.order()];
    for (coef, b) in f.iter().zip(basis) {
        for (o, v) in out.iter_mut().zip(b.values()) {
            *o += coef * v;
        }
    }
    GroupFunction::new(&op.spec, side, out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormCertificate {
    /// Largest norm found on the phase grid; a lower bound on `‖𝓔‖`.
    pub grid_max: f64,
    pub slack: f64,
    /// `[grid_max, grid_max + slack]`, which contains `‖𝓔‖`.
    pub interval: [f64; 2],
    /// Grid resolution `M`.
    pub resolution: u32,
    /// Phase exponents `k_j` of the maximizing grid point, `f_j = exp(2πi k_j / M)`.
    pub maximizer: Vec<u32>,
}

impl NormCertificate {
    pub fn lo(&self) -> f64 {
        self.interval[0]
    }

    pub fn hi(&self) -> f64 {
        self.interval[1]
    }

    pub fn contains(&self, x: f64, tol: f64) -> bool {
        x >= self.lo() - tol && x <= self.hi() + tol
    }
}

/// Maximum of the grid objective together with its (first) maximizer.
#[derive(Debug, Clone, PartialEq)]
pub struct GridMax {
    pub value: f64,
    pub phases: Vec<u32>,
}

pub fn check_grid(n: usize, resolution: u32, budget: f64) -> Result<()> {
    if resolution < 4 {
        return Err(Error::Resolution(resolution));
    }
    let requested = (resolution as f64).powi(n as i32);
    if requested > budget {
        return Err(Error::Budget { requested, budget });
    }
    Ok(())
}

/// Index of the coordinate pinned to phase 0 during grid enumeration.
pub(crate) fn reference_coordinate(norms: &[f64]) -> usize {
    let mut best = 0;
    for (j, &v) in norms.iter().enumerate() {
        if v > norms[best] {
            best = j;
        }
    }
    best
}

/// `max_k ‖Σ_j exp(2πi k_j/M) Φ_j‖₁` over the grid with `k_reference = 0`.
///
/// Deterministic: ties resolve to the lexicographically smallest phase vector
/// regardless of how the work is split across threads.
pub(crate) fn grid_max(rows: &[&[Complex64]], resolution: u32, reference: usize) -> GridMax {
    let n = rows.len();
    let m = resolution as usize;
    let roots: Vec<Complex64> = (0..m as u64).map(|k| unit_root(k, m as u64)).collect();
    let free: Vec<usize> = (0..n).filter(|&j| j != reference).collect();
    let base = rows[reference].to_vec();

    if free.is_empty() {
        return GridMax { value: numeric::l1(&base), phases: vec![0; n] };
    }

    let first = free[0];
    let rest = &free[1..];
    let order = base.len();
    let chunks: Vec<GridMax> = (0..m)
        .into_par_iter()
        .map(|k0| {
            let mut stack = vec![vec![Complex64::new(0.0, 0.0); order]; rest.len() + 1];
            for ((s, b), p) in stack[0].iter_mut().zip(&base).zip(rows[first]) {
                *s = b + roots[k0] * p;
            }
            let mut phases = vec![0u32; n];
            phases[first] = k0 as u32;
            let mut best = GridMax { value: f64::NEG_INFINITY, phases: phases.clone() };
            descend(rows, &roots, rest, &mut stack, 0, &mut phases, &mut best);
            best
        })
        .collect();

    chunks
        .into_iter()
        .reduce(|a, b| if b.value > a.value { b } else { a })
        .expect("resolution is positive")
}

fn descend(
    rows: &[&[Complex64]],
    roots: &[Complex64],
    rest: &[usize],
    stack: &mut [Vec<Complex64>],
    depth: usize,
    phases: &mut [u32],
    best: &mut GridMax,
) {
    match rest {
        [] => {
            let value = numeric::l1(&stack[depth]);
            if value > best.value {
                best.value = value;
                best.phases.copy_from_slice(phases);
            }
        }
        [j] => {
            let partial = &stack[depth];
            for (k, r) in roots.iter().enumerate() {
                let value = numeric::l1_axpy(partial, *r, rows[*j]);
                if value > best.value {
                    best.value = value;
                    phases[*j] = k as u32;
                    best.phases.copy_from_slice(phases);
                }
            }
            phases[*j] = 0;
        }
        [j, tail @ ..] => {
            for (k, r) in roots.iter().enumerate() {
                let (lower, upper) = stack.split_at_mut(depth + 1);
                for ((dst, s), p) in upper[0].iter_mut().zip(&lower[depth]).zip(rows[*j]) {
                    *dst = s + r * p;
                }
                phases[*j] = k as u32;
                descend(rows, roots, tail, stack, depth + 1, phases, best);
            }
            phases[*j] = 0;
        }
    }
}

/// `2 sin(π/2M) · (Σ_j ‖Ψ_j‖_A − max_j ‖Ψ_j‖_A)`.
pub fn certificate_slack(norms: &[f64], resolution: u32) -> f64 {
    let total = numeric::sum(norms.iter().copied());
    let pinned = norms[reference_coordinate(norms)];
    let step = 2.0 * (std::f64::consts::PI / (2.0 * resolution as f64)).sin();
    step * (total - pinned).max(0.0)
}

pub(crate) fn certify_rows(
    rows: &[&[Complex64]],
    norms: &[f64],
    resolution: u32,
    budget: f64,
) -> Result<NormCertificate> {
    check_grid(rows.len(), resolution, budget)?;
    let reference = reference_coordinate(norms);
    let best = grid_max(rows, resolution, reference);
    let slack = certificate_slack(norms, resolution);
    Ok(NormCertificate {
        grid_max: best.value,
        slack,
        interval: [best.value, best.value + slack],
        resolution,
        maximizer: best.phases,
    })
}

pub fn norm_certified(op: &ExtensionOperator, resolution: u32) -> Result<NormCertificate> {
    norm_certified_with_budget(op, resolution, DEFAULT_GRID_BUDGET)
}

pub fn norm_certified_with_budget(
    op: &ExtensionOperator,
    resolution: u32,
    budget: f64,
) -> Result<NormCertificate> {
    certify_rows(&op.generator_rows(), &op.image_norms, resolution, budget)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignStats {
    /// `max_ε ‖𝓔ε‖_A` over `ε ∈ {±1}ⁿ`.
    pub max: f64,
    /// Mean of the same quantity over all `2ⁿ` patterns.
    pub average: f64,
}

fn check_sign_budget(n: usize, max_points: usize) -> Result<()> {
    if n > max_points {
        return Err(Error::Budget { requested: 2f64.powi(n as i32), budget: 2f64.powi(max_points as i32) });
    }
    Ok(())
}

/// Walks all sign patterns with `ε_0 = +1` in Gray-code order, calling
/// `visit` with the current value of `Σ_j ε_j v_j`. Patterns with `ε_0 = −1`
/// are the negatives of these.
pub(crate) fn gray_walk<T, F>(vectors: &[T], init: Vec<Complex64>, add: impl Fn(&mut [Complex64], &T, f64), mut visit: F)
where
    F: FnMut(&[Complex64]),
{
    let n = vectors.len();
    let mut current = init;
    let mut signs = vec![1.0f64; n];
    visit(&current);
    let patterns: u64 = 1 << (n.saturating_sub(1));
    for step in 1..patterns {
        let j = step.trailing_zeros() as usize + 1;
        signs[j] = -signs[j];
        add(&mut current, &vectors[j], 2.0 * signs[j]);
        visit(&current);
    }
}

pub fn sign_stats(op: &ExtensionOperator) -> Result<SignStats> {
    sign_stats_with_budget(op, DEFAULT_MAX_SIGN_POINTS)
}

pub fn sign_stats_with_budget(op: &ExtensionOperator, max_points: usize) -> Result<SignStats> {
    let n = op.n();
    check_sign_budget(n, max_points)?;
    let rows = op.generator_rows();
    let mut init = vec![Complex64::new(0.0, 0.0); op.spec.order()];
    for row in &rows {
        for (o, v) in init.iter_mut().zip(row.iter()) {
            *o += v;
        }
    }
    let mut max = f64::NEG_INFINITY;
    let mut total = CompensatedSum::new();
    let mut count = 0u64;
    gray_walk(
        &rows,
        init,
        |cur, row, scale| {
            for (c, v) in cur.iter_mut().zip(row.iter()) {
                *c += v * scale;
            }
        },
        |cur| {
            let v = numeric::l1(cur);
            max = max.max(v);
            total.add(v);
            count += 1;
        },
    );
    Ok(SignStats { max, average: total.value() / count as f64 })
}

pub fn sign_max(op: &ExtensionOperator) -> Result<f64> {
    Ok(sign_stats(op)?.max)
}

pub fn rademacher_average(op: &ExtensionOperator) -> Result<f64> {
    Ok(sign_stats(op)?.average)
}
