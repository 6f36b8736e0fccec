//! Peak functions: `Δ = |I|⁻¹ · 1_I ∗ 1_{−I}` on `Γ` with the nonnegative
//! density `λ = (|G|/|I|) · |ξ|²`, where `ξ` is the time-side density of `1_I`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{ElementSet, GroupElement, GroupSpec};
use crate::spectral::{self, GroupFunction, Side};

/// Tolerance used by [`validate_peak`] for properties (i) through (v).
pub const PEAK_TOLERANCE: f64 = 1e-12;
/// Tolerance for `synthesize(λ) = Δ`.
pub const TRANSFORM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct PeakFunction {
    spec: GroupSpec,
    base_set: Vec<GroupElement>,
    base_idx: Vec<usize>,
    delta: GroupFunction,
    lambda: GroupFunction,
}

impl PeakFunction {
    /// Assembles a peak function without checking any of its properties.
    pub fn from_parts(
        spec: &GroupSpec,
        base_set: Vec<GroupElement>,
        delta: GroupFunction,
        lambda: GroupFunction,
    ) -> Result<Self> {
        delta.expect_side(Side::Frequency)?;
        lambda.expect_side(Side::Time)?;
        if delta.spec() != spec || lambda.spec() != spec {
            return Err(Error::GroupMismatch);
        }
        let base_idx = base_set.iter().map(|g| spec.index_of(g)).collect::<Result<_>>()?;
        Ok(Self { spec: spec.clone(), base_set, base_idx, delta, lambda })
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn base_set(&self) -> &[GroupElement] {
        &self.base_set
    }

    pub fn delta(&self) -> &GroupFunction {
        &self.delta
    }

    pub fn lambda(&self) -> &GroupFunction {
        &self.lambda
    }
}

/// Greedily grows `I ∋ 0` in enumeration order while keeping `(I − I) ∩ D = ∅`.
pub fn greedy_base_set(spec: &GroupSpec, forbidden: &ElementSet) -> Vec<GroupElement> {
    let mut chosen = vec![0usize];
    for candidate in 1..spec.order() {
        let ok = chosen.iter().all(|&i| {
            !forbidden.contains_idx(spec.sub_idx(candidate, i))
                && !forbidden.contains_idx(spec.sub_idx(i, candidate))
        });
        if ok {
            chosen.push(candidate);
        }
    }
    chosen.into_iter().map(|i| spec.element_at(i)).collect()
}

pub fn build_peak(spec: &GroupSpec, base_set: &[GroupElement]) -> Result<PeakFunction> {
    if base_set.is_empty() {
        return Err(Error::InvalidBaseSet("base set is empty".into()));
    }
    let members = ElementSet::from_elements(spec, base_set)?;
    if !members.contains_idx(0) {
        return Err(Error::InvalidBaseSet("base set must contain 0".into()));
    }
    let idx: Vec<usize> = members.indices().collect();
    if idx.len() != base_set.len() {
        return Err(Error::InvalidBaseSet("base set has duplicates".into()));
    }
    let size = idx.len();
    let order = spec.order();

    // Autocorrelation count |I ∩ (I + t)| = #{(a, b) ∈ I² : a − b = t}.
    let mut counts = vec![0usize; order];
    for &a in &idx {
        for &b in &idx {
            counts[spec.sub_idx(a, b)] += 1;
        }
    }
    let delta: Vec<Complex64> = counts
        .iter()
        .map(|&c| Complex64::new(c as f64 / size as f64, 0.0))
        .collect();
    let delta = GroupFunction::new(spec, Side::Frequency, delta)?;

    let mut indicator = GroupFunction::zeros(spec, Side::Frequency);
    for &i in &idx {
        indicator.values_mut()[i] = Complex64::new(1.0, 0.0);
    }
    let xi = spectral::analyze(&indicator)?;
    let scale = order as f64 / size as f64;
    let lambda: Vec<Complex64> = xi
        .values()
        .iter()
        .map(|z| Complex64::new(z.norm_sqr() * scale, 0.0))
        .collect();
    let lambda = GroupFunction::new(spec, Side::Time, lambda)?;

    let base_set = idx.iter().map(|&i| spec.element_at(i)).collect();
    Ok(PeakFunction { spec: spec.clone(), base_set, base_idx: idx, delta, lambda })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertyCheck {
    pub name: String,
    pub passed: bool,
    /// Worst violation magnitude (0 when the property holds exactly).
    pub violation: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeakValidation {
    pub checks: Vec<PropertyCheck>,
}

impl PeakValidation {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn worst_violation(&self) -> f64 {
        self.checks.iter().map(|c| c.violation).fold(0.0, f64::max)
    }

    pub fn check(&self, name: &str) -> Option<&PropertyCheck> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> Vec<&PropertyCheck> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }
}

fn check(name: &str, violation: f64, tolerance: f64) -> PropertyCheck {
    PropertyCheck {
        name: name.to_string(),
        passed: violation <= tolerance,
        violation,
        tolerance,
    }
}

/// Checks the five peak-function properties against the forbidden set `D`,
/// plus the interpolation identity `Δ(q − p) = [p = q]` on `K`, and the
/// transform consistency `synthesize(λ) = Δ`.
pub fn validate_peak(peak: &PeakFunction, forbidden: &ElementSet) -> Result<PeakValidation> {
    let spec = &peak.spec;
    if forbidden.universe() != spec.order() {
        return Err(Error::GroupMismatch);
    }
    let delta = peak.delta.values();
    let lambda = peak.lambda.values();

    let mut support = ElementSet::empty(spec);
    for &a in &peak.base_idx {
        for &b in &peak.base_idx {
            support.insert_idx(spec.sub_idx(a, b));
        }
    }
    let outside_support = (0..spec.order())
        .filter(|&t| !support.contains_idx(t) || forbidden.contains_idx(t))
        .map(|t| delta[t].norm())
        .fold(0.0, f64::max);

    let at_zero = (delta[0] - Complex64::new(1.0, 0.0)).norm();

    let range = delta
        .iter()
        .map(|z| (-z.re).max(z.re - 1.0).max(z.im.abs()).max(0.0))
        .fold(0.0, f64::max);

    let nonneg = lambda
        .iter()
        .map(|z| (-z.re).max(z.im.abs()).max(0.0))
        .fold(0.0, f64::max);

    let mass = (crate::numeric::sum(lambda.iter().map(|z| z.re)) - 1.0).abs();

    let separation = forbidden
        .indices()
        .map(|d| delta[d].norm())
        .fold(at_zero, f64::max);

    let transform = spectral::synthesize(&peak.lambda)?.max_abs_diff(&peak.delta)?;

    Ok(PeakValidation {
        checks: vec![
            check("support", outside_support, PEAK_TOLERANCE),
            check("unit_at_zero", at_zero, PEAK_TOLERANCE),
            check("range", range, PEAK_TOLERANCE),
            check("nonnegative_density", nonneg, PEAK_TOLERANCE),
            check("unit_mass", mass, PEAK_TOLERANCE),
            check("separation", separation, PEAK_TOLERANCE),
            check("transform", transform, TRANSFORM_TOLERANCE),
        ],
    })
}
