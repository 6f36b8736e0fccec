//! Exact checks of the sign-averaging (Khinchin) inequality with constant
//! `1/√2`, and of the chain of inequalities that bounds any extension
//! operator below by `√(n/2)`.
//!
//! Averages over Rademacher signs are computed by enumerating all sign
//! patterns, never by sampling.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extension::{
    gray_walk, norm_certified, sign_stats, ExtensionOperator, DEFAULT_MAX_SIGN_POINTS,
};
use crate::numeric::{self, CompensatedSum};

/// Slack allowed on `ratio ≥ 1`.
pub const KHINCHIN_TOLERANCE: f64 = 1e-12;
/// Slack allowed on each chain inequality.
pub const CHAIN_TOLERANCE: f64 = 1e-9;
/// Slack allowed on the pointwise Cauchy–Schwarz step.
pub const CAUCHY_SCHWARZ_TOLERANCE: f64 = 1e-12;

/// `2⁻ⁿ Σ_{ε∈{±1}ⁿ} |Σ_j ε_j a_j|`.
pub fn khinchin_average(a: &[Complex64]) -> Result<f64> {
    if a.is_empty() {
        return Err(Error::NonPositiveCount);
    }
    if a.len() > DEFAULT_MAX_SIGN_POINTS {
        return Err(Error::Budget {
            requested: 2f64.powi(a.len() as i32),
            budget: 2f64.powi(DEFAULT_MAX_SIGN_POINTS as i32),
        });
    }
    let init: Complex64 = a.iter().sum();
    let mut total = CompensatedSum::new();
    let mut count = 0u64;
    // Patterns with ε_0 = −1 are negatives of those visited and have equal modulus.
    gray_walk(
        a,
        vec![init],
        |cur, v, scale| cur[0] += v * scale,
        |cur| {
            total.add(cur[0].norm());
            count += 1;
        },
    );
    Ok(total.value() / count as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KhinchinReport {
    pub n: usize,
    pub a: Vec<Complex64>,
    pub exact_average: f64,
    /// `(Σ|a_j|²)^{1/2} / √2`.
    pub rhs: f64,
    /// `exact_average / rhs`; reported as 1 when `a = 0`.
    pub ratio: f64,
    pub passed: bool,
}

pub fn khinchin_check(a: &[Complex64]) -> Result<KhinchinReport> {
    let exact_average = khinchin_average(a)?;
    let rhs = FRAC_1_SQRT_2 * numeric::sum(a.iter().map(|z| z.norm_sqr())).sqrt();
    let ratio = if rhs == 0.0 { 1.0 } else { exact_average / rhs };
    Ok(KhinchinReport {
        n: a.len(),
        a: a.to_vec(),
        exact_average,
        rhs,
        ratio,
        passed: ratio >= 1.0 - KHINCHIN_TOLERANCE,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Inequality {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs − lhs`.
    pub margin: f64,
    pub passed: bool,
}

impl Inequality {
    fn new(name: &str, lhs: f64, rhs: f64, tol: f64) -> Self {
        let margin = rhs - lhs;
        Self { name: name.to_string(), lhs, rhs, margin, passed: margin >= -tol }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainReport {
    pub n: usize,
    /// `(1/√2) Σ_x (Σ_j |Φ_j(x)|²)^{1/2}`.
    pub lhs_root_mean_square: f64,
    /// `(1/√2) Σ_j ‖Ψ_j‖_A`.
    pub lhs_image_norms: f64,
    /// Upper end of the certified norm interval.
    pub norm_hi: f64,
    /// Mean of `‖𝓔ε‖_A` over sign patterns, when `n` is small enough to enumerate.
    pub rademacher_average: Option<f64>,
    /// `max_x (Σ_j|Φ_j(x)| − √n (Σ_j|Φ_j(x)|²)^{1/2})`.
    pub cauchy_schwarz_violation: f64,
    pub inequalities: Vec<Inequality>,
}

impl ChainReport {
    pub fn passed(&self) -> bool {
        self.inequalities.iter().all(|i| i.passed)
    }

    pub fn min_margin(&self) -> f64 {
        self.inequalities.iter().map(|i| i.margin).fold(f64::INFINITY, f64::min)
    }
}

/// Evaluates each step of the lower-bound argument on a concrete operator.
pub fn chain_check(op: &ExtensionOperator, resolution: u32) -> Result<ChainReport> {
    let n = op.n();
    let order = op.spec().order();
    let sqrt_n = (n as f64).sqrt();
    let rows: Vec<&[Complex64]> = op.generators().iter().map(|g| g.values()).collect();

    let mut rms_total = CompensatedSum::new();
    let mut cs_violation = f64::NEG_INFINITY;
    for x in 0..order {
        let l2 = numeric::sum(rows.iter().map(|r| r[x].norm_sqr())).sqrt();
        let l1 = numeric::sum(rows.iter().map(|r| r[x].norm()));
        rms_total.add(l2);
        cs_violation = cs_violation.max(l1 - sqrt_n * l2);
    }
    let lhs2 = FRAC_1_SQRT_2 * rms_total.value();
    let lhs3 = FRAC_1_SQRT_2 * numeric::sum(op.image_norms().iter().copied());
    let hi = norm_certified(op, resolution)?.hi();
    let average = if n <= DEFAULT_MAX_SIGN_POINTS { Some(sign_stats(op)?.average) } else { None };

    let mut inequalities = Vec::new();
    if let Some(avg) = average {
        inequalities.push(Inequality::new("khinchin_pointwise", lhs2, avg, CHAIN_TOLERANCE));
    }
    inequalities.push(Inequality::new("root_mean_square", lhs2, hi, CHAIN_TOLERANCE));
    inequalities.push(Inequality::new("image_norms", lhs3, sqrt_n * hi, CHAIN_TOLERANCE));
    inequalities.push(Inequality::new("lower_bound", (n as f64 / 2.0).sqrt(), hi, CHAIN_TOLERANCE));
    inequalities.push(Inequality::new(
        "cauchy_schwarz",
        cs_violation,
        0.0,
        CAUCHY_SCHWARZ_TOLERANCE,
    ));

    Ok(ChainReport {
        n,
        lhs_root_mean_square: lhs2,
        lhs_image_norms: lhs3,
        norm_hi: hi,
        rademacher_average: average,
        cauchy_schwarz_violation: cs_violation,
        inequalities,
    })
}
