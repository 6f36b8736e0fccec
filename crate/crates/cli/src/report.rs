//! Report documents and their CSV renderings.

use fex_core::certificates::{ChainReport, KhinchinReport};
use fex_core::{AlphaReport, GroupElement, NormCertificate, PeakValidation};
use serde::{Deserialize, Serialize};

use crate::config::{InstanceConfig, Mode, SCHEMA_VERSION};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub schema_version: u32,
    /// The configuration after defaults and command-line overrides.
    pub config: InstanceConfig,
    #[serde(flatten)]
    pub body: ReportBody,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum ReportBody {
    Bounds(BoundsReport),
    Alpha(AlphaModeReport),
    Chain(ChainModeReport),
    Khinchin(KhinchinBatchReport),
    Sweep(SweepReport),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub n: usize,
    pub points: Vec<GroupElement>,
    pub theorem_lower: f64,
    pub theorem_upper: f64,
    pub base_set: Vec<GroupElement>,
    pub peak_validation: PeakValidation,
    pub canonical: NormCertificate,
    pub sign_max: Option<f64>,
    pub rademacher_average: Option<f64>,
    pub violations: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaModeReport {
    pub points: Vec<GroupElement>,
    pub base_set: Vec<GroupElement>,
    #[serde(flatten)]
    pub alpha: AlphaReport,
    pub violations: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainModeReport {
    pub n: usize,
    pub points: Vec<GroupElement>,
    pub base_set: Vec<GroupElement>,
    pub theorem_lower: f64,
    pub theorem_upper: f64,
    pub canonical: ChainReport,
    pub optimized: ChainReport,
    pub violations: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KhinchinBatchReport {
    pub samples: usize,
    pub n_max: usize,
    pub worst_ratio: f64,
    pub equality_case: KhinchinReport,
    pub reports: Vec<KhinchinReport>,
    pub violations: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub n: usize,
    pub seed: u64,
    pub points: Vec<GroupElement>,
    pub theorem_lower: f64,
    pub canonical_grid_max: f64,
    pub canonical_hi: f64,
    pub optimized_hi: f64,
    pub theorem_upper: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub n: usize,
    pub theorem_lower: f64,
    /// Smallest certified upper bound over all seeds.
    pub best_norm_hi: f64,
    pub theorem_upper: f64,
    /// `best_norm_hi − theorem_lower`.
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub n_max: usize,
    pub seeds: Vec<u64>,
    pub rows: Vec<SweepRow>,
    pub summary: Vec<SweepSummary>,
    pub violations: Vec<String>,
}

impl ReportDocument {
    pub fn mode(&self) -> Mode {
        match self.body {
            ReportBody::Bounds(_) => Mode::Bounds,
            ReportBody::Alpha(_) => Mode::Alpha,
            ReportBody::Chain(_) => Mode::Chain,
            ReportBody::Khinchin(_) => Mode::Khinchin,
            ReportBody::Sweep(_) => Mode::Sweep,
        }
    }

    /// Invariant failures detected while producing the report.
    pub fn violations(&self) -> &[String] {
        match &self.body {
            ReportBody::Bounds(r) => &r.violations,
            ReportBody::Alpha(r) => &r.violations,
            ReportBody::Chain(r) => &r.violations,
            ReportBody::Khinchin(r) => &r.violations,
            ReportBody::Sweep(r) => &r.violations,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports contain only finite numbers");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, String> {
        serde_json::from_str(text).map_err(|e| e.to_string())
    }

    /// Structural checks on a (possibly re-parsed) document.
    pub fn validate(&self) -> Result<(), String> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(format!("schema_version {} != {SCHEMA_VERSION}", self.schema_version));
        }
        if self.config.mode != Some(self.mode()) {
            return Err("config.mode does not match report mode".into());
        }
        let bounds_ok = |n: usize, lo: f64, hi: f64| {
            ((n as f64 / 2.0).sqrt() - lo).abs() <= 1e-12 && ((n as f64).sqrt() - hi).abs() <= 1e-12
        };
        let cert_ok = |c: &NormCertificate| {
            c.slack >= 0.0 && c.interval[0] == c.grid_max && c.interval[1] >= c.interval[0]
        };
        match &self.body {
            ReportBody::Bounds(r) => {
                if r.points.len() != r.n || !bounds_ok(r.n, r.theorem_lower, r.theorem_upper) {
                    return Err("bounds: inconsistent n or theorem bounds".into());
                }
                if !cert_ok(&r.canonical) {
                    return Err("bounds: malformed certificate".into());
                }
            }
            ReportBody::Alpha(r) => {
                let a = &r.alpha;
                if a.n != r.points.len() || !bounds_ok(a.n, a.theorem_lower, a.theorem_upper) {
                    return Err("alpha: inconsistent n or theorem bounds".into());
                }
                if !cert_ok(&a.canonical) || !cert_ok(&a.optimized) {
                    return Err("alpha: malformed certificate".into());
                }
                if a.converged_objective_trace.len() != a.iterations {
                    return Err("alpha: trace length differs from iteration count".into());
                }
            }
            ReportBody::Chain(r) => {
                if r.canonical.n != r.n || r.optimized.n != r.n || !bounds_ok(r.n, r.theorem_lower, r.theorem_upper) {
                    return Err("chain: inconsistent n".into());
                }
            }
            ReportBody::Khinchin(r) => {
                if r.reports.iter().any(|k| k.n != k.a.len() || k.n == 0) {
                    return Err("khinchin: vector length mismatch".into());
                }
            }
            ReportBody::Sweep(r) => {
                let keys: Vec<(usize, u64)> = r.rows.iter().map(|row| (row.n, row.seed)).collect();
                if keys.windows(2).any(|w| w[0] >= w[1]) {
                    return Err("sweep: rows are not in (n, seed) order".into());
                }
                if r.rows.len() != r.n_max * r.seeds.len() || r.summary.len() != r.n_max {
                    return Err("sweep: row count does not match n_max and seeds".into());
                }
                if r.rows.iter().any(|row| row.points.len() != row.n || !bounds_ok(row.n, row.theorem_lower, row.theorem_upper)) {
                    return Err("sweep: inconsistent row".into());
                }
            }
        }
        Ok(())
    }

    /// CSV rendering: the sweep table in sweep mode, per-vector ratios in
    /// khinchin mode, and a one-row summary otherwise.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let opt = |x: Option<f64>| x.map(format_sig).unwrap_or_default();
        match &self.body {
            ReportBody::Sweep(r) => {
                w.write_record(["n", "seed", "theorem_lower", "canonical_hi", "optimized_hi", "theorem_upper"])
                    .expect("in-memory write");
                for row in &r.rows {
                    w.write_record([
                        row.n.to_string(),
                        row.seed.to_string(),
                        format_sig(row.theorem_lower),
                        format_sig(row.canonical_hi),
                        format_sig(row.optimized_hi),
                        format_sig(row.theorem_upper),
                    ])
                    .expect("in-memory write");
                }
            }
            ReportBody::Khinchin(r) => {
                w.write_record(["index", "n", "exact_average", "rhs", "ratio"]).expect("in-memory write");
                for (i, k) in r.reports.iter().enumerate() {
                    w.write_record([
                        i.to_string(),
                        k.n.to_string(),
                        format_sig(k.exact_average),
                        format_sig(k.rhs),
                        format_sig(k.ratio),
                    ])
                    .expect("in-memory write");
                }
            }
            body => {
                let (n, lo, up, canonical, optimized) = match body {
                    ReportBody::Bounds(r) => (r.n, r.theorem_lower, r.theorem_upper, r.canonical.hi(), None),
                    ReportBody::Alpha(r) => (
                        r.alpha.n,
                        r.alpha.theorem_lower,
                        r.alpha.theorem_upper,
                        r.alpha.canonical.hi(),
                        Some(r.alpha.optimized.hi()),
                    ),
                    ReportBody::Chain(r) => (
                        r.n,
                        r.theorem_lower,
                        r.theorem_upper,
                        r.canonical.norm_hi,
                        Some(r.optimized.norm_hi),
                    ),
                    _ => unreachable!("handled above"),
                };
                w.write_record(["n", "theorem_lower", "canonical_hi", "optimized_hi", "theorem_upper"])
                    .expect("in-memory write");
                w.write_record([n.to_string(), format_sig(lo), format_sig(canonical), opt(optimized), format_sig(up)])
                    .expect("in-memory write");
            }
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is utf-8")
    }
}

/// Plain decimal notation with 12 significant digits.
pub fn format_sig(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (11 - magnitude).max(0) as usize;
    let s = format!("{x:.decimals$}");
    // rounding can carry into a new leading digit (9.99… → 10.0…)
    let digits = s.chars().filter(|c| c.is_ascii_digit()).collect::<String>();
    if digits.trim_start_matches('0').len() > 12 && decimals > 0 {
        format!("{x:.prec$}", prec = decimals - 1)
    } else {
        s
    }
}
