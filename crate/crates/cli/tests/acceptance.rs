//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::process::{Command, ExitCode};
use std::time::Instant;

use fex_cli::{run, sample_points, InstanceConfig, Mode, ReportBody, RunOptions};
use fex_core::extension::certificate_slack;
use fex_core::{
    build_peak, canonical_operator, chain_check, difference_set, greedy_base_set, khinchin_check,
    norm_certified, optimize_alpha, random_feasible_operator, validate_peak, AlphaOptions,
    Complex64, ExtensionOperator, GroupSpec, PointSet,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const GROUPS: [&[i64]; 5] = [&[8], &[12], &[16], &[2, 4], &[3, 5]];
const GRID: u32 = 16;

struct Instance {
    spec: GroupSpec,
    points: PointSet,
    canonical: ExtensionOperator,
}

impl Instance {
    fn new(spec: &GroupSpec, points: PointSet) -> Instance {
        let peak = build_peak(spec, &greedy_base_set(spec, &difference_set(spec, &points))).unwrap();
        let canonical = canonical_operator(spec, &points, &peak).unwrap();
        Instance { spec: spec.clone(), points, canonical }
    }

    fn n(&self) -> usize {
        self.points.len()
    }

    fn label(&self) -> String {
        let pts: Vec<String> = self.points.points().iter().map(|p| p.to_string()).collect();
        format!("{} K={{{}}}", self.spec, pts.join(","))
    }
}

/// All subsets of size 1 and 2, and 25 seeded random subsets of sizes 3 and 4.
fn instances() -> Vec<Instance> {
    let mut out = Vec::new();
    for factors in GROUPS {
        let spec = GroupSpec::new(factors).unwrap();
        let order = spec.order();
        for i in 0..order {
            out.push(Instance::new(&spec, PointSet::from_indices(&spec, &[i]).unwrap()));
        }
        for i in 0..order {
            for j in i + 1..order {
                out.push(Instance::new(&spec, PointSet::from_indices(&spec, &[i, j]).unwrap()));
            }
        }
        for n in 3..=4 {
            for seed in 0..25 {
                out.push(Instance::new(&spec, sample_points(&spec, n, seed).unwrap()));
            }
        }
    }
    out
}

fn random_operators(inst: &Instance, index: usize) -> Vec<ExtensionOperator> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0000 + index as u64);
    (0..10).map(|_| random_feasible_operator(&inst.spec, &inst.points, &mut rng).unwrap()).collect()
}

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(failures: Vec<String>, summary: String) -> Outcome {
    match failures.first() {
        None => Outcome { passed: true, detail: summary },
        Some(first) => Outcome {
            passed: false,
            detail: format!("{} failure(s), first: {first}", failures.len()),
        },
    }
}

fn upper_bound(insts: &[Instance]) -> Outcome {
    let mut failures = Vec::new();
    let mut worst = f64::NEG_INFINITY;
    for inst in insts {
        let cert = norm_certified(&inst.canonical, GRID).unwrap();
        let excess = cert.grid_max - (inst.n() as f64).sqrt();
        worst = worst.max(excess);
        if excess > 1e-6 {
            failures.push(format!("{}: grid_max exceeds √n by {excess:e}", inst.label()));
        }
    }
    outcome(failures, format!("{} instances, max(grid_max − √n) = {worst:.3e}", insts.len()))
}

fn lower_bound(insts: &[Instance]) -> Outcome {
    let mut failures = Vec::new();
    let mut count = 0;
    let mut worst = f64::INFINITY;
    for (i, inst) in insts.iter().enumerate() {
        let lower = (inst.n() as f64 / 2.0).sqrt();
        for op in std::iter::once(inst.canonical.clone()).chain(random_operators(inst, i)) {
            let hi = norm_certified(&op, GRID).unwrap().hi();
            count += 1;
            worst = worst.min(hi - lower);
            if hi < lower - 1e-9 {
                failures.push(format!("{}: hi {hi} below √(n/2) = {lower}", inst.label()));
            }
        }
    }
    outcome(failures, format!("{count} operators, min(hi − √(n/2)) = {worst:.4}"))
}

fn z2_anchor() -> Outcome {
    let spec = GroupSpec::new(&[2]).unwrap();
    let points = PointSet::from_indices(&spec, &[0, 1]).unwrap();
    let peak = build_peak(&spec, &greedy_base_set(&spec, &difference_set(&spec, &points))).unwrap();
    let opts = AlphaOptions { resolution: 128, ..AlphaOptions::default() };
    let search = optimize_alpha(&spec, &points, &peak, &opts).unwrap();
    let sqrt2 = 2f64.sqrt();
    let mut failures = Vec::new();
    for (label, cert) in [("canonical", &search.report.canonical), ("optimized", &search.report.optimized)] {
        let window = [sqrt2 - 5e-3, sqrt2 + cert.slack];
        if cert.lo() < window[0] || cert.hi() > window[1] {
            failures.push(format!("{label} interval {:?} outside {window:?}", cert.interval));
        }
    }
    let r = &search.report;
    outcome(
        failures,
        format!("canonical {:?}, optimized {:?}", r.canonical.interval, r.optimized.interval),
    )
}

fn singleton_anchor() -> Outcome {
    let mut failures = Vec::new();
    let mut count = 0;
    let mut worst: f64 = 0.0;
    for factors in GROUPS {
        let spec = GroupSpec::new(factors).unwrap();
        for i in 0..spec.order() {
            let inst = Instance::new(&spec, PointSet::from_indices(&spec, &[i]).unwrap());
            let peak = build_peak(&spec, &greedy_base_set(&spec, &difference_set(&spec, &inst.points))).unwrap();
            let r = optimize_alpha(&spec, &inst.points, &peak, &AlphaOptions::default()).unwrap().report;
            let dev = (r.optimized.lo() - 1.0).abs().max((r.optimized.hi() - 1.0).abs());
            worst = worst.max(dev);
            count += 1;
            if dev > 1e-6 {
                failures.push(format!("{}: optimized interval {:?}", inst.label(), r.optimized.interval));
            }
        }
    }
    outcome(failures, format!("{count} singletons, max |norm − 1| = {worst:.1e}"))
}

fn khinchin() -> Outcome {
    let config = InstanceConfig::from_json(r#"{"samples":1000,"khinchin_n_max":10,"seed":0}"#).unwrap();
    let doc = run(&config, Mode::Khinchin, RunOptions::default()).unwrap();
    let ReportBody::Khinchin(batch) = &doc.body else { unreachable!() };
    let mut failures: Vec<String> = batch
        .reports
        .iter()
        .enumerate()
        .filter(|(_, r)| r.exact_average < r.rhs)
        .map(|(i, r)| format!("vector {i}: ratio {}", r.ratio))
        .collect();
    if batch.reports.len() != 1000 || batch.reports.iter().any(|r| r.n > 10) {
        failures.push("batch does not consist of 1000 vectors with n ≤ 10".into());
    }
    let one = Complex64::new(1.0, 0.0);
    let eq = khinchin_check(&[one, one]).unwrap();
    if (eq.ratio - 1.0).abs() > 1e-12 {
        failures.push(format!("equality case ratio {}", eq.ratio));
    }
    outcome(
        failures,
        format!("1000 vectors, worst ratio {:.6}, equality ratio − 1 = {:.1e}", batch.worst_ratio, eq.ratio - 1.0),
    )
}

fn peak_properties() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut failures = Vec::new();
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let spec = GroupSpec::new(GROUPS[rng.random_range(0..GROUPS.len())]).unwrap();
        let n = rng.random_range(1..=6);
        let points = sample_points(&spec, n, rng.random()).unwrap();
        let forbidden = difference_set(&spec, &points);
        let peak = build_peak(&spec, &greedy_base_set(&spec, &forbidden)).unwrap();
        let v = validate_peak(&peak, &forbidden).unwrap();
        worst = worst.max(v.worst_violation());
        if !v.passed() || v.worst_violation() >= 1e-12 {
            failures.push(format!("{spec} n={n}: worst violation {:e}", v.worst_violation()));
        }
    }
    outcome(failures, format!("200 instances, worst violation {worst:.1e}"))
}

fn proof_chain(insts: &[Instance]) -> Outcome {
    let mut failures = Vec::new();
    let mut count = 0;
    let mut worst = f64::INFINITY;
    for (i, inst) in insts.iter().enumerate() {
        for op in std::iter::once(inst.canonical.clone()).chain(random_operators(inst, i)) {
            let report = chain_check(&op, GRID).unwrap();
            count += 1;
            worst = worst.min(report.min_margin());
            if report.min_margin() < -1e-9 {
                let bad = report.inequalities.iter().find(|q| q.margin < -1e-9).unwrap();
                failures.push(format!("{}: {} margin {:e}", inst.label(), bad.name, bad.margin));
            }
        }
    }
    outcome(failures, format!("{count} operators, min margin {worst:.3e}"))
}

fn optimizer_sanity(insts: &[Instance]) -> Outcome {
    const BUDGET: usize = 200;
    let mut failures = Vec::new();
    let mut improved = 0;
    for inst in insts {
        let peak = build_peak(
            &inst.spec,
            &greedy_base_set(&inst.spec, &difference_set(&inst.spec, &inst.points)),
        )
        .unwrap();
        let opts = AlphaOptions { resolution: GRID, budget: BUDGET, ..AlphaOptions::default() };
        let r = optimize_alpha(&inst.spec, &inst.points, &peak, &opts).unwrap().report;
        if r.optimized.hi() > r.canonical.hi() + 1e-9 {
            failures.push(format!("{}: optimized hi {} > canonical hi {}", inst.label(), r.optimized.hi(), r.canonical.hi()));
        }
        if r.converged_objective_trace.windows(2).any(|w| w[1] > w[0]) {
            failures.push(format!("{}: best-so-far trace increases", inst.label()));
        }
        if r.optimized.hi() < r.canonical.hi() - 1e-9 {
            improved += 1;
        }
    }
    outcome(
        failures,
        format!("{} instances at budget {BUDGET}, {improved} strictly improved", insts.len()),
    )
}

fn refinement() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut failures = Vec::new();
    for case in 0..50 {
        let spec = GroupSpec::new(GROUPS[rng.random_range(0..GROUPS.len())]).unwrap();
        let n = rng.random_range(1..=4);
        let inst = Instance::new(&spec, sample_points(&spec, n, rng.random()).unwrap());
        let op = if case % 2 == 0 {
            inst.canonical.clone()
        } else {
            random_feasible_operator(&spec, &inst.points, &mut rng).unwrap()
        };
        let m = [4u32, 8, 16][rng.random_range(0..3)];
        let coarse = norm_certified(&op, m).unwrap();
        let fine = norm_certified(&op, 2 * m).unwrap();
        if fine.grid_max < coarse.grid_max {
            failures.push(format!("{} M={m}: grid_max drops {} → {}", inst.label(), coarse.grid_max, fine.grid_max));
        }
        let allowed = certificate_slack(op.image_norms(), 2 * m);
        if fine.hi() > coarse.hi() + allowed {
            failures.push(format!("{} M={m}: hi rises by {}", inst.label(), fine.hi() - coarse.hi()));
        }
    }
    outcome(failures, "50 instances".into())
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("sweep.json");
    std::fs::write(&config, r#"{"group":[16],"n_max":4,"seeds":[0,1,2,3,4,5,6,7,8,9]}"#).unwrap();
    let mut tables = Vec::new();
    let mut failures = Vec::new();
    for name in ["a.csv", "b.csv"] {
        let csv = dir.path().join(name);
        let status = Command::new(env!("CARGO_BIN_EXE_fex"))
            .arg("sweep")
            .arg("--config")
            .arg(&config)
            .arg("--csv")
            .arg(&csv)
            .arg("--out")
            .arg(dir.path().join(format!("{name}.json")))
            .arg("--quiet")
            .status()
            .unwrap();
        if !status.success() {
            failures.push(format!("sweep exited with {status}"));
        }
        tables.push(std::fs::read(&csv).unwrap_or_default());
    }
    if tables[0] != tables[1] {
        failures.push("CSV outputs differ".into());
    }
    let rows = tables[0].iter().filter(|&&b| b == b'\n').count().saturating_sub(1);
    if rows != 40 {
        failures.push(format!("expected 40 rows, found {rows}"));
    }
    outcome(failures, format!("two sweeps, {rows} rows, {} bytes identical", tables[0].len()))
}

type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn main() -> ExitCode {
    let start = Instant::now();
    let insts = instances();
    let criteria: Vec<Criterion> = vec![
        ("upper bound √n for the canonical operator", Box::new(|| upper_bound(&insts))),
        ("lower bound √(n/2) for canonical and random feasible operators", Box::new(|| lower_bound(&insts))),
        ("Z2 with K = Γ has norm √2", Box::new(z2_anchor)),
        ("singleton point sets have norm 1", Box::new(singleton_anchor)),
        ("sign-average inequality with constant 1/√2", Box::new(khinchin)),
        ("peak function properties", Box::new(peak_properties)),
        ("proof-chain inequalities", Box::new(|| proof_chain(&insts))),
        ("optimizer never worsens the canonical bound", Box::new(|| optimizer_sanity(&insts))),
        ("certificates are sound under grid refinement", Box::new(refinement)),
        ("sweep CSV is byte-identical across runs", Box::new(determinism)),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let o = check();
        if !o.passed {
            failed += 1;
        }
        println!(
            "criterion {:>2} {} {name}: {} ({:.1}s)",
            i + 1,
            if o.passed { "PASS" } else { "FAIL" },
            o.detail,
            t.elapsed().as_secs_f64()
        );
    }
    println!(
        "acceptance: {} passed, {failed} failed in {:.1}s",
        criteria.len() - failed,
        start.elapsed().as_secs_f64()
    );
    if failed == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE }
}
