//! Acceptance suite: one PASS/FAIL line per criterion, written straight to
//! stderr so it shows up without `--nocapture`.

mod common;

use std::io::Write;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::Rng;
use rand_distr::StandardNormal;

use common::{random_case, rel_diff, rng};
use rosenthal::bounds::{
    closed_form_2_3, closed_form_3_4, closed_form_min, corollary_bound, corollary_from_totals, theorem_bound,
    Lambdas,
};
use rosenthal::concentration::{find_bt, r_value};
use rosenthal::gaussian::{ratio_curve, RatioCurvePoint};
use rosenthal::mc::{
    check_2smooth_pointwise, check_lemma1_pointwise, check_riemann_sum, check_young, estimate_and_check,
    estimate_and_check_many, MartingaleModel, ModelKind, NormedSpace, RealDistribution, VerifyConfig,
};
use rosenthal::optimize::{linspace, logspace};
use rosenthal::{brute_force_min_grouped_sum, min_grouped_sum, ConstantSet, MinGroupedSumSpec, PQSchedule, SmoothnessConstant};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn run(number: u32, name: &str, limit: Duration, check: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let o = check();
    let elapsed = start.elapsed();
    let pass = o.pass && elapsed < limit;
    let _ = writeln!(
        std::io::stderr(),
        "criterion {number:>2} {}: {name} [{:.2}s / {}s] {}",
        if pass { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
        limit.as_secs(),
        o.detail
    );
    pass
}

fn constants_at_three() -> Outcome {
    let sched = PQSchedule::default();
    let mut worst: f64 = 0.0;
    for d in [1.0, 2f64.sqrt(), 3f64.sqrt(), 2.0] {
        let dc = SmoothnessConstant::new(d).unwrap();
        let set = ConstantSet::unit_lambdas(3.0, dc, &sched).unwrap();
        let d2 = dc.squared();
        worst = worst.max(rel_diff(set.c_a, (1.0 + d2) / 2.0)).max(rel_diff(set.c_b, 1.0 + d2));
    }
    outcome(worst <= 1e-12, format!("max rel err {worst:.2e}"))
}

const TOTALS: [(f64, f64); 5] = [(1.0, 1.0), (0.3, 2.0), (50.0, 0.7), (1e-6, 1.0), (4.0, 0.0)];

fn closed_form_equivalences() -> Outcome {
    let mut worst_23: f64 = 0.0;
    let mut worst_34: f64 = 0.0;
    let mut worst_min: f64 = 0.0;
    let ds = [SmoothnessConstant::HILBERT, SmoothnessConstant::new(3f64.sqrt()).unwrap()];
    let sched = PQSchedule::default();
    for &d in &ds {
        for (a, b) in TOTALS {
            for k in 1..=50 {
                let t = 2.0 + k as f64 / 50.0;
                let cor = corollary_from_totals(t, d, &sched, a, b, &Lambdas::Optimize).unwrap();
                worst_23 = worst_23.max(rel_diff(cor.value, closed_form_2_3(t, d, a, b).unwrap().value));
            }
            // [3, 4): at t = 4 itself the two-term bound gains a second layer
            for k in 0..50 {
                let t = 3.0 + k as f64 / 50.0;
                for i in 1..=9 {
                    let alpha = i as f64 / 10.0;
                    let cor = corollary_from_totals(t, d, &PQSchedule::beta(alpha).unwrap(), a, b, &Lambdas::Optimize)
                        .unwrap();
                    let closed = closed_form_3_4(t, d, a, b, alpha).unwrap();
                    worst_34 = worst_34.max(rel_diff(cor.value, closed.value));
                }
            }
            // dense in the middle, log-spaced toward both ends where extreme totals put the optimum
            let edge = logspace(1e-14, 1e-2, 2001);
            let mut alphas = linspace(0.0, 1.0, 200_001)[1..200_000].to_vec();
            alphas.extend(edge.iter().copied().chain(edge.iter().map(|e| 1.0 - e)));
            for t in linspace(3.0, 4.0, 11) {
                let grid_min = alphas
                    .iter()
                    .map(|&alpha| closed_form_3_4(t, d, a, b, alpha).unwrap().value)
                    .fold(f64::INFINITY, f64::min);
                worst_min = worst_min.max(rel_diff(closed_form_min(t, d, a, b).unwrap().value, grid_min));
            }
        }
    }
    // t = 4: the two-term bound dominates the closed form and converges to it from below in t
    let mut t4_ok = true;
    for &d in &ds {
        for i in 1..=9 {
            let alpha = i as f64 / 10.0;
            let sched = PQSchedule::beta(alpha).unwrap();
            let closed = closed_form_3_4(4.0, d, 1.0, 1.0, alpha).unwrap().value;
            let at4 = corollary_from_totals(4.0, d, &sched, 1.0, 1.0, &Lambdas::Optimize).unwrap().value;
            let below = corollary_from_totals(4.0 - 1e-9, d, &sched, 1.0, 1.0, &Lambdas::Optimize).unwrap().value;
            t4_ok &= at4 >= closed && rel_diff(below, closed) < 1e-6;
        }
    }
    outcome(
        worst_23 <= 1e-10 && worst_34 <= 1e-10 && worst_min <= 1e-6 && t4_ok,
        format!(
            "(2,3] {worst_23:.2e}; [3,4) {worst_34:.2e}; min vs alpha-grid {worst_min:.2e}; t=4 one-sided limit {}",
            if t4_ok { "ok" } else { "broken" }
        ),
    )
}

fn subset_sum_oracle() -> Outcome {
    let mut r = rng(3);
    let mut worst: f64 = 0.0;
    let mut checked = 0;
    for _ in 0..200 {
        let n = r.random_range(1..=12);
        let weights: Vec<f64> = (0..n).map(|_| r.random_range(0.01..3.0)).collect();
        let mut acc = 0.0;
        let g: Vec<f64> = (0..=n)
            .map(|_| {
                acc += r.random_range(0.0..2.0);
                acc
            })
            .collect();
        for j in 0..=n {
            let spec = MinGroupedSumSpec::new(weights.clone(), g.clone(), j).unwrap();
            worst = worst.max(rel_diff(min_grouped_sum(&spec), brute_force_min_grouped_sum(&spec).unwrap()));
            checked += 1;
        }
    }
    outcome(worst <= 1e-10, format!("{checked} (n, j) cases, max rel err {worst:.2e}"))
}

fn theorem_dominates_corollary() -> Outcome {
    let mut r = rng(4);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..500 {
        let t = 6.0 - r.random_range(0.0..4.0);
        let n = r.random_range(1..=30);
        let case = random_case(&mut r, t, n);
        let sched = if r.random_bool(0.5) { PQSchedule::default() } else { PQSchedule::beta(r.random_range(0.05..0.95)).unwrap() };
        let thm = theorem_bound(&case.profile, &case.envelope, case.d, &sched).unwrap().value;
        let cor = corollary_bound(&case.profile, &case.envelope, case.d, &sched, &Lambdas::Optimize).unwrap().value;
        worst = worst.max((thm - cor) / cor);
    }
    outcome(worst <= 1e-12, format!("500 inputs, max (theorem - corollary)/corollary = {worst:.2e}"))
}

fn concentration_constant() -> Outcome {
    let found = find_bt(3.0).unwrap();
    let grid_max = (0..=1_000_000)
        .map(|i| r_value(3.0, 0.5 * i as f64 / 1e6).unwrap())
        .fold(f64::NEG_INFINITY, f64::max);
    let diff = (found.c_t - grid_max).abs();
    outcome(
        found.c_t > 1.31 && found.c_t < 1.316 && diff <= 1e-8,
        format!("C_3 = {:.12} at b_3 = {:.9}; |golden - grid| = {diff:.2e}", found.c_t, found.b_t),
    )
}

fn gaussian_ratio() -> Outcome {
    let r2 = RatioCurvePoint::at(2.0).unwrap().ratio;
    let r4 = RatioCurvePoint::at(4.0).unwrap().ratio;
    let r3 = RatioCurvePoint::at(3.0).unwrap().ratio;
    let curve = ratio_curve(2.0, 4.0, 2001).unwrap();
    let min = curve.iter().map(|p| p.ratio).fold(f64::INFINITY, f64::min);
    let e3 = (r3 - (std::f64::consts::PI / 2.0).sqrt()).abs();
    outcome(
        (r2 - 1.0).abs() <= 1e-9 && (r4 - 1.0).abs() <= 1e-9 && e3 <= 1e-9 && min >= 1.0 - 1e-12,
        format!("ratio(2)-1 = {:.1e}, ratio(4)-1 = {:.1e}, ratio(3) err {e3:.1e}, min {min:.12}", r2 - 1.0, r4 - 1.0),
    )
}

fn builtin_kinds() -> Vec<ModelKind> {
    vec![
        ModelKind::RademacherReal,
        ModelKind::IidReal { distribution: RealDistribution::UniformSym },
        ModelKind::IidReal { distribution: RealDistribution::TwoPoint { p: 0.1 } },
        ModelKind::HilbertIid { dim: 3 },
        ModelKind::LpVector { p: 3.0, dim: 8 },
        ModelKind::DependentScaled,
    ]
}

fn monte_carlo_validity() -> Outcome {
    let ts = [2.5, 3.0, 3.5, 4.0];
    let sched = PQSchedule::default();
    let (mut checks, mut failures, mut worst_z) = (0, Vec::new(), f64::NEG_INFINITY);
    for kind in builtin_kinds() {
        for n in [1usize, 5, 50] {
            let model = MartingaleModel::new(kind, vec![1.0; n]).unwrap();
            for seed in 0..5 {
                let config = VerifyConfig { seed, replications: 100_000 };
                for r in estimate_and_check_many(&model, &ts, &sched, config).unwrap() {
                    checks += 1;
                    if r.std_error > 0.0 {
                        worst_z = worst_z.max((r.estimate - r.bound.value) / r.std_error);
                    }
                    if !r.passed {
                        failures.push(format!("{kind:?} n={n} seed={seed} t={}", r.t));
                    }
                }
            }
        }
    }
    outcome(
        failures.is_empty(),
        format!(
            "{checks} checks, {} failed, max (estimate - bound)/se = {worst_z:.2}{}",
            failures.len(),
            if failures.is_empty() { String::new() } else { format!(": {}", failures.join("; ")) }
        ),
    )
}

fn sharpness_witness() -> Outcome {
    let model = MartingaleModel::new(ModelKind::RademacherReal, vec![1.0]).unwrap();
    let r = estimate_and_check(&model, 3.0, &PQSchedule::default(), VerifyConfig { seed: 0, replications: 100_000 })
        .unwrap();
    outcome(
        r.bound.value == 1.0 && r.estimate == 1.0 && r.std_error == 0.0 && r.slack == Some(1.0),
        format!("bound {}, estimate {}, se {}, slack {:?}", r.bound.value, r.estimate, r.std_error, r.slack),
    )
}

fn random_vector(r: &mut impl Rng, dim: usize) -> Vec<f64> {
    if r.random_bool(0.03) {
        return vec![0.0; dim];
    }
    let scale = 10f64.powf(r.random_range(-2.0..2.0));
    (0..dim).map(|_| scale * r.sample::<f64, _>(StandardNormal)).collect()
}

fn pointwise_suites() -> Outcome {
    let spaces = [
        NormedSpace::hilbert(1).unwrap(),
        NormedSpace::hilbert(3).unwrap(),
        NormedSpace::hilbert(10).unwrap(),
        NormedSpace::lp(2.0, 2).unwrap(),
        NormedSpace::lp(2.0, 8).unwrap(),
        NormedSpace::lp(3.0, 2).unwrap(),
        NormedSpace::lp(3.0, 8).unwrap(),
        NormedSpace::lp(4.0, 2).unwrap(),
        NormedSpace::lp(4.0, 8).unwrap(),
    ];
    let sched = PQSchedule::default();
    let mut r = rng(9);
    let mut bad = Vec::new();
    for space in spaces {
        let mut fails = 0;
        for _ in 0..100_000 {
            let x = random_vector(&mut r, space.dim());
            let y = random_vector(&mut r, space.dim());
            for t in [2.5, 3.0, 3.7] {
                fails += !check_lemma1_pointwise(&space, &x, &y, t, &sched).unwrap().holds(1e-12) as usize;
            }
            fails += !check_2smooth_pointwise(&space, &x, &y).unwrap().holds(1e-12) as usize;
        }
        if fails > 0 {
            bad.push(format!("{space:?}: {fails}"));
        }
    }
    let mut riemann_fails = 0;
    let mut young_fails = 0;
    for _ in 0..10_000 {
        let n = r.random_range(1..=20);
        let b: Vec<f64> = (0..n).map(|_| 10f64.powf(r.random_range(-2.0..2.0))).collect();
        riemann_fails += !check_riemann_sum(&b, r.random_range(0.0..5.0)).unwrap() as usize;
        let p = r.random_range(1.01..10.0);
        let q = p / (p - 1.0);
        let (x, y) = (10f64.powf(r.random_range(-3.0..3.0)), 10f64.powf(r.random_range(-3.0..3.0)));
        young_fails += !check_young(x, y, p, q).unwrap_or(false) as usize;
    }
    outcome(
        bad.is_empty() && riemann_fails == 0 && young_fails == 0,
        format!(
            "9 spaces x 1e5 points; violations: [{}]; Riemann {riemann_fails}/1e4, Young {young_fails}/1e4",
            bad.join(", ")
        ),
    )
}

fn determinism() -> Outcome {
    let args = [
        vec!["verify", "--model", "lp", "--n", "20", "--t", "3.5", "--seed", "7", "--reps", "30000"],
        vec!["verify", "--model", "dependent", "--n", "5", "--t", "3", "--seed", "2", "--reps", "30000"],
    ];
    let mut all_equal = true;
    for a in &args {
        let outputs: Vec<_> = ["1", "4"]
            .iter()
            .map(|threads| {
                Command::new(env!("CARGO_BIN_EXE_rosenthal"))
                    .args(a)
                    .env("ROSENTHAL_THREADS", threads)
                    .output()
                    .expect("binary runs")
            })
            .collect();
        all_equal &= outputs.iter().all(|o| o.status.code() == Some(0))
            && !outputs[0].stdout.is_empty()
            && outputs[0].stdout == outputs[1].stdout;
    }
    outcome(all_equal, format!("{} verify runs byte-compared across 1 and 4 workers", args.len()))
}

#[test]
fn acceptance_criteria() {
    let s = Duration::from_secs;
    let results = [
        run(1, "constants at t = 3", s(1), constants_at_three),
        run(2, "closed-form equivalences", s(5), closed_form_equivalences),
        run(3, "grouped-sum recursion vs enumeration", s(10), subset_sum_oracle),
        run(4, "main bound <= two-term bound", s(10), theorem_dominates_corollary),
        run(5, "re-centering constant C_3", s(2), concentration_constant),
        run(6, "Gaussian moment ratio curve", s(1), gaussian_ratio),
        run(7, "Monte-Carlo bound validity", s(300), monte_carlo_validity),
        run(8, "sharp single Rademacher step", s(1), sharpness_witness),
        run(9, "pointwise inequality sweeps", s(30), pointwise_suites),
        run(10, "thread-count determinism", s(60), determinism),
    ];
    let failed: Vec<usize> = results.iter().enumerate().filter(|(_, p)| !**p).map(|(i, _)| i + 1).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
