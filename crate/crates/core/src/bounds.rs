//! Upper bounds on `E‖S_n‖^t`: the main subset-sum bound, its two-term
//! corollary `C_A A_n(t) + C_B B_n^t`, the closed forms for `t ∈ (2, 4]`, and
//! the older `K^t(…)` spectrum kept for comparison.

use serde::{Deserialize, Serialize};

use crate::constants::{check_t_above_two, optimize_lambdas, ConstantSet};
use crate::error::{domain, invalid, Result};
use crate::optimize::{grid_then_golden_min, linspace, logspace};
use crate::schedule::PQSchedule;
use crate::subset_sums::{min_grouped_sum, MinGroupedSumSpec};
use crate::types::{
    layer_count, BoundReport, Method, MomentProfile, SmoothnessConstant, VarianceEnvelope,
};

/// Number of β values in the fixed scan used by [`best_bound`].
pub const BETA_GRID_POINTS: usize = 33;
pub const BETA_GRID_RANGE: (f64, f64) = (0.02, 0.98);

/// Default `K` of the comparison spectrum.
pub const PIN94_DEFAULT_K: f64 = 120.0;

/// Balancing parameters for the two-term bound.
#[derive(Debug, Clone, PartialEq)]
pub enum Lambdas {
    Given(Vec<f64>),
    Optimize,
}

fn check_sizes(profile: &MomentProfile, envelope: &VarianceEnvelope) -> Result<()> {
    if profile.n() != envelope.n() {
        return Err(invalid(format!(
            "profile has n = {} increments but envelope has {}",
            profile.n(),
            envelope.n()
        )));
    }
    Ok(())
}

/// The main bound, for `t ≥ 2`.
///
/// `Σ_{j<m} c_j(t) T_j + c̃_m(t) T̃_m` where `T_j` groups `A_{μ(J)−1}(t−2j)`
/// over `j`-subsets and `T̃_m` groups `A_{μ(J)−1}(2)^{t/2−m}` over `m`-subsets,
/// both weighted by `Π_{i∈J} b_i²`.
pub fn theorem_bound(
    profile: &MomentProfile,
    envelope: &VarianceEnvelope,
    d: SmoothnessConstant,
    schedule: &PQSchedule,
) -> Result<BoundReport> {
    if profile.t() < 2.0 {
        return Err(domain("t must be at least 2 (use the unrestricted variant for t < 2)"));
    }
    theorem_bound_unrestricted(profile, envelope, d, schedule)
}

/// The main bound for any `t ≥ 0`. Below 2 it collapses to `A_n(2)^{t/2}`.
pub fn theorem_bound_unrestricted(
    profile: &MomentProfile,
    envelope: &VarianceEnvelope,
    d: SmoothnessConstant,
    schedule: &PQSchedule,
) -> Result<BoundReport> {
    check_sizes(profile, envelope)?;
    let t = profile.t();
    let m = layer_count(t);
    let weights = envelope.squares();

    let mut c = Vec::with_capacity(m);
    let mut value = 0.0;
    for j in 0..m {
        let cj = crate::constants::c_j(t, d, schedule, j)?;
        let g = profile.prefix_sums(t - 2.0 * j as f64)?;
        value += cj * min_grouped_sum(&MinGroupedSumSpec::new(weights.clone(), g, j)?);
        c.push(cj);
    }
    let c_tilde = crate::constants::c_tilde(t, d, schedule)?;
    let power = t / 2.0 - m as f64;
    // 0^0 = 1 when t = 2m
    let g: Vec<f64> = profile.prefix_sums(2.0)?.into_iter().map(|a| a.powf(power)).collect();
    value += c_tilde * min_grouped_sum(&MinGroupedSumSpec::new(weights, g, m)?);

    let a_t = profile.partial_moment_sum(profile.n(), t).unwrap_or(f64::NAN);
    let mut report = BoundReport::new(Method::Theorem, t, value).with_ratio(a_t, envelope.total());
    report.constants.c = Some(c);
    report.constants.c_tilde = Some(c_tilde);
    report.parameters.beta = schedule.beta_value();
    Ok(report)
}

/// `C_A A_n(t) + C_B B_n^t` for `t > 2`.
pub fn corollary_bound(
    profile: &MomentProfile,
    envelope: &VarianceEnvelope,
    d: SmoothnessConstant,
    schedule: &PQSchedule,
    lambdas: &Lambdas,
) -> Result<BoundReport> {
    check_sizes(profile, envelope)?;
    let t = profile.t();
    check_t_above_two(t)?;
    let a_t = profile.partial_moment_sum(profile.n(), t)?;
    corollary_from_totals(t, d, schedule, a_t, envelope.total(), lambdas)
}

/// Two-term bound from the totals `A_n(t)` and `B_n` alone.
pub fn corollary_from_totals(
    t: f64,
    d: SmoothnessConstant,
    schedule: &PQSchedule,
    a_t: f64,
    b: f64,
    lambdas: &Lambdas,
) -> Result<BoundReport> {
    check_t_above_two(t)?;
    check_totals(a_t, b)?;
    let lambdas = match lambdas {
        Lambdas::Given(l) => l.clone(),
        Lambdas::Optimize => optimize_lambdas(t, d, schedule, a_t, b)?,
    };
    let set = ConstantSet::compute(t, d, schedule, &lambdas)?;
    let mut report = BoundReport::new(Method::Corollary, t, set.bound(a_t, b)).with_ratio(a_t, b);
    report.constants.c_a = Some(set.c_a);
    report.constants.c_b = Some(set.c_b);
    report.constants.c = Some(set.c);
    report.constants.c_tilde = Some(set.c_tilde);
    report.parameters.lambdas = Some(lambdas);
    report.parameters.beta = schedule.beta_value();
    Ok(report)
}

/// Two-term bound with optimized `λ`, minimized over the β-family by a fixed
/// 33-point log grid on `[0.02, 0.98]` followed by golden-section refinement.
pub fn corollary_beta_scan(t: f64, d: SmoothnessConstant, a_t: f64, b: f64) -> Result<BoundReport> {
    check_t_above_two(t)?;
    check_totals(a_t, b)?;
    let eval = |beta: f64| -> Result<BoundReport> {
        corollary_from_totals(t, d, &PQSchedule::beta(beta)?, a_t, b, &Lambdas::Optimize)
    };
    // Every β in range is admissible, so failures here are impossible once the
    // checks above pass; map them to +inf rather than unwinding.
    let objective = |beta: f64| eval(beta).map(|r| r.value).unwrap_or(f64::INFINITY);
    let grid = logspace(BETA_GRID_RANGE.0, BETA_GRID_RANGE.1, BETA_GRID_POINTS);
    let best = grid_then_golden_min(objective, &grid, 1e-10);
    eval(best.x)
}

fn check_totals(a_t: f64, b: f64) -> Result<()> {
    if !(a_t >= 0.0) || !a_t.is_finite() || !(b >= 0.0) || !b.is_finite() {
        return Err(invalid(format!("A_n(t) and B_n must be finite and >= 0, got {a_t}, {b}")));
    }
    Ok(())
}

fn ratio_coefficient(t: f64, d: SmoothnessConstant) -> f64 {
    (t - 2.0 + d.squared()) / (t - 1.0)
}

/// `((t−2+D²)/(t−1)) (A_t + (t−1) B^t)` for `t ∈ (2, 3]`.
pub fn closed_form_2_3(t: f64, d: SmoothnessConstant, a_t: f64, b: f64) -> Result<BoundReport> {
    if !(t > 2.0 && t <= 3.0) {
        return Err(domain(format!("closed form needs t in (2, 3], got {t}")));
    }
    check_totals(a_t, b)?;
    let k = ratio_coefficient(t, d);
    let mut report =
        BoundReport::new(Method::Closed23, t, k * (a_t + (t - 1.0) * b.powf(t))).with_ratio(a_t, b);
    report.constants.c_a = Some(k);
    report.constants.c_b = Some(k * (t - 1.0));
    Ok(report)
}

/// `((t−2+D²)/(t−1)) (A_t/α^{t−3} + (t−1) B^t/(1−α)^{t−3})` for `t ∈ [3, 4]`.
pub fn closed_form_3_4(
    t: f64,
    d: SmoothnessConstant,
    a_t: f64,
    b: f64,
    alpha: f64,
) -> Result<BoundReport> {
    if !(3.0..=4.0).contains(&t) {
        return Err(domain(format!("closed form needs t in [3, 4], got {t}")));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(domain(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    check_totals(a_t, b)?;
    let k = ratio_coefficient(t, d);
    let c_a = k / alpha.powf(t - 3.0);
    let c_b = k * (t - 1.0) / (1.0 - alpha).powf(t - 3.0);
    let mut report = BoundReport::new(Method::Closed34, t, c_a * a_t + c_b * b.powf(t)).with_ratio(a_t, b);
    report.constants.c_a = Some(c_a);
    report.constants.c_b = Some(c_b);
    report.parameters.alpha = Some(alpha);
    Ok(report)
}

/// The `(3, 4]` closed form minimized over `α`, joined with the `(2, 3]` one:
/// `((t−2+D²)/(t−1)) [A_t^{1/s} + (t−1)^{1/s} B^{t/s}]^s`, `s = max(1, t−2)`.
pub fn closed_form_min(t: f64, d: SmoothnessConstant, a_t: f64, b: f64) -> Result<BoundReport> {
    if !(t > 2.0 && t <= 4.0) {
        return Err(domain(format!("closed form needs t in (2, 4], got {t}")));
    }
    check_totals(a_t, b)?;
    let s = (t - 2.0).max(1.0);
    let inner = a_t.powf(1.0 / s) + (t - 1.0).powf(1.0 / s) * b.powf(t / s);
    let value = ratio_coefficient(t, d) * inner.powf(s);
    Ok(BoundReport::new(Method::ClosedMin, t, value).with_ratio(a_t, b))
}

/// `2^{(t−3)_+} (A_t + (t−1) B^t)` for `t ∈ (2, 4]` in a Hilbert space.
pub fn hilbert_2_4(t: f64, a_t: f64, b: f64) -> Result<BoundReport> {
    if !(t > 2.0 && t <= 4.0) {
        return Err(domain(format!("Hilbert-space closed form needs t in (2, 4], got {t}")));
    }
    check_totals(a_t, b)?;
    let k = 2f64.powf((t - 3.0).max(0.0));
    let mut report = BoundReport::new(Method::Hilbert24, t, k * (a_t + (t - 1.0) * b.powf(t))).with_ratio(a_t, b);
    report.constants.c_a = Some(k);
    report.constants.c_b = Some(k * (t - 1.0));
    report.parameters.alpha = Some(0.5);
    Ok(report)
}

/// `((1+D²)/2)(A_n(3) + 2 B_n³)`.
pub fn t3_bound(d: SmoothnessConstant, a_3: f64, b: f64) -> Result<BoundReport> {
    check_totals(a_3, b)?;
    let k = (1.0 + d.squared()) / 2.0;
    let mut report = BoundReport::new(Method::T3, 3.0, k * (a_3 + 2.0 * b.powi(3))).with_ratio(a_3, b);
    report.constants.c_a = Some(k);
    report.constants.c_b = Some(2.0 * k);
    Ok(report)
}

/// Settings for the comparison spectrum `K^t (c^t A + c^{t/2} e^{t²/c} D^t B^t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pin94Config {
    #[serde(rename = "K", default = "default_k")]
    pub k: f64,
    /// Fixed balancing parameter in `[1, t]`; `None` minimizes over it.
    #[serde(default)]
    pub c: Option<f64>,
}

fn default_k() -> f64 {
    PIN94_DEFAULT_K
}

impl Default for Pin94Config {
    fn default() -> Self {
        Self { k: PIN94_DEFAULT_K, c: None }
    }
}

/// The comparison spectrum; minimizes over `c ∈ [1, t]` when no `c` is fixed.
pub fn pin94_bound(
    t: f64,
    d: SmoothnessConstant,
    a_t: f64,
    b: f64,
    config: &Pin94Config,
) -> Result<BoundReport> {
    if !(t >= 2.0) || !t.is_finite() {
        return Err(domain(format!("comparison bound needs t >= 2, got {t}")));
    }
    if !(config.k > 0.0) || !config.k.is_finite() {
        return Err(invalid(format!("K must be finite and > 0, got {}", config.k)));
    }
    check_totals(a_t, b)?;
    let spectrum = |c: f64| {
        config.k.powf(t)
            * (c.powf(t) * a_t + c.powf(t / 2.0) * (t * t / c).exp() * d.value().powf(t) * b.powf(t))
    };
    let c = match config.c {
        Some(c) if (1.0..=t).contains(&c) => c,
        Some(c) => return Err(domain(format!("balancing parameter c must lie in [1, {t}], got {c}"))),
        None => grid_then_golden_min(spectrum, &linspace(1.0, t, 65), 1e-10).x,
    };
    let mut report = BoundReport::new(Method::Pin94, t, spectrum(c)).with_ratio(a_t, b);
    report.parameters.c = Some(c);
    report.parameters.k = Some(config.k);
    Ok(report)
}

/// Evaluates every applicable bound and returns the smallest.
///
/// Candidates: the main bound under `schedule`; the two-term bound with
/// optimized `λ` under `schedule` and under the scanned β-family; and the
/// closed forms whose `t`-range contains `t`. Exact ties go to the main
/// bound, then the closed forms, then the two-term bound.
pub fn best_bound(
    profile: &MomentProfile,
    envelope: &VarianceEnvelope,
    d: SmoothnessConstant,
    schedule: &PQSchedule,
) -> Result<BoundReport> {
    let candidates = candidate_bounds(profile, envelope, d, schedule)?;
    Ok(candidates
        .into_iter()
        .min_by(|x, y| {
            x.value
                .total_cmp(&y.value)
                .then(x.method.preference().cmp(&y.method.preference()))
        })
        .expect("candidate set is never empty"))
}

/// All candidates considered by [`best_bound`], in a fixed order.
pub fn candidate_bounds(
    profile: &MomentProfile,
    envelope: &VarianceEnvelope,
    d: SmoothnessConstant,
    schedule: &PQSchedule,
) -> Result<Vec<BoundReport>> {
    check_sizes(profile, envelope)?;
    let t = profile.t();
    check_t_above_two(t)?;
    let a_t = profile.partial_moment_sum(profile.n(), t)?;
    let b = envelope.total();

    let mut out = vec![
        theorem_bound(profile, envelope, d, schedule)?,
        corollary_from_totals(t, d, schedule, a_t, b, &Lambdas::Optimize)?,
        corollary_beta_scan(t, d, a_t, b)?,
    ];
    if t <= 3.0 {
        out.push(closed_form_2_3(t, d, a_t, b)?);
    }
    if t <= 4.0 {
        out.push(closed_form_min(t, d, a_t, b)?);
        if d.value() == 1.0 {
            out.push(hilbert_2_4(t, a_t, b)?);
        }
    }
    if t == 3.0 {
        out.push(t3_bound(d, a_t, b)?);
    }
    Ok(out)
}
