//! Central-moment bounds for separately Lipschitz functions of independent
//! arguments, and for the norm of a sum of independent vectors.
//!
//! The `A`-part of the two-term bound picks up the re-centering factor
//! `C_t = R(t, b_t)`, where
//! `R(t, b) = (b^{t−1} + (1−b)^{t−1}) (b^{1/(t−1)} + (1−b)^{1/(t−1)})^{t−1}`
//! and `b_t` maximizes `R(t, ·)` on `[0, 1/2]`.

use serde::Serialize;

use crate::bounds::{corollary_from_totals, Lambdas};
use crate::constants::check_t_above_two;
use crate::error::{domain, invalid, Result};
use crate::optimize::{golden_section_max, linspace};
use crate::schedule::PQSchedule;
use crate::types::SmoothnessConstant;

const BT_GRID_POINTS: usize = 1024;
const BT_TOL: f64 = 1e-10;
const TIE_TOL: f64 = 1e-9;

/// `R(t, b)` for `t > 2` and `b ∈ [0, 1]`.
pub fn r_value(t: f64, b: f64) -> Result<f64> {
    check_t_above_two(t)?;
    if !(0.0..=1.0).contains(&b) {
        return Err(domain(format!("R(t, b) needs b in [0, 1], got {b}")));
    }
    Ok(r_unchecked(t, b))
}

fn r_unchecked(t: f64, b: f64) -> f64 {
    let e = t - 1.0;
    let c = 1.0 - b;
    (b.powf(e) + c.powf(e)) * (b.powf(1.0 / e) + c.powf(1.0 / e)).powf(e)
}

/// Maximizer `b_t` of `R(t, ·)` on `[0, 1/2]` and `C_t = R(t, b_t)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReCenteringConstant {
    pub t: f64,
    pub b_t: f64,
    pub c_t: f64,
    /// Set when two separated grid cells tie within `1e-9`, which would mean
    /// the maximizer is not unique.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

/// Locates `b_t` by a 1024-point grid on `[0, 1/2]`, then golden-section
/// refinement to `|Δb| ≤ 1e-10`.
pub fn find_bt(t: f64) -> Result<ReCenteringConstant> {
    check_t_above_two(t)?;
    let grid = linspace(0.0, 0.5, BT_GRID_POINTS);
    let values: Vec<f64> = grid.iter().map(|&b| r_unchecked(t, b)).collect();
    let (best, best_val) = values
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });

    let warning = values
        .iter()
        .enumerate()
        .find(|(i, v)| i.abs_diff(best) > 1 && (best_val - **v).abs() <= TIE_TOL)
        .map(|(i, _)| {
            format!(
                "R({t}, .) has near-equal grid maxima at b = {} and b = {}",
                grid[best], grid[i]
            )
        });

    let lo = grid[best.saturating_sub(1)];
    let hi = grid[(best + 1).min(BT_GRID_POINTS - 1)];
    let refined = golden_section_max(|b| r_unchecked(t, b), lo, hi, BT_TOL);
    let (b_t, c_t) = if refined.value >= best_val {
        (refined.x, refined.value)
    } else {
        (grid[best], best_val)
    };
    Ok(ReCenteringConstant { t, b_t, c_t, warning })
}

/// Per-coordinate moments of the Lipschitz moduli.
#[derive(Debug, Clone, PartialEq)]
pub struct LipschitzMomentData {
    pub t: f64,
    /// `E ρ_i(X_i, x_i)^t`.
    pub rho_t: Vec<f64>,
    /// `E ρ_i(X_i, y_i)²`.
    pub rho_2: Vec<f64>,
}

impl LipschitzMomentData {
    pub fn new(t: f64, rho_t: Vec<f64>, rho_2: Vec<f64>) -> Result<Self> {
        check_t_above_two(t)?;
        if rho_t.len() != rho_2.len() {
            return Err(invalid(format!(
                "rho_t has {} entries but rho_2 has {}",
                rho_t.len(),
                rho_2.len()
            )));
        }
        if rho_t.iter().chain(&rho_2).any(|x| !x.is_finite() || *x < 0.0) {
            return Err(invalid("Lipschitz moments must be finite and >= 0"));
        }
        Ok(Self { t, rho_t, rho_2 })
    }
}

/// A central-moment bound with the constants that produced it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConcentrationBound {
    pub value: f64,
    pub t: f64,
    #[serde(rename = "C_t")]
    pub c_t: f64,
    pub b_t: f64,
    #[serde(rename = "C_A")]
    pub c_a: f64,
    #[serde(rename = "C_B")]
    pub c_b: f64,
    pub lambdas: Vec<f64>,
}

/// `C_t C_A Σ E ρ_i^t + C_B (Σ E ρ_i²)^{t/2}` with the Hilbert-space (`D = 1`)
/// constants.
pub fn separately_lipschitz_bound(
    data: &LipschitzMomentData,
    schedule: &PQSchedule,
    lambdas: &Lambdas,
) -> Result<ConcentrationBound> {
    let sum_t: f64 = data.rho_t.iter().sum();
    let sum_2: f64 = data.rho_2.iter().sum();
    from_sums(data.t, sum_t, sum_2, schedule, lambdas)
}

/// The same bound for `Y = ‖X_1 + … + X_n‖` with `ρ_i(x̃, x) = ‖x̃ − x‖`, from
/// `Σ E‖X_i − x_i‖^t` and `Σ E‖X_i − y_i‖²`.
pub fn sum_norm_bound(
    t: f64,
    moments_t: f64,
    moments_2: f64,
    schedule: &PQSchedule,
) -> Result<ConcentrationBound> {
    if !(moments_t >= 0.0 && moments_2 >= 0.0) || !moments_t.is_finite() || !moments_2.is_finite() {
        return Err(invalid("moment sums must be finite and >= 0"));
    }
    from_sums(t, moments_t, moments_2, schedule, &Lambdas::Optimize)
}

fn from_sums(
    t: f64,
    sum_t: f64,
    sum_2: f64,
    schedule: &PQSchedule,
    lambdas: &Lambdas,
) -> Result<ConcentrationBound> {
    let recenter = find_bt(t)?;
    // λ tuned against the effective A-total C_t Σρ^t
    let report = corollary_from_totals(
        t,
        SmoothnessConstant::HILBERT,
        schedule,
        recenter.c_t * sum_t,
        sum_2.sqrt(),
        lambdas,
    )?;
    let c_a = report.constants.c_a.unwrap_or(f64::NAN);
    let c_b = report.constants.c_b.unwrap_or(f64::NAN);
    Ok(ConcentrationBound {
        value: recenter.c_t * c_a * sum_t + c_b * sum_2.powf(t / 2.0),
        t,
        c_t: recenter.c_t,
        b_t: recenter.b_t,
        c_a,
        c_b,
        lambdas: report.parameters.lambdas.unwrap_or_default(),
    })
}
