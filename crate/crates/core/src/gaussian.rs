//! Absolute moments of the standard normal law and the ratio `(t − 1)/E|Z|^t`
//! comparing the asymptotic `B`-coefficient of the closed forms with the
//! Gaussian limit.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::optimize::linspace;

const LANCZOS_G: f64 = 10.900511;

// Lanczos coefficients for g = 10.900511, n = 11 (Pugh 2004).
#[allow(clippy::excessive_precision)]
const LANCZOS_COEF: [f64; 11] = [
    2.48574089138753565546e-5,
    1.05142378581721974210,
    -3.45687097222016235469,
    4.51227709466894823700,
    -2.98285225323576655721,
    1.05639711577126713077,
    -1.95428773191645869583e-1,
    1.70970543404441224307e-2,
    -5.71926117404305781283e-4,
    4.63399473359905636708e-6,
    -2.71994908488607703910e-9,
];

/// `ln(2 √(e/π))`
const LN_2_SQRT_E_OVER_PI: f64 = 0.620_782_237_635_245_2;

/// `ln Γ(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    if x < 0.5 {
        // reflection: Γ(x) Γ(1 − x) = π / sin(πx)
        return std::f64::consts::PI.ln() - (std::f64::consts::PI * x).sin().ln() - ln_gamma(1.0 - x);
    }
    let series = LANCZOS_COEF
        .iter()
        .enumerate()
        .skip(1)
        .fold(LANCZOS_COEF[0], |acc, (k, c)| acc + c / (x + k as f64 - 1.0));
    series.ln()
        + LN_2_SQRT_E_OVER_PI
        + (x - 0.5) * ((x - 0.5 + LANCZOS_G) / std::f64::consts::E).ln()
}

/// `E|Z|^t = 2^{t/2} Γ((t+1)/2) / √π` for a standard normal `Z`.
pub fn abs_moment_normal(t: f64) -> Result<f64> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(domain(format!("normal absolute moment needs t >= 0, got {t}")));
    }
    let ln = 0.5 * t * std::f64::consts::LN_2 + ln_gamma((t + 1.0) / 2.0)
        - 0.5 * std::f64::consts::PI.ln();
    Ok(ln.exp())
}

/// One point of the ratio curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioCurvePoint {
    pub t: f64,
    pub ez_t: f64,
    pub ratio: f64,
}

impl RatioCurvePoint {
    pub fn at(t: f64) -> Result<Self> {
        let ez_t = abs_moment_normal(t)?;
        Ok(Self { t, ez_t, ratio: (t - 1.0) / ez_t })
    }
}

/// `steps` evenly spaced points of `(t, E|Z|^t, (t−1)/E|Z|^t)` on
/// `[t_min, t_max] ⊆ [2, 4]`.
pub fn ratio_curve(t_min: f64, t_max: f64, steps: usize) -> Result<Vec<RatioCurvePoint>> {
    if !(2.0 <= t_min && t_min < t_max && t_max <= 4.0) {
        return Err(domain(format!("ratio curve needs 2 <= t_min < t_max <= 4, got [{t_min}, {t_max}]")));
    }
    if steps < 2 {
        return Err(domain(format!("ratio curve needs at least 2 points, got {steps}")));
    }
    linspace(t_min, t_max, steps).into_iter().map(RatioCurvePoint::at).collect()
}
