//! Explicit constants `c_j(t)`, `c̃_m(t)`, `C_A^{(t)}`, `C_B^{(t)}` of the
//! Rosenthal-type bounds, and the closed-form choice of the balancing
//! parameters `λ_j`.

use serde::Serialize;

use crate::error::{domain, invalid, Result};
use crate::schedule::PQSchedule;
use crate::types::{layer_count, SmoothnessConstant};

/// Largest `t` accepted; keeps the factorials and products finite.
pub const MAX_T: f64 = 60.0;

fn check_t(t: f64) -> Result<()> {
    if !t.is_finite() || t < 0.0 {
        return Err(domain(format!("t must be finite and >= 0, got {t}")));
    }
    if t > MAX_T {
        return Err(domain(format!("t must not exceed {MAX_T}, got {t}")));
    }
    Ok(())
}

pub(crate) fn check_t_above_two(t: f64) -> Result<()> {
    check_t(t)?;
    if t <= 2.0 {
        return Err(domain("t must exceed 2"));
    }
    Ok(())
}

fn factorial(j: usize) -> f64 {
    (1..=j).map(|k| k as f64).product()
}

/// `s (s − 2 + D²) p(s) / 2`, one factor of the layer products.
fn layer_factor(s: f64, d: SmoothnessConstant, schedule: &PQSchedule) -> Result<f64> {
    let (p, _) = schedule.eval(s)?;
    Ok(s * (s - 2.0 + d.squared()) * p / 2.0)
}

/// `c_j(t) = (t−2j−2+D²)/(t−2j−1) · q(t−2j) · Π_{k<j} (t−2k)(t−2k−2+D²) p(t−2k)/2`.
pub fn c_j(t: f64, d: SmoothnessConstant, schedule: &PQSchedule, j: usize) -> Result<f64> {
    check_t(t)?;
    let m = layer_count(t);
    if j >= m {
        return Err(domain(format!("c_j needs 0 <= j < m = {m}, got j = {j}")));
    }
    let s = t - 2.0 * j as f64;
    let (_, q) = schedule.eval(s)?;
    let mut value = (s - 2.0 + d.squared()) / (s - 1.0) * q;
    for k in 0..j {
        value *= layer_factor(t - 2.0 * k as f64, d, schedule)?;
    }
    Ok(value)
}

/// `c̃_m(t) = Π_{j<m} (t−2j)(t−2j−2+D²) p(t−2j)/2`; equals 1 when `m = 0`.
pub fn c_tilde(t: f64, d: SmoothnessConstant, schedule: &PQSchedule) -> Result<f64> {
    check_t(t)?;
    (0..layer_count(t)).try_fold(1.0, |acc, j| {
        Ok(acc * layer_factor(t - 2.0 * j as f64, d, schedule)?)
    })
}

fn check_lambdas(t: f64, lambdas: &[f64]) -> Result<()> {
    let m = layer_count(t);
    if lambdas.len() != m {
        return Err(invalid(format!("need m = {m} balancing parameters, got {}", lambdas.len())));
    }
    if let Some(bad) = lambdas.iter().find(|l| !(**l > 0.0) || !l.is_finite()) {
        return Err(invalid(format!("balancing parameters must be finite and > 0, got {bad}")));
    }
    Ok(())
}

/// `C_A^{(t)} = Σ_{j<m} c_j(t) · (t−2j−2)/(t−2) · 1/(λ_j^{2j} j!)`.
pub fn c_a(t: f64, d: SmoothnessConstant, schedule: &PQSchedule, lambdas: &[f64]) -> Result<f64> {
    check_t_above_two(t)?;
    check_lambdas(t, lambdas)?;
    let mut total = 0.0;
    for (j, &lambda) in lambdas.iter().enumerate() {
        let jf = j as f64;
        let weight = (t - 2.0 * jf - 2.0) / (t - 2.0);
        total += c_j(t, d, schedule, j)? * weight / (lambda.powf(2.0 * jf) * factorial(j));
    }
    Ok(total)
}

/// `C_B^{(t)} = c̃_m(t) Π_{j=1}^{m} 1/(t/2 − m + j) + Σ_{j<m} c_j(t) · 2j/(t−2) · λ_j^{t−2j−2}/j!`.
pub fn c_b(t: f64, d: SmoothnessConstant, schedule: &PQSchedule, lambdas: &[f64]) -> Result<f64> {
    check_t_above_two(t)?;
    check_lambdas(t, lambdas)?;
    let m = layer_count(t);
    let mf = m as f64;
    let riemann: f64 = (1..=m).map(|j| 1.0 / (t / 2.0 - mf + j as f64)).product();
    let mut total = c_tilde(t, d, schedule)? * riemann;
    for (j, &lambda) in lambdas.iter().enumerate().skip(1) {
        let jf = j as f64;
        total += c_j(t, d, schedule, j)? * (2.0 * jf / (t - 2.0)) * lambda.powf(t - 2.0 * jf - 2.0)
            / factorial(j);
    }
    Ok(total)
}

/// Minimizes `C_A·A_t + C_B·B^t` over the `λ_j`.
///
/// The objective separates into `u_j λ^{−2j} + v_j λ^{t−2j−2}` per layer, with
/// minimizer `λ_j = (2j u_j / ((t−2j−2) v_j))^{1/(t−2)}`. Layers where either
/// exponent or either coefficient vanishes get `λ_j = 1`.
pub fn optimize_lambdas(
    t: f64,
    d: SmoothnessConstant,
    schedule: &PQSchedule,
    a_t: f64,
    b: f64,
) -> Result<Vec<f64>> {
    check_t_above_two(t)?;
    if !(a_t >= 0.0) || !(b >= 0.0) {
        return Err(invalid("A_n(t) and B_n must be >= 0"));
    }
    let m = layer_count(t);
    let bt = b.powf(t);
    let mut lambdas = vec![1.0; m];
    for (j, lambda) in lambdas.iter_mut().enumerate().skip(1) {
        let jf = j as f64;
        let gap = t - 2.0 * jf - 2.0;
        if gap <= 0.0 {
            continue;
        }
        let cj = c_j(t, d, schedule, j)? / factorial(j);
        let u = cj * gap / (t - 2.0) * a_t;
        let v = cj * 2.0 * jf / (t - 2.0) * bt;
        if u <= 0.0 || v <= 0.0 {
            continue;
        }
        let opt = (2.0 * jf * u / (gap * v)).powf(1.0 / (t - 2.0));
        if opt.is_finite() && opt > 0.0 {
            *lambda = opt;
        }
    }
    Ok(lambdas)
}

/// All constants of the bounds at one `(t, D, schedule, λ)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstantSet {
    pub t: f64,
    #[serde(rename = "D")]
    pub d: f64,
    pub c: Vec<f64>,
    pub c_tilde: f64,
    #[serde(rename = "C_A")]
    pub c_a: f64,
    #[serde(rename = "C_B")]
    pub c_b: f64,
    pub lambdas: Vec<f64>,
}

impl ConstantSet {
    /// Requires `t > 2`.
    pub fn compute(
        t: f64,
        d: SmoothnessConstant,
        schedule: &PQSchedule,
        lambdas: &[f64],
    ) -> Result<Self> {
        check_t_above_two(t)?;
        let c = (0..layer_count(t))
            .map(|j| c_j(t, d, schedule, j))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            t,
            d: d.value(),
            c,
            c_tilde: c_tilde(t, d, schedule)?,
            c_a: c_a(t, d, schedule, lambdas)?,
            c_b: c_b(t, d, schedule, lambdas)?,
            lambdas: lambdas.to_vec(),
        })
    }

    /// Constants with `λ_j = 1` throughout.
    pub fn unit_lambdas(t: f64, d: SmoothnessConstant, schedule: &PQSchedule) -> Result<Self> {
        check_t_above_two(t)?;
        Self::compute(t, d, schedule, &vec![1.0; layer_count(t)])
    }

    /// `C_A·a_t + C_B·b^t`.
    pub fn bound(&self, a_t: f64, b: f64) -> f64 {
        self.c_a * a_t + self.c_b * b.powf(self.t)
    }
}
