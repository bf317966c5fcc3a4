//! Pointwise checks of the deterministic inequalities behind the bounds.
//!
//! Each residual is `right side − left side`; a nonnegative residual means
//! the inequality holds at that point.

use crate::error::{domain, invalid, Result};
use crate::schedule::PQSchedule;
use crate::mc::space::NormedSpace;

/// Residual of the one-step expansion inequality
///
/// ```text
/// ‖x+y‖^t − ‖x‖^t ≤ (t/2)‖x‖^{t−2} Q'(x)(y) + (t(t−2+D²)/2) p(t) ‖x‖^{t−2}‖y‖²
///                   + ((t−2+D²)/(t−1)) q(t) ‖y‖^t
/// ```
///
/// with `D` the smoothness constant of `space`.
pub fn check_lemma1_pointwise(
    space: &NormedSpace,
    x: &[f64],
    y: &[f64],
    t: f64,
    schedule: &PQSchedule,
) -> Result<Residual> {
    space.validate()?;
    check_dims(space, x, y)?;
    if !(t >= 2.0) {
        return Err(domain(format!("expansion inequality needs t >= 2, got {t}")));
    }
    let d2 = space.smoothness().squared();
    let (p, q) = schedule.eval(t)?;
    let nx = space.norm(x);
    let ny = space.norm(y);
    let xy: Vec<f64> = x.iter().zip(y).map(|(a, b)| a + b).collect();
    let (moved, start) = (space.norm(&xy).powf(t), nx.powf(t));
    let lhs = moved - start;

    let linear = t / 2.0 * nx.powf(t - 2.0) * space.q_derivative(x, y);
    let cross = t * (t - 2.0 + d2) / 2.0 * p * nx.powf(t - 2.0) * ny * ny;
    let tail = (t - 2.0 + d2) / (t - 1.0) * q * ny.powf(t);
    let rhs = linear + cross + tail;
    // the left side cancels two numbers of size ‖x‖^t, so rounding scales with them
    let scale = 1.0 + moved.max(start).max(linear.abs()).max(cross).max(tail);
    Ok(Residual { value: rhs - lhs, scale })
}

/// Residual of `‖x+y‖² + ‖x−y‖² ≤ 2‖x‖² + 2D²‖y‖²`.
pub fn check_2smooth_pointwise(space: &NormedSpace, x: &[f64], y: &[f64]) -> Result<Residual> {
    space.validate()?;
    check_dims(space, x, y)?;
    let d2 = space.smoothness().squared();
    let plus: Vec<f64> = x.iter().zip(y).map(|(a, b)| a + b).collect();
    let minus: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
    let lhs = space.norm(&plus).powi(2) + space.norm(&minus).powi(2);
    let rhs = 2.0 * space.norm(x).powi(2) + 2.0 * d2 * space.norm(y).powi(2);
    Ok(Residual { value: rhs - lhs, scale: 1.0 + lhs.max(rhs) })
}

/// A residual with the magnitude of the terms it was computed from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Residual {
    pub value: f64,
    pub scale: f64,
}

impl Residual {
    /// `value ≥ −rel_tol · scale`.
    pub fn holds(&self, rel_tol: f64) -> bool {
        self.value >= -rel_tol * self.scale
    }
}

fn check_dims(space: &NormedSpace, x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() != space.dim() || y.len() != space.dim() {
        return Err(invalid(format!(
            "vectors must have dimension {}, got {} and {}",
            space.dim(),
            x.len(),
            y.len()
        )));
    }
    Ok(())
}

/// Whether `Σ_{i≤k} b_i² B_{i−1}^s ≤ B_k^{s+2}/(s/2+1)` for every `k`
/// (with `0^0 = 1`), up to `1e-12` relative rounding.
pub fn check_riemann_sum(b: &[f64], s: f64) -> Result<bool> {
    if b.iter().any(|x| !(*x > 0.0) || !x.is_finite()) {
        return Err(invalid("every b_i must be finite and > 0"));
    }
    if !(s >= 0.0) {
        return Err(invalid(format!("s must be >= 0, got {s}")));
    }
    let mut cum_sq = 0.0f64;
    let mut lhs = 0.0;
    for &bi in b {
        lhs += bi * bi * cum_sq.sqrt().powf(s);
        cum_sq += bi * bi;
        let rhs = cum_sq.sqrt().powf(s + 2.0) / (s / 2.0 + 1.0);
        if lhs > rhs * (1.0 + 1e-12) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Whether `x^{1/p} y^{1/q} ≤ x/p + y/q` within `1e-12` relative.
pub fn check_young(x: f64, y: f64, p: f64, q: f64) -> Result<bool> {
    if !(x >= 0.0 && y >= 0.0) {
        return Err(invalid("Young's inequality needs x, y >= 0"));
    }
    if !(p > 0.0 && q > 0.0) || (1.0 / p + 1.0 / q - 1.0).abs() > 1e-12 {
        return Err(invalid(format!("exponents must satisfy 1/p + 1/q = 1, got p = {p}, q = {q}")));
    }
    let lhs = x.powf(1.0 / p) * y.powf(1.0 / q);
    let rhs = x / p + y / q;
    Ok(lhs <= rhs * (1.0 + 1e-12))
}
