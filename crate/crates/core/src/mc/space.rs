//! Finite-dimensional normed spaces used by the simulator and the pointwise
//! checks: Euclidean `R^d` and `ℓ_p^d` for `p ≥ 2`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::types::SmoothnessConstant;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NormedSpace {
    Hilbert { dim: usize },
    Lp { p: f64, dim: usize },
}

impl NormedSpace {
    pub fn hilbert(dim: usize) -> Result<Self> {
        let space = NormedSpace::Hilbert { dim };
        space.validate()?;
        Ok(space)
    }

    pub fn lp(p: f64, dim: usize) -> Result<Self> {
        let space = NormedSpace::Lp { p, dim };
        space.validate()?;
        Ok(space)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            NormedSpace::Hilbert { dim } | NormedSpace::Lp { dim, .. } if dim < 1 => {
                Err(invalid(format!("dimension must be >= 1, got {dim}")))
            }
            NormedSpace::Lp { p, .. } if !(p >= 2.0) || !p.is_finite() => {
                Err(invalid(format!("l_p needs p >= 2, got {p}")))
            }
            _ => Ok(()),
        }
    }

    pub fn dim(&self) -> usize {
        match *self {
            NormedSpace::Hilbert { dim } | NormedSpace::Lp { dim, .. } => dim,
        }
    }

    /// `1` for Hilbert space, `√(p−1)` for `ℓ_p`.
    pub fn smoothness(&self) -> SmoothnessConstant {
        match *self {
            NormedSpace::Hilbert { .. } => SmoothnessConstant::HILBERT,
            NormedSpace::Lp { p, .. } => {
                SmoothnessConstant::for_lp(p).unwrap_or(SmoothnessConstant::HILBERT)
            }
        }
    }

    pub fn norm(&self, x: &[f64]) -> f64 {
        match *self {
            NormedSpace::Hilbert { .. } => x.iter().map(|v| v * v).sum::<f64>().sqrt(),
            NormedSpace::Lp { p, .. } => lp_norm(x, p),
        }
    }

    /// Directional derivative `Q'(x)(y)` of `Q = ‖·‖²`; zero at `x = 0`.
    ///
    /// Hilbert: `2⟨x, y⟩`. `ℓ_p`: `2 ‖x‖^{2−p} Σ |x_k|^{p−1} sgn(x_k) y_k`.
    pub fn q_derivative(&self, x: &[f64], y: &[f64]) -> f64 {
        match *self {
            NormedSpace::Hilbert { .. } => 2.0 * x.iter().zip(y).map(|(a, b)| a * b).sum::<f64>(),
            NormedSpace::Lp { p, .. } => {
                let nx = lp_norm(x, p);
                if nx == 0.0 {
                    return 0.0;
                }
                let dot: f64 = x
                    .iter()
                    .zip(y)
                    .map(|(a, b)| a.abs().powf(p - 1.0) * a.signum() * b)
                    .sum();
                2.0 * nx.powf(2.0 - p) * dot
            }
        }
    }
}

/// `(Σ |x_k|^p)^{1/p}`, scaled by the largest entry to avoid overflow.
pub fn lp_norm(x: &[f64], p: f64) -> f64 {
    let scale = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        return 0.0;
    }
    scale * x.iter().map(|v| (v.abs() / scale).powf(p)).sum::<f64>().powf(1.0 / p)
}
