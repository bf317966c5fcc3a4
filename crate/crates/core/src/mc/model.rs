//! Simulatable martingales whose increments satisfy `E_{i−1}‖X_i‖² ≤ b_i²`
//! surely, by construction.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::mc::space::NormedSpace;
use crate::types::{SmoothnessConstant, VarianceEnvelope};

/// Law of a real increment before scaling by `b_i`; both have unit variance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum RealDistribution {
    /// Uniform on `[−√3, √3]`.
    UniformSym,
    /// `±1/√(2p)` with probability `p` each, `0` otherwise.
    TwoPoint { p: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelKind {
    /// `X_i = b_i ε_i` with Rademacher signs.
    RademacherReal,
    /// Independent real increments `b_i ξ_i`.
    IidReal { distribution: RealDistribution },
    /// `X_i = (b_i/√d) G_i` with standard Gaussian `G_i ∈ R^d`.
    HilbertIid { dim: usize },
    /// `X_i = b_i R_i V_i` in `ℓ_p^d`: `V_i` a random sign-symmetric unit
    /// vector, `R_i` uniform on `[0, √3]` so that `E R_i² = 1`.
    LpVector { p: f64, dim: usize },
    /// Real increments `X_i = b_i |cos S_{i−1}| ε_i` whose size depends on the
    /// path so far.
    DependentScaled,
}

/// A martingale model together with its envelope `b_1, …, b_n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawModel")]
pub struct MartingaleModel {
    #[serde(flatten)]
    pub kind: ModelKind,
    pub scale: Vec<f64>,
}

#[derive(Deserialize)]
struct RawModel {
    #[serde(flatten)]
    kind: ModelKind,
    scale: Vec<f64>,
}

impl TryFrom<RawModel> for MartingaleModel {
    type Error = Error;

    fn try_from(raw: RawModel) -> Result<Self> {
        MartingaleModel::new(raw.kind, raw.scale)
    }
}

impl MartingaleModel {
    pub fn new(kind: ModelKind, scale: Vec<f64>) -> Result<Self> {
        let model = Self { kind, scale };
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(bad) = self.scale.iter().find(|b| !(**b > 0.0) || !b.is_finite()) {
            return Err(invalid(format!("every b_i must be finite and > 0, got {bad}")));
        }
        match self.kind {
            ModelKind::IidReal { distribution: RealDistribution::TwoPoint { p } }
                if !(p > 0.0 && p <= 0.5) =>
            {
                Err(invalid(format!("two-point mass p must lie in (0, 1/2], got {p}")))
            }
            ModelKind::HilbertIid { dim } if dim < 1 => {
                Err(invalid(format!("dimension must be >= 1, got {dim}")))
            }
            ModelKind::LpVector { p, dim } => NormedSpace::lp(p, dim).map(|_| ()),
            _ => Ok(()),
        }
    }

    pub fn n(&self) -> usize {
        self.scale.len()
    }

    pub fn space(&self) -> NormedSpace {
        match self.kind {
            ModelKind::HilbertIid { dim } => NormedSpace::Hilbert { dim },
            ModelKind::LpVector { p, dim } => NormedSpace::Lp { p, dim },
            _ => NormedSpace::Hilbert { dim: 1 },
        }
    }

    pub fn smoothness(&self) -> SmoothnessConstant {
        self.space().smoothness()
    }

    pub fn envelope(&self) -> Result<VarianceEnvelope> {
        VarianceEnvelope::new(self.scale.clone())
    }

    /// Draws one path, calling `on_step(i, ‖X_i‖)` for every increment, and
    /// leaves `S_n` in `state`.
    pub(crate) fn run_path<R: Rng>(
        &self,
        rng: &mut R,
        state: &mut [f64],
        incr: &mut [f64],
        mut on_step: impl FnMut(usize, f64),
    ) {
        state.fill(0.0);
        let space = self.space();
        for (i, &b) in self.scale.iter().enumerate() {
            match self.kind {
                ModelKind::RademacherReal => incr[0] = b * sign(rng),
                ModelKind::IidReal { distribution: RealDistribution::UniformSym } => {
                    incr[0] = b * 3f64.sqrt() * (2.0 * rng.random::<f64>() - 1.0);
                }
                ModelKind::IidReal { distribution: RealDistribution::TwoPoint { p } } => {
                    let u = rng.random::<f64>();
                    let jump = b / (2.0 * p).sqrt();
                    incr[0] = if u < p {
                        jump
                    } else if u < 2.0 * p {
                        -jump
                    } else {
                        0.0
                    };
                }
                ModelKind::HilbertIid { dim } => {
                    let k = b / (dim as f64).sqrt();
                    for v in incr.iter_mut() {
                        *v = k * rng.sample::<f64, _>(StandardNormal);
                    }
                }
                ModelKind::LpVector { p, .. } => {
                    // (0, 1] keeps the direction well defined
                    for v in incr.iter_mut() {
                        *v = (1.0 - rng.random::<f64>()) * sign(rng);
                    }
                    let radius = 3f64.sqrt() * rng.random::<f64>();
                    let k = b * radius / space.norm(incr);
                    for v in incr.iter_mut() {
                        *v *= k;
                    }
                    debug_assert!(p >= 2.0);
                }
                ModelKind::DependentScaled => {
                    let sigma = b * state[0].abs().cos().abs();
                    incr[0] = sigma * sign(rng);
                }
            }
            for (s, x) in state.iter_mut().zip(incr.iter()) {
                *s += x;
            }
            on_step(i, space.norm(incr));
        }
    }
}

fn sign<R: Rng>(rng: &mut R) -> f64 {
    if rng.random::<bool>() {
        1.0
    } else {
        -1.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mc::rng::{stream_rng, StreamLabel};

    #[test]
    fn validation() {
        assert!(MartingaleModel::new(ModelKind::HilbertIid { dim: 2 }, vec![1.0, 0.0]).is_err());
        assert!(MartingaleModel::new(ModelKind::LpVector { p: 1.5, dim: 2 }, vec![1.0]).is_err());
        assert!(MartingaleModel::new(ModelKind::LpVector { p: 3.0, dim: 0 }, vec![1.0]).is_err());
        let tp = ModelKind::IidReal { distribution: RealDistribution::TwoPoint { p: 0.6 } };
        assert!(MartingaleModel::new(tp, vec![1.0]).is_err());
    }

    #[test]
    fn json_shape() {
        let m: MartingaleModel = serde_json::from_str(
            r#"{"kind": "iid_real", "distribution": {"name": "two_point", "p": 0.1}, "scale": [1, 2]}"#,
        )
        .unwrap();
        assert_eq!(m.kind, ModelKind::IidReal { distribution: RealDistribution::TwoPoint { p: 0.1 } });
        let v = serde_json::to_value(&m).unwrap();
        assert_eq!(v["kind"], "iid_real");
        let back: MartingaleModel = serde_json::from_value(v).unwrap();
        assert_eq!(back, m);
        assert!(serde_json::from_str::<MartingaleModel>(r#"{"kind": "lp_vector", "p": 1, "dim": 2, "scale": [1]}"#)
            .is_err());
    }

    #[test]
    fn increments_respect_envelope() {
        // ‖X_i‖ ≤ b_i · (largest unit-variance support point) for the bounded laws
        let models = [
            (ModelKind::RademacherReal, 1.0),
            (ModelKind::IidReal { distribution: RealDistribution::UniformSym }, 3f64.sqrt()),
            (ModelKind::LpVector { p: 3.0, dim: 4 }, 3f64.sqrt()),
            (ModelKind::DependentScaled, 1.0),
        ];
        for (kind, cap) in models {
            let m = MartingaleModel::new(kind, vec![0.5, 2.0, 1.0]).unwrap();
            let dim = m.space().dim();
            let (mut s, mut x) = (vec![0.0; dim], vec![0.0; dim]);
            for r in 0..200 {
                let mut rng = stream_rng(1, StreamLabel::Norms, r);
                m.run_path(&mut rng, &mut s, &mut x, |i, norm| {
                    assert!(norm <= m.scale[i] * cap * (1.0 + 1e-12));
                });
            }
        }
    }

    #[test]
    fn lp_increment_norm_is_radius() {
        let m = MartingaleModel::new(ModelKind::LpVector { p: 4.0, dim: 3 }, vec![2.0]).unwrap();
        let (mut s, mut x) = (vec![0.0; 3], vec![0.0; 3]);
        let mut rng = stream_rng(3, StreamLabel::Norms, 0);
        let mut seen = 0.0;
        m.run_path(&mut rng, &mut s, &mut x, |_, norm| seen = norm);
        assert!((m.space().norm(&s) - seen).abs() < 1e-12);
    }
}
