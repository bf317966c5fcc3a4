#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use rosenthal::types::required_exponents;
use rosenthal::{MomentProfile, SmoothnessConstant, VarianceEnvelope};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Law of `‖X_i‖`: finitely many atoms with probabilities.
pub struct NormLaw {
    pub atoms: Vec<(f64, f64)>,
}

impl NormLaw {
    pub fn random(rng: &mut impl Rng) -> Self {
        let k = rng.random_range(1..=4);
        let weights: Vec<f64> = (0..k).map(|_| rng.random_range(0.05..1.0)).collect();
        let total: f64 = weights.iter().sum();
        let atoms = weights
            .iter()
            .map(|w| {
                let x = if rng.random_bool(0.1) { 0.0 } else { 10f64.powf(rng.random_range(-1.0..0.7)) };
                (x, w / total)
            })
            .collect();
        Self { atoms }
    }

    pub fn moment(&self, s: f64) -> f64 {
        self.atoms.iter().map(|(x, p)| p * x.powf(s)).sum()
    }
}

/// A profile built from real distributions, with `b_i ≥ √a_i(2)`.
pub struct Case {
    pub profile: MomentProfile,
    pub envelope: VarianceEnvelope,
    pub d: SmoothnessConstant,
    pub laws: Vec<NormLaw>,
}

pub fn random_case(rng: &mut impl Rng, t: f64, n: usize) -> Case {
    let laws: Vec<NormLaw> = (0..n).map(|_| NormLaw::random(rng)).collect();
    let profile = MomentProfile::new(
        n,
        t,
        required_exponents(t).into_iter().map(|s| (s, laws.iter().map(|l| l.moment(s)).collect())),
    )
    .unwrap()
    .with_exact(true);
    let b = laws
        .iter()
        .map(|l| l.moment(2.0).sqrt().max(1e-3) * (1.0 + rng.random_range(0.0..0.5)))
        .collect();
    let d = match rng.random_range(0..3) {
        0 => SmoothnessConstant::HILBERT,
        1 => SmoothnessConstant::new(2f64.sqrt()).unwrap(),
        _ => SmoothnessConstant::new(rng.random_range(1.0..2.0)).unwrap(),
    };
    Case { profile, envelope: VarianceEnvelope::new(b).unwrap(), d, laws }
}

pub fn rel_diff(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}
