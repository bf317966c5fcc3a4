//! Monte-Carlo estimation of `E‖S_n‖^t` and the comparison against the bounds.
//!
//! Per-step moments `a_i(s)` come from the `Moments` stream and `E‖S_n‖^t`
//! from the independent `Norms` stream, so the two sides of the inequality
//! never share a sample. Replications run in fixed blocks of [`BLOCK`]; block
//! results are merged by a pairwise tree whose shape depends only on the
//! replication count, which makes every output independent of the number of
//! worker threads.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{corollary_bound, theorem_bound, Lambdas};
use crate::error::{invalid, Result};
use crate::mc::model::MartingaleModel;
use crate::mc::rng::{stream_rng, StreamLabel};
use crate::schedule::PQSchedule;
use crate::types::{required_exponents, BoundReport, MomentProfile};

/// Replications per work unit.
pub const BLOCK: usize = 1024;
/// Pass/fail margin in standard errors.
pub const SE_MARGIN: f64 = 3.0;
/// Environment variable capping the worker count.
pub const THREADS_ENV: &str = "ROSENTHAL_THREADS";

/// Running mean and sum of squared deviations.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct MeanVar {
    pub count: u64,
    pub mean: f64,
    m2: f64,
}

impl MeanVar {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn merge(self, other: Self) -> Self {
        if self.count == 0 {
            return other;
        }
        if other.count == 0 {
            return self;
        }
        let count = self.count + other.count;
        let delta = other.mean - self.mean;
        let w = other.count as f64 / count as f64;
        Self {
            count,
            mean: self.mean + delta * w,
            m2: self.m2 + other.m2 + delta * delta * self.count as f64 * w,
        }
    }

    /// Unbiased sample variance; zero below two observations.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            (self.m2 / (self.count - 1) as f64).max(0.0)
        }
    }

    pub fn std_error(&self) -> f64 {
        if self.count == 0 {
            0.0
        } else {
            (self.variance() / self.count as f64).sqrt()
        }
    }
}

fn merge_all(a: Vec<MeanVar>, b: Vec<MeanVar>) -> Vec<MeanVar> {
    a.into_iter().zip(b).map(|(x, y)| x.merge(y)).collect()
}

fn pairwise<T>(mut items: Vec<T>, merge: &impl Fn(T, T) -> T) -> Option<T> {
    match items.len() {
        0 => None,
        1 => items.pop(),
        len => {
            let right = items.split_off(len / 2);
            let l = pairwise(items, merge)?;
            let r = pairwise(right, merge)?;
            Some(merge(l, r))
        }
    }
}

/// Worker count from [`THREADS_ENV`], if set to a positive integer.
pub fn threads_from_env() -> Option<usize> {
    std::env::var(THREADS_ENV).ok()?.trim().parse().ok().filter(|n| *n > 0)
}

/// Runs `work` on every block of `0..replications`, in order.
fn run_blocks<T: Send>(replications: usize, work: impl Fn(u64, u64) -> T + Sync) -> Result<Vec<T>> {
    let blocks = replications.div_ceil(BLOCK);
    let job = || {
        (0..blocks)
            .into_par_iter()
            .map(|k| {
                let start = (k * BLOCK) as u64;
                let end = ((k + 1) * BLOCK).min(replications) as u64;
                work(start, end)
            })
            .collect()
    };
    match threads_from_env() {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map(|pool| pool.install(job))
            .map_err(|e| invalid(format!("cannot start worker pool: {e}"))),
        None => Ok(job()),
    }
}

fn check_replications(replications: usize) -> Result<()> {
    if replications == 0 {
        return Err(invalid("replications must be >= 1"));
    }
    Ok(())
}

/// Calls `visit(r, S_n)` for every replication `r` in `start..end` of `label`.
fn for_each_endpoint(
    model: &MartingaleModel,
    seed: u64,
    label: StreamLabel,
    start: u64,
    end: u64,
    mut visit: impl FnMut(&[f64], &[f64]),
) {
    let dim = model.space().dim();
    let (mut state, mut incr) = (vec![0.0; dim], vec![0.0; dim]);
    let mut norms = vec![0.0; model.n()];
    for r in start..end {
        let mut rng = stream_rng(seed, label, r);
        model.run_path(&mut rng, &mut state, &mut incr, |i, x| norms[i] = x);
        visit(&state, &norms);
    }
}

/// `‖S_n‖` for every replication of the `Norms` stream, in replication order.
pub fn simulate(model: &MartingaleModel, seed: u64, replications: usize) -> Result<Vec<f64>> {
    model.validate()?;
    check_replications(replications)?;
    let space = model.space();
    let blocks = run_blocks(replications, |start, end| {
        let mut out = Vec::with_capacity((end - start) as usize);
        for_each_endpoint(model, seed, StreamLabel::Norms, start, end, |s, _| out.push(space.norm(s)));
        out
    })?;
    Ok(blocks.concat())
}

/// `S_n` itself for every replication of the `Norms` stream.
pub fn simulate_endpoints(model: &MartingaleModel, seed: u64, replications: usize) -> Result<Vec<Vec<f64>>> {
    model.validate()?;
    check_replications(replications)?;
    let blocks = run_blocks(replications, |start, end| {
        let mut out = Vec::with_capacity((end - start) as usize);
        for_each_endpoint(model, seed, StreamLabel::Norms, start, end, |s, _| out.push(s.to_vec()));
        out
    })?;
    Ok(blocks.concat())
}

/// Mean and standard error of every coordinate of `S_n` on the `Norms` stream.
pub fn coordinate_means(model: &MartingaleModel, seed: u64, replications: usize) -> Result<Vec<MeanVar>> {
    model.validate()?;
    check_replications(replications)?;
    let dim = model.space().dim();
    let blocks = run_blocks(replications, |start, end| {
        let mut acc = vec![MeanVar::default(); dim];
        for_each_endpoint(model, seed, StreamLabel::Norms, start, end, |s, _| {
            acc.iter_mut().zip(s).for_each(|(a, x)| a.push(*x));
        });
        acc
    })?;
    Ok(pairwise(blocks, &merge_all).unwrap_or_default())
}

/// Estimates `E‖S_n‖^t` for each `t` from one `Norms`-stream sample.
pub fn estimate_norm_moments(
    model: &MartingaleModel,
    ts: &[f64],
    seed: u64,
    replications: usize,
) -> Result<Vec<MeanVar>> {
    model.validate()?;
    check_replications(replications)?;
    let space = model.space();
    let blocks = run_blocks(replications, |start, end| {
        let mut acc = vec![MeanVar::default(); ts.len()];
        for_each_endpoint(model, seed, StreamLabel::Norms, start, end, |s, _| {
            let norm = space.norm(s);
            acc.iter_mut().zip(ts).for_each(|(a, t)| a.push(norm.powf(*t)));
        });
        acc
    })?;
    Ok(pairwise(blocks, &merge_all).unwrap_or_default())
}

/// Estimates `a_i(s) = E‖X_i‖^s` for every step and every exponent from the
/// `Moments` stream. Row `k` holds the `n` moments at `exponents[k]`.
pub fn estimate_step_moments(
    model: &MartingaleModel,
    exponents: &[f64],
    seed: u64,
    replications: usize,
) -> Result<Vec<Vec<f64>>> {
    model.validate()?;
    check_replications(replications)?;
    let n = model.n();
    let blocks = run_blocks(replications, |start, end| {
        let mut acc = vec![MeanVar::default(); n * exponents.len()];
        for_each_endpoint(model, seed, StreamLabel::Moments, start, end, |_, norms| {
            for (k, s) in exponents.iter().enumerate() {
                for (i, x) in norms.iter().enumerate() {
                    acc[k * n + i].push(x.powf(*s));
                }
            }
        });
        acc
    })?;
    let merged = pairwise(blocks, &merge_all).unwrap_or_default();
    Ok(merged.chunks(n.max(1)).take(exponents.len()).map(|row| row.iter().map(|a| a.mean).collect()).collect())
}

/// Sampling parameters of a verification run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub seed: u64,
    pub replications: usize,
}

/// One Monte-Carlo check of the bounds at a single `t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub model: MartingaleModel,
    pub t: f64,
    #[serde(rename = "D")]
    pub d: f64,
    /// Monte-Carlo mean of `‖S_n‖^t`.
    pub estimate: f64,
    pub std_error: f64,
    /// The main bound evaluated on the estimated moments.
    pub bound: BoundReport,
    /// The two-term bound with optimized `λ`; absent at `t = 2`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub corollary: Option<BoundReport>,
    /// `bound / estimate`, only when the estimate is positive.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slack: Option<f64>,
    pub replications: usize,
    pub seed: u64,
    /// `estimate − 3·std_error ≤ bound`.
    pub passed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub corollary_passed: Option<bool>,
}

/// Estimates both sides of the inequality for `model` at `t ≥ 2` and checks it.
pub fn estimate_and_check(
    model: &MartingaleModel,
    t: f64,
    schedule: &PQSchedule,
    config: VerifyConfig,
) -> Result<VerificationReport> {
    let mut reports = estimate_and_check_many(model, &[t], schedule, config)?;
    Ok(reports.remove(0))
}

/// [`estimate_and_check`] for several `t` at once, sharing one sample per
/// stream. Each report equals the single-`t` call with the same config.
pub fn estimate_and_check_many(
    model: &MartingaleModel,
    ts: &[f64],
    schedule: &PQSchedule,
    config: VerifyConfig,
) -> Result<Vec<VerificationReport>> {
    model.validate()?;
    check_replications(config.replications)?;
    if let Some(bad) = ts.iter().find(|t| !(**t >= 2.0) || !t.is_finite()) {
        return Err(invalid(format!("t must be finite and >= 2, got {bad}")));
    }

    let mut exponents: Vec<f64> = Vec::new();
    for &t in ts {
        for s in required_exponents(t) {
            if !exponents.contains(&s) {
                exponents.push(s);
            }
        }
    }
    let moments = estimate_step_moments(model, &exponents, config.seed, config.replications)?;
    let norms = estimate_norm_moments(model, ts, config.seed, config.replications)?;
    let envelope = model.envelope()?;
    let d = model.smoothness();

    ts.iter()
        .zip(norms)
        .map(|(&t, acc)| {
            let needed = required_exponents(t);
            let profile = MomentProfile::new(
                model.n(),
                t,
                exponents
                    .iter()
                    .zip(&moments)
                    .filter(|(s, _)| needed.contains(s))
                    .map(|(s, a)| (*s, a.clone())),
            )?;
            let bound = theorem_bound(&profile, &envelope, d, schedule)?;
            let corollary = if t > 2.0 {
                Some(corollary_bound(&profile, &envelope, d, schedule, &Lambdas::Optimize)?)
            } else {
                None
            };
            let (estimate, std_error) = (acc.mean, acc.std_error());
            let lower = estimate - SE_MARGIN * std_error;
            Ok(VerificationReport {
                model: model.clone(),
                t,
                d: d.value(),
                estimate,
                std_error,
                slack: (estimate > 0.0).then(|| bound.value / estimate),
                passed: lower <= bound.value,
                corollary_passed: corollary.as_ref().map(|c| lower <= c.value),
                bound,
                corollary,
                replications: config.replications,
                seed: config.seed,
            })
        })
        .collect()
}
