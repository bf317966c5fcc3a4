//! Domain types shared by the bound calculators and the verifier.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::numfmt::format_sig;

/// Relative tolerance used when matching a requested exponent against the
/// exponents stored in a [`MomentProfile`].
const EXPONENT_MATCH_TOL: f64 = 1e-10;

/// The constant `D` of a (2,D)-smooth Banach space. Always at least 1.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct SmoothnessConstant(f64);

impl SmoothnessConstant {
    /// Hilbert spaces are (2,1)-smooth.
    pub const HILBERT: SmoothnessConstant = SmoothnessConstant(1.0);

    pub fn new(d: f64) -> Result<Self> {
        if !d.is_finite() || d < 1.0 {
            return Err(invalid(format!("smoothness constant D must be finite and >= 1, got {d}")));
        }
        Ok(Self(d))
    }

    /// `ℓ_p` (and `L^p`) is (2, √(p−1))-smooth for `p ≥ 2`.
    pub fn for_lp(p: f64) -> Result<Self> {
        if !(p >= 2.0) || !p.is_finite() {
            return Err(invalid(format!("l_p smoothness needs p >= 2, got {p}")));
        }
        Self::new((p - 1.0).sqrt())
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn squared(self) -> f64 {
        self.0 * self.0
    }
}

impl TryFrom<f64> for SmoothnessConstant {
    type Error = Error;

    fn try_from(d: f64) -> Result<Self> {
        Self::new(d)
    }
}

impl From<SmoothnessConstant> for f64 {
    fn from(d: SmoothnessConstant) -> f64 {
        d.0
    }
}

/// `m = ⌊t/2⌋`, the number of "layers" in the main bound.
pub fn layer_count(t: f64) -> usize {
    (t / 2.0).floor() as usize
}

/// Exponents `{t − 2j : 0 ≤ j < m} ∪ {2}` that the bounds read from a profile,
/// in decreasing order.
pub fn required_exponents(t: f64) -> Vec<f64> {
    let m = layer_count(t);
    let mut out: Vec<f64> = (0..m).map(|j| t - 2.0 * j as f64).collect();
    if !out.iter().any(|&s| exponents_match(s, 2.0)) {
        out.push(2.0);
    }
    out
}

fn exponents_match(a: f64, b: f64) -> bool {
    (a - b).abs() <= EXPONENT_MATCH_TOL * a.abs().max(b.abs()).max(1.0)
}

/// Per-increment absolute moments `a_i(s) = E‖X_i‖^s` at a finite set of
/// exponents `s`.
///
/// Moments are never interpolated: every exponent a bound needs must be
/// stored explicitly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawProfile", into = "RawProfile")]
pub struct MomentProfile {
    n: usize,
    t: f64,
    /// Sorted by increasing exponent.
    moments: Vec<(f64, Vec<f64>)>,
    exact: bool,
}

impl MomentProfile {
    /// Builds a profile of `n` increments for the target exponent `t`.
    ///
    /// Every sequence must have length `n`, every entry must be finite and
    /// nonnegative, and all of [`required_exponents`]`(t)` must be present.
    pub fn new(n: usize, t: f64, moments: impl IntoIterator<Item = (f64, Vec<f64>)>) -> Result<Self> {
        if !t.is_finite() || t < 0.0 {
            return Err(invalid(format!("t must be finite and >= 0, got {t}")));
        }
        let mut stored: Vec<(f64, Vec<f64>)> = Vec::new();
        for (s, a) in moments {
            if !s.is_finite() || s < 0.0 {
                return Err(invalid(format!("exponent must be finite and >= 0, got {s}")));
            }
            if a.len() != n {
                return Err(invalid(format!(
                    "exponent {} has {} moments, expected n = {n}",
                    format_sig(s),
                    a.len()
                )));
            }
            if let Some(bad) = a.iter().find(|x| !x.is_finite() || **x < 0.0) {
                return Err(invalid(format!(
                    "moment a_i({}) must be finite and >= 0, got {bad}",
                    format_sig(s)
                )));
            }
            if stored.iter().any(|(e, _)| exponents_match(*e, s)) {
                return Err(invalid(format!("exponent {} given twice", format_sig(s))));
            }
            stored.push((s, a));
        }
        stored.sort_by(|a, b| a.0.total_cmp(&b.0));
        let profile = Self { n, t, moments: stored, exact: false };
        for s in required_exponents(t) {
            profile.moments_at(s)?;
        }
        Ok(profile)
    }

    /// Marks the profile as holding exact moments of real distributions, which
    /// turns log-convexity violations into warnings.
    pub fn with_exact(mut self, exact: bool) -> Self {
        self.exact = exact;
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn is_exact(&self) -> bool {
        self.exact
    }

    pub fn exponents(&self) -> impl Iterator<Item = f64> + '_ {
        self.moments.iter().map(|(s, _)| *s)
    }

    /// `(a_1(s), …, a_n(s))`.
    pub fn moments_at(&self, s: f64) -> Result<&[f64]> {
        self.moments
            .iter()
            .find(|(e, _)| exponents_match(*e, s))
            .map(|(_, a)| a.as_slice())
            .ok_or_else(|| Error::MissingExponent(format_sig(s)))
    }

    /// `A_k(s) = Σ_{i ≤ k} a_i(s)`, with `A_0(s) = 0`.
    pub fn partial_moment_sum(&self, k: usize, s: f64) -> Result<f64> {
        let a = self.moments_at(s)?;
        if k > self.n {
            return Err(Error::IndexOutOfRange { index: k, max: self.n });
        }
        Ok(a[..k].iter().sum())
    }

    /// `(A_0(s), A_1(s), …, A_n(s))`.
    pub fn prefix_sums(&self, s: f64) -> Result<Vec<f64>> {
        let a = self.moments_at(s)?;
        let mut out = Vec::with_capacity(self.n + 1);
        let mut acc = 0.0;
        out.push(acc);
        for &x in a {
            acc += x;
            out.push(acc);
        }
        Ok(out)
    }

    /// Returns a copy with every `a_i(s)` replaced by `f(s, a_i(s))`.
    pub fn map_moments(&self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let moments = self
            .moments
            .iter()
            .map(|(s, a)| (*s, a.iter().map(|&x| f(*s, x)).collect()))
            .collect::<Vec<_>>();
        Ok(Self::new(self.n, self.t, moments)?.with_exact(self.exact))
    }

    /// Triples of consecutive stored exponents at which `s ↦ ln A_n(s)` fails
    /// to be convex by more than `rel_tol`.
    pub fn log_convexity_violations(&self, rel_tol: f64) -> Vec<String> {
        let totals: Vec<(f64, f64)> =
            self.moments.iter().map(|(s, a)| (*s, a.iter().sum::<f64>())).collect();
        let mut out = Vec::new();
        for w in totals.windows(3) {
            let [(s1, a1), (s2, a2), (s3, a3)] = [w[0], w[1], w[2]];
            let theta = (s3 - s2) / (s3 - s1);
            // A(s2) ≤ A(s1)^θ A(s3)^(1−θ)
            let rhs = a1.powf(theta) * a3.powf(1.0 - theta);
            if a2 > rhs * (1.0 + rel_tol) + f64::MIN_POSITIVE {
                out.push(format!(
                    "A_n(s) not log-convex at s = {}, {}, {}: {} > {}",
                    format_sig(s1),
                    format_sig(s2),
                    format_sig(s3),
                    format_sig(a2),
                    format_sig(rhs)
                ));
            }
        }
        out
    }

    /// Log-convexity warnings; empty unless the profile is declared exact.
    pub fn warnings(&self) -> Vec<String> {
        if self.exact {
            self.log_convexity_violations(1e-9)
        } else {
            Vec::new()
        }
    }
}

#[derive(Serialize, Deserialize)]
struct RawProfile {
    n: usize,
    t: f64,
    moments: std::collections::BTreeMap<String, Vec<f64>>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    exact: bool,
}

impl TryFrom<RawProfile> for MomentProfile {
    type Error = Error;

    fn try_from(raw: RawProfile) -> Result<Self> {
        let mut moments = Vec::with_capacity(raw.moments.len());
        for (key, a) in raw.moments {
            let s: f64 = key
                .trim()
                .parse()
                .map_err(|_| invalid(format!("exponent key {key:?} is not a number")))?;
            moments.push((s, a));
        }
        Ok(MomentProfile::new(raw.n, raw.t, moments)?.with_exact(raw.exact))
    }
}

impl From<MomentProfile> for RawProfile {
    fn from(p: MomentProfile) -> Self {
        RawProfile {
            n: p.n,
            t: p.t,
            moments: p.moments.into_iter().map(|(s, a)| (format_sig(s), a)).collect(),
            exact: p.exact,
        }
    }
}

/// Almost-sure bounds `b_i` on the conditional second moments of the increments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawEnvelope", into = "RawEnvelope")]
pub struct VarianceEnvelope {
    b: Vec<f64>,
    /// `Σ_{i ≤ k} b_i²` for `k = 0..=n`.
    cumulative_sq: Vec<f64>,
}

impl VarianceEnvelope {
    pub fn new(b: Vec<f64>) -> Result<Self> {
        if let Some(bad) = b.iter().find(|x| !x.is_finite() || **x <= 0.0) {
            return Err(invalid(format!("every b_i must be finite and > 0, got {bad}")));
        }
        let mut cumulative_sq = Vec::with_capacity(b.len() + 1);
        let mut acc = 0.0;
        cumulative_sq.push(acc);
        for x in &b {
            acc += x * x;
            cumulative_sq.push(acc);
        }
        Ok(Self { b, cumulative_sq })
    }

    pub fn n(&self) -> usize {
        self.b.len()
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    /// `(b_1², …, b_n²)`.
    pub fn squares(&self) -> Vec<f64> {
        self.b.iter().map(|x| x * x).collect()
    }

    /// `B_k = √(Σ_{i ≤ k} b_i²)`, with `B_0 = 0`.
    pub fn cumulative_b(&self, k: usize) -> Result<f64> {
        self.cumulative_sq
            .get(k)
            .map(|x| x.sqrt())
            .ok_or(Error::IndexOutOfRange { index: k, max: self.n() })
    }

    /// `B_n`.
    pub fn total(&self) -> f64 {
        self.cumulative_sq[self.n()].sqrt()
    }
}

#[derive(Serialize, Deserialize)]
struct RawEnvelope {
    b: Vec<f64>,
}

impl TryFrom<RawEnvelope> for VarianceEnvelope {
    type Error = Error;

    fn try_from(raw: RawEnvelope) -> Result<Self> {
        VarianceEnvelope::new(raw.b)
    }
}

impl From<VarianceEnvelope> for RawEnvelope {
    fn from(e: VarianceEnvelope) -> Self {
        RawEnvelope { b: e.b }
    }
}

/// Which inequality produced a [`BoundReport`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "theorem")]
    Theorem,
    #[serde(rename = "corollary")]
    Corollary,
    #[serde(rename = "closed_2_3")]
    Closed23,
    #[serde(rename = "closed_3_4")]
    Closed34,
    #[serde(rename = "closed_min")]
    ClosedMin,
    #[serde(rename = "hilbert_2_4")]
    Hilbert24,
    #[serde(rename = "t3")]
    T3,
    #[serde(rename = "pin94")]
    Pin94,
}

impl Method {
    /// Tie-break rank when two candidates give the same value; lower wins.
    pub fn preference(self) -> u8 {
        match self {
            Method::Theorem => 0,
            Method::Closed23
            | Method::Closed34
            | Method::ClosedMin
            | Method::Hilbert24
            | Method::T3 => 1,
            Method::Corollary => 2,
            Method::Pin94 => 3,
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Method::Theorem => "theorem",
            Method::Corollary => "corollary",
            Method::Closed23 => "closed_2_3",
            Method::Closed34 => "closed_3_4",
            Method::ClosedMin => "closed_min",
            Method::Hilbert24 => "hilbert_2_4",
            Method::T3 => "t3",
            Method::Pin94 => "pin94",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct BoundConstants {
    #[serde(rename = "C_A", default, skip_serializing_if = "Option::is_none")]
    pub c_a: Option<f64>,
    #[serde(rename = "C_B", default, skip_serializing_if = "Option::is_none")]
    pub c_b: Option<f64>,
    /// `c_0(t), …, c_{m−1}(t)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_tilde: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct BoundParameters {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambdas: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(rename = "K", default, skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
}

/// Value of an upper bound on `E‖S_n‖^t` together with how it was obtained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub value: f64,
    pub method: Method,
    pub t: f64,
    #[serde(default)]
    pub constants: BoundConstants,
    #[serde(default)]
    pub parameters: BoundParameters,
    /// `A_n(t) / B_n^t`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ratio_r: Option<f64>,
}

impl BoundReport {
    pub fn new(method: Method, t: f64, value: f64) -> Self {
        Self {
            value,
            method,
            t,
            constants: BoundConstants::default(),
            parameters: BoundParameters::default(),
            ratio_r: None,
        }
    }

    pub fn with_ratio(mut self, a_t: f64, b: f64) -> Self {
        self.ratio_r = ratio_r(a_t, b, self.t);
        self
    }
}

/// `r = A_n(t) / B_n^t` when both are finite and `B_n > 0`.
pub fn ratio_r(a_t: f64, b: f64, t: f64) -> Option<f64> {
    let bt = b.powf(t);
    (a_t.is_finite() && bt.is_finite() && b > 0.0 && bt > 0.0).then(|| a_t / bt)
}
