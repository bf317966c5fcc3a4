//! Admissible `(p(s), q(s))` pairs for the splitting inequality
//! `(α + β)^{s−2} ≤ p(s) α^{s−2} + q(s) β^{s−2}`.
//!
//! Requirements on a pair at exponent `s`:
//!
//! * `s = 2`: `p + q ≥ 1` with `p, q > 0`;
//! * `s > 2`: `p ≥ 1` and `q ≥ 1`;
//! * `s > 3`: additionally `p^{1/(3−s)} + q^{1/(3−s)} ≤ 1`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{domain, invalid, Error, Result};
use crate::numfmt::format_sig;

/// Slack allowed on the `s > 3` constraint, which the β-family meets with
/// equality and therefore only up to rounding.
const CONSTRAINT_TOL: f64 = 1e-12;

const DEFAULT_BETA: f64 = 0.5;

/// A family of admissible `(p, q)` functions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", try_from = "RawSchedule")]
pub enum PQSchedule {
    /// `(1/2, 1/2)` at `s = 2`, `(1, 1)` on `(2, 3]`, and
    /// `((1−β)^{3−s}, β^{3−s})` for `s > 3`.
    BetaFamily { beta: f64 },
    /// Explicit pairs keyed by exponent (decimal string).
    Custom {
        #[serde(serialize_with = "serialize_table")]
        table: Vec<(f64, (f64, f64))>,
    },
}

impl Default for PQSchedule {
    fn default() -> Self {
        PQSchedule::BetaFamily { beta: DEFAULT_BETA }
    }
}

impl PQSchedule {
    pub fn beta(beta: f64) -> Result<Self> {
        if !(beta > 0.0 && beta < 1.0) {
            return Err(invalid(format!("beta must lie in (0, 1), got {beta}")));
        }
        Ok(PQSchedule::BetaFamily { beta })
    }

    /// A custom table; every entry is checked with [`validate_pq`].
    pub fn custom(entries: impl IntoIterator<Item = (f64, (f64, f64))>) -> Result<Self> {
        let mut table: Vec<(f64, (f64, f64))> = Vec::new();
        for (s, (p, q)) in entries {
            if !(s >= 2.0) || !s.is_finite() {
                return Err(invalid(format!("schedule exponent must be >= 2, got {s}")));
            }
            if !validate_pq(p, q, s) {
                return Err(invalid(format!(
                    "(p, q) = ({p}, {q}) is not admissible at s = {}",
                    format_sig(s)
                )));
            }
            table.push((s, (p, q)));
        }
        table.sort_by(|a, b| a.0.total_cmp(&b.0));
        Ok(PQSchedule::Custom { table })
    }

    /// The β parameter, for β-family schedules.
    pub fn beta_value(&self) -> Option<f64> {
        match self {
            PQSchedule::BetaFamily { beta } => Some(*beta),
            PQSchedule::Custom { .. } => None,
        }
    }

    /// `(p(s), q(s))`.
    pub fn eval(&self, s: f64) -> Result<(f64, f64)> {
        pq_eval(self, s)
    }
}

/// Evaluates a schedule at exponent `s ≥ 2`.
pub fn pq_eval(schedule: &PQSchedule, s: f64) -> Result<(f64, f64)> {
    if !(s >= 2.0) {
        return Err(domain(format!("(p, q) only defined for s >= 2, got {s}")));
    }
    match schedule {
        PQSchedule::BetaFamily { beta } => Ok(if s == 2.0 {
            (0.5, 0.5)
        } else if s <= 3.0 {
            (1.0, 1.0)
        } else {
            ((1.0 - beta).powf(3.0 - s), beta.powf(3.0 - s))
        }),
        PQSchedule::Custom { table } => table
            .iter()
            .find(|(e, _)| (e - s).abs() <= 1e-10 * s.max(1.0))
            .map(|(_, pq)| *pq)
            .ok_or_else(|| Error::ScheduleLookup(format_sig(s))),
    }
}

/// Whether `(p, q)` is admissible at exponent `s`.
pub fn validate_pq(p: f64, q: f64, s: f64) -> bool {
    if !(p.is_finite() && q.is_finite() && s >= 2.0) {
        return false;
    }
    if s == 2.0 {
        return p > 0.0 && q > 0.0 && p + q >= 1.0;
    }
    if p < 1.0 || q < 1.0 {
        return false;
    }
    if s <= 3.0 {
        return true;
    }
    let e = 1.0 / (3.0 - s);
    p.powf(e) + q.powf(e) <= 1.0 + CONSTRAINT_TOL
}

fn serialize_table<S: serde::Serializer>(
    table: &[(f64, (f64, f64))],
    ser: S,
) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeMap;
    let mut map = ser.serialize_map(Some(table.len()))?;
    for (s, (p, q)) in table {
        map.serialize_entry(&format_sig(*s), &[*p, *q])?;
    }
    map.end()
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum RawSchedule {
    BetaFamily { beta: f64 },
    Custom { table: BTreeMap<String, [f64; 2]> },
}

impl TryFrom<RawSchedule> for PQSchedule {
    type Error = Error;

    fn try_from(raw: RawSchedule) -> Result<Self> {
        match raw {
            RawSchedule::BetaFamily { beta } => PQSchedule::beta(beta),
            RawSchedule::Custom { table } => {
                let mut entries = Vec::with_capacity(table.len());
                for (key, [p, q]) in table {
                    let s: f64 = key
                        .trim()
                        .parse()
                        .map_err(|_| invalid(format!("schedule key {key:?} is not a number")))?;
                    entries.push((s, (p, q)));
                }
                PQSchedule::custom(entries)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn beta_family_branches() {
        let half = PQSchedule::beta(0.5).unwrap();
        assert_eq!(pq_eval(&half, 2.0).unwrap(), (0.5, 0.5));
        assert_eq!(pq_eval(&half, 3.0).unwrap(), (1.0, 1.0));
        let (p, q) = pq_eval(&half, 5.0).unwrap();
        assert_relative_eq!(p, 4.0, max_relative = 1e-15);
        assert_relative_eq!(q, 4.0, max_relative = 1e-15);
        assert_relative_eq!(p.powf(-0.5) + q.powf(-0.5), 1.0, max_relative = 1e-15);

        let quarter = PQSchedule::beta(0.25).unwrap();
        let (p, q) = pq_eval(&quarter, 4.0).unwrap();
        assert_relative_eq!(p, 4.0 / 3.0, max_relative = 1e-15);
        assert_relative_eq!(q, 4.0, max_relative = 1e-15);
    }

    #[test]
    fn eval_errors() {
        assert!(matches!(pq_eval(&PQSchedule::default(), 1.9), Err(Error::Domain(_))));
        let custom = PQSchedule::custom([(3.0, (1.0, 1.0))]).unwrap();
        assert_eq!(pq_eval(&custom, 3.0).unwrap(), (1.0, 1.0));
        assert!(matches!(pq_eval(&custom, 4.0), Err(Error::ScheduleLookup(_))));
    }

    #[test]
    fn validate_examples() {
        assert!(validate_pq(0.5, 0.5, 2.0));
        assert!(!validate_pq(1.0, 1.0, 3.5));
        assert!(validate_pq(4.0, 4.0, 5.0));
        assert!(!validate_pq(0.4, 0.5, 2.0));
        assert!(!validate_pq(0.0, 1.0, 2.0));
        assert!(!validate_pq(0.99, 1.0, 2.5));
        assert!(!validate_pq(1.0, 1.0, 1.5));
    }

    #[test]
    fn custom_rejects_inadmissible_pairs() {
        assert!(PQSchedule::custom([(3.5, (1.0, 1.0))]).is_err());
        assert!(PQSchedule::beta(1.0).is_err());
    }

    #[test]
    fn json_forms() {
        let s: PQSchedule = serde_json::from_str(r#"{"kind": "beta_family", "beta": 0.3}"#).unwrap();
        assert_eq!(s, PQSchedule::BetaFamily { beta: 0.3 });
        let s: PQSchedule =
            serde_json::from_str(r#"{"kind": "custom", "table": {"2": [0.25, 0.75], "4": [4, 4]}}"#).unwrap();
        assert_eq!(pq_eval(&s, 2.0).unwrap(), (0.25, 0.75));
        let v = serde_json::to_value(&s).unwrap();
        assert_eq!(v["table"]["4"], serde_json::json!([4.0, 4.0]));
        let back: PQSchedule = serde_json::from_value(v).unwrap();
        assert_eq!(back, s);
        assert!(serde_json::from_str::<PQSchedule>(r#"{"kind": "beta_family", "beta": 2}"#).is_err());
    }

    proptest! {
        #[test]
        fn beta_family_is_admissible(beta in 0.001f64..0.999, s in 2.0f64..20.0) {
            let sched = PQSchedule::beta(beta).unwrap();
            let (p, q) = pq_eval(&sched, s).unwrap();
            prop_assert!(validate_pq(p, q, s));
            if s > 2.0 {
                prop_assert!(p >= 1.0 && q >= 1.0);
            }
        }

        #[test]
        fn beta_family_continuous_above_three(beta in 0.01f64..0.99, s in 3.0f64..10.0) {
            let sched = PQSchedule::beta(beta).unwrap();
            let h = 1e-7;
            let (p0, q0) = pq_eval(&sched, s).unwrap();
            let (p1, q1) = pq_eval(&sched, s + h).unwrap();
            prop_assert!((p1 - p0).abs() <= 1e-4 * p0);
            prop_assert!((q1 - q0).abs() <= 1e-4 * q0);
        }
    }
}
