//! Sums over all `j`-subsets `J ⊆ {1, …, n}` grouped by their smallest element:
//!
//! ```text
//! Σ_{|J| = j} g(μ(J) − 1) · Π_{i ∈ J} w_i,    μ(J) = min J,  μ(∅) = n + 1.
//! ```
//!
//! Fixing the minimum `k` leaves an elementary symmetric polynomial of the
//! weights to its right, so the sum is `Σ_k g(k−1) w_k e_{j−1}(w_{k+1..n})`,
//! which costs `O(n·j)` instead of `C(n, j)`.

use crate::error::{invalid, Error, Result};

/// Largest `n` the enumeration oracle accepts.
pub const BRUTE_FORCE_LIMIT: usize = 20;

/// Weights, prefix values and subset size for a min-grouped sum.
#[derive(Debug, Clone, PartialEq)]
pub struct MinGroupedSumSpec {
    /// `w_1, …, w_n`.
    pub weights: Vec<f64>,
    /// `g_0, …, g_n`.
    pub prefix_values: Vec<f64>,
    pub j: usize,
}

impl MinGroupedSumSpec {
    pub fn new(weights: Vec<f64>, prefix_values: Vec<f64>, j: usize) -> Result<Self> {
        if prefix_values.len() != weights.len() + 1 {
            return Err(invalid(format!(
                "need n + 1 = {} prefix values, got {}",
                weights.len() + 1,
                prefix_values.len()
            )));
        }
        if weights.iter().chain(&prefix_values).any(|x| !x.is_finite() || *x < 0.0) {
            return Err(invalid("weights and prefix values must be finite and >= 0"));
        }
        Ok(Self { weights, prefix_values, j })
    }

    pub fn n(&self) -> usize {
        self.weights.len()
    }
}

/// Table of `e_r(w_k, …, w_n)` for suffix starts `k = 1..=n+1` and `r = 0..=j`.
///
/// Row `k − 1` holds the suffix starting at `w_k`; row `n` is the empty suffix.
pub fn elementary_symmetric_suffix(weights: &[f64], j: usize) -> Vec<Vec<f64>> {
    let n = weights.len();
    let mut table = vec![vec![0.0; j + 1]; n + 1];
    table[n][0] = 1.0;
    for k in (0..n).rev() {
        let (head, tail) = table.split_at_mut(k + 1);
        let next = &tail[0];
        let row = &mut head[k];
        row[0] = 1.0;
        for r in 1..=j {
            row[r] = next[r] + weights[k] * next[r - 1];
        }
    }
    table
}

/// Evaluates the min-grouped sum in `O(n·j)`.
///
/// Terms are accumulated in ascending `k` with Kahan compensation, so the
/// result is reproducible bit for bit.
pub fn min_grouped_sum(spec: &MinGroupedSumSpec) -> f64 {
    let n = spec.n();
    let j = spec.j;
    if j == 0 {
        return spec.prefix_values[n];
    }
    if j > n {
        return 0.0;
    }
    let e = elementary_symmetric_suffix(&spec.weights, j - 1);
    let mut acc = KahanSum::default();
    for k in 0..n {
        // 1-based minimum k + 1 contributes g(k) · w_{k+1} · e_{j−1}(w_{k+2..n})
        acc.add(spec.prefix_values[k] * spec.weights[k] * e[k + 1][j - 1]);
    }
    acc.total()
}

/// Enumeration oracle for [`min_grouped_sum`]; refuses `n > 20`.
pub fn brute_force_min_grouped_sum(spec: &MinGroupedSumSpec) -> Result<f64> {
    let n = spec.n();
    if n > BRUTE_FORCE_LIMIT {
        return Err(Error::TooLarge { n, limit: BRUTE_FORCE_LIMIT });
    }
    if spec.j == 0 {
        return Ok(spec.prefix_values[n]);
    }
    let mut total = 0.0;
    for mask in 0u32..(1u32 << n) {
        if mask.count_ones() as usize != spec.j {
            continue;
        }
        let min = mask.trailing_zeros() as usize;
        let prod: f64 = (0..n).filter(|i| mask & (1 << i) != 0).map(|i| spec.weights[i]).product();
        total += spec.prefix_values[min] * prod;
    }
    Ok(total)
}

#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub(crate) fn add(&mut self, x: f64) {
        let y = x - self.comp;
        let t = self.sum + y;
        self.comp = (t - self.sum) - y;
        self.sum = t;
    }

    pub(crate) fn total(self) -> f64 {
        self.sum
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn spec(w: &[f64], g: &[f64], j: usize) -> MinGroupedSumSpec {
        MinGroupedSumSpec::new(w.to_vec(), g.to_vec(), j).unwrap()
    }

    #[test]
    fn suffix_table_examples() {
        let e = elementary_symmetric_suffix(&[1.0, 2.0, 3.0], 2);
        assert_eq!(e[0][2], 11.0);
        assert!(e.iter().all(|row| row[0] == 1.0));
        let e = elementary_symmetric_suffix(&[5.0], 2);
        assert_eq!(e[0][2], 0.0);
    }

    #[test]
    fn grouped_sum_examples() {
        let s = spec(&[1.0, 1.0], &[0.0, 5.0, 7.0], 0);
        assert_eq!(min_grouped_sum(&s), 7.0);
        assert_eq!(brute_force_min_grouped_sum(&s).unwrap(), 7.0);

        let s = spec(&[1.0, 2.0, 3.0], &[0.0, 1.0, 2.0, 3.0], 1);
        assert_eq!(min_grouped_sum(&s), 8.0);
        assert_eq!(brute_force_min_grouped_sum(&s).unwrap(), 8.0);

        let s = spec(&[1.0, 2.0, 3.0], &[0.0, 1.0, 2.0, 3.0], 2);
        assert_eq!(min_grouped_sum(&s), 6.0);
        assert_eq!(brute_force_min_grouped_sum(&s).unwrap(), 6.0);
    }

    #[test]
    fn degenerate_cases() {
        let s = spec(&[0.0, 0.0, 0.0], &[1.0, 2.0, 3.0, 4.0], 2);
        assert_eq!(min_grouped_sum(&s), 0.0);
        assert_eq!(brute_force_min_grouped_sum(&s).unwrap(), 0.0);

        let s = spec(&[2.0, 3.0, 5.0], &[1.5, 9.0, 9.0, 9.0], 3);
        assert_eq!(min_grouped_sum(&s), 1.5 * 30.0);
        assert_eq!(brute_force_min_grouped_sum(&s).unwrap(), 1.5 * 30.0);

        let s = spec(&[1.0, 1.0], &[1.0, 1.0, 1.0], 3);
        assert_eq!(min_grouped_sum(&s), 0.0);
        assert_eq!(brute_force_min_grouped_sum(&s).unwrap(), 0.0);
    }

    #[test]
    fn oracle_guard_and_validation() {
        let s = spec(&[1.0; 21], &[1.0; 22], 2);
        assert!(matches!(brute_force_min_grouped_sum(&s), Err(Error::TooLarge { n: 21, .. })));
        assert!(MinGroupedSumSpec::new(vec![1.0], vec![1.0], 1).is_err());
        assert!(MinGroupedSumSpec::new(vec![-1.0], vec![1.0, 1.0], 1).is_err());
    }

    fn arb_spec() -> impl Strategy<Value = MinGroupedSumSpec> {
        (0usize..=12).prop_flat_map(|n| {
            (
                prop::collection::vec(0.0f64..10.0, n),
                prop::collection::vec(0.0f64..10.0, n + 1),
                0..=n + 1,
            )
                .prop_map(|(w, g, j)| MinGroupedSumSpec::new(w, g, j).unwrap())
        })
    }

    proptest! {
        #[test]
        fn fast_matches_enumeration(s in arb_spec()) {
            let fast = min_grouped_sum(&s);
            let brute = brute_force_min_grouped_sum(&s).unwrap();
            prop_assert!((fast - brute).abs() <= 1e-10 * (1.0 + brute));
        }

        #[test]
        fn monotone_in_inputs(s in arb_spec(), idx in 0usize..13, bump in 0.0f64..5.0) {
            let base = min_grouped_sum(&s);
            let mut w = s.clone();
            if let Some(x) = w.weights.get_mut(idx) { *x += bump; }
            prop_assert!(min_grouped_sum(&w) >= base * (1.0 - 1e-12));
            let mut g = s.clone();
            if let Some(x) = g.prefix_values.get_mut(idx) { *x += bump; }
            prop_assert!(min_grouped_sum(&g) >= base * (1.0 - 1e-12));
        }
    }
}
