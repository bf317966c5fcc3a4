//! Explicit Rosenthal-type upper bounds on `E‖S_n‖^t` for martingales in
//! `(2, D)`-smooth Banach spaces, plus a Monte-Carlo harness that checks them.
//!
//! The bounds need the per-increment absolute moments `a_i(s) = E‖X_i‖^s`
//! (a [`MomentProfile`]) and an almost-sure envelope `E_{i−1}‖X_i‖² ≤ b_i²`
//! (a [`VarianceEnvelope`]).

// `!(x >= 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod cli;
pub mod concentration;
pub mod constants;
pub mod error;
pub mod gaussian;
pub mod mc;
pub mod numfmt;
pub mod optimize;
pub mod schedule;
pub mod subset_sums;
pub mod types;

pub use bounds::{
    best_bound, candidate_bounds, closed_form_2_3, closed_form_3_4, closed_form_min, corollary_beta_scan,
    corollary_bound, corollary_from_totals, hilbert_2_4, pin94_bound, t3_bound, theorem_bound,
    theorem_bound_unrestricted, Lambdas, Pin94Config,
};
pub use concentration::{find_bt, r_value, separately_lipschitz_bound, sum_norm_bound, ReCenteringConstant};
pub use constants::ConstantSet;
pub use error::{Error, Result};
pub use gaussian::{abs_moment_normal, ln_gamma, ratio_curve, RatioCurvePoint};
pub use schedule::{pq_eval, PQSchedule};
pub use subset_sums::{brute_force_min_grouped_sum, min_grouped_sum, MinGroupedSumSpec};
pub use types::{BoundReport, Method, MomentProfile, SmoothnessConstant, VarianceEnvelope};
