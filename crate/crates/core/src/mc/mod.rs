//! Monte-Carlo martingale simulation and pointwise checks of the inequalities
//! the bounds rest on.

pub mod checks;
pub mod model;
pub mod rng;
pub mod space;
pub mod verify;

pub use checks::{check_2smooth_pointwise, check_lemma1_pointwise, check_riemann_sum, check_young, Residual};
pub use model::{MartingaleModel, ModelKind, RealDistribution};
pub use rng::{stream_rng, StreamLabel};
pub use space::NormedSpace;
pub use verify::{
    coordinate_means, estimate_and_check, estimate_and_check_many, estimate_norm_moments, estimate_step_moments,
    simulate, simulate_endpoints, MeanVar, VerificationReport, VerifyConfig,
};
