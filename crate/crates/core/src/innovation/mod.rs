//! Innovation representation of the mixed process: the kernel `g`, the drift and the likelihood.

mod drift;
mod family;
mod mle;
mod nystrom;
mod toeplitz;

pub use drift::{girsanov_loglik, innovation_drift, reconstruct_innovation, InnovationProcess};
pub use family::KernelFamily;
pub use mle::{
    empirical_fisher, mle_continuous, ProfileLikelihood, EMPIRICAL_FISHER_MAX_STEPS,
    EMPIRICAL_FISHER_REFINE, MLE_MAX_STEPS,
};
pub use nystrom::{solve_g, solve_g_constant, NystromSolution};
