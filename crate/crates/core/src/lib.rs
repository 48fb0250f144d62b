//! Exact computation in bar complexes of finitely generated groups with
//! polynomially weighted `l^p` norms.
//!
//! * [`group`]: group models, word metrics, spheres and balls.
//! * [`chain`]: sparse bar chains, the boundary operator, push-forwards.
//! * [`norms`]: weighted norms and the comparison / functoriality estimates.
//! * [`diffusion`]: diffusion annuli, the cone operator `B` and `E = id - ∂B - B∂`.
//! * [`f2`]: the explicit 2-chains over `F_2` whose boundaries converge to `[e, a]`.

pub mod chain;
pub mod diffusion;
pub mod error;
pub mod f2;
pub mod group;
pub mod norms;

pub use chain::{Chain, Coeff, GroupHomomorphism, KernelCertificate, Simplex};
pub use error::{ChainError, DiffusionError, F2Error, GroupError, NormError};
pub use group::{GroupElement, GroupModel, ModelKind};
pub use norms::{Exponent, NormParams};
pub use diffusion::{AnnuliConfig, DiffusionOperator};
pub use f2::F2Construction;
