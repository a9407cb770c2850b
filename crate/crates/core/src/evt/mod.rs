//! Limiting extreme-value laws: the GEV family, the joint top-`k` density,
//! self-normalization, the density of the self-normalized vector and exact
//! sampling from the limit.

mod density;
mod gev;
mod quadrature;
mod sampling;
mod tail;

pub use density::{log_density_profile, log_normalized_density, normalized_density};
pub use gev::{gev_cdf, gev_log_cdf, gev_log_pdf, joint_topk_log_density};
pub use quadrature::{integrate, QuadEstimate, QuadratureConfig};
pub use sampling::{sample_normalized, sample_topk};
pub use tail::{self_normalize, NormalizedTail, SortedTail, TailIndex};
