//! Hypothesis tests on the tail index of the composed error.

mod artifact;
mod equal;
mod profile;
mod thin;
mod weights;

pub use artifact::{artifact_id, write_atomic, CalibrationArtifact, CalibrationStore, TestKind, TestResult, ARTIFACT_VERSION};
pub use equal::{
    calibrate_lfd, equal_tail_statistic, equal_tail_test, verify_size, EqualTailTest, LfdCalibration, LfdSettings,
    ProposalSample, SizeReport, SizeRow,
};
pub use profile::TailProfile;
pub use thin::{
    mc_p_value, normal_family_left_test, simulate_critical_value, thin_tail_statistic, thin_tail_test, NullReference,
    ThinTailTest, DEFAULT_NULL_DRAWS,
};
pub use weights::{equal_grid, LeastFavorableDistribution, PairWeight, WeightGrid, DEFAULT_GRID_MAX, DEFAULT_GRID_POINTS};
