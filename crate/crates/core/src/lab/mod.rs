//! Simulation laboratory: error-component generators, scenario runner,
//! table presets and the limiting-law power curve.

pub mod config;
pub mod distributions;
pub mod power;
pub mod presets;
pub mod scenario;

pub use config::{ScenarioEntry, ScenarioFile};
pub use distributions::{sample_distribution, DistributionSpec};
pub use power::{asymptotic_power_curve, PowerPoint};
pub use presets::{preset, scenario_id, table1, table2, table3, table3_null, table4};
pub use scenario::{
    replicate, run_scenario, Calibrations, RejectionCell, RejectionTable, ScenarioSpec, ScenarioTest,
    DEFAULT_REPLICATIONS,
};
