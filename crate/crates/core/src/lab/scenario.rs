//! Monte Carlo scenarios: composed errors, optional regression design, and
//! the rejection frequency of one test.

use std::collections::BTreeMap;

use rand_distr::StandardNormal;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::distributions::{sample_distribution, DistributionSpec};
use crate::error::{Error, Result};
use crate::frontier::{ols_fit, residual_tails, Dataset, Orientation};
use crate::rng::{substream, Component};
use crate::tail_tests::{EqualTailTest, ThinTailTest};

/// Default number of replications per cell.
pub const DEFAULT_REPLICATIONS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioTest {
    /// Thin-tail test on the upper residual tail (hypotheses about `W`).
    ThinTailRight,
    /// Thin-tail test on the lower residual tail when `W` has a thin left
    /// tail (hypotheses about `U`).
    ThinTailLeftNormalFamily,
    /// Equal-tail test on both residual tails.
    EqualTail,
}

/// One simulation design.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub id: String,
    /// `W`
    pub noise: DistributionSpec,
    /// `U`, nonnegative
    pub inefficiency: DistributionSpec,
    pub n: usize,
    pub k: usize,
    /// Embed the errors in `Y = 1 + X2 + Z` with `X2 ~ N(0,1)` and use the
    /// OLS residuals.
    #[serde(default)]
    pub covariates: bool,
    pub test: ScenarioTest,
    /// Production: `Z = W - U`; cost: `Z = W + U`.
    #[serde(default = "production")]
    pub orientation: Orientation,
}

fn production() -> Orientation {
    Orientation::Production
}

impl ScenarioSpec {
    pub fn validate(&self) -> Result<()> {
        self.noise.validate()?;
        self.inefficiency.validate()?;
        if !self.inefficiency.is_nonnegative() {
            return Err(Error::InvalidInput(format!(
                "inefficiency {} can take negative values",
                self.inefficiency.label()
            )));
        }
        if self.k < 3 || 2 * self.k > self.n {
            return Err(Error::InvalidInput(format!(
                "tail size k = {} must satisfy 3 <= k <= n/2 with n = {}",
                self.k, self.n
            )));
        }
        Ok(())
    }

    /// Composed errors of replication `rep`; noise, inefficiency and
    /// covariates come from separate substreams.
    pub fn residuals(&self, seed: u64, rep: u64) -> Result<Vec<f64>> {
        let w = sample_distribution(&self.noise, self.n, &mut substream(seed, rep, Component::Noise))?;
        let u = sample_distribution(&self.inefficiency, self.n, &mut substream(seed, rep, Component::Inefficiency))?;
        let sign = -self.orientation.sign();
        let z: Vec<f64> = w.iter().zip(&u).map(|(w, u)| w + sign * u).collect();
        if !self.covariates {
            return Ok(z);
        }
        let mut rng = substream(seed, rep, Component::Covariates);
        let x2: Vec<f64> = (0..self.n).map(|_| rng.sample(StandardNormal)).collect();
        let y = x2.iter().zip(&z).map(|(x, z)| 1.0 + x + z).collect();
        Ok(ols_fit(&Dataset::with_intercept(y, &[x2], None)?)?.residuals)
    }
}

/// Calibrated tests by tail size.
#[derive(Debug, Clone, Default)]
pub struct Calibrations {
    pub thin: BTreeMap<usize, ThinTailTest>,
    pub equal: BTreeMap<usize, EqualTailTest>,
}

impl Calibrations {
    pub fn thin(&self, k: usize) -> Result<&ThinTailTest> {
        self.thin
            .get(&k)
            .ok_or_else(|| Error::CalibrationMismatch(format!("no thin-tail calibration for k = {k}")))
    }

    pub fn equal(&self, k: usize) -> Result<&EqualTailTest> {
        self.equal
            .get(&k)
            .ok_or_else(|| Error::CalibrationMismatch(format!("no equal-tail calibration for k = {k}")))
    }
}

/// Rejection frequency of one scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RejectionCell {
    pub scenario: String,
    pub n: usize,
    pub k: usize,
    pub rate: f64,
    pub se: f64,
    pub reps: usize,
    pub seed: u64,
}

impl RejectionCell {
    fn from_count(spec: &ScenarioSpec, rejections: usize, reps: usize, seed: u64) -> Self {
        let rate = rejections as f64 / reps as f64;
        RejectionCell {
            scenario: spec.id.clone(),
            n: spec.n,
            k: spec.k,
            rate,
            se: (rate * (1.0 - rate) / reps as f64).sqrt(),
            reps,
            seed,
        }
    }
}

/// Whether the designated test rejects on replication `rep`.
pub fn replicate(spec: &ScenarioSpec, calibrations: &Calibrations, seed: u64, rep: u64) -> Result<bool> {
    let residuals = spec.residuals(seed, rep)?;
    let (upper, lower) = residual_tails(&residuals, spec.orientation, spec.k)?;
    match spec.test {
        ScenarioTest::ThinTailRight => calibrations.thin(spec.k)?.rejects(&upper),
        ScenarioTest::ThinTailLeftNormalFamily => calibrations.thin(spec.k)?.rejects(&lower),
        ScenarioTest::EqualTail => calibrations.equal(spec.k)?.rejects(&lower, &upper),
    }
}

/// Runs `replications` independent replications of `spec`.
pub fn run_scenario(
    spec: &ScenarioSpec,
    replications: usize,
    calibrations: &Calibrations,
    seed: u64,
) -> Result<RejectionCell> {
    spec.validate()?;
    if replications == 0 {
        return Err(Error::InvalidInput("need at least one replication".into()));
    }
    // surface a missing calibration before spending any draws
    match spec.test {
        ScenarioTest::EqualTail => calibrations.equal(spec.k).map(|_| ())?,
        _ => calibrations.thin(spec.k).map(|_| ())?,
    }
    let rejections = (0..replications as u64)
        .into_par_iter()
        .map(|rep| replicate(spec, calibrations, seed, rep).map(usize::from))
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    Ok(RejectionCell::from_count(spec, rejections, replications, seed))
}

/// Rejection frequencies for a list of scenarios.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RejectionTable {
    pub cells: Vec<RejectionCell>,
    pub replications: usize,
    pub seed: u64,
}

impl RejectionTable {
    pub fn run(specs: &[ScenarioSpec], replications: usize, calibrations: &Calibrations, seed: u64) -> Result<Self> {
        let cells = specs
            .iter()
            .map(|s| run_scenario(s, replications, calibrations, seed))
            .collect::<Result<_>>()?;
        Ok(RejectionTable {
            cells,
            replications,
            seed,
        })
    }

    pub fn get(&self, scenario: &str) -> Option<&RejectionCell> {
        self.cells.iter().find(|c| c.scenario == scenario)
    }
}
