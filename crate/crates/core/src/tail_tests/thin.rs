//! The thin-tail test: a weighted-average likelihood ratio of heavy-tailed
//! alternatives against the `xi = 0` limit, calibrated by simulating the
//! statistic under the null limiting law.

use rayon::prelude::*;

use super::artifact::{CalibrationArtifact, TestKind, TestResult, ARTIFACT_VERSION};
use super::profile::{log_sum_exp, TailProfile};
use super::weights::WeightGrid;
use crate::error::{Error, Result};
use crate::evt::{sample_normalized, self_normalize, NormalizedTail, QuadratureConfig, SortedTail, TailIndex};
use crate::rng::{substream, Component};

/// Default number of null draws behind a critical value.
pub const DEFAULT_NULL_DRAWS: usize = 10_000;

/// `Σ_j w_j f(v* | xi_j) / f(v* | 0)`.
pub fn thin_tail_statistic(vstar: &NormalizedTail, w: &WeightGrid, q: &QuadratureConfig) -> Result<f64> {
    let profile = TailProfile::compute(vstar, w.points(), q)?;
    Ok(statistic_from_profile(&profile, w))
}

pub(crate) fn statistic_from_profile(profile: &TailProfile, w: &WeightGrid) -> f64 {
    let terms = w
        .masses()
        .iter()
        .zip(&profile.log_density)
        .filter(|(m, _)| **m > 0.0)
        .map(|(m, l)| m.ln() + l);
    (log_sum_exp(terms) - profile.log_null).exp()
}

/// Sorted statistics of `draws` independent replications under the `xi = 0`
/// limiting law. Replication `i` uses substream `i` of `seed`.
#[derive(Debug, Clone, PartialEq)]
pub struct NullReference {
    k: usize,
    seed: u64,
    sorted: Vec<f64>,
}

impl NullReference {
    pub fn simulate(k: usize, w: &WeightGrid, draws: usize, seed: u64, q: &QuadratureConfig) -> Result<Self> {
        if k < 3 {
            return Err(Error::InvalidInput(format!("k must be >= 3, got {k}")));
        }
        if draws < 1000 {
            return Err(Error::InvalidInput(format!("need at least 1000 null draws, got {draws}")));
        }
        let mut sorted = (0..draws as u64)
            .into_par_iter()
            .map(|i| {
                let mut rng = substream(seed, i, Component::Limit);
                let vstar = sample_normalized(TailIndex::ZERO, k, &mut rng)?;
                thin_tail_statistic(&vstar, w, q)
            })
            .collect::<Result<Vec<f64>>>()?;
        sorted.sort_by(f64::total_cmp);
        Ok(NullReference { k, seed, sorted })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn draws(&self) -> usize {
        self.sorted.len()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn statistics(&self) -> &[f64] {
        &self.sorted
    }

    /// The order statistic `s_(r)` with `r = M + 1 - floor(alpha (M + 1))`,
    /// so that `stat > cv` exactly when the add-one p-value is `<= alpha`.
    pub fn critical_value(&self, alpha: f64) -> Result<f64> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidInput(format!("alpha must lie in (0, 1), got {alpha}")));
        }
        let m = self.sorted.len();
        let exceed = (alpha * (m + 1) as f64).floor() as usize;
        if exceed == 0 {
            return Err(Error::InvalidInput(format!(
                "alpha = {alpha} is below the resolution of {m} null draws"
            )));
        }
        Ok(self.sorted[m - exceed])
    }

    /// `(1 + #{null >= statistic}) / (M + 1)`.
    pub fn p_value(&self, statistic: f64) -> f64 {
        let below = self.sorted.partition_point(|&s| s < statistic);
        let exceed = self.sorted.len() - below;
        (1 + exceed) as f64 / (self.sorted.len() + 1) as f64
    }
}

/// Empirical `(1 - alpha)` critical value from `draws` null replications.
pub fn simulate_critical_value(
    k: usize,
    alpha: f64,
    w: &WeightGrid,
    draws: usize,
    seed: u64,
    q: &QuadratureConfig,
) -> Result<f64> {
    NullReference::simulate(k, w, draws, seed, q)?.critical_value(alpha)
}

/// Monte Carlo p-value of `statistic` against `draws` null replications.
pub fn mc_p_value(
    statistic: f64,
    k: usize,
    w: &WeightGrid,
    draws: usize,
    seed: u64,
    q: &QuadratureConfig,
) -> Result<f64> {
    Ok(NullReference::simulate(k, w, draws, seed, q)?.p_value(statistic))
}

/// A calibrated thin-tail test: the artifact, its weight and the null draws
/// that reproduce its critical value (used for p-values).
#[derive(Debug, Clone)]
pub struct ThinTailTest {
    artifact: CalibrationArtifact,
    weight: WeightGrid,
    null: NullReference,
    quadrature: QuadratureConfig,
}

impl ThinTailTest {
    /// Simulates the null reference and records the critical value.
    pub fn calibrate(
        k: usize,
        alpha: f64,
        weight: WeightGrid,
        draws: usize,
        seed: u64,
        q: &QuadratureConfig,
    ) -> Result<Self> {
        let null = NullReference::simulate(k, &weight, draws, seed, q)?;
        let cv = null.critical_value(alpha)?;
        let artifact = CalibrationArtifact {
            version: ARTIFACT_VERSION,
            kind: TestKind::ThinTail,
            k,
            alpha,
            grid_points: weight.points().iter().map(|p| p.value()).collect(),
            lambda_masses: None,
            cv,
            mc_draws: draws,
            seed,
        };
        Ok(ThinTailTest {
            artifact,
            weight,
            null,
            quadrature: *q,
        })
    }

    /// Rebuilds the test from a stored artifact; the regenerated null draws
    /// must reproduce the stored critical value bit for bit.
    pub fn from_artifact(artifact: CalibrationArtifact, q: &QuadratureConfig) -> Result<Self> {
        artifact.validate()?;
        if artifact.kind != TestKind::ThinTail {
            return Err(Error::CalibrationMismatch(format!(
                "{} is not a thin-tail calibration",
                artifact.id()
            )));
        }
        let rebuilt = Self::calibrate(
            artifact.k,
            artifact.alpha,
            artifact.weight_grid()?,
            artifact.mc_draws,
            artifact.seed,
            q,
        )?;
        if rebuilt.artifact.cv != artifact.cv {
            return Err(Error::CalibrationMismatch(format!(
                "{}: stored critical value {} but the null draws give {}",
                artifact.id(),
                artifact.cv,
                rebuilt.artifact.cv
            )));
        }
        Ok(rebuilt)
    }

    pub fn artifact(&self) -> &CalibrationArtifact {
        &self.artifact
    }

    pub fn weight(&self) -> &WeightGrid {
        &self.weight
    }

    pub fn null_reference(&self) -> &NullReference {
        &self.null
    }

    pub fn k(&self) -> usize {
        self.artifact.k
    }

    pub fn critical_value(&self) -> f64 {
        self.artifact.cv
    }

    pub fn statistic(&self, vstar: &NormalizedTail) -> Result<f64> {
        self.check_k(vstar.k())?;
        thin_tail_statistic(vstar, &self.weight, &self.quadrature)
    }

    /// Decision only; skips the p-value lookup.
    pub fn rejects(&self, tail: &SortedTail) -> Result<bool> {
        self.check_k(tail.k())?;
        Ok(self.statistic(&self_normalize(tail)?)? > self.artifact.cv)
    }

    fn check_k(&self, k: usize) -> Result<()> {
        if k != self.artifact.k {
            return Err(Error::CalibrationMismatch(format!(
                "tail has k = {k} but {} expects k = {}",
                self.artifact.id(),
                self.artifact.k
            )));
        }
        Ok(())
    }
}

/// Normalizes `tail`, evaluates the statistic and compares it with the
/// calibrated critical value.
pub fn thin_tail_test(tail: &SortedTail, test: &ThinTailTest) -> Result<TestResult> {
    test.check_k(tail.k())?;
    let statistic = test.statistic(&self_normalize(tail)?)?;
    Ok(TestResult {
        statistic,
        reject: statistic > test.artifact.cv,
        p_value: test.null.p_value(statistic),
        k: test.artifact.k,
        alpha: test.artifact.alpha,
        calibration_id: test.artifact.id(),
        seed: test.artifact.seed,
    })
}

/// Thin-tail test of the lower tail when the noise is assumed to be in the
/// normal family: the equal-tail problem reduces to the thin-tail test on
/// the (negated) lower order statistics.
pub fn normal_family_left_test(lower: &SortedTail, test: &ThinTailTest) -> Result<TestResult> {
    thin_tail_test(lower, test)
}
