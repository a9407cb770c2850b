//! The equal-tail test of `xi_lower = xi_upper` against `xi_lower > xi_upper`.
//!
//! The lower and upper normalized tails are asymptotically independent, so
//! the statistic is a ratio of products of normalized densities: a uniform
//! average over ordered pairs of the grid against a mixture of equal-index
//! products under the least favorable weight `Λ`. `Λ` and the critical value
//! `c` are found by iterating `c Λ <- c Λ + κ (P - alpha)` on importance
//! sampling estimates `P` of the grid-wise rejection rates.

use rayon::prelude::*;

use super::artifact::{CalibrationArtifact, TestKind, TestResult, ARTIFACT_VERSION};
use super::profile::{log_sum_exp, TailProfile};
use super::weights::{LeastFavorableDistribution, PairWeight};
use crate::error::{Error, Result};
use crate::evt::{sample_normalized, self_normalize, NormalizedTail, QuadratureConfig, SortedTail, TailIndex};
use crate::rng::{substream, Component};

/// `[Σ w(i,j) f(v-|xi_i) f(v+|xi_j)] / [Σ_j Λ_j f(v-|xi_j) f(v+|xi_j)]`.
pub fn equal_tail_statistic(
    vminus: &NormalizedTail,
    vplus: &NormalizedTail,
    alternative: &PairWeight,
    lfd: &LeastFavorableDistribution,
    q: &QuadratureConfig,
) -> Result<f64> {
    if vminus.k() != vplus.k() {
        return Err(Error::InvalidInput(format!(
            "lower and upper tails differ in length ({} vs {})",
            vminus.k(),
            vplus.k()
        )));
    }
    if alternative.points() != lfd.grid.points() {
        return Err(Error::InvalidInput(
            "alternative weight and least favorable weight use different grids".into(),
        ));
    }
    let points = alternative.points();
    let lower = TailProfile::compute(vminus, points, q)?;
    let upper = TailProfile::compute(vplus, points, q)?;
    Ok((log_alternative(&lower, &upper, alternative) - log_null_mixture(&lower, &upper, lfd.grid.masses())).exp())
}

fn log_alternative(lower: &TailProfile, upper: &TailProfile, alternative: &PairWeight) -> f64 {
    log_sum_exp(
        alternative
            .entries()
            .iter()
            .filter(|e| e.2 > 0.0)
            .map(|&(i, j, m)| m.ln() + lower.log_density[i] + upper.log_density[j]),
    )
}

fn log_null_mixture(lower: &TailProfile, upper: &TailProfile, masses: &[f64]) -> f64 {
    log_sum_exp(
        masses
            .iter()
            .enumerate()
            .filter(|(_, m)| **m > 0.0)
            .map(|(j, m)| m.ln() + lower.log_density[j] + upper.log_density[j]),
    )
}

/// Knobs of the least favorable weight iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LfdSettings {
    /// Proposal draws `N`.
    pub draws: usize,
    pub iterations: usize,
    /// Initial step length.
    pub kappa: f64,
    /// Geometric decay applied to the step length after every iteration.
    pub decay: f64,
    /// Allowed excess of the estimated grid-wise size over `alpha`.
    pub tolerance: f64,
    /// The iteration targets `alpha - size_margin` to absorb the
    /// importance sampling error of the size estimates.
    pub size_margin: f64,
}

impl Default for LfdSettings {
    fn default() -> Self {
        LfdSettings {
            draws: 10_000,
            iterations: 500,
            kappa: 2.0,
            decay: 0.99,
            tolerance: 0.005,
            size_margin: 0.0025,
        }
    }
}

/// Draws from the equal mixture of the null limiting laws over the grid,
/// kept as the quantities the size estimates need.
#[derive(Debug, Clone)]
pub struct ProposalSample {
    grid: usize,
    /// `log` of the alternative density over the largest null density, per draw
    log_alt: Vec<f64>,
    /// null densities at each grid point, scaled by the largest, row-major
    null_scaled: Vec<f64>,
    /// self-normalizing importance weights `f_j / q`, row-major
    ratio: Vec<f64>,
    /// `Σ_n ratio[n][j]`
    ratio_total: Vec<f64>,
}

impl ProposalSample {
    /// Draw `n` takes grid point `n mod G` and uses substream `n` of `seed`.
    pub fn simulate(
        k: usize,
        alternative: &PairWeight,
        draws: usize,
        seed: u64,
        q: &QuadratureConfig,
    ) -> Result<Self> {
        if draws < 1000 {
            return Err(Error::InvalidInput(format!("need at least 1000 proposal draws, got {draws}")));
        }
        let points = alternative.points();
        let g = points.len();
        let rows = (0..draws as u64)
            .into_par_iter()
            .map(|n| {
                let xi = points[(n % g as u64) as usize];
                let mut rng = substream(seed, n, Component::Proposal);
                let vminus = sample_normalized(xi, k, &mut rng)?;
                let vplus = sample_normalized(xi, k, &mut rng)?;
                let lower = TailProfile::compute(&vminus, points, q)?;
                let upper = TailProfile::compute(&vplus, points, q)?;
                let joint: Vec<f64> = (0..g).map(|j| lower.log_density[j] + upper.log_density[j]).collect();
                let top = joint.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let scaled: Vec<f64> = joint.iter().map(|l| (l - top).exp()).collect();
                let mean = scaled.iter().sum::<f64>() / g as f64;
                let ratio: Vec<f64> = scaled.iter().map(|e| e / mean).collect();
                Ok((log_alternative(&lower, &upper, alternative) - top, scaled, ratio))
            })
            .collect::<Result<Vec<_>>>()?;

        let mut sample = ProposalSample {
            grid: g,
            log_alt: Vec::with_capacity(draws),
            null_scaled: Vec::with_capacity(draws * g),
            ratio: Vec::with_capacity(draws * g),
            ratio_total: vec![0.0; g],
        };
        for (log_alt, scaled, ratio) in rows {
            sample.log_alt.push(log_alt);
            sample.null_scaled.extend_from_slice(&scaled);
            for (t, r) in sample.ratio_total.iter_mut().zip(&ratio) {
                *t += r;
            }
            sample.ratio.extend_from_slice(&ratio);
        }
        Ok(sample)
    }

    pub fn draws(&self) -> usize {
        self.log_alt.len()
    }

    /// `log` of the statistic for draw `n` under masses `Λ` (unscaled).
    fn log_statistic(&self, n: usize, masses: &[f64]) -> f64 {
        let row = &self.null_scaled[n * self.grid..(n + 1) * self.grid];
        let den: f64 = row.iter().zip(masses).map(|(e, m)| e * m).sum();
        self.log_alt[n] - den.ln()
    }

    /// Estimated rejection probability at every grid point for the rule
    /// `alt > Σ_j μ_j f_j` with `μ = c Λ`.
    pub fn grid_sizes(&self, scaled_masses: &[f64]) -> Vec<f64> {
        let mut hits = vec![0.0; self.grid];
        for n in 0..self.draws() {
            if self.log_statistic(n, scaled_masses) > 0.0 {
                let row = &self.ratio[n * self.grid..(n + 1) * self.grid];
                for (h, r) in hits.iter_mut().zip(row) {
                    *h += r;
                }
            }
        }
        hits.iter().zip(&self.ratio_total).map(|(h, t)| h / t).collect()
    }

    /// Largest grid-wise exceedance probability of `log_statistic`, used as
    /// the p-value of the composite null.
    pub fn sup_exceedance(&self, log_statistic: f64, masses: &[f64]) -> f64 {
        let mut hits = vec![0.0; self.grid];
        for n in 0..self.draws() {
            if self.log_statistic(n, masses) >= log_statistic {
                let row = &self.ratio[n * self.grid..(n + 1) * self.grid];
                for (h, r) in hits.iter_mut().zip(row) {
                    *h += r;
                }
            }
        }
        hits.iter()
            .zip(&self.ratio_total)
            .map(|(h, t)| (h / t).min(1.0))
            .fold(0.0, f64::max)
    }
}

/// Result of the least favorable weight iteration.
#[derive(Debug, Clone)]
pub struct LfdCalibration {
    pub lfd: LeastFavorableDistribution,
    /// Importance sampling estimate of the rejection rate at each grid point.
    pub grid_sizes: Vec<f64>,
    pub proposal: ProposalSample,
}

/// Finds `Λ` and `c` so that the estimated rejection rate at every grid
/// point is at most `alpha + tolerance`.
pub fn calibrate_lfd(
    k: usize,
    alpha: f64,
    alternative: &PairWeight,
    settings: &LfdSettings,
    seed: u64,
    q: &QuadratureConfig,
) -> Result<LfdCalibration> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidInput(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    if !(settings.kappa > 0.0) || !(settings.decay > 0.0 && settings.decay <= 1.0) {
        return Err(Error::InvalidInput(format!("invalid step settings {settings:?}")));
    }
    if !(settings.size_margin >= 0.0 && settings.size_margin < alpha) {
        return Err(Error::InvalidInput(format!(
            "size margin {} must lie in [0, alpha)",
            settings.size_margin
        )));
    }
    let proposal = ProposalSample::simulate(k, alternative, settings.draws, seed, q)?;
    calibrate_from_proposal(proposal, alpha, alternative.points(), settings)
}

fn calibrate_from_proposal(
    proposal: ProposalSample,
    alpha: f64,
    points: &[TailIndex],
    settings: &LfdSettings,
) -> Result<LfdCalibration> {
    let g = points.len();
    // μ = c Λ, starting from Λ uniform and c = 1
    let mut scaled = vec![1.0 / g as f64; g];
    if settings.iterations == 0 {
        let grid_sizes = proposal.grid_sizes(&scaled);
        let lfd = LeastFavorableDistribution::from_scaled(points.to_vec(), &scaled)?;
        return Ok(LfdCalibration { lfd, grid_sizes, proposal });
    }
    let target = alpha - settings.size_margin;
    let mut step = settings.kappa;
    for _ in 0..settings.iterations {
        let sizes = proposal.grid_sizes(&scaled);
        for (m, p) in scaled.iter_mut().zip(&sizes) {
            *m = (*m + step * (p - target)).max(0.0);
        }
        if scaled.iter().all(|&m| m == 0.0) {
            // every mass clipped: restart from the uniform shape at the smallest scale
            scaled.iter_mut().for_each(|m| *m = f64::MIN_POSITIVE);
        }
        step *= settings.decay;
    }
    let grid_sizes = proposal.grid_sizes(&scaled);
    let (worst, &worst_size) = grid_sizes
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("grid is non-empty");
    if worst_size > alpha + settings.tolerance {
        return Err(Error::CalibrationDivergence {
            worst_size,
            worst_xi: points[worst].value(),
            limit: alpha + settings.tolerance,
        });
    }
    let lfd = LeastFavorableDistribution::from_scaled(points.to_vec(), &scaled)?;
    Ok(LfdCalibration { lfd, grid_sizes, proposal })
}

/// Rejection rate at one tail index of the composite null.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SizeRow {
    pub xi: f64,
    pub rate: f64,
    /// binomial standard error at the nominal level
    pub se: f64,
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SizeReport {
    pub alpha: f64,
    pub draws: usize,
    pub rows: Vec<SizeRow>,
}

impl SizeReport {
    pub fn max_rate(&self) -> f64 {
        self.rows.iter().map(|r| r.rate).fold(0.0, f64::max)
    }

    pub fn any_flagged(&self) -> bool {
        self.rows.iter().any(|r| r.flagged)
    }
}

/// Simulates `draws` null pairs at every tail index of `grid` and reports
/// the rejection frequency of the calibrated rule.
pub fn verify_size(
    test: &EqualTailTest,
    grid: &[TailIndex],
    draws: usize,
    seed: u64,
) -> Result<SizeReport> {
    if grid.iter().any(|x| x.value() >= 0.99) {
        return Err(Error::InvalidInput("verification grid must lie inside [0, 0.99)".into()));
    }
    let k = test.k();
    let alpha = test.artifact.alpha;
    let se = (alpha * (1.0 - alpha) / draws as f64).sqrt();
    let rows = grid
        .iter()
        .enumerate()
        .map(|(p, &xi)| {
            let rejections = (0..draws as u64)
                .into_par_iter()
                .map(|i| {
                    let mut rng = substream(seed, p as u64 * draws as u64 + i, Component::LimitPair);
                    let vminus = sample_normalized(xi, k, &mut rng)?;
                    let vplus = sample_normalized(xi, k, &mut rng)?;
                    Ok(usize::from(test.statistic(&vminus, &vplus)? > test.critical_value()))
                })
                .collect::<Result<Vec<usize>>>()?
                .into_iter()
                .sum::<usize>();
            let rate = rejections as f64 / draws as f64;
            Ok(SizeRow {
                xi: xi.value(),
                rate,
                se,
                flagged: rate > alpha + 2.0 * se,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SizeReport { alpha, draws, rows })
}

/// A calibrated equal-tail test.
#[derive(Debug, Clone)]
pub struct EqualTailTest {
    artifact: CalibrationArtifact,
    alternative: PairWeight,
    lfd: LeastFavorableDistribution,
    proposal: ProposalSample,
    quadrature: QuadratureConfig,
}

impl EqualTailTest {
    /// Runs the least favorable weight iteration on the default alternative
    /// (uniform over ordered grid pairs) and records the artifact.
    pub fn calibrate(
        k: usize,
        alpha: f64,
        points: Vec<TailIndex>,
        settings: &LfdSettings,
        seed: u64,
        q: &QuadratureConfig,
    ) -> Result<(Self, Vec<f64>)> {
        let alternative = PairWeight::uniform_alternative(points)?;
        let cal = calibrate_lfd(k, alpha, &alternative, settings, seed, q)?;
        let artifact = CalibrationArtifact {
            version: ARTIFACT_VERSION,
            kind: TestKind::EqualTail,
            k,
            alpha,
            grid_points: alternative.points().iter().map(|p| p.value()).collect(),
            lambda_masses: Some(cal.lfd.grid.masses().to_vec()),
            cv: cal.lfd.scale,
            mc_draws: settings.draws,
            seed,
        };
        let test = EqualTailTest {
            artifact,
            alternative,
            lfd: cal.lfd,
            proposal: cal.proposal,
            quadrature: *q,
        };
        Ok((test, cal.grid_sizes))
    }

    /// Rebuilds the test from a stored artifact, regenerating the proposal
    /// draws used for p-values.
    pub fn from_artifact(artifact: CalibrationArtifact, q: &QuadratureConfig) -> Result<Self> {
        artifact.validate()?;
        let Some(masses) = artifact.lambda_masses.clone() else {
            return Err(Error::CalibrationMismatch(format!(
                "{} is not an equal-tail calibration",
                artifact.id()
            )));
        };
        let points = artifact.tail_indices()?;
        let alternative = PairWeight::uniform_alternative(points.clone())?;
        let lfd = LeastFavorableDistribution {
            grid: super::weights::WeightGrid::new(points, masses)?,
            scale: artifact.cv,
        };
        let proposal = ProposalSample::simulate(artifact.k, &alternative, artifact.mc_draws, artifact.seed, q)?;
        Ok(EqualTailTest {
            artifact,
            alternative,
            lfd,
            proposal,
            quadrature: *q,
        })
    }

    pub fn artifact(&self) -> &CalibrationArtifact {
        &self.artifact
    }

    pub fn lfd(&self) -> &LeastFavorableDistribution {
        &self.lfd
    }

    pub fn alternative(&self) -> &PairWeight {
        &self.alternative
    }

    pub fn k(&self) -> usize {
        self.artifact.k
    }

    pub fn critical_value(&self) -> f64 {
        self.artifact.cv
    }

    pub fn statistic(&self, vminus: &NormalizedTail, vplus: &NormalizedTail) -> Result<f64> {
        self.check_k(vminus.k())?;
        self.check_k(vplus.k())?;
        equal_tail_statistic(vminus, vplus, &self.alternative, &self.lfd, &self.quadrature)
    }

    /// Decision only.
    pub fn rejects(&self, lower: &SortedTail, upper: &SortedTail) -> Result<bool> {
        let stat = self.statistic(&self_normalize(lower)?, &self_normalize(upper)?)?;
        Ok(stat > self.artifact.cv)
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

/// Tests `xi_lower = xi_upper` against `xi_lower > xi_upper`. `lower` holds
/// the negated smallest residuals, `upper` the largest.
pub fn equal_tail_test(lower: &SortedTail, upper: &SortedTail, test: &EqualTailTest) -> Result<TestResult> {
    test.check_k(lower.k())?;
    test.check_k(upper.k())?;
    let statistic = test.statistic(&self_normalize(lower)?, &self_normalize(upper)?)?;
    let p_value = test.proposal.sup_exceedance(statistic.ln(), test.lfd.grid.masses());
    Ok(TestResult {
        statistic,
        reject: statistic > test.artifact.cv,
        p_value,
        k: test.artifact.k,
        alpha: test.artifact.alpha,
        calibration_id: test.artifact.id(),
        seed: test.artifact.seed,
    })
}
