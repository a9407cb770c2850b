//! Error-component distributions.

use rand::Rng;
use rand_distr::{Distribution, Exp1, FisherF, Pareto, StandardNormal, StudentT};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Distribution of a noise or inefficiency draw. Pareto is parameterized by
/// its tail index: survival `x^(-1/xi)` on `x >= 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum DistributionSpec {
    Normal { mean: f64, sd: f64 },
    Laplace { location: f64, scale: f64 },
    StudentT { df: f64 },
    Pareto { xi: f64 },
    FisherF { d1: f64, d2: f64 },
    HalfNormal { sd: f64 },
    HalfLaplace { scale: f64 },
    HalfStudentT { df: f64 },
    /// The wrapped nonnegative draw times an independent fair sign.
    SignSymmetrized { wrapped: Box<DistributionSpec> },
}

impl DistributionSpec {
    pub fn standard_normal() -> Self {
        DistributionSpec::Normal { mean: 0.0, sd: 1.0 }
    }

    pub fn standard_laplace() -> Self {
        DistributionSpec::Laplace { location: 0.0, scale: 1.0 }
    }

    pub fn student_t(df: f64) -> Self {
        DistributionSpec::StudentT { df }
    }

    pub fn pareto(xi: f64) -> Self {
        DistributionSpec::Pareto { xi }
    }

    pub fn fisher_f(d1: f64, d2: f64) -> Self {
        DistributionSpec::FisherF { d1, d2 }
    }

    pub fn half_normal() -> Self {
        DistributionSpec::HalfNormal { sd: 1.0 }
    }

    pub fn half_laplace() -> Self {
        DistributionSpec::HalfLaplace { scale: 1.0 }
    }

    pub fn half_student_t(df: f64) -> Self {
        DistributionSpec::HalfStudentT { df }
    }

    pub fn sign_symmetrized(wrapped: DistributionSpec) -> Self {
        DistributionSpec::SignSymmetrized {
            wrapped: Box::new(wrapped),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidInput(format!("{name} must be positive and finite, got {v}")))
            }
        };
        match self {
            DistributionSpec::Normal { mean, sd } => {
                if !mean.is_finite() {
                    return Err(Error::InvalidInput(format!("mean must be finite, got {mean}")));
                }
                positive("sd", *sd)
            }
            DistributionSpec::Laplace { location, scale } => {
                if !location.is_finite() {
                    return Err(Error::InvalidInput(format!("location must be finite, got {location}")));
                }
                positive("scale", *scale)
            }
            DistributionSpec::StudentT { df } | DistributionSpec::HalfStudentT { df } => positive("df", *df),
            DistributionSpec::Pareto { xi } => {
                if *xi > 0.0 && *xi < 1.0 {
                    Ok(())
                } else {
                    Err(Error::InvalidInput(format!("Pareto tail index must lie in (0, 1), got {xi}")))
                }
            }
            DistributionSpec::FisherF { d1, d2 } => positive("d1", *d1).and(positive("d2", *d2)),
            DistributionSpec::HalfNormal { sd } => positive("sd", *sd),
            DistributionSpec::HalfLaplace { scale } => positive("scale", *scale),
            DistributionSpec::SignSymmetrized { wrapped } => {
                wrapped.validate()?;
                if !wrapped.is_nonnegative() {
                    return Err(Error::InvalidInput(
                        "sign symmetrization needs a nonnegative wrapped distribution".into(),
                    ));
                }
                Ok(())
            }
        }
    }

    /// Whether every draw is `>= 0`.
    pub fn is_nonnegative(&self) -> bool {
        matches!(
            self,
            DistributionSpec::Pareto { .. }
                | DistributionSpec::FisherF { .. }
                | DistributionSpec::HalfNormal { .. }
                | DistributionSpec::HalfLaplace { .. }
                | DistributionSpec::HalfStudentT { .. }
        )
    }

    /// Extreme value index of the right tail.
    pub fn tail_index(&self) -> f64 {
        match self {
            DistributionSpec::Normal { .. }
            | DistributionSpec::Laplace { .. }
            | DistributionSpec::HalfNormal { .. }
            | DistributionSpec::HalfLaplace { .. } => 0.0,
            DistributionSpec::StudentT { df } | DistributionSpec::HalfStudentT { df } => 1.0 / df,
            DistributionSpec::Pareto { xi } => *xi,
            DistributionSpec::FisherF { d2, .. } => 2.0 / d2,
            DistributionSpec::SignSymmetrized { wrapped } => wrapped.tail_index(),
        }
    }

    /// Short label such as `t(2)` or `±Pa(0.5)`.
    pub fn label(&self) -> String {
        match self {
            DistributionSpec::Normal { mean, sd } => format!("N({mean},{sd})"),
            DistributionSpec::Laplace { location, scale } => format!("La({location},{scale})"),
            DistributionSpec::StudentT { df } => format!("t({df})"),
            DistributionSpec::Pareto { xi } => format!("Pa({xi})"),
            DistributionSpec::FisherF { d1, d2 } => format!("F({d1},{d2})"),
            DistributionSpec::HalfNormal { sd } => format!("half-N(0,{sd})"),
            DistributionSpec::HalfLaplace { scale } => format!("half-La(0,{scale})"),
            DistributionSpec::HalfStudentT { df } => format!("half-t({df})"),
            DistributionSpec::SignSymmetrized { wrapped } => format!("±{}", wrapped.label()),
        }
    }

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            DistributionSpec::Normal { mean, sd } => mean + sd * rng.sample::<f64, _>(StandardNormal),
            DistributionSpec::Laplace { location, scale } => location + scale * signed_exp(rng),
            DistributionSpec::StudentT { df } => student_t(*df, rng),
            DistributionSpec::Pareto { xi } => Pareto::new(1.0, 1.0 / xi).expect("validated").sample(rng),
            DistributionSpec::FisherF { d1, d2 } => FisherF::new(*d1, *d2).expect("validated").sample(rng),
            DistributionSpec::HalfNormal { sd } => sd * rng.sample::<f64, _>(StandardNormal).abs(),
            DistributionSpec::HalfLaplace { scale } => scale * rng.sample::<f64, _>(Exp1),
            DistributionSpec::HalfStudentT { df } => student_t(*df, rng).abs(),
            DistributionSpec::SignSymmetrized { wrapped } => {
                let x = wrapped.draw(rng);
                if rng.random::<bool>() {
                    x
                } else {
                    -x
                }
            }
        }
    }
}

fn signed_exp<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let e: f64 = rng.sample(Exp1);
    if rng.random::<bool>() {
        e
    } else {
        -e
    }
}

fn student_t<R: Rng + ?Sized>(df: f64, rng: &mut R) -> f64 {
    StudentT::new(df).expect("validated").sample(rng)
}

/// `n` independent draws from `spec`.
pub fn sample_distribution<R: Rng + ?Sized>(spec: &DistributionSpec, n: usize, rng: &mut R) -> Result<Vec<f64>> {
    spec.validate()?;
    Ok((0..n).map(|_| spec.draw(rng)).collect())
}
