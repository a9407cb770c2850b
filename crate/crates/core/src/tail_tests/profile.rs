use crate::error::Result;
use crate::evt::{log_density_profile, log_normalized_density, NormalizedTail, QuadratureConfig, TailIndex};

/// Log densities of one normalized tail over a tail-index grid, plus the
/// thin-tail (`xi = 0`) value used as the reference.
#[derive(Debug, Clone, PartialEq)]
pub struct TailProfile {
    pub log_null: f64,
    pub log_density: Vec<f64>,
}

impl TailProfile {
    pub fn compute(vstar: &NormalizedTail, points: &[TailIndex], q: &QuadratureConfig) -> Result<Self> {
        let log_density = log_density_profile(points, vstar, q)?;
        let log_null = match points.first() {
            Some(p) if p.value() == 0.0 => log_density[0],
            _ => log_normalized_density(TailIndex::ZERO, vstar, q)?,
        };
        Ok(TailProfile { log_null, log_density })
    }
}

/// `log Σ exp(x_i)` over the finite terms; `-inf` when there are none.
pub(crate) fn log_sum_exp(terms: impl Iterator<Item = f64> + Clone) -> f64 {
    let max = terms.clone().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + terms.map(|t| (t - max).exp()).sum::<f64>().ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lse_matches_direct_sum() {
        let xs = [0.1f64, -3.0, 2.5];
        let direct = xs.iter().map(|x| x.exp()).sum::<f64>().ln();
        assert!((log_sum_exp(xs.iter().copied()) - direct).abs() < 1e-14);
        assert_eq!(log_sum_exp(std::iter::empty()), f64::NEG_INFINITY);
        assert!((log_sum_exp([1000.0, 1000.0].into_iter()) - (1000.0 + 2f64.ln())).abs() < 1e-12);
    }
}
