//! Density of the self-normalized top-`k` vector under the limiting law:
//!
//! ```text
//! f(v* | xi) = Γ(k) ∫_0^∞ t^(k-2) exp(-(1 + 1/xi) Σ_i log(1 + xi v*_i t)) dt
//! ```
//!
//! with the `xi -> 0` limit `Γ(k) Γ(k-1) / (Σ_i v*_i)^(k-1)`.
//!
//! The integral is centred on the mode `c` of the integrand in `log t`,
//! mapped to `(0, 1)` through `t = c (s / (1 - s))^p` with `p <= 1` matched
//! to the width of the peak, and evaluated in the log domain
//! relative to the modal value, so neither large `k` nor small densities
//! overflow.

use statrs::function::gamma::ln_gamma;

use super::quadrature::{integrate, QuadratureConfig};
use super::tail::{NormalizedTail, TailIndex};
use crate::error::{Error, Result};

// products of at most this many factors (1 + xi v t) are formed before taking a log
const LOG_CHUNK: usize = 8;

/// `log f(v* | xi)`.
pub fn log_normalized_density(
    xi: TailIndex,
    vstar: &NormalizedTail,
    q: &QuadratureConfig,
) -> Result<f64> {
    Prepared::new(vstar)?.log_density(xi, q)
}

/// `f(v* | xi)`.
pub fn normalized_density(
    xi: TailIndex,
    vstar: &NormalizedTail,
    q: &QuadratureConfig,
) -> Result<f64> {
    log_normalized_density(xi, vstar, q).map(f64::exp)
}

/// `log f(v* | xi)` for every tail index in `points`.
pub fn log_density_profile(
    points: &[TailIndex],
    vstar: &NormalizedTail,
    q: &QuadratureConfig,
) -> Result<Vec<f64>> {
    let prepared = Prepared::new(vstar)?;
    points.iter().map(|&xi| prepared.log_density(xi, q)).collect()
}

/// Per-observation quantities shared by every `xi`.
struct Prepared {
    k: usize,
    /// strictly positive coordinates; zeros contribute nothing to the integrand
    positive: Vec<f64>,
    sum: f64,
    ln_gamma_k: f64,
}

impl Prepared {
    fn new(vstar: &NormalizedTail) -> Result<Self> {
        let k = vstar.k();
        if k < 3 {
            return Err(Error::InvalidTail(format!(
                "the normalized density needs k >= 3, got {k}"
            )));
        }
        let positive: Vec<f64> = vstar.values().iter().copied().filter(|&v| v > 0.0).collect();
        Ok(Prepared {
            k,
            sum: positive.iter().sum(),
            positive,
            ln_gamma_k: ln_gamma(k as f64),
        })
    }

    fn log_density(&self, xi: TailIndex, q: &QuadratureConfig) -> Result<f64> {
        let xi = xi.value();
        let km1 = (self.k - 1) as f64;
        if xi < q.xi_zero_threshold {
            return Ok(self.ln_gamma_k + ln_gamma(km1) - km1 * self.sum.ln());
        }
        let power = 1.0 + 1.0 / xi;
        let log_terms = |t: f64| -> f64 {
            let mut total = 0.0;
            for chunk in self.positive.chunks(LOG_CHUNK) {
                let prod: f64 = chunk.iter().map(|&v| 1.0 + xi * v * t).product();
                total += prod.ln();
            }
            total
        };

        let (centre, curvature) = self.mode(xi);
        let ln_centre = centre.ln();
        let reference = km1 * ln_centre - power * log_terms(centre);
        // ln t = ln c + p logit(s): p shrinks with the width of the peak in ln t
        let stretch = (2.0 / curvature.sqrt()).min(1.0);
        let ln_stretch = stretch.ln();
        let integrand = |s: f64| -> f64 {
            if s <= 0.0 || s >= 1.0 {
                return 0.0;
            }
            let (ln_s, ln_1ms) = (s.ln(), (-s).ln_1p());
            let ln_t = ln_centre + stretch * (ln_s - ln_1ms);
            let log_value =
                km1 * ln_t - power * log_terms(ln_t.exp()) + ln_stretch - ln_s - ln_1ms - reference;
            log_value.exp()
        };
        let est = integrate(integrand, 0.0, 1.0, q)?;
        if !(est.value > 0.0) {
            return Err(Error::QuadratureFailure {
                estimate: est.value,
                error: est.error,
                subdivisions: est.subdivisions,
            });
        }
        Ok(self.ln_gamma_k + reference + est.value.ln())
    }

    /// Mode of `t^(k-1) Π (1 + xi v t)^-(1 + 1/xi)` (the integrand in `log t`)
    /// and minus the second derivative of its log there, found by Newton's
    /// method on the concave log integrand.
    fn mode(&self, xi: f64) -> (f64, f64) {
        let km1 = (self.k - 1) as f64;
        let mut u = (km1 / self.sum).ln();
        let mut curv = -km1;
        for _ in 0..50 {
            let t = u.exp();
            let (mut g, mut h) = (0.0, 0.0);
            for &v in &self.positive {
                let r = v * t / (1.0 + xi * v * t);
                g += r;
                h += r / (1.0 + xi * v * t);
            }
            let grad = km1 - (1.0 + xi) * g;
            curv = -(1.0 + xi) * h;
            let step = grad / curv;
            u -= step.clamp(-2.0, 2.0);
            if step.abs() < 1e-10 {
                break;
            }
        }
        (u.exp(), -curv)
    }
}
