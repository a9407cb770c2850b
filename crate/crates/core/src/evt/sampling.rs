//! Exact draws from the limiting top-`k` law.
//!
//! With `Γ_j` the `j`-th arrival time of a unit-rate Poisson process the
//! vector `((Γ_j^-xi - 1) / xi)_{j=1..k}` (or `-log Γ_j` when `xi = 0`) has
//! the joint density of the `k` largest normalized order statistics.

use rand::Rng;
use rand_distr::{Distribution, Exp1};

use super::tail::{self_normalize, NormalizedTail, SortedTail, TailIndex};
use crate::error::{Error, Result};

/// One draw of the limiting top-`k` vector, strictly descending.
pub fn sample_topk<R: Rng + ?Sized>(xi: TailIndex, k: usize, rng: &mut R) -> Vec<f64> {
    let xi = xi.value();
    let mut arrival = 0.0;
    (0..k)
        .map(|_| {
            let e: f64 = Exp1.sample(rng);
            arrival += e;
            let log_arrival = arrival.ln();
            if xi == 0.0 {
                -log_arrival
            } else {
                (-xi * log_arrival).exp_m1() / xi
            }
        })
        .collect()
}

/// One draw of the self-normalized limiting vector.
pub fn sample_normalized<R: Rng + ?Sized>(
    xi: TailIndex,
    k: usize,
    rng: &mut R,
) -> Result<NormalizedTail> {
    if k < 3 {
        return Err(Error::InvalidInput(format!("k must be >= 3, got {k}")));
    }
    self_normalize(&SortedTail::new(sample_topk(xi, k, rng))?)
}
