//! Power of the thin-tail test under the limiting law itself.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evt::{sample_normalized, TailIndex};
use crate::rng::{substream, Component};
use crate::tail_tests::ThinTailTest;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerPoint {
    pub xi: f64,
    pub power: f64,
    pub se: f64,
}

/// Rejection frequency of `test` on `draws` samples of the normalized top-k
/// limit at each tail index. Grid point `p`, draw `i` uses substream
/// `p * draws + i`.
pub fn asymptotic_power_curve(
    test: &ThinTailTest,
    xis: &[TailIndex],
    draws: usize,
    seed: u64,
) -> Result<Vec<PowerPoint>> {
    if draws == 0 {
        return Err(Error::InvalidInput("need at least one draw".into()));
    }
    if let Some(bad) = xis.iter().find(|x| x.value() > 0.99) {
        return Err(Error::InvalidInput(format!("tail index {} outside [0, 0.99]", bad.value())));
    }
    let cv = test.critical_value();
    xis.iter()
        .enumerate()
        .map(|(p, &xi)| {
            let hits = (0..draws as u64)
                .into_par_iter()
                .map(|i| {
                    let mut rng = substream(seed, p as u64 * draws as u64 + i, Component::Limit);
                    let v = sample_normalized(xi, test.k(), &mut rng)?;
                    Ok(usize::from(test.statistic(&v)? > cv))
                })
                .try_reduce(|| 0, |a, b| Ok(a + b))?;
            let power = hits as f64 / draws as f64;
            Ok(PowerPoint {
                xi: xi.value(),
                power,
                se: (power * (1.0 - power) / draws as f64).sqrt(),
            })
        })
        .collect()
}
