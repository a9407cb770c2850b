use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Shape parameter of the generalized extreme-value family, restricted to
/// the thin (`0`) and heavy (`> 0`) tailed cases.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct TailIndex(f64);

impl TailIndex {
    pub const ZERO: TailIndex = TailIndex(0.0);

    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() && value >= 0.0 {
            Ok(TailIndex(value))
        } else {
            Err(Error::InvalidTailIndex(value))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for TailIndex {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self> {
        TailIndex::new(value)
    }
}

impl From<TailIndex> for f64 {
    fn from(xi: TailIndex) -> f64 {
        xi.0
    }
}

/// The `k` most extreme observations of one tail, largest first.
///
/// Lower tails are stored negated, so the most extreme observation is always
/// `values()[0]` and both tails normalize the same way.
#[derive(Debug, Clone, PartialEq)]
pub struct SortedTail {
    values: Vec<f64>,
}

impl SortedTail {
    /// Wraps an already descending sequence.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InvalidTail(format!(
                "need at least 2 order statistics, got {}",
                values.len()
            )));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidTail(format!("non-finite value {bad}")));
        }
        if let Some(i) = values.windows(2).position(|w| w[0] < w[1]) {
            return Err(Error::InvalidTail(format!(
                "values not descending at position {}: {} < {}",
                i + 1,
                values[i],
                values[i + 1]
            )));
        }
        Ok(SortedTail { values })
    }

    /// The `k` largest elements of `data`, descending.
    pub fn upper(data: &[f64], k: usize) -> Result<Self> {
        Self::new(top_k(data.iter().copied(), k)?)
    }

    /// The `k` smallest elements of `data`, negated, so the minimum comes first.
    pub fn lower(data: &[f64], k: usize) -> Result<Self> {
        Self::new(top_k(data.iter().map(|v| -v), k)?)
    }

    pub fn k(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Applies `a * x + b` to every element (`a > 0` keeps the order).
    pub fn affine(&self, a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0) {
            return Err(Error::InvalidInput(format!("scale must be positive, got {a}")));
        }
        Self::new(self.values.iter().map(|v| a * v + b).collect())
    }
}

fn top_k(data: impl Iterator<Item = f64>, k: usize) -> Result<Vec<f64>> {
    let mut all: Vec<f64> = data.collect();
    if k > all.len() {
        return Err(Error::InvalidInput(format!(
            "k = {k} exceeds the sample size {}",
            all.len()
        )));
    }
    if all.iter().any(|v| v.is_nan()) {
        return Err(Error::InvalidInput("sample contains NaN".into()));
    }
    // stable: ties keep their original index order
    all.sort_by(|a, b| b.total_cmp(a));
    all.truncate(k);
    Ok(all)
}

/// A self-normalized tail: first element exactly 1, last exactly 0, interior
/// weakly decreasing in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedTail {
    values: Vec<f64>,
}

impl NormalizedTail {
    /// Validates a vector that is claimed to be normalized already.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        let k = values.len();
        if k < 2 {
            return Err(Error::InvalidTail(format!("need k >= 2, got {k}")));
        }
        if values[0] != 1.0 || values[k - 1] != 0.0 {
            return Err(Error::InvalidTail(
                "normalized tail must start at 1 and end at 0".into(),
            ));
        }
        if values.windows(2).any(|w| !(w[0] >= w[1])) {
            return Err(Error::InvalidTail("normalized tail must be descending".into()));
        }
        Ok(NormalizedTail { values })
    }

    pub fn k(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }
}

/// Shifts the tail by its smallest retained value and scales by its range.
pub fn self_normalize(tail: &SortedTail) -> Result<NormalizedTail> {
    let v = tail.values();
    let k = v.len();
    let (top, bottom) = (v[0], v[k - 1]);
    let range = top - bottom;
    if !(range > 0.0) {
        return Err(Error::DegenerateTail(top));
    }
    let mut out: Vec<f64> = v.iter().map(|x| ((x - bottom) / range).clamp(0.0, 1.0)).collect();
    out[0] = 1.0;
    out[k - 1] = 0.0;
    Ok(NormalizedTail { values: out })
}
