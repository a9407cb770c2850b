use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evt::TailIndex;

/// Upper end of the default tail-index grid; keeps every alternative in the
/// finite-mean region.
pub const DEFAULT_GRID_MAX: f64 = 0.99;
pub const DEFAULT_GRID_POINTS: usize = 50;

/// Discrete weight over tail indices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightGrid {
    points: Vec<TailIndex>,
    masses: Vec<f64>,
}

impl WeightGrid {
    pub fn new(points: Vec<TailIndex>, masses: Vec<f64>) -> Result<Self> {
        if points.is_empty() || points.len() != masses.len() {
            return Err(Error::InvalidInput(format!(
                "weight grid needs matching non-empty points and masses ({} vs {})",
                points.len(),
                masses.len()
            )));
        }
        if points.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidInput("grid points must be strictly ascending".into()));
        }
        if points.iter().any(|p| p.value() > DEFAULT_GRID_MAX) {
            return Err(Error::InvalidInput(format!(
                "grid points must lie in [0, {DEFAULT_GRID_MAX}]"
            )));
        }
        if masses.iter().any(|m| !(m.is_finite() && *m >= 0.0)) {
            return Err(Error::InvalidInput("masses must be finite and non-negative".into()));
        }
        let total: f64 = masses.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidInput(format!("masses sum to {total}, not 1")));
        }
        Ok(WeightGrid { points, masses })
    }

    /// Uniform masses on `points`.
    pub fn uniform_on(points: Vec<TailIndex>) -> Result<Self> {
        let n = points.len();
        Self::new(points, vec![1.0 / n as f64; n])
    }

    /// Uniform masses on `n` equally spaced points of `[0, max]`.
    pub fn uniform(n: usize, max: f64) -> Result<Self> {
        Self::uniform_on(equal_grid(n, max)?)
    }

    pub fn points(&self) -> &[TailIndex] {
        &self.points
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

impl Default for WeightGrid {
    fn default() -> Self {
        WeightGrid::uniform(DEFAULT_GRID_POINTS, DEFAULT_GRID_MAX).expect("default grid is valid")
    }
}

/// `n` equally spaced points on `[0, max]` (`n >= 2`).
pub fn equal_grid(n: usize, max: f64) -> Result<Vec<TailIndex>> {
    if n < 2 || !(max > 0.0) {
        return Err(Error::InvalidInput(format!("cannot build a {n}-point grid on [0, {max}]")));
    }
    (0..n)
        .map(|j| TailIndex::new(if j + 1 == n { max } else { max * j as f64 / (n - 1) as f64 }))
        .collect()
}

/// Weight over pairs `(xi_minus, xi_plus)` of grid points.
///
/// `mass(i, j)` is the weight on `(points[i], points[j])`, the first index
/// belonging to the lower tail.
#[derive(Debug, Clone, PartialEq)]
pub struct PairWeight {
    points: Vec<TailIndex>,
    entries: Vec<(usize, usize, f64)>,
}

impl PairWeight {
    pub fn new(points: Vec<TailIndex>, entries: Vec<(usize, usize, f64)>) -> Result<Self> {
        let n = points.len();
        if entries.iter().any(|&(i, j, m)| i >= n || j >= n || !(m >= 0.0 && m.is_finite())) {
            return Err(Error::InvalidInput("pair weight entry out of range".into()));
        }
        let total: f64 = entries.iter().map(|e| e.2).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidInput(format!("pair masses sum to {total}, not 1")));
        }
        Ok(PairWeight { points, entries })
    }

    /// Uniform over every grid pair with `xi_plus < xi_minus`.
    pub fn uniform_alternative(points: Vec<TailIndex>) -> Result<Self> {
        let n = points.len();
        let pairs = n * (n - 1) / 2;
        if pairs == 0 {
            return Err(Error::InvalidInput("need at least two grid points".into()));
        }
        let m = 1.0 / pairs as f64;
        let entries = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .filter(|&(i, j)| points[j] < points[i])
            .map(|(i, j)| (i, j, m))
            .collect();
        Self::new(points, entries)
    }

    pub fn points(&self) -> &[TailIndex] {
        &self.points
    }

    pub fn entries(&self) -> &[(usize, usize, f64)] {
        &self.entries
    }
}

/// Mixing weight over the composite null together with the critical value
/// that accompanies it.
#[derive(Debug, Clone, PartialEq)]
pub struct LeastFavorableDistribution {
    pub grid: WeightGrid,
    pub scale: f64,
}

impl LeastFavorableDistribution {
    /// Builds `(Λ, c)` from unnormalized masses `μ = c Λ`.
    pub fn from_scaled(points: Vec<TailIndex>, scaled: &[f64]) -> Result<Self> {
        let scale: f64 = scaled.iter().sum();
        if !(scale > 0.0) {
            return Err(Error::InvalidInput("least favorable masses are all zero".into()));
        }
        let masses = scaled.iter().map(|m| m / scale).collect();
        Ok(LeastFavorableDistribution {
            grid: WeightGrid::new(points, masses)?,
            scale,
        })
    }

    /// `c Λ_j` for every grid point.
    pub fn scaled_masses(&self) -> Vec<f64> {
        self.grid.masses().iter().map(|m| m * self.scale).collect()
    }
}
