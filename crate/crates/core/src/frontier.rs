//! Frontier regression: OLS fit of the frontier equation, oriented residual
//! tails, the residual skewness pre-check and the per-group diagnostic
//! pipeline.

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evt::SortedTail;
use crate::tail_tests::{thin_tail_test, TestResult, ThinTailTest};

/// Relative singular value below which the design counts as rank deficient.
pub const RANK_TOLERANCE: f64 = 1e-10;

/// Default tail sizes for the empirical pipeline.
pub const DEFAULT_DIAGNOSTIC_KS: [usize; 4] = [25, 50, 75, 100];

/// Response, design (first column the intercept) and optional group labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    response: DVector<f64>,
    design: DMatrix<f64>,
    groups: Option<Vec<String>>,
}

impl Dataset {
    pub fn new(response: Vec<f64>, design: DMatrix<f64>, groups: Option<Vec<String>>) -> Result<Self> {
        let n = response.len();
        if design.nrows() != n {
            return Err(Error::InvalidInput(format!(
                "design has {} rows but the response has {n}",
                design.nrows()
            )));
        }
        if design.ncols() == 0 || design.column(0).iter().any(|&v| v != 1.0) {
            return Err(Error::InvalidInput("first design column must be the constant 1".into()));
        }
        if n <= design.ncols() {
            return Err(Error::InvalidInput(format!(
                "need more observations ({n}) than regressors ({})",
                design.ncols()
            )));
        }
        if response.iter().chain(design.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("data contain non-finite values".into()));
        }
        if let Some(g) = &groups {
            if g.len() != n {
                return Err(Error::InvalidInput(format!("{} group labels for {n} rows", g.len())));
            }
        }
        Ok(Dataset {
            response: DVector::from_vec(response),
            design,
            groups,
        })
    }

    /// Builds the design from an intercept plus the given regressor columns.
    pub fn with_intercept(response: Vec<f64>, regressors: &[Vec<f64>], groups: Option<Vec<String>>) -> Result<Self> {
        let n = response.len();
        if let Some(bad) = regressors.iter().find(|c| c.len() != n) {
            return Err(Error::InvalidInput(format!(
                "regressor column has {} rows but the response has {n}",
                bad.len()
            )));
        }
        let design = DMatrix::from_fn(n, regressors.len() + 1, |i, j| if j == 0 { 1.0 } else { regressors[j - 1][i] });
        Self::new(response, design, groups)
    }

    pub fn n(&self) -> usize {
        self.response.len()
    }

    pub fn response(&self) -> &DVector<f64> {
        &self.response
    }

    pub fn design(&self) -> &DMatrix<f64> {
        &self.design
    }

    /// Row indices per group label, labels in ascending order. Without
    /// labels the whole sample forms one group named `"all"`.
    pub fn group_rows(&self) -> BTreeMap<String, Vec<usize>> {
        let mut out: BTreeMap<String, Vec<usize>> = BTreeMap::new();
        match &self.groups {
            Some(labels) => {
                for (i, g) in labels.iter().enumerate() {
                    out.entry(g.clone()).or_default().push(i);
                }
            }
            None => {
                out.insert("all".to_string(), (0..self.n()).collect());
            }
        }
        out
    }

    /// The sub-sample with the given rows (no group labels).
    pub fn subset(&self, rows: &[usize]) -> Result<Dataset> {
        let response = rows.iter().map(|&i| self.response[i]).collect();
        let design = self.design.select_rows(rows);
        Dataset::new(response, design, None)
    }

    /// `a Y + b`, leaving the design untouched.
    pub fn transform_response(&self, a: f64, b: f64) -> Dataset {
        Dataset {
            response: self.response.map(|y| a * y + b),
            design: self.design.clone(),
            groups: self.groups.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegressionFit {
    pub beta: DVector<f64>,
    pub residuals: Vec<f64>,
    /// Ratio of the largest to the smallest singular value of the design.
    pub condition: f64,
}

/// Least squares through the singular value decomposition of the design.
pub fn ols_fit(data: &Dataset) -> Result<RegressionFit> {
    let x = data.design();
    let svd = x.clone().svd(true, true);
    let max = svd.singular_values.max();
    let min = svd.singular_values.min();
    if !(max > 0.0) || min / max < RANK_TOLERANCE {
        return Err(Error::RankDeficient(if max > 0.0 { min / max } else { 0.0 }));
    }
    let beta = svd
        .solve(data.response(), 0.0)
        .map_err(|e| Error::InvalidInput(e.to_string()))?;
    let fitted = x * &beta;
    let residuals = data.response().iter().zip(fitted.iter()).map(|(y, f)| y - f).collect();
    Ok(RegressionFit {
        beta,
        residuals,
        condition: max / min,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    /// `Y = X'β + W - U`.
    Production,
    /// `Y = X'β + W + U`: residuals are negated before the tails are taken.
    Cost,
}

impl Orientation {
    pub fn sign(self) -> f64 {
        match self {
            Orientation::Production => 1.0,
            Orientation::Cost => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailSide {
    Left,
    Right,
}

impl fmt::Display for TailSide {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TailSide::Left => "left",
            TailSide::Right => "right",
        })
    }
}

/// Upper tail (largest oriented residuals) and lower tail (smallest oriented
/// residuals, negated) of size `k`.
pub fn residual_tails(residuals: &[f64], orientation: Orientation, k: usize) -> Result<(SortedTail, SortedTail)> {
    if k < 2 || 2 * k > residuals.len() {
        return Err(Error::InvalidInput(format!(
            "tail size k = {k} must satisfy 2 <= k <= n/2 with n = {}",
            residuals.len()
        )));
    }
    let oriented: Vec<f64> = residuals.iter().map(|e| orientation.sign() * e).collect();
    Ok((SortedTail::upper(&oriented, k)?, SortedTail::lower(&oriented, k)?))
}

/// Sample skewness `m3 / m2^(3/2)` of the residuals (central moments with
/// divisor `n`).
pub fn residual_skewness(residuals: &[f64]) -> Result<f64> {
    let n = residuals.len();
    if n < 3 {
        return Err(Error::InvalidInput(format!("skewness needs n >= 3, got {n}")));
    }
    let mean = residuals.iter().sum::<f64>() / n as f64;
    let (m2, m3) = residuals.iter().fold((0.0, 0.0), |(a, b), e| {
        let d = e - mean;
        (a + d * d, b + d * d * d)
    });
    let (m2, m3) = (m2 / n as f64, m3 / n as f64);
    if m2 <= 0.0 {
        return Err(Error::ZeroVariance);
    }
    Ok(m3 / m2.powf(1.5))
}

/// One line of the diagnostic table.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticRow {
    pub group: String,
    pub k: usize,
    pub tail: TailSide,
    pub result: TestResult,
}

/// All rows for one group, or the error that stopped it.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupDiagnostic {
    pub group: String,
    pub skewness: Option<f64>,
    pub outcome: Result<Vec<DiagnosticRow>>,
}

/// Which tails to test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailSelection {
    Left,
    Right,
    Both,
}

impl TailSelection {
    fn sides(self) -> &'static [TailSide] {
        match self {
            TailSelection::Left => &[TailSide::Left],
            TailSelection::Right => &[TailSide::Right],
            TailSelection::Both => &[TailSide::Left, TailSide::Right],
        }
    }
}

/// Fits the frontier on the given rows and runs the thin-tail test on each
/// requested tail for every calibrated `k`.
pub fn diagnose_group(
    label: &str,
    data: &Dataset,
    rows: &[usize],
    orientation: Orientation,
    tests: &BTreeMap<usize, ThinTailTest>,
    tails: TailSelection,
) -> GroupDiagnostic {
    let mut skewness = None;
    let outcome = (|| {
        if rows.is_empty() {
            return Err(Error::InvalidInput(format!("group {label:?} is empty")));
        }
        let fit = ols_fit(&data.subset(rows)?)?;
        skewness = residual_skewness(&fit.residuals).ok();
        let mut out = Vec::new();
        for (&k, test) in tests {
            let (upper, lower) = residual_tails(&fit.residuals, orientation, k)?;
            for &side in tails.sides() {
                let tail = match side {
                    TailSide::Left => &lower,
                    TailSide::Right => &upper,
                };
                out.push(DiagnosticRow {
                    group: label.to_string(),
                    k,
                    tail: side,
                    result: thin_tail_test(tail, test)?,
                });
            }
        }
        Ok(out)
    })();
    GroupDiagnostic {
        group: label.to_string(),
        skewness,
        outcome,
    }
}

/// Runs [`diagnose_group`] on every group; a failing group does not stop
/// the others. Output is ordered by group label, then `k`, then tail.
pub fn run_frontier_diagnostic(
    data: &Dataset,
    orientation: Orientation,
    tests: &BTreeMap<usize, ThinTailTest>,
    tails: TailSelection,
) -> Vec<GroupDiagnostic> {
    data.group_rows()
        .iter()
        .map(|(label, rows)| diagnose_group(label, data, rows, orientation, tests, tails))
        .collect()
}

/// Table-style p-value: values above 0.1 shown as `>0.1` when `censor` is set.
pub fn format_p_value(p: f64, censor: bool) -> String {
    if censor && p > 0.1 {
        ">0.1".to_string()
    } else {
        format!("{p:.4}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn exact_line() {
        let x = vec![0.0, 1.0, 2.0, 3.0];
        let y: Vec<f64> = x.iter().map(|v| 2.0 + 3.0 * v).collect();
        let fit = ols_fit(&Dataset::with_intercept(y, &[x], None).unwrap()).unwrap();
        assert_relative_eq!(fit.beta[0], 2.0, epsilon = 1e-12);
        assert_relative_eq!(fit.beta[1], 3.0, epsilon = 1e-12);
        assert!(fit.residuals.iter().all(|e| e.abs() < 1e-12));
    }

    #[test]
    fn three_point_fit() {
        let data = Dataset::with_intercept(vec![0.0, 1.0, 3.0], &[vec![0.0, 1.0, 2.0]], None).unwrap();
        let fit = ols_fit(&data).unwrap();
        assert_relative_eq!(fit.beta[0], -1.0 / 6.0, epsilon = 1e-14);
        assert_relative_eq!(fit.beta[1], 1.5, epsilon = 1e-14);
        for (e, want) in fit.residuals.iter().zip([1.0 / 6.0, -1.0 / 3.0, 1.0 / 6.0]) {
            assert_relative_eq!(*e, want, epsilon = 1e-14);
        }
    }

    #[test]
    fn duplicated_column_is_rank_deficient() {
        let x = vec![0.5, 1.0, 2.0, 4.0, 3.0];
        let data = Dataset::with_intercept(vec![1.0, 2.0, 3.0, 4.0, 6.0], &[x.clone(), x], None).unwrap();
        assert!(matches!(ols_fit(&data), Err(Error::RankDeficient(_))));
    }

    #[test]
    fn tails_and_orientation() {
        let e = [-3.0, -1.0, 0.0, 2.0, 5.0];
        let (up, lo) = residual_tails(&e, Orientation::Production, 2).unwrap();
        assert_eq!(up.values(), &[5.0, 2.0]);
        assert_eq!(lo.values(), &[3.0, 1.0]);
        let (up_c, lo_c) = residual_tails(&e, Orientation::Cost, 2).unwrap();
        assert_eq!(up_c, lo);
        assert_eq!(lo_c, up);
        assert!(residual_tails(&e, Orientation::Production, 3).is_err());
    }

    #[test]
    fn skewness_cases() {
        assert_eq!(residual_skewness(&[-1.0, 0.0, 1.0]).unwrap(), 0.0);
        assert_eq!(residual_skewness(&[0.0, 0.0, 0.0]), Err(Error::ZeroVariance));
        // m2 = 3/2, m3 = -3/2
        assert_relative_eq!(
            residual_skewness(&[-2.0, 0.0, 1.0, 1.0]).unwrap(),
            -0.816_496_580_927_726,
            max_relative = 1e-14
        );
    }

    #[test]
    fn censored_display() {
        assert_eq!(format_p_value(0.25, true), ">0.1");
        assert_eq!(format_p_value(0.25, false), "0.2500");
        assert_eq!(format_p_value(0.03, true), "0.0300");
    }

    #[test]
    fn design_validation() {
        let bad = DMatrix::from_row_slice(3, 1, &[2.0, 1.0, 1.0]);
        assert!(Dataset::new(vec![1.0, 2.0, 3.0], bad, None).is_err());
        assert!(Dataset::with_intercept(vec![1.0, f64::NAN, 3.0], &[], None).is_err());
        assert!(Dataset::with_intercept(vec![1.0], &[], None).is_err());
    }
}
