//! Persisted calibrations and test outcomes.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::weights::WeightGrid;
use crate::error::{Error, Result};
use crate::evt::TailIndex;

pub const ARTIFACT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestKind {
    ThinTail,
    EqualTail,
}

impl fmt::Display for TestKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TestKind::ThinTail => "thin_tail",
            TestKind::EqualTail => "equal_tail",
        })
    }
}

/// Critical value (and least favorable weight for the equal-tail test) for
/// one `(kind, k, alpha)` combination, with the Monte Carlo settings that
/// produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CalibrationArtifact {
    pub version: u32,
    pub kind: TestKind,
    pub k: usize,
    pub alpha: f64,
    pub grid_points: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_masses: Option<Vec<f64>>,
    pub cv: f64,
    pub mc_draws: usize,
    pub seed: u64,
}

impl CalibrationArtifact {
    pub fn id(&self) -> String {
        artifact_id(self.kind, self.k, self.alpha, self.version)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Artifact(msg));
        if self.version != ARTIFACT_VERSION {
            return bad(format!("unsupported version {}", self.version));
        }
        if self.k < 3 {
            return bad(format!("k must be >= 3, got {}", self.k));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return bad(format!("alpha must lie in (0, 1), got {}", self.alpha));
        }
        if !(self.cv > 0.0 && self.cv.is_finite()) {
            return bad(format!("critical value must be positive, got {}", self.cv));
        }
        self.weight_grid()?;
        match (self.kind, &self.lambda_masses) {
            (TestKind::ThinTail, None) => Ok(()),
            (TestKind::EqualTail, Some(m)) if m.len() == self.grid_points.len() => {
                WeightGrid::new(self.tail_indices()?, m.clone()).map(|_| ())
            }
            (TestKind::ThinTail, Some(_)) => bad("thin-tail artifact carries lambda masses".into()),
            (TestKind::EqualTail, _) => bad("equal-tail artifact needs one lambda mass per grid point".into()),
        }
    }

    pub fn tail_indices(&self) -> Result<Vec<TailIndex>> {
        self.grid_points.iter().map(|&x| TailIndex::new(x)).collect()
    }

    /// Uniform weight over the stored grid.
    pub fn weight_grid(&self) -> Result<WeightGrid> {
        WeightGrid::uniform_on(self.tail_indices()?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("artifact serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let a: CalibrationArtifact =
            serde_json::from_str(text).map_err(|e| Error::Artifact(e.to_string()))?;
        a.validate()?;
        Ok(a)
    }
}

pub fn artifact_id(kind: TestKind, k: usize, alpha: f64, version: u32) -> String {
    format!("{kind}_k{k}_a{alpha}_v{version}")
}

/// Outcome of one test application.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub statistic: f64,
    pub reject: bool,
    pub p_value: f64,
    pub k: usize,
    pub alpha: f64,
    pub calibration_id: String,
    pub seed: u64,
}

/// Directory of calibration artifacts keyed by `(kind, k, alpha, version)`.
#[derive(Debug, Clone)]
pub struct CalibrationStore {
    dir: PathBuf,
}

impl CalibrationStore {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        CalibrationStore { dir: dir.into() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path_for(&self, kind: TestKind, k: usize, alpha: f64) -> PathBuf {
        self.dir.join(format!("{}.json", artifact_id(kind, k, alpha, ARTIFACT_VERSION)))
    }

    /// Writes the artifact through a temporary file and a rename.
    pub fn save(&self, artifact: &CalibrationArtifact) -> std::io::Result<PathBuf> {
        let path = self.path_for(artifact.kind, artifact.k, artifact.alpha);
        write_atomic(&path, artifact.to_json().as_bytes())?;
        Ok(path)
    }

    pub fn load(&self, kind: TestKind, k: usize, alpha: f64) -> Result<CalibrationArtifact> {
        let path = self.path_for(kind, k, alpha);
        let text = fs::read_to_string(&path).map_err(|e| {
            Error::CalibrationMismatch(format!(
                "no calibration for (kind={kind}, k={k}, alpha={alpha}) at {}: {e}",
                path.display()
            ))
        })?;
        let artifact = CalibrationArtifact::from_json(&text)?;
        if artifact.kind != kind || artifact.k != k || artifact.alpha != alpha {
            return Err(Error::CalibrationMismatch(format!(
                "{} holds {} rather than (kind={kind}, k={k}, alpha={alpha})",
                path.display(),
                artifact.id()
            )));
        }
        Ok(artifact)
    }
}

/// Writes `bytes` to a hidden sibling of `path`, then renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = dir.join(format!(".{name}.{}.tmp", std::process::id()));
    let result = (|| {
        let mut file = fs::File::create(&tmp)?;
        file.write_all(bytes)?;
        file.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;

    fn thin() -> CalibrationArtifact {
        CalibrationArtifact {
            version: ARTIFACT_VERSION,
            kind: TestKind::ThinTail,
            k: 20,
            alpha: 0.05,
            grid_points: vec![0.0, 0.33, 0.66, 0.99],
            lambda_masses: None,
            cv: 1.234_567_890_123_456_7,
            mc_draws: 10_000,
            seed: 7,
        }
    }

    #[test]
    fn json_shape() {
        let text = thin().to_json();
        assert!(text.contains("\"kind\": \"thin_tail\""));
        assert!(!text.contains("lambda_masses"));
        assert_eq!(CalibrationArtifact::from_json(&text).unwrap(), thin());
    }

    #[test]
    fn rejects_inconsistent_artifacts() {
        let mut a = thin();
        a.kind = TestKind::EqualTail;
        assert!(CalibrationArtifact::from_json(&a.to_json()).is_err());
        a.lambda_masses = Some(vec![0.25; 4]);
        assert!(CalibrationArtifact::from_json(&a.to_json()).is_ok());
        a.cv = -1.0;
        assert!(CalibrationArtifact::from_json(&a.to_json()).is_err());
        assert!(CalibrationArtifact::from_json("{\"version\": 1}").is_err());
    }

    #[test]
    fn id_format() {
        assert_eq!(thin().id(), "thin_tail_k20_a0.05_v1");
    }
}
