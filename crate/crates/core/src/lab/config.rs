//! Declarative scenario files (JSON).
//!
//! ```json
//! {"scenarios": [{"id": "t2-hn", "noise": {"family": "student_t", "df": 2},
//!   "inefficiency": {"family": "half_normal", "sd": 1}, "n": 1000, "k": 50,
//!   "test": "thin_tail_right", "replications": 1000, "seed": 7}]}
//! ```

use serde::{Deserialize, Serialize};

use super::scenario::{ScenarioSpec, DEFAULT_REPLICATIONS};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioEntry {
    #[serde(flatten)]
    pub spec: ScenarioSpec,
    #[serde(default = "default_replications")]
    pub replications: usize,
    #[serde(default)]
    pub seed: u64,
}

fn default_replications() -> usize {
    DEFAULT_REPLICATIONS
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub scenarios: Vec<ScenarioEntry>,
}

impl ScenarioFile {
    pub fn from_json(text: &str) -> Result<Self> {
        let file: ScenarioFile =
            serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("scenario file: {e}")))?;
        for entry in &file.scenarios {
            entry
                .spec
                .validate()
                .map_err(|e| Error::InvalidInput(format!("scenario {:?}: {e}", entry.spec.id)))?;
        }
        Ok(file)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lab::ScenarioTest;

    #[test]
    fn parses_with_defaults() {
        let text = r#"{"scenarios": [
            {"id": "a", "noise": {"family": "normal", "mean": 0, "sd": 1},
             "inefficiency": {"family": "pareto", "xi": 0.75}, "n": 1000, "k": 50,
             "test": "equal_tail", "seed": 3},
            {"id": "b", "noise": {"family": "laplace", "location": 0, "scale": 1},
             "inefficiency": {"family": "half_laplace", "scale": 1}, "n": 100, "k": 10,
             "test": "thin_tail_left_normal_family", "replications": 50, "covariates": true}
        ]}"#;
        let f = ScenarioFile::from_json(text).unwrap();
        assert_eq!(f.scenarios.len(), 2);
        assert_eq!(f.scenarios[0].replications, 1000);
        assert_eq!(f.scenarios[0].spec.test, ScenarioTest::EqualTail);
        assert_eq!(f.scenarios[1].seed, 0);
        assert!(f.scenarios[1].spec.covariates);
    }

    #[test]
    fn rejects_bad_entries() {
        let bad_family = r#"{"scenarios": [{"id": "a", "noise": {"family": "cauchy"},
            "inefficiency": {"family": "half_normal", "sd": 1}, "n": 100, "k": 10, "test": "equal_tail"}]}"#;
        assert!(ScenarioFile::from_json(bad_family).is_err());
        let bad_k = r#"{"scenarios": [{"id": "a", "noise": {"family": "student_t", "df": 2},
            "inefficiency": {"family": "half_normal", "sd": 1}, "n": 100, "k": 60, "test": "equal_tail"}]}"#;
        assert!(ScenarioFile::from_json(bad_k).is_err());
    }
}
