use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::Serialize;

use frontier_tails::evt::normalized_density;
use frontier_tails::frontier::{format_p_value, run_frontier_diagnostic, Orientation, TailSelection};
use frontier_tails::lab::{
    asymptotic_power_curve, preset, run_scenario, Calibrations, ScenarioEntry, ScenarioFile, ScenarioTest,
    DEFAULT_REPLICATIONS,
};
use frontier_tails::tail_tests::{
    equal_grid, CalibrationStore, EqualTailTest, LfdSettings, TestKind, ThinTailTest, WeightGrid, DEFAULT_GRID_MAX,
    DEFAULT_GRID_POINTS,
};
use frontier_tails::{NormalizedTail, QuadratureConfig, TailIndex};

use crate::failure::{CliResult, Failure};
use crate::input::{read_dataset, Columns};
use crate::manifest::{emit, manifest_path, RunManifest};
use crate::{CalibrateArgs, DensityArgs, KindArg, OrientationArg, PowerArgs, SimulateArgs, TailsArg, TestArgs};

fn check_alpha(alpha: f64) -> CliResult<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Failure::usage(format!("--alpha must lie in (0, 1), got {alpha}")))
    }
}

fn check_ks(ks: &[usize]) -> CliResult<()> {
    match ks.iter().find(|&&k| k < 3) {
        Some(k) => Err(Failure::usage(format!("k must be >= 3, got {k}"))),
        None => Ok(()),
    }
}

fn tail_indices(xs: &[f64]) -> CliResult<Vec<TailIndex>> {
    xs.iter()
        .map(|&x| TailIndex::new(x).map_err(|e| Failure::usage(e.to_string())))
        .collect()
}

fn read_input(path: &Path) -> CliResult<Vec<u8>> {
    std::fs::read(path).map_err(|e| Failure::io(&format!("reading {}", path.display()), e))
}

fn csv_bytes<T: Serialize>(rows: &[T]) -> CliResult<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row).map_err(|e| Failure::data(format!("writing CSV: {e}")))?;
    }
    w.into_inner().map_err(|e| Failure::data(format!("writing CSV: {e}")))
}

fn load_thin(store: &CalibrationStore, k: usize, alpha: f64, q: &QuadratureConfig) -> CliResult<ThinTailTest> {
    let artifact = store.load(TestKind::ThinTail, k, alpha)?;
    Ok(ThinTailTest::from_artifact(artifact, q)?)
}

fn load_equal(store: &CalibrationStore, k: usize, alpha: f64, q: &QuadratureConfig) -> CliResult<EqualTailTest> {
    let artifact = store.load(TestKind::EqualTail, k, alpha)?;
    Ok(EqualTailTest::from_artifact(artifact, q)?)
}

pub fn calibrate(a: &CalibrateArgs) -> CliResult<()> {
    check_alpha(a.alpha)?;
    check_ks(&a.k)?;
    let q = QuadratureConfig::default();
    let store = CalibrationStore::new(&a.store.dir);
    std::fs::create_dir_all(store.dir())
        .map_err(|e| Failure::io(&format!("creating {}", store.dir().display()), e))?;
    for &k in &a.k {
        let artifact = match a.kind {
            KindArg::Thin => {
                let test = ThinTailTest::calibrate(k, a.alpha, WeightGrid::default(), a.draws, a.seed, &q)?;
                eprintln!("k = {k}: critical value {}", test.critical_value());
                test.artifact().clone()
            }
            KindArg::Equal => {
                let settings = LfdSettings {
                    draws: a.draws,
                    iterations: a.iterations,
                    kappa: a.kappa,
                    ..LfdSettings::default()
                };
                let points = equal_grid(DEFAULT_GRID_POINTS, DEFAULT_GRID_MAX)?;
                let (test, sizes) = EqualTailTest::calibrate(k, a.alpha, points, &settings, a.seed, &q)?;
                let worst = sizes.iter().copied().fold(0.0, f64::max);
                eprintln!(
                    "k = {k}: critical value {}, largest estimated grid size {worst:.4}",
                    test.critical_value()
                );
                test.artifact().clone()
            }
        };
        let path = store
            .save(&artifact)
            .map_err(|e| Failure::io(&format!("writing calibration to {}", store.dir().display()), e))?;
        let mut manifest = RunManifest::new(Some(a.seed));
        manifest.calibration_ids.push(artifact.id());
        let mpath = manifest_path(&path);
        frontier_tails::tail_tests::write_atomic(&mpath, manifest.to_json().as_bytes())
            .map_err(|e| Failure::io(&format!("writing {}", mpath.display()), e))?;
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

#[derive(Serialize)]
struct DiagnosticLine {
    group: String,
    k: usize,
    tail: String,
    statistic: f64,
    p_value: f64,
    reject: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    p_display: Option<String>,
}

pub fn test(a: &TestArgs) -> CliResult<()> {
    check_alpha(a.alpha)?;
    check_ks(&a.k)?;
    let q = QuadratureConfig::default();
    let store = CalibrationStore::new(&a.store.dir);
    let mut tests = BTreeMap::new();
    for &k in &a.k {
        tests.insert(k, load_thin(&store, k, a.alpha, &q)?);
    }
    let bytes = read_input(&a.input)?;
    let data = read_dataset(
        &bytes,
        &Columns {
            response: &a.response,
            design: &a.design,
            group: a.group.as_deref(),
        },
    )?;
    let orientation = match a.orientation {
        OrientationArg::Production => Orientation::Production,
        OrientationArg::Cost => Orientation::Cost,
    };
    let tails = match a.tails {
        TailsArg::Left => TailSelection::Left,
        TailsArg::Right => TailSelection::Right,
        TailsArg::Both => TailSelection::Both,
    };

    let mut manifest = RunManifest::new(None);
    manifest.add_input(&a.input, &bytes);
    manifest.calibration_ids = tests.values().map(|t| t.artifact().id()).collect();

    let mut lines = Vec::new();
    let mut failed = Vec::new();
    for group in run_frontier_diagnostic(&data, orientation, &tests, tails) {
        if let Some(s) = group.skewness {
            eprintln!("group {}: residual skewness {s:.4}", group.group);
        }
        match group.outcome {
            Ok(rows) => lines.extend(rows.into_iter().map(|r| DiagnosticLine {
                group: r.group,
                k: r.k,
                tail: r.tail.to_string(),
                statistic: r.result.statistic,
                p_value: r.result.p_value,
                reject: r.result.reject,
                p_display: a.censor.then(|| format_p_value(r.result.p_value, true)),
            })),
            Err(e) => {
                eprintln!("group {}: {e}", group.group);
                failed.push(group.group);
            }
        }
    }
    emit(a.output.as_deref(), &csv_bytes(&lines)?, &manifest)?;
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::data(format!("{} group(s) failed: {}", failed.len(), failed.join(", "))))
    }
}

pub fn simulate(a: &SimulateArgs) -> CliResult<()> {
    check_alpha(a.alpha)?;
    let mut manifest = RunManifest::new(a.seed);
    let entries: Vec<ScenarioEntry> = match (&a.config, &a.preset) {
        (Some(path), _) => {
            let bytes = read_input(path)?;
            manifest.add_input(path, &bytes);
            let text = String::from_utf8(bytes).map_err(|_| Failure::data("scenario file is not UTF-8"))?;
            ScenarioFile::from_json(&text)
                .map_err(|e| Failure::usage(e.to_string()))?
                .scenarios
        }
        (None, Some(name)) => preset(name)
            .ok_or_else(|| Failure::usage(format!("unknown preset {name:?}; expected table1..table4")))?
            .into_iter()
            .map(|spec| ScenarioEntry {
                spec,
                replications: DEFAULT_REPLICATIONS,
                seed: 0,
            })
            .collect(),
        (None, None) => return Err(Failure::usage("either --config or --preset is required")),
    };
    if a.reps == Some(0) {
        return Err(Failure::usage("--reps must be positive"));
    }

    let q = QuadratureConfig::default();
    let store = CalibrationStore::new(&a.store.dir);
    let needed: BTreeSet<(bool, usize)> = entries
        .iter()
        .map(|e| (e.spec.test == ScenarioTest::EqualTail, e.spec.k))
        .collect();
    let mut cal = Calibrations::default();
    for (equal, k) in needed {
        if equal {
            cal.equal.insert(k, load_equal(&store, k, a.alpha, &q)?);
        } else {
            cal.thin.insert(k, load_thin(&store, k, a.alpha, &q)?);
        }
    }
    manifest.calibration_ids = cal
        .thin
        .values()
        .map(|t| t.artifact().id())
        .chain(cal.equal.values().map(|t| t.artifact().id()))
        .collect();

    let mut cells = Vec::with_capacity(entries.len());
    for e in &entries {
        let reps = a.reps.unwrap_or(e.replications);
        let seed = a.seed.unwrap_or(e.seed);
        let cell = run_scenario(&e.spec, reps, &cal, seed)?;
        eprintln!("{} n={} k={}: {:.3} ({:.3})", cell.scenario, cell.n, cell.k, cell.rate, cell.se);
        cells.push(cell);
    }
    emit(a.output.as_deref(), &csv_bytes(&cells)?, &manifest)
}

#[derive(Serialize)]
struct DensityLine {
    xi: f64,
    density: f64,
}

pub fn density(a: &DensityArgs) -> CliResult<()> {
    check_ks(&[a.k])?;
    if a.v.len() != a.k - 2 {
        return Err(Failure::usage(format!(
            "--v needs the {} interior coordinates for k = {}, got {}",
            a.k - 2,
            a.k,
            a.v.len()
        )));
    }
    let mut values = vec![1.0];
    values.extend(&a.v);
    values.push(0.0);
    let vstar = NormalizedTail::new(values).map_err(|e| Failure::usage(e.to_string()))?;
    let q = QuadratureConfig::default();
    let lines = tail_indices(&a.xi)?
        .into_iter()
        .map(|xi| {
            Ok(DensityLine {
                xi: xi.value(),
                density: normalized_density(xi, &vstar, &q)?,
            })
        })
        .collect::<CliResult<Vec<_>>>()?;
    emit(a.output.as_deref(), &csv_bytes(&lines)?, &RunManifest::new(None))
}

#[derive(Serialize)]
struct PowerLine {
    k: usize,
    xi: f64,
    power: f64,
    se: f64,
}

pub fn power(a: &PowerArgs) -> CliResult<()> {
    check_alpha(a.alpha)?;
    check_ks(&a.k)?;
    let xis = tail_indices(&a.xi)?;
    if xis.iter().any(|x| x.value() > DEFAULT_GRID_MAX) {
        return Err(Failure::usage(format!("--xi values must lie in [0, {DEFAULT_GRID_MAX}]")));
    }
    if a.draws == 0 {
        return Err(Failure::usage("--draws must be positive"));
    }
    let q = QuadratureConfig::default();
    let store = CalibrationStore::new(&a.store.dir);
    let mut manifest = RunManifest::new(Some(a.seed));
    let mut lines = Vec::new();
    for &k in &a.k {
        let test = if store.path_for(TestKind::ThinTail, k, a.alpha).exists() {
            load_thin(&store, k, a.alpha, &q)?
        } else {
            ThinTailTest::calibrate(k, a.alpha, WeightGrid::default(), a.null_draws, a.seed, &q)?
        };
        manifest.calibration_ids.push(test.artifact().id());
        for p in asymptotic_power_curve(&test, &xis, a.draws, a.seed)? {
            lines.push(PowerLine {
                k,
                xi: p.xi,
                power: p.power,
                se: p.se,
            });
        }
    }
    emit(a.output.as_deref(), &csv_bytes(&lines)?, &manifest)
}
