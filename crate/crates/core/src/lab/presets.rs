//! The simulation designs of the four rejection-probability tables.

use super::distributions::DistributionSpec as D;
use super::scenario::{ScenarioSpec, ScenarioTest};
use crate::frontier::Orientation;

pub const PRESET_NS: [usize; 2] = [100, 1000];
pub const PRESET_KS: [usize; 3] = [10, 20, 50];

/// Scenario id used by the presets: `W=<noise>,U=<inefficiency>`.
pub fn scenario_id(noise: &D, inefficiency: &D) -> String {
    format!("W={},U={}", noise.label(), inefficiency.label())
}

fn noise_roster() -> Vec<D> {
    vec![
        D::standard_normal(),
        D::standard_laplace(),
        D::student_t(2.0),
        D::sign_symmetrized(D::pareto(0.5)),
        D::sign_symmetrized(D::fisher_f(4.0, 4.0)),
    ]
}

fn grid(pairs: Vec<(D, D)>, covariates: bool, test: ScenarioTest) -> Vec<ScenarioSpec> {
    let mut out = Vec::new();
    for (noise, inefficiency) in pairs {
        for n in PRESET_NS {
            for k in PRESET_KS {
                out.push(ScenarioSpec {
                    id: scenario_id(&noise, &inefficiency),
                    noise: noise.clone(),
                    inefficiency: inefficiency.clone(),
                    n,
                    k,
                    covariates,
                    test,
                    orientation: Orientation::Production,
                });
            }
        }
    }
    out
}

fn thin_right(covariates: bool) -> Vec<ScenarioSpec> {
    let pairs = [D::half_normal(), D::half_laplace()]
        .into_iter()
        .flat_map(|u| noise_roster().into_iter().map(move |w| (w, u.clone())))
        .collect();
    grid(pairs, covariates, ScenarioTest::ThinTailRight)
}

/// Thin-tail test on `W`, no covariates.
pub fn table1() -> Vec<ScenarioSpec> {
    thin_right(false)
}

/// Thin-tail test on `W` with the `(1, X2)` design.
pub fn table2() -> Vec<ScenarioSpec> {
    thin_right(true)
}

/// Null pairs of the equal-tail test (matching tail indices).
pub fn table3_null() -> Vec<(D, D)> {
    vec![
        (D::standard_normal(), D::half_normal()),
        (D::standard_laplace(), D::half_laplace()),
        (D::student_t(2.0), D::half_student_t(2.0)),
        (D::sign_symmetrized(D::pareto(0.5)), D::pareto(0.5)),
        (D::sign_symmetrized(D::fisher_f(4.0, 4.0)), D::fisher_f(4.0, 4.0)),
    ]
}

/// Equal-tail test: the null pairs, then every noise against `U ~ Pa(0.75)`.
pub fn table3() -> Vec<ScenarioSpec> {
    let mut pairs = table3_null();
    pairs.extend(noise_roster().into_iter().map(|w| (w, D::pareto(0.75))));
    grid(pairs, false, ScenarioTest::EqualTail)
}

/// Thin-tail test on the lower tail with normal or Laplace `W`.
pub fn table4() -> Vec<ScenarioSpec> {
    let inefficiencies = [
        D::half_normal(),
        D::half_laplace(),
        D::half_student_t(2.0),
        D::pareto(0.5),
        D::fisher_f(4.0, 4.0),
    ];
    let pairs = [D::standard_normal(), D::standard_laplace()]
        .into_iter()
        .flat_map(|w| inefficiencies.iter().map(move |u| (w.clone(), u.clone())))
        .collect();
    grid(pairs, false, ScenarioTest::ThinTailLeftNormalFamily)
}

/// Preset by name (`table1` .. `table4`).
pub fn preset(name: &str) -> Option<Vec<ScenarioSpec>> {
    match name {
        "table1" => Some(table1()),
        "table2" => Some(table2()),
        "table3" => Some(table3()),
        "table4" => Some(table4()),
        _ => None,
    }
}
