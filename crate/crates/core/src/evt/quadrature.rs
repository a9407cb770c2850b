//! Adaptive Gauss-Kronrod (7/15) quadrature on a finite interval.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Settings shared by every density evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
    /// Below this tail index the closed-form `xi = 0` density is used.
    pub xi_zero_threshold: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            rel_tol: 1e-8,
            abs_tol: 1e-15,
            max_subdivisions: 200,
            xi_zero_threshold: 1e-6,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.rel_tol > 0.0
            && self.abs_tol > 0.0
            && self.xi_zero_threshold > 0.0
            && self.max_subdivisions >= 1;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!("invalid quadrature settings {self:?}")))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadEstimate {
    pub value: f64,
    pub error: f64,
    pub subdivisions: usize,
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn kronrod15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut values = [0.0; 15];
    values[7] = f(center);
    for j in 0..7 {
        let dx = half * XGK[j];
        values[j] = f(center - dx);
        values[14 - j] = f(center + dx);
    }
    let weight = |i: usize| WGK[if i <= 7 { i } else { 14 - i }];
    let mut kronrod = 0.0;
    let mut gauss = values[7] * WG[3];
    for (i, v) in values.iter().enumerate() {
        kronrod += weight(i) * v;
    }
    for j in (1..7).step_by(2) {
        gauss += WG[j / 2] * (values[j] + values[14 - j]);
    }
    let mean = 0.5 * kronrod;
    let spread: f64 = values.iter().enumerate().map(|(i, v)| weight(i) * (v - mean).abs()).sum::<f64>() * half;
    // QUADPACK's scaling of the Gauss/Kronrod difference
    let raw = ((kronrod - gauss) * half).abs();
    let error = if spread > 0.0 && raw > 0.0 {
        spread * (200.0 * raw / spread).powf(1.5).min(1.0)
    } else {
        raw
    };
    Segment {
        a,
        b,
        value: kronrod * half,
        error,
    }
}

/// Integrates `f` over `[a, b]`, repeatedly bisecting the segment with the largest error
/// estimate until `error <= max(abs_tol, rel_tol * |value|)`.
pub fn integrate<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    cfg: &QuadratureConfig,
) -> Result<QuadEstimate> {
    // start from two halves so a peak at the midpoint falls on a boundary
    let mid = 0.5 * (a + b);
    let mut segments = vec![kronrod15(&mut f, a, mid), kronrod15(&mut f, mid, b)];
    loop {
        let value: f64 = segments.iter().map(|s| s.value).sum();
        let error: f64 = segments.iter().map(|s| s.error).sum();
        if !value.is_finite() || !error.is_finite() {
            return Err(Error::QuadratureFailure {
                estimate: value,
                error,
                subdivisions: segments.len(),
            });
        }
        if error <= cfg.abs_tol.max(cfg.rel_tol * value.abs()) {
            return Ok(QuadEstimate {
                value,
                error,
                subdivisions: segments.len(),
            });
        }
        if segments.len() >= cfg.max_subdivisions {
            return Err(Error::QuadratureFailure {
                estimate: value,
                error,
                subdivisions: segments.len(),
            });
        }
        let worst = segments
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .map(|(i, _)| i)
            .unwrap_or(0);
        let seg = segments.swap_remove(worst);
        let mid = 0.5 * (seg.a + seg.b);
        segments.push(kronrod15(&mut f, seg.a, mid));
        segments.push(kronrod15(&mut f, mid, seg.b));
    }
}
