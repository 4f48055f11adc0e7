use std::f64::consts::FRAC_PI_2;

use nalgebra::DVector;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{frame_at, FrameDecomposition, MapError, SmoothMapSpec, DEFAULT_TOL_RANK};
use crate::sampling::{to_vector, unit_directions};
use crate::scalar::Real;

/// Unit vertical directions sampled per point for the slant angle.
pub const MIN_DIRECTIONS: usize = 12;

/// `|φV|` below this is a degenerate direction.
const DEGENERATE_NORM: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConformalSample {
    pub point: Vec<f64>,
    pub square_dilation: f64,
    pub dilation: f64,
    /// `max |g_B(ψ*X_a, ψ*X_b)/Λ − δ_ab|` over the horizontal frame.
    pub deviation: f64,
    /// `|v ∇ln λ|`
    pub grad_ln_dilation_vertical: f64,
    /// `|h ∇ln λ|`
    pub grad_ln_dilation_horizontal: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConformalityReport {
    pub samples: Vec<ConformalSample>,
    pub critical_points: usize,
    pub is_conformal: bool,
    pub is_homothetic: bool,
    pub max_deviation: f64,
    pub max_grad_horizontal: f64,
    pub dilation_min: f64,
    pub dilation_max: f64,
    pub tolerance: f64,
    pub gradient_tolerance: f64,
}

/// Dilation data at a regular point.
pub fn conformality_at<T: Real>(m: &SmoothMapSpec, frame: &FrameDecomposition<T>) -> Result<ConformalSample, MapError> {
    let d = &frame.data;
    let lambda2 = d.square_dilation();
    if lambda2 <= T::zero() {
        return Err(MapError::Degenerate(lambda2.as_f64()));
    }
    let pushed: Vec<DVector<T>> = frame.horizontal.iter().map(|x| d.push(x)).collect();
    let mut deviation = T::zero();
    for (a, xa) in pushed.iter().enumerate() {
        for (b, xb) in pushed.iter().enumerate() {
            let delta = if a == b { T::one() } else { T::zero() };
            deviation = deviation.max((d.target_inner(xa, xb) / lambda2 - delta).abs());
        }
    }
    let grad = m.grad_ln_dilation(&d.point)?;
    let gv = frame.vertical_projector() * &grad;
    let gh = frame.horizontal_projector() * &grad;
    Ok(ConformalSample {
        point: d.point.iter().map(|x| x.as_f64()).collect(),
        square_dilation: lambda2.as_f64(),
        dilation: lambda2.sqrt().as_f64(),
        deviation: deviation.as_f64(),
        grad_ln_dilation_vertical: d.norm(&gv).as_f64(),
        grad_ln_dilation_horizontal: d.norm(&gh).as_f64(),
    })
}

/// Horizontal conformality over the given points. Critical points are
/// counted and excluded; any of them makes the map non-conformal.
pub fn conformality<T: Real>(
    m: &SmoothMapSpec,
    points: &[Vec<f64>],
    tol: f64,
    gradient_tol: f64,
) -> Result<ConformalityReport, MapError> {
    let results: Vec<Option<ConformalSample>> = points
        .par_iter()
        .map(|p| {
            let frame = frame_at(m, to_vector::<T>(p).as_slice(), DEFAULT_TOL_RANK)?;
            if !frame.is_submersion() {
                return Ok(None);
            }
            conformality_at(m, &frame).map(Some)
        })
        .collect::<Result<_, MapError>>()?;
    let critical_points = results.iter().filter(|r| r.is_none()).count();
    let samples: Vec<ConformalSample> = results.into_iter().flatten().collect();
    let max_deviation = samples.iter().map(|s| s.deviation).fold(0.0, f64::max);
    let max_grad_horizontal = samples.iter().map(|s| s.grad_ln_dilation_horizontal).fold(0.0, f64::max);
    let dilation_min = samples.iter().map(|s| s.dilation).fold(f64::INFINITY, f64::min);
    let dilation_max = samples.iter().map(|s| s.dilation).fold(0.0, f64::max);
    let regular = critical_points == 0 && !samples.is_empty();
    Ok(ConformalityReport {
        critical_points,
        is_conformal: regular && max_deviation < tol,
        is_homothetic: regular && max_grad_horizontal < gradient_tol,
        max_deviation,
        max_grad_horizontal,
        dilation_min: if samples.is_empty() { 0.0 } else { dilation_min },
        dilation_max,
        tolerance: tol,
        gradient_tolerance: gradient_tol,
        samples,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SlantClass {
    Invariant,
    ProperSlant,
    AntiInvariant,
    NotSlant,
}

impl SlantClass {
    pub fn is_slant(self) -> bool {
        self != SlantClass::NotSlant
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SlantClass::Invariant => "invariant",
            SlantClass::ProperSlant => "proper slant",
            SlantClass::AntiInvariant => "anti-invariant",
            SlantClass::NotSlant => "not slant",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointAngles {
    pub point: Vec<f64>,
    pub angles: Vec<f64>,
    /// Some direction had `|φV| = 0`.
    pub degenerate: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlantReport {
    pub per_point: Vec<PointAngles>,
    pub samples: usize,
    pub mean: f64,
    pub min: f64,
    pub max: f64,
    /// `max |ω − mean|`
    pub spread: f64,
    pub cos_mean: f64,
    pub classification: SlantClass,
    pub degenerate: bool,
    pub tolerance: f64,
}

/// `ω(V) = atan2(|EV|, |DV|)` (the angle between `φV` and the vertical
/// space) for `count` deterministic unit vertical directions orthogonal to `ξ`.
pub fn slant_angles_at<T: Real>(frame: &FrameDecomposition<T>, count: usize) -> Result<PointAngles, MapError> {
    let d = &frame.data;
    if d.phi.is_none() {
        return Err(MapError::NoStructure);
    }
    let basis = frame.vertical_without_xi();
    let mut angles = Vec::new();
    let mut degenerate = false;
    for c in unit_directions(basis.len(), count) {
        let v = basis
            .iter()
            .zip(&c)
            .fold(DVector::zeros(d.dimension()), |acc, (b, &ci)| acc + b * T::lit(ci));
        let image = d.phi(&v);
        let dv = frame.vertical.iter().fold(DVector::zeros(v.len()), |acc, b| acc + b * d.inner(b, &image));
        let ev = &image - &dv;
        if d.norm(&image).as_f64() < DEGENERATE_NORM {
            degenerate = true;
            continue;
        }
        angles.push(d.norm(&ev).atan2(d.norm(&dv)).as_f64());
    }
    Ok(PointAngles {
        point: d.point.iter().map(|x| x.as_f64()).collect(),
        angles,
        degenerate,
    })
}

/// Slant angle statistics and classification over the given points.
pub fn slant_angle<T: Real>(
    m: &SmoothMapSpec,
    points: &[Vec<f64>],
    directions: usize,
    tol_angle: f64,
) -> Result<SlantReport, MapError> {
    if m.structure().is_none() {
        return Err(MapError::NoStructure);
    }
    let per_point: Vec<PointAngles> = points
        .par_iter()
        .map(|p| {
            let frame = frame_at(m, to_vector::<T>(p).as_slice(), DEFAULT_TOL_RANK)?;
            if !frame.is_submersion() {
                return Err(MapError::NotSubmersion {
                    rank: frame.data.rank,
                    target: m.target_dimension(),
                });
            }
            slant_angles_at(&frame, directions.max(MIN_DIRECTIONS))
        })
        .collect::<Result<_, _>>()?;
    let all: Vec<f64> = per_point.iter().flat_map(|p| p.angles.iter().copied()).collect();
    let degenerate = per_point.iter().any(|p| p.degenerate);
    let samples = all.len();
    let mean = if samples == 0 { f64::NAN } else { all.iter().sum::<f64>() / samples as f64 };
    let spread = all.iter().map(|w| (w - mean).abs()).fold(0.0, f64::max);
    let min = all.iter().copied().fold(f64::INFINITY, f64::min);
    let max = all.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let classification = if samples == 0 || degenerate || spread >= tol_angle {
        SlantClass::NotSlant
    } else if mean < tol_angle {
        SlantClass::Invariant
    } else if (mean - FRAC_PI_2).abs() < tol_angle {
        SlantClass::AntiInvariant
    } else {
        SlantClass::ProperSlant
    };
    let finite = |x: f64| if x.is_finite() { x } else { 0.0 };
    Ok(SlantReport {
        per_point,
        samples,
        mean: finite(mean),
        min: finite(min),
        max: finite(max),
        spread,
        cos_mean: finite(mean.cos().max(0.0)),
        classification,
        degenerate,
        tolerance: tol_angle,
    })
}
