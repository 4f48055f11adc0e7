//! Registry of numerical checkers. Each checker evaluates both sides of an
//! equivalence (or the residual of an identity) at sampled points and
//! returns a [`CheckVerdict`].
//!
//! Everything a checker needs at a point is computed once, in parallel, as a
//! [`PointContext`]; checkers are reductions over those contexts.

mod equivalences;
mod structural;

use nalgebra::DVector;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::map_analysis::{
    conformality, frame_at, slant_angle, slant_decomposition, ConformalityReport, MapError, SlantDecomposition,
    SlantReport, SmoothMapSpec, DEFAULT_TOL_RANK, MIN_DIRECTIONS,
};
use crate::oneill::{
    derivative_identities, oneill_tensors, second_fundamental_form, DerivativeIdentities, Extension, Local,
    Neighborhood, ONeillSample, SecondFundamentalSample,
};
use crate::sampling::{sample_points, to_vector};
use crate::scalar::Real;
use crate::verdict::CheckVerdict;

pub use equivalences::{
    check_eker_mu, check_harmonicity, check_homothety, check_horizontal_geodesic, check_integrability,
    check_local_product, check_totally_geodesic_map, check_vertical_geodesic,
};
#[cfg(test)]
pub(crate) use equivalences::{horizontal_terms, integrability_terms};
pub use structural::{
    check_d_squared, check_decomposition_lemma, check_gram_identities, check_minimal_fibers, check_parallel_e_curvature,
    check_slant_angle, check_structure,
};

/// `E` counts as parallel at a point when `max |(∇_V E)W|` is below this.
pub const E_PARALLEL_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Slant angle constancy and classification, radians.
    #[serde(default = "default_angle")]
    pub angle: f64,
    /// Algebraic identities evaluated without differentiation of fields.
    #[serde(default = "default_identity")]
    pub identity: f64,
    /// Anything built from finite differences of frame fields.
    #[serde(default = "default_derivative")]
    pub derivative: f64,
}

fn default_angle() -> f64 {
    1e-6
}

fn default_identity() -> f64 {
    1e-8
}

fn default_derivative() -> f64 {
    1e-5
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            angle: default_angle(),
            identity: default_identity(),
            derivative: default_derivative(),
        }
    }
}

impl Tolerances {
    pub fn is_valid(&self) -> bool {
        [self.angle, self.identity, self.derivative]
            .iter()
            .all(|t| t.is_finite() && *t > 0.0)
    }
}

pub struct CheckInfo {
    pub id: &'static str,
    pub description: &'static str,
}

pub const CHECKS: [CheckInfo; 15] = [
    CheckInfo {
        id: "cosym-structure",
        description: "phi^2 = -I + eta(x)xi, metric compatibility, nabla phi = 0, nabla xi = 0",
    },
    CheckInfo {
        id: "slant-angle",
        description: "angle between phi V and the vertical space is the same for every vertical V orthogonal to xi",
    },
    CheckInfo {
        id: "lemma-3.5-3.8",
        description: "Dd + de = 0, Ed + e^2 = -I, D^2 + dE = phi^2, ED + eE = 0 on frame matrices",
    },
    CheckInfo {
        id: "thm-D2",
        description: "D^2 = -cos^2(w)(I - eta(x)xi) on the vertical space",
    },
    CheckInfo {
        id: "cor-3.14-3.15",
        description: "g(DV,DW) = cos^2(w)(g(V,W) - eta(V)eta(W)) and the sin^2 analogue for E",
    },
    CheckInfo {
        id: "prop-3.16",
        description: "where E is parallel, T_{DV}DV = -cos^2(w) T_V V",
    },
    CheckInfo {
        id: "thm-minimal-fibers",
        description: "with w < pi/2 and E parallel, the fibres are minimal",
    },
    CheckInfo {
        id: "thm-integrability",
        description: "horizontal distribution integrable iff the pullback identity with dilation terms holds",
    },
    CheckInfo {
        id: "thm-homothety",
        description: "for integrable horizontal distribution: homothetic iff the dilation-free identity holds",
    },
    CheckInfo {
        id: "thm-horiz-geodesic",
        description: "horizontal foliation totally geodesic iff its pullback identity holds",
    },
    CheckInfo {
        id: "thm-vert-geodesic",
        description: "fibres totally geodesic iff g(nabla_V EDW, X) = g(T_V EW, dX) + g(h nabla_V EW, eX)",
    },
    CheckInfo {
        id: "cor-harmonic",
        description: "with E parallel: harmonic when dim B = 2, harmonic iff homothetic when dim B > 2",
    },
    CheckInfo {
        id: "thm-eker-mu",
        description: "(E ker, mu)-totally geodesic iff homothetic",
    },
    CheckInfo {
        id: "thm-tot-geodesic-map",
        description: "totally geodesic map iff conditions (a), (b) homothetic, (c) hold",
    },
    CheckInfo {
        id: "thm-local-product",
        description: "total space locally a product iff both foliations are totally geodesic",
    },
];

pub fn check_ids() -> impl Iterator<Item = &'static str> {
    CHECKS.iter().map(|c| c.id)
}

pub fn is_check_id(id: &str) -> bool {
    check_ids().any(|c| c == id)
}

/// Per-point data shared by the checkers.
#[derive(Clone, Debug)]
pub struct PointContext<T: Real> {
    pub nb: Neighborhood<T>,
    pub split: SlantDecomposition<T>,
    pub oneill: ONeillSample<T>,
    pub sff: SecondFundamentalSample<T>,
    pub derivatives: DerivativeIdentities<T>,
}

impl<T: Real> PointContext<T> {
    pub fn new(m: &SmoothMapSpec, p: &[f64]) -> Result<Self, MapError> {
        let frame = frame_at(m, to_vector::<T>(p).as_slice(), DEFAULT_TOL_RANK)?;
        let split = slant_decomposition(&frame)?;
        let nb = Neighborhood::new(m, frame, Extension::Projected)?;
        let oneill = oneill_tensors(&nb);
        let sff = second_fundamental_form(&nb, &oneill);
        let derivatives = derivative_identities(&nb, &oneill);
        Ok(PointContext {
            nb,
            split,
            oneill,
            sff,
            derivatives,
        })
    }

    fn center(&self) -> &Local<T> {
        &self.nb.center
    }

    pub fn vertical_count(&self) -> usize {
        self.nb.vertical_count()
    }

    pub fn len(&self) -> usize {
        self.nb.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nb.is_empty()
    }

    pub fn e(&self, j: usize) -> &DVector<T> {
        self.nb.direction(j)
    }

    /// `vφE_j`: `DV` for vertical, `dX` for horizontal frame vectors.
    pub fn phi_v(&self, j: usize) -> DVector<T> {
        let c = self.center();
        c.pv(&c.phi(self.e(j)))
    }

    /// `hφE_j`: `EV` for vertical, `eX` for horizontal frame vectors.
    pub fn phi_h(&self, j: usize) -> DVector<T> {
        let c = self.center();
        c.ph(&c.phi(self.e(j)))
    }

    pub fn inner(&self, a: &DVector<T>, b: &DVector<T>) -> T {
        self.nb.data().inner(a, b)
    }

    pub fn norm(&self, a: &DVector<T>) -> T {
        self.nb.data().norm(a)
    }

    /// `λ⁻² g_B(a, b)`
    pub fn target_inner_scaled(&self, a: &DVector<T>, b: &DVector<T>) -> T {
        let d = self.nb.data();
        d.target_inner(a, b) / d.square_dilation()
    }

    /// Target norm divided by `λ`.
    pub fn target_norm_scaled(&self, a: &DVector<T>) -> T {
        self.nb.data().target_norm(a) / self.nb.dilation
    }

    pub fn push(&self, v: &DVector<T>) -> DVector<T> {
        self.nb.data().push(v)
    }

    pub fn horizontal_gradient(&self) -> DVector<T> {
        self.nb.data().horizontal(&self.nb.grad_ln_dilation)
    }

    /// `|h ∇ln λ|`
    pub fn homothety_defect(&self) -> f64 {
        self.norm(&self.horizontal_gradient()).as_f64()
    }

    pub fn e_parallel(&self) -> bool {
        self.derivatives.e_parallel.as_f64() < E_PARALLEL_TOL
    }

    pub fn mu_dimension(&self) -> usize {
        self.nb.frame.mu.len()
    }
}

/// Sampled points plus the map-level reports and per-point contexts.
#[derive(Debug)]
pub struct Analysis<'m, T: Real> {
    pub map: &'m SmoothMapSpec,
    pub points: Vec<Vec<f64>>,
    pub seed: u64,
    pub tolerances: Tolerances,
    pub conformality: ConformalityReport,
    pub slant: SlantReport,
    pub contexts: Vec<PointContext<T>>,
}

impl<'m, T: Real> Analysis<'m, T> {
    pub fn new(map: &'m SmoothMapSpec, samples: usize, seed: u64, tolerances: Tolerances) -> Result<Self, MapError> {
        if map.structure().is_none() {
            return Err(MapError::NoStructure);
        }
        let points = sample_points(map.source().domain_box(), samples, seed);
        let conformality = conformality::<T>(map, &points, tolerances.identity, tolerances.derivative)?;
        if conformality.critical_points > 0 {
            return Err(MapError::Shape(format!(
                "{} of {} sampled points are critical points of the map",
                conformality.critical_points,
                points.len()
            )));
        }
        let slant = slant_angle::<T>(map, &points, MIN_DIRECTIONS, tolerances.angle)?;
        let contexts = points
            .par_iter()
            .map(|p| PointContext::new(map, p))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Analysis {
            map,
            points,
            seed,
            tolerances,
            conformality,
            slant,
            contexts,
        })
    }

    pub fn samples(&self) -> usize {
        self.points.len()
    }

    /// Constant slant angle below `π/2`, the standing hypothesis of the
    /// minimal-fibre and harmonicity statements.
    pub fn below_right_angle(&self) -> bool {
        self.slant.classification.is_slant()
            && self.slant.mean < std::f64::consts::FRAC_PI_2 - self.tolerances.angle
    }

    pub fn cos2(&self) -> f64 {
        self.slant.mean.cos().powi(2)
    }

    pub fn run(&self, id: &str) -> Option<CheckVerdict> {
        Some(match id {
            "cosym-structure" => check_structure(self),
            "slant-angle" => check_slant_angle(self),
            "lemma-3.5-3.8" => check_decomposition_lemma(self),
            "thm-D2" => check_d_squared(self),
            "cor-3.14-3.15" => check_gram_identities(self),
            "prop-3.16" => check_parallel_e_curvature(self),
            "thm-minimal-fibers" => check_minimal_fibers(self),
            "thm-integrability" => check_integrability(self),
            "thm-homothety" => check_homothety(self),
            "thm-horiz-geodesic" => check_horizontal_geodesic(self),
            "thm-vert-geodesic" => check_vertical_geodesic(self),
            "cor-harmonic" => check_harmonicity(self),
            "thm-eker-mu" => check_eker_mu(self),
            "thm-tot-geodesic-map" => check_totally_geodesic_map(self),
            "thm-local-product" => check_local_product(self),
            _ => return None,
        })
    }

    /// Runs the given checkers in parallel; the result is sorted by id.
    /// Unknown ids are skipped.
    pub fn run_all(&self, ids: &[&str]) -> Vec<CheckVerdict> {
        let mut out: Vec<CheckVerdict> = ids.par_iter().filter_map(|id| self.run(id)).collect();
        out.sort_by(|a, b| a.check_id.cmp(&b.check_id));
        out
    }

    /// Per-point reduction in parallel, order preserved.
    fn per_point<R: Send>(&self, f: impl Fn(&PointContext<T>) -> R + Sync + Send) -> Vec<R> {
        self.contexts.par_iter().map(f).collect()
    }
}
