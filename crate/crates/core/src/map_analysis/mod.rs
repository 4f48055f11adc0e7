//! Pointwise analysis of a smooth map `ψ: N → B`: differential, frames,
//! horizontal conformality, the `φ`-splitting and the slant angle.

mod frame;
mod report;

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::expr::{EvalError, Expr};
use crate::geometry::{christoffel_at, AlmostContactStructure, Christoffel, GeometryError, ManifoldSpec};
use crate::linalg;
use crate::scalar::Real;

pub use frame::{frame_at, slant_decomposition, FrameDecomposition, SlantDecomposition, DEFAULT_TOL_RANK};
pub use report::{
    conformality, conformality_at, slant_angle, slant_angles_at, ConformalSample, ConformalityReport,
    PointAngles, SlantClass, SlantReport, MIN_DIRECTIONS,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MapError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("evaluation failed: {0}")]
    Eval(#[from] EvalError),
    #[error("{0}")]
    Shape(String),
    #[error("the source manifold carries no almost contact structure")]
    NoStructure,
    #[error("not a submersion at the point: rank {rank} < {target}")]
    NotSubmersion { rank: usize, target: usize },
    #[error("square dilation is not positive at the point ({0:e})")]
    Degenerate(f64),
}

/// `ψ` given by component expressions in the source chart.
#[derive(Clone, Debug, PartialEq)]
pub struct SmoothMapSpec {
    source: ManifoldSpec,
    structure: Option<AlmostContactStructure>,
    target: ManifoldSpec,
    components: Vec<Expr>,
}

impl SmoothMapSpec {
    pub fn new(
        source: ManifoldSpec,
        structure: Option<AlmostContactStructure>,
        target: ManifoldSpec,
        components: Vec<Expr>,
    ) -> Result<Self, MapError> {
        if components.len() != target.dimension() {
            return Err(MapError::Shape(format!(
                "map has {} components but the target has dimension {}",
                components.len(),
                target.dimension()
            )));
        }
        if let Some(e) = components.iter().find(|e| e.dimension() != source.dimension()) {
            return Err(MapError::Shape(format!(
                "component `{e}` is over a chart of dimension {}, source has {}",
                e.dimension(),
                source.dimension()
            )));
        }
        if let Some(acs) = &structure {
            if acs.dimension() != source.dimension() {
                return Err(MapError::Shape(format!(
                    "structure has dimension {}, source has {}",
                    acs.dimension(),
                    source.dimension()
                )));
            }
        }
        Ok(SmoothMapSpec {
            source,
            structure,
            target,
            components,
        })
    }

    pub fn source(&self) -> &ManifoldSpec {
        &self.source
    }

    pub fn structure(&self) -> Option<&AlmostContactStructure> {
        self.structure.as_ref()
    }

    pub fn target(&self) -> &ManifoldSpec {
        &self.target
    }

    pub fn components(&self) -> &[Expr] {
        &self.components
    }

    pub fn source_dimension(&self) -> usize {
        self.source.dimension()
    }

    pub fn target_dimension(&self) -> usize {
        self.target.dimension()
    }

    pub fn value_at<T: Real>(&self, p: &[T]) -> Result<DVector<T>, MapError> {
        let values = self
            .components
            .iter()
            .map(|e| e.eval(p))
            .collect::<Result<Vec<T>, _>>()?;
        Ok(DVector::from_vec(values))
    }

    /// Square dilation `Λ = tr(g_B ψ* g_N⁻¹ ψ*ᵀ) / dim B`, the mean of
    /// `|ψ* X|²` over an orthonormal horizontal frame of a submersion.
    pub fn square_dilation_at<T: Real>(&self, p: &[T]) -> Result<T, MapError> {
        let (_, ginv) = self.source.metric_and_inverse(p)?;
        let jac = pushforward(self, p)?;
        let y = self.value_at(p)?;
        let gb = self.target.metric_at(y.as_slice())?;
        Ok((gb * &jac * ginv * jac.transpose()).trace() / T::lit(self.target_dimension() as f64))
    }

    /// Gradient of a scalar function of the point by central differences
    /// over coordinate directions, with the index raised by `g_N`.
    pub fn coordinate_gradient<T: Real>(
        &self,
        p: &[T],
        f: impl Fn(&[T]) -> Result<T, MapError>,
    ) -> Result<DVector<T>, MapError> {
        let n = self.source_dimension();
        let h = T::fd_step();
        let mut q = p.to_vec();
        let mut dual = DVector::zeros(n);
        for k in 0..n {
            q[k] = p[k] + h;
            let fp = f(&q)?;
            q[k] = p[k] - h;
            let fm = f(&q)?;
            q[k] = p[k];
            dual[k] = (fp - fm) / (h + h);
        }
        let (_, ginv) = self.source.metric_and_inverse(p)?;
        Ok(ginv * dual)
    }

    /// `∇ ln λ = ½ ∇ ln Λ`.
    pub fn grad_ln_dilation<T: Real>(&self, p: &[T]) -> Result<DVector<T>, MapError> {
        self.coordinate_gradient(p, |q| {
            let l = self.square_dilation_at(q)?;
            if l <= T::zero() {
                return Err(MapError::Degenerate(l.as_f64()));
            }
            Ok(T::lit(0.5) * l.ln())
        })
    }

    /// `grad(1/λ²)`, differentiated literally as `1/Λ`.
    pub fn grad_inverse_square_dilation<T: Real>(&self, p: &[T]) -> Result<DVector<T>, MapError> {
        self.coordinate_gradient(p, |q| {
            let l = self.square_dilation_at(q)?;
            if l <= T::zero() {
                return Err(MapError::Degenerate(l.as_f64()));
            }
            Ok(T::one() / l)
        })
    }
}

/// `ψ*` at `p`: row `k` is the exact gradient of component `k`.
pub fn pushforward<T: Real>(m: &SmoothMapSpec, p: &[T]) -> Result<DMatrix<T>, MapError> {
    let n = m.source_dimension();
    let s = m.target_dimension();
    let mut jac = DMatrix::zeros(s, n);
    for (k, e) in m.components.iter().enumerate() {
        let d = e.eval_dual(p)?;
        for (j, v) in d.derivatives.iter().enumerate() {
            jac[(k, j)] = *v;
        }
    }
    Ok(jac)
}

/// Everything evaluated at one source point: metrics, structure tensors,
/// the differential and the `g_N`-orthogonal projectors onto the vertical
/// and horizontal spaces.
#[derive(Clone, Debug)]
pub struct PointData<T: Real> {
    pub point: Vec<T>,
    pub metric: DMatrix<T>,
    pub metric_inverse: DMatrix<T>,
    pub jacobian: DMatrix<T>,
    pub image: DVector<T>,
    pub target_metric: DMatrix<T>,
    pub phi: Option<DMatrix<T>>,
    pub xi: Option<DVector<T>>,
    pub eta: Option<DVector<T>>,
    /// `P_v` acting on coordinate vectors.
    pub vertical_projector: DMatrix<T>,
    /// `P_h = g⁻¹ψ*ᵀ(ψ* g⁻¹ ψ*ᵀ)⁻¹ψ*`; zero when `ψ*` is not onto.
    pub horizontal_projector: DMatrix<T>,
    pub singular_values: Vec<T>,
    pub rank: usize,
}

impl<T: Real> PointData<T> {
    pub fn new(m: &SmoothMapSpec, p: &[T], tol_rank: f64) -> Result<Self, MapError> {
        let n = m.source_dimension();
        let s = m.target_dimension();
        if p.len() != n {
            return Err(MapError::Shape(format!("point has {} coordinates, expected {n}", p.len())));
        }
        let (g, ginv) = m.source.metric_and_inverse(p)?;
        let jac = pushforward(m, p)?;
        let image = m.value_at(p)?;
        let gb = m.target.metric_at(image.as_slice())?;
        // singular values of ψ* measured in orthonormal coordinates on both sides
        let sqrt_ginv = linalg::spd_sqrt(&ginv);
        let sqrt_gb = linalg::spd_sqrt(&gb);
        let singular_values = linalg::singular_values(&(&sqrt_gb * &jac * &sqrt_ginv));
        let largest = singular_values.first().copied().unwrap_or(T::zero());
        let cutoff = largest * T::lit(tol_rank);
        let rank = if largest <= T::zero() {
            0
        } else {
            singular_values.iter().filter(|&&v| v > cutoff).count()
        };
        let (ph, pv) = if rank == s && s > 0 {
            let gram = &jac * &ginv * jac.transpose();
            let gram_inv = gram
                .clone()
                .try_inverse()
                .ok_or(MapError::NotSubmersion { rank, target: s })?;
            let ph = &ginv * jac.transpose() * gram_inv * &jac;
            let pv = DMatrix::identity(n, n) - &ph;
            (ph, pv)
        } else {
            (DMatrix::zeros(n, n), DMatrix::identity(n, n))
        };
        let (phi, xi, eta) = match &m.structure {
            Some(acs) => (Some(acs.phi_at(p)?), Some(acs.xi_at(p)?), Some(acs.eta_at(p)?)),
            None => (None, None, None),
        };
        Ok(PointData {
            point: p.to_vec(),
            metric: g,
            metric_inverse: ginv,
            jacobian: jac,
            image,
            target_metric: gb,
            phi,
            xi,
            eta,
            vertical_projector: pv,
            horizontal_projector: ph,
            singular_values,
            rank,
        })
    }

    pub fn dimension(&self) -> usize {
        self.point.len()
    }

    pub fn is_submersion(&self) -> bool {
        self.rank == self.jacobian.nrows() && self.rank > 0
    }

    pub fn inner(&self, a: &DVector<T>, b: &DVector<T>) -> T {
        linalg::inner(&self.metric, a, b)
    }

    pub fn norm(&self, a: &DVector<T>) -> T {
        linalg::norm(&self.metric, a)
    }

    pub fn target_inner(&self, a: &DVector<T>, b: &DVector<T>) -> T {
        linalg::inner(&self.target_metric, a, b)
    }

    pub fn target_norm(&self, a: &DVector<T>) -> T {
        linalg::norm(&self.target_metric, a)
    }

    pub fn vertical(&self, v: &DVector<T>) -> DVector<T> {
        &self.vertical_projector * v
    }

    pub fn horizontal(&self, v: &DVector<T>) -> DVector<T> {
        &self.horizontal_projector * v
    }

    pub fn push(&self, v: &DVector<T>) -> DVector<T> {
        &self.jacobian * v
    }

    /// `φ v`; panics if the source has no structure (checked upstream).
    pub fn phi(&self, v: &DVector<T>) -> DVector<T> {
        self.phi.as_ref().expect("almost contact structure present") * v
    }

    /// Square dilation from the trace formula.
    pub fn square_dilation(&self) -> T {
        let s = self.jacobian.nrows();
        (&self.target_metric * &self.jacobian * &self.metric_inverse * self.jacobian.transpose()).trace()
            / T::lit(s as f64)
    }

    pub fn source_christoffel(&self, m: &SmoothMapSpec) -> Result<Christoffel<T>, MapError> {
        Ok(christoffel_at(&m.source, &self.point)?)
    }

    pub fn target_christoffel(&self, m: &SmoothMapSpec) -> Result<Christoffel<T>, MapError> {
        Ok(christoffel_at(&m.target, self.image.as_slice())?)
    }
}
