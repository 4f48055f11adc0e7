//! Charted Riemannian manifolds, the Levi-Civita connection, and almost
//! contact metric structures.

mod structure;

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::expr::{self, EvalError, Expr, ParseError};
use crate::linalg;
use crate::sampling::DomainBox;
use crate::scalar::Real;

pub use structure::{
    builtin_by_name, builtin_cosymplectic, check_cosymplectic, AlmostContactStructure, Pairing,
    structure_residuals_at, StructureResiduals, BUILTIN_NAMES,
};

/// Smallest admissible eigenvalue of an evaluated metric.
pub const MIN_METRIC_EIGENVALUE: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("{context}: {source}")]
    Parse {
        context: String,
        #[source]
        source: ParseError,
    },
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("{0}")]
    Shape(String),
    #[error("metric is not symmetric: g[{0}][{1}] differs from g[{1}][{0}]")]
    NotSymmetric(usize, usize),
    #[error("metric not positive definite at the point (smallest eigenvalue {0:e})")]
    NotPositiveDefinite(f64),
    #[error("invalid pairing: {0}")]
    InvalidPairing(String),
}

/// Parses a matrix of expression strings, reporting the failing entry.
pub fn parse_matrix(
    rows: &[Vec<String>],
    dimension: usize,
    what: &str,
) -> Result<Vec<Vec<Expr>>, GeometryError> {
    rows.iter()
        .enumerate()
        .map(|(i, row)| {
            row.iter()
                .enumerate()
                .map(|(j, src)| {
                    expr::parse(src, dimension).map_err(|source| GeometryError::Parse {
                        context: format!("{what}[{i}][{j}]"),
                        source,
                    })
                })
                .collect()
        })
        .collect()
}

pub fn parse_vector(
    items: &[String],
    dimension: usize,
    what: &str,
) -> Result<Vec<Expr>, GeometryError> {
    items
        .iter()
        .enumerate()
        .map(|(i, src)| {
            expr::parse(src, dimension).map_err(|source| GeometryError::Parse {
                context: format!("{what}[{i}]"),
                source,
            })
        })
        .collect()
}

pub(crate) fn constant_matrix(m: &[Vec<f64>], dimension: usize) -> Vec<Vec<Expr>> {
    m.iter()
        .map(|row| row.iter().map(|&c| Expr::constant(c, dimension)).collect())
        .collect()
}

/// A coordinate chart with a metric given by expressions.
#[derive(Clone, Debug, PartialEq)]
pub struct ManifoldSpec {
    dimension: usize,
    metric: Vec<Vec<Expr>>,
    domain_box: DomainBox,
}

impl ManifoldSpec {
    pub fn new(metric: Vec<Vec<Expr>>, domain_box: DomainBox) -> Result<Self, GeometryError> {
        let n = metric.len();
        if n == 0 {
            return Err(GeometryError::Shape("metric must be non-empty".into()));
        }
        for (i, row) in metric.iter().enumerate() {
            if row.len() != n {
                return Err(GeometryError::Shape(format!(
                    "metric row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            for (j, e) in row.iter().enumerate() {
                if e.dimension() != n {
                    return Err(GeometryError::Shape(format!(
                        "metric entry [{i}][{j}] is over a chart of dimension {}",
                        e.dimension()
                    )));
                }
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if metric[i][j] != metric[j][i] {
                    return Err(GeometryError::NotSymmetric(i, j));
                }
            }
        }
        if domain_box.dimension() != n || !domain_box.is_valid() {
            return Err(GeometryError::Shape(format!(
                "domain box must have {n} valid intervals"
            )));
        }
        Ok(ManifoldSpec {
            dimension: n,
            metric,
            domain_box,
        })
    }

    /// Flat metric `δ_ij`.
    pub fn euclidean(dimension: usize, domain_box: DomainBox) -> Self {
        let id: Vec<Vec<f64>> = (0..dimension)
            .map(|i| (0..dimension).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        ManifoldSpec::new(constant_matrix(&id, dimension), domain_box)
            .expect("euclidean metric is well formed")
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn metric_exprs(&self) -> &[Vec<Expr>] {
        &self.metric
    }

    pub fn domain_box(&self) -> &DomainBox {
        &self.domain_box
    }

    pub fn with_domain_box(mut self, domain_box: DomainBox) -> Result<Self, GeometryError> {
        if domain_box.dimension() != self.dimension || !domain_box.is_valid() {
            return Err(GeometryError::Shape("domain box dimension mismatch".into()));
        }
        self.domain_box = domain_box;
        Ok(self)
    }

    /// True when every metric entry is a literal constant.
    pub fn is_constant(&self) -> bool {
        self.metric.iter().flatten().all(|e| e.as_constant().is_some())
    }

    pub fn metric_at<T: Real>(&self, p: &[T]) -> Result<DMatrix<T>, GeometryError> {
        let n = self.dimension;
        let mut g = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v = self.metric[i][j].eval(p)?;
                g[(i, j)] = v;
                g[(j, i)] = v;
            }
        }
        Ok(g)
    }

    /// Metric and its coordinate derivatives `∂_k g` (exact).
    pub fn metric_with_derivatives<T: Real>(
        &self,
        p: &[T],
    ) -> Result<(DMatrix<T>, Vec<DMatrix<T>>), GeometryError> {
        let n = self.dimension;
        let mut g = DMatrix::zeros(n, n);
        let mut dg = vec![DMatrix::zeros(n, n); n];
        for i in 0..n {
            for j in i..n {
                let e = &self.metric[i][j];
                if let Some(c) = e.as_constant() {
                    g[(i, j)] = T::lit(c);
                    g[(j, i)] = T::lit(c);
                    continue;
                }
                let d = e.eval_dual(p)?;
                g[(i, j)] = d.value;
                g[(j, i)] = d.value;
                for (k, dk) in d.derivatives.iter().enumerate() {
                    dg[k][(i, j)] = *dk;
                    dg[k][(j, i)] = *dk;
                }
            }
        }
        Ok((g, dg))
    }

    /// Smallest eigenvalue of the metric at `p`.
    pub fn metric_min_eigenvalue<T: Real>(&self, p: &[T]) -> Result<T, GeometryError> {
        Ok(linalg::min_eigenvalue(&self.metric_at(p)?))
    }

    /// Metric and inverse, failing when the metric is not positive definite.
    pub fn metric_and_inverse<T: Real>(
        &self,
        p: &[T],
    ) -> Result<(DMatrix<T>, DMatrix<T>), GeometryError> {
        let g = self.metric_at(p)?;
        positive_definite_inverse(&g).map(|inv| (g, inv))
    }
}

fn positive_definite_inverse<T: Real>(g: &DMatrix<T>) -> Result<DMatrix<T>, GeometryError> {
    let min = linalg::min_eigenvalue(g);
    if min.as_f64() <= MIN_METRIC_EIGENVALUE {
        return Err(GeometryError::NotPositiveDefinite(min.as_f64()));
    }
    linalg::spd_inverse(g).ok_or(GeometryError::NotPositiveDefinite(min.as_f64()))
}

/// Christoffel symbols `Γ^k_ij` of the Levi-Civita connection at a point.
#[derive(Clone, Debug, PartialEq)]
pub struct Christoffel<T: Real> {
    /// `gamma[k][(i, j)] = Γ^k_ij`
    gamma: Vec<DMatrix<T>>,
}

impl<T: Real> Christoffel<T> {
    pub fn dimension(&self) -> usize {
        self.gamma.len()
    }

    pub fn get(&self, k: usize, i: usize, j: usize) -> T {
        self.gamma[k][(i, j)]
    }

    /// `Γ(X, Y)^k = Γ^k_ij X^i Y^j`.
    pub fn contract(&self, x: &DVector<T>, y: &DVector<T>) -> DVector<T> {
        DVector::from_iterator(
            self.gamma.len(),
            self.gamma.iter().map(|gk| (x.transpose() * gk * y)[(0, 0)]),
        )
    }

    /// Matrix `Γ_X` with `(Γ_X)^k_j = Γ^k_ij X^i`.
    pub fn along(&self, x: &DVector<T>) -> DMatrix<T> {
        let n = self.gamma.len();
        DMatrix::from_fn(n, n, |k, j| {
            (0..n).fold(T::zero(), |acc, i| acc + self.gamma[k][(i, j)] * x[i])
        })
    }

    pub fn max_abs(&self) -> T {
        self.gamma
            .iter()
            .fold(T::zero(), |a, m| a.max(linalg::max_abs(m)))
    }
}

/// `Γ^k_ij = ½ g^{kl}(∂_i g_jl + ∂_j g_il − ∂_l g_ij)`.
pub fn christoffel_at<T: Real>(m: &ManifoldSpec, p: &[T]) -> Result<Christoffel<T>, GeometryError> {
    let n = m.dimension();
    if m.is_constant() {
        return Ok(Christoffel {
            gamma: vec![DMatrix::zeros(n, n); n],
        });
    }
    let (g, dg) = m.metric_with_derivatives(p)?;
    let ginv = positive_definite_inverse(&g)?;
    let half = T::lit(0.5);
    // lowered symbols Γ_{l,ij}
    let lowered: Vec<DMatrix<T>> = (0..n)
        .map(|l| DMatrix::from_fn(n, n, |i, j| half * (dg[i][(j, l)] + dg[j][(i, l)] - dg[l][(i, j)])))
        .collect();
    let gamma = (0..n)
        .map(|k| {
            let mut gk = DMatrix::zeros(n, n);
            for (l, low) in lowered.iter().enumerate() {
                let c = ginv[(k, l)];
                if c != T::zero() {
                    gk += low * c;
                }
            }
            gk
        })
        .collect();
    Ok(Christoffel { gamma })
}

/// Largest entry of `∇_k g_ij = ∂_k g_ij − Γ^l_ki g_lj − Γ^l_kj g_il`.
pub fn metric_compatibility_residual<T: Real>(m: &ManifoldSpec, p: &[T]) -> Result<T, GeometryError> {
    let n = m.dimension();
    let (g, dg) = m.metric_with_derivatives(p)?;
    let gamma = christoffel_at(m, p)?;
    let mut worst = T::zero();
    for (k, dgk) in dg.iter().enumerate() {
        let mut e = DVector::zeros(n);
        e[k] = T::one();
        let gk = gamma.along(&e);
        let r = dgk - gk.transpose() * &g - &g * &gk;
        worst = worst.max(linalg::max_abs(&r));
    }
    Ok(worst)
}

/// `(∇_X Y)^k = X^i ∂_i Y^k + Γ^k_ij X^i Y^j` for a vector field given by
/// component expressions.
pub fn covariant_derivative<T: Real>(
    m: &ManifoldSpec,
    field: &[Expr],
    direction: &DVector<T>,
    p: &[T],
) -> Result<DVector<T>, GeometryError> {
    let n = m.dimension();
    if field.len() != n || direction.len() != n {
        return Err(GeometryError::Shape("field/direction dimension mismatch".into()));
    }
    let gamma = christoffel_at(m, p)?;
    let mut value = DVector::zeros(n);
    let mut out = DVector::zeros(n);
    for (k, e) in field.iter().enumerate() {
        let d = e.eval_dual(p)?;
        value[k] = d.value;
        out[k] = d
            .derivatives
            .iter()
            .zip(direction.iter())
            .fold(T::zero(), |a, (&dk, &xk)| a + dk * xk);
    }
    Ok(out + gamma.contract(direction, &value))
}

/// `(∇_X A)^k_j = X^i ∂_i A^k_j + Γ^k_il X^i A^l_j − A^k_l Γ^l_ij X^i` for a
/// (1,1)-tensor field.
pub fn covariant_derivative_tensor<T: Real>(
    m: &ManifoldSpec,
    tensor: &[Vec<Expr>],
    direction: &DVector<T>,
    p: &[T],
) -> Result<DMatrix<T>, GeometryError> {
    let n = m.dimension();
    let gamma = christoffel_at(m, p)?;
    let mut value = DMatrix::zeros(n, n);
    let mut deriv = DMatrix::zeros(n, n);
    for k in 0..n {
        for j in 0..n {
            let e = &tensor[k][j];
            if let Some(c) = e.as_constant() {
                value[(k, j)] = T::lit(c);
                continue;
            }
            let d = e.eval_dual(p)?;
            value[(k, j)] = d.value;
            deriv[(k, j)] = d
                .derivatives
                .iter()
                .zip(direction.iter())
                .fold(T::zero(), |a, (&dk, &xk)| a + dk * xk);
        }
    }
    let gx = gamma.along(direction);
    Ok(deriv + &gx * &value - &value * &gx)
}
