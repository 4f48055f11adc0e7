use nalgebra::{DMatrix, DVector};

use super::{
    constant_matrix, covariant_derivative, covariant_derivative_tensor, GeometryError,
    ManifoldSpec,
};
use crate::expr::Expr;
use crate::linalg;
use crate::sampling::{self, DomainBox};
use crate::scalar::Real;
use crate::verdict::CheckVerdict;

/// Names accepted by [`builtin_by_name`].
pub const BUILTIN_NAMES: [&str; 4] = ["cosym_r5", "cosym_r5_swap", "cosym_r7", "cosym_r7_swap13"];

/// `(φ, ξ, η)` given by expressions; `φ` acts on coordinate column vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct AlmostContactStructure {
    phi: Vec<Vec<Expr>>,
    xi: Vec<Expr>,
    eta: Vec<Expr>,
}

impl AlmostContactStructure {
    pub fn new(phi: Vec<Vec<Expr>>, xi: Vec<Expr>, eta: Vec<Expr>) -> Result<Self, GeometryError> {
        let n = xi.len();
        if eta.len() != n || phi.len() != n || phi.iter().any(|r| r.len() != n) {
            return Err(GeometryError::Shape(format!(
                "phi must be {n}x{n} and xi, eta of length {n}"
            )));
        }
        if phi.iter().flatten().chain(&xi).chain(&eta).any(|e| e.dimension() != n) {
            return Err(GeometryError::Shape(
                "structure expressions are over a chart of the wrong dimension".into(),
            ));
        }
        Ok(AlmostContactStructure { phi, xi, eta })
    }

    pub fn dimension(&self) -> usize {
        self.xi.len()
    }

    pub fn phi_exprs(&self) -> &[Vec<Expr>] {
        &self.phi
    }

    pub fn xi_exprs(&self) -> &[Expr] {
        &self.xi
    }

    pub fn eta_exprs(&self) -> &[Expr] {
        &self.eta
    }

    pub fn phi_at<T: Real>(&self, p: &[T]) -> Result<DMatrix<T>, GeometryError> {
        let n = self.dimension();
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = self.phi[i][j].eval(p)?;
            }
        }
        Ok(m)
    }

    pub fn xi_at<T: Real>(&self, p: &[T]) -> Result<DVector<T>, GeometryError> {
        eval_vector(&self.xi, p)
    }

    pub fn eta_at<T: Real>(&self, p: &[T]) -> Result<DVector<T>, GeometryError> {
        eval_vector(&self.eta, p)
    }
}

fn eval_vector<T: Real>(v: &[Expr], p: &[T]) -> Result<DVector<T>, GeometryError> {
    let values = v.iter().map(|e| e.eval(p)).collect::<Result<Vec<T>, _>>()?;
    Ok(DVector::from_vec(values))
}

/// Which `v`-coordinate each `u`-coordinate is paired with by `φ`, with a
/// sign per pair: `φ(∂u_i) = −s_i ∂v_σ(i)` and `φ(∂v_σ(i)) = s_i ∂u_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pairing {
    sigma: Vec<usize>,
    signs: Vec<i8>,
}

impl Pairing {
    /// `sigma` is 0-based; signs must be ±1.
    pub fn new(sigma: Vec<usize>, signs: Vec<i8>) -> Result<Self, GeometryError> {
        let n = sigma.len();
        if n == 0 {
            return Err(GeometryError::InvalidPairing("empty pairing".into()));
        }
        if signs.len() != n {
            return Err(GeometryError::InvalidPairing(format!(
                "{} signs for {n} pairs",
                signs.len()
            )));
        }
        let mut seen = vec![false; n];
        for &s in &sigma {
            if s >= n || seen[s] {
                return Err(GeometryError::InvalidPairing(format!(
                    "{sigma:?} is not a permutation of 0..{n}"
                )));
            }
            seen[s] = true;
        }
        if signs.iter().any(|&s| s != 1 && s != -1) {
            return Err(GeometryError::InvalidPairing("signs must be +1 or -1".into()));
        }
        Ok(Pairing { sigma, signs })
    }

    pub fn identity(n_pairs: usize) -> Self {
        Pairing {
            sigma: (0..n_pairs).collect(),
            signs: vec![1; n_pairs],
        }
    }

    /// Identity except that `u_i` pairs with `v_j` and `u_j` with `v_i`
    /// (0-based).
    pub fn swap(n_pairs: usize, i: usize, j: usize) -> Self {
        let mut sigma: Vec<usize> = (0..n_pairs).collect();
        sigma.swap(i, j);
        Pairing {
            sigma,
            signs: vec![1; n_pairs],
        }
    }

    pub fn n_pairs(&self) -> usize {
        self.sigma.len()
    }

    pub fn sigma(&self) -> &[usize] {
        &self.sigma
    }

    pub fn is_identity(&self) -> bool {
        self.sigma.iter().enumerate().all(|(i, &s)| i == s) && self.signs.iter().all(|&s| s == 1)
    }
}

/// Flat `R^{2n+1}` with coordinates `(u_1..u_n, v_1..v_n, t)`, `η = dt`,
/// `ξ = ∂t` and `φ` given by the pairing.
pub fn builtin_cosymplectic(
    n_pairs: usize,
    pairing: &Pairing,
) -> Result<(ManifoldSpec, AlmostContactStructure), GeometryError> {
    if n_pairs == 0 || pairing.n_pairs() != n_pairs {
        return Err(GeometryError::InvalidPairing(format!(
            "pairing has {} pairs, expected {n_pairs}",
            pairing.n_pairs()
        )));
    }
    let dim = 2 * n_pairs + 1;
    let manifold = ManifoldSpec::euclidean(dim, DomainBox::cube(dim, -1.0, 1.0));
    let mut phi = vec![vec![0.0; dim]; dim];
    for i in 0..n_pairs {
        let v = n_pairs + pairing.sigma[i];
        let s = f64::from(pairing.signs[i]);
        // column u_i holds φ(∂u_i), column v holds φ(∂v)
        phi[v][i] = -s;
        phi[i][v] = s;
    }
    let t = dim - 1;
    let xi = (0..dim)
        .map(|k| Expr::constant(if k == t { 1.0 } else { 0.0 }, dim))
        .collect::<Vec<_>>();
    let eta = xi.clone();
    let acs = AlmostContactStructure::new(constant_matrix(&phi, dim), xi, eta)?;
    Ok((manifold, acs))
}

pub fn builtin_by_name(name: &str) -> Option<(ManifoldSpec, AlmostContactStructure)> {
    let (n, pairing) = match name {
        "cosym_r5" => (2, Pairing::identity(2)),
        "cosym_r5_swap" => (2, Pairing::swap(2, 0, 1)),
        "cosym_r7" => (3, Pairing::identity(3)),
        "cosym_r7_swap13" => (3, Pairing::swap(3, 0, 2)),
        _ => return None,
    };
    builtin_cosymplectic(n, &pairing).ok()
}

/// Residuals of the structure equations at one point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StructureResiduals {
    /// `φ² + I − ξ⊗η`, `φξ`, `η∘φ`, `η(ξ) − 1` (max abs entry).
    pub algebraic: f64,
    /// `g(φX, φY) − g(X, Y) + η(X)η(Y)` over coordinate pairs.
    pub compatibility: f64,
    /// `∇φ` and `∇ξ` along every coordinate direction.
    pub parallel: f64,
}

pub fn structure_residuals_at<T: Real>(
    m: &ManifoldSpec,
    acs: &AlmostContactStructure,
    p: &[T],
) -> Result<StructureResiduals, GeometryError> {
    let n = m.dimension();
    if acs.dimension() != n {
        return Err(GeometryError::Shape(format!(
            "structure has dimension {}, manifold {n}",
            acs.dimension()
        )));
    }
    let g = m.metric_at(p)?;
    let phi = acs.phi_at(p)?;
    let xi = acs.xi_at(p)?;
    let eta = acs.eta_at(p)?;
    let id = DMatrix::<T>::identity(n, n);
    let square = &phi * &phi + &id - &xi * eta.transpose();
    let algebraic = [
        linalg::max_abs(&square),
        linalg::max_abs_vec(&(&phi * &xi)),
        linalg::max_abs_vec(&(phi.transpose() * &eta)),
        (eta.dot(&xi) - T::one()).abs(),
    ]
    .into_iter()
    .fold(T::zero(), |a, b| a.max(b));

    let g_eta = &eta * eta.transpose();
    let compatibility = linalg::max_abs(&(phi.transpose() * &g * &phi - &g + g_eta));

    let mut parallel = T::zero();
    for k in 0..n {
        let mut e = DVector::zeros(n);
        e[k] = T::one();
        let dphi = covariant_derivative_tensor(m, acs.phi_exprs(), &e, p)?;
        let dxi = covariant_derivative(m, acs.xi_exprs(), &e, p)?;
        parallel = parallel.max(linalg::max_abs(&dphi)).max(linalg::max_abs_vec(&dxi));
    }
    Ok(StructureResiduals {
        algebraic: algebraic.as_f64(),
        compatibility: compatibility.as_f64(),
        parallel: parallel.as_f64(),
    })
}

/// Samples the structure equations and the parallelism of `φ` and `ξ`.
/// `lhs_residual` is the algebraic part (including metric compatibility),
/// `rhs_residual` the covariant-derivative part.
pub fn check_cosymplectic(
    m: &ManifoldSpec,
    acs: &AlmostContactStructure,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<CheckVerdict, GeometryError> {
    let points = sampling::sample_points(m.domain_box(), samples, seed);
    let mut algebraic = 0.0_f64;
    let mut parallel = 0.0_f64;
    for p in &points {
        let r = structure_residuals_at::<f64>(m, acs, p)?;
        algebraic = algebraic.max(r.algebraic).max(r.compatibility);
        parallel = parallel.max(r.parallel);
    }
    Ok(CheckVerdict::identity(
        "cosym-structure",
        points.len(),
        tol,
        (algebraic, Some(parallel)),
    ))
}
