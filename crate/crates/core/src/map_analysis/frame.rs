use nalgebra::{DMatrix, DVector};

use super::{MapError, PointData, SmoothMapSpec};
use crate::linalg;
use crate::scalar::Real;

/// Singular values below this fraction of the largest count as zero.
pub const DEFAULT_TOL_RANK: f64 = 1e-8;

/// Absolute cut-off when orthonormalizing images of unit frame vectors.
const SPAN_TOL: f64 = 1e-8;

/// `ξ` counts as vertical when its horizontal part is below this.
const XI_VERTICAL_TOL: f64 = 1e-8;

/// Orthonormal frames adapted to `ψ` at one point.
#[derive(Clone, Debug)]
pub struct FrameDecomposition<T: Real> {
    pub data: PointData<T>,
    /// Basis of `ker ψ*`; when `ξ` is vertical it is the last element and the
    /// others are orthogonal to it.
    pub vertical: Vec<DVector<T>>,
    /// Basis of `(ker ψ*)^⊥`.
    pub horizontal: Vec<DVector<T>>,
    pub xi_index: Option<usize>,
    /// `|h ξ̂|`, zero up to rounding for every map that ignores `t`.
    pub xi_horizontal_norm: T,
    /// Basis of `E(ker ψ*)`.
    pub e_kernel: Vec<DVector<T>>,
    /// Basis of the complement `μ` of `E(ker ψ*)` in the horizontal space.
    pub mu: Vec<DVector<T>>,
}

impl<T: Real> FrameDecomposition<T> {
    pub fn dimension(&self) -> usize {
        self.data.dimension()
    }

    pub fn is_submersion(&self) -> bool {
        self.data.is_submersion()
    }

    /// Vertical vectors orthogonal to `ξ` (all of them when `ξ` is absent or
    /// not vertical).
    pub fn vertical_without_xi(&self) -> Vec<DVector<T>> {
        self.vertical
            .iter()
            .enumerate()
            .filter(|(i, _)| Some(*i) != self.xi_index)
            .map(|(_, v)| v.clone())
            .collect()
    }

    /// Vertical frame followed by the horizontal frame.
    pub fn full(&self) -> Vec<DVector<T>> {
        self.vertical.iter().chain(&self.horizontal).cloned().collect()
    }

    pub fn vertical_projector(&self) -> DMatrix<T> {
        linalg::projector(&self.data.metric, &self.vertical, self.dimension())
    }

    pub fn horizontal_projector(&self) -> DMatrix<T> {
        linalg::projector(&self.data.metric, &self.horizontal, self.dimension())
    }

    /// Gram matrix of the full frame minus the identity.
    pub fn orthonormality_residual(&self) -> T {
        let full = self.full();
        let n = full.len();
        let gram = DMatrix::from_fn(n, n, |i, j| self.data.inner(&full[i], &full[j]));
        let mut r = linalg::max_abs(&(gram - DMatrix::identity(n, n)));
        if n != self.dimension() {
            r = r.max(T::one());
        }
        r
    }
}

/// Splits `T_pN` into vertical and horizontal parts and locates `ξ`,
/// `E(ker ψ*)` and `μ`.
pub fn frame_at<T: Real>(
    m: &SmoothMapSpec,
    p: &[T],
    tol_rank: f64,
) -> Result<FrameDecomposition<T>, MapError> {
    let data = PointData::new(m, p, tol_rank)?;
    let n = data.dimension();
    let g = &data.metric;

    // rows of ψ* raised by g span the horizontal space
    let raised = &data.metric_inverse * data.jacobian.transpose();
    let columns: Vec<DVector<T>> = raised.column_iter().map(|c| c.into_owned()).collect();
    let largest = columns.iter().map(|c| linalg::norm(g, c)).fold(T::zero(), |a, b| a.max(b));
    let horizontal = if data.rank == 0 {
        Vec::new()
    } else {
        let mut h = linalg::orthonormalize_pivoted(g, columns, largest * T::lit(tol_rank));
        h.truncate(data.rank);
        h
    };

    let strip = |v: &DVector<T>| -> DVector<T> {
        let mut w = v.clone();
        for b in &horizontal {
            let c = linalg::inner(g, b, &w);
            w.axpy(-c, b, T::one());
        }
        w
    };
    let unit = |k: usize| {
        let mut e = DVector::zeros(n);
        e[k] = T::one();
        e
    };

    let xi_hat = data.xi.as_ref().and_then(|xi| {
        let len = linalg::norm(g, xi);
        (len > T::zero()).then(|| xi / len)
    });
    let xi_horizontal_norm = match &xi_hat {
        Some(x) => linalg::norm(g, &(x - strip(x))),
        None => T::zero(),
    };
    let xi_vertical = xi_hat
        .as_ref()
        .filter(|_| xi_horizontal_norm.as_f64() < XI_VERTICAL_TOL)
        .map(strip)
        .map(|x| {
            let len = linalg::norm(g, &x);
            x / len
        });

    let vertical_dim = n - horizontal.len();
    let mut candidates: Vec<DVector<T>> = (0..n).map(|k| strip(&unit(k))).collect();
    if let Some(x) = &xi_vertical {
        for c in candidates.iter_mut() {
            let k = linalg::inner(g, x, c);
            c.axpy(-k, x, T::one());
        }
    }
    let mut vertical = linalg::orthonormalize_pivoted(g, candidates, T::lit(tol_rank));
    let xi_index = xi_vertical.map(|x| {
        vertical.truncate(vertical_dim.saturating_sub(1));
        vertical.push(x);
        vertical.len() - 1
    });
    vertical.truncate(vertical_dim);

    let (e_kernel, mu) = match &data.phi {
        Some(phi) => {
            let images: Vec<DVector<T>> = vertical.iter().map(|v| strip_to_horizontal(g, &horizontal, &(phi * v))).collect();
            let e_kernel = linalg::orthonormalize_pivoted(g, images, T::lit(SPAN_TOL));
            let rest: Vec<DVector<T>> = horizontal
                .iter()
                .map(|x| {
                    let mut w = x.clone();
                    for b in &e_kernel {
                        let c = linalg::inner(g, b, &w);
                        w.axpy(-c, b, T::one());
                    }
                    w
                })
                .collect();
            let mut mu = linalg::orthonormalize_pivoted(g, rest, T::lit(SPAN_TOL));
            mu.truncate(horizontal.len() - e_kernel.len().min(horizontal.len()));
            (e_kernel, mu)
        }
        None => (Vec::new(), Vec::new()),
    };

    Ok(FrameDecomposition {
        data,
        vertical,
        horizontal,
        xi_index,
        xi_horizontal_norm,
        e_kernel,
        mu,
    })
}

fn strip_to_horizontal<T: Real>(g: &DMatrix<T>, horizontal: &[DVector<T>], v: &DVector<T>) -> DVector<T> {
    horizontal.iter().fold(DVector::zeros(v.len()), |acc, b| acc + b * linalg::inner(g, b, v))
}

/// `φ = D + E` on vertical and `φ = d + e` on horizontal vectors.
#[derive(Clone, Debug)]
pub struct SlantDecomposition<T: Real> {
    /// `D = vφv` as an operator on coordinate vectors.
    pub big_d: DMatrix<T>,
    /// `E = hφv`.
    pub big_e: DMatrix<T>,
    /// `d = vφh`.
    pub small_d: DMatrix<T>,
    /// `e = hφh`.
    pub small_e: DMatrix<T>,
    /// `g(V_i, D V_j)`, vertical × vertical.
    pub frame_big_d: DMatrix<T>,
    /// `g(X_a, E V_j)`, horizontal × vertical.
    pub frame_big_e: DMatrix<T>,
    /// `g(V_i, d X_b)`, vertical × horizontal.
    pub frame_small_d: DMatrix<T>,
    /// `g(X_a, e X_b)`, horizontal × horizontal.
    pub frame_small_e: DMatrix<T>,
    /// Largest `|φF − (frame expansion of φF)|` over frame vectors `F`.
    pub residual: T,
}

pub fn slant_decomposition<T: Real>(frame: &FrameDecomposition<T>) -> Result<SlantDecomposition<T>, MapError> {
    let phi = frame.data.phi.as_ref().ok_or(MapError::NoStructure)?;
    let pv = frame.vertical_projector();
    let ph = frame.horizontal_projector();
    let big_d = &pv * phi * &pv;
    let big_e = &ph * phi * &pv;
    let small_d = &pv * phi * &ph;
    let small_e = &ph * phi * &ph;
    let d = &frame.data;
    let block = |rows: &[DVector<T>], cols: &[DVector<T>]| {
        DMatrix::from_fn(rows.len(), cols.len(), |i, j| d.inner(&rows[i], &(phi * &cols[j])))
    };
    let v = &frame.vertical;
    let h = &frame.horizontal;
    let mut residual = T::zero();
    for f in v.iter().chain(h) {
        let image = phi * f;
        let expanded = v
            .iter()
            .chain(h)
            .fold(DVector::zeros(f.len()), |acc, b| acc + b * d.inner(b, &image));
        residual = residual.max(d.norm(&(image - expanded)));
    }
    Ok(SlantDecomposition {
        frame_big_d: block(v, v),
        frame_big_e: block(h, v),
        frame_small_d: block(v, h),
        frame_small_e: block(h, h),
        big_d,
        big_e,
        small_d,
        small_e,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::map_analysis::tests::linear_map;

    fn in_span(frame: &FrameDecomposition<f64>, basis: &[DVector<f64>], v: &[f64]) -> f64 {
        let v = DVector::from_column_slice(v);
        let v = &v / frame.data.norm(&v);
        let proj = basis.iter().fold(DVector::zeros(v.len()), |a, b| a + b * frame.data.inner(b, &v));
        frame.data.norm(&(v - proj))
    }

    #[test]
    fn psi2_kernel_contains_listed_directions() {
        let m = linear_map("cosym_r5", 2, &["pi^5*(x1-x2)/sqrt(2)", "pi^5*x4"]);
        let f = frame_at::<f64>(&m, &[0.2, 0.4, -0.3, 0.1, 0.5], DEFAULT_TOL_RANK).unwrap();
        assert_eq!(f.vertical.len(), 3);
        assert_eq!(f.horizontal.len(), 2);
        for v in [[1.0, 1.0, 0.0, 0.0, 0.0], [0.0, 0.0, 1.0, 0.0, 0.0], [0.0, 0.0, 0.0, 0.0, 1.0]] {
            assert!(in_span(&f, &f.vertical, &v) < 1e-10);
        }
        assert_eq!(f.xi_index, Some(2));
        assert!(f.orthonormality_residual() < 1e-10);
        // E(ker) is all of the horizontal space
        assert_eq!(f.e_kernel.len(), 2);
        assert!(f.mu.is_empty());
    }

    #[test]
    fn psi1_kernel_contains_rotated_direction() {
        let a = std::f64::consts::FRAC_PI_6;
        let m = linear_map(
            "cosym_r5",
            2,
            &[
                &format!("exp(7)*(x1*cos({a}) - x3*sin({a}))"),
                &format!("exp(7)*(x2*sin({a}) - x4*cos({a}))"),
            ],
        );
        let f = frame_at::<f64>(&m, &[0.0; 5], DEFAULT_TOL_RANK).unwrap();
        assert!(in_span(&f, &f.vertical, &[a.sin(), 0.0, a.cos(), 0.0, 0.0]) < 1e-10);
    }

    #[test]
    fn constant_map_is_critical() {
        let m = linear_map("cosym_r5", 2, &["1", "2"]);
        let f = frame_at::<f64>(&m, &[0.0; 5], DEFAULT_TOL_RANK).unwrap();
        assert_eq!(f.data.rank, 0);
        assert!(!f.is_submersion());
        assert!(f.horizontal.is_empty());
        assert_eq!(f.vertical.len(), 5);
    }

    #[test]
    fn psi2_split_of_dv1() {
        let m = linear_map("cosym_r5", 2, &["pi^5*(x1-x2)/sqrt(2)", "pi^5*x4"]);
        let f = frame_at::<f64>(&m, &[0.0; 5], DEFAULT_TOL_RANK).unwrap();
        let s = slant_decomposition(&f).unwrap();
        let v = DVector::from_column_slice(&[0.0, 0.0, 1.0, 0.0, 0.0]);
        let dv = &s.big_d * &v;
        let want = DVector::from_column_slice(&[0.5, 0.5, 0.0, 0.0, 0.0]);
        assert!((dv - want).amax() < 1e-12);
        assert!(s.residual < 1e-10);
        let xi = DVector::from_column_slice(&[0.0, 0.0, 0.0, 0.0, 1.0]);
        assert!((&s.big_d * &xi).amax() < 1e-15 && (&s.big_e * &xi).amax() < 1e-15);
    }

    #[test]
    fn psi1_identity_pairing_has_no_vertical_part() {
        let a = std::f64::consts::FRAC_PI_6;
        let m = linear_map(
            "cosym_r5",
            2,
            &[
                &format!("exp(7)*(x1*cos({a}) - x3*sin({a}))"),
                &format!("exp(7)*(x2*sin({a}) - x4*cos({a}))"),
            ],
        );
        let f = frame_at::<f64>(&m, &[0.0; 5], DEFAULT_TOL_RANK).unwrap();
        let s = slant_decomposition(&f).unwrap();
        let v1 = DVector::from_column_slice(&[a.sin(), 0.0, a.cos(), 0.0, 0.0]);
        assert!((&s.big_d * v1).amax() < 1e-12);
    }
}
