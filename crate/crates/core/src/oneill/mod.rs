//! O'Neill tensors, the second fundamental form of the map, the tension
//! field and the mean curvature of the fibres, each from its definition.
//!
//! Frame vectors at the base point are extended to vector fields on a small
//! neighbourhood ([`Extension`]); covariant derivatives of such fields are
//! central differences along the frame directions plus the Christoffel term
//! at the base point.

mod identities;

use nalgebra::DVector;

use crate::geometry::Christoffel;
use crate::linalg;
use crate::map_analysis::{FrameDecomposition, MapError, PointData, SmoothMapSpec, DEFAULT_TOL_RANK};
use crate::scalar::Real;

pub use identities::{
    a_alternation_residual, closed_form_a_residual, derivative_identities, lemma_residuals,
    skew_symmetry_residuals, tensoriality_residual, tension_conformal_formula, DerivativeIdentities,
    LemmaResiduals, SkewResiduals,
};

/// How frame vectors at the base point become vector fields nearby.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Extension {
    /// `F(q)`: ordered Gram–Schmidt at `q` of the vertical (horizontal)
    /// projection at `q` of `F(p)`; orthonormal and adapted everywhere.
    Projected,
    /// `F_j(q) = (1 + ⟨c_j, q − p⟩) P(q) F(p)` for fixed vectors `c_j`;
    /// adapted but neither normalized nor orthogonal off `p`.
    Scaled,
}

/// Point data and extended frame at one point of the neighbourhood.
#[derive(Clone, Debug)]
pub struct Local<T: Real> {
    pub data: PointData<T>,
    /// Extended vertical frame followed by the extended horizontal frame.
    pub frame: Vec<DVector<T>>,
    vertical_count: usize,
}

impl<T: Real> Local<T> {
    pub fn vertical_count(&self) -> usize {
        self.vertical_count
    }

    pub fn field(&self, j: usize) -> &DVector<T> {
        &self.frame[j]
    }

    pub fn pv(&self, v: &DVector<T>) -> DVector<T> {
        self.data.vertical(v)
    }

    pub fn ph(&self, v: &DVector<T>) -> DVector<T> {
        self.data.horizontal(v)
    }

    /// Panics when the source has no almost contact structure.
    pub fn phi(&self, v: &DVector<T>) -> DVector<T> {
        self.data.phi(v)
    }

    /// `D v = vφv`
    pub fn big_d(&self, v: &DVector<T>) -> DVector<T> {
        self.pv(&self.phi(&self.pv(v)))
    }

    /// `E v = hφv`
    pub fn big_e(&self, v: &DVector<T>) -> DVector<T> {
        self.ph(&self.phi(&self.pv(v)))
    }

    /// `d x = vφh`
    pub fn small_d(&self, v: &DVector<T>) -> DVector<T> {
        self.pv(&self.phi(&self.ph(v)))
    }

    /// `e x = hφh`
    pub fn small_e(&self, v: &DVector<T>) -> DVector<T> {
        self.ph(&self.phi(&self.ph(v)))
    }
}

/// The base frame together with point data at `p ± h E_j` for every frame
/// vector `E_j`.
#[derive(Clone, Debug)]
pub struct Neighborhood<T: Real> {
    pub frame: FrameDecomposition<T>,
    pub center: Local<T>,
    plus: Vec<Local<T>>,
    minus: Vec<Local<T>>,
    pub extension: Extension,
    pub step: T,
    pub source_christoffel: Christoffel<T>,
    pub target_christoffel: Christoffel<T>,
    /// `∇ ln λ` at `p`.
    pub grad_ln_dilation: DVector<T>,
    /// `λ(p)`.
    pub dilation: T,
}

fn scale_vector<T: Real>(j: usize, n: usize) -> DVector<T> {
    DVector::from_fn(n, |k, _| T::lit(0.5 * (1.7 * (j + 1) as f64 + 0.9 * (k + 1) as f64).sin()))
}

impl<T: Real> Neighborhood<T> {
    pub fn new(m: &SmoothMapSpec, frame: FrameDecomposition<T>, extension: Extension) -> Result<Self, MapError> {
        if !frame.is_submersion() {
            return Err(MapError::NotSubmersion {
                rank: frame.data.rank,
                target: m.target_dimension(),
            });
        }
        let step = T::fd_step();
        let base = DVector::from_column_slice(&frame.data.point);
        let full = frame.full();
        let build = |q: &DVector<T>| -> Result<Local<T>, MapError> {
            let data = PointData::new(m, q.as_slice(), DEFAULT_TOL_RANK)?;
            if !data.is_submersion() {
                return Err(MapError::NotSubmersion {
                    rank: data.rank,
                    target: m.target_dimension(),
                });
            }
            let k = frame.vertical.len();
            let vertical: Vec<DVector<T>> = frame.vertical.iter().map(|v| data.vertical(v)).collect();
            let horizontal: Vec<DVector<T>> = frame.horizontal.iter().map(|x| data.horizontal(x)).collect();
            let fields = match extension {
                Extension::Projected => {
                    let mut f = linalg::orthonormalize_ordered(&data.metric, &vertical);
                    f.extend(linalg::orthonormalize_ordered(&data.metric, &horizontal));
                    f
                }
                Extension::Scaled => {
                    let offset = q - &base;
                    vertical
                        .into_iter()
                        .chain(horizontal)
                        .enumerate()
                        .map(|(j, v)| v * (T::one() + scale_vector::<T>(j, offset.len()).dot(&offset)))
                        .collect()
                }
            };
            Ok(Local {
                data,
                frame: fields,
                vertical_count: k,
            })
        };
        let center = build(&base)?;
        let mut plus = Vec::with_capacity(full.len());
        let mut minus = Vec::with_capacity(full.len());
        for e in &full {
            plus.push(build(&(&base + e * step))?);
            minus.push(build(&(&base - e * step))?);
        }
        let source_christoffel = frame.data.source_christoffel(m)?;
        let target_christoffel = frame.data.target_christoffel(m)?;
        let grad_ln_dilation = m.grad_ln_dilation(&frame.data.point)?;
        let dilation = frame.data.square_dilation().sqrt();
        Ok(Neighborhood {
            frame,
            center,
            plus,
            minus,
            extension,
            step,
            source_christoffel,
            target_christoffel,
            grad_ln_dilation,
            dilation,
        })
    }

    /// Number of frame vectors (the source dimension).
    pub fn len(&self) -> usize {
        self.plus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.plus.is_empty()
    }

    pub fn vertical_count(&self) -> usize {
        self.frame.vertical.len()
    }

    /// Base frame vector `E_j` (vertical first).
    pub fn direction(&self, j: usize) -> &DVector<T> {
        self.center.field(j)
    }

    pub fn data(&self) -> &PointData<T> {
        &self.center.data
    }

    fn difference(&self, dir: usize, f: &impl Fn(&Local<T>) -> DVector<T>) -> DVector<T> {
        (f(&self.plus[dir]) - f(&self.minus[dir])) / (self.step + self.step)
    }

    /// `∇_{E_dir} F` for the field `F` evaluated by `f`.
    pub fn nabla(&self, dir: usize, f: impl Fn(&Local<T>) -> DVector<T>) -> DVector<T> {
        let value = f(&self.center);
        self.difference(dir, &f) + self.source_christoffel.contract(self.direction(dir), &value)
    }

    /// `∇^ψ_{E_dir} ψ*F` for the field `F` evaluated by `f`.
    pub fn nabla_pullback(&self, dir: usize, f: impl Fn(&Local<T>) -> DVector<T>) -> DVector<T> {
        let pushed = |l: &Local<T>| l.data.push(&f(l));
        let value = self.center.data.push(&f(&self.center));
        let y = self.center.data.push(self.direction(dir));
        self.difference(dir, &pushed) + self.target_christoffel.contract(&y, &value)
    }

    /// `[E_a, E_b]` from coordinate derivatives of the extended frame.
    pub fn bracket(&self, a: usize, b: usize) -> DVector<T> {
        self.difference(a, &|l: &Local<T>| l.field(b).clone())
            - self.difference(b, &|l: &Local<T>| l.field(a).clone())
    }

    /// `Y(ln λ) = g(Y, ∇ln λ)`.
    pub fn d_ln_dilation(&self, y: &DVector<T>) -> T {
        self.center.data.inner(y, &self.grad_ln_dilation)
    }

    /// Coordinates of `v` in the base frame.
    pub fn coordinates(&self, v: &DVector<T>) -> Vec<T> {
        (0..self.len()).map(|j| self.center.data.inner(self.direction(j), v)).collect()
    }
}

/// Values of a (1,2)-tensor on pairs of base frame vectors.
#[derive(Clone, Debug)]
pub struct FrameTable<T: Real> {
    pub values: Vec<Vec<DVector<T>>>,
}

impl<T: Real> FrameTable<T> {
    fn build(n: usize, mut f: impl FnMut(usize, usize) -> DVector<T>) -> Self {
        FrameTable {
            values: (0..n).map(|a| (0..n).map(|b| f(a, b)).collect()).collect(),
        }
    }

    pub fn get(&self, a: usize, b: usize) -> &DVector<T> {
        &self.values[a][b]
    }

    /// Bilinear extension to arbitrary vectors, given their frame coordinates.
    pub fn apply_coords(&self, c1: &[T], c2: &[T]) -> DVector<T> {
        let dim = self.values[0][0].len();
        let mut out = DVector::zeros(dim);
        for (a, &x) in c1.iter().enumerate() {
            if x == T::zero() {
                continue;
            }
            for (b, &y) in c2.iter().enumerate() {
                if y != T::zero() {
                    out.axpy(x * y, &self.values[a][b], T::one());
                }
            }
        }
        out
    }

    pub fn apply(&self, nb: &Neighborhood<T>, e1: &DVector<T>, e2: &DVector<T>) -> DVector<T> {
        self.apply_coords(&nb.coordinates(e1), &nb.coordinates(e2))
    }

    pub fn max_difference(&self, other: &FrameTable<T>, weight: impl Fn(&DVector<T>) -> T) -> T {
        let mut worst = T::zero();
        for (ra, rb) in self.values.iter().zip(&other.values) {
            for (a, b) in ra.iter().zip(rb) {
                worst = worst.max(weight(&(a - b)));
            }
        }
        worst
    }
}

/// `T`, `A` and `∇̂` on frame pairs.
#[derive(Clone, Debug)]
pub struct ONeillSample<T: Real> {
    pub point: Vec<T>,
    pub vertical_count: usize,
    /// `T_{E_a} E_b = h∇_{vE_a} vE_b + v∇_{vE_a} hE_b`
    pub t: FrameTable<T>,
    /// `A_{E_a} E_b = v∇_{hE_a} hE_b + h∇_{hE_a} vE_b`
    pub a: FrameTable<T>,
    /// `∇̂_{V_i} V_j = v∇_{V_i} V_j`, vertical indices only.
    pub hat: Vec<Vec<DVector<T>>>,
    /// Full `∇_{E_a} E_b` of the extended frame.
    pub nabla: FrameTable<T>,
}

impl<T: Real> ONeillSample<T> {
    pub fn t_apply(&self, nb: &Neighborhood<T>, e1: &DVector<T>, e2: &DVector<T>) -> DVector<T> {
        self.t.apply(nb, e1, e2)
    }

    pub fn a_apply(&self, nb: &Neighborhood<T>, e1: &DVector<T>, e2: &DVector<T>) -> DVector<T> {
        self.a.apply(nb, e1, e2)
    }
}

pub fn oneill_tensors<T: Real>(nb: &Neighborhood<T>) -> ONeillSample<T> {
    let n = nb.len();
    let k = nb.vertical_count();
    let nabla = FrameTable::build(n, |a, b| nb.nabla(a, |l| l.field(b).clone()));
    let c = &nb.center;
    let zero = DVector::zeros(n);
    let t = FrameTable::build(n, |a, b| {
        let d = nabla.get(a, b);
        match (a < k, b < k) {
            (true, true) => c.ph(d),
            (true, false) => c.pv(d),
            _ => zero.clone(),
        }
    });
    let a_table = FrameTable::build(n, |a, b| {
        let d = nabla.get(a, b);
        match (a < k, b < k) {
            (false, false) => c.pv(d),
            (false, true) => c.ph(d),
            _ => zero.clone(),
        }
    });
    let hat = (0..k).map(|i| (0..k).map(|j| c.pv(nabla.get(i, j))).collect()).collect();
    ONeillSample {
        point: c.data.point.clone(),
        vertical_count: k,
        t,
        a: a_table,
        hat,
        nabla,
    }
}

/// `∇ψ*` on frame pairs, the tension field and the fibre mean curvature.
#[derive(Clone, Debug)]
pub struct SecondFundamentalSample<T: Real> {
    pub point: Vec<T>,
    /// `(∇ψ*)(E_a, E_b) = ∇^ψ_{E_a} ψ*E_b − ψ*(∇_{E_a} E_b)`
    pub table: FrameTable<T>,
    /// `τ = Σ_a (∇ψ*)(E_a, E_a)`
    pub tension: DVector<T>,
    /// `H = (1/n) Σ_i T_{V_i} V_i`, `n = dim ker ψ*`
    pub mean_curvature: DVector<T>,
}

impl<T: Real> SecondFundamentalSample<T> {
    pub fn apply(&self, nb: &Neighborhood<T>, e1: &DVector<T>, e2: &DVector<T>) -> DVector<T> {
        self.table.apply(nb, e1, e2)
    }
}

pub fn second_fundamental_form<T: Real>(nb: &Neighborhood<T>, oneill: &ONeillSample<T>) -> SecondFundamentalSample<T> {
    let n = nb.len();
    let data = nb.data();
    let table = FrameTable::build(n, |a, b| {
        nb.nabla_pullback(a, |l| l.field(b).clone()) - data.push(oneill.nabla.get(a, b))
    });
    let tension = (0..n).fold(DVector::zeros(data.jacobian.nrows()), |acc, a| acc + table.get(a, a));
    let k = oneill.vertical_count;
    let sum = (0..k).fold(DVector::zeros(n), |acc, i| acc + oneill.t.get(i, i));
    let mean_curvature = if k == 0 { sum } else { sum / T::lit(k as f64) };
    SecondFundamentalSample {
        point: data.point.clone(),
        table,
        tension,
        mean_curvature,
    }
}

#[cfg(test)]
mod tests;
