//! Closed-form cross-checks of the quantities in the parent module.

use nalgebra::DVector;

use super::{oneill_tensors, second_fundamental_form, Local, Neighborhood, ONeillSample, SecondFundamentalSample};
use crate::map_analysis::{MapError, SmoothMapSpec};
use crate::scalar::Real;

/// `−n ψ*H + (2 − s) ψ*(∇ ln λ)` with `n = dim ker ψ*`, `s = dim B`.
pub fn tension_conformal_formula<T: Real>(nb: &Neighborhood<T>, sff: &SecondFundamentalSample<T>) -> DVector<T> {
    let data = nb.data();
    let n = T::lit(nb.vertical_count() as f64);
    let s = T::lit(data.jacobian.nrows() as f64);
    let two = T::lit(2.0);
    data.push(&sff.mean_curvature) * (-n) + data.push(&nb.grad_ln_dilation) * (two - s)
}

/// Lemma closed forms against the definition of `∇ψ*`; target norms are
/// divided by `λ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LemmaResiduals<T> {
    /// horizontal pairs: `X(ln λ)ψ*Y + Y(ln λ)ψ*X − g(X,Y)ψ*(∇ln λ)`
    pub horizontal: T,
    /// vertical pairs: `−ψ*(T_V W)`
    pub vertical: T,
    /// mixed pairs: `−ψ*(A_X V)`
    pub mixed: T,
    /// `(∇ψ*)(E_a, E_b) − (∇ψ*)(E_b, E_a)`
    pub symmetry: T,
}

pub fn lemma_residuals<T: Real>(
    nb: &Neighborhood<T>,
    oneill: &ONeillSample<T>,
    sff: &SecondFundamentalSample<T>,
) -> LemmaResiduals<T> {
    let data = nb.data();
    let n = nb.len();
    let k = nb.vertical_count();
    let scale = |v: &DVector<T>| data.target_norm(v) / nb.dilation;
    let mut r = LemmaResiduals {
        horizontal: T::zero(),
        vertical: T::zero(),
        mixed: T::zero(),
        symmetry: T::zero(),
    };
    for a in 0..n {
        for b in 0..n {
            let value = sff.table.get(a, b);
            r.symmetry = r.symmetry.max(scale(&(value - sff.table.get(b, a))));
            let ea = nb.direction(a);
            let eb = nb.direction(b);
            match (a < k, b < k) {
                (false, false) => {
                    let closed = data.push(eb) * nb.d_ln_dilation(ea) + data.push(ea) * nb.d_ln_dilation(eb)
                        - data.push(&nb.grad_ln_dilation) * data.inner(ea, eb);
                    r.horizontal = r.horizontal.max(scale(&(value - closed)));
                }
                (true, true) => {
                    let closed = -data.push(oneill.t.get(a, b));
                    r.vertical = r.vertical.max(scale(&(value - closed)));
                }
                (false, true) => {
                    let closed = -data.push(oneill.a.get(a, b));
                    r.mixed = r.mixed.max(scale(&(value - closed)));
                }
                (true, false) => {}
            }
        }
    }
    r
}

/// Metric skew-symmetry of `A_E` and `T_E`, symmetry of `T` on vertical
/// pairs, and `T_V ξ`, `A_X ξ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SkewResiduals<T> {
    pub a_skew: T,
    pub t_skew: T,
    pub t_vertical_symmetry: T,
    /// `max(|T_V ξ|, |A_X ξ|)`; zero when `ξ` is absent.
    pub xi_annihilation: T,
}

pub fn skew_symmetry_residuals<T: Real>(nb: &Neighborhood<T>, oneill: &ONeillSample<T>) -> SkewResiduals<T> {
    let data = nb.data();
    let n = nb.len();
    let k = nb.vertical_count();
    let mut r = SkewResiduals {
        a_skew: T::zero(),
        t_skew: T::zero(),
        t_vertical_symmetry: T::zero(),
        xi_annihilation: T::zero(),
    };
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                let ea = oneill.a.get(a, b);
                let ec = nb.direction(c);
                let lhs = data.inner(ea, ec) + data.inner(nb.direction(b), oneill.a.get(a, c));
                r.a_skew = r.a_skew.max(lhs.abs());
                let lhs = data.inner(oneill.t.get(a, b), ec) + data.inner(nb.direction(b), oneill.t.get(a, c));
                r.t_skew = r.t_skew.max(lhs.abs());
            }
            if a < k && b < k {
                r.t_vertical_symmetry = r
                    .t_vertical_symmetry
                    .max(data.norm(&(oneill.t.get(a, b) - oneill.t.get(b, a))));
            }
        }
    }
    if let Some(x) = nb.frame.xi_index {
        for a in 0..n {
            r.xi_annihilation = r
                .xi_annihilation
                .max(data.norm(oneill.t.get(a, x)))
                .max(data.norm(oneill.a.get(a, x)));
        }
    }
    r
}

/// `A_X Y` against `½{v[X,Y] − λ² g(X,Y) grad_v(1/λ²)}` on horizontal frame
/// pairs.
pub fn closed_form_a_residual<T: Real>(
    m: &SmoothMapSpec,
    nb: &Neighborhood<T>,
    oneill: &ONeillSample<T>,
) -> Result<T, MapError> {
    let data = nb.data();
    let grad_v = data.vertical(&m.grad_inverse_square_dilation(&data.point)?);
    let lambda2 = nb.dilation * nb.dilation;
    let half = T::lit(0.5);
    let n = nb.len();
    let k = nb.vertical_count();
    let mut worst = T::zero();
    for a in k..n {
        for b in k..n {
            let g_ab = data.inner(nb.direction(a), nb.direction(b));
            let closed = (data.vertical(&nb.bracket(a, b)) - &grad_v * (lambda2 * g_ab)) * half;
            worst = worst.max(data.norm(&(oneill.a.get(a, b) - closed)));
        }
    }
    Ok(worst)
}

/// `A_X Y + A_Y X + λ² g(X,Y) grad_v(1/λ²)` on horizontal frame pairs; the
/// plain alternation `A_X Y = −A_Y X` is the case of a vertically constant
/// dilation.
pub fn a_alternation_residual<T: Real>(
    m: &SmoothMapSpec,
    nb: &Neighborhood<T>,
    oneill: &ONeillSample<T>,
) -> Result<T, MapError> {
    let data = nb.data();
    let grad_v = data.vertical(&m.grad_inverse_square_dilation(&data.point)?);
    let lambda2 = nb.dilation * nb.dilation;
    let n = nb.len();
    let k = nb.vertical_count();
    let mut worst = T::zero();
    for a in k..n {
        for b in k..n {
            let g_ab = data.inner(nb.direction(a), nb.direction(b));
            let sum = oneill.a.get(a, b) + oneill.a.get(b, a) + &grad_v * (lambda2 * g_ab);
            worst = worst.max(data.norm(&sum));
        }
    }
    Ok(worst)
}

/// Largest change of `T`, `A` and `∇ψ*` (divided by `λ`) between two
/// neighbourhoods of the same point built with different extensions.
pub fn tensoriality_residual<T: Real>(first: &Neighborhood<T>, second: &Neighborhood<T>) -> T {
    let o1 = oneill_tensors(first);
    let o2 = oneill_tensors(second);
    let s1 = second_fundamental_form(first, &o1);
    let s2 = second_fundamental_form(second, &o2);
    let data = first.data();
    let source = |v: &DVector<T>| data.norm(v);
    let target = |v: &DVector<T>| data.target_norm(v) / first.dilation;
    o1.t
        .max_difference(&o2.t, source)
        .max(o1.a.max_difference(&o2.a, source))
        .max(s1.table.max_difference(&s2.table, target))
}

/// Covariant derivatives of `D` and `E` along the fibres.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DerivativeIdentities<T> {
    /// `(∇_V D)W` by definition against `dT_V W − T_V EW`.
    pub d_two_ways: T,
    /// `(∇_V E)W` by definition against `eT_V W − T_V DW`.
    pub e_two_ways: T,
    /// `max |(∇_V E)W|`: zero when `E` is parallel.
    pub e_parallel: T,
}

pub fn derivative_identities<T: Real>(nb: &Neighborhood<T>, oneill: &ONeillSample<T>) -> DerivativeIdentities<T> {
    let c = &nb.center;
    let data = nb.data();
    let k = nb.vertical_count();
    let mut r = DerivativeIdentities {
        d_two_ways: T::zero(),
        e_two_ways: T::zero(),
        e_parallel: T::zero(),
    };
    for i in 0..k {
        for j in 0..k {
            let w = nb.direction(j);
            let hat = &oneill.hat[i][j];
            let d_def = c.pv(&nb.nabla(i, |l: &Local<T>| l.big_d(l.field(j)))) - c.big_d(hat);
            let e_def = c.ph(&nb.nabla(i, |l: &Local<T>| l.big_e(l.field(j)))) - c.big_e(hat);
            let t_vw = oneill.t.get(i, j);
            let v = nb.direction(i);
            let d_rhs = c.small_d(t_vw) - oneill.t_apply(nb, v, &c.big_e(w));
            let e_rhs = c.small_e(t_vw) - oneill.t_apply(nb, v, &c.big_d(w));
            r.d_two_ways = r.d_two_ways.max(data.norm(&(d_def - d_rhs)));
            r.e_parallel = r.e_parallel.max(data.norm(&e_def));
            r.e_two_ways = r.e_two_ways.max(data.norm(&(e_def - e_rhs)));
        }
    }
    r
}
