//! The equivalence checkers. Each evaluates, per sampled point, a residual
//! for side (i) and one for side (ii) of the statement and compares the two
//! truth values point by point ([`CheckVerdict::pointwise_equivalence`]).
//!
//! Side (ii) residuals are the differences of the two members of the
//! identity in the statement, with every target inner product multiplied by
//! `λ⁻²` so that they are commensurable with the source-side quantities.

use nalgebra::DVector;

use super::{Analysis, PointContext};
use crate::oneill::{tension_conformal_formula, Local};
use crate::scalar::Real;
use crate::verdict::{CheckVerdict, Status, Truth};

/// Frame-level building blocks at one point.
struct Terms<'c, T: Real> {
    c: &'c PointContext<T>,
    /// `∇ ln λ`
    grad: &'c DVector<T>,
}

impl<'c, T: Real> Terms<'c, T> {
    fn new(c: &'c PointContext<T>) -> Self {
        Terms {
            c,
            grad: &c.nb.grad_ln_dilation,
        }
    }

    fn vertical(&self) -> std::ops::Range<usize> {
        0..self.c.vertical_count()
    }

    fn horizontal(&self) -> std::ops::Range<usize> {
        self.c.vertical_count()..self.c.len()
    }

    /// `Y(ln λ)`
    fn dl(&self, y: &DVector<T>) -> T {
        self.c.nb.d_ln_dilation(y)
    }

    /// `A_{E_x} v`
    fn a(&self, x: usize, v: &DVector<T>) -> DVector<T> {
        self.c.oneill.a_apply(&self.c.nb, self.c.e(x), v)
    }

    /// `T_{E_x} v`
    fn t(&self, x: usize, v: &DVector<T>) -> DVector<T> {
        self.c.oneill.t_apply(&self.c.nb, self.c.e(x), v)
    }

    /// `∇^ψ_{E_a} ψ*E_b`
    fn pull(&self, a: usize, b: usize) -> DVector<T> {
        self.c.nb.nabla_pullback(a, |l: &Local<T>| l.field(b).clone())
    }

    /// `∇^ψ_{E_a} ψ*(eE_b)`
    fn pull_e(&self, a: usize, b: usize) -> DVector<T> {
        self.c.nb.nabla_pullback(a, |l: &Local<T>| l.small_e(l.field(b)))
    }

    /// `v∇_{E_a} dE_b`
    fn v_nabla_d(&self, a: usize, b: usize) -> DVector<T> {
        self.c.nb.center.pv(&self.c.nb.nabla(a, |l: &Local<T>| l.small_d(l.field(b))))
    }

    /// `∇_{E_a} ED E_b`
    fn nabla_ed(&self, a: usize, b: usize) -> DVector<T> {
        self.c.nb.nabla(a, |l: &Local<T>| l.big_e(&l.big_d(l.field(b))))
    }

    /// `∇_{E_a} E E_b`
    fn nabla_big_e(&self, a: usize, b: usize) -> DVector<T> {
        self.c.nb.nabla(a, |l: &Local<T>| l.big_e(l.field(b)))
    }

    /// `∇_{E_a} D E_b`
    fn nabla_big_d(&self, a: usize, b: usize) -> DVector<T> {
        self.c.nb.nabla(a, |l: &Local<T>| l.big_d(l.field(b)))
    }

    /// `λ⁻² g_B(u, ψ*w)`
    fn against(&self, u: &DVector<T>, w: &DVector<T>) -> T {
        self.c.target_inner_scaled(u, &self.c.push(w))
    }
}

#[derive(Clone, Copy, Debug)]
struct IntegrabilitySides {
    /// `max |g([X_a, X_b], V_i)|`
    bracket: f64,
    /// long identity including the dilation terms
    identity: f64,
    /// the same identity with the dilation terms dropped
    dilation_free: f64,
}

/// Members of the integrability identity for one triple `(X_a, X_b, V_i)`.
#[derive(Clone, Copy, Debug)]
pub(crate) struct IntegrabilityTerms<T> {
    /// `λ⁻² g_B(∇^ψ_{X_b}ψ*eX_a − ∇^ψ_{X_a}ψ*eX_b, ψ*EV_i)`
    pub lhs: T,
    /// the right member without the dilation terms
    pub dilation_free: T,
    /// the dilation terms
    pub dilation: T,
    /// `g([X_a, X_b], V_i)`
    pub bracket: T,
}

pub(crate) fn integrability_terms<T: Real>(c: &PointContext<T>, a: usize, b: usize, i: usize) -> IntegrabilityTerms<T> {
    let t = Terms::new(c);
    let (xa, xb) = (c.e(a), c.e(b));
    let (dxa, dxb) = (c.phi_v(a), c.phi_v(b));
    let (exa, exb) = (c.phi_h(a), c.phi_h(b));
    let (dv, ev) = (c.phi_v(i), c.phi_h(i));
    let lhs = t.against(&(t.pull_e(b, a) - t.pull_e(a, b)), &ev);
    let vertical_part = t.v_nabla_d(a, b) + t.a(a, &exb) - t.v_nabla_d(b, a) - t.a(b, &exa);
    let a_part = t.a(a, &dxb) - t.a(b, &dxa);
    let dilation = -&exb * t.dl(xa) + &exa * t.dl(xb) - xa * t.dl(&exb)
        + xb * t.dl(&exa)
        + t.grad * (T::lit(2.0) * c.inner(xa, &exb));
    IntegrabilityTerms {
        lhs,
        dilation_free: c.inner(&vertical_part, &dv) + c.inner(&a_part, &ev),
        dilation: c.inner(&dilation, &ev),
        bracket: c.inner(&c.nb.bracket(a, b), c.e(i)),
    }
}

fn integrability_sides<T: Real>(c: &PointContext<T>) -> IntegrabilitySides {
    let t = Terms::new(c);
    let mut out = (T::zero(), T::zero(), T::zero());
    for a in t.horizontal() {
        for b in t.horizontal() {
            if a == b {
                continue;
            }
            for i in t.vertical() {
                let r = integrability_terms(c, a, b, i);
                out.0 = out.0.max(r.bracket.abs());
                out.1 = out.1.max((r.lhs - r.dilation_free - r.dilation).abs());
                out.2 = out.2.max((r.lhs - r.dilation_free).abs());
            }
        }
    }
    IntegrabilitySides {
        bracket: out.0.as_f64(),
        identity: out.1.as_f64(),
        dilation_free: out.2.as_f64(),
    }
}

pub fn check_integrability<T: Real>(a: &Analysis<T>) -> CheckVerdict {
    let sides: Vec<(f64, f64)> = a
        .per_point(integrability_sides)
        .into_iter()
        .map(|s| (s.bracket, s.identity))
        .collect();
    CheckVerdict::pointwise_equivalence("thm-integrability", a.tolerances.derivative, &sides)
}

pub fn check_homothety<T: Real>(a: &Analysis<T>) -> CheckVerdict {
    const ID: &str = "thm-homothety";
    let tol = a.tolerances.derivative;
    let sides: Vec<(f64, f64)> = a
        .per_point(|c| {
            let s = integrability_sides(c);
            (s.bracket < tol).then(|| (c.homothety_defect(), s.dilation_free))
        })
        .into_iter()
        .flatten()
        .collect();
    if sides.is_empty() {
        return CheckVerdict::vacuous(ID, a.samples(), tol, "horizontal distribution is not integrable at any sampled point");
    }
    let mut v = CheckVerdict::pointwise_equivalence(ID, tol, &sides);
    if a.contexts.iter().all(|c| c.mu_dimension() == 0) {
        v.push_note("mu = 0 at every point: E maps the vertical space onto the horizontal space orthogonal to xi");
    }
    v
}

#[derive(Clone, Copy, Debug)]
struct HorizontalSides {
    /// `max |A_{X_a} X_b|`
    a_tensor: f64,
    identity: f64,
    /// `|λ⁻²(...) − g(A_X dY, EV)|`, the condition of the refinement for
    /// homothetic maps.
    refinement: f64,
}

/// Members of the horizontal-foliation identity for `(X_a, X_b, V_i)`.
#[derive(Clone, Copy, Debug)]
pub(crate) struct HorizontalTerms<T> {
    /// `λ⁻² g_B(∇^ψ_{X_a}ψ*X_b, ψ*EDV_i) − λ⁻² g_B(∇^ψ_{X_a}ψ*eX_b, ψ*EV_i)`
    pub lhs: T,
    /// `g(A_{X_a} dX_b, EV_i)`
    pub a_term: T,
    /// the dilation terms
    pub dilation: T,
}

pub(crate) fn horizontal_terms<T: Real>(c: &PointContext<T>, a: usize, b: usize, i: usize) -> HorizontalTerms<T> {
    let t = Terms::new(c);
    let (xa, xb) = (c.e(a), c.e(b));
    let (dxb, exb) = (c.phi_v(b), c.phi_h(b));
    let ev = c.phi_h(i);
    let edv = c.nb.center.big_e(&c.phi_v(i));
    let lhs = t.against(&t.pull(a, b), &edv) - t.against(&t.pull_e(a, b), &ev);
    let first = -&exb * t.dl(xa) - xa * t.dl(&exb) + t.grad * c.inner(xa, &exb);
    let second = -xb * t.dl(xa) - xa * t.dl(xb) + t.grad * c.inner(xa, xb);
    HorizontalTerms {
        lhs,
        a_term: c.inner(&t.a(a, &dxb), &ev),
        dilation: c.inner(&first, &ev) - c.inner(&second, &edv),
    }
}

fn horizontal_sides<T: Real>(c: &PointContext<T>) -> HorizontalSides {
    let t = Terms::new(c);
    let mut out = (T::zero(), T::zero(), T::zero());
    for a in t.horizontal() {
        for b in t.horizontal() {
            out.0 = out.0.max(c.norm(c.oneill.a.get(a, b)));
            for i in t.vertical() {
                let r = horizontal_terms(c, a, b, i);
                out.1 = out.1.max((r.lhs - r.a_term - r.dilation).abs());
                out.2 = out.2.max((r.lhs - r.a_term).abs());
            }
        }
    }
    HorizontalSides {
        a_tensor: out.0.as_f64(),
        identity: out.1.as_f64(),
        refinement: out.2.as_f64(),
    }
}

pub fn check_horizontal_geodesic<T: Real>(a: &Analysis<T>) -> CheckVerdict {
    let tol = a.tolerances.derivative;
    let per_point: Vec<(HorizontalSides, f64)> = a.per_point(|c| (horizontal_sides(c), c.homothety_defect()));
    let sides: Vec<(f64, f64)> = per_point.iter().map(|(s, _)| (s.a_tensor, s.identity)).collect();
    let mut v = CheckVerdict::pointwise_equivalence("thm-horiz-geodesic", tol, &sides);
    // where the foliation is totally geodesic: homothetic iff the dilation
    // terms drop out of the identity
    let refined: Vec<(f64, f64)> = per_point
        .iter()
        .filter(|(s, _)| s.a_tensor < tol)
        .map(|(s, h)| (*h, s.refinement))
        .collect();
    if refined.is_empty() {
        return v;
    }
    let r = CheckVerdict::pointwise_equivalence("refinement", tol, &refined);
    match r.status {
        Status::Fail => v.fail_with(format!(
            "homothety refinement disagrees: homothetic {}, dilation-free identity {}",
            truth_word(r.side_i),
            truth_word(r.side_ii)
        )),
        Status::Indeterminate => {
            v.status = Status::Indeterminate;
            v.pass = false;
            v.push_note("homothety refinement indeterminate");
        }
        _ => v.push_note(format!(
            "homothety refinement agrees at {} points (homothetic: {})",
            refined.len(),
            truth_word(r.side_i)
        )),
    }
    v
}

fn truth_word(t: Option<Truth>) -> &'static str {
    match t {
        Some(Truth::True) => "true",
        Some(Truth::False) => "false",
        _ => "indeterminate",
    }
}

#[derive(Clone, Copy, Debug)]
struct VerticalSides {
    /// `max |T_{V_i} V_j|`
    t_tensor: f64,
    identity: f64,
    /// `max |T_V ξ|`
    xi_slice: f64,
}

fn vertical_sides<T: Real>(c: &PointContext<T>) -> VerticalSides {
    let t = Terms::new(c);
    let mut out = (T::zero(), T::zero(), T::zero());
    for i in t.vertical() {
        for j in t.vertical() {
            out.0 = out.0.max(c.norm(c.oneill.t.get(i, j)));
            let nabla_ed = t.nabla_ed(i, j);
            let h_nabla_e = c.nb.center.ph(&t.nabla_big_e(i, j));
            let t_ew = t.t(i, &c.phi_h(j));
            for a in t.horizontal() {
                let r = c.inner(&nabla_ed, c.e(a)) - c.inner(&t_ew, &c.phi_v(a)) - c.inner(&h_nabla_e, &c.phi_h(a));
                out.1 = out.1.max(r.abs());
            }
        }
        if let Some(x) = c.nb.frame.xi_index {
            out.2 = out.2.max(c.norm(c.oneill.t.get(i, x)));
        }
    }
    VerticalSides {
        t_tensor: out.0.as_f64(),
        identity: out.1.as_f64(),
        xi_slice: out.2.as_f64(),
    }
}

pub fn check_vertical_geodesic<T: Real>(a: &Analysis<T>) -> CheckVerdict {
    let tol = a.tolerances.derivative;
    let per_point = a.per_point(vertical_sides);
    let sides: Vec<(f64, f64)> = per_point.iter().map(|s| (s.t_tensor, s.identity)).collect();
    let mut v = CheckVerdict::pointwise_equivalence("thm-vert-geodesic", tol, &sides);
    let xi = per_point.iter().map(|s| s.xi_slice).fold(0.0, f64::max);
    if xi >= tol {
        v.fail_with(format!("T_V xi = {xi:.3e} does not vanish"));
    } else {
        v.push_note(format!("T_V xi slice {xi:.1e}"));
    }
    v
}

pub fn check_harmonicity<T: Real>(a: &Analysis<T>) -> CheckVerdict {
    const ID: &str = "cor-harmonic";
    let tol = a.tolerances.derivative;
    if !a.below_right_angle() {
        return CheckVerdict::vacuous(
            ID,
            a.samples(),
            tol,
            format!("requires a constant angle below pi/2; map is {}", a.slant.classification.as_str()),
        );
    }
    let s = a.map.target_dimension();
    let per_point: Vec<(f64, f64, f64)> = a
        .per_point(|c| {
            c.e_parallel().then(|| {
                let tau = c.target_norm_scaled(&c.sff.tension).as_f64();
                let gap = c
                    .target_norm_scaled(&(&c.sff.tension - tension_conformal_formula(&c.nb, &c.sff)))
                    .as_f64();
                let other = if s == 2 { 0.0 } else { c.homothety_defect() };
                (tau, other, gap)
            })
        })
        .into_iter()
        .flatten()
        .collect();
    if per_point.is_empty() {
        return CheckVerdict::vacuous(ID, a.samples(), tol, "E is not parallel at any sampled point");
    }
    let sides: Vec<(f64, f64)> = per_point.iter().map(|&(t, o, _)| (t, o)).collect();
    let mut v = CheckVerdict::pointwise_equivalence(ID, tol, &sides);
    if s == 2 {
        v.push_note("dim B = 2: harmonic unconditionally");
    } else {
        v.push_note(format!("dim B = {s}: harmonic iff homothetic"));
    }
    let gap = per_point.iter().map(|p| p.2).fold(0.0, f64::max);
    if gap >= tol {
        v.fail_with(format!("trace tension and conformal tension formula differ by {gap:.3e}"));
    }
    v
}

pub fn check_eker_mu<T: Real>(a: &Analysis<T>) -> CheckVerdict {
    const ID: &str = "thm-eker-mu";
    let tol = a.tolerances.derivative;
    let sides: Vec<(f64, f64)> = a
        .per_point(|c| {
            if c.mu_dimension() == 0 {
                return None;
            }
            let mut worst = T::zero();
            for i in 0..c.vertical_count() {
                let ev = c.phi_h(i);
                for m in &c.nb.frame.mu {
                    worst = worst.max(c.target_norm_scaled(&c.sff.apply(&c.nb, &ev, m)));
                }
            }
            Some((c.homothety_defect(), worst.as_f64()))
        })
        .into_iter()
        .flatten()
        .collect();
    if sides.is_empty() {
        return CheckVerdict::vacuous(ID, a.samples(), tol, "mu = 0 at every sampled point");
    }
    CheckVerdict::pointwise_equivalence(ID, tol, &sides)
}

fn totally_geodesic_sides<T: Real>(c: &PointContext<T>) -> (f64, f64) {
    let t = Terms::new(c);
    let center = &c.nb.center;
    let n = c.len();
    let mut side_i = T::zero();
    for a in 0..n {
        for b in 0..n {
            side_i = side_i.max(c.target_norm_scaled(c.sff.table.get(a, b)));
        }
    }
    let mut side_ii = T::lit(c.homothety_defect());
    for i in t.vertical() {
        for j in t.vertical() {
            let horizontal = t.t(i, &c.phi_v(j)) + center.ph(&t.nabla_big_e(i, j));
            let vertical = t.t(i, &c.phi_h(j)) + center.pv(&t.nabla_big_d(i, j));
            side_ii = side_ii.max(c.norm(&(center.small_e(&horizontal) + center.big_e(&vertical))));
        }
    }
    for x in t.horizontal() {
        for i in t.vertical() {
            let horizontal = t.a(x, &c.phi_v(i)) + center.ph(&t.nabla_big_e(x, i));
            let vertical = t.a(x, &c.phi_h(i)) + center.pv(&t.nabla_big_d(x, i));
            side_ii = side_ii.max(c.norm(&(center.small_e(&horizontal) + center.big_e(&vertical))));
        }
    }
    (side_i.as_f64(), side_ii.as_f64())
}

pub fn check_totally_geodesic_map<T: Real>(a: &Analysis<T>) -> CheckVerdict {
    let sides = a.per_point(totally_geodesic_sides);
    CheckVerdict::pointwise_equivalence("thm-tot-geodesic-map", a.tolerances.derivative, &sides)
}

pub fn check_local_product<T: Real>(a: &Analysis<T>) -> CheckVerdict {
    let sides: Vec<(f64, f64)> = a.per_point(|c| {
        let h = horizontal_sides(c);
        let v = vertical_sides(c);
        (h.a_tensor.max(v.t_tensor), h.identity.max(v.identity))
    });
    CheckVerdict::pointwise_equivalence("thm-local-product", a.tolerances.derivative, &sides)
}
