//! Identities of the structure, of the `φ`-splitting and of the slant angle.

use nalgebra::{DMatrix, DVector};

use super::{Analysis, PointContext};
use crate::geometry::check_cosymplectic;
use crate::linalg::max_abs;
use crate::scalar::Real;
use crate::verdict::CheckVerdict;

fn max_of(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, f64::max)
}

pub fn check_structure<T: Real>(a: &Analysis<T>) -> CheckVerdict {
    const ID: &str = "cosym-structure";
    let tol = a.tolerances.identity;
    let acs = a.map.structure().expect("analysis requires a structure");
    match check_cosymplectic(a.map.source(), acs, a.samples(), a.seed, tol) {
        Ok(v) => v,
        Err(e) => {
            let mut v = CheckVerdict::identity(ID, a.samples(), tol, (f64::INFINITY, None));
            v.fail_with(format!("structure could not be evaluated: {e}"));
            v
        }
    }
}

pub fn check_slant_angle<T: Real>(a: &Analysis<T>) -> CheckVerdict {
    let s = &a.slant;
    let mut v = CheckVerdict::identity("slant-angle", a.samples(), a.tolerances.angle, (s.spread, None));
    v.push_note(format!(
        "{}; mean angle {:.12} rad over {} directions",
        s.classification.as_str(),
        s.mean,
        s.samples
    ));
    if s.degenerate {
        v.fail_with("phi V vanishes for some sampled vertical V");
    }
    v
}

/// `η(V_i) g(V_j, ξ)` on the vertical frame.
fn eta_xi<T: Real>(c: &PointContext<T>) -> DMatrix<T> {
    let d = c.nb.data();
    let k = c.vertical_count();
    let (Some(eta), Some(xi)) = (&d.eta, &d.xi) else {
        return DMatrix::zeros(k, k);
    };
    DMatrix::from_fn(k, k, |i, j| eta.dot(c.e(j)) * c.inner(c.e(i), xi))
}

fn eta_of<T: Real>(c: &PointContext<T>, v: &DVector<T>) -> T {
    c.nb.data().eta.as_ref().map_or(T::zero(), |eta| eta.dot(v))
}

pub fn check_decomposition_lemma<T: Real>(a: &Analysis<T>) -> CheckVerdict {
    let residuals = a.per_point(|c| {
        let s = &c.split;
        let (dd, de, sd, se) = (&s.frame_big_d, &s.frame_big_e, &s.frame_small_d, &s.frame_small_e);
        let k = dd.nrows();
        let r = se.nrows();
        let on_horizontal = max_abs(&(dd * sd + sd * se)).max(max_abs(&(de * sd + se * se + DMatrix::identity(r, r))));
        let phi2 = -DMatrix::<T>::identity(k, k) + eta_xi(c);
        let on_vertical = max_abs(&(dd * dd + sd * de - phi2)).max(max_abs(&(de * dd + se * de)));
        (on_horizontal.as_f64(), on_vertical.as_f64())
    });
    CheckVerdict::identity(
        "lemma-3.5-3.8",
        a.samples(),
        a.tolerances.identity,
        (max_of(residuals.iter().map(|r| r.0)), Some(max_of(residuals.iter().map(|r| r.1)))),
    )
    .with_notes("lhs: Dd + de, Ed + e^2 + I; rhs: D^2 + dE - phi^2, ED + eE")
}

fn not_slant<T: Real>(id: &str, a: &Analysis<T>, tol: f64) -> CheckVerdict {
    CheckVerdict::vacuous(
        id,
        a.samples(),
        tol,
        format!("map is {}; no constant angle", a.slant.classification.as_str()),
    )
}

pub fn check_d_squared<T: Real>(a: &Analysis<T>) -> CheckVerdict {
    const ID: &str = "thm-D2";
    let tol = a.tolerances.identity;
    if !a.slant.classification.is_slant() {
        return not_slant(ID, a, tol);
    }
    let cos2 = T::lit(a.cos2());
    let residuals = a.per_point(|c| {
        let dd = &c.split.frame_big_d;
        let k = dd.nrows();
        let rhs = (DMatrix::<T>::identity(k, k) - eta_xi(c)) * (-cos2);
        max_abs(&(dd * dd - rhs)).as_f64()
    });
    CheckVerdict::identity(ID, a.samples(), tol, (max_of(residuals), None))
}

pub fn check_gram_identities<T: Real>(a: &Analysis<T>) -> CheckVerdict {
    const ID: &str = "cor-3.14-3.15";
    let tol = a.tolerances.identity;
    if !a.slant.classification.is_slant() {
        return not_slant(ID, a, tol);
    }
    let cos2 = T::lit(a.cos2());
    let sin2 = T::one() - cos2;
    let residuals = a.per_point(|c| {
        let k = c.vertical_count();
        let (mut rd, mut re) = (T::zero(), T::zero());
        for i in 0..k {
            for j in 0..k {
                let (vi, vj) = (c.e(i), c.e(j));
                let base = c.inner(vi, vj) - eta_of(c, vi) * eta_of(c, vj);
                rd = rd.max((c.inner(&c.phi_v(i), &c.phi_v(j)) - cos2 * base).abs());
                re = re.max((c.inner(&c.phi_h(i), &c.phi_h(j)) - sin2 * base).abs());
            }
        }
        (rd.as_f64(), re.as_f64())
    });
    CheckVerdict::identity(
        ID,
        a.samples(),
        tol,
        (max_of(residuals.iter().map(|r| r.0)), Some(max_of(residuals.iter().map(|r| r.1)))),
    )
}

/// Vertical directions orthogonal to `ξ`: the frame vectors and the
/// normalized sums of pairs.
fn vertical_probes<T: Real>(c: &PointContext<T>) -> Vec<DVector<T>> {
    let xi = c.nb.frame.xi_index;
    let basis: Vec<&DVector<T>> = (0..c.vertical_count()).filter(|&i| Some(i) != xi).map(|i| c.e(i)).collect();
    let mut out: Vec<DVector<T>> = basis.iter().map(|v| (*v).clone()).collect();
    for i in 0..basis.len() {
        for j in i + 1..basis.len() {
            let s = basis[i] + basis[j];
            let n = c.norm(&s);
            out.push(s / n);
        }
    }
    out
}

/// `max |T_{DV}DV + cos²ω T_V V|` over [`vertical_probes`].
fn parallel_e_curvature<T: Real>(c: &PointContext<T>, cos2: T) -> f64 {
    let mut worst = T::zero();
    for v in vertical_probes(c) {
        let dv = c.nb.center.big_d(&v);
        let r = c.oneill.t_apply(&c.nb, &dv, &dv) + c.oneill.t_apply(&c.nb, &v, &v) * cos2;
        worst = worst.max(c.norm(&r));
    }
    worst.as_f64()
}

pub fn check_parallel_e_curvature<T: Real>(a: &Analysis<T>) -> CheckVerdict {
    const ID: &str = "prop-3.16";
    let tol = a.tolerances.derivative;
    if !a.slant.classification.is_slant() {
        return not_slant(ID, a, tol);
    }
    let cos2 = T::lit(a.cos2());
    let residuals: Vec<f64> = a
        .per_point(|c| c.e_parallel().then(|| parallel_e_curvature(c, cos2)))
        .into_iter()
        .flatten()
        .collect();
    if residuals.is_empty() {
        return CheckVerdict::vacuous(ID, a.samples(), tol, "E is not parallel at any sampled point");
    }
    CheckVerdict::identity(ID, residuals.len(), tol, (max_of(residuals), None))
}

pub fn check_minimal_fibers<T: Real>(a: &Analysis<T>) -> CheckVerdict {
    const ID: &str = "thm-minimal-fibers";
    let tol = a.tolerances.derivative;
    if !a.below_right_angle() {
        return CheckVerdict::vacuous(
            ID,
            a.samples(),
            tol,
            format!(
                "requires a constant angle below pi/2; map is {} (mean {:.6} rad)",
                a.slant.classification.as_str(),
                a.slant.mean
            ),
        );
    }
    let cos2 = T::lit(a.cos2());
    let residuals: Vec<(f64, f64)> = a
        .per_point(|c| {
            c.e_parallel()
                .then(|| (c.norm(&c.sff.mean_curvature).as_f64(), parallel_e_curvature(c, cos2)))
        })
        .into_iter()
        .flatten()
        .collect();
    if residuals.is_empty() {
        return CheckVerdict::vacuous(ID, a.samples(), tol, "E is not parallel at any sampled point");
    }
    CheckVerdict::identity(
        ID,
        residuals.len(),
        tol,
        (max_of(residuals.iter().map(|r| r.0)), Some(max_of(residuals.iter().map(|r| r.1)))),
    )
    .with_notes("lhs: |H|; rhs: T_{DV}DV + cos^2(w) T_V V")
}
