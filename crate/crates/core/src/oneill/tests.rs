use nalgebra::DVector;

use super::*;
use crate::expr::parse;
use crate::geometry::{builtin_by_name, ManifoldSpec};
use crate::map_analysis::frame_at;
use crate::sampling::{sample_points, DomainBox};

fn plain_map(dim: usize, lo: f64, hi: f64, comps: &[&str]) -> SmoothMapSpec {
    let src = ManifoldSpec::euclidean(dim, DomainBox::cube(dim, lo, hi));
    let s = comps.len();
    let target = ManifoldSpec::euclidean(s, DomainBox::cube(s, -1e6, 1e6));
    let comps = comps.iter().map(|c| parse(c, dim).unwrap()).collect();
    SmoothMapSpec::new(src, None, target, comps).unwrap()
}

fn neighborhood(m: &SmoothMapSpec, p: &[f64], ext: Extension) -> Neighborhood<f64> {
    let frame = frame_at(m, p, DEFAULT_TOL_RANK).unwrap();
    Neighborhood::new(m, frame, ext).unwrap()
}

#[test]
fn affine_map_has_vanishing_tensors() {
    let (src, acs) = builtin_by_name("cosym_r5").unwrap();
    let target = ManifoldSpec::euclidean(2, DomainBox::cube(2, -1e4, 1e4));
    let comps = ["pi^5*(x1-x2)/sqrt(2)", "pi^5*x4"].iter().map(|c| parse(c, 5).unwrap()).collect();
    let m = SmoothMapSpec::new(src, Some(acs), target, comps).unwrap();
    for p in sample_points(&DomainBox::cube(5, -1.0, 1.0), 5, 9) {
        let nb = neighborhood(&m, &p, Extension::Projected);
        let o = oneill_tensors(&nb);
        let s = second_fundamental_form(&nb, &o);
        for row in o.t.values.iter().chain(&o.a.values) {
            for v in row {
                assert!(v.amax() < 1e-9);
            }
        }
        assert!(s.tension.amax() / nb.dilation < 1e-9);
        let ids = derivative_identities(&nb, &o);
        assert!(ids.e_parallel < 1e-9 && ids.d_two_ways < 1e-9);
    }
}

#[test]
fn radial_distance_tension_is_two_over_r() {
    // Δ|x| = 2/|x| in R^3; the fibres are spheres with H = −x/|x|²
    let m = plain_map(3, 0.5, 1.5, &["sqrt(x1^2 + x2^2 + x3^2)"]);
    let p = [0.6, 0.8, 1.2];
    let r = p.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = neighborhood(&m, &p, Extension::Projected);
    let o = oneill_tensors(&nb);
    let s = second_fundamental_form(&nb, &o);
    assert!((s.tension[0] - 2.0 / r).abs() < 1e-6, "{}", s.tension[0]);
    let h = DVector::from_column_slice(&p) / (-r * r);
    assert!((&s.mean_curvature - h).amax() < 1e-6);
    let formula = tension_conformal_formula(&nb, &s);
    assert!((formula[0] - s.tension[0]).abs() < 1e-6);
}

#[test]
fn squared_distance_has_constant_tension() {
    // Δ|x|² = 6; λ = 2|x| is not constant so both terms of the conformal
    // formula contribute (4 + 2)
    let m = plain_map(3, 0.5, 1.5, &["x1^2 + x2^2 + x3^2"]);
    for p in sample_points(m.source().domain_box(), 6, 4) {
        let nb = neighborhood(&m, &p, Extension::Projected);
        let o = oneill_tensors(&nb);
        let s = second_fundamental_form(&nb, &o);
        assert!((s.tension[0] - 6.0).abs() < 1e-5, "{}", s.tension[0]);
        assert!((tension_conformal_formula(&nb, &s)[0] - 6.0).abs() < 1e-5);
        let l = lemma_residuals(&nb, &o, &s);
        assert!(l.horizontal < 1e-6 && l.vertical < 1e-6 && l.mixed < 1e-6 && l.symmetry < 1e-6, "{l:?}");
        let k = skew_symmetry_residuals(&nb, &o);
        assert!(k.a_skew < 1e-6 && k.t_skew < 1e-6 && k.t_vertical_symmetry < 1e-6, "{k:?}");
    }
}

#[test]
fn closed_form_a_with_vertically_varying_dilation() {
    // ψ = x e^y: λ = e^y √(1 + x²) varies along the fibres, so A_X X ≠ 0
    let m = plain_map(2, 0.2, 1.0, &["x1*exp(x2)"]);
    for p in sample_points(m.source().domain_box(), 8, 11) {
        let nb = neighborhood(&m, &p, Extension::Projected);
        let o = oneill_tensors(&nb);
        let k = nb.vertical_count();
        assert!(o.a.get(k, k).amax() > 1e-3);
        assert!(closed_form_a_residual(&m, &nb, &o).unwrap() < 1e-6);
        assert!(a_alternation_residual(&m, &nb, &o).unwrap() < 1e-6);
        let s = second_fundamental_form(&nb, &o);
        let l = lemma_residuals(&nb, &o, &s);
        assert!(l.horizontal < 1e-6 && l.vertical < 1e-6 && l.mixed < 1e-6, "{l:?}");
        let formula = tension_conformal_formula(&nb, &s);
        assert!((formula - &s.tension).amax() / nb.dilation < 1e-5);
    }
}

#[test]
fn tensors_do_not_depend_on_the_extension() {
    for (m, p) in [
        (plain_map(2, 0.2, 1.0, &["x1*exp(x2)"]), vec![0.4, 0.7]),
        (plain_map(3, 0.5, 1.5, &["sqrt(x1^2 + x2^2 + x3^2)"]), vec![0.6, 1.1, 0.9]),
    ] {
        let a = neighborhood(&m, &p, Extension::Projected);
        let b = neighborhood(&m, &p, Extension::Scaled);
        assert!(tensoriality_residual(&a, &b) < 1e-6);
    }
}
