//! Independent oracles and generators shared by the integration tests.
//!
//! Nothing here calls the library's frame, slant or derivative code: kernels
//! come from an SVD of a finite-difference Jacobian and gradients from a
//! five-point stencil.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use slantsub::{Expr, SmoothMapSpec};

/// Source text of a smooth expression in `x1..x_dim` that is finite on
/// `[-1, 1]^dim`: divisions, logarithms and roots only see arguments bounded
/// away from zero.
pub fn expression(dim: usize, depth: u32) -> BoxedStrategy<String> {
    let leaf = prop_oneof![
        (1..=dim).prop_map(|k| format!("x{k}")),
        (-2.0..2.0f64).prop_map(|c| format!("{c:.3}")),
    ];
    leaf.prop_recursive(depth, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a}) + ({b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a}) - ({b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a})*({b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a})/(2.5 + cos({b}))")),
            inner.clone().prop_map(|a| format!("sin({a})")),
            inner.clone().prop_map(|a| format!("cos({a})")),
            inner.clone().prop_map(|a| format!("exp(sin({a}))")),
            inner.clone().prop_map(|a| format!("ln(1 + ({a})^2)")),
            inner.clone().prop_map(|a| format!("sqrt(0.5 + ({a})^2)")),
            inner.clone().prop_map(|a| format!("({a})^3")),
            inner.clone().prop_map(|a| format!("-({a})")),
            inner.prop_map(|a| format!("(1.2 + sin({a}))^1.5")),
        ]
    })
    .boxed()
}

pub fn point(dim: usize) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(-1.0..1.0f64, dim)
}

/// Fourth-order central differences.
pub fn five_point_gradient(e: &Expr, p: &[f64]) -> Vec<f64> {
    let h = 1e-3;
    let at = |k: usize, s: f64| {
        let mut q = p.to_vec();
        q[k] += s * h;
        e.eval::<f64>(&q).unwrap()
    };
    (0..p.len())
        .map(|k| (at(k, -2.0) - 8.0 * at(k, -1.0) + 8.0 * at(k, 1.0) - at(k, 2.0)) / (12.0 * h))
        .collect()
}

/// Jacobian of the map by central differences of its values.
pub fn jacobian(m: &SmoothMapSpec, p: &[f64]) -> DMatrix<f64> {
    let h = 1e-6;
    let (s, n) = (m.target_dimension(), m.source_dimension());
    let mut j = DMatrix::zeros(s, n);
    for k in 0..n {
        let mut plus = p.to_vec();
        let mut minus = p.to_vec();
        plus[k] += h;
        minus[k] -= h;
        let d = (m.value_at::<f64>(&plus).unwrap() - m.value_at::<f64>(&minus).unwrap()) / (2.0 * h);
        j.set_column(k, &d);
    }
    j
}

/// Orthonormal basis of the kernel of `j` (Euclidean metric) from a full SVD.
pub fn kernel(j: &DMatrix<f64>) -> Vec<DVector<f64>> {
    let n = j.ncols();
    let padded = DMatrix::from_fn(n, n, |r, c| if r < j.nrows() { j[(r, c)] } else { 0.0 });
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.unwrap();
    let scale = svd.singular_values.max().max(1.0);
    (0..n)
        .filter(|&i| svd.singular_values[i] < 1e-7 * scale)
        .map(|i| v_t.row(i).transpose())
        .collect()
}

pub fn projection(basis: &[DVector<f64>], v: &DVector<f64>) -> DVector<f64> {
    basis.iter().fold(DVector::zeros(v.len()), |acc, b| acc + b * b.dot(v))
}

/// Slant angles of `map` at `p` on a grid of `steps` directions over the
/// half-circle in every coordinate 2-plane of an orthonormal basis of
/// `ker ψ* ∩ ξ^⊥`. Flat metric only.
pub fn grid_angles(m: &SmoothMapSpec, p: &[f64], steps: usize) -> Vec<f64> {
    let acs = m.structure().expect("structure");
    let phi = acs.phi_at::<f64>(p).unwrap();
    let xi = acs.xi_at::<f64>(p).unwrap().normalize();
    let ker = kernel(&jacobian(m, p));
    // Gram–Schmidt of the kernel against ξ
    let mut basis: Vec<DVector<f64>> = Vec::new();
    for v in &ker {
        let mut w = v - &xi * xi.dot(v);
        for b in &basis {
            w -= b * b.dot(&w);
        }
        if w.norm() > 1e-6 {
            basis.push(w.normalize());
        }
    }
    let angle = |v: &DVector<f64>| {
        let image = &phi * v;
        let vertical = projection(&ker, &image);
        (&image - &vertical).norm().atan2(vertical.norm())
    };
    let mut out = Vec::new();
    if basis.len() == 1 {
        out.push(angle(&basis[0]));
    }
    for a in 0..basis.len() {
        for b in a + 1..basis.len() {
            for i in 0..steps {
                let t = std::f64::consts::PI * i as f64 / (steps - 1) as f64;
                out.push(angle(&(&basis[a] * t.cos() + &basis[b] * t.sin())));
            }
        }
    }
    out
}
