//! Property tests for the expression layer: forward-mode gradients against a
//! finite-difference oracle, printing against re-parsing, and the product rule.

mod common;

use common::{expression, five_point_gradient, point};
use proptest::prelude::*;
use slantsub::parse;

const DIM: usize = 4;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn dual_gradient_matches_finite_differences(src in expression(DIM, 4), p in point(DIM)) {
        let e = parse(&src, DIM).unwrap();
        let dual = e.eval_dual(&p).unwrap();
        let fd = five_point_gradient(&e, &p);
        for k in 0..DIM {
            let scale = dual.derivatives[k].abs().max(1.0);
            prop_assert!(
                (dual.derivatives[k] - fd[k]).abs() / scale < 1e-6,
                "{src} at {p:?}: d/dx{} dual {} fd {}", k + 1, dual.derivatives[k], fd[k]
            );
        }
        let plain: f64 = e.eval(&p).unwrap();
        prop_assert!((plain - dual.value).abs() <= 1e-12 * plain.abs().max(1.0));
    }

    #[test]
    fn printing_is_a_fixed_point_of_parsing(src in expression(DIM, 4), p in point(DIM)) {
        let once = parse(&src, DIM).unwrap();
        let printed = once.to_string();
        let twice = parse(&printed, DIM).unwrap();
        prop_assert_eq!(twice.to_string(), printed.clone());
        let a: f64 = once.eval(&p).unwrap();
        let b: f64 = twice.eval(&p).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0), "{src} -> {printed}: {a} vs {b}");
    }

    #[test]
    fn product_rule(f in expression(DIM, 3), g in expression(DIM, 3), p in point(DIM)) {
        let ef = parse(&f, DIM).unwrap().eval_dual(&p).unwrap();
        let eg = parse(&g, DIM).unwrap().eval_dual(&p).unwrap();
        let fg = parse(&format!("({f})*({g})"), DIM).unwrap().eval_dual(&p).unwrap();
        for k in 0..DIM {
            let expected = ef.derivatives[k] * eg.value + ef.value * eg.derivatives[k];
            prop_assert!((fg.derivatives[k] - expected).abs() <= 1e-10 * expected.abs().max(1.0));
        }
    }

    #[test]
    fn single_precision_tracks_double(src in expression(DIM, 3), p in point(DIM)) {
        let e = parse(&src, DIM).unwrap();
        let d: f64 = e.eval(&p).unwrap();
        let p32: Vec<f32> = p.iter().map(|&x| x as f32).collect();
        let s: f32 = e.eval(&p32).unwrap();
        prop_assert!((s as f64 - d).abs() <= 1e-3 * d.abs().max(1.0), "{src}: {s} vs {d}");
    }
}
