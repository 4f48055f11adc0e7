//! Deterministic sampling of chart points and unit directions.

use std::f64::consts::PI;

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::scalar::Real;

/// Default seed for every sampled report.
pub const DEFAULT_SEED: u64 = 0x5EED;

/// Per-coordinate closed intervals.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DomainBox(pub Vec<[f64; 2]>);

impl DomainBox {
    pub fn cube(dimension: usize, lo: f64, hi: f64) -> Self {
        DomainBox(vec![[lo, hi]; dimension])
    }

    pub fn dimension(&self) -> usize {
        self.0.len()
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        p.len() == self.0.len()
            && p.iter().zip(&self.0).all(|(x, [lo, hi])| *lo <= *x && *x <= *hi)
    }

    pub fn is_valid(&self) -> bool {
        self.0.iter().all(|[lo, hi]| lo.is_finite() && hi.is_finite() && lo <= hi)
    }

    /// Restricts coordinate `k` to `[lo, hi]`.
    pub fn with(mut self, k: usize, lo: f64, hi: f64) -> Self {
        self.0[k] = [lo, hi];
        self
    }

    /// Centre of the box.
    pub fn center(&self) -> Vec<f64> {
        self.0.iter().map(|[lo, hi]| 0.5 * (lo + hi)).collect()
    }
}

/// `count` points drawn uniformly from the box with a ChaCha8 stream.
pub fn sample_points(domain: &DomainBox, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            domain
                .0
                .iter()
                .map(|&[lo, hi]| if lo == hi { lo } else { rng.random_range(lo..=hi) })
                .collect()
        })
        .collect()
}

pub fn to_vector<T: Real>(p: &[f64]) -> DVector<T> {
    DVector::from_iterator(p.len(), p.iter().map(|&x| T::lit(x)))
}

/// Deterministic, roughly uniform unit directions in `R^dim`:
/// golden-angle points on the circle, the Fibonacci lattice on `S^2`, and a
/// normalized Kronecker sequence above that.
pub fn unit_directions(dim: usize, count: usize) -> Vec<Vec<f64>> {
    let golden_angle = PI * (3.0 - 5f64.sqrt());
    match dim {
        0 => Vec::new(),
        1 => vec![vec![1.0]],
        2 => (0..count)
            .map(|i| {
                let t = i as f64 * golden_angle;
                vec![t.cos(), t.sin()]
            })
            .collect(),
        3 => (0..count)
            .map(|i| {
                let z = 1.0 - (2.0 * i as f64 + 1.0) / count as f64;
                let r = (1.0 - z * z).sqrt();
                let t = i as f64 * golden_angle;
                vec![r * t.cos(), r * t.sin(), z]
            })
            .collect(),
        d => {
            // generalized golden ratio: root of x^(d+1) = x + 1
            let mut phi = 2.0_f64;
            for _ in 0..64 {
                phi = (1.0 + phi).powf(1.0 / (d as f64 + 1.0));
            }
            let alpha: Vec<f64> = (1..=d).map(|j| (1.0 / phi.powi(j as i32)).fract()).collect();
            (1..=count)
                .map(|i| {
                    let v: Vec<f64> = alpha
                        .iter()
                        .map(|a| 2.0 * (0.5 + a * i as f64).fract() - 1.0)
                        .collect();
                    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                    v.into_iter().map(|x| x / n).collect()
                })
                .collect()
        }
    }
}
