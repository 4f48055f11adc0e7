//! Named maps on the flat cosymplectic spaces.
//!
//! Coordinates are `(u_1..u_n, v_1..v_n, t) = (x1..x_{2n+1})`. Each fixture
//! accepts a `pairing` parameter: `identity` pairs `u_i` with `v_i`, `cross`
//! swaps the partners of the first and last pair.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_4, FRAC_PI_6};

use serde_json::Value;

use super::ConfigError;
use crate::expr::{self, Expr};
use crate::geometry::{builtin_cosymplectic, ManifoldSpec, Pairing};
use crate::map_analysis::SmoothMapSpec;
use crate::sampling::DomainBox;

pub struct FixtureInfo {
    pub name: &'static str,
    pub params: &'static [&'static str],
    pub description: &'static str,
}

pub const FIXTURES: [FixtureInfo; 6] = [
    FixtureInfo {
        name: "psi1",
        params: &["alpha", "beta", "pairing"],
        description: "R^5 -> R^2, e^7 (u1 cos a - v1 sin a, u2 sin b - v2 cos b); default a = b = pi/6",
    },
    FixtureInfo {
        name: "psi2",
        params: &["pairing"],
        description: "R^5 -> R^2, pi^5 ((u1 - u2)/sqrt 2, v2)",
    },
    FixtureInfo {
        name: "psi3",
        params: &["pairing"],
        description: "R^7 -> R^4, e^11 (u1, (v1 - v2)/sqrt 2, v3, u2)",
    },
    FixtureInfo {
        name: "psi2_squared",
        params: &["pairing"],
        description: "z^2 after psi2/pi^5 on a box away from z = 0; conformal, not homothetic",
    },
    FixtureInfo {
        name: "psi3_inverted",
        params: &["pairing"],
        description: "inversion y/|y|^2 of R^4 after psi3/e^11 on a box away from y = 0; conformal, not homothetic, dim B = 4",
    },
    FixtureInfo {
        name: "hopf",
        params: &["pairing"],
        description: "Hopf map (2 z1 conj(z2), |z1|^2 - |z2|^2) with z_i = u_i + i v_i, R^5 -> R^3; circle fibres, non-integrable horizontal distribution",
    },
];

/// A resolved fixture.
#[derive(Clone, Debug)]
pub struct Fixture {
    pub name: String,
    /// Parameters with defaults filled in.
    pub params: BTreeMap<String, Value>,
    pub pairing: String,
    pub map: SmoothMapSpec,
    /// Slant angle stated for the example this fixture reproduces, if any.
    pub documented_angle: Option<f64>,
    /// Dilation at every point, when it is constant.
    pub documented_dilation: Option<f64>,
}

fn number(params: &BTreeMap<String, Value>, key: &str, default: f64) -> Result<f64, ConfigError> {
    match params.get(key) {
        None => Ok(default),
        Some(v) => v.as_f64().filter(|x| x.is_finite()).ok_or_else(|| ConfigError::Param {
            key: key.to_string(),
            message: format!("expected a finite number, got {v}"),
        }),
    }
}

fn pairing_name(params: &BTreeMap<String, Value>) -> Result<String, ConfigError> {
    match params.get("pairing") {
        None => Ok("identity".to_string()),
        Some(Value::String(s)) if s == "identity" || s == "cross" => Ok(s.clone()),
        Some(v) => Err(ConfigError::Param {
            key: "pairing".to_string(),
            message: format!("expected \"identity\" or \"cross\", got {v}"),
        }),
    }
}

fn pairing_for(name: &str, n_pairs: usize) -> Pairing {
    if name == "cross" {
        Pairing::swap(n_pairs, 0, n_pairs - 1)
    } else {
        Pairing::identity(n_pairs)
    }
}

fn parse_all(components: &[String], dim: usize) -> Vec<Expr> {
    components
        .iter()
        .map(|c| expr::parse(c, dim).expect("fixture expression parses"))
        .collect()
}

pub fn fixture_names() -> impl Iterator<Item = &'static str> {
    FIXTURES.iter().map(|f| f.name)
}

pub fn build_fixture(name: &str, params: &BTreeMap<String, Value>) -> Result<Fixture, ConfigError> {
    let info = FIXTURES
        .iter()
        .find(|f| f.name == name)
        .ok_or_else(|| ConfigError::UnknownFixture(name.to_string()))?;
    if let Some(key) = params.keys().find(|k| !info.params.contains(&k.as_str())) {
        return Err(ConfigError::Param {
            key: key.clone(),
            message: format!("fixture `{name}` accepts {}", info.params.join(", ")),
        });
    }
    let pairing = pairing_name(params)?;
    let mut resolved = BTreeMap::new();
    resolved.insert("pairing".to_string(), Value::String(pairing.clone()));
    let n_pairs = if name.starts_with("psi3") { 3 } else { 2 };
    let dim = 2 * n_pairs + 1;
    let (source, structure) =
        builtin_cosymplectic(n_pairs, &pairing_for(&pairing, n_pairs)).expect("builtin pairing is valid");
    let mut domain = DomainBox::cube(dim, -1.0, 1.0);
    let (components, target_dim, angle, dilation): (Vec<String>, usize, Option<f64>, Option<f64>) = match name {
        "psi1" => {
            let alpha = number(params, "alpha", FRAC_PI_6)?;
            let beta = number(params, "beta", FRAC_PI_6)?;
            resolved.insert("alpha".to_string(), Value::from(alpha));
            resolved.insert("beta".to_string(), Value::from(beta));
            let (ca, sa, cb, sb) = (alpha.cos(), alpha.sin(), beta.cos(), beta.sin());
            (
                vec![
                    format!("e^7*(x1*{ca:e} - x3*{sa:e})"),
                    format!("e^7*(x2*{sb:e} - x4*{cb:e})"),
                ],
                2,
                Some((alpha + beta).cos().abs().acos()),
                Some(7f64.exp()),
            )
        }
        "psi2" => (
            vec!["pi^5*(x1 - x2)/sqrt(2)".into(), "pi^5*x4".into()],
            2,
            Some(FRAC_PI_4),
            Some(std::f64::consts::PI.powi(5)),
        ),
        "psi3" => (
            vec![
                "e^11*x1".into(),
                "e^11*(x4 - x5)/sqrt(2)".into(),
                "e^11*x6".into(),
                "e^11*x2".into(),
            ],
            4,
            Some(FRAC_PI_4),
            Some(11f64.exp()),
        ),
        "psi2_squared" => {
            // z = (u1 - u2)/sqrt 2 + i v2 stays in [0.7, 2.2] x [0.5, 1.5]
            domain = domain.with(0, 1.0, 2.0).with(1, -1.0, 0.0).with(3, 0.5, 1.5);
            (
                vec![
                    "((x1 - x2)/sqrt(2))^2 - x4^2".into(),
                    "2*((x1 - x2)/sqrt(2))*x4".into(),
                ],
                2,
                None,
                None,
            )
        }
        "psi3_inverted" => {
            domain = domain.with(0, 1.0, 2.0);
            let r2 = "(x1^2 + ((x4 - x5)/sqrt(2))^2 + x6^2 + x2^2)";
            (
                vec![
                    format!("x1/{r2}"),
                    format!("((x4 - x5)/sqrt(2))/{r2}"),
                    format!("x6/{r2}"),
                    format!("x2/{r2}"),
                ],
                4,
                None,
                None,
            )
        }
        "hopf" => {
            domain = domain.with(0, 0.5, 1.5);
            (
                vec![
                    "2*(x1*x2 + x3*x4)".into(),
                    "2*(x3*x2 - x1*x4)".into(),
                    "x1^2 + x3^2 - x2^2 - x4^2".into(),
                ],
                3,
                None,
                None,
            )
        }
        _ => unreachable!("listed fixture"),
    };
    let source = source.with_domain_box(domain).expect("fixture box matches dimension");
    let target = ManifoldSpec::euclidean(target_dim, DomainBox::cube(target_dim, -1.0, 1.0));
    let map = SmoothMapSpec::new(source, Some(structure), target, parse_all(&components, dim))
        .expect("fixture dimensions agree");
    Ok(Fixture {
        name: name.to_string(),
        params: resolved,
        pairing,
        map,
        documented_angle: angle,
        documented_dilation: dilation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(pairs: &[(&str, Value)]) -> BTreeMap<String, Value> {
        pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
    }

    #[test]
    fn every_fixture_builds_with_defaults() {
        for name in fixture_names() {
            let f = build_fixture(name, &BTreeMap::new()).unwrap();
            assert_eq!(f.pairing, "identity");
            assert!(f.map.structure().is_some());
        }
    }

    #[test]
    fn rejects_unknown_names_and_params() {
        assert!(matches!(build_fixture("psi9", &BTreeMap::new()), Err(ConfigError::UnknownFixture(_))));
        let p = params(&[("alpha", Value::from(0.1))]);
        assert!(matches!(build_fixture("psi2", &p), Err(ConfigError::Param { .. })));
        let p = params(&[("pairing", Value::from("diagonal"))]);
        assert!(matches!(build_fixture("psi1", &p), Err(ConfigError::Param { .. })));
    }

    #[test]
    fn psi1_components_match_closed_form() {
        let p = params(&[("alpha", Value::from(0.3)), ("beta", Value::from(0.9))]);
        let f = build_fixture("psi1", &p).unwrap();
        let x = [0.2, -0.4, 0.7, 0.1, 0.5];
        let y = f.map.value_at(&x).unwrap();
        let e7 = 7f64.exp();
        assert!((y[0] - e7 * (0.2 * 0.3f64.cos() - 0.7 * 0.3f64.sin())).abs() < 1e-9);
        assert!((y[1] - e7 * (-0.4 * 0.9f64.sin() - 0.1 * 0.9f64.cos())).abs() < 1e-9);
    }
}
