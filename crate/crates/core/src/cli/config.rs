//! JSON configuration.
//!
//! ```json
//! {
//!   "fixture": "psi1",
//!   "params": {"alpha": 0.5, "beta": 0.5, "pairing": "cross"},
//!   "run": {"checks": ["thm-D2"], "samples": 20, "seed": 24301,
//!           "tolerances": {"angle": 1e-6, "identity": 1e-8, "derivative": 1e-5}}
//! }
//! ```
//!
//! or, instead of `fixture`/`params`, an inline map: `source` (a builtin
//! structure name or `{dimension, metric, phi, xi, eta, domain_box}`),
//! `target` (`{dimension, metric, domain_box}`) and `map` (`{components}`).
//! Expression strings use `x1..xn`.

use std::collections::BTreeMap;

use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::Value;

use super::fixtures::build_fixture;
use super::ConfigError;
use crate::geometry::{builtin_by_name, parse_matrix, parse_vector, AlmostContactStructure, ManifoldSpec, BUILTIN_NAMES};
use crate::map_analysis::SmoothMapSpec;
use crate::sampling::{DomainBox, DEFAULT_SEED};
use crate::theorems::{is_check_id, Tolerances};

pub const DEFAULT_SAMPLES: usize = 20;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    fixture: Option<String>,
    #[serde(default)]
    params: BTreeMap<String, Value>,
    source: Option<Value>,
    target: Option<TargetSection>,
    map: Option<MapSection>,
    #[serde(default)]
    run: RunSection,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SourceSection {
    dimension: usize,
    metric: Option<Vec<Vec<String>>>,
    phi: Vec<Vec<String>>,
    xi: Vec<String>,
    eta: Vec<String>,
    domain_box: Option<Vec<[f64; 2]>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct TargetSection {
    dimension: usize,
    metric: Option<Vec<Vec<String>>>,
    domain_box: Option<Vec<[f64; 2]>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct MapSection {
    components: Vec<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RunSection {
    checks: Option<Vec<String>>,
    samples: Option<usize>,
    seed: Option<u64>,
    tolerances: Option<Tolerances>,
}

/// Run parameters after defaults; command-line flags are applied on top by
/// the caller.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub checks: Option<Vec<String>>,
    pub samples: usize,
    pub seed: u64,
    pub tolerances: Tolerances,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            checks: None,
            samples: DEFAULT_SAMPLES,
            seed: DEFAULT_SEED,
            tolerances: Tolerances::default(),
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.samples == 0 {
            return Err(ConfigError::Invalid("samples must be at least 1".into()));
        }
        if !self.tolerances.is_valid() {
            return Err(ConfigError::Invalid("tolerances must be positive and finite".into()));
        }
        if let Some(ids) = &self.checks {
            if let Some(bad) = ids.iter().find(|id| !is_check_id(id)) {
                return Err(ConfigError::UnknownCheck(bad.clone()));
            }
        }
        Ok(())
    }
}

/// What a configuration describes.
#[derive(Clone, Debug)]
pub struct Subject {
    /// Fixture name, or `inline`.
    pub label: String,
    pub params: BTreeMap<String, Value>,
    pub pairing: Option<String>,
    pub map: SmoothMapSpec,
    pub documented_angle: Option<f64>,
    pub documented_dilation: Option<f64>,
}

pub fn subject_from_fixture(name: &str, params: &BTreeMap<String, Value>) -> Result<Subject, ConfigError> {
    let f = build_fixture(name, params)?;
    Ok(Subject {
        label: f.name,
        params: f.params,
        pairing: Some(f.pairing),
        map: f.map,
        documented_angle: f.documented_angle,
        documented_dilation: f.documented_dilation,
    })
}

fn typed<T: DeserializeOwned>(value: Value, prefix: &str) -> Result<T, ConfigError> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let inner = e.path().to_string();
        let path = match (prefix.is_empty(), inner == ".") {
            (true, _) => inner,
            (false, true) => prefix.to_string(),
            (false, false) => format!("{prefix}.{inner}"),
        };
        ConfigError::Schema {
            path,
            message: e.into_inner().to_string(),
        }
    })
}

fn domain(b: Option<Vec<[f64; 2]>>, dim: usize, what: &str) -> Result<DomainBox, ConfigError> {
    let b = b.map(DomainBox).unwrap_or_else(|| DomainBox::cube(dim, -1.0, 1.0));
    if b.dimension() != dim || !b.is_valid() {
        return Err(ConfigError::Invalid(format!(
            "{what}.domain_box must list {dim} intervals [lo, hi] with lo < hi"
        )));
    }
    Ok(b)
}

fn manifold(metric: Option<Vec<Vec<String>>>, dim: usize, b: DomainBox, what: &str) -> Result<ManifoldSpec, ConfigError> {
    match metric {
        None => Ok(ManifoldSpec::euclidean(dim, b)),
        Some(rows) => {
            if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
                return Err(ConfigError::Invalid(format!("{what}.metric must be {dim} x {dim}")));
            }
            Ok(ManifoldSpec::new(parse_matrix(&rows, dim, &format!("{what}.metric"))?, b)?)
        }
    }
}

fn inline_source(value: Value) -> Result<(ManifoldSpec, AlmostContactStructure), ConfigError> {
    if let Value::String(name) = &value {
        return builtin_by_name(name).ok_or_else(|| {
            ConfigError::Invalid(format!(
                "unknown builtin structure `{name}` (available: {})",
                BUILTIN_NAMES.join(", ")
            ))
        });
    }
    let s: SourceSection = typed(value, "source")?;
    let dim = s.dimension;
    let b = domain(s.domain_box, dim, "source")?;
    let m = manifold(s.metric, dim, b, "source")?;
    if s.phi.len() != dim || s.phi.iter().any(|r| r.len() != dim) || s.xi.len() != dim || s.eta.len() != dim {
        return Err(ConfigError::Invalid(format!(
            "source.phi must be {dim} x {dim}, source.xi and source.eta of length {dim}"
        )));
    }
    let acs = AlmostContactStructure::new(
        parse_matrix(&s.phi, dim, "source.phi")?,
        parse_vector(&s.xi, dim, "source.xi")?,
        parse_vector(&s.eta, dim, "source.eta")?,
    )?;
    Ok((m, acs))
}

/// Parses configuration text into the subject and the run parameters.
pub fn load_config(text: &str) -> Result<(Subject, RunConfig), ConfigError> {
    let value: Value = serde_json::from_str(text).map_err(|e| ConfigError::Schema {
        path: ".".into(),
        message: e.to_string(),
    })?;
    let file: ConfigFile = typed(value, "")?;
    let inline = file.source.is_some() || file.target.is_some() || file.map.is_some();
    let subject = match (&file.fixture, inline) {
        (Some(_), true) => {
            return Err(ConfigError::Invalid(
                "give either `fixture` or `source`/`target`/`map`, not both".into(),
            ))
        }
        (Some(name), false) => subject_from_fixture(name, &file.params)?,
        (None, true) => {
            if !file.params.is_empty() {
                return Err(ConfigError::Invalid("`params` applies only to fixtures".into()));
            }
            let (Some(source), Some(target), Some(map)) = (file.source, file.target, file.map) else {
                return Err(ConfigError::Invalid("an inline map needs `source`, `target` and `map`".into()));
            };
            let (src, acs) = inline_source(source)?;
            let tb = domain(target.domain_box, target.dimension, "target")?;
            let tgt = manifold(target.metric, target.dimension, tb, "target")?;
            let components = parse_vector(&map.components, src.dimension(), "map.components")?;
            let map = SmoothMapSpec::new(src, Some(acs), tgt, components).map_err(|e| ConfigError::Invalid(e.to_string()))?;
            Subject {
                label: "inline".into(),
                params: BTreeMap::new(),
                pairing: None,
                map,
                documented_angle: None,
                documented_dilation: None,
            }
        }
        (None, false) => return Err(ConfigError::Invalid("configuration names no fixture and no map".into())),
    };
    let run = RunConfig {
        checks: file.run.checks,
        samples: file.run.samples.unwrap_or(DEFAULT_SAMPLES),
        seed: file.run.seed.unwrap_or(DEFAULT_SEED),
        tolerances: file.run.tolerances.unwrap_or_default(),
    };
    run.validate()?;
    Ok((subject, run))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixture_with_defaults() {
        let (s, r) = load_config(r#"{"fixture":"psi2"}"#).unwrap();
        assert_eq!(s.label, "psi2");
        assert_eq!(r, RunConfig::default());
    }

    #[test]
    fn fixture_params_pass_through() {
        let (s, _) = load_config(
            r#"{"fixture":"psi1","params":{"alpha":0.5235987755982988,"beta":0.5235987755982988,"pairing":"cross"}}"#,
        )
        .unwrap();
        assert_eq!(s.pairing.as_deref(), Some("cross"));
        assert_eq!(s.params["alpha"], Value::from(0.5235987755982988));
    }

    #[test]
    fn unknown_field_reports_its_path() {
        let e = load_config(r#"{"fixture":"psi2","run":{"tolerances":{"angel":1e-6}}}"#).unwrap_err();
        match e {
            ConfigError::Schema { path, message } => {
                assert_eq!(path, "run.tolerances.angel");
                assert!(message.contains("angel"), "{message}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn wrong_type_reports_its_path() {
        let e = load_config(r#"{"fixture":"psi2","run":{"samples":"many"}}"#).unwrap_err();
        assert!(matches!(e, ConfigError::Schema { ref path, .. } if path == "run.samples"), "{e:?}");
    }

    #[test]
    fn inline_dimension_mismatch() {
        let text = r#"{
            "source": "cosym_r5",
            "target": {"dimension": 2},
            "map": {"components": ["x1", "x2", "x3"]}
        }"#;
        let e = load_config(text).unwrap_err();
        assert!(matches!(e, ConfigError::Invalid(ref m) if m.contains("3 components")), "{e:?}");
    }

    #[test]
    fn inline_structure_round_trip() {
        let text = r#"{
            "source": {"dimension": 3,
                       "phi": [["0","1","0"],["-1","0","0"],["0","0","0"]],
                       "xi": ["0","0","1"], "eta": ["0","0","1"]},
            "target": {"dimension": 1},
            "map": {"components": ["x1"]},
            "run": {"checks": ["thm-D2"], "samples": 3}
        }"#;
        let (s, r) = load_config(text).unwrap();
        assert_eq!(s.label, "inline");
        assert_eq!(r.samples, 3);
        assert_eq!(r.checks, Some(vec!["thm-D2".to_string()]));
    }

    #[test]
    fn rejects_bad_run_values() {
        assert!(matches!(
            load_config(r#"{"fixture":"psi2","run":{"samples":0}}"#),
            Err(ConfigError::Invalid(_))
        ));
        assert!(matches!(
            load_config(r#"{"fixture":"psi2","run":{"checks":["thm-nope"]}}"#),
            Err(ConfigError::UnknownCheck(_))
        ));
        assert!(matches!(
            load_config(r#"{"fixture":"psi2","run":{"tolerances":{"angle":-1}}}"#),
            Err(ConfigError::Invalid(_))
        ));
    }
}
