use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::map_analysis::{ConformalityReport, SlantReport};
use crate::theorems::Tolerances;
use crate::verdict::{CheckVerdict, Status};

pub const SCHEMA_VERSION: u32 = 1;

/// Dimensions of the frame pieces; `constant` is false when they vary
/// between sampled points, in which case the values are from the first one.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrameSummary {
    pub vertical: usize,
    pub horizontal: usize,
    pub e_kernel: usize,
    pub mu: usize,
    pub xi_vertical: bool,
    pub constant: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Report {
    pub schema_version: u32,
    pub software_version: String,
    pub command: String,
    pub fixture: String,
    pub params: BTreeMap<String, Value>,
    pub pairing: Option<String>,
    pub seed: u64,
    pub samples: usize,
    pub tolerances: Tolerances,
    pub conformality: ConformalityReport,
    pub slant: SlantReport,
    pub frame: FrameSummary,
    pub checks: Vec<CheckVerdict>,
    pub notes: Vec<String>,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time_seconds: Option<f64>,
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// One line per check: id, status, largest residual, points.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let pairing = self.pairing.as_deref().map(|p| format!(", pairing {p}")).unwrap_or_default();
        let _ = writeln!(
            out,
            "{} {}{pairing}; {} points, seed {:#x}",
            self.command, self.fixture, self.samples, self.seed
        );
        let c = &self.conformality;
        let _ = writeln!(
            out,
            "conformal: {}  homothetic: {}  dilation: [{:.10e}, {:.10e}]",
            yes_no(c.is_conformal),
            yes_no(c.is_homothetic),
            c.dilation_min,
            c.dilation_max
        );
        let s = &self.slant;
        let _ = writeln!(
            out,
            "slant: {}  angle {:.10} rad  cos {:.10}  spread {:.1e}",
            s.classification.as_str(),
            s.mean,
            s.cos_mean,
            s.spread
        );
        let f = &self.frame;
        let _ = writeln!(
            out,
            "frame: vertical {}{}, horizontal {}, ker e {}, mu {}",
            f.vertical,
            if f.xi_vertical { " (xi vertical)" } else { "" },
            f.horizontal,
            f.e_kernel,
            f.mu
        );
        if !self.checks.is_empty() {
            let _ = writeln!(out, "{:<22} {:<13} {:>12}  points", "check", "status", "max residual");
        }
        for v in &self.checks {
            let residual = match (v.lhs_residual, v.rhs_residual) {
                (Some(a), Some(b)) => format!("{:.3e}", a.max(b)),
                (Some(a), None) | (None, Some(a)) => format!("{a:.3e}"),
                (None, None) => "-".to_string(),
            };
            let _ = writeln!(
                out,
                "{:<22} {:<13} {:>12}  {}",
                v.check_id,
                v.status.as_str(),
                residual,
                v.points_sampled
            );
        }
        for v in self.checks.iter().filter(|v| !v.notes.is_empty()) {
            let _ = writeln!(out, "  {}: {}", v.check_id, v.notes);
        }
        for n in &self.notes {
            let _ = writeln!(out, "note: {n}");
        }
        if let Some(t) = self.wall_time_seconds {
            let _ = writeln!(out, "wall time: {t:.3} s");
        }
        let _ = writeln!(out, "result: {}", if self.pass { "PASS" } else { "FAIL" });
        out
    }
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

/// Every non-vacuous verdict passed.
pub fn all_pass(checks: &[CheckVerdict]) -> bool {
    checks.iter().all(|v| v.status == Status::Pass || v.status == Status::Vacuous)
}
