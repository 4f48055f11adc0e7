//! Outcome of a single numerical check.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Vacuous,
    Indeterminate,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Vacuous => "vacuous",
            Status::Indeterminate => "indeterminate",
        }
    }
}

/// Truth value of one side of an equivalence, with the band `[tol, 10 tol)`
/// reported as undecided rather than forced either way.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Truth {
    True,
    False,
    Indeterminate,
}

impl Truth {
    /// `residual < tol` is true, `residual >= 10 tol` false.
    pub fn from_residual(residual: f64, tol: f64) -> Self {
        if residual < tol {
            Truth::True
        } else if residual >= 10.0 * tol {
            Truth::False
        } else {
            Truth::Indeterminate
        }
    }

    pub fn as_bool(self) -> Option<bool> {
        match self {
            Truth::True => Some(true),
            Truth::False => Some(false),
            Truth::Indeterminate => None,
        }
    }

    pub fn and(self, other: Truth) -> Truth {
        match (self, other) {
            (Truth::False, _) | (_, Truth::False) => Truth::False,
            (Truth::True, Truth::True) => Truth::True,
            _ => Truth::Indeterminate,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckVerdict {
    pub check_id: String,
    pub status: Status,
    pub pass: bool,
    pub vacuous: bool,
    pub points_sampled: usize,
    /// Largest residual of side (i), or of the checked identity.
    pub lhs_residual: Option<f64>,
    /// Largest residual of side (ii), or of a companion identity.
    pub rhs_residual: Option<f64>,
    pub tolerance: f64,
    pub side_i: Option<Truth>,
    pub side_ii: Option<Truth>,
    pub notes: String,
}

impl CheckVerdict {
    fn base(id: &str, status: Status, points: usize, tol: f64) -> Self {
        CheckVerdict {
            check_id: id.to_string(),
            status,
            pass: status == Status::Pass,
            vacuous: status == Status::Vacuous,
            points_sampled: points,
            lhs_residual: None,
            rhs_residual: None,
            tolerance: tol,
            side_i: None,
            side_ii: None,
            notes: String::new(),
        }
    }

    pub fn vacuous(id: &str, points: usize, tol: f64, notes: impl Into<String>) -> Self {
        let mut v = Self::base(id, Status::Vacuous, points, tol);
        v.notes = notes.into();
        v
    }

    /// Identity check: passes iff every residual is below `tol`.
    pub fn identity(id: &str, points: usize, tol: f64, residuals: (f64, Option<f64>)) -> Self {
        let (lhs, rhs) = residuals;
        let ok = lhs < tol && rhs.is_none_or(|r| r < tol);
        let mut v = Self::base(id, if ok { Status::Pass } else { Status::Fail }, points, tol);
        v.lhs_residual = Some(finite(lhs));
        v.rhs_residual = rhs.map(finite);
        v
    }

    /// Equivalence check: passes iff both sides are decided and agree.
    pub fn equivalence(id: &str, points: usize, tol: f64, side_i: f64, side_ii: f64) -> Self {
        let a = Truth::from_residual(side_i, tol);
        let b = Truth::from_residual(side_ii, tol);
        Self::from_truths(id, points, tol, (side_i, a), (side_ii, b))
    }

    pub fn from_truths(
        id: &str,
        points: usize,
        tol: f64,
        side_i: (f64, Truth),
        side_ii: (f64, Truth),
    ) -> Self {
        let status = match (side_i.1.as_bool(), side_ii.1.as_bool()) {
            (Some(a), Some(b)) if a == b => Status::Pass,
            (Some(_), Some(_)) => Status::Fail,
            _ => Status::Indeterminate,
        };
        let mut v = Self::base(id, status, points, tol);
        v.lhs_residual = Some(finite(side_i.0));
        v.rhs_residual = Some(finite(side_ii.0));
        v.side_i = Some(side_i.1);
        v.side_ii = Some(side_ii.1);
        v
    }

    /// Equivalence decided point by point: fails if some point has decided,
    /// disagreeing sides; indeterminate if some point falls in the band.
    /// The reported side values are the conjunctions over points.
    pub fn pointwise_equivalence(id: &str, tol: f64, sides: &[(f64, f64)]) -> Self {
        if sides.is_empty() {
            return Self::vacuous(id, 0, tol, "no point satisfies the hypotheses");
        }
        let mut disagree = false;
        let mut undecided = false;
        let (mut side_i, mut side_ii) = (Truth::True, Truth::True);
        let (mut max_i, mut max_ii) = (0.0_f64, 0.0_f64);
        for &(a, b) in sides {
            let ta = Truth::from_residual(a, tol);
            let tb = Truth::from_residual(b, tol);
            match (ta.as_bool(), tb.as_bool()) {
                (Some(x), Some(y)) => disagree |= x != y,
                _ => undecided = true,
            }
            side_i = side_i.and(ta);
            side_ii = side_ii.and(tb);
            max_i = max_i.max(finite(a));
            max_ii = max_ii.max(finite(b));
        }
        let status = if disagree {
            Status::Fail
        } else if undecided {
            Status::Indeterminate
        } else {
            Status::Pass
        };
        let mut v = Self::base(id, status, sides.len(), tol);
        v.lhs_residual = Some(max_i);
        v.rhs_residual = Some(max_ii);
        v.side_i = Some(side_i);
        v.side_ii = Some(side_ii);
        v
    }

    pub fn with_notes(mut self, notes: impl Into<String>) -> Self {
        self.notes = notes.into();
        self
    }

    pub fn push_note(&mut self, note: impl AsRef<str>) {
        if !self.notes.is_empty() {
            self.notes.push_str("; ");
        }
        self.notes.push_str(note.as_ref());
    }

    /// Downgrades a passing verdict to failure.
    pub fn fail_with(&mut self, note: impl AsRef<str>) {
        if self.status == Status::Pass {
            self.status = Status::Fail;
            self.pass = false;
        }
        self.push_note(note);
    }
}

// JSON has no representation for non-finite numbers
fn finite(x: f64) -> f64 {
    if x.is_finite() {
        x
    } else {
        f64::MAX
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejection_band_is_indeterminate() {
        assert_eq!(Truth::from_residual(1e-6, 1e-5), Truth::True);
        assert_eq!(Truth::from_residual(5e-5, 1e-5), Truth::Indeterminate);
        assert_eq!(Truth::from_residual(1e-4, 1e-5), Truth::False);
        let v = CheckVerdict::equivalence("x", 3, 1e-5, 2e-5, 1e-9);
        assert_eq!(v.status, Status::Indeterminate);
        assert!(!v.pass);
    }

    #[test]
    fn pointwise_disagreement_fails() {
        let v = CheckVerdict::pointwise_equivalence("x", 1e-5, &[(0.0, 0.0), (0.5, 0.4)]);
        assert_eq!(v.status, Status::Pass);
        assert_eq!(v.side_i, Some(Truth::False));
        let v = CheckVerdict::pointwise_equivalence("x", 1e-5, &[(0.5, 0.0), (0.5, 0.4)]);
        assert_eq!(v.status, Status::Fail);
        assert!(CheckVerdict::pointwise_equivalence("x", 1e-5, &[]).vacuous);
    }

    #[test]
    fn agreeing_false_sides_pass() {
        let v = CheckVerdict::equivalence("x", 3, 1e-5, 0.3, 0.2);
        assert_eq!(v.status, Status::Pass);
        let v = CheckVerdict::equivalence("x", 3, 1e-5, 0.3, 1e-12);
        assert_eq!(v.status, Status::Fail);
    }
}
