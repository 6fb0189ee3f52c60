use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Status {
    Pass,
    Fail,
    /// The disk-vs-radial regression gate failed, so the FEM result is not trusted either way.
    Inconclusive,
}

/// Certificate for one inequality or identity.
///
/// Convention: the claim is `lhs ≤ rhs`, `slack = rhs - lhs`, and
/// `pass ⇔ slack ≥ -tol`. Identities are reported with `lhs` the relative
/// mismatch and `rhs = 0`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckReport {
    pub check_id: String,
    pub inputs: serde_json::Value,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    /// Absolute tolerance; relative tolerances are resolved against `max(|lhs|, |rhs|)`.
    pub tol: f64,
    pub pass: bool,
    pub status: Status,
    pub provenance: Vec<String>,
}

/// Absolute floor added to relative tolerances so that `0 ≤ 0` style claims
/// survive rounding.
pub const ABS_FLOOR: f64 = 1e-12;

/// Relative mismatch `|a - b| / max(|a|, |b|)`, zero when both vanish.
pub fn rel_diff(a: f64, b: f64) -> f64 {
    let s = a.abs().max(b.abs());
    if s == 0.0 {
        0.0
    } else {
        (a - b).abs() / s
    }
}

impl CheckReport {
    fn build(check_id: String, inputs: serde_json::Value, lhs: f64, rhs: f64, tol: f64) -> Self {
        let slack = rhs - lhs;
        let pass = slack >= -tol;
        CheckReport {
            check_id,
            inputs,
            lhs,
            rhs,
            slack,
            tol,
            pass,
            status: if pass { Status::Pass } else { Status::Fail },
            provenance: Vec::new(),
        }
    }

    /// `lhs ≤ rhs` up to `rel_tol · max(|lhs|, |rhs|) + ABS_FLOOR`.
    pub fn le(check_id: impl Into<String>, inputs: serde_json::Value, lhs: f64, rhs: f64, rel_tol: f64) -> Self {
        let tol = rel_tol * lhs.abs().max(rhs.abs()) + ABS_FLOOR;
        Self::build(check_id.into(), inputs, lhs, rhs, tol)
    }

    /// `a ≈ b` with relative mismatch at most `rel_tol`.
    pub fn close(check_id: impl Into<String>, inputs: serde_json::Value, a: f64, b: f64, rel_tol: f64) -> Self {
        let mut r = Self::build(check_id.into(), inputs, rel_diff(a, b), 0.0, rel_tol);
        r.provenance.push(format!("compared {a:.12e} with {b:.12e}"));
        r
    }

    /// `value ≤ bound` with an absolute tolerance.
    pub fn at_most(check_id: impl Into<String>, inputs: serde_json::Value, value: f64, bound: f64, tol: f64) -> Self {
        Self::build(check_id.into(), inputs, value, bound, tol)
    }

    /// Report for a check whose computation itself failed.
    pub fn error(check_id: impl Into<String>, inputs: serde_json::Value, err: &crate::Error) -> Self {
        CheckReport {
            check_id: check_id.into(),
            inputs,
            lhs: f64::NAN,
            rhs: f64::NAN,
            slack: f64::NAN,
            tol: 0.0,
            pass: false,
            status: Status::Fail,
            provenance: vec![format!("error: {err}")],
        }
    }

    pub fn note(mut self, line: impl Into<String>) -> Self {
        self.provenance.push(line.into());
        self
    }

    pub fn notes(mut self, lines: impl IntoIterator<Item = String>) -> Self {
        self.provenance.extend(lines);
        self
    }

    /// Downgrades a FEM-based report to `Inconclusive` when the gate failed.
    pub fn gated(mut self, gate_passed: bool) -> Self {
        if !gate_passed {
            self.status = Status::Inconclusive;
            self.provenance.push("gate failed: disk FEM disagrees with the radial solver".into());
        }
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn sign_convention() {
        let r = CheckReport::le("a", json!({}), 1.0, 2.0, 0.0);
        assert!(r.pass && r.slack == 1.0);
        let r = CheckReport::le("b", json!({}), 1.02, 1.0, 0.03);
        assert!(r.pass && r.slack < 0.0);
        let r = CheckReport::le("c", json!({}), 1.05, 1.0, 0.03);
        assert!(!r.pass && r.status == Status::Fail);
        let r = CheckReport::close("d", json!({}), 1.0, 1.0 + 1e-7, 1e-6);
        assert!(r.pass && r.rhs == 0.0);
        assert_eq!(CheckReport::le("e", json!({}), 0.0, 0.0, 1e-9).status, Status::Pass);
        assert_eq!(r.gated(false).status, Status::Inconclusive);
    }
}
