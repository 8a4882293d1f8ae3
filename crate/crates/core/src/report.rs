//! Verified-inequality ledger entries shared by library reports and the CLI.

use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = ">=")]
    AtLeast,
    #[serde(rename = "==")]
    Equal,
}

/// One runtime-checked inequality `lhs relation rhs` with both sides recorded.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub lhs: f64,
    pub relation: Relation,
    pub rhs: f64,
    pub pass: bool,
}

impl Check {
    pub fn at_most(name: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        Self {
            name: name.into(),
            lhs,
            relation: Relation::AtMost,
            rhs,
            pass: lhs <= rhs,
        }
    }

    pub fn at_least(name: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        Self {
            name: name.into(),
            lhs,
            relation: Relation::AtLeast,
            rhs,
            pass: lhs >= rhs,
        }
    }

    pub fn equal(name: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        Self {
            name: name.into(),
            lhs,
            relation: Relation::Equal,
            rhs,
            pass: lhs == rhs,
        }
    }

    /// `|lhs − rhs| ≤ tol · max(1, |rhs|)`.
    pub fn close(name: impl Into<String>, lhs: f64, rhs: f64, tol: f64) -> Self {
        let pass = (lhs - rhs).abs() <= tol * rhs.abs().max(1.0);
        Self {
            name: name.into(),
            lhs,
            relation: Relation::Equal,
            rhs,
            pass,
        }
    }
}
