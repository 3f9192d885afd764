//! Structured results of identity and classification checks.

use std::fmt;

use crate::geometry::TensorField;
use crate::symbolic::Expr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Status {
    Pass,
    Fail,
    /// The check's premise does not hold for the input; the implication is
    /// vacuously true.
    HypothesisNotSatisfied,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::HypothesisNotSatisfied => "hypothesis-not-satisfied",
        }
    }

    /// Vacuous results count as success.
    pub fn is_success(self) -> bool {
        self != Status::Fail
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ResidualValue {
    Scalar(Expr),
    Tensor(TensorField),
}

impl ResidualValue {
    pub fn is_zero(&self) -> bool {
        match self {
            ResidualValue::Scalar(e) => e.is_zero(),
            ResidualValue::Tensor(t) => t.is_zero(),
        }
    }

    /// Nonzero components with their indices (empty index for scalars).
    pub fn witnesses(&self) -> Vec<(Vec<usize>, Expr)> {
        match self {
            ResidualValue::Scalar(e) if !e.is_zero() => vec![(Vec::new(), e.clone())],
            ResidualValue::Scalar(_) => Vec::new(),
            ResidualValue::Tensor(t) => t.nonzero(),
        }
    }
}

/// A named residual; the check holds when it normalizes to zero.
#[derive(Clone, Debug, PartialEq)]
pub struct Residual {
    pub label: String,
    pub value: ResidualValue,
}

impl Residual {
    pub fn scalar(label: impl Into<String>, e: Expr) -> Self {
        Residual {
            label: label.into(),
            value: ResidualValue::Scalar(e),
        }
    }

    pub fn tensor(label: impl Into<String>, t: TensorField) -> Self {
        Residual {
            label: label.into(),
            value: ResidualValue::Tensor(t),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckReport {
    pub id: String,
    pub status: Status,
    pub residuals: Vec<Residual>,
    /// Quantities extracted along the way, such as `r`, `λ`, `σ` or `ρ`.
    pub derived: Vec<(String, Expr)>,
    pub notes: Vec<String>,
}

impl CheckReport {
    /// Pass iff every residual is zero.
    pub fn from_residuals(id: impl Into<String>, residuals: Vec<Residual>) -> Self {
        let status = if residuals.iter().all(Residual::is_zero) {
            Status::Pass
        } else {
            Status::Fail
        };
        CheckReport {
            id: id.into(),
            status,
            residuals,
            derived: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn vacuous(id: impl Into<String>, note: impl Into<String>) -> Self {
        CheckReport {
            id: id.into(),
            status: Status::HypothesisNotSatisfied,
            residuals: Vec::new(),
            derived: Vec::new(),
            notes: vec![note.into()],
        }
    }

    pub fn failure(id: impl Into<String>, note: impl Into<String>) -> Self {
        CheckReport {
            id: id.into(),
            status: Status::Fail,
            residuals: Vec::new(),
            derived: Vec::new(),
            notes: vec![note.into()],
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn with_derived(mut self, name: impl Into<String>, value: Expr) -> Self {
        self.derived.push((name.into(), value));
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    pub fn derived(&self, name: &str) -> Option<&Expr> {
        self.derived.iter().find(|(n, _)| n == name).map(|(_, e)| e)
    }

    pub fn residual(&self, label: &str) -> Option<&Residual> {
        self.residuals.iter().find(|r| r.label == label)
    }

    /// First nonzero residual component, if any.
    pub fn first_witness(&self) -> Option<(String, Vec<usize>, Expr)> {
        self.residuals.iter().find_map(|r| {
            r.value
                .witnesses()
                .into_iter()
                .next()
                .map(|(i, e)| (r.label.clone(), i, e))
        })
    }
}
