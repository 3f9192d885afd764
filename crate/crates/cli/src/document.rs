//! Report documents and their text and JSON renderings.

use std::fmt::Write as _;

use paracontact::report::{CheckReport, ResidualValue, Status};
use paracontact::Expr;
use serde_json::{json, Value};

pub const ENGINE_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub name: String,
    pub entries: Vec<(String, String)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResidualEntry {
    pub label: String,
    /// Nonzero components as (index, value); empty when the residual vanishes.
    pub components: Vec<(String, String)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckEntry {
    pub id: String,
    pub status: Status,
    pub residuals: Vec<ResidualEntry>,
    pub derived: Vec<(String, String)>,
    pub notes: Vec<String>,
}

/// Everything a command prints. Expressions are rendered once, at
/// insertion, with the model's basis labels.
#[derive(Clone, Debug, PartialEq)]
pub struct ReportDocument {
    pub command: String,
    pub engine_version: String,
    pub tables: Vec<Table>,
    pub derived: Vec<(String, String)>,
    pub checks: Vec<CheckEntry>,
    pub warnings: Vec<String>,
}

pub fn index_label(idx: &[usize], labels: &[String]) -> String {
    let parts: Vec<&str> = idx.iter().map(|&i| labels[i].as_str()).collect();
    format!("[{}]", parts.join(", "))
}

impl ReportDocument {
    pub fn new(command: impl Into<String>) -> Self {
        ReportDocument {
            command: command.into(),
            engine_version: ENGINE_VERSION.to_string(),
            tables: Vec::new(),
            derived: Vec::new(),
            checks: Vec::new(),
            warnings: Vec::new(),
        }
    }

    pub fn table(&mut self, name: &str, entries: Vec<(String, String)>) {
        self.tables.push(Table {
            name: name.to_string(),
            entries,
        });
    }

    pub fn derive(&mut self, name: &str, value: &Expr, labels: &[String]) {
        self.derived.push((name.to_string(), value.render(Some(labels))));
    }

    pub fn derive_text(&mut self, name: &str, value: impl Into<String>) {
        self.derived.push((name.to_string(), value.into()));
    }

    pub fn warn(&mut self, message: impl Into<String>) {
        self.warnings.push(message.into());
    }

    /// Add a check; vacuous results also produce a warning.
    pub fn check(&mut self, report: &CheckReport, labels: &[String]) {
        let r = |e: &Expr| e.render(Some(labels));
        let residuals = report
            .residuals
            .iter()
            .map(|res| ResidualEntry {
                label: res.label.clone(),
                components: res
                    .value
                    .witnesses()
                    .into_iter()
                    .map(|(idx, e)| {
                        let at = match res.value {
                            ResidualValue::Scalar(_) => String::new(),
                            ResidualValue::Tensor(_) => index_label(&idx, labels),
                        };
                        (at, r(&e))
                    })
                    .collect(),
            })
            .collect();
        if report.status == Status::HypothesisNotSatisfied {
            let why = report
                .notes
                .first()
                .map(String::as_str)
                .unwrap_or("premise does not hold");
            self.warn(format!("{}: hypothesis not satisfied ({why})", report.id));
        }
        self.checks.push(CheckEntry {
            id: report.id.clone(),
            status: report.status,
            residuals,
            derived: report.derived.iter().map(|(n, e)| (n.clone(), r(e))).collect(),
            notes: report.notes.clone(),
        });
    }

    /// Record an unconditional failure.
    pub fn fail(&mut self, id: &str, note: impl Into<String>) {
        self.check(&CheckReport::failure(id, note), &[]);
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status.is_success())
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else {
            1
        }
    }

    fn counts(&self) -> (usize, usize, usize) {
        let n = |s: Status| self.checks.iter().filter(|c| c.status == s).count();
        (n(Status::Pass), n(Status::HypothesisNotSatisfied), n(Status::Fail))
    }

    pub fn emit(&self, format: Format) -> String {
        match format {
            Format::Text => self.to_text(),
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.to_json()).expect("json values serialize");
                s.push('\n');
                s
            }
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "command: {}", self.command);
        let _ = writeln!(out, "engine: paracontact {}", self.engine_version);
        for t in &self.tables {
            let _ = writeln!(out, "\n== {} ==", t.name);
            if t.entries.is_empty() {
                let _ = writeln!(out, "  (all zero)");
            }
            for (k, v) in &t.entries {
                let _ = writeln!(out, "  {k} = {v}");
            }
        }
        if !self.derived.is_empty() {
            let _ = writeln!(out, "\n== derived ==");
            for (k, v) in &self.derived {
                let _ = writeln!(out, "  {k} = {v}");
            }
        }
        if !self.checks.is_empty() {
            let _ = writeln!(out, "\n== checks ==");
        }
        for c in &self.checks {
            let _ = writeln!(out, "[{}] {}", c.status, c.id);
            for res in &c.residuals {
                if res.components.is_empty() {
                    let _ = writeln!(out, "    {} = 0", res.label);
                    continue;
                }
                let _ = writeln!(out, "    {}:", res.label);
                for (at, v) in &res.components {
                    if at.is_empty() {
                        let _ = writeln!(out, "      {v}");
                    } else {
                        let _ = writeln!(out, "      {at} {v}");
                    }
                }
            }
            for (k, v) in &c.derived {
                let _ = writeln!(out, "    {k} = {v}");
            }
            for n in &c.notes {
                let _ = writeln!(out, "    note: {n}");
            }
        }
        if !self.warnings.is_empty() {
            let _ = writeln!(out, "\n== warnings ==");
            for w in &self.warnings {
                let _ = writeln!(out, "warning: {w}");
            }
        }
        let (pass, vacuous, fail) = self.counts();
        let _ = writeln!(
            out,
            "\nstatus: {} ({pass} passed, {vacuous} vacuous, {fail} failed)",
            if self.passed() { "pass" } else { "fail" }
        );
        out
    }

    pub fn to_json(&self) -> Value {
        let pairs = |v: &[(String, String)]| -> Value {
            Value::Array(v.iter().map(|(n, e)| json!({ "name": n, "value": e })).collect())
        };
        let (pass, vacuous, fail) = self.counts();
        json!({
            "schema": 1,
            "command": self.command,
            "engine_version": self.engine_version,
            "tables": self.tables.iter().map(|t| json!({
                "name": t.name,
                "entries": t.entries.iter().map(|(k, v)| json!({ "key": k, "value": v })).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
            "derived": pairs(&self.derived),
            "checks": self.checks.iter().map(|c| json!({
                "id": c.id,
                "status": c.status.as_str(),
                "residuals": c.residuals.iter().map(|r| json!({
                    "label": r.label,
                    "zero": r.components.is_empty(),
                    "nonzero": r.components.iter().map(|(at, v)| json!({ "index": at, "value": v })).collect::<Vec<_>>(),
                })).collect::<Vec<_>>(),
                "derived": pairs(&c.derived),
                "notes": c.notes,
            })).collect::<Vec<_>>(),
            "warnings": self.warnings,
            "summary": {
                "status": if self.passed() { "pass" } else { "fail" },
                "passed": pass,
                "vacuous": vacuous,
                "failed": fail,
            },
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use paracontact::report::Residual;

    #[test]
    fn vacuous_checks_warn_and_pass() {
        let mut doc = ReportDocument::new("test");
        doc.check(&CheckReport::vacuous("T6", "not K-paracontact"), &[]);
        assert!(doc.passed());
        assert_eq!(doc.warnings.len(), 1);
        doc.check(
            &CheckReport::from_residuals("x", vec![Residual::scalar("a", Expr::one())]),
            &[],
        );
        assert_eq!(doc.exit_code(), 1);
        assert!(doc.to_text().contains("[fail] x\n    a:\n      1\n"));
        let v = doc.to_json();
        assert_eq!(v["summary"]["failed"], 1);
        assert_eq!(v["checks"][1]["residuals"][0]["nonzero"][0]["value"], "1");
    }
}
