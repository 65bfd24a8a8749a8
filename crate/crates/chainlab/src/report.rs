//! Verification reports.
//!
//! Every verification surface in the crate returns a [`VerificationReport`]:
//! a list of named check entries, each carrying an exact residual string (for
//! symbolic checks) or a floating deviation (for numeric ones), plus a
//! non-empty `anchor` identifying the claim being checked against the crate's
//! own transcription tables. Reports render as plain text, LaTeX, or JSON
//! (schema `chainlab/1`); entry order is deterministic.

use std::fmt;

use serde_json::{json, Value};

use crate::chains::ChainFamily;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckStatus {
    Pass,
    Fail,
    /// The check could not be decided (e.g. an expression fell outside the
    /// kernel's decidable class). Not a failure, but surfaced loudly.
    Inconclusive,
}

impl CheckStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            CheckStatus::Pass => "pass",
            CheckStatus::Fail => "fail",
            CheckStatus::Inconclusive => "inconclusive",
        }
    }
}

impl fmt::Display for CheckStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One verified claim.
#[derive(Clone, Debug)]
pub struct CheckEntry {
    pub name: String,
    pub family: Option<ChainFamily>,
    pub order: Option<u32>,
    pub status: CheckStatus,
    /// Exact residual or detail for symbolic checks; never a float.
    pub residual: Option<String>,
    /// Measured deviation for numeric checks.
    pub deviation: Option<f64>,
    /// Stable identifier of the claim, e.g. `catalog:abel[4]`.
    pub anchor: String,
}

impl CheckEntry {
    pub fn symbolic(
        name: impl Into<String>,
        family: Option<ChainFamily>,
        order: Option<u32>,
        status: CheckStatus,
        residual: String,
        anchor: impl Into<String>,
    ) -> Self {
        let anchor = anchor.into();
        debug_assert!(!anchor.is_empty(), "every entry carries an anchor");
        CheckEntry {
            name: name.into(),
            family,
            order,
            status,
            residual: Some(residual),
            deviation: None,
            anchor,
        }
    }

    pub fn numeric(
        name: impl Into<String>,
        family: Option<ChainFamily>,
        order: Option<u32>,
        status: CheckStatus,
        deviation: f64,
        anchor: impl Into<String>,
    ) -> Self {
        let anchor = anchor.into();
        debug_assert!(!anchor.is_empty(), "every entry carries an anchor");
        CheckEntry {
            name: name.into(),
            family,
            order,
            status,
            residual: None,
            deviation: Some(deviation),
            anchor,
        }
    }
}

/// A deterministic collection of check entries plus errata notes.
#[derive(Clone, Debug, Default)]
pub struct VerificationReport {
    subject: String,
    entries: Vec<CheckEntry>,
    errata: Vec<String>,
}

impl VerificationReport {
    pub fn new(subject: impl Into<String>) -> Self {
        VerificationReport {
            subject: subject.into(),
            entries: Vec::new(),
            errata: Vec::new(),
        }
    }

    pub fn subject(&self) -> &str {
        &self.subject
    }

    pub fn push(&mut self, entry: CheckEntry) {
        self.entries.push(entry);
    }

    pub fn note_erratum(&mut self, note: String) {
        if !self.errata.contains(&note) {
            self.errata.push(note);
        }
    }

    /// Appends another report's entries and errata.
    pub fn absorb(&mut self, other: VerificationReport) {
        self.entries.extend(other.entries);
        for note in other.errata {
            self.note_erratum(note);
        }
    }

    pub fn entries(&self) -> &[CheckEntry] {
        &self.entries
    }

    pub fn errata(&self) -> &[String] {
        &self.errata
    }

    /// Pass iff every entry passes; a single inconclusive entry (and no
    /// failure) makes the whole report inconclusive.
    pub fn status(&self) -> CheckStatus {
        let mut status = CheckStatus::Pass;
        for e in &self.entries {
            match e.status {
                CheckStatus::Fail => return CheckStatus::Fail,
                CheckStatus::Inconclusive => status = CheckStatus::Inconclusive,
                CheckStatus::Pass => {}
            }
        }
        status
    }

    /// Sorts entries by (family, order, name) so report assembly does not
    /// depend on evaluation order. Families order by their rendered name,
    /// matching how consumers of the JSON form see them.
    pub fn sort_entries(&mut self) {
        self.entries.sort_by(|a, b| {
            (a.family.map(ChainFamily::name), a.order, &a.name)
                .cmp(&(b.family.map(ChainFamily::name), b.order, &b.name))
        });
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("subject: {}\n", self.subject));
        for e in &self.entries {
            out.push_str(&format!("[{}] {}", e.status, e.name));
            if let Some(r) = &e.residual {
                out.push_str(&format!("  (residual: {r})"));
            }
            if let Some(d) = e.deviation {
                out.push_str(&format!("  (deviation: {d:.3e})"));
            }
            out.push_str(&format!("  [{}]\n", e.anchor));
        }
        for note in &self.errata {
            out.push_str(&format!("erratum: {note}\n"));
        }
        out.push_str(&format!("status: {}\n", self.status()));
        out
    }

    pub fn render_latex(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "\\section*{{{}}}\n\\begin{{itemize}}\n",
            self.subject
        ));
        for e in &self.entries {
            let detail = match (&e.residual, e.deviation) {
                (Some(r), _) => format!("residual ${r}$"),
                (None, Some(d)) => format!("deviation ${d:.3e}$"),
                _ => String::new(),
            };
            out.push_str(&format!(
                "  \\item[{}] {} --- {} \\texttt{{{}}}\n",
                e.status, e.name, detail, e.anchor
            ));
        }
        out.push_str("\\end{itemize}\n");
        for note in &self.errata {
            out.push_str(&format!("\\paragraph{{Erratum.}} {note}\n"));
        }
        out.push_str(&format!("\\paragraph{{Status.}} {}\n", self.status()));
        out
    }

    /// JSON document under schema `chainlab/1`.
    pub fn render_json(&self, command: &str) -> Value {
        let entries: Vec<Value> = self
            .entries
            .iter()
            .map(|e| {
                let mut obj = serde_json::Map::new();
                obj.insert("name".into(), json!(e.name));
                if let Some(f) = e.family {
                    obj.insert("family".into(), json!(f.name()));
                }
                if let Some(n) = e.order {
                    obj.insert("order".into(), json!(n));
                }
                obj.insert("status".into(), json!(e.status.as_str()));
                if let Some(r) = &e.residual {
                    obj.insert("residual".into(), json!(r));
                }
                if let Some(d) = e.deviation {
                    obj.insert("deviation".into(), json!(d));
                }
                obj.insert("anchor".into(), json!(e.anchor));
                Value::Object(obj)
            })
            .collect();
        json!({
            "schema": "chainlab/1",
            "command": command,
            "subject": self.subject,
            "entries": entries,
            "errata": self.errata,
            "status": self.status().as_str(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn entry(name: &str, status: CheckStatus) -> CheckEntry {
        CheckEntry::symbolic(name, None, None, status, "0".into(), "test:anchor")
    }

    #[test]
    fn overall_status_aggregates() {
        let mut r = VerificationReport::new("t");
        r.push(entry("a", CheckStatus::Pass));
        assert_eq!(r.status(), CheckStatus::Pass);
        r.push(entry("b", CheckStatus::Inconclusive));
        assert_eq!(r.status(), CheckStatus::Inconclusive);
        r.push(entry("c", CheckStatus::Fail));
        assert_eq!(r.status(), CheckStatus::Fail);
    }

    #[test]
    fn empty_report_passes() {
        let r = VerificationReport::new("t");
        assert_eq!(r.status(), CheckStatus::Pass);
    }

    #[test]
    fn json_shape() {
        let mut r = VerificationReport::new("subject line");
        r.push(entry("a", CheckStatus::Pass));
        r.note_erratum("note".into());
        let v = r.render_json("verify --suite test");
        assert_eq!(v["schema"], "chainlab/1");
        assert_eq!(v["command"], "verify --suite test");
        assert_eq!(v["subject"], "subject line");
        assert_eq!(v["status"], "pass");
        assert_eq!(v["entries"][0]["name"], "a");
        assert_eq!(v["entries"][0]["residual"], "0");
        assert_eq!(v["entries"][0]["anchor"], "test:anchor");
        assert_eq!(v["errata"][0], "note");
    }

    #[test]
    fn sorting_is_deterministic() {
        let mut r = VerificationReport::new("t");
        r.push(CheckEntry::symbolic(
            "z",
            Some(ChainFamily::Abel),
            Some(3),
            CheckStatus::Pass,
            "0".into(),
            "x",
        ));
        r.push(CheckEntry::symbolic(
            "a",
            Some(ChainFamily::Riccati),
            Some(2),
            CheckStatus::Pass,
            "0".into(),
            "x",
        ));
        r.sort_entries();
        // "abel" precedes "riccati" in the rendered ordering
        assert_eq!(r.entries()[0].name, "z");
    }
}
