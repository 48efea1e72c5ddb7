//! Report documents. The text and JSON renderings come from the same
//! [`Report`] value.

use std::fmt::Write as _;

use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    PreconditionFailed,
    BudgetExceeded,
    Fail,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::PreconditionFailed => "precondition-failed",
            Verdict::BudgetExceeded => "budget-exceeded",
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Pass => 0,
            Verdict::Fail => 1,
            Verdict::PreconditionFailed | Verdict::BudgetExceeded => 2,
        }
    }

    /// Verdict of a collection: any failure wins, then any unchecked part.
    pub fn combine(parts: impl IntoIterator<Item = Verdict>) -> Verdict {
        parts.into_iter().max().unwrap_or(Verdict::Pass)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Bounds {
    #[serde(rename = "H", skip_serializing_if = "Option::is_none")]
    pub h: Option<usize>,
    #[serde(rename = "D", skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    #[serde(rename = "H_E", skip_serializing_if = "Option::is_none")]
    pub h_e: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub effort: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub formulas: Option<String>,
}

impl Bounds {
    fn render(&self) -> String {
        let mut parts = Vec::new();
        if let Some(e) = self.effort {
            parts.push(format!("effort={e}"));
        }
        if let Some(h) = self.h_e {
            parts.push(format!("H_E={h}"));
        }
        if let Some(h) = self.h {
            parts.push(format!("H={h}"));
        }
        if let Some(d) = self.d {
            parts.push(format!("D={d}"));
        }
        parts.join(" ")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Fact {
    pub key: String,
    pub value: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Table {
    pub title: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(title: impl Into<String>, columns: &[&str]) -> Table {
        Table {
            title: title.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn row(&mut self, cells: Vec<String>) {
        debug_assert_eq!(cells.len(), self.columns.len());
        self.rows.push(cells);
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Report {
    pub command: String,
    pub instance: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub module: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub claim: Option<String>,
    pub verdict: Verdict,
    pub field: String,
    pub bounds: Bounds,
    pub facts: Vec<Fact>,
    pub witnesses: Vec<String>,
    pub tables: Vec<Table>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub parts: Vec<Report>,
}

impl Report {
    pub fn new(command: &str, instance: &str, field: String) -> Report {
        Report {
            command: command.into(),
            instance: instance.into(),
            module: None,
            claim: None,
            verdict: Verdict::Pass,
            field,
            bounds: Bounds::default(),
            facts: Vec::new(),
            witnesses: Vec::new(),
            tables: Vec::new(),
            parts: Vec::new(),
        }
    }

    pub fn fact(&mut self, key: impl Into<String>, value: impl ToString) {
        self.facts.push(Fact {
            key: key.into(),
            value: value.to_string(),
        });
    }

    pub fn exit_code(&self) -> i32 {
        self.verdict.exit_code()
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        self.write_text(&mut out, 0);
        out
    }

    fn write_text(&self, out: &mut String, depth: usize) {
        let pad = "  ".repeat(depth);
        let kv = |out: &mut String, k: &str, v: &str| {
            writeln!(out, "{pad}{k}: {v}").unwrap();
        };
        kv(out, "command", &self.command);
        kv(out, "instance", &self.instance);
        if let Some(m) = &self.module {
            kv(out, "module", m);
        }
        if let Some(c) = &self.claim {
            kv(out, "claim", c);
        }
        kv(out, "verdict", self.verdict.as_str());
        kv(out, "field", &self.field);
        let b = self.bounds.render();
        if !b.is_empty() {
            kv(out, "bounds", &b);
        }
        if let Some(f) = &self.bounds.formulas {
            kv(out, "budget formulas", f);
        }
        for f in &self.facts {
            kv(out, &f.key, &f.value);
        }
        for w in &self.witnesses {
            kv(out, "witness", w);
        }
        for t in &self.tables {
            out.push('\n');
            writeln!(out, "{pad}[{}]", t.title).unwrap();
            let mut widths: Vec<usize> = t.columns.iter().map(|c| c.chars().count()).collect();
            for r in &t.rows {
                for (w, cell) in widths.iter_mut().zip(r) {
                    *w = (*w).max(cell.chars().count());
                }
            }
            let line = |out: &mut String, cells: &[String]| {
                let mut s = pad.clone();
                for (k, (cell, w)) in cells.iter().zip(&widths).enumerate() {
                    if k + 1 == cells.len() {
                        s.push_str(cell);
                    } else {
                        s.push_str(cell);
                        s.push_str(&" ".repeat(w - cell.chars().count() + 2));
                    }
                }
                writeln!(out, "{}", s.trim_end()).unwrap();
            };
            line(out, &t.columns);
            for r in &t.rows {
                line(out, r);
            }
        }
        for p in &self.parts {
            out.push('\n');
            writeln!(out, "{pad}---").unwrap();
            p.write_text(out, depth + 1);
        }
    }
}
