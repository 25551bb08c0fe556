//! Rendering of command results as aligned text or versioned JSON.

use betadiv::{ProofState, Verdict};
use serde::Serialize;
use serde_json::{Map, Value};

pub const SCHEMA: &str = "betadiv-cli/1";

/// Exit codes besides the verdict codes 0, 1 and 2.
pub const EXIT_ERROR: i32 = 3;
pub const EXIT_USAGE: i32 = 64;

pub struct Report {
    command: &'static str,
    fields: Map<String, Value>,
    json_only: Map<String, Value>,
    text: Vec<String>,
    pub exit: i32,
}

impl Report {
    pub fn new(command: &'static str) -> Self {
        Report {
            command,
            fields: Map::new(),
            json_only: Map::new(),
            text: Vec::new(),
            exit: 0,
        }
    }

    pub fn field(mut self, key: &str, value: impl Serialize) -> Self {
        let value = serde_json::to_value(value).expect("report fields serialize");
        self.fields.insert(key.to_owned(), value);
        self
    }

    /// A field left out of text mode.
    pub fn json_field(mut self, key: &str, value: impl Serialize) -> Self {
        let value = serde_json::to_value(value).expect("report fields serialize");
        self.json_only.insert(key.to_owned(), value);
        self
    }

    pub fn verdict(self, v: &Verdict) -> Self {
        let exit = v.state.exit_code();
        let mut r = self
            .field("verdict", v.state)
            .field("budget", v.budget)
            .field("certificate", &v.certificate);
        r.exit = exit;
        r
    }

    pub fn exit(mut self, code: i32) -> Self {
        self.exit = code;
        self
    }

    pub fn state(self, state: ProofState) -> Self {
        let code = state.exit_code();
        self.field("verdict", state).exit(code)
    }

    /// Extra lines shown after the fields in text mode only.
    pub fn text_line(mut self, line: impl Into<String>) -> Self {
        self.text.push(line.into());
        self
    }

    pub fn render(&self, json: bool) -> String {
        if json {
            let mut out = Map::new();
            out.insert("schema".into(), SCHEMA.into());
            out.insert("command".into(), self.command.into());
            out.extend(self.fields.clone());
            out.extend(self.json_only.clone());
            out.insert("exit_code".into(), self.exit.into());
            return serde_json::to_string_pretty(&Value::Object(out)).expect("json renders");
        }
        let width = self.fields.keys().map(String::len).max().unwrap_or(0);
        let mut lines: Vec<String> = self
            .fields
            .iter()
            .map(|(k, v)| format!("{k:<width$}  {}", plain(v)))
            .collect();
        lines.extend(self.text.iter().cloned());
        lines.join("\n")
    }
}

pub fn plain(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "-".into(),
        other => other.to_string(),
    }
}

/// Quotes arguments that the shell would otherwise split or expand.
pub fn shell_line(args: &[String]) -> String {
    args.iter()
        .map(|a| {
            if a.chars()
                .all(|c| c.is_ascii_alphanumeric() || "-_.:/=,".contains(c))
            {
                a.clone()
            } else {
                format!("'{a}'")
            }
        })
        .collect::<Vec<_>>()
        .join(" ")
}
