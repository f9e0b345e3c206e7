use std::time::Instant;

use serde_json::{json, Map, Value};

/// Exit status: membership or truth.
pub const EXIT_YES: i32 = 0;
/// Exit status: non-membership, falsity or a cross-check mismatch.
pub const EXIT_NO: i32 = 1;
/// Exit status: parse errors, caps and other operational failures.
pub const EXIT_ERROR: i32 = 2;

/// One command's outcome, printed as `key=value` lines or a JSON object.
pub struct Report {
    command: &'static str,
    verdict: String,
    detail: Map<String, Value>,
    timings: Vec<(String, f64)>,
    started: Instant,
    pub exit: i32,
}

impl Report {
    pub fn new(command: &'static str) -> Self {
        Report {
            command,
            verdict: String::new(),
            detail: Map::new(),
            timings: Vec::new(),
            started: Instant::now(),
            exit: EXIT_YES,
        }
    }

    pub fn verdict(&mut self, verdict: impl ToString, exit: i32) {
        self.verdict = verdict.to_string();
        self.exit = exit;
    }

    pub fn detail(&mut self, key: &str, value: impl Into<Value>) {
        self.detail.insert(key.to_string(), value.into());
    }

    /// Records the time since the previous mark (or the start) under `name`.
    pub fn time(&mut self, name: &str, since: Instant) {
        self.timings.push((name.to_string(), since.elapsed().as_secs_f64() * 1000.0));
    }

    pub fn render(&self, as_json: bool) -> String {
        let total = self.started.elapsed().as_secs_f64() * 1000.0;
        if as_json {
            let mut timings = Map::new();
            for (k, ms) in &self.timings {
                timings.insert(format!("{k}_ms"), json!(ms));
            }
            timings.insert("total_ms".into(), json!(total));
            let v = json!({
                "command": self.command,
                "verdict": self.verdict,
                "detail": Value::Object(self.detail.clone()),
                "timings": Value::Object(timings),
            });
            return format!("{v}\n");
        }
        let mut out = format!("command={}\nverdict={}\n", self.command, self.verdict);
        for (k, v) in &self.detail {
            let text = match v {
                Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            out.push_str(&format!("{k}={text}\n"));
        }
        for (k, ms) in &self.timings {
            out.push_str(&format!("time_{k}_ms={ms:.3}\n"));
        }
        out.push_str(&format!("time_total_ms={total:.3}\n"));
        out
    }
}

pub fn error_report(command: &'static str, message: &str, as_json: bool) -> String {
    if as_json {
        let v = json!({
            "command": command,
            "verdict": "error",
            "detail": { "message": message },
            "timings": {},
        });
        format!("{v}\n")
    } else {
        format!("command={command}\nverdict=error\nmessage={message}\n")
    }
}
