//! Job reports: ordered key/value entries rendered as text or JSON.

use serde_json::{json, Map, Value};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum JobStatus {
    Ok,
    /// The job could not run (bad options, invalid input).
    Error(String),
    /// An implication between the local-global properties failed.
    EquivalenceFailed,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub index: usize,
    pub job: String,
    pub entries: Vec<(String, Value)>,
    pub status: JobStatus,
    pub elapsed_ms: Option<u128>,
}

impl Report {
    pub fn new(index: usize, job: impl Into<String>) -> Self {
        Report { index, job: job.into(), entries: Vec::new(), status: JobStatus::Ok, elapsed_ms: None }
    }

    pub fn put(&mut self, key: &str, value: impl Into<Value>) {
        self.entries.push((key.to_string(), value.into()));
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("== job {}: {}\n", self.index, self.job);
        for (k, v) in &self.entries {
            out.push_str(&format!("{k} = {}\n", render(v)));
        }
        match &self.status {
            JobStatus::Ok => out.push_str("status = ok\n"),
            JobStatus::Error(msg) => out.push_str(&format!("status = error: {msg}\n")),
            JobStatus::EquivalenceFailed => out.push_str("status = equivalence-failed\n"),
        }
        if let Some(ms) = self.elapsed_ms {
            out.push_str(&format!("elapsed_ms = {ms}\n"));
        }
        out
    }

    pub fn to_json(&self) -> Value {
        let entries: Map<String, Value> = self.entries.iter().cloned().collect();
        let status = match &self.status {
            JobStatus::Ok => json!("ok"),
            JobStatus::Error(msg) => json!({ "error": msg }),
            JobStatus::EquivalenceFailed => json!("equivalence-failed"),
        };
        let mut obj = Map::new();
        obj.insert("index".into(), json!(self.index));
        obj.insert("job".into(), json!(self.job));
        obj.insert("entries".into(), Value::Object(entries));
        obj.insert("status".into(), status);
        if let Some(ms) = self.elapsed_ms {
            obj.insert("elapsed_ms".into(), json!(ms));
        }
        Value::Object(obj)
    }
}

/// Compact one-line rendering for text reports.
pub fn render(v: &Value) -> String {
    match v {
        Value::Null => "none".into(),
        Value::Bool(b) => b.to_string(),
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.clone(),
        Value::Array(xs) => format!("[{}]", xs.iter().map(render).collect::<Vec<_>>().join(", ")),
        Value::Object(m) => {
            let parts: Vec<String> = m.iter().map(|(k, v)| format!("{k}: {}", render(v))).collect();
            format!("{{{}}}", parts.join(", "))
        }
    }
}

pub fn render_all(reports: &[Report], structured: bool) -> String {
    if structured {
        let docs: Vec<Value> = reports.iter().map(Report::to_json).collect();
        let mut s = serde_json::to_string_pretty(&Value::Array(docs)).expect("reports serialize");
        s.push('\n');
        s
    } else {
        reports.iter().map(Report::to_text).collect::<Vec<_>>().join("\n")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_and_json() {
        let mut r = Report::new(1, "jordan S3 sub=[1]");
        r.put("covers", false);
        r.put("union", 4);
        r.put("map", json!([0, 1]));
        assert_eq!(r.to_text(), "== job 1: jordan S3 sub=[1]\ncovers = false\nunion = 4\nmap = [0, 1]\nstatus = ok\n");
        let j = r.to_json();
        assert_eq!(j["entries"]["union"], json!(4));
        // key order is preserved
        let keys: Vec<&String> = j["entries"].as_object().unwrap().keys().collect();
        assert_eq!(keys, ["covers", "union", "map"]);
    }
}
