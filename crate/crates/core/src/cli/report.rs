//! Report records, canonical serialization and the config hash.

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Record {
    pub name: String,
    /// Residuals and classification facts, keys sorted.
    pub values: Value,
    pub threshold: Option<f64>,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl Record {
    pub fn new(name: impl Into<String>, values: Value, threshold: Option<f64>, pass: bool) -> Record {
        Record {
            name: name.into(),
            values,
            threshold,
            pass,
            error: None,
        }
    }

    pub fn failed(name: impl Into<String>, error: impl ToString) -> Record {
        Record {
            name: name.into(),
            values: Value::Object(Default::default()),
            threshold: None,
            pass: false,
            error: Some(error.to_string()),
        }
    }

    /// One summary line: status, name, then the headline value if any.
    pub fn summary(&self) -> String {
        let status = if self.pass { "PASS" } else { "FAIL" };
        let mut line = format!("{status} {}", self.name);
        if let Some(label) = self.values.get("label").and_then(Value::as_str) {
            line.push_str(&format!(": {label}"));
        }
        if let Some(t) = self.threshold {
            line.push_str(&format!(" (threshold {t:e})"));
        }
        if let Some(e) = &self.error {
            line.push_str(&format!(" error: {e}"));
        }
        line
    }
}

/// Field order here is the serialized order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub command: String,
    pub config_hash: String,
    pub records: Vec<Record>,
    pub overall_pass: bool,
    pub wall_clock_seconds: f64,
}

impl Report {
    pub fn new(command: &str, config_hash: String, records: Vec<Record>, wall_clock_seconds: f64) -> Report {
        let overall_pass = records.iter().all(|r| r.pass);
        Report {
            command: command.to_string(),
            config_hash,
            records,
            overall_pass,
            wall_clock_seconds,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

/// SHA-256 of the config re-serialized with sorted keys and no whitespace.
pub fn config_hash(source: &str) -> Result<String, serde_json::Error> {
    let value: Value = serde_json::from_str(source)?;
    let canonical = serde_json::to_string(&value)?;
    Ok(hex::encode(Sha256::digest(canonical.as_bytes())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn hash_ignores_layout_and_key_order() {
        let a = config_hash(r#"{"b": 1, "a": [1, 2]}"#).unwrap();
        let b = config_hash("{\"a\":[1,2],\n  \"b\":1}").unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 64);
        assert_ne!(a, config_hash(r#"{"a": [2, 1], "b": 1}"#).unwrap());
    }

    #[test]
    fn overall_pass_is_the_conjunction() {
        let ok = Record::new("x", json!({}), None, true);
        let bad = Record::failed("y", "boom");
        assert!(Report::new("torus", String::new(), vec![ok.clone()], 0.0).overall_pass);
        assert!(!Report::new("torus", String::new(), vec![ok, bad], 0.0).overall_pass);
        assert!(Report::new("torus", String::new(), vec![], 0.0).overall_pass);
    }

    #[test]
    fn key_order_is_stable() {
        let r = Report::new(
            "torus",
            "h".into(),
            vec![Record::new("m", json!({"z": 1, "a": 2}), Some(1e-9), true)],
            0.5,
        );
        let s = r.to_json();
        let order = [
            "\"command\"",
            "\"config_hash\"",
            "\"records\"",
            "\"overall_pass\"",
            "\"wall_clock_seconds\"",
        ];
        let pos: Vec<usize> = order.iter().map(|k| s.find(k).unwrap()).collect();
        assert!(pos.windows(2).all(|w| w[0] < w[1]));
        assert!(s.find("\"a\"").unwrap() < s.find("\"z\"").unwrap());
        assert!(!s.contains("error"));
    }

    #[test]
    fn summary_line() {
        let r = Record::new("moduli", json!({"label": "equivalent"}), None, true);
        assert_eq!(r.summary(), "PASS moduli: equivalent");
    }
}
