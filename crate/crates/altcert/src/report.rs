//! Machine-readable run reports: stable key order, input digest, per-check
//! records with witnesses. Identical inputs produce byte-identical reports
//! when timing is suppressed.

use serde::Serialize;

use crate::augment::{CheckItem, HyperbolicityCertificate};

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub command: String,
    pub input: String,
    pub input_digest: String,
    pub checks: Vec<CheckItem>,
    pub overall: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bounds: Option<crate::cage::VolumeBounds>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub notes: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<u128>,
}

impl RunReport {
    pub fn new(command: &str, input: &str, input_bytes: &[u8]) -> Self {
        RunReport {
            command: command.to_string(),
            input: input.to_string(),
            input_digest: fnv1a_hex(input_bytes),
            checks: Vec::new(),
            overall: None,
            bounds: None,
            notes: None,
            timing_ms: None,
        }
    }

    pub fn with_certificate(mut self, cert: &HyperbolicityCertificate) -> Self {
        self.checks.extend(cert.checks.iter().cloned());
        self.overall = Some(cert.overall);
        self
    }

    pub fn note(&mut self, s: String) {
        self.notes.get_or_insert_with(Vec::new).push(s);
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    /// One human line per check, for standard error.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            out.push_str(&format!("{:<40} {:?}\n", c.name, c.verdict));
        }
        if let Some(overall) = self.overall {
            out.push_str(&format!("overall: {}\n", if overall { "PASS" } else { "FAIL" }));
        }
        out
    }
}

/// 64-bit FNV-1a, hex encoded; enough to fingerprint inputs in reports.
pub fn fnv1a_hex(bytes: &[u8]) -> String {
    let mut h: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    format!("{h:016x}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_is_stable() {
        assert_eq!(fnv1a_hex(b""), "cbf29ce484222325");
        assert_eq!(fnv1a_hex(b"altcert"), fnv1a_hex(b"altcert"));
        assert_ne!(fnv1a_hex(b"a"), fnv1a_hex(b"b"));
    }

    #[test]
    fn report_round_trips_as_json() {
        let mut r = RunReport::new("check", "x.json", b"{}");
        r.checks.push(CheckItem::pass("connected"));
        r.overall = Some(true);
        let text = r.to_json();
        assert!(text.contains("\"input_digest\""));
        assert!(!text.contains("timing_ms"));
    }
}
