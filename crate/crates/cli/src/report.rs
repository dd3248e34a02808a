//! Report assembly. The body is deterministic for fixed inputs and seed;
//! wall time sits beside it.

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub value: f64,
    pub tolerance: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ReportBody {
    pub command: String,
    pub inputs_digest: String,
    pub results: Value,
    pub checks: Vec<Check>,
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub body: ReportBody,
    pub wall_time_seconds: f64,
}

/// Accumulates everything that identifies a run.
#[derive(Default)]
pub struct InputDigest {
    hasher: Sha256,
}

impl InputDigest {
    pub fn add(&mut self, label: &str, bytes: &[u8]) {
        self.hasher.update((label.len() as u64).to_le_bytes());
        self.hasher.update(label.as_bytes());
        self.hasher.update((bytes.len() as u64).to_le_bytes());
        self.hasher.update(bytes);
    }

    pub fn finish(self) -> String {
        hex::encode(self.hasher.finalize())
    }
}

impl Report {
    pub fn all_pass(&self) -> bool {
        self.body.checks.iter().all(|c| c.pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let b = &self.body;
        let mut out = format!("command: {}\ninputs: {}\n", b.command, b.inputs_digest);
        if let Some(seed) = b.seed {
            out.push_str(&format!("seed: {seed}\n"));
        }
        out.push_str(&format!("results: {}\n", serde_json::to_string(&b.results).expect("json")));
        for c in &b.checks {
            out.push_str(&format!(
                "[{}] {}: {:e} (tolerance {:e})\n",
                if c.pass { "PASS" } else { "FAIL" },
                c.name,
                c.value,
                c.tolerance
            ));
        }
        out.push_str(&format!("wall time: {:.3}s\n", self.wall_time_seconds));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_separates_fields() {
        let mut a = InputDigest::default();
        a.add("x", b"12");
        let mut b = InputDigest::default();
        b.add("x1", b"2");
        assert_ne!(a.finish(), b.finish());
    }
}
