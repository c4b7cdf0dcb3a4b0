//! Run reports: named verdicts with a digest of the inputs, serialized with
//! sorted keys so identical runs give identical bytes.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::star::NuSeries;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub ok: bool,
    pub residual_summary: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    /// sha256 of the canonical input description
    pub inputs: String,
    pub checks: Vec<Check>,
    pub ok: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<u64>,
}

/// Lowercase hex sha256.
pub fn digest(parts: &[&[u8]]) -> String {
    let mut h = Sha256::new();
    for p in parts {
        h.update((p.len() as u64).to_le_bytes());
        h.update(p);
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

/// Summary of a residual series: `0` or its leading order and support size.
pub fn summarize(s: &NuSeries) -> String {
    match s.leading_order() {
        None => "0".into(),
        Some(o) => {
            let terms: usize = s.coeffs().iter().map(|c| c.terms().len()).sum();
            format!("nonzero from nu^{o} ({terms} terms)")
        }
    }
}

impl RunReport {
    pub fn new(command: &str, inputs: String) -> Self {
        RunReport {
            command: command.into(),
            inputs,
            checks: Vec::new(),
            ok: true,
            timing_ms: None,
        }
    }

    pub fn check(
        &mut self,
        name: impl Into<String>,
        ok: bool,
        residual_summary: impl Into<String>,
    ) {
        self.ok &= ok;
        self.checks.push(Check {
            name: name.into(),
            ok,
            residual_summary: residual_summary.into(),
        });
    }

    /// Pretty JSON with sorted keys and a trailing newline.
    pub fn to_json_string(&self) -> String {
        to_sorted_json(self)
    }
}

/// Any serializable value as pretty JSON with sorted object keys.
pub fn to_sorted_json<T: Serialize>(v: &T) -> String {
    let value = serde_json::to_value(v).expect("serializable");
    let mut s = serde_json::to_string_pretty(&value).expect("serializable");
    s.push('\n');
    s
}
