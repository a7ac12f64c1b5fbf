//! Machine-readable output envelope shared by the CLI commands.

use serde::Serialize;

/// Output rendering selected on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Table,
    Csv,
    Json,
}

/// Envelope for the JSON output: the command that ran, an echo of the input
/// (dataset reference, content digest, effective parameters) and the results
/// payload. Keys serialize in alphabetical order, so the bytes are stable for
/// identical invocations.
#[derive(Debug, Serialize)]
pub struct Envelope {
    pub command: String,
    pub input: serde_json::Value,
    pub results: serde_json::Value,
}

impl Envelope {
    pub fn new(command: &str, input: serde_json::Value, results: serde_json::Value) -> Self {
        Self {
            command: command.to_string(),
            input,
            results,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("envelope serializes")
    }
}

/// FNV-1a 64-bit content digest, rendered as 16 hex digits. Identifies the
/// exact input bytes in output echoes without pulling in a hash dependency.
pub fn content_digest(bytes: &[u8]) -> String {
    const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
    const PRIME: u64 = 0x0000_0100_0000_01b3;
    let mut hash = OFFSET;
    for b in bytes {
        hash ^= *b as u64;
        hash = hash.wrapping_mul(PRIME);
    }
    format!("{hash:016x}")
}
