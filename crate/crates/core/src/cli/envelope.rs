//! Versioned JSON output for `--json`.

use std::collections::BTreeMap;
use std::io;

use serde::Serialize;
use serde_json::ser::Formatter;
use serde_json::Value;

pub const SCHEMA_VERSION: &str = "1.0";

#[derive(Debug, Clone, Serialize)]
pub struct ResultEnvelope {
    pub schema_version: &'static str,
    pub command: &'static str,
    pub input_fingerprint: String,
    /// Index base of every index in the payload. Always 0.
    pub index_base: u8,
    pub payload: Value,
    /// Milliseconds per phase.
    pub timings: BTreeMap<&'static str, f64>,
}

impl ResultEnvelope {
    pub fn new(command: &'static str, input_fingerprint: String, payload: Value) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            command,
            input_fingerprint,
            index_base: 0,
            payload,
            timings: BTreeMap::new(),
        }
    }

    pub fn to_json(&self) -> String {
        to_json_17(self)
    }
}

/// Compact JSON with every float written with 17 significant digits.
struct SeventeenDigits;

impl Formatter for SeventeenDigits {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }
}

pub fn to_json_17<T: Serialize + ?Sized>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, SeventeenDigits);
    value
        .serialize(&mut ser)
        .expect("serializing to memory does not fail");
    String::from_utf8(out).expect("serde_json emits UTF-8")
}
