//! The JSON object every command prints.

use serde::Serialize;
use serde_json::{Map, Number, Value};
use tropstat::fmt::round_sig12;

use crate::error::CliError;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Serialize)]
pub struct Envelope {
    pub command: String,
    pub status: &'static str,
    pub result: Value,
    pub diagnostics: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub version: &'static str,
}

impl Envelope {
    pub fn ok(command: &str, result: Value, diagnostics: Value, seed: Option<u64>) -> Self {
        Envelope {
            command: command.to_string(),
            status: "ok",
            result,
            diagnostics,
            seed,
            version: VERSION,
        }
    }

    pub fn error(command: &str, err: &CliError) -> Self {
        let mut d = Map::new();
        d.insert("error".into(), Value::String(err.message.clone()));
        d.insert("kind".into(), Value::String(err.kind().into()));
        d.insert("exit_code".into(), Value::from(err.code));
        Envelope {
            command: command.to_string(),
            status: "error",
            result: Value::Null,
            diagnostics: Value::Object(d),
            seed: None,
            version: VERSION,
        }
    }

    pub fn render(&self) -> String {
        let v = round_floats(serde_json::to_value(self).expect("envelope is serializable"));
        serde_json::to_string_pretty(&v).expect("value is serializable")
    }
}

/// Rounds every float in `v` to 12 significant digits.
pub fn round_floats(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = round_sig12(n.as_f64().unwrap());
            Number::from_f64(if x == 0.0 { 0.0 } else { x }).map_or(Value::Null, Value::Number)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(round_floats).collect()),
        Value::Object(o) => {
            Value::Object(o.into_iter().map(|(k, v)| (k, round_floats(v))).collect())
        }
        other => other,
    }
}

/// `serde_json::to_value` for types whose serialization cannot fail.
pub fn to_value<T: Serialize + ?Sized>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable")
}
