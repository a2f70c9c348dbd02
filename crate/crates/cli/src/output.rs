//! Fixed 9-significant-digit formatting for CSV and JSON output.

use std::fs;

use serde::Serialize;
use serde_json::Value;

use crate::error::{failure, CliResult};

pub fn sig9(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return if x == 0.0 { 0.0 } else { x };
    }
    format!("{x:.8e}").parse().expect("formatted float parses")
}

pub fn fmt9(x: f64) -> String {
    format!("{}", sig9(x))
}

pub fn round_json(v: &mut Value) {
    match v {
        Value::Number(num) if num.is_f64() => {
            let x = num.as_f64().expect("f64 number");
            if let Some(r) = serde_json::Number::from_f64(sig9(x)) {
                *num = r;
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_json),
        Value::Object(map) => map.values_mut().for_each(round_json),
        _ => {}
    }
}

pub fn to_json<T: Serialize>(value: &T, round: bool) -> String {
    let mut v = serde_json::to_value(value).expect("serializable");
    if round {
        round_json(&mut v);
    }
    let mut s = serde_json::to_string_pretty(&v).expect("serializable");
    s.push('\n');
    s
}

pub fn write_file(path: &str, contents: &str) -> CliResult<()> {
    fs::write(path, contents).map_err(|e| failure(format!("cannot write {path}: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nine_digits() {
        assert_eq!(fmt9(1.160712213456), "1.16071221");
        assert_eq!(fmt9(2.5), "2.5");
        assert_eq!(fmt9(1.0), "1");
        assert_eq!(fmt9(-0.0), "0");
        assert_eq!(fmt9(1.0 / 3.0), "0.333333333");
        assert_eq!(fmt9(12345678901.0), "12345678900");
    }

    #[test]
    fn json_rounding_keeps_integers() {
        let v = serde_json::json!({"n": 20, "x": [0.1234567891234, 3]});
        assert_eq!(to_json(&v, true), "{\n  \"n\": 20,\n  \"x\": [\n    0.123456789,\n    3\n  ]\n}\n");
    }
}
