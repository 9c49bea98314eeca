use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use std::io::Write;
use wglab_core::{Error, Result};

/// One logical result: what ran, on what, what came out, and provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultEnvelope {
    pub cmd: String,
    pub inputs: Value,
    pub outputs: Value,
    pub seed: u64,
    pub version: String,
    pub ms: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Jsonl,
    Csv,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "jsonl" | "json" => Ok(Format::Jsonl),
            "csv" => Ok(Format::Csv),
            _ => Err(Error::Validation(format!("unknown format '{s}', expected jsonl or csv"))),
        }
    }
}

fn io(e: impl std::fmt::Display) -> Error {
    Error::Validation(format!("output: {e}"))
}

pub fn write_jsonl(out: &mut dyn Write, envs: &[ResultEnvelope]) -> Result<()> {
    for env in envs {
        serde_json::to_writer(&mut *out, env).map_err(io)?;
        out.write_all(b"\n").map_err(io)?;
    }
    Ok(())
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Tabular rows of one envelope: its `rows` array when present, otherwise
/// the outputs object as a single row.
fn rows_of(env: &ResultEnvelope) -> Vec<Map<String, Value>> {
    if let Some(Value::Array(rows)) = env.outputs.get("rows") {
        return rows
            .iter()
            .map(|r| match r {
                Value::Object(m) => m.clone(),
                other => Map::from_iter([("value".to_string(), other.clone())]),
            })
            .collect();
    }
    match &env.outputs {
        Value::Object(m) => vec![m.clone()],
        other => vec![Map::from_iter([("value".to_string(), other.clone())])],
    }
}

/// One header per envelope; nested values are written as JSON text.
pub fn write_csv(out: &mut dyn Write, envs: &[ResultEnvelope]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for env in envs {
        let rows = rows_of(env);
        let Some(first) = rows.first() else {
            continue;
        };
        let keys: Vec<&String> = first.keys().collect();
        let mut header = vec!["cmd"];
        header.extend(keys.iter().map(|k| k.as_str()));
        w.write_record(&header).map_err(io)?;
        for row in &rows {
            let mut rec = vec![env.cmd.clone()];
            rec.extend(keys.iter().map(|k| row.get(*k).map(cell).unwrap_or_default()));
            w.write_record(&rec).map_err(io)?;
        }
    }
    w.flush().map_err(io)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn env() -> ResultEnvelope {
        ResultEnvelope {
            cmd: "crconst".into(),
            inputs: json!({"step": 0.0005}),
            outputs: json!({"rows": [{"r": 7, "value": 0.448_638_485_123_456_7}, {"r": 8, "value": 0.1135}]}),
            seed: 7,
            version: "0.1.0".into(),
            ms: 1.25,
        }
    }

    #[test]
    fn jsonl_round_trip() {
        let mut buf = vec![];
        write_jsonl(&mut buf, &[env(), env()]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        for line in text.lines() {
            let back: ResultEnvelope = serde_json::from_str(line).unwrap();
            assert_eq!(back, env());
        }
    }

    #[test]
    fn csv_rows() {
        let mut buf = vec![];
        write_csv(&mut buf, &[env()]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "cmd,r,value");
        assert_eq!(lines.len(), 3);
        assert!(lines[1].starts_with("crconst,7,0.44863848512345"));
    }
}
