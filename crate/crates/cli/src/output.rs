use std::io::Write;

use serde_json::Value;

use crate::config::Format;
use crate::run::Report;

pub fn render(report: &Report, format: Format) -> Result<Vec<u8>, String> {
    match format {
        Format::Json => {
            let mut out =
                serde_json::to_vec_pretty(&report.document()).map_err(|e| e.to_string())?;
            out.push(b'\n');
            Ok(out)
        }
        Format::Csv => csv_bytes(report).map_err(|e| e.to_string()),
    }
}

fn csv_bytes(report: &Report) -> csv::Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    if report.rows.is_empty() {
        w.write_record(["command", "key", "value"])?;
        let mut flat = Vec::new();
        flatten("", &report.results, &mut flat);
        for (key, value) in flat {
            w.write_record([report.command, &key, &value])?;
        }
        w.write_record([report.command, "verdict", verdict(report.passed)])?;
    } else {
        w.write_record([
            "command", "identity", "point_re", "point_im", "lhs_re", "lhs_im", "rhs_re", "rhs_im",
            "error", "verdict",
        ])?;
        let part = |x: Option<f64>| x.map_or_else(String::new, |v| v.to_string());
        for r in &report.rows {
            w.write_record([
                report.command.to_string(),
                r.identity.clone(),
                r.point.re.to_string(),
                r.point.im.to_string(),
                part(r.lhs.map(|c| c.re)),
                part(r.lhs.map(|c| c.im)),
                part(r.rhs.map(|c| c.re)),
                part(r.rhs.map(|c| c.im)),
                format!("{:e}", r.error),
                verdict(r.passed).to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(w.into_inner().expect("in-memory writer"))
}

fn verdict(passed: bool) -> &'static str {
    if passed {
        "pass"
    } else {
        "fail"
    }
}

/// Dotted paths to every scalar, arrays indexed by position.
fn flatten(prefix: &str, value: &Value, out: &mut Vec<(String, String)>) {
    let join = |key: &str| {
        if prefix.is_empty() {
            key.to_string()
        } else {
            format!("{prefix}.{key}")
        }
    };
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                flatten(&join(k), v, out);
            }
        }
        Value::Array(items) => {
            for (i, v) in items.iter().enumerate() {
                flatten(&join(&i.to_string()), v, out);
            }
        }
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        Value::Null => out.push((prefix.to_string(), String::new())),
        other => out.push((prefix.to_string(), other.to_string())),
    }
}

pub fn write_out(bytes: &[u8], path: Option<&std::path::Path>) -> Result<(), String> {
    match path {
        Some(p) => {
            std::fs::write(p, bytes).map_err(|e| format!("cannot write {}: {e}", p.display()))
        }
        None => std::io::stdout()
            .write_all(bytes)
            .map_err(|e| e.to_string()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn flatten_paths() {
        let mut out = Vec::new();
        flatten(
            "",
            &json!({"a": {"b": [1, 2]}, "c": "x", "d": null}),
            &mut out,
        );
        assert_eq!(
            out,
            vec![
                ("a.b.0".into(), "1".into()),
                ("a.b.1".into(), "2".into()),
                ("c".into(), "x".into()),
                ("d".into(), String::new()),
            ]
        );
    }
}
