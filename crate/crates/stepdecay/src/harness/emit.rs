//! CSV/JSON emission with a self-describing header block.
//!
//! CSV files carry `# key = value` comment lines (the resolved schedule and
//! config echo) before the mandatory column header; floats are serialized
//! with 17 significant digits. JSON files mirror the CSV schema as an array
//! of records under `"records"`, with the same echo under `"meta"`.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use super::config::OutputFormat;

/// A row type with a fixed CSV schema.
pub trait Record: Serialize {
    fn header() -> &'static str;
    fn csv_row(&self) -> String;
}

/// 17 significant digits, enough to round-trip any f64.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn emit<R: Record>(
    records: &[R],
    format: OutputFormat,
    path: &Path,
    meta: &[(String, String)],
) -> std::io::Result<()> {
    let mut out = String::new();
    match format {
        OutputFormat::Csv => {
            for (k, v) in meta {
                out.push_str(&format!("# {k} = {v}\n"));
            }
            out.push_str(R::header());
            out.push('\n');
            for r in records {
                out.push_str(&r.csv_row());
                out.push('\n');
            }
        }
        OutputFormat::Json => {
            let meta_map: serde_json::Map<String, serde_json::Value> = meta
                .iter()
                .map(|(k, v)| (k.clone(), serde_json::Value::String(v.clone())))
                .collect();
            let doc = serde_json::json!({
                "meta": meta_map,
                "records": records,
            });
            out = serde_json::to_string_pretty(&doc).expect("records serialize");
            out.push('\n');
        }
    }
    let mut file = std::fs::File::create(path)?;
    file.write_all(out.as_bytes())
}

/// Parses a CSV produced by [`emit`]: skips `#` comments, returns the header
/// fields and rows.
pub fn parse_csv(text: &str) -> Option<(Vec<String>, Vec<Vec<String>>)> {
    let mut lines = text.lines().filter(|l| !l.starts_with('#') && !l.is_empty());
    let header: Vec<String> = lines.next()?.split(',').map(str::to_string).collect();
    let rows = lines
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect();
    Some((header, rows))
}

/// Byte comparison of two emitted files with every `wall_ms` column zeroed
/// out (the only nondeterministic output).
pub fn equal_modulo_wall_ms(a: &str, b: &str) -> bool {
    fn scrub(text: &str) -> String {
        if let Some((header, rows)) = parse_csv(text) {
            if let Some(idx) = header.iter().position(|h| h == "wall_ms") {
                let comments: Vec<&str> =
                    text.lines().filter(|l| l.starts_with('#')).collect();
                let mut out = comments.join("\n");
                out.push('\n');
                out.push_str(&header.join(","));
                for mut row in rows {
                    if idx < row.len() {
                        row[idx] = "0".into();
                    }
                    out.push('\n');
                    out.push_str(&row.join(","));
                }
                return out;
            }
        }
        // JSON: scrub "wall_ms": <num> fields textually.
        let mut out = String::new();
        for line in text.lines() {
            if let Some(pos) = line.find("\"wall_ms\"") {
                out.push_str(&line[..pos]);
                out.push_str("\"wall_ms\": 0");
                if line.trim_end().ends_with(',') {
                    out.push(',');
                }
            } else {
                out.push_str(line);
            }
            out.push('\n');
        }
        out
    }
    scrub(a) == scrub(b)
}
