//! CSV and JSON writers for tables and reports.

use std::io::Write;

use serde_json::{Map, Value};

use crate::error::CliResult;

/// A table with fixed columns. CSV metadata lines are written as
/// `# key=value` before the header; in JSON they become top-level fields.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
    pub metadata: Vec<(&'static str, f64)>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>, rows: Vec<Vec<f64>>) -> Self {
        Self {
            columns,
            rows,
            metadata: Vec::new(),
        }
    }
}

/// 17 significant digits, enough to round-trip any double.
pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{x:.16e}")
    }
}

pub fn write_csv(t: &Table, w: &mut impl Write) -> CliResult<()> {
    for (k, v) in &t.metadata {
        writeln!(w, "# {k}={}", fmt_num(*v))?;
    }
    writeln!(w, "{}", t.columns.join(","))?;
    for row in &t.rows {
        let cells: Vec<String> = row.iter().map(|x| fmt_num(*x)).collect();
        writeln!(w, "{}", cells.join(","))?;
    }
    Ok(())
}

/// Non-finite numbers have no JSON form and are written as `null`.
pub fn table_json(t: &Table) -> Value {
    let rows: Vec<Value> = t
        .rows
        .iter()
        .map(|row| {
            let obj: Map<String, Value> = t
                .columns
                .iter()
                .zip(row)
                .map(|(c, x)| (c.to_string(), Value::from(*x)))
                .collect();
            Value::Object(obj)
        })
        .collect();
    if t.metadata.is_empty() {
        return Value::Array(rows);
    }
    let mut obj: Map<String, Value> = t
        .metadata
        .iter()
        .map(|(k, v)| (k.to_string(), Value::from(*v)))
        .collect();
    obj.insert("rows".into(), Value::Array(rows));
    Value::Object(obj)
}

pub fn write_json(v: &Value, w: &mut impl Write) -> CliResult<()> {
    serde_json::to_writer_pretty(&mut *w, v)?;
    writeln!(w)?;
    Ok(())
}

/// CSV with a header and quoted string cells where needed.
pub fn write_csv_records(
    columns: &[&str],
    rows: &[Vec<String>],
    w: &mut impl Write,
) -> CliResult<()> {
    writeln!(w, "{}", columns.join(","))?;
    for row in rows {
        let cells: Vec<String> = row
            .iter()
            .map(|c| {
                if c.contains([',', '"', '\n']) {
                    format!("\"{}\"", c.replace('"', "\"\""))
                } else {
                    c.clone()
                }
            })
            .collect();
        writeln!(w, "{}", cells.join(","))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for x in [0.1, 1.0 / 3.0, 6.02214076e23, -2.5e-300, 0.0] {
            assert_eq!(fmt_num(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(fmt_num(f64::INFINITY), "inf");
    }

    #[test]
    fn csv_layout() {
        let mut t = Table::new(vec!["a", "b"], vec![vec![1.0, 2.0]]);
        t.metadata.push(("frac", 0.5));
        let mut buf = Vec::new();
        write_csv(&t, &mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines[0], "# frac=5.0000000000000000e-1");
        assert_eq!(lines[1], "a,b");
        assert_eq!(lines.len(), 3);
        let j = table_json(&t);
        assert_eq!(j["rows"][0]["b"], 2.0);
        let mut buf = Vec::new();
        write_csv_records(&["x"], &[vec!["a,b".into()]], &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "x\n\"a,b\"\n");
    }
}
