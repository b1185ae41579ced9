use serde_json::{json, Map, Value};

/// Command output, rendered as text or JSON with the same fields.
#[derive(Debug)]
pub enum Report {
    /// `KEY= value` lines.
    Fields(Vec<(&'static str, String)>),
    /// Verbatim multi-line text, such as a matrix dump.
    Dump(String),
    Table {
        columns: Vec<&'static str>,
        rows: Vec<Vec<String>>,
        passed: bool,
    },
}

impl Report {
    pub fn text(&self) -> String {
        match self {
            Report::Fields(fields) => fields
                .iter()
                .map(|(k, v)| format!("{k}= {v}\n"))
                .collect(),
            Report::Dump(s) => s.clone(),
            Report::Table {
                columns,
                rows,
                passed,
            } => {
                let widths: Vec<usize> = (0..columns.len())
                    .map(|i| {
                        rows.iter()
                            .map(|r| r[i].len())
                            .chain([columns[i].len()])
                            .max()
                            .unwrap_or(0)
                    })
                    .collect();
                let line = |cells: Vec<&str>| -> String {
                    let padded: Vec<String> = cells
                        .iter()
                        .zip(&widths)
                        .map(|(c, w)| format!("{c:<w$}"))
                        .collect();
                    format!("{}\n", padded.join("  ").trim_end())
                };
                let mut out = line(columns.clone());
                for r in rows {
                    out.push_str(&line(r.iter().map(String::as_str).collect()));
                }
                out.push_str(if *passed { "PASS\n" } else { "FAIL\n" });
                out
            }
        }
    }

    pub fn json(&self) -> Value {
        match self {
            Report::Fields(fields) => {
                let map: Map<String, Value> = fields
                    .iter()
                    .map(|(k, v)| (k.to_string(), Value::String(v.clone())))
                    .collect();
                Value::Object(map)
            }
            Report::Dump(s) => json!({ "dump": s }),
            Report::Table {
                columns,
                rows,
                passed,
            } => {
                let rows: Vec<Value> = rows
                    .iter()
                    .map(|r| {
                        let map: Map<String, Value> = columns
                            .iter()
                            .zip(r)
                            .map(|(c, v)| (c.to_string(), Value::String(v.clone())))
                            .collect();
                        Value::Object(map)
                    })
                    .collect();
                json!({ "rows": rows, "result": if *passed { "PASS" } else { "FAIL" } })
            }
        }
    }
}
