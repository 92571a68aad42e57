//! Output assembly: aligned-column text, RFC-4180 CSV, and JSON roots.
//!
//! Everything here is a pure function of its inputs; reports must come out
//! byte-identical for identical configurations.

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Json,
}

/// Right-pads each cell to its column width; numeric-looking cells are
/// left-padded instead so magnitudes line up.
pub fn text_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let cols = header.len();
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for row in rows {
        for (i, cell) in row.iter().enumerate() {
            widths[i] = widths[i].max(cell.len());
        }
    }
    let mut out = String::new();
    for (i, h) in header.iter().enumerate() {
        if i > 0 {
            out.push_str("  ");
        }
        out.push_str(&format!("{h:<width$}", width = widths[i]));
    }
    out.push('\n');
    for row in rows {
        for (i, cell) in row.iter().enumerate() {
            if i > 0 {
                out.push_str("  ");
            }
            let numeric = cell.bytes().next().is_some_and(|b| b.is_ascii_digit() || b == b'-');
            if numeric && cols > 1 {
                out.push_str(&format!("{cell:>width$}", width = widths[i]));
            } else {
                out.push_str(&format!("{cell:<width$}", width = widths[i]));
            }
        }
        out.push('\n');
    }
    out
}

fn csv_field(cell: &str) -> String {
    if cell.contains(',') || cell.contains('"') || cell.contains('\n') {
        format!("\"{}\"", cell.replace('"', "\"\""))
    } else {
        cell.to_string()
    }
}

pub fn csv_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        let line: Vec<String> = row.iter().map(|c| csv_field(c)).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

/// JSON report root: the command body plus the `config` echo block.
pub fn json_report<C: Serialize>(config: &C, body: serde_json::Value) -> String {
    let mut root = serde_json::Map::new();
    root.insert(
        "config".to_string(),
        serde_json::to_value(config).expect("config serializes"),
    );
    if let serde_json::Value::Object(map) = body {
        for (k, v) in map {
            root.insert(k, v);
        }
    }
    let mut out = serde_json::to_string_pretty(&serde_json::Value::Object(root))
        .expect("report serializes");
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_aligns_columns() {
        let out = text_table(
            &["n", "value"],
            &[vec!["4".into(), "13".into()], vec!["10".into(), "13305590".into()]],
        );
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines[0], "n   value   ");
        assert_eq!(lines[1], " 4        13");
        assert_eq!(lines[2], "10  13305590");
    }

    #[test]
    fn csv_quotes_embedded_commas() {
        let out = csv_table(
            &["tanglegram", "stab"],
            &[vec!["(L,L) ; 1,2 ; (L,L)".into(), "2".into()]],
        );
        assert_eq!(out, "tanglegram,stab\n\"(L,L) ; 1,2 ; (L,L)\",2\n");
    }

    #[test]
    fn json_root_carries_config_first() {
        #[derive(Serialize)]
        struct Cfg {
            command: String,
        }
        let out = json_report(
            &Cfg { command: "count".into() },
            serde_json::json!({"rows": [1, 2]}),
        );
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["config"]["command"], "count");
        assert_eq!(v["rows"][1], 2);
    }
}
