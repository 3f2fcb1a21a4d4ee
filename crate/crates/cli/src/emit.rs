//! Record output: JSON Lines or CSV, floats at 17 significant digits.

use std::collections::BTreeSet;
use std::io::Write;

use serde_json::Value;
use young_core::output::{fmt_g17, to_json_string};

use crate::config::Format;
use crate::CliError;

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        Value::Bool(b) => b.to_string(),
        Value::Number(n) => match (n.as_i64(), n.as_u64()) {
            (Some(i), _) => i.to_string(),
            (_, Some(u)) => u.to_string(),
            _ => fmt_g17(n.as_f64().unwrap_or(f64::NAN)),
        },
        other => to_json_string(other).unwrap_or_default(),
    }
}

/// Writes one JSON object per line, or a CSV table whose columns are the union
/// of the records' top-level keys in lexicographic order, with nested values
/// as compact JSON.
pub fn write_records(records: &[Value], format: Format, out: &mut dyn Write) -> Result<(), CliError> {
    match format {
        Format::Json => {
            for r in records {
                let line = to_json_string(r).map_err(|e| CliError::Output(e.to_string()))?;
                writeln!(out, "{line}").map_err(|e| CliError::Output(e.to_string()))?;
            }
        }
        Format::Csv => {
            let columns: BTreeSet<&str> = records
                .iter()
                .filter_map(Value::as_object)
                .flat_map(|o| o.keys().map(String::as_str))
                .collect();
            let mut w = csv::Writer::from_writer(out);
            let err = |e: csv::Error| CliError::Output(e.to_string());
            w.write_record(&columns).map_err(err)?;
            for r in records {
                let row: Vec<String> = columns
                    .iter()
                    .map(|c| r.get(*c).map(cell).unwrap_or_default())
                    .collect();
                w.write_record(&row).map_err(err)?;
            }
            w.flush().map_err(|e| CliError::Output(e.to_string()))?;
        }
    }
    Ok(())
}
