//! CSV output: comma-separated, '.' decimals, 15 significant digits, LF line
//! endings, mandatory header. Identical tables render to identical bytes.

use std::path::{Path, PathBuf};

use crate::CliError;

#[derive(Debug, Clone)]
pub enum Value {
    Int(i64),
    Num(f64),
    Text(String),
}

#[derive(Debug, Clone)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: Vec<S>) -> Self {
        Table {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

fn format_num(x: f64) -> String {
    format!("{x:.14e}")
}

pub fn render(table: &Table) -> Result<String, CliError> {
    let mut out = String::new();
    out.push_str(&table.header.join(","));
    out.push('\n');
    for (i, row) in table.rows.iter().enumerate() {
        let mut first = true;
        for value in row {
            if !first {
                out.push(',');
            }
            first = false;
            match value {
                Value::Int(v) => out.push_str(&v.to_string()),
                Value::Num(v) => {
                    if !v.is_finite() {
                        return Err(CliError::Numeric(format!(
                            "non-finite value {v} in output row {}",
                            i + 1
                        )));
                    }
                    out.push_str(&format_num(*v));
                }
                Value::Text(v) => out.push_str(v),
            }
        }
        out.push('\n');
    }
    Ok(out)
}

pub fn write_table(path: &Path, table: &Table) -> Result<(), CliError> {
    let text = render(table)?;
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)
                .map_err(|e| CliError::Config(format!("{}: {e}", dir.display())))?;
        }
    }
    std::fs::write(path, text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

/// Output directory: an explicit flag, else the environment default, else the
/// working directory.
pub fn out_dir(explicit: Option<&Path>) -> PathBuf {
    if let Some(dir) = explicit {
        return dir.to_path_buf();
    }
    std::env::var_os(crate::OUT_DIR_VAR)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("."))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_fifteen_significant_digits_with_lf() {
        let mut t = Table::new(vec!["t", "f", "n"]);
        t.push(vec![
            Value::Num(std::f64::consts::PI),
            Value::Num(0.25),
            Value::Int(7),
        ]);
        let text = render(&t).unwrap();
        assert_eq!(text, "t,f,n\n3.14159265358979e0,2.50000000000000e-1,7\n");
    }

    #[test]
    fn rejects_non_finite_values() {
        let mut t = Table::new(vec!["x"]);
        t.push(vec![Value::Num(f64::NAN)]);
        let err = render(&t).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn rendering_is_deterministic() {
        let mut t = Table::new(vec!["a", "b"]);
        for i in 0..40 {
            t.push(vec![Value::Num(i as f64 / 7.0), Value::Num((i as f64).sin())]);
        }
        assert_eq!(render(&t).unwrap(), render(&t).unwrap());
    }
}
