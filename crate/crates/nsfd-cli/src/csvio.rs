//! CSV output of run records: header `k,t,y1,...,yn,V,dV`, UTF-8, LF line
//! endings. Floats use Rust's shortest round-trip scientific notation, so a
//! re-parsed file reproduces every f64 bit-exactly.

use std::io::{BufRead, Write};

use crate::runner::RunRow;
use crate::CliError;

pub fn write_header<W: Write>(w: &mut W, dim: usize) -> Result<(), CliError> {
    let mut header = String::from("k,t");
    for i in 1..=dim {
        header.push_str(&format!(",y{i}"));
    }
    header.push_str(",V,dV\n");
    w.write_all(header.as_bytes()).map_err(io_err)
}

pub fn write_row<W: Write>(w: &mut W, row: &RunRow) -> Result<(), CliError> {
    let mut line = format!("{},{:e}", row.k, row.t);
    for &c in &row.y {
        line.push_str(&format!(",{c:e}"));
    }
    line.push_str(&format!(",{:e},", row.v));
    if let Some(dv) = row.dv {
        line.push_str(&format!("{dv:e}"));
    }
    line.push('\n');
    w.write_all(line.as_bytes()).map_err(io_err)
}

/// Parses a file previously written by [`write_header`] / [`write_row`].
pub fn read_rows<R: BufRead>(r: R) -> Result<Vec<RunRow>, CliError> {
    let mut lines = r.lines();
    let header = lines
        .next()
        .ok_or_else(|| CliError::Config("empty CSV".into()))?
        .map_err(io_err)?;
    let columns = header.split(',').count();
    if columns < 4 || !header.starts_with("k,t,") {
        return Err(CliError::Config(format!("unexpected CSV header `{header}`")));
    }
    let dim = columns - 4;
    let mut rows = Vec::new();
    for (lineno, line) in lines.enumerate() {
        let line = line.map_err(io_err)?;
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != columns {
            return Err(CliError::Config(format!(
                "row {} has {} fields, expected {columns}",
                lineno + 2,
                fields.len()
            )));
        }
        let parse = |s: &str| -> Result<f64, CliError> {
            s.parse()
                .map_err(|_| CliError::Config(format!("bad float `{s}` on row {}", lineno + 2)))
        };
        rows.push(RunRow {
            k: fields[0]
                .parse()
                .map_err(|_| CliError::Config(format!("bad index `{}`", fields[0])))?,
            t: parse(fields[1])?,
            y: fields[2..2 + dim]
                .iter()
                .map(|s| parse(s))
                .collect::<Result<_, _>>()?,
            v: parse(fields[2 + dim])?,
            dv: if fields[3 + dim].is_empty() {
                None
            } else {
                Some(parse(fields[3 + dim])?)
            },
        });
    }
    Ok(rows)
}

fn io_err(e: std::io::Error) -> CliError {
    CliError::Io(e.to_string())
}
