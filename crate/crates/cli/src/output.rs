use std::io::{IsTerminal, Write};

use clap::ValueEnum;
use serde::Serialize;

use crate::Failure;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    #[value(alias = "pretty-table")]
    Pretty,
}

impl Format {
    /// Explicit choice, else a table on a terminal and CSV when redirected.
    pub fn resolve(choice: Option<Format>) -> Format {
        choice.unwrap_or_else(|| {
            if std::io::stdout().is_terminal() {
                Format::Pretty
            } else {
                Format::Csv
            }
        })
    }
}

pub fn write_json<T: Serialize + ?Sized>(out: &mut dyn Write, value: &T) -> Result<(), Failure> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

/// Rows of an integer key followed by floats.
pub struct Table<const W: usize> {
    header: [&'static str; W],
    rows: Vec<(usize, Vec<f64>)>,
}

impl<const W: usize> Table<W> {
    pub fn new(header: [&'static str; W]) -> Self {
        Table {
            header,
            rows: Vec::new(),
        }
    }

    pub fn push<const V: usize>(&mut self, key: usize, values: [f64; V]) {
        debug_assert_eq!(V + 1, W);
        self.rows.push((key, values.to_vec()));
    }

    pub fn write(&self, out: &mut dyn Write, format: Format) -> Result<(), Failure> {
        match format {
            Format::Csv => {
                let mut w = csv::Writer::from_writer(out);
                w.write_record(self.header)?;
                for (key, values) in &self.rows {
                    let mut record = vec![key.to_string()];
                    record.extend(values.iter().map(f64::to_string));
                    w.write_record(&record)?;
                }
                w.flush()?;
            }
            Format::Pretty => {
                let key_width = self.header[0].len().max(6);
                let width = self.header[1..]
                    .iter()
                    .map(|h| h.len())
                    .max()
                    .unwrap_or(0)
                    .max(14);
                write!(out, "{:>key_width$}", self.header[0])?;
                for h in &self.header[1..] {
                    write!(out, "  {h:>width$}")?;
                }
                writeln!(out)?;
                for (key, values) in &self.rows {
                    write!(out, "{key:>key_width$}")?;
                    for v in values {
                        write!(out, "  {v:>width$.10}")?;
                    }
                    writeln!(out)?;
                }
            }
            Format::Json => unreachable!("JSON is written from the typed rows"),
        }
        Ok(())
    }
}
