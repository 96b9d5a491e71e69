use std::io::Write;
use std::path::Path;

use crate::CliError;

/// CSV assembled in memory and written in one go, so a failed run never
/// leaves a partial file behind.
pub struct CsvOut {
    writer: csv::Writer<Vec<u8>>,
    footer: Vec<String>,
}

impl CsvOut {
    pub fn new(header_comment: &str, columns: &[&str]) -> Result<Self, CliError> {
        let mut buf = Vec::new();
        writeln!(buf, "{header_comment}").map_err(io_err)?;
        let mut writer = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(buf);
        writer.write_record(columns).map_err(csv_err)?;
        Ok(Self {
            writer,
            footer: Vec::new(),
        })
    }

    pub fn row(&mut self, fields: &[String]) -> Result<(), CliError> {
        self.writer.write_record(fields).map_err(csv_err)
    }

    /// A trailing comment line.
    pub fn footer(&mut self, line: String) {
        self.footer.push(line);
    }

    pub fn finish(self, out: Option<&Path>) -> Result<(), CliError> {
        let mut buf = self.writer.into_inner().map_err(|e| CliError::Failure(e.to_string()))?;
        for line in &self.footer {
            writeln!(buf, "# {line}").map_err(io_err)?;
        }
        match out {
            Some(path) => {
                if let Err(e) = std::fs::write(path, &buf) {
                    let _ = std::fs::remove_file(path);
                    return Err(CliError::Failure(format!("writing {}: {e}", path.display())));
                }
                Ok(())
            }
            None => std::io::stdout().lock().write_all(&buf).map_err(io_err),
        }
    }
}

/// Shortest representation that parses back to the same value.
pub fn num(v: f64) -> String {
    v.to_string()
}

pub fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

fn io_err(e: std::io::Error) -> CliError {
    CliError::Failure(e.to_string())
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::Failure(e.to_string())
}
