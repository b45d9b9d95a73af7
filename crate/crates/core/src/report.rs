//! Output bundles: run metadata, CSV tables and a text summary.

use std::fs;
use std::io;
use std::path::Path;

use sha2::{Digest, Sha256};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Lower-case hex SHA-256 of `bytes`.
pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunMetadata {
    pub version: String,
    pub seed: u64,
    pub scenario_digest: String,
    pub command: String,
}

impl RunMetadata {
    pub fn new(command: &str, seed: u64, scenario_bytes: &[u8]) -> Self {
        Self {
            version: VERSION.to_string(),
            seed,
            scenario_digest: sha256_hex(scenario_bytes),
            command: command.to_string(),
        }
    }

    pub fn to_csv(&self) -> String {
        format!(
            "key,value\nversion,{}\ncommand,{}\nseed,{}\nscenario_sha256,{}\n",
            self.version, self.command, self.seed, self.scenario_digest
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReportTable {
    /// File stem, without extension.
    pub name: String,
    pub csv: String,
    pub markdown: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReportBundle {
    pub metadata: RunMetadata,
    pub tables: Vec<ReportTable>,
    pub summary: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Markdown,
}

impl ReportBundle {
    pub fn new(metadata: RunMetadata) -> Self {
        Self {
            metadata,
            tables: Vec::new(),
            summary: String::new(),
        }
    }

    pub fn push(&mut self, name: &str, csv: String, markdown: Option<String>) {
        self.tables.push(ReportTable {
            name: name.to_string(),
            csv,
            markdown,
        });
    }

    /// Writes `metadata.csv`, one file per table and `summary.txt`.
    pub fn write_to(&self, dir: &Path, format: OutputFormat) -> io::Result<()> {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("metadata.csv"), self.metadata.to_csv())?;
        for t in &self.tables {
            match (format, &t.markdown) {
                (OutputFormat::Markdown, Some(md)) => fs::write(dir.join(format!("{}.md", t.name)), md)?,
                _ => fs::write(dir.join(format!("{}.csv", t.name)), &t.csv)?,
            }
        }
        fs::write(dir.join("summary.txt"), &self.summary)
    }

    /// Everything as one text stream, for printing.
    pub fn render(&self, format: OutputFormat) -> String {
        let mut out = String::new();
        for t in &self.tables {
            out.push_str(&format!("# {}\n", t.name));
            match (format, &t.markdown) {
                (OutputFormat::Markdown, Some(md)) => out.push_str(md),
                _ => out.push_str(&t.csv),
            }
            out.push('\n');
        }
        out.push_str(&self.summary);
        out
    }
}

/// CSV writer with `\n` line endings.
pub fn csv_writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new())
}

pub fn finish_csv(w: csv::Writer<Vec<u8>>) -> Result<String, csv::Error> {
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}
