//! Output files: CSV with a leading `# config:` comment line, or a JSON
//! document with a `config` member.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::Serialize;

/// Where the main output goes: a file, or stdout when `path` is `None`.
#[derive(Clone, Debug, Default)]
pub struct Destination {
    pub path: Option<PathBuf>,
}

impl Destination {
    /// Relative output paths are resolved against `dir`.
    pub fn resolve(output: Option<&Path>, dir: &Path) -> Self {
        Destination {
            path: output.map(|p| {
                if p.is_absolute() {
                    p.to_path_buf()
                } else {
                    dir.join(p)
                }
            }),
        }
    }

    pub fn open(&self) -> anyhow::Result<Box<dyn Write>> {
        Ok(match &self.path {
            Some(p) => {
                if let Some(parent) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                    std::fs::create_dir_all(parent)
                        .with_context(|| format!("creating {}", parent.display()))?;
                }
                Box::new(BufWriter::new(
                    File::create(p).with_context(|| format!("creating {}", p.display()))?,
                ))
            }
            None => Box::new(BufWriter::new(io::stdout())),
        })
    }
}

pub fn write_csv<W: Write, T: Serialize, C: Serialize>(
    mut w: W,
    config: &C,
    rows: &[T],
    trailer: &[String],
) -> anyhow::Result<()> {
    writeln!(w, "# config: {}", serde_json::to_string(config)?)?;
    {
        let mut cw = csv::Writer::from_writer(&mut w);
        for r in rows {
            cw.serialize(r)?;
        }
        cw.flush()?;
    }
    for line in trailer {
        writeln!(w, "# {line}")?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<W: Write, C: Serialize, T: Serialize>(
    mut w: W,
    config: &C,
    key: &str,
    body: &T,
) -> anyhow::Result<()> {
    let mut doc = serde_json::Map::new();
    doc.insert("config".into(), serde_json::to_value(config)?);
    doc.insert(key.into(), serde_json::to_value(body)?);
    serde_json::to_writer_pretty(&mut w, &doc)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

/// Reads a CSV written by [`write_csv`], skipping comment lines.
pub fn read_csv<T: serde::de::DeserializeOwned>(text: &str) -> anyhow::Result<Vec<T>> {
    let mut r = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    Ok(r.deserialize().collect::<Result<Vec<T>, _>>()?)
}

/// The embedded config of a CSV written by [`write_csv`].
pub fn csv_config(text: &str) -> anyhow::Result<serde_json::Value> {
    let line = text
        .lines()
        .next()
        .and_then(|l| l.strip_prefix("# config: "))
        .context("missing config line")?;
    Ok(serde_json::from_str(line)?)
}
