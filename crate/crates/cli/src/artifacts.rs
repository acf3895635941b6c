use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;

use crate::UsageError;

/// Output directory that refuses to overwrite unless forced.
pub struct Artifacts {
    dir: PathBuf,
    force: bool,
}

impl Artifacts {
    pub fn new(dir: &Path, force: bool) -> Self {
        Artifacts {
            dir: dir.to_path_buf(),
            force,
        }
    }

    /// Creates the directory and checks that none of `names` would be
    /// overwritten. Call before computing so nothing is half written.
    pub fn claim(&self, names: &[String]) -> Result<()> {
        fs::create_dir_all(&self.dir)
            .with_context(|| format!("creating {}", self.dir.display()))?;
        if self.force {
            return Ok(());
        }
        for name in names {
            let p = self.dir.join(name);
            if p.exists() {
                return Err(UsageError(format!(
                    "{} exists; pass --force to overwrite",
                    p.display()
                ))
                .into());
            }
        }
        Ok(())
    }

    pub fn write_with(
        &self,
        name: &str,
        body: impl FnOnce(&mut dyn Write) -> std::io::Result<()>,
    ) -> Result<PathBuf> {
        let p = self.dir.join(name);
        let mut w =
            BufWriter::new(File::create(&p).with_context(|| format!("creating {}", p.display()))?);
        body(&mut w).with_context(|| format!("writing {}", p.display()))?;
        w.flush()?;
        Ok(p)
    }

    pub fn write_json<T: Serialize>(&self, name: &str, value: &T) -> Result<PathBuf> {
        let text = to_json(value)?;
        self.write_with(name, |w| w.write_all(text.as_bytes()))
    }
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

/// Keeps a parameter usable inside a file name.
pub fn tag(raw: &str) -> String {
    raw.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || matches!(c, '.' | '-' | '+') {
                c
            } else {
                '_'
            }
        })
        .collect()
}
