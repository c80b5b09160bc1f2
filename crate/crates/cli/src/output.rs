//! Output directory handling: atomic writes and the run manifest.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;

pub struct OutDir {
    root: PathBuf,
    written: Vec<String>,
}

impl OutDir {
    pub fn create(root: &Path) -> Result<Self> {
        fs::create_dir_all(root).with_context(|| format!("creating {}", root.display()))?;
        Ok(Self {
            root: root.to_path_buf(),
            written: Vec::new(),
        })
    }

    /// Writes `name` through a temporary file and a rename, so readers never
    /// see a partial file.
    pub fn write(&mut self, name: &str, contents: &str) -> Result<PathBuf> {
        let path = self.root.join(name);
        let tmp = self.root.join(format!(".{name}.tmp"));
        fs::write(&tmp, contents).with_context(|| format!("writing {}", tmp.display()))?;
        fs::rename(&tmp, &path).with_context(|| format!("renaming to {}", path.display()))?;
        self.written.push(name.to_string());
        Ok(path)
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<PathBuf> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.write(name, &text)
    }

    /// Records the command, its full configuration, the outcome and the files
    /// written so far.
    pub fn finish<C: Serialize>(mut self, command: &str, config: &C, met: bool) -> Result<()> {
        #[derive(Serialize)]
        struct Manifest<'a, C> {
            tool: &'static str,
            version: &'static str,
            command: &'a str,
            config: &'a C,
            met: bool,
            files: &'a [String],
        }
        let files = self.written.clone();
        self.write_json(
            "manifest.json",
            &Manifest {
                tool: env!("CARGO_PKG_NAME"),
                version: env!("CARGO_PKG_VERSION"),
                command,
                config,
                met,
                files: &files,
            },
        )?;
        Ok(())
    }
}

/// File-name friendly rendering of a tolerance, e.g. `0.05` → `0.05`, `1e-9` → `1e-9`.
pub fn eps_tag(eps: f64) -> String {
    format!("{eps:?}")
}
