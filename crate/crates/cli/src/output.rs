use std::path::{Path, PathBuf};

use anyhow::{Context, Result};

/// Files staged in memory and written together; a failed write removes
/// everything this set created.
#[derive(Default)]
pub struct Outputs {
    files: Vec<(PathBuf, Vec<u8>)>,
}

impl Outputs {
    pub fn add(&mut self, path: impl Into<PathBuf>, contents: impl Into<Vec<u8>>) {
        self.files.push((path.into(), contents.into()));
    }

    pub fn paths(&self) -> impl Iterator<Item = &Path> {
        self.files.iter().map(|(p, _)| p.as_path())
    }

    pub fn commit(self) -> Result<Vec<PathBuf>> {
        let mut created_dirs = Vec::new();
        let mut written = Vec::new();
        let result = (|| -> Result<()> {
            for (path, bytes) in &self.files {
                if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                    let mut missing = Vec::new();
                    let mut cur = Some(parent);
                    while let Some(dir) = cur.filter(|d| !d.as_os_str().is_empty() && !d.exists()) {
                        missing.push(dir.to_path_buf());
                        cur = dir.parent();
                    }
                    std::fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
                    created_dirs.extend(missing.into_iter().rev());
                }
                let tmp = path.with_extension("partial");
                std::fs::write(&tmp, bytes).with_context(|| format!("writing {}", path.display()))?;
                std::fs::rename(&tmp, path).with_context(|| format!("writing {}", path.display()))?;
                written.push(path.clone());
            }
            Ok(())
        })();
        if let Err(e) = result {
            for p in &written {
                let _ = std::fs::remove_file(p);
            }
            for (p, _) in &self.files {
                let _ = std::fs::remove_file(p.with_extension("partial"));
            }
            for d in created_dirs.iter().rev() {
                let _ = std::fs::remove_dir(d);
            }
            return Err(e);
        }
        Ok(written)
    }
}
