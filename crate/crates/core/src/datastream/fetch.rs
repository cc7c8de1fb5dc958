use std::io::Read;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};

/// Result of downloading one manifest entry.
#[derive(Debug, Clone, Serialize)]
pub struct FetchOutcome {
    pub url: String,
    pub path: Option<PathBuf>,
    pub error: Option<String>,
}

impl FetchOutcome {
    pub fn is_ok(&self) -> bool {
        self.error.is_none()
    }
}

/// Downloads every URL listed in `manifest` (one per line, `#` comments
/// allowed) into `dir`. Failures are recorded per entry.
pub fn fetch_manifest(manifest: impl AsRef<Path>, dir: impl AsRef<Path>) -> Result<Vec<FetchOutcome>> {
    let manifest = manifest.as_ref();
    let dir = dir.as_ref();
    let text = std::fs::read_to_string(manifest).map_err(|e| {
        if e.kind() == std::io::ErrorKind::NotFound {
            Error::MissingFile {
                path: manifest.to_path_buf(),
            }
        } else {
            Error::io(manifest, e)
        }
    })?;
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    Ok(text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|url| match fetch_one(url, dir) {
            Ok(path) => FetchOutcome {
                url: url.to_string(),
                path: Some(path),
                error: None,
            },
            Err(e) => FetchOutcome {
                url: url.to_string(),
                path: None,
                error: Some(e),
            },
        })
        .collect())
}

fn fetch_one(url: &str, dir: &Path) -> std::result::Result<PathBuf, String> {
    let name = url
        .split(['?', '#'])
        .next()
        .and_then(|u| u.rsplit('/').next())
        .filter(|s| !s.is_empty())
        .ok_or_else(|| format!("cannot derive a file name from {url}"))?;
    let response = ureq::get(url).call().map_err(|e| e.to_string())?;
    let mut bytes = Vec::new();
    response
        .into_body()
        .into_reader()
        .read_to_end(&mut bytes)
        .map_err(|e| e.to_string())?;
    let path = dir.join(name);
    std::fs::write(&path, bytes).map_err(|e| format!("{}: {e}", path.display()))?;
    Ok(path)
}
