//! Archive download. The only code that touches the network.

use std::io::Read;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use mantra_core::formats::manifest::{sha256_hex, verify_checksum, ArchiveEntry};
use mantra_core::formats::Manifest;

/// `$MANTRA_CACHE_DIR`, else `$HOME/.cache/mantra`.
pub fn default_cache_dir() -> Option<PathBuf> {
    if let Some(dir) = std::env::var_os("MANTRA_CACHE_DIR").filter(|d| !d.is_empty()) {
        return Some(PathBuf::from(dir));
    }
    std::env::var_os("HOME").map(|h| PathBuf::from(h).join(".cache").join("mantra"))
}

fn download(url: &str) -> Result<Vec<u8>> {
    if let Some(path) = url.strip_prefix("file://") {
        return std::fs::read(path).with_context(|| format!("reading {path}"));
    }
    if !(url.starts_with("https://") || url.starts_with("http://")) {
        bail!("unsupported URL scheme in {url}");
    }
    let resp = ureq::get(url).call().with_context(|| format!("GET {url}"))?;
    let mut bytes = Vec::new();
    resp.into_reader().read_to_end(&mut bytes).with_context(|| format!("reading body of {url}"))?;
    Ok(bytes)
}

fn fetch_one(entry: &ArchiveEntry, dir: &Path, force: bool) -> Result<()> {
    let target = dir.join(&entry.file);
    if target.exists() && !force {
        let bytes = std::fs::read(&target).with_context(|| format!("reading {}", target.display()))?;
        if verify_checksum(entry, &bytes).is_ok() {
            eprintln!("{} already present", target.display());
            return Ok(());
        }
        eprintln!("{} fails its checksum; downloading again", target.display());
    }
    eprintln!("downloading {}", entry.url);
    let bytes = download(&entry.url)?;
    verify_checksum(entry, &bytes)?;
    let part = dir.join(format!("{}.part", entry.file));
    std::fs::write(&part, &bytes).with_context(|| format!("writing {}", part.display()))?;
    std::fs::rename(&part, &target).with_context(|| format!("renaming to {}", target.display()))?;
    eprintln!("{}  {}", sha256_hex(&bytes), target.display());
    Ok(())
}

pub fn run(version: &str, dest: Option<PathBuf>, manifest: Option<&Path>, force: bool) -> Result<()> {
    let manifest = match manifest {
        Some(p) => Manifest::load(p)?,
        None => Manifest::builtin(),
    };
    let entries = manifest.entries(version)?;
    let Some(root) = dest.or_else(default_cache_dir) else {
        bail!("no destination: pass --dest or set MANTRA_CACHE_DIR");
    };
    let dir = root.join(version);
    std::fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    for entry in entries {
        fetch_one(entry, &dir, force)?;
    }
    Ok(())
}
