//! Staged output writing.
//!
//! Every command writes its files into a hidden staging directory first. On
//! success the files move into the output directory together with a run
//! manifest listing each file's SHA-256. On failure the staging directory is
//! renamed into `quarantine/run-NNN`, so partial outputs never overwrite
//! previous results. The manifest carries no timestamps: reruns with the
//! same inputs and seed are byte-identical.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Debug, Serialize)]
struct ManifestFile {
    path: String,
    sha256: String,
}

#[derive(Debug, Serialize)]
struct RunManifest<'a> {
    command: &'a str,
    config: &'a str,
    config_hash: String,
    seed: u64,
    mtld_threshold: f64,
    files: Vec<ManifestFile>,
}

pub struct OutputStage {
    out_dir: PathBuf,
    staging: PathBuf,
    files: Vec<ManifestFile>,
}

fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// The invoked command line with the `--out` value masked, so the recorded
/// config (and its hash) does not depend on where outputs land.
pub fn canonical_config(args: &[String]) -> String {
    let mut masked = Vec::with_capacity(args.len());
    let mut skip_next = false;
    for arg in args {
        if skip_next {
            masked.push("<out>".to_string());
            skip_next = false;
        } else if arg == "--out" {
            masked.push(arg.clone());
            skip_next = true;
        } else if let Some(_rest) = arg.strip_prefix("--out=") {
            masked.push("--out=<out>".to_string());
        } else {
            masked.push(arg.clone());
        }
    }
    masked.join(" ")
}

impl OutputStage {
    pub fn new(out_dir: &Path) -> Result<OutputStage> {
        let staging = out_dir.join(".staging");
        if staging.exists() {
            fs::remove_dir_all(&staging)
                .with_context(|| format!("clearing stale staging dir {}", staging.display()))?;
        }
        fs::create_dir_all(&staging)
            .with_context(|| format!("creating staging dir {}", staging.display()))?;
        Ok(OutputStage {
            out_dir: out_dir.to_path_buf(),
            staging,
            files: Vec::new(),
        })
    }

    /// Stage one output file under its final relative path.
    pub fn write(&mut self, rel_path: &str, bytes: &[u8]) -> Result<()> {
        let target = self.staging.join(rel_path);
        if let Some(parent) = target.parent() {
            fs::create_dir_all(parent)
                .with_context(|| format!("creating {}", parent.display()))?;
        }
        fs::write(&target, bytes).with_context(|| format!("writing {}", target.display()))?;
        self.files.push(ManifestFile {
            path: rel_path.to_string(),
            sha256: sha256_hex(bytes),
        });
        Ok(())
    }

    /// Write the run manifest and move everything into the output directory.
    pub fn commit(mut self, command: &str, config: &str, seed: u64, mtld_threshold: f64) -> Result<()> {
        self.files.sort_by(|a, b| a.path.cmp(&b.path));
        let manifest = RunManifest {
            command,
            config,
            config_hash: sha256_hex(config.as_bytes()),
            seed,
            mtld_threshold,
            files: std::mem::take(&mut self.files),
        };
        let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
        let manifest_path = self.staging.join("run_manifest.json");
        fs::write(&manifest_path, json.as_bytes())
            .with_context(|| format!("writing {}", manifest_path.display()))?;

        let mut pending = vec![PathBuf::new()];
        while let Some(rel) = pending.pop() {
            let dir = self.staging.join(&rel);
            for entry in fs::read_dir(&dir).with_context(|| format!("reading {}", dir.display()))? {
                let entry = entry?;
                let entry_rel = rel.join(entry.file_name());
                if entry.file_type()?.is_dir() {
                    pending.push(entry_rel);
                } else {
                    let target = self.out_dir.join(&entry_rel);
                    if let Some(parent) = target.parent() {
                        fs::create_dir_all(parent)?;
                    }
                    fs::rename(entry.path(), &target)
                        .with_context(|| format!("moving {} into place", entry_rel.display()))?;
                }
            }
        }
        fs::remove_dir_all(&self.staging).ok();
        Ok(())
    }

    /// Preserve whatever was staged under `quarantine/run-NNN` and report
    /// where it went.
    pub fn quarantine(self) -> Option<PathBuf> {
        if self.files.is_empty() {
            fs::remove_dir_all(&self.staging).ok();
            return None;
        }
        let quarantine_root = self.out_dir.join("quarantine");
        if fs::create_dir_all(&quarantine_root).is_err() {
            return None;
        }
        for n in 1.. {
            let slot = quarantine_root.join(format!("run-{n:03}"));
            if !slot.exists() {
                return fs::rename(&self.staging, &slot).ok().map(|()| slot);
            }
        }
        None
    }
}

/// Fixed-precision cell formatting shared by the CSV writers.
pub fn fmt_cell(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.6}")).unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn commit_moves_files_and_writes_manifest() {
        let dir = tempfile::tempdir().unwrap();
        let mut stage = OutputStage::new(dir.path()).unwrap();
        stage.write("a.csv", b"x,y\n").unwrap();
        stage.write("charts/b.svg", b"<svg/>").unwrap();
        stage.commit("analyze", "lexdiv analyze", 7, 0.72).unwrap();
        assert!(dir.path().join("a.csv").exists());
        assert!(dir.path().join("charts/b.svg").exists());
        let manifest = std::fs::read_to_string(dir.path().join("run_manifest.json")).unwrap();
        assert!(manifest.contains("\"seed\": 7"));
        assert!(manifest.contains("a.csv"));
        assert!(!dir.path().join(".staging").exists());
    }

    #[test]
    fn quarantine_preserves_partials() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("a.csv"), b"previous").unwrap();
        let mut stage = OutputStage::new(dir.path()).unwrap();
        stage.write("a.csv", b"partial").unwrap();
        let slot = stage.quarantine().unwrap();
        // Previous results untouched; partial preserved in quarantine.
        assert_eq!(std::fs::read(dir.path().join("a.csv")).unwrap(), b"previous");
        assert_eq!(std::fs::read(slot.join("a.csv")).unwrap(), b"partial");
    }

    #[test]
    fn config_masking_hides_out_dir() {
        let args: Vec<String> = ["lexdiv", "analyze", "--out", "/tmp/x", "--seed", "3"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        assert_eq!(
            canonical_config(&args),
            "lexdiv analyze --out <out> --seed 3"
        );
    }
}
