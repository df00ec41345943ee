//! Number formatting, run manifests and artifact writing.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

/// Six significant digits for terminal output.
pub fn sig6(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let mag = x.abs().log10().floor() as i32;
    if !(-4..6).contains(&mag) {
        return format!("{x:.5e}");
    }
    let decimals = (5 - mag).max(0) as usize;
    format!("{x:.decimals$}")
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub config: serde_json::Value,
    pub seed: Option<u64>,
    pub outputs: Vec<PathBuf>,
    pub version: &'static str,
    pub duration_secs: f64,
}

/// Files produced by one command. Nothing touches the disk until `commit`,
/// so a failing command leaves no partial output.
pub struct Artifacts {
    dir: Option<PathBuf>,
    stem: String,
    files: Vec<(PathBuf, Vec<u8>)>,
}

impl Artifacts {
    pub fn new(dir: Option<&Path>, stem: impl Into<String>) -> Self {
        Self {
            dir: dir.map(Path::to_path_buf),
            stem: stem.into(),
            files: Vec::new(),
        }
    }

    pub fn enabled(&self) -> bool {
        self.dir.is_some()
    }

    pub fn manifest_name(&self) -> String {
        format!("{}.manifest.json", self.stem)
    }

    /// Queues `<stem><suffix>`.
    pub fn add(&mut self, suffix: &str, bytes: Vec<u8>) {
        if let Some(dir) = &self.dir {
            self.files
                .push((dir.join(format!("{}{suffix}", self.stem)), bytes));
        }
    }

    /// Writes every queued file followed by the manifest; returns the paths.
    pub fn commit(
        self,
        command: &str,
        config: serde_json::Value,
        seed: Option<u64>,
        started: Instant,
    ) -> std::io::Result<Vec<PathBuf>> {
        let Some(dir) = &self.dir else {
            return Ok(Vec::new());
        };
        fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        for (path, bytes) in &self.files {
            fs::write(path, bytes)?;
            written.push(path.clone());
        }
        let manifest = RunManifest {
            command: command.to_string(),
            config,
            seed,
            outputs: written.clone(),
            version: env!("CARGO_PKG_VERSION"),
            duration_secs: started.elapsed().as_secs_f64(),
        };
        let path = dir.join(self.manifest_name());
        let json = serde_json::to_vec_pretty(&manifest).map_err(std::io::Error::other)?;
        fs::write(&path, json)?;
        written.push(path);
        Ok(written)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_significant_digits() {
        assert_eq!(sig6(0.595233_1), "0.595233");
        assert_eq!(sig6(1.9185), "1.91850");
        assert_eq!(sig6(-0.190476), "-0.190476");
        assert_eq!(sig6(123456.7), "123457");
        assert_eq!(sig6(1234567.0), "1.23457e6");
        assert_eq!(sig6(0.0), "0");
        assert_eq!(sig6(2.5e-7), "2.50000e-7");
    }
}
