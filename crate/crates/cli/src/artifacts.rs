//! Deterministic artifact writers: CSV with a single header row, JSON with
//! numbers at 17 significant digits, and the run manifest.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

/// Format a float with 17 significant digits ('.' decimal separator).
pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".to_string() } else { "-inf".to_string() }
    } else {
        format!("{v:.16e}")
    }
}

/// Ordered JSON writer (insertion order preserved).
pub struct JsonObject {
    buf: String,
    first: bool,
}

impl JsonObject {
    pub fn new() -> JsonObject {
        JsonObject { buf: String::from("{"), first: true }
    }

    fn key(&mut self, k: &str) {
        if !self.first {
            self.buf.push(',');
        }
        self.first = false;
        let _ = write!(self.buf, "\n  \"{k}\": ");
    }

    pub fn num(mut self, k: &str, v: f64) -> Self {
        self.key(k);
        if v.is_finite() {
            let _ = write!(self.buf, "{}", fmt_f64(v));
        } else {
            let _ = write!(self.buf, "\"{}\"", fmt_f64(v));
        }
        self
    }

    pub fn int(mut self, k: &str, v: i64) -> Self {
        self.key(k);
        let _ = write!(self.buf, "{v}");
        self
    }

    pub fn bool(mut self, k: &str, v: bool) -> Self {
        self.key(k);
        let _ = write!(self.buf, "{v}");
        self
    }

    pub fn str(mut self, k: &str, v: &str) -> Self {
        self.key(k);
        let _ = write!(self.buf, "\"{}\"", v.replace('\\', "\\\\").replace('"', "\\\""));
        self
    }

    pub fn raw(mut self, k: &str, v: &str) -> Self {
        self.key(k);
        self.buf.push_str(v);
        self
    }

    pub fn num_array(mut self, k: &str, vs: &[f64]) -> Self {
        self.key(k);
        self.buf.push('[');
        for (i, v) in vs.iter().enumerate() {
            if i > 0 {
                self.buf.push_str(", ");
            }
            let _ = write!(self.buf, "{}", fmt_f64(*v));
        }
        self.buf.push(']');
        self
    }

    pub fn finish(self) -> String {
        let mut buf = self.buf;
        buf.push_str("\n}\n");
        buf
    }
}

impl Default for JsonObject {
    fn default() -> Self {
        Self::new()
    }
}

/// CSV table with one header row.
pub struct CsvTable {
    buf: String,
    columns: usize,
}

impl CsvTable {
    pub fn new(header: &[&str]) -> CsvTable {
        CsvTable { buf: format!("{}\n", header.join(",")), columns: header.len() }
    }

    pub fn row(&mut self, cells: &[String]) {
        assert_eq!(cells.len(), self.columns, "row width mismatch");
        self.buf.push_str(&cells.join(","));
        self.buf.push('\n');
    }

    pub fn row_f64(&mut self, cells: &[f64]) {
        let cells: Vec<String> = cells.iter().map(|v| fmt_f64(*v)).collect();
        self.row(&cells);
    }

    pub fn finish(self) -> String {
        self.buf
    }
}

/// Output directory handle; collects written file names for the manifest.
pub struct OutDir {
    root: PathBuf,
    written: Vec<String>,
}

impl OutDir {
    pub fn create(root: &Path) -> io::Result<OutDir> {
        fs::create_dir_all(root)?;
        Ok(OutDir { root: root.to_path_buf(), written: Vec::new() })
    }

    pub fn write(&mut self, name: &str, content: &str) -> io::Result<()> {
        let path = self.root.join(name);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        fs::write(path, content)?;
        self.written.push(name.to_string());
        Ok(())
    }

    pub fn path(&self) -> &Path {
        &self.root
    }

    /// Write the manifest: inputs hash, version, wall time, warning count.
    /// The wall time makes this file non-reproducible by design; byte-level
    /// determinism applies to every other artifact.
    pub fn manifest(
        &mut self,
        command: &str,
        config_canonical: &str,
        wall_time_s: f64,
        warnings: usize,
    ) -> io::Result<()> {
        let mut hasher = Sha256::new();
        hasher.update(command.as_bytes());
        hasher.update(config_canonical.as_bytes());
        let hash = hex::encode(hasher.finalize());
        let mut files = self.written.clone();
        files.sort();
        let files_json = format!(
            "[{}]",
            files.iter().map(|f| format!("\"{f}\"")).collect::<Vec<_>>().join(", ")
        );
        let json = JsonObject::new()
            .str("command", command)
            .str("inputs_sha256", &hash)
            .str("version", env!("CARGO_PKG_VERSION"))
            .num("wall_time_s", wall_time_s)
            .int("warnings", warnings as i64)
            .raw("artifacts", &files_json)
            .finish();
        let path = self.root.join("manifest.json");
        fs::write(path, json)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_formatting_17_digits() {
        assert_eq!(fmt_f64(0.5901060631), "5.9010606310000001e-1");
        assert_eq!(fmt_f64(1.0), "1.0000000000000000e0");
        assert_eq!(fmt_f64(f64::NAN), "nan");
    }

    #[test]
    fn json_object_shape() {
        let s = JsonObject::new().num("x", 1.5).int("n", 3).bool("ok", true).str("s", "a\"b").finish();
        assert!(s.contains("\"x\": 1.5000000000000000e0"));
        assert!(s.contains("\"n\": 3"));
        assert!(s.contains("\"ok\": true"));
        assert!(s.contains("\\\"b"));
        assert!(s.starts_with('{') && s.ends_with("}\n"));
    }

    #[test]
    fn csv_single_header() {
        let mut t = CsvTable::new(&["a", "b"]);
        t.row_f64(&[1.0, 2.0]);
        let s = t.finish();
        assert_eq!(s.lines().count(), 2);
        assert!(s.starts_with("a,b\n"));
    }
}
