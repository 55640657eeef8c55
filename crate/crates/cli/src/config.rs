//! Line-oriented `key = value` run configuration with sections.
//!
//! The format is deliberately parser-free: `[section]` headers, one
//! `key = value` per line, `#` comments. Every key is validated against the
//! schema below; unknown sections or keys are hard usage errors. All
//! defaults are listed here and printed by `snlab config --defaults`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

/// Schema: (section, key, default, description).
pub const SCHEMA: &[(&str, &str, &str, &str)] = &[
    ("material", "a", "1.0", "normal-material coupling a > 0"),
    ("material", "m", "10.0", "conductivity ratio m > 0"),
    ("alpha", "policy", "at_alpha0", "explicit | at_alpha0 | offset"),
    ("alpha", "value", "0.6", "alpha for policy = explicit"),
    ("alpha", "offset", "0.0", "alpha = alpha0 + offset for policy = offset"),
    ("grid1d", "lo", "-12.0", "left end of the 1D model grid"),
    ("grid1d", "hi", "12.0", "right end of the 1D model grid"),
    ("grid1d", "h", "0.0025", "1D grid spacing (interface snapped to a node)"),
    ("band", "xi_min", "-2.0", "band scan start"),
    ("band", "xi_max", "6.0", "band scan stop"),
    ("band", "xi_step", "0.05", "band scan step"),
    ("geometry", "kind", "concentric_discs", "concentric_discs | ellipse_pair"),
    ("geometry", "r_in", "1.0", "inner disc radius"),
    ("geometry", "r_out", "1.5", "outer disc radius"),
    ("geometry", "inner_a", "0.8", "inner ellipse semi-axis x"),
    ("geometry", "inner_b", "0.5", "inner ellipse semi-axis y"),
    ("geometry", "outer_a", "1.3", "outer ellipse semi-axis x"),
    ("geometry", "outer_b", "1.0", "outer ellipse semi-axis y"),
    ("planar", "points_per_unit", "48.0", "FD grid resolution"),
    ("planar", "fd_tol", "1e-9", "FD eigensolver relative tolerance"),
    ("planar", "certify", "true", "run the band-inertia certificate"),
    ("planar", "fourier_h_tau", "0.005", "radial spacing in the layer variable"),
    ("planar", "fourier_rho_min", "0.5", "inner Dirichlet truncation radius"),
    ("planar", "fourier_window", "12.0", "angular-mode window half-width"),
    ("fields", "kappa", "30.0", "Ginzburg-Landau parameter for field scans"),
    ("fields", "path", "auto", "auto | fourier | fd"),
    ("fields", "h_points", "12", "H-grid points for classify"),
    ("expansion", "b_lo", "400.0", "expansion fit range start"),
    ("expansion", "b_hi", "2000.0", "expansion fit range end"),
    ("expansion", "points", "320", "expansion fit B samples"),
    ("monotonicity", "b_lo", "500.0", "disc derivative scan start"),
    ("monotonicity", "b_hi", "3000.0", "disc derivative scan end"),
    ("monotonicity", "points", "18", "disc derivative samples"),
    ("gl", "nodes_per_side", "128", "GL grid nodes across the box"),
    ("gl", "tol_factor", "1e-8", "gradient tolerance per masked node"),
    ("gl", "max_iter", "50000", "descent iteration cap"),
    ("gl", "h_field", "6.0", "applied field for gl-minimize"),
    ("gl", "init", "normal_perturbed", "normal_perturbed | meissner"),
    ("run", "seed", "1", "RNG seed for perturbed inits"),
    ("run", "threads", "1", "reserved; execution is single-threaded"),
];

#[derive(Debug, Clone)]
pub struct RunConfig {
    values: BTreeMap<(String, String), String>,
}

#[derive(Debug)]
pub enum ConfigError {
    Usage(String),
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ConfigError::Usage(s) => write!(f, "{s}"),
        }
    }
}

impl RunConfig {
    pub fn defaults() -> RunConfig {
        let mut values = BTreeMap::new();
        for (sec, key, def, _) in SCHEMA {
            values.insert((sec.to_string(), key.to_string()), def.to_string());
        }
        RunConfig { values }
    }

    fn known(section: &str, key: &str) -> bool {
        SCHEMA.iter().any(|(s, k, _, _)| *s == section && *k == key)
    }

    /// Parse a config document on top of the defaults.
    pub fn parse(text: &str) -> Result<RunConfig, ConfigError> {
        let mut cfg = RunConfig::defaults();
        let mut section = String::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[') {
                let name = name
                    .strip_suffix(']')
                    .ok_or_else(|| ConfigError::Usage(format!("line {}: malformed section header '{raw}'", lineno + 1)))?;
                section = name.trim().to_string();
                if !SCHEMA.iter().any(|(s, _, _, _)| *s == section) {
                    return Err(ConfigError::Usage(format!(
                        "line {}: unknown section [{section}]",
                        lineno + 1
                    )));
                }
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                ConfigError::Usage(format!("line {}: expected key = value, got '{raw}'", lineno + 1))
            })?;
            let key = key.trim();
            let value = value.trim();
            if section.is_empty() {
                return Err(ConfigError::Usage(format!(
                    "line {}: key '{key}' before any [section]",
                    lineno + 1
                )));
            }
            if !Self::known(&section, key) {
                return Err(ConfigError::Usage(format!(
                    "line {}: unknown key '{key}' in section [{section}]",
                    lineno + 1
                )));
            }
            cfg.values.insert((section.clone(), key.to_string()), value.to_string());
        }
        Ok(cfg)
    }

    /// Apply one `--set section.key=value` override.
    pub fn set(&mut self, spec: &str) -> Result<(), ConfigError> {
        let (path, value) = spec
            .split_once('=')
            .ok_or_else(|| ConfigError::Usage(format!("--set expects section.key=value, got '{spec}'")))?;
        let (section, key) = path
            .split_once('.')
            .ok_or_else(|| ConfigError::Usage(format!("--set expects section.key=value, got '{spec}'")))?;
        if !Self::known(section, key) {
            return Err(ConfigError::Usage(format!("unknown config key '{section}.{key}'")));
        }
        self.values.insert((section.to_string(), key.to_string()), value.trim().to_string());
        Ok(())
    }

    pub fn get(&self, section: &str, key: &str) -> &str {
        self.values
            .get(&(section.to_string(), key.to_string()))
            .map(|s| s.as_str())
            .unwrap_or_else(|| panic!("schema miss: {section}.{key}"))
    }

    pub fn get_f64(&self, section: &str, key: &str) -> Result<f64, ConfigError> {
        self.get(section, key)
            .parse::<f64>()
            .map_err(|_| ConfigError::Usage(format!("{section}.{key} is not a number: '{}'", self.get(section, key))))
    }

    pub fn get_usize(&self, section: &str, key: &str) -> Result<usize, ConfigError> {
        self.get(section, key)
            .parse::<usize>()
            .map_err(|_| ConfigError::Usage(format!("{section}.{key} is not an integer: '{}'", self.get(section, key))))
    }

    pub fn get_u64(&self, section: &str, key: &str) -> Result<u64, ConfigError> {
        self.get(section, key)
            .parse::<u64>()
            .map_err(|_| ConfigError::Usage(format!("{section}.{key} is not an integer: '{}'", self.get(section, key))))
    }

    pub fn get_bool(&self, section: &str, key: &str) -> Result<bool, ConfigError> {
        match self.get(section, key) {
            "true" => Ok(true),
            "false" => Ok(false),
            other => Err(ConfigError::Usage(format!("{section}.{key} must be true/false, got '{other}'"))),
        }
    }

    /// Canonical text form (sorted), used for hashing into the manifest.
    pub fn canonical(&self) -> String {
        let mut out = String::new();
        for ((s, k), v) in &self.values {
            let _ = writeln!(out, "{s}.{k} = {v}");
        }
        out
    }

    /// Human-readable default listing.
    pub fn describe_defaults() -> String {
        let mut out = String::new();
        let mut last = "";
        for (sec, key, def, desc) in SCHEMA {
            if *sec != last {
                let _ = writeln!(out, "[{sec}]");
                last = sec;
            }
            let _ = writeln!(out, "{key} = {def:<18} # {desc}");
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_cover_schema() {
        let cfg = RunConfig::defaults();
        assert_eq!(cfg.get("material", "a"), "1.0");
        assert_eq!(cfg.get_f64("grid1d", "h").unwrap(), 0.0025);
    }

    #[test]
    fn unknown_key_is_usage_error() {
        let r = RunConfig::parse("[material]\nbogus = 1\n");
        assert!(r.is_err());
        let r = RunConfig::parse("[nosuch]\na = 1\n");
        assert!(r.is_err());
    }

    #[test]
    fn parse_and_override() {
        let mut cfg = RunConfig::parse("[material]\na = 2.5\nm = 7 # comment\n").unwrap();
        assert_eq!(cfg.get_f64("material", "a").unwrap(), 2.5);
        assert_eq!(cfg.get_f64("material", "m").unwrap(), 7.0);
        cfg.set("gl.nodes_per_side=96").unwrap();
        assert_eq!(cfg.get_usize("gl", "nodes_per_side").unwrap(), 96);
        assert!(cfg.set("gl.bogus=1").is_err());
    }
}
