//! Optional `key = value` defaults file. Command-line flags win.
//!
//! ```text
//! # defaults for long scans
//! N = 200000
//! threads = 4
//! threshold = 1000
//! ```

use std::path::Path;

use crate::CliError;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Config {
    pub bound: Option<u64>,
    pub threads: Option<usize>,
    pub threshold: Option<u64>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut cfg = Config::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |msg: &str| CliError::Config(format!("line {}: {msg}: {raw:?}", i + 1));
            let (key, value) = line.split_once('=').ok_or_else(|| bad("expected key = value"))?;
            let value = value.trim();
            match key.trim() {
                "N" | "bound" => cfg.bound = Some(value.parse().map_err(|_| bad("not a nonnegative integer"))?),
                "threads" => cfg.threads = Some(value.parse().map_err(|_| bad("not a positive integer"))?),
                "threshold" => cfg.threshold = Some(value.parse().map_err(|_| bad("not a nonnegative integer"))?),
                _ => return Err(bad("unknown key")),
            }
        }
        if cfg.threads == Some(0) {
            return Err(CliError::Config("threads must be at least 1".to_string()));
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_keys_and_comments() {
        let cfg = Config::parse("# c\nN = 5\n threads=2 # inline\n\nthreshold = 7\n").unwrap();
        assert_eq!(cfg, Config { bound: Some(5), threads: Some(2), threshold: Some(7) });
    }

    #[test]
    fn rejects_garbage() {
        assert!(Config::parse("N 5").is_err());
        assert!(Config::parse("colour = red").is_err());
        assert!(Config::parse("N = -1").is_err());
        assert!(Config::parse("threads = 0").is_err());
    }
}
