//! `key = value` configuration files overriding the default caps.

use std::path::{Path, PathBuf};

use img_core::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct Caps {
    pub group_level: usize,
    pub model_level: usize,
    pub disc_level: usize,
    pub prime_bound: u64,
    pub samples: usize,
    pub precision: usize,
    pub seed: u64,
    pub allow_level6: bool,
    pub cache_dir: Option<PathBuf>,
}

impl Default for Caps {
    fn default() -> Self {
        Self {
            group_level: 6,
            model_level: 5,
            disc_level: 4,
            prime_bound: 10_000,
            samples: 20,
            precision: 256,
            seed: 1,
            allow_level6: false,
            cache_dir: None,
        }
    }
}

fn parse_value<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::InvalidArgument(format!("config: bad value {value:?} for {key}")))
}

impl Caps {
    pub fn apply(&mut self, text: &str) -> Result<()> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::InvalidArgument(format!("config line {}: expected key = value", lineno + 1)));
            };
            let (key, value) = (key.trim(), value.trim());
            match key {
                "group_level" => self.group_level = parse_value(key, value)?,
                "model_level" => self.model_level = parse_value(key, value)?,
                "disc_level" => self.disc_level = parse_value(key, value)?,
                "prime_bound" => self.prime_bound = parse_value(key, value)?,
                "samples" => self.samples = parse_value(key, value)?,
                "precision" => self.precision = parse_value(key, value)?,
                "seed" => self.seed = parse_value(key, value)?,
                "allow_level6" => self.allow_level6 = parse_value(key, value)?,
                "cache_dir" => self.cache_dir = Some(PathBuf::from(value)),
                other => return Err(Error::InvalidArgument(format!("config: unknown key {other:?}"))),
            }
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidArgument(format!("config {}: {e}", path.display())))?;
        let mut caps = Self::default();
        caps.apply(&text)?;
        Ok(caps)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_rejects() {
        let mut c = Caps::default();
        c.apply("# caps\nmodel_level = 4\nallow_level6=true  # why not\n\n").unwrap();
        assert_eq!(c.model_level, 4);
        assert!(c.allow_level6);
        assert!(c.apply("bogus = 1").is_err());
        assert!(c.apply("model_level 4").is_err());
        assert!(c.apply("seed = -1").is_err());
    }
}
