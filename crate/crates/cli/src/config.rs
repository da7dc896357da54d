//! Plain `key = value` config files for engine parameters.
//!
//! Keys mirror the long flag names; explicitly passed flags win over the
//! file. Lines starting with `#` (or trailing `#` fragments) are comments.

use std::collections::HashMap;

use anyhow::{bail, Context, Result};

#[derive(Debug, Default, Clone)]
pub struct Config {
    entries: HashMap<String, String>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Config> {
        let mut entries = HashMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = match raw.find('#') {
                Some(i) => &raw[..i],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                bail!("config line {}: expected `key = value`, got {raw:?}", lineno + 1);
            };
            let key = key.trim();
            let value = value.trim();
            if key.is_empty() || value.is_empty() {
                bail!("config line {}: empty key or value", lineno + 1);
            }
            entries.insert(key.to_string(), value.to_string());
        }
        Ok(Config { entries })
    }

    pub fn load(path: &std::path::Path) -> Result<Config> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        Config::parse(&text)
    }

    /// Parsed value for `key`, if present.
    pub fn get<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        match self.entries.get(key) {
            None => Ok(None),
            Some(raw) => match raw.parse::<T>() {
                Ok(v) => Ok(Some(v)),
                Err(e) => bail!("config key {key}: bad value {raw:?}: {e}"),
            },
        }
    }
}

/// Flag value if given, else config value, else the built-in default.
pub fn resolve<T: std::str::FromStr + Copy>(
    flag: Option<T>,
    config: &Config,
    key: &str,
    default: T,
) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    if let Some(v) = flag {
        return Ok(v);
    }
    Ok(config.get::<T>(key)?.unwrap_or(default))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_whitespace() {
        let config = Config::parse("# full comment\n tol = 1e-8 # trailing\n\ndecay=0.1\n").unwrap();
        assert_eq!(config.get::<f64>("tol").unwrap(), Some(1e-8));
        assert_eq!(config.get::<f64>("decay").unwrap(), Some(0.1));
        assert_eq!(config.get::<f64>("missing").unwrap(), None);
    }

    #[test]
    fn rejects_malformed_lines_and_values() {
        assert!(Config::parse("just words\n").is_err());
        let config = Config::parse("tol = abc\n").unwrap();
        assert!(config.get::<f64>("tol").is_err());
    }

    #[test]
    fn flags_win_over_config() {
        let config = Config::parse("tol = 1e-8\n").unwrap();
        assert_eq!(resolve(Some(0.5), &config, "tol", 1e-10).unwrap(), 0.5);
        assert_eq!(resolve(None, &config, "tol", 1e-10).unwrap(), 1e-8);
        assert_eq!(resolve::<f64>(None, &config, "other", 1e-10).unwrap(), 1e-10);
    }
}
