//! Flat `key = value` configuration. A `[section]` line prefixes the keys
//! that follow it with `section.`; `#` starts a comment.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

use crate::error::LabError;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Config {
    entries: BTreeMap<String, String>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Self, LabError> {
        let mut entries = BTreeMap::new();
        let mut section = String::new();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .map(str::trim)
                    .filter(|s| !s.is_empty() && !s.contains(char::is_whitespace))
                    .ok_or_else(|| LabError::config(None, format!("line {}: malformed section header", no + 1)))?;
                section = format!("{name}.");
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| LabError::config(None, format!("line {}: expected key = value", no + 1)))?;
            let key = format!("{section}{}", k.trim());
            if k.trim().is_empty() || key.contains(char::is_whitespace) {
                return Err(LabError::config(None, format!("line {}: bad key {:?}", no + 1, k.trim())));
            }
            if entries.insert(key.clone(), v.trim().to_string()).is_some() {
                return Err(LabError::config(Some(&key), format!("line {}: duplicate key", no + 1)));
            }
        }
        Ok(Config { entries })
    }

    pub fn load(path: &Path) -> Result<Self, LabError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| LabError::config(None, format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn set(&mut self, key: &str, value: impl Display) {
        self.entries.insert(key.to_string(), value.to_string());
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    pub fn entries(&self) -> &BTreeMap<String, String> {
        &self.entries
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, LabError>
    where
        T::Err: Display,
    {
        self.raw(key)
            .map(|v| v.parse::<T>().map_err(|e| LabError::config(Some(key), format!("cannot parse {v:?}: {e}"))))
            .transpose()
    }

    pub fn get_or<T: FromStr>(&self, key: &str, default: T) -> Result<T, LabError>
    where
        T::Err: Display,
    {
        Ok(self.get(key)?.unwrap_or(default))
    }

    pub fn require<T: FromStr>(&self, key: &str) -> Result<T, LabError>
    where
        T::Err: Display,
    {
        self.get(key)?.ok_or_else(|| LabError::config(Some(key), "missing required key"))
    }

    /// Comma-separated list.
    pub fn list<T: FromStr>(&self, key: &str) -> Result<Option<Vec<T>>, LabError>
    where
        T::Err: Display,
    {
        self.raw(key)
            .map(|v| {
                v.split(',')
                    .map(|s| {
                        s.trim()
                            .parse::<T>()
                            .map_err(|e| LabError::config(Some(key), format!("cannot parse {s:?}: {e}")))
                    })
                    .collect()
            })
            .transpose()
    }

    /// `lo, hi` with `lo < hi`.
    pub fn pair(&self, key: &str) -> Result<Option<(f64, f64)>, LabError> {
        match self.list::<f64>(key)? {
            None => Ok(None),
            Some(v) if v.len() == 2 && v[0] < v[1] => Ok(Some((v[0], v[1]))),
            Some(_) => Err(LabError::config(Some(key), "expected `lo, hi` with lo < hi")),
        }
    }

    /// Integer ranges `a..b` (inclusive) or lists.
    pub fn indices(&self, key: &str) -> Result<Option<Vec<usize>>, LabError> {
        match self.raw(key) {
            None => Ok(None),
            Some(v) => match v.split_once("..") {
                Some((a, b)) => {
                    let parse = |s: &str| {
                        s.trim()
                            .parse::<usize>()
                            .map_err(|e| LabError::config(Some(key), format!("cannot parse {s:?}: {e}")))
                    };
                    let (a, b) = (parse(a)?, parse(b)?);
                    if a > b {
                        return Err(LabError::config(Some(key), "empty range"));
                    }
                    Ok(Some((a..=b).collect()))
                }
                None => self.list(key),
            },
        }
    }

    /// `key = value` lines in key order.
    pub fn echo(&self) -> String {
        self.entries.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn sections_prefix_keys() {
        let c = Config::parse("route = both # comment\n[schedule]\nq = 24\n\n[f]\ndomain = -1, 1\n").unwrap();
        assert_eq!(c.raw("route"), Some("both"));
        assert_eq!(c.get::<f64>("schedule.q").unwrap(), Some(24.0));
        assert_eq!(c.pair("f.domain").unwrap(), Some((-1.0, 1.0)));
        assert_eq!(c.indices("missing").unwrap(), None);
    }

    #[test]
    fn errors_name_the_field() {
        let c = Config::parse("grid = many").unwrap();
        let e = c.get::<usize>("grid").unwrap_err();
        assert_eq!(e.field(), Some("grid"));
        assert_eq!(e.exit_code(), 2);
        assert!(Config::parse("no equals sign").is_err());
        assert!(Config::parse("[open").is_err());
        assert!(Config::parse("a = 1\na = 2").is_err());
        assert_eq!(Config::parse("x = 2, 1").unwrap().pair("x").unwrap_err().field(), Some("x"));
        assert_eq!(Config::parse("ks = 1..5").unwrap().indices("ks").unwrap(), Some(vec![1, 2, 3, 4, 5]));
    }

    proptest! {
        #[test]
        fn echo_round_trips(keys in proptest::collection::btree_map("[a-z]{1,6}(\\.[a-z]{1,4})?", "[a-z0-9.,:-]{0,12}", 0..12)) {
            let mut c = Config::default();
            for (k, v) in &keys {
                c.set(k, v);
            }
            prop_assert_eq!(Config::parse(&c.echo()).unwrap(), c);
        }
    }
}
