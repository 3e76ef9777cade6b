//! Run configuration: a TOML file whose keys mirror the command-line
//! flags.  Flags win where both are given; unknown keys are rejected.

use crate::RunError;
use num::BigRational;
use sceff_core::scalar::parse_rational;
use serde::Deserialize;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: Option<String>,
    pub order: Option<u32>,
    pub shape: Option<String>,
    /// Periodic cell bound, `WxH`.
    pub cells: Option<String>,
    /// Field window `[lo, hi]`, exact rationals.
    pub window: Option<[String; 2]>,
    /// Hopping sample list for the scaling study, exact rationals.
    pub samples: Option<Vec<String>>,
    pub grid_points: Option<usize>,
    pub beta: Option<f64>,
    pub out_dir: Option<PathBuf>,
    /// Exact parameter bindings, `name = "p/q"`.
    #[serde(default)]
    pub params: BTreeMap<String, String>,
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> Result<RunConfig, RunError> {
        let Some(path) = path else {
            return Ok(RunConfig::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| RunError::Config(format!("{}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| RunError::Config(format!("{}: {e}", path.display())))
    }

    /// The binding of one parameter, command-line overrides first.
    pub fn param(&self, overrides: &BTreeMap<String, String>, name: &str) -> Option<String> {
        overrides
            .get(name)
            .or_else(|| self.params.get(name))
            .cloned()
    }
}

/// Parses an exact rational, tagging errors with the parameter name.
pub fn parse_rat(name: &str, s: &str) -> Result<BigRational, RunError> {
    parse_rational(s).map_err(|_| RunError::Config(format!("{name}: {s:?} is not a rational p/q")))
}

/// Splits repeated `name=p/q` bindings into a map, validating eagerly.
pub fn parse_bindings(pairs: &[String]) -> Result<BTreeMap<String, String>, RunError> {
    let mut map = BTreeMap::new();
    for pair in pairs {
        let Some((name, value)) = pair.split_once('=') else {
            return Err(RunError::Config(format!(
                "binding {pair:?} is not of the form name=p/q"
            )));
        };
        let (name, value) = (name.trim(), value.trim());
        parse_rat(name, value)?;
        map.insert(name.to_string(), value.to_string());
    }
    Ok(map)
}

/// Parses a `WxH` cell bound.
pub fn parse_cells(s: &str) -> Result<(usize, usize), RunError> {
    let bad = || RunError::Config(format!("cells {s:?} is not of the form WxH"));
    let (w, h) = s.split_once('x').ok_or_else(bad)?;
    let w: usize = w.trim().parse().map_err(|_| bad())?;
    let h: usize = h.trim().parse().map_err(|_| bad())?;
    if w == 0 || h == 0 {
        return Err(bad());
    }
    Ok((w, h))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bindings_split_and_validate() {
        let map = parse_bindings(&["t = 1/10".into(), "U=7".into()]).unwrap();
        assert_eq!(map["t"], "1/10");
        assert_eq!(map["U"], "7");
        assert!(parse_bindings(&["t:1/10".into()]).is_err());
        assert!(parse_bindings(&["t=ten".into()]).is_err());
    }

    #[test]
    fn cell_bounds_parse_as_width_by_height() {
        assert_eq!(parse_cells("4x4").unwrap(), (4, 4));
        assert_eq!(parse_cells(" 4 x 2 ").unwrap(), (4, 2));
        assert!(parse_cells("0x4").is_err());
        assert!(parse_cells("4").is_err());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = toml::from_str::<RunConfig>("modle = \"falicov-kimball\"").unwrap_err();
        assert!(err.to_string().contains("modle"));
    }

    #[test]
    fn flags_override_file_params() {
        let cfg: RunConfig = toml::from_str("[params]\nt = \"1/10\"\nU = \"7\"").unwrap();
        let over = parse_bindings(&["t=1/5".into()]).unwrap();
        assert_eq!(cfg.param(&over, "t").unwrap(), "1/5");
        assert_eq!(cfg.param(&over, "U").unwrap(), "7");
        assert_eq!(cfg.param(&over, "h"), None);
    }
}
