//! Run configuration: flags merged over an optional JSON file, then validated.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use traubdyn::basins::{IterSettings, PlaneSpec};
use traubdyn::{Complexd, Polynomial};

pub const MAX_PX: usize = 8192;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("{0}")]
    Invalid(String),
    #[error("cannot read config {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot parse config {path}: {source}")]
    Parse { path: PathBuf, source: serde_json::Error },
}

fn invalid(msg: impl Into<String>) -> ConfigError {
    ConfigError::Invalid(msg.into())
}

/// A complex number in a config file: `"re,im"`, `[re, im]` or a bare real.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum ComplexValue {
    Text(String),
    Pair([f64; 2]),
    Real(f64),
}

impl ComplexValue {
    pub fn resolve(&self) -> Result<Complexd, ConfigError> {
        match self {
            ComplexValue::Text(s) => parse_complex(s),
            ComplexValue::Pair([re, im]) => Ok(Complexd::new(*re, *im)),
            ComplexValue::Real(re) => Ok(Complexd::new(*re, 0.0)),
        }
    }
}

/// A list of complex numbers: `"re,im;re,im"` or a JSON array of values.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum ComplexList {
    Text(String),
    Items(Vec<ComplexValue>),
}

impl ComplexList {
    pub fn resolve(&self) -> Result<Vec<Complexd>, ConfigError> {
        match self {
            ComplexList::Text(s) => parse_complex_list(s),
            ComplexList::Items(v) => v.iter().map(ComplexValue::resolve).collect(),
        }
    }
}

/// Parses `re,im` (or a bare real).
pub fn parse_complex(s: &str) -> Result<Complexd, ConfigError> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |t: &str| {
        t.parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .ok_or_else(|| invalid(format!("`{s}` is not a complex number (expected re,im)")))
    };
    match parts.as_slice() {
        [re] => Ok(Complexd::new(num(re)?, 0.0)),
        [re, im] => Ok(Complexd::new(num(re)?, num(im)?)),
        _ => Err(invalid(format!("`{s}` is not a complex number (expected re,im)"))),
    }
}

/// Parses a `;`-separated list of `re,im` pairs.
pub fn parse_complex_list(s: &str) -> Result<Vec<Complexd>, ConfigError> {
    s.split(';').filter(|t| !t.trim().is_empty()).map(parse_complex).collect()
}

/// Every configurable field, all optional; both the JSON file and the flags
/// produce one of these and the flags win field by field.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub coeffs: Option<ComplexList>,
    pub roots: Option<ComplexList>,
    pub delta: Option<ComplexValue>,
    pub center: Option<ComplexValue>,
    pub width: Option<f64>,
    pub px: Option<usize>,
    pub px_h: Option<usize>,
    pub max_iter: Option<usize>,
    pub root_tol: Option<f64>,
    pub escape_radius: Option<f64>,
    pub cycle_window: Option<usize>,
    pub retry_stalled: Option<bool>,
    pub out: Option<PathBuf>,
    pub workers: Option<usize>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| ConfigError::Read { path: path.to_path_buf(), source })?;
        serde_json::from_str(&text).map_err(|source| ConfigError::Parse { path: path.to_path_buf(), source })
    }

    /// Fields set in `self` take precedence over `base`.
    pub fn over(self, base: RunConfig) -> RunConfig {
        // the polynomial is one choice: a flag for either form replaces both file fields
        let (coeffs, roots) = if self.coeffs.is_some() || self.roots.is_some() {
            (self.coeffs, self.roots)
        } else {
            (base.coeffs, base.roots)
        };
        RunConfig {
            coeffs,
            roots,
            delta: self.delta.or(base.delta),
            center: self.center.or(base.center),
            width: self.width.or(base.width),
            px: self.px.or(base.px),
            px_h: self.px_h.or(base.px_h),
            max_iter: self.max_iter.or(base.max_iter),
            root_tol: self.root_tol.or(base.root_tol),
            escape_radius: self.escape_radius.or(base.escape_radius),
            cycle_window: self.cycle_window.or(base.cycle_window),
            retry_stalled: self.retry_stalled.or(base.retry_stalled),
            out: self.out.or(base.out),
            workers: self.workers.or(base.workers),
        }
    }

    pub fn polynomial(&self) -> Result<PolySource, ConfigError> {
        match (&self.coeffs, &self.roots) {
            (Some(_), Some(_)) => Err(invalid("give either --coeffs or --roots, not both")),
            (None, None) => Err(invalid("a polynomial is required (--coeffs or --roots)")),
            (Some(c), None) => {
                let p = Polynomial::new(c.resolve()?);
                if p.degree().unwrap_or(0) < 2 {
                    return Err(invalid("the polynomial must have degree at least 2"));
                }
                Ok(PolySource::Coeffs(p))
            }
            (None, Some(r)) => {
                let roots = r.resolve()?;
                if roots.len() < 2 {
                    return Err(invalid("at least two roots are required"));
                }
                Ok(PolySource::Roots(roots))
            }
        }
    }

    pub fn delta(&self) -> Result<Complexd, ConfigError> {
        self.delta.as_ref().map_or(Ok(Complexd::new(1.0, 0.0)), ComplexValue::resolve)
    }

    pub fn plane(&self, default_center: Complexd, default_width: f64) -> Result<PlaneSpec, ConfigError> {
        let center = self.center.as_ref().map_or(Ok(default_center), ComplexValue::resolve)?;
        let width = self.width.unwrap_or(default_width);
        if !(width > 0.0 && width.is_finite()) {
            return Err(invalid(format!("width must be positive, got {width}")));
        }
        let px_w = self.px.unwrap_or(400);
        let px_h = self.px_h.unwrap_or(px_w);
        for (name, v) in [("px", px_w), ("px-h", px_h)] {
            if v == 0 || v > MAX_PX {
                return Err(invalid(format!("{name} must be between 1 and {MAX_PX}, got {v}")));
            }
        }
        Ok(PlaneSpec::new(center, width, px_w, px_h))
    }

    pub fn iter_settings(&self, base: IterSettings) -> Result<IterSettings, ConfigError> {
        let s = IterSettings {
            max_iter: self.max_iter.unwrap_or(base.max_iter),
            root_tol: self.root_tol.unwrap_or(base.root_tol),
            escape_radius: self.escape_radius.unwrap_or(base.escape_radius),
            cycle_window: self.cycle_window.unwrap_or(base.cycle_window),
            retry_stalled: self.retry_stalled.unwrap_or(base.retry_stalled),
        };
        s.validate().map_err(invalid)?;
        Ok(s)
    }

    pub fn workers(&self) -> Result<Option<usize>, ConfigError> {
        match self.workers {
            Some(0) => Err(invalid("workers must be at least 1")),
            w => Ok(w),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PolySource {
    Coeffs(Polynomial),
    Roots(Vec<Complexd>),
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complexd {
        Complexd::new(re, im)
    }

    #[test]
    fn complex_syntax() {
        assert_eq!(parse_complex("1,-2.5").unwrap(), c(1.0, -2.5));
        assert_eq!(parse_complex(" -0.5 , 0 ").unwrap(), c(-0.5, 0.0));
        assert_eq!(parse_complex("3").unwrap(), c(3.0, 0.0));
        assert!(parse_complex("1,2,3").is_err());
        assert!(parse_complex("nan,0").is_err());
        assert!(parse_complex("").is_err());
        assert_eq!(parse_complex_list("1,0;0,1;").unwrap(), vec![c(1.0, 0.0), c(0.0, 1.0)]);
    }

    #[test]
    fn json_forms_and_precedence() {
        let file: RunConfig = serde_json::from_str(
            r#"{"roots": [[1, 0], "0,1", -1], "delta": "0.5,0", "width": 3, "px": 10}"#,
        )
        .unwrap();
        assert_eq!(
            file.polynomial().unwrap(),
            PolySource::Roots(vec![c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0)])
        );
        let flags = RunConfig { width: Some(5.0), coeffs: Some(ComplexList::Text("-1;0;1".into())), ..Default::default() };
        let merged = flags.over(file);
        assert_eq!(merged.width, Some(5.0));
        assert_eq!(merged.px, Some(10));
        assert_eq!(merged.delta().unwrap(), c(0.5, 0.0));
        assert!(matches!(merged.polynomial().unwrap(), PolySource::Coeffs(_)));
        assert!(serde_json::from_str::<RunConfig>(r#"{"colour": 1}"#).is_err());
    }

    #[test]
    fn validation() {
        let bad_width = RunConfig { width: Some(-1.0), ..Default::default() };
        assert!(bad_width.plane(c(0.0, 0.0), 4.0).is_err());
        let huge = RunConfig { px: Some(MAX_PX + 1), ..Default::default() };
        assert!(huge.plane(c(0.0, 0.0), 4.0).is_err());
        let ok = RunConfig { px: Some(MAX_PX), px_h: Some(3), ..Default::default() };
        let spec = ok.plane(c(0.0, 0.0), 4.0).unwrap();
        assert_eq!((spec.px_w, spec.px_h), (MAX_PX, 3));
        let both = RunConfig {
            roots: Some(ComplexList::Text("1;2".into())),
            coeffs: Some(ComplexList::Text("1;2;3".into())),
            ..Default::default()
        };
        assert!(both.polynomial().is_err());
        assert!(RunConfig::default().polynomial().is_err());
        let linear = RunConfig { coeffs: Some(ComplexList::Text("1;2".into())), ..Default::default() };
        assert!(linear.polynomial().is_err());
        let zero_iter = RunConfig { max_iter: Some(0), ..Default::default() };
        assert!(zero_iter.iter_settings(IterSettings::default()).is_err());
        assert!(RunConfig { workers: Some(0), ..Default::default() }.workers().is_err());
    }
}
