//! Run configuration: a flat INI-like file with the sections `[worldsheet]`,
//! `[grid]`, `[tolerances]` and `[outputs]`.
//!
//! ```text
//! [worldsheet]
//! x_m1 = 1.4142135623730951*cos(t)
//! x_0  = 1.4142135623730951*sin(t)
//! x_1  = cos(s)
//! x_2  = sin(s)
//! s_min = 0
//! s_max = 2*pi
//! t_min = -1
//! t_max = 1
//! arc_length = assume
//!
//! [grid]
//! n_s = 64
//!
//! [outputs]
//! dir = out
//! format = csv
//! ```
//!
//! Numeric values are constant expressions in the embedding grammar; the
//! identifier `pi` is also accepted.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use adsfront::worldsheet::{SheetError, COMPONENT_KEYS};
use adsfront::{parse, ArcLengthMode, ExprError, SampleGrid, Tolerances, Var, WorldSheet};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}, key '{key}': {message}")]
    Key { line: usize, key: String, message: String },
    #[error("line {line}, key '{key}': {source}")]
    Expression {
        line: usize,
        key: String,
        #[source]
        source: ExprError,
    },
    #[error("missing key '{key}' in [{section}]")]
    Missing { section: &'static str, key: &'static str },
    #[error("{0}")]
    Invalid(String),
}

impl ConfigError {
    /// Key the diagnostic refers to, if any.
    pub fn key(&self) -> Option<&str> {
        match self {
            ConfigError::Key { key, .. } | ConfigError::Expression { key, .. } => Some(key),
            ConfigError::Missing { key, .. } => Some(key),
            _ => None,
        }
    }

    pub fn line(&self) -> Option<usize> {
        match self {
            ConfigError::Syntax { line, .. } | ConfigError::Key { line, .. } | ConfigError::Expression { line, .. } => {
                Some(*line)
            }
            _ => None,
        }
    }
}

/// Artifact format.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Obj,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Obj => "obj",
            Format::Json => "json",
        }
    }
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "obj" => Ok(Format::Obj),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format '{other}' (expected csv, obj or json)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WorldSheetConfig {
    pub x_m1: String,
    pub x_0: String,
    pub x_1: String,
    pub x_2: String,
    pub s_min: f64,
    pub s_max: f64,
    pub t_min: f64,
    pub t_max: f64,
    pub arc_length: ArcLengthMode,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridConfig {
    pub n_s: usize,
    pub n_t: usize,
    pub n_mu: usize,
    pub mu_min: f64,
    pub mu_max: f64,
    pub hash_cell: f64,
    pub refine_tol: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OutputConfig {
    pub dir: PathBuf,
    pub formats: Vec<Format>,
}

/// Fully resolved configuration; serializes as the effective config.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub worldsheet: WorldSheetConfig,
    pub grid: GridConfig,
    pub tolerances: Tolerances,
    pub outputs: OutputConfig,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let entries = read_entries(text)?;
        let mut ws: BTreeMap<&str, &Entry> = BTreeMap::new();
        let mut grid_defaults = SampleGrid::default();
        let mut grid_lines: BTreeMap<&'static str, usize> = BTreeMap::new();
        let mut tolerances = Tolerances::default();
        let mut dir = PathBuf::from("out");
        let mut formats = Vec::new();

        for e in &entries {
            match e.section.as_str() {
                "worldsheet" => {
                    const KEYS: [&str; 9] = [
                        "x_m1",
                        "x_0",
                        "x_1",
                        "x_2",
                        "s_min",
                        "s_max",
                        "t_min",
                        "t_max",
                        "arc_length",
                    ];
                    let Some(k) = KEYS.iter().find(|k| **k == e.key) else {
                        return Err(e.error("unknown key in [worldsheet]"));
                    };
                    ws.insert(k, e);
                }
                "grid" => {
                    let (lo, hi) = grid_defaults.mu_range;
                    match e.key.as_str() {
                        "n_s" => grid_defaults.n_s = e.count()?,
                        "n_t" => grid_defaults.n_t = e.count()?,
                        "n_mu" => grid_defaults.n_mu = e.count()?,
                        "mu_min" => grid_defaults.mu_range = (e.number()?, hi),
                        "mu_max" => grid_defaults.mu_range = (lo, e.number()?),
                        "hash_cell" => grid_defaults.hash_cell = e.number()?,
                        "refine_tol" => grid_defaults.refine_tol = e.number()?,
                        _ => return Err(e.error("unknown key in [grid]")),
                    }
                    let key = ["n_s", "n_t", "n_mu", "mu_min", "mu_max", "hash_cell", "refine_tol"]
                        .into_iter()
                        .find(|k| *k == e.key)
                        .unwrap_or("grid");
                    grid_lines.insert(key, e.line);
                }
                "tolerances" => {
                    let value = e.number()?;
                    tolerances.set(&e.key, value).map_err(|err| e.error(&err.to_string()))?;
                }
                "outputs" => match e.key.as_str() {
                    "dir" => dir = PathBuf::from(&e.value),
                    "format" | "formats" => {
                        formats.clear();
                        for part in e.value.split(',').filter(|p| !p.trim().is_empty()) {
                            let f: Format = part.parse().map_err(|m: String| e.error(&m))?;
                            if !formats.contains(&f) {
                                formats.push(f);
                            }
                        }
                    }
                    _ => return Err(e.error("unknown key in [outputs]")),
                },
                other => {
                    return Err(ConfigError::Syntax {
                        line: e.line,
                        message: format!("unknown section [{other}]"),
                    })
                }
            }
        }

        let get = |key: &'static str| -> Result<&Entry, ConfigError> {
            ws.get(key).copied().ok_or(ConfigError::Missing {
                section: "worldsheet",
                key,
            })
        };
        let mut exprs: Vec<String> = Vec::with_capacity(4);
        for key in COMPONENT_KEYS {
            let e = get(key)?;
            parse(&e.value).map_err(|source| ConfigError::Expression {
                line: e.line,
                key: key.to_string(),
                source,
            })?;
            exprs.push(e.value.clone());
        }
        let s_min = get("s_min")?.number()?;
        let s_max = get("s_max")?.number()?;
        let t_min = get("t_min")?.number()?;
        let t_max = get("t_max")?.number()?;
        let arc_length = match ws.get("arc_length") {
            Some(e) => e
                .value
                .parse::<ArcLengthMode>()
                .map_err(|err| e.error(&err.to_string()))?,
            None => ArcLengthMode::Reparametrize,
        };
        if !(s_min < s_max) {
            return Err(get("s_max")?.error("s range must be nonempty"));
        }
        if !(t_min <= t_max) {
            return Err(get("t_max")?.error("t range must satisfy t_min <= t_max"));
        }
        if let Err(err) = grid_defaults.validate() {
            let key = match &err {
                adsfront::tolerances::SettingError::Invalid { name, .. } => name.clone(),
                adsfront::tolerances::SettingError::Unknown(name) => name.clone(),
            };
            let line = grid_lines.get(key.as_str()).copied().unwrap_or(0);
            return Err(ConfigError::Key {
                line,
                key,
                message: err.to_string(),
            });
        }
        if formats.is_empty() {
            formats.push(Format::Csv);
        }
        let [x_m1, x_0, x_1, x_2]: [String; 4] = exprs
            .try_into()
            .map_err(|_| ConfigError::Invalid("components".into()))?;
        Ok(RunConfig {
            worldsheet: WorldSheetConfig {
                x_m1,
                x_0,
                x_1,
                x_2,
                s_min,
                s_max,
                t_min,
                t_max,
                arc_length,
            },
            grid: GridConfig {
                n_s: grid_defaults.n_s,
                n_t: grid_defaults.n_t,
                n_mu: grid_defaults.n_mu,
                mu_min: grid_defaults.mu_range.0,
                mu_max: grid_defaults.mu_range.1,
                hash_cell: grid_defaults.hash_cell,
                refine_tol: grid_defaults.refine_tol,
            },
            tolerances,
            outputs: OutputConfig { dir, formats },
        })
    }

    pub fn sample_grid(&self) -> SampleGrid {
        let g = &self.grid;
        SampleGrid {
            n_s: g.n_s,
            n_t: g.n_t,
            n_mu: g.n_mu,
            mu_range: (g.mu_min, g.mu_max),
            hash_cell: g.hash_cell,
            refine_tol: g.refine_tol,
        }
    }

    pub fn world_sheet(&self) -> Result<WorldSheet, ConfigError> {
        let w = &self.worldsheet;
        WorldSheet::new(
            [&w.x_m1, &w.x_0, &w.x_1, &w.x_2],
            (w.s_min, w.s_max),
            (w.t_min, w.t_max),
            w.arc_length,
        )
        .map_err(|err| match err {
            SheetError::Parse { component, source } => ConfigError::Expression {
                line: 0,
                key: component.to_string(),
                source,
            },
            other => ConfigError::Invalid(other.to_string()),
        })
    }
}

struct Entry {
    line: usize,
    section: String,
    key: String,
    value: String,
}

impl Entry {
    fn error(&self, message: &str) -> ConfigError {
        ConfigError::Key {
            line: self.line,
            key: self.key.clone(),
            message: message.to_string(),
        }
    }

    fn number(&self) -> Result<f64, ConfigError> {
        let text = substitute_pi(&self.value);
        let expr = parse(&text).map_err(|source| ConfigError::Expression {
            line: self.line,
            key: self.key.clone(),
            source,
        })?;
        if expr.depends_on(Var::S) || expr.depends_on(Var::T) {
            return Err(self.error("value must not depend on s or t"));
        }
        let v = expr.eval(0.0, 0.0).map_err(|source| ConfigError::Expression {
            line: self.line,
            key: self.key.clone(),
            source,
        })?;
        if !v.is_finite() {
            return Err(self.error("value is not finite"));
        }
        Ok(v)
    }

    fn count(&self) -> Result<usize, ConfigError> {
        self.value
            .trim()
            .parse::<usize>()
            .map_err(|_| self.error("expected a nonnegative integer"))
    }
}

fn substitute_pi(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            if word == "pi" {
                out.push_str("3.141592653589793");
            } else {
                out.push_str(&word);
            }
        } else {
            out.push(c);
            i += 1;
        }
    }
    out
}

fn read_entries(text: &str) -> Result<Vec<Entry>, ConfigError> {
    let mut section: Option<String> = None;
    let mut out: Vec<Entry> = Vec::new();
    let mut seen: BTreeMap<(String, String), usize> = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') || trimmed.starts_with(';') {
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix('[') {
            let Some(name) = rest.strip_suffix(']') else {
                return Err(ConfigError::Syntax {
                    line,
                    message: "unterminated section header".into(),
                });
            };
            let name = name.trim().to_ascii_lowercase();
            if !matches!(name.as_str(), "worldsheet" | "grid" | "tolerances" | "outputs") {
                return Err(ConfigError::Syntax {
                    line,
                    message: format!("unknown section [{name}]"),
                });
            }
            section = Some(name);
            continue;
        }
        let Some((key, value)) = trimmed.split_once('=') else {
            return Err(ConfigError::Syntax {
                line,
                message: "expected 'key = value'".into(),
            });
        };
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        if key.is_empty() {
            return Err(ConfigError::Syntax {
                line,
                message: "empty key".into(),
            });
        }
        let Some(sec) = section.clone() else {
            return Err(ConfigError::Key {
                line,
                key,
                message: "key outside of any section".into(),
            });
        };
        if let Some(prev) = seen.insert((sec.clone(), key.clone()), line) {
            return Err(ConfigError::Key {
                line,
                key,
                message: format!("duplicate key (first set on line {prev})"),
            });
        }
        out.push(Entry {
            line,
            section: sec,
            key,
            value,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = "[worldsheet]\nx_m1 = 1.4142135623730951*cos(t)\nx_0 = 1.4142135623730951*sin(t)\n\
x_1 = cos(s)\nx_2 = sin(s)\ns_min = 0\ns_max = 2*pi\nt_min = -1\nt_max = 1\narc_length = assume\n";

    #[test]
    fn defaults_are_applied() {
        let c = RunConfig::parse(BASE).unwrap();
        assert_eq!(c.worldsheet.s_max, 2.0 * std::f64::consts::PI);
        assert_eq!(c.sample_grid(), SampleGrid::default());
        assert_eq!(c.tolerances, Tolerances::default());
        assert_eq!(c.outputs.formats, vec![Format::Csv]);
        c.world_sheet().unwrap();
    }

    #[test]
    fn unknown_variable_reports_key() {
        let text = BASE.replace("x_1 = cos(s)", "x_1 = cos(q)");
        let err = RunConfig::parse(&text).unwrap_err();
        assert_eq!(err.key(), Some("x_1"));
        assert_eq!(err.line(), Some(4));
        assert!(matches!(
            err,
            ConfigError::Expression {
                source: ExprError::UnknownVariable { .. },
                ..
            }
        ));
    }

    #[test]
    fn overrides_and_diagnostics() {
        let text = format!(
            "{BASE}[grid]\nn_s = 32\nmu_max = 1/2\n[tolerances]\nkappa_floor = 1e-6\n[outputs]\nformat = obj, json\n"
        );
        let c = RunConfig::parse(&text).unwrap();
        assert_eq!(c.grid.n_s, 32);
        assert_eq!(c.grid.mu_max, 0.5);
        assert_eq!(c.tolerances.kappa_floor, 1e-6);
        assert_eq!(c.outputs.formats, vec![Format::Obj, Format::Json]);

        let bad = format!("{BASE}[tolerances]\nbogus = 1\n");
        assert_eq!(RunConfig::parse(&bad).unwrap_err().key(), Some("bogus"));
        let bad = format!("{BASE}[grid]\nn_s = 1\n");
        assert_eq!(RunConfig::parse(&bad).unwrap_err().key(), Some("n_s"));
        let bad = format!("{BASE}[grid]\nmu_min = s\n");
        assert!(RunConfig::parse(&bad).is_err());
        let bad = BASE.replace("t_max = 1\n", "t_max = 1\nt_max = 2\n");
        assert!(matches!(RunConfig::parse(&bad), Err(ConfigError::Key { line: 10, .. })));
        let bad = BASE.replace("s_min = 0\n", "");
        assert!(matches!(
            RunConfig::parse(&bad),
            Err(ConfigError::Missing { key: "s_min", .. })
        ));
        assert!(matches!(
            RunConfig::parse("x = 1\n"),
            Err(ConfigError::Key { line: 1, .. })
        ));
        assert!(matches!(
            RunConfig::parse("[nope]\n"),
            Err(ConfigError::Syntax { line: 1, .. })
        ));
    }
}
