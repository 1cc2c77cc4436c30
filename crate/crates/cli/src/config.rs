//! Run configuration: an optional `key = value` file with sections per
//! command, overridden by command-line flags.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{path}:{line}: {message}")]
    Syntax { path: String, line: usize, message: String },

    #[error("cannot read {0}: {1}")]
    Read(String, String),

    #[error("{0}")]
    Usage(String),
}

/// A value together with the config line it came from, for error positions.
#[derive(Clone, Debug, PartialEq)]
pub struct Entry {
    pub value: String,
    pub line: usize,
    /// 1-based column where the value starts.
    pub column: usize,
}

/// Parsed file: section name to key/value pairs. Keys before any header
/// are an error.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ConfigFile {
    pub path: String,
    pub sections: BTreeMap<String, BTreeMap<String, Entry>>,
}

const SECTIONS: [&str; 6] = ["model", "derive", "classify", "constraints", "simulate", "verify"];
const MODEL_KEYS: [&str; 5] = ["name", "n", "k", "constants", "lagrangian"];
const NUMERIC_KEYS: [&str; 10] = [
    "N",
    "dt",
    "T",
    "gamma",
    "c2",
    "m2",
    "gamma0",
    "mu0",
    "snapshot_every",
    "out",
];

impl ConfigFile {
    pub fn load(path: &Path) -> Result<ConfigFile, ConfigError> {
        let text =
            std::fs::read_to_string(path).map_err(|e| ConfigError::Read(path.display().to_string(), e.to_string()))?;
        ConfigFile::parse(&path.display().to_string(), &text)
    }

    pub fn parse(path: &str, text: &str) -> Result<ConfigFile, ConfigError> {
        let mut file = ConfigFile {
            path: path.to_string(),
            sections: BTreeMap::new(),
        };
        let mut current: Option<String> = None;
        for (n, raw) in text.lines().enumerate() {
            let line = n + 1;
            let err = |message: String| ConfigError::Syntax {
                path: path.to_string(),
                line,
                message,
            };
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            if let Some(rest) = trimmed.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| err("unterminated section header".into()))?
                    .trim();
                if !SECTIONS.contains(&name) {
                    return Err(err(format!("unknown section [{name}]")));
                }
                file.sections.entry(name.to_string()).or_default();
                current = Some(name.to_string());
                continue;
            }
            let (key, rest) = raw
                .split_once('=')
                .ok_or_else(|| err("expected `key = value`".into()))?;
            let (key, value) = (key.trim(), rest.trim());
            let column = raw.len() - rest.trim_start().len();
            let column = raw[..column].chars().count() + 1;
            let section = current
                .as_ref()
                .ok_or_else(|| err(format!("`{key}` outside any section")))?;
            let allowed: &[&str] = if section == "model" {
                &MODEL_KEYS
            } else if section == "constraints" {
                &["max_iterations", "out"]
            } else if section == "simulate" || section == "verify" {
                &NUMERIC_KEYS
            } else {
                &["out"]
            };
            if !allowed.contains(&key) {
                return Err(err(format!("unknown key `{key}` in [{section}]")));
            }
            let table = file.sections.get_mut(section).expect("section registered");
            if table.contains_key(key) {
                return Err(err(format!("duplicate key `{key}` in [{section}]")));
            }
            table.insert(
                key.to_string(),
                Entry {
                    value: value.to_string(),
                    line,
                    column,
                },
            );
        }
        Ok(file)
    }

    pub fn get(&self, section: &str, key: &str) -> Option<&Entry> {
        self.sections.get(section).and_then(|s| s.get(key))
    }

    pub fn parsed<T: std::str::FromStr>(&self, section: &str, key: &str) -> Result<Option<T>, ConfigError> {
        match self.get(section, key) {
            None => Ok(None),
            Some(e) => e.value.parse().map(Some).map_err(|_| ConfigError::Syntax {
                path: self.path.clone(),
                line: e.line,
                message: format!("cannot parse `{}` for `{key}`", e.value),
            }),
        }
    }
}

/// Lagrangian given as text over the generic chart `q_i, v_i_a, s_a`.
#[derive(Clone, Debug, PartialEq)]
pub struct InlineModel {
    pub n: usize,
    pub k: usize,
    pub constants: Vec<String>,
    pub lagrangian: String,
    /// Line and column of the Lagrangian in the config file, if it came
    /// from one.
    pub position: Option<(usize, usize)>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ModelSource {
    Builtin(String),
    Inline(InlineModel),
}

/// Numeric parameters; `None` falls back to the defaults of the suite.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Numeric {
    pub cells: Option<usize>,
    pub dt: Option<f64>,
    pub t_end: Option<f64>,
    pub gamma: Option<f64>,
    pub c2: Option<f64>,
    pub m2: Option<f64>,
    pub gamma0: Option<f64>,
    pub mu0: Option<f64>,
    pub snapshot_every: Option<usize>,
}

impl Numeric {
    /// Fills every unset field from `other`.
    pub fn or(self, other: Numeric) -> Numeric {
        Numeric {
            cells: self.cells.or(other.cells),
            dt: self.dt.or(other.dt),
            t_end: self.t_end.or(other.t_end),
            gamma: self.gamma.or(other.gamma),
            c2: self.c2.or(other.c2),
            m2: self.m2.or(other.m2),
            gamma0: self.gamma0.or(other.gamma0),
            mu0: self.mu0.or(other.mu0),
            snapshot_every: self.snapshot_every.or(other.snapshot_every),
        }
    }

    fn from_file(file: &ConfigFile, section: &str) -> Result<Numeric, ConfigError> {
        Ok(Numeric {
            cells: file.parsed(section, "N")?,
            dt: file.parsed(section, "dt")?,
            t_end: file.parsed(section, "T")?,
            gamma: file.parsed(section, "gamma")?,
            c2: file.parsed(section, "c2")?,
            m2: file.parsed(section, "m2")?,
            gamma0: file.parsed(section, "gamma0")?,
            mu0: file.parsed(section, "mu0")?,
            snapshot_every: file.parsed(section, "snapshot_every")?,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Command {
    Derive,
    Classify,
    Constraints { max_iterations: Option<usize> },
    Simulate(Numeric),
    Verify(Numeric),
}

impl Command {
    pub fn section(&self) -> &'static str {
        match self {
            Command::Derive => "derive",
            Command::Classify => "classify",
            Command::Constraints { .. } => "constraints",
            Command::Simulate(_) => "simulate",
            Command::Verify(_) => "verify",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub model: ModelSource,
    pub command: Command,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    /// Merges flags over the file. `model` is the positional or `--model`
    /// name from the command line.
    pub fn resolve(
        command: Command,
        model: Option<String>,
        out: Option<PathBuf>,
        file: Option<&ConfigFile>,
    ) -> Result<RunConfig, ConfigError> {
        let section = command.section();
        let command = match (command, file) {
            (Command::Simulate(flags), Some(f)) => Command::Simulate(flags.or(Numeric::from_file(f, section)?)),
            (Command::Verify(flags), Some(f)) => Command::Verify(flags.or(Numeric::from_file(f, section)?)),
            (Command::Constraints { max_iterations }, Some(f)) => Command::Constraints {
                max_iterations: max_iterations.or(f.parsed(section, "max_iterations")?),
            },
            (c, _) => c,
        };
        let out = out.or_else(|| {
            file.and_then(|f| f.get(section, "out"))
                .map(|e| PathBuf::from(&e.value))
        });
        let model = match (model, file) {
            (Some(name), _) => ModelSource::Builtin(name),
            (None, Some(f)) => model_from_file(f)?,
            (None, None) => {
                return Err(ConfigError::Usage(
                    "no model given; pass a model name or --config".into(),
                ))
            }
        };
        Ok(RunConfig { model, command, out })
    }
}

fn model_from_file(file: &ConfigFile) -> Result<ModelSource, ConfigError> {
    if let Some(e) = file.get("model", "name") {
        if file.get("model", "lagrangian").is_some() {
            return Err(ConfigError::Syntax {
                path: file.path.clone(),
                line: e.line,
                message: "give either `name` or `lagrangian`, not both".into(),
            });
        }
        return Ok(ModelSource::Builtin(e.value.clone()));
    }
    let lagrangian = file
        .get("model", "lagrangian")
        .ok_or_else(|| ConfigError::Usage(format!("{}: [model] needs `name` or `lagrangian`", file.path)))?;
    let need = |key: &str| -> Result<usize, ConfigError> {
        file.parsed("model", key)?
            .ok_or_else(|| ConfigError::Usage(format!("{}: inline model needs `{key}`", file.path)))
    };
    let constants = file
        .get("model", "constants")
        .map(|e| {
            e.value
                .split(',')
                .map(|s| s.trim().to_string())
                .filter(|s| !s.is_empty())
                .collect()
        })
        .unwrap_or_default();
    Ok(ModelSource::Inline(InlineModel {
        n: need("n")?,
        k: need("k")?,
        constants,
        lagrangian: lagrangian.value.clone(),
        position: Some((lagrangian.line, lagrangian.column)),
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    const TEXT: &str = "\
# comment
[model]
n = 1
k = 2
constants = ρ, τ
lagrangian = 1/2*ρ*v_1_2^2 - 1/2*τ*v_1_1^2

[simulate]
N = 200
gamma = 0.3
";

    #[test]
    fn parses_sections() {
        let f = ConfigFile::parse("t.cfg", TEXT).unwrap();
        assert_eq!(f.get("model", "k").unwrap().value, "2");
        let l = f.get("model", "lagrangian").unwrap();
        assert_eq!((l.line, l.column), (6, 14));
        assert_eq!(f.parsed::<usize>("simulate", "N").unwrap(), Some(200));
    }

    #[test]
    fn flags_override_file() {
        let f = ConfigFile::parse("t.cfg", TEXT).unwrap();
        let flags = Numeric {
            gamma: Some(0.1),
            ..Numeric::default()
        };
        let rc = RunConfig::resolve(Command::Simulate(flags), None, None, Some(&f)).unwrap();
        let Command::Simulate(n) = rc.command else { panic!() };
        assert_eq!(n.gamma, Some(0.1));
        assert_eq!(n.cells, Some(200));
        let ModelSource::Inline(m) = rc.model else { panic!() };
        assert_eq!(m.constants, vec!["ρ".to_string(), "τ".to_string()]);
    }

    #[test]
    fn rejects_bad_lines() {
        for (bad, line) in [
            ("x = 1", 1),
            ("[model]\nfoo = 1", 2),
            ("[nope]", 1),
            ("[model]\nn 1", 2),
        ] {
            match ConfigFile::parse("b.cfg", bad) {
                Err(ConfigError::Syntax { line: l, .. }) => assert_eq!(l, line, "{bad}"),
                other => panic!("{bad}: {other:?}"),
            }
        }
    }
}
