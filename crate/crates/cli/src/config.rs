//! Run configuration: one JSON document, optionally patched with `key=value` overrides.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Backend {
    Torus,
    Simplicial,
    MappingTorus,
    LieGate,
    LcsCheck,
}

impl Backend {
    pub fn name(self) -> &'static str {
        match self {
            Backend::Torus => "torus",
            Backend::Simplicial => "simplicial",
            Backend::MappingTorus => "mapping_torus",
            Backend::LieGate => "lie_gate",
            Backend::LcsCheck => "lcs_check",
        }
    }
}

/// One Fourier term `amplitude * sin(2 pi k.x)` or `amplitude * cos(2 pi k.x)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Term {
    pub mode: Vec<i32>,
    pub kind: TermKind,
    pub amplitude: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TermKind {
    Sin,
    Cos,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TorusConfig {
    pub dim: usize,
    pub cutoff: usize,
    /// Constant part of the twist in the coordinate coframe.
    pub theta: Vec<f64>,
    #[serde(default)]
    pub potential: Vec<Term>,
    /// Raise the cutoff to the kernel-support radius when a potential needs it.
    #[serde(default = "yes")]
    pub pad: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimplicialConfig {
    /// Bundled complex name or a path to a facet file.
    pub complex: String,
    /// Bundled cocycle name, a path to an edge file, or absent for the trivial system.
    #[serde(default)]
    pub cocycle: Option<String>,
}

/// A twist coefficient: a number, or `"kappa"` for the leaf rate of the model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coefficient {
    Value(f64),
    Symbol(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MappingTorusConfig {
    #[serde(default)]
    pub matrix: Option<[[i64; 2]; 2]>,
    #[serde(default)]
    pub rates: Option<Vec<f64>>,
    #[serde(default)]
    pub leaf_rate: Option<f64>,
    pub cutoff: usize,
    /// Coefficient `c` of the twist `gamma = c dt + df(t)`.
    #[serde(default = "zero_coefficient")]
    pub twist: Coefficient,
    #[serde(default)]
    pub potential: Vec<Term>,
    /// Values of `c` for `scan`; the default grid plus the leaf rate when absent.
    #[serde(default)]
    pub scan: Option<Vec<Coefficient>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LieConfig {
    /// `so3`, `abelian<n>`, or a path to a structure-constant file.
    pub algebra: String,
    #[serde(default)]
    pub scale: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LcsConfig {
    /// `standard` for the coordinate symplectic form, `conformal` for `e^f` times it.
    pub form: String,
    #[serde(default)]
    pub form_potential: Vec<Term>,
    pub theta: Vec<f64>,
    #[serde(default)]
    pub potential: Vec<Term>,
    #[serde(default = "default_grid")]
    pub grid: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default = "default_rank")]
    pub rank: f64,
    /// Identity residuals for constant twists.
    #[serde(default = "default_residual")]
    pub residual: f64,
    /// Identity residuals when the twist or the metric varies in space.
    #[serde(default = "default_loose")]
    pub residual_variable: f64,
    #[serde(default = "default_loose")]
    pub bochner: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            rank: default_rank(),
            residual: default_residual(),
            residual_variable: default_loose(),
            bochner: default_loose(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_dir")]
    pub dir: PathBuf,
    #[serde(default)]
    pub stem: Option<String>,
    #[serde(default = "yes")]
    pub csv: bool,
    /// Wall-clock timings make reports differ between runs, so they are opt-in.
    #[serde(default)]
    pub timings: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            dir: default_dir(),
            stem: None,
            csv: true,
            timings: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub backend: Backend,
    #[serde(default)]
    pub seed: u64,
    /// Worker threads for backends that parallelize; one when absent.
    #[serde(default)]
    pub workers: Option<usize>,
    /// Radius of the mode box on which identities are checked.
    #[serde(default = "default_verify_radius")]
    pub verify_radius: usize,
    /// Random forms used by the Bochner check.
    #[serde(default = "default_forms")]
    pub bochner_forms: usize,
    #[serde(default)]
    pub torus: Option<TorusConfig>,
    #[serde(default)]
    pub simplicial: Option<SimplicialConfig>,
    #[serde(default)]
    pub mapping_torus: Option<MappingTorusConfig>,
    #[serde(default)]
    pub lie_gate: Option<LieConfig>,
    #[serde(default)]
    pub lcs_check: Option<LcsConfig>,
    #[serde(default)]
    pub tolerances: Tolerances,
    /// Stored expectations, resolved relative to the config file.
    #[serde(default)]
    pub golden: Option<PathBuf>,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(skip)]
    pub base_dir: Option<PathBuf>,
}

fn yes() -> bool {
    true
}
fn zero_coefficient() -> Coefficient {
    Coefficient::Value(0.0)
}
fn default_grid() -> usize {
    4
}
fn default_rank() -> f64 {
    twistcohom::calculus::DEFAULT_RANK_TOLERANCE
}
fn default_residual() -> f64 {
    1e-12
}
fn default_loose() -> f64 {
    1e-8
}
fn default_dir() -> PathBuf {
    PathBuf::from("out")
}
fn default_verify_radius() -> usize {
    3
}
fn default_forms() -> usize {
    50
}

/// Sets `path` (dot separated) in a JSON document. The value is read as JSON
/// when it parses and as a string otherwise.
pub fn apply_override(doc: &mut Value, assignment: &str) -> Result<(), CliError> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| CliError::Validation(format!("override `{assignment}` is not key=value")))?;
    let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    let mut node = doc;
    let parts: Vec<&str> = key.split('.').collect();
    for (n, part) in parts.iter().enumerate() {
        if part.is_empty() {
            return Err(CliError::Validation(format!("empty segment in override key `{key}`")));
        }
        if !node.is_object() {
            if node.is_null() {
                *node = Value::Object(Default::default());
            } else {
                return Err(CliError::Validation(format!(
                    "override `{key}` descends into a non-object"
                )));
            }
        }
        let map = node.as_object_mut().expect("checked above");
        if n + 1 == parts.len() {
            map.insert(part.to_string(), value);
            return Ok(());
        }
        node = map.entry(part.to_string()).or_insert(Value::Null);
    }
    Ok(())
}

impl RunConfig {
    pub fn from_value(doc: Value) -> Result<Self, CliError> {
        let config: Self = serde_json::from_value(doc).map_err(|e| CliError::Validation(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_json(text: &str, overrides: &[String]) -> Result<Self, CliError> {
        let mut doc: Value = serde_json::from_str(text).map_err(|e| CliError::Validation(e.to_string()))?;
        for o in overrides {
            apply_override(&mut doc, o)?;
        }
        Self::from_value(doc)
    }

    pub fn load(path: &Path, overrides: &[String]) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Validation(format!("cannot read config {}: {e}", path.display())))?;
        let mut config = Self::from_json(&text, overrides)?;
        config.base_dir = path.parent().map(Path::to_path_buf);
        Ok(config)
    }

    /// Path relative to the config file, unless absolute.
    pub fn resolve(&self, p: &Path) -> PathBuf {
        match &self.base_dir {
            Some(base) if p.is_relative() => base.join(p),
            _ => p.to_path_buf(),
        }
    }

    /// The canonical JSON echo of the config, as stored in reports.
    pub fn echo(&self) -> Value {
        serde_json::to_value(self).expect("config is serializable")
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let invalid = |m: String| Err(CliError::Validation(m));
        let sections = [
            (Backend::Torus, self.torus.is_some()),
            (Backend::Simplicial, self.simplicial.is_some()),
            (Backend::MappingTorus, self.mapping_torus.is_some()),
            (Backend::LieGate, self.lie_gate.is_some()),
            (Backend::LcsCheck, self.lcs_check.is_some()),
        ];
        for (backend, present) in sections {
            if backend == self.backend && !present {
                return invalid(format!(
                    "backend {} needs a `{}` section",
                    backend.name(),
                    backend.name()
                ));
            }
            if backend != self.backend && present {
                return invalid(format!(
                    "section `{}` given but backend is {}",
                    backend.name(),
                    self.backend.name()
                ));
            }
        }
        let t = &self.tolerances;
        for (name, v) in [
            ("rank", t.rank),
            ("residual", t.residual),
            ("residual_variable", t.residual_variable),
            ("bochner", t.bochner),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return invalid(format!("tolerance {name} must be positive, got {v}"));
            }
        }
        if self.verify_radius == 0 {
            return invalid("verify_radius must be at least 1".into());
        }
        if self.workers == Some(0) {
            return invalid("workers must be at least 1".into());
        }
        if let Some(c) = &self.torus {
            if c.cutoff == 0 {
                return invalid("torus.cutoff must be at least 1".into());
            }
            if c.theta.len() != c.dim {
                return invalid(format!(
                    "torus.theta has {} entries for dimension {}",
                    c.theta.len(),
                    c.dim
                ));
            }
            check_terms(&c.potential, c.dim, "torus.potential")?;
        }
        if let Some(c) = &self.mapping_torus {
            if c.cutoff == 0 {
                return invalid("mapping_torus.cutoff must be at least 1".into());
            }
            match (&c.matrix, &c.rates, &c.leaf_rate) {
                (Some(_), None, None) | (None, Some(_), Some(_)) => {}
                _ => return invalid("mapping_torus needs either `matrix` or both `rates` and `leaf_rate`".into()),
            }
            check_terms(&c.potential, 1, "mapping_torus.potential")?;
            for v in std::iter::once(&c.twist).chain(c.scan.iter().flatten()) {
                if let Coefficient::Symbol(s) = v {
                    if s != "kappa" {
                        return invalid(format!(
                            "unknown twist coefficient `{s}` (expected a number or \"kappa\")"
                        ));
                    }
                }
            }
        }
        if let Some(c) = &self.lcs_check {
            if c.theta.len() != 4 {
                return invalid(format!("lcs_check.theta must have 4 entries, got {}", c.theta.len()));
            }
            if c.form != "standard" && c.form != "conformal" {
                return invalid(format!("lcs_check.form `{}` is not standard or conformal", c.form));
            }
            if c.grid == 0 {
                return invalid("lcs_check.grid must be at least 1".into());
            }
            check_terms(&c.potential, 4, "lcs_check.potential")?;
            check_terms(&c.form_potential, 4, "lcs_check.form_potential")?;
        }
        Ok(())
    }
}

fn check_terms(terms: &[Term], dim: usize, what: &str) -> Result<(), CliError> {
    for t in terms {
        if t.mode.len() != dim {
            return Err(CliError::Validation(format!(
                "{what}: mode {:?} has {} entries, expected {dim}",
                t.mode,
                t.mode.len()
            )));
        }
        if !t.amplitude.is_finite() {
            return Err(CliError::Validation(format!("{what}: amplitude must be finite")));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{"backend": "torus", "torus": {"dim": 2, "cutoff": 4, "theta": [0, 0]}}"#;

    #[test]
    fn minimal_config_gets_defaults() {
        let c = RunConfig::from_json(MINIMAL, &[]).unwrap();
        assert_eq!(c.backend, Backend::Torus);
        assert_eq!(c.tolerances, Tolerances::default());
        assert!(c.torus.unwrap().pad);
    }

    #[test]
    fn overrides_patch_nested_keys() {
        let c = RunConfig::from_json(MINIMAL, &["torus.theta=[1, 0]".into(), "output.stem=run".into()]).unwrap();
        assert_eq!(c.torus.unwrap().theta, vec![1.0, 0.0]);
        assert_eq!(c.output.stem.as_deref(), Some("run"));
        assert!(RunConfig::from_json(MINIMAL, &["torus.cutoff".into()]).is_err());
        assert!(RunConfig::from_json(MINIMAL, &["torus.cutoff=0".into()]).is_err());
    }

    #[test]
    fn rejects_bad_configs() {
        for bad in [
            r#"{"backend": "sphere"}"#,
            r#"{"backend": "torus"}"#,
            r#"{"backend": "torus", "torus": {"dim": 2, "cutoff": 4, "theta": [0]}}"#,
            r#"{"backend": "torus", "torus": {"dim": 2, "cutoff": 4, "theta": [0, 0]}, "tolerances": {"rank": -1}}"#,
            r#"{"backend": "torus", "torus": {"dim": 2, "cutoff": 4, "theta": [0, 0]}, "lie_gate": {"algebra": "so3"}}"#,
            r#"{"backend": "mapping_torus", "mapping_torus": {"cutoff": 4}}"#,
            r#"{"backend": "mapping_torus", "mapping_torus": {"matrix": [[2,1],[1,1]], "cutoff": 4, "twist": "nu"}}"#,
        ] {
            assert!(
                matches!(RunConfig::from_json(bad, &[]), Err(CliError::Validation(_))),
                "{bad}"
            );
        }
    }
}
