//! Run configuration.
//!
//! A config is a TOML document (or the equivalent JSON object) with the
//! sections `[lattice]`, `[model]`, `[index]`, `[experiment]`, `[stack]` and
//! `[output]`. Unknown keys are rejected. See `README.md` for the grammar.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::CutProjectModel;
use crate::index::Solver;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub lattice: LatticeConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelConfig>,
    #[serde(default)]
    pub index: IndexConfig,
    #[serde(default)]
    pub experiment: ExperimentConfig,
    /// Layer set `L` for stacking runs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stack: Option<LatticeConfig>,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Generator {
    Periodic,
    Perturbed,
    Hardcore,
    CutAndProject,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowConfig {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeConfig {
    pub generator: Generator,
    pub window: WindowConfig,
    /// Lattice vectors (periodic, perturbed); defaults to the unit basis.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_disp: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_dist: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_r: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_attempts: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<CutProjectModel>,
    /// Generator seed; derived from the master seed when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Close the window into a torus for bulk gaps and projections.
    #[serde(default)]
    pub torus: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MuConfig {
    Value(f64),
    Policy(MuPolicy),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum MuPolicy {
    #[serde(rename = "largest-gap")]
    LargestGap,
}

impl Default for MuConfig {
    fn default() -> Self {
        MuConfig::Value(0.0)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub name: String,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    /// Expected block size; checked against the model.
    #[serde(default, rename = "N", skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default)]
    pub mu: MuConfig,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum X0Config {
    Policy(X0Policy),
    Point(Vec<f64>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum X0Policy {
    Center,
    NearestSite,
}

impl Default for X0Config {
    fn default() -> Self {
        X0Config::Policy(X0Policy::Center)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IndexConfig {
    /// Empty means `{0.5, 1, 2} × 0.1 · gap / radius`.
    #[serde(default)]
    pub kappa: Vec<f64>,
    #[serde(default)]
    pub x0: X0Config,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub margin_min: Option<f64>,
    #[serde(default)]
    pub solver: Solver,
    #[serde(default = "default_lanczos")]
    pub lanczos_steps: usize,
    /// Kitaev disk radius; defaults to half the window radius.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sector_radius: Option<f64>,
    #[serde(default = "default_fhs_grid")]
    pub fhs_grid: usize,
    /// Minimum distance of base points from the boundary, as a fraction of the window radius.
    #[serde(default = "default_boundary")]
    pub boundary_fraction: f64,
}

fn default_lanczos() -> usize {
    80
}
fn default_fhs_grid() -> usize {
    24
}
fn default_boundary() -> f64 {
    0.25
}

impl Default for IndexConfig {
    fn default() -> Self {
        IndexConfig {
            kappa: Vec::new(),
            x0: X0Config::default(),
            margin_min: None,
            solver: Solver::Auto,
            lanczos_steps: default_lanczos(),
            sector_radius: None,
            fhs_grid: default_fhs_grid(),
            boundary_fraction: default_boundary(),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Generate,
    Spectrum,
    Index,
    #[default]
    Quantization,
    Robustness,
    Stacking,
    Omega,
}

impl Kind {
    pub fn tag(&self) -> &'static str {
        match self {
            Kind::Generate => "generate",
            Kind::Spectrum => "spectrum",
            Kind::Index => "index",
            Kind::Quantization => "quantization",
            Kind::Robustness => "robustness",
            Kind::Stacking => "stacking",
            Kind::Omega => "omega",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SymmetryKind {
    #[default]
    None,
    Chiral,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub kind: Kind,
    /// Master seed; every other seed is derived from it.
    #[serde(default)]
    pub seed: u64,
    /// Independent lattice realizations (random generators only).
    #[serde(default = "one")]
    pub realizations: usize,
    #[serde(default = "default_trials")]
    pub trials: usize,
    /// Per-block perturbation norm as a fraction of the base gap.
    #[serde(default = "default_strength")]
    pub strength: f64,
    #[serde(default = "default_range")]
    pub range: f64,
    #[serde(default)]
    pub symmetry: SymmetryKind,
    /// A perturbed bulk gap narrower than this fraction of the base gap counts as closed.
    #[serde(default = "default_min_gap_fraction")]
    pub min_gap_fraction: f64,
    /// Number of base sites nearest the window center (omega runs).
    #[serde(default = "default_base_sites")]
    pub base_sites: usize,
    /// Explicit base-site indices; overrides `base_sites`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sites: Option<Vec<usize>>,
    /// Add a two-dimensional Chern control run to stacking reports.
    #[serde(default)]
    pub control: bool,
}

fn one() -> usize {
    1
}
fn default_trials() -> usize {
    30
}
fn default_strength() -> f64 {
    0.2
}
fn default_range() -> f64 {
    2.0
}
fn default_min_gap_fraction() -> f64 {
    0.1
}
fn default_base_sites() -> usize {
    5
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            kind: Kind::default(),
            seed: 0,
            realizations: 1,
            trials: default_trials(),
            strength: default_strength(),
            range: default_range(),
            symmetry: SymmetryKind::None,
            min_gap_fraction: default_min_gap_fraction(),
            base_sites: default_base_sites(),
            sites: None,
            control: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Csv,
    Svg,
}

impl std::str::FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "svg" => Ok(Format::Svg),
            other => Err(Error::Config(format!("unknown output format `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_dir")]
    pub dir: String,
    #[serde(default = "default_formats")]
    pub formats: Vec<Format>,
}

fn default_dir() -> String {
    "out".to_string()
}
fn default_formats() -> Vec<Format> {
    vec![Format::Json, Format::Csv, Format::Svg]
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig { dir: default_dir(), formats: default_formats() }
    }
}

impl RunConfig {
    /// Parses TOML, or JSON when the text starts with `{`.
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: RunConfig = if text.trim_start().starts_with('{') {
            serde_json::from_str(text).map_err(|e| Error::Config(anchor(text, e.to_string())))?
        } else {
            toml::from_str(text).map_err(|e| Error::Config(anchor(text, e.to_string())))?
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Structural checks that do not need any computation.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        let needs_model = !matches!(self.experiment.kind, Kind::Generate);
        if needs_model && self.model.is_none() {
            return bad(format!("experiment `{}` needs a [model] section", self.experiment.kind.tag()));
        }
        if self.experiment.kind == Kind::Stacking && self.stack.is_none() {
            return bad("stacking needs a [stack] section".to_string());
        }
        for lat in std::iter::once(&self.lattice).chain(self.stack.as_ref()) {
            if lat.window.lo.len() != lat.window.hi.len() || lat.window.lo.is_empty() {
                return bad("window bounds must have equal, nonzero length".to_string());
            }
            let required: &[(&str, bool)] = match lat.generator {
                Generator::Periodic => &[],
                Generator::Perturbed => &[("max_disp", lat.max_disp.is_some())],
                Generator::Hardcore => &[("min_dist", lat.min_dist.is_some()), ("target_r", lat.target_r.is_some())],
                Generator::CutAndProject => &[("model", lat.model.is_some())],
            };
            if let Some((key, _)) = required.iter().find(|(_, present)| !present) {
                return bad(format!("lattice generator {:?} needs `{key}`", lat.generator));
            }
        }
        if self.index.kappa.iter().any(|k| !(*k > 0.0)) {
            return bad("every kappa must be positive".to_string());
        }
        if !(0.0..0.5).contains(&self.index.boundary_fraction) {
            return bad("boundary_fraction must lie in [0, 0.5)".to_string());
        }
        if self.experiment.realizations == 0 {
            return bad("realizations must be at least 1".to_string());
        }
        Ok(())
    }
}

/// Adds `line N` to messages that name an unknown key but carry no position.
fn anchor(text: &str, msg: String) -> String {
    if msg.contains("line") {
        return msg;
    }
    let key = msg.split('`').nth(1);
    if let Some(key) = key {
        if let Some((n, _)) = text.lines().enumerate().find(|(_, l)| {
            let t = l.trim_start().trim_start_matches('"');
            t.starts_with(key) && t[key.len()..].trim_start().trim_start_matches('"').trim_start().starts_with(['=', ':'])
        }) {
            return format!("line {}: {msg}", n + 1);
        }
    }
    msg
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
[lattice]
generator = "periodic"
window = { lo = [0, 0], hi = [23, 23] }
torus = true

[model]
name = "chern_2band_2d"
params = { M = 1.0 }

[index]
kappa = [0.05, 0.1, 0.2]
"#;

    #[test]
    fn minimal_config_parses_with_defaults() {
        let cfg = RunConfig::parse(MINIMAL).unwrap();
        assert_eq!(cfg.experiment.kind, Kind::Quantization);
        assert_eq!(cfg.index.fhs_grid, 24);
        assert_eq!(cfg.model.as_ref().unwrap().mu, MuConfig::Value(0.0));
        let json = serde_json::to_string(&cfg).unwrap();
        assert_eq!(RunConfig::parse(&json).unwrap(), cfg);
    }

    #[test]
    fn unknown_key_names_key_and_line() {
        let text = MINIMAL.replace("kappa = ", "kapa = ");
        let err = RunConfig::parse(&text).unwrap_err().to_string();
        assert!(err.contains("kapa"), "{err}");
        assert!(err.contains("line"), "{err}");
    }

    #[test]
    fn mu_policy() {
        let text = MINIMAL.replace("params = { M = 1.0 }", "mu = \"largest-gap\"");
        let cfg = RunConfig::parse(&text).unwrap();
        assert_eq!(cfg.model.unwrap().mu, MuConfig::Policy(MuPolicy::LargestGap));
        assert!(RunConfig::parse(&MINIMAL.replace("params = { M = 1.0 }", "mu = \"middle\"")).is_err());
    }

    #[test]
    fn missing_generator_parameters() {
        let text = MINIMAL.replace("\"periodic\"", "\"hardcore\"");
        assert!(matches!(RunConfig::parse(&text), Err(Error::Config(_))));
    }
}
