//! Experiment configuration: a JSON document, overridable from the command line.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::analysis::{PNorm, Theorem};
use crate::error::{Error, Result};
use crate::fields::FieldSpec;
use crate::geometry::{AffineMapSpec, AnisotropyLaw, ElementKind, FamilySpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Unisolvence,
    Reproduce,
    Lemma1,
    Commuting,
    Converge,
    Stability,
    GeometryCheck,
}

impl Experiment {
    pub fn all() -> [Experiment; 7] {
        use Experiment::*;
        [Unisolvence, Reproduce, Lemma1, Commuting, Converge, Stability, GeometryCheck]
    }

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Unisolvence => "unisolvence",
            Experiment::Reproduce => "reproduce",
            Experiment::Lemma1 => "lemma1",
            Experiment::Commuting => "commuting",
            Experiment::Converge => "converge",
            Experiment::Stability => "stability",
            Experiment::GeometryCheck => "geometry-check",
        }
    }
}

impl FromStr for Experiment {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Experiment::all()
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown experiment '{s}'")))
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A catalog field written either as `"layer(0.1)"` or as `{"name": "layer", "eps": 0.1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldChoice(pub FieldSpec);

impl Serialize for FieldChoice {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.to_string())
    }
}

impl<'de> Deserialize<'de> for FieldChoice {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Text(String),
            Object(FieldSpec),
        }
        match Raw::deserialize(d)? {
            Raw::Text(s) => s.parse().map(FieldChoice).map_err(serde::de::Error::custom),
            Raw::Object(f) => Ok(FieldChoice(f)),
        }
    }
}

/// A family preset name or a custom anisotropy law.
#[derive(Clone, Debug, PartialEq)]
pub enum FamilyChoice {
    Preset(String),
    Custom(AnisotropyLaw),
}

impl FamilyChoice {
    pub fn law(&self, dim: usize) -> Result<AnisotropyLaw> {
        match self {
            FamilyChoice::Preset(name) => AnisotropyLaw::preset(name, dim),
            FamilyChoice::Custom(law) => Ok(law.clone()),
        }
    }
}

impl FromStr for FamilyChoice {
    type Err = Error;
    /// `iso`, `flat1`, `needle` or `custom:<json law>`.
    fn from_str(s: &str) -> Result<Self> {
        if let Some(json) = s.strip_prefix("custom:") {
            return Ok(FamilyChoice::Custom(serde_json::from_str(json)?));
        }
        AnisotropyLaw::preset(s, 3)?;
        Ok(FamilyChoice::Preset(s.to_string()))
    }
}

impl Serialize for FamilyChoice {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            FamilyChoice::Preset(name) => s.serialize_str(name),
            FamilyChoice::Custom(law) => law.serialize(s),
        }
    }
}

impl<'de> Deserialize<'de> for FamilyChoice {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Text(String),
            Law(AnisotropyLaw),
        }
        match Raw::deserialize(d)? {
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
            Raw::Law(l) => Ok(FamilyChoice::Custom(l)),
        }
    }
}

/// Size patterns of the stability sweep at aspect ratio a.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AspectPattern {
    /// (1, 1, 1/a)
    Flat,
    /// (1/a, 1/a, 1)
    Needle,
    /// (1/a, 1, 1/√a)
    Mixed,
}

impl AspectPattern {
    pub fn all() -> [AspectPattern; 3] {
        [AspectPattern::Flat, AspectPattern::Needle, AspectPattern::Mixed]
    }

    pub fn sizes(self, a: f64) -> [f64; 3] {
        match self {
            AspectPattern::Flat => [1.0, 1.0, 1.0 / a],
            AspectPattern::Needle => [1.0 / a, 1.0 / a, 1.0],
            AspectPattern::Mixed => [1.0 / a, 1.0, 1.0 / a.sqrt()],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            AspectPattern::Flat => "flat",
            AspectPattern::Needle => "needle",
            AspectPattern::Mixed => "mixed",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Thresholds {
    /// Expected rate; `None` means m + 1.
    pub expected_slope: Option<f64>,
    pub slope_tolerance: f64,
    /// Largest admissible max/min of error/RHS across levels; `None` disables the check.
    pub max_ratio_spread: Option<f64>,
    pub min_condition: f64,
    pub max_reproduction_error: f64,
    pub lemma1_tolerance: f64,
    pub max_simplex_defect: f64,
    pub min_prism_defect: f64,
    pub max_stability_spread: f64,
    pub max_spearman: f64,
    /// Largest admissible maximum angle (radians) in `geometry-check`.
    pub max_angle: f64,
    pub min_regular_vertex_det: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            expected_slope: None,
            slope_tolerance: 0.15,
            max_ratio_spread: Some(5.0),
            min_condition: 1e-12,
            max_reproduction_error: 1e-9,
            lemma1_tolerance: 1e-11,
            max_simplex_defect: 1e-9,
            min_prism_defect: 1e-4,
            max_stability_spread: 5.0,
            max_spearman: 0.8,
            max_angle: 0.9 * std::f64::consts::PI,
            min_regular_vertex_det: 0.1,
        }
    }
}

pub const DEFAULT_SEED: u64 = 42;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub experiment: Option<Experiment>,
    pub kind: ElementKind,
    pub k: u32,
    /// Smoothness index of the estimates; `None` means m = k.
    pub m: Option<u32>,
    pub p: Vec<PNorm>,
    pub field: FieldChoice,
    /// Extra fields for `commuting` and `stability`; empty means the experiment's defaults.
    pub fields: Vec<FieldChoice>,
    pub family: FamilyChoice,
    pub first_level: usize,
    /// Last level index J; `None` means 4 for `converge` and 0 otherwise.
    pub levels: Option<usize>,
    pub base_map: Option<AffineMapSpec>,
    pub theorem: Option<Theorem>,
    pub seed: u64,
    /// Random samples: seeded members for `reproduce`, points for `lemma1`.
    pub samples: Option<usize>,
    /// Random cubic fields tried by the prism counterexample search.
    pub trials: usize,
    /// Number of finest levels entering the slope fit; `None` means all.
    pub fit_levels: Option<usize>,
    pub aspects: Vec<f64>,
    pub patterns: Vec<AspectPattern>,
    pub thresholds: Thresholds,
    pub out: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            experiment: None,
            kind: ElementKind::Prism,
            k: 1,
            m: None,
            p: vec![PNorm::Finite(2.0)],
            field: FieldChoice(FieldSpec::Sin3),
            fields: Vec::new(),
            family: FamilyChoice::Preset("iso".into()),
            first_level: 0,
            levels: None,
            base_map: None,
            theorem: None,
            seed: DEFAULT_SEED,
            samples: None,
            trials: 200,
            fit_levels: None,
            aspects: vec![1.0, 10.0, 1e2, 1e3, 1e4],
            patterns: AspectPattern::all().to_vec(),
            thresholds: Thresholds::default(),
            out: None,
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::invalid(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn experiment(&self) -> Result<Experiment> {
        self.experiment.ok_or_else(|| Error::invalid("no experiment given"))
    }

    pub fn m(&self) -> u32 {
        self.m.unwrap_or(self.k)
    }

    pub fn last_level(&self) -> usize {
        self.levels.unwrap_or(match self.experiment {
            Some(Experiment::Converge) => 4,
            _ => self.first_level,
        })
    }

    pub fn family_spec(&self) -> Result<FamilySpec> {
        Ok(FamilySpec {
            kind: self.kind,
            law: self.family.law(self.kind.dim())?,
            first_level: self.first_level,
            last_level: self.last_level(),
            base_map: self.base_map.clone(),
        })
    }

    pub fn expected_slope(&self) -> f64 {
        self.thresholds.expected_slope.unwrap_or(self.m() as f64 + 1.0)
    }

    /// Checks that do not need any computation.
    pub fn validate(&self) -> Result<()> {
        let e = self.experiment()?;
        if !(1..=3).contains(&self.k) {
            return Err(Error::invalid(format!("k must be 1, 2 or 3, got {}", self.k)));
        }
        if self.m() > self.k {
            return Err(Error::invalid(format!("m = {} exceeds k = {}", self.m(), self.k)));
        }
        if self.p.is_empty() {
            return Err(Error::invalid("empty p list"));
        }
        if matches!(e, Experiment::Lemma1 | Experiment::Stability) && self.kind != ElementKind::Prism {
            return Err(Error::invalid(format!("{e} is a prism experiment, got kind {}", self.kind)));
        }
        if let Some(t) = self.theorem {
            let ok = match t {
                Theorem::RegularVertex | Theorem::MaximumAngle => self.kind.is_simplex(),
                Theorem::Prism => self.kind == ElementKind::Prism,
            };
            if !ok {
                return Err(Error::invalid(format!("{t:?} does not apply to {}", self.kind)));
            }
        }
        if self.aspects.iter().any(|a| !(*a >= 1.0)) {
            return Err(Error::invalid("aspect ratios must be >= 1"));
        }
        self.family_spec()?.sizes()?;
        Ok(())
    }
}
