//! Experiment configuration: the JSON form accepted by `hadamard run` and
//! the structure the flag parser builds.

use std::path::{Path, PathBuf};

use hadamard_core::counterexamples::PetruninConfig;
use hadamard_core::filtering::NestedFamily;
use hadamard_core::{MetricTree, Point, ScalarField, Space, ToleranceProfile};
use serde::{Deserialize, Serialize};

use crate::error::{usage, CliError, CliResult};

pub const TOLERANCE_ENV: &str = "HADAMARD_TOLERANCE_PROFILE";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Jung,
    Circumcenter,
    Helly,
    Dimension,
    Flow,
    Filtering,
    Petrunin,
    C0Demo,
    Constants,
    Comparison,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Jung => "jung",
            Command::Circumcenter => "circumcenter",
            Command::Helly => "helly",
            Command::Dimension => "dimension",
            Command::Flow => "flow",
            Command::Filtering => "filtering",
            Command::Petrunin => "petrunin",
            Command::C0Demo => "c0-demo",
            Command::Constants => "constants",
            Command::Comparison => "comparison",
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Output {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
}

/// A space given as `kind:dimension` shorthand or as the full JSON form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SpaceDescriptor {
    Short(String),
    Full(Space),
}

impl SpaceDescriptor {
    pub fn resolve(&self) -> CliResult<Space> {
        let space = match self {
            SpaceDescriptor::Full(s) => s.clone(),
            SpaceDescriptor::Short(s) => parse_space(s)?,
        };
        space.validate()?;
        Ok(space)
    }
}

/// `euclidean:3`, `sphere:2`, `hyperbolic:2`, `box:100`, `star:5`.
pub fn parse_space(s: &str) -> CliResult<Space> {
    let (kind, arg) =
        s.split_once(':').ok_or_else(|| usage(format!("space '{s}' is not of the form kind:dimension")))?;
    let n: usize = arg.trim().parse().map_err(|_| usage(format!("space '{s}': '{arg}' is not a dimension")))?;
    Ok(match kind.trim() {
        "euclidean" | "r" => Space::euclidean(n),
        "sphere" => Space::sphere(n),
        "hyperbolic" | "h" => Space::hyperbolic(n),
        "box" | "hilbert-box" => Space::hilbert_box(n),
        "star" => Space::tree(MetricTree::star(n)),
        other => return Err(usage(format!("unknown space kind '{other}'"))),
    })
}

/// Points as a generator spec or CSV path, or listed inline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PointsSpec {
    Source(String),
    Inline(Vec<Point>),
}

/// Nested families by construction, or given in full.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FamilySpec {
    /// `{x_1 >= t}` in `R^dimension`.
    Parallel {
        dimension: usize,
        #[serde(default)]
        offsets: Option<Vec<f64>>,
    },
    /// `{<x, n_j> >= t}` for all normals.
    Cone {
        normals: Vec<Vec<f64>>,
        #[serde(default)]
        offsets: Option<Vec<f64>>,
    },
    /// `X_i = ∩_{j <= i} {<x, n_j> >= t_j}`.
    Accumulating {
        normals: Vec<Vec<f64>>,
        offsets: Vec<f64>,
    },
    /// Sub-rays of ray `ray` in a star with `rays` rays, basepoint at the center.
    TreeSubrays {
        rays: usize,
        ray: usize,
        #[serde(default)]
        offsets: Option<Vec<f64>>,
    },
    Hilbert {
        dimension: usize,
        length: usize,
    },
    Explicit {
        family: NestedFamily,
    },
}

/// Random scalar-field ensembles for batch flow experiments (Euclidean only).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FieldEnsemble {
    /// Maxima of 2 to 7 affine functions with Gaussian coefficients, each
    /// flowed from `pairs` random start pairs.
    MaxAffine { fields: usize, pairs: usize },
    /// Convex combinations of 2 to 4 normalized distances to anchors on the
    /// circle of radius 3, started in the unit disk.
    DistanceMix { fields: usize },
}

pub fn default_offsets() -> Vec<f64> {
    (0..=30).map(|i| 2f64.powi(i)).collect()
}

/// Command-specific inputs; each command reads the fields it needs.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Inputs {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<PointsSpec>,
    /// Repeat the experiment in each of these spaces instead of `space`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spaces: Option<Vec<SpaceDescriptor>>,
    /// Values of `n` for `constants`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dimensions: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dimension: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_diameter: Option<f64>,
    /// Helly radius; defaults to the largest small-subset radius.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    /// Independent random instances (re-sampling a generator spec).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<ScalarField>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start: Option<Point>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<FamilySpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub families: Option<Vec<FamilySpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ensemble: Option<FieldEnsemble>,
    /// Rays of the star tree in `c0-demo`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rays: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub petrunin: Option<PetruninConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kn: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sn: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rn: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub command: Command,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub space: Option<SpaceDescriptor>,
    #[serde(default)]
    pub inputs: Inputs,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<ToleranceProfile>,
    #[serde(default)]
    pub output: Output,
    /// Worker threads for batch instances; defaults to the processor count.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
}

impl ExperimentConfig {
    pub fn new(command: Command) -> Self {
        Self {
            command,
            space: None,
            inputs: Inputs::default(),
            seed: 0,
            tolerances: None,
            output: Output::default(),
            workers: None,
        }
    }

    pub fn from_json(text: &str) -> CliResult<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn from_file(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|source| CliError::ConfigFile { path: path.to_path_buf(), source })
    }

    pub fn space(&self) -> CliResult<Space> {
        self.space
            .as_ref()
            .ok_or_else(|| usage(format!("'{}' needs a space (--space)", self.command.name())))?
            .resolve()
    }

    /// The sweep in `inputs.spaces`, or the single configured space.
    pub fn spaces(&self) -> CliResult<Vec<Space>> {
        match &self.inputs.spaces {
            Some(list) if !list.is_empty() => list.iter().map(SpaceDescriptor::resolve).collect(),
            Some(_) => Err(usage("inputs.spaces is empty")),
            None => Ok(vec![self.space()?]),
        }
    }

    /// Explicit config tolerances, else the environment profile, else the
    /// defaults.
    pub fn tolerance_profile(&self) -> CliResult<ToleranceProfile> {
        if let Some(t) = self.tolerances {
            return Ok(t);
        }
        match std::env::var(TOLERANCE_ENV) {
            Ok(v) if !v.trim().is_empty() => tolerance_from_env(&v),
            _ => Ok(ToleranceProfile::default()),
        }
    }
}

/// The variable holds either inline JSON or a path to a JSON file; missing
/// fields keep their defaults.
fn tolerance_from_env(value: &str) -> CliResult<ToleranceProfile> {
    let text = if value.trim_start().starts_with('{') {
        value.to_string()
    } else {
        std::fs::read_to_string(value).map_err(|e| usage(format!("{TOLERANCE_ENV}: cannot read '{value}': {e}")))?
    };
    serde_json::from_str(&text).map_err(|e| usage(format!("{TOLERANCE_ENV}: {e}")))
}
