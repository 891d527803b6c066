//! JSON experiment configuration.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use stokes_perturb_core::geometry::{rasterize, Direction, Family, GridSlit, Policy, Segment, ShapeSpec};
use stokes_perturb_core::harness::{DiscriminationSpec, ExperimentSpec, Forcing, Operator, Reference, Style};
use stokes_perturb_core::solver::SolveOptions;
use stokes_perturb_core::{BcMode, DomainMask, FaceAxis, Grid};

use crate::error::{CliError, Result};
use crate::formats::read_mask;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub schema_version: u32,
    #[serde(default)]
    pub solver: SolverConfig,
    /// Resolvent shift for single solves.
    #[serde(default = "one")]
    pub shift: f64,
    #[serde(default)]
    pub experiment: Option<ExperimentConfig>,
}

fn one() -> f64 {
    1.0
}

impl Default for Config {
    fn default() -> Self {
        Config { schema_version: SCHEMA_VERSION, solver: SolverConfig::default(), shift: 1.0, experiment: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default)]
    pub max_iter: Option<usize>,
    #[serde(default)]
    pub jacobi: bool,
}

fn default_tol() -> f64 {
    SolveOptions::default().tol
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { tol: default_tol(), max_iter: None, jacobi: false }
    }
}

impl SolverConfig {
    pub fn options(&self) -> SolveOptions {
        SolveOptions { tol: self.tol, max_iter: self.max_iter, jacobi: self.jacobi }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ExperimentConfig {
    Sequence {
        operator: OperatorConfig,
        direction: DirectionConfig,
        /// Per-level mode; `both` runs the weak and the pseudo family.
        #[serde(default)]
        mode: ModeChoice,
        #[serde(default)]
        limit_mode: Option<ModeConfig>,
        domain: DomainConfig,
        forcing: ForcingConfig,
        #[serde(default)]
        reference: ReferenceConfig,
        #[serde(default)]
        assertion: Assertion,
    },
    Discrimination {
        n: usize,
        #[serde(default)]
        slit: Option<SlitConfig>,
        thicknesses: Vec<usize>,
        forcing: ForcingConfig,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatorConfig {
    ScalarLaplace,
    VectorLaplace,
    Stokes,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DirectionConfig {
    Increasing,
    Decreasing,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeConfig {
    Weak,
    Pseudo,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeChoice {
    /// Weak when increasing, pseudo when decreasing.
    #[default]
    Default,
    Weak,
    Pseudo,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReferenceConfig {
    #[default]
    LimitMask,
    FinestLevel,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Assertion {
    /// Monotone errors ending below `factor` times the floor (refined
    /// style) or `1e-8` relative (fixed grid).
    Converged { factor: f64 },
    StrictlyDecreasing,
    None,
}

impl Default for Assertion {
    fn default() -> Self {
        Assertion::Converged { factor: 3.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolicyConfig {
    #[default]
    Center,
    Inner,
    Outer,
}

impl From<PolicyConfig> for Policy {
    fn from(p: PolicyConfig) -> Policy {
        match p {
            PolicyConfig::Center => Policy::Center,
            PolicyConfig::Inner => Policy::Inner,
            PolicyConfig::Outer => Policy::Outer,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AxisConfig {
    X,
    Y,
}

impl From<AxisConfig> for FaceAxis {
    fn from(a: AxisConfig) -> FaceAxis {
        match a {
            AxisConfig::X => FaceAxis::X,
            AxisConfig::Y => FaceAxis::Y,
        }
    }
}

/// A grid slit; omitted fields default to the middle half of the middle line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SlitConfig {
    pub axis: AxisConfig,
    #[serde(default)]
    pub line: Option<usize>,
    #[serde(default)]
    pub start: Option<usize>,
    #[serde(default)]
    pub end: Option<usize>,
}

impl Default for SlitConfig {
    fn default() -> Self {
        SlitConfig { axis: AxisConfig::X, line: None, start: None, end: None }
    }
}

impl SlitConfig {
    pub fn resolve(&self, grid: &Grid) -> GridSlit {
        let mid = GridSlit::middle_half(grid, self.axis.into());
        GridSlit {
            axis: self.axis.into(),
            line: self.line.unwrap_or(mid.line),
            start: self.start.unwrap_or(mid.start),
            end: self.end.unwrap_or(mid.end),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case", deny_unknown_fields)]
pub enum ShapeConfig {
    Disk { center: [f64; 2], radius: f64 },
    Rect { corner: [f64; 2], width: f64, height: f64 },
    /// The unit square minus a segment on `x = at` (axis `x`) or `y = at`.
    SlitSquare { axis: AxisConfig, at: f64, from: f64, to: f64 },
}

impl ShapeConfig {
    pub fn spec(&self) -> ShapeSpec {
        match *self {
            ShapeConfig::Disk { center, radius } => ShapeSpec::Disk { center, radius },
            ShapeConfig::Rect { corner, width, height } => ShapeSpec::Rect { corner, width, height },
            ShapeConfig::SlitSquare { axis, at, from, to } => {
                ShapeSpec::unit_slit_square(Segment { axis: axis.into(), at, from, to })
            }
        }
    }
}

/// Where a fixed-grid mask comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "from", rename_all = "snake_case", deny_unknown_fields)]
pub enum MaskConfig {
    Square,
    SlitSquare {
        #[serde(default)]
        slit: Option<SlitConfig>,
    },
    Shape {
        shape: ShapeConfig,
        #[serde(default)]
        policy: PolicyConfig,
    },
    File { path: PathBuf },
}

impl MaskConfig {
    /// Builds the mask; relative file paths resolve against `base`.
    pub fn build(&self, grid: &Grid, base: &Path) -> Result<DomainMask> {
        Ok(match self {
            MaskConfig::Square => DomainMask::full(*grid),
            MaskConfig::SlitSquare { slit } => {
                let s = slit.unwrap_or_default();
                s.resolve(grid).thickened(grid, 0)?
            }
            MaskConfig::Shape { shape, policy } => rasterize(&shape.spec(), grid, (*policy).into())?,
            MaskConfig::File { path } => {
                let m = read_mask(&base.join(path))?;
                if m.grid() != grid {
                    return Err(CliError::Config(format!("{} does not live on the configured grid", path.display())));
                }
                m
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum FamilyConfig {
    Constant {
        mask: MaskConfig,
        levels: usize,
        #[serde(default)]
        limit: Option<MaskConfig>,
    },
    Erosion { base: MaskConfig, offsets: Vec<usize> },
    Dilation { base: MaskConfig, offsets: Vec<usize> },
    SlitThickness {
        #[serde(default)]
        slit: Option<SlitConfig>,
        thicknesses: Vec<usize>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "style", rename_all = "snake_case", deny_unknown_fields)]
pub enum DomainConfig {
    FixedGrid { n: usize, family: FamilyConfig },
    Refined {
        shape: ShapeConfig,
        policy: PolicyConfig,
        resolutions: Vec<usize>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ForcingConfig {
    Constant { value: [f64; 2] },
    Gradient { center: [f64; 2], width: f64 },
    Vortex { center: [f64; 2], radius: f64 },
    Crossflow { from: f64, to: f64 },
}

impl From<ForcingConfig> for Forcing {
    fn from(f: ForcingConfig) -> Forcing {
        match f {
            ForcingConfig::Constant { value } => Forcing::Constant { value },
            ForcingConfig::Gradient { center, width } => Forcing::Gradient { center, width },
            ForcingConfig::Vortex { center, radius } => Forcing::Vortex { center, radius },
            ForcingConfig::Crossflow { from, to } => Forcing::Crossflow { from, to },
        }
    }
}

pub fn mode(m: ModeConfig) -> BcMode {
    match m {
        ModeConfig::Weak => BcMode::Weak,
        ModeConfig::Pseudo => BcMode::Pseudo,
    }
}

/// A fully resolved experiment.
pub enum Plan {
    Sequence { specs: Vec<(String, ExperimentSpec)>, assertion: Assertion },
    Discrimination(DiscriminationSpec),
}

impl Config {
    pub fn parse(text: &str) -> Result<Config> {
        let c: Config = serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        if c.schema_version != SCHEMA_VERSION {
            return Err(CliError::Config(format!(
                "schema_version {} is not supported (expected {SCHEMA_VERSION})",
                c.schema_version
            )));
        }
        if !(c.shift > 0.0) {
            return Err(CliError::Config("shift must be positive".into()));
        }
        if !(c.solver.tol > 0.0) {
            return Err(CliError::Config("solver.tol must be positive".into()));
        }
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Config> {
        Config::parse(&crate::formats::read_text(path)?)
    }

    /// Resolves the experiment section; `base` anchors relative mask paths.
    pub fn plan(&self, base: &Path) -> Result<Plan> {
        let exp = self.experiment.as_ref().ok_or_else(|| CliError::Config("missing `experiment`".into()))?;
        match exp {
            ExperimentConfig::Discrimination { n, slit, thicknesses, forcing } => {
                let grid = Grid::unit_square(*n);
                let slit = slit.unwrap_or_default();
                Ok(Plan::Discrimination(DiscriminationSpec {
                    grid,
                    slit: slit.resolve(&grid),
                    forcing: (*forcing).into(),
                    thicknesses: thicknesses.clone(),
                    solver: self.solver.options(),
                }))
            }
            ExperimentConfig::Sequence {
                operator,
                direction,
                mode: choice,
                limit_mode,
                domain,
                forcing,
                reference,
                assertion,
            } => {
                let operator = match operator {
                    OperatorConfig::ScalarLaplace => Operator::ScalarLaplace,
                    OperatorConfig::VectorLaplace => Operator::VectorLaplace,
                    OperatorConfig::Stokes => Operator::Stokes,
                };
                let direction = match direction {
                    DirectionConfig::Increasing => Direction::Increasing,
                    DirectionConfig::Decreasing => Direction::Decreasing,
                };
                let style = match domain {
                    DomainConfig::FixedGrid { n, family } => {
                        let grid = Grid::unit_square(*n);
                        let family = match family {
                            FamilyConfig::Constant { mask, levels, limit } => Family::Constant {
                                mask: mask.build(&grid, base)?,
                                levels: *levels,
                                limit: limit.as_ref().map(|l| l.build(&grid, base)).transpose()?,
                            },
                            FamilyConfig::Erosion { base: b, offsets } => {
                                Family::Erosion { base: b.build(&grid, base)?, offsets: offsets.clone() }
                            }
                            FamilyConfig::Dilation { base: b, offsets } => {
                                Family::Dilation { base: b.build(&grid, base)?, offsets: offsets.clone() }
                            }
                            FamilyConfig::SlitThickness { slit, thicknesses } => {
                                let s = slit.unwrap_or_default();
                                Family::SlitThickness { slit: s.resolve(&grid), thicknesses: thicknesses.clone() }
                            }
                        };
                        Style::FixedGrid { grid, family }
                    }
                    DomainConfig::Refined { shape, policy, resolutions } => Style::Refined {
                        shape: shape.spec(),
                        policy: (*policy).into(),
                        origin: [0.0, 0.0],
                        extent: 1.0,
                        resolutions: resolutions.clone(),
                    },
                };
                let mut spec = ExperimentSpec::new(operator, direction, style, (*forcing).into());
                spec.solver = self.solver.options();
                spec.reference = match reference {
                    ReferenceConfig::LimitMask => Reference::LimitMask,
                    ReferenceConfig::FinestLevel => Reference::FinestLevel,
                };
                spec.limit_mode = limit_mode.map(mode);
                let modes: Vec<Option<BcMode>> = match choice {
                    ModeChoice::Default => vec![None],
                    ModeChoice::Weak => vec![Some(BcMode::Weak)],
                    ModeChoice::Pseudo => vec![Some(BcMode::Pseudo)],
                    ModeChoice::Both => vec![Some(BcMode::Weak), Some(BcMode::Pseudo)],
                };
                let specs = modes
                    .into_iter()
                    .map(|m| {
                        let mut s = spec.clone();
                        s.level_mode = m;
                        (s.level_mode().name().to_string(), s)
                    })
                    .collect();
                Ok(Plan::Sequence { specs, assertion: *assertion })
            }
        }
    }
}
