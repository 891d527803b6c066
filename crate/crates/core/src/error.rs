use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::solver::SolveStats;

pub type Result<T> = core::result::Result<T, Error>;

/// Everything that can go wrong in the core crate.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Grid parameters violate `h > 0`, `nx, ny >= 1`.
    InvalidGrid(String),
    /// Rasterization produced no cells.
    DegenerateRasterization,
    /// A shape or slit does not fit the grid (outside the box, or a slit off grid lines).
    InvalidShape(String),
    /// Dilation would leave the grid.
    GridTooSmall,
    /// A domain sequence violates its nesting invariant.
    SequenceNotMonotone { level: usize },
    /// A slit face is not interior to the cell set.
    InvalidSlit { axis: crate::FaceAxis, i: usize, j: usize },
    /// Fields live on different grids or have inconsistent sizes.
    GridMismatch,
    /// Prolongation between grids that are not a factor-2 nesting.
    NonNestedGrids,
    /// The mask has no cells.
    EmptyMask,
    /// The problem has no unknowns to solve for.
    NoInteriorDofs,
    /// Assembled operator is not symmetric.
    AssemblyAsymmetry { row: usize, col: usize, delta: f64 },
    /// A declared nullspace vector is not annihilated by the operator.
    BadNullspace { index: usize, defect: f64 },
    /// Dimension mismatch between an operator and a vector.
    DimensionMismatch { expected: usize, found: usize },
    /// The Krylov iteration hit its iteration cap.
    NotConverged { best: Vec<f64>, stats: SolveStats },
    /// Inconsistent experiment description.
    InvalidExperiment(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidGrid(msg) => write!(f, "invalid grid: {msg}"),
            Error::DegenerateRasterization => f.write_str("degenerate rasterization"),
            Error::InvalidShape(msg) => write!(f, "invalid shape: {msg}"),
            Error::GridTooSmall => f.write_str("grid too small"),
            Error::SequenceNotMonotone { level } => {
                write!(f, "sequence not monotone (level {level})")
            }
            Error::InvalidSlit { axis, i, j } => {
                write!(f, "slit face ({axis}, {i}, {j}) is not interior to the mask")
            }
            Error::GridMismatch => f.write_str("fields live on different grids"),
            Error::NonNestedGrids => f.write_str("grids are not factor-2 nested"),
            Error::EmptyMask => f.write_str("mask has no cells"),
            Error::NoInteriorDofs => f.write_str("no interior DOFs"),
            Error::AssemblyAsymmetry { row, col, delta } => {
                write!(f, "assembly asymmetry at ({row}, {col}): {delta:e}")
            }
            Error::BadNullspace { index, defect } => {
                write!(f, "nullspace vector {index} has defect {defect:e}")
            }
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::NotConverged { stats, .. } => write!(
                f,
                "solver did not converge: {} iterations, residual {:e}",
                stats.iterations, stats.residual
            ),
            Error::InvalidExperiment(msg) => write!(f, "invalid experiment: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
