//! Domain-perturbation experiments.
//!
//! An experiment solves one resolvent problem per domain of a monotone
//! sequence `Ω_n`, extends each solution by zero, and measures its `L²`
//! distance on `Ω` to a reference solution on the limit domain. Two styles
//! are supported:
//!
//! * fixed grid: the sequence comes from a [`Family`] on one grid and the
//!   reference is the solve on the limit mask of that grid,
//! * refined: a continuum shape is rasterized on grids with `h` halving per
//!   level, and the reference is the same shape solved one level finer.

mod forcing;

use alloc::vec;
use alloc::vec::Vec;

pub use forcing::Forcing;

use crate::error::{Error, Result};
use crate::fields::{face_dofs, vertex_dofs, GridField, MacField, VertexField};
use crate::float::log2;
use crate::geometry::{make_sequence, Direction, DomainMask, Face, Family, Grid, GridSlit, Policy, ShapeSpec};
use crate::leray::{BcMode, Projector};
use crate::resolvents::{laplace_resolvent, stokes_resolvent, LaplaceField, LaplaceProblem, StokesProblem};
use crate::solver::{SolveOptions, SolveStats};

/// Runs independent jobs, returning results in job order.
pub trait Executor {
    fn map<T, F>(&self, jobs: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync;
}

/// Runs jobs one after another on the calling thread.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl Executor for Sequential {
    fn map<T, F>(&self, jobs: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync,
    {
        (0..jobs).map(f).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Operator {
    ScalarLaplace,
    VectorLaplace,
    Stokes,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Style {
    FixedGrid { grid: Grid, family: Family },
    /// Square grids `Grid::new(origin, extent/N, N, N)` for each `N` in
    /// `resolutions`, which must double from level to level.
    Refined { shape: ShapeSpec, policy: Policy, origin: [f64; 2], extent: f64, resolutions: Vec<usize> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Reference {
    /// Fixed grid: the limit mask. Refined: the shape rasterized one level
    /// finer than the last resolution.
    #[default]
    LimitMask,
    /// The last level of the sequence, solved in the limit mode.
    FinestLevel,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub operator: Operator,
    pub direction: Direction,
    pub style: Style,
    pub forcing: Forcing,
    pub solver: SolveOptions,
    pub reference: Reference,
    /// Mode of the per-level solves; defaults to `Weak` when increasing and
    /// `Pseudo` when decreasing.
    pub level_mode: Option<BcMode>,
    /// Mode of the limit solve; same defaults.
    pub limit_mode: Option<BcMode>,
}

impl ExperimentSpec {
    pub fn new(operator: Operator, direction: Direction, style: Style, forcing: Forcing) -> Self {
        ExperimentSpec {
            operator,
            direction,
            style,
            forcing,
            solver: SolveOptions::default(),
            reference: Reference::LimitMask,
            level_mode: None,
            limit_mode: None,
        }
    }

    fn default_mode(&self) -> BcMode {
        match self.direction {
            Direction::Increasing => BcMode::Weak,
            Direction::Decreasing => BcMode::Pseudo,
        }
    }

    pub fn level_mode(&self) -> BcMode {
        self.level_mode.unwrap_or_else(|| self.default_mode())
    }

    pub fn limit_mode(&self) -> BcMode {
        self.limit_mode.unwrap_or_else(|| self.default_mode())
    }

    pub fn with_level_mode(mut self, mode: BcMode) -> Self {
        self.level_mode = Some(mode);
        self
    }
}

/// One row of a [`ConvergenceReport`].
#[derive(Debug, Clone, PartialEq)]
pub struct LevelRecord {
    pub n: usize,
    pub h: f64,
    pub dofs: usize,
    /// `‖ũ_n|_Ω - u_ref‖` on the reference grid.
    pub error: f64,
    /// `log₂(e_{n-1}/e_n)`, absent on the first level or when an error is zero.
    pub rate: Option<f64>,
    pub stats: SolveStats,
    pub mode: BcMode,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub operator: Operator,
    pub direction: Direction,
    pub level_mode: BcMode,
    pub limit_mode: BcMode,
    pub levels: Vec<LevelRecord>,
    pub reference_norm: f64,
    pub reference_dofs: usize,
    /// Refined style: distance at the finest level between the solutions on
    /// the shape rasterized with the experiment's policy and with the
    /// opposite policy.
    pub floor: Option<f64>,
    /// Some error grew from one level to the next.
    pub non_monotone: bool,
    pub reference_solution: LaplaceField,
    pub final_solution: LaplaceField,
}

/// Relative slack used when comparing consecutive errors.
const GROWTH_SLACK: f64 = 1e-9;

impl ConvergenceReport {
    pub fn errors(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l.error).collect()
    }

    pub fn relative_errors(&self) -> Vec<f64> {
        let r = if self.reference_norm > 0.0 { self.reference_norm } else { 1.0 };
        self.levels.iter().map(|l| l.error / r).collect()
    }

    pub fn final_error(&self) -> f64 {
        self.levels.last().map_or(0.0, |l| l.error)
    }

    /// Each error is below the previous one.
    pub fn strictly_decreasing(&self) -> bool {
        self.levels.windows(2).all(|w| w[1].error < w[0].error)
    }

    /// Monotone errors ending below `factor · floor` (refined style) or at
    /// `1e-8` relative (fixed grid).
    pub fn converged(&self, factor: f64) -> bool {
        if self.non_monotone {
            return false;
        }
        let e = self.final_error();
        match self.floor {
            Some(floor) => e <= factor * floor,
            None => e <= 1e-8 * self.reference_norm.max(f64::MIN_POSITIVE),
        }
    }
}

/// Weak-per-level and pseudo-per-level runs of the same Laplace experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct FamilyReports {
    pub weak: ConvergenceReport,
    pub pseudo: ConvergenceReport,
}

#[derive(Debug, Clone, PartialEq)]
struct Level {
    grid: Grid,
    mask: DomainMask,
    mode: BcMode,
}

struct Plan {
    levels: Vec<Level>,
    reference: Level,
    /// Refined style: the last level rasterized with the opposite policy.
    floor: Option<Level>,
    shape: Option<ShapeSpec>,
}

fn opposite(policy: Policy) -> Policy {
    match policy {
        Policy::Inner => Policy::Outer,
        Policy::Outer | Policy::Center => Policy::Inner,
    }
}

/// Coarse cells, upsampled onto the fine grid, are a subset of the fine cells.
fn upsampled_subset(coarse: &DomainMask, fine: &DomainMask) -> bool {
    let g = *fine.grid();
    (0..g.ny()).all(|j| (0..g.nx()).all(|i| !coarse.contains(i / 2, j / 2) || fine.contains(i, j)))
}

fn upsampled_superset(coarse: &DomainMask, fine: &DomainMask) -> bool {
    let g = *fine.grid();
    (0..g.ny()).all(|j| (0..g.nx()).all(|i| coarse.contains(i / 2, j / 2) || !fine.contains(i, j)))
}

fn plan(spec: &ExperimentSpec) -> Result<Plan> {
    let level_mode = spec.level_mode();
    let limit_mode = spec.limit_mode();
    match &spec.style {
        Style::FixedGrid { grid, family } => {
            let seq = make_sequence(family, grid)?;
            let trivial = seq.masks().iter().all(|m| m == seq.limit());
            if !trivial && seq.direction() != spec.direction {
                return Err(Error::InvalidExperiment(alloc::format!(
                    "family is {:?} but the experiment is {:?}",
                    seq.direction(),
                    spec.direction
                )));
            }
            if seq.is_empty() {
                return Err(Error::InvalidExperiment("no levels".into()));
            }
            let levels = seq
                .masks()
                .iter()
                .map(|m| Level { grid: *grid, mask: m.clone(), mode: level_mode })
                .collect::<Vec<_>>();
            let reference = match spec.reference {
                Reference::LimitMask => Level { grid: *grid, mask: seq.limit().clone(), mode: limit_mode },
                Reference::FinestLevel => Level { mode: limit_mode, ..levels[levels.len() - 1].clone() },
            };
            Ok(Plan { levels, reference, floor: None, shape: None })
        }
        Style::Refined { shape, policy, origin, extent, resolutions } => {
            if resolutions.is_empty() {
                return Err(Error::InvalidExperiment("no levels".into()));
            }
            if resolutions.windows(2).any(|w| w[1] != 2 * w[0]) {
                return Err(Error::NonNestedGrids);
            }
            let grid_at = |n: usize| Grid::new(*origin, extent / n as f64, n, n);
            let mut levels = Vec::with_capacity(resolutions.len());
            for &n in resolutions {
                let grid = grid_at(n)?;
                let mask = crate::geometry::rasterize(shape, &grid, *policy)?;
                levels.push(Level { grid, mask, mode: level_mode });
            }
            let last_n = resolutions[resolutions.len() - 1];
            let reference = match spec.reference {
                Reference::LimitMask => {
                    let grid = grid_at(2 * last_n)?;
                    let mask = crate::geometry::rasterize(shape, &grid, *policy)?;
                    Level { grid, mask, mode: limit_mode }
                }
                Reference::FinestLevel => Level { mode: limit_mode, ..levels[levels.len() - 1].clone() },
            };
            let chain: Vec<&DomainMask> =
                levels.iter().map(|l| &l.mask).chain(core::iter::once(&reference.mask)).collect();
            for (n, w) in chain.windows(2).enumerate() {
                if w[0].grid() == w[1].grid() {
                    continue;
                }
                let ok = match spec.direction {
                    Direction::Increasing => upsampled_subset(w[0], w[1]),
                    Direction::Decreasing => upsampled_superset(w[0], w[1]),
                };
                if !ok {
                    return Err(Error::SequenceNotMonotone { level: n });
                }
            }
            let floor = match spec.reference {
                Reference::LimitMask => {
                    let grid = levels[levels.len() - 1].grid;
                    let mask = crate::geometry::rasterize(shape, &grid, opposite(*policy))?;
                    Some(Level { grid, mask, mode: level_mode })
                }
                Reference::FinestLevel => None,
            };
            Ok(Plan { levels, reference, floor, shape: Some(shape.clone()) })
        }
    }
}

/// Forcing for one level, following the direction's convention.
struct ForcingPipeline<'a> {
    spec: &'a ExperimentSpec,
    /// Fixed grid: the forcing prepared once on the limit mask.
    fixed: Option<LaplaceField>,
    shape: Option<&'a ShapeSpec>,
}

impl<'a> ForcingPipeline<'a> {
    fn new(spec: &'a ExperimentSpec, plan: &'a Plan) -> Result<Self> {
        let fixed = match &spec.style {
            Style::FixedGrid { grid, .. } => {
                let limit = &plan.reference.mask;
                let mode = spec.limit_mode();
                Some(match spec.operator {
                    Operator::ScalarLaplace => {
                        let raw = spec.forcing.scalar(grid);
                        LaplaceField::Scalar(match spec.direction {
                            Direction::Increasing => raw,
                            Direction::Decreasing => raw.restrict(limit, mode),
                        })
                    }
                    Operator::VectorLaplace => {
                        let raw = spec.forcing.vector(grid);
                        LaplaceField::Vector(match spec.direction {
                            Direction::Increasing => raw,
                            Direction::Decreasing => raw.restrict(limit, mode),
                        })
                    }
                    Operator::Stokes => {
                        let raw = spec.forcing.vector(grid);
                        LaplaceField::Vector(Projector::new(limit, mode)?.apply(&raw)?)
                    }
                })
            }
            Style::Refined { .. } => None,
        };
        Ok(ForcingPipeline { spec, fixed, shape: plan.shape.as_ref() })
    }

    fn rhs(&self, level: &Level) -> LaplaceField {
        if let Some(f) = &self.fixed {
            return f.clone();
        }
        let decreasing = self.spec.direction == Direction::Decreasing;
        let shape = self.shape.expect("refined style has a shape");
        match self.spec.operator {
            Operator::ScalarLaplace => {
                let mut f = self.spec.forcing.scalar(&level.grid);
                if decreasing {
                    forcing::zero_outside_vertex(&mut f, shape);
                }
                LaplaceField::Scalar(f)
            }
            Operator::VectorLaplace | Operator::Stokes => {
                let mut f = self.spec.forcing.vector(&level.grid);
                if decreasing {
                    forcing::zero_outside_faces(&mut f, shape);
                }
                LaplaceField::Vector(f)
            }
        }
    }
}

struct Solved {
    field: LaplaceField,
    stats: SolveStats,
    dofs: usize,
}

fn solve_level(spec: &ExperimentSpec, level: &Level, rhs: LaplaceField) -> Result<Solved> {
    match (spec.operator, rhs) {
        (Operator::ScalarLaplace | Operator::VectorLaplace, rhs) => {
            let dofs = match &rhs {
                LaplaceField::Scalar(_) => vertex_dofs(&level.mask, level.mode).len(),
                LaplaceField::Vector(_) => face_dofs(&level.mask, level.mode).len(),
            };
            let p = LaplaceProblem { mask: level.mask.clone(), mode: level.mode, rhs, shift: 1.0, solver: spec.solver };
            let (field, stats) = laplace_resolvent(&p)?;
            Ok(Solved { field, stats, dofs })
        }
        (Operator::Stokes, LaplaceField::Vector(rhs)) => {
            let p = StokesProblem {
                mask: level.mask.clone(),
                mode: level.mode,
                rhs,
                project_rhs: spec.direction == Direction::Increasing,
                shift: 1.0,
                solver: spec.solver,
            };
            let dofs = face_dofs(&level.mask, level.mode).len() + level.mask.cell_count();
            let sol = stokes_resolvent(&p)?;
            Ok(Solved { field: LaplaceField::Vector(sol.velocity), stats: sol.stats, dofs })
        }
        (Operator::Stokes, LaplaceField::Scalar(_)) => {
            Err(Error::InvalidExperiment("the Stokes operator needs a vector forcing".into()))
        }
    }
}

fn prolong_to(field: &LaplaceField, target: &Grid) -> Result<LaplaceField> {
    let mut f = field.clone();
    loop {
        let g = match &f {
            LaplaceField::Scalar(v) => *v.grid(),
            LaplaceField::Vector(v) => *v.grid(),
        };
        if g == *target {
            return Ok(f);
        }
        if g.nx() >= target.nx() {
            return Err(Error::NonNestedGrids);
        }
        let fine = g.refined();
        f = match &f {
            LaplaceField::Scalar(v) => LaplaceField::Scalar(v.prolong(&fine)?),
            LaplaceField::Vector(v) => LaplaceField::Vector(v.prolong(&fine)?),
        };
    }
}

fn restrict(field: &LaplaceField, mask: &DomainMask, mode: BcMode) -> LaplaceField {
    match field {
        LaplaceField::Scalar(v) => LaplaceField::Scalar(v.restrict(mask, mode)),
        LaplaceField::Vector(v) => LaplaceField::Vector(v.restrict(mask, mode)),
    }
}

fn distance(a: &LaplaceField, b: &LaplaceField) -> Result<f64> {
    match (a, b) {
        (LaplaceField::Scalar(x), LaplaceField::Scalar(y)) => Ok(x.minus(y)?.norm()),
        (LaplaceField::Vector(x), LaplaceField::Vector(y)) => Ok(x.minus(y)?.norm()),
        _ => Err(Error::GridMismatch),
    }
}

/// Runs one experiment. Levels identical to the reference problem reuse
/// its solution.
pub fn run_experiment<E: Executor>(spec: &ExperimentSpec, exec: &E) -> Result<ConvergenceReport> {
    let plan = plan(spec)?;
    let pipeline = ForcingPipeline::new(spec, &plan)?;
    let ref_rhs = pipeline.rhs(&plan.reference);

    // job 0: reference; then levels that differ from it; then the floor level
    let mut jobs: Vec<(&Level, LaplaceField)> = vec![(&plan.reference, ref_rhs.clone())];
    let mut level_job = Vec::with_capacity(plan.levels.len());
    for level in &plan.levels {
        let rhs = pipeline.rhs(level);
        if *level == plan.reference && rhs == ref_rhs {
            level_job.push(0);
        } else {
            level_job.push(jobs.len());
            jobs.push((level, rhs));
        }
    }
    let floor_job = plan.floor.as_ref().map(|l| {
        jobs.push((l, pipeline.rhs(l)));
        jobs.len() - 1
    });
    let results = exec.map(jobs.len(), |k| solve_level(spec, jobs[k].0, jobs[k].1.clone()));
    let results = results.into_iter().collect::<Result<Vec<_>>>()?;

    let reference = &results[0];
    let ref_mask = &plan.reference.mask;
    let ref_grid = plan.reference.grid;
    let limit_mode = spec.limit_mode();
    let measure = |field: &LaplaceField| -> Result<f64> {
        let on_ref = restrict(&prolong_to(field, &ref_grid)?, ref_mask, limit_mode);
        distance(&on_ref, &reference.field)
    };

    let mut records: Vec<LevelRecord> = Vec::with_capacity(plan.levels.len());
    for (n, (level, &job)) in plan.levels.iter().zip(&level_job).enumerate() {
        let solved = &results[job];
        let error = measure(&solved.field)?;
        let rate = records
            .last()
            .and_then(|prev| (prev.error > 0.0 && error > 0.0).then(|| log2(prev.error / error)));
        records.push(LevelRecord {
            n,
            h: level.grid.h(),
            dofs: solved.dofs,
            error,
            rate,
            stats: solved.stats,
            mode: level.mode,
        });
    }
    let reference_norm = reference.field.norm();
    let non_monotone = records
        .windows(2)
        .any(|w| w[1].error > w[0].error * (1.0 + GROWTH_SLACK) + 1e-14 * reference_norm);
    let floor = match floor_job {
        Some(k) => {
            let last = &results[level_job[level_job.len() - 1]].field;
            let a = restrict(&prolong_to(last, &ref_grid)?, ref_mask, limit_mode);
            let b = restrict(&prolong_to(&results[k].field, &ref_grid)?, ref_mask, limit_mode);
            Some(distance(&a, &b)?)
        }
        None => None,
    };
    let final_solution = results[level_job[level_job.len() - 1]].field.clone();
    Ok(ConvergenceReport {
        operator: spec.operator,
        direction: spec.direction,
        level_mode: spec.level_mode(),
        limit_mode,
        levels: records,
        reference_norm,
        reference_dofs: reference.dofs,
        floor,
        non_monotone,
        reference_solution: reference.field.clone(),
        final_solution,
    })
}

fn require(spec: &ExperimentSpec, laplace: bool, direction: Direction) -> Result<()> {
    let op_ok = match spec.operator {
        Operator::ScalarLaplace | Operator::VectorLaplace => laplace,
        Operator::Stokes => !laplace,
    };
    if !op_ok || spec.direction != direction {
        return Err(Error::InvalidExperiment(alloc::format!(
            "expected a {} experiment with {:?} domains",
            if laplace { "Laplace" } else { "Stokes" },
            direction
        )));
    }
    Ok(())
}

fn both_families<E: Executor>(spec: &ExperimentSpec, exec: &E) -> Result<FamilyReports> {
    let weak = run_experiment(&spec.clone().with_level_mode(BcMode::Weak), exec)?;
    let pseudo = run_experiment(&spec.clone().with_level_mode(BcMode::Pseudo), exec)?;
    Ok(FamilyReports { weak, pseudo })
}

/// Increasing domains: both the weak and the pseudo resolvents on `Ω_n`
/// are compared with the weak limit on `Ω`.
pub fn run_laplace_increasing<E: Executor>(spec: &ExperimentSpec, exec: &E) -> Result<FamilyReports> {
    require(spec, true, Direction::Increasing)?;
    both_families(spec, exec)
}

/// Decreasing domains: both families are compared with the pseudo limit on `Ω`.
pub fn run_laplace_decreasing<E: Executor>(spec: &ExperimentSpec, exec: &E) -> Result<FamilyReports> {
    require(spec, true, Direction::Decreasing)?;
    both_families(spec, exec)
}

/// Increasing domains, weak Stokes resolvents applied to the re-projected forcing.
pub fn run_stokes_increasing<E: Executor>(spec: &ExperimentSpec, exec: &E) -> Result<ConvergenceReport> {
    require(spec, false, Direction::Increasing)?;
    run_experiment(spec, exec)
}

/// Decreasing domains, pseudo Stokes resolvents applied to the forcing
/// extended by zero.
pub fn run_stokes_decreasing<E: Executor>(spec: &ExperimentSpec, exec: &E) -> Result<ConvergenceReport> {
    require(spec, false, Direction::Decreasing)?;
    run_experiment(spec, exec)
}

/// Input of [`slit_discrimination`].
#[derive(Debug, Clone, PartialEq)]
pub struct DiscriminationSpec {
    pub grid: Grid,
    pub slit: GridSlit,
    pub forcing: Forcing,
    /// Thicknesses of the increasing family, ending at `0`.
    pub thicknesses: Vec<usize>,
    pub solver: SolveOptions,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Discrimination {
    /// `‖u_weak - u_pseudo‖ / ‖u_pseudo‖`.
    pub delta: f64,
    pub weak_norm: f64,
    pub pseudo_norm: f64,
    /// Norm of `u_weak` on the slit faces.
    pub weak_slit_flux: f64,
    /// Norm of `u_pseudo` on the slit faces.
    pub pseudo_slit_flux: f64,
    /// Final level of the increasing run against `u_weak`, relative.
    pub increasing_match: f64,
    /// Final level of the decreasing run against `u_pseudo`, relative.
    pub decreasing_match: f64,
    pub increasing: ConvergenceReport,
    pub decreasing: ConvergenceReport,
}

/// Compares the weak and pseudo Stokes resolvents on a slit square.
///
/// `u_weak` is the limit of the increasing family (slit thickened to each
/// thickness), `u_pseudo` the limit of the decreasing family (the plain
/// square, which contains the closure of the slit square).
pub fn slit_discrimination<E: Executor>(spec: &DiscriminationSpec, exec: &E) -> Result<Discrimination> {
    if spec.thicknesses.last() != Some(&0) {
        return Err(Error::InvalidExperiment("the thickness family must end at the slit".into()));
    }
    let grid = spec.grid;
    let limit = spec.slit.thickened(&grid, 0)?;
    let mut inc = ExperimentSpec::new(
        Operator::Stokes,
        Direction::Increasing,
        Style::FixedGrid { grid, family: Family::SlitThickness { slit: spec.slit, thicknesses: spec.thicknesses.clone() } },
        spec.forcing,
    );
    inc.solver = spec.solver;
    let mut dec = ExperimentSpec::new(
        Operator::Stokes,
        Direction::Decreasing,
        Style::FixedGrid { grid, family: Family::Dilation { base: limit.clone(), offsets: vec![0] } },
        spec.forcing,
    );
    dec.solver = spec.solver;
    let increasing = run_stokes_increasing(&inc, exec)?;
    let decreasing = run_stokes_decreasing(&dec, exec)?;

    let as_vec = |f: &LaplaceField| -> Result<MacField> {
        f.as_vector().cloned().ok_or(Error::InvalidExperiment("expected a velocity".into()))
    };
    let u_weak = as_vec(&increasing.reference_solution)?;
    let u_pseudo = as_vec(&decreasing.reference_solution)?;
    let rel = |a: &MacField, b: &MacField| -> Result<f64> {
        let d = a.minus(b)?.norm();
        let n = b.norm();
        Ok(if n > 0.0 { d / n } else { d })
    };
    let faces: Vec<Face> = spec.slit.faces().collect();
    Ok(Discrimination {
        delta: rel(&u_weak, &u_pseudo)?,
        weak_norm: u_weak.norm(),
        pseudo_norm: u_pseudo.norm(),
        weak_slit_flux: u_weak.norm_on(&faces),
        pseudo_slit_flux: u_pseudo.norm_on(&faces),
        increasing_match: rel(&as_vec(&increasing.final_solution)?, &u_weak)?,
        decreasing_match: rel(&as_vec(&decreasing.final_solution)?, &u_pseudo)?,
        increasing,
        decreasing,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Monotonicity {
    /// `0 ≤ x_a ≤ x_b` everywhere up to the slack.
    pub holds: bool,
    /// Largest `x_a - x_b` (or `-x_a`) found.
    pub max_violation: f64,
    /// Smallest `x_b - x_a` over the unknowns of `Ω_a`.
    pub min_gap: f64,
}

/// Pointwise comparison slack.
pub const MONOTONICITY_SLACK: f64 = 1e-12;

/// Checks the ordering of scalar weak resolvents for nested slit-free masks
/// `a ⊆ b` and a non-negative forcing.
pub fn monotonicity_check(a: &DomainMask, b: &DomainMask, f: &VertexField, solver: SolveOptions) -> Result<Monotonicity> {
    if a.has_slits() || b.has_slits() {
        return Err(Error::InvalidExperiment("monotonicity needs slit-free masks".into()));
    }
    if !a.cells_subset_of(b) {
        return Err(Error::SequenceNotMonotone { level: 0 });
    }
    if f.values().iter().any(|v| *v < 0.0) {
        return Err(Error::InvalidExperiment("forcing must be non-negative".into()));
    }
    let solve = |m: &DomainMask| -> Result<VertexField> {
        let p = LaplaceProblem { solver, ..LaplaceProblem::scalar(m.clone(), BcMode::Weak, f.clone()) };
        match laplace_resolvent(&p) {
            Ok((x, _)) => Ok(x.as_scalar().cloned().expect("scalar problem")),
            Err(Error::NoInteriorDofs) => Ok(VertexField::zeros(*m.grid())),
            Err(e) => Err(e),
        }
    };
    let xa = solve(a)?;
    let xb = solve(b)?;
    let dofs_a = vertex_dofs(a, BcMode::Weak);
    let mut max_violation: f64 = f64::NEG_INFINITY;
    for (va, vb) in xa.values().iter().zip(xb.values()) {
        max_violation = max_violation.max(va - vb).max(-va);
    }
    let min_gap = dofs_a
        .active()
        .iter()
        .map(|&k| xb.values()[k] - xa.values()[k])
        .fold(f64::INFINITY, f64::min);
    Ok(Monotonicity { holds: max_violation <= MONOTONICITY_SLACK, max_violation, min_gap })
}
