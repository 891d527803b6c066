//! Orthogonal splitting of discrete `L²` velocity fields into a solenoidal
//! part and a gradient part.
//!
//! In [`BcMode::Weak`] the solenoidal space consists of discretely
//! divergence-free fields with zero normal flux through the outer wall and
//! through every slit face. In [`BcMode::Pseudo`] slit faces are ordinary
//! interior faces, so the solenoidal space is larger. Fields are first
//! restricted to the active faces of the chosen mode.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::fields::{cell_dofs, div_h, face_dofs, CellField, DofMap, GridField, MacField};
use crate::geometry::{DomainMask, FaceAxis};
use crate::solver::{cg, CsrMatrix, SolveOptions, SolveStats, SparseSystem, SystemKind};

/// Boundary treatment of slits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum BcMode {
    /// Slits are walls.
    #[default]
    Weak,
    /// Slits are invisible.
    Pseudo,
}

impl BcMode {
    #[inline]
    pub fn sees_slits(self) -> bool {
        matches!(self, BcMode::Weak)
    }

    pub fn name(self) -> &'static str {
        match self {
            BcMode::Weak => "weak",
            BcMode::Pseudo => "pseudo",
        }
    }
}

impl core::fmt::Display for BcMode {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.name())
    }
}

impl core::str::FromStr for BcMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "weak" => Ok(BcMode::Weak),
            "pseudo" => Ok(BcMode::Pseudo),
            other => Err(Error::InvalidExperiment(alloc::format!("unknown mode '{other}'"))),
        }
    }
}

/// Result of [`project`]: `solenoidal + gradient` equals the input restricted
/// to the active faces of `mode`.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    pub solenoidal: MacField,
    pub gradient: MacField,
    /// Zero mean on every pressure component.
    pub potential: CellField,
    pub mode: BcMode,
    pub stats: SolveStats,
}

/// Relative tolerance of the pressure Poisson solve.
pub const POISSON_TOL: f64 = 1e-12;

/// Sparse `grad_h` from mask cells to active faces, entries `±1/h`.
pub fn gradient_matrix(
    mask: &DomainMask,
    mode: BcMode,
    faces: &DofMap<MacField>,
    cells: &DofMap<CellField>,
) -> CsrMatrix {
    let g = *mask.grid();
    let inv_h = 1.0 / g.h();
    let mut t = Vec::with_capacity(2 * faces.len());
    for (row, &flat) in faces.active().iter().enumerate() {
        let nx_faces = g.face_count(FaceAxis::X);
        let face = if flat < nx_faces {
            g.face_at(FaceAxis::X, flat)
        } else {
            g.face_at(FaceAxis::Y, flat - nx_faces)
        };
        debug_assert!(mask.face_is_active(face, mode));
        if let (Some(a), Some(b)) = g.face_cells(face) {
            let ca = cells.dof(g.cell_index(a.0, a.1)).expect("active face has mask cells");
            let cb = cells.dof(g.cell_index(b.0, b.1)).expect("active face has mask cells");
            t.push((row, ca, -inv_h));
            t.push((row, cb, inv_h));
        }
    }
    CsrMatrix::from_triplets(faces.len(), cells.len(), t)
}

/// Indicator vectors (over cell DOFs) of the pressure components.
pub fn component_indicators(mask: &DomainMask, mode: BcMode, cells: &DofMap<CellField>) -> Vec<Vec<f64>> {
    let comps = mask.components(mode);
    let mut out = vec![vec![0.0; cells.len()]; comps.count];
    for (d, &flat) in cells.active().iter().enumerate() {
        if let Some(c) = comps.labels[flat] {
            out[c][d] = 1.0;
        }
    }
    out
}

/// Reusable projector for one mask and mode.
#[derive(Debug, Clone)]
pub struct Projector {
    mask: DomainMask,
    mode: BcMode,
    faces: DofMap<MacField>,
    cells: DofMap<CellField>,
    grad: CsrMatrix,
    div: CsrMatrix,
    poisson: SparseSystem,
    opts: SolveOptions,
}

impl Projector {
    pub fn new(mask: &DomainMask, mode: BcMode) -> Result<Self> {
        if mask.is_empty() {
            return Err(Error::EmptyMask);
        }
        let faces = face_dofs(mask, mode);
        let cells = cell_dofs(mask);
        let grad = gradient_matrix(mask, mode, &faces, &cells);
        let div = grad.transpose();
        let poisson = SparseSystem::new(
            div.matmul(&grad),
            SystemKind::Spd,
            component_indicators(mask, mode, &cells),
        )?;
        Ok(Projector {
            mask: mask.clone(),
            mode,
            faces,
            cells,
            grad,
            div,
            poisson,
            opts: SolveOptions::with_tol(POISSON_TOL),
        })
    }

    pub fn mode(&self) -> BcMode {
        self.mode
    }

    pub fn mask(&self) -> &DomainMask {
        &self.mask
    }

    pub fn component_count(&self) -> usize {
        self.poisson.nullspace().len()
    }

    pub fn decompose(&self, f: &MacField) -> Result<Decomposition> {
        if f.grid() != self.mask.grid() {
            return Err(Error::GridMismatch);
        }
        let fa = self.faces.gather(f);
        let rhs = self.div.mul_vec(&fa);
        let (phi, stats) = cg(&self.poisson, &rhs, &self.opts)?;
        let ga = self.grad.mul_vec(&phi);
        let sa: Vec<f64> = fa.iter().zip(&ga).map(|(a, b)| a - b).collect();
        Ok(Decomposition {
            solenoidal: self.faces.scatter(&sa),
            gradient: self.faces.scatter(&ga),
            potential: self.cells.scatter(&phi),
            mode: self.mode,
            stats,
        })
    }

    /// The solenoidal part only.
    pub fn apply(&self, f: &MacField) -> Result<MacField> {
        Ok(self.decompose(f)?.solenoidal)
    }
}

/// Splits `f` (restricted to the active faces of `mode`) into its solenoidal
/// and gradient parts.
pub fn project(f: &MacField, mask: &DomainMask, mode: BcMode) -> Result<Decomposition> {
    Projector::new(mask, mode)?.decompose(f)
}

/// Defects reported by [`is_in_solenoidal`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolenoidalCheck {
    pub is_solenoidal: bool,
    /// `h · ‖div_h f‖` over mask cells: the net flux out of each cell.
    pub div_defect: f64,
    /// Norm of `f` on inactive faces (walls, outside, and slits in `Weak` mode).
    pub flux_defect: f64,
    /// `‖f - P f‖` for the projection of `mode`.
    pub distance: f64,
}

/// Membership test for the solenoidal space of `mode`, relative tolerance `1e-10`.
pub fn is_in_solenoidal(f: &MacField, mask: &DomainMask, mode: BcMode) -> Result<SolenoidalCheck> {
    let h = mask.grid().h();
    let f_norm = f.norm();
    let div_defect = h * div_h(f).restrict(mask).norm();
    let flux_defect = f.minus(&f.restrict(mask, mode))?.norm();
    let distance = f.minus(&project(f, mask, mode)?.solenoidal)?.norm();
    let tol = 1e-10 * f_norm;
    Ok(SolenoidalCheck {
        is_solenoidal: div_defect <= tol && flux_defect <= tol,
        div_defect,
        flux_defect,
        distance,
    })
}

/// Largest `‖P_weak g - P_pseudo g‖` over `samples` random unit fields `g`
/// supported on the pseudo-active faces.
pub fn subspace_gap(mask: &DomainMask, samples: usize, seed: u64) -> Result<f64> {
    let weak = Projector::new(mask, BcMode::Weak)?;
    let pseudo = Projector::new(mask, BcMode::Pseudo)?;
    let faces = face_dofs(mask, BcMode::Pseudo);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut gap: f64 = 0.0;
    for _ in 0..samples {
        let values: Vec<f64> = (0..faces.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mut g = faces.scatter(&values);
        let n = g.norm();
        if n == 0.0 {
            continue;
        }
        g.scale(1.0 / n);
        let d = weak.apply(&g)?.minus(&pseudo.apply(&g)?)?.norm();
        gap = gap.max(d);
    }
    Ok(gap)
}
