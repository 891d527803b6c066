//! Resolvents of the Dirichlet-type Laplace and Stokes operators at a fixed
//! discretization.
//!
//! Each solver applies `(shift·I + L)⁻¹` with `shift = 1` by default, where
//! `L` is the scalar Laplacian on vertices, the componentwise vector
//! Laplacian on faces, or the Stokes operator (vector Laplacian on the
//! divergence-free subspace). The Stokes resolvent is computed twice: as a
//! symmetric saddle point system, and independently through stream
//! functions.

mod assembly;

use alloc::vec::Vec;

pub use assembly::{
    assemble_scalar_laplace, assemble_stokes, assemble_vector_laplace, stream_basis, vector_stiffness,
    ScalarLaplaceSystem, StokesSystem, StreamBasis, VectorLaplaceSystem,
};

use crate::error::{Error, Result};
use crate::fields::{CellField, GridField, MacField, VertexField};
use crate::geometry::DomainMask;
use crate::leray::{BcMode, Projector};
use crate::solver::{cg, minres, CsrMatrix, SolveOptions, SolveStats, SparseSystem, SystemKind};
use crate::timer::Timer;

/// Right-hand side or solution of a Laplace resolvent.
#[derive(Debug, Clone, PartialEq)]
pub enum LaplaceField {
    Scalar(VertexField),
    Vector(MacField),
}

impl LaplaceField {
    pub fn as_scalar(&self) -> Option<&VertexField> {
        match self {
            LaplaceField::Scalar(f) => Some(f),
            LaplaceField::Vector(_) => None,
        }
    }

    pub fn as_vector(&self) -> Option<&MacField> {
        match self {
            LaplaceField::Vector(f) => Some(f),
            LaplaceField::Scalar(_) => None,
        }
    }

    pub fn norm(&self) -> f64 {
        match self {
            LaplaceField::Scalar(f) => f.norm(),
            LaplaceField::Vector(f) => f.norm(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LaplaceProblem {
    pub mask: DomainMask,
    pub mode: BcMode,
    pub rhs: LaplaceField,
    pub shift: f64,
    pub solver: SolveOptions,
}

impl LaplaceProblem {
    pub fn scalar(mask: DomainMask, mode: BcMode, rhs: VertexField) -> Self {
        LaplaceProblem { mask, mode, rhs: LaplaceField::Scalar(rhs), shift: 1.0, solver: SolveOptions::default() }
    }

    pub fn vector(mask: DomainMask, mode: BcMode, rhs: MacField) -> Self {
        LaplaceProblem { mask, mode, rhs: LaplaceField::Vector(rhs), shift: 1.0, solver: SolveOptions::default() }
    }
}

/// Solves `(shift·I - Δ_h) x = rhs` on the active unknowns with CG.
/// The returned field is zero off the active set.
pub fn laplace_resolvent(p: &LaplaceProblem) -> Result<(LaplaceField, SolveStats)> {
    if p.rhs_grid() != p.mask.grid() {
        return Err(Error::GridMismatch);
    }
    match &p.rhs {
        LaplaceField::Scalar(f) => {
            let s = assemble_scalar_laplace(&p.mask, p.mode, p.shift)?;
            let (x, stats) = cg(&s.system, &s.dofs.gather(f), &p.solver)?;
            Ok((LaplaceField::Scalar(s.dofs.scatter(&x)), stats))
        }
        LaplaceField::Vector(f) => {
            let s = assemble_vector_laplace(&p.mask, p.mode, p.shift)?;
            let (x, stats) = cg(&s.system, &s.dofs.gather(f), &p.solver)?;
            Ok((LaplaceField::Vector(s.dofs.scatter(&x)), stats))
        }
    }
}

impl LaplaceProblem {
    fn rhs_grid(&self) -> &crate::geometry::Grid {
        match &self.rhs {
            LaplaceField::Scalar(f) => f.grid(),
            LaplaceField::Vector(f) => f.grid(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StokesProblem {
    pub mask: DomainMask,
    pub mode: BcMode,
    pub rhs: MacField,
    /// Project the right-hand side onto the solenoidal space of `mode` first.
    pub project_rhs: bool,
    pub shift: f64,
    pub solver: SolveOptions,
}

impl StokesProblem {
    pub fn new(mask: DomainMask, mode: BcMode, rhs: MacField) -> Self {
        StokesProblem { mask, mode, rhs, project_rhs: false, shift: 1.0, solver: SolveOptions::default() }
    }

    pub fn projected(mut self, yes: bool) -> Self {
        self.project_rhs = yes;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StokesSolution {
    pub velocity: MacField,
    /// Zero mean on every pressure component. When the right-hand side was
    /// projected, the removed gradient's potential is included, so the pair
    /// solves the saddle system for the original right-hand side.
    pub pressure: CellField,
    pub stats: SolveStats,
}

/// Saddle point solve of `shift·u - Δ_h u + grad_h p = rhs`, `div_h u = 0`
/// with MINRES and per-component pressure deflation.
pub fn stokes_resolvent(p: &StokesProblem) -> Result<StokesSolution> {
    let sys = assemble_stokes(&p.mask, p.mode, p.shift)?;
    stokes_resolvent_with(&sys, p)
}

/// Like [`stokes_resolvent`], reusing an assembled system for `(p.mask, p.mode)`.
pub fn stokes_resolvent_with(sys: &StokesSystem, p: &StokesProblem) -> Result<StokesSolution> {
    if p.rhs.grid() != p.mask.grid() {
        return Err(Error::GridMismatch);
    }
    let timer = Timer::start();
    let (rhs, potential, pstats) = if p.project_rhs {
        let d = Projector::new(&p.mask, p.mode)?.decompose(&p.rhs)?;
        (d.solenoidal, Some(d.potential), d.stats)
    } else {
        (p.rhs.clone(), None, SolveStats::default())
    };
    let mut b = sys.faces.gather(&rhs);
    b.resize(sys.system.dim(), 0.0);
    let (x, stats) = minres(&sys.system, &b, &p.solver)?;
    let nu = sys.velocity_len();
    let velocity = sys.faces.scatter(&x[..nu]);
    let mut pressure = sys.cells.scatter(&x[nu..]);
    if let Some(phi) = potential {
        pressure.axpy(1.0, &phi)?;
    }
    let stats = SolveStats {
        iterations: stats.iterations + pstats.iterations,
        residual: stats.residual,
        seconds: timer.seconds(),
    };
    Ok(StokesSolution { velocity, pressure, stats })
}

/// Velocity from the stream-function formulation.
#[derive(Debug, Clone, PartialEq)]
pub struct StreamSolution {
    pub velocity: MacField,
    pub stream: VertexField,
    pub stats: SolveStats,
}

/// Tolerance of the stream-function CG solve; its operator is fourth order.
pub const STREAM_TOL: f64 = 1e-12;

/// Solves `Cᵀ(shift·I + A)C ψ = Cᵀ rhs` with CG and returns `u = Cψ`.
///
/// `C` is `curl_h` on admissible stream functions: zero on the outer wall,
/// one free constant per inner wall (and per slit in `Weak` mode).
pub fn stokes_resolvent_streamfn(p: &StokesProblem) -> Result<StreamSolution> {
    if p.rhs.grid() != p.mask.grid() {
        return Err(Error::GridMismatch);
    }
    let timer = Timer::start();
    let basis = stream_basis(&p.mask, p.mode)?;
    let g = *p.mask.grid();
    if basis.unknowns == 0 {
        return Ok(StreamSolution {
            velocity: MacField::zeros(g),
            stream: VertexField::zeros(g),
            stats: SolveStats { seconds: timer.seconds(), ..Default::default() },
        });
    }
    let a = vector_stiffness(&p.mask, p.mode, &basis.faces);
    let ct = basis.curl.transpose();
    let mut k: Vec<_> = a.triplets().collect();
    k.extend((0..a.nrows()).map(|i| (i, i, p.shift)));
    let k = CsrMatrix::from_triplets(a.nrows(), a.ncols(), k);
    let op = ct.matmul(&k.matmul(&basis.curl));
    let op = symmetrize(&op);
    let system = SparseSystem::new(op, SystemKind::Spd, Vec::new())?;
    let b = ct.mul_vec(&basis.faces.gather(&p.rhs));
    let opts = SolveOptions { tol: p.solver.tol.min(STREAM_TOL), ..p.solver };
    let (psi, stats) = cg(&system, &b, &opts)?;
    let velocity = basis.faces.scatter(&basis.curl.mul_vec(&psi));
    let stream_values = basis
        .vertex_unknown
        .iter()
        .map(|u| u.map_or(0.0, |c| psi[c]))
        .collect();
    let stream = VertexField::from_values(g, stream_values)?;
    Ok(StreamSolution { velocity, stream, stats: SolveStats { seconds: timer.seconds(), ..stats } })
}

/// Averages `M` and `Mᵀ` to remove round-off asymmetry of a triple product.
fn symmetrize(m: &CsrMatrix) -> CsrMatrix {
    let mut t: Vec<_> = m.triplets().map(|(r, c, v)| (r, c, 0.5 * v)).collect();
    t.extend(m.triplets().map(|(r, c, v)| (c, r, 0.5 * v)));
    CsrMatrix::from_triplets(m.nrows(), m.ncols(), t)
}

/// Whether the assembled systems of `mode` on `mask` are identical (same
/// unknowns, sparsity and values) to those on `mask` without slits.
pub fn mode_equals_slitfree(mask: &DomainMask, mode: BcMode) -> Result<bool> {
    let plain = mask.without_slits();
    let a = assemble_stokes(mask, mode, 1.0)?;
    let b = assemble_stokes(&plain, mode, 1.0)?;
    if a.faces.active() != b.faces.active() || a.system.matrix() != b.system.matrix() {
        return Ok(false);
    }
    let a = assemble_vector_laplace(mask, mode, 1.0)?;
    let b = assemble_vector_laplace(&plain, mode, 1.0)?;
    if a.dofs.active() != b.dofs.active() || a.system.matrix() != b.system.matrix() {
        return Ok(false);
    }
    let a = assemble_scalar_laplace(mask, mode, 1.0)?;
    let b = assemble_scalar_laplace(&plain, mode, 1.0)?;
    Ok(a.dofs.active() == b.dofs.active() && a.system.matrix() == b.system.matrix())
}

/// Pseudo-mode operators cannot see slits.
pub fn pseudo_equals_slitfree(mask: &DomainMask) -> Result<bool> {
    mode_equals_slitfree(mask, BcMode::Pseudo)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{div_h, face_dofs, grad_h};
    use crate::geometry::{rasterize, FaceAxis, Grid, GridSlit, Policy, ShapeSpec};

    fn lcg(seed: &mut u64) -> f64 {
        *seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((*seed >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
    }

    fn random_field(mask: &DomainMask, mode: BcMode, seed: &mut u64) -> MacField {
        let map = face_dofs(mask, mode);
        let v: Vec<f64> = (0..map.len()).map(|_| lcg(seed)).collect();
        map.scatter(&v)
    }

    fn slit_square(n: usize) -> DomainMask {
        let g = Grid::unit_square(n);
        GridSlit::middle_half(&g, FaceAxis::X).thickened(&g, 0).unwrap()
    }

    #[test]
    fn scalar_single_vertex() {
        let g = Grid::unit_square(2);
        let p = LaplaceProblem::scalar(DomainMask::full(g), BcMode::Weak, VertexField::constant(g, 1.0));
        let (x, _) = laplace_resolvent(&p).unwrap();
        assert!((x.as_scalar().unwrap().get(1, 1) - 1.0 / 17.0).abs() < 1e-14);
        let p = LaplaceProblem::scalar(DomainMask::full(g), BcMode::Weak, VertexField::zeros(g));
        assert_eq!(laplace_resolvent(&p).unwrap().0.norm(), 0.0);
    }

    #[test]
    fn no_interior_dofs() {
        let g = Grid::unit_square(4);
        let mask = DomainMask::from_block(g, 0, 1, 0, 1);
        let p = LaplaceProblem::scalar(mask, BcMode::Weak, VertexField::constant(g, 1.0));
        assert_eq!(laplace_resolvent(&p).err(), Some(Error::NoInteriorDofs));
    }

    #[test]
    fn gradient_rhs_gives_zero_velocity() {
        let mask = slit_square(8);
        let phi = CellField::from_fn(*mask.grid(), |x, y| x * x - y);
        let f = grad_h(&phi, &mask, BcMode::Weak);
        let sol = stokes_resolvent(&StokesProblem::new(mask.clone(), BcMode::Weak, f.clone()).projected(true)).unwrap();
        assert!(sol.velocity.norm() <= 1e-9 * f.norm());
    }

    #[test]
    fn constant_forcing_symmetry() {
        let g = Grid::unit_square(8);
        let mask = DomainMask::full(g);
        let sol = stokes_resolvent(&StokesProblem::new(mask, BcMode::Weak, MacField::constant(g, [1.0, 0.0]))).unwrap();
        // a uniform field is a gradient, so build a non-trivial flow by rotation
        let n = sol.velocity.norm();
        assert!(n < 1e-8);
        let f = MacField::from_fn(g, |_, y| [y * (1.0 - y), 0.0]);
        let u = stokes_resolvent(&StokesProblem::new(DomainMask::full(g), BcMode::Weak, f)).unwrap().velocity;
        for j in 0..8 {
            for i in 1..8 {
                let a = u.get(crate::Face::x(i, j));
                let b = u.get(crate::Face::x(i, 7 - j));
                assert!((a - b).abs() < 1e-9);
            }
        }
        for j in 1..8 {
            for i in 0..8 {
                let a = u.get(crate::Face::y(i, j));
                let b = u.get(crate::Face::y(i, 8 - j));
                assert!((a + b).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn solution_invariants() {
        let mut seed = 9;
        let mask = slit_square(16);
        for mode in [BcMode::Weak, BcMode::Pseudo] {
            let f = random_field(&mask, BcMode::Pseudo, &mut seed);
            let sol = stokes_resolvent(&StokesProblem::new(mask.clone(), mode, f.clone())).unwrap();
            let h = mask.grid().h();
            assert!(h * div_h(&sol.velocity).restrict(&mask).norm() <= 1e-9 * f.norm());
            assert_eq!(sol.velocity.restrict(&mask, mode), sol.velocity);
            let comps = mask.components(mode);
            let mut sums = alloc::vec![0.0; comps.count];
            for (k, c) in comps.labels.iter().enumerate() {
                if let Some(c) = c {
                    sums[*c] += sol.pressure.values()[k];
                }
            }
            assert!(sums.iter().all(|s| s.abs() < 1e-8));
            let psi = stokes_resolvent_streamfn(&StokesProblem::new(mask.clone(), mode, f)).unwrap();
            let rel = psi.velocity.minus(&sol.velocity).unwrap().norm() / sol.velocity.norm();
            assert!(rel <= 1e-6, "{mode}: {rel}");
            if mode == BcMode::Weak {
                for face in mask.slits() {
                    assert!(psi.velocity.get(*face).abs() <= 1e-10);
                }
            }
        }
    }

    #[test]
    fn stream_zero_rhs() {
        let g = Grid::unit_square(8);
        let s = stokes_resolvent_streamfn(&StokesProblem::new(DomainMask::full(g), BcMode::Weak, MacField::zeros(g))).unwrap();
        assert_eq!(s.velocity.norm(), 0.0);
        assert_eq!(s.stream.norm(), 0.0);
    }

    #[test]
    fn self_adjoint_and_contractive() {
        let mut seed = 21;
        let g = Grid::unit_square(12);
        let mask = rasterize(&ShapeSpec::Disk { center: [0.5, 0.5], radius: 0.45 }, &g, Policy::Center).unwrap();
        let proj = Projector::new(&mask, BcMode::Weak).unwrap();
        let f = proj.apply(&random_field(&mask, BcMode::Weak, &mut seed)).unwrap();
        let gg = proj.apply(&random_field(&mask, BcMode::Weak, &mut seed)).unwrap();
        let rf = stokes_resolvent(&StokesProblem::new(mask.clone(), BcMode::Weak, f.clone())).unwrap().velocity;
        let rg = stokes_resolvent(&StokesProblem::new(mask.clone(), BcMode::Weak, gg.clone())).unwrap().velocity;
        let a = rf.inner(&gg).unwrap();
        let b = f.inner(&rg).unwrap();
        assert!((a - b).abs() <= 1e-8 * f.norm() * gg.norm());
        assert!(rf.norm() <= f.norm());
    }

    #[test]
    fn slit_free_comparisons() {
        let mask = slit_square(8);
        assert!(pseudo_equals_slitfree(&mask).unwrap());
        assert!(!mode_equals_slitfree(&mask, BcMode::Weak).unwrap());
        let plain = DomainMask::full(Grid::unit_square(8));
        assert!(pseudo_equals_slitfree(&plain).unwrap());
        assert!(mode_equals_slitfree(&plain, BcMode::Weak).unwrap());
    }
}
