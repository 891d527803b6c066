use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::fields::{cell_dofs, face_dofs, vertex_dofs, CellField, DofMap, MacField, VertexField};
use crate::geometry::{DomainMask, Face, FaceAxis, Grid};
use crate::leray::{component_indicators, gradient_matrix, BcMode};
use crate::solver::{CsrMatrix, SparseSystem, SystemKind};

/// `shift·I - Δ_h` on scalar vertex unknowns, zero Dirichlet data elsewhere.
#[derive(Debug, Clone)]
pub struct ScalarLaplaceSystem {
    pub system: SparseSystem,
    pub dofs: DofMap<VertexField>,
}

/// `shift·I + A` on active velocity faces.
#[derive(Debug, Clone)]
pub struct VectorLaplaceSystem {
    pub system: SparseSystem,
    pub dofs: DofMap<MacField>,
}

/// The saddle operator `[[shift·I + A, G], [Gᵀ, 0]]`, velocity unknowns first.
#[derive(Debug, Clone)]
pub struct StokesSystem {
    pub system: SparseSystem,
    pub faces: DofMap<MacField>,
    pub cells: DofMap<CellField>,
}

impl StokesSystem {
    pub fn velocity_len(&self) -> usize {
        self.faces.len()
    }
}

pub fn assemble_scalar_laplace(mask: &DomainMask, mode: BcMode, shift: f64) -> Result<ScalarLaplaceSystem> {
    let dofs = vertex_dofs(mask, mode);
    if dofs.is_empty() {
        return Err(Error::NoInteriorDofs);
    }
    let g = *mask.grid();
    let inv_h2 = 1.0 / (g.h() * g.h());
    let mut t = Vec::with_capacity(5 * dofs.len());
    for (row, &flat) in dofs.active().iter().enumerate() {
        let (i, j) = (flat % (g.nx() + 1), flat / (g.nx() + 1));
        t.push((row, row, shift + 4.0 * inv_h2));
        let nbs = [
            i.checked_sub(1).map(|a| (a, j)),
            (i < g.nx()).then_some((i + 1, j)),
            j.checked_sub(1).map(|b| (i, b)),
            (j < g.ny()).then_some((i, j + 1)),
        ];
        for (a, b) in nbs.into_iter().flatten() {
            if let Some(col) = dofs.dof(g.vertex_index(a, b)) {
                t.push((row, col, -inv_h2));
            }
        }
    }
    let system = SparseSystem::assemble(dofs.len(), t, SystemKind::Spd, Vec::new())?;
    Ok(ScalarLaplaceSystem { system, dofs })
}

fn face_active(mask: &DomainMask, mode: BcMode, face: Option<Face>) -> bool {
    match face {
        Some(f) => mask.grid().contains_face(f) && mask.face_is_active(f, mode),
        None => false,
    }
}

fn x_face(g: &Grid, i: Option<usize>, j: Option<usize>) -> Option<Face> {
    let f = Face::x(i?, j?);
    g.contains_face(f).then_some(f)
}

fn y_face(g: &Grid, i: Option<usize>, j: Option<usize>) -> Option<Face> {
    let f = Face::y(i?, j?);
    g.contains_face(f).then_some(f)
}

enum Neighbour {
    /// Across a cell, same line of unknowns.
    Normal(Option<Face>),
    /// Along the wall direction; the two perpendicular faces meet at the shared vertex.
    Tangential(Option<Face>, [Option<Face>; 2]),
}

fn neighbours(g: &Grid, face: Face) -> [Neighbour; 4] {
    let (i, j) = (face.i, face.j);
    let (im, jm) = (i.checked_sub(1), j.checked_sub(1));
    let (i, j) = (Some(i), Some(j));
    let (ip, jp) = (Some(face.i + 1), Some(face.j + 1));
    match face.axis {
        FaceAxis::X => [
            Neighbour::Normal(x_face(g, im, j)),
            Neighbour::Normal(x_face(g, ip, j)),
            Neighbour::Tangential(x_face(g, i, jm), [y_face(g, im, j), y_face(g, i, j)]),
            Neighbour::Tangential(x_face(g, i, jp), [y_face(g, im, jp), y_face(g, i, jp)]),
        ],
        FaceAxis::Y => [
            Neighbour::Normal(y_face(g, i, jm)),
            Neighbour::Normal(y_face(g, i, jp)),
            Neighbour::Tangential(y_face(g, im, j), [x_face(g, i, jm), x_face(g, i, j)]),
            Neighbour::Tangential(y_face(g, ip, j), [x_face(g, ip, jm), x_face(g, ip, j)]),
        ],
    }
}

/// Componentwise 5-point stiffness `A` on active faces (without the shift).
///
/// A tangential neighbour behind a wall (both perpendicular faces at the
/// shared vertex inactive) is a reflected ghost and adds `2/h²` to the
/// diagonal; any other missing neighbour is a zero Dirichlet value and adds `1/h²`.
pub fn vector_stiffness(mask: &DomainMask, mode: BcMode, dofs: &DofMap<MacField>) -> CsrMatrix {
    let g = *mask.grid();
    let inv_h2 = 1.0 / (g.h() * g.h());
    let nxf = g.face_count(FaceAxis::X);
    let mut t = Vec::with_capacity(5 * dofs.len());
    for (row, &flat) in dofs.active().iter().enumerate() {
        let face = if flat < nxf { g.face_at(FaceAxis::X, flat) } else { g.face_at(FaceAxis::Y, flat - nxf) };
        let mut diag = 0.0;
        for nb in neighbours(&g, face) {
            let (other, wall) = match nb {
                Neighbour::Normal(f) => (f, false),
                Neighbour::Tangential(f, perp) => {
                    (f, !face_active(mask, mode, perp[0]) && !face_active(mask, mode, perp[1]))
                }
            };
            if wall {
                diag += 2.0 * inv_h2;
                continue;
            }
            diag += inv_h2;
            if face_active(mask, mode, other) {
                let col = dofs
                    .dof(MacField::flat_index(&g, other.expect("active face exists")))
                    .expect("active face has a dof");
                t.push((row, col, -inv_h2));
            }
        }
        t.push((row, row, diag));
    }
    CsrMatrix::from_triplets(dofs.len(), dofs.len(), t)
}

fn shifted(a: &CsrMatrix, shift: f64) -> CsrMatrix {
    let mut t: Vec<_> = a.triplets().collect();
    t.extend((0..a.nrows()).map(|k| (k, k, shift)));
    CsrMatrix::from_triplets(a.nrows(), a.ncols(), t)
}

pub fn assemble_vector_laplace(mask: &DomainMask, mode: BcMode, shift: f64) -> Result<VectorLaplaceSystem> {
    let dofs = face_dofs(mask, mode);
    if dofs.is_empty() {
        return Err(Error::NoInteriorDofs);
    }
    let a = vector_stiffness(mask, mode, &dofs);
    let system = SparseSystem::new(shifted(&a, shift), SystemKind::Spd, Vec::new())?;
    Ok(VectorLaplaceSystem { system, dofs })
}

pub fn assemble_stokes(mask: &DomainMask, mode: BcMode, shift: f64) -> Result<StokesSystem> {
    if mask.is_empty() {
        return Err(Error::EmptyMask);
    }
    let faces = face_dofs(mask, mode);
    if faces.is_empty() {
        return Err(Error::NoInteriorDofs);
    }
    let cells = cell_dofs(mask);
    let k = shifted(&vector_stiffness(mask, mode, &faces), shift);
    let grad = gradient_matrix(mask, mode, &faces, &cells);
    let nu = faces.len();
    let n = nu + cells.len();
    let mut t: Vec<_> = k.triplets().collect();
    for (r, c, v) in grad.triplets() {
        t.push((r, nu + c, v));
        t.push((nu + c, r, v));
    }
    let nullspace = component_indicators(mask, mode, &cells)
        .into_iter()
        .map(|ind| {
            let mut z = alloc::vec![0.0; nu];
            z.extend(ind);
            z
        })
        .collect();
    let system = SparseSystem::assemble(n, t, SystemKind::SymmetricIndefinite, nullspace)?;
    Ok(StokesSystem { system, faces, cells })
}

/// Stream-function unknowns and the discrete curl restricted to them.
#[derive(Debug, Clone)]
pub struct StreamBasis {
    /// `curl_h` from stream unknowns to active faces.
    pub curl: CsrMatrix,
    pub faces: DofMap<MacField>,
    /// Per vertex, the unknown it is tied to (`None`: fixed at zero).
    pub vertex_unknown: Vec<Option<usize>>,
    pub unknowns: usize,
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

/// Vertices joined by inactive faces share one stream value; the group
/// holding vertex `(0, 0)` is pinned to zero, every other group and every
/// vertex surrounded by active faces is an unknown.
pub fn stream_basis(mask: &DomainMask, mode: BcMode) -> Result<StreamBasis> {
    let g = *mask.grid();
    let faces = face_dofs(mask, mode);
    if faces.is_empty() {
        return Err(Error::NoInteriorDofs);
    }
    let nv = g.vertex_count();
    let mut uf = UnionFind::new(nv);
    let mut touches_wall = alloc::vec![false; nv];
    let mut touches_active = alloc::vec![false; nv];
    for axis in [FaceAxis::X, FaceAxis::Y] {
        for k in 0..g.face_count(axis) {
            let face = g.face_at(axis, k);
            let [(i0, j0), (i1, j1)] = g.face_vertices(face);
            let (a, b) = (g.vertex_index(i0, j0), g.vertex_index(i1, j1));
            if mask.face_is_active(face, mode) {
                touches_active[a] = true;
                touches_active[b] = true;
            } else {
                uf.union(a, b);
                touches_wall[a] = true;
                touches_wall[b] = true;
            }
        }
    }
    let outer = uf.find(g.vertex_index(0, 0));
    let mut root_unknown: Vec<Option<usize>> = alloc::vec![None; nv];
    let mut vertex_unknown = alloc::vec![None; nv];
    let mut unknowns = 0;
    for v in 0..nv {
        if !touches_active[v] {
            continue;
        }
        if !touches_wall[v] {
            vertex_unknown[v] = Some(unknowns);
            unknowns += 1;
            continue;
        }
        let r = uf.find(v);
        if r == outer {
            continue;
        }
        let id = *root_unknown[r].get_or_insert_with(|| {
            unknowns += 1;
            unknowns - 1
        });
        vertex_unknown[v] = Some(id);
    }
    // wall vertices untouched by active faces still follow their group
    for v in 0..nv {
        if vertex_unknown[v].is_none() && touches_wall[v] {
            let r = uf.find(v);
            vertex_unknown[v] = root_unknown[r];
        }
    }
    let inv_h = 1.0 / g.h();
    let mut t = Vec::with_capacity(2 * faces.len());
    for (row, &flat) in faces.active().iter().enumerate() {
        let nxf = g.face_count(FaceAxis::X);
        let face = if flat < nxf { g.face_at(FaceAxis::X, flat) } else { g.face_at(FaceAxis::Y, flat - nxf) };
        let sign = if face.axis == FaceAxis::X { inv_h } else { -inv_h };
        let [(i0, j0), (i1, j1)] = g.face_vertices(face);
        if let Some(c) = vertex_unknown[g.vertex_index(i1, j1)] {
            t.push((row, c, sign));
        }
        if let Some(c) = vertex_unknown[g.vertex_index(i0, j0)] {
            t.push((row, c, -sign));
        }
    }
    let curl = CsrMatrix::from_triplets(faces.len(), unknowns, t);
    // groups whose every face cancelled carry no velocity and would make the system singular
    let ct = curl.transpose();
    let used: Vec<bool> = (0..unknowns).map(|c| ct.row(c).0.iter().next().is_some()).collect();
    if used.iter().all(|&u| u) {
        return Ok(StreamBasis { curl, faces, vertex_unknown, unknowns });
    }
    let mut renum = alloc::vec![None; unknowns];
    let mut kept = 0;
    for (c, &u) in used.iter().enumerate() {
        if u {
            renum[c] = Some(kept);
            kept += 1;
        }
    }
    let vertex_unknown = vertex_unknown.into_iter().map(|v| v.and_then(|c| renum[c])).collect();
    let curl = CsrMatrix::from_triplets(
        faces.len(),
        kept,
        curl.triplets().map(|(r, c, v)| (r, renum[c].expect("kept column"), v)).collect(),
    );
    Ok(StreamBasis { curl, faces, vertex_unknown, unknowns: kept })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::GridSlit;

    #[test]
    fn single_vertex_diagonal() {
        let g = Grid::unit_square(2);
        let s = assemble_scalar_laplace(&DomainMask::full(g), BcMode::Weak, 1.0).unwrap();
        assert_eq!(s.dofs.len(), 1);
        assert_eq!(s.system.matrix().get(0, 0), 17.0);
    }

    #[test]
    fn wall_adjacent_face_gets_ghost() {
        // 2x1 strip: one active u-face, walls above and below
        let g = Grid::new([0.0, 0.0], 1.0, 2, 1).unwrap();
        let s = assemble_vector_laplace(&DomainMask::full(g), BcMode::Weak, 0.0).unwrap();
        assert_eq!(s.dofs.len(), 1);
        // normal neighbours: +1 each, reflected tangential ghosts: +2 each
        assert_eq!(s.system.matrix().get(0, 0), 6.0);
    }

    #[test]
    fn interior_face_stencil() {
        let g = Grid::unit_square(4);
        let mask = DomainMask::full(g);
        let s = assemble_vector_laplace(&mask, BcMode::Weak, 0.0).unwrap();
        let h2 = 1.0 / 16.0;
        let k = s.dofs.dof(MacField::flat_index(&g, Face::x(2, 1))).unwrap();
        let m = s.system.matrix();
        assert!((m.get(k, k) * h2 - 4.0).abs() < 1e-12);
        assert_eq!(m.row(k).0.len(), 5);
    }

    #[test]
    fn slit_cuts_tangential_coupling_only_in_weak_mode() {
        let g = Grid::unit_square(8);
        let slit = GridSlit { axis: FaceAxis::Y, line: 4, start: 2, end: 6 };
        let mask = slit.thickened(&g, 0).unwrap();
        let below = Face::x(3, 3);
        let above = Face::x(3, 4);
        for (mode, coupled) in [(BcMode::Weak, false), (BcMode::Pseudo, true)] {
            let s = assemble_vector_laplace(&mask, mode, 0.0).unwrap();
            let a = s.dofs.dof(MacField::flat_index(&g, below)).unwrap();
            let b = s.dofs.dof(MacField::flat_index(&g, above)).unwrap();
            assert_eq!(s.system.matrix().get(a, b) != 0.0, coupled);
        }
    }

    #[test]
    fn stokes_nullspace_matches_components() {
        let g = Grid::unit_square(6);
        let cut = GridSlit { axis: FaceAxis::X, line: 3, start: 0, end: 6 };
        let mask = DomainMask::full(g).with_slits(cut.faces()).unwrap();
        assert_eq!(assemble_stokes(&mask, BcMode::Weak, 1.0).unwrap().system.nullspace().len(), 2);
        assert_eq!(assemble_stokes(&mask, BcMode::Pseudo, 1.0).unwrap().system.nullspace().len(), 1);
    }

    #[test]
    fn stream_unknowns() {
        let g = Grid::unit_square(4);
        let mask = DomainMask::full(g);
        let b = stream_basis(&mask, BcMode::Weak).unwrap();
        assert_eq!(b.unknowns, 9);
        let slit = GridSlit::middle_half(&Grid::unit_square(8), FaceAxis::X);
        let m = slit.thickened(&Grid::unit_square(8), 0).unwrap();
        // 49 interior vertices; the 5 slit vertices collapse to one island unknown
        assert_eq!(stream_basis(&m, BcMode::Weak).unwrap().unknowns, 49 - 5 + 1);
        assert_eq!(stream_basis(&m, BcMode::Pseudo).unwrap().unknowns, 49);
    }
}
