//! Grids, pixel domains with slits, rasterization and monotone domain sequences.

use alloc::collections::{BTreeSet, VecDeque};
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::leray::BcMode;

mod sequence;
mod shape;

pub use sequence::{make_sequence, Direction, DomainSequence, Family, GridSlit};
pub use shape::{rasterize, Policy, Segment, ShapeSpec};

/// Uniform Cartesian grid with square cells of side `h`.
///
/// Index conventions (all row-major with `i` fastest):
///
/// * cell `(i, j)` for `i < nx`, `j < ny`, centre at `origin + ((i+½)h, (j+½)h)`;
/// * vertical face `(i, j)` for `i <= nx`, `j < ny`, on the line `x = x0 + i h`;
/// * horizontal face `(i, j)` for `i < nx`, `j <= ny`, on the line `y = y0 + j h`;
/// * vertex `(i, j)` for `i <= nx`, `j <= ny`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    origin: [f64; 2],
    h: f64,
    nx: usize,
    ny: usize,
}

impl Grid {
    pub fn new(origin: [f64; 2], h: f64, nx: usize, ny: usize) -> Result<Self> {
        if !(h > 0.0) || !h.is_finite() {
            return Err(Error::InvalidGrid(format!("spacing must be positive, got {h}")));
        }
        if nx == 0 || ny == 0 {
            return Err(Error::InvalidGrid(format!("cell counts must be >= 1, got {nx}x{ny}")));
        }
        if !origin[0].is_finite() || !origin[1].is_finite() {
            return Err(Error::InvalidGrid("origin must be finite".into()));
        }
        Ok(Grid { origin, h, nx, ny })
    }

    /// `[0,1]²` split into `n × n` cells.
    pub fn unit_square(n: usize) -> Self {
        Grid::new([0.0, 0.0], 1.0 / n as f64, n, n).expect("n >= 1")
    }

    pub fn origin(&self) -> [f64; 2] {
        self.origin
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn cell_count(&self) -> usize {
        self.nx * self.ny
    }

    pub fn vertex_count(&self) -> usize {
        (self.nx + 1) * (self.ny + 1)
    }

    /// Number of faces along `axis`.
    pub fn face_count(&self, axis: FaceAxis) -> usize {
        match axis {
            FaceAxis::X => (self.nx + 1) * self.ny,
            FaceAxis::Y => self.nx * (self.ny + 1),
        }
    }

    /// Face index ranges `(ni, nj)` along `axis`.
    pub fn face_dims(&self, axis: FaceAxis) -> (usize, usize) {
        match axis {
            FaceAxis::X => (self.nx + 1, self.ny),
            FaceAxis::Y => (self.nx, self.ny + 1),
        }
    }

    #[inline]
    pub fn cell_index(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < self.nx && j < self.ny);
        j * self.nx + i
    }

    #[inline]
    pub fn vertex_index(&self, i: usize, j: usize) -> usize {
        debug_assert!(i <= self.nx && j <= self.ny);
        j * (self.nx + 1) + i
    }

    #[inline]
    pub fn face_index(&self, face: Face) -> usize {
        let (ni, _) = self.face_dims(face.axis);
        face.j * ni + face.i
    }

    pub fn face_at(&self, axis: FaceAxis, index: usize) -> Face {
        let (ni, _) = self.face_dims(axis);
        Face { axis, i: index % ni, j: index / ni }
    }

    pub fn contains_face(&self, face: Face) -> bool {
        let (ni, nj) = self.face_dims(face.axis);
        face.i < ni && face.j < nj
    }

    pub fn cell_center(&self, i: usize, j: usize) -> [f64; 2] {
        [
            self.origin[0] + (i as f64 + 0.5) * self.h,
            self.origin[1] + (j as f64 + 0.5) * self.h,
        ]
    }

    pub fn vertex_position(&self, i: usize, j: usize) -> [f64; 2] {
        [self.origin[0] + i as f64 * self.h, self.origin[1] + j as f64 * self.h]
    }

    /// Midpoint of a face.
    pub fn face_center(&self, face: Face) -> [f64; 2] {
        let (i, j) = (face.i as f64, face.j as f64);
        match face.axis {
            FaceAxis::X => [self.origin[0] + i * self.h, self.origin[1] + (j + 0.5) * self.h],
            FaceAxis::Y => [self.origin[0] + (i + 0.5) * self.h, self.origin[1] + j * self.h],
        }
    }

    /// Upper-right corner of the grid box.
    pub fn extent(&self) -> [f64; 2] {
        [
            self.origin[0] + self.nx as f64 * self.h,
            self.origin[1] + self.ny as f64 * self.h,
        ]
    }

    /// The grid with half the spacing covering the same box.
    pub fn refined(&self) -> Grid {
        Grid { origin: self.origin, h: 0.5 * self.h, nx: 2 * self.nx, ny: 2 * self.ny }
    }

    /// True when `self` is exactly `coarse.refined()` up to rounding.
    pub fn is_refinement_of(&self, coarse: &Grid) -> bool {
        let tol = 1e-12 * coarse.h.max(1.0);
        self.nx == 2 * coarse.nx
            && self.ny == 2 * coarse.ny
            && crate::float::abs(2.0 * self.h - coarse.h) <= tol
            && crate::float::abs(self.origin[0] - coarse.origin[0]) <= tol
            && crate::float::abs(self.origin[1] - coarse.origin[1]) <= tol
    }

    /// Cells on either side of a face, `None` where the face is on the grid boundary.
    pub fn face_cells(&self, face: Face) -> (Option<Cell>, Option<Cell>) {
        let Face { axis, i, j } = face;
        match axis {
            FaceAxis::X => (
                (i >= 1).then(|| (i - 1, j)),
                (i < self.nx).then_some((i, j)),
            ),
            FaceAxis::Y => (
                (j >= 1).then(|| (i, j - 1)),
                (j < self.ny).then_some((i, j)),
            ),
        }
    }

    /// The two vertices a face joins.
    pub fn face_vertices(&self, face: Face) -> [(usize, usize); 2] {
        match face.axis {
            FaceAxis::X => [(face.i, face.j), (face.i, face.j + 1)],
            FaceAxis::Y => [(face.i, face.j), (face.i + 1, face.j)],
        }
    }
}

/// Orientation of a face by its normal: `X` faces are vertical and carry the
/// `x`-velocity, `Y` faces are horizontal and carry the `y`-velocity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FaceAxis {
    X,
    Y,
}

impl FaceAxis {
    pub fn other(self) -> FaceAxis {
        match self {
            FaceAxis::X => FaceAxis::Y,
            FaceAxis::Y => FaceAxis::X,
        }
    }
}

impl fmt::Display for FaceAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FaceAxis::X => "x",
            FaceAxis::Y => "y",
        })
    }
}

/// Cell indices `(i, j)`.
pub type Cell = (usize, usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Face {
    pub axis: FaceAxis,
    pub i: usize,
    pub j: usize,
}

impl Face {
    pub fn x(i: usize, j: usize) -> Face {
        Face { axis: FaceAxis::X, i, j }
    }

    pub fn y(i: usize, j: usize) -> Face {
        Face { axis: FaceAxis::Y, i, j }
    }
}

/// A pixel domain: a set of cells plus slit faces (internal walls).
///
/// Slit faces always have both incident cells in the cell set.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainMask {
    grid: Grid,
    cells: Vec<bool>,
    slits: BTreeSet<Face>,
}

impl DomainMask {
    pub fn empty(grid: Grid) -> Self {
        DomainMask { grid, cells: vec![false; grid.cell_count()], slits: BTreeSet::new() }
    }

    pub fn full(grid: Grid) -> Self {
        DomainMask { grid, cells: vec![true; grid.cell_count()], slits: BTreeSet::new() }
    }

    pub fn from_cells(grid: Grid, cells: Vec<bool>) -> Result<Self> {
        if cells.len() != grid.cell_count() {
            return Err(Error::DimensionMismatch { expected: grid.cell_count(), found: cells.len() });
        }
        Ok(DomainMask { grid, cells, slits: BTreeSet::new() })
    }

    /// Cells `(i, j)` with `i0 <= i < i1`, `j0 <= j < j1`.
    pub fn from_block(grid: Grid, i0: usize, i1: usize, j0: usize, j1: usize) -> Self {
        let mut mask = DomainMask::empty(grid);
        for j in j0..j1.min(grid.ny) {
            for i in i0..i1.min(grid.nx) {
                mask.set_cell(i, j, true);
            }
        }
        mask
    }

    /// Adds slit faces, rejecting any that is not interior.
    pub fn with_slits<I: IntoIterator<Item = Face>>(mut self, faces: I) -> Result<Self> {
        for face in faces {
            self.add_slit(face)?;
        }
        Ok(self)
    }

    pub fn add_slit(&mut self, face: Face) -> Result<()> {
        if !self.grid.contains_face(face) || !self.face_is_interior(face) {
            return Err(Error::InvalidSlit { axis: face.axis, i: face.i, j: face.j });
        }
        self.slits.insert(face);
        Ok(())
    }

    pub fn without_slits(&self) -> Self {
        DomainMask { grid: self.grid, cells: self.cells.clone(), slits: BTreeSet::new() }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn cells(&self) -> &[bool] {
        &self.cells
    }

    pub fn slits(&self) -> &BTreeSet<Face> {
        &self.slits
    }

    pub fn has_slits(&self) -> bool {
        !self.slits.is_empty()
    }

    pub fn cell_count(&self) -> usize {
        self.cells.iter().filter(|&&c| c).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.cells.iter().any(|&c| c)
    }

    /// Area of the pixel union.
    pub fn area(&self) -> f64 {
        self.cell_count() as f64 * self.grid.h * self.grid.h
    }

    #[inline]
    pub fn contains(&self, i: usize, j: usize) -> bool {
        i < self.grid.nx && j < self.grid.ny && self.cells[self.grid.cell_index(i, j)]
    }

    /// Signed-index membership; anything outside the grid is outside the mask.
    #[inline]
    pub fn contains_signed(&self, i: isize, j: isize) -> bool {
        i >= 0 && j >= 0 && self.contains(i as usize, j as usize)
    }

    pub fn set_cell(&mut self, i: usize, j: usize, inside: bool) {
        let k = self.grid.cell_index(i, j);
        self.cells[k] = inside;
        if !inside {
            self.slits.retain(|f| {
                let (a, b) = self.grid.face_cells(*f);
                a != Some((i, j)) && b != Some((i, j))
            });
        }
    }

    pub fn is_slit(&self, face: Face) -> bool {
        self.slits.contains(&face)
    }

    /// Both incident cells belong to the mask.
    pub fn face_is_interior(&self, face: Face) -> bool {
        match self.grid.face_cells(face) {
            (Some((a0, a1)), Some((b0, b1))) => self.contains(a0, a1) && self.contains(b0, b1),
            _ => false,
        }
    }

    /// Face carries an unknown velocity: interior, and not a slit when slits are walls.
    #[inline]
    pub fn face_is_active(&self, face: Face, mode: BcMode) -> bool {
        self.face_is_interior(face) && !(mode.sees_slits() && self.is_slit(face))
    }

    /// Every cell of `self` is a cell of `other`.
    pub fn cells_subset_of(&self, other: &DomainMask) -> bool {
        self.cells.iter().zip(&other.cells).all(|(&a, &b)| !a || b)
    }

    /// Face-connected components of the cell set. In `Weak` mode slit faces
    /// block adjacency.
    pub fn components(&self, mode: BcMode) -> Components {
        let g = self.grid;
        let mut labels: Vec<Option<usize>> = vec![None; g.cell_count()];
        let mut count = 0;
        let mut queue = VecDeque::new();
        for j0 in 0..g.ny {
            for i0 in 0..g.nx {
                let k0 = g.cell_index(i0, j0);
                if !self.cells[k0] || labels[k0].is_some() {
                    continue;
                }
                labels[k0] = Some(count);
                queue.push_back((i0, j0));
                while let Some((i, j)) = queue.pop_front() {
                    let neighbours = [
                        (Face::x(i, j), i.checked_sub(1).map(|a| (a, j))),
                        (Face::x(i + 1, j), Some((i + 1, j))),
                        (Face::y(i, j), j.checked_sub(1).map(|b| (i, b))),
                        (Face::y(i, j + 1), Some((i, j + 1))),
                    ];
                    for (face, nb) in neighbours {
                        let Some((a, b)) = nb else { continue };
                        if !self.contains(a, b) || !self.face_is_active(face, mode) {
                            continue;
                        }
                        let k = g.cell_index(a, b);
                        if labels[k].is_none() {
                            labels[k] = Some(count);
                            queue.push_back((a, b));
                        }
                    }
                }
                count += 1;
            }
        }
        Components { labels, count }
    }

    /// Cells whose `(2k+1)²` Chebyshev neighbourhood lies inside the mask.
    /// Slits survive where both incident cells survive.
    pub fn erode(&self, k: usize) -> DomainMask {
        if k == 0 {
            return self.clone();
        }
        let g = self.grid;
        let (nx, ny) = (g.nx, g.ny);
        // separable box-minimum: rows first, then columns
        let mut row_ok = vec![false; g.cell_count()];
        for j in 0..ny {
            for i in 0..nx {
                row_ok[g.cell_index(i, j)] = i >= k
                    && i + k < nx
                    && (i - k..=i + k).all(|a| self.cells[g.cell_index(a, j)]);
            }
        }
        let mut cells = vec![false; g.cell_count()];
        for j in 0..ny {
            for i in 0..nx {
                cells[g.cell_index(i, j)] =
                    j >= k && j + k < ny && (j - k..=j + k).all(|b| row_ok[g.cell_index(i, b)]);
            }
        }
        let mut out = DomainMask { grid: g, cells, slits: BTreeSet::new() };
        out.slits = self.slits.iter().copied().filter(|f| out.face_is_interior(*f)).collect();
        out
    }

    /// All cells within Chebyshev distance `k` of the mask. The result has no slits.
    pub fn dilate(&self, k: usize) -> Result<DomainMask> {
        let g = self.grid;
        let (nx, ny) = (g.nx, g.ny);
        let mut cells = vec![false; g.cell_count()];
        for j in 0..ny {
            for i in 0..nx {
                if !self.cells[g.cell_index(i, j)] {
                    continue;
                }
                if i < k || j < k || i + k >= nx || j + k >= ny {
                    return Err(Error::GridTooSmall);
                }
                for b in j - k..=j + k {
                    for a in i - k..=i + k {
                        cells[g.cell_index(a, b)] = true;
                    }
                }
            }
        }
        Ok(DomainMask { grid: g, cells, slits: BTreeSet::new() })
    }
}

/// Component labelling of a mask's cells.
#[derive(Debug, Clone, PartialEq)]
pub struct Components {
    /// Per cell (grid index), the component id or `None` outside the mask.
    pub labels: Vec<Option<usize>>,
    pub count: usize,
}

impl Components {
    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.count];
        for c in self.labels.iter().flatten() {
            sizes[*c] += 1;
        }
        sizes
    }
}
