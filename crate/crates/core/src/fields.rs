//! Cell, face (MAC) and vertex fields with the discrete calculus.
//!
//! Fields always cover the whole grid. Values outside a mask's active set are
//! stored as explicit zeros, so restriction and extension by zero only
//! touch the inactive entries and all fields on one grid compare directly.

use alloc::vec;
use alloc::vec::Vec;
use core::marker::PhantomData;

use crate::error::{Error, Result};
use crate::float::{floor, sqrt};
use crate::geometry::{DomainMask, Face, FaceAxis, Grid};
use crate::leray::BcMode;

/// Common storage view used by inner products, restriction and DOF maps.
pub trait GridField: Clone + Sized {
    fn zeros(grid: Grid) -> Self;
    fn grid(&self) -> &Grid;
    fn data(&self) -> &[f64];
    fn data_mut(&mut self) -> &mut [f64];

    /// `h² Σ aᵢ bᵢ` over all stored values.
    fn inner(&self, other: &Self) -> Result<f64> {
        if self.grid() != other.grid() {
            return Err(Error::GridMismatch);
        }
        let h = self.grid().h();
        Ok(h * h * crate::float::dot(self.data(), other.data()))
    }

    fn norm(&self) -> f64 {
        let h = self.grid().h();
        h * crate::float::norm(self.data())
    }

    /// Largest absolute value.
    fn max_abs(&self) -> f64 {
        self.data().iter().fold(0.0, |m, v| m.max(crate::float::abs(*v)))
    }

    /// `self += a * other`.
    fn axpy(&mut self, a: f64, other: &Self) -> Result<()> {
        if self.grid() != other.grid() {
            return Err(Error::GridMismatch);
        }
        for (x, y) in self.data_mut().iter_mut().zip(other.data()) {
            *x += a * y;
        }
        Ok(())
    }

    fn scale(&mut self, a: f64) {
        self.data_mut().iter_mut().for_each(|x| *x *= a);
    }

    /// `self - other`.
    fn minus(&self, other: &Self) -> Result<Self> {
        let mut out = self.clone();
        out.axpy(-1.0, other)?;
        Ok(out)
    }
}

macro_rules! scalar_field {
    ($(#[$doc:meta])* $name:ident, $count:ident) => {
        $(#[$doc])*
        #[derive(Debug, Clone, PartialEq)]
        pub struct $name {
            grid: Grid,
            values: Vec<f64>,
        }

        impl $name {
            pub fn from_values(grid: Grid, values: Vec<f64>) -> Result<Self> {
                if values.len() != grid.$count() {
                    return Err(Error::DimensionMismatch {
                        expected: grid.$count(),
                        found: values.len(),
                    });
                }
                Ok($name { grid, values })
            }

            pub fn constant(grid: Grid, value: f64) -> Self {
                $name { grid, values: vec![value; grid.$count()] }
            }

            pub fn values(&self) -> &[f64] {
                &self.values
            }
        }

        impl GridField for $name {
            fn zeros(grid: Grid) -> Self {
                $name::constant(grid, 0.0)
            }
            fn grid(&self) -> &Grid {
                &self.grid
            }
            fn data(&self) -> &[f64] {
                &self.values
            }
            fn data_mut(&mut self) -> &mut [f64] {
                &mut self.values
            }
        }
    };
}

scalar_field!(
    /// One value per cell: pressures, potentials, cell-centred scalars.
    CellField,
    cell_count
);

scalar_field!(
    /// One value per vertex: stream functions and scalar Laplace unknowns.
    VertexField,
    vertex_count
);

impl CellField {
    pub fn from_fn(grid: Grid, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut values = Vec::with_capacity(grid.cell_count());
        for j in 0..grid.ny() {
            for i in 0..grid.nx() {
                let c = grid.cell_center(i, j);
                values.push(f(c[0], c[1]));
            }
        }
        CellField { grid, values }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.cell_index(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        let k = self.grid.cell_index(i, j);
        self.values[k] = value;
    }

    /// Zeroes cells outside the mask.
    pub fn restrict(&self, mask: &DomainMask) -> CellField {
        let mut out = self.clone();
        for (v, &inside) in out.values.iter_mut().zip(mask.cells()) {
            if !inside {
                *v = 0.0;
            }
        }
        out
    }

    pub fn prolong(&self, fine: &Grid) -> Result<CellField> {
        check_nested(&self.grid, fine)?;
        let values = interpolate(&self.values, (self.grid.nx(), self.grid.ny()), (fine.nx(), fine.ny()), [-0.25, -0.25]);
        Ok(CellField { grid: *fine, values })
    }
}

impl VertexField {
    pub fn from_fn(grid: Grid, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut values = Vec::with_capacity(grid.vertex_count());
        for j in 0..=grid.ny() {
            for i in 0..=grid.nx() {
                let p = grid.vertex_position(i, j);
                values.push(f(p[0], p[1]));
            }
        }
        VertexField { grid, values }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.vertex_index(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        let k = self.grid.vertex_index(i, j);
        self.values[k] = value;
    }

    /// Zeroes every vertex that is not a scalar Laplace unknown for `(mask, mode)`.
    pub fn restrict(&self, mask: &DomainMask, mode: BcMode) -> VertexField {
        let map = vertex_dofs(mask, mode);
        map.scatter(&map.gather(self))
    }

    pub fn prolong(&self, fine: &Grid) -> Result<VertexField> {
        check_nested(&self.grid, fine)?;
        let values = interpolate(
            &self.values,
            (self.grid.nx() + 1, self.grid.ny() + 1),
            (fine.nx() + 1, fine.ny() + 1),
            [0.0, 0.0],
        );
        Ok(VertexField { grid: *fine, values })
    }
}

/// Staggered velocity: `u` on vertical faces, `v` on horizontal faces.
#[derive(Debug, Clone, PartialEq)]
pub struct MacField {
    grid: Grid,
    /// `u` values followed by `v` values.
    values: Vec<f64>,
}

impl MacField {
    pub fn from_components(grid: Grid, u: Vec<f64>, v: Vec<f64>) -> Result<Self> {
        let (nu, nv) = (grid.face_count(FaceAxis::X), grid.face_count(FaceAxis::Y));
        if u.len() != nu {
            return Err(Error::DimensionMismatch { expected: nu, found: u.len() });
        }
        if v.len() != nv {
            return Err(Error::DimensionMismatch { expected: nv, found: v.len() });
        }
        let mut values = u;
        values.extend(v);
        Ok(MacField { grid, values })
    }

    /// Samples `f(x, y) = [fx, fy]` at face midpoints: `fx` on vertical faces,
    /// `fy` on horizontal faces.
    pub fn from_fn(grid: Grid, f: impl Fn(f64, f64) -> [f64; 2]) -> Self {
        let mut out = MacField::zeros(grid);
        for axis in [FaceAxis::X, FaceAxis::Y] {
            let c = axis_slot(axis);
            for k in 0..grid.face_count(axis) {
                let face = grid.face_at(axis, k);
                let p = grid.face_center(face);
                out.set(face, f(p[0], p[1])[c]);
            }
        }
        out
    }

    pub fn constant(grid: Grid, value: [f64; 2]) -> Self {
        MacField::from_fn(grid, |_, _| value)
    }

    fn offset(&self, axis: FaceAxis) -> usize {
        match axis {
            FaceAxis::X => 0,
            FaceAxis::Y => self.grid.face_count(FaceAxis::X),
        }
    }

    /// Flat index of a face in `u`-then-`v` storage.
    pub fn flat_index(grid: &Grid, face: Face) -> usize {
        let off = match face.axis {
            FaceAxis::X => 0,
            FaceAxis::Y => grid.face_count(FaceAxis::X),
        };
        off + grid.face_index(face)
    }

    pub fn component(&self, axis: FaceAxis) -> &[f64] {
        let off = self.offset(axis);
        &self.values[off..off + self.grid.face_count(axis)]
    }

    pub fn u(&self) -> &[f64] {
        self.component(FaceAxis::X)
    }

    pub fn v(&self) -> &[f64] {
        self.component(FaceAxis::Y)
    }

    pub fn get(&self, face: Face) -> f64 {
        self.values[Self::flat_index(&self.grid, face)]
    }

    pub fn set(&mut self, face: Face, value: f64) {
        let k = Self::flat_index(&self.grid, face);
        self.values[k] = value;
    }

    /// Zeroes faces that are not active for `(mask, mode)`: wall-normal faces,
    /// faces outside the mask and, in `Weak` mode, slit faces.
    pub fn restrict(&self, mask: &DomainMask, mode: BcMode) -> MacField {
        let map = face_dofs(mask, mode);
        map.scatter(&map.gather(self))
    }

    /// Norm of the values on `faces`, with the field's `h²` weight.
    pub fn norm_on<'a>(&self, faces: impl IntoIterator<Item = &'a Face>) -> f64 {
        let h = self.grid.h();
        let s: f64 = faces.into_iter().map(|f| self.get(*f) * self.get(*f)).sum();
        h * sqrt(s)
    }

    pub fn prolong(&self, fine: &Grid) -> Result<MacField> {
        check_nested(&self.grid, fine)?;
        let g = self.grid;
        let u = interpolate(self.u(), g.face_dims(FaceAxis::X), fine.face_dims(FaceAxis::X), [0.0, -0.25]);
        let v = interpolate(self.v(), g.face_dims(FaceAxis::Y), fine.face_dims(FaceAxis::Y), [-0.25, 0.0]);
        MacField::from_components(*fine, u, v)
    }
}

fn axis_slot(axis: FaceAxis) -> usize {
    match axis {
        FaceAxis::X => 0,
        FaceAxis::Y => 1,
    }
}

impl GridField for MacField {
    fn zeros(grid: Grid) -> Self {
        let n = grid.face_count(FaceAxis::X) + grid.face_count(FaceAxis::Y);
        MacField { grid, values: vec![0.0; n] }
    }
    fn grid(&self) -> &Grid {
        &self.grid
    }
    fn data(&self) -> &[f64] {
        &self.values
    }
    fn data_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }
}

/// Discrete divergence on every cell:
/// `(u[i+1,j] - u[i,j])/h + (v[i,j+1] - v[i,j])/h`.
pub fn div_h(w: &MacField) -> CellField {
    let g = *w.grid();
    let inv_h = 1.0 / g.h();
    CellField::from_values(
        g,
        (0..g.ny())
            .flat_map(|j| (0..g.nx()).map(move |i| (i, j)))
            .map(|(i, j)| {
                (w.get(Face::x(i + 1, j)) - w.get(Face::x(i, j)) + w.get(Face::y(i, j + 1))
                    - w.get(Face::y(i, j)))
                    * inv_h
            })
            .collect(),
    )
    .expect("one value per cell")
}

/// Discrete gradient on active faces, zero elsewhere (homogeneous Neumann for `p`).
pub fn grad_h(p: &CellField, mask: &DomainMask, mode: BcMode) -> MacField {
    let g = *p.grid();
    let inv_h = 1.0 / g.h();
    let mut out = MacField::zeros(g);
    for axis in [FaceAxis::X, FaceAxis::Y] {
        for k in 0..g.face_count(axis) {
            let face = g.face_at(axis, k);
            if !mask.face_is_active(face, mode) {
                continue;
            }
            if let (Some((a0, a1)), Some((b0, b1))) = g.face_cells(face) {
                out.set(face, (p.get(b0, b1) - p.get(a0, a1)) * inv_h);
            }
        }
    }
    out
}

/// Rotated gradient of a vertex potential:
/// `u = (ψ[i,j+1] - ψ[i,j])/h`, `v = -(ψ[i+1,j] - ψ[i,j])/h`.
pub fn curl_h(psi: &VertexField) -> MacField {
    let g = *psi.grid();
    let inv_h = 1.0 / g.h();
    let mut out = MacField::zeros(g);
    for axis in [FaceAxis::X, FaceAxis::Y] {
        for k in 0..g.face_count(axis) {
            let face = g.face_at(axis, k);
            let [(i0, j0), (i1, j1)] = g.face_vertices(face);
            let d = (psi.get(i1, j1) - psi.get(i0, j0)) * inv_h;
            out.set(face, if axis == FaceAxis::X { d } else { -d });
        }
    }
    out
}

/// Map between the grid-wide storage of a field and the compressed vector
/// of its active degrees of freedom.
#[derive(Debug, Clone)]
pub struct DofMap<F> {
    grid: Grid,
    index: Vec<usize>,
    active: Vec<usize>,
    _field: PhantomData<F>,
}

const INACTIVE: usize = usize::MAX;

impl<F: GridField> DofMap<F> {
    fn from_flags(grid: Grid, flags: impl Iterator<Item = bool>) -> Self {
        let mut index = Vec::new();
        let mut active = Vec::new();
        for (k, on) in flags.enumerate() {
            if on {
                index.push(active.len());
                active.push(k);
            } else {
                index.push(INACTIVE);
            }
        }
        DofMap { grid, index, active, _field: PhantomData }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn len(&self) -> usize {
        self.active.len()
    }

    pub fn is_empty(&self) -> bool {
        self.active.is_empty()
    }

    /// Storage indices of the active DOFs, in DOF order.
    pub fn active(&self) -> &[usize] {
        &self.active
    }

    /// DOF number of a storage index.
    #[inline]
    pub fn dof(&self, flat: usize) -> Option<usize> {
        match self.index[flat] {
            INACTIVE => None,
            d => Some(d),
        }
    }

    pub fn gather(&self, field: &F) -> Vec<f64> {
        let data = field.data();
        self.active.iter().map(|&k| data[k]).collect()
    }

    /// Extension by zero of a vector of active values.
    pub fn scatter(&self, values: &[f64]) -> F {
        debug_assert_eq!(values.len(), self.active.len());
        let mut out = F::zeros(self.grid);
        let data = out.data_mut();
        for (&k, &v) in self.active.iter().zip(values) {
            data[k] = v;
        }
        out
    }
}

/// Active velocity faces: interior faces of the mask, minus slits in `Weak` mode.
pub fn face_dofs(mask: &DomainMask, mode: BcMode) -> DofMap<MacField> {
    let g = *mask.grid();
    let flags = [FaceAxis::X, FaceAxis::Y]
        .into_iter()
        .flat_map(move |axis| (0..g.face_count(axis)).map(move |k| g.face_at(axis, k)))
        .map(|face| mask.face_is_active(face, mode));
    DofMap::from_flags(g, flags)
}

/// Mask cells.
pub fn cell_dofs(mask: &DomainMask) -> DofMap<CellField> {
    DofMap::from_flags(*mask.grid(), mask.cells().iter().copied())
}

/// Scalar Laplace unknowns: vertices whose four cells are in the mask,
/// minus (in `Weak` mode) every vertex touched by a slit face.
pub fn vertex_dofs(mask: &DomainMask, mode: BcMode) -> DofMap<VertexField> {
    let g = *mask.grid();
    let mut on_slit = vec![false; g.vertex_count()];
    if mode.sees_slits() {
        for face in mask.slits() {
            for (i, j) in g.face_vertices(*face) {
                on_slit[g.vertex_index(i, j)] = true;
            }
        }
    }
    let flags = (0..=g.ny()).flat_map(|j| (0..=g.nx()).map(move |i| (i, j))).map(|(i, j)| {
        let (i, j) = (i as isize, j as isize);
        mask.contains_signed(i - 1, j - 1)
            && mask.contains_signed(i, j - 1)
            && mask.contains_signed(i - 1, j)
            && mask.contains_signed(i, j)
            && !on_slit[g.vertex_index(i as usize, j as usize)]
    });
    DofMap::from_flags(g, flags)
}

/// Extension by zero of an active-DOF vector to the full grid.
pub fn extend_by_zero<F: GridField>(values: &[f64], map: &DofMap<F>) -> F {
    map.scatter(values)
}

fn check_nested(coarse: &Grid, fine: &Grid) -> Result<()> {
    if fine.is_refinement_of(coarse) {
        Ok(())
    } else {
        Err(Error::NonNestedGrids)
    }
}

/// Tensor-product linear interpolation from a coarse to a fine sample array.
///
/// Fine sample `a` along an axis sits at coarse index coordinate
/// `a/2 + offset`; values outside the coarse range are linearly extrapolated
/// so affine data is reproduced exactly.
fn interpolate(coarse: &[f64], cdims: (usize, usize), fdims: (usize, usize), offset: [f64; 2]) -> Vec<f64> {
    let weights = |n_coarse: usize, a: usize, off: f64| -> (usize, f64) {
        if n_coarse == 1 {
            return (0, 0.0);
        }
        let s = 0.5 * a as f64 + off;
        let k = (floor(s).max(0.0) as usize).min(n_coarse - 2);
        (k, s - k as f64)
    };
    let (ci, cj) = cdims;
    let mut out = Vec::with_capacity(fdims.0 * fdims.1);
    for b in 0..fdims.1 {
        let (kj, tj) = weights(cj, b, offset[1]);
        for a in 0..fdims.0 {
            let (ki, ti) = weights(ci, a, offset[0]);
            let at = |i: usize, j: usize| coarse[j.min(cj - 1) * ci + i.min(ci - 1)];
            let lo = (1.0 - ti) * at(ki, kj) + ti * at(ki + 1, kj);
            let hi = (1.0 - ti) * at(ki, kj + 1) + ti * at(ki + 1, kj + 1);
            out.push((1.0 - tj) * lo + tj * hi);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::DomainMask;

    fn lcg(seed: &mut u64) -> f64 {
        *seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((*seed >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
    }

    #[test]
    fn div_of_constant_is_zero() {
        let g = Grid::unit_square(5);
        let d = div_h(&MacField::constant(g, [1.0, 0.0]));
        assert!(d.values().iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn div_of_single_face() {
        let g = Grid::new([0.0, 0.0], 1.0, 3, 3).unwrap();
        let mut w = MacField::zeros(g);
        w.set(Face::x(1, 1), 1.0);
        let d = div_h(&w);
        assert_eq!(d.get(0, 1), 1.0);
        assert_eq!(d.get(1, 1), -1.0);
        assert_eq!(d.values().iter().filter(|v| **v != 0.0).count(), 2);
    }

    #[test]
    fn grad_examples() {
        let g = Grid::new([0.0, 0.0], 1.0, 2, 1).unwrap();
        let mask = DomainMask::full(g);
        let p = CellField::from_values(g, vec![0.0, 1.0]).unwrap();
        let w = grad_h(&p, &mask, BcMode::Weak);
        assert_eq!(w.get(Face::x(1, 0)), 1.0);
        assert_eq!(w.get(Face::x(0, 0)), 0.0);
        assert_eq!(w.get(Face::x(2, 0)), 0.0);

        let g = Grid::unit_square(4);
        let c = grad_h(&CellField::constant(g, 3.0), &DomainMask::full(g), BcMode::Weak);
        assert_eq!(c.max_abs(), 0.0);
    }

    #[test]
    fn grad_modes_differ_only_on_slits() {
        let g = Grid::unit_square(6);
        let mask = DomainMask::full(g).with_slits([Face::x(3, 2), Face::x(3, 3)]).unwrap();
        let p = CellField::from_fn(g, |x, y| x * x + 0.3 * y);
        let weak = grad_h(&p, &mask, BcMode::Weak);
        let pseudo = grad_h(&p, &mask, BcMode::Pseudo);
        for axis in [FaceAxis::X, FaceAxis::Y] {
            for k in 0..g.face_count(axis) {
                let f = g.face_at(axis, k);
                if mask.is_slit(f) {
                    assert_eq!(weak.get(f), 0.0);
                    assert!(pseudo.get(f) != 0.0);
                } else {
                    assert_eq!(weak.get(f), pseudo.get(f));
                }
            }
        }
    }

    #[test]
    fn curl_of_xy() {
        // ψ = x y on a 2x2 grid with h = 1: u = x, v = -y at face midpoints
        let g = Grid::new([0.0, 0.0], 1.0, 2, 2).unwrap();
        let w = curl_h(&VertexField::from_fn(g, |x, y| x * y));
        for axis in [FaceAxis::X, FaceAxis::Y] {
            for k in 0..g.face_count(axis) {
                let f = g.face_at(axis, k);
                let [x, y] = g.face_center(f);
                let expected = if axis == FaceAxis::X { x } else { -y };
                assert!((w.get(f) - expected).abs() < 1e-14);
            }
        }
        assert_eq!(curl_h(&VertexField::constant(g, 2.5)).max_abs(), 0.0);
    }

    #[test]
    fn div_curl_vanishes() {
        let g = Grid::new([0.3, -1.0], 0.1, 7, 5).unwrap();
        let mut seed = 7;
        let psi = VertexField::from_values(g, (0..g.vertex_count()).map(|_| lcg(&mut seed)).collect()).unwrap();
        let d = div_h(&curl_h(&psi));
        assert!(d.max_abs() < 1e-12);
    }

    #[test]
    fn inner_examples() {
        let g = Grid::unit_square(2);
        let one = CellField::constant(g, 1.0);
        assert!((one.inner(&one).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(CellField::zeros(g).inner(&one).unwrap(), 0.0);
        let other = CellField::constant(Grid::unit_square(3), 1.0);
        assert_eq!(one.inner(&other).err(), Some(Error::GridMismatch));
    }

    #[test]
    fn restrict_examples() {
        let g = Grid::unit_square(4);
        let full = DomainMask::full(g);
        let inner = full.erode(1);
        let one = CellField::constant(g, 1.0);
        assert_eq!(one.restrict(&full), one);
        let r = one.restrict(&inner);
        assert_eq!(r.values().iter().sum::<f64>(), 4.0);
        let map = cell_dofs(&inner);
        assert_eq!(extend_by_zero(&map.gather(&r), &map), r);
    }

    #[test]
    fn extension_preserves_norm() {
        let g = Grid::unit_square(6);
        let mask = DomainMask::full(g).erode(1).with_slits([Face::x(3, 2)]).unwrap();
        let map = face_dofs(&mask, BcMode::Weak);
        let mut seed = 3;
        let x: Vec<f64> = (0..map.len()).map(|_| lcg(&mut seed)).collect();
        let w = extend_by_zero(&x, &map);
        let compressed = g.h() * crate::float::norm(&x);
        assert!((w.norm() - compressed).abs() < 1e-14);
        assert_eq!(w.get(Face::x(3, 2)), 0.0);
    }

    #[test]
    fn vertex_dofs_and_slits() {
        let g = Grid::unit_square(2);
        let map = vertex_dofs(&DomainMask::full(g), BcMode::Weak);
        assert_eq!(map.len(), 1);
        assert_eq!(map.active(), &[g.vertex_index(1, 1)]);

        let g = Grid::unit_square(4);
        let slit = DomainMask::full(g).with_slits([Face::x(2, 1)]).unwrap();
        assert_eq!(vertex_dofs(&slit, BcMode::Pseudo).len(), 9);
        assert_eq!(vertex_dofs(&slit, BcMode::Weak).len(), 7);
    }

    #[test]
    fn prolong_constant_and_affine() {
        let g = Grid::new([0.0, 0.0], 0.25, 4, 3).unwrap();
        let fine = g.refined();
        let affine = |x: f64, y: f64| 1.0 + 2.0 * x - 3.0 * y;

        let c = CellField::from_fn(g, affine).prolong(&fine).unwrap();
        let exact = CellField::from_fn(fine, affine);
        assert!(c.minus(&exact).unwrap().max_abs() < 1e-12);

        let vtx = VertexField::from_fn(g, affine).prolong(&fine).unwrap();
        assert!(vtx.minus(&VertexField::from_fn(fine, affine)).unwrap().max_abs() < 1e-12);

        let m = MacField::from_fn(g, |x, y| [x, affine(x, y)]).prolong(&fine).unwrap();
        let exact = MacField::from_fn(fine, |x, y| [x, affine(x, y)]);
        assert!(m.minus(&exact).unwrap().max_abs() < 1e-12);

        let k = MacField::constant(g, [2.0, -1.0]).prolong(&fine).unwrap();
        assert!(k.minus(&MacField::constant(fine, [2.0, -1.0])).unwrap().max_abs() < 1e-12);
    }

    #[test]
    fn prolong_rejects_non_nested() {
        let g = Grid::unit_square(4);
        assert_eq!(CellField::zeros(g).prolong(&Grid::unit_square(6)), Err(Error::NonNestedGrids));
        let shifted = Grid::new([0.1, 0.0], 0.125, 8, 8).unwrap();
        assert_eq!(CellField::zeros(g).prolong(&shifted), Err(Error::NonNestedGrids));
    }

    #[test]
    fn prolong_is_second_order() {
        // resample sin(πx)cos(πy) on two refinements; error ratio ~ 4
        let f = |x: f64, y: f64| [
            (core::f64::consts::PI * x).sin() * (core::f64::consts::PI * y).cos(),
            (core::f64::consts::PI * y).sin() * x,
        ];
        let err = |n: usize| {
            let g = Grid::unit_square(n);
            let fine = g.refined();
            let p = MacField::from_fn(g, f).prolong(&fine).unwrap();
            p.minus(&MacField::from_fn(fine, f)).unwrap().norm()
        };
        let (e1, e2, e3) = (err(8), err(16), err(32));
        let r1 = (e1 / e2).log2();
        let r2 = (e2 / e3).log2();
        assert!(r1 > 1.8 && r2 > 1.8, "rates {r1} {r2}");
    }
}
