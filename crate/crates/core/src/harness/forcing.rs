use crate::fields::{curl_h, grad_h, CellField, GridField, MacField, VertexField};
use crate::float::{exp, sin, sq};
use crate::geometry::{DomainMask, Grid, ShapeSpec};
use crate::leray::BcMode;

/// Analytic forcing recipes sampled on a grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Forcing {
    /// A uniform field; the scalar version is `value[0]`.
    Constant { value: [f64; 2] },
    /// `grad_h` of a Gaussian bump sampled at cell centres.
    Gradient { center: [f64; 2], width: f64 },
    /// `curl_h` of the compact bump `(1 - r²/R²)³` sampled at vertices.
    Vortex { center: [f64; 2], radius: f64 },
    /// `(sin(π(y - from)/(to - from)), 0)` for `from < y < to`, zero elsewhere:
    /// a horizontal flow with vertical shear, pushing across vertical slits.
    Crossflow { from: f64, to: f64 },
}

impl Forcing {
    pub fn unit_scalar() -> Forcing {
        Forcing::Constant { value: [1.0, 0.0] }
    }

    fn bump(&self, x: f64, y: f64) -> f64 {
        match *self {
            Forcing::Gradient { center, width } => exp(-(sq(x - center[0]) + sq(y - center[1])) / sq(width)),
            Forcing::Vortex { center, radius } => {
                let s = (sq(x - center[0]) + sq(y - center[1])) / sq(radius);
                if s < 1.0 {
                    let t = 1.0 - s;
                    t * t * t
                } else {
                    0.0
                }
            }
            Forcing::Constant { value } => value[0],
            Forcing::Crossflow { from, to } => {
                if y > from && y < to {
                    sin(core::f64::consts::PI * (y - from) / (to - from))
                } else {
                    0.0
                }
            }
        }
    }

    /// Scalar sample at vertices.
    pub fn scalar(&self, grid: &Grid) -> VertexField {
        VertexField::from_fn(*grid, |x, y| self.bump(x, y))
    }

    /// Vector sample on faces.
    pub fn vector(&self, grid: &Grid) -> MacField {
        match *self {
            Forcing::Constant { value } => MacField::constant(*grid, value),
            Forcing::Gradient { .. } => {
                let phi = CellField::from_fn(*grid, |x, y| self.bump(x, y));
                grad_h(&phi, &DomainMask::full(*grid), BcMode::Pseudo)
            }
            Forcing::Vortex { .. } => curl_h(&self.scalar(grid)),
            Forcing::Crossflow { .. } => MacField::from_fn(*grid, |x, y| [self.bump(x, y), 0.0]),
        }
    }
}

/// Zeroes samples whose location lies outside the open shape.
pub(crate) fn zero_outside_vertex(f: &mut VertexField, shape: &ShapeSpec) {
    let g = *f.grid();
    for j in 0..=g.ny() {
        for i in 0..=g.nx() {
            if !shape.contains_point(g.vertex_position(i, j), false) {
                f.set(i, j, 0.0);
            }
        }
    }
}

pub(crate) fn zero_outside_faces(f: &mut MacField, shape: &ShapeSpec) {
    let g = *f.grid();
    for axis in [crate::geometry::FaceAxis::X, crate::geometry::FaceAxis::Y] {
        for k in 0..g.face_count(axis) {
            let face = g.face_at(axis, k);
            if !shape.contains_point(g.face_center(face), false) {
                f.set(face, 0.0);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::div_h;

    #[test]
    fn vortex_is_discretely_solenoidal() {
        let g = Grid::unit_square(16);
        let f = Forcing::Vortex { center: [0.5, 0.5], radius: 0.3 }.vector(&g);
        assert!(f.norm() > 0.0);
        assert!(div_h(&f).max_abs() < 1e-12);
    }

    #[test]
    fn crossflow_profile() {
        let g = Grid::unit_square(8);
        let f = Forcing::Crossflow { from: 0.25, to: 0.75 }.vector(&g);
        assert_eq!(f.v().iter().copied().fold(0.0, f64::max), 0.0);
        assert!((f.get(crate::Face::x(3, 3)) - (core::f64::consts::PI * 0.375).sin()).abs() < 1e-14);
        assert_eq!(f.get(crate::Face::x(3, 0)), 0.0);
    }
}
