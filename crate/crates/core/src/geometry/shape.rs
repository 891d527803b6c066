use alloc::boxed::Box;
use alloc::string::ToString;
use alloc::vec::Vec;

use super::{DomainMask, Face, FaceAxis, Grid};
use crate::error::{Error, Result};
use crate::float::{abs, round, sq, sqrt};

/// Continuum shapes that can be rasterized onto a [`Grid`].
#[derive(Debug, Clone, PartialEq)]
pub enum ShapeSpec {
    Disk { center: [f64; 2], radius: f64 },
    /// Axis-aligned rectangle with lower-left `corner`.
    Rect { corner: [f64; 2], width: f64, height: f64 },
    /// Square minus a segment lying on a grid line. With `half_thickness > 0`
    /// the segment is thickened into a removed rectangle; with zero thickness
    /// it becomes slit faces.
    SlitSquare { corner: [f64; 2], side: f64, slit: Segment, half_thickness: f64 },
    Union(Box<ShapeSpec>, Box<ShapeSpec>),
    /// First shape minus the closure of the second.
    Difference(Box<ShapeSpec>, Box<ShapeSpec>),
}

/// A segment parallel to a coordinate axis. `axis = X` means a vertical
/// segment on the line `x = at` running from `y = from` to `y = to`
/// (it carries vertical faces); `axis = Y` is the horizontal analogue.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub axis: FaceAxis,
    pub at: f64,
    pub from: f64,
    pub to: f64,
}

/// Cell membership rule for rasterization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Policy {
    /// Cell centre lies in the open shape.
    #[default]
    Center,
    /// The closed cell square lies in the closed shape (certified subset).
    Inner,
    /// The open cell square meets the closed shape (certified superset).
    Outer,
}

#[derive(Clone, Copy)]
struct CellBox {
    lo: [f64; 2],
    hi: [f64; 2],
    eps: f64,
}

impl CellBox {
    fn center(&self) -> [f64; 2] {
        [0.5 * (self.lo[0] + self.hi[0]), 0.5 * (self.lo[1] + self.hi[1])]
    }
}

impl ShapeSpec {
    /// The unit square minus a zero-thickness slit.
    pub fn unit_slit_square(slit: Segment) -> Self {
        ShapeSpec::SlitSquare { corner: [0.0, 0.0], side: 1.0, slit, half_thickness: 0.0 }
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidShape(msg.to_string()));
        match self {
            ShapeSpec::Disk { radius, center } => {
                if !(*radius > 0.0) || !center[0].is_finite() || !center[1].is_finite() {
                    return bad("disk radius must be positive");
                }
            }
            ShapeSpec::Rect { width, height, .. } => {
                if !(*width > 0.0 && *height > 0.0) {
                    return bad("rectangle must have positive width and height");
                }
            }
            ShapeSpec::SlitSquare { side, slit, half_thickness, .. } => {
                if !(*side > 0.0) {
                    return bad("square side must be positive");
                }
                if !(*half_thickness >= 0.0) {
                    return bad("slit half-thickness must be >= 0");
                }
                if !(slit.to > slit.from) {
                    return bad("slit segment must have positive length");
                }
            }
            ShapeSpec::Union(a, b) | ShapeSpec::Difference(a, b) => {
                a.validate()?;
                b.validate()?;
            }
        }
        Ok(())
    }

    /// Axis-aligned bounding box `(lo, hi)`.
    pub fn bounding_box(&self) -> ([f64; 2], [f64; 2]) {
        match self {
            ShapeSpec::Disk { center, radius } => (
                [center[0] - radius, center[1] - radius],
                [center[0] + radius, center[1] + radius],
            ),
            ShapeSpec::Rect { corner, width, height } => {
                (*corner, [corner[0] + width, corner[1] + height])
            }
            ShapeSpec::SlitSquare { corner, side, .. } => {
                (*corner, [corner[0] + side, corner[1] + side])
            }
            ShapeSpec::Union(a, b) => {
                let (alo, ahi) = a.bounding_box();
                let (blo, bhi) = b.bounding_box();
                (
                    [alo[0].min(blo[0]), alo[1].min(blo[1])],
                    [ahi[0].max(bhi[0]), ahi[1].max(bhi[1])],
                )
            }
            ShapeSpec::Difference(a, _) => a.bounding_box(),
        }
    }

    /// Rectangle removed around a thick slit, `None` for zero thickness.
    fn thick_slit(corner: [f64; 2], side: f64, slit: &Segment, t: f64) -> (ShapeSpec, Option<ShapeSpec>) {
        let square = ShapeSpec::Rect { corner, width: side, height: side };
        if t <= 0.0 {
            return (square, None);
        }
        let removed = match slit.axis {
            FaceAxis::X => ShapeSpec::Rect {
                corner: [slit.at - t, slit.from],
                width: 2.0 * t,
                height: slit.to - slit.from,
            },
            FaceAxis::Y => ShapeSpec::Rect {
                corner: [slit.from, slit.at - t],
                width: slit.to - slit.from,
                height: 2.0 * t,
            },
        };
        (square, Some(removed))
    }

    /// Point membership in the open set (`closed = false`) or its closure.
    pub fn contains_point(&self, p: [f64; 2], closed: bool) -> bool {
        match self {
            ShapeSpec::Disk { center, radius } => {
                let d2 = sq(p[0] - center[0]) + sq(p[1] - center[1]);
                if closed {
                    d2 <= radius * radius
                } else {
                    d2 < radius * radius
                }
            }
            ShapeSpec::Rect { corner, width, height } => {
                let (x1, y1) = (corner[0] + width, corner[1] + height);
                if closed {
                    p[0] >= corner[0] && p[0] <= x1 && p[1] >= corner[1] && p[1] <= y1
                } else {
                    p[0] > corner[0] && p[0] < x1 && p[1] > corner[1] && p[1] < y1
                }
            }
            ShapeSpec::SlitSquare { corner, side, slit, half_thickness } => {
                let (square, removed) = Self::thick_slit(*corner, *side, slit, *half_thickness);
                match removed {
                    Some(r) => square.contains_point(p, closed) && !r.contains_point(p, !closed),
                    None => {
                        let on_slit = match slit.axis {
                            FaceAxis::X => p[0] == slit.at && p[1] >= slit.from && p[1] <= slit.to,
                            FaceAxis::Y => p[1] == slit.at && p[0] >= slit.from && p[0] <= slit.to,
                        };
                        square.contains_point(p, closed) && (closed || !on_slit)
                    }
                }
            }
            ShapeSpec::Union(a, b) => a.contains_point(p, closed) || b.contains_point(p, closed),
            ShapeSpec::Difference(a, b) => a.contains_point(p, closed) && !b.contains_point(p, !closed),
        }
    }

    fn cell_in(&self, cell: CellBox, policy: Policy) -> bool {
        match policy {
            Policy::Center => self.contains_point(cell.center(), false),
            Policy::Inner => self.cell_inside(cell),
            Policy::Outer => self.cell_meets(cell),
        }
    }

    /// Closed cell square inside the closed shape.
    fn cell_inside(&self, c: CellBox) -> bool {
        match self {
            ShapeSpec::Disk { center, radius } => {
                let r2 = radius * radius * (1.0 + 1e-12);
                [c.lo[0], c.hi[0]].iter().all(|&x| {
                    [c.lo[1], c.hi[1]]
                        .iter()
                        .all(|&y| sq(x - center[0]) + sq(y - center[1]) <= r2)
                })
            }
            ShapeSpec::Rect { corner, width, height } => {
                c.lo[0] >= corner[0] - c.eps
                    && c.hi[0] <= corner[0] + width + c.eps
                    && c.lo[1] >= corner[1] - c.eps
                    && c.hi[1] <= corner[1] + height + c.eps
            }
            ShapeSpec::SlitSquare { corner, side, slit, half_thickness } => {
                let (square, removed) = Self::thick_slit(*corner, *side, slit, *half_thickness);
                square.cell_inside(c) && removed.is_none_or(|r| !r.cell_meets(c))
            }
            ShapeSpec::Union(a, b) => a.cell_inside(c) || b.cell_inside(c),
            ShapeSpec::Difference(a, b) => a.cell_inside(c) && !b.cell_meets(c),
        }
    }

    /// Open cell square meets the closed shape.
    fn cell_meets(&self, c: CellBox) -> bool {
        match self {
            ShapeSpec::Disk { center, radius } => {
                let qx = center[0].clamp(c.lo[0], c.hi[0]);
                let qy = center[1].clamp(c.lo[1], c.hi[1]);
                let d = sqrt(sq(qx - center[0]) + sq(qy - center[1]));
                d < *radius
            }
            ShapeSpec::Rect { corner, width, height } => {
                c.lo[0] < corner[0] + width - c.eps
                    && c.hi[0] > corner[0] + c.eps
                    && c.lo[1] < corner[1] + height - c.eps
                    && c.hi[1] > corner[1] + c.eps
            }
            ShapeSpec::SlitSquare { corner, side, slit, half_thickness } => {
                let (square, removed) = Self::thick_slit(*corner, *side, slit, *half_thickness);
                square.cell_meets(c) && removed.is_none_or(|r| !r.cell_inside(c))
            }
            ShapeSpec::Union(a, b) => a.cell_meets(c) || b.cell_meets(c),
            ShapeSpec::Difference(a, b) => a.cell_meets(c) && !b.cell_inside(c),
        }
    }

    /// Zero-thickness slits contributed by this shape, as grid faces.
    fn slit_faces(&self, grid: &Grid, out: &mut Vec<Face>) -> Result<()> {
        match self {
            ShapeSpec::SlitSquare { slit, half_thickness, .. } if *half_thickness <= 0.0 => {
                out.extend(segment_faces(grid, slit)?);
            }
            ShapeSpec::Union(a, b) => {
                a.slit_faces(grid, out)?;
                b.slit_faces(grid, out)?;
            }
            ShapeSpec::Difference(a, _) => a.slit_faces(grid, out)?,
            _ => {}
        }
        Ok(())
    }
}

/// Grid faces covered by a segment that lies on a grid line.
pub(crate) fn segment_faces(grid: &Grid, seg: &Segment) -> Result<Vec<Face>> {
    let h = grid.h();
    let o = grid.origin();
    let (line_origin, along_origin, line_max, along_n) = match seg.axis {
        FaceAxis::X => (o[0], o[1], grid.nx(), grid.ny()),
        FaceAxis::Y => (o[1], o[0], grid.ny(), grid.nx()),
    };
    let s = (seg.at - line_origin) / h;
    let line = round(s);
    if abs(s - line) > 1e-9 || line < 0.0 || line as usize > line_max {
        return Err(Error::InvalidShape("slit does not lie on a grid line".to_string()));
    }
    let line = line as usize;
    let eps = 1e-9 * h;
    let faces = (0..along_n)
        .filter(|&k| {
            let a = along_origin + k as f64 * h;
            a >= seg.from - eps && a + h <= seg.to + eps
        })
        .map(|k| match seg.axis {
            FaceAxis::X => Face::x(line, k),
            FaceAxis::Y => Face::y(k, line),
        })
        .collect();
    Ok(faces)
}

/// Pixel approximation of a continuum shape.
///
/// Zero-thickness slits of [`ShapeSpec::SlitSquare`] become slit faces
/// wherever both neighbouring cells were selected.
pub fn rasterize(shape: &ShapeSpec, grid: &Grid, policy: Policy) -> Result<DomainMask> {
    shape.validate()?;
    let (lo, hi) = shape.bounding_box();
    let (glo, ghi) = (grid.origin(), grid.extent());
    let eps = 1e-9 * grid.h();
    if lo[0] < glo[0] - eps || lo[1] < glo[1] - eps || hi[0] > ghi[0] + eps || hi[1] > ghi[1] + eps {
        return Err(Error::InvalidShape("shape exceeds the grid box".to_string()));
    }
    let mut mask = DomainMask::empty(*grid);
    let h = grid.h();
    for j in 0..grid.ny() {
        for i in 0..grid.nx() {
            let v = grid.vertex_position(i, j);
            let cell = CellBox { lo: v, hi: [v[0] + h, v[1] + h], eps };
            if shape.cell_in(cell, policy) {
                mask.set_cell(i, j, true);
            }
        }
    }
    if mask.is_empty() {
        return Err(Error::DegenerateRasterization);
    }
    let mut faces = Vec::new();
    shape.slit_faces(grid, &mut faces)?;
    for face in faces {
        if mask.face_is_interior(face) {
            mask.add_slit(face)?;
        }
    }
    Ok(mask)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn disk() -> ShapeSpec {
        ShapeSpec::Disk { center: [0.5, 0.5], radius: 0.5 }
    }

    #[test]
    fn rect_covering_grid() {
        let g = Grid::unit_square(4);
        let r = ShapeSpec::Rect { corner: [0.0, 0.0], width: 1.0, height: 1.0 };
        for policy in [Policy::Inner, Policy::Outer, Policy::Center] {
            assert_eq!(rasterize(&r, &g, policy).unwrap().cell_count(), 16);
        }
    }

    #[test]
    fn disk_policies() {
        let g = Grid::unit_square(4);
        // enumerate the 16 cell centres: the four corner centres sit at
        // distance sqrt(2)*0.375 > 0.5, the other twelve are inside
        let oracle = (0..4)
            .flat_map(|j| (0..4).map(move |i| (i, j)))
            .filter(|&(i, j)| {
                let c = [(i as f64 + 0.5) * 0.25, (j as f64 + 0.5) * 0.25];
                ((c[0] - 0.5f64).powi(2) + (c[1] - 0.5f64).powi(2)).sqrt() < 0.5
            })
            .count();
        assert_eq!(oracle, 12);
        assert_eq!(rasterize(&disk(), &g, Policy::Center).unwrap().cell_count(), 12);
        assert_eq!(rasterize(&disk(), &g, Policy::Outer).unwrap().cell_count(), 16);
        // only the central 2x2 block lies fully inside
        assert_eq!(rasterize(&disk(), &g, Policy::Inner).unwrap().cell_count(), 4);
    }

    #[test]
    fn zero_thickness_slit_square() {
        let g = Grid::unit_square(4);
        let s = ShapeSpec::unit_slit_square(Segment { axis: FaceAxis::X, at: 0.5, from: 0.0, to: 0.5 });
        let m = rasterize(&s, &g, Policy::Inner).unwrap();
        assert_eq!(m.cell_count(), 16);
        let slits: Vec<Face> = m.slits().iter().copied().collect();
        assert_eq!(slits, vec![Face::x(2, 0), Face::x(2, 1)]);
    }

    #[test]
    fn thick_slit_removes_cells() {
        let g = Grid::unit_square(8);
        let s = ShapeSpec::SlitSquare {
            corner: [0.0, 0.0],
            side: 1.0,
            slit: Segment { axis: FaceAxis::X, at: 0.5, from: 0.25, to: 0.75 },
            half_thickness: 0.125,
        };
        let inner = rasterize(&s, &g, Policy::Inner).unwrap();
        let outer = rasterize(&s, &g, Policy::Outer).unwrap();
        // columns 3 and 4, rows 2..6 are removed exactly
        assert_eq!(inner.cell_count(), 64 - 8);
        assert_eq!(outer.cell_count(), 64 - 8);
        assert!(!inner.has_slits());
    }

    #[test]
    fn off_grid_slit_is_rejected() {
        let g = Grid::unit_square(4);
        let s = ShapeSpec::unit_slit_square(Segment { axis: FaceAxis::X, at: 0.4, from: 0.0, to: 0.5 });
        assert!(matches!(rasterize(&s, &g, Policy::Center), Err(Error::InvalidShape(_))));
    }

    #[test]
    fn degenerate_and_oversized() {
        let g = Grid::unit_square(4);
        let tiny = ShapeSpec::Disk { center: [0.5, 0.5], radius: 0.01 };
        assert_eq!(rasterize(&tiny, &g, Policy::Inner), Err(Error::DegenerateRasterization));
        let big = ShapeSpec::Disk { center: [0.5, 0.5], radius: 0.7 };
        assert!(matches!(rasterize(&big, &g, Policy::Center), Err(Error::InvalidShape(_))));
    }

    #[test]
    fn union_and_difference() {
        let g = Grid::unit_square(4);
        let left = ShapeSpec::Rect { corner: [0.0, 0.0], width: 0.5, height: 1.0 };
        let bottom = ShapeSpec::Rect { corner: [0.0, 0.0], width: 1.0, height: 0.5 };
        let u = ShapeSpec::Union(Box::new(left.clone()), Box::new(bottom.clone()));
        assert_eq!(rasterize(&u, &g, Policy::Inner).unwrap().cell_count(), 12);
        let d = ShapeSpec::Difference(Box::new(left), Box::new(bottom));
        for p in [Policy::Inner, Policy::Outer, Policy::Center] {
            assert_eq!(rasterize(&d, &g, p).unwrap().cell_count(), 4);
        }
    }
}
