use alloc::format;
use alloc::vec::Vec;

use super::{DomainMask, Face, FaceAxis, Grid};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Increasing,
    Decreasing,
}

/// Nested masks on one grid together with their limit.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainSequence {
    direction: Direction,
    masks: Vec<DomainMask>,
    limit: DomainMask,
}

impl DomainSequence {
    /// Builds a sequence, checking the nesting invariants of `direction`.
    pub fn new(direction: Direction, masks: Vec<DomainMask>, limit: DomainMask) -> Result<Self> {
        let seq = DomainSequence { direction, masks, limit };
        seq.validate()?;
        Ok(seq)
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn masks(&self) -> &[DomainMask] {
        &self.masks
    }

    pub fn limit(&self) -> &DomainMask {
        &self.limit
    }

    pub fn grid(&self) -> &Grid {
        self.limit.grid()
    }

    pub fn len(&self) -> usize {
        self.masks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masks.is_empty()
    }

    /// Checks that all masks share the limit's grid and are nested.
    ///
    /// Increasing: `Ω_n ⊆ Ω_{n+1} ⊆ Ω`, and a slit of a larger domain is a
    /// slit of every smaller domain containing both of its cells.
    /// Decreasing: `Ω_n ⊇ Ω_{n+1} ⊇ Ω`, and slits can only be added.
    pub fn validate(&self) -> Result<()> {
        let grid = self.limit.grid();
        for (n, m) in self.masks.iter().enumerate() {
            if m.grid() != grid {
                return Err(Error::InvalidExperiment(format!("level {n} uses a different grid")));
            }
        }
        let chain: Vec<&DomainMask> = self.masks.iter().chain(core::iter::once(&self.limit)).collect();
        for (n, pair) in chain.windows(2).enumerate() {
            let (a, b) = (pair[0], pair[1]);
            let nested = match self.direction {
                Direction::Increasing => a.cells_subset_of(b) && slits_inherited(a, b),
                Direction::Decreasing => {
                    b.cells_subset_of(a) && a.slits().iter().all(|f| b.is_slit(*f))
                }
            };
            if !nested {
                return Err(Error::SequenceNotMonotone { level: n });
            }
        }
        Ok(())
    }
}

/// Every slit of `larger` whose cells both lie in `smaller` is a slit there too.
fn slits_inherited(smaller: &DomainMask, larger: &DomainMask) -> bool {
    larger
        .slits()
        .iter()
        .filter(|f| smaller.face_is_interior(**f))
        .all(|f| smaller.is_slit(*f))
}

/// A slit made of whole faces: faces `(line, k)` for `k` in `start..end`
/// (vertical faces when `axis = X`, horizontal faces `(k, line)` when `axis = Y`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridSlit {
    pub axis: FaceAxis,
    pub line: usize,
    pub start: usize,
    pub end: usize,
}

impl GridSlit {
    pub fn faces(&self) -> impl Iterator<Item = Face> + '_ {
        (self.start..self.end).map(move |k| match self.axis {
            FaceAxis::X => Face::x(self.line, k),
            FaceAxis::Y => Face::y(k, self.line),
        })
    }

    /// The vertical slit on the middle grid line covering the middle half.
    pub fn middle_half(grid: &Grid, axis: FaceAxis) -> GridSlit {
        let (across, along) = match axis {
            FaceAxis::X => (grid.nx(), grid.ny()),
            FaceAxis::Y => (grid.ny(), grid.nx()),
        };
        GridSlit { axis, line: across / 2, start: along / 4, end: along - along / 4 }
    }

    /// Full square on `grid` with the slit thickened to `k` cells
    /// (`k = 0` gives the slit itself as faces).
    pub fn thickened(&self, grid: &Grid, k: usize) -> Result<DomainMask> {
        let mut mask = DomainMask::full(*grid);
        if k == 0 {
            return mask.with_slits(self.faces());
        }
        let lo = self.line.checked_sub(k.div_ceil(2)).ok_or(Error::GridTooSmall)?;
        let hi = self.line + k / 2;
        let across = match self.axis {
            FaceAxis::X => grid.nx(),
            FaceAxis::Y => grid.ny(),
        };
        if hi > across {
            return Err(Error::GridTooSmall);
        }
        for a in lo..hi {
            for b in self.start..self.end {
                match self.axis {
                    FaceAxis::X => mask.set_cell(a, b, false),
                    FaceAxis::Y => mask.set_cell(b, a, false),
                }
            }
        }
        Ok(mask)
    }
}

/// Recipes for monotone domain sequences on a fixed grid.
#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    /// `levels` copies of `mask`; the limit is `limit` when given (for example
    /// the same cells with slits added), otherwise `mask` itself.
    Constant { mask: DomainMask, levels: usize, limit: Option<DomainMask> },
    /// Increasing: `erode(base, k)` for each offset, limit `base`.
    Erosion { base: DomainMask, offsets: Vec<usize> },
    /// Decreasing: `dilate(base, k)` for each offset, limit `base`.
    Dilation { base: DomainMask, offsets: Vec<usize> },
    /// Increasing: the full square minus the slit thickened to each width
    /// (in cells), limit the square with the slit as faces.
    SlitThickness { slit: GridSlit, thicknesses: Vec<usize> },
}

/// Generates a domain sequence and validates its nesting.
pub fn make_sequence(family: &Family, grid: &Grid) -> Result<DomainSequence> {
    let check_grid = |m: &DomainMask| {
        if m.grid() != grid {
            Err(Error::InvalidExperiment("family mask does not live on the requested grid".into()))
        } else {
            Ok(())
        }
    };
    match family {
        Family::Constant { mask, levels, limit } => {
            check_grid(mask)?;
            let limit = limit.clone().unwrap_or_else(|| mask.clone());
            check_grid(&limit)?;
            let direction = if limit.cells_subset_of(mask) && limit != *mask {
                Direction::Decreasing
            } else {
                Direction::Increasing
            };
            DomainSequence::new(direction, alloc::vec![mask.clone(); *levels], limit)
        }
        Family::Erosion { base, offsets } => {
            check_grid(base)?;
            let masks = offsets.iter().map(|&k| base.erode(k)).collect();
            DomainSequence::new(Direction::Increasing, masks, base.clone())
        }
        Family::Dilation { base, offsets } => {
            check_grid(base)?;
            let masks = offsets.iter().map(|&k| base.dilate(k)).collect::<Result<Vec<_>>>()?;
            DomainSequence::new(Direction::Decreasing, masks, base.clone())
        }
        Family::SlitThickness { slit, thicknesses } => {
            let masks = thicknesses
                .iter()
                .map(|&k| slit.thickened(grid, k))
                .collect::<Result<Vec<_>>>()?;
            DomainSequence::new(Direction::Increasing, masks, slit.thickened(grid, 0)?)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn constant_family() {
        let g = Grid::unit_square(4);
        let m = DomainMask::full(g);
        let seq = make_sequence(&Family::Constant { mask: m.clone(), levels: 3, limit: None }, &g).unwrap();
        assert_eq!(seq.len(), 3);
        assert!(seq.masks().iter().all(|x| *x == m));
    }

    #[test]
    fn erosion_family_counts() {
        let g = Grid::unit_square(8);
        let seq = make_sequence(
            &Family::Erosion { base: DomainMask::full(g), offsets: vec![2, 1, 0] },
            &g,
        )
        .unwrap();
        let counts: Vec<usize> = seq.masks().iter().map(|m| m.cell_count()).collect();
        assert_eq!(counts, vec![16, 36, 64]);
        assert_eq!(seq.direction(), Direction::Increasing);
    }

    #[test]
    fn slit_thickness_family() {
        let g = Grid::unit_square(8);
        let slit = GridSlit { axis: FaceAxis::X, line: 4, start: 2, end: 6 };
        let seq = make_sequence(&Family::SlitThickness { slit, thicknesses: vec![4, 2, 1, 0] }, &g).unwrap();
        // removed cells per thickness: k columns times 4 rows
        let counts: Vec<usize> = seq.masks().iter().map(|m| m.cell_count()).collect();
        assert_eq!(counts, vec![64 - 16, 64 - 8, 64 - 4, 64]);
        let last = &seq.masks()[3];
        assert_eq!(last, seq.limit());
        assert_eq!(last.slits().len(), 4);
    }

    #[test]
    fn dilation_onto_slit_square() {
        let g = Grid::unit_square(8);
        let slit = GridSlit::middle_half(&g, FaceAxis::X);
        let base = slit.thickened(&g, 0).unwrap();
        let seq = make_sequence(&Family::Dilation { base: base.clone(), offsets: vec![0, 0] }, &g).unwrap();
        assert_eq!(seq.direction(), Direction::Decreasing);
        assert!(seq.masks().iter().all(|m| !m.has_slits() && m.cell_count() == 64));
        assert!(seq.limit().has_slits());
    }

    #[test]
    fn non_monotone_is_rejected() {
        let g = Grid::unit_square(8);
        let full = DomainMask::full(g);
        let small = full.erode(2);
        let err = DomainSequence::new(Direction::Increasing, vec![full.clone(), small.clone()], full.clone());
        assert_eq!(err, Err(Error::SequenceNotMonotone { level: 0 }));
        let err = DomainSequence::new(Direction::Decreasing, vec![small.clone()], full);
        assert_eq!(err, Err(Error::SequenceNotMonotone { level: 0 }));
        // the erosion family with growing offsets is not increasing
        let bad = make_sequence(&Family::Erosion { base: DomainMask::full(g), offsets: vec![0, 1] }, &g);
        assert!(matches!(bad, Err(Error::SequenceNotMonotone { .. })));
    }

    #[test]
    fn increasing_sequence_must_keep_limit_slits() {
        let g = Grid::unit_square(8);
        let slit = GridSlit::middle_half(&g, FaceAxis::X);
        let limit = slit.thickened(&g, 0).unwrap();
        // the plain square contains both cells of every slit face but not the slit
        let err = DomainSequence::new(Direction::Increasing, vec![DomainMask::full(g)], limit);
        assert!(matches!(err, Err(Error::SequenceNotMonotone { .. })));
    }
}
