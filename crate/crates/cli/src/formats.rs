//! Text interchange formats and atomic file output.
//!
//! Mask files:
//!
//! ```text
//! # comments start with '#'
//! nx 4
//! ny 3
//! h 0.25
//! origin 0 0
//! cells
//! 1111
//! 1111
//! 0110
//! slits
//! x 2 0
//! ```
//!
//! Cell rows are listed from `j = 0` upward, `i` increasing along each row.
//! Each slit line is `axis i j` with `axis` one of `x`, `y`.
//!
//! Field files are CSV with header `kind,axis,i,j,value`, where `kind` is
//! `cell`, `vertex` or `face`, and `axis` is `x`/`y` for faces and `-`
//! otherwise. Entries not listed are zero.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use stokes_perturb_core::fields::GridField;
use stokes_perturb_core::solver::CsrMatrix;
use stokes_perturb_core::{CellField, DomainMask, Face, FaceAxis, Grid, MacField, VertexField};

use crate::error::{CliError, Result};

/// Writes `bytes` to `path` through a sibling temporary file and a rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let name = path.file_name().ok_or_else(|| CliError::Usage(format!("{} is not a file path", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    let mut f = fs::File::create(&tmp).map_err(|e| CliError::io(&tmp, e))?;
    f.write_all(bytes).and_then(|_| f.sync_all()).map_err(|e| CliError::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| CliError::io(path, e))
}

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

fn axis_name(axis: FaceAxis) -> &'static str {
    match axis {
        FaceAxis::X => "x",
        FaceAxis::Y => "y",
    }
}

fn parse_axis(s: &str) -> Option<FaceAxis> {
    match s {
        "x" => Some(FaceAxis::X),
        "y" => Some(FaceAxis::Y),
        _ => None,
    }
}

pub fn format_mask(mask: &DomainMask) -> String {
    let g = mask.grid();
    let mut s = String::new();
    let o = g.origin();
    let _ = writeln!(s, "nx {}\nny {}\nh {}\norigin {} {}\ncells", g.nx(), g.ny(), g.h(), o[0], o[1]);
    for j in 0..g.ny() {
        for i in 0..g.nx() {
            s.push(if mask.contains(i, j) { '1' } else { '0' });
        }
        s.push('\n');
    }
    s.push_str("slits\n");
    for f in mask.slits() {
        let _ = writeln!(s, "{} {} {}", axis_name(f.axis), f.i, f.j);
    }
    s
}

pub fn parse_mask(text: &str, path: &Path) -> Result<DomainMask> {
    let err = |line: usize, msg: String| CliError::Parse { path: path.to_path_buf(), line, msg };
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let mut header = |key: &str, count: usize| -> Result<(usize, Vec<String>)> {
        let (no, line) = lines.next().ok_or_else(|| err(0, format!("missing `{key}` line")))?;
        let mut parts = line.split_whitespace();
        if parts.next() != Some(key) {
            return Err(err(no, format!("expected `{key}`")));
        }
        let rest: Vec<String> = parts.map(str::to_string).collect();
        if rest.len() != count {
            return Err(err(no, format!("`{key}` takes {count} values")));
        }
        Ok((no, rest))
    };
    let num = |no: usize, s: &str| s.parse::<f64>().map_err(|_| err(no, format!("bad number `{s}`")));
    let int = |no: usize, s: &str| s.parse::<usize>().map_err(|_| err(no, format!("bad integer `{s}`")));
    let (no, v) = header("nx", 1)?;
    let nx = int(no, &v[0])?;
    let (no, v) = header("ny", 1)?;
    let ny = int(no, &v[0])?;
    let (no, v) = header("h", 1)?;
    let h = num(no, &v[0])?;
    let (no, v) = header("origin", 2)?;
    let origin = [num(no, &v[0])?, num(no, &v[1])?];
    header("cells", 0)?;
    let grid = Grid::new(origin, h, nx, ny).map_err(|e| err(no, e.to_string()))?;
    let mut cells = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        let (no, row) = lines.next().ok_or_else(|| err(0, format!("missing cell row {j}")))?;
        if row.len() != nx {
            return Err(err(no, format!("cell row has {} entries, expected {nx}", row.len())));
        }
        for c in row.chars() {
            match c {
                '0' => cells.push(false),
                '1' => cells.push(true),
                _ => return Err(err(no, format!("bad cell character `{c}`"))),
            }
        }
    }
    let mut mask = DomainMask::from_cells(grid, cells)?;
    match lines.next() {
        None => return Ok(mask),
        Some((_, "slits")) => {}
        Some((no, _)) => return Err(err(no, "expected `slits`".into())),
    }
    for (no, line) in lines {
        let parts: Vec<&str> = line.split_whitespace().collect();
        let [a, i, j] = parts[..] else {
            return Err(err(no, "slit lines are `axis i j`".into()));
        };
        let axis = parse_axis(a).ok_or_else(|| err(no, format!("bad axis `{a}`")))?;
        let face = Face { axis, i: int(no, i)?, j: int(no, j)? };
        if !grid.contains_face(face) {
            return Err(err(no, "slit face outside the grid".into()));
        }
        mask.add_slit(face).map_err(|e| err(no, e.to_string()))?;
    }
    Ok(mask)
}

pub fn read_mask(path: &Path) -> Result<DomainMask> {
    parse_mask(&read_text(path)?, path)
}

/// A field read from or written to CSV.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyField {
    Cell(CellField),
    Vertex(VertexField),
    Face(MacField),
}

impl AnyField {
    pub fn kind(&self) -> &'static str {
        match self {
            AnyField::Cell(_) => "cell",
            AnyField::Vertex(_) => "vertex",
            AnyField::Face(_) => "face",
        }
    }

    pub fn norm(&self) -> f64 {
        match self {
            AnyField::Cell(f) => f.norm(),
            AnyField::Vertex(f) => f.norm(),
            AnyField::Face(f) => f.norm(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        match self {
            AnyField::Cell(f) => f.max_abs(),
            AnyField::Vertex(f) => f.max_abs(),
            AnyField::Face(f) => f.max_abs(),
        }
    }
}

const FIELD_HEADER: &str = "kind,axis,i,j,value";

pub fn format_field(field: &AnyField) -> String {
    let mut s = String::from(FIELD_HEADER);
    s.push('\n');
    match field {
        AnyField::Cell(f) => {
            let g = f.grid();
            for j in 0..g.ny() {
                for i in 0..g.nx() {
                    let _ = writeln!(s, "cell,-,{i},{j},{}", f.get(i, j));
                }
            }
        }
        AnyField::Vertex(f) => {
            let g = f.grid();
            for j in 0..=g.ny() {
                for i in 0..=g.nx() {
                    let _ = writeln!(s, "vertex,-,{i},{j},{}", f.get(i, j));
                }
            }
        }
        AnyField::Face(f) => {
            let g = f.grid();
            for axis in [FaceAxis::X, FaceAxis::Y] {
                for k in 0..g.face_count(axis) {
                    let face = g.face_at(axis, k);
                    let _ = writeln!(s, "face,{},{},{},{}", axis_name(axis), face.i, face.j, f.get(face));
                }
            }
        }
    }
    s
}

/// Parses a field CSV on `grid`. All rows must share one kind.
pub fn parse_field(text: &str, grid: &Grid, path: &Path) -> Result<AnyField> {
    let err = |line: usize, msg: String| CliError::Parse { path: path.to_path_buf(), line, msg };
    let mut rows = text.lines().enumerate().map(|(k, l)| (k + 1, l.trim())).filter(|(_, l)| !l.is_empty());
    match rows.next() {
        Some((_, FIELD_HEADER)) => {}
        Some((no, _)) => return Err(err(no, format!("expected header `{FIELD_HEADER}`"))),
        None => return Err(err(0, "empty field file".into())),
    }
    let mut field: Option<AnyField> = None;
    for (no, row) in rows {
        let cols: Vec<&str> = row.split(',').map(str::trim).collect();
        let [kind, axis, i, j, value] = cols[..] else {
            return Err(err(no, "expected 5 columns".into()));
        };
        let i: usize = i.parse().map_err(|_| err(no, format!("bad index `{i}`")))?;
        let j: usize = j.parse().map_err(|_| err(no, format!("bad index `{j}`")))?;
        let value: f64 = value.parse().map_err(|_| err(no, format!("bad value `{value}`")))?;
        let f = field.get_or_insert_with(|| match kind {
            "cell" => AnyField::Cell(CellField::zeros(*grid)),
            "vertex" => AnyField::Vertex(VertexField::zeros(*grid)),
            _ => AnyField::Face(MacField::zeros(*grid)),
        });
        if f.kind() != kind {
            return Err(err(no, format!("kind `{kind}` does not match `{}`", f.kind())));
        }
        let out_of_range = || err(no, format!("index ({i}, {j}) outside the grid"));
        match f {
            AnyField::Cell(c) => {
                if i >= grid.nx() || j >= grid.ny() {
                    return Err(out_of_range());
                }
                c.set(i, j, value);
            }
            AnyField::Vertex(v) => {
                if i > grid.nx() || j > grid.ny() {
                    return Err(out_of_range());
                }
                v.set(i, j, value);
            }
            AnyField::Face(m) => {
                let axis = parse_axis(axis).ok_or_else(|| err(no, format!("bad axis `{axis}`")))?;
                let face = Face { axis, i, j };
                if !grid.contains_face(face) {
                    return Err(out_of_range());
                }
                m.set(face, value);
            }
        }
    }
    field.ok_or_else(|| err(0, "field file has no rows".into()))
}

pub fn read_field(path: &Path, grid: &Grid) -> Result<AnyField> {
    parse_field(&read_text(path)?, grid, path)
}

/// Coordinate text dump: one `row col value` line per stored entry.
pub fn format_matrix(m: &CsrMatrix) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# {} {} {}", m.nrows(), m.ncols(), m.nnz());
    for (r, c, v) in m.triplets() {
        let _ = writeln!(s, "{r} {c} {v}");
    }
    s
}
