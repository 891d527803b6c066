#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stokes_perturb_core::fields::{face_dofs, GridField};
use stokes_perturb_core::geometry::{rasterize, GridSlit, Policy, ShapeSpec};
use stokes_perturb_core::solver::CsrMatrix;
use stokes_perturb_core::{BcMode, DomainMask, Face, FaceAxis, Grid, MacField};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn disk(n: usize) -> DomainMask {
    let g = Grid::unit_square(n);
    rasterize(&ShapeSpec::Disk { center: [0.5, 0.5], radius: 0.4 }, &g, Policy::Center).unwrap()
}

pub fn slit_square(n: usize) -> DomainMask {
    let g = Grid::unit_square(n);
    GridSlit::middle_half(&g, FaceAxis::X).thickened(&g, 0).unwrap()
}

/// Uniform random values on the faces active for `mode`.
pub fn random_field(mask: &DomainMask, mode: BcMode, rng: &mut ChaCha8Rng) -> MacField {
    let map = face_dofs(mask, mode);
    let v: Vec<f64> = (0..map.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
    map.scatter(&v)
}

/// A random blob: the full `n × n` grid with a few cells knocked out,
/// optionally with a random interior slit segment.
pub fn random_mask(n: usize, holes: usize, with_slit: bool, rng: &mut ChaCha8Rng) -> DomainMask {
    let g = Grid::unit_square(n);
    let mut m = DomainMask::full(g);
    for _ in 0..holes {
        let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
        m.set_cell(i, j, false);
    }
    if with_slit {
        for _ in 0..3 {
            let i = rng.gen_range(1..n);
            let j = rng.gen_range(0..n);
            let face = Face::x(i, j);
            if m.face_is_interior(face) {
                m.add_slit(face).unwrap();
            }
        }
    }
    m
}

pub fn dense(m: &CsrMatrix) -> DMatrix<f64> {
    let mut d = DMatrix::zeros(m.nrows(), m.ncols());
    for (r, c, v) in m.triplets() {
        d[(r, c)] = v;
    }
    d
}

/// Minimum-norm solution through a symmetric eigendecomposition, dropping
/// eigenvalues below `1e-10` of the largest.
pub fn dense_pinv_solve(m: &CsrMatrix, b: &[f64]) -> Vec<f64> {
    let a = dense(m);
    let eig = a.symmetric_eigen();
    let lmax = eig.eigenvalues.iter().fold(0.0f64, |x, l| x.max(l.abs()));
    let q = &eig.eigenvectors;
    let bt = q.transpose() * DVector::from_column_slice(b);
    let mut y = DVector::zeros(bt.len());
    for k in 0..bt.len() {
        let l = eig.eigenvalues[k];
        if l.abs() > 1e-10 * lmax {
            y[k] = bt[k] / l;
        }
    }
    (q * y).iter().copied().collect()
}

/// Solution by LU factorization of a nonsingular matrix.
pub fn dense_solve(m: &CsrMatrix, b: &[f64]) -> Vec<f64> {
    let a = dense(m);
    a.lu().solve(&DVector::from_column_slice(b)).expect("nonsingular").iter().copied().collect()
}

pub fn rel_diff(a: &[f64], b: &[f64]) -> f64 {
    let d: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
    let n: f64 = b.iter().map(|y| y * y).sum::<f64>().sqrt();
    if n > 0.0 {
        d / n
    } else {
        d
    }
}

pub fn rel_field(a: &MacField, b: &MacField) -> f64 {
    let d = a.minus(b).unwrap().norm();
    let n = b.norm();
    if n > 0.0 {
        d / n
    } else {
        d
    }
}
