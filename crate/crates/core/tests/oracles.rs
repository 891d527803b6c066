mod common;

use common::*;
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use stokes_perturb_core::fields::{cell_dofs, div_h, face_dofs, grad_h, GridField};
use stokes_perturb_core::leray::gradient_matrix;
use stokes_perturb_core::resolvents::{laplace_resolvent, stokes_resolvent, LaplaceField, LaplaceProblem, StokesProblem};
use stokes_perturb_core::solver::{cg, minres, CsrMatrix, SolveOptions, SparseSystem, SystemKind};
use stokes_perturb_core::{BcMode, CellField, DomainMask, Grid, MacField, VertexField};

#[test]
fn gradient_is_minus_divergence_transpose() {
    let g = Grid::unit_square(3);
    let mask = DomainMask::full(g);
    let faces = face_dofs(&mask, BcMode::Weak);
    let cells = cell_dofs(&mask);
    let gm = gradient_matrix(&mask, BcMode::Weak, &faces, &cells);
    let mut rng = rng(11);
    for _ in 0..5 {
        let p = CellField::from_values(g, (0..g.cell_count()).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap();
        let w = faces.scatter(&(0..faces.len()).map(|_| rng.gen_range(-1.0..1.0)).collect::<Vec<_>>());
        let gp = grad_h(&p, &mask, BcMode::Weak);
        assert!(rel_diff(&faces.gather(&gp), &gm.mul_vec(&cells.gather(&p))) < 1e-14);
        let lhs = gp.inner(&w).unwrap();
        let rhs = -p.inner(&div_h(&w)).unwrap();
        assert!((lhs - rhs).abs() < 1e-12 * (1.0 + lhs.abs()));
    }
}

fn random_dense(n: usize, seed: u64) -> DMatrix<f64> {
    let mut rng = rng(seed);
    DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0))
}

fn csr(d: &DMatrix<f64>) -> CsrMatrix {
    let mut t = Vec::new();
    for r in 0..d.nrows() {
        for c in 0..d.ncols() {
            t.push((r, c, d[(r, c)]));
        }
    }
    CsrMatrix::from_triplets(d.nrows(), d.ncols(), t)
}

#[test]
fn cg_matches_dense_spd() {
    let r = random_dense(8, 1);
    let a = r.transpose() * &r + DMatrix::identity(8, 8);
    let sys = SparseSystem::new(csr(&a), SystemKind::Spd, vec![]).unwrap();
    let b: Vec<f64> = (0..8).map(|k| (k as f64).sin()).collect();
    let x = cg(&sys, &b, &SolveOptions::with_tol(1e-12)).unwrap().0;
    let exact = a.lu().solve(&DVector::from_column_slice(&b)).unwrap();
    assert!(rel_diff(&x, exact.as_slice()) < 1e-8);
}

#[test]
fn minres_matches_pseudoinverse_with_nullspace() {
    // symmetric indefinite with a one-dimensional kernel spanned by z
    let n = 10;
    let mut rng = rng(2);
    let z = DVector::from_fn(n, |_, _| rng.gen_range(-1.0..1.0)).normalize();
    let proj = DMatrix::identity(n, n) - &z * z.transpose();
    let r = random_dense(n, 3);
    let mut d = DMatrix::zeros(n, n);
    for k in 0..n {
        d[(k, k)] = if k % 2 == 0 { 1.0 + k as f64 } else { -1.0 - k as f64 };
    }
    let q = r.qr().q();
    let a = &proj * (&q * d * q.transpose()) * &proj;
    let a = (&a + a.transpose()) * 0.5;
    let sys = SparseSystem::new(csr(&a), SystemKind::SymmetricIndefinite, vec![z.as_slice().to_vec()]).unwrap();
    let b: Vec<f64> = (0..n).map(|k| (k as f64 * 0.7).cos()).collect();
    let x = minres(&sys, &b, &SolveOptions::with_tol(1e-12)).unwrap().0;
    assert!(rel_diff(&x, &dense_pinv_solve(sys.matrix(), &b)) < 1e-7);
}

#[test]
fn laplace_resolvents_match_dense_solves() {
    let mut rng = rng(4);
    for _ in 0..10 {
        let mask = random_mask(6, 4, true, &mut rng);
        for mode in [BcMode::Weak, BcMode::Pseudo] {
            let g = *mask.grid();
            let f = VertexField::from_values(g, (0..g.vertex_count()).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap();
            let p = LaplaceProblem::scalar(mask.clone(), mode, f.clone());
            let (u, _) = laplace_resolvent(&p).unwrap();
            let sys = stokes_perturb_core::resolvents::assemble_scalar_laplace(&mask, mode, 1.0).unwrap();
            let b = sys.dofs.gather(&f);
            let exact = dense_solve(sys.system.matrix(), &b);
            let LaplaceField::Scalar(u) = u else { panic!("scalar problem") };
            assert!(rel_diff(&sys.dofs.gather(&u), &exact) < 1e-8);
        }
    }
}

#[test]
fn stokes_velocity_matches_dense_pseudoinverse() {
    let mut rng = rng(5);
    for _ in 0..10 {
        let mask = random_mask(6, 3, true, &mut rng);
        for mode in [BcMode::Weak, BcMode::Pseudo] {
            let f = random_field(&mask, BcMode::Pseudo, &mut rng);
            let sol = stokes_resolvent(&StokesProblem::new(mask.clone(), mode, f.clone())).unwrap();
            let sys = stokes_perturb_core::resolvents::assemble_stokes(&mask, mode, 1.0).unwrap();
            let faces = face_dofs(&mask, mode);
            let mut b = faces.gather(&f);
            b.resize(sys.system.dim(), 0.0);
            let exact = dense_pinv_solve(sys.system.matrix(), &b);
            let u: MacField = faces.scatter(&exact[..faces.len()]);
            assert!(rel_field(&sol.velocity, &u) < 1e-7);
        }
    }
}
