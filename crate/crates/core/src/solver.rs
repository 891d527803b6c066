//! Sparse symmetric linear algebra: compressed-row assembly, conjugate
//! gradients, MINRES, and deflation of known nullspaces.
//!
//! All reductions run sequentially in a fixed order, so repeated solves of
//! the same system produce bitwise-identical results.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::float::{abs, dot, hypot, norm, sqrt};
use crate::timer::Timer;

/// Compressed sparse row matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    nrows: usize,
    ncols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Builds a matrix from `(row, col, value)` triplets; duplicates are summed
    /// and exact zeros dropped.
    pub fn from_triplets(nrows: usize, ncols: usize, mut triplets: Vec<(usize, usize, f64)>) -> Self {
        triplets.sort_unstable_by_key(|t| (t.0, t.1));
        let mut row_ptr = vec![0; nrows + 1];
        let mut col_idx = Vec::with_capacity(triplets.len());
        let mut values: Vec<f64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        let mut rows = Vec::with_capacity(triplets.len());
        for (r, c, v) in triplets {
            debug_assert!(r < nrows && c < ncols);
            if last == Some((r, c)) {
                *values.last_mut().expect("entry exists") += v;
            } else {
                rows.push(r);
                col_idx.push(c);
                values.push(v);
                last = Some((r, c));
            }
        }
        // drop cancelled entries
        let mut keep_cols = Vec::with_capacity(col_idx.len());
        let mut keep_vals = Vec::with_capacity(values.len());
        for ((r, c), v) in rows.into_iter().zip(col_idx).zip(values) {
            if v != 0.0 {
                row_ptr[r + 1] += 1;
                keep_cols.push(c);
                keep_vals.push(v);
            }
        }
        for r in 0..nrows {
            row_ptr[r + 1] += row_ptr[r];
        }
        CsrMatrix { nrows, ncols, row_ptr, col_idx: keep_cols, values: keep_vals }
    }

    pub fn identity(n: usize) -> Self {
        CsrMatrix::from_triplets(n, n, (0..n).map(|i| (i, i, 1.0)).collect())
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Column indices and values of one row.
    pub fn row(&self, r: usize) -> (&[usize], &[f64]) {
        let (a, b) = (self.row_ptr[r], self.row_ptr[r + 1]);
        (&self.col_idx[a..b], &self.values[a..b])
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        let (cols, vals) = self.row(r);
        match cols.binary_search(&c) {
            Ok(k) => vals[k],
            Err(_) => 0.0,
        }
    }

    /// All stored entries in row-major order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.nrows).flat_map(move |r| {
            let (cols, vals) = self.row(r);
            cols.iter().zip(vals).map(move |(&c, &v)| (r, c, v))
        })
    }

    /// `y = A x`.
    pub fn mul_vec_into(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.ncols);
        debug_assert_eq!(y.len(), self.nrows);
        for (r, yr) in y.iter_mut().enumerate() {
            let (cols, vals) = self.row(r);
            *yr = cols.iter().zip(vals).map(|(&c, &v)| v * x[c]).sum();
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.nrows];
        self.mul_vec_into(x, &mut y);
        y
    }

    pub fn transpose(&self) -> CsrMatrix {
        CsrMatrix::from_triplets(self.ncols, self.nrows, self.triplets().map(|(r, c, v)| (c, r, v)).collect())
    }

    /// Sparse product `self * other`.
    pub fn matmul(&self, other: &CsrMatrix) -> CsrMatrix {
        assert_eq!(self.ncols, other.nrows, "inner dimensions must agree");
        let mut acc = vec![0.0; other.ncols];
        let mut touched: Vec<usize> = Vec::new();
        let mut seen = vec![false; other.ncols];
        let mut triplets = Vec::new();
        for r in 0..self.nrows {
            let (cols, vals) = self.row(r);
            for (&k, &a) in cols.iter().zip(vals) {
                let (ocols, ovals) = other.row(k);
                for (&c, &b) in ocols.iter().zip(ovals) {
                    if !seen[c] {
                        seen[c] = true;
                        touched.push(c);
                    }
                    acc[c] += a * b;
                }
            }
            touched.sort_unstable();
            for &c in &touched {
                triplets.push((r, c, acc[c]));
                acc[c] = 0.0;
                seen[c] = false;
            }
            touched.clear();
        }
        CsrMatrix::from_triplets(self.nrows, other.ncols, triplets)
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.nrows.min(self.ncols)).map(|r| self.get(r, r)).collect()
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.nrows)
            .map(|r| self.row(r).1.iter().map(|v| abs(*v)).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(abs(*v)))
    }

    /// Row-major dense copy, for small oracles and dumps.
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut d = vec![vec![0.0; self.ncols]; self.nrows];
        for (r, c, v) in self.triplets() {
            d[r][c] = v;
        }
        d
    }

    /// Fails with the worst offending entry if `|a_ij - a_ji| > rel_tol * max|a|`.
    pub fn check_symmetric(&self, rel_tol: f64) -> Result<()> {
        if self.nrows != self.ncols {
            return Err(Error::DimensionMismatch { expected: self.nrows, found: self.ncols });
        }
        let tol = rel_tol * self.max_abs();
        for (r, c, v) in self.triplets() {
            let delta = abs(v - self.get(c, r));
            if delta > tol {
                return Err(Error::AssemblyAsymmetry { row: r, col: c, delta });
            }
        }
        Ok(())
    }
}

/// Which Krylov method fits the operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SystemKind {
    Spd,
    SymmetricIndefinite,
}

/// An assembled symmetric operator with an optional orthonormal nullspace basis.
#[derive(Debug, Clone)]
pub struct SparseSystem {
    matrix: CsrMatrix,
    nullspace: Vec<Vec<f64>>,
    kind: SystemKind,
}

/// Relative symmetry tolerance enforced on assembly.
pub const SYMMETRY_TOL: f64 = 1e-12;
/// Relative defect allowed for declared nullspace vectors.
pub const NULLSPACE_TOL: f64 = 1e-10;

impl SparseSystem {
    /// Checks symmetry and the nullspace, orthonormalizing the basis.
    pub fn new(matrix: CsrMatrix, kind: SystemKind, nullspace: Vec<Vec<f64>>) -> Result<Self> {
        matrix.check_symmetric(SYMMETRY_TOL)?;
        let n = matrix.nrows();
        let mut basis: Vec<Vec<f64>> = Vec::with_capacity(nullspace.len());
        let a_norm = matrix.norm_inf();
        for (index, mut z) in nullspace.into_iter().enumerate() {
            if z.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: z.len() });
            }
            let z_norm = norm(&z);
            let az = matrix.mul_vec(&z);
            let defect = norm(&az);
            if defect > NULLSPACE_TOL * a_norm * z_norm || z_norm == 0.0 {
                return Err(Error::BadNullspace { index, defect });
            }
            for q in &basis {
                let c = dot(q, &z);
                z.iter_mut().zip(q).for_each(|(a, b)| *a -= c * b);
            }
            let zn = norm(&z);
            if zn <= 1e-12 * z_norm {
                // linearly dependent on earlier vectors
                continue;
            }
            z.iter_mut().for_each(|a| *a /= zn);
            basis.push(z);
        }
        Ok(SparseSystem { matrix, nullspace: basis, kind })
    }

    /// Assembles from triplets of an `n × n` operator.
    pub fn assemble(
        n: usize,
        triplets: Vec<(usize, usize, f64)>,
        kind: SystemKind,
        nullspace: Vec<Vec<f64>>,
    ) -> Result<Self> {
        SparseSystem::new(CsrMatrix::from_triplets(n, n, triplets), kind, nullspace)
    }

    pub fn matrix(&self) -> &CsrMatrix {
        &self.matrix
    }

    pub fn nullspace(&self) -> &[Vec<f64>] {
        &self.nullspace
    }

    pub fn kind(&self) -> SystemKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Solves with CG or MINRES according to [`SparseSystem::kind`].
    pub fn solve(&self, b: &[f64], opts: &SolveOptions) -> Result<(Vec<f64>, SolveStats)> {
        match self.kind {
            SystemKind::Spd => cg(self, b, opts),
            SystemKind::SymmetricIndefinite => minres(self, b, opts),
        }
    }

    fn deflate_in_place(&self, x: &mut [f64]) {
        for z in &self.nullspace {
            let c = dot(z, x);
            x.iter_mut().zip(z).for_each(|(a, b)| *a -= c * b);
        }
    }

    fn residual(&self, b: &[f64], x: &[f64]) -> Vec<f64> {
        let mut r = self.matrix.mul_vec(x);
        r.iter_mut().zip(b).for_each(|(ri, bi)| *ri = bi - *ri);
        self.deflate_in_place(&mut r);
        r
    }

    /// Jacobi preconditioner `M⁻¹`; entries with zero diagonal get 1.
    fn jacobi(&self) -> Vec<f64> {
        self.matrix
            .diagonal()
            .into_iter()
            .map(|d| if d != 0.0 { 1.0 / abs(d) } else { 1.0 })
            .collect()
    }
}

/// Projects `b` onto the orthogonal complement of an orthonormal basis.
pub fn deflate(b: &[f64], nullspace: &[Vec<f64>]) -> Vec<f64> {
    let mut x = b.to_vec();
    for z in nullspace {
        let c = dot(z, &x);
        x.iter_mut().zip(z).for_each(|(a, bz)| *a -= c * bz);
    }
    x
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    /// Target relative residual `‖b - A x‖ / ‖b‖`.
    pub tol: f64,
    /// Iteration cap; `None` means `50 n`.
    pub max_iter: Option<usize>,
    /// Diagonal preconditioning.
    pub jacobi: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { tol: 1e-10, max_iter: None, jacobi: false }
    }
}

impl SolveOptions {
    pub fn with_tol(tol: f64) -> Self {
        SolveOptions { tol, ..Default::default() }
    }

    fn cap(&self, n: usize) -> usize {
        self.max_iter.unwrap_or(50 * n.max(1))
    }
}

/// Outcome of one Krylov solve.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SolveStats {
    pub iterations: usize,
    /// `‖b - A x‖ / ‖b‖`, recomputed from the returned iterate.
    pub residual: f64,
    pub seconds: f64,
}

impl SolveStats {
    /// Combines the statistics of consecutive solves.
    pub fn merge(self, other: SolveStats) -> SolveStats {
        SolveStats {
            iterations: self.iterations + other.iterations,
            residual: self.residual.max(other.residual),
            seconds: self.seconds + other.seconds,
        }
    }
}

fn check_rhs(system: &SparseSystem, b: &[f64]) -> Result<()> {
    if b.len() != system.dim() {
        return Err(Error::DimensionMismatch { expected: system.dim(), found: b.len() });
    }
    Ok(())
}

/// Preconditioned conjugate gradients for SPD systems.
///
/// The right-hand side is deflated against the stored nullspace and the
/// solution returned orthogonal to it.
pub fn cg(system: &SparseSystem, b: &[f64], opts: &SolveOptions) -> Result<(Vec<f64>, SolveStats)> {
    check_rhs(system, b)?;
    let timer = Timer::start();
    let n = system.dim();
    let b = deflate(b, &system.nullspace);
    let b_norm = norm(&b);
    if b_norm == 0.0 {
        return Ok((vec![0.0; n], SolveStats { seconds: timer.seconds(), ..Default::default() }));
    }
    let minv = opts.jacobi.then(|| system.jacobi());
    let precondition = |r: &[f64]| -> Vec<f64> {
        let mut z = match &minv {
            Some(m) => r.iter().zip(m).map(|(a, b)| a * b).collect(),
            None => r.to_vec(),
        };
        if minv.is_some() {
            system.deflate_in_place(&mut z);
        }
        z
    };

    let cap = opts.cap(n);
    let target = opts.tol * b_norm;
    let mut x = vec![0.0; n];
    let mut r = b.clone();
    let mut z = precondition(&r);
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut q = vec![0.0; n];
    let mut energy = 0.0;
    let mut iterations = 0;
    let mut converged = false;

    while iterations < cap {
        iterations += 1;
        system.matrix.mul_vec_into(&p, &mut q);
        let pq = dot(&p, &q);
        if !(pq > 0.0) {
            break;
        }
        let alpha = rz / pq;
        x.iter_mut().zip(&p).for_each(|(xi, pi)| *xi += alpha * pi);
        r.iter_mut().zip(&q).for_each(|(ri, qi)| *ri -= alpha * qi);

        if cfg!(debug_assertions) {
            // ½xᵀAx - bᵀx, which differs from ½‖e‖²_A by a constant
            let e = -0.5 * x.iter().zip(&b).zip(&r).map(|((xi, bi), ri)| xi * (bi + ri)).sum::<f64>();
            debug_assert!(
                e <= energy + 1e-8 * abs(energy) + 1e-300,
                "CG energy increased: {energy} -> {e}"
            );
            energy = e;
        }

        if norm(&r) <= target {
            r = system.residual(&b, &x);
            if norm(&r) <= target {
                converged = true;
                break;
            }
            // recurrence drifted: restart from the true residual
            z = precondition(&r);
            p = z.clone();
            rz = dot(&r, &z);
            continue;
        }
        z = precondition(&r);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        p.iter_mut().zip(&z).for_each(|(pi, zi)| *pi = zi + beta * *pi);
    }

    system.deflate_in_place(&mut x);
    let residual = norm(&system.residual(&b, &x)) / b_norm;
    let stats = SolveStats { iterations, residual, seconds: timer.seconds() };
    if converged || residual <= opts.tol {
        Ok((x, stats))
    } else {
        Err(Error::NotConverged { best: x, stats })
    }
}

/// MINRES for symmetric (possibly indefinite) systems, with optional
/// Jacobi preconditioning and nullspace deflation.
///
/// When the recurrence residual meets the tolerance but the recomputed one
/// does not, the iteration restarts from the current iterate.
pub fn minres(system: &SparseSystem, b: &[f64], opts: &SolveOptions) -> Result<(Vec<f64>, SolveStats)> {
    check_rhs(system, b)?;
    let timer = Timer::start();
    let n = system.dim();
    let b = deflate(b, &system.nullspace);
    let b_norm = norm(&b);
    if b_norm == 0.0 {
        return Ok((vec![0.0; n], SolveStats { seconds: timer.seconds(), ..Default::default() }));
    }
    let minv = opts.jacobi.then(|| system.jacobi());
    let cap = opts.cap(n);
    let mut x = vec![0.0; n];
    let mut iterations = 0;

    while iterations < cap {
        let r0 = system.residual(&b, &x);
        if norm(&r0) <= opts.tol * b_norm {
            break;
        }
        let (dx, its) = minres_cycle(system, &r0, minv.as_deref(), opts.tol * b_norm, cap - iterations);
        iterations += its;
        x.iter_mut().zip(&dx).for_each(|(a, d)| *a += d);
        if its == 0 {
            break;
        }
    }

    system.deflate_in_place(&mut x);
    let residual = norm(&system.residual(&b, &x)) / b_norm;
    let stats = SolveStats { iterations, residual, seconds: timer.seconds() };
    if residual <= opts.tol {
        Ok((x, stats))
    } else {
        Err(Error::NotConverged { best: x, stats })
    }
}

/// One MINRES run from a zero initial guess on `A dx = r0`; returns the
/// correction and the number of iterations used.
fn minres_cycle(
    system: &SparseSystem,
    r0: &[f64],
    minv: Option<&[f64]>,
    target: f64,
    cap: usize,
) -> (Vec<f64>, usize) {
    let n = r0.len();
    let apply_m = |r: &[f64]| -> Vec<f64> {
        let mut y = match minv {
            Some(m) => r.iter().zip(m).map(|(a, b)| a * b).collect(),
            None => r.to_vec(),
        };
        system.deflate_in_place(&mut y);
        y
    };

    let mut x = vec![0.0; n];
    let mut r1 = r0.to_vec();
    let mut y = apply_m(&r1);
    let beta1 = sqrt(dot(&r1, &y).max(0.0));
    if beta1 == 0.0 {
        return (x, 0);
    }
    // with a preconditioner phibar measures the M⁻¹-norm; rescale the target
    let scale = beta1 / norm(r0);

    let mut r2 = r1.clone();
    let mut w = vec![0.0; n];
    let mut w1 = vec![0.0; n];
    let mut w2 = vec![0.0; n];
    let mut v = vec![0.0; n];
    let (mut oldb, mut beta) = (0.0, beta1);
    let (mut dbar, mut epsln, mut phibar) = (0.0, 0.0, beta1);
    let (mut cs, mut sn) = (-1.0f64, 0.0f64);
    let mut its = 0;

    while its < cap {
        its += 1;
        let s = 1.0 / beta;
        v.iter_mut().zip(&y).for_each(|(vi, yi)| *vi = s * yi);
        system.matrix.mul_vec_into(&v, &mut y);
        system.deflate_in_place(&mut y);
        if its >= 2 {
            let c = beta / oldb;
            y.iter_mut().zip(&r1).for_each(|(yi, ri)| *yi -= c * ri);
        }
        let alfa = dot(&v, &y);
        let c = alfa / beta;
        y.iter_mut().zip(&r2).for_each(|(yi, ri)| *yi -= c * ri);
        core::mem::swap(&mut r1, &mut r2);
        r2.copy_from_slice(&y);
        y = apply_m(&r2);
        oldb = beta;
        beta = sqrt(dot(&r2, &y).max(0.0));

        let oldeps = epsln;
        let delta = cs * dbar + sn * alfa;
        let gbar = sn * dbar - cs * alfa;
        epsln = sn * beta;
        dbar = -cs * beta;
        let gamma = hypot(gbar, beta).max(f64::EPSILON);
        cs = gbar / gamma;
        sn = beta / gamma;
        let phi = cs * phibar;
        phibar *= sn;

        let denom = 1.0 / gamma;
        core::mem::swap(&mut w1, &mut w2);
        core::mem::swap(&mut w2, &mut w);
        for k in 0..n {
            w[k] = (v[k] - oldeps * w1[k] - delta * w2[k]) * denom;
            x[k] += phi * w[k];
        }

        if abs(phibar) <= 0.5 * target * scale || beta == 0.0 {
            break;
        }
    }
    (x, its)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sys(n: usize, t: Vec<(usize, usize, f64)>, kind: SystemKind) -> SparseSystem {
        SparseSystem::assemble(n, t, kind, vec![]).unwrap()
    }

    #[test]
    fn laplacian_1d_assembly() {
        let mut t = Vec::new();
        for i in 0..3 {
            t.push((i, i, 2.0));
            if i + 1 < 3 {
                t.push((i, i + 1, -1.0));
                t.push((i + 1, i, -1.0));
            }
        }
        let s = sys(3, t, SystemKind::Spd);
        assert_eq!(
            s.matrix().to_dense(),
            vec![vec![2.0, -1.0, 0.0], vec![-1.0, 2.0, -1.0], vec![0.0, -1.0, 2.0]]
        );
    }

    #[test]
    fn asymmetric_assembly_is_rejected() {
        let err = SparseSystem::assemble(2, vec![(0, 1, 1.0), (1, 0, 1.5)], SystemKind::Spd, vec![]);
        assert!(matches!(err, Err(Error::AssemblyAsymmetry { .. })));
    }

    #[test]
    fn duplicates_sum_and_cancel() {
        let m = CsrMatrix::from_triplets(2, 2, vec![(0, 0, 1.0), (0, 0, 2.0), (1, 0, 1.0), (1, 0, -1.0)]);
        assert_eq!(m.get(0, 0), 3.0);
        assert_eq!(m.nnz(), 1);
    }

    #[test]
    fn cg_identity() {
        let s = SparseSystem::new(CsrMatrix::identity(4), SystemKind::Spd, vec![]).unwrap();
        let b = vec![1.0, -2.0, 3.0, 0.5];
        let (x, stats) = cg(&s, &b, &SolveOptions::default()).unwrap();
        assert_eq!(x, b);
        assert!(stats.iterations <= 1);
    }

    #[test]
    fn cg_two_by_two() {
        let s = sys(2, vec![(0, 0, 2.0), (0, 1, -1.0), (1, 0, -1.0), (1, 1, 2.0)], SystemKind::Spd);
        let (x, _) = cg(&s, &[1.0, 1.0], &SolveOptions::default()).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-12 && (x[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn minres_diagonal_indefinite() {
        let s = sys(2, vec![(0, 0, 1.0), (1, 1, -1.0)], SystemKind::SymmetricIndefinite);
        let (x, _) = minres(&s, &[2.0, 3.0], &SolveOptions::default()).unwrap();
        assert!((x[0] - 2.0).abs() < 1e-12 && (x[1] + 3.0).abs() < 1e-12);
        let id = SparseSystem::new(CsrMatrix::identity(3), SystemKind::SymmetricIndefinite, vec![]).unwrap();
        let (x, _) = minres(&id, &[1.0, 2.0, 3.0], &SolveOptions::default()).unwrap();
        assert!(x.iter().zip([1.0, 2.0, 3.0]).all(|(a, b)| (a - b).abs() < 1e-12));
    }

    #[test]
    fn deflate_examples() {
        let b = vec![1.0, 2.0, 3.0];
        assert_eq!(deflate(&b, &[]), b);
        let z = vec![1.0 / 3f64.sqrt(); 3];
        let d = deflate(&[2.0, 2.0, 2.0], core::slice::from_ref(&z));
        assert!(d.iter().all(|v| v.abs() < 1e-14));
        let d = deflate(&b, core::slice::from_ref(&z));
        assert!(dot(&d, &z).abs() < 1e-12);
        let dd = deflate(&d, &[z]);
        assert!(d.iter().zip(&dd).all(|(a, b)| (a - b).abs() < 1e-14));
    }

    #[test]
    fn singular_system_with_nullspace() {
        // 1D Neumann Laplacian: constants span the kernel
        let n = 6;
        let mut t = Vec::new();
        for i in 0..n - 1 {
            t.push((i, i, 1.0));
            t.push((i + 1, i + 1, 1.0));
            t.push((i, i + 1, -1.0));
            t.push((i + 1, i, -1.0));
        }
        let s = SparseSystem::assemble(n, t, SystemKind::Spd, vec![vec![1.0; n]]).unwrap();
        let b = vec![1.0, 0.0, 0.0, 0.0, 0.0, -1.0];
        let (x, stats) = cg(&s, &b, &SolveOptions::default()).unwrap();
        assert!(stats.residual <= 1e-10);
        assert!(x.iter().sum::<f64>().abs() < 1e-12);
        let (xm, _) = minres(&s, &b, &SolveOptions::default()).unwrap();
        assert!(x.iter().zip(&xm).all(|(a, b)| (a - b).abs() < 1e-8));
    }

    #[test]
    fn bad_nullspace_is_rejected() {
        let err = SparseSystem::new(CsrMatrix::identity(2), SystemKind::Spd, vec![vec![1.0, 0.0]]);
        assert!(matches!(err, Err(Error::BadNullspace { index: 0, .. })));
    }

    #[test]
    fn iteration_cap_reports_best_iterate() {
        let n = 50;
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 2.0 + i as f64));
            if i + 1 < n {
                t.push((i, i + 1, -1.0));
                t.push((i + 1, i, -1.0));
            }
        }
        let s = sys(n, t, SystemKind::Spd);
        let opts = SolveOptions { max_iter: Some(2), ..Default::default() };
        match cg(&s, &vec![1.0; n], &opts) {
            Err(Error::NotConverged { best, stats }) => {
                assert_eq!(best.len(), n);
                assert_eq!(stats.iterations, 2);
                assert!(stats.residual > 1e-10);
            }
            other => panic!("expected NotConverged, got {other:?}"),
        }
    }

    #[test]
    fn jacobi_preconditioning_agrees() {
        let n = 30;
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 1.0 + (i * i) as f64));
            if i + 1 < n {
                t.push((i, i + 1, -0.5));
                t.push((i + 1, i, -0.5));
            }
        }
        let s = sys(n, t, SystemKind::Spd);
        let b: Vec<f64> = (0..n).map(|i| (i as f64).sin()).collect();
        let plain = cg(&s, &b, &SolveOptions::default()).unwrap().0;
        let pre = SolveOptions { jacobi: true, ..Default::default() };
        let x = cg(&s, &b, &pre).unwrap().0;
        let y = minres(&s, &b, &pre).unwrap().0;
        for k in 0..n {
            assert!((plain[k] - x[k]).abs() < 1e-9);
            assert!((plain[k] - y[k]).abs() < 1e-9);
        }
    }

    #[test]
    fn sparse_product_and_transpose() {
        let a = CsrMatrix::from_triplets(2, 3, vec![(0, 0, 1.0), (0, 2, 2.0), (1, 1, 3.0)]);
        let at = a.transpose();
        assert_eq!(at.to_dense(), vec![vec![1.0, 0.0], vec![0.0, 3.0], vec![2.0, 0.0]]);
        let p = a.matmul(&at);
        assert_eq!(p.to_dense(), vec![vec![5.0, 0.0], vec![0.0, 9.0]]);
    }
}
