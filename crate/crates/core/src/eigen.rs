//! Hermitian eigensolvers for matrix-free operators: Lanczos with full
//! reorthogonalization, shift-invert acceleration through conjugate-gradient
//! inner solves, and dense reference paths for small problems.
//!
//! Everything here is deterministic: fixed start vectors, fixed iteration
//! order and pairwise reductions, so repeated runs are bitwise identical.

use crate::grid::{axpy, dot, norm, scale};
use nalgebra::{Complex, DMatrix};
use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EigenError {
    #[error("Lanczos did not reach tolerance {tol:.1e} in {iters} iterations (worst residual {worst:.3e})")]
    NoConvergence { iters: usize, tol: f64, worst: f64 },
    #[error("inner CG solve stalled (residual {0:.3e})")]
    InnerSolve(f64),
}

/// Options for the iterative solvers.
#[derive(Debug, Clone)]
pub struct LanczosOptions {
    /// Number of eigenpairs requested (smallest end).
    pub k: usize,
    /// Maximal Krylov dimension.
    pub max_dim: usize,
    /// Residual tolerance `|A v - lambda v| <= tol * scale(A)`.
    pub tol: f64,
    /// Shift for shift-invert mode: Lanczos runs on `(A - sigma)^{-1}`.
    pub shift_invert: Option<f64>,
    /// Relative tolerance of the inner CG solves.
    pub cg_tol: f64,
    pub cg_max_iter: usize,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        LanczosOptions {
            k: 1,
            max_dim: 400,
            tol: 1e-10,
            shift_invert: None,
            cg_tol: 1e-13,
            cg_max_iter: 20_000,
        }
    }
}

pub struct EigenResult {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<Complex64>>,
    /// `|A v - lambda v|` per returned pair.
    pub residuals: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

/// Deterministic start vector: all-ones plus a fixed-seed dither (so no
/// exact symmetry of the operator can hide part of the spectrum), filtered
/// through `project`.
fn start_vector(
    n: usize,
    project: Option<&dyn Fn(&mut [Complex64])>,
) -> Vec<Complex64> {
    let mut s: u64 = 0x5eed_1234_abcd_9876;
    let mut v: Vec<Complex64> = (0..n)
        .map(|_| {
            s ^= s << 13;
            s ^= s >> 7;
            s ^= s << 17;
            let dither = (s >> 11) as f64 / (1u64 << 53) as f64 - 0.5;
            Complex64::new(1.0 + 0.5 * dither, 0.0)
        })
        .collect();
    if let Some(p) = project {
        p(&mut v);
    }
    let nrm = norm(&v);
    assert!(
        nrm > 1e-12 * (n as f64).sqrt(),
        "projector annihilates the start vector"
    );
    scale(&mut v, 1.0 / nrm);
    v
}

/// Smallest `k` eigenpairs of a Hermitian operator given by `apply`.
///
/// `project` restricts the iteration to an invariant subspace (symmetry
/// sector); it must commute with the operator.
pub fn lanczos_smallest(
    apply: &dyn Fn(&[Complex64], &mut [Complex64]),
    n: usize,
    project: Option<&dyn Fn(&mut [Complex64])>,
    opts: &LanczosOptions,
) -> Result<EigenResult, EigenError> {
    if let Some(sigma) = opts.shift_invert {
        return shift_invert_smallest(apply, n, project, sigma, opts);
    }
    lanczos_extremal(apply, n, project, opts, false)
}

/// Core Lanczos with full reorthogonalization. When `largest` is set the
/// Ritz extraction targets the top of the spectrum (used by shift-invert on
/// the resolvent).
fn lanczos_extremal(
    apply: &dyn Fn(&[Complex64], &mut [Complex64]),
    n: usize,
    project: Option<&dyn Fn(&mut [Complex64])>,
    opts: &LanczosOptions,
    largest: bool,
) -> Result<EigenResult, EigenError> {
    let m_max = opts.max_dim.min(n);
    let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(m_max);
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();

    let mut v = start_vector(n, project);
    let mut w = vec![Complex64::new(0.0, 0.0); n];
    let mut op_scale: f64 = 1e-300;

    let mut result: Option<(Vec<f64>, Vec<Vec<f64>>, f64)> = None;

    for iter in 0..m_max {
        basis.push(v.clone());
        apply(&v, &mut w);
        if let Some(p) = project {
            p(&mut w);
        }
        let alpha = dot(&basis[iter], &w).re;
        alphas.push(alpha);
        op_scale = op_scale.max(norm(&w)).max(alpha.abs());

        // w -= alpha v + beta v_prev, then full reorthogonalization (twice).
        axpy(&mut w, Complex64::new(-alpha, 0.0), &basis[iter]);
        if iter > 0 {
            let b = betas[iter - 1];
            axpy(&mut w, Complex64::new(-b, 0.0), &basis[iter - 1]);
        }
        for _ in 0..2 {
            for q in basis.iter() {
                let c = dot(q, &w);
                if c.norm() > 0.0 {
                    axpy(&mut w, -c, q);
                }
            }
        }
        let beta = norm(&w);

        // Convergence test on the tridiagonal Ritz pairs every few steps.
        let m = alphas.len();
        let check = beta <= 1e-14 * op_scale || m == m_max || (m >= opts.k + 2 && m % 8 == 0);
        if check {
            let (ritz, ritz_vecs) = tridiag_eigen(&alphas, &betas);
            let order: Vec<usize> = if largest {
                (0..m).rev().collect()
            } else {
                (0..m).collect()
            };
            let take = opts.k.min(m);
            let mut worst: f64 = 0.0;
            for &j in order.iter().take(take) {
                // Residual bound for Ritz pair: beta * |last component|.
                let r = beta * ritz_vecs[j][m - 1].abs();
                worst = worst.max(r);
            }
            let sel_vals: Vec<f64> = order.iter().take(take).map(|&j| ritz[j]).collect();
            let sel_vecs: Vec<Vec<f64>> =
                order.iter().take(take).map(|&j| ritz_vecs[j].clone()).collect();
            result = Some((sel_vals, sel_vecs, worst));
            if (worst <= opts.tol * op_scale && m >= opts.k) || beta <= 1e-14 * op_scale {
                break;
            }
        }

        if beta <= 1e-14 * op_scale {
            break;
        }
        scale(&mut w, 1.0 / beta);
        betas.push(beta);
        std::mem::swap(&mut v, &mut w);
    }

    let (vals, tri_vecs, worst) = result.ok_or(EigenError::NoConvergence {
        iters: m_max,
        tol: opts.tol,
        worst: f64::NAN,
    })?;

    // Assemble Ritz vectors in the full space.
    let mut vectors = Vec::with_capacity(vals.len());
    for tv in tri_vecs.iter() {
        let mut u = vec![Complex64::new(0.0, 0.0); n];
        for (j, q) in basis.iter().enumerate().take(tv.len()) {
            axpy(&mut u, Complex64::new(tv[j], 0.0), q);
        }
        let nrm = norm(&u);
        scale(&mut u, 1.0 / nrm);
        fix_phase(&mut u);
        vectors.push(u);
    }

    // True residuals.
    let mut residuals = Vec::with_capacity(vals.len());
    let mut tmp = vec![Complex64::new(0.0, 0.0); n];
    for (val, vec_) in vals.iter().zip(vectors.iter()) {
        apply(vec_, &mut tmp);
        axpy(&mut tmp, Complex64::new(-val, 0.0), vec_);
        residuals.push(norm(&tmp));
    }

    let converged = worst <= opts.tol * op_scale;
    if !converged {
        return Err(EigenError::NoConvergence {
            iters: alphas.len(),
            tol: opts.tol,
            worst,
        });
    }
    Ok(EigenResult {
        values: vals,
        vectors,
        residuals,
        iterations: alphas.len(),
        converged,
    })
}

/// Shift-invert Lanczos: extremal pairs of `(A - sigma)^{-1}` mapped back.
/// `sigma` must lie strictly below the spectrum so that `A - sigma` is
/// positive definite and CG applies.
fn shift_invert_smallest(
    apply: &dyn Fn(&[Complex64], &mut [Complex64]),
    n: usize,
    project: Option<&dyn Fn(&mut [Complex64])>,
    sigma: f64,
    opts: &LanczosOptions,
) -> Result<EigenResult, EigenError> {
    let shifted = |u: &[Complex64], out: &mut [Complex64]| {
        apply(u, out);
        for (o, x) in out.iter_mut().zip(u.iter()) {
            *o -= Complex64::new(sigma, 0.0) * *x;
        }
    };
    let inv_apply = |u: &[Complex64], out: &mut [Complex64]| {
        let sol = cg_solve(&shifted, u, opts.cg_tol, opts.cg_max_iter)
            .expect("inner CG solve failed; shift above spectrum bottom?");
        out.copy_from_slice(&sol);
        if let Some(p) = project {
            p(out);
        }
    };

    let inner_opts = LanczosOptions {
        k: opts.k,
        max_dim: opts.max_dim,
        // Resolvent eigenvalues are O(1/gap); the residual tolerance there
        // transfers quadratically, so a modest tolerance suffices.
        tol: (opts.tol * 1e2).min(1e-8),
        shift_invert: None,
        ..opts.clone()
    };
    let res = lanczos_extremal(&inv_apply, n, project, &inner_opts, true)?;

    // Rayleigh quotients of A on the returned vectors give the eigenvalues
    // directly (more accurate than 1/mu + sigma).
    let mut values = Vec::with_capacity(res.vectors.len());
    let mut residuals = Vec::with_capacity(res.vectors.len());
    let mut tmp = vec![Complex64::new(0.0, 0.0); n];
    for v in res.vectors.iter() {
        apply(v, &mut tmp);
        let lam = dot(v, &tmp).re;
        axpy(&mut tmp, Complex64::new(-lam, 0.0), v);
        values.push(lam);
        residuals.push(norm(&tmp));
    }
    // Sort ascending by eigenvalue (resolvent order can interleave ties).
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap());
    Ok(EigenResult {
        values: order.iter().map(|&i| values[i]).collect(),
        vectors: order.iter().map(|&i| res.vectors[i].clone()).collect(),
        residuals: order.iter().map(|&i| residuals[i]).collect(),
        iterations: res.iterations,
        converged: true,
    })
}

/// Conjugate gradients for Hermitian positive definite `apply`.
pub fn cg_solve(
    apply: &dyn Fn(&[Complex64], &mut [Complex64]),
    b: &[Complex64],
    rel_tol: f64,
    max_iter: usize,
) -> Result<Vec<Complex64>, EigenError> {
    let n = b.len();
    let mut x = vec![Complex64::new(0.0, 0.0); n];
    let mut r = b.to_vec();
    let mut p = r.clone();
    let mut ap = vec![Complex64::new(0.0, 0.0); n];
    let b_norm = norm(b).max(1e-300);
    let mut rs = dot(&r, &r).re;
    for _ in 0..max_iter {
        if rs.sqrt() <= rel_tol * b_norm {
            return Ok(x);
        }
        apply(&p, &mut ap);
        let denom = dot(&p, &ap).re;
        if denom <= 0.0 {
            return Err(EigenError::InnerSolve(rs.sqrt() / b_norm));
        }
        let alpha = rs / denom;
        axpy(&mut x, Complex64::new(alpha, 0.0), &p);
        axpy(&mut r, Complex64::new(-alpha, 0.0), &ap);
        let rs_new = dot(&r, &r).re;
        let beta = rs_new / rs;
        rs = rs_new;
        for (pi, ri) in p.iter_mut().zip(r.iter()) {
            *pi = *ri + Complex64::new(beta, 0.0) * *pi;
        }
    }
    if rs.sqrt() <= rel_tol * b_norm * 1e3 {
        Ok(x)
    } else {
        Err(EigenError::InnerSolve(rs.sqrt() / b_norm))
    }
}

/// Eigen-decomposition of the symmetric tridiagonal Lanczos matrix.
/// Returns eigenvalues ascending with matching eigenvectors.
fn tridiag_eigen(alphas: &[f64], betas: &[f64]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let m = alphas.len();
    let mut t = DMatrix::<f64>::zeros(m, m);
    for i in 0..m {
        t[(i, i)] = alphas[i];
        if i + 1 < m {
            t[(i, i + 1)] = betas[i];
            t[(i + 1, i)] = betas[i];
        }
    }
    let se = t.symmetric_eigen();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| se.eigenvalues[a].partial_cmp(&se.eigenvalues[b]).unwrap());
    let vals = order.iter().map(|&j| se.eigenvalues[j]).collect();
    let vecs = order
        .iter()
        .map(|&j| se.eigenvectors.column(j).iter().copied().collect())
        .collect();
    (vals, vecs)
}

/// Make the phase deterministic: largest-magnitude component real positive.
pub fn fix_phase(u: &mut [Complex64]) {
    let mut best = 0usize;
    let mut best_mag = 0.0;
    for (i, x) in u.iter().enumerate() {
        let m = x.norm_sqr();
        if m > best_mag {
            best_mag = m;
            best = i;
        }
    }
    if best_mag > 0.0 {
        let ph = u[best] / u[best].norm();
        let corr = ph.conj();
        for x in u.iter_mut() {
            *x *= corr;
        }
    }
}

/// Dense Hermitian eigen-decomposition of a matrix-free operator: builds the
/// full matrix column by column. Reference path for small problems.
pub fn dense_hermitian_eigen(
    apply: &dyn Fn(&[Complex64], &mut [Complex64]),
    n: usize,
    k: usize,
) -> (Vec<f64>, Vec<Vec<Complex64>>) {
    let mut mat = DMatrix::<Complex<f64>>::zeros(n, n);
    let mut e = vec![Complex64::new(0.0, 0.0); n];
    let mut col = vec![Complex64::new(0.0, 0.0); n];
    for j in 0..n {
        e[j] = Complex64::new(1.0, 0.0);
        apply(&e, &mut col);
        for i in 0..n {
            mat[(i, j)] = Complex::new(col[i].re, col[i].im);
        }
        e[j] = Complex64::new(0.0, 0.0);
    }
    // Symmetrize to clean rounding.
    let madj = mat.adjoint();
    let mat = (mat + madj) * Complex::new(0.5, 0.0);
    let se = mat.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| se.eigenvalues[a].partial_cmp(&se.eigenvalues[b]).unwrap());
    let take = k.min(n);
    let vals: Vec<f64> = order.iter().take(take).map(|&j| se.eigenvalues[j]).collect();
    let vecs: Vec<Vec<Complex64>> = order
        .iter()
        .take(take)
        .map(|&j| {
            let mut v: Vec<Complex64> = se
                .eigenvectors
                .column(j)
                .iter()
                .map(|c| Complex64::new(c.re, c.im))
                .collect();
            fix_phase(&mut v);
            v
        })
        .collect();
    (vals, vecs)
}
