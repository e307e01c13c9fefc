//! Diamond-norm distance between channels.
//!
//! The value comes from the semidefinite characterization
//! (1/2)||N - M||_diamond = max { Tr(J X) : 0 <= X <= rho (x) I, rho a state }
//! with J the unnormalized Choi operator of the difference, solved by an
//! ADMM-style splitting and polished by exact concave maximization over rho.
//! A seeded pure-state search provides an independent lower bound.

use num_complex::Complex64;

use crate::channels::KrausChannel;
use crate::linalg::{
    herm_eig_raw, partial_trace, reassemble, tensor, ComplexMatrix, DensityMatrix,
    trace_norm,
};
use crate::rng;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DiamondError {
    #[error("channels must share input and output dimensions")]
    DimMismatch,
}

#[derive(Debug, Clone)]
pub struct DiamondResult {
    pub value: f64,
    pub lower_bound: f64,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

const ADMM_MAX_ITERS: usize = 20000;
const POLISH_STEPS: usize = 200;
pub const DEFAULT_RESTARTS: usize = 32;
pub const DEFAULT_ASCENT_STEPS: usize = 200;

fn project_psd(m: &ComplexMatrix) -> ComplexMatrix {
    let (vals, vecs) = herm_eig_raw(m);
    let clipped: Vec<f64> = vals.iter().map(|&v| v.max(0.0)).collect();
    reassemble(&clipped, &vecs)
}

fn project_density(m: &ComplexMatrix) -> ComplexMatrix {
    let (mut vals, vecs) = herm_eig_raw(m);
    // simplex projection of the spectrum
    let mut sorted = vals.clone();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (j, &s) in sorted.iter().enumerate() {
        cumsum += s;
        let t = (cumsum - 1.0) / (j + 1) as f64;
        if s - t > 0.0 {
            theta = t;
        }
    }
    for v in vals.iter_mut() {
        *v = (*v - theta).max(0.0);
    }
    reassemble(&vals, &vecs)
}

fn positive_part_trace(m: &ComplexMatrix) -> f64 {
    let (vals, _) = herm_eig_raw(m);
    vals.iter().filter(|&&v| v > 0.0).sum()
}

/// Unnormalized Choi operator of N - M on R (x) B.
fn choi_difference(n: &KrausChannel, m: &KrausChannel) -> ComplexMatrix {
    let da = n.dim_in() as f64;
    n.choi_state()
        .state()
        .matrix()
        .sub(m.choi_state().state().matrix())
        .scale_re(da)
}

/// Exact inner maximum max { Tr(J X) : 0 <= X <= rho (x) I } via the positive
/// part of (sqrt(rho) (x) I) J (sqrt(rho) (x) I); concave in rho.
fn inner_value(j: &ComplexMatrix, rho: &ComplexMatrix, db: usize) -> f64 {
    let (vals, vecs) = herm_eig_raw(rho);
    let sqrt_vals: Vec<f64> = vals.iter().map(|&v| v.max(0.0).sqrt()).collect();
    let sqrt_rho = reassemble(&sqrt_vals, &vecs);
    let q = tensor(&sqrt_rho, &ComplexMatrix::identity(db));
    positive_part_trace(&q.matmul(j).matmul(&q))
}

/// Supergradient of the inner maximum at rho: Tr_B of the optimal dual
/// Y = Q^{-1/2} (Q^{1/2} J Q^{1/2})_+ Q^{-1/2} with Q = rho (x) I.
fn inner_supergradient(j: &ComplexMatrix, rho: &ComplexMatrix, da: usize, db: usize) -> ComplexMatrix {
    let (vals, vecs) = herm_eig_raw(rho);
    let floor = 1e-10;
    let sqrt_vals: Vec<f64> = vals.iter().map(|&v| v.max(floor).sqrt()).collect();
    let inv_sqrt_vals: Vec<f64> = sqrt_vals.iter().map(|&v| 1.0 / v).collect();
    let sqrt_rho = tensor(&reassemble(&sqrt_vals, &vecs), &ComplexMatrix::identity(db));
    let inv_sqrt_rho = tensor(&reassemble(&inv_sqrt_vals, &vecs), &ComplexMatrix::identity(db));
    let inner = sqrt_rho.matmul(j).matmul(&sqrt_rho);
    let pos = project_psd(&inner);
    let y = inv_sqrt_rho.matmul(&pos).matmul(&inv_sqrt_rho);
    let dims = [da, db];
    partial_trace(&y.hermitize(), &dims, &[0]).unwrap()
}

/// (1/2)||N - M||_diamond with residual diagnostics and an independent
/// pure-state lower bound.
pub fn diamond_distance(n: &KrausChannel, m: &KrausChannel, tol: f64) -> Result<DiamondResult, DiamondError> {
    if n.dim_in() != m.dim_in() || n.dim_out() != m.dim_out() {
        return Err(DiamondError::DimMismatch);
    }
    let da = n.dim_in();
    let db = n.dim_out();
    let d = da * db;
    let j = choi_difference(n, m).hermitize();
    if j.frobenius_norm() < 1e-14 {
        return Ok(DiamondResult {
            value: 0.0,
            lower_bound: 0.0,
            primal_residual: 0.0,
            dual_residual: 0.0,
            iterations: 0,
            converged: true,
        });
    }

    let mu = 1.0 + j.frobenius_norm();
    let j_mu = j.scale_re(1.0 / mu);
    let eye_b = ComplexMatrix::identity(db);

    // splitting variables: P1 ~ X >= 0, P2 ~ rho(x)I - X >= 0, P3 ~ rho
    let mut p1 = ComplexMatrix::zeros(d, d);
    let mut p2 = ComplexMatrix::zeros(d, d);
    let mut p3 = ComplexMatrix::identity(da).scale_re(1.0 / da as f64);
    let mut u1 = ComplexMatrix::zeros(d, d);
    let mut u2 = ComplexMatrix::zeros(d, d);
    let mut u3 = ComplexMatrix::zeros(da, da);
    let mut rho = p3.clone();
    let mut primal = f64::INFINITY;
    let mut dual = f64::INFINITY;
    let mut iterations = 0;

    for it in 0..ADMM_MAX_ITERS {
        iterations = it + 1;
        let a1 = p1.sub(&u1);
        let a2 = p2.sub(&u2);
        let a3 = p3.sub(&u3);

        // joint (X, rho) minimizer of the quadratic subproblem with Tr rho = 1
        let dims = [da, db];
        let k_mat = partial_trace(&j_mu.add(&a1).add(&a2), &dims, &[0])
            .unwrap()
            .scale_re(0.5)
            .add(&a3);
        let nu = (db as f64 / 2.0 + 1.0 - k_mat.trace().re) / da as f64;
        rho = k_mat
            .add(&ComplexMatrix::identity(da).scale_re(nu))
            .scale_re(1.0 / (db as f64 / 2.0 + 1.0));
        let rho_i = tensor(&rho, &eye_b);
        let x = j_mu.add(&a1).add(&rho_i).sub(&a2).scale_re(0.5);

        let slack = rho_i.sub(&x);
        let p1_new = project_psd(&x.add(&u1));
        let p2_new = project_psd(&slack.add(&u2));
        let p3_new = project_density(&rho.add(&u3));

        dual = p1_new
            .sub(&p1)
            .frobenius_norm()
            .max(p2_new.sub(&p2).frobenius_norm())
            .max(p3_new.sub(&p3).frobenius_norm())
            * mu;
        u1 = u1.add(&x).sub(&p1_new);
        u2 = u2.add(&slack).sub(&p2_new);
        u3 = u3.add(&rho).sub(&p3_new);
        primal = x
            .sub(&p1_new)
            .frobenius_norm()
            .max(slack.sub(&p2_new).frobenius_norm())
            .max(rho.sub(&p3_new).frobenius_norm());
        p1 = p1_new;
        p2 = p2_new;
        p3 = p3_new;

        if primal.max(dual) < tol {
            break;
        }
    }
    let converged = primal.max(dual) < tol;

    // polish: exact concave maximization over rho via supergradient ascent
    let mut best_rho = project_density(&rho);
    let mut best = inner_value(&j, &best_rho, db);
    let mut step = 0.5;
    for _ in 0..POLISH_STEPS {
        let g = inner_supergradient(&j, &best_rho, da, db);
        let trial = project_density(&best_rho.add(&g.scale_re(step)));
        let v = inner_value(&j, &trial, db);
        if v > best {
            best = v;
            best_rho = trial;
            step *= 1.2;
        } else {
            step *= 0.5;
            if step < 1e-12 {
                break;
            }
        }
    }

    let lower = pure_state_lower_bound(n, m, DEFAULT_RESTARTS, DEFAULT_ASCENT_STEPS);
    debug_assert!(lower <= best + 1e-4, "pure-state bound {lower} above SDP value {best}");

    Ok(DiamondResult {
        value: best.max(lower).max(0.0),
        lower_bound: lower,
        primal_residual: primal,
        dual_residual: dual,
        iterations,
        converged,
    })
}

fn trace_distance_objective(n: &KrausChannel, m: &KrausChannel, psi: &[f64]) -> f64 {
    let da = n.dim_in();
    let d = da * da;
    let mut v = ComplexMatrix::zeros(d, 1);
    let mut norm = 0.0;
    for i in 0..d {
        let z = Complex64::new(psi[2 * i], psi[2 * i + 1]);
        norm += z.norm_sqr();
        v[(i, 0)] = z;
    }
    let v = v.scale_re(1.0 / norm.sqrt());
    let rho = ComplexMatrix::outer(&v, &v);
    let state = DensityMatrix::from_nearly_density(rho, vec![da, da]).unwrap();
    let out_n = n.apply(&state, 1).unwrap();
    let out_m = m.apply(&state, 1).unwrap();
    0.5 * trace_norm(&out_n.matrix().sub(out_m.matrix()))
}

/// Lower bound on (1/2)||N - M||_diamond from seeded random restarts of local
/// ascent over pure inputs psi_RA with |R| = |A|; restricting to pure states
/// is lossless for the diamond norm.
pub fn pure_state_lower_bound(n: &KrausChannel, m: &KrausChannel, restarts: usize, steps: usize) -> f64 {
    let da = n.dim_in();
    let dim = 2 * da * da;
    let mut best = 0.0f64;
    let mut r = rng::seeded(0xd1a0);
    for _ in 0..restarts {
        let mut psi: Vec<f64> = (0..dim)
            .map(|_| rng::standard_complex(&mut r).re)
            .collect();
        let mut val = trace_distance_objective(n, m, &psi);
        let mut step = 0.1;
        for _ in 0..steps {
            // numerical gradient on the unnormalized parameterization
            let mut grad = vec![0.0; dim];
            let h = 1e-6;
            for k in 0..dim {
                let mut plus = psi.clone();
                plus[k] += h;
                let mut minus = psi.clone();
                minus[k] -= h;
                grad[k] = (trace_distance_objective(n, m, &plus)
                    - trace_distance_objective(n, m, &minus))
                    / (2.0 * h);
            }
            let trial: Vec<f64> = psi.iter().zip(&grad).map(|(p, g)| p + step * g).collect();
            let tv = trace_distance_objective(n, m, &trial);
            if tv > val {
                val = tv;
                psi = trial;
                step *= 1.2;
            } else {
                step *= 0.5;
                if step < 1e-9 {
                    break;
                }
            }
        }
        best = best.max(val);
    }
    best
}

/// Epsilon in the approximate-simulability sense: the diamond-norm radius at
/// which the simulator channel M reproduces N.
pub fn approx_simulability_epsilon(n: &KrausChannel, m: &KrausChannel, tol: f64) -> Result<f64, DiamondError> {
    Ok(diamond_distance(n, m, tol)?.value)
}
