//! Relative-entropy entanglement measures as convex minimization problems.
//!
//! The Rains quantity minimizes D(tau||sigma) over the set
//! {sigma >= 0, ||T_D sigma||_1 <= 1}; the PPT measure minimizes over PPT
//! states. Both are solved by projected gradient descent with Dykstra
//! projections onto the set intersections, and every solve carries a
//! first-order optimality certificate over probe directions.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::entropy::{von_neumann, EntropyConfig};
use crate::linalg::{
    herm_eig, partial_transpose_multi, reassemble, ComplexMatrix, DensityMatrix, HermitianMatrix,
    SubsystemCut, LN_2,
};
use crate::rng;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MeasureError {
    #[error("linear algebra failure: {0}")]
    Linalg(#[from] crate::linalg::LinalgError),
    #[error("cut does not match state dims")]
    CutMismatch,
    #[error("separable-set measure only available on a 2x2 cut")]
    NotTwoQubit,
    #[error("point is not feasible: {0}")]
    Infeasible(String),
    #[error("state JSON rejected: {0}")]
    BadStateJson(String),
}

/// Feasible sets over which the relative entropy is minimized.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeasibleSetKind {
    RainsPptPrime,
    PptStates,
    DensityMatrices,
}

#[derive(Debug, Clone)]
pub struct FeasibleSetSpec {
    pub kind: FeasibleSetKind,
    pub cut: SubsystemCut,
    pub dims: Vec<usize>,
}

impl FeasibleSetSpec {
    pub fn new(kind: FeasibleSetKind, cut: SubsystemCut, dims: Vec<usize>) -> Result<Self, MeasureError> {
        cut.validate(dims.len()).map_err(|_| MeasureError::CutMismatch)?;
        Ok(Self { kind, cut, dims })
    }

    fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }
}

#[derive(Debug, Clone)]
pub struct OptimizerConfig {
    pub max_iters: usize,
    pub grad_tolerance: f64,
    pub initial_step: f64,
    pub backtracking: f64,
    pub dykstra_iters: usize,
    pub min_eig_floor: f64,
    pub rng_seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            max_iters: 5000,
            grad_tolerance: 1e-7,
            initial_step: 1.0,
            backtracking: 0.5,
            dykstra_iters: 200,
            min_eig_floor: 1e-12,
            rng_seed: 0,
        }
    }
}

/// Outcome of one measure solve. Only `value` is contractual; the optimizer
/// matrix is informational since the minimizer need not be unique.
#[derive(Debug, Clone)]
pub struct MeasureResult {
    pub value: f64,
    pub optimizer: HermitianMatrix,
    pub certificate: f64,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct MeasureSummary {
    pub value: f64,
    pub certificate: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl MeasureResult {
    pub fn summary(&self) -> MeasureSummary {
        MeasureSummary {
            value: self.value,
            certificate: self.certificate,
            iterations: self.iterations,
            converged: self.converged,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeasureKind {
    Rains,
    EPpt,
    /// Relative entropy of entanglement on a 2x2 cut, where the separable and
    /// PPT states coincide.
    ER2x2,
}

fn project_eigs<F: FnOnce(&mut Vec<f64>)>(m: &ComplexMatrix, f: F) -> ComplexMatrix {
    let (mut vals, vecs) = crate::linalg::herm_eig_raw(m);
    f(&mut vals);
    reassemble(&vals, &vecs)
}

/// Euclidean projection of a real vector onto the probability simplex.
fn simplex_project(v: &mut Vec<f64>) {
    let mut sorted = v.clone();
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
    for x in v.iter_mut() {
        *x = (*x - theta).max(0.0);
    }
}

/// Euclidean projection onto the l1 ball of radius 1 (soft threshold).
fn l1_ball_project(v: &mut Vec<f64>) {
    let norm: f64 = v.iter().map(|x| x.abs()).sum();
    if norm <= 1.0 {
        return;
    }
    let mut mags: Vec<f64> = v.iter().map(|x| x.abs()).collect();
    mags.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (j, &s) in mags.iter().enumerate() {
        cumsum += s;
        let t = (cumsum - 1.0) / (j + 1) as f64;
        if s - t > 0.0 {
            theta = t;
        }
    }
    for x in v.iter_mut() {
        *x = x.signum() * (x.abs() - theta).max(0.0);
    }
}

fn project_psd(m: &ComplexMatrix) -> ComplexMatrix {
    project_eigs(m, |vals| {
        for v in vals.iter_mut() {
            *v = v.max(0.0);
        }
    })
}

fn project_trace_one_psd(m: &ComplexMatrix) -> ComplexMatrix {
    project_eigs(m, simplex_project)
}

/// Projection onto {sigma : ||T_D sigma||_1 <= 1}. The partial transpose is a
/// Frobenius isometry and an involution, so projecting in the transposed
/// picture and transposing back is exact.
fn project_pt_trace_ball(m: &ComplexMatrix, dims: &[usize], right: &[usize]) -> ComplexMatrix {
    let t = partial_transpose_multi(m, dims, right).unwrap();
    let p = project_eigs(&t, l1_ball_project);
    partial_transpose_multi(&p, dims, right).unwrap()
}

/// Projection onto {sigma : T_D sigma >= 0}.
fn project_pt_psd(m: &ComplexMatrix, dims: &[usize], right: &[usize]) -> ComplexMatrix {
    let t = partial_transpose_multi(m, dims, right).unwrap();
    let p = project_psd(&t);
    partial_transpose_multi(&p, dims, right).unwrap()
}

const DYKSTRA_STALL_TOL: f64 = 1e-13;
const DYKSTRA_RESIDUAL_TOL: f64 = 1e-9;
const DYKSTRA_CAP_FACTOR: usize = 50;
/// Feasibility level at which the solver accepts a projected line-search
/// trial or certificate probe.
const SOLVER_FEASIBILITY_TOL: f64 = 1e-8;

/// Dykstra's alternating projections onto the intersection of two convex
/// sets. Runs past the nominal iteration count (up to a hard cap) while the
/// iterate is still infeasible, and stops early once a full cycle no longer
/// moves it.
fn dykstra<A, B, F>(h: &ComplexMatrix, iters: usize, pa: A, pb: B, feasible: F) -> ComplexMatrix
where
    A: Fn(&ComplexMatrix) -> ComplexMatrix,
    B: Fn(&ComplexMatrix) -> ComplexMatrix,
    F: Fn(&ComplexMatrix) -> bool,
{
    let scale = 1.0 + h.frobenius_norm();
    let mut x = h.clone();
    let mut p = ComplexMatrix::zeros(h.rows, h.cols);
    let mut q = ComplexMatrix::zeros(h.rows, h.cols);
    for it in 0..iters.saturating_mul(DYKSTRA_CAP_FACTOR) {
        let y = pa(&x.add(&p));
        p = x.add(&p).sub(&y);
        let x_new = pb(&y.add(&q));
        q = y.add(&q).sub(&x_new);
        let moved = x_new.sub(&x).frobenius_norm();
        x = x_new;
        if moved < DYKSTRA_STALL_TOL * scale {
            break;
        }
        // nearest-point accuracy needs the nominal budget; past it, any
        // feasible iterate is an acceptable exit
        if it >= iters && (it + 1) % 3 == 0 && feasible(&x) {
            break;
        }
    }
    x
}

/// Frobenius-nearest feasible point. Intersections are handled by Dykstra's
/// alternating projections; the last component projection applied is exact,
/// so RAINS outputs sit exactly in the PSD cone and may exceed the
/// trace-norm ball by the Dykstra residual (similarly for PPT states and the
/// simplex).
pub fn project(set: &FeasibleSetSpec, h: &HermitianMatrix) -> Result<HermitianMatrix, MeasureError> {
    project_with_iters(set, h, OptimizerConfig::default().dykstra_iters)
}

pub fn project_with_iters(
    set: &FeasibleSetSpec,
    h: &HermitianMatrix,
    iters: usize,
) -> Result<HermitianMatrix, MeasureError> {
    project_to_tol(set, h, iters, DYKSTRA_RESIDUAL_TOL)
}

/// Like `project_with_iters` but with a caller-chosen feasibility target for
/// the early exit. The solver's inner-loop projections only need to land
/// within the line-search acceptance threshold, which is looser than the
/// default and saves the slow tail of Dykstra iterations.
fn project_to_tol(
    set: &FeasibleSetSpec,
    h: &HermitianMatrix,
    iters: usize,
    tol: f64,
) -> Result<HermitianMatrix, MeasureError> {
    if h.dim() != set.total_dim() {
        return Err(MeasureError::CutMismatch);
    }
    let dims = set.dims.clone();
    let right = set.cut.right.clone();
    let m = h.matrix();
    let feasible = |x: &ComplexMatrix| {
        let (neg, other) = feasibility_residuals(set, &HermitianMatrix::from_nearly_hermitian(x.clone()));
        neg.max(other) < tol
    };
    let out = match set.kind {
        FeasibleSetKind::DensityMatrices => project_trace_one_psd(m),
        FeasibleSetKind::RainsPptPrime => dykstra(
            m,
            iters,
            |x: &ComplexMatrix| project_pt_trace_ball(x, &dims, &right),
            project_psd,
            feasible,
        ),
        FeasibleSetKind::PptStates => dykstra(
            m,
            iters,
            |x: &ComplexMatrix| project_pt_psd(x, &dims, &right),
            project_trace_one_psd,
            feasible,
        ),
    };
    Ok(HermitianMatrix::from_nearly_hermitian(out))
}

/// Residuals of set membership: (negative-eigenvalue excess, constraint
/// excess). Both are ~0 for feasible points.
pub fn feasibility_residuals(set: &FeasibleSetSpec, sigma: &HermitianMatrix) -> (f64, f64) {
    let neg = (-sigma.min_eigenvalue()).max(0.0);
    let m = sigma.matrix();
    let other = match set.kind {
        FeasibleSetKind::DensityMatrices => (sigma.trace() - 1.0).abs(),
        FeasibleSetKind::RainsPptPrime => {
            let t = partial_transpose_multi(m, &set.dims, &set.cut.right).unwrap();
            (crate::linalg::trace_norm(&t) - 1.0).max(0.0)
        }
        FeasibleSetKind::PptStates => {
            let t = partial_transpose_multi(m, &set.dims, &set.cut.right).unwrap();
            let pt_neg = (-HermitianMatrix::from_nearly_hermitian(t).min_eigenvalue()).max(0.0);
            pt_neg.max((sigma.trace() - 1.0).abs())
        }
    };
    (neg, other)
}

/// Gradient of sigma -> -Tr[rho log2 sigma] by the divided-difference formula
/// in sigma's eigenbasis. Eigenvalues are floored before taking logs.
pub fn rel_ent_gradient(rho: &ComplexMatrix, sigma: &HermitianMatrix, floor: f64) -> HermitianMatrix {
    let (vals, vecs) = herm_eig(sigma);
    let lf: Vec<f64> = vals.iter().map(|&v| v.max(floor)).collect();
    let n = sigma.dim();
    let rho_t = vecs.adjoint().matmul(rho).matmul(&vecs);
    let mut g = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let (a, b) = (lf[i], lf[j]);
            let phi = if (a - b).abs() > 1e-10 * a.max(b) {
                (a.log2() - b.log2()) / (a - b)
            } else {
                2.0 / ((a + b) * LN_2)
            };
            g[(i, j)] = -rho_t[(i, j)] * phi;
        }
    }
    HermitianMatrix::from_nearly_hermitian(vecs.matmul(&g).matmul(&vecs.adjoint()))
}

/// -Tr[rho log2 sigma] with eigenvalue flooring.
fn neg_cross_entropy(rho: &ComplexMatrix, sigma: &HermitianMatrix, floor: f64) -> f64 {
    let (vals, vecs) = herm_eig(sigma);
    let n = sigma.dim();
    let mut f = 0.0;
    for j in 0..n {
        let col = vecs.column(j);
        let weight: Complex64 = (0..n)
            .map(|i| {
                col[(i, 0)].conj()
                    * (0..n).map(|k| rho[(i, k)] * col[(k, 0)]).sum::<Complex64>()
            })
            .sum();
        f -= weight.re * vals[j].max(floor).log2();
    }
    f
}

fn set_for_kind(kind: MeasureKind, cut: &SubsystemCut, dims: &[usize]) -> Result<FeasibleSetSpec, MeasureError> {
    let set_kind = match kind {
        MeasureKind::Rains => FeasibleSetKind::RainsPptPrime,
        MeasureKind::EPpt => FeasibleSetKind::PptStates,
        MeasureKind::ER2x2 => {
            let side = |idx: &[usize]| idx.iter().map(|&i| dims[i]).product::<usize>();
            if side(&cut.left) != 2 || side(&cut.right) != 2 {
                return Err(MeasureError::NotTwoQubit);
            }
            FeasibleSetKind::PptStates
        }
    };
    FeasibleSetSpec::new(set_kind, cut.clone(), dims.to_vec())
}

/// Minimizes D(tau || sigma) over the feasible set by projected gradient
/// descent with a Barzilai-Borwein step and Armijo backtracking.
pub fn measure(
    kind: MeasureKind,
    tau: &DensityMatrix,
    cut: &SubsystemCut,
    cfg: &OptimizerConfig,
) -> Result<MeasureResult, MeasureError> {
    let set = set_for_kind(kind, cut, tau.dims())?;
    let dim_left: usize = cut.left.iter().map(|&i| tau.dims()[i]).product();
    let dim_right: usize = cut.right.iter().map(|&i| tau.dims()[i]).product();
    if dim_left == 1 || dim_right == 1 {
        // one side of the cut is trivial: tau itself is feasible
        return Ok(MeasureResult {
            value: 0.0,
            optimizer: tau.hermitian().clone(),
            certificate: 0.0,
            iterations: 0,
            converged: true,
        });
    }

    let rho = tau.matrix();
    let h_tau = von_neumann(tau);
    let floor = cfg.min_eig_floor;
    let f = |s: &HermitianMatrix| neg_cross_entropy(rho, s, floor);

    let mut sigma = project_to_tol(&set, tau.hermitian(), cfg.dykstra_iters, SOLVER_FEASIBILITY_TOL)?;
    let mut f_cur = f(&sigma);
    let mut step = cfg.initial_step;
    let mut prev: Option<(HermitianMatrix, HermitianMatrix)> = None;
    let mut iterations = 0;
    let mut step_converged = false;
    let mut collapses = 0;
    let mut plateau = 0;
    let n = tau.dim();
    let pi_feasible = project_to_tol(
        &set,
        &HermitianMatrix::from_nearly_hermitian(
            ComplexMatrix::identity(n).scale_re(1.0 / n as f64),
        ),
        cfg.dykstra_iters,
        SOLVER_FEASIBILITY_TOL,
    )?;

    for it in 0..cfg.max_iters {
        iterations = it + 1;
        let grad = rel_ent_gradient(rho, &sigma, floor);

        if let Some((sp, gp)) = &prev {
            let s = sigma.matrix().sub(sp.matrix());
            let y = grad.matrix().sub(gp.matrix());
            let sy = s.hs_inner(&y).re;
            if sy > 1e-14 {
                // upper clamp kept modest: huge trial steps land far from the
                // feasible set, where Dykstra is at its slowest
                step = (s.hs_inner(&s).re / sy).clamp(1e-8, 1e2);
            }
        }

        // backtracking Armijo line search on the projected step
        let mut t = step;
        let mut accepted = None;
        while t >= 1e-12 {
            let trial_m = sigma.matrix().sub(&grad.matrix().scale_re(t));
            let trial = project_to_tol(
                &set,
                &HermitianMatrix::from_nearly_hermitian(trial_m),
                cfg.dykstra_iters,
                SOLVER_FEASIBILITY_TOL,
            )?;
            let (neg, other) = feasibility_residuals(&set, &trial);
            if neg.max(other) > SOLVER_FEASIBILITY_TOL {
                // Dykstra did not land close enough to the set; a shorter
                // step projects more reliably
                t *= cfg.backtracking;
                continue;
            }
            let d = trial.matrix().sub(sigma.matrix());
            let decrease = grad.matrix().hs_inner(&d).re;
            let f_trial = f(&trial);
            if f_trial <= f_cur + 1e-4 * decrease {
                accepted = Some((trial, f_trial, d.frobenius_norm()));
                break;
            }
            t *= cfg.backtracking;
        }

        let Some((next, f_next, moved)) = accepted else {
            // objective too stiff at a near-singular iterate: forget the BB
            // memory, then pull toward the interior if that was not enough
            prev = None;
            step = cfg.initial_step;
            collapses += 1;
            if collapses >= 2 {
                let mixed = sigma
                    .matrix()
                    .scale_re(0.99)
                    .add(&pi_feasible.matrix().scale_re(0.01));
                sigma = HermitianMatrix::from_nearly_hermitian(mixed);
                f_cur = f(&sigma);
                collapses = 0;
            }
            continue;
        };
        collapses = 0;
        prev = Some((sigma.clone(), grad));
        sigma = next;
        // Armijo guarantees descent, so f_cur - f_next >= 0
        if f_cur - f_next < 1e-8 * (1.0 + f_cur.abs()) {
            plateau += 1;
        } else {
            plateau = 0;
        }
        f_cur = f_next;
        if moved < cfg.grad_tolerance * (1.0 + sigma.matrix().frobenius_norm()) || plateau >= 3 {
            step_converged = true;
            break;
        }
    }

    // final tight projection: the reported value and optimizer come from a
    // point feasible at the strict tolerance, not a line-search iterate
    sigma = project_with_iters(&set, &sigma, cfg.dykstra_iters)?;
    f_cur = f(&sigma);

    let certificate = optimality_certificate(&set, rho, &sigma, cfg)?;
    let value = (f_cur - h_tau).max(0.0);
    Ok(MeasureResult {
        value,
        optimizer: sigma,
        certificate,
        iterations,
        converged: step_converged && certificate <= cfg.grad_tolerance * 100.0,
    })
}

/// Max first-order violation -Tr[G (sigma' - sigma*)] over probe feasible
/// points; nonpositive directional derivatives mean descent was still
/// possible.
fn optimality_certificate(
    set: &FeasibleSetSpec,
    rho: &ComplexMatrix,
    sigma: &HermitianMatrix,
    cfg: &OptimizerConfig,
) -> Result<f64, MeasureError> {
    let grad = rel_ent_gradient(rho, sigma, cfg.min_eig_floor);
    let n = sigma.dim();
    let mut probes: Vec<HermitianMatrix> = Vec::with_capacity(66);
    let mut r = rng::seeded(cfg.rng_seed ^ 0x9e37_79b9_7f4a_7c15);
    let iters = cfg.dykstra_iters;
    for _ in 0..64 {
        let g = rng::gaussian_matrix(&mut r, n, n);
        let h = HermitianMatrix::from_nearly_hermitian(g.add(&g.adjoint()).scale_re(0.5));
        probes.push(project_to_tol(set, &h, iters, SOLVER_FEASIBILITY_TOL)?);
    }
    let pi = ComplexMatrix::identity(n).scale_re(1.0 / n as f64);
    probes.push(project_to_tol(
        set,
        &HermitianMatrix::from_nearly_hermitian(pi),
        iters,
        SOLVER_FEASIBILITY_TOL,
    )?);
    probes.push(project_to_tol(
        set,
        &HermitianMatrix::from_nearly_hermitian(rho.clone()),
        iters,
        SOLVER_FEASIBILITY_TOL,
    )?);

    let mut worst = 0.0f64;
    for p in &probes {
        let d = p.matrix().sub(sigma.matrix());
        let violation = -grad.matrix().hs_inner(&d).re;
        worst = worst.max(violation);
    }
    Ok(worst)
}

/// Overlap of a PPT' member with the rank-M maximally entangled state; the
/// returned value obeys Tr[Phi_M sigma] <= 1/M.
pub fn negativity_overlap_bound_check(m: usize, sigma: &HermitianMatrix) -> Result<f64, MeasureError> {
    if sigma.dim() != m * m {
        return Err(MeasureError::CutMismatch);
    }
    let set = FeasibleSetSpec::new(
        FeasibleSetKind::RainsPptPrime,
        SubsystemCut::new(vec![0], vec![1]),
        vec![m, m],
    )?;
    let (neg, ball) = feasibility_residuals(&set, sigma);
    if neg > 1e-8 || ball > 1e-8 {
        return Err(MeasureError::Infeasible(format!(
            "residuals: psd {neg:.2e}, trace ball {ball:.2e}"
        )));
    }
    let phi = DensityMatrix::maximally_entangled(m);
    Ok(phi.matrix().hs_inner(sigma.matrix()).re)
}

/// Recomputes D(tau || sigma*) independently of the solver path.
pub fn recompute_value(tau: &DensityMatrix, result: &MeasureResult) -> f64 {
    let cfg = EntropyConfig::default();
    match crate::entropy::relative_entropy(tau, &result.optimizer, &cfg) {
        crate::entropy::RelEntropy::Finite(v) => v,
        crate::entropy::RelEntropy::Infinite => f64::INFINITY,
    }
}

const MAX_STATE_DIM: usize = 64;

#[derive(Serialize, Deserialize)]
struct StateJson {
    dims: Vec<usize>,
    matrix: Vec<Vec<[f64; 2]>>,
}

/// Parses a density matrix from JSON `{"dims": [...], "matrix": [[[re,im],...],...]}`.
///
/// Hardened against untrusted input: bounded dimensions, finite entries, and
/// full density-matrix validation before anything downstream touches it.
pub fn parse_state_json(text: &str) -> Result<DensityMatrix, MeasureError> {
    let parsed: StateJson =
        serde_json::from_str(text).map_err(|e| MeasureError::BadStateJson(e.to_string()))?;
    if parsed.dims.is_empty() || parsed.dims.len() > 8 {
        return Err(MeasureError::BadStateJson("dims length out of range".into()));
    }
    let mut total: usize = 1;
    for &d in &parsed.dims {
        if d == 0 || d > MAX_STATE_DIM {
            return Err(MeasureError::BadStateJson(format!("dimension {d} out of range")));
        }
        total = total
            .checked_mul(d)
            .filter(|&t| t <= MAX_STATE_DIM)
            .ok_or_else(|| MeasureError::BadStateJson("total dimension too large".into()))?;
    }
    if parsed.matrix.len() != total || parsed.matrix.iter().any(|row| row.len() != total) {
        return Err(MeasureError::BadStateJson("matrix shape does not match dims".into()));
    }
    let mut m = ComplexMatrix::zeros(total, total);
    for (i, row) in parsed.matrix.iter().enumerate() {
        for (j, &[re, im]) in row.iter().enumerate() {
            if !re.is_finite() || !im.is_finite() {
                return Err(MeasureError::BadStateJson("non-finite entry".into()));
            }
            m[(i, j)] = Complex64::new(re, im);
        }
    }
    if m.hermiticity_deviation() > 1e-8 {
        return Err(MeasureError::BadStateJson("matrix is not Hermitian".into()));
    }
    if (m.trace().re - 1.0).abs() > 1e-8 || m.trace().im.abs() > 1e-8 {
        return Err(MeasureError::BadStateJson("trace is not 1".into()));
    }
    let herm = HermitianMatrix::from_nearly_hermitian(m);
    if herm.min_eigenvalue() < -1e-8 {
        return Err(MeasureError::BadStateJson("matrix is not positive semidefinite".into()));
    }
    DensityMatrix::from_nearly_density(herm.into_matrix(), parsed.dims)
        .map_err(|e| MeasureError::BadStateJson(e.to_string()))
}

pub fn state_to_json(rho: &DensityMatrix) -> String {
    let n = rho.dim();
    let m = rho.matrix();
    let matrix: Vec<Vec<[f64; 2]>> = (0..n)
        .map(|i| (0..n).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect();
    serde_json::to_string(&StateJson { dims: rho.dims().to_vec(), matrix }).unwrap()
}
