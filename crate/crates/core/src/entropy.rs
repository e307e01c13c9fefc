//! Entropic primitives, all in bits.

use crate::linalg::{herm_eig, reassemble, DensityMatrix, HermitianMatrix};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EntropyError {
    #[error("argument {0} outside the function domain")]
    Domain(f64),
    #[error("invalid subsystem cut")]
    BadCut,
}

/// Governs eigenvalue flooring and the support condition in the relative
/// entropy.
#[derive(Debug, Clone, Copy)]
pub struct EntropyConfig {
    pub eig_floor: f64,
    pub support_tolerance: f64,
}

impl Default for EntropyConfig {
    fn default() -> Self {
        Self { eig_floor: 1e-12, support_tolerance: 1e-9 }
    }
}

/// Relative entropy either takes a finite value or diverges on a support
/// violation. A tagged value, never a large float.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RelEntropy {
    Finite(f64),
    Infinite,
}

impl RelEntropy {
    pub fn finite(self) -> Option<f64> {
        match self {
            RelEntropy::Finite(v) => Some(v),
            RelEntropy::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, RelEntropy::Infinite)
    }
}

/// Von Neumann entropy H(rho) = -sum lambda log2 lambda.
pub fn von_neumann(rho: &DensityMatrix) -> f64 {
    let (vals, _) = herm_eig(rho.hermitian());
    -vals
        .iter()
        .filter(|&&v| v > 0.0)
        .map(|&v| v * v.log2())
        .sum::<f64>()
}

/// Quantum relative entropy D(rho || xi) with the support convention: +inf
/// whenever supp(rho) is not contained in supp(xi).
///
/// `xi` must be PSD but need not be normalized (Rains-set members are
/// subnormalized). Evaluation projects both operators onto the support of
/// `xi` before taking logarithms.
pub fn relative_entropy(rho: &DensityMatrix, xi: &HermitianMatrix, cfg: &EntropyConfig) -> RelEntropy {
    let (xi_vals, xi_vecs) = herm_eig(xi);
    let (rho_vals, rho_vecs) = herm_eig(rho.hermitian());
    let n = rho.dim();

    // support check: significant eigenvectors of rho must not overlap the
    // kernel of xi
    for (i, &rv) in rho_vals.iter().enumerate() {
        if rv <= cfg.support_tolerance {
            continue;
        }
        let mut kernel_overlap = 0.0;
        for (j, &xv) in xi_vals.iter().enumerate() {
            if xv > cfg.support_tolerance {
                continue;
            }
            let dot: num_complex::Complex64 = (0..n)
                .map(|k| xi_vecs[(k, j)].conj() * rho_vecs[(k, i)])
                .sum();
            kernel_overlap += dot.norm_sqr();
        }
        if kernel_overlap > cfg.support_tolerance {
            return RelEntropy::Infinite;
        }
    }

    // Tr[rho log2 rho]
    let ent_term: f64 = rho_vals
        .iter()
        .filter(|&&v| v > 0.0)
        .map(|&v| v * v.log2())
        .sum();

    // Tr[rho log2 xi] on the support of xi
    let log_vals: Vec<f64> = xi_vals
        .iter()
        .map(|&v| if v > cfg.support_tolerance { v.log2() } else { 0.0 })
        .collect();
    let log_xi = reassemble(&log_vals, &xi_vecs);
    let cross = rho.matrix().hs_inner(&log_xi).re;

    RelEntropy::Finite(ent_term - cross)
}

/// H(B|E) = H(BE) - H(E) for a state whose dims split into the `b` and `e`
/// index sets.
pub fn conditional_entropy(rho: &DensityMatrix, b: &[usize], e: &[usize]) -> Result<f64, EntropyError> {
    let n = rho.dims().len();
    let mut seen = vec![false; n];
    for &i in b.iter().chain(e) {
        if i >= n || seen[i] {
            return Err(EntropyError::BadCut);
        }
        seen[i] = true;
    }
    if !seen.iter().all(|&s| s) {
        return Err(EntropyError::BadCut);
    }
    let h_be = von_neumann(rho);
    let h_e = if e.is_empty() {
        0.0
    } else {
        von_neumann(&rho.partial_trace_keep(e).map_err(|_| EntropyError::BadCut)?)
    };
    Ok(h_be - h_e)
}

/// I(AB;C) = H(AB) + H(C) - H(ABC) for the grouped index sets.
pub fn mutual_information(rho: &DensityMatrix, ab: &[usize], c: &[usize]) -> Result<f64, EntropyError> {
    let n = rho.dims().len();
    let mut seen = vec![false; n];
    for &i in ab.iter().chain(c) {
        if i >= n || seen[i] {
            return Err(EntropyError::BadCut);
        }
        seen[i] = true;
    }
    if !seen.iter().all(|&s| s) {
        return Err(EntropyError::BadCut);
    }
    let h_ab = von_neumann(&rho.partial_trace_keep(ab).map_err(|_| EntropyError::BadCut)?);
    let h_c = von_neumann(&rho.partial_trace_keep(c).map_err(|_| EntropyError::BadCut)?);
    let h_abc = von_neumann(rho);
    Ok(h_ab + h_c - h_abc)
}

/// Binary entropy h2(eps) = -eps log2 eps - (1-eps) log2(1-eps).
pub fn h2(eps: f64) -> Result<f64, EntropyError> {
    if !(0.0..=1.0).contains(&eps) {
        return Err(EntropyError::Domain(eps));
    }
    let term = |x: f64| if x > 0.0 { -x * x.log2() } else { 0.0 };
    Ok(term(eps) + term(1.0 - eps))
}

/// g(eps) = (eps+1) log2(eps+1) - eps log2 eps, continuously extended by
/// g(0) = 0.
pub fn g_func(eps: f64) -> Result<f64, EntropyError> {
    if eps < 0.0 {
        return Err(EntropyError::Domain(eps));
    }
    if eps == 0.0 {
        return Ok(0.0);
    }
    Ok((eps + 1.0) * (eps + 1.0).log2() - eps * eps.log2())
}
