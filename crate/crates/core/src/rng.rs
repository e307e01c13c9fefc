//! Seeded sampling of states and channels.
//!
//! All randomized code paths in the crate draw from a `ChaCha8Rng` so that
//! identical seeds give identical results across runs and platforms.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::channels::KrausChannel;
use crate::linalg::{ComplexMatrix, DensityMatrix};

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform draw from [0, 1).
pub fn unit_real(rng: &mut ChaCha8Rng) -> f64 {
    rng.gen()
}

pub fn standard_complex(rng: &mut ChaCha8Rng) -> Complex64 {
    // Box-Muller pairs; Gaussian entries make the induced ensembles unitarily
    // invariant.
    let u1: f64 = rng.gen::<f64>().max(1e-300);
    let u2: f64 = rng.gen();
    let r = (-2.0 * u1.ln()).sqrt();
    let (s, c) = (2.0 * std::f64::consts::PI * u2).sin_cos();
    Complex64::new(r * c, r * s) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn gaussian_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(rows, cols);
    for z in &mut m.data {
        *z = standard_complex(rng);
    }
    m
}

/// Haar-random pure state on the given subsystem dimensions.
pub fn random_pure_state(rng: &mut ChaCha8Rng, dims: Vec<usize>) -> DensityMatrix {
    let d: usize = dims.iter().product();
    let v = gaussian_matrix(rng, d, 1);
    DensityMatrix::pure(&v, dims).unwrap()
}

/// Hilbert-Schmidt-distributed mixed state: partial trace of a Haar-random
/// pure state on a doubled space.
pub fn random_state(rng: &mut ChaCha8Rng, dims: Vec<usize>) -> DensityMatrix {
    let d: usize = dims.iter().product();
    let full = random_pure_state(rng, vec![d, d]);
    full.partial_trace_keep(&[0]).unwrap().with_dims(dims).unwrap()
}

/// Random product state rho_1 ⊗ ... ⊗ rho_k across the listed dimensions.
pub fn random_product_state(rng: &mut ChaCha8Rng, dims: &[usize]) -> DensityMatrix {
    let mut acc: Option<ComplexMatrix> = None;
    for &d in dims {
        let factor = random_state(rng, vec![d]);
        acc = Some(match acc {
            None => factor.matrix().clone(),
            Some(m) => crate::linalg::tensor(&m, factor.matrix()),
        });
    }
    DensityMatrix::new(acc.unwrap(), dims.to_vec()).unwrap()
}

/// Haar-distributed isometry of shape (rows x cols), rows >= cols, via
/// Gram-Schmidt on a Gaussian matrix.
pub fn random_isometry(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> ComplexMatrix {
    assert!(rows >= cols);
    let g = gaussian_matrix(rng, rows, cols);
    let mut q = ComplexMatrix::zeros(rows, cols);
    for j in 0..cols {
        let mut v: Vec<Complex64> = (0..rows).map(|i| g[(i, j)]).collect();
        for prev in 0..j {
            let dot: Complex64 = (0..rows).map(|i| q[(i, prev)].conj() * v[i]).sum();
            for i in 0..rows {
                let qip = q[(i, prev)];
                v[i] -= dot * qip;
            }
        }
        let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for i in 0..rows {
            q[(i, j)] = v[i] / norm;
        }
    }
    q
}

/// Random CPTP map via Kraus extraction from a random Stinespring isometry
/// with the requested number of Kraus operators.
pub fn random_channel(rng: &mut ChaCha8Rng, dim_in: usize, dim_out: usize, n_kraus: usize) -> KrausChannel {
    let v = random_isometry(rng, dim_out * n_kraus, dim_in);
    // V = sum_e K_e ⊗ |e>, with the B ⊗ E row ordering: row b*n_kraus + e.
    let mut kraus = Vec::with_capacity(n_kraus);
    for e in 0..n_kraus {
        let mut k = ComplexMatrix::zeros(dim_out, dim_in);
        for b in 0..dim_out {
            for a in 0..dim_in {
                k[(b, a)] = v[(b * n_kraus + e, a)];
            }
        }
        kraus.push(k);
    }
    KrausChannel::new(kraus, dim_in, dim_out).unwrap()
}
