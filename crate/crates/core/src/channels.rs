//! Quantum channel representations and the example channels.
//!
//! Channels are stored in operator-sum (Kraus) form. The Choi convention
//! throughout is the trace-1 Choi *state*: one share of a maximally entangled
//! state sent through the channel, reference system R first, output B second.

use num_complex::Complex64;
use serde::Deserialize;
use thiserror::Error;

use crate::linalg::{
    self, partial_trace, tensor, ComplexMatrix, DensityMatrix, HermitianMatrix,
};

#[derive(Debug, Error)]
pub enum ChannelError {
    #[error("parameter {0} out of range [0, 1]")]
    ParameterOutOfRange(f64),
    #[error("channel is not trace preserving: residual {0:.3e}")]
    NotTracePreserving(f64),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("mixture weights must be a probability vector")]
    BadWeights,
    #[error("representation element is not unitary (deviation {0:.3e})")]
    NotUnitary(f64),
    #[error("invalid channel specification: {0}")]
    BadSpec(String),
    #[error(transparent)]
    Linalg(#[from] linalg::LinalgError),
}

pub type Result<T> = std::result::Result<T, ChannelError>;

/// Tolerance on the trace-preservation residual ||sum K†K - I||_F.
pub const TP_TOL: f64 = 1e-10;

/// Completely positive trace-preserving map in operator-sum form.
#[derive(Debug, Clone)]
pub struct KrausChannel {
    kraus: Vec<ComplexMatrix>,
    dim_in: usize,
    dim_out: usize,
}

impl KrausChannel {
    pub fn new(kraus: Vec<ComplexMatrix>, dim_in: usize, dim_out: usize) -> Result<Self> {
        if kraus.is_empty() {
            return Err(ChannelError::BadSpec("empty Kraus list".into()));
        }
        for k in &kraus {
            if k.rows != dim_out || k.cols != dim_in {
                return Err(ChannelError::DimensionMismatch(format!(
                    "Kraus operator is {}x{}, expected {}x{}",
                    k.rows, k.cols, dim_out, dim_in
                )));
            }
        }
        let ch = Self { kraus, dim_in, dim_out };
        let residual = ch.trace_preservation_residual();
        if residual > TP_TOL {
            return Err(ChannelError::NotTracePreserving(residual));
        }
        Ok(ch)
    }

    pub fn kraus_ops(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn trace_preservation_residual(&self) -> f64 {
        let mut acc = ComplexMatrix::zeros(self.dim_in, self.dim_in);
        for k in &self.kraus {
            acc = acc.add(&k.adjoint().matmul(k));
        }
        acc.sub(&ComplexMatrix::identity(self.dim_in)).frobenius_norm()
    }

    /// Drop Kraus operators with negligible norm (mixture weights of zero).
    pub fn pruned(mut self) -> Self {
        self.kraus.retain(|k| k.frobenius_norm() > 1e-13);
        self
    }

    pub fn identity(dim: usize) -> Self {
        Self::new(vec![ComplexMatrix::identity(dim)], dim, dim).unwrap()
    }

    /// Unitary conjugation rho -> U rho U†.
    pub fn unitary(u: ComplexMatrix) -> Result<Self> {
        let dev = u
            .adjoint()
            .matmul(&u)
            .sub(&ComplexMatrix::identity(u.cols))
            .frobenius_norm();
        if dev > 1e-10 {
            return Err(ChannelError::NotUnitary(dev));
        }
        let (r, c) = (u.rows, u.cols);
        Self::new(vec![u], c, r)
    }

    /// Action on the full input space (state dims must equal [dim_in]).
    pub fn apply_full(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.dim_out, self.dim_out);
        for k in &self.kraus {
            out = out.add(&k.matmul(rho).matmul(&k.adjoint()));
        }
        out
    }

    /// Apply id ⊗ N ⊗ id, with the channel acting on subsystem `target`.
    pub fn apply(&self, rho: &DensityMatrix, target: usize) -> Result<DensityMatrix> {
        let dims = rho.dims();
        if target >= dims.len() || dims[target] != self.dim_in {
            return Err(ChannelError::DimensionMismatch(format!(
                "target {target} of dims {dims:?} does not match channel input {}",
                self.dim_in
            )));
        }
        let pre: usize = dims[..target].iter().product();
        let post: usize = dims[target + 1..].iter().product();
        let ipre = ComplexMatrix::identity(pre);
        let ipost = ComplexMatrix::identity(post);
        let mut out = ComplexMatrix::zeros(rho.dim() / self.dim_in * self.dim_out, rho.dim() / self.dim_in * self.dim_out);
        for k in &self.kraus {
            let lifted = tensor(&tensor(&ipre, k), &ipost);
            out = out.add(&lifted.matmul(rho.matrix()).matmul(&lifted.adjoint()));
        }
        let mut new_dims = dims.to_vec();
        new_dims[target] = self.dim_out;
        Ok(DensityMatrix::from_nearly_density(out, new_dims)?)
    }

    /// Trace-1 Choi state (id_R ⊗ N)(Phi_{RA}).
    pub fn choi_state(&self) -> ChoiOperator {
        let phi = DensityMatrix::maximally_entangled(self.dim_in);
        let out = self.apply(&phi, 1).unwrap();
        ChoiOperator::new(out).unwrap()
    }

    /// Stinespring isometry V = sum_i K_i ⊗ |i>_E, output ordered B ⊗ E.
    pub fn stinespring(&self) -> Isometry {
        let ne = self.kraus.len();
        let mut v = ComplexMatrix::zeros(self.dim_out * ne, self.dim_in);
        for (e, k) in self.kraus.iter().enumerate() {
            for b in 0..self.dim_out {
                for a in 0..self.dim_in {
                    v[(b * ne + e, a)] = k[(b, a)];
                }
            }
        }
        Isometry { matrix: v, dim_in: self.dim_in, dim_out: self.dim_out, dim_env: ne }
    }

    /// Serial composition self ∘ other.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if other.dim_out != self.dim_in {
            return Err(ChannelError::DimensionMismatch(format!(
                "compose: {} -> {} after {} -> {}",
                self.dim_in, self.dim_out, other.dim_in, other.dim_out
            )));
        }
        let mut kraus = Vec::with_capacity(self.kraus.len() * other.kraus.len());
        for a in &self.kraus {
            for b in &other.kraus {
                kraus.push(a.matmul(b));
            }
        }
        Ok(Self::new(kraus, other.dim_in, self.dim_out)?.pruned())
    }

    /// Parallel composition self ⊗ other.
    pub fn tensor_with(&self, other: &Self) -> Self {
        let mut kraus = Vec::with_capacity(self.kraus.len() * other.kraus.len());
        for a in &self.kraus {
            for b in &other.kraus {
                kraus.push(tensor(a, b));
            }
        }
        Self::new(kraus, self.dim_in * other.dim_in, self.dim_out * other.dim_out).unwrap()
    }

    /// Convex mixture sum_i w_i N_i.
    pub fn mix(channels: &[Self], weights: &[f64]) -> Result<Self> {
        if channels.is_empty() || channels.len() != weights.len() {
            return Err(ChannelError::BadWeights);
        }
        let sum: f64 = weights.iter().sum();
        if weights.iter().any(|&w| w < -1e-12) || (sum - 1.0).abs() > 1e-10 {
            return Err(ChannelError::BadWeights);
        }
        let (din, dout) = (channels[0].dim_in, channels[0].dim_out);
        let mut kraus = Vec::new();
        for (ch, &w) in channels.iter().zip(weights) {
            if ch.dim_in != din || ch.dim_out != dout {
                return Err(ChannelError::DimensionMismatch("mix: unequal dims".into()));
            }
            for k in &ch.kraus {
                kraus.push(k.scale_re(w.max(0.0).sqrt()));
            }
        }
        Ok(Self::new(kraus, din, dout)?.pruned())
    }
}

/// Trace-normalized Choi state of a CPTP map, on R ⊗ B with |R| = dim_in.
#[derive(Debug, Clone)]
pub struct ChoiOperator {
    state: DensityMatrix,
}

impl ChoiOperator {
    /// Validates the trace-preservation marginal Tr_B J(N) = pi_R.
    pub fn new(state: DensityMatrix) -> Result<Self> {
        if state.dims().len() != 2 {
            return Err(ChannelError::DimensionMismatch(
                "Choi state must be bipartite R ⊗ B".into(),
            ));
        }
        let r = state.dims()[0];
        let marginal = state.partial_trace_keep(&[0])?;
        let pi = DensityMatrix::maximally_mixed(vec![r]);
        let dev = marginal.matrix().sub(pi.matrix()).frobenius_norm();
        if dev > 1e-9 {
            return Err(ChannelError::NotTracePreserving(dev));
        }
        Ok(Self { state })
    }

    pub fn state(&self) -> &DensityMatrix {
        &self.state
    }

    pub fn dim_in(&self) -> usize {
        self.state.dims()[0]
    }

    pub fn dim_out(&self) -> usize {
        self.state.dims()[1]
    }

    /// Channel action recovered by Choi contraction:
    /// N(rho) = d_R Tr_R[(rho^T ⊗ I_B) J].
    pub fn apply_full(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let d_r = self.dim_in();
        let lift = tensor(&rho.transpose(), &ComplexMatrix::identity(self.dim_out()));
        let prod = lift.matmul(self.state.matrix());
        partial_trace(&prod, &[d_r, self.dim_out()], &[1])
            .unwrap()
            .scale_re(d_r as f64)
    }
}

/// Isometric extension V: A -> B ⊗ E with V†V = I.
#[derive(Debug, Clone)]
pub struct Isometry {
    pub matrix: ComplexMatrix,
    pub dim_in: usize,
    pub dim_out: usize,
    pub dim_env: usize,
}

impl Isometry {
    pub fn isometry_deviation(&self) -> f64 {
        self.matrix
            .adjoint()
            .matmul(&self.matrix)
            .sub(&ComplexMatrix::identity(self.dim_in))
            .frobenius_norm()
    }

    /// V rho V† as a state on B ⊗ E.
    pub fn dilate(&self, rho: &ComplexMatrix) -> DensityMatrix {
        let out = self.matrix.matmul(rho).matmul(&self.matrix.adjoint());
        DensityMatrix::from_nearly_density(out, vec![self.dim_out, self.dim_env]).unwrap()
    }
}

/// Amplitude damping channel A_p with K1 = |0><0| + sqrt(1-p)|1><1|,
/// K2 = sqrt(p)|0><1|.
pub fn amplitude_damping(p: f64) -> Result<KrausChannel> {
    if !(0.0..=1.0).contains(&p) {
        return Err(ChannelError::ParameterOutOfRange(p));
    }
    let k1 = ComplexMatrix::from_real(&[vec![1.0, 0.0], vec![0.0, (1.0 - p).sqrt()]]);
    let k2 = ComplexMatrix::from_real(&[vec![0.0, p.sqrt()], vec![0.0, 0.0]]);
    Ok(KrausChannel::new(vec![k1, k2], 2, 2)?.pruned())
}

/// Qubit depolarizing channel D_p(rho) = (1-p) rho + (p/3)(X rho X + Y rho Y + Z rho Z).
pub fn depolarizing(p: f64) -> Result<KrausChannel> {
    if !(0.0..=1.0).contains(&p) {
        return Err(ChannelError::ParameterOutOfRange(p));
    }
    let kraus = vec![
        ComplexMatrix::identity(2).scale_re((1.0 - p).sqrt()),
        linalg::pauli_x().scale_re((p / 3.0).sqrt()),
        linalg::pauli_y().scale_re((p / 3.0).sqrt()),
        linalg::pauli_z().scale_re((p / 3.0).sqrt()),
    ];
    Ok(KrausChannel::new(kraus, 2, 2)?.pruned())
}

/// The mixed channel N_p(rho) = p A_p(rho) + (1-p) D_p(rho).
pub fn mixed_channel_np(p: f64) -> Result<KrausChannel> {
    KrausChannel::mix(&[amplitude_damping(p)?, depolarizing(p)?], &[p, 1.0 - p])
}

/// Entanglement-breaking qubit channel: measure in the computational basis,
/// prepare |0> or |+> depending on the outcome.
pub fn entanglement_breaking_qubit() -> KrausChannel {
    let zero = ComplexMatrix::basis_vector(2, 0);
    let one = ComplexMatrix::basis_vector(2, 1);
    let mut plus = ComplexMatrix::zeros(2, 1);
    plus[(0, 0)] = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    plus[(1, 0)] = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let k1 = ComplexMatrix::outer(&zero, &zero);
    let k2 = ComplexMatrix::outer(&plus, &one);
    KrausChannel::new(vec![k1, k2], 2, 2).unwrap()
}

/// Max over group elements of the trace-norm distance between the Choi states
/// of V_g† N(U_g · U_g†) V_g and N. Zero iff the channel is exactly covariant
/// with respect to the representation.
pub fn covariance_deviation(channel: &KrausChannel, rep: &[(ComplexMatrix, ComplexMatrix)]) -> Result<f64> {
    let base = channel.choi_state().state().matrix().clone();
    let mut max_dev: f64 = 0.0;
    for (u, v) in rep {
        let pre = KrausChannel::unitary(u.clone())?;
        let post = KrausChannel::unitary(v.adjoint())?;
        let conjugated = post.compose(&channel.compose(&pre)?)?;
        let choi = conjugated.choi_state();
        let diff = choi.state().matrix().sub(&base);
        max_dev = max_dev.max(linalg::trace_norm(&diff));
    }
    Ok(max_dev)
}

// ---------------------------------------------------------------------------
// JSON channel specification

#[derive(Debug, Deserialize)]
struct RawChannelSpec {
    kind: String,
    #[serde(default)]
    p: Option<f64>,
    #[serde(default)]
    kraus: Option<Vec<Vec<Vec<[f64; 2]>>>>,
    #[serde(default)]
    dim_in: Option<usize>,
    #[serde(default)]
    dim_out: Option<usize>,
}

/// Parse result carrying the validated channel and the measured
/// trace-preservation residual.
pub struct ParsedChannel {
    pub channel: KrausChannel,
    pub tp_residual: f64,
}

/// Parses the JSON channel format:
/// `{"kind": "amplitude_damping"|"depolarizing"|"mixed_np"|"kraus",
///   "p": number, "kraus": [[[ [re,im], ... ], ...], ...],
///   "dim_in": n, "dim_out": m}`.
pub fn parse_channel_json(text: &str) -> Result<ParsedChannel> {
    let raw: RawChannelSpec =
        serde_json::from_str(text).map_err(|e| ChannelError::BadSpec(e.to_string()))?;
    let channel = match raw.kind.as_str() {
        "amplitude_damping" => amplitude_damping(
            raw.p.ok_or_else(|| ChannelError::BadSpec("missing p".into()))?,
        )?,
        "depolarizing" => depolarizing(
            raw.p.ok_or_else(|| ChannelError::BadSpec("missing p".into()))?,
        )?,
        "mixed_np" => mixed_channel_np(
            raw.p.ok_or_else(|| ChannelError::BadSpec("missing p".into()))?,
        )?,
        "kraus" => {
            let ops = raw.kraus.ok_or_else(|| ChannelError::BadSpec("missing kraus".into()))?;
            let dim_in = raw.dim_in.ok_or_else(|| ChannelError::BadSpec("missing dim_in".into()))?;
            let dim_out = raw.dim_out.ok_or_else(|| ChannelError::BadSpec("missing dim_out".into()))?;
            if dim_in == 0 || dim_out == 0 || dim_in > 64 || dim_out > 64 || ops.is_empty() || ops.len() > 4096 {
                return Err(ChannelError::BadSpec("dimensions out of supported range".into()));
            }
            let mut kraus = Vec::with_capacity(ops.len());
            for op in &ops {
                if op.len() != dim_out || op.iter().any(|row| row.len() != dim_in) {
                    return Err(ChannelError::BadSpec("Kraus operator shape mismatch".into()));
                }
                let rows: Vec<Vec<Complex64>> = op
                    .iter()
                    .map(|row| row.iter().map(|&[re, im]| Complex64::new(re, im)).collect())
                    .collect();
                let m = ComplexMatrix::from_rows(&rows);
                if !m.all_finite() {
                    return Err(ChannelError::BadSpec("non-finite Kraus entry".into()));
                }
                kraus.push(m);
            }
            KrausChannel::new(kraus, dim_in, dim_out)?
        }
        other => return Err(ChannelError::BadSpec(format!("unknown kind {other:?}"))),
    };
    let tp_residual = channel.trace_preservation_residual();
    Ok(ParsedChannel { channel, tp_residual })
}

/// Serializes a channel in the explicit-Kraus JSON form accepted by
/// `parse_channel_json`.
pub fn channel_to_json(ch: &KrausChannel) -> String {
    let kraus: Vec<Vec<Vec<[f64; 2]>>> = ch
        .kraus_ops()
        .iter()
        .map(|k| {
            (0..k.rows)
                .map(|i| (0..k.cols).map(|j| [k[(i, j)].re, k[(i, j)].im]).collect())
                .collect()
        })
        .collect();
    let spec = serde_json::json!({
        "kind": "kraus",
        "kraus": kraus,
        "dim_in": ch.dim_in(),
        "dim_out": ch.dim_out(),
    });
    let mut s = serde_json::to_string_pretty(&spec).expect("serializable");
    s.push('\n');
    s
}

/// Hermitian operator sanity wrapper used by callers that need a plain
/// Hermitian view of a Choi state.
pub fn choi_hermitian(ch: &KrausChannel) -> HermitianMatrix {
    ch.choi_state().state().hermitian().clone()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{fidelity, herm_eig_raw, pauli_x, pauli_y, pauli_z, trace_norm};
    use crate::rng;

    #[test]
    fn identity_channel_fixes_states() {
        let mut r = rng::seeded(1);
        let rho = rng::random_state(&mut r, vec![2]);
        let id = KrausChannel::identity(2);
        let out = id.apply(&rho, 0).unwrap();
        assert!(out.matrix().sub(rho.matrix()).frobenius_norm() < 1e-12);
    }

    #[test]
    fn depolarizing_three_quarters_is_total() {
        let mut r = rng::seeded(2);
        let rho = rng::random_state(&mut r, vec![2]);
        let out = depolarizing(0.75).unwrap().apply(&rho, 0).unwrap();
        let pi = DensityMatrix::maximally_mixed(vec![2]);
        assert!(out.matrix().sub(pi.matrix()).frobenius_norm() < 1e-12);
    }

    #[test]
    fn kraus_vs_choi_application_agree() {
        let mut r = rng::seeded(3);
        for _ in 0..5 {
            let ch = rng::random_channel(&mut r, 2, 2, 3);
            let rho = rng::random_state(&mut r, vec![2]);
            let direct = ch.apply_full(rho.matrix());
            let via_choi = ch.choi_state().apply_full(rho.matrix());
            assert!(direct.sub(&via_choi).frobenius_norm() < 1e-10);
        }
    }

    #[test]
    fn choi_examples() {
        let id = KrausChannel::identity(2);
        let phi = DensityMatrix::maximally_entangled(2);
        assert!(id.choi_state().state().matrix().sub(phi.matrix()).frobenius_norm() < 1e-12);

        let dep = depolarizing(0.75).unwrap();
        let pipi = DensityMatrix::maximally_mixed(vec![2, 2]);
        assert!(dep.choi_state().state().matrix().sub(pipi.matrix()).frobenius_norm() < 1e-12);

        // amplitude_damping(1): output always |0><0|, reference stays mixed
        let ad = amplitude_damping(1.0).unwrap();
        let z0 = DensityMatrix::pure(&ComplexMatrix::basis_vector(2, 0), vec![2]).unwrap();
        let expect = tensor(
            DensityMatrix::maximally_mixed(vec![2]).matrix(),
            z0.matrix(),
        );
        assert!(ad.choi_state().state().matrix().sub(&expect).frobenius_norm() < 1e-12);
    }

    #[test]
    fn amplitude_damping_examples() {
        let id_like = amplitude_damping(0.0).unwrap();
        assert_eq!(id_like.kraus_ops().len(), 1);

        let one = DensityMatrix::pure(&ComplexMatrix::basis_vector(2, 1), vec![2]).unwrap();
        let out = amplitude_damping(0.5).unwrap().apply(&one, 0).unwrap();
        let expect = ComplexMatrix::diag(&[0.5, 0.5]);
        assert!(out.matrix().sub(&expect).frobenius_norm() < 1e-12);

        assert!(amplitude_damping(1.5).is_err());
    }

    #[test]
    fn mixed_np_endpoints_and_mixture_identity() {
        let n0 = mixed_channel_np(0.0).unwrap();
        assert_eq!(n0.kraus_ops().len(), 1); // identity after pruning

        let n1 = mixed_channel_np(1.0).unwrap();
        let ad1 = amplitude_damping(1.0).unwrap();
        let mut r = rng::seeded(4);
        let rho = rng::random_state(&mut r, vec![2]);
        let a = n1.apply(&rho, 0).unwrap();
        let b = ad1.apply(&rho, 0).unwrap();
        assert!(a.matrix().sub(b.matrix()).frobenius_norm() < 1e-12);

        let p = 0.5;
        let np = mixed_channel_np(p).unwrap();
        let pi = DensityMatrix::maximally_mixed(vec![2]);
        let lhs = np.apply(&pi, 0).unwrap();
        let rhs_a = amplitude_damping(p).unwrap().apply(&pi, 0).unwrap();
        let rhs_d = depolarizing(p).unwrap().apply(&pi, 0).unwrap();
        let rhs = rhs_a.matrix().scale_re(p).add(&rhs_d.matrix().scale_re(1.0 - p));
        assert!(lhs.matrix().sub(&rhs).frobenius_norm() < 1e-12);
    }

    #[test]
    fn depolarizing_choi_eigenvalues_at_half() {
        let ch = depolarizing(0.5).unwrap();
        let (vals, _) = herm_eig_raw(ch.choi_state().state().matrix());
        // Choi = (1-p) Phi + (p/3) sum of the other Bell projectors, each /1
        // with weight p/3 -> eigenvalues {1-p, p/3, p/3, p/3} at p = 1/2.
        let expect = [0.5, 1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0];
        for (v, e) in vals.iter().zip(expect.iter()) {
            assert!((v - e).abs() < 1e-12, "{vals:?}");
        }
    }

    #[test]
    fn stinespring_consistency() {
        let mut r = rng::seeded(5);
        for _ in 0..5 {
            let ch = rng::random_channel(&mut r, 2, 2, 3);
            let v = ch.stinespring();
            assert!(v.isometry_deviation() < 1e-10);
            let rho = rng::random_state(&mut r, vec![2]);
            let dilated = v.dilate(rho.matrix());
            let reduced = dilated.partial_trace_keep(&[0]).unwrap();
            let direct = ch.apply(&rho, 0).unwrap();
            assert!(reduced.matrix().sub(direct.matrix()).frobenius_norm() < 1e-10);
        }

        let id = KrausChannel::identity(2);
        let v = id.stinespring();
        assert_eq!(v.dim_env, 1);
    }

    #[test]
    fn covariance_checks() {
        let pauli: Vec<(ComplexMatrix, ComplexMatrix)> = [
            ComplexMatrix::identity(2),
            pauli_x(),
            pauli_y(),
            pauli_z(),
        ]
        .into_iter()
        .map(|u| (u.clone(), u))
        .collect();
        let dep = depolarizing(0.3).unwrap();
        assert!(covariance_deviation(&dep, &pauli).unwrap() < 1e-10);

        let np = mixed_channel_np(0.3).unwrap();
        let iz: Vec<(ComplexMatrix, ComplexMatrix)> =
            [ComplexMatrix::identity(2), pauli_z()].into_iter().map(|u| (u.clone(), u)).collect();
        assert!(covariance_deviation(&np, &iz).unwrap() < 1e-10);

        let ix: Vec<(ComplexMatrix, ComplexMatrix)> =
            [ComplexMatrix::identity(2), pauli_x()].into_iter().map(|u| (u.clone(), u)).collect();
        assert!(covariance_deviation(&np, &ix).unwrap() > 1e-4);
    }

    #[test]
    fn compose_tensor_mix_identities() {
        let mut r = rng::seeded(6);
        let n = rng::random_channel(&mut r, 2, 2, 2);
        let id = KrausChannel::identity(2);
        let comp = id.compose(&n).unwrap();
        assert!(
            comp.choi_state()
                .state()
                .matrix()
                .sub(n.choi_state().state().matrix())
                .frobenius_norm()
                < 1e-12
        );

        let single = KrausChannel::mix(std::slice::from_ref(&n), &[1.0]).unwrap();
        assert!(
            single
                .choi_state()
                .state()
                .matrix()
                .sub(n.choi_state().state().matrix())
                .frobenius_norm()
                < 1e-12
        );

        // N ⊗ M Choi is a subsystem permutation of Choi(N) ⊗ Choi(M)
        let m = rng::random_channel(&mut r, 2, 2, 2);
        let nm = n.tensor_with(&m);
        let choi_nm = nm.choi_state();
        let big = tensor(
            n.choi_state().state().matrix(),
            m.choi_state().state().matrix(),
        );
        // big lives on R1 B1 R2 B2; permute to R1 R2 B1 B2
        let permuted = permute_subsystems(&big, &[2, 2, 2, 2], &[0, 2, 1, 3]);
        assert!(choi_nm.state().matrix().sub(&permuted).frobenius_norm() < 1e-10);
    }

    // test-local subsystem permutation helper
    fn permute_subsystems(m: &ComplexMatrix, dims: &[usize], order: &[usize]) -> ComplexMatrix {
        let n = dims.len();
        let total: usize = dims.iter().product();
        let mut strides = vec![1usize; n];
        for i in (0..n - 1).rev() {
            strides[i] = strides[i + 1] * dims[i + 1];
        }
        let new_dims: Vec<usize> = order.iter().map(|&o| dims[o]).collect();
        let mut new_strides = vec![1usize; n];
        for i in (0..n - 1).rev() {
            new_strides[i] = new_strides[i + 1] * new_dims[i + 1];
        }
        let map = |idx: usize| -> usize {
            let digits: Vec<usize> = (0..n).map(|k| (idx / strides[k]) % dims[k]).collect();
            order
                .iter()
                .enumerate()
                .map(|(pos, &o)| digits[o] * new_strides[pos])
                .sum()
        };
        let mut out = ComplexMatrix::zeros(total, total);
        for i in 0..total {
            for j in 0..total {
                out[(map(i), map(j))] = m[(i, j)];
            }
        }
        out
    }

    #[test]
    fn random_channels_are_cptp() {
        let mut r = rng::seeded(7);
        for _ in 0..10 {
            let ch = rng::random_channel(&mut r, 2, 2, 3);
            assert!(ch.trace_preservation_residual() < 1e-10);
            let rho = rng::random_state(&mut r, vec![2]);
            let out = ch.apply(&rho, 0).unwrap();
            assert!((trace_norm(out.matrix()) - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn entanglement_breaking_channel_is_cptp() {
        let eb = entanglement_breaking_qubit();
        assert!(eb.trace_preservation_residual() < 1e-12);
        // outputs are classical mixtures of |0> and |+>
        let mut r = rng::seeded(8);
        let rho = rng::random_state(&mut r, vec![2]);
        let out = eb.apply(&rho, 0).unwrap();
        assert!((out.matrix().trace().re - 1.0).abs() < 1e-10);
    }

    #[test]
    fn json_parse_roundtrip_and_errors() {
        let p = parse_channel_json(r#"{"kind": "mixed_np", "p": 0.5}"#).unwrap();
        assert!(p.tp_residual < 1e-12);

        let ident = r#"{"kind":"kraus","dim_in":2,"dim_out":2,
            "kraus":[[[[1,0],[0,0]],[[0,0],[1,0]]]]}"#;
        let p = parse_channel_json(ident).unwrap();
        assert_eq!(p.channel.kraus_ops().len(), 1);

        assert!(parse_channel_json("not json").is_err());
        assert!(parse_channel_json(r#"{"kind":"zzz"}"#).is_err());
        assert!(parse_channel_json(r#"{"kind":"depolarizing","p":2.0}"#).is_err());
        // non trace preserving
        let bad = r#"{"kind":"kraus","dim_in":2,"dim_out":2,
            "kraus":[[[[0.5,0],[0,0]],[[0,0],[0.5,0]]]]}"#;
        assert!(parse_channel_json(bad).is_err());
    }

    #[test]
    fn apply_preserves_purity_of_identity_and_linearity() {
        let mut r = rng::seeded(9);
        let ch = rng::random_channel(&mut r, 2, 2, 2);
        let rho = rng::random_state(&mut r, vec![2]);
        let sigma = rng::random_state(&mut r, vec![2]);
        let lam = 0.3;
        let mixed_in = DensityMatrix::new(
            rho.matrix().scale_re(lam).add(&sigma.matrix().scale_re(1.0 - lam)),
            vec![2],
        )
        .unwrap();
        let out_mixed = ch.apply(&mixed_in, 0).unwrap();
        let out_parts = ch
            .apply(&rho, 0)
            .unwrap()
            .matrix()
            .scale_re(lam)
            .add(&ch.apply(&sigma, 0).unwrap().matrix().scale_re(1.0 - lam));
        assert!(out_mixed.matrix().sub(&out_parts).frobenius_norm() < 1e-11);
        let f = fidelity(&out_mixed, &DensityMatrix::new(out_parts, vec![2]).unwrap()).unwrap();
        assert!(f > 1.0 - 1e-9);
    }
}
