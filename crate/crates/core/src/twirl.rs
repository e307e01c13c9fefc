//! Group twirling of channels and its teleportation simulation.
//!
//! A twirl averages V_g^dag N(U_g . U_g^dag) V_g over a list of unitary
//! pairs; when the input representation is a one-design, the same average is
//! realized by a POVM on the input plus the channel's Choi state, which is
//! checked here operator-by-operator.

use crate::channels::{ChannelError, KrausChannel};
use crate::diamond::{diamond_distance, DiamondError};
use crate::linalg::{
    partial_trace, pauli_i, pauli_x, pauli_y, pauli_z, tensor, trace_norm, ComplexMatrix,
    DensityMatrix,
};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TwirlError {
    #[error("element {0} is not unitary (deviation {1:.2e})")]
    NotUnitary(usize, f64),
    #[error("representation dims do not match the channel")]
    DimMismatch,
    #[error("unknown representation name {0:?}")]
    UnknownRep(String),
    #[error("representation is not a one-design (deviation {0:.2e})")]
    NotOneDesign(f64),
    #[error("POVM completeness violated (deviation {0:.2e})")]
    IncompletePovm(f64),
    #[error("channel failure: {0}")]
    Channel(#[from] ChannelError),
    #[error("diamond-norm failure: {0}")]
    Diamond(#[from] DiamondError),
}

const UNITARY_TOL: f64 = 1e-10;
const ONE_DESIGN_TOL: f64 = 1e-9;
const POVM_TOL: f64 = 1e-9;

/// List of unitary pairs (U_g on the input, V_g on the output). Closure
/// under multiplication is not required; only the averaging formulas below
/// use the element list.
#[derive(Debug, Clone)]
pub struct UnitaryRep {
    pub elements: Vec<(ComplexMatrix, ComplexMatrix)>,
    pub label: String,
}

fn unitarity_deviation(u: &ComplexMatrix) -> f64 {
    u.adjoint()
        .matmul(u)
        .max_abs_diff(&ComplexMatrix::identity(u.cols))
}

impl UnitaryRep {
    pub fn new(elements: Vec<(ComplexMatrix, ComplexMatrix)>, label: &str) -> Result<Self, TwirlError> {
        for (i, (u, v)) in elements.iter().enumerate() {
            let dev = unitarity_deviation(u).max(unitarity_deviation(v));
            if dev > UNITARY_TOL {
                return Err(TwirlError::NotUnitary(i, dev));
            }
        }
        Ok(Self { elements, label: label.to_string() })
    }

    /// Same input and output unitaries on every element.
    pub fn diagonal(unitaries: Vec<ComplexMatrix>, label: &str) -> Result<Self, TwirlError> {
        let elements = unitaries.into_iter().map(|u| (u.clone(), u)).collect();
        Self::new(elements, label)
    }

    /// Built-in qubit representations: "pauli", "ix", "iz".
    pub fn named(name: &str) -> Result<Self, TwirlError> {
        match name {
            "pauli" => Self::diagonal(vec![pauli_i(), pauli_x(), pauli_y(), pauli_z()], "pauli"),
            "ix" => Self::diagonal(vec![pauli_i(), pauli_x()], "ix"),
            "iz" => Self::diagonal(vec![pauli_i(), pauli_z()], "iz"),
            other => Err(TwirlError::UnknownRep(other.to_string())),
        }
    }

    pub fn dim_in(&self) -> usize {
        self.elements[0].0.rows
    }

    pub fn dim_out(&self) -> usize {
        self.elements[0].1.rows
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn pairs(&self) -> Vec<(ComplexMatrix, ComplexMatrix)> {
        self.elements.clone()
    }
}

/// Twirled channel N_G(.) = (1/|G|) sum_g V_g^dag N(U_g . U_g^dag) V_g,
/// assembled in Kraus form.
pub fn twirl_channel(n: &KrausChannel, rep: &UnitaryRep) -> Result<KrausChannel, TwirlError> {
    if rep.dim_in() != n.dim_in() || rep.dim_out() != n.dim_out() {
        return Err(TwirlError::DimMismatch);
    }
    let weight = 1.0 / (rep.len() as f64).sqrt();
    let mut kraus = Vec::with_capacity(rep.len() * n.kraus_ops().len());
    for (u, v) in &rep.elements {
        let v_dag = v.adjoint();
        for k in n.kraus_ops() {
            kraus.push(v_dag.matmul(k).matmul(u).scale_re(weight));
        }
    }
    Ok(KrausChannel::new(kraus, n.dim_in(), n.dim_out())?)
}

/// How far the input-side average (1/|G|) sum_g U_g X U_g^dag is from
/// Tr(X) pi, maximized over a matrix-unit basis in trace norm.
pub fn one_design_deviation(rep: &UnitaryRep) -> f64 {
    let d = rep.dim_in();
    let pi_scale = 1.0 / d as f64;
    let mut worst = 0.0f64;
    for a in 0..d {
        for b in 0..d {
            let mut unit = ComplexMatrix::zeros(d, d);
            unit[(a, b)] = 1.0.into();
            let mut avg = ComplexMatrix::zeros(d, d);
            for (u, _) in &rep.elements {
                avg = avg.add(&u.matmul(&unit).matmul(&u.adjoint()));
            }
            avg = avg.scale_re(1.0 / rep.len() as f64);
            let target = if a == b {
                ComplexMatrix::identity(d).scale_re(pi_scale)
            } else {
                ComplexMatrix::zeros(d, d)
            };
            worst = worst.max(trace_norm(&avg.sub(&target)));
        }
    }
    worst
}

/// POVM {E^g} on A'A with E^g = (|A|^2/|G|) (U^g)^dag Phi (U^g), the unitary
/// acting on the A' factor.
#[derive(Debug, Clone)]
pub struct TwirlPovm {
    pub elements: Vec<ComplexMatrix>,
}

impl TwirlPovm {
    pub fn build(rep: &UnitaryRep) -> Result<Self, TwirlError> {
        let d = rep.dim_in();
        let phi = DensityMatrix::maximally_entangled(d);
        let scale = (d * d) as f64 / rep.len() as f64;
        let eye = ComplexMatrix::identity(d);
        let elements: Vec<ComplexMatrix> = rep
            .elements
            .iter()
            .map(|(u, _)| {
                let lift = tensor(u, &eye);
                lift.adjoint()
                    .matmul(phi.matrix())
                    .matmul(&lift)
                    .scale_re(scale)
            })
            .collect();
        let povm = Self { elements };
        let dev = povm.completeness_deviation();
        if dev > POVM_TOL {
            return Err(TwirlError::IncompletePovm(dev));
        }
        Ok(povm)
    }

    pub fn completeness_deviation(&self) -> f64 {
        let d = self.elements[0].rows;
        let mut sum = ComplexMatrix::zeros(d, d);
        for e in &self.elements {
            sum = sum.add(e);
        }
        sum.max_abs_diff(&ComplexMatrix::identity(d))
    }
}

/// Teleportation simulation of the twirled channel: measure {E^g} on the
/// input against half of the Choi state, correct with V_g^dag on B. Requires
/// a one-design input representation.
pub fn teleport_simulate_twirl(
    n: &KrausChannel,
    rep: &UnitaryRep,
    rho: &DensityMatrix,
) -> Result<DensityMatrix, TwirlError> {
    if rep.dim_in() != n.dim_in() || rho.dim() != n.dim_in() {
        return Err(TwirlError::DimMismatch);
    }
    let dev = one_design_deviation(rep);
    if dev > ONE_DESIGN_TOL {
        return Err(TwirlError::NotOneDesign(dev));
    }
    let povm = TwirlPovm::build(rep)?;

    let d = n.dim_in();
    let db = n.dim_out();
    let omega = n.choi_state();
    let joint = tensor(rho.matrix(), omega.state().matrix());
    let dims = [d, d, db];
    let eye_b = ComplexMatrix::identity(db);

    let mut out = ComplexMatrix::zeros(db, db);
    for (e, (_, v)) in povm.elements.iter().zip(&rep.elements) {
        let lifted = tensor(e, &eye_b);
        let conditional = partial_trace(&lifted.matmul(&joint), &dims, &[2]).unwrap();
        out = out.add(&v.adjoint().matmul(&conditional).matmul(v));
    }
    Ok(DensityMatrix::from_nearly_density(out, vec![db]).unwrap())
}

/// The X-twirl of the amplitude-damping/depolarizing mixture, which is fully
/// Pauli covariant and therefore teleportation-simulable.
pub fn nbar_channel(p: f64) -> Result<KrausChannel, TwirlError> {
    let n = crate::channels::mixed_channel_np(p)?;
    twirl_channel(&n, &UnitaryRep::named("ix")?)
}

/// Epsilon-covariance of N with respect to the representation: the
/// diamond-norm radius to its own twirl.
pub fn approx_covariance_epsilon(n: &KrausChannel, rep: &UnitaryRep, tol: f64) -> Result<f64, TwirlError> {
    let twirled = twirl_channel(n, rep)?;
    Ok(diamond_distance(n, &twirled, tol)?.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{covariance_deviation, depolarizing, mixed_channel_np};
    use crate::rng;

    #[test]
    fn named_reps_are_unitary() {
        for name in ["pauli", "ix", "iz"] {
            let rep = UnitaryRep::named(name).unwrap();
            assert_eq!(rep.dim_in(), 2);
            assert!(!rep.is_empty());
        }
        assert!(UnitaryRep::named("clifford").is_err());
    }

    #[test]
    fn one_design_deviations() {
        assert!(one_design_deviation(&UnitaryRep::named("pauli").unwrap()) < 1e-12);
        assert!(one_design_deviation(&UnitaryRep::named("ix").unwrap()) > 0.1);
        assert!(one_design_deviation(&UnitaryRep::named("iz").unwrap()) > 0.1);
    }

    #[test]
    fn twirl_fixes_depolarizing() {
        let dep = depolarizing(0.35).unwrap();
        let rep = UnitaryRep::named("pauli").unwrap();
        let twirled = twirl_channel(&dep, &rep).unwrap();
        let diff = dep
            .choi_state()
            .state()
            .matrix()
            .max_abs_diff(twirled.choi_state().state().matrix());
        assert!(diff < 1e-10);
    }

    #[test]
    fn x_twirl_matches_displayed_average() {
        let p = 0.45;
        let n = mixed_channel_np(p).unwrap();
        let rep = UnitaryRep::named("ix").unwrap();
        let twirled = twirl_channel(&n, &rep).unwrap();
        let x = pauli_x();
        let mut r = rng::seeded(31);
        for _ in 0..10 {
            let rho = rng::random_state(&mut r, vec![2]);
            let direct = twirled.apply_full(rho.matrix());
            let flipped = x.matmul(rho.matrix()).matmul(&x);
            let avg = n
                .apply_full(rho.matrix())
                .add(&x.matmul(&n.apply_full(&flipped)).matmul(&x))
                .scale_re(0.5);
            assert!(direct.max_abs_diff(&avg) < 1e-12);
        }
    }

    #[test]
    fn pauli_twirl_is_bell_diagonal() {
        let mut r = rng::seeded(32);
        let rep = UnitaryRep::named("pauli").unwrap();
        let bell_vecs: Vec<ComplexMatrix> = [pauli_i(), pauli_x(), pauli_y(), pauli_z()]
            .iter()
            .map(|s| {
                // |Bell_s> = (I (x) s) |Phi>, as a column of vec(s)/sqrt(2)
                let mut v = ComplexMatrix::zeros(4, 1);
                for i in 0..2 {
                    for j in 0..2 {
                        v[(i * 2 + j, 0)] = s[(j, i)] / (2.0f64).sqrt();
                    }
                }
                v
            })
            .collect();
        for _ in 0..5 {
            let n = rng::random_channel(&mut r, 2, 2, 3);
            let twirled = twirl_channel(&n, &rep).unwrap();
            let choi = twirled.choi_state().state().matrix().clone();
            for a in 0..4 {
                for b in 0..4 {
                    if a == b {
                        continue;
                    }
                    let elem = bell_vecs[a]
                        .adjoint()
                        .matmul(&choi)
                        .matmul(&bell_vecs[b])[(0, 0)];
                    assert!(elem.norm() < 1e-10, "off-diagonal {a}{b}: {elem}");
                }
            }
        }
    }

    #[test]
    fn twirled_channels_are_covariant() {
        let mut r = rng::seeded(33);
        for name in ["pauli", "ix", "iz"] {
            let rep = UnitaryRep::named(name).unwrap();
            let n = rng::random_channel(&mut r, 2, 2, 2);
            let twirled = twirl_channel(&n, &rep).unwrap();
            let dev = covariance_deviation(&twirled, &rep.pairs()).unwrap();
            assert!(dev < 1e-9, "{name}: {dev:.2e}");
        }
    }

    #[test]
    fn x_twirled_mixed_channel_is_pauli_covariant() {
        let rep = UnitaryRep::named("pauli").unwrap();
        for &p in &[0.2, 0.5, 0.8] {
            let nbar = twirl_channel(&mixed_channel_np(p).unwrap(), &UnitaryRep::named("ix").unwrap()).unwrap();
            let dev = covariance_deviation(&nbar, &rep.pairs()).unwrap();
            assert!(dev < 1e-9, "p={p}: {dev:.2e}");
        }
    }

    #[test]
    fn povm_is_complete_for_one_designs() {
        let povm = TwirlPovm::build(&UnitaryRep::named("pauli").unwrap()).unwrap();
        assert!(povm.completeness_deviation() < 1e-12);
        for e in &povm.elements {
            let min = crate::linalg::HermitianMatrix::from_nearly_hermitian(e.clone()).min_eigenvalue();
            assert!(min > -1e-12);
        }
    }

    #[test]
    fn teleportation_recovers_identity() {
        let id = KrausChannel::identity(2);
        let rep = UnitaryRep::named("pauli").unwrap();
        let mut r = rng::seeded(34);
        for _ in 0..5 {
            let rho = rng::random_state(&mut r, vec![2]);
            let out = teleport_simulate_twirl(&id, &rep, &rho).unwrap();
            assert!(out.matrix().max_abs_diff(rho.matrix()) < 1e-10);
        }
    }

    #[test]
    fn teleportation_matches_twirl_for_mixed_channel() {
        let rep = UnitaryRep::named("pauli").unwrap();
        let mut r = rng::seeded(35);
        for &p in &[0.3, 0.7] {
            let n = mixed_channel_np(p).unwrap();
            let twirled = twirl_channel(&n, &rep).unwrap();
            for _ in 0..20 {
                let rho = rng::random_state(&mut r, vec![2]);
                let sim = teleport_simulate_twirl(&n, &rep, &rho).unwrap();
                let direct = twirled.apply_full(rho.matrix());
                assert!(sim.matrix().max_abs_diff(&direct) < 1e-10);
            }
        }
    }

    #[test]
    fn teleportation_self_twirl_of_depolarizing() {
        let dep = depolarizing(0.5).unwrap();
        let rep = UnitaryRep::named("pauli").unwrap();
        let mut r = rng::seeded(36);
        let rho = rng::random_state(&mut r, vec![2]);
        let sim = teleport_simulate_twirl(&dep, &rep, &rho).unwrap();
        let direct = dep.apply_full(rho.matrix());
        assert!(sim.matrix().max_abs_diff(&direct) < 1e-10);
    }

    #[test]
    fn non_one_design_rejected() {
        let n = mixed_channel_np(0.5).unwrap();
        let rho = DensityMatrix::maximally_mixed(vec![2]);
        let err = teleport_simulate_twirl(&n, &UnitaryRep::named("ix").unwrap(), &rho);
        assert!(matches!(err, Err(TwirlError::NotOneDesign(_))));
    }

    #[test]
    fn covariance_epsilon_examples() {
        let dep = depolarizing(0.3).unwrap();
        let rep = UnitaryRep::named("pauli").unwrap();
        let eps = approx_covariance_epsilon(&dep, &rep, 1e-6).unwrap();
        assert!(eps < 1e-6, "covariant channel moved by {eps}");

        let p = 0.4;
        let n = mixed_channel_np(p).unwrap();
        let eps = approx_covariance_epsilon(&n, &UnitaryRep::named("ix").unwrap(), 1e-6).unwrap();
        assert!(eps <= p * p / 2.0 + 1e-6, "eps {eps}");
    }
}
