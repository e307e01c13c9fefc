//! Randomized verification suites over the solver stack.
//!
//! Each suite replays one of the paper-level properties on seeded random
//! inputs and reports per-check margins: the slack remaining before the
//! stated tolerance is violated. A nonnegative margin means the check passed.

use crate::bounds::{amortized_gap, continuity_per_state_check, tp_sim_upper_bound, BoundsError};
use crate::channels::{entanglement_breaking_qubit, mixed_channel_np};
use crate::diamond::diamond_distance;
use crate::entmeasures::{
    measure, negativity_overlap_bound_check, project, FeasibleSetKind, FeasibleSetSpec,
    MeasureError, MeasureKind, OptimizerConfig,
};
use crate::entropy::{h2, mutual_information};
use crate::linalg::{DensityMatrix, HermitianMatrix, SubsystemCut};
use crate::rng;
use crate::twirl::{teleport_simulate_twirl, twirl_channel, TwirlError, UnitaryRep};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("unknown suite `{0}`")]
    UnknownSuite(String),
    #[error("measure solve failed: {0}")]
    Measure(#[from] MeasureError),
    #[error("bounds evaluation failed: {0}")]
    Bounds(#[from] BoundsError),
    #[error("twirl failure: {0}")]
    Twirl(#[from] TwirlError),
    #[error("diamond failure: {0}")]
    Diamond(#[from] crate::diamond::DiamondError),
    #[error("entropy failure: {0}")]
    Entropy(#[from] crate::entropy::EntropyError),
    #[error("channel failure: {0}")]
    Channel(#[from] crate::channels::ChannelError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Lemmas,
    Twirl,
    Continuity,
    Overlap,
    Amortized,
}

impl Suite {
    pub fn parse(name: &str) -> Result<Self, VerifyError> {
        match name {
            "lemmas" => Ok(Suite::Lemmas),
            "twirl" => Ok(Suite::Twirl),
            "continuity" => Ok(Suite::Continuity),
            "overlap" => Ok(Suite::Overlap),
            "amortized" => Ok(Suite::Amortized),
            other => Err(VerifyError::UnknownSuite(other.to_string())),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Lemmas => "lemmas",
            Suite::Twirl => "twirl",
            Suite::Continuity => "continuity",
            Suite::Overlap => "overlap",
            Suite::Amortized => "amortized",
        }
    }
}

/// One verified property: `margin` is the worst remaining slack across all
/// samples (tolerance minus observed violation), nonnegative iff passed.
#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub margin: f64,
    pub samples: usize,
}

#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub suite: &'static str,
    pub checks: Vec<CheckOutcome>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

fn outcome(name: &str, margin: f64, samples: usize) -> CheckOutcome {
    CheckOutcome { name: name.to_string(), passed: margin >= 0.0, margin, samples }
}

pub fn run_suite(
    suite: Suite,
    seed: u64,
    samples: usize,
    cfg: &OptimizerConfig,
) -> Result<SuiteReport, VerifyError> {
    let checks = match suite {
        Suite::Lemmas => lemmas_suite(seed, samples, cfg)?,
        Suite::Twirl => twirl_suite(seed, samples)?,
        Suite::Continuity => continuity_suite(seed, samples, cfg)?,
        Suite::Overlap => overlap_suite(seed, samples)?,
        Suite::Amortized => amortized_suite(seed, samples, cfg)?,
    };
    Ok(SuiteReport { suite: suite.name(), checks })
}

const LEMMA1_SLACK: f64 = 2e-5;
const LEMMA23_SLACK: f64 = 3e-5;

/// Chaining and averaging properties of the measures on random states:
/// monotone chaining of the cut against mutual information and dimension,
/// exact decomposition on classical mixtures, and the mixing penalty H(X).
fn lemmas_suite(
    seed: u64,
    samples: usize,
    cfg: &OptimizerConfig,
) -> Result<Vec<CheckOutcome>, VerifyError> {
    let mut checks = Vec::new();
    for kind in [MeasureKind::Rains, MeasureKind::EPpt] {
        let tag = kind_tag(kind);
        let mut r = rng::seeded(seed);
        let cut_a_bc = SubsystemCut::new(vec![0], vec![1, 2]);
        let cut_a_b = SubsystemCut::new(vec![0], vec![1]);

        // chaining: E(A;BC) <= E(A;B) + I(AB;C) and <= E(A;B) + 2 log2|C|
        let (mut m_info, mut m_dim) = (f64::INFINITY, f64::INFINITY);
        for _ in 0..samples {
            let rho = rng::random_state(&mut r, vec![2, 2, 2]);
            let e_abc = measure(kind, &rho, &cut_a_bc, cfg)?.value;
            let rho_ab = rho.partial_trace_keep(&[0, 1]).expect("valid cut");
            let e_ab = measure(kind, &rho_ab, &cut_a_b, cfg)?.value;
            let mi = mutual_information(&rho, &[0, 1], &[2])?;
            m_info = m_info.min(e_ab + mi + LEMMA1_SLACK - e_abc);
            m_dim = m_dim.min(e_ab + 2.0 + LEMMA1_SLACK - e_abc);
        }
        checks.push(outcome(&format!("{tag} chaining vs mutual information"), m_info, samples));
        checks.push(outcome(&format!("{tag} chaining vs dimension"), m_dim, samples));

        // classical mixtures: E(A;BX) on the flagged state equals the average,
        // and the average exceeds E of the mixture by at most H(X)
        let cut_a_bx = SubsystemCut::new(vec![1], vec![0, 2]);
        let (mut m_eq, mut m_mix) = (f64::INFINITY, f64::INFINITY);
        for _ in 0..samples {
            let p0: f64 = 0.1 + 0.8 * rng::unit_real(&mut r);
            let rho0 = rng::random_state(&mut r, vec![2, 2]);
            let rho1 = rng::random_state(&mut r, vec![2, 2]);
            let cq = DensityMatrix::classical_flag(&[(p0, &rho0), (1.0 - p0, &rho1)])
                .expect("valid mixture");
            let e_flag = measure(kind, &cq, &cut_a_bx, cfg)?.value;
            let avg = p0 * measure(kind, &rho0, &cut_a_b, cfg)?.value
                + (1.0 - p0) * measure(kind, &rho1, &cut_a_b, cfg)?.value;
            let mixed = DensityMatrix::mix(&[(p0, &rho0), (1.0 - p0, &rho1)]).expect("valid mixture");
            let e_mixed = measure(kind, &mixed, &cut_a_b, cfg)?.value;
            m_eq = m_eq.min(LEMMA23_SLACK - (e_flag - avg).abs());
            m_mix = m_mix.min(e_mixed + h2(p0)? + LEMMA23_SLACK - avg);
        }
        checks.push(outcome(&format!("{tag} classical-flag decomposition"), m_eq, samples));
        checks.push(outcome(&format!("{tag} mixing penalty H(X)"), m_mix, samples));
    }
    Ok(checks)
}

fn kind_tag(kind: MeasureKind) -> &'static str {
    match kind {
        MeasureKind::Rains => "rains",
        MeasureKind::EPpt => "e_ppt",
        MeasureKind::ER2x2 => "e_r",
    }
}

const TWIRL_TOL: f64 = 1e-10;

/// Two-path oracle: twirling the channel directly must match the
/// teleportation simulation through its Choi state on every input.
fn twirl_suite(seed: u64, samples: usize) -> Result<Vec<CheckOutcome>, VerifyError> {
    let rep = UnitaryRep::named("pauli")?;
    let mut checks = Vec::new();
    for &p in &[0.3, 0.7] {
        let n = mixed_channel_np(p)?;
        let twirled = twirl_channel(&n, &rep)?;
        let mut r = rng::seeded(seed);
        let mut margin = f64::INFINITY;
        for _ in 0..samples {
            let rho = rng::random_state(&mut r, vec![2]);
            let direct = twirled.apply(&rho, 0)?;
            let simulated = teleport_simulate_twirl(&n, &rep, &rho)?;
            let dev = direct.matrix().max_abs_diff(simulated.matrix());
            margin = margin.min(TWIRL_TOL - dev);
        }
        checks.push(outcome(&format!("teleportation twirl p={p}"), margin, samples));
    }
    Ok(checks)
}

const CONTINUITY_SLACK: f64 = 1e-4;

/// Per-state continuity of the measure under channel perturbation, evaluated
/// for the mixed channel against its twirl at p = 0.4.
fn continuity_suite(
    seed: u64,
    samples: usize,
    cfg: &OptimizerConfig,
) -> Result<Vec<CheckOutcome>, VerifyError> {
    let p = 0.4;
    let n = mixed_channel_np(p)?;
    let m = twirl_channel(&n, &UnitaryRep::named("ix")?)?;
    let eps = diamond_distance(&n, &m, 1e-6)?.value;
    let mut r = rng::seeded(seed);
    let mut margin = f64::INFINITY;
    for _ in 0..samples {
        let rho = rng::random_state(&mut r, vec![2, 2, 2]);
        let check =
            continuity_per_state_check(&n, &m, &rho, MeasureKind::EPpt, Some(eps), cfg)?;
        margin = margin.min(check.rhs + CONTINUITY_SLACK - check.lhs);
    }
    Ok(vec![outcome("measure continuity in the channel", margin, samples)])
}

const OVERLAP_TOL: f64 = 1e-9;

/// Overlap of random projected members of the Rains set with the rank-M
/// maximally entangled state never exceeds 1/M.
fn overlap_suite(seed: u64, samples: usize) -> Result<Vec<CheckOutcome>, VerifyError> {
    let mut checks = Vec::new();
    for m in [2usize, 3] {
        let set = FeasibleSetSpec::new(
            FeasibleSetKind::RainsPptPrime,
            SubsystemCut::new(vec![0], vec![1]),
            vec![m, m],
        )?;
        let mut r = rng::seeded(seed);
        let mut margin = f64::INFINITY;
        for _ in 0..samples {
            // perturbed density matrices keep the projection well conditioned;
            // distant starting points stall Dykstra before the residual target
            let base = rng::random_state(&mut r, vec![m, m]);
            let g = rng::gaussian_matrix(&mut r, m * m, m * m);
            let pert = g.add(&g.adjoint()).scale_re(0.05 / (m * m) as f64);
            let h = HermitianMatrix::from_nearly_hermitian(base.matrix().add(&pert));
            let sigma = project(&set, &h)?;
            let overlap = negativity_overlap_bound_check(m, &sigma)?;
            margin = margin.min(1.0 / m as f64 + OVERLAP_TOL - overlap);
        }
        checks.push(outcome(&format!("rains-set overlap M={m}"), margin, samples));
    }
    Ok(checks)
}

const PROP5_TOL: f64 = 1e-6;
const GAP_SLACK: f64 = 1e-5;

/// Amortization properties: for the Pauli-covariant twirled channel the gap
/// at the maximally entangled input equals the Rains value of the Choi state
/// and upper-bounds all sampled gaps; an entanglement-breaking channel has no
/// amortized gain at all.
fn amortized_suite(
    seed: u64,
    samples: usize,
    cfg: &OptimizerConfig,
) -> Result<Vec<CheckOutcome>, VerifyError> {
    let mut checks = Vec::new();
    let nbar = crate::twirl::nbar_channel(0.3)?;

    let phi = DensityMatrix::maximally_entangled(2)
        .with_dims(vec![2, 2, 1])
        .expect("trivial factor");
    let gap_choi = amortized_gap(&nbar, &phi, MeasureKind::Rains, cfg)?.gap;
    let rains_choi =
        tp_sim_upper_bound(&nbar.choi_state().state().clone(), MeasureKind::Rains, cfg)?;
    checks.push(outcome(
        "covariant gap equals choi rains value",
        PROP5_TOL - (gap_choi - rains_choi).abs(),
        1,
    ));

    let mut r = rng::seeded(seed);
    let mut margin = f64::INFINITY;
    for _ in 0..samples {
        let rho = rng::random_state(&mut r, vec![2, 2, 1]);
        let gap = amortized_gap(&nbar, &rho, MeasureKind::Rains, cfg)?.gap;
        margin = margin.min(gap_choi + GAP_SLACK - gap);
    }
    checks.push(outcome("covariant gaps below choi value", margin, samples));

    let eb = entanglement_breaking_qubit();
    let mut margin = f64::INFINITY;
    for _ in 0..samples {
        let rho = rng::random_state(&mut r, vec![2, 2, 1]);
        let gap = amortized_gap(&eb, &rho, MeasureKind::EPpt, cfg)?.gap;
        margin = margin.min(GAP_SLACK - gap);
    }
    checks.push(outcome("entanglement-breaking gaps vanish", margin, samples));

    Ok(checks)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> OptimizerConfig {
        OptimizerConfig::default()
    }

    #[test]
    fn twirl_suite_passes() {
        let report = run_suite(Suite::Twirl, 7, 5, &cfg()).unwrap();
        assert!(report.passed(), "{:?}", report.checks);
    }

    #[test]
    fn overlap_suite_passes() {
        let report = run_suite(Suite::Overlap, 11, 25, &cfg()).unwrap();
        assert!(report.passed(), "{:?}", report.checks);
    }

    #[test]
    fn lemmas_suite_small_sample() {
        let report = run_suite(Suite::Lemmas, 3, 1, &cfg()).unwrap();
        assert!(report.passed(), "{:?}", report.checks);
        assert_eq!(report.checks.len(), 8);
    }

    #[test]
    fn continuity_suite_small_sample() {
        let report = run_suite(Suite::Continuity, 5, 3, &cfg()).unwrap();
        assert!(report.passed(), "{:?}", report.checks);
    }

    #[test]
    fn amortized_suite_small_sample() {
        let report = run_suite(Suite::Amortized, 9, 5, &cfg()).unwrap();
        assert!(report.passed(), "{:?}", report.checks);
    }

    #[test]
    fn suite_names_round_trip() {
        for s in [Suite::Lemmas, Suite::Twirl, Suite::Continuity, Suite::Overlap, Suite::Amortized] {
            assert_eq!(Suite::parse(s.name()).unwrap(), s);
        }
        assert!(Suite::parse("bogus").is_err());
    }
}
