//! Conditional and marginal statistics of Alice's measurement after an
//! arbitrary measurement on Bob's half of a Bell pair, plus the
//! three-scenario equivalence check. Whatever Bob does, Alice's marginal is
//! exactly 1/2.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, Ket, Matrix, DEFAULT_TOL};
use crate::measure::{
    collapse_by_index, compose_sequential, outcome_probabilities, outcome_probabilities_ket,
    FamilyKind, MeasurementFamily,
};
use crate::rng::{derive_stream, SplitMix64};
use crate::state::{bell_state, partial_trace, pure_density, Subsystem};

/// Pauli X = [[0, 1], [1, 0]].
pub fn pauli_x() -> Matrix {
    Matrix::from_entries(
        2,
        vec![
            Complex64::ZERO,
            Complex64::ONE,
            Complex64::ONE,
            Complex64::ZERO,
        ],
    )
    .expect("finite entries")
}

/// Pauli Y = [[0, -i], [i, 0]].
pub fn pauli_y() -> Matrix {
    Matrix::from_entries(
        2,
        vec![
            Complex64::ZERO,
            Complex64::new(0.0, -1.0),
            Complex64::new(0.0, 1.0),
            Complex64::ZERO,
        ],
    )
    .expect("finite entries")
}

/// Pauli Z = diag(1, -1).
pub fn pauli_z() -> Matrix {
    Matrix::diag(&[Complex64::ONE, Complex64::new(-1.0, 0.0)])
}

/// Spin projectors (I + n.sigma)/2 and (I - n.sigma)/2 along a measurement
/// axis, labeled "0" and "1". The axis is normalized first; the z axis
/// reproduces the computational-basis projectors.
pub fn spin_axis_family(axis: [f64; 3]) -> Result<MeasurementFamily> {
    let norm = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
    if !norm.is_finite() || norm < 1e-12 {
        return Err(Error::InvalidArgument(
            "measurement axis must be nonzero".into(),
        ));
    }
    let [nx, ny, nz] = [axis[0] / norm, axis[1] / norm, axis[2] / norm];
    let half = Complex64::new(0.5, 0.0);
    let n_sigma = pauli_x()
        .scale(Complex64::new(nx, 0.0))
        .add(&pauli_y().scale(Complex64::new(ny, 0.0)))
        .expect("dim 2")
        .add(&pauli_z().scale(Complex64::new(nz, 0.0)))
        .expect("dim 2");
    let plus = Matrix::identity(2)
        .add(&n_sigma)
        .expect("dim 2")
        .scale(half);
    let minus = Matrix::identity(2)
        .sub(&n_sigma)
        .expect("dim 2")
        .scale(half);
    MeasurementFamily::new(
        FamilyKind::Projective,
        vec![("0".into(), plus), ("1".into(), minus)],
        DEFAULT_TOL,
    )
}

/// A measurement on Bob's qubit together with its lift to the shared pair:
/// each base operator M becomes I (x) M (Alice's factor leads).
///
/// Construction rejects degenerate bases containing an (entrywise) zero
/// operator: such an outcome can never occur and its conditional statistics
/// are undefined.
#[derive(Debug, Clone)]
pub struct BobFamily {
    base: MeasurementFamily,
    lifted: MeasurementFamily,
}

impl BobFamily {
    pub fn from_base(base: MeasurementFamily) -> Result<Self> {
        if base.dim() != 2 {
            return Err(Error::DimMismatch {
                context: "BobFamily::from_base",
                expected: 2,
                got: base.dim(),
            });
        }
        for (label, op) in base.operators() {
            if op.max_abs() <= DEFAULT_TOL {
                return Err(Error::InvalidArgument(format!(
                    "degenerate Bob family: operator {label:?} is zero"
                )));
            }
        }
        let i2 = Matrix::identity(2);
        let lifted_ops = base
            .operators()
            .iter()
            .map(|(label, op)| (label.clone(), linalg::tensor(&i2, op)))
            .collect();
        let lifted = MeasurementFamily::new(base.kind(), lifted_ops, DEFAULT_TOL)?;
        Ok(Self { base, lifted })
    }

    pub fn base(&self) -> &MeasurementFamily {
        &self.base
    }

    /// Operators I (x) M acting on the shared pair.
    pub fn lifted(&self) -> &MeasurementFamily {
        &self.lifted
    }
}

/// Which construction a random Bob family uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BobKind {
    /// Projectors along a sphere-uniform random spin axis.
    SpinAxis,
    /// A random contraction completed to a two-operator Kraus family.
    GeneralKraus,
}

/// Draw a random axis uniformly on the sphere.
pub fn random_axis(rng: &mut SplitMix64) -> [f64; 3] {
    rng.next_sphere_point()
}

/// Principal square root of a 2x2 Hermitian positive-semidefinite matrix,
/// via the closed form sqrt(H) = (H + sqrt(det H) I) / sqrt(tr H + 2 sqrt(det H)).
fn sqrt_psd_2x2(h: &Matrix) -> Matrix {
    debug_assert_eq!(h.dim(), 2);
    let tr = linalg::trace(h).re;
    let det = (h.get(0, 0) * h.get(1, 1) - h.get(0, 1) * h.get(1, 0)).re;
    let s = det.max(0.0).sqrt();
    let denom_sq = tr + 2.0 * s;
    if denom_sq <= 1e-300 {
        return Matrix::zeros(2);
    }
    let denom = denom_sq.sqrt();
    h.add(&Matrix::identity(2).scale(Complex64::new(s, 0.0)))
        .expect("dim 2")
        .scale(Complex64::new(1.0 / denom, 0.0))
}

/// Spectral-norm estimate of a 2x2 matrix by power iteration on adjoint(A)*A.
fn spectral_norm_2x2(a: &Matrix) -> f64 {
    let ata = linalg::matmul(&linalg::adjoint(a), a).expect("dim 2");
    let mut v = vec![
        Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
        Complex64::new(0.0, std::f64::consts::FRAC_1_SQRT_2),
    ];
    let mut lambda = 0.0;
    for _ in 0..64 {
        let w = linalg::apply(&ata, &v).expect("dim 2");
        let n2 = linalg::norm2(&w);
        if n2 <= 1e-300 {
            return 0.0;
        }
        lambda = linalg::inner(&v, &w).expect("dim 2").re;
        let inv = 1.0 / n2.sqrt();
        v = w.into_iter().map(|z| z * inv).collect();
    }
    lambda.max(0.0).sqrt()
}

/// Generate a seeded random Bob measurement of the requested kind.
///
/// Spin-axis: projectors along a sphere-uniform axis. General-kraus: a random
/// complex-Gaussian 2x2 matrix rescaled to a strict contraction becomes the
/// first operator, and the principal square root of I - adjoint(A)*A
/// completes the pair. Both validate at 1e-12, and the same seed always
/// yields the same family.
pub fn random_bob_family(seed: u64, kind: BobKind) -> BobFamily {
    let mut rng = derive_stream(seed, &[kind as u64]);
    let base = match kind {
        BobKind::SpinAxis => spin_axis_family(rng.next_sphere_point()).expect("unit axis is valid"),
        BobKind::GeneralKraus => {
            let entries: Vec<Complex64> = (0..4)
                .map(|_| Complex64::new(rng.next_gaussian(), rng.next_gaussian()))
                .collect();
            let raw = Matrix::from_entries(2, entries).expect("finite entries");
            let norm = spectral_norm_2x2(&raw);
            // Strict contraction keeps I - A†A comfortably positive.
            let target = rng.next_range(0.2, 0.95);
            let a = if norm > 1e-12 {
                raw.scale(Complex64::new(target / norm, 0.0))
            } else {
                Matrix::identity(2).scale(Complex64::new(target, 0.0))
            };
            let ata = linalg::matmul(&linalg::adjoint(&a), &a).expect("dim 2");
            let complement = Matrix::identity(2).sub(&ata).expect("dim 2");
            let b = sqrt_psd_2x2(&complement);
            MeasurementFamily::new(
                FamilyKind::General,
                vec![("0".into(), a), ("1".into(), b)],
                DEFAULT_TOL,
            )
            .expect("completed Kraus pair is complete by construction")
        }
    };
    BobFamily::from_base(base).expect("random bases are non-degenerate")
}

/// Conditional and marginal outcome statistics of one Bob family on the Bell
/// state.
#[derive(Debug, Clone, Serialize)]
pub struct NoSignalReport {
    /// Human-readable description of the Bob family.
    pub family: String,
    /// P(Alice sees 0 | Bob saw his first outcome).
    pub p0_given_alpha: f64,
    /// P(Alice sees 1 | Bob saw his second outcome).
    pub p1_given_beta: f64,
    /// Probability of Bob's first outcome.
    pub p_alpha: f64,
    /// Probability of Bob's second outcome.
    pub p_beta: f64,
    /// Law-of-total-probability marginal that Alice sees 0.
    pub p0_marginal: f64,
    /// Law-of-total-probability marginal that Alice sees 1.
    pub p1_marginal: f64,
    /// |p0_marginal - 1/2|.
    pub deviation: f64,
}

/// P(Alice observes `alice_outcome` | Bob observed `bob_outcome`) on the
/// Bell state, where Bob measures first.
///
/// Computed two ways: (a) collapse the shared state by Bob's lifted operator
/// and measure Alice's projector on the result, and (b) the closed form
/// <a| adjoint(M) M |a> / (2 P(bob_outcome)). The two must agree within
/// 1e-12; the collapse route is returned.
pub fn alice_conditional(bob: &BobFamily, alice_outcome: u8, bob_outcome: &str) -> Result<f64> {
    if alice_outcome > 1 {
        return Err(Error::InvalidArgument(format!(
            "alice_outcome must be 0 or 1, got {alice_outcome}"
        )));
    }
    let index = bob
        .lifted()
        .index_of(bob_outcome)
        .ok_or_else(|| Error::UnknownLabel {
            label: bob_outcome.to_string(),
        })?;

    let psi = bell_state();
    let collapsed = collapse_by_index(&psi, bob.lifted(), index)?;
    let alice = MeasurementFamily::alice_computational_on_pair();
    let via_collapse = outcome_probabilities_ket(&collapsed, &alice)?[alice_outcome as usize];

    // Closed form: <a| M†M |a> / (2 ||(I x M) psi||^2).
    let bob_op = bob.base().op(index);
    let image = linalg::apply(bob_op, Ket::basis(2, alice_outcome as usize).amplitudes())?;
    let branch_probability =
        linalg::norm2(&linalg::apply(bob.lifted().op(index), psi.amplitudes())?);
    let closed_form = linalg::norm2(&image) / (2.0 * branch_probability);

    let residual = (via_collapse - closed_form).abs();
    if residual > DEFAULT_TOL {
        return Err(Error::ConsistencyCheck {
            context: "alice_conditional: collapse route and closed form disagree",
            residual,
        });
    }
    Ok(via_collapse)
}

/// Probability that Alice observes 0 on the Bell state after Bob performs
/// the given measurement, by the law of total probability over Bob's
/// outcomes. Equal to 1/2 for every valid Bob family.
pub fn alice_marginal(bob: &BobFamily) -> Result<f64> {
    alice_marginal_for(bob, 0)
}

fn alice_marginal_for(bob: &BobFamily, alice_outcome: u8) -> Result<f64> {
    let psi = bell_state();
    let branch_probs = outcome_probabilities_ket(&psi, bob.lifted())?;
    let mut marginal = 0.0;
    for (k, &p_branch) in branch_probs.iter().enumerate() {
        // Null branches contribute nothing; their conditional is undefined.
        if p_branch <= DEFAULT_TOL {
            continue;
        }
        let conditional = alice_conditional(bob, alice_outcome, bob.lifted().label(k))?;
        marginal += conditional * p_branch;
    }
    Ok(marginal)
}

/// Full conditional/marginal report for one Bob family on the Bell state.
pub fn no_signal_report(bob: &BobFamily, family: impl Into<String>) -> Result<NoSignalReport> {
    let psi = bell_state();
    let branch_probs = outcome_probabilities_ket(&psi, bob.lifted())?;
    if branch_probs.len() != 2 {
        return Err(Error::InvalidArgument(
            "no_signal_report expects a two-outcome Bob family".into(),
        ));
    }
    let p_alpha = branch_probs[0];
    let p_beta = branch_probs[1];
    let p0_given_alpha = if p_alpha > DEFAULT_TOL {
        alice_conditional(bob, 0, bob.lifted().label(0))?
    } else {
        0.0
    };
    let p1_given_beta = if p_beta > DEFAULT_TOL {
        alice_conditional(bob, 1, bob.lifted().label(1))?
    } else {
        0.0
    };
    let p0_marginal = alice_marginal_for(bob, 0)?;
    let p1_marginal = alice_marginal_for(bob, 1)?;
    Ok(NoSignalReport {
        family: family.into(),
        p0_given_alpha,
        p1_given_beta,
        p_alpha,
        p_beta,
        p0_marginal,
        p1_marginal,
        deviation: (p0_marginal - 0.5).abs(),
    })
}

/// Alice's exact marginals in the three physically equivalent arrangements,
/// for one random draw of Bob measurements.
#[derive(Debug, Clone, Serialize)]
pub struct ScenarioTrial {
    pub trial: usize,
    /// Bob measures once, then Alice measures.
    pub bob_once: f64,
    /// Bob measures twice (fused into one composed measurement), then Alice.
    pub bob_twice_composed: f64,
    /// Alice alone: Born rule on her reduced state.
    pub alice_alone: f64,
}

/// Summary of a scenario-equivalence run.
#[derive(Debug, Clone, Serialize)]
pub struct ScenarioReport {
    pub trials: usize,
    /// Worst |marginal - 1/2| per scenario across all trials.
    pub max_deviation_bob_once: f64,
    pub max_deviation_bob_twice: f64,
    pub max_deviation_alice_alone: f64,
    /// Worst pairwise disagreement between scenarios across all trials.
    pub max_cross_scenario_gap: f64,
    pub per_trial: Vec<ScenarioTrial>,
}

impl ScenarioReport {
    pub fn max_deviation(&self) -> f64 {
        self.max_deviation_bob_once
            .max(self.max_deviation_bob_twice)
            .max(self.max_deviation_alice_alone)
    }
}

/// Check that three arrangements give Alice the same marginal: (1) one Bob
/// measurement then Alice, (2) two Bob measurements fused by sequential
/// composition then Alice, (3) Alice alone on her reduced state. Each trial
/// draws fresh random Bob families (alternating spin-axis and general-Kraus
/// kinds) from the seeded stream.
pub fn scenario_equivalence(seed: u64, trials: usize) -> Result<ScenarioReport> {
    if trials == 0 {
        return Err(Error::InvalidArgument(
            "scenario_equivalence requires trials >= 1".into(),
        ));
    }
    let psi = bell_state();
    let alice = MeasurementFamily::alice_computational_on_pair();

    let mut per_trial = Vec::with_capacity(trials);
    let mut report = ScenarioReport {
        trials,
        max_deviation_bob_once: 0.0,
        max_deviation_bob_twice: 0.0,
        max_deviation_alice_alone: 0.0,
        max_cross_scenario_gap: 0.0,
        per_trial: Vec::new(),
    };

    for trial in 0..trials {
        let kind = if trial % 2 == 0 {
            BobKind::SpinAxis
        } else {
            BobKind::GeneralKraus
        };
        let other_kind = if trial % 2 == 0 {
            BobKind::GeneralKraus
        } else {
            BobKind::SpinAxis
        };
        let first = random_bob_family(derive_stream(seed, &[trial as u64, 0]).next_u64(), kind);
        let second = random_bob_family(
            derive_stream(seed, &[trial as u64, 1]).next_u64(),
            other_kind,
        );

        // Scenario 1: Bob measures once, then Alice.
        let bob_once = alice_marginal(&first)?;

        // Scenario 2: Bob measures twice; the pair of measurements is one
        // composed measurement on the shared state.
        let composed = compose_sequential(first.lifted(), second.lifted())?;
        let branch_probs = outcome_probabilities_ket(&psi, &composed)?;
        let mut bob_twice = 0.0;
        for (k, &p_branch) in branch_probs.iter().enumerate() {
            if p_branch <= DEFAULT_TOL {
                continue;
            }
            let collapsed = collapse_by_index(&psi, &composed, k)?;
            bob_twice += p_branch * outcome_probabilities_ket(&collapsed, &alice)?[0];
        }

        // Scenario 3: Alice alone, via her reduced state.
        let reduced = partial_trace(&pure_density(&psi)?, Subsystem::Alice)?;
        let alice_alone = outcome_probabilities(&reduced, &MeasurementFamily::computational())?[0];

        report.max_deviation_bob_once = report.max_deviation_bob_once.max((bob_once - 0.5).abs());
        report.max_deviation_bob_twice =
            report.max_deviation_bob_twice.max((bob_twice - 0.5).abs());
        report.max_deviation_alice_alone = report
            .max_deviation_alice_alone
            .max((alice_alone - 0.5).abs());
        let gap = (bob_once - bob_twice)
            .abs()
            .max((bob_once - alice_alone).abs())
            .max((bob_twice - alice_alone).abs());
        report.max_cross_scenario_gap = report.max_cross_scenario_gap.max(gap);

        per_trial.push(ScenarioTrial {
            trial,
            bob_once,
            bob_twice_composed: bob_twice,
            alice_alone,
        });
    }
    report.per_trial = per_trial;
    Ok(report)
}
