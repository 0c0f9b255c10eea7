//! Measurement families and the operations on them: validation, outcome
//! probabilities, post-measurement collapse, sequential composition, n-fold
//! products, string probabilities, and seeded sampling.

use std::fmt;

use num_complex::Complex64;

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::linalg::{self, Ket, Matrix, DEFAULT_TOL, PROB_SUM_TOL};
use crate::rng::SplitMix64;
use crate::state::DensityOperator;

/// Kind of a measurement family. Projective families satisfy the stronger
/// projector conditions; general families only need completeness of the
/// Kraus operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyKind {
    Projective,
    General,
}

/// One violated family condition with its worst residual.
#[derive(Debug, Clone)]
pub struct Violation {
    pub condition: String,
    pub residual: f64,
}

/// Result of validating a candidate measurement family. Empty iff the
/// candidate satisfies every condition for its kind.
#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "valid");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "  {} (residual {:.3e})", v.condition, v.residual)?;
        }
        Ok(())
    }
}

/// An ordered list of labeled measurement operators acting on one space.
///
/// Families are validated when constructed; every instance in circulation
/// satisfies completeness (and, for the projective kind, Hermiticity,
/// idempotence and mutual orthogonality) within the tolerance it was built
/// with.
#[derive(Debug, Clone)]
pub struct MeasurementFamily {
    dim: usize,
    kind: FamilyKind,
    ops: Vec<(String, Matrix)>,
}

impl MeasurementFamily {
    /// Validate and construct. Structural problems (no operators, mismatched
    /// dimensions, duplicate labels) and numeric violations both fail here;
    /// use [`validate_ops`] to inspect a candidate without erroring.
    pub fn new(kind: FamilyKind, ops: Vec<(String, Matrix)>, tol: f64) -> Result<Self> {
        if ops.is_empty() {
            return Err(Error::EmptyInput {
                context: "MeasurementFamily::new",
            });
        }
        let dim = ops[0].1.dim();
        for (label, op) in &ops {
            if op.dim() != dim {
                return Err(Error::DimMismatch {
                    context: "MeasurementFamily::new",
                    expected: dim,
                    got: op.dim(),
                });
            }
            if ops.iter().filter(|(l, _)| l == label).count() > 1 {
                return Err(Error::InvalidArgument(format!(
                    "duplicate outcome label {label:?}"
                )));
            }
        }
        let report = validate_ops(kind, &ops, tol);
        if !report.is_valid() {
            return Err(Error::InvalidFamily { report });
        }
        Ok(Self { dim, kind, ops })
    }

    /// The computational-basis qubit measurement {|0><0|, |1><1|}.
    pub fn computational() -> Self {
        let p0 = Matrix::outer(Ket::basis(2, 0).amplitudes(), Ket::basis(2, 0).amplitudes())
            .expect("2-vectors");
        let p1 = Matrix::outer(Ket::basis(2, 1).amplitudes(), Ket::basis(2, 1).amplitudes())
            .expect("2-vectors");
        Self::new(
            FamilyKind::Projective,
            vec![("0".into(), p0), ("1".into(), p1)],
            DEFAULT_TOL,
        )
        .expect("computational projectors are a valid family")
    }

    /// Alice's computational measurement on a two-qubit pair:
    /// {|0><0| (x) I, |1><1| (x) I}, with Alice as the leading factor.
    pub fn alice_computational_on_pair() -> Self {
        let comp = Self::computational();
        let i2 = Matrix::identity(2);
        let ops = comp
            .ops
            .iter()
            .map(|(label, op)| (label.clone(), linalg::tensor(op, &i2)))
            .collect();
        Self::new(FamilyKind::Projective, ops, DEFAULT_TOL)
            .expect("lifted computational projectors are a valid family")
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> FamilyKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn operators(&self) -> &[(String, Matrix)] {
        &self.ops
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.ops.iter().map(|(l, _)| l.as_str())
    }

    pub fn op(&self, index: usize) -> &Matrix {
        &self.ops[index].1
    }

    pub fn label(&self, index: usize) -> &str {
        &self.ops[index].0
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.ops.iter().position(|(l, _)| l == label)
    }
}

/// Check the family conditions for a candidate operator list and report
/// every violation with its max residual. Never errors: an invalid candidate
/// simply yields a non-empty report.
pub fn validate_ops(kind: FamilyKind, ops: &[(String, Matrix)], tol: f64) -> ValidationReport {
    let mut report = ValidationReport::default();
    if ops.is_empty() {
        report.violations.push(Violation {
            condition: "family has no operators".into(),
            residual: f64::INFINITY,
        });
        return report;
    }
    let dim = ops[0].1.dim();

    // Completeness: sum of M†M equals I.
    let mut sum = Matrix::zeros(dim);
    for (_, op) in ops {
        let mtm = matmul_unchecked(&linalg::adjoint(op), op);
        sum = sum.add(&mtm).expect("same dim");
    }
    let completeness_residual = sum.max_abs_diff(&Matrix::identity(dim)).expect("same dim");
    if completeness_residual > tol {
        report.violations.push(Violation {
            condition: "completeness: sum of adjoint(M_k) * M_k != I".into(),
            residual: completeness_residual,
        });
    }

    if kind == FamilyKind::Projective {
        for (label, op) in ops {
            if !op.is_hermitian(tol) {
                let residual = op.max_abs_diff(&linalg::adjoint(op)).expect("same dim");
                report.violations.push(Violation {
                    condition: format!("projector {label:?} is not Hermitian"),
                    residual,
                });
            }
            let sq = matmul_unchecked(op, op);
            let idem_residual = sq.max_abs_diff(op).expect("same dim");
            if idem_residual > tol {
                report.violations.push(Violation {
                    condition: format!("projector {label:?} is not idempotent"),
                    residual: idem_residual,
                });
            }
        }
        for (i, (label_i, op_i)) in ops.iter().enumerate() {
            for (label_j, op_j) in ops.iter().skip(i + 1) {
                let prod = matmul_unchecked(op_i, op_j);
                let residual = prod.max_abs();
                if residual > tol {
                    report.violations.push(Violation {
                        condition: format!(
                            "projectors {label_i:?} and {label_j:?} are not orthogonal"
                        ),
                        residual,
                    });
                }
            }
        }
    }
    report
}

/// Validate an already-constructed family (always empty at the tolerance it
/// was built with; useful with a tighter one).
pub fn validate_family(family: &MeasurementFamily, tol: f64) -> ValidationReport {
    validate_ops(family.kind(), family.operators(), tol)
}

fn matmul_unchecked(a: &Matrix, b: &Matrix) -> Matrix {
    linalg::matmul(a, b).expect("dims checked by caller")
}

/// Outcome probabilities of a family on a density operator:
/// p_k = Tr(rho * adjoint(M_k) * M_k), which reduces to Tr(rho * pi_k) for
/// projectors. Entries are clamped to 0 when within 1e-12 below it, and the
/// vector must sum to 1 within 1e-10.
pub fn outcome_probabilities(
    rho: &DensityOperator,
    family: &MeasurementFamily,
) -> Result<Vec<f64>> {
    if rho.dim() != family.dim() {
        return Err(Error::DimMismatch {
            context: "outcome_probabilities",
            expected: family.dim(),
            got: rho.dim(),
        });
    }
    let mut probs = Vec::with_capacity(family.len());
    for (_, op) in family.operators() {
        let effect = matmul_unchecked(&linalg::adjoint(op), op);
        let p = linalg::trace(&matmul_unchecked(rho.matrix(), &effect)).re;
        probs.push(p);
    }
    finalize_probabilities(probs)
}

/// Outcome probabilities of a family on a pure state:
/// p_k = |M_k |psi>|^2 (the <psi| M†M |psi> form).
pub fn outcome_probabilities_ket(psi: &Ket, family: &MeasurementFamily) -> Result<Vec<f64>> {
    if psi.dim() != family.dim() {
        return Err(Error::DimMismatch {
            context: "outcome_probabilities_ket",
            expected: family.dim(),
            got: psi.dim(),
        });
    }
    let mut probs = Vec::with_capacity(family.len());
    for (_, op) in family.operators() {
        let image = linalg::apply(op, psi.amplitudes())?;
        probs.push(linalg::norm2(&image));
    }
    finalize_probabilities(probs)
}

fn finalize_probabilities(mut probs: Vec<f64>) -> Result<Vec<f64>> {
    for p in &mut probs {
        if *p < 0.0 {
            if *p < -DEFAULT_TOL {
                return Err(Error::OutOfRange {
                    name: "probability",
                    value: *p,
                    range: "[-1e-12, 1 + 1e-12]",
                });
            }
            *p = 0.0;
        }
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > PROB_SUM_TOL {
        return Err(Error::ConsistencyCheck {
            context: "outcome probabilities do not sum to 1",
            residual: (total - 1.0).abs(),
        });
    }
    Ok(probs)
}

/// Post-measurement state: M_k |psi>, renormalized. Errors
/// when the outcome carries (numerically) zero probability.
pub fn collapse(psi: &Ket, family: &MeasurementFamily, outcome: &str) -> Result<Ket> {
    let index = family
        .index_of(outcome)
        .ok_or_else(|| Error::UnknownLabel {
            label: outcome.to_string(),
        })?;
    collapse_by_index(psi, family, index)
}

/// [`collapse`] addressed by operator position instead of label.
pub fn collapse_by_index(psi: &Ket, family: &MeasurementFamily, index: usize) -> Result<Ket> {
    if psi.dim() != family.dim() {
        return Err(Error::DimMismatch {
            context: "collapse",
            expected: family.dim(),
            got: psi.dim(),
        });
    }
    let image = linalg::apply(family.op(index), psi.amplitudes())?;
    let probability = linalg::norm2(&image);
    if probability <= DEFAULT_TOL {
        return Err(Error::NullBranch {
            label: family.label(index).to_string(),
            probability,
        });
    }
    let inv = 1.0 / probability.sqrt();
    Ket::new(image.into_iter().map(|z| z * inv).collect())
}

/// Density-operator form of collapse: M_k rho adjoint(M_k) / Tr(rho M†M),
/// the (pi rho pi)/Tr(rho pi) update in the projective case.
pub fn collapse_density(
    rho: &DensityOperator,
    family: &MeasurementFamily,
    outcome: &str,
) -> Result<DensityOperator> {
    let index = family
        .index_of(outcome)
        .ok_or_else(|| Error::UnknownLabel {
            label: outcome.to_string(),
        })?;
    collapse_density_by_index(rho, family, index)
}

/// [`collapse_density`] addressed by operator position.
pub fn collapse_density_by_index(
    rho: &DensityOperator,
    family: &MeasurementFamily,
    index: usize,
) -> Result<DensityOperator> {
    if rho.dim() != family.dim() {
        return Err(Error::DimMismatch {
            context: "collapse_density",
            expected: family.dim(),
            got: rho.dim(),
        });
    }
    let op = family.op(index);
    let effect = matmul_unchecked(&linalg::adjoint(op), op);
    let probability = linalg::trace(&matmul_unchecked(rho.matrix(), &effect)).re;
    if probability <= DEFAULT_TOL {
        return Err(Error::NullBranch {
            label: family.label(index).to_string(),
            probability,
        });
    }
    let numerator = matmul_unchecked(&matmul_unchecked(op, rho.matrix()), &linalg::adjoint(op));
    DensityOperator::new(numerator.scale(Complex64::new(1.0 / probability, 0.0)))
}

/// Compose two measurements performed in sequence into the single equivalent
/// family: one operator `second_m * first_l` per label pair, labeled by the
/// concatenation `first_label + second_label`. The result is a general-kind
/// family and is re-validated.
pub fn compose_sequential(
    first: &MeasurementFamily,
    second: &MeasurementFamily,
) -> Result<MeasurementFamily> {
    if first.dim() != second.dim() {
        return Err(Error::DimMismatch {
            context: "compose_sequential",
            expected: first.dim(),
            got: second.dim(),
        });
    }
    let mut ops = Vec::with_capacity(first.len() * second.len());
    for (label_l, op_l) in first.operators() {
        for (label_m, op_m) in second.operators() {
            ops.push((format!("{label_l}{label_m}"), matmul_unchecked(op_m, op_l)));
        }
    }
    MeasurementFamily::new(FamilyKind::General, ops, DEFAULT_TOL)
}

/// Default cap for product families, matching the tensor-power cap.
pub const DEFAULT_PRODUCT_CAP: usize = 1 << crate::state::DEFAULT_TENSOR_CAP_QUBITS;

/// Tensor product of per-slot families: one operator per label tuple
/// (labels concatenated, first slot leading), with completeness preserved.
pub fn product_family(families: &[&MeasurementFamily]) -> Result<MeasurementFamily> {
    product_family_with_cap(families, DEFAULT_PRODUCT_CAP)
}

/// [`product_family`] with an explicit cap on the product dimension.
pub fn product_family_with_cap(
    families: &[&MeasurementFamily],
    cap: usize,
) -> Result<MeasurementFamily> {
    if families.is_empty() {
        return Err(Error::EmptyInput {
            context: "product_family",
        });
    }
    let mut dim: usize = 1;
    for f in families {
        dim = dim
            .checked_mul(f.dim())
            .filter(|&d| d <= cap)
            .ok_or(Error::TensorCapExceeded {
                dim: usize::MAX,
                cap,
                cap_qubits: cap.trailing_zeros(),
            })?;
    }
    if dim > cap {
        return Err(Error::TensorCapExceeded {
            dim,
            cap,
            cap_qubits: cap.trailing_zeros(),
        });
    }
    // Mixed-radix counting over outcome indices, first slot most significant,
    // so computational labels read as the binary index of the operator.
    let mut ops: Vec<(String, Matrix)> = vec![(String::new(), Matrix::identity(1))];
    for f in families {
        let mut next = Vec::with_capacity(ops.len() * f.len());
        for (label_acc, op_acc) in &ops {
            for (label, op) in f.operators() {
                next.push((format!("{label_acc}{label}"), linalg::tensor(op_acc, op)));
            }
        }
        ops = next;
    }
    let kind = if families.iter().all(|f| f.kind() == FamilyKind::Projective) {
        FamilyKind::Projective
    } else {
        FamilyKind::General
    };
    MeasurementFamily::new(kind, ops, DEFAULT_TOL)
}

/// Probability of observing the outcome string `x` from n independent
/// measurements of `family` on copies of `rho`: the product over symbols of
/// Tr(rho * adjoint(M_x) * M_x). Equals the tensor-space probability of the
/// outcome tuple under [`product_family`] on the matching tensor power.
pub fn string_probability(
    rho: &DensityOperator,
    family: &MeasurementFamily,
    x: &BitString,
) -> Result<f64> {
    if family.len() != 2 || family.dim() != 2 {
        return Err(Error::InvalidArgument(
            "string_probability requires a two-outcome qubit family".into(),
        ));
    }
    let per_outcome = outcome_probabilities(rho, family)?;
    Ok(x.iter().map(|b| per_outcome[b as usize]).product())
}

/// Pick an outcome index from a probability vector by inverse CDF.
pub(crate) fn sample_index(probs: &[f64], u: f64) -> usize {
    let mut acc = 0.0;
    for (k, &p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return k;
        }
    }
    probs.len() - 1
}

/// Draw `shots` i.i.d. outcomes (as operator indices) from the family's
/// distribution on `rho`, using inverse CDF over a stream seeded by `seed`.
/// Identical arguments produce identical output.
pub fn sample_outcomes(
    rho: &DensityOperator,
    family: &MeasurementFamily,
    shots: usize,
    seed: u64,
) -> Result<Vec<usize>> {
    if shots == 0 {
        return Err(Error::InvalidArgument("shots must be >= 1".into()));
    }
    let probs = outcome_probabilities(rho, family)?;
    let mut rng = SplitMix64::new(seed);
    Ok((0..shots)
        .map(|_| sample_index(&probs, rng.next_f64()))
        .collect())
}

/// [`sample_outcomes`] for two-outcome families, packaged as a bit string.
pub fn sample_bits(
    rho: &DensityOperator,
    family: &MeasurementFamily,
    shots: usize,
    seed: u64,
) -> Result<BitString> {
    if family.len() != 2 {
        return Err(Error::InvalidArgument(
            "sample_bits requires a two-outcome family".into(),
        ));
    }
    let outcomes = sample_outcomes(rho, family, shots, seed)?;
    BitString::new(outcomes.into_iter().map(|k| k as u8).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{bell_state, bernoulli_state, maximally_mixed, pure_density, tensor_power};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn computational_family_is_valid() {
        let f = MeasurementFamily::computational();
        assert!(validate_family(&f, 1e-12).is_valid());
        assert_eq!(f.labels().collect::<Vec<_>>(), vec!["0", "1"]);
    }

    #[test]
    fn double_identity_fails_completeness_by_one() {
        let ops = vec![
            ("0".to_string(), Matrix::identity(2)),
            ("1".to_string(), Matrix::identity(2)),
        ];
        let report = validate_ops(FamilyKind::General, &ops, 1e-12);
        assert!(!report.is_valid());
        assert_eq!(report.violations.len(), 1);
        assert!((report.violations[0].residual - 1.0).abs() < 1e-15);
        assert!(MeasurementFamily::new(FamilyKind::General, ops, 1e-12).is_err());
    }

    #[test]
    fn seeded_axis_projectors_validate() {
        // Direct 2x2 arithmetic: (I + n.sigma)/2 and (I - n.sigma)/2 form a
        // valid projective family for any unit axis.
        let mut rng = SplitMix64::new(5);
        for _ in 0..20 {
            let [nx, ny, nz] = rng.next_sphere_point();
            let plus = Matrix::from_entries(
                2,
                vec![
                    c((1.0 + nz) / 2.0, 0.0),
                    c(nx / 2.0, -ny / 2.0),
                    c(nx / 2.0, ny / 2.0),
                    c((1.0 - nz) / 2.0, 0.0),
                ],
            )
            .unwrap();
            let minus = Matrix::identity(2).sub(&plus).unwrap();
            let f = MeasurementFamily::new(
                FamilyKind::Projective,
                vec![("0".into(), plus), ("1".into(), minus)],
                1e-12,
            );
            assert!(f.is_ok());
        }
    }

    #[test]
    fn born_rule_on_mixed_state() {
        let probs =
            outcome_probabilities(&maximally_mixed(), &MeasurementFamily::computational()).unwrap();
        assert!((probs[0] - 0.5).abs() < 1e-15);
        assert!((probs[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn born_rule_on_pure_zero() {
        let rho = pure_density(&Ket::basis(2, 0)).unwrap();
        let probs = outcome_probabilities(&rho, &MeasurementFamily::computational()).unwrap();
        assert_eq!(probs, vec![1.0, 0.0]);
    }

    #[test]
    fn alice_measurement_on_bell_is_fair() {
        let rho = pure_density(&bell_state()).unwrap();
        let f = MeasurementFamily::alice_computational_on_pair();
        let probs = outcome_probabilities(&rho, &f).unwrap();
        assert!((probs[0] - 0.5).abs() < 1e-15);
        assert!((probs[1] - 0.5).abs() < 1e-15);
        // And in the <psi| M†M |psi> form.
        let probs_ket = outcome_probabilities_ket(&bell_state(), &f).unwrap();
        assert!((probs_ket[0] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn projective_and_general_formulas_agree() {
        let rho = bernoulli_state(0.3).unwrap();
        let f = MeasurementFamily::computational();
        let general = outcome_probabilities(&rho, &f).unwrap();
        // For projectors, Tr(rho pi) directly.
        for (k, (_, op)) in f.operators().iter().enumerate() {
            let direct = linalg::trace(&linalg::matmul(rho.matrix(), op).unwrap()).re;
            assert!((general[k] - direct).abs() < 1e-15);
        }
    }

    #[test]
    fn bell_collapse_to_matching_pair() {
        let psi = bell_state();
        let f = MeasurementFamily::alice_computational_on_pair();
        let zero = collapse(&psi, &f, "0").unwrap();
        assert!((zero.amplitudes()[0] - c(1.0, 0.0)).norm() < 1e-15);
        let one = collapse(&psi, &f, "1").unwrap();
        assert!((one.amplitudes()[3] - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn collapse_onto_null_branch_errors() {
        let psi = Ket::basis(2, 0);
        let f = MeasurementFamily::computational();
        let err = collapse(&psi, &f, "1").unwrap_err();
        assert!(matches!(err, Error::NullBranch { .. }));
        assert!(err.to_string().contains("null branch"));
        assert!(collapse(&psi, &f, "2").is_err());
    }

    #[test]
    fn density_collapse_matches_ket_collapse() {
        let psi = bell_state();
        let rho = pure_density(&psi).unwrap();
        let f = MeasurementFamily::alice_computational_on_pair();
        for label in ["0", "1"] {
            let ket = collapse(&psi, &f, label).unwrap();
            let from_ket = pure_density(&ket).unwrap();
            let from_density = collapse_density(&rho, &f, label).unwrap();
            assert!(linalg::approx_eq(from_ket.matrix(), from_density.matrix(), 1e-12).unwrap());
        }
    }

    #[test]
    fn compose_with_identity_relabels() {
        let comp = MeasurementFamily::computational();
        let trivial = MeasurementFamily::new(
            FamilyKind::General,
            vec![("i".into(), Matrix::identity(2))],
            1e-12,
        )
        .unwrap();
        let composed = compose_sequential(&comp, &trivial).unwrap();
        assert_eq!(composed.len(), 2);
        assert_eq!(composed.labels().collect::<Vec<_>>(), vec!["0i", "1i"]);
        for k in 0..2 {
            assert!(linalg::approx_eq(composed.op(k), comp.op(k), 1e-15).unwrap());
        }
    }

    #[test]
    fn composed_computational_off_diagonals_are_null() {
        let comp = MeasurementFamily::computational();
        let composed = compose_sequential(&comp, &comp).unwrap();
        // pi_0 pi_1 = 0: labels "01" and "10" have zero probability everywhere.
        for p in [0.0, 0.3, 0.5, 1.0] {
            let rho = bernoulli_state(p).unwrap();
            let probs = outcome_probabilities(&rho, &composed).unwrap();
            let i01 = composed.index_of("01").unwrap();
            let i10 = composed.index_of("10").unwrap();
            assert_eq!(probs[i01], 0.0);
            assert_eq!(probs[i10], 0.0);
        }
    }

    #[test]
    fn sequential_joint_law_matches_composed_family() {
        // Probability-weighted collapse then second measurement, against the
        // composed family, on seeded random projective pairs and states.
        let mut rng = SplitMix64::new(77);
        for _ in 0..100 {
            let first = random_axis_family(&mut rng);
            let second = random_axis_family(&mut rng);
            let rho = random_qubit_density(&mut rng);
            let composed = compose_sequential(&first, &second).unwrap();
            let composed_probs = outcome_probabilities(&rho, &composed).unwrap();

            let first_probs = outcome_probabilities(&rho, &first).unwrap();
            for (l, (label_l, _)) in first.operators().iter().enumerate() {
                for (label_m, _) in second.operators() {
                    let joint_label = format!("{label_l}{label_m}");
                    let idx = composed.index_of(&joint_label).unwrap();
                    let sequential = if first_probs[l] > 1e-12 {
                        let after = collapse_density_by_index(&rho, &first, l).unwrap();
                        let second_probs = outcome_probabilities(&after, &second).unwrap();
                        let m = second.index_of(label_m).unwrap();
                        first_probs[l] * second_probs[m]
                    } else {
                        0.0
                    };
                    assert!(
                        (sequential - composed_probs[idx]).abs() <= 1e-12,
                        "joint {joint_label}: sequential {sequential} vs composed {}",
                        composed_probs[idx]
                    );
                }
            }
        }
    }

    #[test]
    fn product_of_computational_families() {
        let comp = MeasurementFamily::computational();
        let prod = product_family(&[&comp, &comp]).unwrap();
        assert_eq!(prod.len(), 4);
        assert_eq!(
            prod.labels().collect::<Vec<_>>(),
            vec!["00", "01", "10", "11"]
        );
        // Tensor brute force: operator k is diag with a single 1 at index k.
        for k in 0..4 {
            let mut expected = Matrix::zeros(4);
            expected.set(k, k, Complex64::ONE);
            assert!(linalg::approx_eq(prod.op(k), &expected, 0.0).unwrap());
        }
    }

    #[test]
    fn product_of_valid_families_validates() {
        let comp = MeasurementFamily::computational();
        let prod = product_family(&[&comp, &comp, &comp]).unwrap();
        assert!(validate_family(&prod, 1e-12).is_valid());
    }

    #[test]
    fn mixed_per_pair_product_family_validates() {
        // Per pair: Alice's computational basis (leading factor) times a
        // random spin axis on Bob's side; the product across pairs stays a
        // complete projective family.
        let mut rng = SplitMix64::new(55);
        let alice = MeasurementFamily::computational();
        let pair_families: Vec<MeasurementFamily> = (0..3)
            .map(|_| {
                let bob = random_axis_family(&mut rng);
                product_family(&[&alice, &bob]).unwrap()
            })
            .collect();
        for pair in &pair_families {
            assert_eq!(pair.dim(), 4);
            assert_eq!(pair.len(), 4);
            assert!(validate_family(pair, 1e-12).is_valid());
        }
        let slots: Vec<&MeasurementFamily> = pair_families.iter().collect();
        let whole = product_family(&slots).unwrap();
        assert_eq!(whole.dim(), 64);
        assert_eq!(whole.len(), 64);
        assert!(validate_family(&whole, 1e-12).is_valid());
    }

    #[test]
    fn product_family_respects_cap() {
        let comp = MeasurementFamily::computational();
        let slots: Vec<&MeasurementFamily> = vec![&comp; 13];
        assert!(matches!(
            product_family(&slots),
            Err(Error::TensorCapExceeded { .. })
        ));
    }

    #[test]
    fn string_probability_uniform_for_mixed_state() {
        let rho = maximally_mixed();
        let f = MeasurementFamily::computational();
        for n in 1..=6 {
            for value in 0..(1usize << n) {
                let x = BitString::from_index(value, n);
                let p = string_probability(&rho, &f, &x).unwrap();
                assert!((p - 0.5f64.powi(n as i32)).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn string_probability_examples() {
        let f = MeasurementFamily::computational();
        let zero = bernoulli_state(1.0).unwrap();
        let x = BitString::new(vec![0, 0, 0]).unwrap();
        assert!((string_probability(&zero, &f, &x).unwrap() - 1.0).abs() < 1e-15);

        let rho = bernoulli_state(0.25).unwrap();
        let x01 = BitString::new(vec![0, 1]).unwrap();
        // Two-factor trace product: (1/4) * (3/4) = 3/16.
        assert!((string_probability(&rho, &f, &x01).unwrap() - 3.0 / 16.0).abs() < 1e-15);
    }

    #[test]
    fn string_probability_matches_tensor_space_law() {
        // Brute-force oracle: probability of the outcome tuple under the
        // product family on the tensor power.
        let f = MeasurementFamily::computational();
        for p in [0.5, 0.25, 0.8] {
            let rho = bernoulli_state(p).unwrap();
            for n in 1..=4u32 {
                let big = tensor_power(&rho, n).unwrap();
                let slots: Vec<&MeasurementFamily> = vec![&f; n as usize];
                let prod = product_family(&slots).unwrap();
                let probs = outcome_probabilities(&big, &prod).unwrap();
                for value in 0..(1usize << n) {
                    let x = BitString::from_index(value, n as usize);
                    let direct = string_probability(&rho, &f, &x).unwrap();
                    let idx = prod.index_of(&x.to_string()).unwrap();
                    assert!(
                        (direct - probs[idx]).abs() <= 1e-12,
                        "n={n} p={p} x={x}: {direct} vs {}",
                        probs[idx]
                    );
                }
            }
        }
    }

    #[test]
    fn sampling_is_deterministic_and_degenerate_on_pure_states() {
        let rho = pure_density(&Ket::basis(2, 0)).unwrap();
        let f = MeasurementFamily::computational();
        let bits = sample_bits(&rho, &f, 100, 123).unwrap();
        assert_eq!(bits.count_ones(), 0);
        assert_eq!(bits.len(), 100);

        let a = sample_bits(&maximally_mixed(), &f, 1000, 42).unwrap();
        let b = sample_bits(&maximally_mixed(), &f, 1000, 42).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn sampling_frequency_matches_born_rule() {
        // Binomial 4-sigma bound at 10^6 shots: 0.5 +/- 0.002.
        let bits = sample_bits(
            &maximally_mixed(),
            &MeasurementFamily::computational(),
            1_000_000,
            42,
        )
        .unwrap();
        let freq = bits.count_ones() as f64 / bits.len() as f64;
        assert!((freq - 0.5).abs() <= 0.002, "freq = {freq}");
    }

    #[test]
    fn sampling_passes_chi_square_against_exact_law() {
        // 10^5 shots per seeded case, goodness of fit against the exact
        // outcome distribution at significance 0.001.
        let mut rng = SplitMix64::new(4242);
        let cases: Vec<(DensityOperator, MeasurementFamily)> = vec![
            (maximally_mixed(), MeasurementFamily::computational()),
            (
                bernoulli_state(0.25).unwrap(),
                MeasurementFamily::computational(),
            ),
            (random_qubit_density(&mut rng), random_axis_family(&mut rng)),
            (random_qubit_density(&mut rng), random_axis_family(&mut rng)),
        ];
        for (i, (rho, family)) in cases.iter().enumerate() {
            let exact = outcome_probabilities(rho, family).unwrap();
            let outcomes = sample_outcomes(rho, family, 100_000, 7100 + i as u64).unwrap();
            let mut counts = vec![0u64; family.len()];
            for k in outcomes {
                counts[k] += 1;
            }
            let t = crate::metrics::chi_square_goodness_of_fit(&counts, &exact).unwrap();
            assert!(t.p_value > 0.001, "case {i}: p = {}", t.p_value);
        }
    }

    pub(crate) fn random_axis_family(rng: &mut SplitMix64) -> MeasurementFamily {
        let [nx, ny, nz] = rng.next_sphere_point();
        let plus = Matrix::from_entries(
            2,
            vec![
                c((1.0 + nz) / 2.0, 0.0),
                c(nx / 2.0, -ny / 2.0),
                c(nx / 2.0, ny / 2.0),
                c((1.0 - nz) / 2.0, 0.0),
            ],
        )
        .unwrap();
        let minus = Matrix::identity(2).sub(&plus).unwrap();
        MeasurementFamily::new(
            FamilyKind::Projective,
            vec![("0".into(), plus), ("1".into(), minus)],
            1e-12,
        )
        .unwrap()
    }

    pub(crate) fn random_qubit_density(rng: &mut SplitMix64) -> DensityOperator {
        // Mixture of two random pure states.
        let kets: Vec<Ket> = (0..2)
            .map(|_| {
                Ket::from_unnormalized(vec![
                    c(rng.next_gaussian(), rng.next_gaussian()),
                    c(rng.next_gaussian(), rng.next_gaussian()),
                ])
                .unwrap()
            })
            .collect();
        let w = rng.next_f64();
        let m0 = Matrix::outer(kets[0].amplitudes(), kets[0].amplitudes()).unwrap();
        let m1 = Matrix::outer(kets[1].amplitudes(), kets[1].amplitudes()).unwrap();
        let mixed = m0.scale(c(w, 0.0)).add(&m1.scale(c(1.0 - w, 0.0))).unwrap();
        DensityOperator::new(mixed).unwrap()
    }

    proptest::proptest! {
        #[test]
        fn probabilities_are_normalized_for_random_states(seed in 0u64..5000) {
            let mut rng = SplitMix64::new(seed);
            let rho = random_qubit_density(&mut rng);
            let f = random_axis_family(&mut rng);
            let probs = outcome_probabilities(&rho, &f).unwrap();
            let total: f64 = probs.iter().sum();
            proptest::prop_assert!((total - 1.0).abs() <= 1e-10);
            proptest::prop_assert!(probs.iter().all(|&p| p >= 0.0));
        }
    }
}
