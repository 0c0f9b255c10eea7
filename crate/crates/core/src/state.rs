//! Density operators and the specific states the experiments run on: qubit
//! Bernoulli states, the Bell pair, tensor powers, and partial traces.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, Ket, Matrix, DEFAULT_TOL};
use crate::rng::derive_stream;

/// Default cap on tensor-power size: 2^12 = 4096 amplitudes is the practical
/// dense ceiling for the brute-force paths.
pub const DEFAULT_TENSOR_CAP_QUBITS: u32 = 12;

/// Seed for the fixed positivity probe set. Changing it would change which
/// random vectors every density operator is checked against, so it is frozen.
const PROBE_SEED: u64 = 0x00DD_5EED_50FA_11CE;
const PROBE_COUNT: usize = 100;

/// Positive, unit-trace Hermitian operator on a 2^n-dimensional space.
///
/// Hermiticity and unit trace are checked exactly (within 1e-12) at
/// construction; positivity is checked statistically against a fixed set of
/// 100 seeded random probe vectors rather than by eigendecomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    mat: Matrix,
    subsystems: u32,
}

impl DensityOperator {
    /// Validate and wrap a matrix as a density operator. The dimension must
    /// be a power of two (the number of qubit subsystems is inferred).
    pub fn new(mat: Matrix) -> Result<Self> {
        let dim = mat.dim();
        if !dim.is_power_of_two() {
            return Err(Error::InvalidDensity {
                reason: format!("dimension {dim} is not a power of two"),
            });
        }
        let subsystems = dim.trailing_zeros();
        if !mat.is_hermitian(DEFAULT_TOL) {
            return Err(Error::InvalidDensity {
                reason: "matrix is not Hermitian within 1e-12".into(),
            });
        }
        let tr = linalg::trace(&mat);
        if (tr - Complex64::ONE).norm() > DEFAULT_TOL {
            return Err(Error::InvalidDensity {
                reason: format!("trace {} is not 1 within 1e-12", tr),
            });
        }
        for (k, probe) in probe_vectors(dim).enumerate() {
            let image = linalg::apply(&mat, &probe)?;
            let expectation = linalg::inner(&probe, &image)?;
            if expectation.re < -DEFAULT_TOL {
                return Err(Error::InvalidDensity {
                    reason: format!("negative expectation {:.3e} on probe {k}", expectation.re),
                });
            }
        }
        Ok(Self { mat, subsystems })
    }

    pub fn matrix(&self) -> &Matrix {
        &self.mat
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.mat.dim()
    }

    /// Number of qubit subsystems (dim = 2^subsystems).
    pub fn subsystems(&self) -> u32 {
        self.subsystems
    }
}

fn probe_vectors(dim: usize) -> impl Iterator<Item = Vec<Complex64>> {
    (0..PROBE_COUNT).map(move |k| {
        let mut rng = derive_stream(PROBE_SEED, &[dim as u64, k as u64]);
        (0..dim)
            .map(|_| Complex64::new(rng.next_gaussian(), rng.next_gaussian()))
            .collect()
    })
}

/// Rank-one density operator |psi><psi| of a pure state.
pub fn pure_density(psi: &Ket) -> Result<DensityOperator> {
    let mat = Matrix::outer(psi.amplitudes(), psi.amplitudes())?;
    DensityOperator::new(mat)
}

/// The maximally mixed qubit state I/2.
pub fn maximally_mixed() -> DensityOperator {
    DensityOperator::new(Matrix::identity(2).scale(Complex64::new(0.5, 0.0)))
        .expect("I/2 is a valid density operator")
}

/// Qubit state diag(p, 1-p): outcome 0 of a computational measurement has
/// probability exactly p.
pub fn bernoulli_state(p: f64) -> Result<DensityOperator> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::OutOfRange {
            name: "p",
            value: p,
            range: "[0, 1]",
        });
    }
    DensityOperator::new(Matrix::diag(&[
        Complex64::new(p, 0.0),
        Complex64::new(1.0 - p, 0.0),
    ]))
}

/// The shared two-qubit state (|00> + |11>)/sqrt(2). Basis order is
/// |00>, |01>, |10>, |11> with the first (Alice's) bit most significant.
pub fn bell_state() -> Ket {
    let a = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    Ket::new(vec![a, Complex64::ZERO, Complex64::ZERO, a]).expect("Bell amplitudes are normalized")
}

/// n-fold tensor power of a state, up to the default cap of 12 qubits.
pub fn tensor_power(rho: &DensityOperator, n: u32) -> Result<DensityOperator> {
    tensor_power_with_cap(rho, n, DEFAULT_TENSOR_CAP_QUBITS)
}

/// n-fold tensor power with an explicit cap on the total qubit count.
pub fn tensor_power_with_cap(
    rho: &DensityOperator,
    n: u32,
    cap_qubits: u32,
) -> Result<DensityOperator> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "tensor power requires n >= 1".into(),
        ));
    }
    let total_qubits = rho.subsystems() * n;
    if total_qubits > cap_qubits {
        return Err(Error::TensorCapExceeded {
            dim: 1usize << total_qubits.min(63),
            cap: 1usize << cap_qubits,
            cap_qubits,
        });
    }
    let mut mat = rho.mat.clone();
    for _ in 1..n {
        mat = linalg::tensor(&mat, &rho.mat);
    }
    DensityOperator::new(mat)
}

/// Which qubit of a two-qubit state to keep when tracing out the other.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    /// The first (leftmost) tensor factor.
    Alice,
    /// The second tensor factor.
    Bob,
}

/// Partial trace of a two-qubit state, keeping the selected qubit.
pub fn partial_trace(rho: &DensityOperator, keep: Subsystem) -> Result<DensityOperator> {
    if rho.dim() != 4 {
        return Err(Error::DimMismatch {
            context: "partial_trace",
            expected: 4,
            got: rho.dim(),
        });
    }
    let m = &rho.mat;
    let mut out = Matrix::zeros(2);
    match keep {
        Subsystem::Alice => {
            for i in 0..2 {
                for j in 0..2 {
                    let mut acc = Complex64::ZERO;
                    for k in 0..2 {
                        acc += m.get(2 * i + k, 2 * j + k);
                    }
                    out.set(i, j, acc);
                }
            }
        }
        Subsystem::Bob => {
            for k in 0..2 {
                for l in 0..2 {
                    let mut acc = Complex64::ZERO;
                    for i in 0..2 {
                        acc += m.get(2 * i + k, 2 * i + l);
                    }
                    out.set(k, l, acc);
                }
            }
        }
    }
    DensityOperator::new(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::approx_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn pure_density_of_basis_states() {
        let rho0 = pure_density(&Ket::basis(2, 0)).unwrap();
        assert!(approx_eq(
            rho0.matrix(),
            &Matrix::diag(&[c(1.0, 0.0), c(0.0, 0.0)]),
            0.0
        )
        .unwrap());
        let rho1 = pure_density(&Ket::basis(2, 1)).unwrap();
        assert!(approx_eq(
            rho1.matrix(),
            &Matrix::diag(&[c(0.0, 0.0), c(1.0, 0.0)]),
            0.0
        )
        .unwrap());
    }

    #[test]
    fn bell_density_has_quarter_corners() {
        // Outer-product brute force: 1/2 at (0,0), (0,3), (3,0), (3,3).
        let rho = pure_density(&bell_state()).unwrap();
        let m = rho.matrix();
        for i in 0..4 {
            for j in 0..4 {
                let expected = if (i == 0 || i == 3) && (j == 0 || j == 3) {
                    0.5
                } else {
                    0.0
                };
                assert!(
                    (m.get(i, j) - c(expected, 0.0)).norm() < 1e-15,
                    "entry ({i},{j})"
                );
            }
        }
    }

    #[test]
    #[allow(clippy::approx_constant)] // the frozen decimal is the point
    fn bell_amplitudes_match_closed_form() {
        let psi = bell_state();
        let amps = psi.amplitudes();
        assert!((amps[0].re - 0.7071067811865476).abs() < 1e-16);
        assert_eq!(amps[1], Complex64::ZERO);
        assert_eq!(amps[2], Complex64::ZERO);
        assert!((amps[3].re - 0.7071067811865476).abs() < 1e-16);
        assert!((linalg::norm2(amps) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn maximally_mixed_is_half_identity() {
        let rho = maximally_mixed();
        assert!(approx_eq(
            rho.matrix(),
            &Matrix::diag(&[c(0.5, 0.0), c(0.5, 0.0)]),
            0.0
        )
        .unwrap());
        assert!((linalg::trace(rho.matrix()) - Complex64::ONE).norm() < 1e-15);
    }

    #[test]
    fn bernoulli_state_boundaries() {
        let half = bernoulli_state(0.5).unwrap();
        assert!(approx_eq(half.matrix(), maximally_mixed().matrix(), 0.0).unwrap());
        let one = bernoulli_state(1.0).unwrap();
        assert!(approx_eq(
            one.matrix(),
            &Matrix::diag(&[c(1.0, 0.0), c(0.0, 0.0)]),
            0.0
        )
        .unwrap());
        assert!(bernoulli_state(-0.1).is_err());
        assert!(bernoulli_state(1.0 + 1e-9).is_err());
    }

    #[test]
    fn bernoulli_quarter_state_measures_as_quarter() {
        // Trace-formula oracle by hand: Tr(diag(1/4, 3/4) pi_0) = 1/4.
        let rho = bernoulli_state(0.25).unwrap();
        let probs = crate::measure::outcome_probabilities(
            &rho,
            &crate::measure::MeasurementFamily::computational(),
        )
        .unwrap();
        assert!((probs[0] - 0.25).abs() < 1e-15);
        assert!((probs[1] - 0.75).abs() < 1e-15);
    }

    #[test]
    fn tensor_power_of_mixed_state() {
        let rho = maximally_mixed();
        let rho2 = tensor_power(&rho, 2).unwrap();
        let expected = Matrix::identity(4).scale(c(0.25, 0.0));
        assert!(approx_eq(rho2.matrix(), &expected, 1e-15).unwrap());
    }

    #[test]
    fn tensor_power_of_bernoulli_factorizes() {
        let p = 0.3;
        let rho2 = tensor_power(&bernoulli_state(p).unwrap(), 2).unwrap();
        let q = 1.0 - p;
        let expected = Matrix::diag(&[c(p * p, 0.0), c(p * q, 0.0), c(q * p, 0.0), c(q * q, 0.0)]);
        assert!(approx_eq(rho2.matrix(), &expected, 1e-15).unwrap());
    }

    #[test]
    fn tensor_power_trace_is_one() {
        let rho = bernoulli_state(0.7).unwrap();
        for n in 1..=6 {
            let big = tensor_power(&rho, n).unwrap();
            assert!((linalg::trace(big.matrix()) - Complex64::ONE).norm() < 1e-12);
        }
    }

    #[test]
    fn tensor_power_holds_up_to_the_cap() {
        // The slow end of the sweep: constructing (and fully validating)
        // every power up to the 4096-dimensional cap.
        let rho = bernoulli_state(0.7).unwrap();
        for n in 7..=12 {
            let big = tensor_power(&rho, n).unwrap();
            assert_eq!(big.dim(), 1usize << n);
            assert!((linalg::trace(big.matrix()) - Complex64::ONE).norm() < 1e-12);
        }
    }

    #[test]
    fn tensor_power_cap_is_enforced_and_named() {
        let rho = maximally_mixed();
        let err = tensor_power(&rho, 13).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("4096"), "error should name the cap: {msg}");
        assert!(tensor_power_with_cap(&rho, 5, 4).is_err());
        assert!(tensor_power_with_cap(&rho, 4, 4).is_ok());
    }

    #[test]
    fn partial_trace_of_product_recovers_factor() {
        let a = bernoulli_state(0.2).unwrap();
        let b = bernoulli_state(0.9).unwrap();
        let joint = DensityOperator::new(linalg::tensor(a.matrix(), b.matrix())).unwrap();
        let got_a = partial_trace(&joint, Subsystem::Alice).unwrap();
        let got_b = partial_trace(&joint, Subsystem::Bob).unwrap();
        assert!(approx_eq(got_a.matrix(), a.matrix(), 1e-15).unwrap());
        assert!(approx_eq(got_b.matrix(), b.matrix(), 1e-15).unwrap());
    }

    #[test]
    fn bell_marginal_is_maximally_mixed() {
        // Explicit 4x4 sum oracle: rho_A(i,j) = sum_k rho(2i+k, 2j+k).
        let rho = pure_density(&bell_state()).unwrap();
        let alice = partial_trace(&rho, Subsystem::Alice).unwrap();
        assert!(approx_eq(alice.matrix(), maximally_mixed().matrix(), 1e-15).unwrap());
        let bob = partial_trace(&rho, Subsystem::Bob).unwrap();
        assert!(approx_eq(bob.matrix(), maximally_mixed().matrix(), 1e-15).unwrap());
        assert!((linalg::trace(alice.matrix()) - Complex64::ONE).norm() < 1e-15);
    }

    #[test]
    fn partial_trace_rejects_wrong_dim() {
        let rho = maximally_mixed();
        assert!(partial_trace(&rho, Subsystem::Alice).is_err());
    }

    #[test]
    fn density_validation_rejects_bad_matrices() {
        // Not Hermitian.
        let m = Matrix::from_entries(2, vec![c(0.5, 0.0), c(0.1, 0.0), c(0.3, 0.0), c(0.5, 0.0)])
            .unwrap();
        assert!(DensityOperator::new(m).is_err());
        // Wrong trace.
        assert!(DensityOperator::new(Matrix::identity(2)).is_err());
        // Negative direction (diag(2, -1) is Hermitian, unit trace, not positive).
        let neg = Matrix::diag(&[c(2.0, 0.0), c(-1.0, 0.0)]);
        assert!(DensityOperator::new(neg).is_err());
        // Non power-of-two dimension.
        let m3 = Matrix::diag(&[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        assert!(DensityOperator::new(m3).is_err());
    }

    #[test]
    fn unnormalized_ket_cannot_enter_pure_density() {
        // The Ket type enforces normalization, so the error surfaces there.
        assert!(Ket::new(vec![c(0.9, 0.0), c(0.0, 0.0)]).is_err());
    }
}
