//! Dense complex matrices and normalized state vectors.
//!
//! Everything here is sized for exhaustive verification rather than scale:
//! operators live on 2^n-dimensional spaces with n small enough that full
//! dense arithmetic (and brute-force enumeration over it) stays cheap.
//! Storage is row-major, and all comparisons take an explicit absolute
//! tolerance.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default absolute tolerance for all approximate comparisons.
pub const DEFAULT_TOL: f64 = 1e-12;

/// Tolerance allowed on probability-vector sums (looser: sums accumulate
/// rounding from many terms).
pub const PROB_SUM_TOL: f64 = 1e-10;

/// Dense square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    dim: usize,
    entries: Vec<Complex64>,
}

impl Matrix {
    /// Build from row-major entries; `entries.len()` must equal `dim * dim`
    /// and every component must be finite.
    pub fn from_entries(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument(
                "matrix dimension must be positive".into(),
            ));
        }
        if entries.len() != dim * dim {
            return Err(Error::DimMismatch {
                context: "Matrix::from_entries",
                expected: dim * dim,
                got: entries.len(),
            });
        }
        if !entries.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::NonFinite {
                context: "Matrix::from_entries",
            });
        }
        Ok(Self { dim, entries })
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            entries: vec![Complex64::ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.entries[i * dim + i] = Complex64::ONE;
        }
        m
    }

    pub fn diag(values: &[Complex64]) -> Self {
        let dim = values.len();
        let mut m = Self::zeros(dim);
        for (i, &v) in values.iter().enumerate() {
            m.entries[i * dim + i] = v;
        }
        m
    }

    /// Outer product |u><v| (square: both vectors must share a length).
    pub fn outer(u: &[Complex64], v: &[Complex64]) -> Result<Self> {
        if u.len() != v.len() {
            return Err(Error::DimMismatch {
                context: "Matrix::outer",
                expected: u.len(),
                got: v.len(),
            });
        }
        let dim = u.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for &ui in u {
            for &vj in v {
                entries.push(ui * vj.conj());
            }
        }
        Ok(Self { dim, entries })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: Complex64) {
        self.entries[row * self.dim + col] = value;
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn scale(&self, s: Complex64) -> Matrix {
        Matrix {
            dim: self.dim,
            entries: self.entries.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix> {
        self.check_same_dim(other, "Matrix::add")?;
        Ok(Matrix {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(&a, &b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &Matrix) -> Result<Matrix> {
        self.check_same_dim(other, "Matrix::sub")?;
        Ok(Matrix {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(&a, &b)| a - b)
                .collect(),
        })
    }

    /// Largest entrywise absolute difference.
    pub fn max_abs_diff(&self, other: &Matrix) -> Result<f64> {
        self.check_same_dim(other, "Matrix::max_abs_diff")?;
        Ok(self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(&a, &b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// Largest entrywise modulus.
    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        for i in 0..self.dim {
            for j in i..self.dim {
                if (self.get(i, j) - self.get(j, i).conj()).norm() > tol {
                    return false;
                }
            }
        }
        true
    }

    fn check_same_dim(&self, other: &Matrix, context: &'static str) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimMismatch {
                context,
                expected: self.dim,
                got: other.dim,
            });
        }
        Ok(())
    }
}

/// Kronecker product. Entry (i*b.dim + k, j*b.dim + l) = a(i,j) * b(k,l);
/// the left factor is the leading (most significant) subsystem.
pub fn tensor(a: &Matrix, b: &Matrix) -> Matrix {
    let (da, db) = (a.dim, b.dim);
    let dim = da * db;
    let mut entries = vec![Complex64::ZERO; dim * dim];
    for i in 0..da {
        for j in 0..da {
            let aij = a.get(i, j);
            if aij == Complex64::ZERO {
                continue;
            }
            for k in 0..db {
                let row = i * db + k;
                for l in 0..db {
                    entries[row * dim + (j * db + l)] = aij * b.get(k, l);
                }
            }
        }
    }
    Matrix { dim, entries }
}

/// Kronecker product of two vectors (kets), left factor leading.
pub fn tensor_vec(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for &ai in a {
        for &bj in b {
            out.push(ai * bj);
        }
    }
    out
}

/// Conjugate transpose.
pub fn adjoint(a: &Matrix) -> Matrix {
    let dim = a.dim;
    let mut entries = vec![Complex64::ZERO; dim * dim];
    for i in 0..dim {
        for j in 0..dim {
            entries[j * dim + i] = a.get(i, j).conj();
        }
    }
    Matrix { dim, entries }
}

/// Matrix product `a * b`.
pub fn matmul(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    if a.dim != b.dim {
        return Err(Error::DimMismatch {
            context: "matmul",
            expected: a.dim,
            got: b.dim,
        });
    }
    let dim = a.dim;
    let mut entries = vec![Complex64::ZERO; dim * dim];
    for i in 0..dim {
        for k in 0..dim {
            let aik = a.get(i, k);
            if aik == Complex64::ZERO {
                continue;
            }
            for j in 0..dim {
                entries[i * dim + j] += aik * b.get(k, j);
            }
        }
    }
    Ok(Matrix { dim, entries })
}

/// Sum of diagonal entries.
pub fn trace(a: &Matrix) -> Complex64 {
    (0..a.dim).map(|i| a.get(i, i)).sum()
}

/// Matrix-vector product on a raw (possibly unnormalized) amplitude vector.
pub fn apply(a: &Matrix, v: &[Complex64]) -> Result<Vec<Complex64>> {
    if v.len() != a.dim {
        return Err(Error::DimMismatch {
            context: "apply",
            expected: a.dim,
            got: v.len(),
        });
    }
    let mut out = Vec::with_capacity(a.dim);
    for row in a.entries.chunks_exact(a.dim) {
        let mut acc = Complex64::ZERO;
        for (aij, vj) in row.iter().zip(v) {
            acc += aij * vj;
        }
        out.push(acc);
    }
    Ok(out)
}

/// Inner product <u|v>, conjugate-linear in the first argument.
pub fn inner(u: &[Complex64], v: &[Complex64]) -> Result<Complex64> {
    if u.len() != v.len() {
        return Err(Error::DimMismatch {
            context: "inner",
            expected: u.len(),
            got: v.len(),
        });
    }
    Ok(u.iter().zip(v).map(|(a, b)| a.conj() * b).sum())
}

/// Squared Euclidean norm: sum of |amplitude|^2.
pub fn norm2(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

/// True iff the max entrywise absolute difference is within `tol`.
pub fn approx_eq(a: &Matrix, b: &Matrix, tol: f64) -> Result<bool> {
    Ok(a.max_abs_diff(b)? <= tol)
}

/// Normalized complex state vector. The unit-norm invariant is enforced at
/// construction, within [`DEFAULT_TOL`] on the Euclidean norm.
#[derive(Debug, Clone, PartialEq)]
pub struct Ket {
    amplitudes: Vec<Complex64>,
}

impl Ket {
    /// Wrap amplitudes that are already normalized.
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::EmptyInput {
                context: "Ket::new",
            });
        }
        if !amplitudes
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
        {
            return Err(Error::NonFinite {
                context: "Ket::new",
            });
        }
        let deviation = (norm2(&amplitudes).sqrt() - 1.0).abs();
        if deviation > DEFAULT_TOL {
            return Err(Error::NotNormalized { deviation });
        }
        Ok(Self { amplitudes })
    }

    /// Normalize an arbitrary nonzero vector.
    pub fn from_unnormalized(amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::EmptyInput {
                context: "Ket::from_unnormalized",
            });
        }
        let norm = norm2(&amplitudes).sqrt();
        if !norm.is_finite() || norm < 1e-150 {
            return Err(Error::InvalidArgument(
                "cannot normalize a (numerically) zero vector".into(),
            ));
        }
        let inv = 1.0 / norm;
        Ok(Self {
            amplitudes: amplitudes.into_iter().map(|z| z * inv).collect(),
        })
    }

    /// Computational basis vector |index> in the given dimension.
    pub fn basis(dim: usize, index: usize) -> Self {
        assert!(
            index < dim,
            "basis index {index} out of range for dim {dim}"
        );
        let mut amplitudes = vec![Complex64::ZERO; dim];
        amplitudes[index] = Complex64::ONE;
        Self { amplitudes }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// Tensor product of two kets (left factor leading).
    pub fn tensor(&self, other: &Ket) -> Ket {
        Ket {
            amplitudes: tensor_vec(&self.amplitudes, &other.amplitudes),
        }
    }
}
