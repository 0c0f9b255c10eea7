//! Quantum-measurement simulation and statistical verification that
//! measurements on one half of an entangled pair cannot signal.
//!
//! The library has two layers. The analytic layer builds projective and
//! general (Kraus) measurement families over small dense complex matrices,
//! applies the Born rule and post-measurement collapse, and checks — exactly,
//! not statistically — that Alice's outcome distribution on a Bell pair is
//! Bernoulli(1/2) no matter what Bob measures on his half, including
//! sequences of measurements fused by sequential composition.
//!
//! The experimental layer simulates the "compressibility channel": Bob tries
//! to send bits by scrambling (or not scrambling) his measurement directions
//! over N-pair blocks, and Alice decodes each of her N-bit blocks by whether
//! a dictionary compressor finds structure in it. Monte-Carlo runs plus
//! compression, entropy, Borel-normality, chi-square and KS statistics
//! measure the channel's capacity, which is zero: Alice's blocks are
//! i.i.d. uniform regardless of Bob's choices.
//!
//! Every random quantity in the crate derives from explicit seeds, so runs
//! are reproducible bit for bit.

pub mod bits;
pub mod channel;
pub mod error;
pub mod linalg;
pub mod measure;
pub mod metrics;
pub mod nosignaling;
pub mod rng;
pub mod state;

pub use bits::BitString;
pub use error::{Error, Result};
pub use linalg::{Ket, Matrix, DEFAULT_TOL};
pub use measure::{FamilyKind, MeasurementFamily};
pub use state::DensityOperator;
