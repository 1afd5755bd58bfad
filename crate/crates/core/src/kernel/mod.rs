//! Dense linear algebra, activations and seeded randomness.

pub mod activation;
pub mod matrix;
pub mod rng;

pub use activation::{apply_activation, sigmoid, sigmoid_prime_from_output, ActivationKind};
pub use matrix::{matmul, uniform_init, DenseMatrix};
pub use rng::{derive_seed, SeededRng};
