//! Strong-coupling effective Hamiltonians for tight-binding lattice models,
//! derived by exact unitary conjugation on finite clusters.
//!
//! The crate is organized bottom-up:
//!
//! * [`scalar`]: the exact coefficient field (rational functions of the
//!   couplings, graded by hopping degree),
//! * [`lattice`] and [`fock`]: clusters, occupation-number sectors and sparse
//!   second-quantized operators,
//! * [`models`]: the one-band model (general spin-dependent amplitudes, the
//!   symmetric and Falicov-Kimball limits) and the three-band copper-oxide
//!   model, with their low-energy projector families,
//! * [`engine`]: block splitting, the inverse adjoint action, exponential
//!   conjugation and the order-by-order effective interaction terms,
//! * [`extract`]: expansion of band operators in spin-operator monomials plus
//!   golden coefficient tables,
//! * [`validate`]: floating-point cross-checks against dense exact
//!   diagonalization,
//! * [`phase`]: zero-temperature phase diagrams of the effective classical
//!   spin models and stability diagnostics.

pub mod engine;
pub mod extract;
pub mod fock;
pub mod lattice;
pub mod models;
pub mod par;
pub mod phase;
pub mod scalar;
pub mod validate;
