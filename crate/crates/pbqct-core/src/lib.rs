//! Numerics for the port-based quantum-correction teleportation (PBQCT) family
//! of protocols.
//!
//! A PBQCT protocol shares `N` maximally entangled qudit pairs ("ports") between
//! sender and receiver. The sender measures her input qudit jointly with her
//! halves of the ports using a square-root measurement built from a set of
//! generalized-Bell signal states; the receiver selects the port named by the
//! classical outcome and applies a Weyl-Heisenberg correction. The family
//! interpolates between port-based teleportation (one Bell label per port, no
//! correction) and parallel standard teleportation (the complete Bell set per
//! port, perfect fidelity).
//!
//! The crate provides two independent computation paths that are required to
//! agree:
//!
//! - a dense brute-force path ([`protocol`]): explicit signal sums, POVM
//!   construction, channel assembly, and entanglement fidelities from the
//!   trace formula;
//! - closed forms ([`closedform`]): analytic fidelities for PBT, PBQCT-2,
//!   PBQCT-3 (via Clebsch-Gordan sums) and the generalized PBQCT-2 family
//!   (via multinomial sums), usable far beyond brute-force capacity.
//!
//! [`analysis`] adds sweeps, fidelity-class detection over signal subsets, and
//! asymptotic-coefficient fits; the `pbqct` binary (separate crate) exposes all
//! of it on the command line with deterministic CSV/JSON output.

pub mod analysis;
pub mod closedform;
pub mod error;
pub mod haar;
pub mod linalg;
pub mod protocol;
pub mod weyl;

pub use error::{Error, Result};
pub use linalg::{DenseOperator, StateVector};
pub use protocol::{OutcomeSet, SetFamily};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
