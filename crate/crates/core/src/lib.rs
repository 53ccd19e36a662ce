//! Entanglement spectra of the Su-Schrieffer-Heeger-Hubbard ring.
//!
//! Two independent engines compute the spectrum of the half-filled ground
//! state cut to its first `L_A` sites:
//!
//! - [`freefermion`]: exact at `U = 0`, from the single-particle correlation
//!   matrix, and cheap enough for hundreds of sites.
//! - [`ed`]: exact diagonalization in the fixed `(N↑, N↓)` sector with a
//!   matrix-free Hamiltonian and a Lanczos ground-state search, valid for any
//!   `U` at small `L`.
//!
//! [`analysis`] groups the leading levels into degenerate multiplets and
//! classifies the phase from their multiplicity and particle-number labels,
//! and [`scan`] sweeps a `(δt, U)` grid into a phase diagram.

pub mod analysis;
pub mod bestfirst;
pub mod ed;
pub mod error;
pub mod freefermion;
pub mod lanczos;
pub mod linalg;
pub mod model;
pub mod scan;
pub mod spectrum;
pub mod validation;
pub mod vecops;

pub use error::{Error, Result};
pub use model::{BoundaryCondition, CutSpec, ModelParams};
pub use spectrum::{EntanglementSpectrum, EsLevel};
