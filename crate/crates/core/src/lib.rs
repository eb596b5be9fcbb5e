//! Bipartite quantum systems driven by repeated interactions with an ancilla
//! chain.
//!
//! Each ancilla copy couples first to party `A` for a time `h`, then to party
//! `B` for a time `h`, then leaves. The crate provides:
//!
//! * the exact discrete dynamics ([`discrete`]): step unitary, Kraus blocks,
//!   reduced channel with ground or Gibbs ancillas, trajectories;
//! * the continuous-time limit ([`lindblad`]): vacuum and thermal Lindblad
//!   generators, the environment-created interaction Hamiltonian between the
//!   two parties, exact semigroup evolution and spectra;
//! * two-qubit entanglement metrics ([`entanglement`]);
//! * return-to-equilibrium diagnostics ([`equilibrium`]).
//!
//! All linear algebra is dense and double precision; see [`numkernel`].

pub mod discrete;
pub mod entanglement;
pub mod equilibrium;
mod error;
pub mod lindblad;
pub mod model;
pub mod numkernel;
pub mod random;
pub mod superop;

pub use discrete::{InteractionOrder, KrausBlocks, LimitCoefficients};
pub use entanglement::XState;
pub use equilibrium::{CommutantReport, DecayTable, EquilibriumReport};
pub use error::{Error, Result};
pub use lindblad::{EffectiveHamiltonian, Spectrum};
pub use model::{AncillaState, BipartiteModel};
pub use numkernel::{ComplexMatrix, ComplexVector, DensityMatrix, C64};
pub use superop::Superoperator;
