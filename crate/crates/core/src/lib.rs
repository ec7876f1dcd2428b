//! Generalized three-state Potts model on a two-dimensional torus.
//!
//! The crate provides the model core (lattice, couplings, energy in both the
//! raw-J and gamma forms), exhaustive energy-landscape analysis on small state
//! spaces (communication heights, stability levels, saddles, initial cycles),
//! the gate geometry of the metastable transitions together with explicit
//! reference paths, single-spin-flip Metropolis dynamics with reproducible
//! RNG streams, and exact spectral computations (Gibbs measure, transition
//! kernel, spectral gap, total-variation mixing time) for fully enumerable
//! lattices.

pub mod configuration;
pub mod coupling;
pub mod dynamics;
pub mod error;
pub mod gates;
pub mod landscape;
pub mod lattice;
pub mod spectral;

pub use configuration::{edge_census, energy, energy_delta, energy_gamma_form, Configuration, EdgeCensus};
pub use coupling::{
    check_assumptions, derive_constants, f_h, AssumptionReport, CouplingParams, DerivedConstants,
};
pub use error::{PottsError, Result};
pub use lattice::TorusLattice;
