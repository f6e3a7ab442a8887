//! Fock-space simulation of a post-selected linear-optics encoder that
//! copies a polarization qubit onto two photons, together with the
//! surrounding bench: weak coherent and down-conversion sources, lossy
//! threshold detectors, analyzer scans, and calibration against measured
//! observables.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod detection;
pub mod elements;
pub mod encoder;
pub mod error;
pub mod experiments;
pub mod fock;
pub mod format;
pub mod sources;

pub use error::{Error, Result};
