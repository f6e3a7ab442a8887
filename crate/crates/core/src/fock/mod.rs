//! Multi-mode bosonic Fock space.
//!
//! A mode is a triple (spatial channel, polarization, internal label). The
//! internal label indexes an orthonormal basis of temporal/spectral wave
//! packets and is how partial distinguishability enters: two photons with
//! the same channel and polarization but different internal labels do not
//! interfere.
//!
//! States are sparse maps from canonical kets to amplitudes, iterated in the
//! total order on kets.
//! Unitaries act on creation operators with the column convention
//! `a†_i -> Σ_j U[j, i] a†_j`.

mod permanent;
mod state;
mod unitary;

use std::collections::BTreeSet;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use permanent::{amplitude_by_permanent, permanent};
pub use state::{apply_unitary, inner_product, tensor, CreationOp, PureState};
pub use unitary::{unitarity_deviation, ModeUnitary};

pub type C64 = Complex64;

pub const DEFAULT_MAX_PHOTONS: usize = 4;
pub const DEFAULT_MAX_MODES: usize = 24;
pub const DEFAULT_PRUNE_THRESHOLD: f64 = 1e-14;
pub const DEFAULT_NORM_TOLERANCE: f64 = 1e-10;

/// Polarization. `H` carries logical |0⟩, `V` carries logical |1⟩.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pol {
    H,
    V,
}

impl Pol {
    pub const BOTH: [Pol; 2] = [Pol::H, Pol::V];

    pub fn flipped(self) -> Pol {
        match self {
            Pol::H => Pol::V,
            Pol::V => Pol::H,
        }
    }
}

impl fmt::Display for Pol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Pol::H => f.write_str("H"),
            Pol::V => f.write_str("V"),
        }
    }
}

/// Spatial channel index. Names live in the circuit's channel registry.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Channel(pub u16);

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ModeId {
    pub spatial: Channel,
    pub pol: Pol,
    pub internal: u8,
}

impl ModeId {
    pub const fn new(spatial: Channel, pol: Pol, internal: u8) -> Self {
        ModeId {
            spatial,
            pol,
            internal,
        }
    }

    /// Every mode of `channel` for an internal basis of size `internal_dim`,
    /// in canonical order.
    pub fn all_in(channel: Channel, internal_dim: usize) -> Vec<ModeId> {
        let mut modes = Vec::with_capacity(2 * internal_dim);
        for pol in Pol::BOTH {
            for l in 0..internal_dim {
                modes.push(ModeId::new(channel, pol, l as u8));
            }
        }
        modes
    }
}

impl fmt::Display for ModeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.spatial, self.pol, self.internal)
    }
}

/// Limits and tolerances carried by every state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FockConfig {
    /// Photon-number truncation per ket.
    pub max_photons: usize,
    /// Largest mode count a single unitary may span.
    pub max_modes: usize,
    /// Amplitudes with modulus below this are dropped after each operation.
    pub prune_threshold: f64,
    pub norm_tolerance: f64,
}

impl Default for FockConfig {
    fn default() -> Self {
        FockConfig {
            max_photons: DEFAULT_MAX_PHOTONS,
            max_modes: DEFAULT_MAX_MODES,
            prune_threshold: DEFAULT_PRUNE_THRESHOLD,
            norm_tolerance: DEFAULT_NORM_TOLERANCE,
        }
    }
}

impl FockConfig {
    pub fn with_max_photons(mut self, n: usize) -> Self {
        self.max_photons = n;
        self
    }
}

/// Occupation-number basis vector in canonical form: entries sorted by mode,
/// no zero counts. Equality of kets is equality of these lists.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FockKet {
    occ: Vec<(ModeId, u8)>,
}

impl FockKet {
    pub fn vacuum() -> Self {
        FockKet { occ: Vec::new() }
    }

    pub fn single(mode: ModeId) -> Self {
        FockKet {
            occ: vec![(mode, 1)],
        }
    }

    /// Builds a canonical ket; repeated modes are summed and zero counts dropped.
    pub fn from_occupations<I: IntoIterator<Item = (ModeId, u8)>>(iter: I) -> Self {
        let mut occ: Vec<(ModeId, u8)> = iter.into_iter().filter(|&(_, n)| n > 0).collect();
        occ.sort_by_key(|&(m, _)| m);
        let mut merged: Vec<(ModeId, u8)> = Vec::with_capacity(occ.len());
        for (m, n) in occ {
            match merged.last_mut() {
                Some((last, count)) if *last == m => *count += n,
                _ => merged.push((m, n)),
            }
        }
        FockKet { occ: merged }
    }

    pub fn occupations(&self) -> &[(ModeId, u8)] {
        &self.occ
    }

    pub fn is_vacuum(&self) -> bool {
        self.occ.is_empty()
    }

    pub fn count(&self, mode: ModeId) -> u8 {
        match self.occ.binary_search_by_key(&mode, |&(m, _)| m) {
            Ok(i) => self.occ[i].1,
            Err(_) => 0,
        }
    }

    pub fn total_photons(&self) -> usize {
        self.occ.iter().map(|&(_, n)| n as usize).sum()
    }

    pub fn photons_in(&self, channel: Channel) -> usize {
        self.photons_where(|m| m.spatial == channel)
    }

    pub fn photons_where(&self, pred: impl Fn(&ModeId) -> bool) -> usize {
        self.occ
            .iter()
            .filter(|(m, _)| pred(m))
            .map(|&(_, n)| n as usize)
            .sum()
    }

    pub fn channels(&self) -> BTreeSet<Channel> {
        self.occ.iter().map(|(m, _)| m.spatial).collect()
    }

    /// Splits into (modes matching `pred`, the rest). Both halves stay canonical.
    pub fn split(&self, pred: impl Fn(&ModeId) -> bool) -> (FockKet, FockKet) {
        let (a, b): (Vec<_>, Vec<_>) = self.occ.iter().partition(|(m, _)| pred(m));
        (FockKet { occ: a }, FockKet { occ: b })
    }

    /// Union of two kets on disjoint modes (counts add if they overlap).
    pub fn merge(&self, other: &FockKet) -> FockKet {
        FockKet::from_occupations(self.occ.iter().chain(other.occ.iter()).copied())
    }

    /// Π n_i! over occupied modes.
    pub(crate) fn factorial_product(&self) -> f64 {
        self.occ
            .iter()
            .map(|&(_, n)| factorial(n as usize))
            .product()
    }
}

impl fmt::Display for FockKet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (m, n)) in self.occ.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{}@{}", n, m)?;
        }
        Ok(())
    }
}

pub(crate) fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}
