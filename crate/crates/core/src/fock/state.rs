use std::collections::{BTreeMap, BTreeSet};

use num_complex::Complex64;

use super::unitary::ModeUnitary;
use super::{factorial, Channel, FockConfig, FockKet, ModeId, C64};
use crate::error::{Error, Result};
use crate::format::fmt_num;

/// A linear combination of single-mode creation operators, `Σ c_m a†_m`.
pub type CreationOp = Vec<(ModeId, C64)>;

/// Superposition of Fock kets with complex amplitudes.
#[derive(Clone, Debug)]
pub struct PureState {
    terms: BTreeMap<FockKet, C64>,
    config: FockConfig,
}

impl PartialEq for PureState {
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms
    }
}

impl PureState {
    pub fn vacuum() -> Self {
        Self::vacuum_with(FockConfig::default())
    }

    pub fn vacuum_with(config: FockConfig) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(FockKet::vacuum(), Complex64::new(1.0, 0.0));
        PureState { terms, config }
    }

    /// The zero vector.
    pub fn zero(config: FockConfig) -> Self {
        PureState {
            terms: BTreeMap::new(),
            config,
        }
    }

    pub fn from_ket(ket: FockKet) -> Result<Self> {
        Self::from_terms(FockConfig::default(), [(ket, Complex64::new(1.0, 0.0))])
    }

    pub fn from_terms<I>(config: FockConfig, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (FockKet, C64)>,
    {
        let mut state = PureState::zero(config);
        for (ket, amp) in terms {
            check_truncation(&ket, &config)?;
            *state.terms.entry(ket).or_default() += amp;
        }
        state.prune();
        Ok(state)
    }

    /// `Π_k op_k |0⟩`, expanded in the Fock basis with bosonic √(n!) factors.
    /// The result is not normalized unless the operators are orthonormal.
    pub fn from_creation_product(config: FockConfig, ops: &[CreationOp]) -> Result<Self> {
        if ops.len() > config.max_photons {
            return Err(Error::TruncationExceeded {
                photons: ops.len(),
                max: config.max_photons,
            });
        }
        let modes: Vec<ModeId> = ops
            .iter()
            .flat_map(|op| op.iter().map(|&(m, _)| m))
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let index = |mode: &ModeId| modes.binary_search(mode).expect("mode collected above");
        let columns: Vec<Vec<(usize, C64)>> = ops
            .iter()
            .map(|op| op.iter().map(|(m, c)| (index(m), *c)).collect())
            .collect();
        let column_refs: Vec<&[(usize, C64)]> = columns.iter().map(|c| c.as_slice()).collect();
        let expanded = expand_monomials(&column_refs, modes.len());
        let mut state = PureState::zero(config);
        for (counts, coeff) in expanded {
            let (ket, factor) = ket_from_counts(&modes, &counts);
            *state.terms.entry(ket).or_default() += coeff * factor.sqrt();
        }
        state.prune();
        Ok(state)
    }

    pub fn config(&self) -> &FockConfig {
        &self.config
    }

    pub fn with_config(mut self, config: FockConfig) -> Self {
        self.config = config;
        self
    }

    pub fn terms(&self) -> impl Iterator<Item = (&FockKet, &C64)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn amplitude(&self, ket: &FockKet) -> C64 {
        self.terms.get(ket).copied().unwrap_or_default()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.terms.values().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Rescales to unit norm and returns the previous norm. The zero vector
    /// is left untouched.
    pub fn normalize(&mut self) -> f64 {
        let n = self.norm();
        if n > 0.0 {
            for a in self.terms.values_mut() {
                *a /= n;
            }
        }
        n
    }

    pub fn normalized(mut self) -> Self {
        self.normalize();
        self
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() < self.config.norm_tolerance
    }

    pub fn scaled(mut self, c: C64) -> Self {
        for a in self.terms.values_mut() {
            *a *= c;
        }
        self
    }

    pub fn add_term(&mut self, ket: FockKet, amp: C64) -> Result<()> {
        check_truncation(&ket, &self.config)?;
        *self.terms.entry(ket).or_default() += amp;
        Ok(())
    }

    /// `self + other`, without renormalizing.
    pub fn plus(&self, other: &PureState) -> PureState {
        let mut out = self.clone();
        for (k, a) in &other.terms {
            *out.terms.entry(k.clone()).or_default() += *a;
        }
        out.prune();
        out
    }

    /// Drops amplitudes below the prune threshold.
    pub fn prune(&mut self) {
        let threshold = self.config.prune_threshold;
        self.terms.retain(|_, a| a.norm() >= threshold);
    }

    /// Projection onto the kets satisfying `pred` (unnormalized).
    pub fn filter(&self, pred: impl Fn(&FockKet) -> bool) -> PureState {
        PureState {
            terms: self
                .terms
                .iter()
                .filter(|(k, _)| pred(k))
                .map(|(k, a)| (k.clone(), *a))
                .collect(),
            config: self.config,
        }
    }

    /// Relabels every ket; amplitudes of kets that collide are summed.
    pub fn map_kets(&self, f: impl Fn(&FockKet) -> FockKet) -> PureState {
        let mut terms: BTreeMap<FockKet, C64> = BTreeMap::new();
        for (k, a) in &self.terms {
            *terms.entry(f(k)).or_default() += *a;
        }
        let mut out = PureState {
            terms,
            config: self.config,
        };
        out.prune();
        out
    }

    pub fn channels(&self) -> BTreeSet<Channel> {
        self.terms.keys().flat_map(|k| k.channels()).collect()
    }

    /// Largest internal label present, plus one (0 for the vacuum).
    pub fn internal_extent(&self) -> usize {
        self.terms
            .keys()
            .flat_map(|k| k.occupations().iter().map(|(m, _)| m.internal as usize + 1))
            .max()
            .unwrap_or(0)
    }

    pub fn tensor(&self, other: &PureState) -> Result<PureState> {
        tensor(self, other)
    }

    pub fn apply_unitary(&self, u: &ModeUnitary) -> Result<PureState> {
        apply_unitary(self, u)
    }

    pub fn inner_product(&self, other: &PureState) -> C64 {
        inner_product(self, other)
    }

    /// |⟨a|b⟩|² / (‖a‖² ‖b‖²).
    pub fn fidelity(&self, other: &PureState) -> f64 {
        let denom = self.norm_sqr() * other.norm_sqr();
        if denom == 0.0 {
            return 0.0;
        }
        inner_product(self, other).norm_sqr() / denom
    }

    /// Deterministic text form, one line per ket in ket order:
    /// `<count>@<spatial>:<pol>:<internal> ... <re> <im>`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (k, a) in &self.terms {
            if !k.is_vacuum() {
                out.push_str(&k.to_string());
                out.push(' ');
            }
            out.push_str(&fmt_num(a.re));
            out.push(' ');
            out.push_str(&fmt_num(a.im));
            out.push('\n');
        }
        out
    }
}

fn check_truncation(ket: &FockKet, config: &FockConfig) -> Result<()> {
    let photons = ket.total_photons();
    if photons > config.max_photons {
        return Err(Error::TruncationExceeded {
            photons,
            max: config.max_photons,
        });
    }
    Ok(())
}

/// Product state of two factors on disjoint spatial channels.
pub fn tensor(a: &PureState, b: &PureState) -> Result<PureState> {
    let a_channels = a.channels();
    if let Some(ch) = b.channels().intersection(&a_channels).next() {
        return Err(Error::OverlappingChannels(*ch));
    }
    let config = a.config;
    let mut out = PureState::zero(config);
    for (ka, xa) in &a.terms {
        for (kb, xb) in &b.terms {
            let ket = ka.merge(kb);
            check_truncation(&ket, &config)?;
            *out.terms.entry(ket).or_default() += xa * xb;
        }
    }
    out.prune();
    Ok(out)
}

/// ⟨a|b⟩, conjugating `a`.
pub fn inner_product(a: &PureState, b: &PureState) -> C64 {
    // iterate the smaller map
    if a.terms.len() <= b.terms.len() {
        a.terms
            .iter()
            .filter_map(|(k, x)| b.terms.get(k).map(|y| x.conj() * y))
            .sum()
    } else {
        b.terms
            .iter()
            .filter_map(|(k, y)| a.terms.get(k).map(|x| x.conj() * y))
            .sum()
    }
}

/// Applies `u` by rewriting each creation operator on `u.modes()` as
/// `Σ_j U[j, i] a†_j` and expanding the products. Modes outside `u` are
/// carried through untouched.
pub fn apply_unitary(state: &PureState, u: &ModeUnitary) -> Result<PureState> {
    if u.len() > state.config.max_modes {
        return Err(Error::TooManyModes {
            modes: u.len(),
            max: state.config.max_modes,
        });
    }
    let modes = u.modes();
    let columns = u.sparse_columns();
    let mut out = PureState::zero(state.config);
    for (ket, amp) in &state.terms {
        let (inside, outside) = ket.split(|m| u.index_of(m).is_some());
        if inside.is_vacuum() {
            *out.terms.entry(ket.clone()).or_default() += *amp;
            continue;
        }
        let mut photon_columns: Vec<&[(usize, C64)]> = Vec::with_capacity(inside.total_photons());
        for &(mode, n) in inside.occupations() {
            let idx = u.index_of(&mode).expect("split by membership");
            for _ in 0..n {
                photon_columns.push(&columns[idx]);
            }
        }
        let inv_norm_in = 1.0 / inside.factorial_product().sqrt();
        for (counts, coeff) in expand_monomials(&photon_columns, modes.len()) {
            let (new_inside, factor) = ket_from_counts(modes, &counts);
            let new_ket = outside.merge(&new_inside);
            *out.terms.entry(new_ket).or_default() += amp * coeff * (factor.sqrt() * inv_norm_in);
        }
    }
    out.prune();
    Ok(out)
}

/// Expands `Π_k (Σ_j c_kj x_j)` into monomials keyed by exponent vectors.
fn expand_monomials(columns: &[&[(usize, C64)]], n_modes: usize) -> BTreeMap<Vec<u8>, C64> {
    let mut partial: BTreeMap<Vec<u8>, C64> = BTreeMap::new();
    partial.insert(vec![0; n_modes], Complex64::new(1.0, 0.0));
    for column in columns {
        let mut next: BTreeMap<Vec<u8>, C64> = BTreeMap::new();
        for (counts, c) in &partial {
            for &(j, u) in column.iter() {
                let mut k = counts.clone();
                k[j] += 1;
                *next.entry(k).or_default() += c * u;
            }
        }
        partial = next;
    }
    partial
}

/// Ket for an exponent vector over `modes`, together with Π n_j!.
fn ket_from_counts(modes: &[ModeId], counts: &[u8]) -> (FockKet, f64) {
    let mut factor = 1.0;
    let occ = modes
        .iter()
        .zip(counts)
        .filter(|(_, &n)| n > 0)
        .map(|(m, &n)| {
            factor *= factorial(n as usize);
            (*m, n)
        });
    let ket = FockKet::from_occupations(occ.collect::<Vec<_>>());
    (ket, factor)
}
