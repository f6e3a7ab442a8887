//! Polarization-analyzed photon counting.
//!
//! Each detector watches one channel through an analyzer that accepts a
//! single linear polarization (or everything, for [`Analyzer::Open`]).
//! Detection is diagonal in the photon-number basis and blind to internal
//! labels, so a pattern probability is a sum over kets of |amplitude|²
//! times a per-detector response that depends only on how many photons hit
//! the accepted port. A finite efficiency η enters that response as the
//! binomial survival of each photon, which is the same POVM as a loss tap of
//! transmission η placed before an ideal detector.

mod fit;
mod sampling;

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::elements::analyzer;
use crate::error::{Error, Result};
use crate::fock::{Channel, FockKet, ModeUnitary, Pol, PureState};

pub use fit::{fit_fringe, FringeFit, Weighting};
pub use sampling::{sample_count, sample_counts, write_count_csv, CountRecord, COUNT_CSV_HEADER};

pub const D1: &str = "D1";
pub const GATE: &str = "gate";
pub const D3: &str = "D3";

const ANGLE_TOL: f64 = 1e-9;
const PURITY_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Analyzer {
    /// No polarizer: both polarizations reach the detector.
    Open,
    /// Accepts linear polarization at this angle (radians from H).
    Angle(f64),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Counting {
    #[default]
    /// Fires on one or more photons.
    Threshold,
    /// Reports the photon number; "fired" means exactly one.
    Resolving,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DetectorSpec {
    pub name: String,
    pub channel: Channel,
    pub analyzer: Analyzer,
    pub efficiency: f64,
    pub counting: Counting,
}

impl DetectorSpec {
    pub fn threshold(name: &str, channel: Channel, theta: f64, efficiency: f64) -> Self {
        DetectorSpec {
            name: name.to_string(),
            channel,
            analyzer: Analyzer::Angle(theta),
            efficiency,
            counting: Counting::Threshold,
        }
    }

    pub fn open(name: &str, channel: Channel, efficiency: f64) -> Self {
        DetectorSpec {
            analyzer: Analyzer::Open,
            ..DetectorSpec::threshold(name, channel, 0.0, efficiency)
        }
    }

    pub fn with_analyzer(mut self, analyzer: Analyzer) -> Self {
        self.analyzer = analyzer;
        self
    }

    pub fn with_counting(mut self, counting: Counting) -> Self {
        self.counting = counting;
        self
    }

    /// Probability of the given outcome when `n` photons reach the
    /// accepted port.
    pub fn response(&self, n: usize, fired: bool) -> f64 {
        let eta = self.efficiency;
        let none = (1.0 - eta).powi(n as i32);
        match (self.counting, fired) {
            (_, false) => none,
            (Counting::Threshold, true) => 1.0 - none,
            (Counting::Resolving, true) => {
                if n == 0 {
                    0.0
                } else {
                    n as f64 * eta * (1.0 - eta).powi(n as i32 - 1)
                }
            }
        }
    }
}

/// Returns copies of `detectors` with the named analyzers replaced.
pub fn with_angles(
    detectors: &[DetectorSpec],
    angles: &[(&str, f64)],
) -> Result<Vec<DetectorSpec>> {
    let mut out = detectors.to_vec();
    for (name, theta) in angles {
        let d = out
            .iter_mut()
            .find(|d| d.name == *name)
            .ok_or_else(|| Error::UnknownDetector(name.to_string()))?;
        d.analyzer = Analyzer::Angle(*theta);
    }
    Ok(out)
}

/// Fired / not-fired flag for every configured detector.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct ClickPattern {
    fired: BTreeMap<String, bool>,
}

impl ClickPattern {
    pub fn new(detectors: &[DetectorSpec], fired: &[&str]) -> Result<Self> {
        for name in fired {
            if !detectors.iter().any(|d| d.name == *name) {
                return Err(Error::UnknownDetector(name.to_string()));
            }
        }
        Ok(ClickPattern {
            fired: detectors
                .iter()
                .map(|d| (d.name.clone(), fired.contains(&d.name.as_str())))
                .collect(),
        })
    }

    pub fn all_fired(detectors: &[DetectorSpec]) -> Self {
        ClickPattern {
            fired: detectors.iter().map(|d| (d.name.clone(), true)).collect(),
        }
    }

    /// Bit `i` of `bits` is the flag of `detectors[i]`.
    pub fn from_bits(detectors: &[DetectorSpec], bits: usize) -> Self {
        ClickPattern {
            fired: detectors
                .iter()
                .enumerate()
                .map(|(i, d)| (d.name.clone(), bits >> i & 1 == 1))
                .collect(),
        }
    }

    pub fn fired(&self, name: &str) -> Option<bool> {
        self.fired.get(name).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, bool)> {
        self.fired.iter().map(|(k, v)| (k.as_str(), *v))
    }

    fn flags_for(&self, detectors: &[DetectorSpec]) -> Result<Vec<bool>> {
        for name in self.fired.keys() {
            if !detectors.iter().any(|d| &d.name == name) {
                return Err(Error::UnknownDetector(name.clone()));
            }
        }
        detectors
            .iter()
            .map(|d| {
                self.fired(&d.name)
                    .ok_or_else(|| Error::UnknownDetector(d.name.clone()))
            })
            .collect()
    }
}

/// Analyzer rotations per channel plus the port each detector reads.
struct Plan {
    rotations: Vec<(Channel, f64)>,
    /// `None` when the detector reads both polarizations.
    ports: Vec<(Channel, Option<Pol>)>,
}

fn plan(detectors: &[DetectorSpec]) -> Result<Plan> {
    let mut names = BTreeSet::new();
    for d in detectors {
        if !names.insert(d.name.as_str()) {
            return Err(Error::Config(format!(
                "detector `{}` defined twice",
                d.name
            )));
        }
        if !(0.0..=1.0).contains(&d.efficiency) {
            return Err(Error::BadParameter {
                name: "efficiency",
                value: d.efficiency,
            });
        }
    }
    let mut base: BTreeMap<Channel, f64> = BTreeMap::new();
    let mut taken: BTreeMap<Channel, Vec<Option<Pol>>> = BTreeMap::new();
    let mut ports = Vec::with_capacity(detectors.len());
    for d in detectors {
        let port = match d.analyzer {
            Analyzer::Open => None,
            Analyzer::Angle(theta) => {
                let b = *base.entry(d.channel).or_insert(theta);
                let steps = (theta - b) / FRAC_PI_2;
                let k = steps.round();
                if (steps - k).abs() > ANGLE_TOL {
                    return Err(Error::IncompatibleAnalyzers(d.channel));
                }
                Some(if (k as i64).rem_euclid(2) == 0 {
                    Pol::H
                } else {
                    Pol::V
                })
            }
        };
        let used = taken.entry(d.channel).or_default();
        if used
            .iter()
            .any(|p| p.is_none() || port.is_none() || *p == port)
        {
            return Err(Error::IncompatibleAnalyzers(d.channel));
        }
        used.push(port);
        ports.push((d.channel, port));
    }
    Ok(Plan {
        rotations: base
            .into_iter()
            .map(|(c, t)| (c, t.rem_euclid(PI)))
            .collect(),
        ports,
    })
}

fn rotate(state: &PureState, plan: &Plan) -> Result<PureState> {
    let dim = state.internal_extent().max(1);
    let mut out = state.clone();
    for &(ch, theta) in &plan.rotations {
        if theta != 0.0 {
            out = out.apply_unitary(&analyzer(ch, theta, dim)?)?;
        }
    }
    Ok(out)
}

fn port_counts(ket: &FockKet, plan: &Plan) -> Vec<usize> {
    plan.ports
        .iter()
        .map(|&(ch, port)| {
            ket.photons_where(|m| m.spatial == ch && port.is_none_or(|p| m.pol == p))
        })
        .collect()
}

fn response(detectors: &[DetectorSpec], counts: &[usize], flags: &[bool]) -> f64 {
    detectors
        .iter()
        .zip(counts)
        .zip(flags)
        .map(|((d, &n), &f)| d.response(n, f))
        .product()
}

/// Probability of `pattern`. The state need not be normalized; the result
/// scales with its squared norm.
pub fn click_probability(
    state: &PureState,
    detectors: &[DetectorSpec],
    pattern: &ClickPattern,
) -> Result<f64> {
    let flags = pattern.flags_for(detectors)?;
    let plan = plan(detectors)?;
    let rotated = rotate(state, &plan)?;
    Ok(rotated
        .terms()
        .map(|(k, a)| a.norm_sqr() * response(detectors, &port_counts(k, &plan), &flags))
        .sum())
}

/// [`click_probability`] broken down by a classification of the kets.
/// The key function sees kets after analyzer rotation, which changes only
/// the polarization content of detector channels.
pub fn click_probability_by<K: Ord>(
    state: &PureState,
    detectors: &[DetectorSpec],
    pattern: &ClickPattern,
    key: impl Fn(&FockKet) -> K,
) -> Result<BTreeMap<K, f64>> {
    let flags = pattern.flags_for(detectors)?;
    let plan = plan(detectors)?;
    let rotated = rotate(state, &plan)?;
    let mut out = BTreeMap::new();
    for (k, a) in rotated.terms() {
        let p = a.norm_sqr() * response(detectors, &port_counts(k, &plan), &flags);
        if p > 0.0 {
            *out.entry(key(k)).or_insert(0.0) += p;
        }
    }
    Ok(out)
}

/// Probability that every detector fires.
pub fn coincidence_probability(state: &PureState, detectors: &[DetectorSpec]) -> Result<f64> {
    click_probability(state, detectors, &ClickPattern::all_fired(detectors))
}

/// All 2^k patterns with their probabilities, indexed as in [`ClickPattern::from_bits`].
pub fn pattern_distribution(
    state: &PureState,
    detectors: &[DetectorSpec],
) -> Result<Vec<(ClickPattern, f64)>> {
    let plan = plan(detectors)?;
    let rotated = rotate(state, &plan)?;
    let k = detectors.len();
    let mut probs = vec![0.0; 1 << k];
    for (ket, a) in rotated.terms() {
        let counts = port_counts(ket, &plan);
        let w = a.norm_sqr();
        for (bits, p) in probs.iter_mut().enumerate() {
            let flags: Vec<bool> = (0..k).map(|i| bits >> i & 1 == 1).collect();
            *p += w * response(detectors, &counts, &flags);
        }
    }
    Ok(probs
        .into_iter()
        .enumerate()
        .map(|(bits, p)| (ClickPattern::from_bits(detectors, bits), p))
        .collect())
}

/// All-fire probability for each (θ1, θ3) setting of detectors [`D1`] and [`D3`].
pub fn threefold_table(
    state: &PureState,
    detectors: &[DetectorSpec],
    settings: &[(f64, f64)],
) -> Result<Vec<f64>> {
    settings
        .iter()
        .map(|&(t1, t3)| {
            coincidence_probability(state, &with_angles(detectors, &[(D1, t1), (D3, t3)])?)
        })
        .collect()
}

/// Classical mixture of normalized pure states with weights summing to one.
#[derive(Clone, Debug, PartialEq)]
pub struct Mixture {
    components: Vec<(f64, PureState)>,
}

impl Mixture {
    /// Normalizes weights and states; zero-norm components are dropped.
    pub fn new(components: Vec<(f64, PureState)>) -> Result<Self> {
        let mut kept: Vec<(f64, PureState)> = components
            .into_iter()
            .filter(|(w, s)| *w > 0.0 && s.norm_sqr() > 0.0)
            .map(|(w, s)| (w, s.normalized()))
            .collect();
        let total: f64 = kept.iter().map(|(w, _)| w).sum();
        if total == 0.0 {
            return Err(Error::ZeroProbabilityPattern);
        }
        for (w, _) in kept.iter_mut() {
            *w /= total;
        }
        Ok(Mixture { components: kept })
    }

    pub fn pure(state: PureState) -> Result<Self> {
        Mixture::new(vec![(1.0, state)])
    }

    pub fn components(&self) -> &[(f64, PureState)] {
        &self.components
    }

    /// ⟨ψ|ρ|ψ⟩ / ⟨ψ|ψ⟩.
    pub fn fidelity(&self, target: &PureState) -> f64 {
        self.components
            .iter()
            .map(|(w, s)| w * s.fidelity(target))
            .sum()
    }

    /// Tr ρ².
    pub fn purity(&self) -> f64 {
        let mut p = 0.0;
        for (wi, si) in &self.components {
            for (wj, sj) in &self.components {
                p += wi * wj * si.inner_product(sj).norm_sqr();
            }
        }
        p
    }

    /// The state itself when ρ has rank one. The global phase is that of
    /// the heaviest component.
    pub fn into_pure(self) -> Result<PureState> {
        let purity = self.purity();
        if purity < 1.0 - PURITY_TOL {
            return Err(Error::MixedConditionalState { purity });
        }
        self.components
            .into_iter()
            .max_by(|a, b| a.0.total_cmp(&b.0))
            .map(|(_, s)| s)
            .ok_or(Error::ZeroProbabilityPattern)
    }

    pub fn apply_unitary(&self, u: &ModeUnitary) -> Result<Mixture> {
        Ok(Mixture {
            components: self
                .components
                .iter()
                .map(|(w, s)| Ok((*w, s.apply_unitary(u)?)))
                .collect::<Result<_>>()?,
        })
    }

    /// Each component restricted to kets satisfying `pred`, renormalized.
    pub fn project(&self, pred: impl Fn(&FockKet) -> bool) -> Result<Mixture> {
        let parts = self
            .components
            .iter()
            .map(|(w, s)| {
                let kept = s.filter(&pred);
                (w * kept.norm_sqr(), kept)
            })
            .collect();
        Mixture::new(parts)
    }
}

/// State of the undetected channels given `pattern`. Detector channels and
/// `traced` channels are removed; each distinct configuration of removed
/// photons contributes an incoherent component.
pub fn conditional_mixture(
    state: &PureState,
    detectors: &[DetectorSpec],
    pattern: &ClickPattern,
    traced: &[Channel],
) -> Result<Mixture> {
    let flags = pattern.flags_for(detectors)?;
    let plan = plan(detectors)?;
    let rotated = rotate(state, &plan)?;
    let removed: BTreeSet<Channel> = detectors
        .iter()
        .map(|d| d.channel)
        .chain(traced.iter().copied())
        .collect();
    let mut branches: BTreeMap<FockKet, (f64, PureState)> = BTreeMap::new();
    for (ket, a) in rotated.terms() {
        let w = response(detectors, &port_counts(ket, &plan), &flags);
        if w == 0.0 {
            continue;
        }
        let (gone, rest) = ket.split(|m| removed.contains(&m.spatial));
        let entry = branches
            .entry(gone)
            .or_insert_with(|| (w, PureState::zero(*state.config())));
        entry.1.add_term(rest, *a)?;
    }
    let components = branches
        .into_values()
        .map(|(w, s)| {
            let s = s.scaled(Complex64::new(w.sqrt(), 0.0));
            (s.norm_sqr(), s)
        })
        .collect();
    Mixture::new(components)
}

/// Normalized pure conditional state; fails if the conditioning leaves a
/// mixture.
pub fn conditional_state(
    state: &PureState,
    detectors: &[DetectorSpec],
    pattern: &ClickPattern,
) -> Result<PureState> {
    conditional_mixture(state, detectors, pattern, &[])?.into_pure()
}

#[cfg(test)]
mod tests;
