//! The encoder as a linear-optics circuit.
//!
//! Two builders share one [`Circuit`] type. [`build_ideal_encoder`] feeds a
//! single qubit photon and a directly prepared |φ⁺⟩ pair into the encoding
//! PBS. [`build_full_apparatus`] models the bench: a weak coherent pulse, a
//! down-conversion pair made polarization-entangled by a first PBS, coupling
//! losses, partial distinguishability and analyzer misalignment.
//!
//! Sources emit an incoherent mixture of photon-number sectors, so a circuit
//! carries a list of weighted [`Branch`]es that are evolved independently.

mod apparatus;
mod encode;

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_4;
use std::fmt::Write as _;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::detection::{
    click_probability, click_probability_by, Analyzer, ClickPattern, Counting, DetectorSpec,
    Mixture, D1, D3, GATE,
};
use crate::elements::{Element, PbsParams};
use crate::error::{Error, Result};
use crate::fock::{Channel, FockConfig, FockKet, Pol, PureState, C64};
use crate::sources::{ideal_photon, Qubit};

pub use apparatus::{
    build_full_apparatus, ApparatusConfig, Conventions, DetectorConfig, ElementConfig,
    Imperfections,
};
pub use encode::{
    encode, ghz_mixture, ghz_state, verify_decomposition, DecompositionReport, EncoderResult,
    FeedForward, GateOutcome,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelRole {
    Input,
    Link,
    Output,
    Gate,
    Loss,
}

/// Names and roles of spatial channels. `Channel(i)` is entry `i`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ChannelRegistry {
    entries: Vec<(String, ChannelRole)>,
}

impl ChannelRegistry {
    pub fn new() -> Self {
        ChannelRegistry::default()
    }

    pub fn add(&mut self, name: &str, role: ChannelRole) -> Result<Channel> {
        if self.entries.iter().any(|(n, _)| n == name) {
            return Err(Error::DuplicateChannel(name.to_string()));
        }
        self.entries.push((name.to_string(), role));
        Ok(Channel((self.entries.len() - 1) as u16))
    }

    /// Adds `loss-<of>`, or `loss-<of>-<k>` if that name is taken.
    pub fn add_loss(&mut self, of: &str) -> Channel {
        let mut name = format!("loss-{of}");
        let mut k = 2;
        while self.entries.iter().any(|(n, _)| *n == name) {
            name = format!("loss-{of}-{k}");
            k += 1;
        }
        self.add(&name, ChannelRole::Loss).expect("name is fresh")
    }

    pub fn get(&self, name: &str) -> Result<Channel> {
        self.entries
            .iter()
            .position(|(n, _)| n == name)
            .map(|i| Channel(i as u16))
            .ok_or_else(|| Error::UnknownChannel(name.to_string()))
    }

    pub fn name(&self, ch: Channel) -> &str {
        self.entries
            .get(ch.0 as usize)
            .map_or("?", |(n, _)| n.as_str())
    }

    pub fn role(&self, ch: Channel) -> Option<ChannelRole> {
        self.entries.get(ch.0 as usize).map(|(_, r)| *r)
    }

    pub fn with_role(&self, role: ChannelRole) -> Vec<Channel> {
        self.iter()
            .filter(|(_, _, r)| *r == role)
            .map(|(c, _, _)| c)
            .collect()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Channel, &str, ChannelRole)> {
        self.entries
            .iter()
            .enumerate()
            .map(|(i, (n, r))| (Channel(i as u16), n.as_str(), *r))
    }
}

/// Photon-number content of one source branch.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sector {
    pub coherent_photons: usize,
    pub pairs: usize,
}

/// One term of the source mixture.
#[derive(Clone, Debug, PartialEq)]
pub struct Branch {
    pub weight: f64,
    pub sector: Sector,
    pub state: PureState,
}

pub fn all_sectors(_: &Sector) -> bool {
    true
}

/// Output and gate channels of an encoder circuit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Ports {
    pub out1: Channel,
    pub out3: Channel,
    pub gate: Channel,
}

#[derive(Clone, Debug)]
enum Recipe {
    Ideal,
    Full(Box<ApparatusConfig>),
}

#[derive(Clone, Debug)]
pub struct Circuit {
    registry: ChannelRegistry,
    elements: Vec<Element>,
    detectors: Vec<DetectorSpec>,
    internal_dim: usize,
    fock: FockConfig,
    qubit: Qubit,
    ports: Ports,
    analyzer_offset: f64,
    compensation: f64,
    inputs: Vec<Branch>,
    outputs: Vec<Branch>,
    recipe: Recipe,
}

/// Phase on out1 V that undoes the reflection phases picked up by the
/// all-V component relative to the all-H component.
pub(crate) fn compensation_phase(reflections: &[PbsParams]) -> f64 {
    let product: C64 = reflections
        .iter()
        .map(|p| Complex64::from_polar(1.0, p.reflection_phase))
        .product();
    -product.arg()
}

impl Circuit {
    #[allow(clippy::too_many_arguments)]
    fn assemble(
        registry: ChannelRegistry,
        elements: Vec<Element>,
        detectors: Vec<DetectorSpec>,
        internal_dim: usize,
        fock: FockConfig,
        qubit: Qubit,
        ports: Ports,
        analyzer_offset: f64,
        compensation: f64,
        inputs: Vec<Branch>,
        recipe: Recipe,
    ) -> Result<Circuit> {
        for e in &elements {
            for ch in e.channels() {
                if ch.0 as usize >= registry.len() {
                    return Err(Error::UnknownChannel(ch.to_string()));
                }
            }
        }
        let unitaries = elements
            .iter()
            .map(|e| {
                let u = e.unitary(internal_dim)?;
                if u.len() > fock.max_modes {
                    return Err(Error::TooManyModes {
                        modes: u.len(),
                        max: fock.max_modes,
                    });
                }
                Ok(u)
            })
            .collect::<Result<Vec<_>>>()?;
        let outputs = inputs
            .iter()
            .map(|b| {
                let mut s = b.state.clone();
                for u in &unitaries {
                    s = s.apply_unitary(u)?;
                }
                Ok(Branch {
                    weight: b.weight,
                    sector: b.sector,
                    state: s,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Circuit {
            registry,
            elements,
            detectors,
            internal_dim,
            fock,
            qubit,
            ports,
            analyzer_offset,
            compensation,
            inputs,
            outputs,
            recipe,
        })
    }

    /// Same circuit with a different input qubit.
    pub fn with_qubit(&self, qubit: Qubit) -> Result<Circuit> {
        match &self.recipe {
            Recipe::Ideal => build_ideal_encoder(qubit),
            Recipe::Full(cfg) => {
                let mut cfg = (**cfg).clone();
                cfg.source.qubit = qubit;
                build_full_apparatus(&cfg)
            }
        }
    }

    pub fn registry(&self) -> &ChannelRegistry {
        &self.registry
    }

    pub fn channel(&self, name: &str) -> Result<Channel> {
        self.registry.get(name)
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn detectors(&self) -> &[DetectorSpec] {
        &self.detectors
    }

    pub fn detector(&self, name: &str) -> Result<&DetectorSpec> {
        self.detectors
            .iter()
            .find(|d| d.name == name)
            .ok_or_else(|| Error::UnknownDetector(name.to_string()))
    }

    pub fn internal_dim(&self) -> usize {
        self.internal_dim
    }

    pub fn fock_config(&self) -> FockConfig {
        self.fock
    }

    pub fn qubit(&self) -> Qubit {
        self.qubit
    }

    pub fn ports(&self) -> Ports {
        self.ports
    }

    /// Common analyzer misalignment, radians.
    pub fn analyzer_offset(&self) -> f64 {
        self.analyzer_offset
    }

    /// Phase applied on out1 V to align the reflection conventions.
    pub fn compensation(&self) -> f64 {
        self.compensation
    }

    pub fn is_ideal(&self) -> bool {
        matches!(self.recipe, Recipe::Ideal)
    }

    pub fn apparatus_config(&self) -> Option<&ApparatusConfig> {
        match &self.recipe {
            Recipe::Ideal => None,
            Recipe::Full(cfg) => Some(cfg),
        }
    }

    /// Source branches before any element acts.
    pub fn inputs(&self) -> &[Branch] {
        &self.inputs
    }

    /// Source branches after the last element, before detection.
    pub fn outputs(&self) -> &[Branch] {
        &self.outputs
    }

    /// Channels that are neither outputs nor the gate.
    pub fn unobserved_channels(&self) -> Vec<Channel> {
        let Ports { out1, out3, gate } = self.ports;
        self.registry
            .iter()
            .map(|(c, _, _)| c)
            .filter(|c| *c != out1 && *c != out3 && *c != gate)
            .collect()
    }

    /// The circuit's detectors with the given analyzers (angles are shifted
    /// by the configured misalignment).
    pub fn detectors_at(
        &self,
        theta1: Analyzer,
        theta2: Analyzer,
        theta3: Analyzer,
    ) -> Vec<DetectorSpec> {
        let shift = |a: Analyzer| match a {
            Analyzer::Angle(t) => Analyzer::Angle(t + self.analyzer_offset),
            Analyzer::Open => Analyzer::Open,
        };
        self.detectors
            .iter()
            .map(|d| {
                let a = match d.name.as_str() {
                    D1 => theta1,
                    GATE => theta2,
                    D3 => theta3,
                    _ => d.analyzer,
                };
                d.clone().with_analyzer(shift(a))
            })
            .collect()
    }

    /// Source-averaged probability of `pattern` over the selected sectors.
    pub fn probability(
        &self,
        detectors: &[DetectorSpec],
        pattern: &ClickPattern,
        sectors: impl Fn(&Sector) -> bool,
    ) -> Result<f64> {
        let mut total = 0.0;
        for b in self.outputs.iter().filter(|b| sectors(&b.sector)) {
            total += b.weight * click_probability(&b.state, detectors, pattern)?;
        }
        Ok(total)
    }

    /// [`Circuit::probability`] split by a classification of sectors and kets.
    pub fn probability_by<K: Ord>(
        &self,
        detectors: &[DetectorSpec],
        pattern: &ClickPattern,
        sectors: impl Fn(&Sector) -> bool,
        key: impl Fn(&Sector, &FockKet) -> K,
    ) -> Result<BTreeMap<K, f64>> {
        let mut out = BTreeMap::new();
        for b in self.outputs.iter().filter(|b| sectors(&b.sector)) {
            for (k, p) in
                click_probability_by(&b.state, detectors, pattern, |ket| key(&b.sector, ket))?
            {
                *out.entry(k).or_insert(0.0) += b.weight * p;
            }
        }
        Ok(out)
    }

    /// Probability per pulse that D1, gate and D3 all fire with the given
    /// analyzer angles.
    pub fn threefold(&self, theta1: f64, theta2: f64, theta3: f64) -> Result<f64> {
        let d = self.detectors_at(
            Analyzer::Angle(theta1),
            Analyzer::Angle(theta2),
            Analyzer::Angle(theta3),
        );
        self.probability(&d, &ClickPattern::all_fired(&d), all_sectors)
    }

    /// `count@channel:pol:internal` with channel names.
    pub fn ket_label(&self, ket: &FockKet) -> String {
        ket.occupations()
            .iter()
            .map(|(m, n)| {
                format!(
                    "{}@{}:{}:{}",
                    n,
                    self.registry.name(m.spatial),
                    m.pol,
                    m.internal
                )
            })
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Plain-text listing of channels, elements and detectors.
    pub fn dump(&self) -> String {
        let name = |c: &Channel| self.registry.name(*c).to_string();
        let deg = |r: f64| crate::format::fmt_num(r.to_degrees());
        let mut out = String::new();
        let _ = writeln!(
            out,
            "circuit {}",
            if self.is_ideal() { "ideal" } else { "full" }
        );
        let _ = writeln!(out, "internal_dim {}", self.internal_dim);
        for (c, n, r) in self.registry.iter() {
            let _ = writeln!(out, "channel {} {} {:?}", c, n, r);
        }
        for (i, e) in self.elements.iter().enumerate() {
            let line = match e {
                Element::Pbs { ports, params } => format!(
                    "pbs {} reflection_phase_deg={} leakage={}",
                    ports.iter().map(name).collect::<Vec<_>>().join(" "),
                    deg(params.reflection_phase),
                    crate::format::fmt_num(params.leakage)
                ),
                Element::Bs {
                    ports,
                    transmissivity,
                } => format!(
                    "bs {} transmissivity={}",
                    ports.iter().map(name).collect::<Vec<_>>().join(" "),
                    crate::format::fmt_num(*transmissivity)
                ),
                Element::Hwp { channel, angle } => {
                    format!("hwp {} angle_deg={}", name(channel), deg(*angle))
                }
                Element::Phase {
                    channel,
                    pol,
                    phase,
                } => {
                    format!(
                        "phase {} pol={} phase_deg={}",
                        name(channel),
                        pol,
                        deg(*phase)
                    )
                }
                Element::LossTap {
                    channel,
                    loss_channel,
                    eta,
                } => format!(
                    "loss_tap {} {} eta={}",
                    name(channel),
                    name(loss_channel),
                    crate::format::fmt_num(*eta)
                ),
            };
            let _ = writeln!(out, "element {i} {line}");
        }
        for d in &self.detectors {
            let analyzer = match d.analyzer {
                Analyzer::Open => "open".to_string(),
                Analyzer::Angle(t) => deg(t),
            };
            let counting = match d.counting {
                Counting::Threshold => "threshold",
                Counting::Resolving => "resolving",
            };
            let _ = writeln!(
                out,
                "detector {} {} analyzer_deg={} efficiency={} {}",
                d.name,
                name(&d.channel),
                analyzer,
                crate::format::fmt_num(d.efficiency),
                counting
            );
        }
        for b in &self.inputs {
            let _ = writeln!(
                out,
                "branch coherent={} pairs={} weight={}",
                b.sector.coherent_photons,
                b.sector.pairs,
                crate::format::fmt_num(b.weight)
            );
        }
        out
    }
}

/// Encoder with an ideal single-photon qubit on `in1` and the |φ⁺⟩ resource
/// prepared directly on (`in2`, `out3`). `in2` enters the encoding PBS.
pub fn build_ideal_encoder(qubit: Qubit) -> Result<Circuit> {
    let mut reg = ChannelRegistry::new();
    let in1 = reg.add("in1", ChannelRole::Input)?;
    let in2 = reg.add("in2", ChannelRole::Input)?;
    let out3 = reg.add("out3", ChannelRole::Output)?;
    let out1 = reg.add("out1", ChannelRole::Output)?;
    let gate = reg.add("gate", ChannelRole::Gate)?;
    let fock = FockConfig::default();

    let h = |ch| FockKet::single(crate::fock::ModeId::new(ch, Pol::H, 0));
    let v = |ch| FockKet::single(crate::fock::ModeId::new(ch, Pol::V, 0));
    let amp = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let phi_plus = PureState::from_terms(
        fock,
        [(h(in2).merge(&h(out3)), amp), (v(in2).merge(&v(out3)), amp)],
    )?;
    let state = ideal_photon(in1, qubit).tensor(&phi_plus)?;

    let pbs2 = PbsParams::default();
    let compensation = compensation_phase(&[pbs2, pbs2]);
    let elements = vec![
        Element::Pbs {
            ports: [in1, in2, out1, gate],
            params: pbs2,
        },
        Element::Phase {
            channel: out1,
            pol: Pol::V,
            phase: compensation,
        },
    ];
    let detectors = vec![
        DetectorSpec::threshold(D1, out1, 0.0, 1.0),
        DetectorSpec::threshold(GATE, gate, FRAC_PI_4, 1.0),
        DetectorSpec::threshold(D3, out3, 0.0, 1.0),
    ];
    let inputs = vec![Branch {
        weight: 1.0,
        sector: Sector {
            coherent_photons: 1,
            pairs: 1,
        },
        state,
    }];
    Circuit::assemble(
        reg,
        elements,
        detectors,
        1,
        fock,
        qubit,
        Ports { out1, out3, gate },
        0.0,
        compensation,
        inputs,
        Recipe::Ideal,
    )
}

type LabelGroups = BTreeMap<(Vec<(Channel, u8)>, FockKet), Vec<C64>>;

/// Two-qubit (or n-qubit) polarization density matrix over `channels`,
/// tracing internal labels and every other mode. Kets must hold exactly one
/// photon in each listed channel. Basis index bit `k` (from the most
/// significant end) is the polarization of `channels[k]`, H = 0.
pub fn polarization_density(mixture: &Mixture, channels: &[Channel]) -> Result<DMatrix<C64>> {
    let dim = 1usize << channels.len();
    let mut rho = DMatrix::<C64>::zeros(dim, dim);
    for (w, state) in mixture.components() {
        let mut groups: LabelGroups = BTreeMap::new();
        for (ket, a) in state.terms() {
            let mut index = 0usize;
            let mut labels = Vec::with_capacity(channels.len());
            for &ch in channels {
                let photons: Vec<_> = ket
                    .occupations()
                    .iter()
                    .filter(|(m, _)| m.spatial == ch)
                    .collect();
                let n: usize = photons.iter().map(|(_, n)| *n as usize).sum();
                if n != 1 {
                    return Err(Error::PhotonNumberMismatch {
                        input: 1,
                        output: n,
                    });
                }
                let m = photons[0].0;
                index = index << 1 | (m.pol == Pol::V) as usize;
                labels.push((ch, m.internal));
            }
            let (_, rest) = ket.split(|m| channels.contains(&m.spatial));
            groups
                .entry((labels, rest))
                .or_insert_with(|| vec![Complex64::new(0.0, 0.0); dim])[index] += *a;
        }
        for v in groups.values() {
            for i in 0..dim {
                for j in 0..dim {
                    rho[(i, j)] += *w * v[i] * v[j].conj();
                }
            }
        }
    }
    let trace: f64 = (0..dim).map(|i| rho[(i, i)].re).sum();
    if trace <= 0.0 {
        return Err(Error::ZeroProbabilityPattern);
    }
    Ok(rho / Complex64::new(trace, 0.0))
}

/// ⟨t|ρ|t⟩ for a normalized polarization target `t`.
pub fn polarization_fidelity(rho: &DMatrix<C64>, target: &[C64]) -> f64 {
    let norm: f64 = target.iter().map(|z| z.norm_sqr()).sum();
    let mut f = Complex64::new(0.0, 0.0);
    for i in 0..target.len() {
        for j in 0..target.len() {
            f += target[i].conj() * rho[(i, j)] * target[j];
        }
    }
    f.re / norm
}

#[cfg(test)]
mod tests;
