use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_4;

use serde::{Deserialize, Serialize};

use super::{
    compensation_phase, Branch, ChannelRegistry, ChannelRole, Circuit, Ports, Recipe, Sector,
};
use crate::detection::{Counting, DetectorSpec, D1, D3, GATE};
use crate::elements::{Element, ElementKind, PbsParams};
use crate::error::{Error, Result};
use crate::fock::{Pol, PureState, DEFAULT_MAX_PHOTONS};
use crate::sources::{
    number_state, poisson_weights, spdc_double_pair, spdc_pair, OverlapSpec, Qubit,
    QubitSourceKind, SourceConfig,
};

/// Detector efficiencies and the gate detector's counting mode.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DetectorConfig {
    pub efficiency_d1: f64,
    pub efficiency_gate: f64,
    pub efficiency_d3: f64,
    pub gate_counting: Counting,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        DetectorConfig {
            efficiency_d1: 1.0,
            efficiency_gate: 1.0,
            efficiency_d3: 1.0,
            gate_counting: Counting::Threshold,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Imperfections {
    /// Wrong-port fraction of both PBSs.
    pub pbs_leakage: f64,
    /// Common rotation error of all three analyzers, degrees.
    pub analyzer_offset_deg: f64,
}

/// Reflection phases of the two PBSs, degrees.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Conventions {
    pub pbs1_reflection_phase_deg: f64,
    pub pbs2_reflection_phase_deg: f64,
}

impl Default for Conventions {
    fn default() -> Self {
        Conventions {
            pbs1_reflection_phase_deg: 90.0,
            pbs2_reflection_phase_deg: 90.0,
        }
    }
}

/// An additional element appended after the encoding PBS.
///
/// Parameters by kind: `pbs` takes `reflection_phase_deg` and `leakage`,
/// `bs` takes `transmissivity`, `hwp` takes `angle_deg`, `phase` takes
/// `phase_deg` (and `pol`, default V), `loss_tap` takes `eta`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ElementConfig {
    pub kind: ElementKind,
    pub ports: Vec<String>,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pol: Option<Pol>,
}

impl ElementConfig {
    fn param(&self, name: &str, default: Option<f64>) -> Result<f64> {
        self.params.get(name).copied().or(default).ok_or_else(|| {
            Error::Config(format!("{:?} element needs parameter `{name}`", self.kind))
        })
    }

    fn resolve(&self, reg: &mut ChannelRegistry) -> Result<Element> {
        let allowed: &[&str] = match self.kind {
            ElementKind::Pbs => &["reflection_phase_deg", "leakage"],
            ElementKind::Bs => &["transmissivity"],
            ElementKind::Hwp => &["angle_deg"],
            ElementKind::Phase => &["phase_deg"],
            ElementKind::LossTap => &["eta"],
        };
        if let Some(bad) = self.params.keys().find(|k| !allowed.contains(&k.as_str())) {
            return Err(Error::Config(format!(
                "unknown parameter `{bad}` for {:?}",
                self.kind
            )));
        }
        let want = match self.kind {
            ElementKind::Pbs | ElementKind::Bs => 4,
            _ => 1,
        };
        if self.ports.len() != want {
            return Err(Error::Config(format!(
                "{:?} element needs {want} ports, got {}",
                self.kind,
                self.ports.len()
            )));
        }
        let ch = self
            .ports
            .iter()
            .map(|p| reg.get(p))
            .collect::<Result<Vec<_>>>()?;
        Ok(match self.kind {
            ElementKind::Pbs => Element::Pbs {
                ports: [ch[0], ch[1], ch[2], ch[3]],
                params: PbsParams {
                    reflection_phase: self.param("reflection_phase_deg", Some(90.0))?.to_radians(),
                    leakage: self.param("leakage", Some(0.0))?,
                },
            },
            ElementKind::Bs => Element::Bs {
                ports: [ch[0], ch[1], ch[2], ch[3]],
                transmissivity: self.param("transmissivity", None)?,
            },
            ElementKind::Hwp => Element::Hwp {
                channel: ch[0],
                angle: self.param("angle_deg", None)?.to_radians(),
            },
            ElementKind::Phase => Element::Phase {
                channel: ch[0],
                pol: self.pol.unwrap_or(Pol::V),
                phase: self.param("phase_deg", None)?.to_radians(),
            },
            ElementKind::LossTap => {
                let loss_channel = reg.add_loss(&self.ports[0]);
                Element::LossTap {
                    channel: ch[0],
                    loss_channel,
                    eta: self.param("eta", None)?,
                }
            }
        })
    }
}

/// Physical description of the bench.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ApparatusConfig {
    pub source: SourceConfig,
    /// Overlaps between (qubit photon, pair photon in arm 2, pair photon in arm 3).
    #[serde(default = "default_overlaps")]
    pub overlaps: OverlapSpec,
    #[serde(default)]
    pub detectors: DetectorConfig,
    #[serde(default)]
    pub imperfections: Imperfections,
    #[serde(default)]
    pub conventions: Conventions,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub extra_elements: Vec<ElementConfig>,
}

fn default_overlaps() -> OverlapSpec {
    OverlapSpec::indistinguishable(3)
}

impl ApparatusConfig {
    /// Lossless, perfectly overlapping, single-photon qubit, pair every pulse.
    pub fn ideal(qubit: Qubit) -> Self {
        ApparatusConfig {
            source: SourceConfig::ideal(qubit),
            overlaps: default_overlaps(),
            detectors: DetectorConfig::default(),
            imperfections: Imperfections::default(),
            conventions: Conventions::default(),
            extra_elements: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.source.validate()?;
        if self.overlaps.len() != 3 {
            return Err(Error::Config(format!(
                "overlap matrix must be 3x3 (qubit, arm2, arm3), got {0}x{0}",
                self.overlaps.len()
            )));
        }
        let d = &self.detectors;
        for (name, v) in [
            ("efficiency_d1", d.efficiency_d1),
            ("efficiency_gate", d.efficiency_gate),
            ("efficiency_d3", d.efficiency_d3),
            ("pbs_leakage", self.imperfections.pbs_leakage),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::BadParameter { name, value: v });
            }
        }
        if !self.imperfections.analyzer_offset_deg.is_finite() {
            return Err(Error::BadParameter {
                name: "analyzer_offset_deg",
                value: self.imperfections.analyzer_offset_deg,
            });
        }
        if self.source.qubit_source == QubitSourceKind::Coherent && self.source.n_max == 0 {
            return Err(Error::BadParameter {
                name: "n_max",
                value: 0.0,
            });
        }
        Ok(())
    }

    pub fn pbs1(&self) -> PbsParams {
        PbsParams {
            reflection_phase: self.conventions.pbs1_reflection_phase_deg.to_radians(),
            leakage: self.imperfections.pbs_leakage,
        }
    }

    pub fn pbs2(&self) -> PbsParams {
        PbsParams {
            reflection_phase: self.conventions.pbs2_reflection_phase_deg.to_radians(),
            leakage: self.imperfections.pbs_leakage,
        }
    }

    /// (photons, weight) for the qubit source.
    fn coherent_terms(&self) -> Vec<(usize, f64)> {
        match self.source.qubit_source {
            QubitSourceKind::SinglePhoton => vec![(1, 1.0)],
            QubitSourceKind::Coherent => poisson_weights(self.source.mu, self.source.n_max)
                .into_iter()
                .enumerate()
                .collect(),
        }
    }

    /// (pairs, weight) for the down-converter.
    fn pair_terms(&self) -> Vec<(usize, f64)> {
        let (p1, p2) = (self.source.pair_emission_prob, self.source.double_pair_prob);
        vec![(0, 1.0 - p1 - p2), (1, p1), (2, p2)]
    }
}

/// The bench as a circuit: coupling losses on the three source arms, the
/// pair-entangling PBS on (in2, in3) → (link, out3), the encoding PBS on
/// (in1, link) → (out1, gate), the convention compensation phase, and any
/// extra elements.
pub fn build_full_apparatus(cfg: &ApparatusConfig) -> Result<Circuit> {
    cfg.validate()?;
    let labels = cfg.overlaps.decompose()?;
    let dim = labels[0].len();

    let mut reg = ChannelRegistry::new();
    let in1 = reg.add("in1", ChannelRole::Input)?;
    let in2 = reg.add("in2", ChannelRole::Input)?;
    let in3 = reg.add("in3", ChannelRole::Input)?;
    let link = reg.add("link", ChannelRole::Link)?;
    let out1 = reg.add("out1", ChannelRole::Output)?;
    let out3 = reg.add("out3", ChannelRole::Output)?;
    let gate = reg.add("gate", ChannelRole::Gate)?;

    let coherent = cfg.coherent_terms();
    let pairs: Vec<(usize, f64)> = cfg
        .pair_terms()
        .into_iter()
        .filter(|(_, w)| *w > 0.0)
        .collect();
    let most = coherent.iter().map(|(n, _)| n).max().unwrap_or(&0)
        + 2 * pairs.iter().map(|(k, _)| k).max().unwrap_or(&0);
    let fock = crate::fock::FockConfig::default().with_max_photons(most.max(DEFAULT_MAX_PHOTONS));

    let qubit = cfg.source.qubit;
    let mut inputs = Vec::new();
    for &(k, wk) in &pairs {
        let pair_state = match k {
            0 => PureState::vacuum_with(fock),
            1 => spdc_pair(in2, in3, &labels[1], &labels[2], fock)?,
            _ => spdc_double_pair(in2, in3, &labels[1], &labels[2], fock)?,
        };
        for &(n, wn) in &coherent {
            if wn * wk <= 0.0 {
                continue;
            }
            let q = number_state(in1, qubit, n, &labels[0], fock)?;
            inputs.push(Branch {
                weight: wn * wk,
                sector: Sector {
                    coherent_photons: n,
                    pairs: k,
                },
                state: q.tensor(&pair_state)?,
            });
        }
    }

    let mut elements = Vec::new();
    let c = cfg.source.coupling;
    for (ch, name, eta) in [
        (in1, "in1", c.qubit),
        (in2, "in2", c.arm2),
        (in3, "in3", c.arm3),
    ] {
        if eta < 1.0 {
            let loss_channel = reg.add_loss(name);
            elements.push(Element::LossTap {
                channel: ch,
                loss_channel,
                eta,
            });
        }
    }
    let (pbs1, pbs2) = (cfg.pbs1(), cfg.pbs2());
    elements.push(Element::Pbs {
        ports: [in2, in3, link, out3],
        params: pbs1,
    });
    elements.push(Element::Pbs {
        ports: [in1, link, out1, gate],
        params: pbs2,
    });
    let compensation = compensation_phase(&[pbs1, pbs1, pbs2, pbs2]);
    elements.push(Element::Phase {
        channel: out1,
        pol: Pol::V,
        phase: compensation,
    });
    for extra in &cfg.extra_elements {
        elements.push(extra.resolve(&mut reg)?);
    }

    let d = &cfg.detectors;
    let detectors = vec![
        DetectorSpec::threshold(D1, out1, 0.0, d.efficiency_d1),
        DetectorSpec::threshold(GATE, gate, FRAC_PI_4, d.efficiency_gate)
            .with_counting(d.gate_counting),
        DetectorSpec::threshold(D3, out3, 0.0, d.efficiency_d3),
    ];
    Circuit::assemble(
        reg,
        elements,
        detectors,
        dim,
        fock,
        qubit,
        Ports { out1, out3, gate },
        cfg.imperfections.analyzer_offset_deg.to_radians(),
        compensation,
        inputs,
        Recipe::Full(Box::new(cfg.clone())),
    )
}
