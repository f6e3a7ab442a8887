use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;

use rayon::prelude::*;

use super::config::ExperimentConfig;
use crate::detection::{
    fit_fringe, pattern_distribution, sample_count, Analyzer, ClickPattern, CountRecord, FringeFit,
    Weighting, D1, D3, GATE,
};
use crate::encoder::{build_full_apparatus, ApparatusConfig, ChannelRole, Circuit, Sector};
use crate::error::Result;
use crate::sources::{Qubit, QubitSourceKind};

/// Whether scenario tables carry Poisson samples or only probabilities.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sampling {
    Exact,
    Poisson,
}

/// Stream offsets keep the scenarios' random draws independent under one seed.
#[derive(Clone, Copy)]
enum Stream {
    BasisZero = 1,
    BasisOne = 2,
    Diagonal = 3,
    Rectilinear = 4,
    Fringe = 5,
    GhzBasis = 6,
    GhzDiagonal = 7,
}

fn stream(table: Stream, index: usize) -> u64 {
    (table as u64) << 32 | index as u64
}

struct Setting {
    label: String,
    theta1: f64,
    theta2: f64,
    theta3: f64,
}

fn records(
    circuit: &Circuit,
    cfg: &ExperimentConfig,
    settings: &[Setting],
    table: Stream,
    sampling: Sampling,
) -> Result<Vec<CountRecord>> {
    let run = &cfg.run;
    let probs: Vec<f64> = settings
        .par_iter()
        .map(|s| circuit.threefold(s.theta1, s.theta2, s.theta3))
        .collect::<Result<_>>()?;
    settings
        .iter()
        .zip(probs)
        .enumerate()
        .map(|(i, (s, p))| {
            let counts = match sampling {
                Sampling::Exact => None,
                Sampling::Poisson => Some(sample_count(
                    p.clamp(0.0, 1.0),
                    run.pulse_rate_hz,
                    run.duration_s,
                    run.seed,
                    stream(table, i),
                )?),
            };
            Ok(CountRecord {
                setting: s.label.clone(),
                theta1_deg: s.theta1.to_degrees(),
                theta3_deg: s.theta3.to_degrees(),
                prob_per_pulse: p,
                counts,
                duration_s: run.duration_s,
                pulse_rate_hz: run.pulse_rate_hz,
                seed: run.seed,
            })
        })
        .collect()
}

fn with_qubit(cfg: &ApparatusConfig, qubit: Qubit) -> Result<Circuit> {
    let mut cfg = cfg.clone();
    cfg.source.qubit = qubit;
    build_full_apparatus(&cfg)
}

/// Output-analyzer settings labelled by logical value; `a` and `b` are the
/// analyzer angles standing for 0 and 1.
fn two_qubit_settings(a: f64, b: f64, gate: f64, names: [&str; 2]) -> Vec<Setting> {
    let mut out = Vec::new();
    for (l1, t1) in [(names[0], a), (names[1], b)] {
        for (l3, t3) in [(names[0], a), (names[1], b)] {
            out.push(Setting {
                label: format!("{l1}{l3}"),
                theta1: t1,
                theta2: gate,
                theta3: t3,
            });
        }
    }
    out
}

#[derive(Clone, Debug)]
pub struct BasisReport {
    /// Inputs |0⟩ and |1⟩, settings 00, 01, 10, 11 in the H/V basis.
    pub input_zero: Vec<CountRecord>,
    pub input_one: Vec<CountRecord>,
    /// 45° input analyzed in the ±45° basis (settings ++, +-, -+, --).
    pub diagonal: Vec<CountRecord>,
    /// 45° input analyzed in the H/V basis.
    pub rectilinear: Vec<CountRecord>,
}

/// Threefold tables for the basis-state and entangled-state runs.
pub fn run_basis_states(cfg: &ExperimentConfig, sampling: Sampling) -> Result<BasisReport> {
    cfg.validate()?;
    let gate = cfg.run.gate_angle_deg.to_radians();
    let hv = two_qubit_settings(0.0, FRAC_PI_2, gate, ["0", "1"]);
    let pm = two_qubit_settings(45f64.to_radians(), 135f64.to_radians(), gate, ["+", "-"]);
    let zero = with_qubit(&cfg.apparatus, Qubit::zero())?;
    let one = with_qubit(&cfg.apparatus, Qubit::one())?;
    let plus = with_qubit(&cfg.apparatus, Qubit::plus())?;
    Ok(BasisReport {
        input_zero: records(&zero, cfg, &hv, Stream::BasisZero, sampling)?,
        input_one: records(&one, cfg, &hv, Stream::BasisOne, sampling)?,
        diagonal: records(&plus, cfg, &pm, Stream::Diagonal, sampling)?,
        rectilinear: records(&plus, cfg, &hv, Stream::Rectilinear, sampling)?,
    })
}

#[derive(Clone, Debug)]
pub struct FringeReport {
    pub records: Vec<CountRecord>,
    /// Fit of the sampled counts, or of expected counts for exact runs.
    pub fit: FringeFit,
    /// Fit of the exact probabilities.
    pub exact_fit: FringeFit,
    /// Poisson-weighted fit of the expected counts: the error bar a run of
    /// the configured length would report.
    pub expected_fit: FringeFit,
}

/// Threefold rate versus θ3 for a 45° input with θ1 fixed.
pub fn run_fringe(cfg: &ExperimentConfig, sampling: Sampling) -> Result<FringeReport> {
    cfg.validate()?;
    let circuit = with_qubit(&cfg.apparatus, Qubit::plus())?;
    let n = cfg.run.fringe_points;
    let settings: Vec<Setting> = (0..n)
        .map(|i| Setting {
            label: format!("p{i:02}"),
            theta1: cfg.run.fringe_theta1_deg.to_radians(),
            theta2: cfg.run.gate_angle_deg.to_radians(),
            theta3: (i as f64 * 180.0 / n as f64).to_radians(),
        })
        .collect();
    let records = records(&circuit, cfg, &settings, Stream::Fringe, sampling)?;
    let angles: Vec<f64> = settings.iter().map(|s| s.theta3).collect();
    let probs: Vec<f64> = records.iter().map(|r| r.prob_per_pulse).collect();
    let expected: Vec<f64> = records.iter().map(|r| r.expected_counts()).collect();
    let exact_fit = fit_fringe(&angles, &probs, Weighting::Uniform)?;
    let expected_fit = fit_fringe(&angles, &expected, Weighting::Poisson)?;
    let fit = match sampling {
        Sampling::Exact => expected_fit,
        Sampling::Poisson => {
            let counts: Vec<f64> = records.iter().map(|r| r.value()).collect();
            fit_fringe(&angles, &counts, Weighting::Poisson)?
        }
    };
    Ok(FringeReport {
        records,
        fit,
        exact_fit,
        expected_fit,
    })
}

#[derive(Clone, Debug)]
pub struct GhzReport {
    /// Eight H/V settings of (θ1, θ2, θ3); labels give the three values.
    pub basis: Vec<CountRecord>,
    pub diagonal: Vec<CountRecord>,
    pub desired: f64,
    pub undesired: f64,
    /// desired / undesired; infinite when nothing undesired occurs.
    pub ratio: f64,
    /// Diagonal-basis probabilities normalized over the eight settings.
    pub parity_table: Vec<(String, f64)>,
    /// ⟨σx σx σx⟩ from the diagonal table.
    pub parity: f64,
}

fn ghz_settings(a: f64, b: f64, names: [char; 2]) -> Vec<Setting> {
    let mut out = Vec::new();
    for bits in 0..8usize {
        let pick = |i: usize| {
            if bits >> (2 - i) & 1 == 1 {
                (names[1], b)
            } else {
                (names[0], a)
            }
        };
        let (l1, t1) = pick(0);
        let (l2, t2) = pick(1);
        let (l3, t3) = pick(2);
        out.push(Setting {
            label: format!("{l1}{l2}{l3}"),
            theta1: t1,
            theta2: t2,
            theta3: t3,
        });
    }
    out
}

/// Three-photon correlations with all three analyzers rotatable; the
/// second label character is the gate analyzer.
pub fn run_ghz(cfg: &ExperimentConfig, sampling: Sampling) -> Result<GhzReport> {
    cfg.validate()?;
    let circuit = with_qubit(&cfg.apparatus, Qubit::plus())?;
    let basis = records(
        &circuit,
        cfg,
        &ghz_settings(0.0, FRAC_PI_2, ['0', '1']),
        Stream::GhzBasis,
        sampling,
    )?;
    let diagonal = records(
        &circuit,
        cfg,
        &ghz_settings(45f64.to_radians(), -45f64.to_radians(), ['+', '-']),
        Stream::GhzDiagonal,
        sampling,
    )?;
    let desired: f64 = basis
        .iter()
        .filter(|r| r.setting == "000" || r.setting == "111")
        .map(|r| r.prob_per_pulse)
        .sum();
    let undesired: f64 = basis
        .iter()
        .filter(|r| r.setting != "000" && r.setting != "111")
        .map(|r| r.prob_per_pulse)
        .sum();
    let total: f64 = diagonal.iter().map(|r| r.prob_per_pulse).sum();
    let parity_table: Vec<(String, f64)> = diagonal
        .iter()
        .map(|r| {
            (
                r.setting.clone(),
                if total > 0.0 {
                    r.prob_per_pulse / total
                } else {
                    0.0
                },
            )
        })
        .collect();
    let parity = parity_table
        .iter()
        .map(|(label, p)| {
            let minus = label.chars().filter(|c| *c == '-').count();
            if minus % 2 == 0 {
                *p
            } else {
                -p
            }
        })
        .sum();
    Ok(GhzReport {
        basis,
        diagonal,
        desired,
        undesired,
        ratio: ghz_ratio(desired, undesired),
        parity_table,
        parity,
    })
}

pub(crate) fn ghz_ratio(desired: f64, undesired: f64) -> f64 {
    if undesired > 0.0 {
        desired / undesired
    } else {
        f64::INFINITY
    }
}

/// Herald ratio P(D3 ∧ (D1 ∨ gate)) / P(D3) for a lone pair, analyzers open.
pub fn herald_ratio(cfg: &ApparatusConfig) -> Result<f64> {
    let mut c = cfg.clone();
    c.source.qubit_source = QubitSourceKind::Coherent;
    c.source.mu = 0.0;
    c.source.n_max = 1;
    c.source.pair_emission_prob = 1.0;
    c.source.double_pair_prob = 0.0;
    let circuit = build_full_apparatus(&c)?;
    let d = circuit.detectors_at(Analyzer::Open, Analyzer::Open, Analyzer::Open);
    let (mut d3, mut both) = (0.0, 0.0);
    for b in circuit.outputs() {
        for (pattern, p) in pattern_distribution(&b.state, &d)? {
            let fired = |n| pattern.fired(n) == Some(true);
            if fired(D3) {
                d3 += b.weight * p;
                if fired(D1) || fired(GATE) {
                    both += b.weight * p;
                }
            }
        }
    }
    Ok(if d3 > 0.0 { both / d3 } else { 0.0 })
}

/// Per-pulse probability that the qubit pulse alone fires D1 or the gate.
pub fn qubit_detection_prob(cfg: &ApparatusConfig) -> Result<f64> {
    let mut c = cfg.clone();
    c.source.pair_emission_prob = 0.0;
    c.source.double_pair_prob = 0.0;
    let circuit = build_full_apparatus(&c)?;
    let d = circuit.detectors_at(Analyzer::Open, Analyzer::Open, Analyzer::Open);
    let mut fired = 0.0;
    for bits in [1usize, 2, 3, 5, 6, 7] {
        fired += circuit.probability(&d, &ClickPattern::from_bits(&d, bits), |_| true)?;
    }
    Ok(fired)
}

/// Fate of the down-converted photons in an error event.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum ErrorPath {
    /// One pair photon lost before the first PBS; the other reached D3.
    PartnerLost,
    /// Both pair photons left the first PBS towards D3.
    SamePort,
    /// No pair photon lost, one in each output of the first PBS.
    PartnerDetected,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoiseRow {
    pub mu: f64,
    /// Threefold probability from single-photon qubit pulses.
    pub valid: f64,
    /// Threefold probability from pulses with two or more qubit photons.
    pub error: f64,
    pub ratio: f64,
    pub ratio_over_mu: f64,
    /// (μ/2)·r2/r1 with r_n the threefold rate of an n-photon pulse.
    pub leading_order: f64,
    pub partner_lost: f64,
    pub same_port: f64,
    pub partner_detected: f64,
}

#[derive(Clone, Debug)]
pub struct NoiseReport {
    pub herald_ratio: f64,
    pub qubit_detection_prob: f64,
    pub rows: Vec<NoiseRow>,
}

/// Valid versus error threefold rates as the coherent-state amplitude grows.
pub fn run_noise_tradeoff(cfg: &ExperimentConfig) -> Result<NoiseReport> {
    cfg.validate()?;
    let herald = herald_ratio(&cfg.apparatus)?;
    let qubit = qubit_detection_prob(&cfg.apparatus)?;
    let rows = cfg
        .run
        .noise_mu
        .par_iter()
        .map(|&mu| noise_row(&cfg.apparatus, mu, cfg.run.gate_angle_deg.to_radians()))
        .collect::<Result<Vec<_>>>()?;
    Ok(NoiseReport {
        herald_ratio: herald,
        qubit_detection_prob: qubit,
        rows,
    })
}

pub fn noise_row(apparatus: &ApparatusConfig, mu: f64, gate_angle: f64) -> Result<NoiseRow> {
    let mut c = apparatus.clone();
    c.source.qubit_source = QubitSourceKind::Coherent;
    c.source.mu = mu;
    c.source.qubit = Qubit::plus();
    let circuit = build_full_apparatus(&c)?;
    let d = circuit.detectors_at(Analyzer::Open, Analyzer::Angle(gate_angle), Analyzer::Open);
    let pattern = ClickPattern::all_fired(&d);
    let out3 = circuit.ports().out3;
    let arm_losses: Vec<_> = ["loss-in2", "loss-in3"]
        .iter()
        .filter_map(|n| circuit.channel(n).ok())
        .filter(|ch| circuit.registry().role(*ch) == Some(ChannelRole::Loss))
        .collect();
    let by = circuit.probability_by(
        &d,
        &pattern,
        |s| s.pairs == 1 && s.coherent_photons >= 1,
        |s: &Sector, k| {
            if s.coherent_photons == 1 {
                None
            } else if arm_losses.iter().any(|ch| k.photons_in(*ch) > 0) {
                Some(ErrorPath::PartnerLost)
            } else if k.photons_in(out3) >= 2 {
                Some(ErrorPath::SamePort)
            } else {
                Some(ErrorPath::PartnerDetected)
            }
        },
    )?;
    let get = |k: Option<ErrorPath>| by.get(&k).copied().unwrap_or(0.0);
    let valid = get(None);
    let (lost, same, detected) = (
        get(Some(ErrorPath::PartnerLost)),
        get(Some(ErrorPath::SamePort)),
        get(Some(ErrorPath::PartnerDetected)),
    );
    let error = lost + same + detected;

    let rate = |n: usize| -> Result<f64> {
        let mut r = 0.0;
        for b in circuit.outputs().iter().filter(|b| {
            b.sector
                == Sector {
                    coherent_photons: n,
                    pairs: 1,
                }
        }) {
            r += crate::detection::click_probability(&b.state, &d, &pattern)?;
        }
        Ok(r)
    };
    let (r1, r2) = (rate(1)?, rate(2)?);
    let ratio = if valid > 0.0 { error / valid } else { 0.0 };
    Ok(NoiseRow {
        mu,
        valid,
        error,
        ratio,
        ratio_over_mu: if mu > 0.0 { ratio / mu } else { 0.0 },
        leading_order: if r1 > 0.0 { 0.5 * mu * r2 / r1 } else { 0.0 },
        partner_lost: lost,
        same_port: same,
        partner_detected: detected,
    })
}

/// Visibility observables of the fringe scenario without sampling.
pub fn fringe_observables(cfg: &ExperimentConfig) -> Result<(FringeFit, FringeFit)> {
    let r = run_fringe(cfg, Sampling::Exact)?;
    Ok((r.exact_fit, r.expected_fit))
}

/// desired:undesired ratio of the eight H/V settings.
pub fn ghz_basis_ratio(cfg: &ExperimentConfig) -> Result<f64> {
    let circuit = with_qubit(&cfg.apparatus, Qubit::plus())?;
    let settings = ghz_settings(0.0, FRAC_PI_2, ['0', '1']);
    let mut sums = BTreeMap::new();
    let probs: Vec<f64> = settings
        .par_iter()
        .map(|s| circuit.threefold(s.theta1, s.theta2, s.theta3))
        .collect::<Result<_>>()?;
    for (s, p) in settings.iter().zip(probs) {
        *sums
            .entry(s.label == "000" || s.label == "111")
            .or_insert(0.0) += p;
    }
    Ok(ghz_ratio(
        sums.get(&true).copied().unwrap_or(0.0),
        sums.get(&false).copied().unwrap_or(0.0),
    ))
}
