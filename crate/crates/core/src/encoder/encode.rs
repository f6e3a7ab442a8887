use std::collections::BTreeMap;
use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{polarization_density, polarization_fidelity, Circuit};
use crate::detection::{
    click_probability, conditional_mixture, Analyzer, ClickPattern, Mixture, GATE,
};
use crate::elements::phase;
use crate::error::{Error, Result};
use crate::fock::{Channel, FockKet, ModeId, Pol, PureState, C64};
use crate::sources::Qubit;

const SYMMETRY_TOL: f64 = 1e-9;

/// Correction applied to out1 V after the gate photon is found at
/// `gate_angle`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FeedForward {
    pub gate_angle: f64,
    pub phase: f64,
}

impl FeedForward {
    /// Projecting the gate photon onto cos θ|H⟩ + sin θ|V⟩ weights the
    /// encoded components by cos θ and sin θ; the correction removes the
    /// relative sign between them.
    pub fn for_angle(gate_angle: f64) -> Self {
        let (s, c) = gate_angle.sin_cos();
        let arg = |x: f64| Complex64::new(x, 0.0).arg();
        FeedForward {
            gate_angle,
            phase: (arg(c) - arg(s)).rem_euclid(2.0 * std::f64::consts::PI),
        }
    }

    /// Both outcomes of the 45° gate analyzer.
    pub fn table() -> [FeedForward; 2] {
        [
            FeedForward::for_angle(FRAC_PI_4),
            FeedForward::for_angle(3.0 * FRAC_PI_4),
        ]
    }
}

#[derive(Clone, Debug)]
pub struct GateOutcome {
    pub feed_forward: FeedForward,
    pub probability: f64,
    /// Corrected state of (out1, out3).
    pub state: Mixture,
}

#[derive(Clone, Debug)]
pub struct EncoderResult {
    pub outcomes: Vec<GateOutcome>,
    pub success_probability: f64,
    pub channels: [Channel; 2],
}

impl EncoderResult {
    /// Outcome-averaged two-qubit polarization density matrix.
    pub fn density(&self) -> Result<DMatrix<C64>> {
        let mut rho = DMatrix::zeros(4, 4);
        for o in &self.outcomes {
            rho += polarization_density(&o.state, &self.channels)?
                * Complex64::new(o.probability, 0.0);
        }
        Ok(rho / Complex64::new(self.success_probability, 0.0))
    }

    /// Fidelity with α|00⟩ + β|11⟩.
    pub fn fidelity(&self, alpha: C64, beta: C64) -> Result<f64> {
        let zero = Complex64::new(0.0, 0.0);
        Ok(polarization_fidelity(
            &self.density()?,
            &[alpha, zero, zero, beta],
        ))
    }
}

/// Runs the encoder on the qubit α|0⟩ + β|1⟩: for each gate outcome,
/// post-selects one photon in each output, applies the feed-forward phase,
/// and returns the conditional output states.
pub fn encode(alpha: C64, beta: C64, circuit: &Circuit) -> Result<EncoderResult> {
    if alpha.norm_sqr() + beta.norm_sqr() == 0.0 {
        return Err(Error::ZeroProbabilityPattern);
    }
    let c = circuit.with_qubit(Qubit::new(alpha, beta)?)?;
    encode_with(&c)
}

fn encode_with(c: &Circuit) -> Result<EncoderResult> {
    let ports = c.ports();
    let traced = c.unobserved_channels();
    let gate = c.detector(GATE)?.clone();
    let offset = c.analyzer_offset();
    let mut outcomes = Vec::new();
    for ff in FeedForward::table() {
        let det = [gate
            .clone()
            .with_analyzer(Analyzer::Angle(ff.gate_angle + offset))];
        let pattern = ClickPattern::all_fired(&det);
        let mut parts = Vec::new();
        let mut probability = 0.0;
        for b in c.outputs() {
            let s = b
                .state
                .filter(|k| k.photons_in(ports.out1) == 1 && k.photons_in(ports.out3) == 1);
            let p = click_probability(&s, &det, &pattern)?;
            if p <= 0.0 {
                continue;
            }
            probability += b.weight * p;
            for (w, st) in conditional_mixture(&s, &det, &pattern, &traced)?.components() {
                parts.push((b.weight * p * w, st.clone()));
            }
        }
        if probability <= 0.0 {
            continue;
        }
        let correction = phase(ports.out1, Pol::V, ff.phase, c.internal_dim())?;
        outcomes.push(GateOutcome {
            feed_forward: ff,
            probability,
            state: Mixture::new(parts)?.apply_unitary(&correction)?,
        });
    }
    if outcomes.is_empty() {
        return Err(Error::ZeroProbabilityPattern);
    }
    Ok(EncoderResult {
        success_probability: outcomes.iter().map(|o| o.probability).sum(),
        outcomes,
        channels: [ports.out1, ports.out3],
    })
}

fn require_symmetric(q: Qubit) -> Result<()> {
    if (q.alpha() - q.beta()).norm() > SYMMETRY_TOL {
        return Err(Error::AsymmetricInput);
    }
    Ok(())
}

/// State of (gate, out1, out3) given exactly one photon in each, before
/// any analyzer acts. Unobserved channels are traced out.
pub fn ghz_mixture(circuit: &Circuit) -> Result<Mixture> {
    require_symmetric(circuit.qubit())?;
    let p = circuit.ports();
    let traced = circuit.unobserved_channels();
    let mut parts = Vec::new();
    for b in circuit.outputs() {
        let s = b.state.filter(|k| {
            k.photons_in(p.gate) == 1 && k.photons_in(p.out1) == 1 && k.photons_in(p.out3) == 1
        });
        let norm = s.norm_sqr();
        if norm <= 0.0 {
            continue;
        }
        for (w, st) in
            conditional_mixture(&s, &[], &ClickPattern::all_fired(&[]), &traced)?.components()
        {
            parts.push((b.weight * norm * w, st.clone()));
        }
    }
    Mixture::new(parts)
}

/// Pure three-photon post-selected state; fails if it is mixed.
pub fn ghz_state(circuit: &Circuit) -> Result<PureState> {
    ghz_mixture(circuit)?.into_pure()
}

/// Decomposition of the pre-detection state of the ideal encoder into the
/// exactly-one-gate-photon sector and its complement.
#[derive(Clone, Debug)]
pub struct DecompositionReport {
    pub encoded_weight: f64,
    pub orthogonal_weight: f64,
    /// |⟨encoded|ψ⊥⟩|.
    pub orthogonality_residual: f64,
    /// Fidelity of the normalized encoded sector with α|000⟩ + β|111⟩.
    pub encoded_fidelity: f64,
    /// Largest deviation of encoded amplitudes from (α|000⟩ + β|111⟩)/√2.
    pub amplitude_error: f64,
    /// Weight of |ψ⊥⟩ by number of gate photons.
    pub gate_photon_census: BTreeMap<usize, f64>,
    /// Kets of |ψ⊥⟩ with channel names, and their amplitudes.
    pub orthogonal_kets: Vec<(String, C64)>,
}

pub fn verify_decomposition(circuit: &Circuit) -> Result<DecompositionReport> {
    if !circuit.is_ideal() {
        return Err(Error::Config(
            "the decomposition check needs the ideal encoder".into(),
        ));
    }
    let p = circuit.ports();
    let state = &circuit.outputs()[0].state;
    let encoded = state.filter(|k| k.photons_in(p.gate) == 1);
    let orthogonal = state.filter(|k| k.photons_in(p.gate) != 1);

    let q = circuit.qubit();
    let three = |pol: Pol| {
        FockKet::from_occupations([p.gate, p.out1, p.out3].map(|ch| (ModeId::new(ch, pol, 0), 1)))
    };
    let s = Complex64::new(FRAC_1_SQRT_2, 0.0);
    let target = PureState::from_terms(
        *state.config(),
        [
            (three(Pol::H), q.alpha() * s),
            (three(Pol::V), q.beta() * s),
        ],
    )?;
    let amplitude_error = encoded
        .terms()
        .map(|(k, a)| (a - target.amplitude(k)).norm())
        .chain(
            target
                .terms()
                .map(|(k, a)| (a - encoded.amplitude(k)).norm()),
        )
        .fold(0.0, f64::max);

    let mut census = BTreeMap::new();
    for (k, a) in orthogonal.terms() {
        *census.entry(k.photons_in(p.gate)).or_insert(0.0) += a.norm_sqr();
    }
    Ok(DecompositionReport {
        encoded_weight: encoded.norm_sqr(),
        orthogonal_weight: orthogonal.norm_sqr(),
        orthogonality_residual: encoded.inner_product(&orthogonal).norm(),
        encoded_fidelity: encoded.fidelity(&target),
        amplitude_error,
        gate_photon_census: census,
        orthogonal_kets: orthogonal
            .terms()
            .map(|(k, a)| (circuit.ket_label(k), *a))
            .collect(),
    })
}
