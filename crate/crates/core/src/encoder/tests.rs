use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4, PI};

use num_complex::Complex64;
use proptest::prelude::*;

use super::*;
use crate::fock::ModeId;
use crate::sources::{Coupling, QubitSourceKind};

fn c(re: f64) -> C64 {
    Complex64::new(re, 0.0)
}

fn qubit(a: (f64, f64), b: (f64, f64)) -> Qubit {
    Qubit::normalized(Complex64::new(a.0, a.1), Complex64::new(b.0, b.1)).unwrap()
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() < tol
}

#[test]
fn basis_states_encode_to_repeated_basis_states() {
    let circuit = build_ideal_encoder(Qubit::zero()).unwrap();
    for (alpha, beta) in [
        (c(1.0), c(0.0)),
        (c(0.0), c(1.0)),
        (c(FRAC_1_SQRT_2), c(FRAC_1_SQRT_2)),
    ] {
        let r = encode(alpha, beta, &circuit).unwrap();
        assert!(close(r.success_probability, 0.5, 1e-12));
        assert!(close(r.fidelity(alpha, beta).unwrap(), 1.0, 1e-12));
        for o in &r.outcomes {
            assert!(close(o.probability, 0.25, 1e-12));
            assert!(close(o.state.purity(), 1.0, 1e-12));
        }
    }
}

#[test]
fn feed_forward_table() {
    let [plus, minus] = FeedForward::table();
    assert!(close(plus.phase, 0.0, 1e-15));
    assert!(close(minus.phase, PI, 1e-15));
}

#[test]
fn compensation_follows_the_reflection_conventions() {
    let ideal = build_ideal_encoder(Qubit::zero()).unwrap();
    assert!(close(ideal.compensation().rem_euclid(2.0 * PI), PI, 1e-12));
    let full = build_full_apparatus(&ApparatusConfig::ideal(Qubit::zero())).unwrap();
    assert!(close(full.compensation().rem_euclid(2.0 * PI), 0.0, 1e-12));
}

#[test]
fn zero_qubit_cannot_be_encoded() {
    let circuit = build_ideal_encoder(Qubit::zero()).unwrap();
    assert!(matches!(
        encode(c(0.0), c(0.0), &circuit),
        Err(Error::ZeroProbabilityPattern)
    ));
}

#[test]
fn ghz_state_of_the_ideal_encoder() {
    let circuit = build_ideal_encoder(Qubit::plus()).unwrap();
    let ghz = ghz_state(&circuit).unwrap();
    let p = circuit.ports();
    let three = |pol| {
        FockKet::from_occupations([p.gate, p.out1, p.out3].map(|ch| (ModeId::new(ch, pol, 0), 1)))
    };
    let target = PureState::from_terms(
        circuit.fock_config(),
        [
            (three(Pol::H), c(FRAC_1_SQRT_2)),
            (three(Pol::V), c(FRAC_1_SQRT_2)),
        ],
    )
    .unwrap();
    assert!(close(ghz.fidelity(&target), 1.0, 1e-12));
    let lopsided = build_ideal_encoder(Qubit::linear(0.3)).unwrap();
    assert!(matches!(ghz_state(&lopsided), Err(Error::AsymmetricInput)));
}

#[test]
fn ghz_basis_settings() {
    let circuit = build_ideal_encoder(Qubit::plus()).unwrap();
    for bits in 0..8 {
        let t = |i: usize| if bits >> i & 1 == 1 { FRAC_PI_2 } else { 0.0 };
        let p = circuit.threefold(t(0), t(1), t(2)).unwrap();
        let want = if bits == 0 || bits == 7 { 0.25 } else { 0.0 };
        assert!(close(p, want, 1e-12), "{bits:03b}: {p}");
    }
}

/// GHZ algebra in the ±45° basis without any Fock machinery:
/// ⟨s1 s2 s3|(|HHH⟩ + |VVV⟩)/√2 = (1 + s1 s2 s3) / 4.
fn ghz_diagonal_oracle(s: [f64; 3]) -> f64 {
    let amp = (1.0 + s[0] * s[1] * s[2]) / 4.0;
    amp * amp
}

#[test]
fn ghz_diagonal_settings_match_the_oracle() {
    let circuit = build_ideal_encoder(Qubit::plus()).unwrap();
    let mut table = Vec::new();
    for bits in 0..8 {
        let s = [0, 1, 2].map(|i| if bits >> i & 1 == 1 { -1.0 } else { 1.0 });
        let angle = |x: f64| if x > 0.0 { FRAC_PI_4 } else { -FRAC_PI_4 };
        table.push((
            s,
            circuit
                .threefold(angle(s[0]), angle(s[1]), angle(s[2]))
                .unwrap(),
        ));
    }
    let total: f64 = table.iter().map(|(_, p)| p).sum();
    assert!(close(total, 0.5, 1e-12));
    for (s, p) in table {
        assert!(close(p / total, ghz_diagonal_oracle(s), 1e-12), "{s:?}");
    }
}

#[test]
fn decomposition_of_the_pre_detection_state() {
    let circuit = build_ideal_encoder(qubit((0.6, 0.0), (0.0, 0.8))).unwrap();
    let r = verify_decomposition(&circuit).unwrap();
    assert!(close(r.encoded_weight, 0.5, 1e-12));
    assert!(close(r.orthogonal_weight, 0.5, 1e-12));
    assert!(r.orthogonality_residual < 1e-12);
    assert!(r.amplitude_error < 1e-12);
    assert!(close(r.encoded_fidelity, 1.0, 1e-12));
    assert!(r.gate_photon_census.keys().all(|&n| n == 0 || n == 2));
    assert!(!r.orthogonal_kets.is_empty());
    let full = build_full_apparatus(&ApparatusConfig::ideal(Qubit::zero())).unwrap();
    assert!(verify_decomposition(&full).is_err());
}

#[test]
fn full_apparatus_reduces_to_the_ideal_encoder() {
    let q = qubit((0.3, 0.2), (-0.5, 0.7));
    let ideal = build_ideal_encoder(q).unwrap();
    let full = build_full_apparatus(&ApparatusConfig::ideal(q)).unwrap();
    for (t1, t2, t3) in [
        (0.0, FRAC_PI_4, 0.0),
        (0.3, 1.1, 2.0),
        (FRAC_PI_2, -FRAC_PI_4, 0.7),
    ] {
        let a = ideal.threefold(t1, t2, t3).unwrap();
        let b = full.threefold(t1, t2, t3).unwrap();
        assert!(close(b, 0.5 * a, 1e-12), "{a} {b}");
    }
    let ri = encode(q.alpha(), q.beta(), &ideal).unwrap();
    let rf = encode(q.alpha(), q.beta(), &full).unwrap();
    assert!(close(
        rf.success_probability,
        0.5 * ri.success_probability,
        1e-12
    ));
    assert!(close(rf.fidelity(q.alpha(), q.beta()).unwrap(), 1.0, 1e-12));
}

#[test]
fn distinguishable_qubit_photon_fills_in_the_cross_terms() {
    let mut cfg = ApparatusConfig::ideal(Qubit::plus());
    let table = |cfg: &ApparatusConfig| {
        let circuit = build_full_apparatus(cfg).unwrap();
        [(FRAC_PI_4, -FRAC_PI_4), (-FRAC_PI_4, FRAC_PI_4)]
            .map(|(a, b)| circuit.threefold(a, FRAC_PI_4, b).unwrap())
    };
    for p in table(&cfg) {
        assert!(p.abs() < 1e-14);
    }
    cfg.overlaps = crate::sources::OverlapSpec::encoder(0.5, 1.0).unwrap();
    for p in table(&cfg) {
        assert!(p > 1e-4);
    }
}

#[test]
fn success_and_failure_weights_add_up() {
    let circuit = build_ideal_encoder(qubit((0.2, 0.0), (0.4, -0.3))).unwrap();
    let r = encode(circuit.qubit().alpha(), circuit.qubit().beta(), &circuit).unwrap();
    let p = circuit.ports();
    let failure = circuit.outputs()[0]
        .state
        .filter(|k| {
            !(k.photons_in(p.gate) == 1 && k.photons_in(p.out1) == 1 && k.photons_in(p.out3) == 1)
        })
        .norm_sqr();
    assert!(close(r.success_probability + failure, 1.0, 1e-10));
}

#[test]
fn coherent_source_sectors_carry_poisson_weights() {
    let mut cfg = ApparatusConfig::ideal(Qubit::plus());
    cfg.source.qubit_source = QubitSourceKind::Coherent;
    cfg.source.mu = 0.01;
    cfg.source.n_max = 2;
    cfg.source.pair_emission_prob = 0.1;
    cfg.source.coupling = Coupling {
        qubit: 1.0,
        arm2: 0.5,
        arm3: 0.5,
    };
    let circuit = build_full_apparatus(&cfg).unwrap();
    let total: f64 = circuit.inputs().iter().map(|b| b.weight).sum();
    assert!(close(total, 1.0, 1e-12));
    assert_eq!(circuit.inputs().len(), 6);
    assert_eq!(circuit.registry().with_role(ChannelRole::Loss).len(), 2);
    for b in circuit.outputs() {
        assert!(close(b.state.norm_sqr(), 1.0, 1e-10));
    }
}

#[test]
fn extra_elements_act_after_the_encoder() {
    let mut cfg = ApparatusConfig::ideal(Qubit::zero());
    cfg.extra_elements.push(ElementConfig {
        kind: crate::elements::ElementKind::Hwp,
        ports: vec!["out1".into()],
        params: [("angle_deg".to_string(), 45.0)].into(),
        pol: None,
    });
    let circuit = build_full_apparatus(&cfg).unwrap();
    assert!(circuit.threefold(0.0, FRAC_PI_4, 0.0).unwrap().abs() < 1e-14);
    assert!(circuit.threefold(FRAC_PI_2, FRAC_PI_4, 0.0).unwrap() > 0.1);
    cfg.extra_elements[0].ports = vec!["nowhere".into()];
    assert!(matches!(
        build_full_apparatus(&cfg),
        Err(Error::UnknownChannel(_))
    ));
}

#[test]
fn apparatus_config_round_trips_through_toml() {
    let mut cfg = ApparatusConfig::ideal(qubit((0.6, 0.0), (0.8, 0.0)));
    cfg.imperfections.pbs_leakage = 0.01;
    cfg.extra_elements.push(ElementConfig {
        kind: crate::elements::ElementKind::Phase,
        ports: vec!["out3".into()],
        params: [("phase_deg".to_string(), 12.5)].into(),
        pol: Some(Pol::H),
    });
    let text = toml::to_string(&cfg).unwrap();
    let back: ApparatusConfig = toml::from_str(&text).unwrap();
    assert_eq!(cfg, back);
}

#[test]
fn dump_lists_channels_elements_and_detectors() {
    let circuit = build_ideal_encoder(Qubit::zero()).unwrap();
    let text = circuit.dump();
    assert!(text.contains("channel 4 gate Gate"));
    assert!(text.contains("element 0 pbs in1 in2 out1 gate"));
    assert!(text.contains("detector gate gate analyzer_deg=4.50000000000e1"));
    assert_eq!(text, build_ideal_encoder(Qubit::zero()).unwrap().dump());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn every_qubit_is_encoded_faithfully_by_both_outcomes(a in (-1.0..1.0f64, -1.0..1.0f64), b in (-1.0..1.0f64, -1.0..1.0f64)) {
        prop_assume!(a.0 * a.0 + a.1 * a.1 + b.0 * b.0 + b.1 * b.1 > 1e-3);
        let q = qubit(a, b);
        let circuit = build_ideal_encoder(Qubit::zero()).unwrap();
        let r = encode(q.alpha(), q.beta(), &circuit).unwrap();
        prop_assert!(close(r.success_probability, 0.5, 1e-10));
        for o in &r.outcomes {
            let rho = polarization_density(&o.state, &r.channels).unwrap();
            let z = c(0.0);
            prop_assert!(close(polarization_fidelity(&rho, &[q.alpha(), z, z, q.beta()]), 1.0, 1e-10));
        }
    }

    #[test]
    fn encoding_is_linear(a in (-1.0..1.0f64, -1.0..1.0f64), b in (-1.0..1.0f64, -1.0..1.0f64)) {
        prop_assume!(a.0 * a.0 + a.1 * a.1 + b.0 * b.0 + b.1 * b.1 > 1e-3);
        let q = qubit(a, b);
        let circuit = build_ideal_encoder(Qubit::zero()).unwrap();
        let pure = |alpha, beta| -> Vec<PureState> {
            encode(alpha, beta, &circuit).unwrap().outcomes.into_iter().map(|o| o.state.into_pure().unwrap()).collect()
        };
        let zero = pure(c(1.0), c(0.0));
        let one = pure(c(0.0), c(1.0));
        let mixed = pure(q.alpha(), q.beta());
        for i in 0..2 {
            let combo = zero[i].clone().scaled(q.alpha()).plus(&one[i].clone().scaled(q.beta()));
            for (k, amp) in mixed[i].terms() {
                prop_assert!((combo.amplitude(k) - amp).norm() < 1e-10);
            }
            prop_assert!((combo.norm_sqr() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn decomposition_holds_for_every_qubit(a in (-1.0..1.0f64, -1.0..1.0f64), b in (-1.0..1.0f64, -1.0..1.0f64)) {
        prop_assume!(a.0 * a.0 + a.1 * a.1 + b.0 * b.0 + b.1 * b.1 > 1e-3);
        let r = verify_decomposition(&build_ideal_encoder(qubit(a, b)).unwrap()).unwrap();
        prop_assert!(close(r.encoded_weight, 0.5, 1e-12));
        prop_assert!(r.amplitude_error < 1e-12);
        prop_assert!(r.gate_photon_census.keys().all(|&n| n == 0 || n == 2));
    }
}
