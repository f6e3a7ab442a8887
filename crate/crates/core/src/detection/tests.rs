use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4, PI};

use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;

use super::*;
use crate::elements::loss_tap;
use crate::fock::{CreationOp, FockConfig, ModeId, ModeUnitary};
use crate::sources::{ideal_photon, Qubit};

const A: Channel = Channel(0);
const B: Channel = Channel(1);
const LOSS: Channel = Channel(9);

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn phi_plus() -> PureState {
    let h = |ch| FockKet::single(ModeId::new(ch, Pol::H, 0));
    let v = |ch| FockKet::single(ModeId::new(ch, Pol::V, 0));
    PureState::from_terms(
        FockConfig::default(),
        [
            (h(A).merge(&h(B)), c(FRAC_1_SQRT_2, 0.0)),
            (v(A).merge(&v(B)), c(FRAC_1_SQRT_2, 0.0)),
        ],
    )
    .unwrap()
}

fn random_state(coeffs: &[(f64, f64)]) -> PureState {
    let modes: Vec<ModeId> = [A, B]
        .iter()
        .flat_map(|&ch| ModeId::all_in(ch, 2))
        .collect();
    let ops: Vec<CreationOp> = coeffs
        .chunks(modes.len())
        .map(|chunk| {
            modes
                .iter()
                .zip(chunk)
                .map(|(m, &(re, im))| (*m, c(re, im)))
                .collect()
        })
        .collect();
    PureState::from_creation_product(FockConfig::default(), &ops)
        .unwrap()
        .normalized()
}

fn two_detectors(t1: f64, t2: f64, e1: f64, e2: f64) -> Vec<DetectorSpec> {
    vec![
        DetectorSpec::threshold("a", A, t1, e1),
        DetectorSpec::threshold("b", B, t2, e2),
    ]
}

#[test]
fn accepted_photon_fires_with_efficiency() {
    let s = ideal_photon(A, Qubit::zero());
    let d = [DetectorSpec::threshold(D1, A, 0.0, 1.0)];
    let p = ClickPattern::all_fired(&d);
    assert!((click_probability(&s, &d, &p).unwrap() - 1.0).abs() < 1e-15);
    let d = [DetectorSpec::threshold(D1, A, 0.0, 0.5)];
    assert!((click_probability(&s, &d, &p).unwrap() - 0.5).abs() < 1e-15);
    let d = [DetectorSpec::threshold(D1, A, FRAC_PI_2, 1.0)];
    assert!(click_probability(&s, &d, &p).unwrap().abs() < 1e-15);
}

#[test]
fn unknown_detector_is_rejected() {
    let d = two_detectors(0.0, 0.0, 1.0, 1.0);
    assert!(matches!(
        ClickPattern::new(&d, &["x"]),
        Err(Error::UnknownDetector(_))
    ));
    let other = ClickPattern::all_fired(&[DetectorSpec::open("z", A, 1.0)]);
    let err = click_probability(&phi_plus(), &d, &other).unwrap_err();
    assert!(matches!(err, Error::UnknownDetector(_)));
}

#[test]
fn non_commuting_analyzers_on_one_channel_are_rejected() {
    let d = [
        DetectorSpec::threshold("p", A, 0.0, 1.0),
        DetectorSpec::threshold("q", A, 0.5, 1.0),
    ];
    let err = click_probability(&phi_plus(), &d, &ClickPattern::all_fired(&d)).unwrap_err();
    assert!(matches!(err, Error::IncompatibleAnalyzers(_)));
}

#[test]
fn complementary_ports_split_the_channel() {
    let s = ideal_photon(A, Qubit::zero());
    let d = [
        DetectorSpec::threshold("plus", A, FRAC_PI_4, 1.0),
        DetectorSpec::threshold("minus", A, 3.0 * FRAC_PI_4, 1.0),
    ];
    let plus = click_probability(&s, &d, &ClickPattern::new(&d, &["plus"]).unwrap()).unwrap();
    let minus = click_probability(&s, &d, &ClickPattern::new(&d, &["minus"]).unwrap()).unwrap();
    assert!((plus - 0.5).abs() < 1e-14 && (minus - 0.5).abs() < 1e-14);
}

#[test]
fn resolving_detector_rejects_two_photons() {
    let h = ModeId::new(A, Pol::H, 0);
    let two = PureState::from_ket(FockKet::from_occupations([(h, 2)])).unwrap();
    let thr = [DetectorSpec::threshold("a", A, 0.0, 1.0)];
    let res = [thr[0].clone().with_counting(Counting::Resolving)];
    assert!((coincidence_probability(&two, &thr).unwrap() - 1.0).abs() < 1e-15);
    assert!(coincidence_probability(&two, &res).unwrap().abs() < 1e-15);
}

#[test]
fn analytic_efficiency_matches_explicit_loss_tap() {
    let s = random_state(&[
        (0.3, 0.1),
        (-0.2, 0.5),
        (0.7, 0.0),
        (0.1, -0.4),
        (0.2, 0.2),
        (0.5, 0.1),
        (-0.3, 0.3),
        (0.1, 0.0),
        (0.4, -0.1),
        (0.0, 0.6),
        (0.2, 0.0),
        (-0.5, 0.2),
        (0.3, 0.3),
        (0.1, 0.1),
        (0.6, -0.2),
        (0.2, 0.4),
    ]);
    for counting in [Counting::Threshold, Counting::Resolving] {
        for eta in [0.0, 0.19, 0.5, 0.93] {
            let analytic = vec![
                DetectorSpec::threshold("a", A, 0.3, eta).with_counting(counting),
                DetectorSpec::threshold("b", B, 1.1, 0.8).with_counting(counting),
            ];
            let ideal: Vec<DetectorSpec> = analytic
                .iter()
                .map(|d| DetectorSpec {
                    efficiency: if d.name == "a" { 1.0 } else { d.efficiency },
                    ..d.clone()
                })
                .collect();
            let lossy = s
                .apply_unitary(&loss_tap(A, LOSS, eta, 2).unwrap())
                .unwrap();
            let p_analytic = pattern_distribution(&s, &analytic).unwrap();
            let p_tap = pattern_distribution(&lossy, &ideal).unwrap();
            for ((pa, a), (pb, b)) in p_analytic.iter().zip(&p_tap) {
                assert_eq!(pa, pb);
                assert!((a - b).abs() < 1e-12, "{counting:?} eta={eta}: {a} vs {b}");
            }
        }
    }
}

#[test]
fn conditional_state_follows_the_heralding_basis() {
    let d = [DetectorSpec::threshold("a", A, 0.0, 1.0)];
    let out = conditional_state(&phi_plus(), &d, &ClickPattern::all_fired(&d)).unwrap();
    assert!((out.fidelity(&ideal_photon(B, Qubit::zero())) - 1.0).abs() < 1e-12);
    assert!(out.is_normalized());

    let d = [DetectorSpec::threshold("a", A, FRAC_PI_4, 1.0)];
    let out = conditional_state(&phi_plus(), &d, &ClickPattern::all_fired(&d)).unwrap();
    assert!((out.fidelity(&ideal_photon(B, Qubit::plus())) - 1.0).abs() < 1e-12);
}

#[test]
fn conditional_state_ignores_global_phase() {
    let d = [DetectorSpec::threshold("a", A, 0.7, 0.6)];
    let p = ClickPattern::all_fired(&d);
    let s = phi_plus();
    let rotated = s.clone().scaled(Complex64::from_polar(1.0, 1.234));
    let x = conditional_state(&s, &d, &p).unwrap();
    let y = conditional_state(&rotated, &d, &p).unwrap();
    assert!((x.fidelity(&y) - 1.0).abs() < 1e-12);
}

#[test]
fn open_detector_leaves_a_mixture() {
    let d = [DetectorSpec::open("a", A, 1.0)];
    let p = ClickPattern::all_fired(&d);
    let err = conditional_state(&phi_plus(), &d, &p).unwrap_err();
    assert!(matches!(err, Error::MixedConditionalState { purity } if (purity - 0.5).abs() < 1e-12));
    let m = conditional_mixture(&phi_plus(), &d, &p, &[]).unwrap();
    assert!((m.fidelity(&ideal_photon(B, Qubit::zero())) - 0.5).abs() < 1e-12);
}

#[test]
fn impossible_pattern_is_an_error() {
    let d = [DetectorSpec::threshold("a", A, 0.0, 1.0)];
    let s = ideal_photon(A, Qubit::one());
    let err = conditional_state(&s, &d, &ClickPattern::all_fired(&d)).unwrap_err();
    assert!(matches!(err, Error::ZeroProbabilityPattern));
}

#[test]
fn threefold_table_uses_named_detectors() {
    let s = ideal_photon(A, Qubit::zero())
        .tensor(&ideal_photon(B, Qubit::one()))
        .unwrap();
    let d = [
        DetectorSpec::threshold(D1, A, 0.0, 1.0),
        DetectorSpec::threshold(D3, B, 0.0, 1.0),
    ];
    let t = threefold_table(
        &s,
        &d,
        &[
            (0.0, 0.0),
            (0.0, FRAC_PI_2),
            (FRAC_PI_2, 0.0),
            (FRAC_PI_2, FRAC_PI_2),
        ],
    )
    .unwrap();
    let expected = [0.0, 1.0, 0.0, 0.0];
    for (a, b) in t.iter().zip(expected) {
        assert!((a - b).abs() < 1e-14);
    }
}

fn internal_mixer(angle: f64, phase: f64) -> ModeUnitary {
    let mut modes = Vec::new();
    for ch in [A, B] {
        for pol in Pol::BOTH {
            modes.push(ModeId::new(ch, pol, 0));
            modes.push(ModeId::new(ch, pol, 1));
        }
    }
    let (s, co) = angle.sin_cos();
    let e = Complex64::from_polar(1.0, phase);
    let mut m = DMatrix::zeros(8, 8);
    for blk in 0..4 {
        let i = 2 * blk;
        m[(i, i)] = c(co, 0.0);
        m[(i, i + 1)] = -e.conj() * s;
        m[(i + 1, i)] = e * s;
        m[(i + 1, i + 1)] = c(co, 0.0);
    }
    ModeUnitary::new(modes, m).unwrap()
}

fn coeff_strategy() -> impl Strategy<Value = Vec<(f64, f64)>> {
    proptest::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 16).prop_filter(
        "nonzero photons",
        |v| {
            v.chunks(8)
                .all(|ch| ch.iter().map(|(a, b)| a * a + b * b).sum::<f64>() > 1e-3)
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn patterns_sum_to_one(coeffs in coeff_strategy(), t1 in 0.0..PI, t2 in 0.0..PI, e1 in 0.0..=1.0f64, e2 in 0.0..=1.0f64) {
        let s = random_state(&coeffs);
        let dist = pattern_distribution(&s, &two_detectors(t1, t2, e1, e2)).unwrap();
        let total: f64 = dist.iter().map(|(_, p)| p).sum();
        prop_assert!((total - 1.0).abs() < 1e-10);
        for (_, p) in dist {
            prop_assert!((-1e-12..=1.0 + 1e-12).contains(&p));
        }
    }

    #[test]
    fn all_fire_probability_grows_with_efficiency(coeffs in coeff_strategy(), t1 in 0.0..PI, t2 in 0.0..PI, e1 in 0.0..=1.0f64, e2 in 0.0..=1.0f64, de in 0.0..=1.0f64) {
        let s = random_state(&coeffs);
        let lo = coincidence_probability(&s, &two_detectors(t1, t2, e1, e2)).unwrap();
        let hi = coincidence_probability(&s, &two_detectors(t1, t2, e1 + (1.0 - e1) * de, e2)).unwrap();
        prop_assert!(hi >= lo - 1e-12);
    }

    #[test]
    fn internal_basis_rotation_is_invisible(coeffs in coeff_strategy(), t1 in 0.0..PI, t2 in 0.0..PI, angle in 0.0..PI, phase in 0.0..PI) {
        let s = random_state(&coeffs);
        let r = s.apply_unitary(&internal_mixer(angle, phase)).unwrap();
        let d = two_detectors(t1, t2, 0.7, 0.9);
        let p = pattern_distribution(&s, &d).unwrap();
        let q = pattern_distribution(&r, &d).unwrap();
        for ((_, a), (_, b)) in p.iter().zip(&q) {
            prop_assert!((a - b).abs() < 1e-10);
        }
    }
}

#[test]
fn zero_probability_gives_zero_counts() {
    for seed in 0..10 {
        assert_eq!(sample_count(0.0, 76e6, 1200.0, seed, 0).unwrap(), 0);
    }
}

#[test]
fn sampled_counts_scatter_around_the_mean() {
    let mean = 1e-9 * 76e6 * 1200.0;
    assert!((mean - 91.2f64).abs() < 1e-9);
    let sigma = mean.sqrt();
    let draws: Vec<u64> = (0..100)
        .map(|seed| sample_count(1e-9, 76e6, 1200.0, seed, 0).unwrap())
        .collect();
    for &n in &draws {
        assert!((n as f64 - mean).abs() < 5.0 * sigma, "{n}");
    }
    let avg = draws.iter().sum::<u64>() as f64 / draws.len() as f64;
    assert!((avg - mean).abs() < 5.0 * sigma / 10.0);
}

#[test]
fn sampling_is_reproducible_per_seed() {
    let probs = [1e-9, 3e-9, 0.0, 2e-8];
    let a = sample_counts(&probs, 76e6, 1200.0, 42).unwrap();
    let b = sample_counts(&probs, 76e6, 1200.0, 42).unwrap();
    assert_eq!(a, b);
    assert_eq!(a[2], 0);
    assert_ne!(a, sample_counts(&probs, 76e6, 1200.0, 43).unwrap());
}

#[test]
fn count_csv_layout() {
    let r = CountRecord {
        setting: "HH".into(),
        theta1_deg: 0.0,
        theta3_deg: 90.0,
        prob_per_pulse: 0.5,
        counts: None,
        duration_s: 1200.0,
        pulse_rate_hz: 76e6,
        seed: 7,
    };
    let mut buf = Vec::new();
    write_count_csv(&mut buf, &[r]).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], COUNT_CSV_HEADER);
    assert_eq!(
        lines[1],
        "HH,0.00000000000e0,9.00000000000e1,5.00000000000e-1,,1.20000000000e3,7"
    );
}

fn fringe(v: f64, theta0: f64, mean: f64, angles: &[f64]) -> Vec<f64> {
    angles
        .iter()
        .map(|t| mean * (1.0 + v * (2.0 * (t - theta0)).cos()))
        .collect()
}

fn sweep(n: usize) -> Vec<f64> {
    (0..n).map(|i| i as f64 * PI / n as f64).collect()
}

#[test]
fn noiseless_full_visibility() {
    let angles = sweep(12);
    let fit = fit_fringe(
        &angles,
        &fringe(1.0, 0.3, 50.0, &angles),
        Weighting::Uniform,
    )
    .unwrap();
    assert!((fit.visibility - 1.0).abs() < 1e-6);
    assert!(fit.visibility_stderr < 1e-6);
    assert!((fit.phase - 0.3).abs() < 1e-9);
    assert!((fit.mean - 50.0).abs() < 1e-9);
}

#[test]
fn constant_counts_have_zero_visibility() {
    let angles = sweep(8);
    let fit = fit_fringe(&angles, &[40.0; 8], Weighting::Poisson).unwrap();
    assert_eq!(fit.visibility, 0.0);
}

#[test]
fn too_few_angles_is_degenerate() {
    let angles = [0.0, 0.5, 1.0, PI];
    let err = fit_fringe(&angles, &[1.0, 2.0, 3.0, 1.0], Weighting::Uniform).unwrap_err();
    assert!(matches!(err, Error::DegenerateFit(_)));
    let err = fit_fringe(&sweep(6), &[0.0; 6], Weighting::Poisson).unwrap_err();
    assert!(matches!(err, Error::DegenerateFit(_)));
}

#[test]
fn poisson_fit_is_unbiased_and_its_error_bar_is_honest() {
    let angles = sweep(12);
    let truth = fringe(0.66, 0.4, 30.0, &angles);
    let probs: Vec<f64> = truth.iter().map(|m| m / (76e6 * 1200.0)).collect();
    let fits: Vec<FringeFit> = (0..400)
        .map(|seed| {
            let counts: Vec<f64> = sample_counts(&probs, 76e6, 1200.0, seed)
                .unwrap()
                .into_iter()
                .map(|n| n as f64)
                .collect();
            fit_fringe(&angles, &counts, Weighting::Poisson).unwrap()
        })
        .collect();
    let n = fits.len() as f64;
    let mean_v = fits.iter().map(|f| f.visibility).sum::<f64>() / n;
    let spread = (fits
        .iter()
        .map(|f| (f.visibility - mean_v).powi(2))
        .sum::<f64>()
        / (n - 1.0))
        .sqrt();
    let reported = fits.iter().map(|f| f.visibility_stderr).sum::<f64>() / n;
    assert!(
        (mean_v - 0.66).abs() < 2.0 * spread / n.sqrt() + 0.01,
        "mean {mean_v}"
    );
    assert!(
        (reported / spread - 1.0).abs() < 0.2,
        "reported {reported} spread {spread}"
    );
    let within = fits
        .iter()
        .filter(|f| (f.visibility - 0.66).abs() < 2.0 * f.visibility_stderr)
        .count();
    assert!(within as f64 / n > 0.9);
    let expected = fit_fringe(&angles, &truth, Weighting::Poisson).unwrap();
    assert!((expected.visibility - 0.66).abs() < 1e-9);
    assert!((expected.visibility_stderr / spread - 1.0).abs() < 0.2);
}
