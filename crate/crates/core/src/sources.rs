//! Photon sources: ideal single photons, weak coherent pulses, and
//! down-conversion pairs, each carrying an internal-mode coefficient vector.
//!
//! Distinguishability is specified as a Gram matrix of pairwise overlaps
//! between source photons and realized by [`decompose_overlaps`], which
//! returns one coefficient vector per photon over a shared orthonormal
//! internal basis.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{factorial, Channel, CreationOp, FockConfig, ModeId, Pol, PureState, C64};

/// Coefficients of one photon over the internal-label basis.
pub type InternalVector = Vec<C64>;

const QUBIT_NORM_TOL: f64 = 1e-12;
const GRAM_TOL: f64 = 1e-10;

/// Polarization qubit α|H⟩ + β|V⟩.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "QubitRepr", into = "QubitRepr")]
pub struct Qubit {
    alpha: C64,
    beta: C64,
}

#[derive(Serialize, Deserialize)]
struct QubitRepr {
    alpha: [f64; 2],
    beta: [f64; 2],
}

impl TryFrom<QubitRepr> for Qubit {
    type Error = Error;
    fn try_from(r: QubitRepr) -> Result<Self> {
        Qubit::new(
            Complex64::new(r.alpha[0], r.alpha[1]),
            Complex64::new(r.beta[0], r.beta[1]),
        )
    }
}

impl From<Qubit> for QubitRepr {
    fn from(q: Qubit) -> Self {
        QubitRepr {
            alpha: [q.alpha.re, q.alpha.im],
            beta: [q.beta.re, q.beta.im],
        }
    }
}

impl Qubit {
    pub fn new(alpha: C64, beta: C64) -> Result<Self> {
        let norm = alpha.norm_sqr() + beta.norm_sqr();
        if (norm - 1.0).abs() > QUBIT_NORM_TOL {
            return Err(Error::BadParameter {
                name: "qubit norm",
                value: norm,
            });
        }
        Ok(Qubit { alpha, beta })
    }

    /// Normalizes an arbitrary nonzero pair.
    pub fn normalized(alpha: C64, beta: C64) -> Result<Self> {
        let n = (alpha.norm_sqr() + beta.norm_sqr()).sqrt();
        if n == 0.0 {
            return Err(Error::BadParameter {
                name: "qubit norm",
                value: 0.0,
            });
        }
        Qubit::new(alpha / n, beta / n)
    }

    pub fn zero() -> Self {
        Qubit {
            alpha: Complex64::new(1.0, 0.0),
            beta: Complex64::new(0.0, 0.0),
        }
    }

    pub fn one() -> Self {
        Qubit {
            alpha: Complex64::new(0.0, 0.0),
            beta: Complex64::new(1.0, 0.0),
        }
    }

    /// Linear polarization at `theta` from H.
    pub fn linear(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Qubit {
            alpha: Complex64::new(c, 0.0),
            beta: Complex64::new(s, 0.0),
        }
    }

    /// The 45° state (|0⟩ + |1⟩)/√2.
    pub fn plus() -> Self {
        Qubit::linear(std::f64::consts::FRAC_PI_4)
    }

    pub fn alpha(&self) -> C64 {
        self.alpha
    }

    pub fn beta(&self) -> C64 {
        self.beta
    }

    /// Creation operator for one photon in `channel` with this polarization
    /// and the given internal coefficients.
    pub fn creation_op(&self, channel: Channel, internal: &[C64]) -> CreationOp {
        let mut op = Vec::with_capacity(2 * internal.len());
        for (pol, p) in [(Pol::H, self.alpha), (Pol::V, self.beta)] {
            for (l, c) in internal.iter().enumerate() {
                let coeff = p * c;
                if coeff != Complex64::new(0.0, 0.0) {
                    op.push((ModeId::new(channel, pol, l as u8), coeff));
                }
            }
        }
        op
    }
}

/// Gram matrix of pairwise photon overlaps ⟨c_i, c_j⟩.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "OverlapRepr", into = "OverlapRepr")]
pub struct OverlapSpec {
    matrix: DMatrix<C64>,
}

#[derive(Serialize, Deserialize)]
struct OverlapRepr {
    matrix: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    imag: Option<Vec<Vec<f64>>>,
}

impl TryFrom<OverlapRepr> for OverlapSpec {
    type Error = Error;
    fn try_from(r: OverlapRepr) -> Result<Self> {
        let n = r.matrix.len();
        let get = |rows: &Vec<Vec<f64>>, i: usize, j: usize| -> Result<f64> {
            rows.get(i)
                .and_then(|row| row.get(j))
                .copied()
                .ok_or_else(|| Error::Config("overlap matrix must be square".into()))
        };
        let mut m = DMatrix::<C64>::zeros(n, n);
        for i in 0..n {
            if r.matrix[i].len() != n {
                return Err(Error::Config("overlap matrix must be square".into()));
            }
            for j in 0..n {
                let im = match &r.imag {
                    Some(rows) => get(rows, i, j)?,
                    None => 0.0,
                };
                m[(i, j)] = Complex64::new(get(&r.matrix, i, j)?, im);
            }
        }
        OverlapSpec::new(m)
    }
}

impl From<OverlapSpec> for OverlapRepr {
    fn from(o: OverlapSpec) -> Self {
        let n = o.matrix.nrows();
        let rows = |f: fn(&C64) -> f64| {
            (0..n)
                .map(|i| (0..n).map(|j| f(&o.matrix[(i, j)])).collect())
                .collect()
        };
        let has_imag = o.matrix.iter().any(|z| z.im != 0.0);
        OverlapRepr {
            matrix: rows(|z| z.re),
            imag: has_imag.then(|| rows(|z| z.im)),
        }
    }
}

impl OverlapSpec {
    pub fn new(matrix: DMatrix<C64>) -> Result<Self> {
        let n = matrix.nrows();
        if matrix.ncols() != n {
            return Err(Error::Config("overlap matrix must be square".into()));
        }
        for i in 0..n {
            if (matrix[(i, i)] - Complex64::new(1.0, 0.0)).norm() > GRAM_TOL {
                return Err(Error::NotPsd(format!("diagonal entry {i} is not 1")));
            }
            for j in 0..n {
                if (matrix[(i, j)] - matrix[(j, i)].conj()).norm() > GRAM_TOL {
                    return Err(Error::NotPsd(format!(
                        "entries ({i},{j}) and ({j},{i}) are not conjugate"
                    )));
                }
                if matrix[(i, j)].norm() > 1.0 + GRAM_TOL {
                    return Err(Error::NotPsd(format!("|O[{i},{j}]| exceeds 1")));
                }
            }
        }
        Ok(OverlapSpec { matrix })
    }

    pub fn from_real(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let m = DMatrix::from_fn(n, n, |i, j| Complex64::new(rows[i][j], 0.0));
        OverlapSpec::new(m)
    }

    /// Overlaps for (qubit photon, pair photon in arm 2, pair photon in arm 3).
    pub fn encoder(qubit_pair: f64, pair_pair: f64) -> Result<Self> {
        let (x, y) = (qubit_pair, pair_pair);
        OverlapSpec::from_real(&[vec![1.0, x, x], vec![x, 1.0, y], vec![x, y, 1.0]])
    }

    pub fn indistinguishable(n: usize) -> Self {
        OverlapSpec {
            matrix: DMatrix::from_element(n, n, Complex64::new(1.0, 0.0)),
        }
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn len(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.matrix[(i, j)]
    }

    /// Sets O[i,j] = value and O[j,i] = conj(value).
    pub fn set(&mut self, i: usize, j: usize, value: C64) {
        self.matrix[(i, j)] = value;
        self.matrix[(j, i)] = value.conj();
    }

    pub fn decompose(&self) -> Result<Vec<InternalVector>> {
        decompose_overlaps(&self.matrix)
    }
}

/// Realizes a Gram matrix as coefficient vectors over rank(O) internal labels.
///
/// Rank-revealing Cholesky, processing photons from last to first: each
/// photon either lies in the span of the labels opened so far or opens a new
/// label for its residual. Returned vectors all have length rank(O).
pub fn decompose_overlaps(o: &DMatrix<C64>) -> Result<Vec<InternalVector>> {
    let n = o.nrows();
    // pivots[l] = photon that opened label l
    let mut pivots: Vec<usize> = Vec::new();
    let mut vecs: Vec<Vec<C64>> = vec![Vec::new(); n];
    for i in (0..n).rev() {
        let mut c: Vec<C64> = Vec::with_capacity(pivots.len() + 1);
        for (l, &p) in pivots.iter().enumerate() {
            let mut s = o[(p, i)];
            for (m, cm) in c.iter().enumerate() {
                s -= vecs[p][m].conj() * cm;
            }
            c.push(s / vecs[p][l].re);
        }
        let residual = 1.0 - c.iter().map(|z| z.norm_sqr()).sum::<f64>();
        if residual < -GRAM_TOL {
            return Err(Error::NotPsd(format!(
                "negative residual {residual:e} at photon {i}"
            )));
        }
        if residual > GRAM_TOL {
            c.push(Complex64::new(residual.sqrt(), 0.0));
            pivots.push(i);
        }
        vecs[i] = c;
    }
    let rank = pivots.len().max(1);
    for v in vecs.iter_mut() {
        v.resize(rank, Complex64::new(0.0, 0.0));
    }
    for i in 0..n {
        for j in 0..n {
            let ip: C64 = vecs[i]
                .iter()
                .zip(&vecs[j])
                .map(|(a, b)| a.conj() * b)
                .sum();
            if (ip - o[(i, j)]).norm() > GRAM_TOL {
                return Err(Error::NotPsd(format!("cannot reproduce O[{i},{j}]")));
            }
        }
    }
    Ok(vecs)
}

/// Single photon α|H⟩ + β|V⟩ in `channel`, internal label 0.
pub fn ideal_photon(channel: Channel, qubit: Qubit) -> PureState {
    photon(
        channel,
        qubit,
        &[Complex64::new(1.0, 0.0)],
        FockConfig::default(),
    )
    .expect("one photon fits any truncation")
}

/// Single photon with an explicit internal coefficient vector.
pub fn photon(
    channel: Channel,
    qubit: Qubit,
    internal: &[C64],
    config: FockConfig,
) -> Result<PureState> {
    PureState::from_creation_product(config, &[qubit.creation_op(channel, internal)])
}

/// `n` photons in the same polarization/internal mode, `(f†)^n / √(n!) |0⟩`.
pub fn number_state(
    channel: Channel,
    qubit: Qubit,
    n: usize,
    internal: &[C64],
    config: FockConfig,
) -> Result<PureState> {
    let op = qubit.creation_op(channel, internal);
    let ops = vec![op; n];
    let state = PureState::from_creation_product(config, &ops)?;
    Ok(state.scaled(Complex64::new(1.0 / factorial(n).sqrt(), 0.0)))
}

/// Poisson probabilities e^{-μ} μ^n / n! for n = 0..=n_max, not renormalized.
pub fn poisson_raw(mu: f64, n_max: usize) -> Vec<f64> {
    (0..=n_max)
        .map(|n| (-mu).exp() * mu.powi(n as i32) / factorial(n))
        .collect()
}

/// Photon-number weights of the truncated, renormalized coherent state.
pub fn poisson_weights(mu: f64, n_max: usize) -> Vec<f64> {
    let raw = poisson_raw(mu, n_max);
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|p| p / total).collect()
}

/// Weak coherent pulse in the qubit's polarization mode, truncated at
/// `n_max` photons and renormalized over the kept terms.
pub fn weak_coherent(
    channel: Channel,
    qubit: Qubit,
    mu: f64,
    n_max: usize,
    internal: &[C64],
    config: FockConfig,
) -> Result<PureState> {
    if !(mu >= 0.0) {
        return Err(Error::BadParameter {
            name: "mu",
            value: mu,
        });
    }
    if n_max > config.max_photons {
        return Err(Error::TruncationExceeded {
            photons: n_max,
            max: config.max_photons,
        });
    }
    let weights = poisson_weights(mu, n_max);
    let mut state = PureState::zero(config);
    for (n, w) in weights.iter().enumerate() {
        if *w == 0.0 {
            continue;
        }
        let term = number_state(channel, qubit, n, internal, config)?;
        state = state.plus(&term.scaled(Complex64::new(w.sqrt(), 0.0)));
    }
    Ok(state)
}

/// One down-converted photon in each of `arm2` and `arm3`, both at 45°,
/// as they arrive at the first PBS. No polarization entanglement yet.
pub fn spdc_pair(
    arm2: Channel,
    arm3: Channel,
    c2: &[C64],
    c3: &[C64],
    config: FockConfig,
) -> Result<PureState> {
    if arm2 == arm3 {
        return Err(Error::DuplicateChannel(arm2.to_string()));
    }
    let plus = Qubit::plus();
    PureState::from_creation_product(
        config,
        &[plus.creation_op(arm2, c2), plus.creation_op(arm3, c3)],
    )
}

/// Two pairs emitted into the same modes, `(A†)² / ‖·‖ |0⟩` with
/// `A† = a†_2 a†_3`.
pub fn spdc_double_pair(
    arm2: Channel,
    arm3: Channel,
    c2: &[C64],
    c3: &[C64],
    config: FockConfig,
) -> Result<PureState> {
    let plus = Qubit::plus();
    let (o2, o3) = (plus.creation_op(arm2, c2), plus.creation_op(arm3, c3));
    let state = PureState::from_creation_product(config, &[o2.clone(), o3.clone(), o2, o3])?;
    Ok(state.normalized())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QubitSourceKind {
    SinglePhoton,
    Coherent,
}

/// Fiber-coupling transmission per source arm.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Coupling {
    pub qubit: f64,
    pub arm2: f64,
    pub arm3: f64,
}

impl Default for Coupling {
    fn default() -> Self {
        Coupling {
            qubit: 1.0,
            arm2: 1.0,
            arm3: 1.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SourceConfig {
    pub qubit_source: QubitSourceKind,
    /// Mean photon number of the input pulse (coherent source only).
    #[serde(default)]
    pub mu: f64,
    /// Coherent-state truncation.
    #[serde(default = "default_n_max")]
    pub n_max: usize,
    pub qubit: Qubit,
    pub pair_emission_prob: f64,
    /// Probability of a double pair per pulse; stress tests only.
    #[serde(default)]
    pub double_pair_prob: f64,
    #[serde(default)]
    pub coupling: Coupling,
}

fn default_n_max() -> usize {
    2
}

impl SourceConfig {
    pub fn ideal(qubit: Qubit) -> Self {
        SourceConfig {
            qubit_source: QubitSourceKind::SinglePhoton,
            mu: 0.0,
            n_max: 1,
            qubit,
            pair_emission_prob: 1.0,
            double_pair_prob: 0.0,
            coupling: Coupling::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let prob = |name: &'static str, v: f64| {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(Error::BadParameter { name, value: v })
            }
        };
        if !(self.mu >= 0.0 && self.mu.is_finite()) {
            return Err(Error::BadParameter {
                name: "mu",
                value: self.mu,
            });
        }
        prob("pair_emission_prob", self.pair_emission_prob)?;
        prob("double_pair_prob", self.double_pair_prob)?;
        prob(
            "pair_emission_prob + double_pair_prob",
            self.pair_emission_prob + self.double_pair_prob,
        )?;
        prob("coupling.qubit", self.coupling.qubit)?;
        prob("coupling.arm2", self.coupling.arm2)?;
        prob("coupling.arm3", self.coupling.arm3)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elements::pbs;
    use crate::fock::FockKet;
    use proptest::prelude::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    const Q: Channel = Channel(0);
    const S2: Channel = Channel(1);
    const S3: Channel = Channel(2);
    const LINK: Channel = Channel(3);
    const OUT3: Channel = Channel(4);

    fn one() -> Vec<C64> {
        vec![Complex64::new(1.0, 0.0)]
    }

    #[test]
    fn ideal_photon_examples() {
        let h = ideal_photon(Q, Qubit::zero());
        assert_eq!(
            h.amplitude(&FockKet::single(ModeId::new(Q, Pol::H, 0))),
            Complex64::new(1.0, 0.0)
        );
        assert_eq!(h.len(), 1);
        let v = ideal_photon(Q, Qubit::one());
        assert_eq!(
            v.amplitude(&FockKet::single(ModeId::new(Q, Pol::V, 0))),
            Complex64::new(1.0, 0.0)
        );
        let d = ideal_photon(Q, Qubit::plus());
        for pol in Pol::BOTH {
            let a = d.amplitude(&FockKet::single(ModeId::new(Q, pol, 0)));
            assert!((a.re - FRAC_1_SQRT_2).abs() < 1e-15);
        }
        assert!((d.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn qubit_must_be_normalized() {
        assert!(Qubit::new(Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)).is_err());
    }

    #[test]
    fn coherent_vacuum_at_zero_mu() {
        let s = weak_coherent(Q, Qubit::plus(), 0.0, 2, &one(), FockConfig::default()).unwrap();
        assert_eq!(s, PureState::vacuum());
    }

    #[test]
    fn coherent_two_to_one_ratio_is_half_mu() {
        let mu = 0.037;
        let raw = poisson_raw(mu, 2);
        assert!((raw[2] / raw[1] - mu / 2.0).abs() < 1e-15);
        let s = weak_coherent(Q, Qubit::zero(), mu, 2, &one(), FockConfig::default()).unwrap();
        let h = ModeId::new(Q, Pol::H, 0);
        let p1 = s.amplitude(&FockKet::single(h)).norm_sqr();
        let p2 = s.amplitude(&FockKet::from_occupations([(h, 2)])).norm_sqr();
        assert!((p2 / p1 - mu / 2.0).abs() < 1e-14);
        assert!((s.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn coherent_rejects_truncation_beyond_limit() {
        let err =
            weak_coherent(Q, Qubit::zero(), 0.1, 5, &one(), FockConfig::default()).unwrap_err();
        assert!(matches!(err, Error::TruncationExceeded { .. }));
    }

    #[test]
    fn coherent_single_photon_sector_matches_ideal_photon() {
        let q = Qubit::normalized(Complex64::new(0.3, 0.1), Complex64::new(-0.5, 0.8)).unwrap();
        let s = weak_coherent(Q, q, 0.2, 1, &one(), FockConfig::default()).unwrap();
        let one_photon = s.filter(|k| k.total_photons() == 1).normalized();
        assert!((one_photon.fidelity(&ideal_photon(Q, q)) - 1.0).abs() < 1e-12);
        for (k, a) in one_photon.terms() {
            assert!((ideal_photon(Q, q).amplitude(k) - a).norm() < 1e-12);
        }
    }

    #[test]
    fn spdc_pair_is_two_diagonal_photons() {
        let s = spdc_pair(S2, S3, &one(), &one(), FockConfig::default()).unwrap();
        assert_eq!(s.len(), 4);
        for (k, a) in s.terms() {
            assert_eq!(k.photons_in(S2), 1);
            assert_eq!(k.photons_in(S3), 1);
            assert!((a.re - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn spdc_post_selection_probability_is_half() {
        let s = spdc_pair(S2, S3, &one(), &one(), FockConfig::default()).unwrap();
        let after = s
            .apply_unitary(&pbs([S2, S3, LINK, OUT3], 1).unwrap())
            .unwrap();
        let kept = after.filter(|k| k.photons_in(LINK) == 1 && k.photons_in(OUT3) == 1);
        assert!((kept.norm_sqr() - 0.5).abs() < 1e-12);
        // polarization-correlated: only HH and VV survive
        for (k, _) in kept.terms() {
            let pols: Vec<Pol> = k.occupations().iter().map(|(m, _)| m.pol).collect();
            assert_eq!(pols[0], pols[1]);
        }
    }

    /// Two-photon amplitude oracle for the post-selected pair with
    /// wave-packet overlap `x`, written directly in the polarization basis.
    fn enumerated_pair_visibility(x: f64) -> f64 {
        // reflected VV term carries i·i = -1
        let p = |t: f64, f: f64| {
            0.25 * ((t.cos() * f.cos()).powi(2) + (t.sin() * f.sin()).powi(2)
                - 2.0 * x * x * t.cos() * f.cos() * t.sin() * f.sin())
        };
        let d = std::f64::consts::FRAC_PI_4;
        let (max, min) = (p(d, -d), p(d, d));
        (max - min) / (max + min)
    }

    #[test]
    fn spdc_distinguishability_lowers_pair_visibility() {
        for x in [1.0, 0.7, 0.0] {
            let labels = OverlapSpec::from_real(&[vec![1.0, x], vec![x, 1.0]])
                .unwrap()
                .decompose()
                .unwrap();
            let s = spdc_pair(S2, S3, &labels[0], &labels[1], FockConfig::default()).unwrap();
            let after = s
                .apply_unitary(&pbs([S2, S3, LINK, OUT3], labels[0].len()).unwrap())
                .unwrap();
            let kept = after.filter(|k| k.photons_in(LINK) == 1 && k.photons_in(OUT3) == 1);
            let k = labels[0].len();
            let prob = |t: f64, f: f64| {
                let rot = crate::elements::analyzer(LINK, t, k).unwrap();
                let rot3 = crate::elements::analyzer(OUT3, f, k).unwrap();
                let r = kept
                    .apply_unitary(&rot)
                    .unwrap()
                    .apply_unitary(&rot3)
                    .unwrap();
                r.filter(|k| {
                    k.photons_where(|m| m.spatial == LINK && m.pol == Pol::H) == 1
                        && k.photons_where(|m| m.spatial == OUT3 && m.pol == Pol::H) == 1
                })
                .norm_sqr()
            };
            let d = std::f64::consts::FRAC_PI_4;
            let (max, min) = (prob(d, -d), prob(d, d));
            let vis = (max - min) / (max + min);
            assert!(
                (vis - enumerated_pair_visibility(x)).abs() < 1e-12,
                "x={x}: {vis}"
            );
        }
    }

    #[test]
    fn decompose_identity_gives_orthonormal_labels() {
        let v = decompose_overlaps(&DMatrix::identity(3, 3)).unwrap();
        assert_eq!(v[0].len(), 3);
        for i in 0..3 {
            for j in 0..3 {
                let ip: C64 = v[i].iter().zip(&v[j]).map(|(a, b)| a.conj() * b).sum();
                assert!((ip.re - if i == j { 1.0 } else { 0.0 }).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn decompose_all_ones_shares_label_zero() {
        let v = OverlapSpec::indistinguishable(3).decompose().unwrap();
        for c in v {
            assert_eq!(c, vec![Complex64::new(1.0, 0.0)]);
        }
    }

    #[test]
    fn decompose_qubit_overlap_example() {
        let x = 0.8;
        let v = OverlapSpec::encoder(x, 1.0).unwrap().decompose().unwrap();
        assert_eq!(v[0].len(), 2);
        assert!((v[0][0].re - x).abs() < 1e-12);
        assert!((v[0][1].re - (1.0 - x * x).sqrt()).abs() < 1e-12);
        assert_eq!(v[1], v[2]);
    }

    #[test]
    fn decompose_rejects_indefinite_matrix() {
        let o = OverlapSpec::from_real(&[
            vec![1.0, 0.9, -0.9],
            vec![0.9, 1.0, 0.9],
            vec![-0.9, 0.9, 1.0],
        ])
        .unwrap();
        assert!(matches!(o.decompose(), Err(Error::NotPsd(_))));
        assert!(OverlapSpec::from_real(&[vec![1.0, 0.5], vec![0.4, 1.0]]).is_err());
    }

    #[test]
    fn overlap_spec_serde_round_trip() {
        let o = OverlapSpec::encoder(0.81, 0.95).unwrap();
        let text = toml::to_string(&o).unwrap();
        let back: OverlapSpec = toml::from_str(&text).unwrap();
        assert_eq!(o, back);
    }

    proptest! {
        #[test]
        fn decomposition_reproduces_random_gram_matrices(
            raw in proptest::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 8),
            rank in 1usize..=3,
        ) {
            // four photons with unit vectors in a `rank`-dimensional space
            let n = 4;
            let mut vecs: Vec<Vec<C64>> = (0..n)
                .map(|i| (0..rank).map(|d| {
                    let (a, b) = raw[(i * 2 + d) % raw.len()];
                    Complex64::new(a + 0.05 * (i + d) as f64, b)
                }).collect())
                .collect();
            for v in vecs.iter_mut() {
                let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                for z in v.iter_mut() { *z /= norm; }
            }
            let gram = DMatrix::from_fn(n, n, |i, j| vecs[i].iter().zip(&vecs[j]).map(|(a, b)| a.conj() * b).sum::<C64>());
            let labels = decompose_overlaps(&gram).unwrap();
            prop_assert!(labels[0].len() <= rank);
            for l in &labels {
                let norm: f64 = l.iter().map(|z| z.norm_sqr()).sum();
                prop_assert!((norm - 1.0).abs() < 1e-10);
            }
        }
    }
}
