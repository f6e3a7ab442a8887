//! Passive optical elements expressed as mode unitaries.
//!
//! Every element acts identically on each internal label. Elements with
//! separate input and output ports (PBS, BS) are completed to a unitary on
//! all four channels by the block form `[[0, W†], [W, 0]]`, where `W` maps
//! input modes to output modes; output ports are expected to be empty when
//! the element is applied.

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{Channel, ModeId, ModeUnitary, Pol, C64};

type Block = [[C64; 2]; 2];

fn re(x: f64) -> C64 {
    Complex64::new(x, 0.0)
}

/// PBS conventions. Reflection of V picks up `e^{i reflection_phase}`;
/// `leakage` is the fraction of each polarization sent to the wrong port.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PbsParams {
    pub reflection_phase: f64,
    #[serde(default)]
    pub leakage: f64,
}

impl Default for PbsParams {
    fn default() -> Self {
        PbsParams {
            reflection_phase: FRAC_PI_2,
            leakage: 0.0,
        }
    }
}

impl PbsParams {
    /// Amplitude for a V photon to be reflected.
    pub fn reflection(&self) -> C64 {
        Complex64::from_polar((1.0 - self.leakage).sqrt(), self.reflection_phase)
    }

    fn blocks(&self) -> Result<(Block, Block)> {
        let eps = self.leakage;
        if !(0.0..=1.0).contains(&eps) {
            return Err(Error::BadParameter {
                name: "leakage",
                value: eps,
            });
        }
        let t = re((1.0 - eps).sqrt());
        let leak = Complex64::new(0.0, eps.sqrt());
        // rows (out_c, out_d), columns (in_a, in_b)
        let h = [[t, leak], [leak, t]];
        let ph = Complex64::from_polar(1.0, self.reflection_phase);
        let v = [[ph * leak, ph * t], [ph * t, ph * leak]];
        Ok((h, v))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ElementKind {
    Pbs,
    Bs,
    Hwp,
    Phase,
    LossTap,
}

/// One element with its channels resolved.
#[derive(Clone, Debug, PartialEq)]
pub enum Element {
    Pbs {
        ports: [Channel; 4],
        params: PbsParams,
    },
    Bs {
        ports: [Channel; 4],
        transmissivity: f64,
    },
    Hwp {
        channel: Channel,
        angle: f64,
    },
    Phase {
        channel: Channel,
        pol: Pol,
        phase: f64,
    },
    LossTap {
        channel: Channel,
        loss_channel: Channel,
        eta: f64,
    },
}

impl Element {
    pub fn kind(&self) -> ElementKind {
        match self {
            Element::Pbs { .. } => ElementKind::Pbs,
            Element::Bs { .. } => ElementKind::Bs,
            Element::Hwp { .. } => ElementKind::Hwp,
            Element::Phase { .. } => ElementKind::Phase,
            Element::LossTap { .. } => ElementKind::LossTap,
        }
    }

    pub fn channels(&self) -> Vec<Channel> {
        match self {
            Element::Pbs { ports, .. } | Element::Bs { ports, .. } => ports.to_vec(),
            Element::Hwp { channel, .. } | Element::Phase { channel, .. } => vec![*channel],
            Element::LossTap {
                channel,
                loss_channel,
                ..
            } => vec![*channel, *loss_channel],
        }
    }

    pub fn unitary(&self, internal_dim: usize) -> Result<ModeUnitary> {
        match *self {
            Element::Pbs { ports, params } => pbs_with(ports, params, internal_dim),
            Element::Bs {
                ports,
                transmissivity,
            } => bs(ports, transmissivity, internal_dim),
            Element::Hwp { channel, angle } => hwp(channel, angle, internal_dim),
            Element::Phase {
                channel,
                pol,
                phase: phi,
            } => phase(channel, pol, phi, internal_dim),
            Element::LossTap {
                channel,
                loss_channel,
                eta,
            } => loss_tap(channel, loss_channel, eta, internal_dim),
        }
    }
}

fn check_distinct(ports: &[Channel]) -> Result<()> {
    for (i, a) in ports.iter().enumerate() {
        if ports[i + 1..].contains(a) {
            return Err(Error::DuplicateChannel(a.to_string()));
        }
    }
    Ok(())
}

/// Four-port element from per-polarization 2×2 blocks `W_pol`
/// (rows: out_c, out_d; columns: in_a, in_b).
fn four_port(ports: [Channel; 4], internal_dim: usize, h: Block, v: Block) -> Result<ModeUnitary> {
    check_distinct(&ports)?;
    let mut modes = Vec::with_capacity(8 * internal_dim);
    for ch in ports {
        modes.extend(ModeId::all_in(ch, internal_dim));
    }
    let per_channel = 2 * internal_dim;
    let pos =
        |port: usize, pol: Pol, l: usize| port * per_channel + (pol as usize) * internal_dim + l;
    let n = modes.len();
    let mut m = DMatrix::<C64>::zeros(n, n);
    for (pol, w) in [(Pol::H, h), (Pol::V, v)] {
        for l in 0..internal_dim {
            for (x, input) in [0usize, 1].into_iter().enumerate() {
                for (y, output) in [2usize, 3].into_iter().enumerate() {
                    let (i, o) = (pos(input, pol, l), pos(output, pol, l));
                    m[(o, i)] = w[y][x];
                    m[(i, o)] = w[y][x].conj();
                }
            }
        }
    }
    ModeUnitary::new(modes, m)
}

/// Polarizing beamsplitter with the default conventions: H transmits
/// (in_a → out_c, in_b → out_d), V reflects with amplitude `i`
/// (in_a → out_d, in_b → out_c).
pub fn pbs(ports: [Channel; 4], internal_dim: usize) -> Result<ModeUnitary> {
    pbs_with(ports, PbsParams::default(), internal_dim)
}

pub fn pbs_with(
    ports: [Channel; 4],
    params: PbsParams,
    internal_dim: usize,
) -> Result<ModeUnitary> {
    let (h, v) = params.blocks()?;
    four_port(ports, internal_dim, h, v)
}

/// Polarization-preserving beamsplitter `[[√T, i√(1−T)], [i√(1−T), √T]]`.
pub fn bs(ports: [Channel; 4], transmissivity: f64, internal_dim: usize) -> Result<ModeUnitary> {
    if !(0.0..=1.0).contains(&transmissivity) {
        return Err(Error::BadTransmissivity(transmissivity));
    }
    let t = re(transmissivity.sqrt());
    let r = Complex64::new(0.0, (1.0 - transmissivity).sqrt());
    let w = [[t, r], [r, t]];
    four_port(ports, internal_dim, w, w)
}

/// In-place 2×2 action on the (H, V) modes of one channel.
fn polarization_map(channel: Channel, internal_dim: usize, w: Block) -> Result<ModeUnitary> {
    let modes = ModeId::all_in(channel, internal_dim);
    let n = modes.len();
    let mut m = DMatrix::<C64>::zeros(n, n);
    for l in 0..internal_dim {
        for (r, row) in w.iter().enumerate() {
            for (c, &val) in row.iter().enumerate() {
                m[(r * internal_dim + l, c * internal_dim + l)] = val;
            }
        }
    }
    ModeUnitary::new(modes, m)
}

/// Half-wave plate with its optic axis at `angle` from H:
/// `[[cos 2θ, sin 2θ], [sin 2θ, −cos 2θ]]` on (H, V).
pub fn hwp(channel: Channel, angle: f64, internal_dim: usize) -> Result<ModeUnitary> {
    let theta = angle.rem_euclid(PI);
    let (s, c) = (2.0 * theta).sin_cos();
    polarization_map(channel, internal_dim, [[re(c), re(s)], [re(s), re(-c)]])
}

/// Multiplies the amplitude of (channel, pol) by `e^{iφ}`.
pub fn phase(channel: Channel, pol: Pol, phi: f64, internal_dim: usize) -> Result<ModeUnitary> {
    let p = Complex64::from_polar(1.0, phi);
    let one = re(1.0);
    let zero = re(0.0);
    let w = match pol {
        Pol::H => [[p, zero], [zero, one]],
        Pol::V => [[one, zero], [zero, p]],
    };
    polarization_map(channel, internal_dim, w)
}

/// Beamsplitter of transmissivity `eta` between `channel` and its dedicated
/// loss channel, per (pol, internal) pair.
pub fn loss_tap(
    channel: Channel,
    loss_channel: Channel,
    eta: f64,
    internal_dim: usize,
) -> Result<ModeUnitary> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::BadParameter {
            name: "eta",
            value: eta,
        });
    }
    check_distinct(&[channel, loss_channel])?;
    let mut modes = ModeId::all_in(channel, internal_dim);
    modes.extend(ModeId::all_in(loss_channel, internal_dim));
    let half = 2 * internal_dim;
    let (t, r) = (eta.sqrt(), (1.0 - eta).sqrt());
    let mut m = DMatrix::<C64>::zeros(2 * half, 2 * half);
    for i in 0..half {
        m[(i, i)] = re(t);
        m[(i + half, i)] = re(r);
        m[(i, i + half)] = re(-r);
        m[(i + half, i + half)] = re(t);
    }
    ModeUnitary::new(modes, m)
}

/// Rotation taking (H, V) to (accepted, rejected) =
/// (cos θ H + sin θ V, −sin θ H + cos θ V). Row 0 holds the accepted mode.
pub fn analyzer_basis(theta: f64) -> Matrix2<C64> {
    let (s, c) = theta.sin_cos();
    Matrix2::new(re(c), re(s), re(-s), re(c))
}

/// Unitary re-expressing `channel` in an analyzer basis: afterwards the H
/// slot holds the accepted polarization and the V slot the rejected one.
pub fn analyzer(channel: Channel, theta: f64, internal_dim: usize) -> Result<ModeUnitary> {
    let r = analyzer_basis(theta);
    polarization_map(
        channel,
        internal_dim,
        [[r[(0, 0)], r[(0, 1)]], [r[(1, 0)], r[(1, 1)]]],
    )
}
