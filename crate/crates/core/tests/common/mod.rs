#![allow(dead_code)]

use itertools::Itertools;
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use photonic_encoder::fock::{FockKet, ModeId};
use photonic_encoder::sources::Qubit;

pub fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Haar-random unitary from the QR decomposition of a complex Gaussian matrix.
pub fn random_unitary<R: Rng>(rng: &mut R, n: usize) -> DMatrix<Complex64> {
    let z = DMatrix::from_fn(n, n, |_, _| {
        Complex64::new(
            rng.sample::<f64, _>(StandardNormal),
            rng.sample::<f64, _>(StandardNormal),
        )
    });
    let qr = z.qr();
    let (q, r) = (qr.q(), qr.r());
    let mut u = q;
    for j in 0..n {
        let d = r[(j, j)];
        let ph = if d.norm() > 0.0 { d / d.norm() } else { c(1.0) };
        for i in 0..n {
            u[(i, j)] *= ph;
        }
    }
    u
}

pub fn random_qubit<R: Rng>(rng: &mut R) -> Qubit {
    let z: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
    Qubit::normalized(Complex64::new(z[0], z[1]), Complex64::new(z[2], z[3]))
        .expect("nonzero amplitudes")
}

/// Every ket with `n` photons spread over `modes`.
pub fn all_kets(modes: &[ModeId], n: usize) -> Vec<FockKet> {
    (0..modes.len())
        .combinations_with_replacement(n)
        .map(|idx| {
            let counts = idx.iter().counts();
            FockKet::from_occupations(counts.into_iter().map(|(i, k)| (modes[*i], k as u8)))
        })
        .collect()
}
