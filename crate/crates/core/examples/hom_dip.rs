//! Coincidence rate behind a 50/50 beamsplitter as the overlap of the two
//! photons' wave packets goes from orthogonal to identical.

use num_complex::Complex64;
use photonic_encoder::detection::{coincidence_probability, DetectorSpec};
use photonic_encoder::elements::bs;
use photonic_encoder::fock::{Channel, FockConfig};
use photonic_encoder::sources::{photon, Qubit};

fn main() -> photonic_encoder::Result<()> {
    let cfg = FockConfig::default();
    let u = bs([Channel(0), Channel(1), Channel(2), Channel(3)], 0.5, 2)?;
    let dets = [
        DetectorSpec::open("c", Channel(2), 1.0),
        DetectorSpec::open("d", Channel(3), 1.0),
    ];
    println!("overlap,coincidence");
    for i in 0..=10 {
        let x = i as f64 / 10.0;
        let a = photon(
            Channel(0),
            Qubit::zero(),
            &[Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
            cfg,
        )?;
        let inner = [
            Complex64::new(x, 0.0),
            Complex64::new((1.0 - x * x).sqrt(), 0.0),
        ];
        let b = photon(Channel(1), Qubit::zero(), &inner, cfg)?;
        let out = a.tensor(&b)?.apply_unitary(&u)?;
        println!("{x:.1},{:.6}", coincidence_probability(&out, &dets)?);
    }
    Ok(())
}
