//! Splits the ideal encoder's pre-detection state into the one-gate-photon
//! sector and its orthogonal remainder.

use photonic_encoder::encoder::{build_ideal_encoder, verify_decomposition};
use photonic_encoder::sources::Qubit;

fn main() -> photonic_encoder::Result<()> {
    let q = Qubit::linear(30f64.to_radians());
    let r = verify_decomposition(&build_ideal_encoder(q)?)?;
    println!("encoded weight    {:.12}", r.encoded_weight);
    println!("orthogonal weight {:.12}", r.orthogonal_weight);
    println!("overlap           {:.1e}", r.orthogonality_residual);
    println!("encoded fidelity  {:.12}", r.encoded_fidelity);
    for (n, w) in &r.gate_photon_census {
        println!("  {n} gate photons: {w:.6}");
    }
    for (ket, a) in &r.orthogonal_kets {
        println!("  {ket}: {:.4}{:+.4}i", a.re, a.im);
    }
    Ok(())
}
