//! Ideal encoder: success probability and output fidelity for a few
//! qubits, then the full bench's threefold tables for |0⟩ and |1⟩.

use photonic_encoder::encoder::{build_ideal_encoder, encode};
use photonic_encoder::experiments::{run_basis_states, ExperimentConfig, Sampling};
use photonic_encoder::sources::Qubit;

fn main() -> photonic_encoder::Result<()> {
    for (name, q) in [
        ("|0>", Qubit::zero()),
        ("|1>", Qubit::one()),
        ("45deg", Qubit::plus()),
        ("20deg", Qubit::linear(20f64.to_radians())),
    ] {
        let r = encode(q.alpha(), q.beta(), &build_ideal_encoder(q)?)?;
        println!(
            "{name}: success {:.6}, fidelity {:.12}",
            r.success_probability,
            r.fidelity(q.alpha(), q.beta())?
        );
    }
    let report = run_basis_states(&ExperimentConfig::preset("ideal")?, Sampling::Poisson)?;
    for (name, table) in [
        ("input |0>", &report.input_zero),
        ("input |1>", &report.input_one),
    ] {
        println!("{name}");
        for r in table {
            println!(
                "  {} p={:.4} counts={}",
                r.setting,
                r.prob_per_pulse,
                r.counts.unwrap_or(0)
            );
        }
    }
    Ok(())
}
