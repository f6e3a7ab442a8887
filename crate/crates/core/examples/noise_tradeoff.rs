//! Valid against error threefold rates as the weak coherent qubit source
//! gets brighter.

use photonic_encoder::experiments::{run_noise_tradeoff, ExperimentConfig};

fn main() -> photonic_encoder::Result<()> {
    let r = run_noise_tradeoff(&ExperimentConfig::preset("paper-calibrated")?)?;
    println!(
        "herald ratio {:.4}, qubit detection {:.3e}",
        r.herald_ratio, r.qubit_detection_prob
    );
    println!("mu,valid,error,ratio,ratio/mu,partner_lost,same_port,partner_detected");
    for row in &r.rows {
        println!(
            "{:.0e},{:.3e},{:.3e},{:.3e},{:.3},{:.2e},{:.2e},{:.2e}",
            row.mu,
            row.valid,
            row.error,
            row.ratio,
            row.ratio_over_mu,
            row.partner_lost,
            row.same_port,
            row.partner_detected
        );
    }
    Ok(())
}
