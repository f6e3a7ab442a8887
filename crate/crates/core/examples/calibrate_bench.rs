//! Refits the calibrated preset from a deliberately perturbed start.

use photonic_encoder::experiments::{calibrate, calibration_csv, ExperimentConfig, Parameter};

fn main() -> photonic_encoder::Result<()> {
    let mut cfg = ExperimentConfig::preset("paper-calibrated")?;
    Parameter::Overlap.set(&mut cfg.apparatus, 0.5);
    Parameter::ArmEfficiency.set(&mut cfg.apparatus, 0.5);
    Parameter::PbsLeakage.set(&mut cfg.apparatus, 0.0);
    let (_, report) = calibrate(&cfg)?;
    println!("rounds: {}", report.rounds);
    print!("{}", calibration_csv(&report));
    Ok(())
}
