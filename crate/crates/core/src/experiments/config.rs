use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::encoder::ApparatusConfig;
use crate::error::{Error, Result};

pub const IDEAL_PRESET: &str = include_str!("../../presets/ideal.toml");
pub const CALIBRATED_PRESET: &str = include_str!("../../presets/paper-calibrated.toml");

/// Schedule and counting statistics shared by all scenarios.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub pulse_rate_hz: f64,
    /// Integration time per analyzer setting.
    pub duration_s: f64,
    pub seed: u64,
    pub fringe_points: usize,
    pub fringe_theta1_deg: f64,
    pub gate_angle_deg: f64,
    /// Mean photon numbers swept by the noise scenario.
    pub noise_mu: Vec<f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            pulse_rate_hz: 76e6,
            duration_s: 1200.0,
            seed: 1,
            fringe_points: 12,
            fringe_theta1_deg: 45.0,
            gate_angle_deg: 45.0,
            noise_mu: vec![1e-4, 3e-4, 1e-3, 3e-3, 1e-2],
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.duration_s > 0.0 && self.duration_s.is_finite()) {
            return Err(Error::BadParameter {
                name: "duration_s",
                value: self.duration_s,
            });
        }
        if !(self.pulse_rate_hz > 0.0 && self.pulse_rate_hz.is_finite()) {
            return Err(Error::BadParameter {
                name: "pulse_rate_hz",
                value: self.pulse_rate_hz,
            });
        }
        if self.fringe_points < 4 {
            return Err(Error::BadParameter {
                name: "fringe_points",
                value: self.fringe_points as f64,
            });
        }
        if self.noise_mu.is_empty() {
            return Err(Error::Config("noise_mu schedule is empty".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Observable {
    /// Fitted fringe visibility on exact probabilities.
    Visibility,
    /// Standard error of the visibility expected at the configured statistics.
    FringeStderr,
    HeraldRatio,
    GhzRatio,
    QubitDetectionProb,
}

impl Observable {
    pub fn name(self) -> &'static str {
        match self {
            Observable::Visibility => "visibility",
            Observable::FringeStderr => "fringe_stderr",
            Observable::HeraldRatio => "herald_ratio",
            Observable::GhzRatio => "ghz_ratio",
            Observable::QubitDetectionProb => "qubit_detection_prob",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parameter {
    /// Overlap of the qubit photon with each pair photon.
    Overlap,
    /// Coupling transmission of both pair arms.
    ArmEfficiency,
    Mu,
    PbsLeakage,
    PairEmissionProb,
    AnalyzerOffsetDeg,
}

impl Parameter {
    pub fn name(self) -> &'static str {
        match self {
            Parameter::Overlap => "overlap",
            Parameter::ArmEfficiency => "arm_efficiency",
            Parameter::Mu => "mu",
            Parameter::PbsLeakage => "pbs_leakage",
            Parameter::PairEmissionProb => "pair_emission_prob",
            Parameter::AnalyzerOffsetDeg => "analyzer_offset_deg",
        }
    }

    pub fn get(self, cfg: &ApparatusConfig) -> f64 {
        match self {
            Parameter::Overlap => cfg.overlaps.get(0, 1).re,
            Parameter::ArmEfficiency => cfg.source.coupling.arm2,
            Parameter::Mu => cfg.source.mu,
            Parameter::PbsLeakage => cfg.imperfections.pbs_leakage,
            Parameter::PairEmissionProb => cfg.source.pair_emission_prob,
            Parameter::AnalyzerOffsetDeg => cfg.imperfections.analyzer_offset_deg,
        }
    }

    pub fn set(self, cfg: &mut ApparatusConfig, value: f64) {
        match self {
            Parameter::Overlap => {
                let v = num_complex::Complex64::new(value, 0.0);
                cfg.overlaps.set(0, 1, v);
                cfg.overlaps.set(0, 2, v);
            }
            Parameter::ArmEfficiency => {
                cfg.source.coupling.arm2 = value;
                cfg.source.coupling.arm3 = value;
            }
            Parameter::Mu => cfg.source.mu = value,
            Parameter::PbsLeakage => cfg.imperfections.pbs_leakage = value,
            Parameter::PairEmissionProb => cfg.source.pair_emission_prob = value,
            Parameter::AnalyzerOffsetDeg => cfg.imperfections.analyzer_offset_deg = value,
        }
    }

    /// Scale-type parameters are scanned on a log grid.
    pub fn logarithmic(self) -> bool {
        matches!(self, Parameter::Mu | Parameter::PairEmissionProb)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CalibrationTarget {
    pub observable: Observable,
    pub target: f64,
    pub tolerance: f64,
    pub parameter: Parameter,
    pub lower: f64,
    pub upper: f64,
}

impl CalibrationTarget {
    pub fn validate(&self) -> Result<()> {
        if !(self.lower.is_finite() && self.upper.is_finite() && self.lower < self.upper) {
            return Err(Error::Config(format!(
                "bounds of `{}` must be finite and increasing",
                self.parameter.name()
            )));
        }
        if self.parameter.logarithmic() && self.lower <= 0.0 {
            return Err(Error::Config(format!(
                "`{}` needs a positive lower bound",
                self.parameter.name()
            )));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::BadParameter {
                name: "tolerance",
                value: self.tolerance,
            });
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CalibrationConfig {
    pub max_rounds: usize,
    pub targets: Vec<CalibrationTarget>,
}

impl Default for CalibrationConfig {
    fn default() -> Self {
        CalibrationConfig {
            max_rounds: 3,
            targets: Vec::new(),
        }
    }
}

/// Everything a scenario needs: the bench, the schedule, and optional
/// calibration targets.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub apparatus: ApparatusConfig,
    #[serde(default)]
    pub run: RunConfig,
    #[serde(default)]
    pub calibration: CalibrationConfig,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> Result<String> {
        Ok(toml::to_string(self)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        ExperimentConfig::from_toml(&std::fs::read_to_string(path)?)
    }

    /// `ideal` or `paper-calibrated`.
    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "ideal" => ExperimentConfig::from_toml(IDEAL_PRESET),
            "paper-calibrated" => ExperimentConfig::from_toml(CALIBRATED_PRESET),
            other => Err(Error::Config(format!("unknown preset `{other}`"))),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.apparatus.validate()?;
        self.run.validate()?;
        for t in &self.calibration.targets {
            t.validate()?;
        }
        Ok(())
    }
}
