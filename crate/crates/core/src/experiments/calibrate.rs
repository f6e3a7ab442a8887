use super::config::{CalibrationTarget, ExperimentConfig, Observable};
use super::scenarios::{fringe_observables, ghz_basis_ratio, herald_ratio, qubit_detection_prob};
use crate::error::{Error, Result};

const SCAN_POINTS: usize = 17;
const MAX_BISECTIONS: usize = 60;

/// Value of `observable` under `cfg`, computed from exact probabilities.
pub fn evaluate(cfg: &ExperimentConfig, observable: Observable) -> Result<f64> {
    match observable {
        Observable::Visibility => Ok(fringe_observables(cfg)?.0.visibility),
        Observable::FringeStderr => Ok(fringe_observables(cfg)?.1.visibility_stderr),
        Observable::HeraldRatio => herald_ratio(&cfg.apparatus),
        Observable::GhzRatio => ghz_basis_ratio(cfg),
        Observable::QubitDetectionProb => qubit_detection_prob(&cfg.apparatus),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FittedTarget {
    pub target: CalibrationTarget,
    pub value: f64,
    pub achieved: f64,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CalibrationReport {
    pub rounds: usize,
    pub fitted: Vec<FittedTarget>,
}

impl CalibrationReport {
    pub fn max_relative_residual(&self) -> f64 {
        self.fitted
            .iter()
            .map(|f| f.residual.abs() / f.target.tolerance)
            .fold(0.0, f64::max)
    }
}

fn grid(t: &CalibrationTarget) -> Vec<f64> {
    (0..SCAN_POINTS)
        .map(|i| {
            let u = i as f64 / (SCAN_POINTS - 1) as f64;
            if t.parameter.logarithmic() {
                (t.lower.ln() + u * (t.upper.ln() - t.lower.ln())).exp()
            } else {
                t.lower + u * (t.upper - t.lower)
            }
        })
        .collect()
}

fn midpoint(t: &CalibrationTarget, a: f64, b: f64) -> f64 {
    if t.parameter.logarithmic() {
        (a * b).sqrt()
    } else {
        0.5 * (a + b)
    }
}

fn residual_at(cfg: &ExperimentConfig, t: &CalibrationTarget, x: f64) -> Result<f64> {
    let mut c = cfg.clone();
    t.parameter.set(&mut c.apparatus, x);
    Ok(evaluate(&c, t.observable)? - t.target)
}

/// Solves one target for its parameter with the others held fixed.
fn solve(cfg: &ExperimentConfig, t: &CalibrationTarget) -> Result<(f64, f64)> {
    let current = t.parameter.get(&cfg.apparatus);
    let r0 = residual_at(cfg, t, current)?;
    if r0.abs() <= 1e-2 * t.tolerance {
        return Ok((current, r0));
    }
    let xs = grid(t);
    let rs = xs
        .iter()
        .map(|&x| residual_at(cfg, t, x))
        .collect::<Result<Vec<_>>>()?;
    let best = |xs: &[f64], rs: &[f64]| {
        xs.iter()
            .zip(rs)
            .map(|(x, r)| (*x, *r))
            .filter(|(_, r)| !r.is_nan())
            .min_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
    };
    let bracket = (0..SCAN_POINTS - 1)
        .filter(|&i| rs[i] == 0.0 || rs[i].signum() != rs[i + 1].signum())
        .filter(|&i| !rs[i].is_nan() && !rs[i + 1].is_nan())
        .min_by(|&i, &j| {
            let d = |k: usize| (midpoint(t, xs[k], xs[k + 1]) - current).abs();
            d(i).total_cmp(&d(j))
        });
    let Some(i) = bracket else {
        let (x, r) = best(&xs, &rs).unwrap_or((current, f64::INFINITY));
        if r.abs() <= t.tolerance {
            return Ok((x, r));
        }
        return Err(Error::CalibrationFailed {
            target: t.observable.name().into(),
            residual: r.abs(),
        });
    };
    let (mut a, mut b, mut ra) = (xs[i], xs[i + 1], rs[i]);
    let mut best_pt = if rs[i].abs() < rs[i + 1].abs() {
        (xs[i], rs[i])
    } else {
        (xs[i + 1], rs[i + 1])
    };
    for _ in 0..MAX_BISECTIONS {
        if best_pt.1.abs() <= 1e-3 * t.tolerance || (b - a).abs() <= 1e-12 * b.abs().max(1e-300) {
            break;
        }
        let m = midpoint(t, a, b);
        let rm = residual_at(cfg, t, m)?;
        if rm.abs() < best_pt.1.abs() {
            best_pt = (m, rm);
        }
        if rm.signum() == ra.signum() {
            a = m;
            ra = rm;
        } else {
            b = m;
        }
    }
    Ok(best_pt)
}

/// Fits each target's parameter by scan and bisection, cycling over the
/// targets until all sit within tolerance or the round budget runs out.
pub fn calibrate(cfg: &ExperimentConfig) -> Result<(ExperimentConfig, CalibrationReport)> {
    cfg.validate()?;
    let targets = &cfg.calibration.targets;
    if targets.is_empty() {
        return Err(Error::Config("no calibration targets".into()));
    }
    let mut fitted = cfg.clone();
    let mut rounds = 0;
    loop {
        rounds += 1;
        for t in targets {
            let (x, _) = solve(&fitted, t)?;
            t.parameter.set(&mut fitted.apparatus, x);
        }
        let report = CalibrationReport {
            rounds,
            fitted: targets
                .iter()
                .map(|t| {
                    let achieved = evaluate(&fitted, t.observable)?;
                    Ok(FittedTarget {
                        target: t.clone(),
                        value: t.parameter.get(&fitted.apparatus),
                        achieved,
                        residual: achieved - t.target,
                    })
                })
                .collect::<Result<_>>()?,
        };
        if report.max_relative_residual() <= 1.0 {
            return Ok((fitted, report));
        }
        if rounds >= cfg.calibration.max_rounds.max(1) {
            let worst = report
                .fitted
                .iter()
                .max_by(|a, b| {
                    (a.residual.abs() / a.target.tolerance)
                        .total_cmp(&(b.residual.abs() / b.target.tolerance))
                })
                .expect("targets are non-empty");
            return Err(Error::CalibrationFailed {
                target: worst.target.observable.name().into(),
                residual: worst.residual.abs(),
            });
        }
    }
}
