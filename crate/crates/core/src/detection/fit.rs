use std::f64::consts::PI;

use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};

const MAX_REWEIGHTS: usize = 50;
const FLAT_TOL: f64 = 1e-12;

/// How residuals are weighted in the fringe fit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Weighting {
    /// Ordinary least squares; errors from the residual scatter.
    Uniform,
    /// Poisson counts: weights 1/model, errors from the counting statistics.
    Poisson,
}

/// Result of fitting `A (1 + V cos 2(θ − θ0))`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FringeFit {
    pub visibility: f64,
    pub visibility_stderr: f64,
    /// θ0 in radians, in (−π/2, π/2].
    pub phase: f64,
    pub mean: f64,
}

/// Fits a polarization fringe of fixed period π to (θ, y) samples.
///
/// The model is linear in `a + b cos 2θ + c sin 2θ`, so the fit is a
/// closed-form weighted least-squares solve; V = √(b² + c²)/a and its
/// standard error follows from the parameter covariance by linearization.
pub fn fit_fringe(angles: &[f64], values: &[f64], weighting: Weighting) -> Result<FringeFit> {
    if angles.len() != values.len() {
        return Err(Error::DegenerateFit(format!(
            "{} angles but {} values",
            angles.len(),
            values.len()
        )));
    }
    let mut distinct: Vec<f64> = angles.iter().map(|t| t.rem_euclid(PI)).collect();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
    if distinct.len() > 1 && (distinct[0] + PI - distinct[distinct.len() - 1]).abs() < 1e-9 {
        distinct.pop();
    }
    if distinct.len() < 4 {
        return Err(Error::DegenerateFit(format!(
            "only {} distinct angles",
            distinct.len()
        )));
    }
    if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(Error::DegenerateFit(
            "values must be finite and non-negative".into(),
        ));
    }
    let rows: Vec<Vector3<f64>> = angles
        .iter()
        .map(|t| Vector3::new(1.0, (2.0 * t).cos(), (2.0 * t).sin()))
        .collect();

    let solve = |weights: &[f64]| -> Result<(Vector3<f64>, Matrix3<f64>)> {
        let mut xtx = Matrix3::zeros();
        let mut xty = Vector3::zeros();
        for ((x, y), w) in rows.iter().zip(values).zip(weights) {
            xtx += *w * x * x.transpose();
            xty += *w * *y * x;
        }
        let inv = xtx
            .try_inverse()
            .ok_or_else(|| Error::DegenerateFit("singular design matrix".into()))?;
        Ok((inv * xty, inv))
    };

    let (beta, cov) = match weighting {
        Weighting::Uniform => {
            let (beta, inv) = solve(&vec![1.0; values.len()])?;
            let rss: f64 = rows
                .iter()
                .zip(values)
                .map(|(x, y)| (y - x.dot(&beta)).powi(2))
                .sum();
            let dof = values.len().saturating_sub(3).max(1) as f64;
            (beta, inv * (rss / dof))
        }
        Weighting::Poisson => {
            let mut weights: Vec<f64> = values.iter().map(|y| 1.0 / y.max(1.0)).collect();
            let mut last = solve(&weights)?;
            for _ in 0..MAX_REWEIGHTS {
                weights = rows.iter().map(|x| 1.0 / x.dot(&last.0).max(1.0)).collect();
                let next = solve(&weights)?;
                let shift = (next.0 - last.0).amax();
                last = next;
                if shift <= 1e-12 * last.0.amax().max(1e-300) {
                    break;
                }
            }
            last
        }
    };

    let (a, b, c) = (beta[0], beta[1], beta[2]);
    if a <= 0.0 {
        return Err(Error::DegenerateFit("non-positive mean".into()));
    }
    let mut r = b.hypot(c);
    if r <= FLAT_TOL * a {
        r = 0.0;
    }
    let visibility = r / a;
    let var = if r > 0.0 {
        let g = Vector3::new(-r / (a * a), b / (r * a), c / (r * a));
        (g.transpose() * cov * g)[(0, 0)]
    } else {
        (cov[(1, 1)] + cov[(2, 2)]) / (2.0 * a * a)
    };
    Ok(FringeFit {
        visibility: visibility.clamp(0.0, 1.0),
        visibility_stderr: var.max(0.0).sqrt(),
        phase: if r > 0.0 {
            normalize_phase(0.5 * c.atan2(b))
        } else {
            0.0
        },
        mean: a,
    })
}

fn normalize_phase(p: f64) -> f64 {
    let q = p.rem_euclid(PI);
    if q > PI / 2.0 {
        q - PI
    } else {
        q
    }
}
