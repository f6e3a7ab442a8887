use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::calibrate::CalibrationReport;
use super::config::ExperimentConfig;
use super::scenarios::{BasisReport, FringeReport, GhzReport, NoiseReport};
use crate::detection::{write_count_csv, CountRecord};
use crate::encoder::DecompositionReport;
use crate::error::Result;
use crate::format::fmt_num;

pub const FIT_CSV_HEADER: &str = "observable,value,stderr";
pub const NOISE_CSV_HEADER: &str =
    "mu,valid,error,ratio,ratio_over_mu,leading_order,partner_lost,same_port,partner_detected";
pub const CALIBRATION_CSV_HEADER: &str =
    "observable,parameter,fitted_value,achieved,target,residual,tolerance";
pub const DECOMPOSITION_CSV_HEADER: &str =
    "sample,alpha_re,alpha_im,beta_re,beta_im,encoded_weight,orthogonal_weight,orthogonality_residual,encoded_fidelity,amplitude_error";

/// Ratios print `∞` when the denominator vanishes.
pub fn fmt_ratio(x: f64) -> String {
    if x.is_infinite() {
        "∞".into()
    } else {
        fmt_num(x)
    }
}

fn counts_csv(records: &[CountRecord]) -> String {
    let mut buf = Vec::new();
    write_count_csv(&mut buf, records).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("CSV is ASCII")
}

fn fit_line(out: &mut String, name: &str, value: String, stderr: Option<f64>) {
    let _ = writeln!(
        out,
        "{name},{value},{}",
        stderr.map(fmt_num).unwrap_or_default()
    );
}

fn write(dir: &Path, name: &str, text: &str) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    fs::write(&path, text)?;
    Ok(path)
}

pub fn write_basis(dir: &Path, r: &BasisReport) -> Result<Vec<PathBuf>> {
    Ok(vec![
        write(dir, "basis_input0.csv", &counts_csv(&r.input_zero))?,
        write(dir, "basis_input1.csv", &counts_csv(&r.input_one))?,
        write(dir, "entangled_diagonal.csv", &counts_csv(&r.diagonal))?,
        write(
            dir,
            "entangled_rectilinear.csv",
            &counts_csv(&r.rectilinear),
        )?,
    ])
}

pub fn fringe_summary(r: &FringeReport) -> String {
    let mut s = format!("{FIT_CSV_HEADER}\n");
    fit_line(
        &mut s,
        "visibility",
        fmt_num(r.fit.visibility),
        Some(r.fit.visibility_stderr),
    );
    fit_line(&mut s, "phase_rad", fmt_num(r.fit.phase), None);
    fit_line(&mut s, "mean", fmt_num(r.fit.mean), None);
    fit_line(
        &mut s,
        "exact_visibility",
        fmt_num(r.exact_fit.visibility),
        None,
    );
    fit_line(
        &mut s,
        "expected_visibility",
        fmt_num(r.expected_fit.visibility),
        Some(r.expected_fit.visibility_stderr),
    );
    s
}

pub fn write_fringe(dir: &Path, r: &FringeReport) -> Result<Vec<PathBuf>> {
    Ok(vec![
        write(dir, "fringe.csv", &counts_csv(&r.records))?,
        write(dir, "fringe_fit.csv", &fringe_summary(r))?,
    ])
}

pub fn ghz_summary(r: &GhzReport) -> String {
    let mut s = format!("{FIT_CSV_HEADER}\n");
    fit_line(&mut s, "desired", fmt_num(r.desired), None);
    fit_line(&mut s, "undesired", fmt_num(r.undesired), None);
    fit_line(&mut s, "ratio", fmt_ratio(r.ratio), None);
    fit_line(&mut s, "parity_xxx", fmt_num(r.parity), None);
    for (label, p) in &r.parity_table {
        fit_line(&mut s, &format!("normalized_{label}"), fmt_num(*p), None);
    }
    s
}

pub fn write_ghz(dir: &Path, r: &GhzReport) -> Result<Vec<PathBuf>> {
    Ok(vec![
        write(dir, "ghz_basis.csv", &counts_csv(&r.basis))?,
        write(dir, "ghz_diagonal.csv", &counts_csv(&r.diagonal))?,
        write(dir, "ghz_summary.csv", &ghz_summary(r))?,
    ])
}

pub fn noise_csv(r: &NoiseReport) -> String {
    let mut s = format!("{NOISE_CSV_HEADER}\n");
    for row in &r.rows {
        let fields = [
            row.mu,
            row.valid,
            row.error,
            row.ratio,
            row.ratio_over_mu,
            row.leading_order,
            row.partner_lost,
            row.same_port,
            row.partner_detected,
        ];
        let line: Vec<String> = fields.iter().map(|x| fmt_num(*x)).collect();
        let _ = writeln!(s, "{}", line.join(","));
    }
    s
}

pub fn noise_summary(r: &NoiseReport) -> String {
    let mut s = format!("{FIT_CSV_HEADER}\n");
    fit_line(&mut s, "herald_ratio", fmt_num(r.herald_ratio), None);
    fit_line(
        &mut s,
        "qubit_detection_prob",
        fmt_num(r.qubit_detection_prob),
        None,
    );
    s
}

pub fn write_noise(dir: &Path, r: &NoiseReport) -> Result<Vec<PathBuf>> {
    Ok(vec![
        write(dir, "noise.csv", &noise_csv(r))?,
        write(dir, "noise_summary.csv", &noise_summary(r))?,
    ])
}

pub fn calibration_csv(r: &CalibrationReport) -> String {
    let mut s = format!("{CALIBRATION_CSV_HEADER}\n");
    for f in &r.fitted {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{}",
            f.target.observable.name(),
            f.target.parameter.name(),
            fmt_num(f.value),
            fmt_ratio(f.achieved),
            fmt_num(f.target.target),
            fmt_num(f.residual),
            fmt_num(f.target.tolerance)
        );
    }
    s
}

/// The fitted config as TOML, headed by comment lines listing the residuals.
pub fn calibrated_toml(cfg: &ExperimentConfig, r: &CalibrationReport) -> Result<String> {
    let mut s = format!(
        "# Produced by `calibrate`, coordinate rounds: {}.\n",
        r.rounds
    );
    for f in &r.fitted {
        let _ = writeln!(
            s,
            "# {} = {} via {} = {} (target {}, residual {})",
            f.target.observable.name(),
            fmt_ratio(f.achieved),
            f.target.parameter.name(),
            fmt_num(f.value),
            fmt_num(f.target.target),
            fmt_num(f.residual)
        );
    }
    s.push('\n');
    s.push_str(&cfg.to_toml()?);
    Ok(s)
}

pub fn write_calibration(
    dir: &Path,
    cfg: &ExperimentConfig,
    r: &CalibrationReport,
) -> Result<Vec<PathBuf>> {
    Ok(vec![
        write(dir, "calibration.csv", &calibration_csv(r))?,
        write(dir, "calibrated.toml", &calibrated_toml(cfg, r)?)?,
    ])
}

pub fn decomposition_csv(
    rows: &[(
        num_complex::Complex64,
        num_complex::Complex64,
        DecompositionReport,
    )],
) -> String {
    let mut s = format!("{DECOMPOSITION_CSV_HEADER}\n");
    for (i, (a, b, r)) in rows.iter().enumerate() {
        let fields = [
            a.re,
            a.im,
            b.re,
            b.im,
            r.encoded_weight,
            r.orthogonal_weight,
            r.orthogonality_residual,
            r.encoded_fidelity,
            r.amplitude_error,
        ];
        let line: Vec<String> = fields.iter().map(|x| fmt_num(*x)).collect();
        let _ = writeln!(s, "{i},{}", line.join(","));
    }
    s
}

pub fn write_decomposition(
    dir: &Path,
    rows: &[(
        num_complex::Complex64,
        num_complex::Complex64,
        DecompositionReport,
    )],
) -> Result<Vec<PathBuf>> {
    Ok(vec![write(
        dir,
        "decomposition.csv",
        &decomposition_csv(rows),
    )?])
}
