use std::io::{self, Write};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};

use crate::error::{Error, Result};
use crate::format::fmt_num;

pub const COUNT_CSV_HEADER: &str =
    "setting,theta1_deg,theta3_deg,prob_per_pulse,counts,duration_s,seed";

/// Expected or sampled counts for one analyzer setting.
#[derive(Clone, Debug, PartialEq)]
pub struct CountRecord {
    pub setting: String,
    pub theta1_deg: f64,
    pub theta3_deg: f64,
    pub prob_per_pulse: f64,
    /// `None` for exact (noise-free) runs.
    pub counts: Option<u64>,
    pub duration_s: f64,
    pub pulse_rate_hz: f64,
    pub seed: u64,
}

impl CountRecord {
    pub fn expected_counts(&self) -> f64 {
        self.prob_per_pulse * self.pulse_rate_hz * self.duration_s
    }

    /// Sampled counts, or the expectation for exact records.
    pub fn value(&self) -> f64 {
        self.counts
            .map_or_else(|| self.expected_counts(), |c| c as f64)
    }

    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.setting,
            fmt_num(self.theta1_deg),
            fmt_num(self.theta3_deg),
            fmt_num(self.prob_per_pulse),
            self.counts.map(|c| c.to_string()).unwrap_or_default(),
            fmt_num(self.duration_s),
            self.seed
        )
    }
}

pub fn write_count_csv<W: Write>(mut w: W, records: &[CountRecord]) -> io::Result<()> {
    writeln!(w, "{COUNT_CSV_HEADER}")?;
    for r in records {
        writeln!(w, "{}", r.csv_line())?;
    }
    Ok(())
}

/// One Poisson draw with mean `p · rate · duration` from stream `stream` of
/// the generator seeded by `seed`.
pub fn sample_count(
    p: f64,
    pulse_rate_hz: f64,
    duration_s: f64,
    seed: u64,
    stream: u64,
) -> Result<u64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::BadParameter {
            name: "probability",
            value: p,
        });
    }
    let mean = p * pulse_rate_hz * duration_s;
    if !(mean >= 0.0 && mean.is_finite()) {
        return Err(Error::BadParameter {
            name: "expected counts",
            value: mean,
        });
    }
    if mean == 0.0 {
        return Ok(0);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let dist = Poisson::new(mean).map_err(|_| Error::BadParameter {
        name: "expected counts",
        value: mean,
    })?;
    Ok(dist.sample(&mut rng) as u64)
}

/// Independent draws per setting; setting `i` uses stream `i`.
pub fn sample_counts(
    probabilities: &[f64],
    pulse_rate_hz: f64,
    duration_s: f64,
    seed: u64,
) -> Result<Vec<u64>> {
    probabilities
        .iter()
        .enumerate()
        .map(|(i, &p)| sample_count(p, pulse_rate_hz, duration_s, seed, i as u64))
        .collect()
}
