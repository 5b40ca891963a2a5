use serde::{Deserialize, Serialize};

use super::distribution::student_t_two_tailed;
use super::{mean, sample_variance};
use crate::{Error, Result};

/// Per-subject `(pre, post)` measurements.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairedSamples {
    pub pairs: Vec<(f64, f64)>,
}

impl PairedSamples {
    pub fn new(pre: &[f64], post: &[f64]) -> Result<Self> {
        if pre.len() != post.len() {
            return Err(Error::Parameter(format!(
                "paired samples differ in length: {} vs {}",
                pre.len(),
                post.len()
            )));
        }
        Ok(Self {
            pairs: pre.iter().copied().zip(post.iter().copied()).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// `post - pre` per subject.
    pub fn differences(&self) -> Vec<f64> {
        self.pairs.iter().map(|(pre, post)| post - pre).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TTest {
    pub t: f64,
    pub df: f64,
    /// Two-tailed.
    pub p: f64,
}

pub fn paired_t_test(samples: &PairedSamples) -> Result<TTest> {
    let n = samples.len();
    if n < 2 {
        return Err(Error::DegenerateInput(format!("paired t-test needs n >= 2, got {n}")));
    }
    let d = samples.differences();
    check_finite(&d)?;
    let var = sample_variance(&d);
    if var == 0.0 {
        return Err(Error::DegenerateInput("differences have zero variance".into()));
    }
    let t = mean(&d) * (n as f64).sqrt() / var.sqrt();
    let df = n as f64 - 1.0;
    Ok(TTest {
        t,
        df,
        p: student_t_two_tailed(t, df),
    })
}

/// Standardized mean difference with the pooled standard deviation.
pub fn cohens_d(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() < 2 || b.len() < 2 {
        return Err(Error::DegenerateInput("Cohen's d needs two samples per group".into()));
    }
    check_finite(a)?;
    check_finite(b)?;
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let pooled = ((na - 1.0) * sample_variance(a) + (nb - 1.0) * sample_variance(b)) / (na + nb - 2.0);
    if pooled == 0.0 {
        return Err(Error::DegenerateInput("pooled variance is zero".into()));
    }
    Ok((mean(a) - mean(b)) / pooled.sqrt())
}

/// Dominance of `a` over `b`: (#{a > b} - #{a < b}) / (|a| |b|).
pub fn cliffs_delta(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::DegenerateInput("Cliff's delta needs non-empty groups".into()));
    }
    check_finite(a)?;
    check_finite(b)?;
    let mut sorted = b.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut net: i64 = 0;
    for &x in a {
        let below = sorted.partition_point(|&y| y < x);
        let not_above = sorted.partition_point(|&y| y <= x);
        net += below as i64 - (sorted.len() - not_above) as i64;
    }
    Ok(net as f64 / (a.len() as f64 * b.len() as f64))
}

fn check_finite(xs: &[f64]) -> Result<()> {
    if xs.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::Parameter("samples must be finite".into()))
    }
}
