//! Statistics for experiment reports: coefficient of variation and the
//! paired t-test used for the significance markers.

use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};

/// Significance level reached by a test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Significance {
    NotSignificant,
    /// Significant at the 5% level, rendered `*`.
    FivePercent,
    /// Significant at the 1% level, rendered `**`.
    OnePercent,
}

impl Significance {
    pub fn marker(&self) -> &'static str {
        match self {
            Significance::NotSignificant => "",
            Significance::FivePercent => "*",
            Significance::OnePercent => "**",
        }
    }
}

/// Outcome of a paired t-test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TTestOutcome {
    pub t: f64,
    pub significance: Significance,
    /// Set when every pairwise difference is the same nonzero constant:
    /// the variance is exactly zero and `t` is reported as +/- infinity
    /// rather than dividing by zero.
    pub degenerate: bool,
}

/// Two-tailed paired t-test on per-query score vectors, df = n - 1.
///
/// The vectors must be equally long (same query order), with at least two
/// pairs. All-zero differences yield t = 0 and no significance.
pub fn paired_t_test(a: &[f64], b: &[f64]) -> Result<TTestOutcome> {
    if a.len() != b.len() {
        return Err(Error::InvalidInput(format!(
            "paired samples differ in length: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    let n = a.len();
    if n < 2 {
        return Err(Error::InvalidInput(
            "paired t-test requires at least 2 pairs".into(),
        ));
    }
    let diffs: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let mean = diffs.iter().sum::<f64>() / n as f64;
    let sum_sq: f64 = diffs.iter().map(|d| (d - mean).powi(2)).sum();

    if sum_sq == 0.0 {
        // Every difference is the same constant.
        if mean == 0.0 {
            return Ok(TTestOutcome {
                t: 0.0,
                significance: Significance::NotSignificant,
                degenerate: false,
            });
        }
        return Ok(TTestOutcome {
            t: if mean > 0.0 {
                f64::INFINITY
            } else {
                f64::NEG_INFINITY
            },
            significance: Significance::OnePercent,
            degenerate: true,
        });
    }

    let variance = sum_sq / (n - 1) as f64;
    let t = mean / (variance / n as f64).sqrt();
    let df = (n - 1) as f64;
    let dist = StudentsT::new(0.0, 1.0, df).expect("df >= 1 is a valid Student's t");
    let crit_5 = dist.inverse_cdf(0.975);
    let crit_1 = dist.inverse_cdf(0.995);
    let significance = if t.abs() > crit_1 {
        Significance::OnePercent
    } else if t.abs() > crit_5 {
        Significance::FivePercent
    } else {
        Significance::NotSignificant
    };
    Ok(TTestOutcome {
        t,
        significance,
        degenerate: false,
    })
}

/// Population standard deviation divided by the mean.
///
/// Errors on an empty input or a zero mean.
pub fn coefficient_of_variation(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::InvalidInput(
            "coefficient of variation needs at least one value".into(),
        ));
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.iter().all(|&v| v == values[0]) {
        // Zero deviation by definition; the computed mean would carry
        // rounding noise into the deviations.
        return if values[0] == 0.0 {
            Err(Error::InvalidInput(
                "coefficient of variation is undefined for a zero mean".into(),
            ))
        } else {
            Ok(0.0)
        };
    }
    if mean == 0.0 {
        return Err(Error::InvalidInput(
            "coefficient of variation is undefined for a zero mean".into(),
        ));
    }
    let variance = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    Ok(variance.sqrt() / mean)
}
