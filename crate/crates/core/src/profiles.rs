//! Training phase: per-position relevance probabilities for each input
//! system, estimated from training queries with relevance judgments.
//!
//! Position p of a system's profile records how many training queries
//! returned at least p+1 documents (the support) and, of those, how many
//! had a judged-relevant document at p. The ratio is the probability that
//! a document this system returns at position p is relevant. Documents
//! that are unjudged or judged nonrelevant both count as not relevant.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::trec::{Qrels, SystemRun};

/// Per-position relevance statistics for one input system.
#[derive(Debug, Clone, PartialEq)]
pub struct RelevanceProfile {
    system_tag: String,
    relevant_counts: Vec<u32>,
    support: Vec<u32>,
}

impl RelevanceProfile {
    /// Builds a profile from raw counts, validating that counts never
    /// exceed support and that support is non-increasing.
    pub fn from_counts(
        system_tag: impl Into<String>,
        relevant_counts: Vec<u32>,
        support: Vec<u32>,
    ) -> Result<Self> {
        if relevant_counts.len() != support.len() {
            return Err(Error::InvalidInput(
                "relevant_counts and support must have equal length".into(),
            ));
        }
        for (p, (&rel, &sup)) in relevant_counts.iter().zip(&support).enumerate() {
            if rel > sup {
                return Err(Error::InvalidInput(format!(
                    "position {p}: relevant count {rel} exceeds support {sup}"
                )));
            }
            if p > 0 && sup > support[p - 1] {
                return Err(Error::InvalidInput(format!(
                    "position {p}: support {sup} exceeds support at position {}",
                    p - 1
                )));
            }
        }
        Ok(Self {
            system_tag: system_tag.into(),
            relevant_counts,
            support,
        })
    }

    pub fn system_tag(&self) -> &str {
        &self.system_tag
    }

    /// Number of positions with any training support.
    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    /// Largest position with support, or `None` for an empty profile.
    pub fn max_position(&self) -> Option<usize> {
        self.len().checked_sub(1)
    }

    /// Probability that a document returned at position `p` is relevant.
    ///
    /// Positions with zero support (including every position past the
    /// training lists' lengths) return 0: without evidence a document
    /// contributes nothing.
    pub fn raw_probability(&self, p: usize) -> f64 {
        match self.support.get(p) {
            Some(&sup) if sup > 0 => self.relevant_counts[p] as f64 / sup as f64,
            _ => 0.0,
        }
    }

    pub fn relevant_counts(&self) -> &[u32] {
        &self.relevant_counts
    }

    pub fn support(&self) -> &[u32] {
        &self.support
    }
}

/// Estimates a system's relevance profile on a set of training queries.
///
/// A training query absent from the run is treated as a zero-length result
/// list and contributes to no position. The training set must be non-empty.
pub fn build_profile(
    run: &SystemRun,
    training_queries: &BTreeSet<String>,
    qrels: &Qrels,
) -> Result<RelevanceProfile> {
    if training_queries.is_empty() {
        return Err(Error::InvalidInput("training query set is empty".into()));
    }
    let max_len = training_queries
        .iter()
        .filter_map(|q| run.get(q))
        .map(|list| list.len())
        .max()
        .unwrap_or(0);
    let mut relevant_counts = vec![0u32; max_len];
    let mut support = vec![0u32; max_len];
    for query_id in training_queries {
        let Some(list) = run.get(query_id) else {
            continue;
        };
        for entry in list.entries() {
            support[entry.rank] += 1;
            if qrels.is_relevant(query_id, &entry.doc_id) {
                relevant_counts[entry.rank] += 1;
            }
        }
    }
    Ok(RelevanceProfile {
        system_tag: run.system_tag().to_string(),
        relevant_counts,
        support,
    })
}

/// One row of a probability curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub position: usize,
    pub probability: f64,
}

/// Emits the profile's probability series, one point per position.
///
/// With `w` absent the points are the raw per-position probabilities; with
/// `w` present each point is the sliding-window probability over the
/// profile treated as a result set of its own length.
pub fn emit_probability_curve(profile: &RelevanceProfile, w: Option<usize>) -> Vec<CurvePoint> {
    let n = profile.len();
    (0..n)
        .map(|position| {
            let probability = match w {
                None => profile.raw_probability(position),
                Some(w) => crate::slidefuse::window_probability(profile, position, w, n)
                    .expect("position < profile length"),
            };
            CurvePoint {
                position,
                probability,
            }
        })
        .collect()
}

/// Renders curve points as tab-separated `position<TAB>probability` lines
/// with a one-line header; probabilities carry 6 decimal places.
pub fn render_curve(points: &[CurvePoint]) -> String {
    let mut out = String::from("position\tprobability\n");
    for point in points {
        writeln!(out, "{}\t{:.6}", point.position, point.probability)
            .expect("writing to String cannot fail");
    }
    out
}
