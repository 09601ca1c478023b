//! Evaluation measures over ranked output: average precision (MAP), bpref,
//! and P10, following the trec_eval conventions.
//!
//! Average precision treats unjudged documents as nonrelevant and gives
//! unretrieved relevant documents a precision of zero. bpref looks only at
//! judged documents, skipping unjudged ones entirely. P10 is the fraction
//! of judged-relevant documents among the first ten positions, with the
//! divisor fixed at ten.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::slidefuse::FusedList;
use crate::trec::{Judgment, Qrels, ResultList};

/// Anything that exposes an ordered sequence of document ids.
pub trait Ranking {
    fn ranked_doc_ids(&self) -> impl Iterator<Item = &str>;
}

impl Ranking for ResultList {
    fn ranked_doc_ids(&self) -> impl Iterator<Item = &str> {
        self.doc_ids()
    }
}

impl Ranking for FusedList {
    fn ranked_doc_ids(&self) -> impl Iterator<Item = &str> {
        self.doc_ids()
    }
}

impl<S: AsRef<str>> Ranking for [S] {
    fn ranked_doc_ids(&self) -> impl Iterator<Item = &str> {
        self.iter().map(|s| s.as_ref())
    }
}

impl<S: AsRef<str>> Ranking for Vec<S> {
    fn ranked_doc_ids(&self) -> impl Iterator<Item = &str> {
        self.iter().map(|s| s.as_ref())
    }
}

/// Average precision for one query.
///
/// Sums precision at each retrieved relevant document's 1-based rank and
/// divides by R, the query's total judged-relevant count. Errors when
/// R = 0; such queries must be excluded upstream.
pub fn average_precision<R: Ranking + ?Sized>(
    ranking: &R,
    qrels: &Qrels,
    query_id: &str,
) -> Result<f64> {
    let total_relevant = nonzero_relevant_count(qrels, query_id)?;
    let mut hits = 0usize;
    let mut sum = 0.0;
    for (i, doc_id) in ranking.ranked_doc_ids().enumerate() {
        if qrels.is_relevant(query_id, doc_id) {
            hits += 1;
            sum += hits as f64 / (i + 1) as f64;
        }
    }
    Ok(sum / total_relevant as f64)
}

/// bpref for one query.
///
/// For each retrieved judged-relevant document, counts the judged-
/// nonrelevant documents ranked above it (capped at min(R, NN)) and
/// contributes `1 - count / min(R, NN)`; unjudged documents are skipped
/// entirely. When the query has no judged-nonrelevant documents each
/// retrieved relevant contributes 1. Errors when R = 0.
pub fn bpref<R: Ranking + ?Sized>(ranking: &R, qrels: &Qrels, query_id: &str) -> Result<f64> {
    let total_relevant = nonzero_relevant_count(qrels, query_id)?;
    let total_nonrelevant = qrels.nonrelevant_count(query_id);
    let denom = total_relevant.min(total_nonrelevant);
    let mut nonrelevant_above = 0usize;
    let mut sum = 0.0;
    for doc_id in ranking.ranked_doc_ids() {
        match qrels.judgment(query_id, doc_id) {
            Some(Judgment::NonRelevant) => nonrelevant_above += 1,
            Some(Judgment::Relevant) => {
                sum += if total_nonrelevant == 0 {
                    1.0
                } else {
                    1.0 - nonrelevant_above.min(denom) as f64 / denom as f64
                };
            }
            None => {}
        }
    }
    Ok(sum / total_relevant as f64)
}

/// Precision after ten documents: judged-relevant count among the first
/// ten positions divided by ten. Shorter rankings treat the missing
/// positions as nonrelevant.
pub fn p10<R: Ranking + ?Sized>(ranking: &R, qrels: &Qrels, query_id: &str) -> f64 {
    let hits = ranking
        .ranked_doc_ids()
        .take(10)
        .filter(|doc_id| qrels.is_relevant(query_id, doc_id))
        .count();
    hits as f64 / 10.0
}

fn nonzero_relevant_count(qrels: &Qrels, query_id: &str) -> Result<usize> {
    match qrels.relevant_count(query_id) {
        0 => Err(Error::NoRelevantDocuments(query_id.to_string())),
        r => Ok(r),
    }
}

/// Which evaluation measure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricKind {
    Map,
    Bpref,
    P10,
}

impl MetricKind {
    pub const ALL: [MetricKind; 3] = [MetricKind::Map, MetricKind::Bpref, MetricKind::P10];

    pub fn name(&self) -> &'static str {
        match self {
            MetricKind::Map => "MAP",
            MetricKind::Bpref => "bpref",
            MetricKind::P10 => "P10",
        }
    }
}

impl std::fmt::Display for MetricKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Per-query scores for one measure plus their arithmetic mean.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricScores {
    pub per_query: BTreeMap<String, f64>,
    pub mean: f64,
}

impl MetricScores {
    fn from_per_query(per_query: BTreeMap<String, f64>) -> Self {
        let mean = per_query.values().sum::<f64>() / per_query.len() as f64;
        Self { per_query, mean }
    }
}

/// MAP, bpref, and P10 for one evaluated run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunEvaluation {
    pub map: MetricScores,
    pub bpref: MetricScores,
    pub p10: MetricScores,
}

impl RunEvaluation {
    pub fn get(&self, kind: MetricKind) -> &MetricScores {
        match kind {
            MetricKind::Map => &self.map,
            MetricKind::Bpref => &self.bpref,
            MetricKind::P10 => &self.p10,
        }
    }
}

/// Evaluates every query of a run with all three measures.
///
/// Queries without judged-relevant documents are excluded from all three
/// means; if none remain this is an error.
pub fn evaluate_run<R: Ranking>(
    run: &BTreeMap<String, R>,
    qrels: &Qrels,
) -> Result<RunEvaluation> {
    let mut map_scores = BTreeMap::new();
    let mut bpref_scores = BTreeMap::new();
    let mut p10_scores = BTreeMap::new();
    for (query_id, ranking) in run {
        if qrels.relevant_count(query_id) == 0 {
            continue;
        }
        map_scores.insert(query_id.clone(), average_precision(ranking, qrels, query_id)?);
        bpref_scores.insert(query_id.clone(), bpref(ranking, qrels, query_id)?);
        p10_scores.insert(query_id.clone(), p10(ranking, qrels, query_id));
    }
    if map_scores.is_empty() {
        return Err(Error::NoEvaluableQueries);
    }
    Ok(RunEvaluation {
        map: MetricScores::from_per_query(map_scores),
        bpref: MetricScores::from_per_query(bpref_scores),
        p10: MetricScores::from_per_query(p10_scores),
    })
}
