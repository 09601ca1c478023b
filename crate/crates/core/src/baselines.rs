//! Baseline fusers: CombMNZ with min-max normalization, and the
//! segment-based ProbFuse and SegFuse.
//!
//! CombMNZ needs no training: a document's score is the sum of its
//! normalized scores across the lists that returned it, multiplied by the
//! number of such lists. ProbFuse and SegFuse estimate per-segment
//! relevance probabilities on training queries; ProbFuse divides each list
//! into a fixed number of equal-length segments (the last absorbs the
//! remainder) and scores a document by segment probability over its 1-based
//! segment index, while SegFuse uses exponentially growing segments of
//! sizes 5, 15, 35, ... and weights the segment probability by one plus the
//! document's normalized score.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::slidefuse::FusedList;
use crate::trec::{Qrels, ResultList, SystemRun};

/// Min-max rescales a list's scores to `[0, 1]`, preserving order.
///
/// When every score is equal the range is degenerate and all scores map
/// to 1.0: each returned document gets full normalized credit.
pub fn normalize_scores(list: &ResultList) -> Result<ResultList> {
    if list.is_empty() {
        return Err(Error::InvalidInput(format!(
            "query {}: cannot normalize an empty result list",
            list.query_id()
        )));
    }
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    for entry in list.entries() {
        min = min.min(entry.raw_score);
        max = max.max(entry.raw_score);
    }
    let rescaled = list.entries().iter().map(|e| {
        let score = if max == min {
            1.0
        } else {
            (e.raw_score - min) / (max - min)
        };
        (e.doc_id.clone(), score)
    });
    ResultList::from_scored(list.query_id(), rescaled)
}

/// CombMNZ over the result lists of one query.
///
/// Empty member lists are skipped (they return no documents); the output
/// is exactly the union of documents in the input lists.
pub fn combmnz(lists: &[&ResultList]) -> Result<FusedList> {
    let query_id = shared_query_id(lists)?;
    let mut scores: BTreeMap<String, (f64, usize)> = BTreeMap::new();
    for list in lists {
        if list.is_empty() {
            continue;
        }
        let normalized = normalize_scores(list)?;
        for entry in normalized.entries() {
            let slot = scores.entry(entry.doc_id.clone()).or_insert((0.0, 0));
            slot.0 += entry.raw_score;
            slot.1 += 1;
        }
    }
    Ok(FusedList::from_scores(
        query_id,
        scores
            .into_iter()
            .map(|(doc_id, (sum, count))| (doc_id, sum * count as f64)),
    ))
}

fn shared_query_id(lists: &[&ResultList]) -> Result<String> {
    let first = lists
        .first()
        .ok_or_else(|| Error::InvalidInput("fusion requires at least one result list".into()))?;
    for list in &lists[1..] {
        if list.query_id() != first.query_id() {
            return Err(Error::InvalidInput(format!(
                "result lists mix queries {} and {}",
                first.query_id(),
                list.query_id()
            )));
        }
    }
    Ok(first.query_id().to_string())
}

/// How a result list is cut into segments.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Segmentation {
    /// A fixed number of equal-length segments per list; the last segment
    /// absorbs the remainder. A list shorter than the segment count leaves
    /// the leading segments empty and puts everything in the last one.
    EqualLength { segments: usize },
    /// Segment k (0-based) has size `10 * 2^k - 5`: 5, 15, 35, 75, ...,
    /// independent of list length; the last within-list segment is
    /// truncated at the list end.
    Exponential,
}

impl Segmentation {
    /// 0-based segment index containing position `p` of a list of length `n`.
    pub fn segment_of(&self, p: usize, n: usize) -> usize {
        debug_assert!(p < n, "position {p} outside list of length {n}");
        match *self {
            Segmentation::EqualLength { segments } => {
                let base = n / segments;
                p.checked_div(base)
                    .map_or(segments - 1, |k| k.min(segments - 1))
            }
            Segmentation::Exponential => {
                let mut k = 0;
                let mut start = 0;
                loop {
                    let end = start + exponential_size(k);
                    if p < end {
                        return k;
                    }
                    start = end;
                    k += 1;
                }
            }
        }
    }

    /// Length of segment `k` within a list of length `n` (0 when the list
    /// does not reach the segment).
    pub fn segment_len(&self, k: usize, n: usize) -> usize {
        match *self {
            Segmentation::EqualLength { segments } => {
                if k + 1 > segments {
                    0
                } else if k + 1 < segments {
                    n / segments
                } else {
                    n - (n / segments) * (segments - 1)
                }
            }
            Segmentation::Exponential => {
                let start: usize = (0..k).map(exponential_size).sum();
                let end = start + exponential_size(k);
                end.min(n).saturating_sub(start)
            }
        }
    }

    /// Ordered start positions of the non-empty segments of a list of
    /// length `n`; strictly increasing, beginning at 0.
    pub fn boundaries(&self, n: usize) -> Vec<usize> {
        if n == 0 {
            return Vec::new();
        }
        match *self {
            Segmentation::EqualLength { segments } => {
                let base = n / segments;
                if base == 0 {
                    vec![0]
                } else {
                    (0..segments).map(|k| k * base).collect()
                }
            }
            Segmentation::Exponential => {
                let mut starts = Vec::new();
                let mut start = 0;
                let mut k = 0;
                while start < n {
                    starts.push(start);
                    start += exponential_size(k);
                    k += 1;
                }
                starts
            }
        }
    }
}

fn exponential_size(k: usize) -> usize {
    10 * (1usize << k) - 5
}

/// Per-segment relevance probabilities for one input system.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentProfile {
    system_tag: String,
    segmentation: Segmentation,
    seg_probability: Vec<f64>,
}

impl SegmentProfile {
    pub fn system_tag(&self) -> &str {
        &self.system_tag
    }

    pub fn segmentation(&self) -> Segmentation {
        self.segmentation
    }

    /// Per-segment probabilities, indexed by 0-based segment.
    pub fn probabilities(&self) -> &[f64] {
        &self.seg_probability
    }

    /// Probability for segment `k`; segments beyond the trained range
    /// contribute 0.
    pub fn probability(&self, k: usize) -> f64 {
        self.seg_probability.get(k).copied().unwrap_or(0.0)
    }

    /// Segment start positions for a list of length `n`.
    pub fn boundaries(&self, n: usize) -> Vec<usize> {
        self.segmentation.boundaries(n)
    }
}

/// Shared segment-probability estimator: the mean over all training
/// queries of the per-query fraction of relevant documents in each
/// segment. Empty segments contribute a fraction of 0.
fn train_segments(
    run: &SystemRun,
    training_queries: &std::collections::BTreeSet<String>,
    qrels: &Qrels,
    segmentation: Segmentation,
    segment_count: usize,
) -> Result<SegmentProfile> {
    if training_queries.is_empty() {
        return Err(Error::InvalidInput("training query set is empty".into()));
    }
    let mut sums = vec![0.0f64; segment_count];
    for query_id in training_queries {
        let Some(list) = run.get(query_id) else {
            continue;
        };
        let n = list.len();
        if n == 0 {
            continue;
        }
        let mut relevant = vec![0usize; segment_count];
        for entry in list.entries() {
            let k = segmentation.segment_of(entry.rank, n);
            if k < segment_count && qrels.is_relevant(query_id, &entry.doc_id) {
                relevant[k] += 1;
            }
        }
        for (k, sum) in sums.iter_mut().enumerate() {
            let len = segmentation.segment_len(k, n);
            if len > 0 {
                *sum += relevant[k] as f64 / len as f64;
            }
        }
    }
    let denom = training_queries.len() as f64;
    Ok(SegmentProfile {
        system_tag: run.system_tag().to_string(),
        segmentation,
        seg_probability: sums.into_iter().map(|s| s / denom).collect(),
    })
}

/// Trains a ProbFuse profile with `x` equal-length segments per list.
pub fn probfuse_train(
    run: &SystemRun,
    training_queries: &std::collections::BTreeSet<String>,
    qrels: &Qrels,
    x: usize,
) -> Result<SegmentProfile> {
    if x == 0 {
        return Err(Error::InvalidInput("segment count must be at least 1".into()));
    }
    train_segments(
        run,
        training_queries,
        qrels,
        Segmentation::EqualLength { segments: x },
        x,
    )
}

/// Trains a SegFuse profile with exponentially growing segments, sized to
/// cover the longest training list.
pub fn segfuse_train(
    run: &SystemRun,
    training_queries: &std::collections::BTreeSet<String>,
    qrels: &Qrels,
) -> Result<SegmentProfile> {
    if training_queries.is_empty() {
        return Err(Error::InvalidInput("training query set is empty".into()));
    }
    let max_len = training_queries
        .iter()
        .filter_map(|q| run.get(q))
        .map(|list| list.len())
        .max()
        .unwrap_or(0);
    let segmentation = Segmentation::Exponential;
    let segment_count = if max_len == 0 {
        0
    } else {
        segmentation.segment_of(max_len - 1, max_len) + 1
    };
    train_segments(run, training_queries, qrels, segmentation, segment_count)
}

/// ProbFuse scoring: each member contributes its segment probability
/// divided by the document's 1-based segment index in that member's list.
pub fn probfuse_fuse(members: &[(&ResultList, &SegmentProfile)]) -> Result<FusedList> {
    fuse_segments(members, |profile, k, _entry_score| {
        profile.probability(k) / (k + 1) as f64
    })
}

/// SegFuse scoring: each member contributes its segment probability times
/// one plus the document's min-max normalized score in that member's list.
pub fn segfuse_fuse(members: &[(&ResultList, &SegmentProfile)]) -> Result<FusedList> {
    let mut scores: BTreeMap<String, f64> = BTreeMap::new();
    let query_id = shared_member_query_id(members)?;
    for (list, profile) in members {
        if list.is_empty() {
            continue;
        }
        let normalized = normalize_scores(list)?;
        let n = list.len();
        for entry in normalized.entries() {
            let k = profile.segmentation().segment_of(entry.rank, n);
            let contribution = profile.probability(k) * (1.0 + entry.raw_score);
            *scores.entry(entry.doc_id.clone()).or_insert(0.0) += contribution;
        }
    }
    Ok(FusedList::from_scores(query_id, scores))
}

fn fuse_segments(
    members: &[(&ResultList, &SegmentProfile)],
    contribution: impl Fn(&SegmentProfile, usize, f64) -> f64,
) -> Result<FusedList> {
    let query_id = shared_member_query_id(members)?;
    let mut scores: BTreeMap<String, f64> = BTreeMap::new();
    for (list, profile) in members {
        let n = list.len();
        for entry in list.entries() {
            let k = profile.segmentation().segment_of(entry.rank, n);
            *scores.entry(entry.doc_id.clone()).or_insert(0.0) +=
                contribution(profile, k, entry.raw_score);
        }
    }
    Ok(FusedList::from_scores(query_id, scores))
}

fn shared_member_query_id(members: &[(&ResultList, &SegmentProfile)]) -> Result<String> {
    let lists: Vec<&ResultList> = members.iter().map(|(list, _)| *list).collect();
    shared_query_id(&lists)
}
