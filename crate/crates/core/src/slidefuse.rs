//! Sliding-window probabilistic fusion.
//!
//! Each position of a result list gets a window of up to `w` neighbours on
//! either side, clamped to the list boundaries. The window probability is
//! the mean of the profile's raw probabilities over that window, and a
//! document's fusion score is the sum of its window probabilities across
//! all input systems that returned it. Summing rewards agreement between
//! systems; the training profiles keep unreliable systems from
//! contributing much.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::profiles::RelevanceProfile;
use crate::trec::SystemRun;

/// Inclusive position interval `[start, end]` around a centre position.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Window {
    pub start: usize,
    pub end: usize,
}

impl Window {
    /// Number of positions in the window; always at least 1 since a window
    /// contains its centre.
    pub fn size(&self) -> usize {
        self.end - self.start + 1
    }
}

/// Window around position `p` with halfwidth `w`, clamped to a result list
/// of length `n`: it can neither begin before the first document nor extend
/// beyond the last.
pub fn window_bounds(p: usize, w: usize, n: usize) -> Result<Window> {
    if p >= n {
        return Err(Error::InvalidInput(format!(
            "position {p} outside result list of length {n}"
        )));
    }
    Ok(Window {
        start: p.saturating_sub(w),
        end: p.saturating_add(w).min(n - 1),
    })
}

/// Mean of the profile's raw probabilities over the clamped window around
/// `p`. The divisor is the actual window size, so edge positions average
/// only over the neighbours that exist.
pub fn window_probability(
    profile: &RelevanceProfile,
    p: usize,
    w: usize,
    n: usize,
) -> Result<f64> {
    let window = window_bounds(p, w, n)?;
    let mut sum = 0.0;
    for i in window.start..=window.end {
        sum += profile.raw_probability(i);
    }
    Ok(sum / window.size() as f64)
}

/// A document with its fusion score.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoredDoc {
    pub doc_id: String,
    pub score: f64,
}

/// A fused ranking for one query: descending score, ties broken by
/// ascending doc id.
#[derive(Debug, Clone, PartialEq)]
pub struct FusedList {
    query_id: String,
    entries: Vec<ScoredDoc>,
}

impl FusedList {
    /// Builds a fused list from per-document scores, applying the ordering
    /// rule (descending score, then ascending doc id).
    pub fn from_scores(
        query_id: impl Into<String>,
        scores: impl IntoIterator<Item = (String, f64)>,
    ) -> Self {
        let mut entries: Vec<ScoredDoc> = scores
            .into_iter()
            .map(|(doc_id, score)| ScoredDoc { doc_id, score })
            .collect();
        entries.sort_by(|a, b| {
            b.score
                .total_cmp(&a.score)
                .then_with(|| a.doc_id.cmp(&b.doc_id))
        });
        Self {
            query_id: query_id.into(),
            entries,
        }
    }

    pub fn query_id(&self) -> &str {
        &self.query_id
    }

    pub fn entries(&self) -> &[ScoredDoc] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn doc_ids(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|e| e.doc_id.as_str())
    }
}

/// One input system with its trained relevance profile.
#[derive(Debug)]
pub struct EnsembleMember<'a> {
    pub run: &'a SystemRun,
    pub profile: RelevanceProfile,
}

/// The set of input systems taking part in a fusion.
#[derive(Debug)]
pub struct FusionEnsemble<'a> {
    members: Vec<EnsembleMember<'a>>,
}

impl<'a> FusionEnsemble<'a> {
    /// Pairs runs with their profiles. Tags must match within each pair and
    /// be pairwise distinct; the ensemble must be non-empty.
    pub fn new(members: Vec<(&'a SystemRun, RelevanceProfile)>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::InvalidInput("ensemble has no members".into()));
        }
        let mut tags = std::collections::BTreeSet::new();
        for (run, profile) in &members {
            if run.system_tag() != profile.system_tag() {
                return Err(Error::InvalidInput(format!(
                    "run tag {:?} does not match profile tag {:?}",
                    run.system_tag(),
                    profile.system_tag()
                )));
            }
            if !tags.insert(run.system_tag()) {
                return Err(Error::InvalidInput(format!(
                    "duplicate system tag {:?} in ensemble",
                    run.system_tag()
                )));
            }
        }
        Ok(Self {
            members: members
                .into_iter()
                .map(|(run, profile)| EnsembleMember { run, profile })
                .collect(),
        })
    }

    pub fn members(&self) -> &[EnsembleMember<'a>] {
        &self.members
    }

    /// Fuses the members' result lists for one query.
    ///
    /// A document's score is the sum, over members that returned it, of the
    /// window probability at its position in that member's list (each list
    /// supplying its own length). Members lacking the query contribute
    /// nothing; if no member has it the fused list is empty.
    pub fn fuse(&self, query_id: &str, w: usize) -> FusedList {
        let mut scores: BTreeMap<String, f64> = BTreeMap::new();
        for member in &self.members {
            let Some(list) = member.run.get(query_id) else {
                continue;
            };
            let n = list.len();
            for entry in list.entries() {
                let p = window_probability(&member.profile, entry.rank, w, n)
                    .expect("entry rank is below list length");
                *scores.entry(entry.doc_id.clone()).or_insert(0.0) += p;
            }
        }
        FusedList::from_scores(query_id, scores)
    }
}
