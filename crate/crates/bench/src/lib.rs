//! Shared fixtures for the criterion benchmarks.

use std::collections::BTreeSet;

use slidefuse_core::synthetic::{generate, SyntheticCorpus, SyntheticSpec};
use slidefuse_core::{build_profile, RelevanceProfile, RunGroup};

/// A mid-sized corpus: 6 systems, 100 queries, depth-100 result lists.
pub fn bench_corpus() -> SyntheticCorpus {
    generate(&SyntheticSpec {
        n_queries: 100,
        docs_per_query: 200,
        relevant_per_query: (10, 30),
        returned_per_system: 100,
        seed: 99,
        ..SyntheticSpec::default()
    })
}

/// The corpus wrapped as a single run group.
pub fn bench_group(corpus: &SyntheticCorpus) -> RunGroup {
    RunGroup {
        name: "bench".into(),
        systems: corpus.systems.clone(),
    }
}

/// Training queries (the first tenth) and the profiles built on them.
pub fn trained_profiles(corpus: &SyntheticCorpus) -> (BTreeSet<String>, Vec<RelevanceProfile>) {
    let training: BTreeSet<String> = corpus.systems[0]
        .query_ids()
        .take(10)
        .map(String::from)
        .collect();
    let profiles = corpus
        .systems
        .iter()
        .map(|run| build_profile(run, &training, &corpus.qrels).expect("training set is non-empty"))
        .collect();
    (training, profiles)
}
