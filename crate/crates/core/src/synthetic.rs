//! Synthetic multi-system corpora for benchmarks and end-to-end tests.
//!
//! Each query gets a shared document universe with a known relevant
//! subset, fully judged. Every system ranks the universe by a noisy
//! internal score `bias * relevance + noise * u` and returns its top
//! segment, so the bias controls where relevant documents land: strongly
//! positive biases put them early, biases near zero scatter them, and
//! negative biases push them below the returned cutoff. That gives the
//! systems distinct positional relevance priors for training-based fusers
//! to learn, while score-based fusion sees each system's raw scores.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::trec::{Judgment, Qrels, ResultList, SystemRun};

/// Shape of a generated corpus.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSpec {
    pub n_queries: usize,
    /// Documents in each query's universe.
    pub docs_per_query: usize,
    /// Inclusive range for the number of relevant documents per query.
    pub relevant_per_query: (usize, usize),
    /// How many documents each system returns per query.
    pub returned_per_system: usize,
    /// One bias per system; also determines the number of systems.
    pub system_biases: Vec<f64>,
    /// Uniform noise amplitude added to every internal score.
    pub noise: f64,
    pub seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        Self {
            n_queries: 200,
            docs_per_query: 50,
            relevant_per_query: (5, 15),
            returned_per_system: 30,
            system_biases: vec![2.0, 1.0, 0.4, 0.0, -1.5, -2.5],
            noise: 1.0,
            seed: 17,
        }
    }
}

/// A generated corpus: one run per system plus complete judgments.
#[derive(Debug, Clone)]
pub struct SyntheticCorpus {
    pub systems: Vec<SystemRun>,
    pub qrels: Qrels,
}

/// Generates a corpus; equal inputs produce identical output.
pub fn generate(spec: &SyntheticSpec) -> SyntheticCorpus {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n_systems = spec.system_biases.len();
    let mut qrels = Qrels::new();
    let mut per_system_lists: Vec<Vec<ResultList>> = vec![Vec::new(); n_systems];

    for q in 0..spec.n_queries {
        let query_id = format!("q{q:04}");
        let doc_ids: Vec<String> = (0..spec.docs_per_query)
            .map(|j| format!("{query_id}d{j:03}"))
            .collect();

        let (lo, hi) = spec.relevant_per_query;
        let n_relevant = rng.random_range(lo..=hi).min(spec.docs_per_query);
        let mut indices: Vec<usize> = (0..spec.docs_per_query).collect();
        indices.shuffle(&mut rng);
        let relevant: Vec<bool> = {
            let mut flags = vec![false; spec.docs_per_query];
            for &i in indices.iter().take(n_relevant) {
                flags[i] = true;
            }
            flags
        };
        for (doc_id, &is_relevant) in doc_ids.iter().zip(&relevant) {
            let judgment = if is_relevant {
                Judgment::Relevant
            } else {
                Judgment::NonRelevant
            };
            qrels
                .add(query_id.clone(), doc_id.clone(), judgment)
                .expect("generated pairs are unique");
        }

        for (s, &bias) in spec.system_biases.iter().enumerate() {
            let mut scored: Vec<(String, f64)> = doc_ids
                .iter()
                .zip(&relevant)
                .map(|(doc_id, &is_relevant)| {
                    let base = if is_relevant { bias } else { 0.0 };
                    (doc_id.clone(), base + spec.noise * rng.random::<f64>())
                })
                .collect();
            scored.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
            scored.truncate(spec.returned_per_system);
            let list = ResultList::from_scored(query_id.clone(), scored)
                .expect("generated doc ids are unique");
            per_system_lists[s].push(list);
        }
    }

    let systems = per_system_lists
        .into_iter()
        .enumerate()
        .map(|(s, lists)| {
            SystemRun::new(format!("sys{s}"), lists).expect("one list per query")
        })
        .collect();
    SyntheticCorpus { systems, qrels }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generation_is_deterministic() {
        let spec = SyntheticSpec {
            n_queries: 5,
            ..SyntheticSpec::default()
        };
        let a = generate(&spec);
        let b = generate(&spec);
        assert_eq!(a.systems.len(), b.systems.len());
        for (x, y) in a.systems.iter().zip(&b.systems) {
            assert_eq!(x, y);
        }
        assert_eq!(a.qrels, b.qrels);
    }

    #[test]
    fn corpus_has_the_requested_shape() {
        let spec = SyntheticSpec {
            n_queries: 8,
            docs_per_query: 20,
            relevant_per_query: (3, 6),
            returned_per_system: 10,
            system_biases: vec![1.5, -1.5],
            noise: 1.0,
            seed: 3,
        };
        let corpus = generate(&spec);
        assert_eq!(corpus.systems.len(), 2);
        for run in &corpus.systems {
            assert_eq!(run.len(), 8);
            for list in run.lists().values() {
                assert_eq!(list.len(), 10);
            }
        }
        for q in 0..8 {
            let query_id = format!("q{q:04}");
            let relevant = corpus.qrels.relevant_count(&query_id);
            assert!((3..=6).contains(&relevant), "{relevant} relevant");
            assert_eq!(
                relevant + corpus.qrels.nonrelevant_count(&query_id),
                20,
                "every document is judged"
            );
        }
    }

    #[test]
    fn positive_bias_front_loads_relevant_documents() {
        let spec = SyntheticSpec {
            n_queries: 30,
            system_biases: vec![2.5, -2.5],
            noise: 1.0,
            ..SyntheticSpec::default()
        };
        let corpus = generate(&spec);
        let early_hits = |run: &SystemRun| -> usize {
            run.lists()
                .iter()
                .map(|(q, list)| {
                    list.entries()
                        .iter()
                        .take(5)
                        .filter(|e| corpus.qrels.is_relevant(q, &e.doc_id))
                        .count()
                })
                .sum()
        };
        let good = early_hits(&corpus.systems[0]);
        let bad = early_hits(&corpus.systems[1]);
        assert!(good > bad * 5, "front-loaded {good} vs buried {bad}");
    }
}
