//! The experimental protocol: seeded query shuffles, training/test splits,
//! multi-algorithm fusion runs, averaging over shuffles, vs.-best deltas
//! with paired t-tests, and the coefficient-of-variation sweep over
//! training-set sizes.
//!
//! Everything is deterministic: shuffles come from a ChaCha8 generator
//! keyed by the seed, with the shuffle index as the stream, so an equal
//! configuration always produces a byte-identical report.

pub mod config;
pub mod report;
pub mod stats;

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub use config::{ExperimentConfig, RunGroupConfig};
pub use report::{Algorithm, ExperimentReport, MetricTable, ReportRow, SweepReport, SweepRow};
pub use stats::{coefficient_of_variation, paired_t_test, Significance, TTestOutcome};

use crate::baselines::{combmnz, probfuse_fuse, probfuse_train, segfuse_fuse, segfuse_train};
use crate::error::{Error, Result};
use crate::metrics::{evaluate_run, MetricKind};
use crate::profiles::build_profile;
use crate::slidefuse::{FusedList, FusionEnsemble};
use crate::trec::{load_qrels, load_run_file, Qrels, ResultList, SystemRun};

/// Scalar parameters of the protocol.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExperimentParams {
    pub shuffle_count: usize,
    pub training_fraction: f64,
    pub w: usize,
    pub probfuse_segments: usize,
    pub seed: u64,
}

impl Default for ExperimentParams {
    fn default() -> Self {
        Self {
            shuffle_count: 5,
            training_fraction: 0.10,
            w: 5,
            probfuse_segments: 25,
            seed: 0,
        }
    }
}

/// One experimental run group: the systems fused together.
#[derive(Debug, Clone)]
pub struct RunGroup {
    pub name: String,
    pub systems: Vec<SystemRun>,
}

/// Deterministically shuffles the query ids and splits off the first
/// `floor(fraction * len)` (at least 1, at most len - 1) as training.
///
/// The shuffle is keyed by `(seed, shuffle_index)`: the seed initializes a
/// ChaCha8 generator and the shuffle index selects its stream, so equal
/// keys always yield equal splits.
pub fn split_queries(
    query_ids: &[String],
    training_fraction: f64,
    seed: u64,
    shuffle_index: u64,
) -> Result<(Vec<String>, Vec<String>)> {
    if query_ids.len() < 2 {
        return Err(Error::InvalidInput(format!(
            "need at least 2 queries to split, got {}",
            query_ids.len()
        )));
    }
    if !(training_fraction > 0.0 && training_fraction < 1.0) {
        return Err(Error::InvalidInput(format!(
            "training fraction must be in (0, 1), got {training_fraction}"
        )));
    }
    let mut shuffled = query_ids.to_vec();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(shuffle_index);
    shuffled.shuffle(&mut rng);
    let size = training_size(query_ids.len(), training_fraction);
    let test = shuffled.split_off(size);
    Ok((shuffled, test))
}

/// `floor(fraction * total)` clamped to `[1, total - 1]`. Products a hair
/// below an integer (a binary floating-point artifact, e.g. 0.3 * 200)
/// round up to it first.
fn training_size(total: usize, fraction: f64) -> usize {
    let exact = fraction * total as f64;
    let floored = if (exact - exact.round()).abs() < 1e-9 {
        exact.round() as usize
    } else {
        exact.floor() as usize
    };
    floored.clamp(1, total - 1)
}

/// Per-group scores gathered over all shuffles.
struct GroupOutcome {
    /// `means[algorithm][metric]`: mean over shuffles of per-shuffle means.
    means: [[f64; 3]; 4],
    /// `pooled[algorithm][metric]`: per-(shuffle, query) scores in a fixed
    /// order, aligned across algorithms for pairing.
    pooled: [[Vec<f64>; 3]; 4],
}

fn evaluate_group(group: &RunGroup, qrels: &Qrels, params: &ExperimentParams) -> Result<GroupOutcome> {
    if group.systems.len() < 2 {
        return Err(Error::InvalidInput(format!(
            "run group {:?} has {} system(s); need at least 2",
            group.name,
            group.systems.len()
        )));
    }
    let universe: Vec<String> = group
        .systems
        .iter()
        .flat_map(|run| run.query_ids())
        .map(String::from)
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();

    let mut shuffle_means: [[Vec<f64>; 3]; 4] =
        std::array::from_fn(|_| std::array::from_fn(|_| Vec::new()));
    let mut pooled: [[Vec<f64>; 3]; 4] =
        std::array::from_fn(|_| std::array::from_fn(|_| Vec::new()));

    for shuffle_index in 0..params.shuffle_count {
        let (training, test) = split_queries(
            &universe,
            params.training_fraction,
            params.seed,
            shuffle_index as u64,
        )?;
        let training: BTreeSet<String> = training.into_iter().collect();

        let slide_profiles = group
            .systems
            .iter()
            .map(|run| build_profile(run, &training, qrels))
            .collect::<Result<Vec<_>>>()?;
        let probfuse_profiles = group
            .systems
            .iter()
            .map(|run| probfuse_train(run, &training, qrels, params.probfuse_segments))
            .collect::<Result<Vec<_>>>()?;
        let segfuse_profiles = group
            .systems
            .iter()
            .map(|run| segfuse_train(run, &training, qrels))
            .collect::<Result<Vec<_>>>()?;
        let ensemble = FusionEnsemble::new(group.systems.iter().zip(slide_profiles).collect())?;

        let mut fused: [BTreeMap<String, FusedList>; 4] = std::array::from_fn(|_| BTreeMap::new());
        for query_id in &test {
            let mut lists: Vec<&ResultList> = Vec::new();
            let mut probfuse_members = Vec::new();
            let mut segfuse_members = Vec::new();
            for (i, run) in group.systems.iter().enumerate() {
                if let Some(list) = run.get(query_id) {
                    lists.push(list);
                    probfuse_members.push((list, &probfuse_profiles[i]));
                    segfuse_members.push((list, &segfuse_profiles[i]));
                }
            }
            if lists.is_empty() {
                continue;
            }
            fused[Algorithm::CombMnz.index()].insert(query_id.clone(), combmnz(&lists)?);
            fused[Algorithm::ProbFuse.index()]
                .insert(query_id.clone(), probfuse_fuse(&probfuse_members)?);
            fused[Algorithm::SegFuse.index()]
                .insert(query_id.clone(), segfuse_fuse(&segfuse_members)?);
            fused[Algorithm::SlideFuse.index()]
                .insert(query_id.clone(), ensemble.fuse(query_id, params.w));
        }

        for algorithm in Algorithm::ALL {
            let evaluation = evaluate_run(&fused[algorithm.index()], qrels)?;
            for (m, metric) in MetricKind::ALL.into_iter().enumerate() {
                let scores = evaluation.get(metric);
                shuffle_means[algorithm.index()][m].push(scores.mean);
                pooled[algorithm.index()][m].extend(scores.per_query.values().copied());
            }
        }
    }

    let means = std::array::from_fn(|a| {
        std::array::from_fn(|m| {
            let values = &shuffle_means[a][m];
            values.iter().sum::<f64>() / values.len() as f64
        })
    });
    Ok(GroupOutcome { means, pooled })
}

/// Best of the non-SlideFuse scores (first wins on ties) and the
/// percentage by which SlideFuse beats it.
fn vs_best(scores: &[f64; 4]) -> (f64, Algorithm) {
    let mut best = Algorithm::CombMnz;
    for candidate in [Algorithm::ProbFuse, Algorithm::SegFuse] {
        if scores[candidate.index()] > scores[best.index()] {
            best = candidate;
        }
    }
    let best_score = scores[best.index()];
    let slide = scores[Algorithm::SlideFuse.index()];
    let pct = if best_score == 0.0 {
        if slide > 0.0 {
            f64::INFINITY
        } else {
            0.0
        }
    } else {
        (slide - best_score) / best_score * 100.0
    };
    (pct, best)
}

/// Runs the full protocol on in-memory run groups.
pub fn run_experiment_on(
    groups: &[RunGroup],
    qrels: &Qrels,
    params: &ExperimentParams,
) -> Result<ExperimentReport> {
    if groups.is_empty() {
        return Err(Error::InvalidInput("no run groups to evaluate".into()));
    }
    let outcomes = groups
        .iter()
        .map(|group| evaluate_group(group, qrels, params))
        .collect::<Result<Vec<_>>>()?;

    let mut tables = Vec::with_capacity(MetricKind::ALL.len());
    for (m, metric) in MetricKind::ALL.into_iter().enumerate() {
        let mut rows = Vec::with_capacity(groups.len());
        for (group, outcome) in groups.iter().zip(&outcomes) {
            let scores: [f64; 4] = std::array::from_fn(|a| outcome.means[a][m]);
            let (pct, best) = vs_best(&scores);
            let slide_pool = &outcome.pooled[Algorithm::SlideFuse.index()][m];
            let best_pool = &outcome.pooled[best.index()][m];
            let test = paired_t_test(slide_pool, best_pool).ok();
            rows.push(ReportRow {
                label: group.name.clone(),
                scores,
                vs_best_pct: pct,
                significance: test.map(|t| t.significance),
                degenerate_t: test.map(|t| t.degenerate).unwrap_or(false),
            });
        }
        let averages: [f64; 4] = std::array::from_fn(|a| {
            rows.iter().map(|row| row.scores[a]).sum::<f64>() / rows.len() as f64
        });
        let (pct, _) = vs_best(&averages);
        let average = ReportRow {
            label: "average".into(),
            scores: averages,
            vs_best_pct: pct,
            significance: None,
            degenerate_t: false,
        };
        tables.push(MetricTable {
            metric,
            rows,
            average,
        });
    }
    Ok(ExperimentReport { tables })
}

/// Loads the configured topfiles and qrels and runs the full protocol.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    let (groups, qrels) = load_groups(config)?;
    run_experiment_on(&groups, &qrels, &config.params())
}

/// Evaluates every algorithm at each training fraction and tabulates the
/// coefficient of variation of the chosen metric across fractions.
pub fn training_size_sweep_on(
    groups: &[RunGroup],
    qrels: &Qrels,
    params: &ExperimentParams,
    fractions: &[f64],
    metric: MetricKind,
) -> Result<SweepReport> {
    if fractions.is_empty() {
        return Err(Error::InvalidInput("sweep needs at least one fraction".into()));
    }
    for &fraction in fractions {
        if !(fraction > 0.0 && fraction < 1.0) {
            return Err(Error::InvalidInput(format!(
                "training fraction must be in (0, 1), got {fraction}"
            )));
        }
    }
    let metric_index = MetricKind::ALL
        .iter()
        .position(|&k| k == metric)
        .expect("metric is one of the three kinds");

    let mut rows = Vec::with_capacity(groups.len());
    for group in groups {
        let mut scores: [Vec<f64>; 4] = std::array::from_fn(|_| Vec::new());
        for &fraction in fractions {
            let run_params = ExperimentParams {
                training_fraction: fraction,
                ..*params
            };
            let outcome = evaluate_group(group, qrels, &run_params)?;
            for algorithm in Algorithm::ALL {
                scores[algorithm.index()].push(outcome.means[algorithm.index()][metric_index]);
            }
        }
        let mut cv = [0.0f64; 4];
        for algorithm in Algorithm::ALL {
            cv[algorithm.index()] = coefficient_of_variation(&scores[algorithm.index()])?;
        }
        rows.push(SweepRow {
            label: group.name.clone(),
            scores,
            cv,
        });
    }
    Ok(SweepReport {
        metric,
        fractions: fractions.to_vec(),
        rows,
    })
}

/// Loads the configured files and runs the training-size sweep.
pub fn training_size_sweep(
    config: &ExperimentConfig,
    fractions: &[f64],
    metric: MetricKind,
) -> Result<SweepReport> {
    let (groups, qrels) = load_groups(config)?;
    training_size_sweep_on(&groups, &qrels, &config.params(), fractions, metric)
}

fn load_groups(config: &ExperimentConfig) -> Result<(Vec<RunGroup>, Qrels)> {
    let qrels = load_qrels(&config.qrels)?;
    let mut groups = Vec::with_capacity(config.run_groups.len());
    for (i, group_config) in config.run_groups.iter().enumerate() {
        let systems = group_config
            .topfiles
            .iter()
            .map(load_run_file)
            .collect::<Result<Vec<_>>>()?;
        groups.push(RunGroup {
            name: config.group_name(i),
            systems,
        });
    }
    Ok((groups, qrels))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn queries(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("q{i:03}")).collect()
    }

    #[test]
    fn split_sizes_match_the_protocol() {
        let (train, test) = split_queries(&queries(225), 0.10, 42, 0).unwrap();
        assert_eq!(train.len(), 22, "floor(22.5)");
        assert_eq!(test.len(), 203);

        let (train, test) = split_queries(&queries(10), 0.10, 42, 0).unwrap();
        assert_eq!(train.len(), 1, "minimum of one training query");
        assert_eq!(test.len(), 9);

        // 0.3 * 200 lands a hair below 60 in binary floating point.
        let (train, _) = split_queries(&queries(200), 0.30, 42, 0).unwrap();
        assert_eq!(train.len(), 60);
    }

    #[test]
    fn split_is_deterministic_and_keyed() {
        let ids = queries(50);
        let first = split_queries(&ids, 0.2, 7, 3).unwrap();
        let second = split_queries(&ids, 0.2, 7, 3).unwrap();
        assert_eq!(first, second);
        assert_ne!(
            first,
            split_queries(&ids, 0.2, 7, 4).unwrap(),
            "different shuffle index shuffles differently"
        );
        assert_ne!(
            first,
            split_queries(&ids, 0.2, 8, 3).unwrap(),
            "different seed shuffles differently"
        );
    }

    #[test]
    fn split_partitions_the_universe() {
        let ids = queries(31);
        let (train, test) = split_queries(&ids, 0.25, 9, 1).unwrap();
        let mut all: Vec<String> = train.iter().chain(test.iter()).cloned().collect();
        all.sort();
        assert_eq!(all, ids);
    }

    #[test]
    fn split_rejects_tiny_universes() {
        assert!(split_queries(&queries(1), 0.1, 0, 0).is_err());
        assert!(split_queries(&[], 0.1, 0, 0).is_err());
    }

    #[test]
    fn vs_best_prefers_strictly_better_scores() {
        let (pct, best) = vs_best(&[0.1, 0.3, 0.2, 0.45]);
        assert_eq!(best, Algorithm::ProbFuse);
        assert!((pct - 50.0).abs() < 1e-9);

        let (pct, _) = vs_best(&[0.5, 0.2, 0.2, 0.4]);
        assert!((pct - -20.0).abs() < 1e-9, "negative when SlideFuse trails");
    }

    #[test]
    fn report_averages_recompute_and_reports_are_deterministic() {
        use crate::synthetic::{generate, SyntheticSpec};
        let corpus = generate(&SyntheticSpec {
            n_queries: 24,
            docs_per_query: 16,
            relevant_per_query: (2, 6),
            returned_per_system: 10,
            system_biases: vec![1.8, 0.6, -0.4, 1.2, 0.1, -1.3],
            noise: 1.0,
            seed: 31,
        });
        let mut systems = corpus.systems;
        let second_half = systems.split_off(3);
        let groups = vec![
            RunGroup {
                name: "g1".into(),
                systems,
            },
            RunGroup {
                name: "g2".into(),
                systems: second_half,
            },
        ];
        let params = ExperimentParams {
            shuffle_count: 2,
            ..ExperimentParams::default()
        };
        let report = run_experiment_on(&groups, &corpus.qrels, &params).unwrap();

        for table in &report.tables {
            assert_eq!(table.rows.len(), 2);
            for algorithm in Algorithm::ALL {
                let recomputed = table
                    .rows
                    .iter()
                    .map(|row| row.score(algorithm))
                    .sum::<f64>()
                    / table.rows.len() as f64;
                let reported = table.average.score(algorithm);
                assert!(
                    (reported - recomputed).abs() < 1e-12,
                    "{algorithm} {reported} vs {recomputed}"
                );
            }
            for row in table.rows.iter().chain(std::iter::once(&table.average)) {
                let best_other = [Algorithm::CombMnz, Algorithm::ProbFuse, Algorithm::SegFuse]
                    .into_iter()
                    .map(|a| row.score(a))
                    .fold(f64::NEG_INFINITY, f64::max);
                let positive = row.score(Algorithm::SlideFuse) > best_other;
                assert_eq!(row.vs_best_pct > 0.0, positive, "sign tracks the comparison");
            }
        }

        let again = run_experiment_on(&groups, &corpus.qrels, &params).unwrap();
        assert_eq!(report.render_text(), again.render_text());
        assert_eq!(report.render_tsv(), again.render_tsv());
    }
}
