//! Experiment report structures and their text/TSV renderings.

use std::fmt::Write as _;

use crate::experiments::stats::Significance;
use crate::metrics::MetricKind;

/// The four fusion algorithms compared by the harness, in report column
/// order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    CombMnz,
    ProbFuse,
    SegFuse,
    SlideFuse,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [
        Algorithm::CombMnz,
        Algorithm::ProbFuse,
        Algorithm::SegFuse,
        Algorithm::SlideFuse,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::CombMnz => "CombMNZ",
            Algorithm::ProbFuse => "ProbFuse",
            Algorithm::SegFuse => "SegFuse",
            Algorithm::SlideFuse => "SlideFuse",
        }
    }

    pub fn index(&self) -> usize {
        *self as usize
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// One table row: scores per algorithm plus the SlideFuse-vs-best-other
/// comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub label: String,
    /// Indexed by [`Algorithm::index`].
    pub scores: [f64; 4],
    /// `(SlideFuse - best other) / best other`, as a percentage.
    pub vs_best_pct: f64,
    /// `None` when no test was run (the averages row); otherwise the
    /// paired t-test outcome for SlideFuse against the row's best other
    /// algorithm.
    pub significance: Option<Significance>,
    /// The t-test hit the zero-variance guard.
    pub degenerate_t: bool,
}

impl ReportRow {
    pub fn score(&self, algorithm: Algorithm) -> f64 {
        self.scores[algorithm.index()]
    }

    fn significance_marker(&self) -> &'static str {
        self.significance.map(|s| s.marker()).unwrap_or("")
    }
}

/// All rows for one evaluation measure.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricTable {
    pub metric: MetricKind,
    pub rows: Vec<ReportRow>,
    pub average: ReportRow,
}

/// The full report: one table per measure, in MAP, bpref, P10 order.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub tables: Vec<MetricTable>,
}

impl ExperimentReport {
    pub fn table(&self, metric: MetricKind) -> &MetricTable {
        self.tables
            .iter()
            .find(|t| t.metric == metric)
            .expect("report carries all three metrics")
    }

    /// Human-readable aligned-column rendering.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        for (i, table) in self.tables.iter().enumerate() {
            if i > 0 {
                out.push('\n');
            }
            render_metric_table(&mut out, table);
        }
        out
    }

    /// Machine-readable tab-separated rendering.
    pub fn render_tsv(&self) -> String {
        let mut out = String::from(
            "metric\tgroup\tCombMNZ\tProbFuse\tSegFuse\tSlideFuse\tvs_best_pct\tsignificance\n",
        );
        for table in &self.tables {
            for row in table.rows.iter().chain(std::iter::once(&table.average)) {
                writeln!(
                    out,
                    "{}\t{}\t{:.6}\t{:.6}\t{:.6}\t{:.6}\t{:.6}\t{}",
                    table.metric,
                    row.label,
                    row.scores[0],
                    row.scores[1],
                    row.scores[2],
                    row.scores[3],
                    row.vs_best_pct,
                    row.significance_marker(),
                )
                .expect("writing to String cannot fail");
            }
        }
        out
    }
}

fn render_metric_table(out: &mut String, table: &MetricTable) {
    let label_width = table
        .rows
        .iter()
        .map(|r| r.label.len())
        .chain(std::iter::once("average".len()))
        .max()
        .unwrap_or(7);
    writeln!(out, "== {} ==", table.metric).expect("writing to String cannot fail");
    write!(out, "{:<label_width$}", "").expect("writing to String cannot fail");
    for algorithm in Algorithm::ALL {
        write!(out, "  {:>9}", algorithm.name()).expect("writing to String cannot fail");
    }
    writeln!(out, "  {:>9}", "vs. Best").expect("writing to String cannot fail");
    for row in table.rows.iter().chain(std::iter::once(&table.average)) {
        write!(out, "{:<label_width$}", row.label).expect("writing to String cannot fail");
        for score in row.scores {
            write!(out, "  {score:>9.4}").expect("writing to String cannot fail");
        }
        let vs_best = format!("{:.2}%", row.vs_best_pct);
        write!(out, "  {vs_best:>9}").expect("writing to String cannot fail");
        let marker = row.significance_marker();
        if !marker.is_empty() {
            write!(out, " {marker}").expect("writing to String cannot fail");
        }
        out.push('\n');
    }
}

/// Coefficient-of-variation study across training-set fractions.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    pub metric: MetricKind,
    pub fractions: Vec<f64>,
    pub rows: Vec<SweepRow>,
}

/// One run group's sweep outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub label: String,
    /// Per algorithm, the metric score at each fraction (same order as
    /// `SweepReport::fractions`).
    pub scores: [Vec<f64>; 4],
    /// Per algorithm, the coefficient of variation across fractions.
    pub cv: [f64; 4],
}

impl SweepReport {
    /// Human-readable aligned-column rendering, one CV per algorithm.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let fractions = self
            .fractions
            .iter()
            .map(|f| format!("{:.0}%", f * 100.0))
            .collect::<Vec<_>>()
            .join(", ");
        writeln!(
            out,
            "== Coefficient of variation for {} across training sizes {} ==",
            self.metric, fractions
        )
        .expect("writing to String cannot fail");
        let label_width = self
            .rows
            .iter()
            .map(|r| r.label.len())
            .max()
            .unwrap_or(5)
            .max(5);
        write!(out, "{:<label_width$}", "").expect("writing to String cannot fail");
        for algorithm in Algorithm::ALL {
            write!(out, "  {:>9}", algorithm.name()).expect("writing to String cannot fail");
        }
        out.push('\n');
        for row in &self.rows {
            write!(out, "{:<label_width$}", row.label).expect("writing to String cannot fail");
            for cv in row.cv {
                write!(out, "  {cv:>9.4}").expect("writing to String cannot fail");
            }
            out.push('\n');
        }
        out
    }

    /// Machine-readable tab-separated rendering with per-fraction scores.
    pub fn render_tsv(&self) -> String {
        let mut out = String::from("metric\tgroup\talgorithm\tcv");
        for fraction in &self.fractions {
            write!(out, "\tscore@{fraction}").expect("writing to String cannot fail");
        }
        out.push('\n');
        for row in &self.rows {
            for algorithm in Algorithm::ALL {
                write!(
                    out,
                    "{}\t{}\t{}\t{:.6}",
                    self.metric,
                    row.label,
                    algorithm,
                    row.cv[algorithm.index()],
                )
                .expect("writing to String cannot fail");
                for score in &row.scores[algorithm.index()] {
                    write!(out, "\t{score:.6}").expect("writing to String cannot fail");
                }
                out.push('\n');
            }
        }
        out
    }
}
