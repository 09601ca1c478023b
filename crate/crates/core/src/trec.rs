//! TREC run files and relevance judgments (qrels): parsing and serialization.
//!
//! Run files carry one retrieved document per line,
//! `query_id Q0 doc_id rank score tag`, and qrels files one judgment per
//! line, `query_id iteration doc_id judgment`. Both formats permit blank
//! lines and `#` comment lines. On ingest the score column is the ranking
//! authority: entries are re-sorted by descending score (ties broken by the
//! file's rank column, then by doc id) and assigned contiguous 0-based
//! ranks. On output the rank column is 1-based, per convention.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::fs;
use std::io::{self, BufRead};
use std::path::Path;

use crate::error::{Error, Result};
use crate::slidefuse::FusedList;

/// One retrieved document in a result list.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedEntry {
    /// Opaque document identifier; non-empty, no whitespace.
    pub doc_id: String,
    /// 0-based position in the list.
    pub rank: usize,
    /// The score the originating system assigned to the document.
    pub raw_score: f64,
}

/// One system's ordered answer to one query.
///
/// Entries are contiguously ranked from 0 and no document appears twice.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultList {
    query_id: String,
    entries: Vec<RankedEntry>,
}

impl ResultList {
    /// Builds a list from pre-ranked entries, validating the invariants:
    /// contiguous 0-based ranks, unique non-empty doc ids.
    pub fn new(query_id: impl Into<String>, entries: Vec<RankedEntry>) -> Result<Self> {
        let query_id = query_id.into();
        let mut seen = BTreeSet::new();
        for (i, entry) in entries.iter().enumerate() {
            if entry.rank != i {
                return Err(Error::InvalidInput(format!(
                    "query {query_id}: entry {i} has rank {}, expected contiguous 0-based ranks",
                    entry.rank
                )));
            }
            validate_doc_id(&entry.doc_id)?;
            if !seen.insert(entry.doc_id.as_str()) {
                return Err(Error::InvalidInput(format!(
                    "query {query_id}: duplicate document {}",
                    entry.doc_id
                )));
            }
        }
        Ok(Self { query_id, entries })
    }

    /// Builds a list from `(doc_id, score)` pairs, treating the given order
    /// as the ranking (ranks assigned 0, 1, ...).
    pub fn from_scored(
        query_id: impl Into<String>,
        docs: impl IntoIterator<Item = (String, f64)>,
    ) -> Result<Self> {
        let entries = docs
            .into_iter()
            .enumerate()
            .map(|(rank, (doc_id, raw_score))| RankedEntry {
                doc_id,
                rank,
                raw_score,
            })
            .collect();
        Self::new(query_id, entries)
    }

    pub fn query_id(&self) -> &str {
        &self.query_id
    }

    pub fn entries(&self) -> &[RankedEntry] {
        &self.entries
    }

    /// The result-set size N.
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

fn validate_doc_id(doc_id: &str) -> Result<()> {
    if doc_id.is_empty() || doc_id.chars().any(char::is_whitespace) {
        return Err(Error::InvalidInput(format!(
            "invalid doc id {doc_id:?}: must be non-empty without whitespace"
        )));
    }
    Ok(())
}

/// All result lists one input system produced, keyed by query id.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemRun {
    system_tag: String,
    lists: BTreeMap<String, ResultList>,
}

impl SystemRun {
    /// Assembles a run from per-query lists; query ids must be distinct.
    pub fn new(system_tag: impl Into<String>, lists: Vec<ResultList>) -> Result<Self> {
        let system_tag = system_tag.into();
        let mut map = BTreeMap::new();
        for list in lists {
            let query_id = list.query_id.clone();
            if map.insert(query_id.clone(), list).is_some() {
                return Err(Error::InvalidInput(format!(
                    "duplicate result list for query {query_id}"
                )));
            }
        }
        Ok(Self {
            system_tag,
            lists: map,
        })
    }

    pub fn system_tag(&self) -> &str {
        &self.system_tag
    }

    pub fn lists(&self) -> &BTreeMap<String, ResultList> {
        &self.lists
    }

    pub fn get(&self, query_id: &str) -> Option<&ResultList> {
        self.lists.get(query_id)
    }

    pub fn query_ids(&self) -> impl Iterator<Item = &str> {
        self.lists.keys().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.lists.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lists.is_empty()
    }
}

/// Binary relevance judgment. Pairs absent from [`Qrels`] are unjudged,
/// which is distinct from judged-nonrelevant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Judgment {
    Relevant,
    NonRelevant,
}

/// Relevance judgment store: `(query_id, doc_id) -> Judgment`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Qrels {
    judgments: BTreeMap<String, BTreeMap<String, Judgment>>,
}

impl Qrels {
    pub fn new() -> Self {
        Self::default()
    }

    /// Records a judgment. Repeating an identical judgment is a no-op;
    /// a conflicting one is an error.
    pub fn add(
        &mut self,
        query_id: impl Into<String>,
        doc_id: impl Into<String>,
        judgment: Judgment,
    ) -> Result<()> {
        let query_id = query_id.into();
        let doc_id = doc_id.into();
        let per_query = self.judgments.entry(query_id.clone()).or_default();
        match per_query.get(&doc_id) {
            Some(&existing) if existing != judgment => Err(Error::InvalidInput(format!(
                "conflicting judgment for ({query_id}, {doc_id})"
            ))),
            Some(_) => Ok(()),
            None => {
                per_query.insert(doc_id, judgment);
                Ok(())
            }
        }
    }

    /// The judgment for a pair, or `None` when the pair is unjudged.
    pub fn judgment(&self, query_id: &str, doc_id: &str) -> Option<Judgment> {
        self.judgments.get(query_id)?.get(doc_id).copied()
    }

    pub fn is_relevant(&self, query_id: &str, doc_id: &str) -> bool {
        self.judgment(query_id, doc_id) == Some(Judgment::Relevant)
    }

    /// Number of judged-relevant documents for the query (R).
    pub fn relevant_count(&self, query_id: &str) -> usize {
        self.count(query_id, Judgment::Relevant)
    }

    /// Number of judged-nonrelevant documents for the query.
    pub fn nonrelevant_count(&self, query_id: &str) -> usize {
        self.count(query_id, Judgment::NonRelevant)
    }

    fn count(&self, query_id: &str, judgment: Judgment) -> usize {
        self.judgments
            .get(query_id)
            .map(|m| m.values().filter(|&&j| j == judgment).count())
            .unwrap_or(0)
    }

    pub fn query_ids(&self) -> impl Iterator<Item = &str> {
        self.judgments.keys().map(String::as_str)
    }

    /// All judgments in (query id, doc id) order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, &str, Judgment)> {
        self.judgments.iter().flat_map(|(query_id, docs)| {
            docs.iter()
                .map(move |(doc_id, &judgment)| (query_id.as_str(), doc_id.as_str(), judgment))
        })
    }

    pub fn is_empty(&self) -> bool {
        self.judgments.is_empty()
    }
}

fn is_skippable(line: &str) -> bool {
    let trimmed = line.trim_start();
    trimmed.is_empty() || trimmed.starts_with('#')
}

fn parse_error(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

/// Parses a TREC run file.
///
/// Lines are `query_id Q0 doc_id rank score tag`, whitespace-separated.
/// Entries are grouped by query, re-sorted by descending score (ties broken
/// by the file's rank column, then by doc id) and assigned contiguous
/// 0-based ranks. The system tag is taken from the first data line. Empty
/// input yields a run with zero queries and an empty tag.
pub fn parse_run_file(input: impl BufRead) -> Result<SystemRun> {
    struct RawEntry {
        doc_id: String,
        file_rank: i64,
        score: f64,
    }

    let mut system_tag = String::new();
    let mut per_query: BTreeMap<String, Vec<RawEntry>> = BTreeMap::new();
    let mut seen: BTreeSet<(String, String)> = BTreeSet::new();

    for (idx, line) in input.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        if is_skippable(&line) {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 6 {
            return Err(parse_error(
                line_no,
                format!("expected 6 fields, got {}", fields.len()),
            ));
        }
        let query_id = fields[0].to_string();
        let doc_id = fields[2].to_string();
        let file_rank: i64 = fields[3]
            .parse()
            .map_err(|_| parse_error(line_no, format!("invalid rank {:?}", fields[3])))?;
        let score: f64 = fields[4]
            .parse()
            .map_err(|_| parse_error(line_no, format!("invalid score {:?}", fields[4])))?;
        if system_tag.is_empty() {
            system_tag = fields[5].to_string();
        }
        if !seen.insert((query_id.clone(), doc_id.clone())) {
            return Err(parse_error(
                line_no,
                format!("duplicate document {doc_id} for query {query_id}"),
            ));
        }
        per_query.entry(query_id).or_default().push(RawEntry {
            doc_id,
            file_rank,
            score,
        });
    }

    let mut lists = Vec::with_capacity(per_query.len());
    for (query_id, mut raw) in per_query {
        raw.sort_by(|a, b| {
            b.score
                .total_cmp(&a.score)
                .then_with(|| a.file_rank.cmp(&b.file_rank))
                .then_with(|| a.doc_id.cmp(&b.doc_id))
        });
        let entries = raw
            .into_iter()
            .enumerate()
            .map(|(rank, e)| RankedEntry {
                doc_id: e.doc_id,
                rank,
                raw_score: e.score,
            })
            .collect();
        lists.push(ResultList::new(query_id, entries)?);
    }
    SystemRun::new(system_tag, lists)
}

/// Parses a qrels file.
///
/// Lines are `query_id iteration doc_id judgment` with a non-negative
/// integer judgment; judgment > 0 is stored as relevant, 0 as nonrelevant.
/// Pairs not present remain unjudged.
pub fn parse_qrels(input: impl BufRead) -> Result<Qrels> {
    let mut qrels = Qrels::new();
    for (idx, line) in input.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        if is_skippable(&line) {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 4 {
            return Err(parse_error(
                line_no,
                format!("expected 4 fields, got {}", fields.len()),
            ));
        }
        let value: i64 = fields[3]
            .parse()
            .map_err(|_| parse_error(line_no, format!("invalid judgment {:?}", fields[3])))?;
        if value < 0 {
            return Err(parse_error(
                line_no,
                format!("judgment must be non-negative, got {value}"),
            ));
        }
        let judgment = if value > 0 {
            Judgment::Relevant
        } else {
            Judgment::NonRelevant
        };
        qrels
            .add(fields[0], fields[2], judgment)
            .map_err(|e| parse_error(line_no, e.to_string()))?;
    }
    Ok(qrels)
}

/// Loads and parses a run file from disk, attributing errors to the path.
pub fn load_run_file(path: impl AsRef<Path>) -> Result<SystemRun> {
    let path = path.as_ref();
    let file = fs::File::open(path).map_err(|e| Error::from(e).in_file(path.display().to_string()))?;
    parse_run_file(io::BufReader::new(file)).map_err(|e| e.in_file(path.display().to_string()))
}

/// Loads and parses a qrels file from disk, attributing errors to the path.
pub fn load_qrels(path: impl AsRef<Path>) -> Result<Qrels> {
    let path = path.as_ref();
    let file = fs::File::open(path).map_err(|e| Error::from(e).in_file(path.display().to_string()))?;
    parse_qrels(io::BufReader::new(file)).map_err(|e| e.in_file(path.display().to_string()))
}

/// Renders fused lists as a TREC run file with the given tag.
///
/// Queries are emitted in ascending query-id order, entries in list order
/// with a 1-based rank column. Output is byte-identical across calls on
/// equal input.
pub fn render_run_file(fused: &BTreeMap<String, FusedList>, tag: &str) -> String {
    let mut out = String::new();
    for (query_id, list) in fused {
        for (i, entry) in list.entries().iter().enumerate() {
            writeln!(
                out,
                "{} Q0 {} {} {} {}",
                query_id,
                entry.doc_id,
                i + 1,
                entry.score,
                tag
            )
            .expect("writing to String cannot fail");
        }
    }
    out
}

/// Writes fused lists as a TREC run file to `out`.
pub fn write_run_file(
    out: &mut impl io::Write,
    fused: &BTreeMap<String, FusedList>,
    tag: &str,
) -> io::Result<()> {
    out.write_all(render_run_file(fused, tag).as_bytes())
}

/// Renders judgments in the qrels format, one `query_id 0 doc_id judgment`
/// line per pair in (query id, doc id) order.
pub fn render_qrels(qrels: &Qrels) -> String {
    let mut out = String::new();
    for (query_id, doc_id, judgment) in qrels.iter() {
        let value = match judgment {
            Judgment::Relevant => 1,
            Judgment::NonRelevant => 0,
        };
        writeln!(out, "{query_id} 0 {doc_id} {value}").expect("writing to String cannot fail");
    }
    out
}

/// Renders a system run back to the TREC run format (1-based rank column,
/// raw scores, the run's own tag).
pub fn render_system_run(run: &SystemRun) -> String {
    let mut out = String::new();
    for (query_id, list) in run.lists() {
        for entry in list.entries() {
            writeln!(
                out,
                "{} Q0 {} {} {} {}",
                query_id,
                entry.doc_id,
                entry.rank + 1,
                entry.raw_score,
                run.system_tag()
            )
            .expect("writing to String cannot fail");
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse_run(text: &str) -> SystemRun {
        parse_run_file(text.as_bytes()).expect("fixture parses")
    }

    #[test]
    fn single_line_run() {
        let run = parse_run("301 Q0 DOC7 1 12.5 sysA\n");
        assert_eq!(run.system_tag(), "sysA");
        assert_eq!(run.len(), 1);
        let list = run.get("301").unwrap();
        assert_eq!(list.len(), 1);
        assert_eq!(list.entries()[0].doc_id, "DOC7");
        assert_eq!(list.entries()[0].rank, 0);
        assert_eq!(list.entries()[0].raw_score, 12.5);
    }

    #[test]
    fn empty_input_yields_zero_queries() {
        let run = parse_run("");
        assert!(run.is_empty());
        let run = parse_run("\n# comment only\n\n");
        assert!(run.is_empty());
    }

    #[test]
    fn entries_reranked_by_descending_score() {
        let run = parse_run(
            "301 Q0 A 1 5.0 sys\n\
             301 Q0 B 2 9.0 sys\n\
             301 Q0 C 3 1.0 sys\n",
        );
        let list = run.get("301").unwrap();
        let order: Vec<&str> = list.doc_ids().collect();
        assert_eq!(order, ["B", "A", "C"]);
        assert_eq!(
            list.entries().iter().map(|e| e.rank).collect::<Vec<_>>(),
            [0, 1, 2]
        );
    }

    #[test]
    fn score_ties_broken_by_file_rank_then_doc_id() {
        let run = parse_run(
            "301 Q0 ZZ 1 4.0 sys\n\
             301 Q0 AA 2 4.0 sys\n",
        );
        let order: Vec<&str> = run.get("301").unwrap().doc_ids().collect();
        assert_eq!(order, ["ZZ", "AA"], "file rank wins before doc id");

        let run = parse_run(
            "301 Q0 ZZ 7 4.0 sys\n\
             301 Q0 AA 7 4.0 sys\n",
        );
        let order: Vec<&str> = run.get("301").unwrap().doc_ids().collect();
        assert_eq!(order, ["AA", "ZZ"], "equal file ranks fall back to doc id");
    }

    #[test]
    fn malformed_lines_carry_line_numbers() {
        let err = parse_run_file("301 Q0 DOC7 1 12.5 sysA\n301 Q0 DOC8 2\n".as_bytes())
            .expect_err("wrong field count");
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");

        let err = parse_run_file("301 Q0 DOC7 1 high sysA\n".as_bytes())
            .expect_err("non-numeric score");
        assert!(matches!(err, Error::Parse { line: 1, .. }), "{err}");

        let err = parse_run_file(
            "301 Q0 DOC7 1 1.0 sysA\n301 Q0 DOC7 2 0.5 sysA\n".as_bytes(),
        )
        .expect_err("duplicate doc");
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
    }

    #[test]
    fn qrels_basics() {
        let qrels = parse_qrels(
            "301 0 DOC7 1\n\
             301 0 DOC8 0\n\
             302 0 DOC7 2\n\
             302 0 DOC9 0\n"
                .as_bytes(),
        )
        .unwrap();
        assert_eq!(qrels.judgment("301", "DOC7"), Some(Judgment::Relevant));
        assert_eq!(qrels.judgment("301", "DOC8"), Some(Judgment::NonRelevant));
        assert_eq!(qrels.judgment("301", "DOC9"), None, "absent pair is unjudged");
        assert_eq!(qrels.judgment("302", "DOC7"), Some(Judgment::Relevant));
        assert_eq!(qrels.relevant_count("301"), 1);
        assert_eq!(qrels.nonrelevant_count("302"), 1);
    }

    #[test]
    fn qrels_conflicts_and_malformed_lines() {
        let err = parse_qrels("301 0 DOC7 1\n301 0 DOC7 0\n".as_bytes())
            .expect_err("conflicting judgment");
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");

        // An identical duplicate is tolerated.
        let qrels = parse_qrels("301 0 DOC7 1\n301 0 DOC7 1\n".as_bytes()).unwrap();
        assert_eq!(qrels.relevant_count("301"), 1);

        let err = parse_qrels("301 0 DOC7\n".as_bytes()).expect_err("missing field");
        assert!(matches!(err, Error::Parse { line: 1, .. }), "{err}");

        let err = parse_qrels("301 0 DOC7 -1\n".as_bytes()).expect_err("negative judgment");
        assert!(matches!(err, Error::Parse { line: 1, .. }), "{err}");
    }

    #[test]
    fn qrels_round_trip() {
        let text = "301 0 D1 1\n301 0 D2 0\n302 0 D9 1\n";
        let qrels = parse_qrels(text.as_bytes()).unwrap();
        assert_eq!(render_qrels(&qrels), text);
        assert_eq!(parse_qrels(render_qrels(&qrels).as_bytes()).unwrap(), qrels);
    }

    #[test]
    fn render_single_fused_entry() {
        let mut fused = BTreeMap::new();
        fused.insert(
            "301".to_string(),
            FusedList::from_scores("301", [("DOCX".to_string(), 0.7)]),
        );
        assert_eq!(render_run_file(&fused, "slidefuse"), "301 Q0 DOCX 1 0.7 slidefuse\n");
    }

    #[test]
    fn render_breaks_score_ties_by_doc_id() {
        let mut fused = BTreeMap::new();
        fused.insert(
            "301".to_string(),
            FusedList::from_scores("301", [("ZET".to_string(), 0.5), ("ALF".to_string(), 0.5)]),
        );
        let text = render_run_file(&fused, "t");
        assert_eq!(text, "301 Q0 ALF 1 0.5 t\n301 Q0 ZET 2 0.5 t\n");
    }

    #[test]
    fn write_then_parse_round_trips_ranking() {
        let mut fused = BTreeMap::new();
        fused.insert(
            "301".to_string(),
            FusedList::from_scores(
                "301",
                [
                    ("B".to_string(), 0.9),
                    ("A".to_string(), 0.6),
                    ("C".to_string(), 0.3),
                ],
            ),
        );
        fused.insert(
            "302".to_string(),
            FusedList::from_scores("302", [("D".to_string(), 1.0)]),
        );
        let text = render_run_file(&fused, "fuse");
        let run = parse_run(&text);
        assert_eq!(run.system_tag(), "fuse");
        assert_eq!(
            run.get("301").unwrap().doc_ids().collect::<Vec<_>>(),
            ["B", "A", "C"]
        );
        assert_eq!(run.get("302").unwrap().doc_ids().collect::<Vec<_>>(), ["D"]);
    }
}
