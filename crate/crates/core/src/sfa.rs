//! Synonym Frequency Analysis.
//!
//! For each source lemma that has several dictionary translation options, we
//! count how often each option occurs in the translated output and derive
//! three scores: PTF (mean share of the most frequent option; lower is more
//! varied), CDU (mean cosine distance to the uniform vector of equal total;
//! lower is more even) and SynTTR (observed option types over total option
//! occurrences).
//!
//! A lemma is relevant when its POS is ADJ, NOUN or VERB, it occurs at least
//! once on the source side, and its dictionary entry has at least two
//! options. Option matching is surface-form and lowercase over the
//! metrics-tokenized target stream, with greedy non-overlapping left-to-right
//! matching for multiword options. Rows whose occurrence vector is all zero
//! are excluded from all three averages.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use crate::corpus::{self, LemmaAnnotation, Pos, TokenSeq};
use crate::error::{Error, Result};

/// Map from (headword lemma, POS) to its distinct translation options, each
/// a normalized token sequence (multiword options allowed).
#[derive(Debug, Clone, Default)]
pub struct BilingualDictionary {
    entries: BTreeMap<(String, Pos), Vec<Vec<String>>>,
}

impl BilingualDictionary {
    /// Load a dictionary TSV: `headword	POS	option1,option2,...`.
    ///
    /// Options are comma-separated; multiword options use spaces. Repeated
    /// (headword, POS) rows are merged with set semantics, keeping first-seen
    /// order. Single-option entries are retained but never become relevant
    /// for SFA.
    pub fn load(path: &Path) -> Result<BilingualDictionary> {
        let text = corpus::read_text(path)?;
        let mut dict = BilingualDictionary::default();
        for (idx, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let lineno = idx + 1;
            let parse_err = |message: String| Error::Parse {
                path: path.to_path_buf(),
                line: lineno,
                message,
            };
            let cols: Vec<&str> = line.split('\t').collect();
            if cols.len() != 3 {
                return Err(parse_err(format!(
                    "expected 3 tab-separated columns, got {}",
                    cols.len()
                )));
            }
            let headword = cols[0].trim().to_lowercase();
            if headword.is_empty() {
                return Err(parse_err("empty headword".to_string()));
            }
            let pos = Pos::parse(cols[1])
                .ok_or_else(|| parse_err(format!("unknown POS `{}`", cols[1])))?;
            let mut options = Vec::new();
            for raw in cols[2].split(',') {
                let toks = corpus::tokenize_for_metrics(raw);
                if toks.is_empty() {
                    return Err(parse_err(format!("option `{raw}` has no tokens")));
                }
                options.push(toks);
            }
            if options.is_empty() {
                return Err(parse_err("entry has no options".to_string()));
            }
            let entry = dict.entries.entry((headword, pos)).or_default();
            for opt in options {
                if !entry.contains(&opt) {
                    entry.push(opt);
                }
            }
        }
        Ok(dict)
    }

    pub fn get(&self, lemma: &str, pos: Pos) -> Option<&[Vec<String>]> {
        self.entries
            .get(&(lemma.to_lowercase(), pos))
            .map(|v| v.as_slice())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(String, Pos), &Vec<Vec<String>>)> {
        self.entries.iter()
    }
}

/// Occurrence vector for one relevant source lemma, aligned with the
/// dictionary entry's option order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SynonymRow {
    pub option_counts: Vec<u64>,
    pub source_occurrences: u64,
}

impl SynonymRow {
    pub fn total(&self) -> u64 {
        self.option_counts.iter().sum()
    }
}

/// Per-book table of option occurrence vectors, keyed by (lemma, POS).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SynonymTable {
    pub rows: BTreeMap<(String, Pos), SynonymRow>,
}

/// Scores derived from one synonym table.
#[derive(Debug, Clone, PartialEq)]
pub struct SfaScores {
    pub ptf: f64,
    pub cdu: f64,
    pub syn_ttr: f64,
    /// Rows that actually contributed (positive occurrence total).
    pub n_relevant_words: usize,
}

/// Count non-overlapping occurrences of `needle` in `haystack`, scanning
/// left to right and skipping past each match.
fn count_occurrences(haystack: &[String], needle: &[String]) -> u64 {
    let k = needle.len();
    if k == 0 || haystack.len() < k {
        return 0;
    }
    let mut count = 0;
    let mut i = 0;
    while i + k <= haystack.len() {
        if haystack[i..i + k]
            .iter()
            .zip(needle)
            .all(|(a, b)| a == b)
        {
            count += 1;
            i += k;
        } else {
            i += 1;
        }
    }
    count
}

/// Build the synonym table for one book.
///
/// `source_sentences` is the source book's text, one sentence per line and
/// indexed by `sent_id`; each annotation's entries must align 1:1 with the
/// sentence's whitespace tokens.
pub fn count_options<S: AsRef<str>>(
    lemmas: &[LemmaAnnotation],
    source_sentences: &[S],
    target: &TokenSeq,
    dict: &BilingualDictionary,
) -> Result<SynonymTable> {
    // Source-side occurrence counting, with alignment validation.
    let mut source_occurrences: BTreeMap<(String, Pos), u64> = BTreeMap::new();
    for ann in lemmas {
        let sentence = source_sentences
            .get(ann.sent_id as usize)
            .map(|s| s.as_ref())
            .ok_or_else(|| Error::LemmaMismatch {
                book_id: ann.book_id.clone(),
                sent_id: ann.sent_id,
                detail: format!(
                    "sentence index out of range (book has {} sentences)",
                    source_sentences.len()
                ),
            })?;
        let n_words = sentence.split_whitespace().count();
        if ann.entries.len() != n_words {
            return Err(Error::LemmaMismatch {
                book_id: ann.book_id.clone(),
                sent_id: ann.sent_id,
                detail: format!(
                    "{} entries for {} whitespace tokens",
                    ann.entries.len(),
                    n_words
                ),
            });
        }
        for entry in &ann.entries {
            if matches!(entry.pos, Pos::Adj | Pos::Noun | Pos::Verb) {
                *source_occurrences
                    .entry((entry.lemma.to_lowercase(), entry.pos))
                    .or_insert(0) += 1;
            }
        }
    }

    let mut table = SynonymTable::default();
    for (key, occurrences) in source_occurrences {
        let Some(options) = dict.get(&key.0, key.1) else {
            continue;
        };
        if options.len() < 2 {
            continue;
        }
        let option_counts = options
            .iter()
            .map(|opt| count_occurrences(&target.tokens, opt))
            .collect();
        table.rows.insert(
            key,
            SynonymRow {
                option_counts,
                source_occurrences: occurrences,
            },
        );
    }
    Ok(table)
}

fn contributing_rows(table: &SynonymTable) -> impl Iterator<Item = &SynonymRow> {
    table.rows.values().filter(|r| r.total() > 0)
}

/// Primary translation frequency: mean over contributing rows of
/// max(vector) / sum(vector).
pub fn ptf(table: &SynonymTable) -> Result<f64> {
    let mut sum = 0.0;
    let mut n = 0usize;
    for row in contributing_rows(table) {
        let total = row.total() as f64;
        let max = *row.option_counts.iter().max().expect("non-empty vector") as f64;
        sum += max / total;
        n += 1;
    }
    if n == 0 {
        return Err(Error::UndefinedScore("ptf"));
    }
    Ok(sum / n as f64)
}

/// Mean cosine distance between each contributing row's vector and the
/// uniform vector with the same total.
pub fn cdu(table: &SynonymTable) -> Result<f64> {
    let mut sum = 0.0;
    let mut n = 0usize;
    for row in contributing_rows(table) {
        let total = row.total() as f64;
        let k = row.option_counts.len() as f64;
        let norm: f64 = row
            .option_counts
            .iter()
            .map(|&c| (c * c) as f64)
            .sum::<f64>()
            .sqrt();
        // cos(v, (T/k)·1) simplifies to T / (‖v‖·√k).
        let cos = total / (norm * k.sqrt());
        sum += 1.0 - cos;
        n += 1;
    }
    if n == 0 {
        return Err(Error::UndefinedScore("cdu"));
    }
    Ok(sum / n as f64)
}

/// Observed option types over total option occurrences, across all rows.
pub fn syn_ttr(table: &SynonymTable) -> Result<f64> {
    let mut types = 0u64;
    let mut tokens = 0u64;
    for row in contributing_rows(table) {
        types += row.option_counts.iter().filter(|&&c| c >= 1).count() as u64;
        tokens += row.total();
    }
    if tokens == 0 {
        return Err(Error::UndefinedScore("syn_ttr"));
    }
    Ok(types as f64 / tokens as f64)
}

/// Compute all three scores for one table.
pub fn scores(table: &SynonymTable) -> Result<SfaScores> {
    let n_relevant_words = contributing_rows(table).count();
    Ok(SfaScores {
        ptf: ptf(table)?,
        cdu: cdu(table)?,
        syn_ttr: syn_ttr(table)?,
        n_relevant_words,
    })
}

/// Write a table as CSV for inspection: `lemma,pos,option,count`.
pub fn write_table_csv<W: Write>(
    table: &SynonymTable,
    dict: &BilingualDictionary,
    mut w: W,
) -> std::io::Result<()> {
    writeln!(w, "lemma,pos,option,count")?;
    for ((lemma, pos), row) in &table.rows {
        let options = dict.get(lemma, *pos).unwrap_or(&[]);
        for (opt, count) in options.iter().zip(&row.option_counts) {
            writeln!(w, "{lemma},{pos},{},{count}", opt.join(" "))?;
        }
    }
    Ok(())
}
