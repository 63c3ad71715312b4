//! Candidate reranking and per-book rank selection.
//!
//! Candidates are sorted by descending original-text probability (stable:
//! ties keep decoder order) and the book's selected rank picks one candidate
//! per sentence. A rank beyond a sentence's candidate count clamps to the
//! last available candidate.

use std::collections::BTreeMap;
use std::io::Write;

use crate::corpus::CandidateSet;
use crate::error::{Error, Result};
use crate::scoring::{ScoreKey, ScorerModel};
use crate::tailoring::RankAssignment;

/// A candidate set plus the permutation ordering candidates by descending
/// probability.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedCandidateSet {
    pub set: CandidateSet,
    /// Probabilities aligned with `set.candidates` (decoder order).
    pub probabilities: Vec<f64>,
    /// Candidate indices in descending-probability order.
    pub order: Vec<usize>,
}

/// Sort a sentence's candidates by probability, stably.
pub fn rank_candidates(cs: &CandidateSet, probabilities: &[f64]) -> Result<RankedCandidateSet> {
    if probabilities.len() != cs.candidates.len() {
        return Err(Error::CountMismatch {
            what: "one probability per candidate",
            expected: cs.candidates.len(),
            actual: probabilities.len(),
        });
    }
    let mut order: Vec<usize> = (0..cs.candidates.len()).collect();
    order.sort_by(|&a, &b| {
        probabilities[b]
            .partial_cmp(&probabilities[a])
            .expect("probabilities are finite")
    });
    Ok(RankedCandidateSet {
        set: cs.clone(),
        probabilities: probabilities.to_vec(),
        order,
    })
}

impl RankedCandidateSet {
    /// Index of the candidate at `rank` (1-based), clamped to the list.
    pub fn candidate_at_rank(&self, rank: usize) -> usize {
        assert!(rank >= 1, "ranks are 1-based");
        self.order[rank.min(self.order.len()) - 1]
    }
}

/// The candidate text at `rank` (1 = highest probability), clamping past the
/// end of short n-best lists.
pub fn select_rank(rcs: &RankedCandidateSet, rank: usize) -> &str {
    &rcs.set.candidates[rcs.candidate_at_rank(rank)].text
}

/// Where candidate probabilities come from when they are not inline.
pub trait CandidateScorer {
    fn probability(&self, book_id: &str, sent_id: u64, cand_idx: usize, text: &str) -> Option<f64>;
}

impl CandidateScorer for ScorerModel {
    fn probability(&self, _: &str, _: u64, _: usize, text: &str) -> Option<f64> {
        Some(self.predict_proba(text))
    }
}

impl CandidateScorer for BTreeMap<ScoreKey, f64> {
    fn probability(&self, book_id: &str, sent_id: u64, cand_idx: usize, _: &str) -> Option<f64> {
        self.get(&(book_id.to_string(), sent_id, cand_idx)).copied()
    }
}

/// One chosen candidate in a reranked document.
#[derive(Debug, Clone, PartialEq)]
pub struct Choice {
    pub sent_id: u64,
    pub cand_idx: usize,
    pub p_original: f64,
}

/// A reranked book: one line per sentence in `sent_id` order.
#[derive(Debug, Clone, PartialEq)]
pub struct RerankedBook {
    pub book_id: String,
    pub selected_rank: usize,
    pub lines: Vec<String>,
    pub choices: Vec<Choice>,
    pub warnings: Vec<String>,
}

impl RerankedBook {
    pub fn text(&self) -> String {
        let mut out = self.lines.join("\n");
        out.push('\n');
        out
    }

    /// Sidecar CSV: `sent_id,chosen_cand_idx,p_original`.
    pub fn write_choices_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "sent_id,chosen_cand_idx,p_original")?;
        for c in &self.choices {
            writeln!(w, "{},{},{:.6}", c.sent_id, c.cand_idx, c.p_original)?;
        }
        Ok(())
    }
}

/// Rerank every sentence of one book at the assignment's selected rank.
///
/// Inline `p_original` values on candidates take precedence over `scorer`
/// (with a warning when both are present); a candidate with neither is an
/// error naming the sentence and candidate index.
pub fn rerank_book(
    sets: &[CandidateSet],
    assignment: &RankAssignment,
    scorer: Option<&dyn CandidateScorer>,
) -> Result<RerankedBook> {
    if sets.is_empty() {
        return Err(Error::EmptyInput("no candidate sets for book"));
    }
    let mut sorted: Vec<&CandidateSet> = Vec::with_capacity(sets.len());
    for set in sets {
        if set.book_id != assignment.book_id {
            return Err(Error::InvalidArgument(format!(
                "candidate set for book `{}` passed to rerank of book `{}`",
                set.book_id, assignment.book_id
            )));
        }
        sorted.push(set);
    }
    sorted.sort_by_key(|s| s.sent_id);
    for pair in sorted.windows(2) {
        if pair[0].sent_id == pair[1].sent_id {
            return Err(Error::InvalidArgument(format!(
                "book `{}`: duplicate sentence id {}",
                assignment.book_id, pair[0].sent_id
            )));
        }
    }

    let mut lines = Vec::with_capacity(sorted.len());
    let mut choices = Vec::with_capacity(sorted.len());
    let mut overridden = 0usize;
    for set in sorted {
        let mut probabilities = Vec::with_capacity(set.candidates.len());
        for (cand_idx, cand) in set.candidates.iter().enumerate() {
            let scored = match scorer {
                Some(s) => s.probability(&set.book_id, set.sent_id, cand_idx, &cand.text),
                None => None,
            };
            let p = match (cand.p_original, scored) {
                (Some(inline), Some(_)) => {
                    overridden += 1;
                    inline
                }
                (Some(inline), None) => inline,
                (None, Some(scored)) => scored,
                (None, None) => {
                    return Err(Error::MissingScore {
                        book_id: set.book_id.clone(),
                        sent_id: set.sent_id,
                        cand_idx,
                    })
                }
            };
            probabilities.push(p);
        }
        let ranked = rank_candidates(set, &probabilities)?;
        let chosen = ranked.candidate_at_rank(assignment.selected_rank);
        lines.push(set.candidates[chosen].text.clone());
        choices.push(Choice {
            sent_id: set.sent_id,
            cand_idx: chosen,
            p_original: probabilities[chosen],
        });
    }

    let mut warnings = Vec::new();
    if overridden > 0 {
        warnings.push(format!(
            "book `{}`: {overridden} inline p_original value(s) override the configured scorer",
            assignment.book_id
        ));
    }
    Ok(RerankedBook {
        book_id: assignment.book_id.clone(),
        selected_rank: assignment.selected_rank,
        lines,
        choices,
        warnings,
    })
}
