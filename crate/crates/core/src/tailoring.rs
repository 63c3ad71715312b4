//! Per-book LexDiv scores and originality-rank assignment.
//!
//! Each book's LexDiv score is the mean of its min-max-normalized TTR,
//! Yule's I and MTLD over the analyzed book set. Books are sorted ascending
//! by LexDiv and split into `n` consecutive bins of `floor(B/n)` books, the
//! remainder going to the last (highest-diversity) bin. Bin `b` selects
//! originality rank `n + 1 − b`, so the most diverse books select rank 1
//! (the candidate with the highest original-text probability) and the least
//! diverse books the lowest-probability rank.

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::diversity::DiversityProfile;
use crate::error::{Error, Result};

/// Normalized diversity components and their mean for one book.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LexDivScore {
    pub book_id: String,
    pub normalized_ttr: f64,
    pub normalized_yules_i: f64,
    pub normalized_mtld: f64,
    pub lexdiv: f64,
}

/// The originality rank selected for one book by the binning algorithm.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankAssignment {
    pub book_id: String,
    /// 1 = lowest-diversity bin.
    pub bin_index: usize,
    /// 1 = highest originality probability.
    pub selected_rank: usize,
}

/// Min-max normalize one metric across the book set. When every book has
/// the same value the metric carries no information and maps to 0.5.
fn normalize(values: &[f64]) -> Vec<f64> {
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == min {
        return vec![0.5; values.len()];
    }
    values.iter().map(|v| (v - min) / (max - min)).collect()
}

/// Compute LexDiv scores for a profile set. Every profile must have all
/// three metrics defined; output order matches input order.
pub fn lexdiv_scores(profiles: &[DiversityProfile]) -> Result<Vec<LexDivScore>> {
    if profiles.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "lexdiv normalization needs at least 2 profiles, got {}",
            profiles.len()
        )));
    }
    let mut yules = Vec::with_capacity(profiles.len());
    let mut mtlds = Vec::with_capacity(profiles.len());
    for p in profiles {
        yules.push(p.yules_i.ok_or_else(|| Error::UndefinedProfile {
            book_id: p.book_id.clone(),
            metric: "yule's i",
        })?);
        mtlds.push(p.mtld.ok_or_else(|| Error::UndefinedProfile {
            book_id: p.book_id.clone(),
            metric: "mtld",
        })?);
    }
    let ttrs: Vec<f64> = profiles.iter().map(|p| p.ttr).collect();

    let n_ttr = normalize(&ttrs);
    let n_yules = normalize(&yules);
    let n_mtld = normalize(&mtlds);

    Ok(profiles
        .iter()
        .enumerate()
        .map(|(i, p)| LexDivScore {
            book_id: p.book_id.clone(),
            normalized_ttr: n_ttr[i],
            normalized_yules_i: n_yules[i],
            normalized_mtld: n_mtld[i],
            lexdiv: (n_ttr[i] + n_yules[i] + n_mtld[i]) / 3.0,
        })
        .collect())
}

/// Bin books by LexDiv and map each bin to its selected rank.
///
/// Returns assignments in ascending LexDiv order (ties broken by book id),
/// which makes the output independent of the input permutation.
pub fn assign_bins(scores: &[LexDivScore], n: usize) -> Result<Vec<RankAssignment>> {
    if n < 1 {
        return Err(Error::InvalidArgument("rank count must be at least 1".to_string()));
    }
    if scores.len() < n {
        return Err(Error::InvalidArgument(format!(
            "cannot bin {} books into {n} groups",
            scores.len()
        )));
    }
    let mut sorted: Vec<&LexDivScore> = scores.iter().collect();
    sorted.sort_by(|a, b| {
        a.lexdiv
            .partial_cmp(&b.lexdiv)
            .expect("lexdiv is finite")
            .then_with(|| a.book_id.cmp(&b.book_id))
    });

    let base = sorted.len() / n;
    let mut assignments = Vec::with_capacity(sorted.len());
    for (i, score) in sorted.iter().enumerate() {
        // The remainder lands in the last bin: positions past (n-1)·base
        // all map to bin n.
        let bin_index = (i / base + 1).min(n);
        assignments.push(RankAssignment {
            book_id: score.book_id.clone(),
            bin_index,
            selected_rank: n + 1 - bin_index,
        });
    }
    Ok(assignments)
}

/// Write assignments as CSV: `book_id,lexdiv,bin_index,selected_rank`.
pub fn write_assignments_csv<W: Write>(
    scores: &[LexDivScore],
    assignments: &[RankAssignment],
    mut w: W,
) -> std::io::Result<()> {
    let lexdiv_by_id: BTreeMap<&str, f64> = scores
        .iter()
        .map(|s| (s.book_id.as_str(), s.lexdiv))
        .collect();
    writeln!(w, "book_id,lexdiv,bin_index,selected_rank")?;
    for a in assignments {
        let lexdiv = lexdiv_by_id.get(a.book_id.as_str()).copied();
        writeln!(
            w,
            "{},{},{},{}",
            a.book_id,
            lexdiv.map(|v| format!("{v:.6}")).unwrap_or_default(),
            a.bin_index,
            a.selected_rank
        )?;
    }
    Ok(())
}
