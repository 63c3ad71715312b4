//! General lexical diversity metrics: TTR, Yule's I and MTLD.
//!
//! Yule's I is computed from the frequency spectrum as
//! `I = V² / (Σᵢ i²·t(i,N) − V)` where `V` is the number of types and
//! `t(i,N)` the number of types occurring exactly `i` times. MTLD is
//! bidirectional: the factor count grows by one whenever the running segment
//! TTR drops to or below the threshold, a partial factor
//! `(1 − final TTR) / (1 − threshold)` covers the tail, and the reported
//! value is the mean of the forward and backward passes.
//!
//! Degenerate inputs (all-distinct text for Yule's I, text that never crosses
//! the MTLD threshold and ends at TTR 1.0) yield undefined-metric errors; in
//! a [`DiversityProfile`] these become `None` flags rather than zeros so they
//! cannot corrupt min-max normalization downstream.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::{self, BookRef, TokenSeq};
use crate::error::{Error, Result};

/// Running-TTR threshold at which an MTLD factor completes.
pub const DEFAULT_MTLD_THRESHOLD: f64 = 0.72;

/// Per-book record of the three general diversity metrics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiversityProfile {
    pub book_id: String,
    pub n_tokens: usize,
    pub n_types: usize,
    pub ttr: f64,
    /// `None` when every token is distinct (zero denominator).
    pub yules_i: Option<f64>,
    /// `None` when the text never crosses the threshold and ends at TTR 1.0.
    pub mtld: Option<f64>,
}

/// Type-token ratio: distinct tokens over total tokens.
pub fn ttr<S: AsRef<str>>(tokens: &[S]) -> Result<f64> {
    if tokens.is_empty() {
        return Err(Error::EmptyInput("ttr of an empty token sequence"));
    }
    let types: std::collections::BTreeSet<&str> =
        tokens.iter().map(|t| t.as_ref()).collect();
    Ok(types.len() as f64 / tokens.len() as f64)
}

/// Yule's I over the token frequency spectrum.
pub fn yules_i<S: AsRef<str>>(tokens: &[S]) -> Result<f64> {
    if tokens.is_empty() {
        return Err(Error::EmptyInput("yule's i of an empty token sequence"));
    }
    let mut freq: BTreeMap<&str, u64> = BTreeMap::new();
    for t in tokens {
        *freq.entry(t.as_ref()).or_insert(0) += 1;
    }
    let v = freq.len() as f64;
    // Σᵢ i²·t(i,N) equals the sum of squared per-type counts.
    let sum_sq: f64 = freq.values().map(|&c| (c * c) as f64).sum();
    let denom = sum_sq - v;
    if denom == 0.0 {
        return Err(Error::UndefinedMetric {
            metric: "yule's i",
            reason: "all tokens are distinct (denominator is zero)".to_string(),
        });
    }
    Ok(v * v / denom)
}

fn mtld_pass<'a, I>(tokens: I, n: usize, threshold: f64) -> Option<f64>
where
    I: Iterator<Item = &'a str>,
{
    let mut factors = 0.0f64;
    let mut segment_types: std::collections::HashSet<&str> = std::collections::HashSet::new();
    let mut segment_len = 0usize;
    for tok in tokens {
        segment_len += 1;
        segment_types.insert(tok);
        let running_ttr = segment_types.len() as f64 / segment_len as f64;
        if running_ttr <= threshold {
            factors += 1.0;
            segment_types.clear();
            segment_len = 0;
        }
    }
    if segment_len > 0 {
        let final_ttr = segment_types.len() as f64 / segment_len as f64;
        factors += (1.0 - final_ttr) / (1.0 - threshold);
    }
    if factors == 0.0 {
        None
    } else {
        Some(n as f64 / factors)
    }
}

/// Bidirectional MTLD: mean of the forward and backward factor passes.
pub fn mtld<S: AsRef<str>>(tokens: &[S], threshold: f64) -> Result<f64> {
    if tokens.is_empty() {
        return Err(Error::EmptyInput("mtld of an empty token sequence"));
    }
    if !(0.0 < threshold && threshold < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "mtld threshold must lie in (0,1), got {threshold}"
        )));
    }
    let n = tokens.len();
    let forward = mtld_pass(tokens.iter().map(|t| t.as_ref()), n, threshold);
    let backward = mtld_pass(tokens.iter().rev().map(|t| t.as_ref()), n, threshold);
    match (forward, backward) {
        (Some(f), Some(b)) => Ok((f + b) / 2.0),
        _ => Err(Error::UndefinedMetric {
            metric: "mtld",
            reason: "zero factors: the text never crosses the threshold and ends at TTR 1.0"
                .to_string(),
        }),
    }
}

/// Profile a token stream: undefined metrics become flags, not failures.
pub fn profile_tokens<S: AsRef<str>>(
    book_id: &str,
    tokens: &[S],
    threshold: f64,
) -> Result<DiversityProfile> {
    if tokens.is_empty() {
        return Err(Error::EmptyInput("cannot profile an empty book"));
    }
    let n_tokens = tokens.len();
    let n_types = tokens
        .iter()
        .map(|t| t.as_ref())
        .collect::<std::collections::BTreeSet<&str>>()
        .len();
    let flag = |r: Result<f64>| match r {
        Ok(v) => Ok(Some(v)),
        Err(Error::UndefinedMetric { .. }) => Ok(None),
        Err(e) => Err(e),
    };
    Ok(DiversityProfile {
        book_id: book_id.to_string(),
        n_tokens,
        n_types,
        ttr: n_types as f64 / n_tokens as f64,
        yules_i: flag(yules_i(tokens))?,
        mtld: flag(mtld(tokens, threshold))?,
    })
}

/// Load a book and profile its whole text as one token stream.
pub fn profile_book(book: &BookRef, base: &Path, threshold: f64) -> Result<DiversityProfile> {
    let seq = corpus::load_book(book, base)?;
    profile_seq(&seq, threshold)
}

/// Profile an already tokenized book.
pub fn profile_seq(seq: &TokenSeq, threshold: f64) -> Result<DiversityProfile> {
    profile_tokens(&seq.book.id, &seq.tokens, threshold)
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.6}")).unwrap_or_default()
}

/// Write profiles as CSV: `book_id,n_tokens,n_types,ttr,yules_i,mtld`,
/// with empty cells for undefined metrics.
pub fn write_profiles_csv<W: Write>(profiles: &[DiversityProfile], mut w: W) -> std::io::Result<()> {
    writeln!(w, "book_id,n_tokens,n_types,ttr,yules_i,mtld")?;
    for p in profiles {
        writeln!(
            w,
            "{},{},{},{:.6},{},{}",
            p.book_id,
            p.n_tokens,
            p.n_types,
            p.ttr,
            fmt_opt(p.yules_i),
            fmt_opt(p.mtld),
        )?;
    }
    Ok(())
}
