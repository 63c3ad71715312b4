//! Corpus BLEU-4 matching the reference scorer's defaults: case-sensitive,
//! mteval-13a-style international tokenization, corpus-level clipped n-gram
//! counting, exponential brevity penalty, and exponential smoothing of
//! zero-match precisions (each zero order halves a running smoothing term).

use std::collections::HashMap;
use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const MAX_ORDER: usize = 4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BleuResult {
    /// Corpus BLEU in [0, 100].
    pub score: f64,
    /// N-gram precisions p1..p4, as percentages.
    pub precisions: [f64; MAX_ORDER],
    pub brevity_penalty: f64,
    pub hyp_len: usize,
    pub ref_len: usize,
}

static PUNCT: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"([\{-\~\[-\` -\&\(-\+\:-\@\/])").unwrap());
static PERIOD_COMMA_PRE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"([^0-9])([\.,])").unwrap());
static PERIOD_COMMA_POST: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"([\.,])([^0-9])").unwrap());
static DIGIT_DASH: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"([0-9])(-)").unwrap());

/// International tokenization in the mteval-v13a style: punctuation is split
/// from words, periods and commas stay attached between digits, and a dash
/// after a digit splits. Case is preserved.
pub fn tokenize_13a(line: &str) -> Vec<String> {
    let mut s = line.replace("<skipped>", "");
    s = s.replace("-\n", "");
    s = s.replace('\n', " ");
    if s.contains('&') {
        s = s.replace("&quot;", "\"");
        s = s.replace("&amp;", "&");
        s = s.replace("&lt;", "<");
        s = s.replace("&gt;", ">");
    }
    let s = format!(" {s} ");
    let s = PUNCT.replace_all(&s, " $1 ");
    let s = PERIOD_COMMA_PRE.replace_all(&s, "$1 $2 ");
    let s = PERIOD_COMMA_POST.replace_all(&s, " $1 $2");
    let s = DIGIT_DASH.replace_all(&s, "$1 $2 ");
    s.split_whitespace().map(str::to_string).collect()
}

fn ngram_counts(tokens: &[String], n: usize) -> HashMap<&[String], u64> {
    let mut counts: HashMap<&[String], u64> = HashMap::new();
    if tokens.len() >= n {
        for window in tokens.windows(n) {
            *counts.entry(window).or_insert(0) += 1;
        }
    }
    counts
}

/// Corpus BLEU of `hypotheses` against their aligned single `references`.
pub fn corpus_bleu<H: AsRef<str>, R: AsRef<str>>(
    hypotheses: &[H],
    references: &[R],
) -> Result<BleuResult> {
    if hypotheses.len() != references.len() {
        return Err(Error::CountMismatch {
            what: "hypothesis/reference sentence counts",
            expected: references.len(),
            actual: hypotheses.len(),
        });
    }
    if hypotheses.is_empty() {
        return Err(Error::EmptyInput("BLEU over an empty corpus"));
    }

    let mut hyp_len = 0usize;
    let mut ref_len = 0usize;
    let mut correct = [0u64; MAX_ORDER];
    let mut total = [0u64; MAX_ORDER];
    for (hyp, reference) in hypotheses.iter().zip(references) {
        let hyp_tokens = tokenize_13a(hyp.as_ref());
        let ref_tokens = tokenize_13a(reference.as_ref());
        hyp_len += hyp_tokens.len();
        ref_len += ref_tokens.len();
        for n in 1..=MAX_ORDER {
            let hyp_counts = ngram_counts(&hyp_tokens, n);
            let ref_counts = ngram_counts(&ref_tokens, n);
            for (ngram, &count) in &hyp_counts {
                let clip = ref_counts.get(ngram).copied().unwrap_or(0);
                correct[n - 1] += count.min(clip);
            }
            total[n - 1] += hyp_tokens.len().saturating_sub(n - 1) as u64;
        }
    }

    let mut precisions = [0.0f64; MAX_ORDER];
    let mut smooth = 1.0f64;
    for n in 0..MAX_ORDER {
        if total[n] == 0 {
            break;
        }
        if correct[n] == 0 {
            smooth *= 2.0;
            precisions[n] = 100.0 / (smooth * total[n] as f64);
        } else {
            precisions[n] = 100.0 * correct[n] as f64 / total[n] as f64;
        }
    }

    let brevity_penalty = if hyp_len < ref_len {
        if hyp_len == 0 {
            0.0
        } else {
            (1.0 - ref_len as f64 / hyp_len as f64).exp()
        }
    } else {
        1.0
    };

    let score = if precisions.iter().any(|&p| p == 0.0) {
        0.0
    } else if precisions.iter().all(|&p| p == 100.0) {
        // Exact geometric mean; avoids exp/ln rounding on a perfect match.
        brevity_penalty * 100.0
    } else {
        let mean_log = precisions.iter().map(|p| p.ln()).sum::<f64>() / MAX_ORDER as f64;
        brevity_penalty * mean_log.exp()
    };

    Ok(BleuResult {
        score,
        precisions,
        brevity_penalty,
        hyp_len,
        ref_len,
    })
}
