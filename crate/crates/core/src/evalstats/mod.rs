//! Statistics and translation-quality evaluation: Pearson correlation with
//! significance, corpus BLEU, and cross-system summary tables.

mod bleu;
mod stats;
mod summary;

pub use bleu::{corpus_bleu, tokenize_13a, BleuResult};
pub use stats::{correlation_p_value, pearson, CorrelationResult};
pub use summary::{summarize, Metric, MetricValues, Summary, SummaryRow, SystemTable};
