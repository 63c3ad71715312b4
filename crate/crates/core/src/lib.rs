//! Lexical diversity measurement and originality-tailored reranking for
//! literary machine translation.
//!
//! The pipeline: ingest books and n-best translation candidates
//! ([`corpus`]), measure per-book lexical diversity ([`diversity`]) and
//! synonym usage ([`sfa`]), score candidates by the probability they are
//! original target-language text ([`scoring`]), derive a per-book rank from
//! the source book's relative diversity ([`tailoring`]), select that rank
//! from each sentence's reranked candidates ([`rerank`]), and evaluate the
//! result ([`evalstats`]).

pub mod corpus;
pub mod diversity;
pub mod error;
pub mod evalstats;
pub mod rerank;
pub mod scoring;
pub mod sfa;
pub mod tailoring;

pub use error::{Error, Result};
