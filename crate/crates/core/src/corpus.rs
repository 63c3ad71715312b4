//! Book ingestion and text normalization.
//!
//! Everything downstream works on [`TokenSeq`] values produced here. Books
//! arrive as UTF-8 plain text with one sentence per line; translation
//! candidates as JSON-lines; lemma annotations and manifests as TSV. Sentence
//! boundaries always come from the input's line structure and are never
//! re-detected.

use std::collections::BTreeSet;
use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which side of the translation process a book text represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Source,
    HumanTranslation,
    MachineTranslation,
}

impl Role {
    pub fn as_str(self) -> &'static str {
        match self {
            Role::Source => "source",
            Role::HumanTranslation => "human_translation",
            Role::MachineTranslation => "machine_translation",
        }
    }

    pub fn parse(s: &str) -> Option<Role> {
        match s {
            "source" => Some(Role::Source),
            "human_translation" => Some(Role::HumanTranslation),
            "machine_translation" => Some(Role::MachineTranslation),
            _ => None,
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Identity of one book text within a manifest.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BookRef {
    pub id: String,
    pub title: String,
    pub role: Role,
    /// BCP-47-style language tag, e.g. `en` or `nl`.
    pub language: String,
    pub path: PathBuf,
}

/// Normalized token stream for one document.
///
/// `sentence_bounds` holds one half-open `(start, end)` token range per input
/// line; the ranges partition `0..tokens.len()` in order (empty lines yield
/// empty ranges).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TokenSeq {
    pub book: BookRef,
    pub tokens: Vec<String>,
    pub sentence_bounds: Vec<(usize, usize)>,
}

impl TokenSeq {
    /// Tokenize `text` (one sentence per line) under `book`'s identity.
    pub fn from_text(book: BookRef, text: &str) -> TokenSeq {
        let mut tokens = Vec::new();
        let mut sentence_bounds = Vec::new();
        for line in text.lines() {
            let start = tokens.len();
            tokens.extend(tokenize_for_metrics(line));
            sentence_bounds.push((start, tokens.len()));
        }
        TokenSeq {
            book,
            tokens,
            sentence_bounds,
        }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

fn is_apostrophe(c: char) -> bool {
    c == '\'' || c == '\u{2019}'
}

/// Normalize text into metric tokens.
///
/// Tokens are maximal runs of Unicode letters/digits, lowercased. An
/// apostrophe (`'` or `’`, normalized to `'`) is kept when it sits between two
/// alphanumeric characters, so "it's" is one token; every other character
/// splits and is discarded.
pub fn tokenize_for_metrics(text: &str) -> Vec<String> {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let mut current = String::new();
    for (i, &c) in chars.iter().enumerate() {
        if c.is_alphanumeric() {
            current.extend(c.to_lowercase());
        } else if is_apostrophe(c)
            && !current.is_empty()
            && chars.get(i + 1).is_some_and(|n| n.is_alphanumeric())
        {
            current.push('\'');
        } else if !current.is_empty() {
            tokens.push(std::mem::take(&mut current));
        }
    }
    if !current.is_empty() {
        tokens.push(current);
    }
    tokens
}

/// Read a file as strict UTF-8. Invalid bytes are a hard error, never
/// replaced: silent replacement would corrupt type counts.
pub fn read_text(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    String::from_utf8(bytes).map_err(|_| Error::InvalidUtf8 {
        path: path.to_path_buf(),
    })
}

/// Resolve a manifest-relative path: absolute paths pass through, relative
/// ones are joined onto `base` (the manifest's directory).
pub fn resolve_path(base: &Path, path: &Path) -> PathBuf {
    if path.is_absolute() {
        path.to_path_buf()
    } else {
        base.join(path)
    }
}

/// Load and tokenize the text of `book`, resolving its path against `base`.
pub fn load_book(book: &BookRef, base: &Path) -> Result<TokenSeq> {
    let text = read_text(&resolve_path(base, &book.path))?;
    Ok(TokenSeq::from_text(book.clone(), text.as_str()))
}

const MANIFEST_HEADER: [&str; 5] = ["id", "title", "role", "language", "path"];

/// Load a book manifest: TSV with header `id	title	role	language	path`.
pub fn load_manifest(path: &Path) -> Result<Vec<BookRef>> {
    let text = read_text(path)?;
    let parse_err = |line: usize, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };

    let mut books = Vec::new();
    let mut seen = BTreeSet::new();
    let mut lines = text.lines().enumerate();

    match lines.next() {
        None => return Ok(books),
        Some((_, header)) => {
            let cols: Vec<&str> = header.split('\t').collect();
            if cols != MANIFEST_HEADER {
                return Err(parse_err(
                    1,
                    format!("expected header `{}`", MANIFEST_HEADER.join("\\t")),
                ));
            }
        }
    }

    for (idx, line) in lines {
        if line.is_empty() {
            continue;
        }
        let lineno = idx + 1;
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 5 {
            return Err(parse_err(
                lineno,
                format!("expected 5 tab-separated columns, got {}", cols.len()),
            ));
        }
        let (id, title, role, language, book_path) = (cols[0], cols[1], cols[2], cols[3], cols[4]);
        if id.is_empty() {
            return Err(parse_err(lineno, "empty book id".to_string()));
        }
        let role = Role::parse(role).ok_or_else(|| {
            parse_err(
                lineno,
                format!("unknown role `{role}` (expected source, human_translation or machine_translation)"),
            )
        })?;
        if language.is_empty() {
            return Err(parse_err(lineno, format!("book `{id}`: empty language")));
        }
        if book_path.is_empty() {
            return Err(parse_err(lineno, format!("book `{id}`: empty path")));
        }
        if !seen.insert(id.to_string()) {
            return Err(Error::DuplicateBookId(id.to_string()));
        }
        books.push(BookRef {
            id: id.to_string(),
            title: title.to_string(),
            role,
            language: language.to_string(),
            path: PathBuf::from(book_path),
        });
    }
    Ok(books)
}

/// One translation hypothesis, optionally carrying a precomputed
/// original-text probability.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Candidate {
    pub text: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub p_original: Option<f64>,
}

/// One source sentence plus its n-best translation candidates, in decoder
/// rank order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CandidateSet {
    pub book_id: String,
    pub sent_id: u64,
    pub source_text: String,
    pub candidates: Vec<Candidate>,
}

/// Load candidate sets from a JSON-lines file, one set per line. Candidate
/// order is preserved as given (decoder rank order).
pub fn load_candidates(path: &Path) -> Result<Vec<CandidateSet>> {
    let text = read_text(path)?;
    let mut sets = Vec::new();
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
        let set: CandidateSet =
            serde_json::from_str(line).map_err(|e| parse_err(e.to_string()))?;
        if set.candidates.is_empty() {
            return Err(parse_err(format!(
                "book `{}` sentence {}: candidate list must be non-empty",
                set.book_id, set.sent_id
            )));
        }
        for (ci, cand) in set.candidates.iter().enumerate() {
            if let Some(p) = cand.p_original {
                if !(0.0..=1.0).contains(&p) || p.is_nan() {
                    return Err(parse_err(format!(
                        "candidate {ci}: p_original = {p} outside [0,1]"
                    )));
                }
            }
        }
        sets.push(set);
    }
    Ok(sets)
}

/// Write candidate sets as JSON-lines; inverse of [`load_candidates`].
pub fn write_candidates<W: Write>(sets: &[CandidateSet], mut w: W) -> Result<()> {
    for set in sets {
        let line = serde_json::to_string(set).expect("candidate sets serialize");
        writeln!(w, "{line}").map_err(|source| Error::Io {
            path: PathBuf::from("<writer>"),
            source,
        })?;
    }
    Ok(())
}

/// Part-of-speech classes distinguished by the lemma annotations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pos {
    Adj,
    Noun,
    Verb,
    Other,
}

impl Pos {
    pub fn as_str(self) -> &'static str {
        match self {
            Pos::Adj => "ADJ",
            Pos::Noun => "NOUN",
            Pos::Verb => "VERB",
            Pos::Other => "OTHER",
        }
    }

    pub fn parse(s: &str) -> Option<Pos> {
        match s {
            "ADJ" => Some(Pos::Adj),
            "NOUN" => Some(Pos::Noun),
            "VERB" => Some(Pos::Verb),
            "OTHER" => Some(Pos::Other),
            _ => None,
        }
    }
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Lemma and POS for one whitespace token of a source sentence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaEntry {
    pub surface: String,
    pub lemma: String,
    pub pos: Pos,
}

/// Externally produced lemma annotations for one source sentence. Entries are
/// aligned 1:1 with the sentence's whitespace tokens.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaAnnotation {
    pub book_id: String,
    pub sent_id: u64,
    pub entries: Vec<LemmaEntry>,
}

/// Load lemma annotations: TSV blocks per sentence, columns
/// `surface	lemma	pos`, each block preceded by a `# book_id sent_id`
/// comment line, blocks separated by blank lines.
pub fn load_lemmas(path: &Path) -> Result<Vec<LemmaAnnotation>> {
    let text = read_text(path)?;
    let parse_err = |line: usize, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };

    let mut annotations: Vec<LemmaAnnotation> = Vec::new();
    let mut current: Option<LemmaAnnotation> = None;
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        if line.trim().is_empty() {
            if let Some(ann) = current.take() {
                annotations.push(ann);
            }
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            if let Some(ann) = current.take() {
                annotations.push(ann);
            }
            let mut parts = rest.split_whitespace();
            let book_id = parts
                .next()
                .ok_or_else(|| parse_err(lineno, "expected `# book_id sent_id`".to_string()))?;
            let sent_id: u64 = parts
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| parse_err(lineno, "expected `# book_id sent_id`".to_string()))?;
            if parts.next().is_some() {
                return Err(parse_err(lineno, "expected `# book_id sent_id`".to_string()));
            }
            current = Some(LemmaAnnotation {
                book_id: book_id.to_string(),
                sent_id,
                entries: Vec::new(),
            });
            continue;
        }
        let ann = current
            .as_mut()
            .ok_or_else(|| parse_err(lineno, "entry before any `# book_id sent_id` line".to_string()))?;
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 3 {
            return Err(parse_err(
                lineno,
                format!("expected 3 tab-separated columns, got {}", cols.len()),
            ));
        }
        let pos = Pos::parse(cols[2])
            .ok_or_else(|| parse_err(lineno, format!("unknown POS `{}`", cols[2])))?;
        ann.entries.push(LemmaEntry {
            surface: cols[0].to_string(),
            lemma: cols[1].to_string(),
            pos,
        });
    }
    if let Some(ann) = current.take() {
        annotations.push(ann);
    }
    Ok(annotations)
}
