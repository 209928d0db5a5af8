//! Citation patterns, embedded-tweet rules and quotation-mark analysis.
//!
//! A [`PatternSet`] is loaded from a small TSV file:
//!
//! ```text
//! # version: my-patterns-1
//! platform	phrase	anchored
//! twitter	took to twitter
//! twitter	retweet	left
//! facebook	posted on facebook
//! ```
//!
//! `anchored` is `both` (default: word boundaries on both ends) or `left`
//! (boundary at the start only, so inflected forms like "retweets" match).

#![allow(clippy::tabs_in_doc_comments)]

mod embedding;
mod matcher;
mod quotes;

use std::collections::HashSet;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use aho_corasick::AhoCorasick;
use serde::{Deserialize, Serialize};

pub use embedding::{detect_embedding, find_embedding, EmbeddingMatch};
pub use matcher::{match_patterns, PatternHit};
pub use quotes::{contains_quote_signs, extract_quote_spans, QuoteSpan, QUOTE_PAIRS};
pub(crate) use matcher::match_chars;
pub(crate) use quotes::{extract_from_chars as extract_quote_spans_chars, paragraph_break_len};

const BUNDLED_PATTERNS: &str = include_str!("../../data/patterns.tsv");

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Platform {
    Facebook,
    Twitter,
}

impl Platform {
    pub const ALL: [Platform; 2] = [Platform::Facebook, Platform::Twitter];

    pub fn as_str(self) -> &'static str {
        match self {
            Platform::Facebook => "facebook",
            Platform::Twitter => "twitter",
        }
    }

    pub(crate) fn index(self) -> usize {
        self as usize
    }

    fn id_prefix(self) -> &'static str {
        match self {
            Platform::Facebook => "fb",
            Platform::Twitter => "tw",
        }
    }
}

impl fmt::Display for Platform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Platform {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "facebook" => Ok(Platform::Facebook),
            "twitter" => Ok(Platform::Twitter),
            other => Err(format!("unknown platform {other:?}")),
        }
    }
}

/// Which ends of a phrase must sit on a word boundary.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Anchor {
    #[default]
    Both,
    Left,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CitationPattern {
    pub id: String,
    pub platform: Platform,
    pub phrase: String,
    pub anchor: Anchor,
}

#[derive(Debug, thiserror::Error)]
pub enum PatternError {
    #[error("failed to read pattern file: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {reason}")]
    Invalid { line: usize, reason: String },
    #[error("line {line}: duplicate {platform} pattern {phrase:?}")]
    Duplicate {
        line: usize,
        platform: Platform,
        phrase: String,
    },
    #[error("pattern file contains no patterns")]
    Empty,
    #[error("pattern set has no {0} patterns")]
    MissingPlatform(Platform),
    #[error("failed to build matcher: {0}")]
    Build(#[from] aho_corasick::BuildError),
}

/// Immutable, versioned collection of citation patterns with a compiled matcher.
#[derive(Debug, Clone)]
pub struct PatternSet {
    patterns: Vec<CitationPattern>,
    version: String,
    automaton: AhoCorasick,
    // automaton pattern index -> indices into `patterns` sharing that phrase
    owners: Vec<Vec<usize>>,
}

impl PatternSet {
    /// The pattern file shipped with the crate.
    pub fn bundled() -> PatternSet {
        Self::parse(BUNDLED_PATTERNS, "bundled").expect("bundled pattern file is valid")
    }

    /// Loads and validates a pattern TSV file.
    pub fn load(path: impl AsRef<Path>) -> Result<PatternSet, PatternError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn parse(text: &str, source: &str) -> Result<PatternSet, PatternError> {
        let mut version = None;
        let mut patterns: Vec<CitationPattern> = Vec::new();
        let mut seen = HashSet::new();
        let mut per_platform = [0usize; 2];

        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.trim_end_matches('\r');
            if line.trim().is_empty() {
                continue;
            }
            if let Some(comment) = line.trim_start().strip_prefix('#') {
                if let Some(v) = comment.trim().strip_prefix("version:") {
                    version = Some(v.trim().to_string());
                }
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            if patterns.is_empty() && fields[0].trim() == "platform" {
                continue;
            }
            if fields.len() < 2 || fields.len() > 3 {
                return Err(PatternError::Invalid {
                    line: line_no,
                    reason: format!("expected 2 or 3 tab-separated columns, found {}", fields.len()),
                });
            }
            let platform: Platform = fields[0]
                .trim()
                .to_lowercase()
                .parse()
                .map_err(|reason| PatternError::Invalid {
                    line: line_no,
                    reason,
                })?;
            let phrase = normalize_phrase(fields[1]);
            if phrase.is_empty() {
                return Err(PatternError::Invalid {
                    line: line_no,
                    reason: "empty phrase".to_string(),
                });
            }
            let anchor = match fields.get(2).map(|s| s.trim()) {
                None | Some("") | Some("both") => Anchor::Both,
                Some("left") => Anchor::Left,
                Some(other) => {
                    return Err(PatternError::Invalid {
                        line: line_no,
                        reason: format!("unknown anchored value {other:?}"),
                    })
                }
            };
            if !seen.insert((platform, phrase.clone())) {
                return Err(PatternError::Duplicate {
                    line: line_no,
                    platform,
                    phrase,
                });
            }
            per_platform[platform.index()] += 1;
            patterns.push(CitationPattern {
                id: format!("{}-{:03}", platform.id_prefix(), per_platform[platform.index()]),
                platform,
                phrase,
                anchor,
            });
        }

        if patterns.is_empty() {
            return Err(PatternError::Empty);
        }
        for platform in Platform::ALL {
            if per_platform[platform.index()] == 0 {
                return Err(PatternError::MissingPlatform(platform));
            }
        }
        let version = version.unwrap_or_else(|| {
            format!(
                "{source} ({} facebook, {} twitter)",
                per_platform[Platform::Facebook.index()],
                per_platform[Platform::Twitter.index()]
            )
        });
        Self::build(patterns, version)
    }

    fn build(patterns: Vec<CitationPattern>, version: String) -> Result<PatternSet, PatternError> {
        let mut phrases: Vec<&str> = Vec::new();
        let mut owners: Vec<Vec<usize>> = Vec::new();
        for (i, p) in patterns.iter().enumerate() {
            match phrases.iter().position(|&q| q == p.phrase) {
                Some(k) => owners[k].push(i),
                None => {
                    phrases.push(&p.phrase);
                    owners.push(vec![i]);
                }
            }
        }
        let automaton = AhoCorasick::new(&phrases)?;
        Ok(PatternSet {
            patterns,
            version,
            automaton,
            owners,
        })
    }

    pub fn patterns(&self) -> &[CitationPattern] {
        &self.patterns
    }

    pub fn version(&self) -> &str {
        &self.version
    }

    pub fn len(&self) -> usize {
        self.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }

    pub fn count(&self, platform: Platform) -> usize {
        self.patterns.iter().filter(|p| p.platform == platform).count()
    }

    pub fn get(&self, id: &str) -> Option<&CitationPattern> {
        self.patterns.iter().find(|p| p.id == id)
    }
}

/// Lowercases and collapses internal whitespace to single spaces.
pub(crate) fn normalize_phrase(s: &str) -> String {
    s.split_whitespace()
        .map(str::to_lowercase)
        .collect::<Vec<_>>()
        .join(" ")
}
