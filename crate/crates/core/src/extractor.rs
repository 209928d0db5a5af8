//! Per-sentence source classification and corpus-level extraction.
//!
//! Each sentence runs through a fixed cascade: the embedding rules are
//! checked first and, when they fire, the sentence yields a Twitter
//! `Embedding` and no other Twitter classification. Any platform with at
//! least one citation-pattern hit then yields a `Quotation` if the sentence
//! carries quote signs, a `Paraphrase` otherwise. A sentence produces at most
//! one mention per platform.

use std::cmp::Reverse;
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{Article, Corpus};
use crate::patterns::{
    contains_quote_signs, extract_quote_spans_chars, find_embedding, match_chars, PatternSet,
    Platform,
};
use crate::segmenter::segment_chars;

/// Minimum length, in characters, of a quoted span counted as a direct quote.
pub const MIN_DIRECT_QUOTE_CHARS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SourceKind {
    Quotation,
    Paraphrase,
    Embedding,
}

impl SourceKind {
    pub const ALL: [SourceKind; 3] = [
        SourceKind::Quotation,
        SourceKind::Paraphrase,
        SourceKind::Embedding,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SourceKind::Quotation => "quotation",
            SourceKind::Paraphrase => "paraphrase",
            SourceKind::Embedding => "embedding",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            SourceKind::Quotation => "Quotation",
            SourceKind::Paraphrase => "Paraphrase",
            SourceKind::Embedding => "Embedding",
        }
    }

    pub(crate) fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for SourceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SourceKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "quotation" => Ok(SourceKind::Quotation),
            "paraphrase" => Ok(SourceKind::Paraphrase),
            "embedding" => Ok(SourceKind::Embedding),
            other => Err(format!("unknown source kind {other:?}")),
        }
    }
}

/// Outcome of classifying one sentence for one platform.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classification {
    pub platform: Platform,
    pub kind: SourceKind,
    pub pattern_id: Option<String>,
    /// Character range of the triggering evidence within the sentence.
    pub start: usize,
    pub end: usize,
}

/// One detected social-media source usage. Serialized as one mention-file record.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceMention {
    pub article_id: String,
    pub sentence_index: usize,
    pub platform: Platform,
    pub kind: SourceKind,
    pub pattern_id: Option<String>,
    pub span_start: usize,
    pub span_end: usize,
}

impl SourceMention {
    /// Checks the kind/platform/pattern consistency rules.
    pub fn validate(&self) -> Result<(), String> {
        match (self.kind, self.platform, &self.pattern_id) {
            (SourceKind::Embedding, Platform::Twitter, None) => Ok(()),
            (SourceKind::Embedding, Platform::Facebook, _) => {
                Err("embedding mentions must be twitter".into())
            }
            (SourceKind::Embedding, _, Some(_)) => Err("embedding mentions carry no pattern_id".into()),
            (_, _, None) => Err(format!("{} mention without pattern_id", self.kind)),
            _ if self.span_start > self.span_end => Err("span_start after span_end".into()),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtractionResult {
    pub article_id: String,
    pub mentions: Vec<SourceMention>,
    pub sentence_count: usize,
    pub direct_quote_count: usize,
}

/// Classifies one sentence.
pub fn classify_sentence(sentence: &str, set: &PatternSet) -> Vec<Classification> {
    let chars: Vec<char> = sentence.chars().collect();
    classify_chars(sentence, &chars, set)
}

fn classify_chars(sentence: &str, chars: &[char], set: &PatternSet) -> Vec<Classification> {
    let embedding = find_embedding(sentence);
    let hits = match_chars(chars, set);
    let mut quoted = None;
    let mut out = Vec::new();

    for platform in Platform::ALL {
        if platform == Platform::Twitter {
            if let Some(m) = embedding {
                out.push(Classification {
                    platform,
                    kind: SourceKind::Embedding,
                    pattern_id: None,
                    start: m.start,
                    end: m.end,
                });
                continue;
            }
        }
        let evidence = hits
            .iter()
            .filter(|h| h.platform == platform)
            .min_by_key(|h| (h.start, Reverse(h.end), &h.pattern_id));
        if let Some(hit) = evidence {
            let has_quotes = *quoted.get_or_insert_with(|| contains_quote_signs(sentence));
            out.push(Classification {
                platform,
                kind: if has_quotes {
                    SourceKind::Quotation
                } else {
                    SourceKind::Paraphrase
                },
                pattern_id: Some(hit.pattern_id.clone()),
                start: hit.start,
                end: hit.end,
            });
        }
    }
    out
}

/// Segments an article body and classifies every sentence.
pub fn extract_mentions(article: &Article, set: &PatternSet) -> ExtractionResult {
    let body = &article.body;
    let chars: Vec<char> = body.chars().collect();
    let byte_of: Vec<usize> = body
        .char_indices()
        .map(|(b, _)| b)
        .chain(std::iter::once(body.len()))
        .collect();

    let spans = segment_chars(&chars);
    let mut mentions = Vec::new();
    for span in &spans {
        let sentence = &body[byte_of[span.start]..byte_of[span.end]];
        for c in classify_chars(sentence, &chars[span.start..span.end], set) {
            mentions.push(SourceMention {
                article_id: article.id.clone(),
                sentence_index: span.index,
                platform: c.platform,
                kind: c.kind,
                pattern_id: c.pattern_id,
                span_start: c.start,
                span_end: c.end,
            });
        }
    }
    let direct_quote_count = extract_quote_spans_chars(&chars)
        .iter()
        .filter(|q| q.len() >= MIN_DIRECT_QUOTE_CHARS)
        .count();

    ExtractionResult {
        article_id: article.id.clone(),
        mentions,
        sentence_count: spans.len(),
        direct_quote_count,
    }
}

/// Runs extraction over a corpus on `workers` threads. Results keep corpus order.
pub fn extract_corpus(corpus: &Corpus, set: &PatternSet, workers: usize) -> Vec<ExtractionResult> {
    if workers <= 1 {
        return corpus.iter().map(|a| extract_mentions(a, set)).collect();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
        Ok(pool) => pool.install(|| {
            corpus
                .articles()
                .par_iter()
                .map(|a| extract_mentions(a, set))
                .collect()
        }),
        Err(e) => {
            log::warn!("could not start {workers} workers ({e}), extracting single-threaded");
            corpus.iter().map(|a| extract_mentions(a, set)).collect()
        }
    }
}

/// Writes every mention of every result, one record per line.
pub fn write_mentions<W: Write>(results: &[ExtractionResult], out: W) -> std::io::Result<()> {
    crate::jsonl::write_jsonl(results.iter().flat_map(|r| &r.mentions), out)
}

/// One row of the sentence dump handed to annotators.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SentenceRecord {
    pub article_id: String,
    pub sentence_index: usize,
    pub start: usize,
    pub end: usize,
    pub text: String,
}

pub fn write_sentence_dump<W: Write>(corpus: &Corpus, mut out: W) -> std::io::Result<()> {
    for article in corpus {
        for (span, text) in crate::segmenter::sentences(&article.body) {
            let record = SentenceRecord {
                article_id: article.id.clone(),
                sentence_index: span.index,
                start: span.start,
                end: span.end,
                text: text.to_string(),
            };
            serde_json::to_writer(&mut out, &record)?;
            out.write_all(b"\n")?;
        }
    }
    out.flush()
}
