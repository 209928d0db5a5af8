//! Detection and classification of Facebook and Twitter source citations in
//! news text, with evaluation against gold annotations and corpus analytics.

pub mod analytics;
pub mod corpus;
pub mod evaluator;
pub mod extractor;
pub mod jsonl;
pub mod patterns;
pub mod segmenter;

pub use corpus::{Article, Corpus, MediaType};
pub use extractor::{extract_corpus, extract_mentions, ExtractionResult, SourceKind, SourceMention};
pub use patterns::{PatternSet, Platform};
