//! Article data model, line-delimited corpus ingestion and sampling.

mod ingest;
mod sample;

use std::collections::HashMap;
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use chrono::{Datelike, NaiveDate};
use serde::{Deserialize, Serialize};

pub use ingest::{ingest, ingest_reader, IngestOptions, IngestReport, Rejection};
pub use sample::{stratified_sample, SampleError, DEFAULT_SAMPLE_KEYWORDS};

/// Outlet class of the publishing site.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MediaType {
    Mainstream,
    Unreliable,
}

impl MediaType {
    pub const ALL: [MediaType; 2] = [MediaType::Mainstream, MediaType::Unreliable];

    pub fn as_str(self) -> &'static str {
        match self {
            MediaType::Mainstream => "mainstream",
            MediaType::Unreliable => "unreliable",
        }
    }
}

impl fmt::Display for MediaType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MediaType {
    type Err = CorpusError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "mainstream" => Ok(MediaType::Mainstream),
            "unreliable" => Ok(MediaType::Unreliable),
            other => Err(CorpusError::UnknownMediaType(other.to_string())),
        }
    }
}

/// One news document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Article {
    pub id: String,
    pub outlet: String,
    pub media_type: MediaType,
    pub published_at: NaiveDate,
    pub headline: String,
    pub body: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub topic: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub url: Option<String>,
}

/// Calendar year an article was published in.
pub fn year_of(article: &Article) -> i32 {
    article.published_at.year()
}

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("failed to read corpus: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("duplicate article id {id:?} (line {line})")]
    DuplicateId { id: String, line: usize },
    #[error("unknown media_type {0:?}, expected \"mainstream\" or \"unreliable\"")]
    UnknownMediaType(String),
}

/// Ordered, id-unique collection of articles.
#[derive(Debug, Clone, Default)]
pub struct Corpus {
    articles: Vec<Article>,
    source_path: String,
    index: HashMap<String, usize>,
}

impl Corpus {
    /// Builds a corpus from in-memory articles, rejecting duplicate ids.
    pub fn from_articles(
        articles: Vec<Article>,
        source_path: impl Into<String>,
    ) -> Result<Self, CorpusError> {
        let mut corpus = Corpus {
            articles: Vec::with_capacity(articles.len()),
            source_path: source_path.into(),
            index: HashMap::with_capacity(articles.len()),
        };
        for (i, article) in articles.into_iter().enumerate() {
            corpus.push(article, i + 1)?;
        }
        Ok(corpus)
    }

    pub(crate) fn push(&mut self, article: Article, line: usize) -> Result<(), CorpusError> {
        if self.index.contains_key(&article.id) {
            return Err(CorpusError::DuplicateId {
                id: article.id,
                line,
            });
        }
        self.index.insert(article.id.clone(), self.articles.len());
        self.articles.push(article);
        Ok(())
    }

    pub fn articles(&self) -> &[Article] {
        &self.articles
    }

    pub fn source_path(&self) -> &str {
        &self.source_path
    }

    pub fn len(&self) -> usize {
        self.articles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.articles.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&Article> {
        self.index.get(id).map(|&i| &self.articles[i])
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Article> {
        self.articles.iter()
    }

    /// Writes the corpus in the same line-delimited format `ingest` reads.
    pub fn write_jsonl<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for article in &self.articles {
            serde_json::to_writer(&mut out, article)?;
            out.write_all(b"\n")?;
        }
        out.flush()
    }
}

impl<'a> IntoIterator for &'a Corpus {
    type Item = &'a Article;
    type IntoIter = std::slice::Iter<'a, Article>;

    fn into_iter(self) -> Self::IntoIter {
        self.articles.iter()
    }
}

#[cfg(test)]
pub(crate) fn test_article(id: &str, media_type: MediaType, date: &str, body: &str) -> Article {
    Article {
        id: id.to_string(),
        outlet: "Test Outlet".to_string(),
        media_type,
        published_at: date.parse().unwrap(),
        headline: format!("Headline {id}"),
        body: body.to_string(),
        topic: None,
        url: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn year_of_window_boundaries() {
        let a = test_article("a", MediaType::Mainstream, "2013-01-01", "");
        let b = test_article("b", MediaType::Mainstream, "2017-12-31", "");
        let c = test_article("c", MediaType::Unreliable, "2015-06-15", "");
        assert_eq!(year_of(&a), 2013);
        assert_eq!(year_of(&b), 2017);
        assert_eq!(year_of(&c), 2015);
    }

    #[test]
    fn media_type_parse_names_bad_value() {
        assert_eq!("mainstream".parse::<MediaType>().unwrap(), MediaType::Mainstream);
        let err = "satire".parse::<MediaType>().unwrap_err();
        assert!(err.to_string().contains("satire"));
    }

    #[test]
    fn from_articles_rejects_duplicates() {
        let a = test_article("x", MediaType::Mainstream, "2014-02-02", "one");
        let b = test_article("x", MediaType::Unreliable, "2014-02-03", "two");
        let err = Corpus::from_articles(vec![a, b], "mem").unwrap_err();
        assert!(matches!(err, CorpusError::DuplicateId { ref id, line: 2 } if id == "x"));
    }

    #[test]
    fn lookup_by_id() {
        let corpus = Corpus::from_articles(
            vec![
                test_article("a", MediaType::Mainstream, "2014-02-02", "one"),
                test_article("b", MediaType::Mainstream, "2014-02-02", "two"),
            ],
            "mem",
        )
        .unwrap();
        assert_eq!(corpus.get("b").unwrap().body, "two");
        assert!(corpus.get("c").is_none());
    }
}
