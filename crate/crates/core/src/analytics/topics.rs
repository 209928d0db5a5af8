//! Topic labeling: preset labels, an offline keyword table, or a remote classifier.

use std::sync::LazyLock;
use std::time::Duration;

use regex::Regex;

use crate::corpus::Article;

pub const BUNDLED_TOPIC_KEYWORDS: &str = include_str!("../../data/topic_keywords.tsv");

/// Environment variable holding the remote labeler's bearer token.
pub const LABELER_TOKEN_ENV: &str = "SOURCESCOPE_LABELER_TOKEN";

#[derive(Debug, thiserror::Error)]
pub enum LabelError {
    #[error("remote labeler failed after {attempts} attempt(s): {reason}")]
    Remote { attempts: u32, reason: String },
    #[error("keyword table line {line}: {reason}")]
    Table { line: usize, reason: String },
}

pub trait TopicLabeler: Sync {
    /// Labels an article that has no preset topic.
    fn label(&self, article: &Article) -> Result<Option<String>, LabelError>;
}

/// Returns the preset topic, or asks the labeler when there is none.
pub fn label_topic(article: &Article, labeler: &dyn TopicLabeler) -> Result<Option<String>, LabelError> {
    match &article.topic {
        Some(t) => Ok(Some(t.clone())),
        None => labeler.label(article),
    }
}

/// Leaves unlabeled articles unlabeled.
#[derive(Debug, Clone, Copy, Default)]
pub struct PresetOnly;

impl TopicLabeler for PresetOnly {
    fn label(&self, _article: &Article) -> Result<Option<String>, LabelError> {
        Ok(None)
    }
}

/// Picks the topic whose keywords occur most often in the body, counting
/// whole-word, case-insensitive occurrences. A topic needs at least
/// `min_hits` occurrences; ties go to the lexicographically first topic.
#[derive(Debug, Clone)]
pub struct KeywordLabeler {
    topics: Vec<(String, Regex)>,
    pub min_hits: usize,
}

pub const DEFAULT_MIN_KEYWORD_HITS: usize = 2;

static BUNDLED_KEYWORDS: LazyLock<KeywordLabeler> = LazyLock::new(|| {
    KeywordLabeler::parse(BUNDLED_TOPIC_KEYWORDS).expect("bundled topic keyword table is valid")
});

impl KeywordLabeler {
    pub fn bundled() -> KeywordLabeler {
        BUNDLED_KEYWORDS.clone()
    }

    /// Parses `topic<TAB>keyword` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<KeywordLabeler, LabelError> {
        let mut grouped: Vec<(String, Vec<String>)> = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            let Some((topic, keyword)) = line.split_once('\t') else {
                return Err(LabelError::Table {
                    line: i + 1,
                    reason: "expected topic<TAB>keyword".into(),
                });
            };
            let (topic, keyword) = (topic.trim(), keyword.trim().to_lowercase());
            if topic.is_empty() || keyword.is_empty() {
                return Err(LabelError::Table {
                    line: i + 1,
                    reason: "empty topic or keyword".into(),
                });
            }
            match grouped.iter_mut().find(|(t, _)| t == topic) {
                Some((_, kws)) => kws.push(keyword),
                None => grouped.push((topic.to_string(), vec![keyword])),
            }
        }
        grouped.sort_by(|a, b| a.0.cmp(&b.0));
        let topics = grouped
            .into_iter()
            .map(|(topic, mut kws)| {
                // longest first so "attorney general" wins over "attorney"
                kws.sort_by_key(|k| std::cmp::Reverse(k.len()));
                let alts: Vec<String> = kws
                    .iter()
                    .map(|k| regex::escape(k).replace(' ', r"\s+"))
                    .collect();
                let re = Regex::new(&format!(r"(?i)\b(?:{})\b", alts.join("|")))
                    .expect("escaped keywords form a valid regex");
                (topic, re)
            })
            .collect();
        Ok(KeywordLabeler {
            topics,
            min_hits: DEFAULT_MIN_KEYWORD_HITS,
        })
    }

    pub fn topics(&self) -> impl Iterator<Item = &str> {
        self.topics.iter().map(|(t, _)| t.as_str())
    }

    pub fn label_text(&self, text: &str) -> Option<String> {
        let mut best: Option<(&str, usize)> = None;
        for (topic, re) in &self.topics {
            let hits = re.find_iter(text).count();
            if hits >= self.min_hits && best.is_none_or(|(_, b)| hits > b) {
                best = Some((topic, hits));
            }
        }
        best.map(|(t, _)| t.to_string())
    }
}

impl TopicLabeler for KeywordLabeler {
    fn label(&self, article: &Article) -> Result<Option<String>, LabelError> {
        Ok(self.label_text(&article.body))
    }
}

/// Posts the article body as plain text and reads a single topic label back.
/// An empty response body means "no topic".
#[derive(Debug, Clone)]
pub struct RemoteLabeler {
    url: String,
    token: Option<String>,
    retries: u32,
    agent: ureq::Agent,
}

impl RemoteLabeler {
    pub fn new(url: impl Into<String>, token: Option<String>, retries: u32, timeout: Duration) -> Self {
        let agent = ureq::Agent::config_builder()
            .timeout_global(Some(timeout))
            .build()
            .new_agent();
        RemoteLabeler {
            url: url.into(),
            token,
            retries,
            agent,
        }
    }

    /// Reads the token from [`LABELER_TOKEN_ENV`].
    pub fn from_env(url: impl Into<String>) -> Self {
        let token = std::env::var(LABELER_TOKEN_ENV).ok().filter(|t| !t.is_empty());
        RemoteLabeler::new(url, token, 2, Duration::from_secs(30))
    }

    fn attempt(&self, text: &str) -> Result<String, ureq::Error> {
        let mut req = self.agent.post(&self.url).content_type("text/plain; charset=utf-8");
        if let Some(token) = &self.token {
            req = req.header("Authorization", format!("Bearer {token}"));
        }
        let mut resp = req.send(text)?;
        resp.body_mut().read_to_string()
    }
}

impl TopicLabeler for RemoteLabeler {
    fn label(&self, article: &Article) -> Result<Option<String>, LabelError> {
        let attempts = self.retries + 1;
        let mut last = String::new();
        for n in 1..=attempts {
            match self.attempt(&article.body) {
                Ok(body) => {
                    let label = body.trim();
                    return Ok((!label.is_empty()).then(|| label.to_string()));
                }
                Err(e) => {
                    log::warn!("labeler attempt {n}/{attempts} for {} failed: {e}", article.id);
                    last = e.to_string();
                }
            }
        }
        Err(LabelError::Remote {
            attempts,
            reason: last,
        })
    }
}
