//! Corpus-level usage statistics built from extraction results.
//!
//! A [`StatsAccumulator`] holds raw integer counters keyed by media type,
//! year and topic; every report is a pure function of a finished
//! accumulator, and accumulators built over disjoint slices of a corpus can
//! be merged in any order.

mod reports;
mod topics;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::corpus::{year_of, Article, Corpus, MediaType};
use crate::extractor::{ExtractionResult, SourceKind};
use crate::patterns::Platform;

pub use reports::{
    media_report, ratio_report, topic_report, trend_report, write_media_csv, write_ratio_csv,
    write_topic_kinds_csv, write_topics_csv, write_trend_csv, write_trend_tsv, KindCell,
    MediaReport, MediaRow, PlatformCells, RatioReport, RatioRow, Summary, TopicKindRow,
    TopicMediaKinds, TopicReport, TopicRow, TrendReport, TrendRow,
};
pub use topics::{
    label_topic, KeywordLabeler, LabelError, PresetOnly, RemoteLabeler, TopicLabeler,
    BUNDLED_TOPIC_KEYWORDS, DEFAULT_MIN_KEYWORD_HITS, LABELER_TOKEN_ENV,
};

/// (media type, year, topic); `None` topic means unlabeled.
pub type GroupKey = (MediaType, i32, Option<String>);

/// Article-level counters for one group.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArticleCounters {
    pub article_count: u64,
    pub articles_with_mention: u64,
    pub direct_quote_count: u64,
    /// Articles with at least one mention on each platform, by [`Platform`] order.
    pub articles_with_platform: [u64; 2],
}

impl ArticleCounters {
    fn add(&mut self, o: &ArticleCounters) {
        self.article_count += o.article_count;
        self.articles_with_mention += o.articles_with_mention;
        self.direct_quote_count += o.direct_quote_count;
        for (a, b) in self.articles_with_platform.iter_mut().zip(o.articles_with_platform) {
            *a += b;
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StatsAccumulator {
    articles: BTreeMap<GroupKey, ArticleCounters>,
    mentions: BTreeMap<(GroupKey, Platform, SourceKind), u64>,
}

#[derive(Debug, thiserror::Error)]
pub enum AnalyticsError {
    #[error("extraction result refers to unknown article {0:?}")]
    UnknownArticle(String),
    #[error(transparent)]
    Labeler(#[from] LabelError),
}

impl StatsAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds one article and its extraction result.
    pub fn add_result(&mut self, article: &Article, topic: Option<String>, result: &ExtractionResult) {
        let key: GroupKey = (article.media_type, year_of(article), topic);
        let mut counters = ArticleCounters {
            article_count: 1,
            articles_with_mention: u64::from(!result.mentions.is_empty()),
            direct_quote_count: result.direct_quote_count as u64,
            articles_with_platform: [0; 2],
        };
        for p in Platform::ALL {
            if result.mentions.iter().any(|m| m.platform == p) {
                counters.articles_with_platform[p.index()] = 1;
            }
        }
        for m in &result.mentions {
            *self.mentions.entry((key.clone(), m.platform, m.kind)).or_default() += 1;
        }
        self.articles.entry(key).or_default().add(&counters);
    }

    /// Adds raw article counters to a group.
    pub fn record_articles(&mut self, key: GroupKey, counters: ArticleCounters) {
        self.articles.entry(key).or_default().add(&counters);
    }

    /// Adds `n` mentions to a group.
    pub fn record_mentions(&mut self, key: GroupKey, platform: Platform, kind: SourceKind, n: u64) {
        *self.mentions.entry((key, platform, kind)).or_default() += n;
    }

    pub fn merge(&mut self, other: &StatsAccumulator) {
        for (k, v) in &other.articles {
            self.articles.entry(k.clone()).or_default().add(v);
        }
        for (k, v) in &other.mentions {
            *self.mentions.entry(k.clone()).or_default() += v;
        }
    }

    pub fn merged(mut self, other: &StatsAccumulator) -> StatsAccumulator {
        self.merge(other);
        self
    }

    pub fn is_empty(&self) -> bool {
        self.articles.is_empty() && self.mentions.is_empty()
    }

    pub fn article_groups(&self) -> impl Iterator<Item = (&GroupKey, &ArticleCounters)> {
        self.articles.iter()
    }

    pub fn mention_groups(&self) -> impl Iterator<Item = (&(GroupKey, Platform, SourceKind), &u64)> {
        self.mentions.iter()
    }

    /// Sum of article counters over groups matching `filter`.
    pub fn articles_where(&self, filter: impl Fn(&GroupKey) -> bool) -> ArticleCounters {
        let mut total = ArticleCounters::default();
        for (k, v) in &self.articles {
            if filter(k) {
                total.add(v);
            }
        }
        total
    }

    /// Sum of mention counts over groups matching `filter`.
    pub fn mentions_where(&self, filter: impl Fn(&GroupKey, Platform, SourceKind) -> bool) -> u64 {
        self.mentions
            .iter()
            .filter(|((k, p, s), _)| filter(k, *p, *s))
            .map(|(_, n)| n)
            .sum()
    }
}

/// Accumulates results using each article's preset topic.
pub fn accumulate<'a, I>(results: I, corpus: &Corpus) -> Result<StatsAccumulator, AnalyticsError>
where
    I: IntoIterator<Item = &'a ExtractionResult>,
{
    accumulate_with(results, corpus, &PresetOnly)
}

/// Accumulates results, labeling articles that have no preset topic.
pub fn accumulate_with<'a, I>(
    results: I,
    corpus: &Corpus,
    labeler: &dyn TopicLabeler,
) -> Result<StatsAccumulator, AnalyticsError>
where
    I: IntoIterator<Item = &'a ExtractionResult>,
{
    let mut acc = StatsAccumulator::new();
    for result in results {
        let article = corpus
            .get(&result.article_id)
            .ok_or_else(|| AnalyticsError::UnknownArticle(result.article_id.clone()))?;
        let topic = label_topic(article, labeler)?;
        acc.add_result(article, topic, result);
    }
    Ok(acc)
}

pub(crate) fn pct(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        100.0 * num as f64 / den as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::test_article;
    use crate::extractor::SourceMention;

    fn embed(article: &str, sentence: usize) -> SourceMention {
        SourceMention {
            article_id: article.into(),
            sentence_index: sentence,
            platform: Platform::Twitter,
            kind: SourceKind::Embedding,
            pattern_id: None,
            span_start: 0,
            span_end: 5,
        }
    }

    fn corpus() -> Corpus {
        Corpus::from_articles(
            vec![
                test_article("a", MediaType::Mainstream, "2016-03-01", "x"),
                test_article("b", MediaType::Unreliable, "2017-03-01", "y"),
            ],
            "mem",
        )
        .unwrap()
    }

    #[test]
    fn empty_stream() {
        let acc = accumulate(std::iter::empty(), &corpus()).unwrap();
        assert!(acc.is_empty());
        assert_eq!(acc.articles_where(|_| true), ArticleCounters::default());
    }

    #[test]
    fn three_embeddings_one_article() {
        let r = ExtractionResult {
            article_id: "a".into(),
            mentions: vec![embed("a", 0), embed("a", 1), embed("a", 2)],
            sentence_count: 3,
            direct_quote_count: 0,
        };
        let acc = accumulate([&r], &corpus()).unwrap();
        assert_eq!(acc.mentions_where(|_, _, _| true), 3);
        let c = acc.articles_where(|_| true);
        assert_eq!((c.article_count, c.articles_with_mention), (1, 1));
        assert_eq!(c.articles_with_platform, [0, 1]);
    }

    #[test]
    fn unknown_article_is_error() {
        let r = ExtractionResult {
            article_id: "zzz".into(),
            mentions: vec![],
            sentence_count: 0,
            direct_quote_count: 0,
        };
        assert!(matches!(accumulate([&r], &corpus()), Err(AnalyticsError::UnknownArticle(_))));
    }

    #[test]
    fn split_then_merge_equals_single_pass() {
        let c = corpus();
        let ra = ExtractionResult {
            article_id: "a".into(),
            mentions: vec![embed("a", 0)],
            sentence_count: 1,
            direct_quote_count: 4,
        };
        let rb = ExtractionResult {
            article_id: "b".into(),
            mentions: vec![],
            sentence_count: 1,
            direct_quote_count: 2,
        };
        let whole = accumulate([&ra, &rb], &c).unwrap();
        let parts = accumulate([&rb], &c).unwrap().merged(&accumulate([&ra], &c).unwrap());
        assert_eq!(whole, parts);
    }
}
