use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;

use serde::Serialize;

use super::{pct, StatsAccumulator};
use crate::corpus::MediaType;
use crate::evaluator::round2;
use crate::extractor::SourceKind;
use crate::patterns::Platform;

fn fmt2(x: f64) -> String {
    format!("{:.2}", round2(x))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KindCell {
    pub kind: SourceKind,
    pub count: u64,
    pub pct: f64,
}

fn kind_cells(counts: [u64; 3]) -> Vec<KindCell> {
    let total: u64 = counts.iter().sum();
    SourceKind::ALL
        .iter()
        .map(|&kind| KindCell {
            kind,
            count: counts[kind.index()],
            pct: pct(counts[kind.index()], total),
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlatformCells {
    pub platform: Platform,
    /// Articles with at least one mention on this platform.
    pub articles: u64,
    /// Share of articles-with-source that cite this platform.
    pub articles_pct: f64,
    pub kinds: Vec<KindCell>,
    pub total: u64,
    /// Share of all sources in the row.
    pub share_pct: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MediaRow {
    /// `mainstream`, `unreliable` or `total`.
    pub scope: String,
    pub total_articles: u64,
    pub articles_with_source: u64,
    pub articles_with_source_pct: f64,
    pub platforms: Vec<PlatformCells>,
    pub total_sources: u64,
    pub sources_per_article: f64,
    pub articles_with_both: u64,
}

impl MediaRow {
    pub fn platform(&self, p: Platform) -> &PlatformCells {
        &self.platforms[p.index()]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MediaReport {
    pub rows: Vec<MediaRow>,
}

impl MediaReport {
    pub fn row(&self, scope: &str) -> Option<&MediaRow> {
        self.rows.iter().find(|r| r.scope == scope)
    }
}

fn media_row(acc: &StatsAccumulator, media: Option<MediaType>, scope: &str) -> MediaRow {
    let in_scope = |m: MediaType| media.is_none_or(|x| x == m);
    let a = acc.articles_where(|k| in_scope(k.0));
    let per_platform: Vec<(Platform, [u64; 3])> = Platform::ALL
        .iter()
        .map(|&p| {
            let counts = SourceKind::ALL.map(|kind| {
                acc.mentions_where(|k, pp, kk| in_scope(k.0) && pp == p && kk == kind)
            });
            (p, counts)
        })
        .collect();
    let total_sources: u64 = per_platform.iter().flat_map(|(_, c)| c.iter()).sum();
    let platforms = per_platform
        .into_iter()
        .map(|(p, counts)| {
            let total = counts.iter().sum();
            let articles = a.articles_with_platform[p.index()];
            PlatformCells {
                platform: p,
                articles,
                articles_pct: pct(articles, a.articles_with_mention),
                kinds: kind_cells(counts),
                total,
                share_pct: pct(total, total_sources),
            }
        })
        .collect();
    let [fb, tw] = a.articles_with_platform;
    MediaRow {
        scope: scope.to_string(),
        total_articles: a.article_count,
        articles_with_source: a.articles_with_mention,
        articles_with_source_pct: pct(a.articles_with_mention, a.article_count),
        platforms,
        total_sources,
        sources_per_article: if a.articles_with_mention == 0 {
            0.0
        } else {
            total_sources as f64 / a.articles_with_mention as f64
        },
        articles_with_both: (fb + tw).saturating_sub(a.articles_with_mention),
    }
}

/// Per media type and overall: platform and kind breakdown of sources.
pub fn media_report(acc: &StatsAccumulator) -> MediaReport {
    let mut rows: Vec<MediaRow> = MediaType::ALL
        .iter()
        .map(|&m| media_row(acc, Some(m), m.as_str()))
        .collect();
    rows.push(media_row(acc, None, "total"));
    MediaReport { rows }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrendRow {
    pub year: i32,
    /// `all`, `mainstream` or `unreliable`.
    pub scope: String,
    pub article_count: u64,
    pub articles_with_mention: u64,
    pub percentage: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrendReport {
    pub rows: Vec<TrendRow>,
}

impl TrendReport {
    pub fn scope<'a>(&'a self, scope: &'a str) -> impl Iterator<Item = &'a TrendRow> + 'a {
        self.rows.iter().filter(move |r| r.scope == scope)
    }
}

/// Yearly share of articles with a source, overall and per media type.
/// Years without articles are omitted.
pub fn trend_report(acc: &StatsAccumulator) -> TrendReport {
    let mut rows = Vec::new();
    let scopes = [None, Some(MediaType::Mainstream), Some(MediaType::Unreliable)];
    for media in scopes {
        let mut by_year: BTreeMap<i32, (u64, u64)> = BTreeMap::new();
        for ((m, year, _), c) in acc.article_groups() {
            if media.is_none_or(|x| x == *m) {
                let e = by_year.entry(*year).or_default();
                e.0 += c.article_count;
                e.1 += c.articles_with_mention;
            }
        }
        let scope = media.map_or("all", MediaType::as_str);
        for (year, (n, with)) in by_year {
            if n == 0 {
                continue;
            }
            rows.push(TrendRow {
                year,
                scope: scope.to_string(),
                article_count: n,
                articles_with_mention: with,
                percentage: pct(with, n),
            });
        }
    }
    TrendReport { rows }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioRow {
    pub media_type: MediaType,
    pub article_count: u64,
    pub direct_quote_total: u64,
    pub avg_quotes_per_article: f64,
    pub sm_source_total: u64,
    /// Direct quotes per social-media source; `None` without sources.
    pub ratio: Option<f64>,
    pub ratio_label: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioReport {
    pub rows: Vec<RatioRow>,
}

pub const UNDEFINED_RATIO: &str = "undefined";

impl RatioRow {
    pub fn new(media_type: MediaType, article_count: u64, direct_quote_total: u64, sm_source_total: u64) -> RatioRow {
        let ratio = (sm_source_total > 0).then(|| direct_quote_total as f64 / sm_source_total as f64);
        RatioRow {
            media_type,
            article_count,
            direct_quote_total,
            avg_quotes_per_article: if article_count == 0 {
                0.0
            } else {
                direct_quote_total as f64 / article_count as f64
            },
            sm_source_total,
            ratio,
            ratio_label: ratio.map_or_else(|| UNDEFINED_RATIO.to_string(), |r| format!("1:{}", fmt2(r))),
        }
    }
}

/// Direct quotes versus social-media sources per media type.
pub fn ratio_report(acc: &StatsAccumulator) -> RatioReport {
    let rows = MediaType::ALL
        .iter()
        .map(|&m| {
            let a = acc.articles_where(|k| k.0 == m);
            let sources = acc.mentions_where(|k, _, _| k.0 == m);
            RatioRow::new(m, a.article_count, a.direct_quote_count, sources)
        })
        .collect();
    RatioReport { rows }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TopicRow {
    pub media_type: MediaType,
    pub rank: usize,
    pub topic: String,
    pub article_count: u64,
    pub articles_with_mention: u64,
    pub percentage: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TopicMediaKinds {
    pub media_type: MediaType,
    pub articles_with_mention: u64,
    pub kinds: Vec<KindCell>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TopicKindRow {
    pub topic: String,
    pub articles_with_mention_total: u64,
    pub per_media: Vec<TopicMediaKinds>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TopicReport {
    pub top: Vec<TopicRow>,
    pub kinds: Vec<TopicKindRow>,
}

/// Top-`k` labeled topics per media type by article count (ties broken by
/// name), plus the kind distribution over the union of those topics, ordered
/// by total articles with a source. Unlabeled articles are left out.
pub fn topic_report(acc: &StatsAccumulator, k: usize) -> TopicReport {
    let mut top = Vec::new();
    let mut union = BTreeSet::new();
    for m in MediaType::ALL {
        let mut per_topic: BTreeMap<&str, (u64, u64)> = BTreeMap::new();
        for ((media, _, topic), c) in acc.article_groups() {
            if let (true, Some(t)) = (*media == m, topic) {
                let e = per_topic.entry(t.as_str()).or_default();
                e.0 += c.article_count;
                e.1 += c.articles_with_mention;
            }
        }
        let mut ranked: Vec<_> = per_topic.into_iter().filter(|(_, (n, _))| *n > 0).collect();
        ranked.sort_by(|a, b| b.1 .0.cmp(&a.1 .0).then(a.0.cmp(b.0)));
        for (i, (topic, (n, with))) in ranked.into_iter().take(k).enumerate() {
            union.insert(topic.to_string());
            top.push(TopicRow {
                media_type: m,
                rank: i + 1,
                topic: topic.to_string(),
                article_count: n,
                articles_with_mention: with,
                percentage: pct(with, n),
            });
        }
    }

    let mut kinds: Vec<TopicKindRow> = union
        .into_iter()
        .map(|topic| {
            let per_media: Vec<TopicMediaKinds> = MediaType::ALL
                .iter()
                .map(|&m| {
                    let on_topic = |key: &super::GroupKey| key.0 == m && key.2.as_deref() == Some(topic.as_str());
                    let counts = SourceKind::ALL
                        .map(|kind| acc.mentions_where(|key, _, kk| kk == kind && on_topic(key)));
                    TopicMediaKinds {
                        media_type: m,
                        articles_with_mention: acc.articles_where(on_topic).articles_with_mention,
                        kinds: kind_cells(counts),
                    }
                })
                .collect();
            TopicKindRow {
                articles_with_mention_total: per_media.iter().map(|p| p.articles_with_mention).sum(),
                topic,
                per_media,
            }
        })
        .collect();
    kinds.sort_by(|a, b| {
        b.articles_with_mention_total
            .cmp(&a.articles_with_mention_total)
            .then_with(|| a.topic.cmp(&b.topic))
    });
    TopicReport { top, kinds }
}

/// Everything the analyze command reports, as one serializable object.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub pattern_version: String,
    pub media: MediaReport,
    pub ratio: RatioReport,
    pub trend: TrendReport,
    pub topics: TopicReport,
}

pub fn write_media_csv<W: Write>(report: &MediaReport, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec![
        "media_type".to_string(),
        "total_articles".into(),
        "articles_with_source".into(),
        "articles_with_source_pct".into(),
    ];
    for p in Platform::ALL.iter().rev() {
        let p = p.as_str();
        header.push(format!("{p}_articles"));
        header.push(format!("{p}_articles_pct"));
        for kind in SourceKind::ALL {
            header.push(format!("{p}_{kind}"));
            header.push(format!("{p}_{kind}_pct"));
        }
        header.push(format!("{p}_total"));
        header.push(format!("{p}_share_pct"));
    }
    header.extend(["total_sources".into(), "sources_per_article".into(), "articles_with_both".into()]);
    w.write_record(&header)?;
    for row in &report.rows {
        let mut rec = vec![
            row.scope.clone(),
            row.total_articles.to_string(),
            row.articles_with_source.to_string(),
            fmt2(row.articles_with_source_pct),
        ];
        for p in Platform::ALL.iter().rev() {
            let c = row.platform(*p);
            rec.push(c.articles.to_string());
            rec.push(fmt2(c.articles_pct));
            for k in &c.kinds {
                rec.push(k.count.to_string());
                rec.push(fmt2(k.pct));
            }
            rec.push(c.total.to_string());
            rec.push(fmt2(c.share_pct));
        }
        rec.push(row.total_sources.to_string());
        rec.push(fmt2(row.sources_per_article));
        rec.push(row.articles_with_both.to_string());
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_ratio_csv<W: Write>(report: &RatioReport, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "media_type",
        "articles",
        "direct_quotes",
        "avg_quotes_per_article",
        "sm_sources",
        "ratio",
    ])?;
    for r in &report.rows {
        w.write_record([
            r.media_type.as_str().to_string(),
            r.article_count.to_string(),
            r.direct_quote_total.to_string(),
            fmt2(r.avg_quotes_per_article),
            r.sm_source_total.to_string(),
            r.ratio_label.clone(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_topics_csv<W: Write>(report: &TopicReport, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["media_type", "rank", "topic", "articles", "articles_with_source", "pct"])?;
    for r in &report.top {
        w.write_record([
            r.media_type.as_str().to_string(),
            r.rank.to_string(),
            r.topic.clone(),
            r.article_count.to_string(),
            r.articles_with_mention.to_string(),
            fmt2(r.percentage),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_topic_kinds_csv<W: Write>(report: &TopicReport, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["topic".to_string(), "articles_with_source".into()];
    for m in MediaType::ALL {
        header.push(format!("{m}_articles_with_source"));
        for kind in SourceKind::ALL {
            header.push(format!("{m}_{kind}"));
            header.push(format!("{m}_{kind}_pct"));
        }
    }
    w.write_record(&header)?;
    for r in &report.kinds {
        let mut rec = vec![r.topic.clone(), r.articles_with_mention_total.to_string()];
        for pm in &r.per_media {
            rec.push(pm.articles_with_mention.to_string());
            for k in &pm.kinds {
                rec.push(k.count.to_string());
                rec.push(fmt2(k.pct));
            }
        }
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// `year<TAB>media_type<TAB>pct`, for plotting.
pub fn write_trend_tsv<W: Write>(report: &TrendReport, mut out: W) -> std::io::Result<()> {
    writeln!(out, "year\tmedia_type\tpct")?;
    for r in &report.rows {
        writeln!(out, "{}\t{}\t{}", r.year, r.scope, fmt2(r.percentage))?;
    }
    out.flush()
}

pub fn write_trend_csv<W: Write>(report: &TrendReport, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["year", "media_type", "articles", "articles_with_source", "pct"])?;
    for r in &report.rows {
        w.write_record([
            r.year.to_string(),
            r.scope.clone(),
            r.article_count.to_string(),
            r.articles_with_mention.to_string(),
            fmt2(r.percentage),
        ])?;
    }
    w.flush()?;
    Ok(())
}
