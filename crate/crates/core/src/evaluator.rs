//! Scores predicted mentions against gold annotations.
//!
//! A prediction counts as a true positive when a gold annotation shares its
//! article, sentence, platform and kind. Per-kind precision, recall and F1
//! are reported as percentages, alongside a macro average (unweighted mean of
//! the per-kind rows, F1 included) and a micro average over pooled counts.
//! Ratios with a zero denominator are 0.

use std::collections::HashMap;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::extractor::{SourceKind, SourceMention};
use crate::jsonl::{read_jsonl, JsonlError};
use crate::patterns::Platform;

/// Two printed and recomputed values closer than this are considered equal.
pub const MATCH_TOLERANCE_PP: f64 = 0.01;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoldAnnotation {
    pub article_id: String,
    pub sentence_index: usize,
    pub platform: Platform,
    pub kind: SourceKind,
}

impl From<&SourceMention> for GoldAnnotation {
    fn from(m: &SourceMention) -> Self {
        GoldAnnotation {
            article_id: m.article_id.clone(),
            sentence_index: m.sentence_index,
            platform: m.platform,
            kind: m.kind,
        }
    }
}

pub fn read_gold(path: impl AsRef<Path>) -> Result<Vec<GoldAnnotation>, JsonlError> {
    read_jsonl(path)
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum EvalError {
    #[error("duplicate {side} key: article {article_id:?}, sentence {sentence_index}, {platform}")]
    DuplicateKey {
        side: &'static str,
        article_id: String,
        sentence_index: usize,
        platform: Platform,
    },
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct KindCounts {
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
}

impl KindCounts {
    fn add(&mut self, other: KindCounts) {
        self.tp += other.tp;
        self.fp += other.fp;
        self.fn_ += other.fn_;
    }
}

/// Confusion counts indexed by [`SourceKind`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub per_kind: [KindCounts; 3],
}

impl ConfusionCounts {
    pub fn get(&self, kind: SourceKind) -> KindCounts {
        self.per_kind[kind.index()]
    }

    pub fn get_mut(&mut self, kind: SourceKind) -> &mut KindCounts {
        &mut self.per_kind[kind.index()]
    }

    pub fn pooled(&self) -> KindCounts {
        let mut total = KindCounts::default();
        for c in self.per_kind {
            total.add(c);
        }
        total
    }
}

type Key<'a> = (&'a str, usize, Platform);

fn index_by_key<'a, I>(side: &'static str, items: I) -> Result<HashMap<Key<'a>, SourceKind>, EvalError>
where
    I: IntoIterator<Item = (Key<'a>, SourceKind)>,
{
    let mut map = HashMap::new();
    for (key, kind) in items {
        if map.insert(key, kind).is_some() {
            return Err(EvalError::DuplicateKey {
                side,
                article_id: key.0.to_string(),
                sentence_index: key.1,
                platform: key.2,
            });
        }
    }
    Ok(map)
}

/// Builds confusion counts. A kind mismatch at a shared key is one false
/// positive for the predicted kind and one false negative for the gold kind.
pub fn compare(
    predicted: &[SourceMention],
    gold: &[GoldAnnotation],
) -> Result<ConfusionCounts, EvalError> {
    let pred_map = index_by_key(
        "predicted",
        predicted
            .iter()
            .map(|m| ((m.article_id.as_str(), m.sentence_index, m.platform), m.kind)),
    )?;
    let gold_map = index_by_key(
        "gold",
        gold.iter()
            .map(|g| ((g.article_id.as_str(), g.sentence_index, g.platform), g.kind)),
    )?;

    let mut counts = ConfusionCounts::default();
    for (key, &kind) in &pred_map {
        if gold_map.get(key) == Some(&kind) {
            counts.get_mut(kind).tp += 1;
        } else {
            counts.get_mut(kind).fp += 1;
        }
    }
    for (key, &kind) in &gold_map {
        if pred_map.get(key) != Some(&kind) {
            counts.get_mut(kind).fn_ += 1;
        }
    }
    Ok(counts)
}

/// Precision, recall and F1 as percentages.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricRow {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl MetricRow {
    fn from_counts(c: KindCounts) -> MetricRow {
        let precision = ratio(c.tp, c.tp + c.fp);
        let recall = ratio(c.tp, c.tp + c.fn_);
        MetricRow {
            precision: 100.0 * precision,
            recall: 100.0 * recall,
            f1: 100.0 * harmonic(precision, recall),
        }
    }
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

pub(crate) fn harmonic(p: f64, r: f64) -> f64 {
    if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub counts: ConfusionCounts,
    pub per_kind: [MetricRow; 3],
    pub macro_avg: MetricRow,
    pub micro_avg: MetricRow,
}

impl EvalReport {
    pub fn kind(&self, kind: SourceKind) -> MetricRow {
        self.per_kind[kind.index()]
    }

    /// Rows in report order with their category labels.
    pub fn rows(&self) -> Vec<(&'static str, MetricRow)> {
        let mut rows: Vec<_> = SourceKind::ALL
            .iter()
            .map(|&k| (k.label(), self.kind(k)))
            .collect();
        rows.push(("Macro-average", self.macro_avg));
        rows.push(("Micro-average", self.micro_avg));
        rows
    }
}

pub fn metrics(counts: &ConfusionCounts) -> EvalReport {
    let per_kind = SourceKind::ALL.map(|k| MetricRow::from_counts(counts.get(k)));
    let n = per_kind.len() as f64;
    let macro_avg = MetricRow {
        precision: per_kind.iter().map(|r| r.precision).sum::<f64>() / n,
        recall: per_kind.iter().map(|r| r.recall).sum::<f64>() / n,
        f1: per_kind.iter().map(|r| r.f1).sum::<f64>() / n,
    };
    EvalReport {
        counts: *counts,
        per_kind,
        macro_avg,
        micro_avg: MetricRow::from_counts(counts.pooled()),
    }
}

/// A previously published metric table to check a report against.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceRow {
    pub category: String,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

/// Reads a reference table in the report CSV layout. Values may carry a `%`.
pub fn read_reference_csv<R: Read>(reader: R) -> Result<Vec<ReferenceRow>, csv::Error> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let mut rows = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let num = |i: usize| -> Result<f64, csv::Error> {
            let raw = record.get(i).unwrap_or("").trim_end_matches('%');
            raw.parse::<f64>().map_err(|e| {
                csv::Error::from(std::io::Error::new(
                    std::io::ErrorKind::InvalidData,
                    format!("bad number {raw:?}: {e}"),
                ))
            })
        };
        rows.push(ReferenceRow {
            category: record.get(0).unwrap_or("").to_string(),
            precision: num(1)?,
            recall: num(2)?,
            f1: num(3)?,
        });
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Discrepancy {
    pub category: String,
    pub metric: &'static str,
    pub reference: f64,
    pub recomputed: f64,
    pub note: String,
}

/// Lists every reference cell that disagrees with the report by more than
/// [`MATCH_TOLERANCE_PP`]. When two categories' printed F1 values each match
/// the other's recomputed F1, the pair is flagged as transposed.
pub fn check_against_reference(report: &EvalReport, reference: &[ReferenceRow]) -> Vec<Discrepancy> {
    let ours: HashMap<&str, MetricRow> = report.rows().into_iter().collect();
    let close = |a: f64, b: f64| (a - b).abs() <= MATCH_TOLERANCE_PP + 1e-9;
    let mut out = Vec::new();

    for row in reference {
        let Some(mine) = ours.get(row.category.as_str()) else {
            continue;
        };
        for (metric, printed, recomputed) in [
            ("precision", row.precision, mine.precision),
            ("recall", row.recall, mine.recall),
            ("f1", row.f1, mine.f1),
        ] {
            if close(printed, recomputed) {
                continue;
            }
            let mut note = format!("printed {printed:.2} but counts give {recomputed:.2}");
            if metric == "f1" {
                let swapped = reference.iter().find(|other| {
                    other.category != row.category
                        && ours.get(other.category.as_str()).is_some_and(|o| {
                            close(row.f1, o.f1) && close(other.f1, mine.f1)
                        })
                });
                if let Some(other) = swapped {
                    note = format!(
                        "{note}; printed F1 appears transposed with {}",
                        other.category
                    );
                }
            }
            out.push(Discrepancy {
                category: row.category.clone(),
                metric,
                reference: printed,
                recomputed,
                note,
            });
        }
    }
    out
}

/// Round half away from zero to two decimals.
pub fn round2(x: f64) -> f64 {
    (x * 100.0).round() / 100.0
}

/// Writes the report as CSV. A `note` column is added when discrepancies are given.
pub fn write_report_csv<W: Write>(
    report: &EvalReport,
    discrepancies: Option<&[Discrepancy]>,
    out: W,
) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["category", "precision", "recall", "f1"];
    if discrepancies.is_some() {
        header.push("note");
    }
    w.write_record(&header)?;
    for (label, row) in report.rows() {
        let mut record = vec![
            label.to_string(),
            format!("{:.2}", round2(row.precision)),
            format!("{:.2}", round2(row.recall)),
            format!("{:.2}", round2(row.f1)),
        ];
        if let Some(ds) = discrepancies {
            let notes: Vec<String> = ds
                .iter()
                .filter(|d| d.category == label)
                .map(|d| format!("{}: {}", d.metric, d.note))
                .collect();
            record.push(notes.join("; "));
        }
        w.write_record(&record)?;
    }
    w.flush()?;
    Ok(())
}
