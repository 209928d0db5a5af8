use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use chrono::{DateTime, NaiveDate, Utc};
use serde::Serialize;
use serde_json::{Map, Value};

use super::{Article, Corpus, CorpusError, MediaType};

const REQUIRED_KEYS: [&str; 6] = ["id", "outlet", "media_type", "published_at", "headline", "body"];
const OPTIONAL_KEYS: [&str; 2] = ["topic", "url"];

#[derive(Debug, Clone, Copy, Default)]
pub struct IngestOptions {
    /// Abort on the first invalid record instead of skipping it.
    pub fail_fast: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Rejection {
    pub line: usize,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct IngestReport {
    pub accepted: usize,
    pub rejected: Vec<Rejection>,
    /// Number of records that carried keys outside the schema.
    pub unknown_key_warnings: usize,
}

/// Reads a line-delimited corpus file.
pub fn ingest(
    path: impl AsRef<Path>,
    options: IngestOptions,
) -> Result<(Corpus, IngestReport), CorpusError> {
    let path = path.as_ref();
    let file = File::open(path)?;
    ingest_reader(BufReader::new(file), path.display().to_string(), options)
}

pub fn ingest_reader<R: BufRead>(
    reader: R,
    source_path: String,
    options: IngestOptions,
) -> Result<(Corpus, IngestReport), CorpusError> {
    let mut corpus = Corpus {
        source_path,
        ..Corpus::default()
    };
    let mut report = IngestReport::default();

    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        match parse_record(&line) {
            Ok((article, unknown_keys)) => {
                if unknown_keys {
                    report.unknown_key_warnings += 1;
                }
                corpus.push(article, line_no)?;
                report.accepted += 1;
            }
            Err(reason) => {
                if options.fail_fast {
                    return Err(CorpusError::Malformed {
                        line: line_no,
                        reason,
                    });
                }
                log::warn!("skipping line {line_no}: {reason}");
                report.rejected.push(Rejection {
                    line: line_no,
                    reason,
                });
            }
        }
    }
    if report.unknown_key_warnings > 0 {
        log::warn!(
            "{} records carried unknown keys (ignored)",
            report.unknown_key_warnings
        );
    }
    Ok((corpus, report))
}

fn parse_record(line: &str) -> Result<(Article, bool), String> {
    let value: Value = serde_json::from_str(line).map_err(|e| format!("invalid JSON: {e}"))?;
    let Value::Object(obj) = value else {
        return Err("record is not an object".to_string());
    };

    let id = required_str(&obj, "id")?;
    if id.is_empty() {
        return Err("empty id".to_string());
    }
    let media_type = required_str(&obj, "media_type")?
        .parse::<MediaType>()
        .map_err(|e| e.to_string())?;
    let published_at = parse_date(required_str(&obj, "published_at")?)?;

    let article = Article {
        id: id.to_string(),
        outlet: required_str(&obj, "outlet")?.to_string(),
        media_type,
        published_at,
        headline: required_str(&obj, "headline")?.to_string(),
        body: required_str(&obj, "body")?.to_string(),
        topic: optional_str(&obj, "topic")?,
        url: optional_str(&obj, "url")?,
    };
    let unknown_keys = obj
        .keys()
        .any(|k| !REQUIRED_KEYS.contains(&k.as_str()) && !OPTIONAL_KEYS.contains(&k.as_str()));
    Ok((article, unknown_keys))
}

fn required_str<'a>(obj: &'a Map<String, Value>, key: &str) -> Result<&'a str, String> {
    match obj.get(key) {
        Some(Value::String(s)) => Ok(s),
        Some(_) => Err(format!("key {key:?} must be a string")),
        None => Err(format!("missing required key {key:?}")),
    }
}

fn optional_str(obj: &Map<String, Value>, key: &str) -> Result<Option<String>, String> {
    match obj.get(key) {
        None | Some(Value::Null) => Ok(None),
        Some(Value::String(s)) if s.trim().is_empty() => Ok(None),
        Some(Value::String(s)) => Ok(Some(s.clone())),
        Some(_) => Err(format!("key {key:?} must be a string")),
    }
}

/// Accepts a plain ISO date or a full RFC 3339 timestamp (normalized to UTC).
fn parse_date(s: &str) -> Result<NaiveDate, String> {
    if let Ok(date) = NaiveDate::parse_from_str(s, "%Y-%m-%d") {
        return Ok(date);
    }
    DateTime::parse_from_rfc3339(s)
        .map(|dt| dt.with_timezone(&Utc).date_naive())
        .map_err(|_| format!("invalid published_at {s:?}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(input: &str, fail_fast: bool) -> Result<(Corpus, IngestReport), CorpusError> {
        ingest_reader(input.as_bytes(), "mem".into(), IngestOptions { fail_fast })
    }

    fn line(id: &str, media: &str, date: &str) -> String {
        format!(
            r#"{{"id":"{id}","outlet":"O","media_type":"{media}","published_at":"{date}","headline":"H","body":"B"}}"#
        )
    }

    #[test]
    fn empty_input_is_empty_corpus() {
        let (corpus, report) = run("", true).unwrap();
        assert!(corpus.is_empty());
        assert_eq!(report.accepted, 0);
    }

    #[test]
    fn keeps_file_order() {
        let input = [
            line("c", "mainstream", "2013-01-01"),
            line("a", "unreliable", "2014-01-01"),
            line("b", "mainstream", "2015-01-01"),
        ]
        .join("\n");
        let (corpus, report) = run(&input, true).unwrap();
        let ids: Vec<_> = corpus.iter().map(|a| a.id.as_str()).collect();
        assert_eq!(ids, ["c", "a", "b"]);
        assert_eq!(report.accepted, 3);
    }

    #[test]
    fn unknown_media_type_is_named() {
        let input = line("a", "satire", "2013-01-01");
        let err = run(&input, true).unwrap_err();
        assert!(matches!(err, CorpusError::Malformed { line: 1, .. }));
        assert!(err.to_string().contains("satire"));

        let (_, report) = run(&input, false).unwrap();
        assert_eq!(report.rejected.len(), 1);
        assert!(report.rejected[0].reason.contains("satire"));
    }

    #[test]
    fn skip_mode_reports_bad_lines() {
        let input = [
            line("a", "mainstream", "2013-01-01"),
            "{not json".to_string(),
            line("b", "mainstream", "2013-02-30"),
            line("c", "unreliable", "2016-03-01"),
        ]
        .join("\n");
        let (corpus, report) = run(&input, false).unwrap();
        assert_eq!(corpus.len(), 2);
        let lines: Vec<_> = report.rejected.iter().map(|r| r.line).collect();
        assert_eq!(lines, [2, 3]);
    }

    #[test]
    fn duplicate_id_is_always_fatal() {
        let input = [line("a", "mainstream", "2013-01-01"), line("a", "mainstream", "2013-01-02")]
            .join("\n");
        for fail_fast in [true, false] {
            let err = run(&input, fail_fast).unwrap_err();
            assert!(err.to_string().contains("\"a\""), "{err}");
        }
    }

    #[test]
    fn missing_body_rejected_but_empty_body_ok() {
        let missing = r#"{"id":"a","outlet":"O","media_type":"mainstream","published_at":"2013-01-01","headline":"H"}"#;
        let err = run(missing, true).unwrap_err();
        assert!(err.to_string().contains("body"));

        let empty = r#"{"id":"a","outlet":"O","media_type":"mainstream","published_at":"2013-01-01","headline":"H","body":""}"#;
        let (corpus, _) = run(empty, true).unwrap();
        assert_eq!(corpus.articles()[0].body, "");
    }

    #[test]
    fn unknown_keys_counted() {
        let input = r#"{"id":"a","outlet":"O","media_type":"mainstream","published_at":"2013-01-01","headline":"H","body":"","extra":1,"topic":"Politics"}"#;
        let (corpus, report) = run(input, true).unwrap();
        assert_eq!(report.unknown_key_warnings, 1);
        assert_eq!(corpus.articles()[0].topic.as_deref(), Some("Politics"));
    }

    #[test]
    fn timestamps_normalize_to_utc_date() {
        assert_eq!(
            parse_date("2016-12-31T23:30:00-05:00").unwrap(),
            NaiveDate::from_ymd_opt(2017, 1, 1).unwrap()
        );
        assert!(parse_date("yesterday").is_err());
    }
}
