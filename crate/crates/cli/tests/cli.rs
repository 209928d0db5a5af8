use std::fs;
use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpListener;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::sync::{Arc, Mutex};

use serde_json::{json, Value};

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_sourcescope"));
    cmd.env_remove("SOURCESCOPE_LABELER_TOKEN").env("RUST_LOG", "off");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn golden() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures/golden_corpus.jsonl")
}

fn record(id: &str, media: &str, date: &str, body: &str, topic: Option<&str>) -> String {
    let mut v = json!({
        "id": id, "outlet": "Desk", "media_type": media,
        "published_at": date, "headline": "h", "body": body,
    });
    if let Some(t) = topic {
        v["topic"] = json!(t);
    }
    v.to_string()
}

fn write_lines(dir: &Path, name: &str, lines: &[String]) -> PathBuf {
    let path = dir.join(name);
    let mut text = lines.join("\n");
    if !lines.is_empty() {
        text.push('\n');
    }
    fs::write(&path, text).unwrap();
    path
}

fn three_valid(dir: &Path) -> PathBuf {
    write_lines(
        dir,
        "valid.jsonl",
        &[
            record("a", "mainstream", "2016-01-02", "The senator tweeted that the vote failed.", None),
            record("b", "unreliable", "2017-03-04", "\"We won,\" she wrote on Facebook.", Some("Politics")),
            record("c", "mainstream", "2013-05-06", "Nothing to see here.", None),
        ],
    )
}

#[test]
fn ingest_reports_counts() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["ingest", "--corpus", three_valid(dir.path()).to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().next(), Some("3 accepted, 0 rejected"));
}

#[test]
fn ingest_mixed_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_lines(
        dir.path(),
        "mixed.jsonl",
        &[
            record("a", "mainstream", "2016-01-02", "ok", None),
            r#"{"id":"b","outlet":"x","media_type":"tabloid","published_at":"2016-01-02","headline":"h","body":"b"}"#.into(),
            record("c", "unreliable", "2016-01-02", "ok", None),
        ],
    );
    let p = path.to_str().unwrap();
    let o = run(&["ingest", "--corpus", p]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("2 accepted, 1 rejected"));

    let o = run(&["ingest", "--corpus", p, "--fail-fast"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"), "{o:?}");
}

#[test]
fn ingest_empty_and_missing() {
    let dir = tempfile::tempdir().unwrap();
    let empty = write_lines(dir.path(), "empty.jsonl", &[]);
    let o = run(&["ingest", "--corpus", empty.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("0 accepted"));

    let o = run(&["ingest", "--corpus", dir.path().join("nope.jsonl").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn usage_errors_are_validation_failures() {
    assert_eq!(run(&["extract"]).status.code(), Some(1));
    assert_eq!(run(&["extract", "--parallel", "0", "--corpus", "x"]).status.code(), Some(1));
    assert_eq!(run(&["bogus"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn extract_is_deterministic_across_runs_and_workers() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = golden();
    let mut outputs = Vec::new();
    for (name, workers) in [("one", "1"), ("again", "1"), ("eight", "8")] {
        let out = dir.path().join(name);
        let o = run(&[
            "extract", "--corpus", corpus.to_str().unwrap(),
            "--out", out.to_str().unwrap(), "--parallel", workers,
        ]);
        assert_eq!(o.status.code(), Some(0), "{o:?}");
        outputs.push((
            fs::read(out.join("mentions.jsonl")).unwrap(),
            fs::read(out.join("sentences.jsonl")).unwrap(),
        ));
    }
    assert!(!outputs[0].0.is_empty());
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[0], outputs[2]);

    let first: Value = serde_json::from_slice(outputs[0].1.split(|&b| b == b'\n').next().unwrap()).unwrap();
    assert_eq!(first["article_id"], "g01");
    assert_eq!(first["sentence_index"], 0);
}

#[test]
fn extract_without_matches_writes_empty_file() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = write_lines(dir.path(), "plain.jsonl", &[record("a", "mainstream", "2016-01-02", "Rain fell.", None)]);
    let out = dir.path().join("out");
    let o = run(&["extract", "--corpus", corpus.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(fs::read(out.join("mentions.jsonl")).unwrap(), b"");
}

#[test]
fn custom_pattern_file_is_used() {
    let dir = tempfile::tempdir().unwrap();
    let patterns = dir.path().join("p.tsv");
    fs::write(&patterns, "# version: tiny-1\ntwitter\tchirped\nfacebook\tposted on facebook\n").unwrap();
    let corpus = write_lines(dir.path(), "c.jsonl", &[record("a", "mainstream", "2016-01-02", "She chirped loudly.", None)]);
    let out = dir.path().join("out");
    let o = run(&[
        "extract", "--corpus", corpus.to_str().unwrap(),
        "--patterns", patterns.to_str().unwrap(), "--out", out.to_str().unwrap(),
    ]);
    assert!(stdout(&o).contains("tiny-1"));
    let m: Value = serde_json::from_str(fs::read_to_string(out.join("mentions.jsonl")).unwrap().trim()).unwrap();
    assert_eq!(m["pattern_id"], "tw-001");

    fs::write(&patterns, "twitter\tchirped\n").unwrap();
    let o = run(&["extract", "--corpus", corpus.to_str().unwrap(), "--patterns", patterns.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

fn key(article: usize, sentence: usize, platform: &str, kind: &str) -> Value {
    json!({"article_id": format!("e{article}"), "sentence_index": sentence, "platform": platform, "kind": kind})
}

fn mention(k: &Value) -> String {
    let mut m = k.clone();
    let embedding = k["kind"] == "embedding";
    m["pattern_id"] = if embedding { Value::Null } else { json!("tw-001") };
    m["span_start"] = json!(0);
    m["span_end"] = json!(1);
    m.to_string()
}

/// Gold 60/63/270, predicted 49/53/270, correct 44/50/270.
fn table_one_files(dir: &Path) -> (PathBuf, PathBuf) {
    let mut gold = Vec::new();
    let mut pred = Vec::new();
    let mut article = 0;
    let mut fresh = || {
        article += 1;
        article
    };
    for (kind, g, p, tp) in [("quotation", 60, 49, 44), ("paraphrase", 63, 53, 50), ("embedding", 270, 270, 270)] {
        for _ in 0..tp {
            let k = key(fresh(), 0, "twitter", kind);
            gold.push(k.to_string());
            pred.push(mention(&k));
        }
        for _ in tp..g {
            gold.push(key(fresh(), 0, "twitter", kind).to_string());
        }
        for _ in tp..p {
            pred.push(mention(&key(fresh(), 0, "twitter", kind)));
        }
    }
    (write_lines(dir, "gold.jsonl", &gold), write_lines(dir, "pred.jsonl", &pred))
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines().map(|l| l.split(',').map(String::from).collect()).collect()
}

#[test]
fn evaluate_reconstructed_table() {
    let dir = tempfile::tempdir().unwrap();
    let (gold, pred) = table_one_files(dir.path());
    let out = dir.path().join("out");
    let o = run(&[
        "evaluate", "--gold", gold.to_str().unwrap(), "--mentions", pred.to_str().unwrap(),
        "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{o:?}");
    let text = fs::read_to_string(out.join("evaluation.csv")).unwrap();
    assert_eq!(text, stdout(&o));
    let rows = csv_rows(&text);
    assert_eq!(rows[0], ["category", "precision", "recall", "f1"]);
    assert_eq!(rows[1], ["Quotation", "89.80", "73.33", "80.73"]);
    assert_eq!(rows[2], ["Paraphrase", "94.34", "79.37", "86.21"]);
    assert_eq!(rows[3], ["Embedding", "100.00", "100.00", "100.00"]);
    assert_eq!(rows[4], ["Macro-average", "94.71", "84.23", "88.98"]);
    assert_eq!(rows[5], ["Micro-average", "97.85", "92.62", "95.16"]);

    let reference = dir.path().join("printed.csv");
    fs::write(
        &reference,
        "category,precision,recall,f1\nQuotation,89.80%,73.33%,86.21%\nParaphrase,94.34%,79.37%,80.73%\n",
    )
    .unwrap();
    let o = run(&[
        "evaluate", "--gold", gold.to_str().unwrap(), "--mentions", pred.to_str().unwrap(),
        "--out", out.to_str().unwrap(), "--compare", reference.to_str().unwrap(),
    ]);
    let text = fs::read_to_string(out.join("evaluation.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("category,precision,recall,f1,note"));
    let q = lines.next().unwrap();
    assert!(q.contains("transposed with Paraphrase"), "{q}");
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn evaluate_edge_cases() {
    let dir = tempfile::tempdir().unwrap();
    let k = key(1, 2, "facebook", "paraphrase");
    let pred = write_lines(dir.path(), "pred.jsonl", &[mention(&k)]);
    let same = write_lines(dir.path(), "same.jsonl", &[k.to_string()]);
    let empty = write_lines(dir.path(), "empty.jsonl", &[]);
    let out = dir.path().join("out");
    let args = |gold: &Path| {
        run(&[
            "evaluate", "--gold", gold.to_str().unwrap(), "--mentions", pred.to_str().unwrap(),
            "--out", out.to_str().unwrap(),
        ])
    };
    let rows = csv_rows(&stdout(&args(&same)));
    assert_eq!(rows[2], ["Paraphrase", "100.00", "100.00", "100.00"]);
    assert_eq!(rows[5], ["Micro-average", "100.00", "100.00", "100.00"]);
    let rows = csv_rows(&stdout(&args(&empty)));
    assert_eq!(rows[5], ["Micro-average", "0.00", "0.00", "0.00"]);

    let dup = write_lines(dir.path(), "dup.jsonl", &[k.to_string(), k.to_string()]);
    assert_eq!(args(&dup).status.code(), Some(1));
}

#[test]
fn evaluate_extracts_when_no_mentions_given() {
    let dir = tempfile::tempdir().unwrap();
    let gold = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures/golden_gold.jsonl");
    let o = run(&[
        "evaluate", "--gold", gold.to_str().unwrap(), "--corpus", golden().to_str().unwrap(),
        "--out", dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("Micro-average,100.00,100.00,100.00"));
}

const REPORT_FILES: [&str; 7] = [
    "table2_media.csv",
    "table3_quotes.csv",
    "table4_topics.csv",
    "table5_topic_kinds.csv",
    "trend.tsv",
    "trend.csv",
    "summary.json",
];

fn read_reports(out: &Path) -> Vec<String> {
    REPORT_FILES.iter().map(|f| fs::read_to_string(out.join(f)).unwrap()).collect()
}

#[test]
fn analyze_writes_all_tables_idempotently() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = golden();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for out in [&a, &b] {
        let o = run(&["analyze", "--corpus", corpus.to_str().unwrap(), "--out", out.to_str().unwrap(), "--parallel", "3"]);
        assert_eq!(o.status.code(), Some(0), "{o:?}");
    }
    let reports = read_reports(&a);
    assert_eq!(reports, read_reports(&b));
    let summary: Value = serde_json::from_str(&reports[6]).unwrap();
    assert!(summary["pattern_version"].as_str().unwrap().contains("134 facebook, 78 twitter"));
    assert_eq!(summary["media"]["rows"][2]["total_articles"], 37);
    assert!(reports[2].lines().count() > 1, "preset topics give a topic table");
}

#[test]
fn analyze_single_unlabeled_article() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = write_lines(
        dir.path(),
        "one.jsonl",
        &[record("a", "mainstream", "2016-01-02", "He said \"see you in court\" and she tweeted back.", None)],
    );
    let out = dir.path().join("out");
    let o = run(&["analyze", "--corpus", corpus.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let r = read_reports(&out);
    assert_eq!(r[0].lines().count(), 4);
    assert!(r[0].lines().nth(1).unwrap().starts_with("mainstream,1,1,100.00,1,100.00,1,100.00"));
    assert_eq!(r[1].lines().nth(1), Some("mainstream,1,1,1.00,1,1:1.00"));
    assert_eq!(r[2].lines().count(), 1, "topic table is header only");
    assert_eq!(r[3].lines().count(), 1);
    assert_eq!(r[4], "year\tmedia_type\tpct\n2016\tall\t100.00\n2016\tmainstream\t100.00\n");
}

#[test]
fn analyze_keyword_labeler() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = write_lines(
        dir.path(),
        "k.jsonl",
        &[record("a", "unreliable", "2016-01-02", "The senate race and the election dominated Congress. He tweeted.", None)],
    );
    let out = dir.path().join("out");
    let o = run(&["analyze", "--corpus", corpus.to_str().unwrap(), "--out", out.to_str().unwrap(), "--labeler", "keyword"]);
    assert_eq!(o.status.code(), Some(0));
    let topics = fs::read_to_string(out.join("table4_topics.csv")).unwrap();
    assert_eq!(topics.lines().nth(1), Some("unreliable,1,Politics,1,1,100.00"));
}

type Seen = Arc<Mutex<Vec<(Option<String>, String)>>>;

struct Mock {
    url: String,
    seen: Seen,
}

/// Answers every request with `status` and `body`, recording the
/// Authorization header and request body.
fn mock_labeler(status: &'static str, body: &'static str) -> Mock {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let url = format!("http://{}/label", listener.local_addr().unwrap());
    let seen = Arc::new(Mutex::new(Vec::new()));
    let log = Arc::clone(&seen);
    std::thread::spawn(move || {
        for stream in listener.incoming() {
            let Ok(mut stream) = stream else { continue };
            let mut reader = BufReader::new(stream.try_clone().unwrap());
            let mut auth = None;
            let mut len = 0usize;
            loop {
                let mut line = String::new();
                if reader.read_line(&mut line).unwrap_or(0) == 0 || line == "\r\n" {
                    break;
                }
                let lower = line.to_ascii_lowercase();
                if let Some(v) = lower.strip_prefix("content-length:") {
                    len = v.trim().parse().unwrap_or(0);
                }
                if lower.starts_with("authorization:") {
                    auth = Some(line["authorization:".len()..].trim().to_string());
                }
            }
            let mut buf = vec![0; len];
            let _ = reader.read_exact(&mut buf);
            log.lock().unwrap().push((auth, String::from_utf8_lossy(&buf).into_owned()));
            let resp = format!(
                "HTTP/1.1 {status}\r\nContent-Type: text/plain\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}",
                body.len()
            );
            let _ = stream.write_all(resp.as_bytes());
        }
    });
    Mock { url, seen }
}

#[test]
fn analyze_remote_labeler() {
    let mock = mock_labeler("200 OK", "Health\n");
    let dir = tempfile::tempdir().unwrap();
    let corpus = write_lines(
        dir.path(),
        "r.jsonl",
        &[
            record("a", "mainstream", "2016-01-02", "Plain text body.", None),
            record("b", "mainstream", "2016-01-02", "Preset body.", Some("Sports")),
        ],
    );
    let out = dir.path().join("out");
    let o = bin()
        .args(["analyze", "--corpus", corpus.to_str().unwrap(), "--out", out.to_str().unwrap()])
        .args(["--labeler", "remote", "--labeler-url", &mock.url])
        .env("SOURCESCOPE_LABELER_TOKEN", "s3cret")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{o:?}");
    let seen = mock.seen.lock().unwrap().clone();
    assert_eq!(seen, [(Some("Bearer s3cret".to_string()), "Plain text body.".to_string())]);
    let topics = fs::read_to_string(out.join("table4_topics.csv")).unwrap();
    assert!(topics.contains("mainstream,1,Health,1,0,0.00"), "{topics}");
    assert!(topics.contains("mainstream,2,Sports,1,0,0.00"), "{topics}");
}

#[test]
fn remote_labeler_failure_exits_3() {
    let mock = mock_labeler("500 Internal Server Error", "boom");
    let dir = tempfile::tempdir().unwrap();
    let corpus = write_lines(dir.path(), "r.jsonl", &[record("a", "mainstream", "2016-01-02", "Body.", None)]);
    let o = run(&[
        "analyze", "--corpus", corpus.to_str().unwrap(), "--out", dir.path().join("o").to_str().unwrap(),
        "--labeler", "remote", "--labeler-url", &mock.url,
    ]);
    assert_eq!(o.status.code(), Some(3), "{o:?}");
    assert!(String::from_utf8_lossy(&o.stderr).contains("3 attempt(s)"));
    assert_eq!(mock.seen.lock().unwrap().len(), 3);

    let o = run(&["analyze", "--corpus", corpus.to_str().unwrap(), "--labeler", "remote"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn sample_is_seeded() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = golden();
    let draw = |seed: &str, name: &str| {
        let out = dir.path().join(name);
        let o = run(&[
            "sample", "--corpus", corpus.to_str().unwrap(), "--out", out.to_str().unwrap(),
            "--keywords", "facebook,twitter", "--n", "6", "--seed", seed,
        ]);
        assert_eq!(o.status.code(), Some(0), "{o:?}");
        fs::read_to_string(out.join("sample.jsonl")).unwrap()
    };
    let a = draw("7", "a");
    assert_eq!(a, draw("7", "b"));
    assert_eq!(a.lines().count(), 6);
    let ids: Vec<String> = a
        .lines()
        .map(|l| serde_json::from_str::<Value>(l).unwrap()["id"].as_str().unwrap().to_string())
        .collect();
    let mut sorted = ids.clone();
    sorted.sort();
    assert_eq!(ids, sorted, "sample keeps corpus order");

    let o = run(&["sample", "--corpus", corpus.to_str().unwrap(), "--keywords", "a,b,c", "--n", "2"]);
    assert_eq!(o.status.code(), Some(1));
}
