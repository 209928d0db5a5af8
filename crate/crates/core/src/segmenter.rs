//! Rule-based sentence segmentation.
//!
//! A boundary falls after a run of `.`, `!`, `?` or `…` (plus any closing
//! brackets or quote marks) when the run is followed by whitespace and then
//! an uppercase letter, an opening quote mark, or the end of the text. A
//! paragraph break (two or more newlines) always ends a sentence. No boundary
//! is placed after a known abbreviation, a single-letter initial, a dotted
//! acronym such as "U.S.", or anywhere inside a quotation.

use serde::{Deserialize, Serialize};

use crate::patterns::{extract_quote_spans_chars, paragraph_break_len};

/// Character offsets of one sentence inside its source text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SentenceSpan {
    pub index: usize,
    pub start: usize,
    pub end: usize,
}

const ABBREVIATIONS: &[&str] = &[
    "Mr", "Mrs", "Ms", "Dr", "St", "Jr", "Sr", "Gov", "Sen", "Rep", "Inc", "Co", "vs", "etc",
    "Prof", "Gen", "Lt", "Col", "Capt", "Sgt", "Rev", "Corp", "Ltd", "Mt", "Ft", "Ave", "Gens",
    "Reps", "Sens", "No", "Jan", "Feb", "Aug", "Sept", "Oct", "Nov", "Dec",
];

const TERMINALS: [char; 4] = ['.', '!', '?', '\u{2026}'];
const CLOSERS: [char; 7] = [')', ']', '"', '\u{201D}', '\u{2019}', '\'', '\u{00BB}'];
const OPENING_QUOTES: [char; 5] = ['"', '\u{201C}', '\u{2018}', '\'', '\u{00AB}'];

/// Splits text into sentences. Pure function of its input.
pub fn segment(text: &str) -> Vec<SentenceSpan> {
    let chars: Vec<char> = text.chars().collect();
    segment_chars(&chars)
}

pub(crate) fn segment_chars(chars: &[char]) -> Vec<SentenceSpan> {
    let n = chars.len();
    let mut in_quote = vec![false; n];
    for span in extract_quote_spans_chars(chars) {
        in_quote[span.start..span.end].iter_mut().for_each(|q| *q = true);
    }

    let mut spans = Vec::new();
    let mut seg_start = 0;
    let mut i = 0;
    while i < n {
        let c = chars[i];
        if c == '\n' {
            if let Some(run) = paragraph_break_len(chars, i) {
                push_trimmed(chars, seg_start, i, &mut spans);
                i += run;
                seg_start = i;
                continue;
            }
        }
        if TERMINALS.contains(&c) && !in_quote[i] {
            let mut j = i;
            while j < n && TERMINALS.contains(&chars[j]) {
                j += 1;
            }
            let run_is_single_period = j == i + 1 && c == '.';
            while j < n && CLOSERS.contains(&chars[j]) {
                j += 1;
            }
            if breaks_after(chars, j) && !(run_is_single_period && is_abbreviation(chars, i)) {
                push_trimmed(chars, seg_start, j, &mut spans);
                seg_start = j;
            }
            i = j;
            continue;
        }
        i += 1;
    }
    push_trimmed(chars, seg_start, n, &mut spans);
    spans
}

fn breaks_after(chars: &[char], j: usize) -> bool {
    if j == chars.len() {
        return true;
    }
    if !chars[j].is_whitespace() {
        return false;
    }
    match chars[j..].iter().find(|c| !c.is_whitespace()) {
        None => true,
        Some(&next) => next.is_uppercase() || OPENING_QUOTES.contains(&next),
    }
}

/// Whether the period at `dot` ends an abbreviation rather than a sentence.
fn is_abbreviation(chars: &[char], dot: usize) -> bool {
    let mut s = dot;
    while s > 0 && !chars[s - 1].is_whitespace() {
        s -= 1;
    }
    let token: String = chars[s..dot]
        .iter()
        .skip_while(|c| !c.is_alphanumeric())
        .collect();
    if token.is_empty() {
        return false;
    }
    if ABBREVIATIONS.contains(&token.as_str()) {
        return true;
    }
    let mut letters = token.chars();
    // single initial: "J."
    if token.chars().count() == 1 {
        return letters.next().is_some_and(char::is_uppercase);
    }
    // dotted acronym: "U.S", "a.m", "D.C", "e.g"
    token.split('.').all(|part| {
        let mut it = part.chars();
        matches!((it.next(), it.next()), (Some(c), None) if c.is_alphabetic())
    })
}

fn push_trimmed(chars: &[char], start: usize, end: usize, spans: &mut Vec<SentenceSpan>) {
    let mut s = start;
    let mut e = end;
    while s < e && chars[s].is_whitespace() {
        s += 1;
    }
    while e > s && chars[e - 1].is_whitespace() {
        e -= 1;
    }
    if s < e {
        spans.push(SentenceSpan {
            index: spans.len(),
            start: s,
            end: e,
        });
    }
}

/// Pairs each span with its text slice.
pub fn sentences(text: &str) -> Vec<(SentenceSpan, &str)> {
    let byte_of: Vec<usize> = text
        .char_indices()
        .map(|(b, _)| b)
        .chain(std::iter::once(text.len()))
        .collect();
    segment(text)
        .into_iter()
        .map(|s| (s, &text[byte_of[s.start]..byte_of[s.end]]))
        .collect()
}
