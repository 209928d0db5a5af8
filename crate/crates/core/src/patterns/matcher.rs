use serde::Serialize;

use super::{Anchor, PatternSet, Platform};

/// One occurrence of a citation phrase inside a sentence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PatternHit {
    pub pattern_id: String,
    pub platform: Platform,
    /// Character offsets into the sentence.
    pub start: usize,
    pub end: usize,
}

/// Lowercased, whitespace-collapsed view of a sentence with a map back to
/// original character positions.
struct Folded {
    text: String,
    // per folded char: byte offset in `text`, original char index
    byte_at: Vec<usize>,
    orig_at: Vec<usize>,
}

impl Folded {
    fn new(chars: &[char]) -> Folded {
        let mut text = String::with_capacity(chars.len());
        let mut byte_at = Vec::with_capacity(chars.len());
        let mut orig_at = Vec::with_capacity(chars.len());
        let mut in_space = false;
        for (i, &c) in chars.iter().enumerate() {
            if c.is_whitespace() {
                if in_space {
                    continue;
                }
                in_space = true;
                byte_at.push(text.len());
                orig_at.push(i);
                text.push(' ');
            } else {
                in_space = false;
                byte_at.push(text.len());
                orig_at.push(i);
                text.push(c.to_lowercase().next().unwrap_or(c));
            }
        }
        Folded {
            text,
            byte_at,
            orig_at,
        }
    }

    fn char_index(&self, byte: usize) -> usize {
        if byte == self.text.len() {
            return self.byte_at.len();
        }
        self.byte_at
            .binary_search(&byte)
            .expect("match offsets fall on char boundaries")
    }
}

/// Finds every word-bounded, case-insensitive occurrence of every phrase.
///
/// Runs of whitespace in the sentence match a single space in a phrase.
/// Hits from different patterns may overlap; all are reported, ordered by
/// start offset, then end offset, then pattern id.
pub fn match_patterns(sentence: &str, set: &PatternSet) -> Vec<PatternHit> {
    let chars: Vec<char> = sentence.chars().collect();
    match_chars(&chars, set)
}

pub(crate) fn match_chars(chars: &[char], set: &PatternSet) -> Vec<PatternHit> {
    let folded = Folded::new(chars);
    let mut hits = Vec::new();
    for m in set.automaton.find_overlapping_iter(&folded.text) {
        let first = folded.char_index(m.start());
        let last = folded.char_index(m.end()) - 1;
        let start = folded.orig_at[first];
        let end = folded.orig_at[last] + 1;

        let left_ok = start == 0 || !chars[start - 1].is_alphanumeric();
        if !left_ok {
            continue;
        }
        let right_ok = end == chars.len() || !chars[end].is_alphanumeric();
        for &owner in &set.owners[m.pattern().as_usize()] {
            let pattern = &set.patterns[owner];
            if pattern.anchor == Anchor::Both && !right_ok {
                continue;
            }
            hits.push(PatternHit {
                pattern_id: pattern.id.clone(),
                platform: pattern.platform,
                start,
                end,
            });
        }
    }
    hits.sort_by(|a, b| {
        (a.start, a.end, &a.pattern_id).cmp(&(b.start, b.end, &b.pattern_id))
    });
    hits
}
