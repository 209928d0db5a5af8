use serde::Serialize;

/// Legal (open, close) quote-mark pairs. Order matters: two-character marks
/// are tried before their one-character prefixes.
pub const QUOTE_PAIRS: [(&str, &str); 7] = [
    ("``", "''"),
    ("\"", "\""),
    ("\u{201C}", "\u{201D}"),
    ("\u{00AB}", "\u{00BB}"),
    ("\u{2018}", "\u{2019}"),
    ("`", "'"),
    ("'", "'"),
];

/// Marks that count as quote signs on their own; single-quote style marks
/// only count when they form a pair.
const DOUBLE_MARKS: [char; 5] = ['"', '\u{201C}', '\u{201D}', '\u{00AB}', '\u{00BB}'];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct QuoteSpan {
    /// First character inside the opening mark.
    pub start: usize,
    /// Position of the closing mark (exclusive end of the quoted text).
    pub end: usize,
    pub open_mark: &'static str,
    pub close_mark: &'static str,
}

impl QuoteSpan {
    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }
}

/// True if the text contains a double-style quote mark or a paired
/// single-style quotation. Apostrophes inside words never count.
pub fn contains_quote_signs(sentence: &str) -> bool {
    if sentence.contains(DOUBLE_MARKS) || sentence.contains("``") || sentence.contains("''") {
        return true;
    }
    if !sentence.contains(['\'', '`', '\u{2018}', '\u{2019}']) {
        return false;
    }
    !extract_quote_spans(sentence).is_empty()
}

/// Scans left to right for maximal non-nested quotations.
///
/// While a quotation is open only its own closing mark is recognised, so
/// nested quotes are folded into the outer span. An opening mark that is
/// still unmatched at a paragraph break or at the end of the text produces
/// no span. Offsets are in characters.
pub fn extract_quote_spans(text: &str) -> Vec<QuoteSpan> {
    let chars: Vec<char> = text.chars().collect();
    extract_from_chars(&chars)
}

pub(crate) fn extract_from_chars(chars: &[char]) -> Vec<QuoteSpan> {
    let mut spans = Vec::new();
    // (pair index, first content char)
    let mut open: Option<(usize, usize)> = None;
    let mut i = 0;
    while i < chars.len() {
        if chars[i] == '\n' {
            if let Some(run) = paragraph_break_len(chars, i) {
                open = None;
                i += run;
                continue;
            }
        }
        match open {
            None => {
                if let Some((pair, len)) = opener_at(chars, i) {
                    open = Some((pair, i + len));
                    i += len;
                    continue;
                }
            }
            Some((pair, start)) => {
                if let Some(len) = closer_at(chars, i, pair) {
                    spans.push(QuoteSpan {
                        start,
                        end: i,
                        open_mark: QUOTE_PAIRS[pair].0,
                        close_mark: QUOTE_PAIRS[pair].1,
                    });
                    open = None;
                    i += len;
                    continue;
                }
            }
        }
        i += 1;
    }
    spans
}

/// Length of the whitespace run starting at `i` if it holds two or more newlines.
pub(crate) fn paragraph_break_len(chars: &[char], i: usize) -> Option<usize> {
    let mut newlines = 0;
    let mut j = i;
    while j < chars.len() && chars[j].is_whitespace() {
        if chars[j] == '\n' {
            newlines += 1;
        }
        j += 1;
    }
    (newlines >= 2).then_some(j - i)
}

fn opener_at(chars: &[char], i: usize) -> Option<(usize, usize)> {
    match chars[i] {
        '`' if chars.get(i + 1) == Some(&'`') => Some((0, 2)),
        '"' => Some((1, 1)),
        '\u{201C}' => Some((2, 1)),
        '\u{00AB}' => Some((3, 1)),
        '\u{2018}' if single_opens(chars, i) => Some((4, 1)),
        '`' => Some((5, 1)),
        // '' is the closing half of a ``...'' pair, never an opener
        '\'' if chars.get(i + 1) == Some(&'\'') => None,
        '\'' if single_opens(chars, i) => Some((6, 1)),
        _ => None,
    }
}

fn closer_at(chars: &[char], i: usize, pair: usize) -> Option<usize> {
    let c = chars[i];
    match pair {
        0 => (c == '\'' && chars.get(i + 1) == Some(&'\'')).then_some(2),
        1 => (c == '"').then_some(1),
        2 => (c == '\u{201D}').then_some(1),
        3 => (c == '\u{00BB}').then_some(1),
        4 => (c == '\u{2019}' && single_closes(chars, i)).then_some(1),
        5 | 6 => (c == '\'' && single_closes(chars, i)).then_some(1),
        _ => None,
    }
}

// A single mark flanked by letters (don't, O'Brien) is an apostrophe. An
// opener needs a non-alphanumeric char before it and a non-space, non-digit
// char after it ('90s is elision, not a quote).
fn single_opens(chars: &[char], i: usize) -> bool {
    let before_ok = i == 0 || !chars[i - 1].is_alphanumeric();
    let after_ok = chars
        .get(i + 1)
        .is_some_and(|c| !c.is_whitespace() && !c.is_ascii_digit());
    before_ok && after_ok
}

fn single_closes(chars: &[char], i: usize) -> bool {
    let before_ok = i > 0 && !chars[i - 1].is_whitespace();
    let after_ok = chars.get(i + 1).is_none_or(|c| !c.is_alphanumeric());
    before_ok && after_ok
}
