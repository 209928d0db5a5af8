use std::sync::LazyLock;

use regex::Regex;

use super::Platform;

// "— Donald J. Trump (@realDonaldTrump) July 25, 2018": the attribution line
// an embedded tweet leaves behind once the widget markup is stripped.
static ATTRIBUTION_LINE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(
        r"(?x)
        (?:\u{2014}|\u{2013}|\u{2015}|-{1,2}|&mdash;)\s*
        [^\s()][^()\n]*?
        \(@[A-Za-z0-9_]{1,15}\)\s*
        (?:January|February|March|April|May|June|July|August|September|October|November|December
          |Jan|Feb|Mar|Apr|Jun|Jul|Aug|Sept|Sep|Oct|Nov|Dec)\.?\s+
        \d{1,2},\s*\d{4}",
    )
    .expect("attribution regex")
});

static MEDIA_LINK: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?i)\bpic\.twitter\.com/").expect("media link regex"));

static STATUS_LINK: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"(?i)twitter\.com/[A-Za-z0-9_]{1,15}/status(?:es)?/\d+").expect("status regex")
});

/// Where an embedding rule fired, in character offsets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EmbeddingMatch {
    pub platform: Platform,
    pub start: usize,
    pub end: usize,
}

/// Returns `Twitter` when the text carries the residue of an embedded tweet.
/// Facebook embeds are not detected.
pub fn detect_embedding(sentence: &str) -> Option<Platform> {
    find_embedding(sentence).map(|m| m.platform)
}

/// Earliest embedding-rule match in the sentence.
pub fn find_embedding(sentence: &str) -> Option<EmbeddingMatch> {
    [&*ATTRIBUTION_LINE, &*MEDIA_LINK, &*STATUS_LINK]
        .iter()
        .filter_map(|re| re.find(sentence))
        .min_by_key(|m| (m.start(), std::cmp::Reverse(m.end())))
        .map(|m| EmbeddingMatch {
            platform: Platform::Twitter,
            start: sentence[..m.start()].chars().count(),
            end: sentence[..m.end()].chars().count(),
        })
}
