//! Reference implementations, corpus generators and published counts used by
//! the acceptance checks.

use std::collections::BTreeSet;

use chrono::NaiveDate;
use proptest::prelude::*;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sourcescope::corpus::{Article, Corpus, MediaType};
use sourcescope::extractor::SourceKind;
use sourcescope::patterns::{contains_quote_signs, detect_embedding, Anchor, PatternSet, Platform};
use sourcescope::segmenter::sentences;

/// Raw counts from the published evaluation and usage tables.
pub mod published {
    /// (gold, predicted, correct) per kind: Quotation, Paraphrase, Embedding.
    pub const EVAL_COUNTS: [(u64, u64, u64); 3] = [(60, 49, 44), (63, 53, 50), (270, 270, 270)];

    pub struct MediaCounts {
        pub articles: u64,
        pub with_source: u64,
        pub twitter_articles: u64,
        pub facebook_articles: u64,
        /// Quotation, Paraphrase, Embedding.
        pub twitter: [u64; 3],
        pub facebook: [u64; 3],
        pub direct_quotes: u64,
    }

    pub const MAINSTREAM: MediaCounts = MediaCounts {
        articles: 29656,
        with_source: 1982,
        twitter_articles: 1654,
        facebook_articles: 377,
        twitter: [1065, 866, 1843],
        facebook: [228, 205, 0],
        direct_quotes: 201924,
    };

    pub const UNRELIABLE: MediaCounts = MediaCounts {
        articles: 29700,
        with_source: 3448,
        twitter_articles: 3170,
        facebook_articles: 324,
        twitter: [1137, 1130, 9814],
        facebook: [178, 177, 0],
        direct_quotes: 185182,
    };

    /// (topic, articles, articles with a source) for the top-5 topics per media type.
    pub const TOP_TOPICS_MAINSTREAM: [(&str, u64, u64); 5] = [
        ("Arts & Entertainment", 5943, 491),
        ("Sensitive Subjects", 3391, 300),
        ("Law & Government", 2793, 112),
        ("Sports", 2592, 213),
        ("Politics", 2389, 369),
    ];

    pub const TOP_TOPICS_UNRELIABLE: [(&str, u64, u64); 5] = [
        ("Politics", 7104, 1711),
        ("Sensitive Subjects", 3790, 484),
        ("People & Society", 2889, 171),
        ("Law & Government", 2835, 228),
        ("Health", 2546, 51),
    ];

    /// Per topic: (articles with source, [Q, P, E]) for mainstream, then unreliable.
    pub type TopicKinds = (&'static str, (u64, [u64; 3]), (u64, [u64; 3]));

    pub const TOPIC_KINDS: [TopicKinds; 7] = [
        ("Politics", (369, [377, 238, 175]), (1711, [665, 648, 5495])),
        ("Arts & Entertainment", (491, [303, 241, 585]), (307, [197, 116, 1026])),
        ("Sensitive Subjects", (300, [187, 165, 217]), (484, [217, 172, 1185])),
        ("Law & Government", (112, [69, 73, 56]), (228, [75, 74, 516])),
        ("Sports", (213, [97, 380, 92]), (70, [30, 28, 118])),
        ("People & Society", (68, [22, 38, 61]), (171, [64, 66, 413])),
        ("Health", (25, [11, 9, 8]), (51, [21, 26, 66])),
    ];

    /// (year, articles, articles with a source) where both are published.
    pub const TREND_ENDPOINTS: [(i32, u64, u64); 2] = [(2013, 7176, 276), (2017, 14176, 2134)];
}

const FRAGMENTS: &[&str] = &[
    "The senator",
    "she tweeted",
    "He Tweeted",
    "took to Twitter",
    "TOOK TO  TWITTER",
    "posted on Facebook",
    "wrote on\nFacebook",
    "in a Facebook post",
    "the tweet read in part",
    "retweets",
    "tweetstorms",
    "the post office",
    "posted a photo on Facebook",
    "Mr.",
    "Dr. J. Smith",
    "the U.S. Senate",
    "at 9 a.m. Monday",
    "\"we won\"",
    "\u{201C}so sad\u{201D}",
    "'maybe'",
    "don't",
    "\u{00AB}oui\u{00BB}",
    "pic.twitter.com/AbC9",
    "\u{2014} Jane Roe (@janeroe) May 1, 2016",
    "https://twitter.com/jack/status/20",
    "Facebook shares fell",
    "tweetedly",
    "caf\u{e9}",
    "and",
    "then",
    "about the vote",
];

const ENDINGS: &[&str] = &[". ", "! ", "? ", ", ", " ", "\n", "\n\n", "... ", ".\" ", "; "];

/// Short texts mixing citation phrases, quotes, embeds and segmentation traps.
pub fn text_strategy() -> impl Strategy<Value = String> {
    prop::collection::vec(
        (prop::sample::select(FRAGMENTS), prop::sample::select(ENDINGS)),
        0..14,
    )
    .prop_map(|parts| parts.into_iter().map(|(f, e)| format!("{f}{e}")).collect())
}

pub fn corpus_strategy(max_articles: usize) -> impl Strategy<Value = Corpus> {
    prop::collection::vec((any::<bool>(), 2013i32..=2017, text_strategy()), 0..=max_articles).prop_map(
        |items| {
            let articles = items
                .into_iter()
                .enumerate()
                .map(|(i, (mainstream, year, body))| {
                    article(i, if mainstream { MediaType::Mainstream } else { MediaType::Unreliable }, year, None, body)
                })
                .collect();
            Corpus::from_articles(articles, "generated").expect("generated ids are unique")
        },
    )
}

fn article(i: usize, media_type: MediaType, year: i32, topic: Option<&str>, body: String) -> Article {
    Article {
        id: format!("s{i:06}"),
        outlet: format!("Outlet {}", i % 17),
        media_type,
        published_at: NaiveDate::from_ymd_opt(year, 1 + (i % 12) as u32, 1 + (i % 28) as u32)
            .expect("valid date"),
        headline: format!("Headline {i}"),
        body,
        topic: topic.map(String::from),
        url: None,
    }
}

/// Tries every pattern at every start position of the sentence.
pub fn naive_platform_hits(sentence: &str, set: &PatternSet) -> BTreeSet<Platform> {
    let chars: Vec<char> = sentence.chars().collect();
    let mut found = BTreeSet::new();
    for p in set.patterns() {
        let phrase: Vec<char> = p.phrase.chars().collect();
        'start: for s in 0..chars.len() {
            if s > 0 && chars[s - 1].is_alphanumeric() {
                continue;
            }
            let mut i = s;
            for &pc in &phrase {
                if pc == ' ' {
                    if i >= chars.len() || !chars[i].is_whitespace() {
                        continue 'start;
                    }
                    while i < chars.len() && chars[i].is_whitespace() {
                        i += 1;
                    }
                } else {
                    if i >= chars.len() || chars[i].is_whitespace() {
                        continue 'start;
                    }
                    if chars[i].to_lowercase().next() != Some(pc) {
                        continue 'start;
                    }
                    i += 1;
                }
            }
            if p.anchor == Anchor::Both && i < chars.len() && chars[i].is_alphanumeric() {
                continue;
            }
            found.insert(p.platform);
            break;
        }
    }
    found
}

pub type MentionKey = (String, usize, Platform, SourceKind);

/// Sentence-by-sentence reference for the classification cascade.
pub fn naive_extract(corpus: &Corpus, set: &PatternSet) -> BTreeSet<MentionKey> {
    let mut out = BTreeSet::new();
    for a in corpus {
        for (span, text) in sentences(&a.body) {
            let embedded = detect_embedding(text).is_some();
            let hits = naive_platform_hits(text, set);
            for platform in Platform::ALL {
                let kind = if platform == Platform::Twitter && embedded {
                    SourceKind::Embedding
                } else if hits.contains(&platform) {
                    if contains_quote_signs(text) {
                        SourceKind::Quotation
                    } else {
                        SourceKind::Paraphrase
                    }
                } else {
                    continue;
                };
                out.insert((a.id.clone(), span.index, platform, kind));
            }
        }
    }
    out
}

const FILLER: &[&str] = &[
    "Officials said the plan would be reviewed next month.",
    "The company reported higher revenue in the third quarter.",
    "Residents gathered outside the courthouse on Tuesday.",
    "Mr. Alvarez, who joined the firm in 2009, declined to comment.",
    "The U.S. Department of Labor released new figures at 8:30 a.m. Friday.",
    "\u{201C}We are still assessing the damage,\u{201D} the fire chief said.",
    "Analysts expect the decision to be appealed.",
    "Dr. Kim said the results were \"encouraging but preliminary.\"",
    "Traffic on the bridge was diverted for several hours.",
    "The measure passed by a vote of 52 to 48.",
    "Critics argued the proposal did not go far enough.",
    "Attendance at the event was lower than in previous years.",
    "It was not immediately clear when the road would reopen.",
    "The agency's report runs to more than 300 pages.",
];

const CITING: &[&str] = &[
    "The senator tweeted that the bill would not pass.",
    "\"This is a disgrace,\" she tweeted on Monday.",
    "The mayor posted on Facebook that the shelter was full.",
    "\u{201C}We are grateful,\u{201D} the family wrote in a Facebook post.",
    "He took to Twitter to criticize the ruling.",
    "\u{2014} Jane Roe (@janeroe) March 3, 2017",
    "Watch the video pic.twitter.com/AbCdE12345",
    "In a series of tweets, the governor defended the budget.",
];

/// Deterministic corpus of `n` articles with bodies of at least
/// `min_body_bytes`; about one article in eleven cites social media.
pub fn synthetic_corpus(n: usize, min_body_bytes: usize, seed: u64) -> Corpus {
    const TOPICS: [Option<&str>; 8] = [
        Some("Politics"),
        Some("Sports"),
        Some("Health"),
        Some("Law & Government"),
        Some("Arts & Entertainment"),
        Some("People & Society"),
        Some("Sensitive Subjects"),
        None,
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let articles = (0..n)
        .map(|i| {
            let mut body = String::with_capacity(min_body_bytes + 200);
            let cites = rng.random_ratio(1, 11);
            while body.len() < min_body_bytes {
                let pool = if cites && rng.random_ratio(1, 6) { CITING } else { FILLER };
                body.push_str(pool.choose(&mut rng).expect("non-empty pool"));
                body.push_str(if rng.random_ratio(1, 5) { "\n\n" } else { " " });
            }
            let media = if i % 2 == 0 { MediaType::Mainstream } else { MediaType::Unreliable };
            let year = 2013 + (i % 5) as i32;
            article(i, media, year, *TOPICS.choose(&mut rng).expect("topics"), body)
        })
        .collect();
    Corpus::from_articles(articles, "synthetic").expect("synthetic ids are unique")
}
