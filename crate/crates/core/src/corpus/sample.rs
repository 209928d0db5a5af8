use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{Article, Corpus};

/// Keywords used to build the pattern-curation sample.
pub const DEFAULT_SAMPLE_KEYWORDS: [&str; 4] = ["facebook", "twitter", "post", "tweet"];

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SampleError {
    #[error("at least one keyword is required")]
    NoKeywords,
    #[error("sample size {n} is smaller than the number of keywords ({keywords})")]
    TooSmall { n: usize, keywords: usize },
}

/// Draws up to `n` articles spread as evenly as possible over keyword strata.
///
/// An article belongs to the stratum of the first keyword (in argument order)
/// its body contains, case-insensitively. Each stratum gets `n / k` slots with
/// the remainder going to the leading strata; slots a stratum cannot fill are
/// handed round-robin to strata that still have unsampled articles. The result
/// keeps corpus order and depends only on the inputs and `seed`.
pub fn stratified_sample<S: AsRef<str>>(
    corpus: &Corpus,
    keywords: &[S],
    n: usize,
    seed: u64,
) -> Result<Corpus, SampleError> {
    if keywords.is_empty() {
        return Err(SampleError::NoKeywords);
    }
    if n < keywords.len() {
        return Err(SampleError::TooSmall {
            n,
            keywords: keywords.len(),
        });
    }
    let needles: Vec<String> = keywords.iter().map(|k| k.as_ref().to_lowercase()).collect();

    let strata = assign_strata(corpus, &needles);
    let sizes: Vec<usize> = strata.iter().map(Vec::len).collect();
    let quotas = allocate_quotas(&sizes, n);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut chosen: Vec<usize> = Vec::new();
    for (members, &quota) in strata.iter().zip(&quotas) {
        for pick in rand::seq::index::sample(&mut rng, members.len(), quota) {
            chosen.push(members[pick]);
        }
    }
    chosen.sort_unstable();

    let articles: Vec<Article> = chosen
        .into_iter()
        .map(|i| corpus.articles()[i].clone())
        .collect();
    Ok(Corpus::from_articles(articles, corpus.source_path())
        .expect("subset of a valid corpus has unique ids"))
}

fn assign_strata(corpus: &Corpus, needles: &[String]) -> Vec<Vec<usize>> {
    let mut strata: Vec<Vec<usize>> = vec![Vec::new(); needles.len()];
    for (i, article) in corpus.iter().enumerate() {
        let body = article.body.to_lowercase();
        if let Some(s) = needles.iter().position(|k| body.contains(k.as_str())) {
            strata[s].push(i);
        }
    }
    strata
}

fn allocate_quotas(sizes: &[usize], n: usize) -> Vec<usize> {
    let k = sizes.len();
    let mut quotas: Vec<usize> = (0..k).map(|i| n / k + usize::from(i < n % k)).collect();

    let mut spare = 0;
    for (quota, &size) in quotas.iter_mut().zip(sizes) {
        if *quota > size {
            spare += *quota - size;
            *quota = size;
        }
    }
    while spare > 0 {
        let mut progressed = false;
        for (quota, &size) in quotas.iter_mut().zip(sizes) {
            if spare == 0 {
                break;
            }
            if *quota < size {
                *quota += 1;
                spare -= 1;
                progressed = true;
            }
        }
        if !progressed {
            break;
        }
    }
    quotas
}
