//! Synthetic corpora: small random ones for equivalence testing and large
//! Zipf-distributed text for load tests.

use std::ops::RangeInclusive;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rand_distr::{Distribution, Normal, Zipf};

use crate::corpus::{ingest, Corpus, Dictionary, RawDocument};
use crate::error::{Error, Result};

/// Shape of a small random corpus.
#[derive(Clone, Debug)]
pub struct RandomCorpusSpec {
    pub max_docs: usize,
    pub max_terms_per_doc: usize,
    pub vocabulary: usize,
    /// Chance that a sentence ends after a token.
    pub sentence_break: f64,
    /// Year range assigned uniformly per document.
    pub years: Option<RangeInclusive<u32>>,
}

impl Default for RandomCorpusSpec {
    fn default() -> Self {
        RandomCorpusSpec { max_docs: 30, max_terms_per_doc: 40, vocabulary: 12, sentence_break: 0.1, years: None }
    }
}

/// Random raw documents over the words `w0`, `w1`, ... with at least one
/// token overall. Low word indices are drawn more often so that repeats,
/// and hence frequent n-grams, are common.
pub fn random_raw<R: Rng>(rng: &mut R, spec: &RandomCorpusSpec) -> Vec<RawDocument> {
    let vocabulary = spec.vocabulary.max(1);
    let docs = rng.random_range(1..=spec.max_docs.max(1));
    let mut raw: Vec<RawDocument> = (0..docs)
        .map(|_| {
            let len = rng.random_range(0..=spec.max_terms_per_doc);
            let mut text = String::new();
            for _ in 0..len {
                let a = rng.random_range(0..vocabulary);
                let b = rng.random_range(0..vocabulary);
                text.push_str(&format!("w{} ", a.min(b)));
                if rng.random_bool(spec.sentence_break) {
                    text.push_str(". ");
                }
            }
            let year = spec.years.clone().map(|y| rng.random_range(y));
            RawDocument { text, year }
        })
        .collect();
    if raw.iter().all(|d| d.text.trim_matches(|c: char| !c.is_alphanumeric()).is_empty()) {
        raw[0].text.push_str("w0");
    }
    raw
}

/// A random corpus with its dictionary, built through [`ingest`].
pub fn random_corpus<R: Rng>(rng: &mut R, spec: &RandomCorpusSpec) -> (Dictionary, Corpus) {
    let (dictionary, corpus, _) = ingest(&random_raw(rng, spec)).expect("random corpora are never empty");
    (dictionary, corpus)
}

/// Shape of a large Zipf-distributed text corpus.
#[derive(Clone, Debug)]
pub struct ZipfSpec {
    /// Approximate total size of the generated text.
    pub target_bytes: usize,
    pub vocabulary: usize,
    pub exponent: f64,
    pub sentence_length_mean: f64,
    pub sentence_length_stddev: f64,
    pub sentences_per_doc: RangeInclusive<usize>,
    pub seed: u64,
}

impl Default for ZipfSpec {
    fn default() -> Self {
        ZipfSpec {
            target_bytes: 100 << 20,
            vocabulary: 100_000,
            exponent: 1.0,
            sentence_length_mean: 19.0,
            sentence_length_stddev: 9.0,
            sentences_per_doc: 10..=40,
            seed: 42,
        }
    }
}

/// Surface form of the word with Zipf rank `rank` (0-based): its base-26
/// digits as letters, padded to five or six letters by rank parity.
pub fn zipf_word(rank: usize, out: &mut String) {
    let width = 5 + rank % 2;
    let mut letters = [b'a'; 8];
    let mut r = rank;
    let mut i = letters.len();
    while r > 0 {
        i -= 1;
        letters[i] = b'a' + (r % 26) as u8;
        r /= 26;
    }
    let start = i.min(letters.len() - width);
    out.push_str(std::str::from_utf8(&letters[start..]).expect("ascii"));
}

/// Documents of space-separated words with ranks drawn from a Zipf
/// distribution, one sentence terminator per sentence.
pub fn zipf_documents(spec: &ZipfSpec) -> Result<Vec<RawDocument>> {
    if spec.vocabulary == 0 || spec.vocabulary > 26usize.pow(5) {
        return Err(Error::InvalidParameter(format!("unsupported vocabulary size {}", spec.vocabulary)));
    }
    let zipf =
        Zipf::new(spec.vocabulary as f64, spec.exponent).map_err(|e| Error::InvalidParameter(format!("zipf: {e}")))?;
    let lengths = Normal::new(spec.sentence_length_mean, spec.sentence_length_stddev)
        .map_err(|e| Error::InvalidParameter(format!("sentence lengths: {e}")))?;
    let mut rng = StdRng::seed_from_u64(spec.seed);
    let mut docs = Vec::new();
    let mut bytes = 0;
    while bytes < spec.target_bytes {
        let sentences = rng.random_range(spec.sentences_per_doc.clone());
        let mut text = String::new();
        for _ in 0..sentences {
            let len = lengths.sample(&mut rng).round().clamp(1.0, 200.0) as usize;
            for i in 0..len {
                if i > 0 {
                    text.push(' ');
                }
                zipf_word(zipf.sample(&mut rng) as usize - 1, &mut text);
            }
            text.push_str(".\n");
        }
        bytes += text.len();
        docs.push(RawDocument { text, year: None });
    }
    Ok(docs)
}
