//! Integer-sequence corpus representation and ingestion.

pub mod codec;
mod dictionary;
pub mod io;
mod text;

use std::borrow::Borrow;
use std::fmt;
use std::ops::Deref;

pub use dictionary::Dictionary;
pub use text::tokenize_and_split;

use crate::error::Result;

pub type TermId = u32;

/// An immutable sequence of term ids: a document fragment, an n-gram or a
/// suffix.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TermSequence(Vec<TermId>);

impl TermSequence {
    pub fn new(terms: Vec<TermId>) -> Self {
        TermSequence(terms)
    }

    pub fn as_slice(&self) -> &[TermId] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<TermId> {
        self.0
    }

    /// `self` followed by `other`.
    pub fn concat(&self, other: &[TermId]) -> TermSequence {
        let mut terms = Vec::with_capacity(self.len() + other.len());
        terms.extend_from_slice(&self.0);
        terms.extend_from_slice(other);
        TermSequence(terms)
    }

    pub fn reversed(&self) -> TermSequence {
        TermSequence(self.0.iter().rev().copied().collect())
    }
}

impl Deref for TermSequence {
    type Target = [TermId];

    fn deref(&self) -> &[TermId] {
        &self.0
    }
}

impl Borrow<[TermId]> for TermSequence {
    fn borrow(&self) -> &[TermId] {
        &self.0
    }
}

impl From<Vec<TermId>> for TermSequence {
    fn from(terms: Vec<TermId>) -> Self {
        TermSequence(terms)
    }
}

impl From<&[TermId]> for TermSequence {
    fn from(terms: &[TermId]) -> Self {
        TermSequence(terms.to_vec())
    }
}

impl<const N: usize> From<[TermId; N]> for TermSequence {
    fn from(terms: [TermId; N]) -> Self {
        TermSequence(terms.to_vec())
    }
}

impl fmt::Debug for TermSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<")?;
        for (i, t) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{t}")?;
        }
        write!(f, ">")
    }
}

/// A document: its sentence fragments never share an n-gram.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Document {
    pub id: u64,
    pub year: Option<u32>,
    pub fragments: Vec<TermSequence>,
}

impl Document {
    /// A document with one fragment per non-empty entry of `fragments`.
    pub fn new(id: u64, year: Option<u32>, fragments: Vec<TermSequence>) -> Self {
        let fragments = fragments.into_iter().filter(|f| !f.is_empty()).collect();
        Document { id, year, fragments }
    }

    pub fn occurrences(&self) -> usize {
        self.fragments.iter().map(|f| f.len()).sum()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Corpus {
    pub documents: Vec<Document>,
}

impl Corpus {
    pub fn new(documents: Vec<Document>) -> Self {
        Corpus { documents }
    }

    /// Builds a corpus of single-fragment documents with ids 0, 1, ...
    pub fn from_sequences<I, S>(docs: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<TermSequence>,
    {
        let documents =
            docs.into_iter().enumerate().map(|(i, s)| Document::new(i as u64, None, vec![s.into()])).collect();
        Corpus { documents }
    }

    pub fn occurrences(&self) -> usize {
        self.documents.iter().map(Document::occurrences).sum()
    }

    pub fn fragments(&self) -> impl Iterator<Item = &TermSequence> {
        self.documents.iter().flat_map(|d| d.fragments.iter())
    }

    /// Contiguous document ranges of roughly `target` term occurrences each;
    /// one map task per range.
    pub fn splits(&self, target: usize) -> Vec<&[Document]> {
        let target = target.max(1);
        let mut splits = Vec::new();
        let mut start = 0;
        let mut size = 0;
        for (i, doc) in self.documents.iter().enumerate() {
            size += doc.occurrences();
            if size >= target {
                splits.push(&self.documents[start..=i]);
                start = i + 1;
                size = 0;
            }
        }
        if start < self.documents.len() {
            splits.push(&self.documents[start..]);
        }
        splits
    }

    /// Cuts every fragment at terms outside `frequent`.
    pub fn split(&self, frequent: &FrequentTerms) -> Corpus {
        let documents = self
            .documents
            .iter()
            .map(|d| Document {
                id: d.id,
                year: d.year,
                fragments: d.fragments.iter().flat_map(|f| split_at_infrequent(f, frequent)).collect(),
            })
            .collect();
        Corpus { documents }
    }
}

/// Membership set of term ids whose collection frequency reaches a threshold.
#[derive(Clone, Debug, Default)]
pub struct FrequentTerms {
    bits: Vec<bool>,
}

impl FrequentTerms {
    pub fn from_counts<I>(counts: I, tau: u64) -> Self
    where
        I: IntoIterator<Item = (TermId, u64)>,
    {
        let mut bits = Vec::new();
        for (term, cf) in counts {
            if cf >= tau {
                let i = term as usize;
                if i >= bits.len() {
                    bits.resize(i + 1, false);
                }
                bits[i] = true;
            }
        }
        FrequentTerms { bits }
    }

    #[inline]
    pub fn contains(&self, term: TermId) -> bool {
        self.bits.get(term as usize).copied().unwrap_or(false)
    }

    pub fn len(&self) -> usize {
        self.bits.iter().filter(|b| **b).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Maximal runs of frequent terms; infrequent terms act as cut points.
pub fn split_at_infrequent(fragment: &[TermId], frequent: &FrequentTerms) -> Vec<TermSequence> {
    fragment.split(|&t| !frequent.contains(t)).filter(|run| !run.is_empty()).map(TermSequence::from).collect()
}

/// A raw text document handed to [`ingest`].
#[derive(Clone, Debug)]
pub struct RawDocument {
    pub text: String,
    pub year: Option<u32>,
}

/// Corpus characteristics reported after ingestion.
#[derive(Clone, Debug, PartialEq)]
pub struct IngestReport {
    pub documents: usize,
    pub term_occurrences: u64,
    pub distinct_terms: usize,
    pub sentences: u64,
    pub sentence_length_mean: f64,
    pub sentence_length_stddev: f64,
}

impl fmt::Display for IngestReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<26}{:>16}", "# documents", self.documents)?;
        writeln!(f, "{:<26}{:>16}", "# term occurrences", self.term_occurrences)?;
        writeln!(f, "{:<26}{:>16}", "# distinct terms", self.distinct_terms)?;
        writeln!(f, "{:<26}{:>16}", "# sentences", self.sentences)?;
        writeln!(f, "{:<26}{:>16.2}", "sentence length (mean)", self.sentence_length_mean)?;
        write!(f, "{:<26}{:>16.2}", "sentence length (stddev)", self.sentence_length_stddev)
    }
}

/// Tokenizes raw documents, builds the frequency-ranked dictionary and
/// encodes every sentence as a fragment. Document ids follow input order.
pub fn ingest(raw: &[RawDocument]) -> Result<(Dictionary, Corpus, IngestReport)> {
    let tokenized: Vec<Vec<Vec<String>>> = raw.iter().map(|d| tokenize_and_split(&d.text)).collect();
    let dictionary =
        Dictionary::build(tokenized.iter().flat_map(|doc| doc.iter().flat_map(|s| s.iter().map(String::as_str))))?;

    let mut sentences = 0u64;
    let mut sum = 0f64;
    let mut sum_sq = 0f64;
    let documents: Vec<Document> = tokenized
        .iter()
        .zip(raw)
        .enumerate()
        .map(|(i, (doc, r))| {
            let fragments = doc
                .iter()
                .map(|sentence| {
                    sentences += 1;
                    let n = sentence.len() as f64;
                    sum += n;
                    sum_sq += n * n;
                    dictionary.encode(sentence.iter().map(String::as_str))
                })
                .collect();
            Document::new(i as u64, r.year, fragments)
        })
        .collect();

    let corpus = Corpus::new(documents);
    let (mean, stddev) = if sentences == 0 {
        (0.0, 0.0)
    } else {
        let mean = sum / sentences as f64;
        (mean, (sum_sq / sentences as f64 - mean * mean).max(0.0).sqrt())
    };
    let report = IngestReport {
        documents: corpus.documents.len(),
        term_occurrences: corpus.occurrences() as u64,
        distinct_terms: dictionary.len(),
        sentences,
        sentence_length_mean: mean,
        sentence_length_stddev: stddev,
    };
    Ok((dictionary, corpus, report))
}
