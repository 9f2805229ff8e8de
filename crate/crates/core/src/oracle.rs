//! Brute-force reference results for small corpora.
//!
//! Everything here enumerates n-gram occurrences with plain nested loops and
//! a `std` hash map. None of it goes through the engine or the method code.

use std::collections::{BTreeMap, HashMap};

use crate::corpus::{Corpus, Document, TermId, TermSequence};
use crate::error::{Error, Result};
use crate::methods::Sigma;

/// Maximum number of n-gram occurrences the oracle will enumerate.
pub const OCCURRENCE_GUARD: u64 = 1_000_000;

fn enumerated_occurrences(corpus: &Corpus, sigma: Sigma) -> u64 {
    let mut total = 0u64;
    for doc in &corpus.documents {
        for fragment in &doc.fragments {
            let n = fragment.len();
            for b in 0..n {
                total += (n - b).min(sigma.limit()) as u64;
            }
        }
    }
    total
}

fn guard(corpus: &Corpus, sigma: Sigma) -> Result<()> {
    let n = enumerated_occurrences(corpus, sigma);
    if n > OCCURRENCE_GUARD {
        return Err(Error::OracleGuard(n));
    }
    Ok(())
}

fn bounded(sigma: Sigma, len: usize) -> bool {
    match sigma {
        Sigma::Bounded(max) => len <= max,
        Sigma::Unbounded => true,
    }
}

/// Collection frequency of every n-gram of length ≤ σ, frequent or not.
pub fn oracle_all(corpus: &Corpus, sigma: Sigma) -> Result<HashMap<TermSequence, u64>> {
    guard(corpus, sigma)?;
    let mut counts: HashMap<TermSequence, u64> = HashMap::new();
    for doc in &corpus.documents {
        for fragment in &doc.fragments {
            let terms: &[TermId] = fragment;
            for b in 0..terms.len() {
                for e in b..terms.len() {
                    if !bounded(sigma, e - b + 1) {
                        break;
                    }
                    *counts.entry(TermSequence::from(&terms[b..=e])).or_insert(0) += 1;
                }
            }
        }
    }
    Ok(counts)
}

/// `{(s, cf(s)) : cf(s) ≥ τ, |s| ≤ σ}`.
pub fn oracle_cf(corpus: &Corpus, tau: u64, sigma: Sigma) -> Result<HashMap<TermSequence, u64>> {
    let mut counts = oracle_all(corpus, sigma)?;
    counts.retain(|_, cf| *cf >= tau);
    Ok(counts)
}

/// Reference sets for one (τ, σ).
#[derive(Clone, Debug, Default)]
pub struct OracleSets {
    /// n-grams with cf ≥ τ.
    pub frequent: HashMap<TermSequence, u64>,
    /// Occurring n-grams whose proper substrings are all frequent.
    pub non_prunable: HashMap<TermSequence, u64>,
    /// Frequent n-grams without a frequent proper supersequence.
    pub maximal: HashMap<TermSequence, u64>,
    /// Frequent n-grams without a proper supersequence of equal frequency.
    pub closed: HashMap<TermSequence, u64>,
}

/// Proper contiguous substrings of `s`, with repetitions.
fn proper_substrings(s: &[TermId]) -> Vec<&[TermId]> {
    let mut out = Vec::new();
    for i in 0..s.len() {
        for j in i + 1..=s.len() {
            if j - i < s.len() {
                out.push(&s[i..j]);
            }
        }
    }
    out
}

pub fn oracle_sets(corpus: &Corpus, tau: u64, sigma: Sigma) -> Result<OracleSets> {
    let all = oracle_all(corpus, sigma)?;
    let frequent: HashMap<TermSequence, u64> =
        all.iter().filter(|(_, cf)| **cf >= tau).map(|(s, cf)| (s.clone(), *cf)).collect();

    let is_frequent = |s: &[TermId]| frequent.contains_key(&TermSequence::from(s));
    let non_prunable = all
        .iter()
        .filter(|(s, _)| proper_substrings(s).into_iter().all(is_frequent))
        .map(|(s, cf)| (s.clone(), *cf))
        .collect();

    let mut not_maximal: HashMap<TermSequence, ()> = HashMap::new();
    let mut not_closed: HashMap<TermSequence, ()> = HashMap::new();
    for (t, cf_t) in &frequent {
        for u in proper_substrings(t) {
            let u = TermSequence::from(u);
            if frequent[&u] == *cf_t {
                not_closed.insert(u.clone(), ());
            }
            not_maximal.insert(u, ());
        }
    }
    let maximal =
        frequent.iter().filter(|(s, _)| !not_maximal.contains_key(*s)).map(|(s, cf)| (s.clone(), *cf)).collect();
    let closed =
        frequent.iter().filter(|(s, _)| !not_closed.contains_key(*s)).map(|(s, cf)| (s.clone(), *cf)).collect();
    Ok(OracleSets { frequent, non_prunable, maximal, closed })
}

/// Per-year occurrence counts of every frequent n-gram.
pub fn oracle_timeseries(corpus: &Corpus, tau: u64, sigma: Sigma) -> Result<HashMap<TermSequence, BTreeMap<u32, u64>>> {
    guard(corpus, sigma)?;
    let mut series: HashMap<TermSequence, BTreeMap<u32, u64>> = HashMap::new();
    for doc in &corpus.documents {
        let year = doc.year.ok_or(Error::UntimedDocument(doc.id))?;
        for fragment in &doc.fragments {
            for b in 0..fragment.len() {
                for e in b..fragment.len() {
                    if !bounded(sigma, e - b + 1) {
                        break;
                    }
                    let entry = series.entry(TermSequence::from(&fragment[b..=e])).or_default();
                    *entry.entry(year).or_insert(0) += 1;
                }
            }
        }
    }
    series.retain(|_, s| s.values().sum::<u64>() >= tau);
    Ok(series)
}

/// Cuts every fragment at terms with cf < τ.
pub fn oracle_split(corpus: &Corpus, tau: u64) -> Corpus {
    let mut unigram: HashMap<TermId, u64> = HashMap::new();
    for doc in &corpus.documents {
        for fragment in &doc.fragments {
            for t in fragment.iter() {
                *unigram.entry(*t).or_insert(0) += 1;
            }
        }
    }
    let documents = corpus
        .documents
        .iter()
        .map(|doc| {
            let mut fragments = Vec::new();
            for fragment in &doc.fragments {
                let mut run = Vec::new();
                for t in fragment.iter() {
                    if unigram[t] >= tau {
                        run.push(*t);
                    } else if !run.is_empty() {
                        fragments.push(TermSequence::new(std::mem::take(&mut run)));
                    }
                }
                if !run.is_empty() {
                    fragments.push(TermSequence::new(run));
                }
            }
            Document { id: doc.id, year: doc.year, fragments }
        })
        .collect();
    Corpus::new(documents)
}
