#![allow(dead_code)]

use std::collections::HashMap;

use ngram_core::corpus::{Corpus, Document, TermId, TermSequence};
use ngram_core::{Engine, EngineConfig};
use proptest::prelude::*;

pub const X: TermId = 0;
pub const B: TermId = 1;
pub const A: TermId = 2;

/// d1 = <a x b x x>, d2 = <b a x b x>, d3 = <x b a x b> with x = 0, b = 1, a = 2.
pub fn running_example() -> Corpus {
    Corpus::from_sequences([vec![A, X, B, X, X], vec![B, A, X, B, X], vec![X, B, A, X, B]])
}

pub fn expected_running_example() -> HashMap<TermSequence, u64> {
    to_map(&[(&[A], 3), (&[B], 5), (&[X], 7), (&[A, X], 3), (&[X, B], 4), (&[A, X, B], 3)])
}

pub fn to_map(items: &[(&[TermId], u64)]) -> HashMap<TermSequence, u64> {
    items.iter().map(|(s, c)| (TermSequence::from(*s), *c)).collect()
}

pub fn engine(workers: usize) -> Engine {
    Engine::new(EngineConfig { workers, ..Default::default() }).unwrap()
}

/// An engine with tiny map splits so that multi-task behaviour is exercised.
pub fn small_split_engine(workers: usize) -> Engine {
    Engine::new(EngineConfig { workers, split_size: 7, ..Default::default() }).unwrap()
}

pub fn as_map(stats: &[(TermSequence, u64)]) -> HashMap<TermSequence, u64> {
    let map: HashMap<TermSequence, u64> = stats.iter().cloned().collect();
    assert_eq!(map.len(), stats.len(), "duplicate n-grams in output");
    map
}

/// Random corpora: up to `docs` documents of up to three fragments over a
/// vocabulary of `vocab` terms, with years in 1987..=2007.
pub fn corpus_strategy(docs: usize, terms: usize, vocab: u32) -> impl Strategy<Value = Corpus> {
    let fragment = prop::collection::vec(0..vocab, 0..=terms / 3);
    let doc = (prop::collection::vec(fragment, 1..=3), 1987u32..=2007);
    prop::collection::vec(doc, 1..=docs).prop_map(|docs| {
        Corpus::new(
            docs.into_iter()
                .enumerate()
                .map(|(i, (fragments, year))| {
                    Document::new(i as u64, Some(year), fragments.into_iter().map(TermSequence::new).collect())
                })
                .collect(),
        )
    })
}
