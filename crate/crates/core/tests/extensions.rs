mod common;

use std::collections::{BTreeMap, HashMap};

use common::*;
use ngram_core::corpus::{Corpus, TermSequence};
use ngram_core::extensions::{run_suffix_sigma_filtered, run_suffix_sigma_timeseries, FilterMode};
use ngram_core::methods::{self, Method, RunParams, Sigma};
use ngram_core::oracle::{oracle_sets, oracle_timeseries};
use ngram_core::Error;
use proptest::prelude::*;

fn dated(corpus: Corpus, years: &[u32]) -> Corpus {
    let mut corpus = corpus;
    for (doc, year) in corpus.documents.iter_mut().zip(years) {
        doc.year = Some(*year);
    }
    corpus
}

#[test]
fn maximal_and_closed_on_running_example() {
    for reducers in [1, 2, 3] {
        let params = RunParams { reducers, ..RunParams::new(3, Sigma::Bounded(3)) };
        let maximal = run_suffix_sigma_filtered(&engine(2), &running_example(), &params, FilterMode::Maximal).unwrap();
        assert_eq!(as_map(&maximal.stats), to_map(&[(&[A, X, B], 3)]));
        let closed = run_suffix_sigma_filtered(&engine(2), &running_example(), &params, FilterMode::Closed).unwrap();
        assert_eq!(as_map(&closed.stats), to_map(&[(&[A, X, B], 3), (&[X, B], 4), (&[B], 5), (&[X], 7)]));
        assert_eq!(closed.jobs.len(), 2);
        assert_eq!(closed.jobs[1].job, "post-filter");
    }
}

#[test]
fn timeseries_on_running_example() {
    let corpus = dated(running_example(), &[1990, 1990, 1991]);
    let report = run_suffix_sigma_timeseries(&engine(1), &corpus, &RunParams::new(3, Sigma::Bounded(3))).unwrap();
    let axb = report.stats.iter().find(|(g, _)| g.as_slice() == [A, X, B]).unwrap();
    assert_eq!(axb.1.as_map(), &BTreeMap::from([(1990, 2), (1991, 1)]));
    assert_eq!(report.stats.len(), 6);
}

#[test]
fn untimed_documents_are_rejected() {
    let corpus = dated(running_example(), &[1990, 1990]);
    let err = run_suffix_sigma_timeseries(&engine(1), &corpus, &RunParams::new(3, Sigma::Bounded(3))).unwrap_err();
    assert!(matches!(err, Error::UntimedDocument(2)));
}

#[test]
fn single_year_series_equal_counts() {
    let corpus = dated(running_example(), &[2000, 2000, 2000]);
    let params = RunParams::new(2, Sigma::Unbounded);
    let series = run_suffix_sigma_timeseries(&engine(1), &corpus, &params).unwrap();
    let plain = as_map(&methods::run(&engine(1), &corpus, Method::SuffixSigma, &params).unwrap().stats);
    assert_eq!(series.stats.len(), plain.len());
    for (gram, s) in &series.stats {
        assert_eq!(s.as_map().keys().collect::<Vec<_>>(), vec![&2000]);
        assert_eq!(s.get(2000), plain[gram]);
    }
}

/// Rebuilds the cf of every frequent n-gram from the closed set: the largest
/// count among closed supersequences.
fn reconstruct(closed: &HashMap<TermSequence, u64>, gram: &[u32]) -> Option<u64> {
    closed.iter().filter(|(c, _)| c.windows(gram.len()).any(|w| w == gram)).map(|(_, cf)| *cf).max()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn two_pass_filter_matches_oracle(
        corpus in corpus_strategy(10, 30, 5),
        tau in 1u64..4,
        sigma in prop::sample::select(vec![Sigma::Bounded(2), Sigma::Bounded(3), Sigma::Bounded(5), Sigma::Unbounded]),
        reducers in 1usize..4,
        combiner in any::<bool>(),
    ) {
        let sets = oracle_sets(&corpus, tau, sigma).unwrap();
        let params = RunParams { reducers, combiner, ..RunParams::new(tau, sigma) };
        let engine = small_split_engine(2);
        let maximal = as_map(&run_suffix_sigma_filtered(&engine, &corpus, &params, FilterMode::Maximal).unwrap().stats);
        let closed = as_map(&run_suffix_sigma_filtered(&engine, &corpus, &params, FilterMode::Closed).unwrap().stats);
        prop_assert_eq!(&maximal, &sets.maximal);
        prop_assert_eq!(&closed, &sets.closed);
        prop_assert!(maximal.keys().all(|g| closed.contains_key(g)));
        for (gram, cf) in &sets.frequent {
            prop_assert_eq!(reconstruct(&closed, gram), Some(*cf));
        }
    }

    #[test]
    fn timeseries_conserve_counts(corpus in corpus_strategy(10, 30, 5), tau in 1u64..4, sigma in 1usize..5, combiner in any::<bool>()) {
        let params = RunParams { combiner, reducers: 2, ..RunParams::new(tau, Sigma::Bounded(sigma)) };
        let engine = small_split_engine(2);
        let series = run_suffix_sigma_timeseries(&engine, &corpus, &params).unwrap();
        let plain = as_map(&methods::run(&engine, &corpus, Method::SuffixSigma, &params).unwrap().stats);
        let oracle = oracle_timeseries(&corpus, tau, Sigma::Bounded(sigma)).unwrap();
        prop_assert_eq!(series.stats.len(), plain.len());
        for (gram, s) in &series.stats {
            prop_assert_eq!(s.as_map().values().sum::<u64>(), plain[gram]);
            prop_assert!(s.as_map().values().all(|&c| c > 0));
            prop_assert_eq!(s.as_map(), &oracle[gram]);
        }
    }
}
