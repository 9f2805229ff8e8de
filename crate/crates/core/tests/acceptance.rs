//! Acceptance criteria, one PASS/FAIL line each. Exits non-zero on any failure.
//!
//! `NGRAM_ACCEPTANCE_BYTES` overrides the size of the synthetic load-test
//! corpus (default 100 MiB).

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::*;
use ngram_core::corpus::io::render_tsv;
use ngram_core::corpus::{ingest, Corpus, Dictionary, TermId};
use ngram_core::engine::ShuffleStorage;
use ngram_core::extensions::{run_suffix_sigma_filtered, run_suffix_sigma_timeseries, FilterMode};
use ngram_core::methods::suffix::ReducerStacks;
use ngram_core::methods::{self, Method, MethodReport, RunParams, Sigma};
use ngram_core::oracle::{oracle_cf, oracle_sets, oracle_split};
use ngram_core::synth::{random_corpus, zipf_documents, RandomCorpusSpec, ZipfSpec};
use ngram_core::{Engine, EngineConfig};
use rand::rngs::StdRng;
use rand::SeedableRng;

type Outcome = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

const CORPORA: usize = 200;
const TAUS: [u64; 4] = [1, 2, 3, 5];
const SIGMAS: [Sigma; 5] =
    [Sigma::Bounded(1), Sigma::Bounded(2), Sigma::Bounded(3), Sigma::Bounded(5), Sigma::Unbounded];

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn check<T, E: std::fmt::Display>(r: std::result::Result<T, E>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

/// The randomized suite: seeded corpora of at most 30 documents, 40 terms per
/// document and 12 distinct terms, with years in 1987..=2007.
fn random_suite() -> Vec<(Dictionary, Corpus)> {
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let spec = RandomCorpusSpec { years: Some(1987..=2007), ..Default::default() };
    (0..CORPORA).map(|_| random_corpus(&mut rng, &spec)).collect()
}

fn grid() -> impl Iterator<Item = (u64, Sigma)> {
    TAUS.into_iter().flat_map(|t| SIGMAS.into_iter().map(move |s| (t, s)))
}

fn golden() -> Outcome {
    let start = Instant::now();
    let corpus = running_example();
    let engine = engine(2);
    let base = RunParams::new(3, Sigma::Bounded(3));
    let mut runs: Vec<(String, Method, RunParams)> =
        vec![("naive".into(), Method::Naive, base.clone()), ("apriori-scan".into(), Method::AprioriScan, base.clone())];
    for k in [2, 3] {
        runs.push((format!("apriori-index K={k}"), Method::AprioriIndex, RunParams { k, ..base.clone() }));
    }
    for reducers in [1, 2, 3] {
        runs.push((format!("suffix-sigma R={reducers}"), Method::SuffixSigma, RunParams { reducers, ..base.clone() }));
    }
    for (label, method, params) in &runs {
        let report = check(methods::run(&engine, &corpus, *method, params))?;
        ensure!(as_map(&report.stats) == expected_running_example(), "{label}: {:?}", report.stats);
    }
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(1), "took {elapsed:?}");
    Ok(format!("{} runs in {elapsed:.2?}", runs.len()))
}

fn oracle_equivalence(suite: &[(Dictionary, Corpus)]) -> Outcome {
    let start = Instant::now();
    let engine = small_split_engine(2);
    let mut runs = 0;
    for (i, (_, corpus)) in suite.iter().enumerate() {
        for (tau, sigma) in grid() {
            let expected = check(oracle_cf(corpus, tau, sigma))?;
            let base = RunParams { reducers: 1 + i % 3, combiner: i % 2 == 0, ..RunParams::new(tau, sigma) };
            let configs = [
                (Method::Naive, base.clone()),
                (Method::AprioriScan, base.clone()),
                (Method::AprioriIndex, RunParams { k: 2, ..base.clone() }),
                (Method::AprioriIndex, RunParams { k: 3, ..base.clone() }),
                (Method::SuffixSigma, base.clone()),
            ];
            for (method, params) in &configs {
                let report = check(methods::run(&engine, corpus, *method, params))?;
                ensure!(
                    as_map(&report.stats) == expected,
                    "corpus {i}, {method} K={} tau={tau} sigma={sigma}: output differs from oracle",
                    params.k
                );
                runs += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(120), "took {elapsed:?}");
    Ok(format!("{CORPORA} corpora, {runs} runs in {elapsed:.1?}"))
}

fn counter_laws(suite: &[(Dictionary, Corpus)]) -> Outcome {
    let engine = small_split_engine(2);
    let mut checks = 0;
    for (i, (_, corpus)) in suite.iter().enumerate() {
        for (tau, sigma) in grid() {
            let k = 2 + i % 2;
            let p = RunParams { reducers: 3, k, combiner: true, ..RunParams::new(tau, sigma) };
            let split = oracle_split(corpus, tau);
            let all = check(oracle_cf(&split, 1, sigma))?;
            let sets = check(oracle_sets(&split, tau, sigma))?;
            let ctx = format!("corpus {i}, tau={tau}, sigma={sigma}");

            let suffix = check(methods::run(&engine, corpus, Method::SuffixSigma, &p))?;
            let unigrams: u64 = all.iter().filter(|(s, _)| s.len() == 1).map(|(_, c)| c).sum();
            ensure!(suffix.jobs[0].map_output_records_pre_combiner == unigrams, "(a) {ctx}");

            let naive = check(methods::run(&engine, corpus, Method::Naive, &p))?;
            ensure!(naive.jobs[0].map_output_records_pre_combiner == all.values().sum::<u64>(), "(b) {ctx}");

            let scan = check(methods::run(&engine, corpus, Method::AprioriScan, &p))?;
            for job in &scan.jobs {
                let expected: u64 =
                    sets.non_prunable.iter().filter(|(s, _)| s.len() == job.iteration as usize).map(|(_, c)| c).sum();
                ensure!(job.map_output_records_pre_combiner == expected, "(c) {ctx}, iteration {}", job.iteration);
            }

            let index = check(methods::run(&engine, corpus, Method::AprioriIndex, &p))?;
            let phase_two: u64 =
                index.jobs.iter().filter(|j| j.iteration as usize > k).map(|j| j.map_output_records).sum();
            let joinable = sets.frequent.keys().filter(|s| s.len() >= k && sigma.allows(s.len() + 1)).count() as u64;
            ensure!(phase_two == 2 * joinable, "(d) {ctx}, K={k}: {phase_two} != 2*{joinable}");
            checks += 4;
        }
    }
    Ok(format!("{checks} law checks (a)-(d)"))
}

fn reducer_trace() -> Outcome {
    let partition_b: Vec<(Vec<TermId>, u64)> =
        vec![(vec![B, X, X], 1), (vec![B, X], 1), (vec![B, A, X], 2), (vec![B], 1)];
    let tau = 3;
    let mut stacks = ReducerStacks::<u64>::new();
    let mut emitted = Vec::new();
    let mut columns = Vec::new();
    for (i, (key, n)) in partition_b.iter().enumerate() {
        check(stacks.pop_to_common_prefix(key, tau, |g, c| emitted.push((g.to_vec(), *c))))?;
        if i == 3 {
            columns.push(stacks.snapshot());
        }
        stacks.absorb(key, *n);
        if i < 3 {
            columns.push(stacks.snapshot());
        }
    }
    stacks.cleanup(tau, |g, c| emitted.push((g.to_vec(), *c)));
    columns.push(stacks.snapshot());
    let expected =
        vec![vec![(B, 0), (X, 0), (X, 1)], vec![(B, 0), (X, 2)], vec![(B, 2), (A, 0), (X, 2)], vec![(B, 4)], vec![]];
    ensure!(columns == expected, "columns {columns:?}");
    ensure!(emitted == vec![(vec![B], 5)], "emitted at tau=3: {emitted:?}");

    let mut stacks = ReducerStacks::<u64>::new();
    let mut finalized = Vec::new();
    for (key, n) in &partition_b {
        check(stacks.reduce(key, *n, 1, |g, c| finalized.push((g.to_vec(), *c))))?;
    }
    stacks.cleanup(1, |g, c| finalized.push((g.to_vec(), *c)));
    ensure!(finalized.contains(&(vec![B, X], 2)), "<b x> finalized as {finalized:?}");
    Ok("5 columns match, <b x> finalized at 2".into())
}

fn maximal_closed(suite: &[(Dictionary, Corpus)]) -> Outcome {
    let engine = small_split_engine(2);
    let params = RunParams::new(3, Sigma::Bounded(3));
    let maximal = check(run_suffix_sigma_filtered(&engine, &running_example(), &params, FilterMode::Maximal))?;
    let closed = check(run_suffix_sigma_filtered(&engine, &running_example(), &params, FilterMode::Closed))?;
    ensure!(as_map(&maximal.stats) == to_map(&[(&[A, X, B], 3)]), "running example maximal {:?}", maximal.stats);
    ensure!(
        as_map(&closed.stats) == to_map(&[(&[A, X, B], 3), (&[X, B], 4), (&[B], 5), (&[X], 7)]),
        "running example closed {:?}",
        closed.stats
    );
    let mut runs = 0;
    for (i, (_, corpus)) in suite.iter().enumerate() {
        for (tau, sigma) in grid() {
            let sets = check(oracle_sets(corpus, tau, sigma))?;
            let p = RunParams { reducers: 1 + i % 3, combiner: i % 2 == 1, ..RunParams::new(tau, sigma) };
            for (mode, expected) in [(FilterMode::Maximal, &sets.maximal), (FilterMode::Closed, &sets.closed)] {
                let report = check(run_suffix_sigma_filtered(&engine, corpus, &p, mode))?;
                ensure!(&as_map(&report.stats) == expected, "corpus {i}, {mode:?}, tau={tau}, sigma={sigma}");
                runs += 1;
            }
        }
    }
    Ok(format!("running example plus {runs} randomized runs"))
}

fn timeseries(suite: &[(Dictionary, Corpus)]) -> Outcome {
    let engine = small_split_engine(2);
    let mut grams = 0;
    for (i, (_, corpus)) in suite.iter().enumerate() {
        ensure!(corpus.documents.iter().all(|d| matches!(d.year, Some(1987..=2007))), "corpus {i} lacks years");
        for (tau, sigma) in grid() {
            let p = RunParams { reducers: 1 + i % 3, combiner: i % 2 == 0, ..RunParams::new(tau, sigma) };
            let series = check(run_suffix_sigma_timeseries(&engine, corpus, &p))?;
            let plain = check(oracle_cf(corpus, tau, sigma))?;
            ensure!(series.stats.len() == plain.len(), "corpus {i}, tau={tau}, sigma={sigma}: n-gram sets differ");
            for (gram, s) in &series.stats {
                let total: u64 = s.as_map().values().sum();
                ensure!(plain.get(gram) == Some(&total), "corpus {i}: total of {gram:?} is {total}");
            }
            grams += series.stats.len();
        }
    }
    Ok(format!("{grams} series totals equal cf"))
}

fn determinism() -> Outcome {
    let mut rng = StdRng::seed_from_u64(7);
    let spec = RandomCorpusSpec { max_docs: 200, max_terms_per_doc: 200, vocabulary: 40, ..Default::default() };
    let (dict, corpus) = random_corpus(&mut rng, &spec);
    let mut outputs = 0;
    for method in Method::ALL {
        let mut reference: Option<String> = None;
        for workers in [1, 4, 8] {
            let engine = check(Engine::new(EngineConfig { workers, split_size: 500, ..Default::default() }))?;
            for reducers in [1, 3, 9] {
                let p = RunParams { reducers, k: 3, ..RunParams::new(2, Sigma::Bounded(6)) };
                let tsv = render_tsv(&check(methods::run(&engine, &corpus, method, &p))?.stats, &dict);
                match &reference {
                    None => reference = Some(tsv),
                    Some(r) => ensure!(*r == tsv, "{method} differs with {workers} workers, R={reducers}"),
                }
                outputs += 1;
            }
        }
    }
    Ok(format!("{outputs} outputs over 4 methods byte-identical"))
}

fn records(report: &MethodReport) -> u64 {
    report.jobs.iter().map(|j| j.map_output_records_pre_combiner).sum()
}

fn load_test() -> Outcome {
    let target_bytes =
        std::env::var("NGRAM_ACCEPTANCE_BYTES").ok().and_then(|v| v.parse().ok()).unwrap_or(100usize << 20);
    let start = Instant::now();
    let raw = check(zipf_documents(&ZipfSpec { target_bytes, ..Default::default() }))?;
    let (_, corpus, report) = check(ingest(&raw))?;
    drop(raw);
    let generated = start.elapsed();

    let scratch = check(tempfile::tempdir())?;
    let engine = check(Engine::new(EngineConfig {
        workers: 8,
        shuffle: ShuffleStorage::LocalDisk(Some(scratch.path().to_path_buf())),
        ..Default::default()
    }))?;
    let run = |method, sigma, reducers| -> Result<(MethodReport, Duration), String> {
        let p = RunParams { reducers, ..RunParams::new(10, sigma) };
        let t = Instant::now();
        let report = check(methods::run(&engine, &corpus, method, &p))?;
        Ok((report, t.elapsed()))
    };

    let (suffix5, suffix_time) = run(Method::SuffixSigma, Sigma::Bounded(5), 8)?;
    let (naive5, _) = run(Method::Naive, Sigma::Bounded(5), 32)?;
    ensure!(suffix_time < Duration::from_secs(600), "suffix-sigma took {suffix_time:?}");
    ensure!(
        records(&suffix5) < records(&naive5),
        "sigma=5 records: suffix {} >= naive {}",
        records(&suffix5),
        records(&naive5)
    );
    ensure!(as_map(&suffix5.stats) == as_map(&naive5.stats), "sigma=5 outputs differ");

    let (suffix100, _) = run(Method::SuffixSigma, Sigma::Bounded(100), 8)?;
    let (scan100, _) = run(Method::AprioriScan, Sigma::Bounded(100), 32)?;
    let (naive100, _) = run(Method::Naive, Sigma::Bounded(100), 64)?;
    let (s, a, n) = (records(&suffix100), records(&scan100), records(&naive100));
    ensure!(s < a && a < n, "sigma=100 records: suffix {s}, apriori-scan {a}, naive {n}");
    ensure!(suffix100.stats.len() == naive100.stats.len(), "sigma=100 output sizes differ");
    Ok(format!(
        "{} MB, {} terms, corpus in {generated:.0?}; tau=10 sigma=5 suffix {suffix_time:.1?}, records suffix {} < naive {}; sigma=100 records suffix {s} < apriori-scan {a} < naive {n}; total {:.0?}",
        target_bytes >> 20,
        report.term_occurrences,
        records(&suffix5),
        records(&naive5),
        start.elapsed()
    ))
}

fn main() -> ExitCode {
    let suite = random_suite();
    let criteria: Vec<Criterion> = vec![
        ("1 golden running example", Box::new(golden)),
        ("2 oracle equivalence", Box::new(|| oracle_equivalence(&suite))),
        ("3 counter laws", Box::new(|| counter_laws(&suite))),
        ("4 suffix-sigma reducer trace", Box::new(reducer_trace)),
        ("5 maximal and closed", Box::new(|| maximal_closed(&suite))),
        ("6 time series totals", Box::new(|| timeseries(&suite))),
        ("7 determinism", Box::new(determinism)),
        ("8 desk-scale load test", Box::new(load_test)),
    ];
    // optional substring filters on the criterion names
    let only: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (name, criterion) in &criteria {
        if !only.is_empty() && !only.iter().any(|o| name.contains(o.as_str())) {
            continue;
        }
        let outcome = catch_unwind(AssertUnwindSafe(criterion)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or(p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        match outcome {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {name}: {detail}");
            }
        }
    }
    if failed > 0 {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
