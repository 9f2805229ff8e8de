//! Iterative scans: iteration k only counts k-grams whose two (k-1)-gram
//! constituents were frequent in iteration k-1.

use rustc_hash::FxHashSet;

use super::{combine_counts, doc_value, group_count, naive::naive_reduce, split_corpus, write_iteration};
use super::{MethodReport, RunParams};
use crate::corpus::codec::write_varint;
use crate::corpus::{Corpus, Document, TermId, TermSequence};
use crate::engine::{Emitter, Engine, Iteration, Job, Values};
use crate::error::{Error, Result};

/// The frequent (k-1)-grams shared read-only by every map task of iteration k.
pub type FrequentSet = FxHashSet<TermSequence>;

/// The k-gram occurrences of `fragment` that survive pruning against `dict`.
/// Nothing is pruned when k = 1.
pub fn scan_candidates<'a>(
    k: usize,
    dict: &'a FrequentSet,
    fragment: &'a [TermId],
) -> impl Iterator<Item = &'a [TermId]> {
    let k = k.max(1);
    fragment.windows(k).filter(move |w| k == 1 || (dict.contains(&w[..k - 1]) && dict.contains(&w[1..])))
}

/// The (k-gram, doc id) pairs the scan mapper emits for one fragment.
pub fn scan_map(k: usize, dict: &FrequentSet, doc: u64, fragment: &[TermId]) -> Vec<(TermSequence, u64)> {
    scan_candidates(k, dict, fragment).map(|g| (TermSequence::from(g), doc)).collect()
}

struct ScanJob<'a> {
    k: usize,
    dict: &'a FrequentSet,
    tau: u64,
    partitions: usize,
    combiner: bool,
}

impl Job for ScanJob<'_> {
    type Input = Document;
    type State = ();
    type Output = (TermSequence, u64);

    fn name(&self) -> &str {
        "apriori-scan"
    }

    fn iteration(&self) -> u32 {
        self.k as u32
    }

    fn partitions(&self) -> usize {
        self.partitions
    }

    fn map(&self, doc: &Document, out: &mut Emitter<'_>) -> Result<()> {
        let value = doc_value(doc.id);
        for fragment in &doc.fragments {
            for gram in scan_candidates(self.k, self.dict, fragment) {
                out.emit(gram, &value)?;
            }
        }
        Ok(())
    }

    fn has_combiner(&self) -> bool {
        self.combiner
    }

    fn combine(&self, key: &[TermId], values: Values<'_>, out: &mut Emitter<'_>) -> Result<()> {
        combine_counts(key, values, out)
    }

    fn create_state(&self) {}

    fn reduce(&self, key: &[TermId], values: Values<'_>, _: &mut (), out: &mut Vec<Self::Output>) -> Result<()> {
        if let Some(cf) = naive_reduce(group_count(values, self.combiner)?, self.tau) {
            out.push((key.into(), cf));
        }
        Ok(())
    }
}

/// Per-iteration outputs of an Apriori-Scan run, for inspection.
#[derive(Clone, Debug, Default)]
pub struct ScanTrace {
    pub iterations: Vec<Vec<(TermSequence, u64)>>,
}

pub fn run_apriori_scan(engine: &Engine, corpus: &Corpus, params: &RunParams) -> Result<MethodReport> {
    run_apriori_scan_traced(engine, corpus, params).map(|(report, _)| report)
}

/// Like [`run_apriori_scan`], also returning every iteration's output.
pub fn run_apriori_scan_traced(
    engine: &Engine,
    corpus: &Corpus,
    params: &RunParams,
) -> Result<(MethodReport, ScanTrace)> {
    params.validate()?;
    let (split, split_job) = split_corpus(engine, corpus, params)?;
    let shards = split.splits(engine.config().split_size);
    let limit = params.sigma.limit();

    let mut dict = FrequentSet::default();
    let mut trace = ScanTrace::default();
    let chain = engine.run_chain(
        |engine, k| {
            let job = ScanJob {
                k: k as usize,
                dict: &dict,
                tau: params.tau,
                partitions: params.reducers,
                combiner: params.combiner,
            };
            let output = engine.run_job(&job, &shards)?;
            let counters = output.counters.clone();
            let mut records = output.into_records();
            records.sort();
            if let Some(dir) = &params.keep_intermediate {
                write_iteration(dir, "apriori-scan", k, &records, |cf, buf| write_varint(buf, *cf))?;
            }
            let more = !records.is_empty() && (k as usize) < limit;
            if more && records.len() > params.dictionary_cap {
                return Err(Error::DictionaryTooLarge { entries: records.len(), cap: params.dictionary_cap }
                    .in_job("apriori-scan", k + 1));
            }
            dict = if more { records.iter().map(|(g, _)| g.clone()).collect() } else { FrequentSet::default() };
            let output_records = records.len();
            trace.iterations.push(records);
            Ok(Some(Iteration { counters, output_records }))
        },
        |k, it| it.output_records == 0 || k as usize >= limit,
    )?;

    let mut stats: Vec<(TermSequence, u64)> = trace.iterations.iter().flatten().cloned().collect();
    stats.sort();
    Ok((MethodReport { stats, split_job: Some(split_job), jobs: chain.iterations }, trace))
}
