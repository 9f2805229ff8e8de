//! Emit every n-gram occurrence up to length σ and count them.

use super::{combine_counts, doc_value, group_count, sorted, split_corpus, MethodReport, RunParams, Sigma};
use crate::corpus::{Corpus, Document, TermId, TermSequence};
use crate::engine::{Emitter, Engine, Job, Values};
use crate::error::Result;

/// Every sub-sequence `fragment[b..=e]` with `e - b < σ`, grouped by `b`.
pub fn ngrams(fragment: &[TermId], sigma: Sigma) -> impl Iterator<Item = &[TermId]> {
    (0..fragment.len()).flat_map(move |b| {
        let longest = sigma.truncate(fragment, b).len();
        (1..=longest).map(move |n| &fragment[b..b + n])
    })
}

/// The (n-gram, doc id) pairs the naive mapper emits for one fragment.
pub fn naive_map(doc: u64, fragment: &[TermId], sigma: Sigma) -> Vec<(TermSequence, u64)> {
    ngrams(fragment, sigma).map(|g| (TermSequence::from(g), doc)).collect()
}

/// Keeps a count iff it reaches τ.
pub fn naive_reduce(count: u64, tau: u64) -> Option<u64> {
    (count >= tau).then_some(count)
}

pub(crate) struct NaiveJob {
    pub sigma: Sigma,
    pub tau: u64,
    pub partitions: usize,
    pub combiner: bool,
}

impl Job for NaiveJob {
    type Input = Document;
    type State = ();
    type Output = (TermSequence, u64);

    fn name(&self) -> &str {
        "naive"
    }

    fn partitions(&self) -> usize {
        self.partitions
    }

    fn map(&self, doc: &Document, out: &mut Emitter<'_>) -> Result<()> {
        let value = doc_value(doc.id);
        for fragment in &doc.fragments {
            for gram in ngrams(fragment, self.sigma) {
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

pub fn run_naive(engine: &Engine, corpus: &Corpus, params: &RunParams) -> Result<MethodReport> {
    params.validate()?;
    let (split, split_job) = split_corpus(engine, corpus, params)?;
    let job = NaiveJob { sigma: params.sigma, tau: params.tau, partitions: params.reducers, combiner: params.combiner };
    let output = engine.run_job(&job, &split.splits(engine.config().split_size))?;
    let counters = output.counters.clone();
    Ok(MethodReport { stats: sorted(output.into_records()), split_job: Some(split_job), jobs: vec![counters] })
}
