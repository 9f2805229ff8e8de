//! Suffix-σ: one truncated suffix per term occurrence, partitioned by first
//! term and sorted in reverse lexicographic order, so that a reducer can
//! aggregate every prefix of the suffixes it sees with two stacks.

use std::cmp::Ordering;
use std::fmt::Debug;
use std::marker::PhantomData;

use super::{group_count, sorted, split_corpus, MethodReport, RunParams, Sigma};
use crate::corpus::codec::write_varint;
use crate::corpus::{Corpus, Document, TermId, TermSequence};
use crate::engine::{Emitter, Engine, Job, JobOutput, Values};
use crate::error::{Error, Result};
use crate::extensions::maximal::{FilterMode, PrefixFilter};

/// The suffix of `fragment` at every position, truncated to σ terms.
pub fn suffixes(fragment: &[TermId], sigma: Sigma) -> impl Iterator<Item = &[TermId]> {
    (0..fragment.len()).map(move |b| sigma.truncate(fragment, b))
}

/// The (suffix, doc id) pairs the Suffix-σ mapper emits for one fragment.
pub fn suffix_map(doc: u64, fragment: &[TermId], sigma: Sigma) -> Vec<(TermSequence, u64)> {
    suffixes(fragment, sigma).map(|s| (TermSequence::from(s), doc)).collect()
}

/// Reverse lexicographic order: at the first differing position the greater
/// term sorts first, and a sequence sorts before its proper prefixes.
///
/// A term is greater than another when its id is smaller, i.e. when it is
/// more frequent. Any fixed term order works for counting; this one puts
/// `<b x>` before `<b a x>` for the ids x = 0, a = 2.
pub fn reverse_lex_compare(r: &[TermId], s: &[TermId]) -> Ordering {
    for (a, b) in r.iter().zip(s) {
        if a != b {
            return a.cmp(b);
        }
    }
    s.len().cmp(&r.len())
}

/// Partition of a key by its first term id alone.
pub fn first_term_partition(key: &[TermId], partitions: usize) -> Result<usize> {
    key.first().map(|&t| t as usize % partitions.max(1)).ok_or(Error::EmptyKey)
}

/// What a counts stack holds: merged when a level is popped into its parent.
pub trait Aggregate: Clone + Default + Debug + Send + Sync {
    fn merge(&mut self, other: &Self);
    /// The collection frequency this aggregate stands for.
    fn total(&self) -> u64;
}

impl Aggregate for u64 {
    fn merge(&mut self, other: &u64) {
        *self += other;
    }

    fn total(&self) -> u64 {
        *self
    }
}

/// How an aggregate travels through the shuffle.
pub trait SuffixAggregate: Aggregate {
    /// Map-side value for one suffix of `doc`.
    fn map_value(doc: &Document, buf: &mut Vec<u8>) -> Result<()>;
    /// Aggregate of one value group; `combined` when the values are combiner
    /// output rather than map output.
    fn from_values(values: Values<'_>, combined: bool) -> Result<Self>;
    /// Combiner output encoding.
    fn write(&self, buf: &mut Vec<u8>);
}

impl SuffixAggregate for u64 {
    fn map_value(doc: &Document, buf: &mut Vec<u8>) -> Result<()> {
        write_varint(buf, doc.id);
        Ok(())
    }

    fn from_values(values: Values<'_>, combined: bool) -> Result<u64> {
        group_count(values, combined)
    }

    fn write(&self, buf: &mut Vec<u8>) {
        write_varint(buf, *self);
    }
}

/// The terms and counts stacks of one reduce partition.
///
/// Between calls `terms` holds the last key seen and, for every level i,
/// `counts[i..]` summed is the number of occurrences seen so far of the
/// n-gram `terms[..=i]`.
#[derive(Clone, Debug, Default)]
pub struct ReducerStacks<A> {
    terms: Vec<TermId>,
    counts: Vec<A>,
}

impl<A: Aggregate> ReducerStacks<A> {
    pub fn new() -> Self {
        ReducerStacks { terms: Vec::new(), counts: Vec::new() }
    }

    pub fn terms(&self) -> &[TermId] {
        &self.terms
    }

    pub fn counts(&self) -> &[A] {
        &self.counts
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// (term, count) per level, bottom first.
    pub fn snapshot(&self) -> Vec<(TermId, A)> {
        self.terms.iter().copied().zip(self.counts.iter().cloned()).collect()
    }

    /// Occurrences seen so far of every n-gram on the stack.
    pub fn prefix_counts(&self) -> Vec<(TermSequence, u64)> {
        let mut suffix_sum = 0;
        let mut out: Vec<(TermSequence, u64)> = (0..self.terms.len())
            .rev()
            .map(|i| {
                suffix_sum += self.counts[i].total();
                (TermSequence::from(&self.terms[..=i]), suffix_sum)
            })
            .collect();
        out.reverse();
        out
    }

    /// Pops every level that `s` does not share, emitting the popped n-grams
    /// whose aggregate reaches τ and folding each popped aggregate into its
    /// parent. Afterwards the stack is a prefix of `s`.
    pub fn pop_to_common_prefix<F>(&mut self, s: &[TermId], tau: u64, mut emit: F) -> Result<()>
    where
        F: FnMut(&[TermId], &A),
    {
        if !self.terms.is_empty() && reverse_lex_compare(&self.terms, s) == Ordering::Greater {
            return Err(Error::UnsortedReduceInput);
        }
        let lcp = self.terms.iter().zip(s).take_while(|(a, b)| a == b).count();
        while self.terms.len() > lcp {
            let top = self.counts.pop().expect("stacks have equal size");
            if top.total() >= tau {
                emit(&self.terms, &top);
            }
            self.terms.pop();
            if let Some(parent) = self.counts.last_mut() {
                parent.merge(&top);
            }
        }
        Ok(())
    }

    /// Adds the occurrences of `s`; the stack must be a prefix of `s`.
    pub fn absorb(&mut self, s: &[TermId], aggregate: A) {
        debug_assert!(s.starts_with(&self.terms));
        if s.len() == self.terms.len() {
            if let Some(top) = self.counts.last_mut() {
                top.merge(&aggregate);
            }
            return;
        }
        for &t in &s[self.terms.len()..s.len() - 1] {
            self.terms.push(t);
            self.counts.push(A::default());
        }
        self.terms.push(s[s.len() - 1]);
        self.counts.push(aggregate);
    }

    /// One reduce call: pop, then absorb.
    pub fn reduce<F>(&mut self, s: &[TermId], aggregate: A, tau: u64, emit: F) -> Result<()>
    where
        F: FnMut(&[TermId], &A),
    {
        self.pop_to_common_prefix(s, tau, emit)?;
        self.absorb(s, aggregate);
        Ok(())
    }

    /// Flushes the stack as if an empty key had arrived.
    pub fn cleanup<F>(&mut self, tau: u64, emit: F)
    where
        F: FnMut(&[TermId], &A),
    {
        self.pop_to_common_prefix(&[], tau, emit).expect("the empty key sorts after every key");
    }
}

pub(crate) struct SuffixState<A> {
    stacks: ReducerStacks<A>,
    filter: Option<PrefixFilter>,
}

pub(crate) struct SuffixJob<A> {
    pub sigma: Sigma,
    pub tau: u64,
    pub partitions: usize,
    pub combiner: bool,
    pub filter: Option<FilterMode>,
    pub aggregate: PhantomData<fn() -> A>,
}

impl<A> SuffixJob<A> {
    pub fn new(params: &RunParams, filter: Option<FilterMode>) -> Self {
        SuffixJob {
            sigma: params.sigma,
            tau: params.tau,
            partitions: params.reducers,
            combiner: params.combiner,
            filter,
            aggregate: PhantomData,
        }
    }
}

/// Sink for popped n-grams, applying the optional prefix filter.
fn sink<'a, A: Aggregate>(
    filter: &'a mut Option<PrefixFilter>,
    out: &'a mut Vec<(TermSequence, A)>,
) -> impl FnMut(&[TermId], &A) + 'a {
    move |gram, aggregate| {
        if filter.as_mut().is_none_or(|f| f.accept(gram, aggregate.total())) {
            out.push((gram.into(), aggregate.clone()));
        }
    }
}

impl<A: SuffixAggregate> Job for SuffixJob<A> {
    type Input = Document;
    type State = SuffixState<A>;
    type Output = (TermSequence, A);

    fn name(&self) -> &str {
        "suffix-sigma"
    }

    fn partitions(&self) -> usize {
        self.partitions
    }

    fn map(&self, doc: &Document, out: &mut Emitter<'_>) -> Result<()> {
        let mut value = Vec::new();
        A::map_value(doc, &mut value)?;
        for fragment in &doc.fragments {
            for suffix in suffixes(fragment, self.sigma) {
                out.emit(suffix, &value)?;
            }
        }
        Ok(())
    }

    fn partition(&self, key: &[TermId]) -> Result<usize> {
        first_term_partition(key, self.partitions)
    }

    fn compare(&self, a: &[TermId], b: &[TermId]) -> Ordering {
        reverse_lex_compare(a, b)
    }

    fn has_combiner(&self) -> bool {
        self.combiner
    }

    fn combine(&self, key: &[TermId], values: Values<'_>, out: &mut Emitter<'_>) -> Result<()> {
        let mut buf = Vec::new();
        A::from_values(values, false)?.write(&mut buf);
        out.emit(key, &buf)
    }

    fn create_state(&self) -> SuffixState<A> {
        SuffixState { stacks: ReducerStacks::new(), filter: self.filter.map(PrefixFilter::new) }
    }

    fn reduce(
        &self,
        key: &[TermId],
        values: Values<'_>,
        state: &mut SuffixState<A>,
        out: &mut Vec<Self::Output>,
    ) -> Result<()> {
        let aggregate = A::from_values(values, self.combiner)?;
        let SuffixState { stacks, filter } = state;
        stacks.reduce(key, aggregate, self.tau, sink(filter, out))
    }

    fn cleanup(&self, state: &mut SuffixState<A>, out: &mut Vec<Self::Output>) -> Result<()> {
        let SuffixState { stacks, filter } = state;
        stacks.cleanup(self.tau, sink(filter, out));
        Ok(())
    }
}

/// Runs the Suffix-σ job on an already split corpus, keeping the output of
/// each reduce partition apart.
pub fn run_suffix_job<A: SuffixAggregate>(
    engine: &Engine,
    split: &Corpus,
    params: &RunParams,
    filter: Option<FilterMode>,
) -> Result<JobOutput<(TermSequence, A)>> {
    engine.run_job(&SuffixJob::<A>::new(params, filter), &split.splits(engine.config().split_size))
}

pub fn run_suffix_sigma(engine: &Engine, corpus: &Corpus, params: &RunParams) -> Result<MethodReport> {
    params.validate()?;
    let (split, split_job) = split_corpus(engine, corpus, params)?;
    let output = run_suffix_job::<u64>(engine, &split, params, None)?;
    let counters = output.counters.clone();
    Ok(MethodReport { stats: sorted(output.into_records()), split_job: Some(split_job), jobs: vec![counters] })
}
