//! Maximal and closed n-grams in two passes.
//!
//! The suffix reducer drops every n-gram that is a prefix of the n-gram it
//! emitted last (closed mode: only when both counts are equal). A second job
//! reverses the survivors and applies the same filter, which removes n-grams
//! that are suffixes of other survivors.
//!
//! Supersequences longer than σ are never seen, so an n-gram of length σ
//! counts as maximal.

use std::cmp::Ordering;

use crate::corpus::codec::{read_varint, write_varint};
use crate::corpus::{Corpus, TermId, TermSequence};
use crate::engine::{Counters, Emitter, Engine, Job, Values};
use crate::error::{Error, Result};
use crate::methods::suffix::{first_term_partition, reverse_lex_compare, run_suffix_job};
use crate::methods::{sorted, split_corpus, MethodReport, RunParams};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FilterMode {
    /// Drop n-grams with a frequent supersequence.
    Maximal,
    /// Drop n-grams with a supersequence of the same frequency.
    Closed,
}

/// Remembers the last n-gram it let through.
#[derive(Clone, Debug)]
pub struct PrefixFilter {
    mode: FilterMode,
    last: Option<(TermSequence, u64)>,
}

impl PrefixFilter {
    pub fn new(mode: FilterMode) -> Self {
        PrefixFilter { mode, last: None }
    }

    /// Whether `gram` survives, given the stream seen so far.
    pub fn accept(&mut self, gram: &[TermId], cf: u64) -> bool {
        if let Some((r, r_cf)) = &self.last {
            let covered = r.starts_with(gram);
            let drop = match self.mode {
                FilterMode::Maximal => covered,
                FilterMode::Closed => covered && cf == *r_cf,
            };
            if drop {
                return false;
            }
        }
        self.last = Some((gram.into(), cf));
        true
    }
}

/// Applies a fresh [`PrefixFilter`] to a stream.
pub fn prefix_filter<I>(stream: I, mode: FilterMode) -> Vec<(TermSequence, u64)>
where
    I: IntoIterator<Item = (TermSequence, u64)>,
{
    let mut filter = PrefixFilter::new(mode);
    stream.into_iter().filter(|(g, cf)| filter.accept(g, *cf)).collect()
}

struct PostFilterJob {
    mode: FilterMode,
    partitions: usize,
}

impl Job for PostFilterJob {
    type Input = (TermSequence, u64);
    type State = PrefixFilter;
    type Output = (TermSequence, u64);

    fn name(&self) -> &str {
        "post-filter"
    }

    fn partitions(&self) -> usize {
        self.partitions
    }

    fn map(&self, (gram, cf): &(TermSequence, u64), out: &mut Emitter<'_>) -> Result<()> {
        let mut value = Vec::with_capacity(4);
        write_varint(&mut value, *cf);
        out.emit(&gram.reversed(), &value)
    }

    fn partition(&self, key: &[TermId]) -> Result<usize> {
        first_term_partition(key, self.partitions)
    }

    fn compare(&self, a: &[TermId], b: &[TermId]) -> Ordering {
        reverse_lex_compare(a, b)
    }

    fn create_state(&self) -> PrefixFilter {
        PrefixFilter::new(self.mode)
    }

    fn reduce(
        &self,
        key: &[TermId],
        values: Values<'_>,
        filter: &mut PrefixFilter,
        out: &mut Vec<Self::Output>,
    ) -> Result<()> {
        if values.len() != 1 {
            return Err(Error::InvalidParameter(format!(
                "n-gram {key:?} appears {} times in the post-filter input",
                values.len()
            )));
        }
        for mut v in values {
            let cf = read_varint(&mut v)?;
            if filter.accept(key, cf) {
                out.push((TermSequence::from(key).reversed(), cf));
            }
        }
        Ok(())
    }
}

/// The second pass: removes n-grams that are suffixes of other input n-grams
/// (closed mode: of equal count).
pub fn reverse_post_filter(
    engine: &Engine,
    stats: &[(TermSequence, u64)],
    mode: FilterMode,
    partitions: usize,
) -> Result<(Vec<(TermSequence, u64)>, Counters)> {
    let job = PostFilterJob { mode, partitions };
    let shards: Vec<&[(TermSequence, u64)]> = stats.chunks(engine.config().split_size.max(1)).collect();
    let output = engine.run_job(&job, &shards)?;
    let counters = output.counters.clone();
    Ok((output.into_records(), counters))
}

/// Suffix-σ with prefix filtering in the reducer, followed by the post-filter
/// job.
pub fn run_suffix_sigma_filtered(
    engine: &Engine,
    corpus: &Corpus,
    params: &RunParams,
    mode: FilterMode,
) -> Result<MethodReport> {
    params.validate()?;
    let (split, split_job) = split_corpus(engine, corpus, params)?;
    let output = run_suffix_job::<u64>(engine, &split, params, Some(mode))?;
    let suffix_counters = output.counters.clone();
    let (stats, post_counters) = reverse_post_filter(engine, &output.into_records(), mode, params.reducers)?;
    Ok(MethodReport { stats: sorted(stats), split_job: Some(split_job), jobs: vec![suffix_counters, post_counters] })
}

#[cfg(test)]
mod tests {
    use super::*;

    const X: TermId = 0;
    const B: TermId = 1;
    const A: TermId = 2;

    fn stream(items: &[(&[TermId], u64)]) -> Vec<(TermSequence, u64)> {
        items.iter().map(|(g, c)| (TermSequence::from(*g), *c)).collect()
    }

    #[test]
    fn partition_a_keeps_only_the_longest() {
        // pop order of partition a at τ = 3
        let input = stream(&[(&[A, X, B], 3), (&[A, X], 3), (&[A], 3)]);
        for mode in [FilterMode::Maximal, FilterMode::Closed] {
            assert_eq!(prefix_filter(input.clone(), mode), stream(&[(&[A, X, B], 3)]));
        }
    }

    #[test]
    fn closed_mode_keeps_prefixes_with_higher_counts() {
        let input = stream(&[(&[B, X, A], 3), (&[B, X], 4)]);
        assert_eq!(prefix_filter(input.clone(), FilterMode::Closed), input);
        assert_eq!(prefix_filter(input, FilterMode::Maximal), stream(&[(&[B, X, A], 3)]));
    }

    #[test]
    fn first_emission_passes() {
        let mut filter = PrefixFilter::new(FilterMode::Maximal);
        assert!(filter.accept(&[B], 1));
        assert!(filter.accept(&[A], 1));
    }

    #[test]
    fn reversed_partition_b() {
        // the reversed second-pass reducer for b receives <b x a>:3, <b x>:4, <b>:5
        let reversed = stream(&[(&[B, X, A], 3), (&[B, X], 4), (&[B], 5)]);
        assert_eq!(prefix_filter(reversed, FilterMode::Maximal), stream(&[(&[B, X, A], 3)]));
    }
}
