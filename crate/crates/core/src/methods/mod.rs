//! The four n-gram counting methods and what they share: parameters, the
//! preliminary document-splitting job and the counting value codec.

pub mod apriori_index;
pub mod apriori_scan;
pub mod naive;
pub mod suffix;

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::corpus::codec::{read_sequence, read_varint, write_sequence, write_varint};
use crate::corpus::{Corpus, Document, FrequentTerms, TermId, TermSequence};
use crate::engine::{Counters, Emitter, Engine, Job, Values};
use crate::error::{Error, Result};

/// Maximum n-gram length.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sigma {
    Bounded(usize),
    Unbounded,
}

impl Sigma {
    /// Length limit as a number; `usize::MAX` when unbounded.
    pub fn limit(self) -> usize {
        match self {
            Sigma::Bounded(n) => n,
            Sigma::Unbounded => usize::MAX,
        }
    }

    pub fn allows(self, len: usize) -> bool {
        len <= self.limit()
    }

    /// `fragment[b..]` truncated to at most σ terms.
    pub fn truncate(self, fragment: &[TermId], b: usize) -> &[TermId] {
        let end = fragment.len().min(b.saturating_add(self.limit()));
        &fragment[b..end]
    }
}

impl fmt::Display for Sigma {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sigma::Bounded(n) => write!(f, "{n}"),
            Sigma::Unbounded => write!(f, "inf"),
        }
    }
}

impl FromStr for Sigma {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "infinity" | "∞" => Ok(Sigma::Unbounded),
            other => match other.parse::<usize>() {
                Ok(n) if n >= 1 => Ok(Sigma::Bounded(n)),
                _ => Err(Error::InvalidParameter(format!("sigma must be a positive integer or 'inf', got '{s}'"))),
            },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    Naive,
    AprioriScan,
    AprioriIndex,
    SuffixSigma,
    Oracle,
}

impl Method {
    /// The four MapReduce methods, without the oracle.
    pub const ALL: [Method; 4] = [Method::Naive, Method::AprioriScan, Method::AprioriIndex, Method::SuffixSigma];

    pub fn name(self) -> &'static str {
        match self {
            Method::Naive => "naive",
            Method::AprioriScan => "apriori-scan",
            Method::AprioriIndex => "apriori-index",
            Method::SuffixSigma => "suffix-sigma",
            Method::Oracle => "oracle",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [Method::Naive, Method::AprioriScan, Method::AprioriIndex, Method::SuffixSigma, Method::Oracle]
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown method '{s}'")))
    }
}

#[derive(Clone, Debug)]
pub struct RunParams {
    /// Minimum collection frequency τ.
    pub tau: u64,
    pub sigma: Sigma,
    /// Reduce partitions R.
    pub reducers: usize,
    /// Map-side pre-aggregation for the counting jobs.
    pub combiner: bool,
    /// Apriori-Index phase boundary K.
    pub k: usize,
    /// Apriori-Scan dictionary size cap.
    pub dictionary_cap: usize,
    /// Apriori-Index buffered postings per join key.
    pub join_buffer_cap: usize,
    /// Directory that keeps Apriori iteration outputs.
    pub keep_intermediate: Option<PathBuf>,
}

impl RunParams {
    pub fn new(tau: u64, sigma: Sigma) -> Self {
        RunParams { tau, sigma, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.tau == 0 {
            return Err(Error::InvalidParameter("tau must be at least 1".into()));
        }
        if self.sigma == Sigma::Bounded(0) {
            return Err(Error::InvalidParameter("sigma must be at least 1".into()));
        }
        if self.reducers == 0 {
            return Err(Error::InvalidParameter("at least one reducer is required".into()));
        }
        Ok(())
    }
}

impl Default for RunParams {
    fn default() -> Self {
        RunParams {
            tau: 1,
            sigma: Sigma::Unbounded,
            reducers: 1,
            combiner: true,
            k: 4,
            dictionary_cap: 10_000_000,
            join_buffer_cap: 1_000_000,
            keep_intermediate: None,
        }
    }
}

/// n-gram statistics plus the counters of every job that produced them.
#[derive(Clone, Debug)]
pub struct MethodReport<V = u64> {
    pub stats: Vec<(TermSequence, V)>,
    /// The preliminary unigram job used for document splitting.
    pub split_job: Option<Counters>,
    /// The method's own jobs in execution order.
    pub jobs: Vec<Counters>,
}

impl<V> MethodReport<V> {
    /// Sum over the method's own jobs, excluding the split job.
    pub fn totals(&self, name: &str) -> Counters {
        Counters::total(name, &self.jobs)
    }
}

/// Runs `method` on `corpus`, including document splitting.
pub fn run(engine: &Engine, corpus: &Corpus, method: Method, params: &RunParams) -> Result<MethodReport> {
    params.validate()?;
    match method {
        Method::Naive => naive::run_naive(engine, corpus, params),
        Method::AprioriScan => apriori_scan::run_apriori_scan(engine, corpus, params),
        Method::AprioriIndex => apriori_index::run_apriori_index(engine, corpus, params),
        Method::SuffixSigma => suffix::run_suffix_sigma(engine, corpus, params),
        Method::Oracle => {
            let mut stats: Vec<(TermSequence, u64)> =
                crate::oracle::oracle_cf(corpus, params.tau, params.sigma)?.into_iter().collect();
            stats.sort();
            Ok(MethodReport { stats, split_job: None, jobs: Vec::new() })
        }
    }
}

/// Counts every unigram; feeds document splitting.
struct UnigramCount {
    partitions: usize,
    combiner: bool,
}

impl Job for UnigramCount {
    type Input = Document;
    type State = ();
    type Output = (TermId, u64);

    fn name(&self) -> &str {
        "unigram-split"
    }

    fn partitions(&self) -> usize {
        self.partitions
    }

    fn map(&self, doc: &Document, out: &mut Emitter<'_>) -> Result<()> {
        let value = doc_value(doc.id);
        for fragment in &doc.fragments {
            for &t in fragment.iter() {
                out.emit(&[t], &value)?;
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

    fn reduce(&self, key: &[TermId], values: Values<'_>, _: &mut (), out: &mut Vec<(TermId, u64)>) -> Result<()> {
        out.push((key[0], group_count(values, self.combiner)?));
        Ok(())
    }
}

/// Runs the preliminary unigram job and cuts every document at terms with
/// cf < τ.
pub fn split_corpus(engine: &Engine, corpus: &Corpus, params: &RunParams) -> Result<(Corpus, Counters)> {
    let job = UnigramCount { partitions: params.reducers, combiner: params.combiner };
    let output = engine.run_job(&job, &corpus.splits(engine.config().split_size))?;
    let counters = output.counters.clone();
    let frequent = FrequentTerms::from_counts(output.into_records(), params.tau);
    Ok((corpus.split(&frequent), counters))
}

/// Map-side value of the counting jobs: the document id.
pub(crate) fn doc_value(doc: u64) -> Vec<u8> {
    let mut v = Vec::with_capacity(4);
    write_varint(&mut v, doc);
    v
}

/// Number of occurrences behind one value group. Without a combiner every
/// value stands for one occurrence; combined values carry partial counts.
pub(crate) fn group_count(values: Values<'_>, combined: bool) -> Result<u64> {
    if !combined {
        return Ok(values.len() as u64);
    }
    let mut sum = 0u64;
    for mut v in values {
        sum += read_varint(&mut v)?;
    }
    Ok(sum)
}

/// Collapses one map task's doc-id values into a partial count.
pub(crate) fn combine_counts(key: &[TermId], values: Values<'_>, out: &mut Emitter<'_>) -> Result<()> {
    let mut buf = Vec::with_capacity(4);
    write_varint(&mut buf, values.len() as u64);
    out.emit(key, &buf)
}

/// Writes one chain iteration's output as a record count followed by
/// (sequence, value) records; returns the file path.
pub fn write_iteration<V>(
    dir: &Path,
    method: &str,
    k: u32,
    records: &[(TermSequence, V)],
    mut encode: impl FnMut(&V, &mut Vec<u8>),
) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let mut bytes = Vec::new();
    write_varint(&mut bytes, records.len() as u64);
    for (seq, value) in records {
        write_sequence(&mut bytes, seq);
        encode(value, &mut bytes);
    }
    let path = dir.join(format!("{method}-{k:03}.bin"));
    fs::write(&path, bytes)?;
    Ok(path)
}

/// Reads a file written by [`write_iteration`].
pub fn read_iteration<V>(
    path: &Path,
    mut decode: impl FnMut(&mut &[u8]) -> Result<V>,
) -> Result<Vec<(TermSequence, V)>> {
    let bytes = fs::read(path)?;
    let mut input = bytes.as_slice();
    let n = read_varint(&mut input)?;
    let mut records = Vec::with_capacity(n.min(1 << 20) as usize);
    for _ in 0..n {
        let seq = read_sequence(&mut input)?;
        records.push((seq, decode(&mut input)?));
    }
    if !input.is_empty() {
        return Err(Error::CorruptEncoding);
    }
    Ok(records)
}

/// Sorts statistics by term ids, which makes method outputs comparable.
pub(crate) fn sorted<V>(mut stats: Vec<(TermSequence, V)>) -> Vec<(TermSequence, V)> {
    stats.sort_by(|a, b| a.0.cmp(&b.0));
    stats
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::EngineConfig;

    #[test]
    fn sigma_parsing() {
        assert_eq!("3".parse::<Sigma>().unwrap(), Sigma::Bounded(3));
        assert_eq!("inf".parse::<Sigma>().unwrap(), Sigma::Unbounded);
        assert_eq!("∞".parse::<Sigma>().unwrap(), Sigma::Unbounded);
        assert!("0".parse::<Sigma>().is_err());
        assert!("-2".parse::<Sigma>().is_err());
        assert_eq!(Sigma::Unbounded.to_string(), "inf");
    }

    #[test]
    fn sigma_truncation() {
        let f = [1, 2, 3, 4];
        assert_eq!(Sigma::Bounded(2).truncate(&f, 1), &[2, 3]);
        assert_eq!(Sigma::Bounded(2).truncate(&f, 3), &[4]);
        assert_eq!(Sigma::Unbounded.truncate(&f, 0), &f);
    }

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL.into_iter().chain([Method::Oracle]) {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
        }
        assert!("suffix".parse::<Method>().is_err());
    }

    #[test]
    fn params_validation() {
        assert!(RunParams::new(0, Sigma::Unbounded).validate().is_err());
        assert!(RunParams { reducers: 0, ..Default::default() }.validate().is_err());
        assert!(RunParams::new(1, Sigma::Bounded(1)).validate().is_ok());
    }

    #[test]
    fn iteration_files_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let records = vec![(TermSequence::from([1, 2]), 5u64), (TermSequence::from([300]), 1)];
        let path = write_iteration(dir.path(), "scan", 2, &records, |v, b| write_varint(b, *v)).unwrap();
        assert!(path.ends_with("scan-002.bin"));
        assert_eq!(read_iteration(&path, read_varint).unwrap(), records);
        let bytes = fs::read(&path).unwrap();
        fs::write(&path, &bytes[..bytes.len() - 1]).unwrap();
        assert!(read_iteration(&path, read_varint).is_err());
    }

    #[test]
    fn split_job_cuts_at_infrequent_terms() {
        // c b a z b a c, with z occurring once
        let corpus = Corpus::from_sequences([vec![0, 1, 2, 3, 1, 2, 0]]);
        let engine = Engine::new(EngineConfig { workers: 1, ..Default::default() }).unwrap();
        for combiner in [false, true] {
            let params = RunParams { tau: 2, combiner, ..Default::default() };
            let (split, counters) = split_corpus(&engine, &corpus, &params).unwrap();
            assert_eq!(
                split.documents[0].fragments,
                vec![TermSequence::from([0, 1, 2]), TermSequence::from([1, 2, 0])]
            );
            assert_eq!(counters.map_output_records_pre_combiner, 7);
            assert_eq!(counters.reduce_output_records, 4);
        }
    }
}
