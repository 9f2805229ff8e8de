//! Positional inverted indexes: n-grams up to length K are indexed directly,
//! longer ones are built by joining the posting lists of overlapping
//! (k-1)-grams.
//!
//! Positions are begin offsets within a document, counted over the
//! concatenation of its fragments. No n-gram spans two fragments, so a join
//! of two (k-1)-grams that share k-2 ≥ 1 positions stays inside one fragment.

use rustc_hash::FxHashMap;

use super::{split_corpus, write_iteration, MethodReport, RunParams};
use crate::corpus::codec::{read_sequence, read_varint, read_varint_u32, write_sequence, write_varint};
use crate::corpus::{Corpus, Document, TermId, TermSequence};
use crate::engine::{Emitter, Engine, Iteration, Job, Values};
use crate::error::{Error, Result};

/// Occurrences of one n-gram in one document.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Posting {
    pub doc: u64,
    /// Ascending begin offsets.
    pub positions: Vec<u32>,
}

impl Posting {
    pub fn new(doc: u64, positions: Vec<u32>) -> Self {
        Posting { doc, positions }
    }

    /// Doc id, position count, then the first position and the gaps.
    pub fn write(&self, out: &mut Vec<u8>) {
        write_varint(out, self.doc);
        write_varint(out, self.positions.len() as u64);
        let mut last = 0;
        for &p in &self.positions {
            write_varint(out, (p - last) as u64);
            last = p;
        }
    }

    pub fn read(input: &mut &[u8]) -> Result<Posting> {
        let doc = read_varint(input)?;
        let n = read_varint(input)? as usize;
        if n > input.len() {
            return Err(Error::CorruptEncoding);
        }
        let mut positions = Vec::with_capacity(n);
        let mut last = 0u32;
        for _ in 0..n {
            last = last.checked_add(read_varint_u32(input)?).ok_or(Error::CorruptEncoding)?;
            positions.push(last);
        }
        Ok(Posting { doc, positions })
    }
}

/// Postings of one n-gram, ordered by document.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PostingList(pub Vec<Posting>);

impl PostingList {
    /// Collection frequency: the total number of positions.
    pub fn cf(&self) -> u64 {
        self.0.iter().map(|p| p.positions.len() as u64).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Doc ids strictly ascending, positions strictly ascending, no empty
    /// postings.
    pub fn is_well_formed(&self) -> bool {
        self.0.windows(2).all(|w| w[0].doc < w[1].doc)
            && self.0.iter().all(|p| !p.positions.is_empty() && p.positions.windows(2).all(|w| w[0] < w[1]))
    }

    pub fn write(&self, out: &mut Vec<u8>) {
        write_varint(out, self.0.len() as u64);
        for p in &self.0 {
            p.write(out);
        }
    }

    pub fn read(input: &mut &[u8]) -> Result<PostingList> {
        let n = read_varint(input)? as usize;
        if n > input.len() {
            return Err(Error::CorruptEncoding);
        }
        (0..n).map(|_| Posting::read(input)).collect::<Result<_>>().map(PostingList)
    }
}

/// One posting per distinct k-gram of `doc`, sorted by k-gram.
pub fn index_map(doc: &Document, k: usize) -> Vec<(TermSequence, Posting)> {
    let mut grams: Vec<(TermSequence, Posting)> = positions_by_gram(doc, k)
        .into_iter()
        .map(|(g, positions)| (TermSequence::from(g), Posting::new(doc.id, positions)))
        .collect();
    grams.sort_by(|a, b| a.0.cmp(&b.0));
    grams
}

fn positions_by_gram(doc: &Document, k: usize) -> FxHashMap<&[TermId], Vec<u32>> {
    let mut positions: FxHashMap<&[TermId], Vec<u32>> = FxHashMap::default();
    if k == 0 {
        return positions;
    }
    let mut offset = 0u32;
    for fragment in &doc.fragments {
        for (b, gram) in fragment.windows(k).enumerate() {
            positions.entry(gram).or_default().push(offset + b as u32);
        }
        offset += fragment.len() as u32;
    }
    positions
}

/// Merges the postings of one k-gram; keeps the list iff cf ≥ τ.
pub fn index_reduce(mut postings: Vec<Posting>, tau: u64) -> Result<Option<PostingList>> {
    postings.sort_by_key(|p| p.doc);
    if let Some(w) = postings.windows(2).find(|w| w[0].doc == w[1].doc) {
        return Err(Error::NonUniquePosting(w[0].doc));
    }
    let list = PostingList(postings);
    Ok((list.cf() >= tau).then_some(list))
}

/// Which end of the value's n-gram the join key is.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum JoinSide {
    /// The key is the n-gram's prefix (the n-gram extends to the right).
    Right,
    /// The key is the n-gram's suffix (the n-gram extends to the left).
    Left,
}

impl JoinSide {
    fn tag(self) -> u8 {
        match self {
            JoinSide::Right => 0,
            JoinSide::Left => 1,
        }
    }

    fn from_tag(tag: u8) -> Result<Self> {
        match tag {
            0 => Ok(JoinSide::Right),
            1 => Ok(JoinSide::Left),
            _ => Err(Error::CorruptEncoding),
        }
    }
}

/// A tagged join value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JoinValue {
    pub side: JoinSide,
    pub gram: TermSequence,
    pub list: PostingList,
}

impl JoinValue {
    pub fn write(&self, out: &mut Vec<u8>) {
        out.push(self.side.tag());
        write_sequence(out, &self.gram);
        self.list.write(out);
    }

    pub fn read(mut input: &[u8]) -> Result<JoinValue> {
        let (&tag, rest) = input.split_first().ok_or(Error::CorruptEncoding)?;
        input = rest;
        let side = JoinSide::from_tag(tag)?;
        let gram = read_sequence(&mut input)?;
        let list = PostingList::read(&mut input)?;
        if !input.is_empty() {
            return Err(Error::CorruptEncoding);
        }
        Ok(JoinValue { side, gram, list })
    }
}

/// Keys `s` by its prefix and by its suffix.
pub fn join_map(s: &TermSequence, list: &PostingList) -> Result<[(TermSequence, JoinValue); 2]> {
    if s.len() < 2 {
        return Err(Error::InvalidParameter(format!("join input {s:?} is shorter than 2 terms")));
    }
    let value = |side| JoinValue { side, gram: s.clone(), list: list.clone() };
    Ok([
        (TermSequence::from(&s[..s.len() - 1]), value(JoinSide::Right)),
        (TermSequence::from(&s[1..]), value(JoinSide::Left)),
    ])
}

/// Positions p of `m` such that `n` occurs at p + 1, per common document.
pub fn join_postings(m: &PostingList, n: &PostingList) -> PostingList {
    let mut out = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < m.0.len() && j < n.0.len() {
        let (pm, pn) = (&m.0[i], &n.0[j]);
        if pm.doc < pn.doc {
            i += 1;
        } else if pm.doc > pn.doc {
            j += 1;
        } else {
            let positions = adjacent(&pm.positions, &pn.positions);
            if !positions.is_empty() {
                out.push(Posting::new(pm.doc, positions));
            }
            i += 1;
            j += 1;
        }
    }
    PostingList(out)
}

fn adjacent(left: &[u32], right: &[u32]) -> Vec<u32> {
    let mut out = Vec::new();
    let mut j = 0;
    for &p in left {
        while j < right.len() && right[j] < p + 1 {
            j += 1;
        }
        if j < right.len() && right[j] == p + 1 {
            out.push(p);
        }
    }
    out
}

/// Joins every left-extending n-gram m with every right-extending n-gram n
/// of one key; emits m followed by the last term of n when cf ≥ τ.
pub fn join_reduce(values: &[JoinValue], tau: u64) -> Vec<(TermSequence, PostingList)> {
    let mut out = Vec::new();
    for m in values.iter().filter(|v| v.side == JoinSide::Left) {
        for n in values.iter().filter(|v| v.side == JoinSide::Right) {
            let list = join_postings(&m.list, &n.list);
            if !list.is_empty() && list.cf() >= tau {
                out.push((m.gram.concat(&n.gram[n.gram.len() - 1..]), list));
            }
        }
    }
    out
}

struct IndexJob {
    k: usize,
    tau: u64,
    partitions: usize,
}

impl Job for IndexJob {
    type Input = Document;
    type State = ();
    type Output = (TermSequence, PostingList);

    fn name(&self) -> &str {
        "apriori-index"
    }

    fn iteration(&self) -> u32 {
        self.k as u32
    }

    fn partitions(&self) -> usize {
        self.partitions
    }

    fn map(&self, doc: &Document, out: &mut Emitter<'_>) -> Result<()> {
        let mut buf = Vec::new();
        for (gram, positions) in positions_by_gram(doc, self.k) {
            buf.clear();
            Posting { doc: doc.id, positions }.write(&mut buf);
            out.emit(gram, &buf)?;
        }
        Ok(())
    }

    fn create_state(&self) {}

    fn reduce(&self, key: &[TermId], values: Values<'_>, _: &mut (), out: &mut Vec<Self::Output>) -> Result<()> {
        let postings = values.map(|mut v| Posting::read(&mut v)).collect::<Result<Vec<_>>>()?;
        if let Some(list) = index_reduce(postings, self.tau)? {
            out.push((key.into(), list));
        }
        Ok(())
    }
}

struct JoinJob {
    k: usize,
    tau: u64,
    partitions: usize,
    buffer_cap: usize,
}

impl Job for JoinJob {
    type Input = (TermSequence, PostingList);
    type State = ();
    type Output = (TermSequence, PostingList);

    fn name(&self) -> &str {
        "apriori-index"
    }

    fn iteration(&self) -> u32 {
        self.k as u32
    }

    fn partitions(&self) -> usize {
        self.partitions
    }

    fn map(&self, (gram, list): &(TermSequence, PostingList), out: &mut Emitter<'_>) -> Result<()> {
        let mut buf = Vec::new();
        for (key, value) in join_map(gram, list)? {
            buf.clear();
            value.write(&mut buf);
            out.emit(&key, &buf)?;
        }
        Ok(())
    }

    fn create_state(&self) {}

    fn reduce(&self, _key: &[TermId], values: Values<'_>, _: &mut (), out: &mut Vec<Self::Output>) -> Result<()> {
        let mut buffered = Vec::with_capacity(values.len());
        let mut postings = 0;
        for v in values {
            let value = JoinValue::read(v)?;
            postings += value.list.0.len();
            if postings > self.buffer_cap {
                return Err(Error::JoinBufferOverflow(self.buffer_cap));
            }
            buffered.push(value);
        }
        out.extend(join_reduce(&buffered, self.tau));
        Ok(())
    }
}

const JOIN_SPLIT: usize = 4096;

/// Apriori-Index keeping the posting lists of all frequent n-grams.
pub fn run_apriori_index_postings(
    engine: &Engine,
    corpus: &Corpus,
    params: &RunParams,
) -> Result<MethodReport<PostingList>> {
    params.validate()?;
    if params.k < 2 {
        return Err(Error::InvalidParameter("apriori-index requires K >= 2".into()));
    }
    let (split, split_job) = split_corpus(engine, corpus, params)?;
    let shards = split.splits(engine.config().split_size);
    let limit = params.sigma.limit();
    let phase_one = params.k.min(limit);

    let mut previous: Vec<(TermSequence, PostingList)> = Vec::new();
    let mut stats = Vec::new();
    let chain = engine.run_chain(
        |engine, k| {
            let ku = k as usize;
            let output = if ku <= phase_one {
                engine.run_job(&IndexJob { k: ku, tau: params.tau, partitions: params.reducers }, &shards)?
            } else {
                let job =
                    JoinJob { k: ku, tau: params.tau, partitions: params.reducers, buffer_cap: params.join_buffer_cap };
                let inputs: Vec<&[(TermSequence, PostingList)]> = previous.chunks(JOIN_SPLIT).collect();
                engine.run_job(&job, &inputs)?
            };
            let counters = output.counters.clone();
            let mut records = output.into_records();
            records.sort_by(|a, b| a.0.cmp(&b.0));
            if let Some(dir) = &params.keep_intermediate {
                write_iteration(dir, "apriori-index", k, &records, |list, buf| list.write(buf))?;
            }
            let output_records = records.len();
            stats.extend(std::mem::take(&mut previous));
            previous = records;
            Ok(Some(Iteration { counters, output_records }))
        },
        |k, it| it.output_records == 0 || k as usize >= limit,
    )?;
    stats.extend(previous);
    stats.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(MethodReport { stats, split_job: Some(split_job), jobs: chain.iterations })
}

pub fn run_apriori_index(engine: &Engine, corpus: &Corpus, params: &RunParams) -> Result<MethodReport> {
    let report = run_apriori_index_postings(engine, corpus, params)?;
    Ok(MethodReport {
        stats: report.stats.into_iter().map(|(g, list)| (g, list.cf())).collect(),
        split_job: report.split_job,
        jobs: report.jobs,
    })
}
