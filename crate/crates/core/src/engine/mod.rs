//! A local MapReduce-style runtime.
//!
//! A [`Job`] supplies map, partition, compare, optional combine and reduce
//! callbacks. [`Engine::run_job`] runs one map task per input shard, routes
//! every emitted pair to `partition(key)`, sorts each partition with the job's
//! comparator and hands consecutive equal keys to `reduce` as one group.
//! Reduce state is created once per partition, threaded through every group
//! in sort order and finally passed to `cleanup`.
//!
//! Results do not depend on the worker count: map outputs are concatenated in
//! shard order and partitions are sorted stably.

mod buffer;
mod chain;
mod counters;

use std::cmp::Ordering;
use std::fs;
use std::hash::Hasher;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::time::Instant;

use rayon::prelude::*;
use rustc_hash::FxHasher;

use crate::corpus::codec::sequence_len;
use crate::corpus::TermId;
use crate::error::{Error, Result};
use buffer::PartitionBuffer;

pub use buffer::Values;
pub use chain::{ChainReport, Iteration};
pub use counters::Counters;

/// Where map output waits between the map and the reduce phase.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub enum ShuffleStorage {
    /// All map output stays in memory.
    #[default]
    Memory,
    /// Each map task writes one segment file per partition into a temporary
    /// directory (under the given parent, or the system temp dir). Reducers
    /// load one partition at a time, so peak memory is bounded by the largest
    /// partition rather than the whole map output.
    LocalDisk(Option<PathBuf>),
}

#[derive(Clone, Debug)]
pub struct EngineConfig {
    /// Threads for map tasks and reduce partitions.
    pub workers: usize,
    /// Maximum number of shuffled records per reduce partition.
    pub partition_record_cap: usize,
    /// Maximum number of chained iterations.
    pub chain_cap: usize,
    /// Target term occurrences per map task when splitting a corpus.
    pub split_size: usize,
    /// Keys sampled per partition to sanity-check the comparator.
    pub comparator_sample: usize,
    pub shuffle: ShuffleStorage,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
            partition_record_cap: 50_000_000,
            chain_cap: 1000,
            split_size: 1 << 16,
            comparator_sample: 12,
            shuffle: ShuffleStorage::Memory,
        }
    }
}

/// The callbacks of one map/shuffle/reduce pass.
pub trait Job: Sync {
    type Input: Sync;
    type State: Send;
    type Output: Send;

    fn name(&self) -> &str;

    /// Reported in the counters; chained jobs number their iterations from 1.
    fn iteration(&self) -> u32 {
        1
    }

    /// Number of reduce partitions `R`.
    fn partitions(&self) -> usize;

    fn map(&self, input: &Self::Input, out: &mut Emitter<'_>) -> Result<()>;

    /// Must return an index in `0..R`.
    fn partition(&self, key: &[TermId]) -> Result<usize> {
        Ok(hash_partition(key, self.partitions()))
    }

    /// Total order in which reduce sees keys.
    fn compare(&self, a: &[TermId], b: &[TermId]) -> Ordering {
        a.cmp(b)
    }

    fn has_combiner(&self) -> bool {
        false
    }

    /// Map-side pre-aggregation of one key group of a single map task.
    fn combine(&self, key: &[TermId], values: Values<'_>, out: &mut Emitter<'_>) -> Result<()> {
        for v in values {
            out.emit(key, v)?;
        }
        Ok(())
    }

    fn create_state(&self) -> Self::State;

    fn reduce(
        &self,
        key: &[TermId],
        values: Values<'_>,
        state: &mut Self::State,
        out: &mut Vec<Self::Output>,
    ) -> Result<()>;

    /// Called once per partition after its last group.
    fn cleanup(&self, _state: &mut Self::State, _out: &mut Vec<Self::Output>) -> Result<()> {
        Ok(())
    }
}

/// Default partitioner: a deterministic hash of the whole key.
pub fn hash_partition(key: &[TermId], partitions: usize) -> usize {
    let mut hasher = FxHasher::default();
    for &t in key {
        hasher.write_u32(t);
    }
    (hasher.finish() % partitions.max(1) as u64) as usize
}

/// Sink for map and combine output.
pub struct Emitter<'a> {
    partitioner: &'a (dyn Fn(&[TermId]) -> Result<usize> + Sync),
    buffers: Vec<PartitionBuffer>,
    records: u64,
    bytes: u64,
}

impl<'a> Emitter<'a> {
    fn new(partitioner: &'a (dyn Fn(&[TermId]) -> Result<usize> + Sync), partitions: usize) -> Self {
        Emitter {
            partitioner,
            buffers: (0..partitions).map(|_| PartitionBuffer::default()).collect(),
            records: 0,
            bytes: 0,
        }
    }

    pub fn emit(&mut self, key: &[TermId], value: &[u8]) -> Result<()> {
        let partitions = self.buffers.len();
        let index = (self.partitioner)(key)?;
        let buffer = self.buffers.get_mut(index).ok_or(Error::PartitionOutOfRange { index, partitions })?;
        if !buffer.push(key, value) {
            return Err(Error::ArenaOverflow(index));
        }
        self.records += 1;
        self.bytes += (sequence_len(key) + value.len()) as u64;
        Ok(())
    }
}

/// Reduce output grouped by partition, plus the job's counters.
#[derive(Debug)]
pub struct JobOutput<O> {
    pub partitions: Vec<Vec<O>>,
    pub counters: Counters,
}

impl<O> JobOutput<O> {
    /// All records, partition by partition.
    pub fn into_records(self) -> Vec<O> {
        self.partitions.into_iter().flatten().collect()
    }
}

struct MapTask {
    buffers: Vec<PartitionBuffer>,
    pre_combiner: u64,
    records: u64,
    bytes: u64,
}

pub struct Engine {
    config: EngineConfig,
    pool: rayon::ThreadPool,
}

impl Engine {
    pub fn new(config: EngineConfig) -> Result<Self> {
        if config.workers == 0 {
            return Err(Error::InvalidParameter("workers must be at least 1".into()));
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.workers)
            .build()
            .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
        Ok(Engine { config, pool })
    }

    pub fn config(&self) -> &EngineConfig {
        &self.config
    }

    /// Runs `job` with one map task per shard.
    pub fn run_job<J: Job>(&self, job: &J, shards: &[&[J::Input]]) -> Result<JobOutput<J::Output>> {
        self.run_job_inner(job, shards).map_err(|e| e.in_job(job.name(), job.iteration()))
    }

    fn run_job_inner<J: Job>(&self, job: &J, shards: &[&[J::Input]]) -> Result<JobOutput<J::Output>> {
        let started = Instant::now();
        let partitions = job.partitions();
        if partitions == 0 {
            return Err(Error::InvalidParameter("at least one reduce partition is required".into()));
        }
        let staging = match &self.config.shuffle {
            ShuffleStorage::Memory => None,
            ShuffleStorage::LocalDisk(Some(parent)) => {
                fs::create_dir_all(parent)?;
                Some(tempfile::Builder::new().prefix("shuffle-").tempdir_in(parent)?)
            }
            ShuffleStorage::LocalDisk(None) => Some(tempfile::Builder::new().prefix("shuffle-").tempdir()?),
        };
        let segment = |task: usize, partition: usize| {
            staging.as_ref().map(|dir| dir.path().join(format!("{task:06}-{partition:05}.seg")))
        };

        let tasks: Vec<MapTask> = self.pool.install(|| {
            shards
                .par_iter()
                .enumerate()
                .map(|(t, shard)| {
                    let mut task = self.run_map_task(job, shard)?;
                    if staging.is_some() {
                        for (p, buffer) in task.buffers.iter_mut().enumerate() {
                            if buffer.is_empty() {
                                continue;
                            }
                            let path = segment(t, p).expect("staging directory");
                            let mut out = BufWriter::new(fs::File::create(path)?);
                            buffer.write_to(&mut out)?;
                            out.flush()?;
                            *buffer = PartitionBuffer::default();
                        }
                    }
                    Ok(task)
                })
                .collect::<Result<Vec<_>>>()
        })?;

        let mut counters = Counters::new(job.name(), job.iteration());
        let mut task_buffers: Vec<Vec<PartitionBuffer>> = Vec::with_capacity(tasks.len());
        for task in tasks {
            counters.map_output_records_pre_combiner += task.pre_combiner;
            counters.map_output_records += task.records;
            counters.map_output_bytes += task.bytes;
            task_buffers.push(task.buffers);
        }

        // In memory, transpose task buffers into partition buffers in task
        // order; staged partitions are loaded by their reducer instead.
        let cap = self.config.partition_record_cap;
        let in_memory: Vec<Option<PartitionBuffer>> = if staging.is_some() {
            (0..partitions).map(|_| None).collect()
        } else {
            (0..partitions)
                .map(|p| {
                    let size: usize = task_buffers.iter().map(|b| b[p].len()).sum();
                    if size > cap {
                        return Err(Error::PartitionCapExceeded { partition: p, cap });
                    }
                    let mut merged = PartitionBuffer::default();
                    for buffers in task_buffers.iter_mut() {
                        if !merged.append(std::mem::take(&mut buffers[p])) {
                            return Err(Error::ArenaOverflow(p));
                        }
                    }
                    Ok(Some(merged))
                })
                .collect::<Result<_>>()?
        };
        drop(task_buffers);
        let task_count = shards.len();

        let outputs: Vec<Vec<J::Output>> = self.pool.install(|| {
            in_memory
                .into_par_iter()
                .enumerate()
                .map(|(p, buffer)| {
                    let buffer = match buffer {
                        Some(b) => b,
                        None => {
                            let mut b = PartitionBuffer::default();
                            for t in 0..task_count {
                                let path = segment(t, p).expect("staging directory");
                                if path.exists() {
                                    b.read_from(&fs::read(&path)?, p)?;
                                    fs::remove_file(&path)?;
                                }
                                if b.len() > cap {
                                    return Err(Error::PartitionCapExceeded { partition: p, cap });
                                }
                            }
                            b
                        }
                    };
                    self.reduce_partition(job, buffer)
                })
                .collect::<Result<Vec<_>>>()
        })?;

        counters.reduce_output_records = outputs.iter().map(|o| o.len() as u64).sum();
        counters.wall_ms = started.elapsed().as_millis() as u64;
        Ok(JobOutput { partitions: outputs, counters })
    }

    fn run_map_task<J: Job>(&self, job: &J, shard: &[J::Input]) -> Result<MapTask> {
        let partitioner = |key: &[TermId]| job.partition(key);
        let mut emitter = Emitter::new(&partitioner, job.partitions());
        for input in shard {
            job.map(input, &mut emitter)?;
        }
        if !job.has_combiner() {
            return Ok(MapTask {
                pre_combiner: emitter.records,
                records: emitter.records,
                bytes: emitter.bytes,
                buffers: emitter.buffers,
            });
        }

        let pre_combiner = emitter.records;
        let mut combined = Emitter::new(&partitioner, job.partitions());
        let compare = |a: &[TermId], b: &[TermId]| job.compare(a, b);
        for mut buffer in emitter.buffers {
            if buffer.is_empty() {
                continue;
            }
            buffer.sort_by(compare);
            for (key, values) in buffer.groups(compare) {
                job.combine(key, values, &mut combined)?;
            }
        }
        Ok(MapTask { pre_combiner, records: combined.records, bytes: combined.bytes, buffers: combined.buffers })
    }

    fn reduce_partition<J: Job>(&self, job: &J, mut buffer: PartitionBuffer) -> Result<Vec<J::Output>> {
        let compare = |a: &[TermId], b: &[TermId]| job.compare(a, b);
        check_comparator(&buffer.sample_keys(self.config.comparator_sample), compare)?;
        buffer.sort_by(compare);

        let mut state = job.create_state();
        let mut out = Vec::new();
        for (key, values) in buffer.groups(compare) {
            job.reduce(key, values, &mut state, &mut out)?;
        }
        job.cleanup(&mut state, &mut out)?;
        Ok(out)
    }
}

/// Checks reflexivity, antisymmetry and transitivity on a sample of keys.
fn check_comparator<F>(keys: &[&[TermId]], compare: F) -> Result<()>
where
    F: Fn(&[TermId], &[TermId]) -> Ordering,
{
    for a in keys {
        if compare(a, a) != Ordering::Equal {
            return Err(Error::InvalidComparator);
        }
        for b in keys {
            let ab = compare(a, b);
            if ab != compare(b, a).reverse() {
                return Err(Error::InvalidComparator);
            }
            if ab == Ordering::Greater {
                continue;
            }
            for c in keys {
                if compare(b, c) != Ordering::Greater && compare(a, c) == Ordering::Greater {
                    return Err(Error::InvalidComparator);
                }
            }
        }
    }
    Ok(())
}
