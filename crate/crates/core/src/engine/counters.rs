use serde::{Deserialize, Serialize};

/// Shuffle metrics of one job, serialized as one counter report object.
///
/// `map_output_records_pre_combiner` counts every pair the map function
/// emitted. `map_output_records` and `map_output_bytes` describe what was
/// actually shuffled, i.e. after the combiner when one runs. Bytes are the
/// varint-encoded key plus the raw value bytes of each shuffled record.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counters {
    pub job: String,
    pub iteration: u32,
    pub map_output_records_pre_combiner: u64,
    pub map_output_records: u64,
    pub map_output_bytes: u64,
    pub reduce_output_records: u64,
    pub wall_ms: u64,
}

impl Counters {
    pub fn new(job: impl Into<String>, iteration: u32) -> Self {
        Counters { job: job.into(), iteration, ..Default::default() }
    }

    /// Adds the metrics of `other`, keeping the name of `self`.
    pub fn accumulate(&mut self, other: &Counters) {
        self.map_output_records_pre_combiner += other.map_output_records_pre_combiner;
        self.map_output_records += other.map_output_records;
        self.map_output_bytes += other.map_output_bytes;
        self.reduce_output_records += other.reduce_output_records;
        self.wall_ms += other.wall_ms;
    }

    /// Sum of `jobs`, reported under `name` with iteration 0.
    pub fn total<'a, I>(name: &str, jobs: I) -> Counters
    where
        I: IntoIterator<Item = &'a Counters>,
    {
        let mut total = Counters::new(name, 0);
        for c in jobs {
            total.accumulate(c);
        }
        total
    }
}
