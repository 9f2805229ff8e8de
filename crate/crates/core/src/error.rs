use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty corpus")]
    EmptyCorpus,

    #[error("corrupt encoding")]
    CorruptEncoding,

    #[error("invalid comparator")]
    InvalidComparator,

    #[error("partition index {index} out of range for {partitions} partitions")]
    PartitionOutOfRange { index: usize, partitions: usize },

    #[error("partition {partition} exceeded the record cap of {cap}")]
    PartitionCapExceeded { partition: usize, cap: usize },

    #[error("shuffle arena overflow in partition {0}")]
    ArenaOverflow(usize),

    #[error("runaway chain: more than {0} iterations")]
    RunawayChain(usize),

    #[error("dictionary too large: {entries} entries exceed the cap of {cap}")]
    DictionaryTooLarge { entries: usize, cap: usize },

    #[error("non-unique posting for document {0}")]
    NonUniquePosting(u64),

    #[error("join buffer overflow: more than {0} postings buffered for one key")]
    JoinBufferOverflow(usize),

    #[error("unsorted reduce input")]
    UnsortedReduceInput,

    #[error("untimed document {0}")]
    UntimedDocument(u64),

    #[error("empty key cannot be partitioned")]
    EmptyKey,

    #[error("oracle guard exceeded: {0} n-gram occurrences")]
    OracleGuard(u64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("malformed {what} at line {line}")]
    Parse { what: &'static str, line: usize },

    #[error("job `{job}` (iteration {iteration}) failed: {source}")]
    Job {
        job: String,
        iteration: u32,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn in_job(self, job: &str, iteration: u32) -> Error {
        match self {
            e @ Error::Job { .. } => e,
            e => Error::Job { job: job.to_string(), iteration, source: Box::new(e) },
        }
    }

    /// Strips any job context and returns the underlying error.
    pub fn root(&self) -> &Error {
        match self {
            Error::Job { source, .. } => source.root(),
            e => e,
        }
    }
}
