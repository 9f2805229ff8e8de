//! Frequent n-gram statistics over a local MapReduce-style engine.
//!
//! The crate computes, for a corpus of term-id sequences, every n-gram of
//! length at most `sigma` that occurs at least `tau` times, using one of four
//! interchangeable methods:
//!
//! * [`methods::naive`] emits every n-gram occurrence and counts them.
//! * [`methods::apriori_scan`] runs one scan per n-gram length and prunes
//!   candidates whose constituent (k-1)-grams are infrequent.
//! * [`methods::apriori_index`] builds positional posting lists up to length
//!   `K` and then joins posting lists for longer n-grams.
//! * [`methods::suffix`] emits one truncated suffix per term occurrence, sorts
//!   suffixes in reverse lexicographic order and aggregates prefix counts with
//!   two stacks in a single job.
//!
//! All methods run on [`engine::Engine`], which records shuffle counters so
//! the methods can be compared by the number of records and bytes moved
//! between map and reduce. [`extensions`] adds maximal/closed n-gram output and
//! per-year time series on top of the suffix method, and [`oracle`] is an
//! independent brute-force reference used for verification.

pub mod corpus;
pub mod engine;
pub mod error;
pub mod extensions;
pub mod methods;
pub mod oracle;
pub mod synth;

pub use corpus::{Corpus, Dictionary, Document, TermId, TermSequence};
pub use engine::{Counters, Engine, EngineConfig};
pub use error::{Error, Result};
pub use methods::{Method, MethodReport, RunParams, Sigma};
