//! Per-year occurrence counts in place of plain collection frequencies.

use std::collections::BTreeMap;

use crate::corpus::codec::{read_varint, read_varint_u32, write_varint};
use crate::corpus::io::RenderValue;
use crate::corpus::{Corpus, Document};
use crate::engine::{Engine, Values};
use crate::error::{Error, Result};
use crate::methods::suffix::{run_suffix_job, Aggregate, SuffixAggregate};
use crate::methods::{sorted, split_corpus, MethodReport, RunParams};

/// Sparse year to count map; zero counts are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TimeSeries(BTreeMap<u32, u64>);

impl TimeSeries {
    pub fn new() -> Self {
        TimeSeries::default()
    }

    pub fn add(&mut self, year: u32, count: u64) {
        if count > 0 {
            *self.0.entry(year).or_insert(0) += count;
        }
    }

    pub fn get(&self, year: u32) -> u64 {
        self.0.get(&year).copied().unwrap_or(0)
    }

    pub fn as_map(&self) -> &BTreeMap<u32, u64> {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, u64)> + '_ {
        self.0.iter().map(|(&y, &c)| (y, c))
    }

    pub fn read(input: &mut &[u8]) -> Result<TimeSeries> {
        let n = read_varint(input)?;
        let mut series = TimeSeries::new();
        for _ in 0..n {
            let year = read_varint_u32(input)?;
            let count = read_varint(input)?;
            series.add(year, count);
        }
        Ok(series)
    }
}

impl FromIterator<(u32, u64)> for TimeSeries {
    fn from_iter<I: IntoIterator<Item = (u32, u64)>>(iter: I) -> Self {
        let mut series = TimeSeries::new();
        for (year, count) in iter {
            series.add(year, count);
        }
        series
    }
}

impl Aggregate for TimeSeries {
    fn merge(&mut self, other: &TimeSeries) {
        for (year, count) in other.iter() {
            self.add(year, count);
        }
    }

    fn total(&self) -> u64 {
        self.0.values().sum()
    }
}

impl SuffixAggregate for TimeSeries {
    /// Doc id and year.
    fn map_value(doc: &Document, buf: &mut Vec<u8>) -> Result<()> {
        let year = doc.year.ok_or(Error::UntimedDocument(doc.id))?;
        write_varint(buf, doc.id);
        write_varint(buf, year as u64);
        Ok(())
    }

    fn from_values(values: Values<'_>, combined: bool) -> Result<TimeSeries> {
        let mut series = TimeSeries::new();
        for mut v in values {
            if combined {
                series.merge(&TimeSeries::read(&mut v)?);
            } else {
                read_varint(&mut v)?;
                series.add(read_varint_u32(&mut v)?, 1);
            }
        }
        Ok(series)
    }

    fn write(&self, buf: &mut Vec<u8>) {
        write_varint(buf, self.0.len() as u64);
        for (year, count) in self.iter() {
            write_varint(buf, year as u64);
            write_varint(buf, count);
        }
    }
}

impl RenderValue for TimeSeries {
    /// `year:count` pairs joined by commas, ascending by year.
    fn render(&self) -> String {
        self.iter().map(|(y, c)| format!("{y}:{c}")).collect::<Vec<_>>().join(",")
    }
}

/// Suffix-σ aggregating time series; an n-gram is kept iff its total reaches τ.
pub fn run_suffix_sigma_timeseries(
    engine: &Engine,
    corpus: &Corpus,
    params: &RunParams,
) -> Result<MethodReport<TimeSeries>> {
    params.validate()?;
    if let Some(doc) = corpus.documents.iter().find(|d| d.year.is_none()) {
        return Err(Error::UntimedDocument(doc.id));
    }
    let (split, split_job) = split_corpus(engine, corpus, params)?;
    let output = run_suffix_job::<TimeSeries>(engine, &split, params, None)?;
    let counters = output.counters.clone();
    Ok(MethodReport { stats: sorted(output.into_records()), split_job: Some(split_job), jobs: vec![counters] })
}
