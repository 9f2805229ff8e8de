use std::cmp::Ordering;
use std::io::{self, Write};

use rayon::slice::ParallelSliceMut;

use crate::corpus::codec::{read_sequence_into, read_varint, write_sequence, write_varint};
use crate::corpus::TermId;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug)]
struct RecordRef {
    key_start: u32,
    key_len: u32,
    value_start: u32,
    value_len: u32,
}

/// Arena-backed key-value records of one partition.
///
/// Keys live in one flat term array and values in one flat byte array so a
/// record costs 16 bytes of bookkeeping plus its payload.
#[derive(Debug, Default)]
pub(crate) struct PartitionBuffer {
    terms: Vec<TermId>,
    values: Vec<u8>,
    records: Vec<RecordRef>,
}

fn offset(n: usize) -> Option<u32> {
    u32::try_from(n).ok()
}

impl PartitionBuffer {
    pub(crate) fn len(&self) -> usize {
        self.records.len()
    }

    pub(crate) fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Returns `false` when the arena offsets would overflow.
    #[must_use]
    pub(crate) fn push(&mut self, key: &[TermId], value: &[u8]) -> bool {
        let (Some(key_start), Some(key_len), Some(value_start), Some(value_len)) =
            (offset(self.terms.len()), offset(key.len()), offset(self.values.len()), offset(value.len()))
        else {
            return false;
        };
        if offset(self.terms.len() + key.len()).is_none() || offset(self.values.len() + value.len()).is_none() {
            return false;
        }
        self.terms.extend_from_slice(key);
        self.values.extend_from_slice(value);
        self.records.push(RecordRef { key_start, key_len, value_start, value_len });
        true
    }

    /// Moves all records of `other` behind the records of `self`.
    #[must_use]
    pub(crate) fn append(&mut self, other: PartitionBuffer) -> bool {
        if self.is_empty() {
            *self = other;
            return true;
        }
        let (Some(key_shift), Some(value_shift)) = (offset(self.terms.len()), offset(self.values.len())) else {
            return false;
        };
        if offset(self.terms.len() + other.terms.len()).is_none()
            || offset(self.values.len() + other.values.len()).is_none()
        {
            return false;
        }
        self.terms.extend_from_slice(&other.terms);
        self.values.extend_from_slice(&other.values);
        self.records.extend(other.records.iter().map(|r| RecordRef {
            key_start: r.key_start + key_shift,
            value_start: r.value_start + value_shift,
            ..*r
        }));
        true
    }

    #[inline]
    fn key(&self, r: &RecordRef) -> &[TermId] {
        &self.terms[r.key_start as usize..(r.key_start + r.key_len) as usize]
    }

    #[inline]
    fn value(&self, r: &RecordRef) -> &[u8] {
        &self.values[r.value_start as usize..(r.value_start + r.value_len) as usize]
    }

    /// Stable sort of the records by key.
    pub(crate) fn sort_by<F>(&mut self, compare: F)
    where
        F: Fn(&[TermId], &[TermId]) -> Ordering + Sync,
    {
        let terms = &self.terms;
        let key = |r: &RecordRef| &terms[r.key_start as usize..(r.key_start + r.key_len) as usize];
        self.records.par_sort_by(|a, b| compare(key(a), key(b)));
    }

    /// Keys of up to `n` evenly spaced records.
    pub(crate) fn sample_keys(&self, n: usize) -> Vec<&[TermId]> {
        if self.records.is_empty() || n == 0 {
            return Vec::new();
        }
        let step = (self.records.len() / n).max(1);
        self.records.iter().step_by(step).take(n).map(|r| self.key(r)).collect()
    }

    /// Runs of consecutive records whose keys compare equal.
    pub(crate) fn groups<'a, F>(&'a self, compare: F) -> Groups<'a, F>
    where
        F: Fn(&[TermId], &[TermId]) -> Ordering,
    {
        Groups { buffer: self, pos: 0, compare }
    }

    /// Serialized record stream: key sequence, value length, value bytes.
    pub(crate) fn write_to<W: Write>(&self, out: &mut W) -> io::Result<()> {
        let mut buf = Vec::with_capacity(64);
        for r in &self.records {
            buf.clear();
            write_sequence(&mut buf, self.key(r));
            write_varint(&mut buf, r.value_len as u64);
            buf.extend_from_slice(self.value(r));
            out.write_all(&buf)?;
        }
        Ok(())
    }

    /// Appends the records of a stream produced by [`Self::write_to`].
    pub(crate) fn read_from(&mut self, mut input: &[u8], partition: usize) -> Result<()> {
        while !input.is_empty() {
            let key_start = self.terms.len();
            let key_len = read_sequence_into(&mut input, &mut self.terms)?;
            let value_len = read_varint(&mut input)? as usize;
            if value_len > input.len() {
                return Err(Error::CorruptEncoding);
            }
            let value_start = self.values.len();
            self.values.extend_from_slice(&input[..value_len]);
            input = &input[value_len..];
            let (Some(ks), Some(kl), Some(vs), Some(vl), Some(_), Some(_)) = (
                offset(key_start),
                offset(key_len),
                offset(value_start),
                offset(value_len),
                offset(self.terms.len()),
                offset(self.values.len()),
            ) else {
                return Err(Error::ArenaOverflow(partition));
            };
            self.records.push(RecordRef { key_start: ks, key_len: kl, value_start: vs, value_len: vl });
        }
        Ok(())
    }
}

pub(crate) struct Groups<'a, F> {
    buffer: &'a PartitionBuffer,
    pos: usize,
    compare: F,
}

impl<'a, F> Iterator for Groups<'a, F>
where
    F: Fn(&[TermId], &[TermId]) -> Ordering,
{
    type Item = (&'a [TermId], Values<'a>);

    fn next(&mut self) -> Option<Self::Item> {
        let records = &self.buffer.records;
        let first = records.get(self.pos)?;
        let key = self.buffer.key(first);
        let end = records[self.pos + 1..]
            .iter()
            .position(|r| (self.compare)(self.buffer.key(r), key) != Ordering::Equal)
            .map_or(records.len(), |i| self.pos + 1 + i);
        let values = Values { buffer: self.buffer, records: &records[self.pos..end] };
        self.pos = end;
        Some((key, values))
    }
}

/// The values of one key group, in shuffle order.
#[derive(Clone)]
pub struct Values<'a> {
    buffer: &'a PartitionBuffer,
    records: &'a [RecordRef],
}

impl<'a> Iterator for Values<'a> {
    type Item = &'a [u8];

    fn next(&mut self) -> Option<&'a [u8]> {
        let (first, rest) = self.records.split_first()?;
        self.records = rest;
        Some(self.buffer.value(first))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        (self.records.len(), Some(self.records.len()))
    }
}

impl ExactSizeIterator for Values<'_> {}
