use std::collections::HashMap;
use std::fmt::Write as _;

use super::{TermId, TermSequence};
use crate::error::{Error, Result};

/// Bidirectional term/id map; ids are ranked by descending collection
/// frequency, ties broken by ascending surface form.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Dictionary {
    terms: Vec<String>,
    frequencies: Vec<u64>,
    ids: HashMap<String, TermId>,
}

impl Dictionary {
    /// Counts every token and assigns frequency-ranked ids.
    pub fn build<'a, I>(tokens: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a str>,
    {
        let mut counts: HashMap<&'a str, u64> = HashMap::new();
        for token in tokens {
            *counts.entry(token).or_insert(0) += 1;
        }
        if counts.is_empty() {
            return Err(Error::EmptyCorpus);
        }
        Self::from_counts(counts.into_iter().map(|(t, c)| (t.to_string(), c)))
    }

    /// Ranks already-counted terms.
    pub fn from_counts<I>(counts: I) -> Result<Self>
    where
        I: IntoIterator<Item = (String, u64)>,
    {
        let mut entries: Vec<(String, u64)> = counts.into_iter().collect();
        if entries.is_empty() {
            return Err(Error::EmptyCorpus);
        }
        entries.sort_by(|(ta, ca), (tb, cb)| cb.cmp(ca).then_with(|| ta.cmp(tb)));
        let mut dict = Dictionary {
            terms: Vec::with_capacity(entries.len()),
            frequencies: Vec::with_capacity(entries.len()),
            ids: HashMap::with_capacity(entries.len()),
        };
        for (id, (term, cf)) in entries.into_iter().enumerate() {
            if dict.ids.insert(term.clone(), id as TermId).is_some() {
                return Err(Error::InvalidParameter(format!("duplicate dictionary term {term:?}")));
            }
            dict.terms.push(term);
            dict.frequencies.push(cf);
        }
        Ok(dict)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn id(&self, term: &str) -> Option<TermId> {
        self.ids.get(term).copied()
    }

    pub fn term(&self, id: TermId) -> Option<&str> {
        self.terms.get(id as usize).map(String::as_str)
    }

    pub fn frequency(&self, id: TermId) -> Option<u64> {
        self.frequencies.get(id as usize).copied()
    }

    /// `(surface, id, cf)` in id order.
    pub fn entries(&self) -> impl Iterator<Item = (&str, TermId, u64)> {
        self.terms.iter().zip(&self.frequencies).enumerate().map(|(id, (t, &cf))| (t.as_str(), id as TermId, cf))
    }

    /// Encodes known tokens; unknown tokens are skipped.
    pub fn encode<'a, I>(&self, tokens: I) -> TermSequence
    where
        I: IntoIterator<Item = &'a str>,
    {
        TermSequence::new(tokens.into_iter().filter_map(|t| self.id(t)).collect())
    }

    /// Space-joined surface form; unknown ids render as `#id`.
    pub fn render(&self, terms: &[TermId]) -> String {
        let mut out = String::new();
        for (i, &t) in terms.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            match self.term(t) {
                Some(s) => out.push_str(s),
                None => {
                    let _ = write!(out, "#{t}");
                }
            }
        }
        out
    }

    /// One `surface TAB id TAB cf` line per term, in id order.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for (term, id, cf) in self.entries() {
            let _ = writeln!(out, "{term}\t{id}\t{cf}");
        }
        out
    }

    pub fn from_tsv(text: &str) -> Result<Self> {
        let mut dict = Dictionary::default();
        for (i, line) in text.lines().enumerate() {
            let bad = || Error::Parse { what: "dictionary", line: i + 1 };
            let mut fields = line.split('\t');
            let (Some(term), Some(id), Some(cf), None) = (fields.next(), fields.next(), fields.next(), fields.next())
            else {
                return Err(bad());
            };
            let id: usize = id.parse().map_err(|_| bad())?;
            let cf: u64 = cf.parse().map_err(|_| bad())?;
            if id != dict.terms.len() || dict.frequencies.last().is_some_and(|&prev| prev < cf) {
                return Err(bad());
            }
            if dict.ids.insert(term.to_string(), id as TermId).is_some() {
                return Err(bad());
            }
            dict.terms.push(term.to_string());
            dict.frequencies.push(cf);
        }
        Ok(dict)
    }
}
