//! On-disk formats: binary corpus shards, the dictionary file and TSV output.
//!
//! A corpus directory holds `dictionary.tsv` and one or more `*.bin` shards.
//! Each shard is a concatenation of documents:
//!
//! ```text
//! varint doc id | varint year (0 = none) | varint fragment count | fragments
//! ```
//!
//! where every fragment is a length-prefixed varint sequence. Shards are read
//! in lexicographic file-name order.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use super::codec::{read_sequence, read_varint, write_sequence, write_varint};
use super::{Corpus, Dictionary, Document, TermSequence};
use crate::error::{Error, Result};

pub const DICTIONARY_FILE: &str = "dictionary.tsv";
pub const SHARD_EXTENSION: &str = "bin";

pub fn write_document(buf: &mut Vec<u8>, doc: &Document) {
    write_varint(buf, doc.id);
    write_varint(buf, doc.year.unwrap_or(0) as u64);
    write_varint(buf, doc.fragments.len() as u64);
    for f in &doc.fragments {
        write_sequence(buf, f);
    }
}

pub fn read_document(input: &mut &[u8]) -> Result<Document> {
    let id = read_varint(input)?;
    let year = match read_varint(input)? {
        0 => None,
        y => Some(u32::try_from(y).map_err(|_| Error::CorruptEncoding)?),
    };
    let count = read_varint(input)?;
    if count > input.len() as u64 {
        return Err(Error::CorruptEncoding);
    }
    let mut fragments = Vec::with_capacity(count as usize);
    for _ in 0..count {
        fragments.push(read_sequence(input)?);
    }
    Ok(Document { id, year, fragments })
}

pub fn encode_documents(docs: &[Document]) -> Vec<u8> {
    let mut buf = Vec::new();
    for d in docs {
        write_document(&mut buf, d);
    }
    buf
}

pub fn decode_documents(mut input: &[u8]) -> Result<Vec<Document>> {
    let mut docs = Vec::new();
    while !input.is_empty() {
        docs.push(read_document(&mut input)?);
    }
    Ok(docs)
}

/// Writes the dictionary and `corpus` split into shards of at most
/// `docs_per_shard` documents.
pub fn write_corpus_dir(dir: &Path, dict: &Dictionary, corpus: &Corpus, docs_per_shard: usize) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join(DICTIONARY_FILE), dict.to_tsv())?;
    for (i, chunk) in corpus.documents.chunks(docs_per_shard.max(1)).enumerate() {
        let path = dir.join(format!("shard-{i:05}.{SHARD_EXTENSION}"));
        let mut out = BufWriter::new(fs::File::create(path)?);
        out.write_all(&encode_documents(chunk))?;
        out.flush()?;
    }
    Ok(())
}

pub fn shard_paths(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|e| e == SHARD_EXTENSION))
        .collect();
    paths.sort();
    Ok(paths)
}

pub fn read_corpus_dir(dir: &Path) -> Result<(Dictionary, Corpus)> {
    let dict = Dictionary::from_tsv(&fs::read_to_string(dir.join(DICTIONARY_FILE))?)?;
    let mut documents = Vec::new();
    for path in shard_paths(dir)? {
        documents.extend(decode_documents(&fs::read(path)?)?);
    }
    Ok((dict, Corpus::new(documents)))
}

/// Value column of an output line.
pub trait RenderValue {
    fn render(&self) -> String;
}

impl RenderValue for u64 {
    fn render(&self) -> String {
        self.to_string()
    }
}

/// `surface TAB value` lines sorted by surface form.
pub fn render_tsv<V: RenderValue>(stats: &[(TermSequence, V)], dict: &Dictionary) -> String {
    let mut lines: Vec<(String, String)> =
        stats.iter().map(|(ngram, value)| (dict.render(ngram), value.render())).collect();
    lines.sort();
    let mut out = String::with_capacity(lines.iter().map(|(a, b)| a.len() + b.len() + 2).sum());
    for (surface, value) in lines {
        out.push_str(&surface);
        out.push('\t');
        out.push_str(&value);
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Corpus {
        Corpus::new(vec![
            Document::new(0, Some(1990), vec![TermSequence::from([2, 0, 1]), TermSequence::from([0])]),
            Document::new(7, None, vec![]),
            Document::new(300, Some(2007), vec![TermSequence::from([1, 1, 200])]),
        ])
    }

    #[test]
    fn document_bytes_follow_layout() {
        let doc = Document::new(1, None, vec![TermSequence::from([0])]);
        assert_eq!(encode_documents(&[doc]), vec![0x81, 0x80, 0x81, 0x81, 0x80]);
    }

    #[test]
    fn corpus_dir_round_trip_preserves_order() {
        let dir = tempfile::tempdir().unwrap();
        let dict = Dictionary::build(["x", "x", "b", "a"]).unwrap();
        let corpus = sample();
        write_corpus_dir(dir.path(), &dict, &corpus, 2).unwrap();
        assert_eq!(shard_paths(dir.path()).unwrap().len(), 2);
        let (d2, c2) = read_corpus_dir(dir.path()).unwrap();
        assert_eq!(d2, dict);
        assert_eq!(c2, corpus);
    }

    #[test]
    fn truncated_shard_is_corrupt() {
        let bytes = encode_documents(&sample().documents);
        assert!(decode_documents(&bytes[..bytes.len() - 1]).is_err());
    }

    #[test]
    fn tsv_is_sorted_by_surface() {
        let dict = Dictionary::build("x x x b b a".split(' ')).unwrap();
        let stats =
            vec![(TermSequence::from([0]), 7u64), (TermSequence::from([2, 0]), 3), (TermSequence::from([2]), 3)];
        assert_eq!(render_tsv(&stats, &dict), "a\t3\na x\t3\nx\t7\n");
    }
}
