use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use clap::Args;
use ngram_core::corpus::io::write_corpus_dir;
use ngram_core::corpus::{ingest, RawDocument};

use crate::Failure;

#[derive(Args, Debug)]
pub struct IngestArgs {
    /// Directory of text files, one document per file, read in file name order.
    raw_dir: PathBuf,

    /// Output corpus directory.
    out_dir: PathBuf,

    /// Year manifest: one `file name TAB year` line per file.
    #[arg(long)]
    years: Option<PathBuf>,

    /// Documents per binary shard.
    #[arg(long, default_value_t = 10_000, value_parser = clap::value_parser!(u32).range(1..))]
    docs_per_shard: u32,
}

fn read_manifest(path: &Path) -> anyhow::Result<HashMap<String, u32>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading year manifest {}", path.display()))?;
    let mut years = HashMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let (name, year) = line
            .split_once('\t')
            .ok_or_else(|| anyhow!("{}:{}: expected `file name TAB year`", path.display(), i + 1))?;
        let year: u32 = year.trim().parse().with_context(|| format!("{}:{}: bad year", path.display(), i + 1))?;
        years.insert(name.to_string(), year);
    }
    Ok(years)
}

pub fn cmd_ingest(args: &IngestArgs) -> Result<(), Failure> {
    let years = match &args.years {
        Some(path) => read_manifest(path)?,
        None => HashMap::new(),
    };
    let mut files: Vec<PathBuf> = fs::read_dir(&args.raw_dir)
        .with_context(|| format!("reading {}", args.raw_dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file())
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(anyhow!("no input files in {}", args.raw_dir.display()).into());
    }

    let mut raw = Vec::with_capacity(files.len());
    for path in &files {
        match fs::read_to_string(path) {
            Ok(text) => {
                let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
                raw.push(RawDocument { text, year: years.get(&name).copied() });
            }
            Err(e) => eprintln!("warning: skipping {}: {e}", path.display()),
        }
    }
    if raw.is_empty() {
        return Err(anyhow!("none of the {} input files could be read", files.len()).into());
    }

    let (dictionary, corpus, report) = ingest(&raw).context("ingesting documents")?;
    if corpus.occurrences() == 0 {
        return Err(anyhow!("the input contains no terms").into());
    }
    write_corpus_dir(&args.out_dir, &dictionary, &corpus, args.docs_per_shard as usize)
        .with_context(|| format!("writing {}", args.out_dir.display()))?;
    println!("{report}");
    Ok(())
}
