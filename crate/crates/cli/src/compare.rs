use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::Instant;

use anyhow::Context;
use clap::Args;
use ngram_core::corpus::io::read_corpus_dir;
use ngram_core::methods;
use ngram_core::{Method, Sigma};

use crate::run::params;
use crate::{parse_method, parse_sigma, write_output, EngineArgs, Failure};

#[derive(Args, Debug)]
pub struct CompareArgs {
    /// Corpus directory written by `ingest`.
    #[arg(long)]
    corpus: PathBuf,

    /// Comma-separated minimum collection frequencies.
    #[arg(long, value_delimiter = ',', required = true, value_parser = clap::value_parser!(u64).range(1..))]
    tau: Vec<u64>,

    /// Comma-separated maximum lengths (positive integers or `inf`).
    #[arg(long, value_delimiter = ',', required = true, value_parser = parse_sigma)]
    sigma: Vec<Sigma>,

    /// Comma-separated methods [default: the four MapReduce methods].
    #[arg(long, value_delimiter = ',', value_parser = parse_method)]
    methods: Vec<Method>,

    #[command(flatten)]
    engine: EngineArgs,

    /// CSV output [default: stdout].
    #[arg(long)]
    output: Option<PathBuf>,
}

/// One CSV row per (tau, sigma, method): map output records before the
/// combiner, shuffled bytes, and wall time, summed over the method's jobs.
/// The preliminary document-splitting job is not included.
pub fn cmd_compare(args: &CompareArgs) -> Result<(), Failure> {
    let methods = if args.methods.is_empty() { Method::ALL.to_vec() } else { args.methods.clone() };
    if args.engine.k.is_some() && !methods.contains(&Method::AprioriIndex) {
        return Err(Failure::Usage("--k applies to apriori-index only".into()));
    }
    let engine = args.engine.engine()?;
    let (_, corpus) =
        read_corpus_dir(&args.corpus).with_context(|| format!("reading corpus {}", args.corpus.display()))?;

    let mut csv = String::from("method,tau,sigma,records,bytes,wall_ms\n");
    for &tau in &args.tau {
        for &sigma in &args.sigma {
            let params = params(&args.engine, tau, sigma);
            for &method in &methods {
                let start = Instant::now();
                let report = methods::run(&engine, &corpus, method, &params)?;
                let wall_ms = start.elapsed().as_millis();
                let records: u64 = report.jobs.iter().map(|j| j.map_output_records_pre_combiner).sum();
                let bytes: u64 = report.jobs.iter().map(|j| j.map_output_bytes).sum();
                writeln!(csv, "{method},{tau},{sigma},{records},{bytes},{wall_ms}").expect("writing to a String");
            }
        }
    }
    write_output(args.output.as_ref(), &csv).context("writing CSV")?;
    Ok(())
}
