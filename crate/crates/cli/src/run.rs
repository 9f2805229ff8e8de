use std::path::PathBuf;
use std::time::Instant;

use anyhow::Context;
use clap::Args;
use ngram_core::corpus::io::{read_corpus_dir, render_tsv, RenderValue};
use ngram_core::extensions::{run_suffix_sigma_filtered, run_suffix_sigma_timeseries, FilterMode};
use ngram_core::methods;
use ngram_core::{Counters, Dictionary, Engine, Method, MethodReport, RunParams, Sigma};
use serde_json::{json, Value};

use crate::{parse_method, parse_sigma, write_output, EngineArgs, Failure};

#[derive(Args, Debug)]
pub struct RunArgs {
    /// Corpus directory written by `ingest`.
    #[arg(long)]
    corpus: PathBuf,

    /// naive, apriori-scan, apriori-index, suffix-sigma or oracle.
    #[arg(long, value_parser = parse_method)]
    method: Method,

    /// Minimum collection frequency.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    tau: u64,

    /// Maximum n-gram length, a positive integer or `inf`.
    #[arg(long, value_parser = parse_sigma)]
    sigma: Sigma,

    #[command(flatten)]
    engine: EngineArgs,

    /// Keep only maximal n-grams (suffix-sigma only).
    #[arg(long, conflicts_with_all = ["closed", "timeseries"])]
    maximal: bool,

    /// Keep only closed n-grams (suffix-sigma only).
    #[arg(long, conflicts_with = "timeseries")]
    closed: bool,

    /// Report per-year counts instead of totals (suffix-sigma only).
    #[arg(long)]
    timeseries: bool,

    /// Statistics TSV [default: stdout].
    #[arg(long)]
    output: Option<PathBuf>,

    /// Counter report as JSON.
    #[arg(long)]
    metrics_out: Option<PathBuf>,

    /// Directory for per-iteration outputs (apriori-scan and apriori-index).
    #[arg(long)]
    keep_intermediate: Option<PathBuf>,
}

impl RunArgs {
    fn validate(&self) -> Result<(), Failure> {
        let usage = |m: &str| Err(Failure::Usage(m.to_string()));
        if self.engine.k.is_some() && self.method != Method::AprioriIndex {
            return usage("--k applies to --method apriori-index only");
        }
        if (self.maximal || self.closed || self.timeseries) && self.method != Method::SuffixSigma {
            return usage("--maximal, --closed and --timeseries require --method suffix-sigma");
        }
        if self.keep_intermediate.is_some() && !matches!(self.method, Method::AprioriScan | Method::AprioriIndex) {
            return usage("--keep-intermediate applies to apriori-scan and apriori-index only");
        }
        Ok(())
    }

    fn mode(&self) -> &'static str {
        match (self.maximal, self.closed, self.timeseries) {
            (true, _, _) => "maximal",
            (_, true, _) => "closed",
            (_, _, true) => "timeseries",
            _ => "all",
        }
    }
}

pub(crate) fn params(engine: &EngineArgs, tau: u64, sigma: Sigma) -> RunParams {
    let defaults = RunParams::new(tau, sigma);
    RunParams {
        reducers: engine.reducers as usize,
        combiner: engine.combiner.enabled(),
        k: engine.k.map_or(defaults.k, |k| k as usize),
        ..defaults
    }
}

pub(crate) fn sigma_json(sigma: Sigma) -> Value {
    match sigma {
        Sigma::Bounded(n) => json!(n),
        Sigma::Unbounded => json!("inf"),
    }
}

/// Runs the configured method and returns the rendered TSV and the counters.
fn execute(
    args: &RunArgs,
    engine: &Engine,
    dict: &Dictionary,
    corpus: &ngram_core::Corpus,
    params: &RunParams,
) -> ngram_core::Result<(String, Option<Counters>, Vec<Counters>)> {
    fn parts<V: RenderValue>(report: MethodReport<V>, dict: &Dictionary) -> (String, Option<Counters>, Vec<Counters>) {
        (render_tsv(&report.stats, dict), report.split_job, report.jobs)
    }
    Ok(if args.timeseries {
        parts(run_suffix_sigma_timeseries(engine, corpus, params)?, dict)
    } else if args.maximal || args.closed {
        let mode = if args.maximal { FilterMode::Maximal } else { FilterMode::Closed };
        parts(run_suffix_sigma_filtered(engine, corpus, params, mode)?, dict)
    } else {
        parts(methods::run(engine, corpus, args.method, params)?, dict)
    })
}

pub fn cmd_run(args: &RunArgs) -> Result<(), Failure> {
    args.validate()?;
    let params =
        RunParams { keep_intermediate: args.keep_intermediate.clone(), ..params(&args.engine, args.tau, args.sigma) };
    let engine = args.engine.engine()?;
    let (dict, corpus) =
        read_corpus_dir(&args.corpus).with_context(|| format!("reading corpus {}", args.corpus.display()))?;

    let start = Instant::now();
    let (tsv, split_job, jobs) = execute(args, &engine, &dict, &corpus, &params)?;
    let wall_ms = start.elapsed().as_millis() as u64;

    write_output(args.output.as_ref(), &tsv).context("writing statistics")?;
    if let Some(path) = &args.metrics_out {
        let metrics = json!({
            "method": args.method.name(),
            "mode": args.mode(),
            "tau": args.tau,
            "sigma": sigma_json(args.sigma),
            "reducers": params.reducers,
            "combiner": params.combiner,
            "k": (args.method == Method::AprioriIndex).then_some(params.k),
            "workers": engine.config().workers,
            "split_job": split_job,
            "jobs": jobs,
            "totals": Counters::total("total", &jobs),
            "wall_ms": wall_ms,
        });
        let text = serde_json::to_string_pretty(&metrics).context("serializing metrics")?;
        std::fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}
