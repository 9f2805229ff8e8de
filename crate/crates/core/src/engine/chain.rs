use super::{Counters, Engine};
use crate::error::{Error, Result};

/// Outcome of one chained job.
#[derive(Clone, Debug)]
pub struct Iteration {
    pub counters: Counters,
    pub output_records: usize,
}

#[derive(Clone, Debug, Default)]
pub struct ChainReport {
    pub iterations: Vec<Counters>,
}

impl ChainReport {
    pub fn total(&self, name: &str) -> Counters {
        Counters::total(name, &self.iterations)
    }
}

impl Engine {
    /// Runs jobs for k = 1, 2, ... until `next` declines to produce a job or
    /// `stop` holds for the finished iteration.
    ///
    /// `next` runs iteration k (typically one [`Engine::run_job`] call fed by
    /// the previous iteration's output) and returns `None` when there is
    /// nothing left to run.
    pub fn run_chain<F, S>(&self, mut next: F, mut stop: S) -> Result<ChainReport>
    where
        F: FnMut(&Engine, u32) -> Result<Option<Iteration>>,
        S: FnMut(u32, &Iteration) -> bool,
    {
        let mut report = ChainReport::default();
        let mut k = 1u32;
        loop {
            if k as usize > self.config().chain_cap {
                return Err(Error::RunawayChain(self.config().chain_cap));
            }
            let Some(iteration) = next(self, k)? else { break };
            let done = stop(k, &iteration);
            report.iterations.push(iteration.counters);
            if done {
                break;
            }
            k += 1;
        }
        Ok(report)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::EngineConfig;

    fn iteration(k: u32, records: usize) -> Iteration {
        let mut counters = Counters::new("t", k);
        counters.map_output_records = records as u64;
        counters.map_output_records_pre_combiner = records as u64;
        Iteration { counters, output_records: records }
    }

    #[test]
    fn stops_on_predicate() {
        let engine = Engine::new(EngineConfig::default()).unwrap();
        let report =
            engine.run_chain(|_, k| Ok(Some(iteration(k, 4 - k as usize))), |_, it| it.output_records == 0).unwrap();
        assert_eq!(report.iterations.len(), 4);
        assert_eq!(report.total("t").map_output_records, 3 + 2 + 1);
    }

    #[test]
    fn stops_when_factory_declines() {
        let engine = Engine::new(EngineConfig::default()).unwrap();
        let report = engine.run_chain(|_, k| Ok((k <= 2).then(|| iteration(k, 1))), |_, _| false).unwrap();
        assert_eq!(report.iterations.len(), 2);
    }

    #[test]
    fn runaway_chain_is_an_error() {
        let engine = Engine::new(EngineConfig { chain_cap: 5, ..Default::default() }).unwrap();
        let err = engine.run_chain(|_, k| Ok(Some(iteration(k, 1))), |_, _| false).unwrap_err();
        assert!(matches!(err, Error::RunawayChain(5)));
    }

    #[test]
    fn errors_propagate() {
        let engine = Engine::new(EngineConfig::default()).unwrap();
        let err = engine.run_chain(|_, _| Err(Error::EmptyCorpus), |_, _| false).unwrap_err();
        assert!(matches!(err, Error::EmptyCorpus));
    }
}
