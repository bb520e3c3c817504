mod contour;
mod estermann;
mod kernel;
mod moment;
mod scan;
mod zeta;

use std::time::Instant;

use serde::Serialize;
use serde_json::Value;
use zeta_moment::quad::node_evaluations;

use crate::args::{merge, Cli, Command, ConfigFile};
use crate::output::{cache_append, cache_lookup, emit, input_key, Outcome, ResultRecord};
use crate::ConfigError;

/// A suite with its fully resolved input, ready to run.
pub struct Prepared {
    pub suite: String,
    pub input: Value,
    pub run: Box<dyn FnOnce() -> anyhow::Result<Outcome>>,
}

impl Prepared {
    pub fn new<I: Serialize + 'static>(
        suite: impl Into<String>,
        input: I,
        run: impl FnOnce(I) -> anyhow::Result<Outcome> + 'static,
    ) -> Self {
        let echo = serde_json::to_value(&input).expect("input serializes");
        Self { suite: suite.into(), input: echo, run: Box::new(move || run(input)) }
    }
}

pub fn check(cond: bool, msg: impl Into<String>) -> Result<(), ConfigError> {
    if cond {
        Ok(())
    } else {
        Err(ConfigError(msg.into()))
    }
}

/// Runs the selected subcommand; `Ok(false)` means a check failed.
pub fn run(cli: Cli) -> anyhow::Result<bool> {
    let config = match &cli.config {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    };
    let seed = cli.seed.or(config.seed).unwrap_or(0);
    if let Some(n) = cli.workers.or(config.workers) {
        check(n >= 1, "--workers must be at least 1")?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    let prepared = match &cli.command {
        Command::Zeta(a) => zeta::prepare(merge(a, config.zeta.as_ref())?, seed)?,
        Command::Kernel(a) => kernel::prepare(merge(a, config.kernel.as_ref())?)?,
        Command::Estermann(a) => estermann::prepare(merge(a, config.estermann.as_ref())?)?,
        Command::Contour(a) => contour::prepare(merge(a, config.contour.as_ref())?)?,
        Command::Moment(a) => moment::prepare(merge(a, config.moment.as_ref())?)?,
        Command::Scan(a) => scan::prepare(merge(a, config.scan.as_ref())?)?,
    };
    let key = input_key(&prepared.suite, &prepared.input);
    if let Some(cache) = &cli.cache {
        if let Some(rec) = cache_lookup(cache, &key)? {
            emit(&rec, true, 0, cli.out.as_deref())?;
            eprintln!("{}: cache hit {}, 0 quadrature nodes", rec.suite, &key[..12]);
            return Ok(report(&rec.outcome));
        }
    }
    let start = Instant::now();
    let nodes_before = node_evaluations();
    let outcome = (prepared.run)()?;
    let rec = ResultRecord {
        key,
        suite: prepared.suite,
        input: prepared.input,
        outcome,
        wall_time_s: start.elapsed().as_secs_f64(),
        node_evaluations: node_evaluations() - nodes_before,
    };
    if let Some(cache) = &cli.cache {
        cache_append(cache, &rec)?;
    }
    emit(&rec, false, rec.node_evaluations, cli.out.as_deref())?;
    eprintln!("{}: {} quadrature nodes, {:.2} s", rec.suite, rec.node_evaluations, rec.wall_time_s);
    Ok(report(&rec.outcome))
}

fn report(o: &Outcome) -> bool {
    let verdict = match o.pass {
        Some(true) => "PASS",
        Some(false) => "FAIL",
        None => "DONE",
    };
    eprintln!("{verdict}: {}", o.summary);
    o.pass != Some(false)
}
