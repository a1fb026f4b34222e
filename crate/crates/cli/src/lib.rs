//! Scenario runner for the crossmod engine.
//!
//! A scenario declares named groups, groupoids, crossed modules, algebras,
//! actions, ideals and linking data, then lists tasks over them. Every
//! declaration is validated when the scenario loads.

pub mod build;
pub mod report;
pub mod scenario;
pub mod tasks;

use std::time::Instant;

use crossmod::settings::{self, Settings};

use crate::build::Env;
use crate::report::{CheckRecord, ErrorRecord, Report, TaskRecord};
pub use crate::scenario::InputError;
use crate::scenario::RawTask;

#[derive(Clone, Debug)]
pub struct Options {
    pub tol: Option<f64>,
    pub seed: Option<u64>,
    pub max_dim: usize,
    pub timings: bool,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            tol: None,
            seed: None,
            max_dim: settings::DEFAULT_MAX_DIM,
            timings: false,
        }
    }
}

impl Options {
    pub fn settings(&self) -> Settings {
        let mut s = Settings::default();
        if let Some(t) = self.tol {
            s.tol_alg = t;
        }
        if let Some(seed) = self.seed {
            s.seed = seed;
        }
        s.max_dim = self.max_dim;
        s
    }
}

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

/// Parses, builds and runs a scenario under the settings in `opts`.
pub fn run(text: &str, opts: &Options) -> Result<Report, InputError> {
    let s = opts.settings();
    settings::with_settings(s, || {
        let raw = scenario::parse(text)?;
        let env = Env::build(&raw)?;
        let bound = raw.tasks.iter().map(|t| tasks::bind(&env, t)).collect::<Result<Vec<_>, _>>()?;
        let records: Vec<TaskRecord> = raw
            .tasks
            .iter()
            .zip(&bound)
            .enumerate()
            .map(|(i, (t, b))| run_task(i + 1, t, b, opts.timings))
            .collect();
        Ok(Report {
            passed: records.iter().all(|r| r.passed),
            seed: s.seed,
            tol: s.tol_alg,
            max_dim: s.max_dim,
            tasks: records,
        })
    })
}

/// The exit status for a finished run.
pub fn exit_code(result: &Result<Report, InputError>) -> i32 {
    match result {
        Ok(r) if r.passed => EXIT_PASS,
        Ok(_) => EXIT_FAIL,
        Err(_) => EXIT_INPUT,
    }
}

fn run_task(index: usize, raw: &RawTask, bound: &tasks::Bound, timings: bool) -> TaskRecord {
    let start = Instant::now();
    let result = tasks::run(bound);
    let elapsed = start.elapsed().as_secs_f64() * 1e3;
    let mut rec = TaskRecord {
        task: index,
        verb: raw.verb.clone(),
        args: raw.args.clone(),
        passed: false,
        dims: Default::default(),
        blocks: Default::default(),
        checks: vec![],
        error: None,
        unmet: vec![],
        time_ms: timings.then_some(elapsed),
    };
    let expect = &raw.expect;
    match result {
        Ok(out) => {
            rec.checks = out
                .checks
                .into_iter()
                .map(|c| CheckRecord {
                    name: c.name,
                    passed: c.passed,
                    detail: c.detail,
                })
                .collect();
            if let Some(kind) = &expect.error {
                rec.unmet.push(format!("error {kind}, but the task succeeded"));
            }
            for (k, want) in &expect.dims {
                match out.dims.get(k) {
                    Some(got) if got == want => {}
                    got => rec.unmet.push(format!("dims.{k} = {want}, got {got:?}")),
                }
            }
            for (k, want) in &expect.blocks {
                match out.blocks.get(k) {
                    Some(got) if got == want => {}
                    got => rec.unmet.push(format!("blocks.{k} = {want:?}, got {got:?}")),
                }
            }
            rec.dims = out.dims;
            rec.blocks = out.blocks;
            rec.passed = rec.checks.iter().all(|c| c.passed) && rec.unmet.is_empty();
        }
        Err(e) => {
            let kind = e.kind();
            if let Some(want) = &expect.error {
                if *want != kind {
                    rec.unmet.push(format!("error {want}, got {kind}"));
                }
            }
            rec.passed = expect.error.as_deref() == Some(kind.as_str());
            rec.error = Some(ErrorRecord {
                kind,
                message: e.to_string(),
            });
        }
    }
    rec
}
