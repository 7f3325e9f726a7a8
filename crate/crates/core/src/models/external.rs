//! Black-box models run as one process per evaluation.
//!
//! Protocol (UTF-8, newline-terminated):
//!
//! ```text
//! stdin  <- {"params": {"kappa": 0.05, "t_env": 20.0}}
//! stdout -> {"outputs": [95.0, 91.2, ...]}
//! ```
//!
//! The process must exit with status 0 and print exactly `T` outputs.

use std::io::{BufRead, BufReader, Read, Write};
use std::process::{Command, Stdio};
use std::thread;
use std::time::Duration;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Deserialize;
use wait_timeout::ChildExt;

use crate::error::{Error, Result};
use crate::sampling::SampleMatrix;

use super::{stack_rows, Model};

pub const DEFAULT_TIMEOUT_SECS: f64 = 60.0;

#[derive(Debug, Clone)]
pub struct ExternalModel {
    command: Vec<String>,
    param_names: Vec<String>,
    grid: Vec<f64>,
    timeout: Duration,
    workers: usize,
}

#[derive(Deserialize)]
struct Response {
    outputs: Vec<f64>,
}

impl ExternalModel {
    pub fn new(
        command: Vec<String>,
        param_names: Vec<String>,
        grid: Vec<f64>,
        timeout: Duration,
        workers: usize,
    ) -> Self {
        Self {
            command,
            param_names,
            grid,
            timeout,
            workers: workers.max(1),
        }
    }

    pub fn with_timeout(mut self, timeout: Duration) -> Self {
        self.timeout = timeout;
        self
    }

    fn request_line(&self, q: &[f64]) -> Result<String> {
        if q.len() != self.param_names.len() {
            return Err(Error::DimensionMismatch {
                expected: self.param_names.len(),
                found: q.len(),
            });
        }
        let mut params = Vec::with_capacity(q.len());
        for (name, v) in self.param_names.iter().zip(q) {
            params.push(format!(
                "{}: {}",
                serde_json::to_string(name)?,
                serde_json::to_string(v)?
            ));
        }
        Ok(format!("{{\"params\": {{{}}}}}\n", params.join(", ")))
    }

    fn run_once(&self, q: &[f64]) -> Result<Vec<f64>> {
        let request = self.request_line(q)?;
        let (program, args) = self.command.split_first().expect("non-empty command");
        let mut child = Command::new(program)
            .args(args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::piped())
            .spawn()
            .map_err(|e| Error::ProcessFailed {
                status: "spawn error".into(),
                stderr: format!("{program}: {e}"),
            })?;

        let mut stdin = child.stdin.take().expect("piped stdin");
        let stdout = child.stdout.take().expect("piped stdout");
        let mut stderr = child.stderr.take().expect("piped stderr");
        let writer = thread::spawn(move || {
            // a model that ignores stdin may close it early; that is not an error
            let _ = stdin.write_all(request.as_bytes());
        });
        let out_reader = thread::spawn(move || {
            let mut first = String::new();
            let mut reader = BufReader::new(stdout);
            let res = reader.read_line(&mut first);
            // drain so the child never blocks on a full pipe
            let _ = std::io::copy(&mut reader, &mut std::io::sink());
            res.map(|_| first)
        });
        let err_reader = thread::spawn(move || {
            let mut s = String::new();
            let _ = stderr.read_to_string(&mut s);
            s
        });

        let status = match child
            .wait_timeout(self.timeout)
            .map_err(|e| Error::io(program, e))?
        {
            Some(status) => status,
            None => {
                let _ = child.kill();
                let _ = child.wait();
                return Err(Error::Timeout(self.timeout));
            }
        };
        let _ = writer.join();
        let line = out_reader
            .join()
            .expect("stdout reader")
            .map_err(|e| Error::MalformedOutput(e.to_string()))?;
        let diagnostics = err_reader.join().expect("stderr reader");

        if !status.success() {
            return Err(Error::ProcessFailed {
                status: status.to_string(),
                stderr: diagnostics.trim_end().to_string(),
            });
        }
        let response: Response = serde_json::from_str(line.trim())
            .map_err(|e| Error::MalformedOutput(format!("{e} in {:?}", line.trim())))?;
        if response.outputs.len() != self.grid.len() {
            return Err(Error::MalformedOutput(format!(
                "expected {} outputs, got {}",
                self.grid.len(),
                response.outputs.len()
            )));
        }
        Ok(response.outputs)
    }
}

impl Model for ExternalModel {
    fn name(&self) -> &str {
        "external"
    }

    fn output_grid(&self) -> &[f64] {
        &self.grid
    }

    fn evaluate(&self, q: &[f64]) -> Result<Vec<f64>> {
        self.run_once(q)
    }

    /// Runs at most `workers` processes at a time.
    fn evaluate_batch(&self, samples: &SampleMatrix) -> Result<DMatrix<f64>> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(self.workers)
            .build()
            .map_err(|e| Error::ProcessFailed {
                status: "worker pool".into(),
                stderr: e.to_string(),
            })?;
        let rows: Vec<Vec<f64>> = pool.install(|| {
            (0..samples.nrows())
                .into_par_iter()
                .map(|i| self.run_once(&samples.row(i)))
                .collect::<Result<_>>()
        })?;
        stack_rows(rows, self.grid.len())
    }
}

/// Evaluates a batch of physical samples through the external process.
pub fn external_eval(model: &ExternalModel, batch: &SampleMatrix) -> Result<DMatrix<f64>> {
    model.evaluate_batch(batch)
}
