//! Fixed-interval sweep scheduling with overlap skipping.

use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};
use std::thread::{self, JoinHandle};
use std::time::{Duration, Instant};

use chrono::Utc;

use super::rebuild::{sweep, Rebuilder};
use crate::config::Config;
use crate::exec::Parallelism;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Tick {
    Started,
    /// The previous job was still running.
    Skipped,
}

type Job = dyn Fn() -> Result<()> + Send + Sync;

/// Runs a job on a background thread per tick, never two at once.
pub struct Scheduler {
    job: Arc<Job>,
    busy: Arc<AtomicBool>,
    runs: Arc<AtomicUsize>,
    failures: Arc<AtomicUsize>,
    handles: Vec<JoinHandle<()>>,
}

impl Scheduler {
    pub fn new(job: impl Fn() -> Result<()> + Send + Sync + 'static) -> Self {
        Scheduler {
            job: Arc::new(job),
            busy: Arc::new(AtomicBool::new(false)),
            runs: Arc::new(AtomicUsize::new(0)),
            failures: Arc::new(AtomicUsize::new(0)),
            handles: Vec::new(),
        }
    }

    /// Scheduler around [`sweep`] with a shared incremental cache.
    pub fn for_sweeps(config: Config, mode: Parallelism) -> Self {
        let rebuilder = Mutex::new(Rebuilder::new(mode));
        Scheduler::new(move || {
            let mut r = rebuilder.lock().unwrap_or_else(|p| p.into_inner());
            sweep(&config, &mut r, Utc::now()).map(|s| {
                tracing::info!(snapshot = %s.snapshot_id, "scheduled sweep finished");
            })
        })
    }

    pub fn tick(&mut self) -> Tick {
        if self.busy.swap(true, Ordering::SeqCst) {
            tracing::warn!("previous sweep still running; tick skipped");
            return Tick::Skipped;
        }
        let job = Arc::clone(&self.job);
        let busy = Arc::clone(&self.busy);
        let runs = Arc::clone(&self.runs);
        let failures = Arc::clone(&self.failures);
        self.handles.retain(|h| !h.is_finished());
        self.handles.push(thread::spawn(move || {
            if let Err(e) = job() {
                failures.fetch_add(1, Ordering::SeqCst);
                tracing::error!(error = %e, "sweep failed; waiting for next tick");
            }
            runs.fetch_add(1, Ordering::SeqCst);
            busy.store(false, Ordering::SeqCst);
        }));
        Tick::Started
    }

    pub fn is_busy(&self) -> bool {
        self.busy.load(Ordering::SeqCst)
    }

    /// Completed jobs, failed ones included.
    pub fn runs(&self) -> usize {
        self.runs.load(Ordering::SeqCst)
    }

    pub fn failures(&self) -> usize {
        self.failures.load(Ordering::SeqCst)
    }

    /// Waits for the running job, if any.
    pub fn join(&mut self) {
        for h in self.handles.drain(..) {
            let _ = h.join();
        }
    }

    /// Ticks every `interval` until `stop` is set, then waits for the
    /// running job.
    pub fn run(&mut self, interval: Duration, stop: &AtomicBool) -> Result<()> {
        if interval.is_zero() {
            return Err(Error::Validation("interval must be positive".into()));
        }
        while !stop.load(Ordering::SeqCst) {
            self.tick();
            let deadline = Instant::now() + interval;
            while !stop.load(Ordering::SeqCst) {
                let now = Instant::now();
                if now >= deadline {
                    break;
                }
                thread::sleep((deadline - now).min(Duration::from_millis(50)));
            }
        }
        self.join();
        Ok(())
    }
}

/// `--once`: a single synchronous sweep.
pub fn run_once(config: &Config, mode: Parallelism) -> Result<super::GraphSnapshot> {
    sweep(config, &mut Rebuilder::new(mode), Utc::now())
}

/// Runs sweeps every `interval` until `stop` is set.
pub fn run_scheduled(config: &Config, interval: Duration, mode: Parallelism, stop: &AtomicBool) -> Result<()> {
    Scheduler::for_sweeps(config.clone(), mode).run(interval, stop)
}
