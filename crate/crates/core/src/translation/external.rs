//! Adapter for a translator running as a child process that speaks one
//! JSON object per line over stdin and stdout.

use std::collections::HashMap;
use std::io::{BufRead, BufReader, Write};
use std::process::{Child, ChildStdin, Command, Stdio};
use std::sync::atomic::{AtomicU64, AtomicUsize, Ordering};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use super::{Candidate, TranslateError, Translator, TranslatorKind};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Request {
    pub id: String,
    pub source: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Response {
    pub id: String,
    pub candidates: Vec<Candidate>,
}

fn default_timeout_ms() -> u64 {
    10_000
}

fn default_pool() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExternalConfig {
    pub command: String,
    #[serde(default)]
    pub args: Vec<String>,
    #[serde(default = "default_timeout_ms")]
    pub timeout_ms: u64,
    /// Number of child processes.
    #[serde(default = "default_pool")]
    pub pool: usize,
}

impl ExternalConfig {
    pub fn new(command: impl Into<String>) -> Self {
        ExternalConfig {
            command: command.into(),
            args: Vec::new(),
            timeout_ms: default_timeout_ms(),
            pool: default_pool(),
        }
    }
}

type Reply = Result<Vec<Candidate>, TranslateError>;

struct Worker {
    child: Child,
    stdin: Option<ChildStdin>,
    lines: Receiver<String>,
}

impl Worker {
    fn spawn(config: &ExternalConfig) -> Result<Self, TranslateError> {
        let mut child = Command::new(&config.command)
            .args(&config.args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .spawn()
            .map_err(|e| TranslateError::Unreachable(format!("{}: {e}", config.command)))?;
        let stdout = child.stdout.take().expect("stdout is piped");
        let (tx, lines) = mpsc::channel();
        std::thread::spawn(move || {
            for line in BufReader::new(stdout).lines() {
                let Ok(line) = line else { break };
                if tx.send(line).is_err() {
                    break;
                }
            }
        });
        Ok(Worker {
            stdin: child.stdin.take(),
            child,
            lines,
        })
    }

    /// Sends every request, then collects replies by id until each one has
    /// answered or passed its deadline.
    fn exchange(&mut self, batch: &[(String, &str)], timeout: Duration) -> HashMap<String, Reply> {
        let mut results = HashMap::new();
        // in send order, so the front has the earliest deadline
        let mut pending: Vec<(String, Instant)> = Vec::new();
        for (id, source) in batch {
            let line = serde_json::to_string(&Request {
                id: id.clone(),
                source: source.to_string(),
            })
            .expect("requests serialize");
            let sent = self
                .stdin
                .as_mut()
                .ok_or_else(|| std::io::Error::other("stdin closed"))
                .and_then(|w| writeln!(w, "{line}").and_then(|_| w.flush()));
            match sent {
                Ok(()) => pending.push((id.clone(), Instant::now() + timeout)),
                Err(e) => {
                    results.insert(id.clone(), Err(TranslateError::Unreachable(e.to_string())));
                }
            }
        }
        while let Some((front, deadline)) = pending.first().cloned() {
            let now = Instant::now();
            if deadline <= now {
                pending.remove(0);
                results.insert(front.clone(), Err(TranslateError::Timeout { id: front, after: timeout }));
                continue;
            }
            match self.lines.recv_timeout(deadline - now) {
                Ok(line) => {
                    let (id, reply) = parse_reply(&line, &pending);
                    if let Some(pos) = pending.iter().position(|(p, _)| *p == id) {
                        pending.remove(pos);
                        results.insert(id, reply);
                    }
                }
                Err(RecvTimeoutError::Timeout) => {}
                Err(RecvTimeoutError::Disconnected) => {
                    for (id, _) in pending.drain(..) {
                        results.insert(id, Err(TranslateError::Unreachable("translator exited".into())));
                    }
                }
            }
        }
        results
    }
}

/// A reply line and the request it answers. Lines that cannot be
/// correlated by id are charged to the oldest pending request.
fn parse_reply(line: &str, pending: &[(String, Instant)]) -> (String, Reply) {
    let oldest = || pending.first().map(|(id, _)| id.clone()).unwrap_or_default();
    match serde_json::from_str::<Response>(line) {
        Ok(resp) => {
            let candidates = resp
                .candidates
                .into_iter()
                .filter(|c| !c.text.trim().is_empty())
                .collect();
            (resp.id, Ok(candidates))
        }
        Err(e) => {
            let id = serde_json::from_str::<serde_json::Value>(line)
                .ok()
                .and_then(|v| v.get("id").and_then(|i| i.as_str()).map(str::to_string))
                .filter(|id| pending.iter().any(|(p, _)| p == id))
                .unwrap_or_else(oldest);
            (id, Err(TranslateError::Malformed(e.to_string())))
        }
    }
}

impl Drop for Worker {
    fn drop(&mut self) {
        self.stdin.take();
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

pub struct ExternalTranslator {
    workers: Vec<Mutex<Worker>>,
    timeout: Duration,
    next_id: AtomicU64,
    next_worker: AtomicUsize,
}

impl ExternalTranslator {
    pub fn spawn(config: &ExternalConfig) -> Result<Self, TranslateError> {
        let workers = (0..config.pool.max(1))
            .map(|_| Worker::spawn(config).map(Mutex::new))
            .collect::<Result<_, _>>()?;
        Ok(ExternalTranslator {
            workers,
            timeout: Duration::from_millis(config.timeout_ms),
            next_id: AtomicU64::new(0),
            next_worker: AtomicUsize::new(0),
        })
    }

    fn fresh_id(&self) -> String {
        format!("r{}", self.next_id.fetch_add(1, Ordering::Relaxed))
    }
}

fn lock(worker: &Mutex<Worker>) -> std::sync::MutexGuard<'_, Worker> {
    worker.lock().unwrap_or_else(|e| e.into_inner())
}

impl Translator for ExternalTranslator {
    fn kind(&self) -> TranslatorKind {
        TranslatorKind::External
    }

    fn translate(&self, input: &str) -> Result<Vec<Candidate>, TranslateError> {
        let id = self.fresh_id();
        let w = self.next_worker.fetch_add(1, Ordering::Relaxed) % self.workers.len();
        let mut results = lock(&self.workers[w]).exchange(&[(id.clone(), input)], self.timeout);
        results.remove(&id).expect("every request gets a result")
    }

    /// Splits the inputs into one contiguous chunk per child and runs the
    /// chunks concurrently. Results are in input order whatever the pool
    /// size.
    fn translate_all(&self, inputs: &[String]) -> Vec<Reply> {
        if inputs.is_empty() {
            return Vec::new();
        }
        let ids: Vec<String> = inputs.iter().map(|_| self.fresh_id()).collect();
        let chunk = inputs.len().div_ceil(self.workers.len());
        let mut merged: HashMap<String, Reply> = HashMap::new();
        std::thread::scope(|scope| {
            let handles: Vec<_> = self
                .workers
                .iter()
                .zip(ids.chunks(chunk).zip(inputs.chunks(chunk)))
                .map(|(worker, (ids, inputs))| {
                    let batch: Vec<(String, &str)> = ids.iter().cloned().zip(inputs.iter().map(String::as_str)).collect();
                    scope.spawn(move || lock(worker).exchange(&batch, self.timeout))
                })
                .collect();
            for h in handles {
                merged.extend(h.join().expect("worker thread panicked"));
            }
        });
        ids.iter()
            .map(|id| merged.remove(id).expect("every request gets a result"))
            .collect()
    }
}
