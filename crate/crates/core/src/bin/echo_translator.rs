//! Test translator: answers every request with its own source text.
//!
//! Flags: `--delay-ms N` waits before each reply, `--malformed` replies
//! with invalid JSON, `--reverse` answers requests in pairs, second first,
//! `--exit` quits without reading.

use std::io::{BufRead, Write};
use std::time::Duration;

use serde_json::{json, Value};

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let flag = |name: &str| args.iter().any(|a| a == name);
    let delay = args
        .iter()
        .position(|a| a == "--delay-ms")
        .and_then(|i| args.get(i + 1))
        .and_then(|v| v.parse().ok())
        .map(Duration::from_millis);
    if flag("--exit") {
        return;
    }
    let stdin = std::io::stdin();
    let mut out = std::io::stdout();
    let mut held: Option<String> = None;
    for line in stdin.lock().lines() {
        let Ok(line) = line else { break };
        let reply = match serde_json::from_str::<Value>(&line) {
            _ if flag("--malformed") => "{not json".to_string(),
            Ok(req) => json!({
                "id": req["id"],
                "candidates": [{"text": req["source"], "score": 1.0}],
            })
            .to_string(),
            Err(_) => continue,
        };
        if let Some(d) = delay {
            std::thread::sleep(d);
        }
        if flag("--reverse") {
            match held.take() {
                None => {
                    held = Some(reply);
                    continue;
                }
                Some(first) => {
                    let _ = writeln!(out, "{reply}\n{first}");
                }
            }
        } else {
            let _ = writeln!(out, "{reply}");
        }
        let _ = out.flush();
    }
    if let Some(last) = held {
        let _ = writeln!(out, "{last}");
    }
}
