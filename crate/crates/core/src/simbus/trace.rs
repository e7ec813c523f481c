use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mtlcore::Value;

/// One input message of a replay.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReplayEvent {
    #[serde(rename = "t")]
    pub time: f64,
    pub topic: String,
    pub value: Value,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReplayError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: time {time} is negative or not finite")]
    InvalidTime { line: usize, time: f64 },
    #[error("line {line}: time {time} is earlier than the previous event at {previous}")]
    NonMonotonicTime {
        line: usize,
        time: f64,
        previous: f64,
    },
}

/// Time-ordered input messages. Events at equal times keep file order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ReplayTrace {
    events: Vec<ReplayEvent>,
}

impl ReplayTrace {
    /// Validates times; `line` in errors is the 1-based event index.
    pub fn new(events: Vec<ReplayEvent>) -> Result<Self, ReplayError> {
        let mut previous = 0.0_f64;
        for (i, ev) in events.iter().enumerate() {
            check_time(i + 1, ev.time, previous)?;
            previous = ev.time;
        }
        Ok(Self { events })
    }

    pub fn events(&self) -> &[ReplayEvent] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// Parses JSON Lines of `{"t": number, "topic": str, "value": number|bool}`.
    /// Blank lines are skipped; errors carry the file line number.
    pub fn parse_jsonl(src: &str) -> Result<Self, ReplayError> {
        let mut events = Vec::new();
        let mut previous = 0.0_f64;
        for (i, line) in src.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let ev: ReplayEvent = serde_json::from_str(line).map_err(|e| ReplayError::Malformed {
                line: i + 1,
                message: e.to_string(),
            })?;
            check_time(i + 1, ev.time, previous)?;
            previous = ev.time;
            events.push(ev);
        }
        Ok(Self { events })
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for ev in &self.events {
            out.push_str(&serde_json::to_string(ev).expect("event serializes"));
            out.push('\n');
        }
        out
    }
}

fn check_time(line: usize, time: f64, previous: f64) -> Result<(), ReplayError> {
    if !time.is_finite() || time < 0.0 {
        return Err(ReplayError::InvalidTime { line, time });
    }
    if time < previous {
        return Err(ReplayError::NonMonotonicTime {
            line,
            time,
            previous,
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_round_trips() {
        let src = "{\"t\":0,\"topic\":\"a\",\"value\":1.5}\n\n{\"t\":0,\"topic\":\"b\",\"value\":true}\n";
        let tr = ReplayTrace::parse_jsonl(src).unwrap();
        assert_eq!(tr.len(), 2);
        assert_eq!(tr.events()[1].value, Value::Bool(true));
        assert_eq!(ReplayTrace::parse_jsonl(&tr.to_jsonl()).unwrap(), tr);
    }

    #[test]
    fn positioned_errors() {
        let err = ReplayTrace::parse_jsonl("{\"t\":1,\"topic\":\"a\",\"value\":1}\n{\"t\":1,\"topic\":\"a\"}\n")
            .unwrap_err();
        assert!(matches!(err, ReplayError::Malformed { line: 2, .. }));
        let err = ReplayTrace::parse_jsonl("{\"t\":2,\"topic\":\"a\",\"value\":1}\n{\"t\":1,\"topic\":\"a\",\"value\":1}\n")
            .unwrap_err();
        assert!(matches!(err, ReplayError::NonMonotonicTime { line: 2, .. }));
        let err = ReplayTrace::parse_jsonl("{\"t\":-1,\"topic\":\"a\",\"value\":1}").unwrap_err();
        assert!(matches!(err, ReplayError::InvalidTime { line: 1, .. }));
    }
}
