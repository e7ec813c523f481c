//! Deterministic in-process publish/subscribe bus hosting interpreted
//! monitors.
//!
//! Delivery is FIFO and total: input messages are delivered in (time, trace
//! order), and every message a node publishes while handling a delivery is
//! queued behind it and delivered before the next input message.

mod trace;

use std::collections::{BTreeMap, VecDeque};
use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::mtlcore::{Trace, Value};
use crate::nodegen::NodePlan;
use crate::reqlang::VarKind;
use crate::streamc::{MonitorError, MonitorSpec, MonitorState};

pub use trace::{ReplayError, ReplayEvent, ReplayTrace};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Payload {
    Num(f64),
    Bool(bool),
    /// Serialized as `null`.
    Empty,
}

impl From<Value> for Payload {
    fn from(v: Value) -> Self {
        match v {
            Value::Num(n) => Payload::Num(n),
            Value::Bool(b) => Payload::Bool(b),
        }
    }
}

impl Payload {
    pub fn kind(self) -> TopicKind {
        match self {
            Payload::Num(_) => TopicKind::Numeric,
            Payload::Bool(_) => TopicKind::Boolean,
            Payload::Empty => TopicKind::Empty,
        }
    }

    fn value(self) -> Option<Value> {
        match self {
            Payload::Num(n) => Some(Value::Num(n)),
            Payload::Bool(b) => Some(Value::Bool(b)),
            Payload::Empty => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TopicKind {
    Numeric,
    Boolean,
    Empty,
}

impl From<VarKind> for TopicKind {
    fn from(k: VarKind) -> Self {
        match k {
            VarKind::Numeric => TopicKind::Numeric,
            VarKind::Boolean => TopicKind::Boolean,
        }
    }
}

impl fmt::Display for TopicKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TopicKind::Numeric => "numeric",
            TopicKind::Boolean => "boolean",
            TopicKind::Empty => "empty",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BusMessage {
    pub seq: u64,
    #[serde(rename = "t")]
    pub time: f64,
    pub topic: String,
    #[serde(rename = "value")]
    pub payload: Payload,
}

/// When a hosted monitor steps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EvalPolicy {
    /// After every input message (or, with instant coalescing, once per
    /// instant that delivered at least one input).
    OnAnyMessage,
    /// Once every subscribed input has received a message since the last step.
    OnAllInputsChanged,
    /// At times `0, p, 2p, ...`, after all messages up to that time.
    FixedClock(f64),
}

impl EvalPolicy {
    pub fn fixed_clock(period: f64) -> Result<Self, SimError> {
        if period.is_finite() && period > 0.0 {
            Ok(EvalPolicy::FixedClock(period))
        } else {
            Err(SimError::InvalidPeriod(period))
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BusOptions {
    /// Treat messages with equal timestamps as one instant: message-driven
    /// monitors update all inputs of the instant, then step once.
    pub coalesce_instants: bool,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("topic `{topic}` carries {expected} messages, got {found}")]
    TopicTypeMismatch {
        topic: String,
        expected: TopicKind,
        found: TopicKind,
    },
    #[error("node plan does not match the monitor: {0}")]
    PlanMismatch(String),
    #[error("clock period must be positive, got {0}")]
    InvalidPeriod(f64),
    #[error("no attached node with id {0}")]
    UnknownNode(usize),
    #[error(transparent)]
    Monitor(#[from] MonitorError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub usize);

/// A handler call observed on the bus.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    /// Monitor step at which the handler fired.
    pub step: u64,
    pub handler: String,
    pub requirement_id: String,
    /// Sequence number of the published violation message.
    pub seq: u64,
}

/// What one hosted monitor did during its lifetime.
#[derive(Debug, Clone, PartialEq)]
pub struct MonitorReport {
    pub node: NodeId,
    pub externs: Vec<String>,
    pub steps: u64,
    pub violations: Vec<Violation>,
    /// Extern values sampled at each step.
    pub samples: Vec<Vec<Value>>,
}

impl MonitorReport {
    /// The discrete trace the monitor actually observed.
    pub fn induced_trace(&self) -> Trace {
        let mut tr = Trace::empty(self.samples.len());
        for (i, name) in self.externs.iter().enumerate() {
            let column = self.samples.iter().map(|row| row[i]).collect();
            tr.insert(name.clone(), column)
                .expect("every sample row has one value per extern");
        }
        tr
    }

    /// Violation steps per handler, in firing order.
    pub fn fired_steps(&self) -> Vec<(u64, String)> {
        self.violations
            .iter()
            .map(|v| (v.step, v.handler.clone()))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum LogEntry {
    Message(BusMessage),
    Line { log: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Delivery {
    pub seq: u64,
    pub node: NodeId,
}

/// Everything observable from one replay.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunLog {
    pub entries: Vec<LogEntry>,
    pub deliveries: Vec<Delivery>,
    /// Reports of the monitors attached at the end of the replay.
    pub monitors: Vec<MonitorReport>,
}

impl RunLog {
    pub fn messages(&self) -> impl Iterator<Item = &BusMessage> {
        self.entries.iter().filter_map(|e| match e {
            LogEntry::Message(m) => Some(m),
            LogEntry::Line { .. } => None,
        })
    }

    pub fn log_lines(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().filter_map(|e| match e {
            LogEntry::Line { log } => Some(log.as_str()),
            LogEntry::Message(_) => None,
        })
    }

    /// Messages published on `topic`.
    pub fn on_topic<'a>(&'a self, topic: &'a str) -> impl Iterator<Item = &'a BusMessage> {
        self.messages().filter(move |m| m.topic == topic)
    }

    /// Violations per requirement id over all monitors, in trigger order,
    /// including requirements that never fired.
    pub fn violation_counts(&self, monitors: &[&MonitorSpec]) -> Vec<(String, usize)> {
        let mut counts: Vec<(String, usize)> = Vec::new();
        for m in monitors {
            for t in &m.triggers {
                if !counts.iter().any(|(id, _)| *id == t.requirement_id) {
                    counts.push((t.requirement_id.clone(), 0));
                }
            }
        }
        for report in &self.monitors {
            for v in &report.violations {
                match counts.iter_mut().find(|(id, _)| *id == v.requirement_id) {
                    Some((_, n)) => *n += 1,
                    None => counts.push((v.requirement_id.clone(), 1)),
                }
            }
        }
        counts
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for e in &self.entries {
            out.push_str(&serde_json::to_string(e).expect("log entry serializes"));
            out.push('\n');
        }
        out
    }
}

struct HostedMonitor {
    state: MonitorState,
    policy: EvalPolicy,
    /// Extern indices fed by each input topic.
    inputs: BTreeMap<String, Vec<usize>>,
    /// Externs fed by topics (parameters are set at attach time).
    subscribed: Vec<usize>,
    changed: Vec<bool>,
    /// An input arrived in the current instant (coalescing only).
    dirty: bool,
    /// Index of the next clock tick.
    next_tick: u64,
    /// Violation topic per trigger.
    publish_topics: Vec<String>,
    report: MonitorReport,
}

impl HostedMonitor {
    fn ready(&self) -> bool {
        self.state.is_initialized()
    }

    fn step(&mut self) -> Result<Vec<(String, usize)>, MonitorError> {
        let step = self.state.steps();
        let sample: Vec<Value> = self
            .state
            .inputs()
            .iter()
            .map(|v| v.expect("stepped only when initialized"))
            .collect();
        let fired = self.state.step()?;
        self.report.samples.push(sample);
        self.report.steps = self.state.steps();
        for c in &mut self.changed {
            *c = false;
        }
        let spec = self.state.spec();
        Ok(fired
            .into_iter()
            .map(|i| {
                self.report.violations.push(Violation {
                    step,
                    handler: spec.triggers[i].handler_name.clone(),
                    requirement_id: spec.triggers[i].requirement_id.clone(),
                    seq: 0,
                });
                (self.publish_topics[i].clone(), self.report.violations.len() - 1)
            })
            .collect())
    }

    fn tick_time(&self, k: u64) -> Option<f64> {
        match self.policy {
            EvalPolicy::FixedClock(p) => Some(k as f64 * p),
            _ => None,
        }
    }
}

struct Logger {
    /// Violation topic → handler name.
    topics: BTreeMap<String, String>,
}

enum Node {
    Monitor(Box<HostedMonitor>),
    Logger(Logger),
}

impl Node {
    fn subscribes(&self, topic: &str) -> bool {
        match self {
            Node::Monitor(m) => m.inputs.contains_key(topic),
            Node::Logger(l) => l.topics.contains_key(topic),
        }
    }
}

/// Output of handling one delivery.
#[derive(Default)]
struct Reaction {
    /// (topic, monitor violation index)
    publish: Vec<(String, usize)>,
    lines: Vec<String>,
}

/// A message to publish: topic, payload and, for violations, the
/// publishing node and its violation index.
type Outgoing = (String, Payload, Option<(usize, usize)>);

/// The bus. Nodes are attached, then traces are replayed through them.
pub struct Bus {
    options: BusOptions,
    topics: BTreeMap<String, TopicKind>,
    nodes: Vec<Option<Node>>,
    seq: u64,
}

impl Default for Bus {
    fn default() -> Self {
        Self::new(BusOptions::default())
    }
}

impl Bus {
    pub fn new(options: BusOptions) -> Self {
        Self {
            options,
            topics: BTreeMap::new(),
            nodes: Vec::new(),
            seq: 0,
        }
    }

    /// Kind of a topic some node publishes or subscribes to.
    pub fn topic_kind(&self, topic: &str) -> Option<TopicKind> {
        self.topics.get(topic).copied()
    }

    fn declare_topics(&mut self, wanted: &[(String, TopicKind)]) -> Result<(), SimError> {
        let mut staged = self.topics.clone();
        for (topic, kind) in wanted {
            match staged.get(topic) {
                Some(existing) if existing != kind => {
                    return Err(SimError::TopicTypeMismatch {
                        topic: topic.clone(),
                        expected: *existing,
                        found: *kind,
                    })
                }
                _ => {
                    staged.insert(topic.clone(), *kind);
                }
            }
        }
        self.topics = staged;
        Ok(())
    }

    /// Hosts a monitor wired as `plan` describes. Parameter inputs take their
    /// default values immediately.
    pub fn attach_monitor(
        &mut self,
        plan: &NodePlan,
        m: &MonitorSpec,
        policy: EvalPolicy,
    ) -> Result<NodeId, SimError> {
        if let EvalPolicy::FixedClock(p) = policy {
            EvalPolicy::fixed_clock(p)?;
        }
        if plan.publishers.len() != m.triggers.len()
            || plan
                .publishers
                .iter()
                .zip(&m.triggers)
                .any(|(p, t)| p.handler != t.handler_name)
        {
            return Err(SimError::PlanMismatch(
                "publishers do not match the monitor's triggers".into(),
            ));
        }
        let mut state = MonitorState::new(Arc::new(m.clone()));
        let mut inputs: BTreeMap<String, Vec<usize>> = BTreeMap::new();
        let mut subscribed = Vec::new();
        let mut wanted = Vec::new();
        for (idx, ext) in m.externs.iter().enumerate() {
            if let Some(sub) = plan.subscriptions.iter().find(|s| s.variable == ext.name) {
                inputs.entry(sub.topic.clone()).or_default().push(idx);
                subscribed.push(idx);
                wanted.push((sub.topic.clone(), TopicKind::from(ext.kind)));
            } else if let Some(p) = plan.parameters.iter().find(|p| p.variable == ext.name) {
                state.set_input_at(idx, p.default)?;
            } else {
                return Err(SimError::PlanMismatch(format!(
                    "input `{}` is neither subscribed nor a parameter",
                    ext.name
                )));
            }
        }
        for p in &plan.publishers {
            wanted.push((p.topic.clone(), TopicKind::Empty));
        }
        self.declare_topics(&wanted)?;
        let node = HostedMonitor {
            state,
            policy,
            inputs,
            changed: vec![false; m.externs.len()],
            subscribed,
            dirty: false,
            next_tick: 0,
            publish_topics: plan.publishers.iter().map(|p| p.topic.clone()).collect(),
            report: MonitorReport {
                node: NodeId(self.nodes.len()),
                externs: m.externs.iter().map(|e| e.name.clone()).collect(),
                steps: 0,
                violations: Vec::new(),
                samples: Vec::new(),
            },
        };
        self.nodes.push(Some(Node::Monitor(Box::new(node))));
        Ok(NodeId(self.nodes.len() - 1))
    }

    /// Attaches a logging node that subscribes to every violation topic of
    /// `plan` and appends `violation: <handler> at seq N` lines to the log.
    pub fn attach_logger(&mut self, plan: &NodePlan) -> Result<NodeId, SimError> {
        let wanted: Vec<_> = plan
            .logger_subscriptions
            .iter()
            .map(|l| (l.topic.clone(), TopicKind::Empty))
            .collect();
        self.declare_topics(&wanted)?;
        let topics = plan
            .logger_subscriptions
            .iter()
            .map(|l| (l.topic.clone(), l.handler.clone()))
            .collect();
        self.nodes.push(Some(Node::Logger(Logger { topics })));
        Ok(NodeId(self.nodes.len() - 1))
    }

    pub fn detach(&mut self, id: NodeId) -> Result<(), SimError> {
        match self.nodes.get_mut(id.0) {
            Some(slot @ Some(_)) => {
                *slot = None;
                Ok(())
            }
            _ => Err(SimError::UnknownNode(id.0)),
        }
    }

    /// Lifetime report of an attached monitor.
    pub fn report(&self, id: NodeId) -> Option<&MonitorReport> {
        match self.nodes.get(id.0) {
            Some(Some(Node::Monitor(m))) => Some(&m.report),
            _ => None,
        }
    }

    fn check_trace(&self, tr: &ReplayTrace) -> Result<(), SimError> {
        for ev in tr.events() {
            let found = Payload::from(ev.value).kind();
            if let Some(&expected) = self.topics.get(&ev.topic) {
                if expected != found {
                    return Err(SimError::TopicTypeMismatch {
                        topic: ev.topic.clone(),
                        expected,
                        found,
                    });
                }
            }
        }
        Ok(())
    }

    /// Replays a trace through the attached nodes. Monitor state carries
    /// over between replays.
    pub fn replay(&mut self, tr: &ReplayTrace) -> Result<RunLog, SimError> {
        self.check_trace(tr)?;
        let mut log = RunLog::default();
        let events = tr.events();
        let mut i = 0;
        while i < events.len() {
            let now = events[i].time;
            self.fire_ticks(&mut log, |t| t < now)?;
            let mut j = i;
            while j < events.len() && events[j].time == now {
                j += 1;
            }
            for ev in &events[i..j] {
                self.publish(&mut log, now, vec![(ev.topic.clone(), ev.value.into(), None)])?;
            }
            if self.options.coalesce_instants {
                self.end_instant(&mut log, now)?;
            }
            i = j;
        }
        if let Some(last) = events.last() {
            let end = last.time;
            self.fire_ticks(&mut log, |t| t <= end)?;
        }
        log.monitors = self
            .nodes
            .iter()
            .filter_map(|n| match n {
                Some(Node::Monitor(m)) => Some(m.report.clone()),
                _ => None,
            })
            .collect();
        Ok(log)
    }

    /// Steps every message-driven monitor that received input this instant.
    fn end_instant(&mut self, log: &mut RunLog, now: f64) -> Result<(), SimError> {
        for idx in 0..self.nodes.len() {
            let Some(Node::Monitor(m)) = &mut self.nodes[idx] else { continue };
            if !(m.dirty && m.policy == EvalPolicy::OnAnyMessage) {
                continue;
            }
            m.dirty = false;
            if !m.ready() {
                continue;
            }
            let fired = m.step()?;
            self.publish_violations(log, now, idx, fired)?;
        }
        Ok(())
    }

    /// Fires pending clock ticks whose time satisfies `due`, earliest first,
    /// ties in attach order.
    fn fire_ticks(&mut self, log: &mut RunLog, due: impl Fn(f64) -> bool) -> Result<(), SimError> {
        loop {
            let next = self
                .nodes
                .iter()
                .enumerate()
                .filter_map(|(idx, n)| match n {
                    Some(Node::Monitor(m)) => m.tick_time(m.next_tick).map(|t| (t, idx)),
                    _ => None,
                })
                .filter(|(t, _)| due(*t))
                .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            let Some((time, idx)) = next else { return Ok(()) };
            let Some(Node::Monitor(m)) = &mut self.nodes[idx] else { unreachable!() };
            m.next_tick += 1;
            if !m.ready() {
                continue;
            }
            let fired = m.step()?;
            self.publish_violations(log, time, idx, fired)?;
        }
    }

    fn publish_violations(
        &mut self,
        log: &mut RunLog,
        time: f64,
        node: usize,
        fired: Vec<(String, usize)>,
    ) -> Result<(), SimError> {
        let msgs = fired
            .into_iter()
            .map(|(topic, v)| (topic, Payload::Empty, Some((node, v))))
            .collect();
        self.publish(log, time, msgs)
    }

    /// Delivers messages and everything they cause, FIFO.
    fn publish(
        &mut self,
        log: &mut RunLog,
        time: f64,
        initial: Vec<Outgoing>,
    ) -> Result<(), SimError> {
        let mut queue: VecDeque<_> = initial.into();
        while let Some((topic, payload, origin)) = queue.pop_front() {
            let seq = self.seq;
            self.seq += 1;
            if let Some((node, v)) = origin {
                if let Some(Node::Monitor(m)) = &mut self.nodes[node] {
                    m.report.violations[v].seq = seq;
                }
            }
            let msg = BusMessage {
                seq,
                time,
                topic,
                payload,
            };
            log.entries.push(LogEntry::Message(msg.clone()));
            for idx in 0..self.nodes.len() {
                let Some(node) = &mut self.nodes[idx] else { continue };
                if !node.subscribes(&msg.topic) {
                    continue;
                }
                log.deliveries.push(Delivery {
                    seq,
                    node: NodeId(idx),
                });
                let reaction = deliver(node, &msg, self.options)?;
                for line in reaction.lines {
                    log.entries.push(LogEntry::Line { log: line });
                }
                for (topic, v) in reaction.publish {
                    queue.push_back((topic, Payload::Empty, Some((idx, v))));
                }
            }
        }
        Ok(())
    }
}

fn deliver(node: &mut Node, msg: &BusMessage, options: BusOptions) -> Result<Reaction, SimError> {
    let mut reaction = Reaction::default();
    match node {
        Node::Logger(l) => {
            if let Some(handler) = l.topics.get(&msg.topic) {
                reaction
                    .lines
                    .push(format!("violation: {handler} at seq {}", msg.seq));
            }
        }
        Node::Monitor(m) => {
            let value = msg.payload.value().ok_or_else(|| SimError::TopicTypeMismatch {
                topic: msg.topic.clone(),
                expected: TopicKind::Numeric,
                found: TopicKind::Empty,
            })?;
            let targets = m.inputs.get(&msg.topic).cloned().unwrap_or_default();
            for idx in targets {
                m.state.set_input_at(idx, value)?;
                m.changed[idx] = true;
            }
            let should_step = match m.policy {
                EvalPolicy::OnAnyMessage if options.coalesce_instants => {
                    m.dirty = true;
                    false
                }
                EvalPolicy::OnAnyMessage => true,
                EvalPolicy::OnAllInputsChanged => m.subscribed.iter().all(|&i| m.changed[i]),
                EvalPolicy::FixedClock(_) => false,
            };
            if should_step && m.ready() {
                reaction.publish = m.step()?;
            }
        }
    }
    Ok(reaction)
}
