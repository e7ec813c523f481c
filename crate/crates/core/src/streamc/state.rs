use std::sync::Arc;

use super::{eval_pointwise, MonitorError, MonitorSpec, StreamOp};
use crate::mtlcore::Value;

/// Fixed-length history of one boolean stream, indexed by step.
#[derive(Debug, Clone)]
struct RingBuffer {
    cells: Box<[bool]>,
}

impl RingBuffer {
    fn new(len: usize) -> Self {
        Self {
            cells: vec![false; len].into_boxed_slice(),
        }
    }

    fn write(&mut self, step: u64, value: bool) {
        let len = self.cells.len() as u64;
        self.cells[(step % len) as usize] = value;
    }

    /// Value `lag` steps before `step`; `lag` must be below the length and
    /// at most `step`.
    fn read(&self, step: u64, lag: u64) -> bool {
        let len = self.cells.len() as u64;
        self.cells[((step - lag) % len) as usize]
    }
}

/// Running state of a compiled monitor: current inputs, stream values,
/// ring buffers and the step counter.
///
/// Single-owner; callers serialize input writes and steps.
#[derive(Debug, Clone)]
pub struct MonitorState {
    spec: Arc<MonitorSpec>,
    inputs: Vec<Option<Value>>,
    values: Vec<bool>,
    buffers: Vec<RingBuffer>,
    /// First buffer index of each stream, if it keeps history.
    buffer_of: Vec<Option<usize>>,
    step: u64,
}

impl MonitorState {
    pub fn new(spec: Arc<MonitorSpec>) -> Self {
        let mut buffers = Vec::new();
        let mut buffer_of = Vec::with_capacity(spec.streams.len());
        for op in &spec.streams {
            match op.buffer_len() {
                Some(len) => {
                    buffer_of.push(Some(buffers.len()));
                    for _ in op.buffered_inputs() {
                        buffers.push(RingBuffer::new(len));
                    }
                }
                None => buffer_of.push(None),
            }
        }
        Self {
            inputs: vec![None; spec.externs.len()],
            values: vec![false; spec.streams.len()],
            buffers,
            buffer_of,
            step: 0,
            spec,
        }
    }

    pub fn spec(&self) -> &MonitorSpec {
        &self.spec
    }

    /// Number of steps taken so far.
    pub fn steps(&self) -> u64 {
        self.step
    }

    /// Sets the latest value of an input. Does not step.
    pub fn set_input(&mut self, name: &str, value: Value) -> Result<(), MonitorError> {
        let idx = self
            .spec
            .extern_index(name)
            .ok_or_else(|| MonitorError::UnknownExtern(name.to_string()))?;
        self.set_input_at(idx, value)
    }

    pub fn set_input_at(&mut self, idx: usize, value: Value) -> Result<(), MonitorError> {
        let decl = &self.spec.externs[idx];
        if value.kind() != decl.kind {
            return Err(MonitorError::KindMismatch {
                name: decl.name.clone(),
                expected: decl.kind,
                found: value.kind(),
            });
        }
        self.inputs[idx] = Some(value);
        Ok(())
    }

    pub fn input(&self, name: &str) -> Option<Value> {
        self.spec.extern_index(name).and_then(|i| self.inputs[i])
    }

    /// Current input values in extern order.
    pub fn inputs(&self) -> &[Option<Value>] {
        &self.inputs
    }

    pub fn is_initialized(&self) -> bool {
        self.inputs.iter().all(Option::is_some)
    }

    /// Memory footprint in cells (inputs, stream values, buffer cells).
    /// Fixed at construction.
    pub fn capacity(&self) -> usize {
        self.inputs.len()
            + self.values.len()
            + self.buffers.iter().map(|b| b.cells.len()).sum::<usize>()
    }

    /// Advances one step and returns the indices of the triggers that fired,
    /// in declaration order.
    pub fn step(&mut self) -> Result<Vec<usize>, MonitorError> {
        let inputs: Vec<Value> = self
            .inputs
            .iter()
            .enumerate()
            .map(|(i, v)| v.ok_or_else(|| MonitorError::UninitializedExtern(self.spec.externs[i].name.clone())))
            .collect::<Result<_, _>>()?;
        let t = self.step;
        for (i, op) in self.spec.streams.iter().enumerate() {
            let v = match op {
                StreamOp::Const(b) => *b,
                StreamOp::Sample(p) => matches!(eval_pointwise(p, &inputs), Value::Bool(true)),
                StreamOp::First => t == 0,
                StreamOp::Not(a) => !self.values[*a],
                StreamOp::And(a, b) => self.values[*a] && self.values[*b],
                StreamOp::Or(a, b) => self.values[*a] || self.values[*b],
                StreamOp::Implies(a, b) => !self.values[*a] || self.values[*b],
                StreamOp::Yesterday(a) => {
                    let buf = &mut self.buffers[self.buffer_of[i].expect("buffered")];
                    buf.write(t, self.values[*a]);
                    t >= 1 && buf.read(t, 1)
                }
                StreamOp::Once { input, window } => {
                    let buf = &mut self.buffers[self.buffer_of[i].expect("buffered")];
                    buf.write(t, self.values[*input]);
                    let hi = u64::from(window.hi()).min(t);
                    (u64::from(window.lo())..=hi).any(|k| buf.read(t, k))
                }
                StreamOp::Historically { input, window } => {
                    let buf = &mut self.buffers[self.buffer_of[i].expect("buffered")];
                    buf.write(t, self.values[*input]);
                    let hi = u64::from(window.hi());
                    t >= hi && (u64::from(window.lo())..=hi).all(|k| buf.read(t, k))
                }
                StreamOp::Since { lhs, rhs, window } => {
                    let b = self.buffer_of[i].expect("buffered");
                    self.buffers[b].write(t, self.values[*lhs]);
                    self.buffers[b + 1].write(t, self.values[*rhs]);
                    let (lhs_buf, rhs_buf) = (&self.buffers[b], &self.buffers[b + 1]);
                    let lo = u64::from(window.lo());
                    let hi = u64::from(window.hi()).min(t);
                    // Walk back from now; `lhs` must hold after the witness.
                    let mut holds = false;
                    for k in 0..=hi {
                        if k >= lo && rhs_buf.read(t, k) {
                            holds = true;
                            break;
                        }
                        if !lhs_buf.read(t, k) {
                            break;
                        }
                    }
                    holds
                }
            };
            self.values[i] = v;
        }
        let fired = self
            .spec
            .triggers
            .iter()
            .enumerate()
            .filter(|(_, trig)| self.values[trig.guard])
            .map(|(i, _)| i)
            .collect();
        self.step += 1;
        Ok(fired)
    }

    /// Like [`step`](Self::step), returning handler names.
    pub fn step_handlers(&mut self) -> Result<Vec<String>, MonitorError> {
        let fired = self.step()?;
        Ok(fired
            .into_iter()
            .map(|i| self.spec.triggers[i].handler_name.clone())
            .collect())
    }
}
