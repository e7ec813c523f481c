//! C99 emission of compiled monitors.
//!
//! The generated code follows a global-inputs contract: callers assign the
//! extern globals, call `step()`, and receive violations through handler
//! functions they implement.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io;
use std::path::Path;

use crate::mtlcore::{Trace, Value};
use crate::reqlang::{BoolOp, VarKind};
use crate::streamc::{MonitorSpec, Pointwise, StreamOp};

/// A set of generated files keyed by relative path.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EmittedPackage {
    pub files: BTreeMap<String, String>,
}

impl EmittedPackage {
    /// Writes every file below `root`, creating directories as needed.
    pub fn write_to(&self, root: &Path) -> io::Result<()> {
        for (rel, contents) in &self.files {
            let path = root.join(rel);
            if let Some(parent) = path.parent() {
                std::fs::create_dir_all(parent)?;
            }
            std::fs::write(path, contents)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct COptions {
    /// Emit numeric externs as `float` instead of `double`.
    pub float: bool,
}

pub const HEADER_FILE: &str = "monitor.h";
pub const SOURCE_FILE: &str = "monitor.c";

/// Emits `monitor.h` and `monitor.c` for a compiled monitor.
pub fn emit_c99(m: &MonitorSpec, opts: COptions) -> EmittedPackage {
    let mut files = BTreeMap::new();
    files.insert(HEADER_FILE.to_string(), emit_header(m, opts));
    files.insert(SOURCE_FILE.to_string(), emit_source(m, opts));
    EmittedPackage { files }
}

fn c_type(kind: VarKind, opts: COptions) -> &'static str {
    match (kind, opts.float) {
        (VarKind::Boolean, _) => "bool",
        (VarKind::Numeric, false) => "double",
        (VarKind::Numeric, true) => "float",
    }
}

fn emit_header(m: &MonitorSpec, opts: COptions) -> String {
    let mut h = String::new();
    h.push_str(
        "/* Generated runtime monitor.\n\
         *\n\
         * Usage: assign the input globals, then call step(). Each violated\n\
         * requirement calls its handler, which the caller must define.\n\
         *\n\
         * Not thread-safe: callers must serialize input writes and step().\n\
         */\n",
    );
    h.push_str("#ifndef MONITOR_H\n#define MONITOR_H\n\n");
    h.push_str("#include <stdbool.h>\n#include <stdint.h>\n\n");
    h.push_str("#ifdef __cplusplus\nextern \"C\" {\n#endif\n\n");
    if !m.externs.is_empty() {
        h.push_str("/* Inputs */\n");
        for e in &m.externs {
            let _ = writeln!(h, "extern {} {};", c_type(e.kind, opts), e.name);
        }
        h.push('\n');
    }
    if !m.triggers.is_empty() {
        h.push_str("/* Violation handlers, defined by the caller */\n");
        for t in &m.triggers {
            let _ = writeln!(h, "extern void {}(void);", t.handler_name);
        }
        h.push('\n');
    }
    h.push_str("void step(void);\n\n");
    h.push_str("#ifdef __cplusplus\n}\n#endif\n\n#endif /* MONITOR_H */\n");
    h
}

fn needs_clock(m: &MonitorSpec) -> bool {
    m.streams
        .iter()
        .any(|s| matches!(s, StreamOp::First) || s.buffer_len().is_some())
}

fn emit_source(m: &MonitorSpec, opts: COptions) -> String {
    let mut c = String::new();
    c.push_str("/* Generated runtime monitor. See monitor.h. */\n");
    c.push_str("#include \"monitor.h\"\n\n");
    for e in &m.externs {
        let _ = writeln!(c, "{} {};", c_type(e.kind, opts), e.name);
    }
    if !m.externs.is_empty() {
        c.push('\n');
    }
    if needs_clock(m) {
        c.push_str("static uint64_t mon_t = 0;\n");
    }
    for (i, op) in m.streams.iter().enumerate() {
        let Some(len) = op.buffer_len() else { continue };
        match op {
            StreamOp::Since { .. } => {
                let _ = writeln!(c, "static bool mon_b{i}_lhs[{len}];");
                let _ = writeln!(c, "static bool mon_b{i}_rhs[{len}];");
            }
            _ => {
                let _ = writeln!(c, "static bool mon_b{i}[{len}];");
            }
        }
    }
    if needs_clock(m) {
        c.push('\n');
    }

    c.push_str("void step(void)\n{\n");
    for (i, op) in m.streams.iter().enumerate() {
        emit_stream(&mut c, m, i, op);
    }
    for t in &m.triggers {
        let _ = writeln!(c, "    if (mon_s{}) {{\n        {}();\n    }}", t.guard, t.handler_name);
    }
    if needs_clock(m) {
        c.push_str("    mon_t++;\n");
    }
    c.push_str("}\n");
    c
}

fn emit_stream(c: &mut String, m: &MonitorSpec, i: usize, op: &StreamOp) {
    let len = op.buffer_len().unwrap_or(0);
    match op {
        StreamOp::Const(b) => {
            let _ = writeln!(c, "    bool mon_s{i} = {b};");
        }
        StreamOp::Sample(p) => {
            let _ = writeln!(c, "    bool mon_s{i} = {};", c_expr(p, m));
        }
        StreamOp::First => {
            let _ = writeln!(c, "    bool mon_s{i} = (mon_t == 0);");
        }
        StreamOp::Not(a) => {
            let _ = writeln!(c, "    bool mon_s{i} = !mon_s{a};");
        }
        StreamOp::And(a, b) => {
            let _ = writeln!(c, "    bool mon_s{i} = mon_s{a} && mon_s{b};");
        }
        StreamOp::Or(a, b) => {
            let _ = writeln!(c, "    bool mon_s{i} = mon_s{a} || mon_s{b};");
        }
        StreamOp::Implies(a, b) => {
            let _ = writeln!(c, "    bool mon_s{i} = !mon_s{a} || mon_s{b};");
        }
        StreamOp::Yesterday(a) => {
            let _ = writeln!(c, "    mon_b{i}[mon_t % {len}u] = mon_s{a};");
            let _ = writeln!(
                c,
                "    bool mon_s{i} = mon_t >= 1u && mon_b{i}[(mon_t - 1u) % {len}u];"
            );
        }
        StreamOp::Once { input, window } => {
            let (lo, hi) = (window.lo(), window.hi());
            let _ = writeln!(c, "    mon_b{i}[mon_t % {len}u] = mon_s{input};");
            let _ = writeln!(c, "    bool mon_s{i} = false;");
            let _ = writeln!(
                c,
                "    for (uint64_t mon_k = {lo}u; mon_k <= {hi}u && mon_k <= mon_t; mon_k++) {{\n        \
                 if (mon_b{i}[(mon_t - mon_k) % {len}u]) {{\n            mon_s{i} = true;\n            \
                 break;\n        }}\n    }}"
            );
        }
        StreamOp::Historically { input, window } => {
            let (lo, hi) = (window.lo(), window.hi());
            let _ = writeln!(c, "    mon_b{i}[mon_t % {len}u] = mon_s{input};");
            if hi == 0 {
                let _ = writeln!(c, "    bool mon_s{i} = true;");
            } else {
                let _ = writeln!(c, "    bool mon_s{i} = mon_t >= {hi}u;");
            }
            let _ = writeln!(
                c,
                "    for (uint64_t mon_k = {lo}u; mon_s{i} && mon_k <= {hi}u; mon_k++) {{\n        \
                 mon_s{i} = mon_b{i}[(mon_t - mon_k) % {len}u];\n    }}"
            );
        }
        StreamOp::Since { lhs, rhs, window } => {
            let (lo, hi) = (window.lo(), window.hi());
            let reached = if lo == 0 {
                String::new()
            } else {
                format!("mon_k >= {lo}u && ")
            };
            let _ = writeln!(c, "    mon_b{i}_lhs[mon_t % {len}u] = mon_s{lhs};");
            let _ = writeln!(c, "    mon_b{i}_rhs[mon_t % {len}u] = mon_s{rhs};");
            let _ = writeln!(c, "    bool mon_s{i} = false;");
            let _ = writeln!(
                c,
                "    for (uint64_t mon_k = 0u; mon_k <= {hi}u && mon_k <= mon_t; mon_k++) {{\n        \
                 uint64_t mon_j = (mon_t - mon_k) % {len}u;\n        \
                 if ({reached}mon_b{i}_rhs[mon_j]) {{\n            mon_s{i} = true;\n            \
                 break;\n        }}\n        \
                 if (!mon_b{i}_lhs[mon_j]) {{\n            break;\n        }}\n    }}"
            );
        }
    }
}

fn c_number(n: f64) -> String {
    if n.is_nan() {
        "(0.0 / 0.0)".to_string()
    } else if n.is_infinite() {
        if n > 0.0 { "(1.0 / 0.0)" } else { "(-1.0 / 0.0)" }.to_string()
    } else {
        format!("{n:?}")
    }
}

fn c_expr(p: &Pointwise, m: &MonitorSpec) -> String {
    match p {
        Pointwise::Extern(i) => m.externs[*i].name.clone(),
        Pointwise::Num(n) => c_number(*n),
        Pointwise::Bool(b) => b.to_string(),
        Pointwise::Neg(a) => format!("(-{})", c_expr(a, m)),
        Pointwise::Arith(op, a, b) => {
            format!("({} {} {})", c_expr(a, m), op.symbol(), c_expr(b, m))
        }
        Pointwise::Cmp(op, a, b) => {
            format!("({} {} {})", c_expr(a, m), op.symbol(), c_expr(b, m))
        }
        Pointwise::Not(a) => format!("(!{})", c_expr(a, m)),
        Pointwise::Logic(BoolOp::And, a, b) => format!("({} && {})", c_expr(a, m), c_expr(b, m)),
        Pointwise::Logic(BoolOp::Or, a, b) => format!("({} || {})", c_expr(a, m), c_expr(b, m)),
        Pointwise::Logic(BoolOp::Implies, a, b) => {
            format!("(!{} || {})", c_expr(a, m), c_expr(b, m))
        }
    }
}

/// Per-step input table for the C test driver: a header row of extern names
/// in monitor order, then one row per step. Booleans are written as 1/0.
///
/// Every extern must have a column in `trace`.
pub fn step_trace_csv(m: &MonitorSpec, trace: &Trace) -> Result<String, String> {
    let columns = m
        .externs
        .iter()
        .map(|e| trace.column(&e.name).ok_or_else(|| e.name.clone()))
        .collect::<Result<Vec<_>, _>>()?;
    let mut out = m
        .externs
        .iter()
        .map(|e| e.name.as_str())
        .collect::<Vec<_>>()
        .join(",");
    out.push('\n');
    for t in 0..trace.len() {
        let row: Vec<String> = columns
            .iter()
            .map(|col| match col[t] {
                Value::Bool(b) => u8::from(b).to_string(),
                Value::Num(n) => format!("{n:?}"),
            })
            .collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    Ok(out)
}

/// Formats fired handlers as `step,handler` lines, sorted by step then
/// trigger order.
pub fn fired_lines(fired: &[(u64, String)]) -> String {
    let mut out = String::new();
    for (step, handler) in fired {
        let _ = writeln!(out, "{step},{handler}");
    }
    out
}
