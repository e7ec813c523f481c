#![allow(dead_code)]

use std::sync::Arc;

use reqmon_core::formalize::{make_component_spec, FormalRequirement, Rate};
use reqmon_core::reqlang::parse_requirement;
use reqmon_core::streamc::compile_monitor;
use reqmon_core::{ComponentSpec, MonitorSpec, MonitorState, MtlFormula, Trace, Value, VarDecl, VarKind};

pub const ROS001_ID: &str = "ROS-001";

/// The UAM requirement with the wind variable named `wind`.
pub fn ros001_text(wind: &str) -> String {
    format!(
        "if persisted(10, current_consumption > cc_t & {wind} > ws_t) ROS_component shall \
         within 10 seconds satisfy current_consumption <= cc_t"
    )
}

pub fn ros001_decls(wind: &str) -> Vec<VarDecl> {
    ["current_consumption", wind, "cc_t", "ws_t"]
        .iter()
        .map(|n| VarDecl::new(*n, VarKind::Numeric))
        .collect()
}

pub fn ros001_spec() -> ComponentSpec {
    let req = parse_requirement(&ros001_text("windspeed"), ROS001_ID).unwrap();
    make_component_spec(&[req], &ros001_decls("windspeed"), Rate::ONE).unwrap()
}

pub fn ros001_monitor() -> MonitorSpec {
    compile_monitor(&ros001_spec()).unwrap()
}

/// Steps 0..=20 with current 12 and wind 7 against thresholds 10 and 5.
/// In the recovery variant current is 9 from step 15.
pub fn uam_trace(recovery: bool) -> Trace {
    let current: Vec<f64> = (0..=20)
        .map(|t| if recovery && t >= 15 { 9.0 } else { 12.0 })
        .collect();
    Trace::empty(21)
        .with_nums("current_consumption", &current)
        .unwrap()
        .with_nums("windspeed", &[7.0; 21])
        .unwrap()
        .with_nums("cc_t", &[10.0; 21])
        .unwrap()
        .with_nums("ws_t", &[5.0; 21])
        .unwrap()
}

/// A single-requirement monitor for `f` with the given inputs.
pub fn monitor_of(f: &MtlFormula, decls: &[VarDecl]) -> MonitorSpec {
    let spec = ComponentSpec {
        component: "c".into(),
        requirements: vec![FormalRequirement {
            id: "R".into(),
            smv_formula: f.to_smv_string(),
            ptmtl: f.clone(),
            raw_text: String::new(),
        }],
        variables: decls.to_vec(),
    };
    compile_monitor(&spec).unwrap()
}

/// Feeds `tr` step by step; returns `(step, trigger index)` in firing order.
pub fn run_online(m: &MonitorSpec, tr: &Trace) -> Vec<(usize, usize)> {
    let mut st = MonitorState::new(Arc::new(m.clone()));
    let mut fired = Vec::new();
    for t in 0..tr.len() {
        for e in &m.externs {
            st.set_input(&e.name, tr.get(&e.name, t).unwrap()).unwrap();
        }
        for i in st.step().unwrap() {
            fired.push((t, i));
        }
    }
    fired
}

pub fn fired_steps(m: &MonitorSpec, tr: &Trace) -> Vec<usize> {
    run_online(m, tr).into_iter().map(|(t, _)| t).collect()
}

/// Every assignment of boolean columns `names` over `len` steps.
pub fn all_bool_traces(names: &[&str], len: usize) -> Vec<Trace> {
    let bits = names.len() * len;
    (0u64..1 << bits)
        .map(|mask| {
            let mut tr = Trace::empty(len);
            for (v, name) in names.iter().enumerate() {
                let col = (0..len)
                    .map(|t| Value::Bool(mask >> (v * len + t) & 1 == 1))
                    .collect();
                tr.insert(*name, col).unwrap();
            }
            tr
        })
        .collect()
}

pub fn bools(tr: &Trace, name: &str) -> Vec<bool> {
    tr.column(name)
        .unwrap()
        .iter()
        .map(|v| matches!(v, Value::Bool(true)))
        .collect()
}
