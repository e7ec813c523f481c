//! Shared workloads for the benchmarks.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use reqmon_core::formalize::{make_component_spec, FormalRequirement, Rate};
use reqmon_core::reqlang::parse_requirement;
use reqmon_core::streamc::compile_monitor;
use reqmon_core::testgen::{declarations, random_formula, random_trace, GenConfig};
use reqmon_core::{ComponentSpec, MonitorSpec, MtlFormula, Trace, VarDecl, VarKind};

pub const ROS001_TEXT: &str = "if persisted(10, current_consumption > cc_t & windspeed > ws_t) \
     ROS_component shall within 10 seconds satisfy current_consumption <= cc_t";

pub fn ros001_spec() -> ComponentSpec {
    let req = parse_requirement(ROS001_TEXT, "ROS-001").expect("requirement parses");
    let decls: Vec<VarDecl> = ["current_consumption", "windspeed", "cc_t", "ws_t"]
        .iter()
        .map(|n| VarDecl::new(*n, VarKind::Numeric))
        .collect();
    make_component_spec(&[req], &decls, Rate::ONE).expect("requirement formalizes")
}

pub fn ros001_monitor() -> MonitorSpec {
    compile_monitor(&ros001_spec()).expect("monitor compiles")
}

/// A seeded random formula, its monitor and a trace of `len` steps.
pub fn random_workload(seed: u64, len: usize) -> (MtlFormula, MonitorSpec, Trace) {
    let cfg = GenConfig::default();
    let decls = declarations(cfg.vars);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let f = random_formula(&mut rng, &decls, &cfg);
    let spec = ComponentSpec {
        component: "bench".into(),
        requirements: vec![FormalRequirement {
            id: "B".into(),
            smv_formula: f.to_smv_string(),
            ptmtl: f.clone(),
            raw_text: String::new(),
        }],
        variables: decls.clone(),
    };
    let m = compile_monitor(&spec).expect("monitor compiles");
    let tr = random_trace(&mut rng, &decls, len);
    (f, m, tr)
}
