//! Monitors hosted on the simulated bus.

mod common;

use common::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use reqmon_core::mtlcore::false_steps;
use reqmon_core::nodegen::{load_varmap, plan_nodes, NodePlan};
use reqmon_core::simbus::{
    Bus, BusOptions, EvalPolicy, LogEntry, Payload, ReplayEvent, ReplayTrace, RunLog, SimError,
    TopicKind,
};
use reqmon_core::testgen::{declarations, lockstep_replay, random_formula, random_trace, GenConfig};
use reqmon_core::{MonitorSpec, MtlFormula, Trace, Value, VarDecl, VarKind};

const ROS001_VARMAP: &str = r#"{"variables": [
  {"name": "current_consumption", "type": "std_msgs/msg/Float32", "topic": "motor/current"},
  {"name": "windspeed", "type": "std_msgs/msg/Float32", "topic": "windspeed"},
  {"name": "cc_t", "type": "std_msgs/msg/Float64", "parameter": 10.0},
  {"name": "ws_t", "type": "std_msgs/msg/Float64", "parameter": 5.0}
]}"#;

const VIOLATION_TOPIC: &str = "copilot/handlerpropROS_001";

fn topic_of(var: &str) -> String {
    format!("in/{var}")
}

fn varmap_for(decls: &[VarDecl]) -> String {
    let entries: Vec<String> = decls
        .iter()
        .map(|d| {
            let ty = match d.kind {
                VarKind::Boolean => "std_msgs/msg/Bool",
                VarKind::Numeric => "std_msgs/msg/Float64",
            };
            format!(r#"{{"name": "{}", "type": "{ty}", "topic": "{}"}}"#, d.name, topic_of(&d.name))
        })
        .collect();
    format!(r#"{{"variables": [{}]}}"#, entries.join(","))
}

/// A random single-requirement monitor with at least one subscribed input.
fn random_setup(rng: &mut ChaCha8Rng) -> (MtlFormula, MonitorSpec, NodePlan, Vec<VarDecl>) {
    let cfg = GenConfig::default();
    let decls = declarations(cfg.vars);
    loop {
        let f = random_formula(rng, &decls, &cfg);
        let m = monitor_of(&f, &decls);
        if m.externs.is_empty() {
            continue;
        }
        let plan = plan_nodes(&m, &load_varmap(&varmap_for(&decls)).unwrap(), "copilot").unwrap();
        return (f, m, plan, decls);
    }
}

fn run(plan: &NodePlan, m: &MonitorSpec, policy: EvalPolicy, coalesce: bool, tr: &ReplayTrace) -> RunLog {
    let mut bus = Bus::new(BusOptions {
        coalesce_instants: coalesce,
    });
    bus.attach_monitor(plan, m, policy).unwrap();
    bus.attach_logger(plan).unwrap();
    bus.replay(tr).unwrap()
}

fn violation_steps(log: &RunLog) -> Vec<usize> {
    log.monitors[0]
        .violations
        .iter()
        .map(|v| v.step as usize)
        .collect()
}

fn restricted(tr: &Trace, m: &MonitorSpec) -> Trace {
    let mut out = Trace::empty(tr.len());
    for e in &m.externs {
        out.insert(e.name.clone(), tr.column(&e.name).unwrap().to_vec())
            .unwrap();
    }
    out
}

#[test]
fn policies_agree_on_lockstep_traces() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for case in 0..150 {
        let (f, m, plan, decls) = random_setup(&mut rng);
        let len = rng.gen_range(1..60);
        let tr = random_trace(&mut rng, &decls, len);
        let topics: Vec<_> = decls.iter().map(|d| (d.name.clone(), topic_of(&d.name))).collect();
        let replay = lockstep_replay(&tr, &topics);
        let expected = false_steps(&f, &tr).unwrap();
        for (policy, coalesce) in [
            (EvalPolicy::OnAnyMessage, true),
            (EvalPolicy::OnAllInputsChanged, false),
            (EvalPolicy::fixed_clock(1.0).unwrap(), false),
        ] {
            let log = run(&plan, &m, policy, coalesce, &replay);
            let report = &log.monitors[0];
            assert_eq!(report.steps as usize, len, "case {case} {policy:?}");
            assert_eq!(report.induced_trace(), restricted(&tr, &m), "case {case} {policy:?}");
            assert_eq!(violation_steps(&log), expected, "case {case} {policy:?}: {f}");
        }
    }
}

/// Events at irregular times, one random topic each, sometimes several per instant.
fn jittered_replay(rng: &mut ChaCha8Rng, decls: &[VarDecl], n: usize) -> ReplayTrace {
    let mut time = 0.0;
    let events = (0..n)
        .map(|_| {
            if rng.gen_ratio(2, 3) {
                time += f64::from(rng.gen_range(1..8u32)) / 4.0;
            }
            let d = &decls[rng.gen_range(0..decls.len())];
            let value = match d.kind {
                VarKind::Boolean => Value::Bool(rng.gen_ratio(3, 4)),
                VarKind::Numeric => Value::Num(f64::from(rng.gen_range(-3..=3))),
            };
            ReplayEvent {
                time,
                topic: topic_of(&d.name),
                value,
            }
        })
        .collect();
    ReplayTrace::new(events).unwrap()
}

#[test]
fn violations_match_the_induced_trace_under_every_policy() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for case in 0..150 {
        let (f, m, plan, decls) = random_setup(&mut rng);
        let replay = jittered_replay(&mut rng, &decls, 80);
        for (policy, coalesce) in [
            (EvalPolicy::OnAnyMessage, false),
            (EvalPolicy::OnAnyMessage, true),
            (EvalPolicy::OnAllInputsChanged, false),
            (EvalPolicy::fixed_clock(0.5).unwrap(), false),
            (EvalPolicy::fixed_clock(1.25).unwrap(), true),
        ] {
            let log = run(&plan, &m, policy, coalesce, &replay);
            let induced = log.monitors[0].induced_trace();
            assert_eq!(
                violation_steps(&log),
                false_steps(&f, &induced).unwrap(),
                "case {case} {policy:?}: {f}"
            );
        }
    }
}

/// Every message reaches each node subscribed to its topic exactly once.
fn check_no_loss(log: &RunLog, plan: &NodePlan) {
    let monitor_topics: Vec<&str> = plan.subscriptions.iter().map(|s| s.topic.as_str()).collect();
    let logger_topics: Vec<&str> = plan
        .logger_subscriptions
        .iter()
        .map(|l| l.topic.as_str())
        .collect();
    for msg in log.messages() {
        let to = |node: usize| {
            log.deliveries
                .iter()
                .filter(|d| d.seq == msg.seq && d.node.0 == node)
                .count()
        };
        let want_monitor = usize::from(monitor_topics.contains(&msg.topic.as_str()));
        let want_logger = usize::from(logger_topics.contains(&msg.topic.as_str()));
        assert_eq!(to(0), want_monitor, "{msg:?}");
        assert_eq!(to(1), want_logger, "{msg:?}");
    }
    assert!(log.deliveries.iter().all(|d| d.node.0 < 2));
    let seqs: Vec<u64> = log.messages().map(|m| m.seq).collect();
    assert!(seqs.windows(2).all(|w| w[0] < w[1]));
    let violations = log
        .messages()
        .filter(|m| m.payload == Payload::Empty)
        .count();
    assert_eq!(violations, log.log_lines().count());
    assert_eq!(violations, log.monitors[0].violations.len());
}

proptest! {
    #[test]
    fn messages_are_delivered_exactly_once(seed in any::<u64>(), clock in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (_, m, plan, decls) = random_setup(&mut rng);
        let replay = jittered_replay(&mut rng, &decls, 60);
        let policy = if clock { EvalPolicy::fixed_clock(0.75).unwrap() } else { EvalPolicy::OnAnyMessage };
        let log = run(&plan, &m, policy, false, &replay);
        check_no_loss(&log, &plan);
    }

    #[test]
    fn replay_is_deterministic(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (_, m, plan, decls) = random_setup(&mut rng);
        let replay = jittered_replay(&mut rng, &decls, 60);
        let a = run(&plan, &m, EvalPolicy::OnAnyMessage, false, &replay);
        let b = run(&plan, &m, EvalPolicy::OnAnyMessage, false, &replay);
        prop_assert_eq!(a.to_jsonl(), b.to_jsonl());
        prop_assert_eq!(a.deliveries, b.deliveries);
    }
}

fn ros001_replay(recovery: bool) -> ReplayTrace {
    let topics = [
        ("current_consumption".to_string(), "motor/current".to_string()),
        ("windspeed".to_string(), "windspeed".to_string()),
    ];
    lockstep_replay(&uam_trace(recovery), &topics)
}

fn ros001_plan() -> NodePlan {
    plan_nodes(&ros001_monitor(), &load_varmap(ROS001_VARMAP).unwrap(), "copilot").unwrap()
}

#[test]
fn ros001_violation_scenario_on_the_bus() {
    let m = ros001_monitor();
    let plan = ros001_plan();
    for (policy, coalesce) in [
        (EvalPolicy::OnAnyMessage, true),
        (EvalPolicy::OnAllInputsChanged, false),
        (EvalPolicy::fixed_clock(1.0).unwrap(), false),
    ] {
        let log = run(&plan, &m, policy, coalesce, &ros001_replay(false));
        let hits: Vec<_> = log.on_topic(VIOLATION_TOPIC).collect();
        assert_eq!(hits.len(), 1, "{policy:?}");
        assert_eq!(hits[0].time, 20.0);
        assert_eq!(log.monitors[0].fired_steps(), vec![(20, "handlerpropROS_001".into())]);
        let line = format!("violation: handlerpropROS_001 at seq {}", hits[0].seq);
        assert_eq!(log.log_lines().collect::<Vec<_>>(), vec![line.as_str()]);
        assert_eq!(
            log.violation_counts(&[&m]),
            vec![("ROS-001".to_string(), 1)]
        );
    }
}

#[test]
fn ros001_recovery_scenario_is_silent() {
    let m = ros001_monitor();
    let plan = ros001_plan();
    let log = run(&plan, &m, EvalPolicy::OnAnyMessage, true, &ros001_replay(true));
    assert_eq!(log.on_topic(VIOLATION_TOPIC).count(), 0);
    assert_eq!(log.log_lines().count(), 0);
    assert_eq!(log.monitors[0].steps, 21);
}

#[test]
fn uncoalesced_lockstep_steps_once_per_message() {
    let m = ros001_monitor();
    let plan = ros001_plan();
    let log = run(&plan, &m, EvalPolicy::OnAnyMessage, false, &ros001_replay(false));
    // The first message arrives before the wind input has a value.
    assert_eq!(log.monitors[0].steps, 41);
    let induced = log.monitors[0].induced_trace();
    assert_eq!(
        violation_steps(&log),
        false_steps(&ros001_spec().requirements[0].ptmtl, &induced).unwrap()
    );
}

#[test]
fn mistyped_events_are_rejected_before_delivery() {
    let m = ros001_monitor();
    let plan = ros001_plan();
    let mut bus = Bus::default();
    bus.attach_monitor(&plan, &m, EvalPolicy::OnAnyMessage).unwrap();
    let bad = ReplayTrace::new(vec![
        ReplayEvent {
            time: 0.0,
            topic: "windspeed".into(),
            value: Value::Num(7.0),
        },
        ReplayEvent {
            time: 1.0,
            topic: "motor/current".into(),
            value: Value::Bool(true),
        },
    ])
    .unwrap();
    assert_eq!(
        bus.replay(&bad).unwrap_err(),
        SimError::TopicTypeMismatch {
            topic: "motor/current".into(),
            expected: TopicKind::Numeric,
            found: TopicKind::Boolean,
        }
    );
    assert_eq!(bus.report(reqmon_core::simbus::NodeId(0)).unwrap().steps, 0);
}

#[test]
fn run_log_serializes_messages_and_lines() {
    let log = run(
        &ros001_plan(),
        &ros001_monitor(),
        EvalPolicy::OnAnyMessage,
        true,
        &ros001_replay(false),
    );
    let text = log.to_jsonl();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), log.entries.len());
    assert_eq!(lines[0], r#"{"seq":0,"t":0.0,"topic":"motor/current","value":12.0}"#);
    let last_line = log
        .entries
        .iter()
        .rposition(|e| matches!(e, LogEntry::Line { .. }))
        .unwrap();
    assert!(lines[last_line].starts_with(r#"{"log":"violation: handlerpropROS_001"#));
}
