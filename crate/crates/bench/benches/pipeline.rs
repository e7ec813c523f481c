use std::hint::black_box;
use std::sync::Arc;

use criterion::{criterion_group, criterion_main, BatchSize, Criterion, Throughput};
use reqmon_bench::{random_workload, ros001_monitor, ros001_spec, ROS001_TEXT};
use reqmon_core::cgen::{emit_c99, COptions};
use reqmon_core::mtlcore::eval_trace;
use reqmon_core::reqlang::parse_requirement;
use reqmon_core::{MonitorState, Value};

const STEPS: u64 = 10_000;

fn monitor_step(c: &mut Criterion) {
    let mut g = c.benchmark_group("monitor_step");
    g.throughput(Throughput::Elements(STEPS));
    let m = Arc::new(ros001_monitor());
    g.bench_function("ros001", |b| {
        b.iter_batched(
            || {
                let mut st = MonitorState::new(m.clone());
                for (name, v) in [("windspeed", 7.0), ("cc_t", 10.0), ("ws_t", 5.0)] {
                    st.set_input(name, Value::Num(v)).unwrap();
                }
                st
            },
            |mut st| {
                for i in 0..STEPS {
                    st.set_input("current_consumption", Value::Num((i % 23) as f64))
                        .unwrap();
                    black_box(st.step().unwrap());
                }
            },
            BatchSize::SmallInput,
        )
    });
    let (_, m, tr) = random_workload(7, STEPS as usize);
    let m = Arc::new(m);
    let rows: Vec<Vec<Value>> = (0..tr.len())
        .map(|t| m.externs.iter().map(|e| tr.get(&e.name, t).unwrap()).collect())
        .collect();
    g.bench_function("random_formula", |b| {
        b.iter(|| {
            let mut st = MonitorState::new(m.clone());
            for row in &rows {
                for (i, v) in row.iter().enumerate() {
                    st.set_input_at(i, *v).unwrap();
                }
                black_box(st.step().unwrap());
            }
        })
    });
    g.finish();
}

fn offline_evaluation(c: &mut Criterion) {
    let (f, _, tr) = random_workload(7, 1_000);
    c.bench_function("offline_eval_1000_steps", |b| {
        b.iter(|| black_box(eval_trace(&f, &tr).unwrap()))
    });
}

fn front_end(c: &mut Criterion) {
    c.bench_function("parse_ros001", |b| {
        b.iter(|| black_box(parse_requirement(black_box(ROS001_TEXT), "ROS-001").unwrap()))
    });
    c.bench_function("formalize_and_compile_ros001", |b| {
        b.iter(|| black_box(reqmon_core::streamc::compile_monitor(&ros001_spec()).unwrap()))
    });
    let m = ros001_monitor();
    c.bench_function("emit_c99_ros001", |b| {
        b.iter(|| black_box(emit_c99(&m, COptions::default())))
    });
}

criterion_group!(benches, monitor_step, offline_evaluation, front_end);
criterion_main!(benches);
