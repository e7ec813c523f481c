//! Frozen outputs for the UAM requirement. Regenerate with `UPDATE_GOLDEN=1`.

mod common;

use std::collections::BTreeMap;
use std::path::Path;

use common::*;

fn updating() -> bool {
    std::env::var_os("UPDATE_GOLDEN").is_some()
}

fn check_tree(name: &str, actual: &BTreeMap<String, String>) {
    let dir = golden_dir().join(name);
    if updating() {
        let _ = std::fs::remove_dir_all(&dir);
        for (rel, text) in actual {
            let path = dir.join(rel);
            std::fs::create_dir_all(path.parent().unwrap()).unwrap();
            std::fs::write(path, text).unwrap();
        }
        return;
    }
    let expected = read_tree(&dir);
    assert_eq!(
        expected.keys().collect::<Vec<_>>(),
        actual.keys().collect::<Vec<_>>(),
        "file set of {name}"
    );
    for (rel, text) in actual {
        assert_eq!(&expected[rel], text, "{name}/{rel} differs from the golden copy");
    }
}

struct Outputs {
    spec: String,
    package: BTreeMap<String, String>,
    explain: String,
    fired: String,
}

fn produce(dir: &Path) -> Outputs {
    let spec_path = ros001_spec_file(dir);
    let out = dir.join("ws");
    let o = reqmon(&["gen", &spec_path, "--varmap", &fixture("varmap.json"), "--out", out.to_str().unwrap()]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    let fired = dir.join("fired.txt");
    let o = reqmon(&[
        "simulate",
        &spec_path,
        "--varmap",
        &fixture("varmap.json"),
        "--trace",
        &fixture("uam_violation.jsonl"),
        "--fired",
        fired.to_str().unwrap(),
    ]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    Outputs {
        spec: std::fs::read_to_string(&spec_path).unwrap(),
        package: read_tree(&out),
        explain: reqmon(&["explain", &fixture("ros001.req")]).stdout,
        fired: std::fs::read_to_string(fired).unwrap(),
    }
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let a = produce(tempfile::tempdir().unwrap().path());
    let b = produce(tempfile::tempdir().unwrap().path());
    assert_eq!(a.spec, b.spec);
    assert_eq!(a.package, b.package);
    assert_eq!(a.explain, b.explain);
    assert_eq!(a.fired, b.fired);
}

#[test]
fn ros001_outputs_match_golden_files() {
    let dir = tempfile::tempdir().unwrap();
    let got = produce(dir.path());
    let mut misc = BTreeMap::new();
    misc.insert("spec.json".to_string(), got.spec);
    misc.insert("explain.txt".to_string(), got.explain);
    misc.insert("fired.txt".to_string(), got.fired);
    check_tree("ros001", &misc);
    check_tree("ros001_package", &got.package);
}
