use std::path::PathBuf;
use std::process::{Command, Output};

fn here(p: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests").join(p)
}

fn vn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vn")).current_dir(here("data")).args(args).output().expect("binary runs")
}

fn golden(name: &str, args: &[&str]) {
    let out = vn(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    let want = std::fs::read_to_string(here("golden").join(name)).unwrap();
    assert_eq!(String::from_utf8(out.stdout).unwrap(), want, "{name}");
}

#[test]
fn element_verbs() {
    golden("reduce_mu.txt", &["reduce", "mu.v"]);
    golden("reduce_x0.json", &["reduce", "--json", "x0.v"]);
    golden("compose_x0_x0.txt", &["compose", "x0.v", "x0.v"]);
    golden("invert_x0.txt", &["invert", "x0.v"]);
    golden("conjugate_x0_swap.txt", &["conjugate", "x0.v", "swap.v"]);
    golden("order_swap.txt", &["order", "swap.v"]);
    golden("order_x0.txt", &["order", "x0.v"]);
    golden("random_seed7.txt", &["random", "--seed", "7", "--size", "4"]);
}

#[test]
fn dynamics_verbs() {
    golden("reveal_x0.json", &["reveal", "x0.v"]);
    golden("flowgraph_x0.json", &["flowgraph", "x0.v"]);
    golden("flowgraph_x0.dot", &["flowgraph", "--dot", "x0.v"]);
    golden("traintrack_x0.json", &["traintrack", "x0.v"]);
    golden("traintrack_x0.dot", &["traintrack", "--dot", "x0.v"]);
    golden("distortion_x0.csv", &["distortion", "--csv", "--max-z", "5", "x0.v"]);
}

#[test]
fn centralizer_verb() {
    golden("centralizer_x0.txt", &["centralizer", "x0.v"]);
    golden("centralizer_swap.json", &["centralizer", "--json", "swap.v"]);
    let out = vn(&["centralizer", "mu.v", "--depth-bound", "8"]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "Z ≀ P_2\n");
}

#[test]
fn input_errors_exit_1() {
    let out = vn(&["order", "bad.v"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("incomplete prefix code"));
    let out = vn(&["compose", "x0.v", "missing.v"]);
    assert_eq!(out.status.code(), Some(1));
    let out = vn(&["compose", "x0.v", "v3.v"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("arity mismatch"));
    let out = vn(&["distortion", "swap.v"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn inconclusive_exit_2() {
    // cone 1 holds a conjugate of the cone-0 wing; the swap needs depth 2
    let out = vn(&["centralizer", "wings.v", "--depth-bound", "1"]);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
    let out = vn(&["centralizer", "wings.v", "--depth-bound", "4"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "Z ≀ P_2\n");
}
