use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;
use zkhelp::dist::{enumerate, mut_disjointness, shannon_entropy, statistical_difference};
use zkhelp::prob::{dyadic, ratio, Prob};
use zkhelp::protocol::mass_outside_image;
use zkhelp::{Budget, Circuit};

fn zk(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut c = Command::new(env!("CARGO_BIN_EXE_zkhelp"));
    c.args(args).env_remove("ZK_BUDGET_BITS");
    for (k, v) in envs {
        c.env(k, v);
    }
    c.output().expect("spawn zkhelp")
}

fn ok_json(args: &[&str]) -> Value {
    let out = zk(args, &[]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

fn p(dir: &TempDir, name: &str) -> PathBuf {
    dir.path().join(name)
}

fn s(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn write(dir: &TempDir, name: &str, c: &Circuit) -> PathBuf {
    let path = p(dir, name);
    std::fs::write(&path, c.serialize()).unwrap();
    path
}

fn load(path: &Path) -> Circuit {
    Circuit::parse(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn value(v: &Value) -> Prob {
    let num: i64 = v["numerator"].as_str().unwrap().parse().unwrap();
    match v.get("denominator_power") {
        Some(k) => dyadic(num, k.as_u64().unwrap() as u32),
        None => ratio(num, v["denominator"].as_str().unwrap().parse().unwrap()),
    }
}

#[test]
fn sd_of_a_circuit_with_itself_is_zero() {
    let dir = TempDir::new().unwrap();
    let a = write(&dir, "a.ckt", &Circuit::identity(3));
    let r = ok_json(&["sd", "--x", s(&a), "--y", s(&a)]);
    assert_eq!(r["schema"], "report_v1");
    assert_eq!(r["results"]["sd"]["numerator"], "0");
    assert_eq!(r["results"]["sc"]["numerator"], "1");
    assert_eq!(r["config"]["budget"], 24);
}

#[test]
fn polarize_rejects_inverted_promise() {
    let dir = TempDir::new().unwrap();
    let a = write(&dir, "a.ckt", &Circuit::identity(2));
    let out = zk(
        &[
            "polarize",
            "--a",
            "0.5",
            "--b",
            "0.25",
            "--k",
            "2",
            "--x",
            s(&a),
            "--y",
            s(&a),
            "--out-prefix",
            s(&p(&dir, "o")),
        ],
        &[],
    );
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("requires b > a"));
}

#[test]
fn polarize_beyond_budget_exits_2_with_achievable_gap() {
    let dir = TempDir::new().unwrap();
    let a = write(&dir, "a.ckt", &Circuit::identity(2));
    let o = p(&dir, "o");
    let args = [
        "polarize",
        "--a",
        "1/4",
        "--b",
        "1/2",
        "--k",
        "4",
        "--x",
        s(&a),
        "--y",
        s(&a),
        "--out-prefix",
        s(&o),
    ];
    let out = zk(&args, &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("achievable"));
}

#[test]
fn budget_env_override() {
    let dir = TempDir::new().unwrap();
    let a = write(&dir, "a.ckt", &Circuit::identity(3));
    let out = zk(
        &["sd", "--x", s(&a), "--y", s(&a)],
        &[("ZK_BUDGET_BITS", "2")],
    );
    assert_eq!(out.status.code(), Some(2));
    let out = zk(
        &["sd", "--x", s(&a), "--y", s(&a)],
        &[("ZK_BUDGET_BITS", "3")],
    );
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn usage_errors_exit_1() {
    assert_eq!(zk(&["bogus"], &[]).status.code(), Some(1));
    assert_eq!(
        zk(
            &["sd", "--x", "/nonexistent.ckt", "--y", "/nonexistent.ckt"],
            &[]
        )
        .status
        .code(),
        Some(1)
    );
    assert_eq!(zk(&["--help"], &[]).status.code(), Some(0));
}

#[test]
fn protocol_run_matches_direct_computation() {
    let dir = TempDir::new().unwrap();
    let pre = p(&dir, "g");
    ok_json(&[
        "generate",
        "--kind",
        "yes-iid",
        "--n",
        "2",
        "--target",
        "1/4",
        "--seed",
        "5",
        "--out-prefix",
        s(&pre),
    ]);
    let pol = p(&dir, "pol");
    let (gx, gy) = (p(&dir, "g_x.ckt"), p(&dir, "g_y.ckt"));
    let args = [
        "polarize",
        "--a",
        "1/4",
        "--b",
        "1/2",
        "--k",
        "4",
        "--best-effort",
        "--x",
        s(&gx),
        "--y",
        s(&gy),
        "--out-prefix",
        s(&pol),
    ];
    let r = ok_json(&args);
    assert_eq!(r["results"]["respects_recurrence"], true);
    let (px, py) = (p(&dir, "pol_x.ckt"), p(&dir, "pol_y.ckt"));
    let report = p(&dir, "run.json");
    let out = zk(
        &[
            "protocol",
            "run",
            "--x",
            s(&px),
            "--y",
            s(&py),
            "--k",
            "4",
            "--report",
            s(&report),
        ],
        &[],
    );
    assert_eq!(out.status.code(), Some(0));
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();

    let b = Budget::new(24);
    let (cx, cy) = (load(&px), load(&py));
    let (dx, dy) = (enumerate(&cx, &b).unwrap(), enumerate(&cy, &b).unwrap());
    let mut outside = Prob::from_integer(0.into());
    for (v, m) in dx.iter() {
        if !dy.in_support(v) {
            outside += m;
        }
    }
    let one = Prob::from_integer(1.into());
    assert_eq!(value(&r["results"]["completeness"]), &one - &outside);
    assert_eq!(outside, mass_outside_image(&cx, &cy, &b).unwrap());
    let sd = statistical_difference(&dx, &dy).unwrap();
    assert!(value(&r["results"]["deviation"]) <= sd + value(&r["results"]["abort_mass"]));
}

#[test]
fn generated_certificates_reproduce() {
    let dir = TempDir::new().unwrap();
    let b = Budget::new(24);

    let pre = p(&dir, "y");
    ok_json(&[
        "generate",
        "--kind",
        "yes-iid",
        "--n",
        "4",
        "--target",
        "1/4",
        "--seed",
        "9",
        "--out-prefix",
        s(&pre),
    ]);
    let cert: Value =
        serde_json::from_str(&std::fs::read_to_string(p(&dir, "y_cert.json")).unwrap()).unwrap();
    let (dx, dy) = (
        enumerate(&load(&p(&dir, "y_x.ckt")), &b).unwrap(),
        enumerate(&load(&p(&dir, "y_y.ckt")), &b).unwrap(),
    );
    let sd = statistical_difference(&dx, &dy).unwrap();
    assert!(sd <= ratio(1, 4));
    assert_eq!(value(&cert["value"]), sd);

    let pre = p(&dir, "n");
    ok_json(&[
        "generate",
        "--kind",
        "no-iid",
        "--n",
        "3",
        "--target",
        "1",
        "--seed",
        "9",
        "--out-prefix",
        s(&pre),
    ]);
    let (dx, dy) = (
        enumerate(&load(&p(&dir, "n_x.ckt")), &b).unwrap(),
        enumerate(&load(&p(&dir, "n_y.ckt")), &b).unwrap(),
    );
    assert_eq!(mut_disjointness(&dx, &dy).unwrap(), ratio(1, 1));

    let pre = p(&dir, "e");
    let r = ok_json(&[
        "generate",
        "--kind",
        "ea-instance",
        "--n",
        "3",
        "--t",
        "1",
        "--regime",
        "yes",
        "--out-prefix",
        s(&pre),
    ]);
    assert_eq!(r["results"]["value"].as_f64(), Some(0.0));
    assert_eq!(
        shannon_entropy(&enumerate(&load(&p(&dir, "e_x.ckt")), &b).unwrap()),
        0.0
    );
}

#[test]
fn reports_are_deterministic() {
    let dir = TempDir::new().unwrap();
    let run = |tag: &str| {
        let out = zk(
            &[
                "quantum",
                "fact-check",
                "--n",
                "2",
                "--trials",
                "30",
                "--seed",
                "4",
            ],
            &[],
        );
        assert_eq!(out.status.code(), Some(0), "{tag}");
        out.stdout
    };
    assert_eq!(run("first"), run("second"));
    let pre = s(&p(&dir, "r")).to_string();
    let gen = || {
        zk(
            &[
                "generate",
                "--kind",
                "random-circuit",
                "--n",
                "4",
                "--seed",
                "77",
                "--out-prefix",
                &pre,
            ],
            &[],
        )
        .stdout
    };
    assert_eq!(gen(), gen());
}

#[test]
fn fact_check_csv_has_one_row_per_state() {
    let dir = TempDir::new().unwrap();
    let csv = p(&dir, "q.csv");
    let r = ok_json(&[
        "quantum",
        "fact-check",
        "--n",
        "3",
        "--trials",
        "40",
        "--csv",
        s(&csv),
    ]);
    let rows = std::fs::read_to_string(&csv).unwrap().lines().count();
    assert_eq!(rows, r["results"]["states"].as_u64().unwrap() as usize + 1);
    assert_eq!(r["results"]["lower_counterexamples"], 0);
}

#[test]
fn operators_emit_circuits() {
    let dir = TempDir::new().unwrap();
    let a = write(&dir, "a.ckt", &Circuit::identity(2));
    let c = write(&dir, "c.ckt", &Circuit::constant(&[false, true], 2));
    let out = p(&dir, "t.ckt");
    ok_json(&["tensor", "--x", s(&a), "--y", s(&c), "--out", s(&out)]);
    assert_eq!(load(&out).n_inputs(), 4);

    let r = ok_json(&[
        "xor",
        "--x0",
        s(&a),
        "--x1",
        s(&c),
        "--out-prefix",
        s(&p(&dir, "x")),
        "--measure",
    ]);
    let sd_in = value(&r["results"]["input"]["sd"]);
    assert_eq!(value(&r["results"]["output"]["sd"]), &sd_in * &sd_in);

    let r = ok_json(&[
        "t-op",
        "--x",
        s(&a),
        "--y",
        s(&c),
        "--out-prefix",
        s(&p(&dir, "t")),
        "--measure",
    ]);
    assert_eq!(r["results"]["n_inputs"], 10);

    let m = p(&dir, "m.ckt");
    ok_json(&[
        "mixture",
        "--x",
        s(&a),
        "--u",
        "3/4",
        "--coin-bits",
        "2",
        "--out",
        s(&m),
    ]);
    assert_eq!(load(&m).n_outputs(), 4);

    let r = ok_json(&["disj", "--x", s(&a), "--y", s(&c)]);
    assert_eq!(value(&r["results"]["disj_xy"]), ratio(3, 4));
    let r = ok_json(&["entropy", "--x", s(&a), "--csv", s(&p(&dir, "d.csv"))]);
    assert_eq!(r["results"]["entropy"].as_f64(), Some(2.0));
}

#[test]
fn reduction_subcommands() {
    let dir = TempDir::new().unwrap();
    let a = write(&dir, "a.ckt", &Circuit::identity(2));
    let c = write(&dir, "c.ckt", &Circuit::constant(&[false, true], 2));

    let r = ok_json(&[
        "reduce",
        "ea-bar-to-iid",
        "--x",
        s(&c),
        "--t",
        "1",
        "--out-prefix",
        s(&p(&dir, "e")),
        "--measure",
    ]);
    assert_eq!(r["results"]["params"]["s"], 1);
    assert!(p(&dir, "e_zp.ckt").exists());

    let r = ok_json(&[
        "reduce",
        "iid-to-mut",
        "--x0",
        s(&a),
        "--x1",
        s(&a),
        "--out-prefix",
        s(&p(&dir, "i")),
        "--measure",
    ]);
    assert_eq!(r["results"]["after"]["sd"]["numerator"], "0");

    let r = ok_json(&[
        "reduce",
        "ed-bar",
        "--x",
        s(&a),
        "--y",
        s(&c),
        "--out-prefix",
        s(&p(&dir, "d")),
    ]);
    assert_eq!(r["results"]["skeletons"], 6);
    let out = zk(
        &[
            "reduce",
            "ed-bar",
            "--x",
            s(&a),
            "--y",
            s(&c),
            "--out-prefix",
            s(&p(&dir, "d")),
            "--assemble",
        ],
        &[],
    );
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("pluggable dependency absent"));

    let r = ok_json(&[
        "reduce",
        "protocol-to-iid",
        "--x",
        s(&a),
        "--y",
        s(&c),
        "--out-prefix",
        s(&p(&dir, "p")),
    ]);
    assert_eq!(value(&r["results"]["disjointness_prob"]), ratio(3, 4));
    let out = zk(
        &[
            "reduce",
            "protocol-to-iid",
            "--x",
            s(&a),
            "--y",
            s(&c),
            "--k",
            "2",
            "--out-prefix",
            s(&p(&dir, "p")),
        ],
        &[],
    );
    assert_eq!(out.status.code(), Some(1));
}
