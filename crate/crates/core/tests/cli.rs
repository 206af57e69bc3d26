use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn vdw(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vdw"))
        .args(args)
        .env_remove("VDW_SEED")
        .env_remove("VDW_WORKERS")
        .output()
        .unwrap()
}

fn json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn apcat_lists_every_progression() {
    let out = vdw(&["apcat", "--n", "9", "--k", "3"]);
    assert!(out.status.success());
    let lines = String::from_utf8(out.stdout).unwrap().lines().count();
    assert_eq!(lines, vdw_core::enumerate_aps(9, 3).unwrap().len());
}

#[test]
fn decide_reports_verdict_and_witness() {
    let v = json(&vdw(&[
        "decide",
        "--n",
        "9",
        "--inline",
        "0,1,2,3,4,5,6,7,8",
    ]));
    assert_eq!(v["arrow"], true);
    assert!(v["witness"].is_null());
    let v = json(&vdw(&["decide", "--n", "8", "--inline", "0,1,2,3,4,5,6,7"]));
    assert_eq!(v["arrow"], false);
    let red = v["witness"]["red"].as_array().unwrap().len();
    let blue = v["witness"]["blue"].as_array().unwrap().len();
    assert_eq!(red + blue, 8);
    assert_eq!(
        vdw(&["decide", "--n", "8", "--inline", "9"]).status.code(),
        Some(2)
    );
}

#[test]
fn sample_is_seeded() {
    let a = vdw(&["sample", "--n", "500", "--c", "1.5", "--seed", "4"]);
    let b = vdw(&["sample", "--n", "500", "--c", "1.5", "--seed", "4"]);
    assert_eq!(json(&a)["members"], json(&b)["members"]);
    let env = Command::new(env!("CARGO_BIN_EXE_vdw"))
        .args(["sample", "--n", "500", "--c", "1.5"])
        .env("VDW_SEED", "4")
        .output()
        .unwrap();
    assert_eq!(json(&env)["members"], json(&a)["members"]);
}

#[test]
fn janson_from_set_file() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("c.txt");
    std::fs::write(&f, "0 1 2\n").unwrap();
    let v = json(&vdw(&[
        "bounds",
        "janson",
        "--n",
        "9",
        "--p",
        "0.5",
        "--set",
        f.to_str().unwrap(),
    ]));
    assert!((v["ex"].as_f64().unwrap() - 0.125).abs() < 1e-12);
    assert!((v["bound"].as_f64().unwrap() - (-1.0f64 / 16.0).exp()).abs() < 1e-12);
}

#[test]
fn verify_exit_codes() {
    let ok = vdw(&["verify", "matching", "--set", "n=200", "--set", "trials=5"]);
    assert_eq!(ok.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&ok.stdout).unwrap();
    assert_eq!(v["campaign"], "matching");
    assert_eq!(vdw(&["verify", "nope"]).status.code(), Some(2));
    // a 100% requirement on a check that the bad set cannot meet at this size
    let fail = vdw(&[
        "verify",
        "badset",
        "--set",
        "n=300",
        "--set",
        "trials=3",
        "--set",
        "fraction=1",
    ]);
    assert_eq!(fail.status.code(), Some(1));
}

#[test]
fn sweep_then_estimate() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let cfg = dir.path().join("run.cfg");
    std::fs::write(
        &cfg,
        "# small grid\nns = 200,400\nc_min = 0.5\nc_max = 4\nc_count = 5\ntrials = 8\n",
    )
    .unwrap();
    let s = vdw(&[
        "--config",
        cfg.to_str().unwrap(),
        "sweep",
        "--out",
        out.to_str().unwrap(),
        "--seed",
        "2",
    ]);
    assert!(s.status.success(), "{}", String::from_utf8_lossy(&s.stderr));
    for f in ["trials.csv", "points.csv", "manifest.json"] {
        assert!(Path::new(&out).join(f).exists(), "{f}");
    }
    let rows = String::from_utf8(s.stdout).unwrap().lines().count();
    assert_eq!(rows, 1 + 10);
    let points = out.join("points.csv");
    let v = json(&vdw(&[
        "estimate",
        "--points",
        points.to_str().unwrap(),
        "--bootstrap",
        "20",
    ]));
    assert_eq!(v.as_array().unwrap().len(), 2);
}
