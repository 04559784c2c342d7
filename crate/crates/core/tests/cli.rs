use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn mgd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mgd"))
        .args(args)
        .output()
        .unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn gen(dir: &TempDir, name: &str, args: &[&str]) -> String {
    let out = dir.path().join(name);
    let mut all = vec!["gen"];
    all.extend_from_slice(args);
    all.extend_from_slice(&["--out", path_str(&out)]);
    let o = mgd(&all);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    path_str(&out).to_string()
}

fn report(o: &Output) -> Value {
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn gen_ghz_corners() {
    let dir = TempDir::new().unwrap();
    let p = gen(&dir, "ghz.json", &["ghz", "--n", "3"]);
    let v: Value = serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap();
    assert_eq!(v["n_qubits"], 3);
    for (r, c) in [(0, 0), (0, 7), (7, 0), (7, 7)] {
        assert!((v["matrix"][r][c][0].as_f64().unwrap() - 0.5).abs() < 1e-15);
    }
}

#[test]
fn discord_ghz_both() {
    let dir = TempDir::new().unwrap();
    let p = gen(&dir, "ghz.json", &["ghz", "--n", "3"]);
    let v = report(&mgd(&[
        "discord",
        "--state",
        &p,
        "--method",
        "both",
        "--restarts",
        "8",
    ]));
    assert!((v["closed"]["value"].as_f64().unwrap() - 0.5).abs() < 1e-12);
    assert!((v["numeric"]["value"].as_f64().unwrap() - 0.5).abs() < 1e-6);
    assert!(v["gap"].as_f64().unwrap().abs() <= 1e-6);
    assert_eq!(v["closed"]["etas"].as_array().unwrap().len(), 3);
    assert_eq!(v["closed"]["tree"].as_array().unwrap().len(), 3);
}

#[test]
fn discord_trivial_states() {
    let dir = TempDir::new().unwrap();
    let mixed = gen(&dir, "mixed.json", &["werner-ghz", "--n", "3", "--p", "0"]);
    let v = report(&mgd(&["discord", "--state", &mixed]));
    assert!(v["closed"]["value"].as_f64().unwrap().abs() < 1e-15);
    let product = gen(
        &dir,
        "prod.json",
        &["basis-product", "--n", "3", "--bits", "000"],
    );
    let v = report(&mgd(&[
        "discord",
        "--state",
        &product,
        "--method",
        "both",
        "--restarts",
        "4",
    ]));
    assert!(v["closed"]["value"].as_f64().unwrap().abs() < 1e-14);
    assert!(v["numeric"]["value"].as_f64().unwrap().abs() < 1e-14);
}

#[test]
fn discord_with_order() {
    let dir = TempDir::new().unwrap();
    let p = gen(&dir, "w.json", &["w-ghz-mix", "--n", "3", "--p", "0.3"]);
    let v = report(&mgd(&["discord", "--state", &p, "--order", "3,1,2"]));
    assert_eq!(v["order"], serde_json::json!([3, 1, 2]));
    assert_eq!(
        mgd(&["discord", "--state", &p, "--order", "1,1,2"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(
        &bad,
        "{\"n_qubits\": 1, \"matrix\": [[[1.5,0],[0,0]],[[0,0],[-0.5,0]]]}",
    )
    .unwrap();
    assert_eq!(
        mgd(&["discord", "--state", path_str(&bad)]).status.code(),
        Some(3)
    );
    assert_eq!(
        mgd(&["validate", "--state", path_str(&bad)]).status.code(),
        Some(3)
    );
    let junk = dir.path().join("junk.json");
    std::fs::write(&junk, "not json").unwrap();
    assert_eq!(
        mgd(&["discord", "--state", path_str(&junk)]).status.code(),
        Some(2)
    );
    assert_eq!(
        mgd(&["discord", "--state", "/nonexistent/x.json"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(mgd(&["frobnicate"]).status.code(), Some(2));
    let big = gen(&dir, "big.json", &["ghz", "--n", "7"]);
    assert_eq!(
        mgd(&["discord", "--state", &big, "--method", "numeric"])
            .status
            .code(),
        Some(4)
    );
    let one = gen(&dir, "one.json", &["ghz", "--n", "1"]);
    assert_eq!(mgd(&["discord", "--state", &one]).status.code(), Some(4));
}

#[test]
fn gen_family_checks_positivity() {
    let dir = TempDir::new().unwrap();
    let p = gen(
        &dir,
        "fam.json",
        &["family", "--n", "3", "--c", "0.6,0.4,0.2"],
    );
    assert!(mgd(&["validate", "--state", &p]).status.success());
    assert_eq!(
        mgd(&["gen", "family", "--n", "3", "--c", "0.9,0.9,0.9"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        mgd(&["gen", "werner-ghz", "--n", "3"]).status.code(),
        Some(2)
    );
}

#[test]
fn gen_round_trip_is_bitwise() {
    let dir = TempDir::new().unwrap();
    let a = gen(
        &dir,
        "a.json",
        &["random-density", "--n", "3", "--seed", "5"],
    );
    let text = std::fs::read(&a).unwrap();
    let again = mgd(&["gen", "random-density", "--n", "3", "--seed", "5"]);
    assert_eq!(again.stdout, text);
    let parsed: mgd::cli::statefile::StateFile = serde_json::from_slice(&text).unwrap();
    let rho = parsed.to_matrix().unwrap();
    let rewritten = mgd::cli::statefile::StateFile::from_matrix(&rho).to_json();
    assert_eq!(rewritten.as_bytes(), &text[..]);
}

#[test]
fn validate_random_and_file() {
    let o = mgd(&["validate", "--random", "4", "0", "10"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("PASS")).count(), 40);
    let dir = TempDir::new().unwrap();
    let p = gen(&dir, "ghz.json", &["ghz", "--n", "3"]);
    let o = mgd(&["validate", "--state", &p]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    let purity = text.lines().find(|l| l.contains(" purity ")).unwrap();
    let residual: f64 = purity
        .split("residual=")
        .nth(1)
        .unwrap()
        .split(' ')
        .next()
        .unwrap()
        .parse()
        .unwrap();
    assert!(residual < 1e-10);
    assert_eq!(
        mgd(&["validate", "--random", "9", "0", "1"]).status.code(),
        Some(4)
    );
}

#[test]
fn sweep_outputs() {
    let o = mgd(&[
        "sweep",
        "--family",
        "werner-ghz",
        "--n",
        "3",
        "--steps",
        "3",
    ]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "p,discord_closed");
    let want = [(0.0, 0.0), (0.5, 0.125), (1.0, 0.5)];
    for (line, (p, d)) in lines[1..].iter().zip(want) {
        let f: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        assert_eq!(f[0], p);
        assert!((f[1] - d).abs() < 1e-12);
    }
    assert!(!text.contains('\r'));

    let o = mgd(&[
        "sweep", "--family", "family", "--c", "1,0,0", "--steps", "5",
    ]);
    let text = String::from_utf8(o.stdout).unwrap();
    for line in text.lines().skip(1) {
        let d: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        assert!(d.abs() < 1e-12);
    }

    let o = mgd(&[
        "sweep",
        "--family",
        "classical-mix",
        "--steps",
        "2",
        "--method",
        "both",
        "--restarts",
        "2",
    ]);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.starts_with("p,discord_closed,discord_numeric,gap\n"));
    for line in text.lines().skip(1) {
        let f: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        assert!(f[1].abs() < 1e-9 && f[2].abs() < 1e-9 && f[3] >= -1e-7);
    }
    assert_eq!(mgd(&["sweep", "--family", "ghz"]).status.code(), Some(2));
}
