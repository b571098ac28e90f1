use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn finplane(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_finplane")).args(args).output().expect("binary runs")
}

fn data_lines(text: &str) -> Vec<&str> {
    text.lines().filter(|l| !l.starts_with('#')).collect()
}

fn read(p: &Path) -> String {
    fs::read_to_string(p).unwrap()
}

#[test]
fn graph_edge_counts() {
    let dir = tempfile::tempdir().unwrap();
    for (q, edges, degree) in [("3", 12, 4), ("5", 60, 6)] {
        let out = dir.path().join(format!("g{q}.csv"));
        let o = finplane(&["graph", "--q", q, "--a", "1", "--out", out.to_str().unwrap()]);
        assert!(o.status.success());
        let text = read(&out);
        assert!(text.starts_with("# finplane"));
        let lines = data_lines(&text);
        assert_eq!(lines[0], "u,v");
        assert_eq!(lines.len() - 1, edges);
        for l in &lines[1..] {
            let (u, v) = l.split_once(',').unwrap();
            assert!(u.parse::<usize>().unwrap() < v.parse::<usize>().unwrap());
        }
        let json: serde_json::Value = serde_json::from_str(&read(&out.with_extension("json"))).unwrap();
        assert_eq!(json["edges"], edges);
        assert_eq!(json["degree"], degree);
        assert_eq!(json["delta"], 2);
        assert!(json["provenance"]["version"].is_string());
    }
}

#[test]
fn config_errors_exit_2() {
    for args in [
        vec!["graph", "--q", "3", "--a", "0"],
        vec!["spectrum", "--q", "17", "--method", "bruteforce"],
        vec!["spectrum", "--q", "9"],
        vec!["spectrum", "--q", "5", "--delta", "4"],
        vec!["spectrum"],
        vec!["verify", "--q", "5", "--theorems", "7"],
        vec!["verify", "--q", "17"],
        vec!["satotate", "--q-range", "20:3"],
        vec!["verify", "--q", "5", "--tol", "nonsense=1"],
    ] {
        let o = finplane(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn spectrum_q3() {
    let o = finplane(&["spectrum", "--q", "3", "--a", "1", "--method", "bruteforce"]);
    assert!(o.status.success());
    let r: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let ev = r["eigenvalues"].as_array().unwrap();
    let dims: Vec<u64> = ev.iter().map(|e| e["dim"].as_u64().unwrap()).collect();
    assert_eq!(dims, vec![1, 3, 2]);
    let lams: Vec<f64> = ev.iter().map(|e| e["lambda"].as_f64().unwrap()).collect();
    for (x, y) in lams.iter().zip([4.0, 0.0, -2.0]) {
        assert!((x - y).abs() < 1e-9);
    }
    assert!(r["bruteforce"]["maxDeviation"].as_f64().unwrap() < 1e-9);
    for key in ["bound", "maxNontrivial", "margin", "pass"] {
        assert!(!r["ramanujan"][key].is_null());
    }
    assert_eq!(r["provenance"]["q"], "3");
}

#[test]
fn spectrum_ramanujan_q101() {
    let o = finplane(&["spectrum", "--q", "101"]);
    assert!(o.status.success());
    let r: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r["ramanujan"]["pass"], true);
    assert_eq!(r["a"], 1);
}

#[test]
fn verify_exit_codes() {
    let o = finplane(&["verify", "--q", "5", "--theorems", "1,2,4"]);
    assert_eq!(o.status.code(), Some(0));
    let r: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r["pass"], true);
    assert!(r["theorem1"]["maxRelativeResidual"].as_f64().unwrap() <= 1e-10);
    assert!(r.get("theorem3").is_none());
    let o = finplane(&["verify", "--q", "5", "--theorems", "1", "--tol", "theorem1=1e-40"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn satotate_files() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let o = finplane(&["satotate", "--q-range", "3:101", "--bins", "16", "--out", d]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let moments = read(&dir.path().join("moments.csv"));
    let lines = data_lines(&moments);
    assert_eq!(lines[0], "q,a,m1,m2,m3,m4,ks");
    assert_eq!(lines.len() - 1, 25);
    for l in &lines[1..] {
        let f: Vec<&str> = l.split(',').collect();
        let q: f64 = f[0].parse().unwrap();
        let m2: f64 = f[3].parse().unwrap();
        if q >= 11.0 {
            assert!((m2 - 1.0).abs() <= 5.0 / q);
        }
    }
    for q in [3u32, 53, 101] {
        let hist = read(&dir.path().join(format!("hist_q{q}.csv")));
        let lines = data_lines(&hist);
        assert_eq!(lines[0], "binLeft,binRight,count,semicircleMass");
        assert_eq!(lines.len() - 1, 16);
        let total: u32 = lines[1..].iter().map(|l| l.split(',').nth(2).unwrap().parse::<u32>().unwrap()).sum();
        assert_eq!(total, q - 1);
    }
}

#[test]
fn outputs_are_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        let o = finplane(&["satotate", "--q-range", "11:31", "--out", d.path().to_str().unwrap()]);
        assert!(o.status.success());
    }
    for name in ["moments.csv", "hist_q11.csv", "hist_q31.csv"] {
        assert_eq!(read(&a.path().join(name)), read(&b.path().join(name)));
    }
    let x = finplane(&["verify", "--q", "5"]).stdout;
    let y = finplane(&["verify", "--q", "5"]).stdout;
    assert_eq!(x, y);
}

#[test]
fn moments_csv() {
    let o = finplane(&["moments", "--q-range", "3:13", "--format", "csv"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    let lines = data_lines(&text);
    assert_eq!(lines.len() - 1, 5);
    for l in &lines[1..] {
        let f: Vec<f64> = l.split(',').map(|x| x.parse().unwrap()).collect();
        assert!(f[2] < 1e-10 && f[3] < 1e-10);
        assert!((f[5] - f[6]).abs() < 1e-10);
    }
}
