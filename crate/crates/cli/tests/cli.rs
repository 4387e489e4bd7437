use std::fs;
use std::process::{Command, Output};

fn img(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_img"))
        .args(args)
        .env_remove("IMG_CACHE_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn json(args: &[&str]) -> serde_json::Value {
    let mut full = vec!["--format", "json"];
    full.extend_from_slice(args);
    let o = img(&full);
    assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn group_level_four() {
    let v = json(&["group", "--level", "4"]);
    assert_eq!(v["order"], 64);
    assert_eq!(v["index_u"], 4);
    assert_eq!(v["abelian_invariants"], serde_json::json!([2, 4]));
    assert!(stdout(&img(&["group", "--level", "4"])).contains("64"));
}

#[test]
fn arith_level_four() {
    let v = json(&["arith", "--level", "4"]);
    assert_eq!(v["m_order"], 256);
    assert_eq!(v["maximal_subgroups"].as_array().unwrap().len(), 15);
    assert_eq!(v["growth"].as_array().unwrap().len(), 4);
}

#[test]
fn disc_first_level() {
    let o = img(&["disc", "--n", "1"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "+2^3 * t^1 * (2-t)^0");
    let rows = json(&["disc"]);
    assert_eq!(rows.as_array().unwrap().len(), 4);
    assert_eq!(rows[1]["shape"], "-2^16 * t^3 * (2-t)^1");
    assert_eq!(img(&["disc", "--n", "9"]).status.code(), Some(2));
}

#[test]
fn maximality_verdicts() {
    let v = json(&["maximality", "--a", "5"]);
    assert_eq!(v["verdict"], "maximal");
    assert_eq!(v["eliminations"].as_array().unwrap().len(), 15);
    assert!(stdout(&img(&["maximality", "--a", "5"])).contains("verdict: maximal"));

    let v = json(&["maximality", "--a", "1"]);
    assert_eq!(v["verdict"], "not_maximal");
    assert!(v["reason"].as_str().unwrap().contains("square-class dependency"));

    for bad in ["0", "2", "4/2", "x"] {
        assert_eq!(img(&["maximality", "--a", bad]).status.code(), Some(2), "a = {bad}");
    }
    assert_eq!(img(&["maximality", "--a", "5", "--prime-bound", "5"]).status.code(), Some(2));
}

#[test]
fn verify_quick_and_full() {
    let o = img(&["verify", "--level", "3"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&["verify"]);
    assert_eq!(v["passed"], true);
    assert!(v["count"].as_u64().unwrap() >= 25);
}

#[test]
fn radical_sweep_passes() {
    let v = json(&["radical", "--samples", "3", "--seed", "7"]);
    assert_eq!(v["reports"].as_array().unwrap().len(), 3);
    assert_eq!(img(&["radical", "--precision", "8"]).status.code(), Some(2));
}

#[test]
fn json_is_deterministic() {
    for args in [&["verify", "--level", "3"][..], &["maximality", "--a", "-3/7"], &["radical", "--samples", "2"]] {
        let mut full = vec!["--format", "json"];
        full.extend_from_slice(args);
        assert_eq!(img(&full).stdout, img(&full).stdout, "{args:?}");
    }
}

#[test]
fn exit_codes() {
    assert_eq!(img(&["--bogus"]).status.code(), Some(2));
    assert_eq!(img(&["group", "--level", "0"]).status.code(), Some(2));
    assert_eq!(img(&["arith", "--level", "6"]).status.code(), Some(3));
    assert_eq!(img(&["arith", "--level", "0"]).status.code(), Some(2));
}

#[test]
fn config_file_caps() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("img.conf");
    fs::write(&cfg, "# tighter\nmodel_level = 3\n").unwrap();
    let c = cfg.to_str().unwrap();
    assert_eq!(img(&["--config", c, "arith", "--level", "4"]).status.code(), Some(3));
    assert!(img(&["--config", c, "arith", "--level", "3"]).status.success());
    fs::write(&cfg, "colour = blue\n").unwrap();
    assert_eq!(img(&["--config", c, "group"]).status.code(), Some(2));
}

#[test]
fn corrupted_cache_is_recomputed() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let first = json(&["--cache-dir", d, "arith", "--level", "4"]);
    let files: Vec<_> = fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().path()).collect();
    assert!(files.len() >= 4 + 15, "{files:?}");
    for f in &files {
        let mut bytes = fs::read(f).unwrap();
        let mid = bytes.len() / 2;
        bytes[mid] ^= 0x5a;
        bytes.truncate(bytes.len() - 3);
        fs::write(f, bytes).unwrap();
    }
    let again = json(&["--cache-dir", d, "arith", "--level", "4"]);
    assert_eq!(again["m_order"], first["m_order"]);
    assert_eq!(again["stats"]["from_cache"], false);
    let cached = json(&["--cache-dir", d, "arith", "--level", "4"]);
    assert_eq!(cached["stats"]["from_cache"], true);
    assert_eq!(cached["m_order"], 256);
    let o = img(&["--cache-dir", d, "verify", "--level", "4"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
}
