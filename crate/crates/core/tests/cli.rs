use std::process::Command;

fn etaforge(args: &[&str], env: &[(&str, &str)]) -> (i32, String) {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_etaforge"));
    cmd.args(args);
    for (k, v) in env {
        cmd.env(k, v);
    }
    let out = cmd.output().expect("binary runs");
    (out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stdout).into_owned())
}

#[test]
fn case_report_is_json() {
    let (code, out) = etaforge(&["case", "--xiao", "1", "--report", "--order", "30"], &[]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["eta_quotient"], "1^8 2^8");
    assert_eq!(v["weight"], 8);
    assert_eq!(v["level"], 2);
}

#[test]
fn verify_examples() {
    assert_eq!(etaforge(&["verify", "--which", "strange"], &[]).0, 0);
    let (code, out) = etaforge(&["verify", "--which", "thm13", "--delta", "A1", "--order", "50"], &[]);
    assert_eq!(code, 0);
    assert!(out.contains("residual zero"), "{out}");
}

#[test]
fn exit_codes() {
    assert_eq!(etaforge(&["nonsense"], &[]).0, 2);
    assert_eq!(etaforge(&["expand", "--eta", "1^8 2^8"], &[]).0, 2);
    assert_eq!(etaforge(&["local", "--delta", "E7", "--order", "5", "--route", "fast"], &[]).0, 2);
    let (code, _) = etaforge(&["theta", "--delta", "E8", "--order", "200"], &[("ETAFORGE_ENUM_BUDGET", "5")]);
    assert_eq!(code, 3);
}

#[test]
fn case_file_is_read() {
    let dir = std::env::temp_dir().join(format!("etaforge-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let good = dir.join("good.txt");
    std::fs::write(&good, "# one row\n8;Z/7;7;3*A6\n").unwrap();
    let (code, out) = etaforge(&["hecke", "--file", good.to_str().unwrap(), "--xiao", "8", "--primes", "2,3,5"], &[]);
    assert_eq!(code, 0, "{out}");
    let bad = dir.join("bad.txt");
    std::fs::write(&bad, "11;Z/2xZ/4;8;4*A3,6*A1\n").unwrap();
    assert_eq!(etaforge(&["case", "--file", bad.to_str().unwrap()], &[]).0, 2);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn suite_output_is_stable() {
    let strip = |s: String| s.lines().filter(|l| !l.starts_with("timestamp:")).collect::<Vec<_>>().join("\n");
    let (c1, a) = etaforge(&["suite"], &[]);
    let (c2, b) = etaforge(&["suite"], &[]);
    assert_eq!((c1, c2), (0, 0), "{a}");
    assert_eq!(strip(a), strip(b));
}
