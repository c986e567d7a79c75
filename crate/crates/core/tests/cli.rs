use std::io::Write;
use std::process::{Command, Output, Stdio};

fn stabsim(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_stabsim"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

#[test]
fn parse_error_exits_nonzero_with_line() {
    let out = stabsim(&["--sample=2"], "H 0\nCNOT 0\n");
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 2"), "{err}");
}

#[test]
fn missing_mode_is_rejected() {
    let out = stabsim(&[], "M 0\n");
    assert!(!out.status.success());
    let out = stabsim(&["--sample=1", "--detect=1"], "M 0\n");
    assert!(!out.status.success());
}

#[test]
fn in_and_out_files() {
    let dir = std::env::temp_dir().join(format!("stabsim-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let input = dir.join("c.circuit");
    let output = dir.join("o.b8");
    std::fs::write(&input, "X 0 9\nM 0 1 2 3 4 5 6 7 8 9\n").unwrap();
    let out = stabsim(
        &[
            "--sample=3",
            "--out_format=b8",
            "--in",
            input.to_str().unwrap(),
            "--out",
            output.to_str().unwrap(),
        ],
        "",
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out.stdout.is_empty());
    assert_eq!(std::fs::read(&output).unwrap(), [0x01, 0x02].repeat(3));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn seed_fixes_output() {
    let c = "H 0 1 2 3\nX_ERROR(0.3) 0 1\nM 0 1 2 3\n";
    let a = stabsim(&["--sample=100", "--seed=77", "--out_format=r8"], c);
    let b = stabsim(&["--sample=100", "--seed=77", "--out_format=r8"], c);
    assert_eq!(a.stdout, b.stdout);
    let d = stabsim(&["--sample=100", "--seed=78", "--out_format=r8"], c);
    assert_ne!(a.stdout, d.stdout);
}

#[test]
fn repl_teleportation() {
    let script = "H 1\nCNOT 1 9\nH 0\nS 0\nCNOT 0 1\nH 0\nM 1 0\n";
    for seed in 0..20 {
        let out = stabsim(&["--repl", &format!("--seed={seed}")], script);
        let text = String::from_utf8(out.stdout).unwrap();
        let xz = text.trim();
        let mut fix = String::new();
        if xz.as_bytes()[0] == b'1' {
            fix += "X 9\n";
        }
        if xz.as_bytes()[1] == b'1' {
            fix += "Z 9\n";
        }
        let full = format!("{script}{fix}S_DAG 9\nH 9\nM 9\n");
        let out = stabsim(&["--repl", &format!("--seed={seed}")], &full);
        let text = String::from_utf8(out.stdout).unwrap();
        assert_eq!(text.lines().last(), Some("0"), "{text}");
    }
}
