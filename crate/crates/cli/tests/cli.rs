use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dieudonne"))
        .args(args)
        .env_remove("DIEUDONNE_CACHE")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn squash(s: &str) -> String {
    s.chars().filter(|c| !c.is_whitespace()).collect()
}

#[test]
fn witt_law_p2_level1() {
    let o = run(&["witt", "law", "--p", "2", "--n", "1", "--kind", "add"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("phi_1 = x1 + y1 - x0·y0"), "{}", stdout(&o));
}

/// `[a]` is `a^{p^n}` mod `p^{n+1}`, and `(a_0, .., a_n) ↦ Σ p^i [a_i]`.
fn residue(p: u64, a: &[u64]) -> u64 {
    let n = a.len() as u32 - 1;
    let q = p.pow(n + 1);
    let teich = |x: u64| (0..p.pow(n)).fold(1u64, |acc, _| acc * x % q);
    a.iter().enumerate().map(|(i, &x)| p.pow(i as u32) * if x == 0 { 0 } else { teich(x) }).sum::<u64>() % q
}

#[test]
fn witt_eval_matches_integers_mod_p_power() {
    let o = run(&["witt", "eval", "--p", "2", "--n", "2", "--lhs", "1,0,0", "--rhs", "1,0,0", "--op", "add"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).trim(), "0,1,0");

    let (p, n) = (3u64, 1u32);
    let q = p.pow(n + 1);
    let vectors: Vec<Vec<u64>> = (0..p).flat_map(|a| (0..p).map(move |b| vec![a, b])).collect();
    let by_residue: std::collections::HashMap<u64, &Vec<u64>> = vectors.iter().map(|v| (residue(p, v), v)).collect();
    assert_eq!(by_residue.len() as u64, q);
    for x in &vectors {
        for y in [&vectors[1], &vectors[4], &vectors[8]] {
            for (op, expect) in [("add", (residue(p, x) + residue(p, y)) % q), ("mul", residue(p, x) * residue(p, y) % q)] {
                let show = |v: &Vec<u64>| v.iter().map(u64::to_string).collect::<Vec<_>>().join(",");
                let o = run(&["witt", "eval", "--p", "3", "--n", "1", "--lhs", &show(x), "--rhs", &show(y), "--op", op]);
                assert_eq!(stdout(&o).trim(), show(by_residue[&expect]), "{x:?} {op} {y:?}");
            }
        }
    }
}

#[test]
fn exit_codes() {
    assert_eq!(code(&run(&["witt", "law", "--p", "2", "--n", "99"])), 3);
    assert_eq!(code(&run(&["witt", "law", "--p", "4", "--n", "1"])), 2);
    assert_eq!(code(&run(&["witt", "law", "--p", "2", "--n", "1", "--kind", "div"])), 2);
    assert_eq!(code(&run(&["witt", "law", "--p", "two", "--n", "1"])), 2);
    assert_eq!(code(&run(&["witt", "eval", "--p", "2", "--n", "2", "--lhs", "1,0", "--rhs", "1,0,0"])), 2);
    assert_eq!(code(&run(&["scheme", "build", "--kind", "beta:2", "--p", "2"])), 2);
    assert_eq!(code(&run(&["dieudonne", "inverse", "--module", "A/(F", "--p", "2"])), 2);
    assert_eq!(code(&run(&["lambda", "--p", "5", "--r", "2"])), 3);
    assert_eq!(code(&run(&["scheme", "build", "--kind", "witt:3,3", "--p", "2", "--cap-dim", "64"])), 3);
    assert_eq!(code(&run(&["frobnicate"])), 2);
}

#[test]
fn strict_mode_turns_failed_checks_into_exit_1() {
    let args = ["dieudonne", "inverse", "--module", "A/(F,V)", "--p", "2", "--compare", "ep"];
    let lax = run(&args);
    assert_eq!(code(&lax), 0);
    assert!(stdout(&lax).contains("isomorphic to E[2]: no"));
    let mut strict = args.to_vec();
    strict.push("--strict");
    assert_eq!(code(&run(&strict)), 1);
}

#[test]
fn scheme_build_and_enumerate() {
    let o = run(&["scheme", "build", "--kind", "witt:1,1", "--p", "2", "--strict"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("Δ(x1) = 1⊗x1 + x1⊗1 + x0⊗x0"));

    let o = run(&["dieudonne", "enumerate", "--scheme", "witt:1,1", "--p", "2", "--strict"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("16 elements; cyclic; relations F^2, V^2"), "{}", stdout(&o));
}

#[test]
fn inverse_of_f_minus_v_is_ep() {
    let o = run(&["dieudonne", "inverse", "--module", "A/(F-V,p)", "--p", "2", "--compare", "ep", "--strict"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("isomorphic to E[2]: yes"));
}

#[test]
fn dual_and_lambda() {
    let o = run(&["dual", "standard", "--n", "1", "--m", "1", "--p", "2", "--strict"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("y = dual basis vector of x0^2"));

    let o = run(&["dual", "pairing", "--scheme", "witt:1,0", "--p", "2", "--strict"]);
    assert_eq!(code(&o), 0);

    let o = run(&["lambda", "--p", "2", "--r", "1", "--strict"]);
    assert_eq!(code(&o), 0);
    assert!(squash(&stdout(&o)).contains("lambda_1=x1+y1+x0·y0"), "{}", stdout(&o));
}

#[test]
fn verify_suites_pass() {
    for args in [
        vec!["verify", "ghost"],
        vec!["verify", "all", "--p", "2"],
        vec!["verify", "duality", "--n", "1", "--m", "1", "--p", "3"],
    ] {
        let o = run(&args);
        assert_eq!(code(&o), 0, "{args:?}\n{}", stdout(&o));
        assert!(!stdout(&o).contains("FAIL"));
    }
}

#[test]
fn json_output_is_deterministic() {
    let args = ["--format", "json", "dieudonne", "enumerate", "--scheme", "alpha:4*ep", "--p", "2"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["result"]["elements"], 16);
    assert_eq!(v["pass"], true);

    let o = run(&["--format", "json", "verify", "ghost", "--p", "3"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["result"]["passed"], v["result"]["total"]);
}

#[test]
fn law_cache_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let args = ["witt", "law", "--p", "3", "--n", "2", "--kind", "mul", "--cache-dir", d];
    let first = run(&args);
    assert_eq!(code(&first), 0);
    assert!(std::fs::read_dir(dir.path()).unwrap().next().is_some());
    let second = run(&args);
    assert_eq!(first.stdout, second.stdout);
}
