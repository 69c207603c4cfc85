use std::process::{Command, Output};

fn geoalg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_geoalg"))
        .args(args)
        .env("GEOALG_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn json_lines(o: &Output) -> Vec<serde_json::Value> {
    stdout(o)
        .lines()
        .map(|l| serde_json::from_str(l).unwrap_or_else(|e| panic!("bad jsonl {l:?}: {e}")))
        .collect()
}

#[test]
fn jacobi_suite_passes() {
    let o = geoalg(&["verify", "--suite", "jacobi", "--n", "3", "--level", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let rows = json_lines(&o);
    assert!(!rows.is_empty());
    for r in &rows {
        assert_eq!(r["suite"], "jacobi");
        assert_eq!(r["status"], "pass");
    }
}

#[test]
fn an_bracket_example() {
    let o = geoalg(&["bracket", "--alg", "an", "--n", "4", "G[1,3,0]", "G[2,4,0]"]);
    assert_eq!(o.status.code(), Some(0));
    let rows = json_lines(&o);
    let text = serde_json::to_string(&rows).unwrap();
    assert!(text.contains("2*G[1,2,0]*G[3,4,0] - 2*G[1,4,0]*G[2,3,0]"), "{text}");
}

#[test]
fn stokes_a3_star() {
    let o = geoalg(&["stokes", "--point", "a3star"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(!json_lines(&o).is_empty());
}

#[test]
fn text_format() {
    let o = geoalg(&["--format", "text", "verify", "--suite", "jacobi", "--n", "3", "--level", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.lines().all(|l| serde_json::from_str::<serde_json::Value>(l).is_err()));
    assert!(out.contains("jacobi"));
}

#[test]
fn usage_errors_exit_two() {
    let bad_expr = geoalg(&["bracket", "--alg", "an", "G[1,3", "G[2,4,0]"]);
    assert_eq!(bad_expr.status.code(), Some(2));
    let bad_rank = geoalg(&["verify", "--suite", "jacobi", "--n", "9"]);
    assert_eq!(bad_rank.status.code(), Some(2));
    let no_suite = geoalg(&["verify"]);
    assert_eq!(no_suite.status.code(), Some(2));
}
