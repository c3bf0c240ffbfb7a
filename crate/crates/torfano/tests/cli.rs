use torfano::cli::run;

#[test]
fn show_prints_the_double_point_polynomial() {
    let o = run(["show", "C1"]);
    assert_eq!(o.code, 0);
    assert!(o.stdout.contains("dbp 4a^2+4ab+b^2+2ac-19a-11b-3c\n"), "{}", o.stdout);
}

#[test]
fn show_d18_lambda() {
    let o = run(["show", "D18"]);
    assert_eq!(o.code, 0);
    assert!(o.stdout.contains("-2a-4b+4c+d"), "{}", o.stdout);
}

#[test]
fn input_errors_exit_2() {
    assert_eq!(run(["show", "X99"]).code, 2);
    assert_eq!(run(["verify", "X99"]).code, 2);
    assert_eq!(run(["--box-scale", "0", "verify", "D7"]).code, 2);
    assert_eq!(run(["frobnicate"]).code, 2);
    assert_eq!(run(["explain", "D7", "1", "2"]).code, 2);
}

#[test]
fn exclusion_cases_verify() {
    let o = run(["verify", "C1", "C2", "C3", "D10", "D18"]);
    assert_eq!(o.code, 0, "{}{}", o.stdout, o.stderr);
    assert!(o.stdout.contains("numeric survivor, geometrically excluded"));
}

#[test]
fn d7_reports_the_zero_branch() {
    let o = run(["verify", "D7"]);
    assert_eq!(o.code, 1);
    assert!(o.stdout.contains("extra 0 10 10 20"), "{}", o.stdout);
    assert!(o.stderr.contains("MISMATCH"));
    assert!(o.stdout.contains("finding D7 adjudication D7-dbp"));
}

#[test]
fn shrunken_box_drops_a_known_solution() {
    let o = run(["--box-scale", "1/4", "verify", "D7"]);
    assert_eq!(o.code, 1);
    assert!(o.stdout.contains("missing 3 12 0 12") || o.stdout.contains("missing 3 0 12 12"), "{}", o.stdout);
}

#[test]
fn explain_names_the_failing_rule() {
    let o = run(["explain", "G4", "3", "4", "0", "8", "-2"]);
    assert_eq!(o.code, 0);
    assert!(o.stdout.contains("rule ii: fail at entry (3,3)"), "{}", o.stdout);
    let o = run(["explain", "D7", "3", "1", "1", "8"]);
    assert!(o.stdout.contains("rule vi: fail"), "{}", o.stdout);
}

#[test]
fn report_rows() {
    // Exit 1 while any row is unverified.
    let o = run(["report"]);
    assert_eq!(o.code, 1);
    assert!(o.stdout.starts_with("torfano-v1\n"));
    let row = |id: &str| {
        o.stdout
            .lines()
            .find(|l| l.split_whitespace().next() == Some(id))
            .unwrap_or_else(|| panic!("no row {id}"))
            .split_whitespace()
            .map(str::to_string)
            .collect::<Vec<_>>()
    };
    assert_eq!(row("D10")[1], "×");
    assert_eq!(row("Q16")[1], "♯");
    assert_eq!(row("Z2")[1], "♭");
    assert_eq!(row("P4")[2], "✓");
}

#[test]
fn json_output_has_one_object_per_case() {
    let o = run(["--format", "json", "verify", "C3", "G4"]);
    assert_eq!(o.code, 0);
    let body = o.stdout.strip_prefix("torfano-v1\n").unwrap_or(&o.stdout);
    let v: serde_json::Value = serde_json::from_str(body).unwrap();
    let arr = v.as_array().unwrap();
    assert_eq!(arr.len(), 2);
    for (obj, id) in arr.iter().zip(["C3", "G4"]) {
        assert_eq!(obj["id"], id);
        for k in ["status", "solutions", "findings"] {
            assert!(obj.get(k).is_some(), "{k}");
        }
    }
}

#[test]
fn out_flag_writes_a_file() {
    let dir = std::env::temp_dir().join(format!("torfano-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("list.txt");
    let o = run(["--out", path.to_str().unwrap(), "list"]);
    assert_eq!(o.code, 0);
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("torfano-v1\n"));
    assert!(text.contains("V4 rays 10 relations 25"));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn enumerate_is_thread_independent() {
    let a = run(["--threads", "1", "enumerate", "G4", "Z2"]);
    let b = run(["--threads", "3", "enumerate", "G4", "Z2"]);
    assert_eq!(a.code, 0);
    assert_eq!(a.stdout, b.stdout);
}
