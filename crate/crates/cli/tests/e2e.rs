use std::io::Write;
use std::process::{Command, Stdio};

struct Run {
    code: i32,
    out: String,
    err: String,
}

fn nda_with(args: &[&str], env: Option<(&str, &str)>, stdin: Option<&str>) -> Run {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_nda"));
    cmd.args(args)
        .env_remove("NDA_FORMAT")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped());
    if let Some((k, v)) = env {
        cmd.env(k, v);
    }
    let mut child = cmd.spawn().expect("spawn nda");
    {
        let mut pipe = child.stdin.take().unwrap();
        if let Some(input) = stdin {
            pipe.write_all(input.as_bytes()).unwrap();
        }
    }
    let out = child.wait_with_output().unwrap();
    Run {
        code: out.status.code().unwrap_or(-1),
        out: String::from_utf8_lossy(&out.stdout).into_owned(),
        err: String::from_utf8_lossy(&out.stderr).into_owned(),
    }
}

fn nda(args: &[&str]) -> Run {
    nda_with(args, None, None)
}

fn json_lines(out: &str) -> Vec<serde_json::Value> {
    out.lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

#[test]
fn eval_exit_codes() {
    let r = nda(&["eval", "projective:pow:1.5@int:0:1000", "2+2"]);
    assert_eq!((r.code, r.out.as_str()), (0, "3\n"));

    let r = nda(&["eval", "dual:id@int:0:10", "9+9"]);
    assert_eq!(r.code, 3, "{}", r.err);
    assert!(r.err.contains("carrier exhausted"));

    let r = nda(&["eval", "dual:id@int:0:10", "9+9", "--overflow", "saturate"]);
    assert_eq!((r.code, r.out.as_str()), (0, "10\n"));

    assert_eq!(nda(&["eval", "projective:id@int:0:10", "0.5+1"]).code, 3);
    assert_eq!(
        nda(&["eval", "projective:atanh:1@grid:0:1:0.001", "0.5*0.5"]).code,
        3
    );
    assert_eq!(nda(&["eval", "projective:nope@int:0:10", "1+1"]).code, 1);
    assert_eq!(nda(&["eval", "projective:id@int:0:10"]).code, 1);
    assert_eq!(
        nda(&[
            "eval",
            "projective:id@int:0:10",
            "1+1",
            "--overflow",
            "error"
        ])
        .code,
        1
    );
    assert_eq!(nda(&["--help"]).code, 0);
    assert_eq!(nda(&["--version"]).code, 0);
}

#[test]
fn syntax_errors_report_offsets() {
    let r = nda(&["eval", "projective:id@int:0:10", "(1 + 2"]);
    assert_eq!(r.code, 1);
    assert!(r.err.contains("offset 6"), "{}", r.err);
}

#[test]
fn bad_table_names_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.tbl");
    std::fs::write(&path, "# key value\n0 0\n1 1\n2 5\n3 4\n").unwrap();
    let spec = format!("projective:table:{}@int:0:10", path.display());
    let r = nda(&["eval", &spec, "1+1"]);
    assert_eq!(r.code, 2);
    assert!(r.err.contains("line 5"), "{}", r.err);
}

#[test]
fn validate_command() {
    let r = nda(&["validate", "pow:2@int:0:100"]);
    assert_eq!(r.code, 0, "{}", r.err);
    assert!(r.out.contains("admissible"));

    assert_eq!(nda(&["validate", "pow:0@int:0:10"]).code, 1);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("short.tbl");
    std::fs::write(&path, "0 0\n1 1\n2 3\n").unwrap();
    let r = nda(&["validate", &format!("table:{}@int:0:10", path.display())]);
    assert_eq!(r.code, 2, "{} {}", r.out, r.err);
    assert!(r.err.contains("index 3"), "{}", r.err);

    let r = nda(&[
        "validate",
        "projective:atanh:1@grid:0:1:0.001",
        "--format",
        "json",
    ]);
    assert_eq!(r.code, 0);
    let v = &json_lines(&r.out)[0];
    assert_eq!(v["passed"], true);
    assert_eq!(v["multiplicative"], "fails");
}

#[test]
fn laws_quad_profile() {
    let r = nda(&[
        "laws",
        "projective:quad@int:0:200",
        "--check",
        "assoc-add,dist,archimedean,theorem",
        "-R",
        "100",
        "--format",
        "json",
    ]);
    assert_eq!(r.code, 0, "{}", r.err);
    let rows = json_lines(&r.out);
    let by = |name: &str| rows.iter().find(|v| v["law"] == name).unwrap().clone();
    assert_eq!(by("assoc-add")["status"], "fails");
    assert!(by("assoc-add")["witness"].is_array());
    assert_eq!(
        by("distributivity")["witness"],
        serde_json::json!([2.0, 1.0, 1.0])
    );
    assert_eq!(by("archimedean")["status"], "fails");
    assert_eq!(by("archimedean")["witness"], serde_json::json!([1.0, 2.0]));
    assert_eq!(by("theorem-archimedean-mll")["status"], "holds");
}

#[test]
fn laws_identity_all_hold() {
    let r = nda(&[
        "laws",
        "projective:id@int:0:200",
        "--check",
        "all",
        "-R",
        "150",
        "--format",
        "json",
    ]);
    assert_eq!(r.code, 0, "{}", r.err);
    let rows = json_lines(&r.out);
    assert_eq!(rows.len(), 9);
    assert!(rows.iter().all(|v| v["status"] == "holds"), "{}", r.out);
}

#[test]
fn laws_dual_quad_archimedean() {
    let r = nda(&[
        "laws",
        "dual:quad@int:0:200",
        "--check",
        "archimedean",
        "-R",
        "150",
    ]);
    assert_eq!(r.code, 0);
    assert!(r
        .out
        .lines()
        .any(|l| l.starts_with("archimedean") && l.contains("holds")));
}

#[test]
fn laws_range_beyond_carrier_is_usage() {
    assert_eq!(nda(&["laws", "projective:id@int:0:10", "-R", "50"]).code, 1);
    assert_eq!(
        nda(&["laws", "projective:id@int:0:10", "--check", "frob"]).code,
        1
    );
}

#[test]
fn laws_table_and_csv() {
    let r = nda(&[
        "laws",
        "projective:pow:1.5@int:0:100",
        "--check",
        "assoc-add",
        "-R",
        "50",
    ]);
    assert!(
        r.out.contains("(2, 3, 3)") && r.out.contains("5 != 4"),
        "{}",
        r.out
    );

    let r = nda_with(
        &[
            "laws",
            "projective:pow:1.5@int:0:100",
            "--check",
            "assoc-add",
            "-R",
            "50",
        ],
        Some(("NDA_FORMAT", "csv")),
        None,
    );
    let mut rd = csv::Reader::from_reader(r.out.as_bytes());
    assert_eq!(
        rd.headers().unwrap().iter().collect::<Vec<_>>(),
        nda_cli::output::LAW_HEADER
    );
    let row = rd.records().next().unwrap().unwrap();
    assert_eq!(&row[3], "2 3 3");

    // An explicit flag overrides the environment.
    let r = nda_with(
        &["eval", "projective:id@int:0:10", "1+1", "--format", "table"],
        Some(("NDA_FORMAT", "json")),
        None,
    );
    assert_eq!(r.out, "2\n");
    assert_eq!(
        nda_with(
            &["eval", "projective:id@int:0:10", "1"],
            Some(("NDA_FORMAT", "xml")),
            None
        )
        .code,
        1
    );
}

#[test]
fn series_commands() {
    let r = nda(&["series", "practical", "powfact:1000", "-K", "100"]);
    assert!(r.out.contains("practically-divergent"), "{}", r.out);
    let r = nda(&["series", "practical", "factpow:1000", "-K", "100"]);
    assert!(r.out.contains("practically-convergent"), "{}", r.out);
    let r = nda(&[
        "series",
        "practical",
        "powfact:1000",
        "-K",
        "5000",
        "--format",
        "json",
    ]);
    assert_eq!(json_lines(&r.out)[0]["verdict"], "practically-convergent");

    let r = nda(&[
        "series",
        "sum",
        "projective:exp2m1@int:0:100",
        "const:1",
        "-n",
        "50",
    ]);
    assert_eq!(r.code, 0, "{}", r.err);
    assert!(
        r.out.contains("sum 1,") && r.out.contains("stationary at k=1"),
        "{}",
        r.out
    );

    let r = nda(&[
        "series",
        "sum",
        "projective:id@int:0:100",
        "list:1,2,3",
        "--format",
        "csv",
        "-n",
        "3",
    ]);
    assert_eq!(
        r.out.lines().last(),
        Some("projective:id@int:0:100,\"list:1,2,3\",3,6")
    );

    assert_eq!(nda(&["series", "practical", "zigzag:3"]).code, 1);
}

#[test]
fn demos() {
    for (name, line) in [
        ("lightspeed", "0.5 (+) 0.5 = 0.800"),
        ("lightspeed", "1.000 (+) 0.600 = 1.000"),
        ("bogo", "5 (+) 5 = 5"),
        ("heap", "10 (+) 1 = 10"),
        ("payphone", "= 1"),
        ("cans", "2.10 != 2.00"),
    ] {
        let r = nda(&["demo", name]);
        assert_eq!(r.code, 0);
        assert!(r.out.contains(line), "{name}: {}", r.out);
        assert!(!r.out.contains("MISMATCH"));
    }
    let r = nda(&["demo", "bogo", "--format", "json"]);
    assert_eq!(json_lines(&r.out)[0]["holds"], true);
    assert_eq!(nda(&["demo", "teapot"]).code, 1);
}

#[test]
fn repl_session() {
    let input = "\
:arith projective:pow:2@int:0:100
2+2
2 +
:arith dual:id@int:0:100
2+2
:arith projective:pow:1.5@int:0:100
:laws assoc-add 50
:format json
1 << 5
:quit
7+7
";
    let r = nda_with(&["repl"], None, Some(input));
    assert_eq!(r.code, 0, "{}", r.err);
    let lines: Vec<&str> = r.out.lines().collect();
    assert!(lines.contains(&"2"));
    assert!(lines.contains(&"4"));
    assert!(r.out.contains("(2, 3, 3)"));
    assert!(r.out.contains("\"result\":true"));
    assert!(!r.out.contains("14"));
    assert!(r.err.contains("offset 3"), "{}", r.err);
}
