use std::process::Command;

use uplane::cli::{run, OutputRecord, TableDocument, EXIT_MISSING, EXIT_OK, EXIT_PRECISION, EXIT_USAGE};

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("uplane").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn value_at(text: &str, indices: &[u32]) -> Option<String> {
    text.lines().filter(|l| !l.starts_with('#')).find_map(|l| {
        let cells: Vec<&str> = l.split_whitespace().collect();
        let idx: Vec<u32> = cells[..cells.len() - 1].iter().filter_map(|c| c.parse().ok()).collect();
        (idx == indices).then(|| cells[cells.len() - 1].to_string())
    })
}

#[test]
fn so3_numeric_row() {
    let (code, out, _) = call(&[
        "dtable",
        "--target",
        "cp2",
        "--group",
        "so3",
        "--max-p",
        "2",
        "--max-kappa",
        "4",
        "--mode",
        "numeric",
    ]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(value_at(&out, &[0, 0]).as_deref(), Some("1"));
    assert_eq!(value_at(&out, &[2, 0]).as_deref(), Some("19/16"));
}

#[test]
fn su2_symbolic_row() {
    let (code, out, _) = call(&["dtable", "--target", "cp2", "--group", "su2", "--mode", "symbolic"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(value_at(&out, &[0, 0]).as_deref(), Some("-1/2*R1+13*R0"));
}

#[test]
fn p1xp1_rows_are_indexed_by_m_i_j() {
    let (code, out, _) = call(&[
        "dtable",
        "--target",
        "p1xp1",
        "--group",
        "su2",
        "--max-p",
        "0",
        "--max-kappa",
        "2",
        "--mode",
        "numeric",
        "--format",
        "csv",
    ]);
    assert_eq!(code, EXIT_OK);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("target,group,mode,m,i,j,value,precision_used"));
    assert_eq!(lines.count(), 6);
}

#[test]
fn json_round_trips() {
    let (code, out, _) = call(&[
        "dtable",
        "--target",
        "cp2hat",
        "--group",
        "so3",
        "--max-p",
        "1",
        "--max-kappa",
        "1",
        "--mu-degree",
        "3",
        "--format",
        "json",
    ]);
    assert_eq!(code, EXIT_OK);
    let doc: TableDocument = serde_json::from_str(&out).unwrap();
    assert_eq!(doc.meta.target, "cp2hat");
    assert_eq!(doc.meta.index_names, vec!["m", "n", "t"]);
    let again = serde_json::to_string_pretty(&doc).unwrap() + "\n";
    assert_eq!(again, out);
    let rec: &OutputRecord = doc.rows.iter().find(|r| r.indices == vec![1, 0, 3]).unwrap();
    assert_eq!(rec.value, "-19/96");
    assert_eq!(rec.precision_used, doc.meta.precision);
}

#[test]
fn missing_coefficient_exits_2_and_names_it() {
    let (code, _, err) = call(&[
        "dtable",
        "--target",
        "cp2",
        "--group",
        "so3",
        "--max-p",
        "8",
        "--max-kappa",
        "8",
        "--mode",
        "numeric",
    ]);
    assert_eq!(code, EXIT_MISSING);
    assert!(err.contains("H5"), "{err}");
}

#[test]
fn auto_mode_falls_back_with_a_notice() {
    let (code, out, err) = call(&[
        "dtable",
        "--target",
        "cp2",
        "--group",
        "so3",
        "--max-p",
        "8",
        "--max-kappa",
        "8",
    ]);
    assert_eq!(code, EXIT_OK);
    assert!(err.contains("H5"));
    assert!(out.starts_with("# cp2 so3 symbolic"));
}

#[test]
fn data_file_extends_numeric_mode() {
    let dir = std::env::temp_dir().join(format!("uplane-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("extra.txt");
    std::fs::write(&path, "# test values\nH5 0\nH6 0\nH7 0\nH8 0\nH9 0\nH10 0\n").unwrap();
    let (code, out, _) = call(&[
        "dtable",
        "--target",
        "cp2",
        "--group",
        "so3",
        "--max-p",
        "8",
        "--max-kappa",
        "8",
        "--mode",
        "numeric",
        "--data",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code, EXIT_OK, "{out}");
    assert!(out.starts_with("# cp2 so3 numeric"));
}

#[test]
fn tiny_window_exits_3() {
    let (code, _, _) = call(&[
        "dtable",
        "--target",
        "cp2",
        "--group",
        "so3",
        "--precision",
        "4",
        "--mode",
        "numeric",
    ]);
    assert_eq!(code, EXIT_PRECISION);
}

#[test]
fn usage_errors_exit_64() {
    assert_eq!(call(&["dtable", "--target", "k3"]).0, EXIT_USAGE);
    assert_eq!(call(&["forms", "--name", "theta1"]).0, EXIT_USAGE);
    assert_eq!(call(&["check", "--suite", "nope"]).0, EXIT_USAGE);
    assert_eq!(call(&["dtable", "--target", "cp2", "--format", "xml"]).0, EXIT_USAGE);
    assert_eq!(call(&["--help"]).0, EXIT_OK);
}

#[test]
fn forms_expansions() {
    assert_eq!(
        call(&["forms", "--name", "E2", "--order", "3"]).1,
        "0:1 1:-24 2:-72 3:-96\n"
    );
    assert!(call(&["forms", "--name", "eta3", "--order", "40"])
        .1
        .starts_with("1/8:1 9/8:-3 25/8:5 "));
    assert!(call(&["forms", "--name", "u", "--order", "8"]).1.starts_with("-1/4:"));
}

#[test]
fn hurwitz_listing() {
    let (code, out, _) = call(&["hurwitz", "--max", "12"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out, "0 -1/12\n3 1/3\n4 1/2\n7 1\n8 1\n11 1\n12 4/3\n");
}

#[test]
fn check_suites_pass() {
    for suite in ["identities", "maass", "tables"] {
        let (code, out, err) = call(&["check", "--suite", suite]);
        assert_eq!(code, EXIT_OK, "{suite}: {out} {err}");
    }
}

#[test]
fn check_json_summary_and_wall_export() {
    let path = std::env::temp_dir().join(format!("uplane-walls-{}.csv", std::process::id()));
    let (code, out, _) = call(&[
        "check",
        "--suite",
        "wallcross",
        "--json",
        "--walls-csv",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code, EXIT_OK);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["suite"], "wallcross");
    assert_eq!(v["cases"].as_array().unwrap().len(), 84);
    let csv = std::fs::read_to_string(&path).unwrap();
    assert!(csv.starts_with("group,m,i,j,kind,m1,m2,lambda_f,lambda_g,lambda_sq,value\n"));
    assert!(csv.contains("su2,0,0,5,crossing,1,-1,1,-1,-2,-4/15"));
}

#[test]
fn output_is_independent_of_worker_count() {
    let args = [
        "dtable",
        "--target",
        "p1xp1",
        "--group",
        "so3",
        "--max-p",
        "1",
        "--max-kappa",
        "4",
        "--format",
        "json",
    ];
    let one = call(&[&["--jobs", "1"][..], &args[..]].concat()).1;
    let many = call(&[&["--jobs", "6"][..], &args[..]].concat()).1;
    assert_eq!(one, many);
    assert_eq!(one, call(&args).1);
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_uplane");
    let status = Command::new(bin)
        .args(["forms", "--name", "nope"])
        .output()
        .unwrap()
        .status;
    assert_eq!(status.code(), Some(EXIT_USAGE));
    let out = Command::new(bin)
        .args(["forms", "--name", "h", "--order", "1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(EXIT_OK));
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "1/8:1 5/8:2\n");
}

#[test]
fn data_path_from_environment() {
    let dir = std::env::temp_dir().join(format!("uplane-env-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("bad.txt");
    std::fs::write(&path, "H5\n").unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_uplane"))
        .args(["dtable", "--target", "cp2", "--group", "so3"])
        .env("UPLANE_DATA", &path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stderr).unwrap().contains("line 1"));
}
