use std::process::Command;

fn nyman() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_nyman"));
    c.env_remove(nyman::cli::CACHE_ENV);
    c
}

#[test]
fn identical_config_and_cache_give_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("gram.txt");
    let out1 = dir.path().join("a.csv");
    let out2 = dir.path().join("b.csv");
    for out in [&out1, &out2] {
        let st = nyman()
            .env(nyman::cli::CACHE_ENV, &cache)
            .args(["nu", "--N", "10,20", "--kmax", "6", "--out"])
            .arg(out)
            .status()
            .unwrap();
        assert!(st.success());
    }
    let (a, b) = (std::fs::read(&out1).unwrap(), std::fs::read(&out2).unwrap());
    assert_eq!(a, b);
    assert!(cache.exists(), "cache path taken from the environment");
    let text = String::from_utf8(a).unwrap();
    assert!(text.starts_with("# nyman nu-table v1\nk,N,c,c_err,c0,c0_err,nu_hat,nu0_hat,mobius,match\n"));
}

#[test]
fn json_mirrors_csv() {
    let csv = nyman().args(["diag", "mertens", "--x", "10,100"]).output().unwrap();
    let json = nyman().args(["--format", "json", "diag", "mertens", "--x", "10,100"]).output().unwrap();
    let csv = String::from_utf8(csv.stdout).unwrap();
    let v: serde_json::Value = serde_json::from_slice(&json.stdout).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), format!("# {}", v["schema"].as_str().unwrap()));
    let cols: Vec<&str> = v["columns"].as_array().unwrap().iter().map(|c| c.as_str().unwrap()).collect();
    assert_eq!(lines.next().unwrap(), cols.join(","));
    assert_eq!(lines.count(), v["rows"].as_array().unwrap().len());
}

#[test]
fn failures_exit_nonzero_with_error_record() {
    let o = nyman().args(["inner", "e:0", "chi"]).output().unwrap();
    assert_eq!(o.status.code(), Some(3));
    let rec: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(rec["exit_code"], 3);
    assert!(rec["message"].as_str().unwrap().contains("index"));

    let o = nyman().args(["dirichlet", "--f", "e:2", "--method", "mellin", "--s", "2"]).output().unwrap();
    assert_eq!(o.status.code(), Some(3));

    let o = nyman().args(["frobnicate"]).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn spec_examples() {
    let o = nyman().args(["inner", "eps:2", "eps:2"]).output().unwrap();
    let text = String::from_utf8(o.stdout).unwrap();
    let row: Vec<&str> = text.lines().nth(2).unwrap().split(',').collect();
    assert_eq!(row[2].parse::<f64>().unwrap(), 1.0);

    let o = nyman().args(["diag", "block-variation", "--x", "1000", "--alpha", "2"]).output().unwrap();
    assert!(o.status.success());
    assert_eq!(String::from_utf8(o.stdout).unwrap().lines().count(), 3);
}
