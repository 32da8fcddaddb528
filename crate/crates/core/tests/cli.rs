use rarewalk::cli::run;
use rarewalk::report::csv_data_lines;
use serde_json::Value;

fn invoke(argv: &str) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run(
        std::iter::once("rarewalk").chain(argv.split_whitespace()),
        &mut out,
        &mut err,
    );
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn json(argv: &str) -> Value {
    let (code, out, err) = invoke(&format!("{argv} --format json"));
    assert_eq!(code, 0, "{argv}: {err}");
    serde_json::from_str(&out).unwrap()
}

/// Structural check against docs/report.schema.json.
fn conforms(v: &Value) {
    let obj = v.as_object().unwrap();
    let mut keys: Vec<&str> = obj.keys().map(String::as_str).collect();
    keys.sort();
    assert_eq!(keys, ["columns", "command", "meta", "rows"]);
    for k in ["engine_version", "threads", "generated_unix"] {
        assert!(v["meta"].get(k).is_some(), "meta.{k} missing");
    }
    let width = v["columns"].as_array().unwrap().len();
    assert!(width >= 1);
    for row in v["rows"].as_array().unwrap() {
        let row = row.as_array().unwrap();
        assert_eq!(row.len(), width);
        assert!(row.iter().all(|c| !c.is_array() && !c.is_object()));
    }
}

#[test]
fn expect_both_routes_agree() {
    let v = json("expect --n 3 --route both");
    conforms(&v);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0][1], "recursion");
    assert_eq!(rows[1][1], "ladder");
    for r in rows {
        assert_eq!(r[2], "5/4");
        assert_eq!(r[3], 1.25);
        assert_eq!(r[5], true);
    }
}

#[test]
fn enumerate_alpha_distribution() {
    let v = json("enumerate --n 3 --stat alpha-dist");
    conforms(&v);
    let got: Vec<(i64, String, f64)> = v["rows"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| {
            (
                r[2].as_i64().unwrap(),
                r[3].as_str().unwrap().to_string(),
                r[4].as_f64().unwrap(),
            )
        })
        .collect();
    assert_eq!(
        got,
        vec![
            (0, "1/4".into(), 0.25),
            (1, "1/2".into(), 0.5),
            (3, "1/4".into(), 0.25)
        ]
    );
}

#[test]
fn bijection_check_passes() {
    let v = json("bijection-check --n-plus-1 8");
    conforms(&v);
    assert_eq!(v["meta"]["all_pass"], true);
    assert!(v["rows"].as_array().unwrap().iter().all(|r| r[3] == true));
}

#[test]
fn events_and_moments_verify() {
    let v = json("events --t 6 --through --verify");
    conforms(&v);
    assert_eq!(v["rows"].as_array().unwrap().len(), 24);
    assert!(v["rows"].as_array().unwrap().iter().all(|r| r[5] == true));

    let v = json("moments --n 3 --k 2 --side plus --verify");
    assert_eq!(v["rows"][0][4], "3/8");
    assert_eq!(v["rows"][0][7], true);

    let v = json("events --t 200 --convergence");
    conforms(&v);
    let last = v["rows"].as_array().unwrap().last().unwrap().clone();
    assert_eq!(last[0], 200);
}

#[test]
fn every_subcommand_emits_valid_reports() {
    for argv in [
        "expect --n 5 --all",
        "expect --n 20 --route monte-carlo --replicas 500 --seed 3",
        "enumerate --n 6 --stat moment --k 2",
        "enumerate --n 6 --stat tail --threshold 1",
        "enumerate --n 6 --stat mean-f1",
        "moments --growth --n-list 50,100 --a 0.5 --epsilon 0.25",
        "moments --n 600 --k 2 --mode floating",
        "tail --n 50 --a 0.3 --replicas 500 --seed 1",
        "tail-slope --n-grid 64,128 --a 0.3 --replicas 500 --seed 1",
        "limsup --horizon 500 --n-min 5 --replicas 4 --seed 1",
        "sites --n 12 --replicas 500 --seed 1",
        "biased --n 100 --p 0.6 --replicas 200 --seed 1",
    ] {
        let v = json(argv);
        conforms(&v);
        // CSV of the same run has a constant column count.
        let (code, csv, err) = invoke(argv);
        assert_eq!(code, 0, "{argv}: {err}");
        let data = csv_data_lines(&csv);
        let width = data[0].split(',').count();
        assert!(data.len() > 1, "{argv}");
        for line in &data[1..] {
            if !line.contains('"') {
                assert_eq!(line.split(',').count(), width, "{argv}: {line}");
            }
        }
    }
}

#[test]
fn seeds_are_recorded() {
    let (code, out, err) = invoke("tail --n 20 --a 0.3 --replicas 100");
    assert_eq!(code, 0);
    assert!(err.contains("drew seed"));
    assert!(out.contains("# seed_source=entropy"));
    let seed: u64 = out
        .lines()
        .find_map(|l| l.strip_prefix("# seed="))
        .unwrap()
        .parse()
        .unwrap();
    let (_, again, _) = invoke(&format!("tail --n 20 --a 0.3 --replicas 100 --seed {seed}"));
    assert_eq!(csv_data_lines(&out), csv_data_lines(&again));
}

#[test]
fn errors_exit_two() {
    let (code, _, err) = invoke("frobnicate");
    assert_eq!(code, 2);
    assert!(err.contains("Usage"), "{err}");

    let (code, _, err) = invoke("enumerate --n 40");
    assert_eq!(code, 2);
    assert!(err.contains("enumerate"), "{err}");

    let (code, _, err) = invoke("tail --n 10 --a -1 --seed 1");
    assert_eq!(code, 2);
    assert!(err.contains("estimate_tail") && err.contains("precondition"), "{err}");

    let (code, _, err) = invoke("limsup --horizon 10 --n-min 1 --seed 1");
    assert_eq!(code, 2);
    assert!(err.contains("n_min"), "{err}");

    let (code, _, _) = invoke("bijection-check --n-plus-1 30");
    assert_eq!(code, 2);

    let (code, out, _) = invoke("--help");
    assert_eq!(code, 0);
    assert!(out.contains("tail-slope"));
}

#[test]
fn threads_do_not_change_data_rows() {
    for cmd in [
        "tail --n 300 --a 0.3 --replicas 2000 --seed 9",
        "limsup --horizon 2000 --replicas 6 --seed 9",
        "biased --n 200 --p 0.55 --replicas 1000 --seed 9",
    ] {
        let (_, one, _) = invoke(&format!("{cmd} --threads 1"));
        let (_, four, _) = invoke(&format!("{cmd} --threads 4"));
        assert_eq!(csv_data_lines(&one), csv_data_lines(&four), "{cmd}");
        assert_ne!(one, four, "thread count belongs in the metadata");
    }
}

#[test]
fn binary_honours_environment() {
    let dir = std::env::temp_dir().join(format!("rarewalk-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let status = std::process::Command::new(env!("CARGO_BIN_EXE_rarewalk"))
        .args(["sites", "--n", "8", "--replicas", "100", "--seed", "2"])
        .env("RAREWALK_OUT_DIR", &dir)
        .env("RAREWALK_THREADS", "2")
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(dir.join("sites.csv")).unwrap();
    assert!(text.contains("# threads=2"));
    assert!(text.contains("# seed=2"));
    std::fs::remove_dir_all(&dir).unwrap();

    let out = std::process::Command::new(env!("CARGO_BIN_EXE_rarewalk"))
        .args(["moments", "--n", "0"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}
