use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::thread;

use slm::table::{emit_table, read_text, Table};

fn slm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_slm"))
        .args(args)
        .env("SLM_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn data_lines(text: &str) -> Vec<&str> {
    text.lines().filter(|l| !l.starts_with('#')).collect()
}

fn simulate(dir: &Path, seed: &str) -> (PathBuf, PathBuf) {
    let train = dir.join("train.csv");
    let test = dir.join("test.csv");
    let out = slm(&[
        "simulate",
        "--model",
        "1",
        "--d",
        "4",
        "--p",
        "6",
        "--n1",
        "30",
        "--n2",
        "30",
        "--seed",
        seed,
        "--out",
        path_str(&train),
        "--test-out",
        path_str(&test),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    (train, test)
}

#[test]
fn simulate_writes_self_describing_csv() {
    let dir = tempfile::tempdir().unwrap();
    let train = dir.path().join("train.csv");
    let out = slm(&[
        "simulate",
        "--model",
        "1",
        "--d",
        "10",
        "--p",
        "20",
        "--n1",
        "200",
        "--n2",
        "200",
        "--seed",
        "7",
        "--out",
        path_str(&train),
    ]);
    assert_eq!(code(&out), 0);
    assert!(stderr(&out).contains("seed 7"));
    let text = read_text(&train).unwrap();
    assert!(text.starts_with("# slm simulate seed 7\n"));
    let lines = data_lines(&text);
    assert_eq!(lines.len(), 401);
    let header: Vec<&str> = lines[0].split(',').collect();
    assert_eq!(header.len(), 31);
    assert_eq!((header[0], header[10], header[30]), ("u1", "z1", "label"));
    assert!(lines[1..].iter().all(|l| l.split(',').count() == 31));

    // same flags, same rows (the config comment names the output path)
    let again = dir.path().join("again.csv");
    let out = slm(&[
        "simulate",
        "--model",
        "1",
        "--d",
        "10",
        "--p",
        "20",
        "--n1",
        "200",
        "--n2",
        "200",
        "--seed",
        "7",
        "--out",
        path_str(&again),
    ]);
    assert_eq!(code(&out), 0);
    let again = read_text(&again).unwrap();
    assert_eq!(data_lines(&again), lines);
}

#[test]
fn fit_then_predict_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let (train, test) = simulate(dir.path(), "3");
    let model = dir.path().join("model.slm");
    let report = dir.path().join("r0.csv");
    let out = slm(&[
        "fit",
        "--train",
        path_str(&train),
        "--auto-schema",
        "--out",
        path_str(&model),
        "--theta",
        "0.2,0.4",
        "--report",
        path_str(&report),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let r0 = read_text(&report).unwrap();
    assert_eq!(data_lines(&r0)[0], "theta,lambda_beta,r0");
    assert_eq!(data_lines(&r0).len(), 1 + 2 * 10);

    let predictions = dir.path().join("pred.csv");
    let out = slm(&[
        "predict",
        "--model",
        path_str(&model),
        "--test",
        path_str(&test),
        "--out",
        path_str(&predictions),
        "--eager-radius",
        "1",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(stderr(&out).contains("test error"));
    let text = read_text(&predictions).unwrap();
    let lines = data_lines(&text);
    assert_eq!(lines[0], "row,predicted,actual");
    assert_eq!(lines.len(), 201);
    assert!(lines[1..].iter().all(|l| {
        let f: Vec<&str> = l.split(',').collect();
        matches!(f[1], "1" | "2") && matches!(f[2], "1" | "2")
    }));

    // without labels only predictions come back
    let unlabeled = dir.path().join("unlabeled.csv");
    let test_text = read_text(&test).unwrap();
    let stripped: String = data_lines(&test_text)
        .iter()
        .map(|l| format!("{}\n", l.rsplit_once(',').unwrap().0))
        .collect();
    fs::write(&unlabeled, stripped).unwrap();
    let out = slm(&["predict", "--model", path_str(&model), "--test", path_str(&unlabeled)]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let printed = stdout(&out);
    assert_eq!(data_lines(&printed)[0], "row,predicted");
    assert_eq!(data_lines(&printed).len(), 201);
}

#[test]
fn schema_files_drive_categorical_ingestion() {
    let dir = tempfile::tempdir().unwrap();
    let schema = dir.path().join("bands.schema");
    fs::write(&schema, "x,continuous\ncolor,categorical\noutcome,label\n").unwrap();
    let mut csv = String::from("x,color,outcome\n");
    for i in 0..24 {
        let good = i % 2 == 0;
        let color = ["red", "blue", ""][i % 3];
        let x = if good {
            1.0 + 0.1 * i as f64
        } else {
            -1.0 - 0.1 * i as f64
        };
        csv.push_str(&format!("{x},{color},{}\n", if good { "good" } else { "bad" }));
    }
    let train = dir.path().join("bands.csv");
    fs::write(&train, &csv).unwrap();
    let model = dir.path().join("bands.slm");
    let out = slm(&[
        "fit",
        "--train",
        path_str(&train),
        "--schema",
        path_str(&schema),
        "--class1-label",
        "good",
        "--theta",
        "0.3",
        "--lambda-beta",
        "0.01",
        "--lambda-eta",
        "0.1",
        "--out",
        path_str(&model),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let test = dir.path().join("new.csv");
    fs::write(&test, "x,color\n2.5,green\n-2.5,red\n").unwrap();
    let out = slm(&["predict", "--model", path_str(&model), "--test", path_str(&test)]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let printed = stdout(&out);
    assert_eq!(data_lines(&printed), vec!["row,predicted", "1,good", "2,bad"]);
}

#[test]
fn tune_emits_the_r0_table() {
    let dir = tempfile::tempdir().unwrap();
    let (train, _) = simulate(dir.path(), "5");
    let out = slm(&[
        "tune",
        "--train",
        path_str(&train),
        "--auto-schema",
        "--theta",
        "0.5",
        "--lambda-beta",
        "1,0.1",
        "--lambda-eta",
        "0.05",
        "--kfold",
        "5",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = stdout(&out);
    let lines = data_lines(&text);
    assert_eq!(lines[0], "theta,lambda_beta,r0");
    assert!(lines[1].starts_with("0.5,1,"));
    assert!(lines[2].starts_with("0.5,0.1,"));
    assert!(text.contains("# selected theta 0.5"));
}

#[test]
fn experiment_tables() {
    let out = slm(&[
        "benchmark",
        "--model",
        "2",
        "--d",
        "3",
        "--p",
        "4",
        "--n1",
        "15",
        "--n2",
        "15",
        "--reps",
        "2",
        "--methods",
        "dsda,bayes",
        "--seed",
        "4",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("seed 4"));
    let lines = data_lines(&text);
    assert_eq!(lines[0], "model,dp,method,mean,sd");
    assert!(lines[1].starts_with("2,\"(3,4)\",DSDA,"));
    assert!(lines[2].starts_with("2,\"(3,4)\",Bayes,"));

    let out = slm(&[
        "regret",
        "--d",
        "3",
        "--p",
        "4",
        "--n",
        "20,40",
        "--reps",
        "2",
        "--methods",
        "bayes",
        "--draws",
        "2000",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = stdout(&out);
    assert_eq!(data_lines(&text)[0], "n,method,regret");
    assert_eq!(data_lines(&text).len(), 3);

    let out = slm(&["probe", "--d", "3", "--p", "4", "--n", "20,40", "--probes", "10"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert_eq!(data_lines(&stdout(&out))[0], "n,sup_error");

    let out = slm(&[
        "bayes-risk",
        "--model",
        "3",
        "--d",
        "3",
        "--p",
        "4",
        "--draws",
        "5000",
        "--seed",
        "2",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = stdout(&out);
    let row: Vec<&str> = data_lines(&text)[1].split(',').collect();
    let estimate: f64 = row[5].parse().unwrap();
    assert!(estimate > 0.0 && estimate < 0.5);

    let out = slm(&["illustrate", "--draws", "20000", "--seed", "9"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert_eq!(data_lines(&stdout(&out))[0], "bayes,best_linear");
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    // usage
    assert_eq!(code(&slm(&["fit", "--bogus"])), 1);
    assert_eq!(code(&slm(&["simulate", "--model", "7", "--out", "x.csv"])), 1);
    assert_eq!(code(&slm(&["illustrate", "--draws", "10"])), 1);
    assert_eq!(code(&slm(&["benchmark", "--methods", "forest"])), 1);
    assert_eq!(code(&slm(&[])), 1);
    // data and I/O
    assert_eq!(
        code(&slm(&[
            "fit",
            "--train",
            "/no/such.csv",
            "--auto-schema",
            "--out",
            "m.slm"
        ])),
        2
    );
    let bad = dir.path().join("bad.csv");
    fs::write(&bad, "u1,z1,label\n0,1.0,a\n1,2.0\n").unwrap();
    let out = slm(&[
        "fit",
        "--train",
        path_str(&bad),
        "--auto-schema",
        "--out",
        path_str(&dir.path().join("m")),
    ]);
    assert_eq!(code(&out), 2);
    let garbage = dir.path().join("garbage.slm");
    fs::write(&garbage, "{\"theta\": 0.1}").unwrap();
    assert_eq!(
        code(&slm(&[
            "predict",
            "--model",
            path_str(&garbage),
            "--test",
            path_str(&bad)
        ])),
        2
    );
    // numerical: one sweep cannot settle a correlated direction solve
    let (train, test) = simulate(dir.path(), "8");
    let model = dir.path().join("tight.slm");
    let out = slm(&[
        "fit",
        "--train",
        path_str(&train),
        "--auto-schema",
        "--theta",
        "0.3",
        "--lambda-beta",
        "0",
        "--lambda-eta",
        "0.1",
        "--solver-max-iter",
        "1",
        "--solver-tol",
        "1e-12",
        "--out",
        path_str(&model),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let out = slm(&["predict", "--model", path_str(&model), "--test", path_str(&test)]);
    assert_eq!(code(&out), 3, "{}", stderr(&out));
}

#[test]
fn help_exits_zero_and_lists_flags() {
    let cases: &[(&str, &[&str])] = &[
        (
            "simulate",
            &["--model", "--d", "--p", "--n1", "--n2", "--seed", "--out", "--test-out"],
        ),
        (
            "fit",
            &[
                "--train",
                "--schema",
                "--auto-schema",
                "--class1-label",
                "--theta",
                "--kfold",
                "--out",
                "--report",
            ],
        ),
        (
            "predict",
            &["--model", "--test", "--out", "--eager-radius", "--eager-center"],
        ),
        (
            "tune",
            &[
                "--train",
                "--lambda-beta",
                "--lambda-eta",
                "--skip-solver-failures",
                "--out",
            ],
        ),
        ("benchmark", &["--reps", "--long", "--methods", "--kfold", "--out"]),
        ("regret", &["--n", "--methods", "--reps", "--draws"]),
        ("bayes-risk", &["--draws", "--counting"]),
        ("illustrate", &["--draws", "--seed"]),
        ("probe", &["--n", "--radius", "--theta", "--probes"]),
    ];
    for (sub, flags) in cases {
        let out = slm(&[sub, "--help"]);
        assert_eq!(code(&out), 0);
        let text = stdout(&out);
        for flag in *flags {
            assert!(text.contains(flag), "{sub} --help lacks {flag}");
        }
    }
    assert_eq!(code(&slm(&["--help"])), 0);
}

#[test]
fn concurrent_tables_do_not_interleave() {
    let dir = tempfile::tempdir().unwrap();
    let handles: Vec<_> = (0..8)
        .map(|t| {
            let path = dir.path().join(format!("t{t}.csv"));
            thread::spawn(move || {
                for round in 0..20 {
                    let mut table = Table::new(["writer", "round", "row"]).with_comment(format!("writer {t}"));
                    for r in 0..500 {
                        table.push([t.to_string(), round.to_string(), r.to_string()]);
                    }
                    emit_table(&table, &path).unwrap();
                }
                path
            })
        })
        .collect();
    for (t, h) in handles.into_iter().enumerate() {
        let path = h.join().unwrap();
        let back = Table::from_csv(&read_text(&path).unwrap()).unwrap();
        assert_eq!(back.comments, vec![format!("writer {t}")]);
        assert_eq!(back.rows.len(), 500);
        assert!(back.rows.iter().all(|r| r[0] == t.to_string() && r[1] == "19"));
    }
    // only the final files remain, no temporaries
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 8);
}
