use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn cel() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_cel"));
    c.env_remove("CEL_SEED");
    c
}

fn run(args: &[&str]) -> Output {
    cel().args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name).to_string_lossy().into_owned()
}

fn schema() -> jsonschema::Validator {
    let text = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("schema/report.schema.json")).unwrap();
    jsonschema::validator_for(&serde_json::from_str(&text).unwrap()).unwrap()
}

/// Parses stdout, checks exit 0 and schema validity.
fn ok_json(args: &[&str]) -> Value {
    let o = run(args);
    assert_eq!(code(&o), 0, "{args:?}: {}", stderr(&o));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let errors: Vec<String> = schema().iter_errors(&v).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{args:?} violates schema: {errors:?}");
    v
}

fn write_tmp(dir: &tempfile::TempDir, name: &str, body: &str) -> String {
    let p = dir.path().join(name);
    std::fs::write(&p, body).unwrap();
    p.to_string_lossy().into_owned()
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

#[test]
fn fit_cel_dataset_one() {
    let v = ok_json(&["fit", "--dist", "cel", &fixture("insulating_fluid_34kv.txt")]);
    assert_eq!(v["command"], "fit");
    let theta = v["results"]["estimates"][0].as_f64().unwrap();
    assert!(close(theta, 7.0385, 5e-4), "{theta}");
    assert_eq!(v["results"]["converged"], true);
    assert_eq!(v["inputs"]["dataset"]["n"], 19);
    assert_eq!(v["inputs"]["flags"]["dist"], "cel");
    assert_eq!(v["inputs"]["flags"]["alpha"], 0.05);
}

#[test]
fn fit_el_dataset_two() {
    let v = ok_json(&["fit", "--dist", "el", &fixture("air_conditioning.txt")]);
    let est = &v["results"]["estimates"];
    assert!(close(est[0].as_f64().unwrap(), 0.0111, 5e-5));
    assert!(close(est[1].as_f64().unwrap(), 0.1932, 5e-4));
}

#[test]
fn file_and_builtin_agree() {
    let a = ok_json(&["fit", &fixture("air_conditioning.txt")]);
    let b = ok_json(&["fit", "builtin:air_conditioning"]);
    assert_eq!(a["results"], b["results"]);
    assert_eq!(a["inputs"]["dataset"]["checksum"], b["inputs"]["dataset"]["checksum"]);
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fit.json");
    let o = run(&["fit", "--out", out.to_str().unwrap(), "builtin:insulating_fluid_34kv"]);
    assert_eq!(code(&o), 0);
    assert!(o.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(v["schema_version"], "1.0");
}

#[test]
fn bad_inputs_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let empty = write_tmp(&dir, "empty.txt", "");
    let o = run(&["fit", "--dist", "cel", &empty]);
    assert_eq!(code(&o), 2);

    let abc = write_tmp(&dir, "abc.txt", "1.0\n2.0\nabc\n");
    let o = run(&["fit", &abc]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));

    let neg = write_tmp(&dir, "neg.txt", "1.0\n-1.0\n3\n");
    let o = run(&["fit", &neg]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("-1"), "{}", stderr(&o));

    assert_eq!(code(&run(&["fit", "/definitely/not/here.txt"])), 2);
    assert_eq!(code(&run(&["fit", "--dist", "lognormal", "builtin:air_conditioning"])), 2);
    assert_eq!(code(&run(&["fit", "--alpha", "1.5", "builtin:air_conditioning"])), 2);
    assert_eq!(code(&run(&["frobnicate"])), 2);
    assert_eq!(code(&run(&[])), 2);
}

#[test]
fn header_and_comments_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_tmp(&dir, "d.csv", "# comment\ntime\n\n5\n11\n21\n31\n46\n");
    let v = ok_json(&["fit", &p]);
    assert_eq!(v["inputs"]["dataset"]["n"], 5);
}

#[test]
fn non_convergence_exits_3() {
    let o = run(&["fit", "--dist", "gamma", "--max-iter", "3", "builtin:air_conditioning"]);
    assert_eq!(code(&o), 3, "{}", stderr(&o));
    let o = run(&["fit", "--max-iter", "1", "builtin:air_conditioning"]);
    assert_eq!(code(&o), 3, "{}", stderr(&o));
}

#[test]
fn compare_dataset_one_cel_row() {
    let v = ok_json(&["compare", "builtin:insulating_fluid_34kv"]);
    let rows = v["results"].as_array().unwrap();
    assert_eq!(rows.len(), 6);
    let cel = rows.iter().find(|r| r["family"] == "cel").unwrap();
    let f = |k: &str| cel[k].as_f64().unwrap();
    assert!(close(f("aic"), 139.98, 0.05));
    assert!(close(f("bic"), 140.92, 0.05));
    assert!(close(f("aicc"), 140.21, 0.05));
    assert!(close(f("ks_stat"), 0.1131, 1e-3));
    assert!(close(f("ks_pvalue"), 0.9458, 1e-2));
    let aics: Vec<f64> = rows.iter().map(|r| r["aic"].as_f64().unwrap()).collect();
    assert!(aics.windows(2).all(|w| w[0] <= w[1]));
}

#[test]
fn compare_subset_has_exactly_those_rows() {
    let v = ok_json(&["compare", "--dist", "cel,gamma", "builtin:air_conditioning"]);
    let mut fams: Vec<&str> = v["results"].as_array().unwrap().iter().map(|r| r["family"].as_str().unwrap()).collect();
    fams.sort();
    assert_eq!(fams, ["cel", "gamma"]);
}

/// Formats a number to 10 significant digits.
fn sig10(v: f64) -> String {
    format!("{v:.9e}")
}

#[test]
fn csv_matches_json() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("cmp.csv");
    let v = ok_json(&["compare", "--csv", csv_path.to_str().unwrap(), "builtin:air_conditioning"]);
    let json_rows = v["results"].as_array().unwrap();
    let mut rdr = csv::Reader::from_path(&csv_path).unwrap();
    let header = rdr.headers().unwrap().clone();
    let records: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(records.len(), json_rows.len());
    let col = |name: &str| header.iter().position(|h| h == name).unwrap();
    for (rec, js) in records.iter().zip(json_rows) {
        assert_eq!(&rec[col("family")], js["family"].as_str().unwrap());
        for key in ["neg2ll", "aic", "bic", "aicc", "ks_stat", "ks_pvalue"] {
            let c: f64 = rec[col(key)].parse().unwrap();
            assert_eq!(sig10(c), sig10(js[key].as_f64().unwrap()), "{key}");
        }
        for (j, key) in ["param1", "param2"].iter().enumerate() {
            if let Some(e) = js["fit"]["estimates"].get(j) {
                let c: f64 = rec[col(key)].parse().unwrap();
                assert_eq!(sig10(c), sig10(e.as_f64().unwrap()));
            } else {
                assert_eq!(&rec[col(key)], "");
            }
        }
    }
}

#[test]
fn plot_data_files() {
    let dir = tempfile::tempdir().unwrap();
    let plot: PathBuf = dir.path().join("plots");
    ok_json(&["compare", "--dist", "cel,weibull", "--plot-data", plot.to_str().unwrap(), "builtin:insulating_fluid_34kv"]);
    let mut names = vec!["ecdf.csv".to_string()];
    for f in ["cel", "weibull"] {
        for kind in ["pdf", "cdf", "pp", "qq"] {
            names.push(format!("{kind}_{f}.csv"));
        }
    }
    for name in &names {
        let mut rdr = csv::Reader::from_path(plot.join(name)).unwrap();
        assert_eq!(rdr.headers().unwrap().len(), 2, "{name}");
        let rows: Vec<(f64, f64)> = rdr
            .records()
            .map(|r| {
                let r = r.unwrap();
                assert_eq!(r.len(), 2);
                (r[0].parse().unwrap(), r[1].parse().unwrap())
            })
            .collect();
        let expected = if name.starts_with("pdf") || name.starts_with("cdf") { 200 } else { 19 };
        assert_eq!(rows.len(), expected, "{name}");
        assert!(rows.iter().all(|(a, b)| a.is_finite() && b.is_finite()));
    }
    assert!(!plot.join("pdf_gamma.csv").exists());
}

#[test]
fn bootstrap_pvalue_reported() {
    let v = ok_json(&["compare", "--dist", "cel", "--bootstrap-ks", "50", "--seed", "5", "builtin:insulating_fluid_34kv"]);
    let p = v["results"][0]["ks_pvalue_bootstrap"].as_f64().unwrap();
    assert!((0.0..=1.0).contains(&p));
}

#[test]
fn simulate_rejects_one_replication() {
    let o = run(&["simulate", "--reps", "1"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn simulate_is_deterministic() {
    let args = ["simulate", "--sizes", "20,50", "--reps", "60", "--seed", "99"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert!(schema().is_valid(&v));
    assert_eq!(v["results"].as_array().unwrap().len(), 2);
    assert_eq!(v["inputs"]["flags"]["seed"], 99);
}

#[test]
fn seed_env_var_sets_default() {
    let args = ["simulate", "--sizes", "20", "--reps", "20"];
    let env = cel().args(args).env("CEL_SEED", "4242").output().unwrap();
    let flag = run(&[&args[..], &["--seed", "4242"]].concat());
    let default = run(&args);
    assert_eq!(env.stdout, flag.stdout);
    assert_ne!(env.stdout, default.stdout);
}

#[test]
fn simulate_csv() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("sim.csv");
    ok_json(&["simulate", "--sizes", "20,30", "--reps", "20", "--csv", p.to_str().unwrap()]);
    let text = std::fs::read_to_string(p).unwrap();
    assert_eq!(text.lines().count(), 3);
    assert!(text.starts_with("n,replications,bias,mse"));
}

fn scalar(args: &[&str]) -> f64 {
    ok_json(args)["results"]["value"].as_f64().unwrap()
}

#[test]
fn eval_median_and_quantile() {
    let m = scalar(&["eval", "--fn", "median", "--theta", "2"]);
    // Closed form 2(√10 − 1)/3 at θ = 2.
    let exact = 2.0 * (10f64.sqrt() - 1.0) / 3.0;
    assert!(close(m, exact, 1e-13), "{m}");
    assert!(close(m, 1.44151844, 1e-8));
    let v = ok_json(&["eval", "--fn", "quantile", "--theta", "2", "--u", "0.5"]);
    assert_eq!(v["results"][0]["value"].as_f64().unwrap(), m);
}

#[test]
fn eval_renyi() {
    let r = scalar(&["eval", "--fn", "renyi", "--theta", "1", "--order", "2"]);
    // Reference is quoted to seven decimals.
    assert!(close(r, 0.6286085, 5e-7), "{r}");
}

#[test]
fn eval_moment_nonexistence() {
    let o = run(&["eval", "--fn", "moment", "--theta", "1", "--r", "1"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("moment does not exist for r ≥ 1"), "{}", stderr(&o));
    let m = scalar(&["eval", "--fn", "moment", "--theta", "1", "--r", "0.5"]);
    assert!(m > 0.0 && m.is_finite());
}

#[test]
fn eval_pointwise_functions() {
    for f in ["pdf", "cdf", "survival", "hazard", "cum-hazard"] {
        let v = ok_json(&["eval", "--fn", f, "--theta", "2", "--x", "0.5,1,4"]);
        assert_eq!(v["results"].as_array().unwrap().len(), 3, "{f}");
    }
    let v = ok_json(&["eval", "--fn", "cdf", "--theta", "2", "--x", "0"]);
    assert_eq!(v["results"][0]["value"], 0.0);
    let v = ok_json(&["eval", "--fn", "char-fn", "--theta", "1", "--x=-1,0,1"]);
    let r = v["results"].as_array().unwrap();
    assert_eq!(r[0]["re"], r[2]["re"]);
    assert_eq!(r[0]["im"].as_f64().unwrap(), -r[2]["im"].as_f64().unwrap());
    assert!(close(r[1]["re"].as_f64().unwrap(), 1.0, 1e-12));
    ok_json(&["eval", "--fn", "truncated-mean", "--theta", "1", "--x", "100,10000"]);
    ok_json(&["eval", "--fn", "order-stat", "--theta", "1", "--r", "3", "--n", "5", "--x", "0.5,2"]);
    for f in ["bowley", "moors", "tsallis"] {
        let mut args = vec!["eval", "--fn", f, "--theta", "3"];
        if f == "tsallis" {
            args.extend(["--order", "3"]);
        }
        assert!(scalar(&args).is_finite(), "{f}");
    }
}

#[test]
fn eval_sample_is_seeded() {
    let a = ok_json(&["eval", "--fn", "sample", "--theta", "2", "--n", "25", "--seed", "3"]);
    let b = ok_json(&["eval", "--fn", "sample", "--theta", "2", "--n", "25", "--seed", "3"]);
    assert_eq!(a, b);
    assert_eq!(a["results"]["values"].as_array().unwrap().len(), 25);
}

#[test]
fn eval_domain_errors_exit_2() {
    let cases: [&[&str]; 7] = [
        &["eval", "--fn", "pdf", "--theta", "-1", "--x", "1"],
        &["eval", "--fn", "pdf", "--theta", "1"],
        &["eval", "--fn", "quantile", "--theta", "1", "--u", "1.5"],
        &["eval", "--fn", "renyi", "--theta", "1", "--order", "0.25"],
        &["eval", "--fn", "renyi", "--theta", "1"],
        &["eval", "--fn", "order-stat", "--theta", "1", "--r", "6", "--n", "5", "--x", "1"],
        &["eval", "--fn", "sample", "--theta", "1", "--n", "0"],
    ];
    for args in cases {
        let o = run(args);
        assert_eq!(code(&o), 2, "{args:?}: {}", stderr(&o));
        assert!(!stderr(&o).is_empty());
    }
}

#[test]
fn help_exits_0() {
    assert_eq!(code(&run(&["--help"])), 0);
    assert_eq!(code(&run(&["eval", "--help"])), 0);
}
