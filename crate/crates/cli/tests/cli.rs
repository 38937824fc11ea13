use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn reid(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_reid")).args(args).output().unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = reid(args);
    assert!(out.status.success(), "reid {args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn synth_then_evaluate_writes_cmc_csv() {
    let tmp = tempfile::tempdir().unwrap();
    let (data, out) = (tmp.path().join("data"), tmp.path().join("out"));
    ok(&["synth", "-o", p(&data), "--set", "identities=8"]);
    let table = ok(&[
        "evaluate", "-f", p(&data.join("x.feat")), "-f", p(&data.join("y.feat")),
        "-l", p(&data.join("labels.csv")), "-o", p(&out), "--trials", "2",
    ]);
    assert!(table.contains("| Dim. | Rank-1 |"));
    let cmc = fs::read_to_string(out.join("cmc.csv")).unwrap();
    assert!(cmc.starts_with("feature_set,dim,rank,mean,std\n"));
    assert!(cmc.lines().any(|l| l.starts_with("x+y,auto,1,")));
    assert_eq!(fs::read_dir(out.join("trials")).unwrap().count(), 2);
    let summary: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["config"]["trials"], 2);
    assert!(!out.join("cmc_plot.csv").exists());
}

#[test]
fn fuse_reports_indivisible_dimension() {
    let tmp = tempfile::tempdir().unwrap();
    let feat = tmp.path().join("a.feat");
    let labels = tmp.path().join("labels.csv");
    fs::write(&feat, "#FEAT v1 d=6 m=2\n1,2,3,4,5,6\n6,5,4,3,2,1\n").unwrap();
    fs::write(&labels, "s0,p0,1\ns1,p0,2\n").unwrap();
    let out = reid(&["fuse", "-f", p(&feat), "-l", p(&labels), "-o", p(&tmp.path().join("t.tsr")), "--parts", "4"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("d=6") && err.contains("n=4"), "{err}");
    assert!(!tmp.path().join("t.tsr").exists());
}

#[test]
fn separable_data_scores_perfectly() {
    let tmp = tempfile::tempdir().unwrap();
    let (data, out) = (tmp.path().join("data"), tmp.path().join("out"));
    ok(&["synth", "-o", p(&data), "--set", "noise=0", "--set", "view_offset=0"]);
    let table = ok(&[
        "evaluate", "-f", p(&data.join("x.feat")), "-f", p(&data.join("y.feat")),
        "-l", p(&data.join("labels.csv")), "-o", p(&out), "--trials", "10",
    ]);
    for row in table.lines().skip(3) {
        let cells: Vec<&str> = row.trim_matches('|').split('|').map(str::trim).collect();
        assert_eq!(cells[1], "100.00", "{row}");
    }
}

#[test]
fn fuse_train_transform_rank_pipeline() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    ok(&["synth", "-o", p(&d.join("data")), "--set", "identities=10"]);
    let data = d.join("data");
    let fused = d.join("fused.tsr");
    ok(&["fuse", "-f", p(&data.join("x.feat")), "-f", p(&data.join("y.feat")), "-l", p(&data.join("labels.csv")), "-o", p(&fused)]);
    let sidecar: serde_json::Value = serde_json::from_str(&fs::read_to_string(d.join("fused.tsr.json")).unwrap()).unwrap();
    assert_eq!(sidecar["n_parts"], 4);
    assert_eq!(sidecar["normalize"], true);
    assert_eq!(sidecar["dims"], serde_json::json!([24, 4, 40]));
    assert_eq!(sidecar["blocks"][0]["tag"], "x");
    assert_eq!(sidecar["blocks"][1]["d"], 32);

    let model = d.join("model.txqm");
    ok(&["train", "-t", p(&fused), "-l", p(&data.join("labels.csv")), "-o", p(&model), "--dims", "6x3"]);
    let projected = d.join("proj.tsr");
    ok(&["transform", "-m", p(&model), "-t", p(&fused), "-o", p(&projected)]);

    // Gallery is camera 1 and probes camera 2 of the same projected tensor.
    let t = reid_core::io::load_tensor(&projected).unwrap();
    assert_eq!(&t.dims()[..2], &[6, 3]);
    let labels = reid_core::io::load_labels(&data.join("labels.csv")).unwrap();
    let pick = |cam: &str| -> Vec<usize> { (0..labels.len()).filter(|&i| labels[i].camera_id == cam).collect() };
    for (cam, name) in [("1", "gallery"), ("2", "probes")] {
        let idx = pick(cam);
        reid_core::io::save_tensor(&d.join(format!("{name}.tsr")), &t.select_slices(&idx).unwrap()).unwrap();
        let ls: Vec<_> = idx.iter().map(|&i| labels[i].clone()).collect();
        let mut buf = Vec::new();
        reid_core::io::write_labels(&mut buf, &ls).unwrap();
        fs::write(d.join(format!("{name}.csv")), buf).unwrap();
    }
    let out = d.join("rank");
    let stdout = ok(&[
        "rank", "--gallery", p(&d.join("gallery.tsr")), "--gallery-labels", p(&d.join("gallery.csv")),
        "--probes", p(&d.join("probes.tsr")), "--probe-labels", p(&d.join("probes.csv")), "-o", p(&out), "--emit-plot-data",
    ]);
    assert!(stdout.starts_with("Rank-1: "));
    let ranking = fs::read_to_string(out.join("ranking.csv")).unwrap();
    assert_eq!(ranking.lines().next(), Some("probe_id,rank,gallery_id,score"));
    assert_eq!(ranking.lines().count(), 1 + 20 * 20);
    let cmc = fs::read_to_string(out.join("cmc.csv")).unwrap();
    assert_eq!(cmc.lines().next(), Some("rank,probability"));
    assert!(cmc.trim_end().ends_with(",1"));
    let plot = fs::read_to_string(out.join("cmc_plot.csv")).unwrap();
    assert_eq!(plot.lines().count(), 1 + 20);
}

#[test]
fn usage_and_missing_inputs_exit_one() {
    assert_eq!(reid(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(reid(&["train", "-t", "/nonexistent.tsr", "-l", "/nonexistent.csv", "-o", "m"]).status.code(), Some(1));
    assert_eq!(reid(&["synth", "-o", "/tmp/never", "--set", "bogus=1"]).status.code(), Some(1));
    assert_eq!(reid(&["--help"]).status.code(), Some(0));
    let v = ok(&["--version"]);
    assert!(v.starts_with("reid ") && v.contains('('));
}

#[test]
fn config_file_and_overrides_combine() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    fs::write(d.join("spec.toml"), "identities = 6\nsamples_per_view = 1\nseed = 3\n").unwrap();
    ok(&["synth", "-o", p(&d.join("data")), "-c", p(&d.join("spec.toml")), "--set", "dims=[16, 8]"]);
    let x = fs::read_to_string(d.join("data/x.feat")).unwrap();
    assert!(x.starts_with("#FEAT v1 d=16 m=12\n"));
    fs::write(
        d.join("exp.toml"),
        "trials = 2\nranks = [1, 2]\n[txqda]\nmax_iters = 2\n[[feature_sets]]\nname = \"both\"\nblocks = [\"x\", \"y\"]\n",
    )
    .unwrap();
    let table = ok(&[
        "evaluate", "-f", p(&d.join("data/x.feat")), "-f", p(&d.join("data/y.feat")), "-l", p(&d.join("data/labels.csv")),
        "-c", p(&d.join("exp.toml")), "--set", "txqda.target_dims=[2, 2]", "-o", p(&d.join("out")),
    ]);
    assert!(table.starts_with("| | both | |"));
    assert!(table.contains("| Dim. | Rank-1 | Rank-2 |"));
    assert!(table.contains("| 2x2 |"));
}

#[test]
fn numeric_failures_exit_three() {
    // Identical samples everywhere with no ridge leave a singular denominator.
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    let t = reid_core::DenseTensor3::zeros([2, 1, 4]);
    reid_core::io::save_tensor(&d.join("t.tsr"), &t).unwrap();
    fs::write(d.join("l.csv"), "a,p,1\nb,p,2\nc,q,1\nd,q,2\n").unwrap();
    let out = reid(&["train", "-t", p(&d.join("t.tsr")), "-l", p(&d.join("l.csv")), "-o", p(&d.join("m")), "--lambda", "0"]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stderr).contains("lambda"));
}
