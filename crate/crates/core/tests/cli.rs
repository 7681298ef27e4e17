use std::ffi::OsString;
use std::path::{Path, PathBuf};

use spd_raga::cli::run;

fn spd(args: &[&dyn AsRef<std::ffi::OsStr>]) -> (i32, String) {
    let argv: Vec<OsString> = std::iter::once(OsString::from("spd"))
        .chain(args.iter().map(|a| a.as_ref().to_os_string()))
        .collect();
    let mut out = Vec::new();
    let code = run(argv, &mut out);
    (code, String::from_utf8(out).unwrap())
}

fn synth(dir: &Path, recordings: &str) -> PathBuf {
    let (code, out) = spd(&[&"synth", &"--out", &dir, &"--recordings", &recordings, &"--frames", &"1500"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("wrote"));
    dir.join("manifest.csv")
}

#[test]
fn synth_writes_manifest_and_files() {
    let tmp = tempfile::tempdir().unwrap();
    let manifest = synth(tmp.path(), "2");
    let text = std::fs::read_to_string(&manifest).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("id,pitch_path,tonic_path,label,tradition"));
    assert_eq!(lines.count(), 6 * 2);
    assert!(tmp.path().join("pitch/cycle_up_000.tsv").is_file());
    assert!(tmp.path().join("tonic/minor_001.tonic").is_file());
}

#[test]
fn synth_accepts_grammar_files() {
    let tmp = tempfile::tempdir().unwrap();
    let g1 = tmp.path().join("a.grammar");
    let g2 = tmp.path().join("b.grammar");
    std::fs::write(&g1, "name = a\nscale = 0 40 70\nascent = 0>40 40>70 70>0\ndescent = 0>70 70>40 40>0\n").unwrap();
    std::fs::write(&g2, "name = b\nscale = 0 30 80\nascent = 0>30 30>80 80>0\ndescent = 0>80 80>30 30>0\n").unwrap();
    let out_dir = tmp.path().join("corpus");
    let (code, _) = spd(&[&"synth", &"--out", &out_dir, &"--grammar", &g1, &"--grammar", &g2, &"--recordings", &"3"]);
    assert_eq!(code, 0);
    let text = std::fs::read_to_string(out_dir.join("manifest.csv")).unwrap();
    assert_eq!(text.lines().count(), 1 + 6);
    assert!(text.contains(",b,"));
}

#[test]
fn train_then_predict() {
    let tmp = tempfile::tempdir().unwrap();
    let manifest = synth(&tmp.path().join("corpus"), "4");
    let store = tmp.path().join("store");
    let (code, out) = spd(&[&"train", &"--manifest", &manifest, &"--out", &store]);
    assert_eq!(code, 0, "{out}");
    for f in ["manifest.csv", "labels.txt", "weights.txt", "config.txt", "features/skip_descent_002.spd"] {
        assert!(store.join(f).is_file(), "{f}");
    }

    let pitch = tmp.path().join("corpus/pitch/step_descent_001.tsv");
    let tonic = tmp.path().join("corpus/tonic/step_descent_001.tonic");
    let (code, out) = spd(&[&"predict", &"--pitch", &pitch, &"--tonic", &tonic, &"--model", &store]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "label: step_descent");
    assert_eq!(lines.len(), 6);
    let probs: Vec<f64> = lines[1..]
        .iter()
        .map(|l| l.split('\t').nth(1).unwrap().parse().unwrap())
        .collect();
    assert!(probs.windows(2).all(|w| w[0] >= w[1]));
    assert!(lines[1].starts_with("step_descent\t"));
}

#[test]
fn predict_with_missing_store_is_a_data_error() {
    let tmp = tempfile::tempdir().unwrap();
    let missing = tmp.path().join("nope");
    let (code, _) = spd(&[&"predict", &"--pitch", &missing, &"--tonic", &missing, &"--model", &missing]);
    assert_eq!(code, 2);
}

#[test]
fn extract_fills_cache_and_is_idempotent() {
    let tmp = tempfile::tempdir().unwrap();
    let manifest = synth(&tmp.path().join("corpus"), "1");
    let cache = tmp.path().join("cache");
    let (code, out) = spd(&[&"--cache-dir", &cache, &"extract", &"--manifest", &manifest]);
    assert_eq!(code, 0, "{out}");
    let listing = |dir: &Path| {
        let mut v: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
            .unwrap()
            .map(|e| {
                let e = e.unwrap();
                (e.file_name().into_string().unwrap(), std::fs::read(e.path()).unwrap())
            })
            .collect();
        v.sort();
        v
    };
    let first = listing(&cache);
    assert_eq!(first.len(), 6);
    let (code, _) = spd(&[&"--cache-dir", &cache, &"extract", &"--manifest", &manifest]);
    assert_eq!(code, 0);
    assert_eq!(listing(&cache), first);

    // a different r is a different cache entry
    let (code, _) = spd(&[&"--cache-dir", &cache, &"--r", &"2", &"extract", &"--manifest", &manifest]);
    assert_eq!(code, 0);
    assert_eq!(listing(&cache).len(), 12);
}

#[test]
fn evaluate_writes_reports() {
    let tmp = tempfile::tempdir().unwrap();
    let manifest = synth(&tmp.path().join("corpus"), "4");
    let report = tmp.path().join("report");
    let (code, out) = spd(&[
        &"evaluate", &"--manifest", &manifest, &"--r", &"4", &"--k", &"3", &"--metric", &"db", &"--out", &report, &"--svg",
    ]);
    assert_eq!(code, 0);
    assert!(out.starts_with("accuracy: "), "{out}");
    let predictions = std::fs::read_to_string(report.join("predictions.csv")).unwrap();
    assert!(predictions.starts_with("id,true_label,predicted_label,correct,p_cycle_down,"));
    assert_eq!(predictions.lines().count(), 25);
    let confusion = std::fs::read_to_string(report.join("confusion.csv")).unwrap();
    assert_eq!(confusion.lines().count(), 7);
    assert_eq!(std::fs::read_to_string(report.join("weights.txt")).unwrap().lines().count(), 25);
    assert!(std::fs::read_to_string(report.join("confusion.svg")).unwrap().starts_with("<svg"));
}

#[test]
fn sweep_prints_table_columns() {
    let tmp = tempfile::tempdir().unwrap();
    let manifest = synth(&tmp.path().join("corpus"), "3");
    let (code, out) = spd(&[&"sweep", &"--manifest", &manifest]);
    assert_eq!(code, 0);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("k1,k3,k5,k7,L1,DB,r0,r2,r4"));
    let values: Vec<f64> = lines.next().unwrap().split(',').map(|v| v.parse().unwrap()).collect();
    assert_eq!(values.len(), 9);
    assert!(values.iter().all(|v| (0.0..=100.0).contains(v)));
}

#[test]
fn analyze_writes_scores() {
    let tmp = tempfile::tempdir().unwrap();
    let manifest = synth(&tmp.path().join("corpus"), "2");
    let dir = tmp.path().join("analysis");
    let (code, out) = spd(&[&"analyze", &"--manifest", &manifest, &"--out", &dir, &"--svg"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 6);
    let csv = std::fs::read_to_string(dir.join("asymmetry.csv")).unwrap();
    assert!(csv.starts_with("label,recordings,asymmetry"));
    assert!(dir.join("asymmetry.svg").is_file());
}

#[test]
fn usage_errors_exit_1() {
    assert_eq!(spd(&[&"bogus"]).0, 1);
    assert_eq!(spd(&[&"evaluate"]).0, 1);
    assert_eq!(spd(&[&"evaluate", &"--manifest", &"m.csv", &"--frobnicate"]).0, 1);
    assert_eq!(spd(&[&"--r", &"9", &"evaluate", &"--manifest", &"m.csv"]).0, 1);
    assert_eq!(spd(&[&"--k", &"0", &"evaluate", &"--manifest", &"m.csv"]).0, 1);
    assert_eq!(spd(&[&"--metric", &"cosine", &"evaluate", &"--manifest", &"m.csv"]).0, 1);
}

#[test]
fn config_file_settings_apply() {
    let tmp = tempfile::tempdir().unwrap();
    let manifest = synth(&tmp.path().join("corpus"), "3");
    let cfg = tmp.path().join("run.conf");
    std::fs::write(&cfg, "r = 2\nk = 1\nmetric = l1\n").unwrap();
    let (code, out) = spd(&[&"--config", &cfg, &"evaluate", &"--manifest", &manifest, &"--out", &tmp.path().join("r")]);
    assert_eq!(code, 0);
    assert!(out.contains("r=2 k=1 metric=L1"), "{out}");
    let (_, out) = spd(&[&"--config", &cfg, &"--k", &"3", &"evaluate", &"--manifest", &manifest, &"--out", &tmp.path().join("r")]);
    assert!(out.contains("k=3"), "{out}");
}
