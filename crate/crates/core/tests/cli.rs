use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use qfmap::{datasets, SvmModel};

fn qfmap(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qfmap"))
        .args(args)
        .current_dir(dir)
        .output()
        .unwrap()
}

#[test]
fn heatmap_all_writes_sixteen_grids() {
    let dir = tempfile::tempdir().unwrap();
    let out = qfmap(dir.path(), &["heatmap", "--axis", "all", "--resolution", "7", "--out", "g"]);
    assert!(out.status.success());
    let mut names: Vec<String> = fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    names.sort();
    assert_eq!(names.len(), 16);
    assert!(names.contains(&"g_ZZ.csv".to_string()));
    let ii = fs::read_to_string(dir.path().join("g_II.csv")).unwrap();
    assert_eq!(ii.lines().count(), 7);
    assert!(ii.split([',', '\n']).filter(|s| !s.is_empty()).all(|v| v == "0.25"));
}

#[test]
fn single_axis_heatmap_with_image() {
    let dir = tempfile::tempdir().unwrap();
    let out = qfmap(dir.path(), &["heatmap", "--axis", "ZI", "--resolution", "5", "--out", "p", "--pgm"]);
    assert!(out.status.success());
    let pgm = fs::read(dir.path().join("p_ZI.pgm")).unwrap();
    assert!(pgm.starts_with(b"P5\n5 5\n255\n"));
    assert!(!dir.path().join("p_ZZ.csv").exists());
}

#[test]
fn usage_and_validation_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec!["kernel", "--kind", "xor", "--method", "magic"],
        vec!["gen", "circle", "--n", "7"],
        vec!["screen"],
        vec!["heatmap", "--axis", "QQ"],
        vec!["train", "--kind", "moon", "--encoding", "custom"],
        vec!["kernel", "--kind", "xor", "--custom-phi12", "x1 +* x2"],
    ] {
        let out = qfmap(dir.path(), &args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert!(!out.stderr.is_empty());
        assert!(out.stdout.is_empty(), "{args:?}");
    }
}

#[test]
fn non_finite_encoding_is_a_numerical_failure() {
    let dir = tempfile::tempdir().unwrap();
    let out = qfmap(dir.path(), &["kernel", "--kind", "xor", "--n-points", "10", "--custom-phi12", "ln(x1 - x1)"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("phi12"));
}

#[test]
fn gen_then_train_from_file_and_reload_model() {
    let dir = tempfile::tempdir().unwrap();
    assert!(qfmap(dir.path(), &["gen", "circle", "--n", "40", "--seed", "2", "--out", "d.csv"]).status.success());
    let ds = datasets::from_csv::<f64>(&fs::read_to_string(dir.path().join("d.csv")).unwrap()).unwrap();
    assert_eq!(ds.len(), 40);

    let out = qfmap(
        dir.path(),
        &["train", "--data", "d.csv", "--encoding", "ef2", "--c", "10", "--format", "csv", "--model-out", "m.txt"],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = String::from_utf8(out.stdout).unwrap();
    assert!(csv.lines().any(|l| l.starts_with("mean,")));

    let model = SvmModel::<f64>::from_text(&fs::read_to_string(dir.path().join("m.txt")).unwrap()).unwrap();
    assert_eq!(model.alphas.len(), 40);
    assert_eq!(model.points, ds.points());
    assert!(model.kernel.contains("ef2"));
}

#[test]
fn kernel_dump_is_symmetric_with_unit_diagonal() {
    let dir = tempfile::tempdir().unwrap();
    let out = qfmap(dir.path(), &["kernel", "--kind", "moon", "--n-points", "6", "--method", "shots", "--shots", "300"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "method=shots,shots=300,seed=0,size=6");
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    for i in 0..6 {
        assert_eq!(rows[i][i], 1.0);
        for j in 0..6 {
            assert_eq!(rows[i][j], rows[j][i]);
        }
    }
}

#[test]
fn screen_text_lists_every_default_encoding() {
    let dir = tempfile::tempdir().unwrap();
    let out = qfmap(dir.path(), &["screen", "--kind", "circle"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for id in ["ef1", "ef2", "ef3", "ef4", "ef5"] {
        assert!(text.lines().any(|l| l.starts_with(id) && l.contains("ZZ")), "{text}");
    }
}
