mod common;

use std::path::Path;
use std::process::{Command, Output};

use polishkrige::predictor::grid_from_fn;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_polishkrige"));
    c.env_remove("POLISHKRIGE_DATA");
    c
}

fn run(args: &[&str], cwd: &Path) -> Output {
    bin().args(args).current_dir(cwd).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

fn constant_csv() -> String {
    let g = grid_from_fn(common::unit_lattice(3, 3), |_| Some(7.0)).unwrap();
    common::csv_from_table(&g)
}

#[test]
fn duplicate_rows_fail_with_category() {
    let dir = tempfile::tempdir().unwrap();
    let csv = write(dir.path(), "dup.csv", "x,y,z\n0,0,1\n1,0,2\n0,0,3\n1,1,4\n0,1,5\n");
    let o = run(&["fit", &csv, "--out", "m.txt"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("error: duplicate-location:"), "{}", stderr(&o));
}

#[test]
fn constant_data_fits_with_degenerate_warning() {
    let dir = tempfile::tempdir().unwrap();
    let csv = write(dir.path(), "c.csv", &constant_csv());
    let o = run(&["fit", &csv, "--out", "m.txt"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("degenerate-variogram"), "{out}");
    assert!(out.contains("nugget=") && out.contains("sill=") && out.contains("range="));
    assert!(out.contains("sweeps"));
}

#[test]
fn constant_model_surface_is_constant() {
    let dir = tempfile::tempdir().unwrap();
    let csv = write(dir.path(), "c.csv", &constant_csv());
    for method in ["mpk", "impk"] {
        let o = run(&["fit", &csv, "--out", "m.txt", "--method", method], dir.path());
        assert!(o.status.success());
        let o = run(
            &["surface", "m.txt", "--resolution", "10x10", "--out", "g.csv", "--variance-out", "v.csv"],
            dir.path(),
        );
        assert!(o.status.success(), "{}", stderr(&o));
        let text = std::fs::read_to_string(dir.path().join("g.csv")).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("x,y,value"));
        let rows: Vec<&str> = lines.collect();
        assert_eq!(rows.len(), 100);
        assert!(rows.iter().all(|r| r.ends_with(",7.000000")), "{method}");
        assert!(text.ends_with('\n'));
        let var = std::fs::read_to_string(dir.path().join("v.csv")).unwrap();
        assert_eq!(var.lines().count(), 101);
    }
}

#[test]
fn two_by_two_surface_hits_bounding_box_corners() {
    let dir = tempfile::tempdir().unwrap();
    let csv = write(dir.path(), "a.csv", &common::csv_from_table(&common::additive_table(4, 5)));
    assert!(run(&["fit", &csv, "--out", "m.txt"], dir.path()).status.success());
    let o = run(&["surface", "m.txt", "--resolution", "2x2", "--out", "g.csv", "--pgm"], dir.path());
    assert!(o.status.success());
    let text = std::fs::read_to_string(dir.path().join("g.csv")).unwrap();
    let corners: Vec<(String, String)> = text
        .lines()
        .skip(1)
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[0].to_string(), f[1].to_string())
        })
        .collect();
    let want = [("0.000000", "0.000000"), ("4.000000", "0.000000"), ("0.000000", "3.000000"), ("4.000000", "3.000000")];
    assert_eq!(corners.len(), 4);
    for ((x, y), (wx, wy)) in corners.iter().zip(want) {
        assert_eq!((x.as_str(), y.as_str()), (wx, wy));
    }
    let pgm = std::fs::read_to_string(dir.path().join("g.pgm")).unwrap();
    assert!(pgm.starts_with("P2\n2 2\n255\n"));
    assert!(pgm.ends_with('\n'));
}

#[test]
fn additive_grid_cv_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    let csv = write(dir.path(), "a.csv", &common::csv_from_table(&common::additive_table(5, 6)));
    let o = run(&["cv", &csv, "--method", "mpk"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.starts_with("x,y,observed,predicted,error\n"));
    assert_eq!(out.lines().last(), Some("RMSE,MPK,0.000000"));
    assert_eq!(out.lines().count(), 1 + 30 + 1);
}

#[test]
fn cv_both_prints_comparison_and_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    let synth = common::synthetic_path();
    let synth = synth.to_str().unwrap();
    let o = run(&["cv", synth, "--both", "--out", "cv.csv", "--freeze-variogram"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let table = stdout(&o);
    let lines: Vec<&str> = table.lines().collect();
    assert_eq!(lines[0], "method,rmse,folds,skipped");
    assert!(lines[1].starts_with("MPK,") && lines[2].starts_with("IMPK,"));
    for m in ["mpk", "impk"] {
        let r = std::fs::read_to_string(dir.path().join(format!("cv_{m}.csv"))).unwrap();
        assert!(r.lines().last().unwrap().starts_with(&format!("RMSE,{},", m.to_uppercase())));
    }
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let synth = common::synthetic_path();
    let synth = synth.to_str().unwrap();
    let mut seen = Vec::new();
    for i in 0..2 {
        let model = format!("m{i}.txt");
        let grid = format!("g{i}.csv");
        let cv = format!("cv{i}.csv");
        assert!(run(&["fit", synth, "--out", &model], dir.path()).status.success());
        assert!(run(&["surface", &model, "--resolution", "12x9", "--out", &grid, "--pgm"], dir.path())
            .status
            .success());
        assert!(run(&["cv", synth, "--method", "mpk", "--out", &cv], dir.path()).status.success());
        let read = |n: &str| std::fs::read(dir.path().join(n)).unwrap();
        seen.push((read(&model), read(&grid), read(&format!("g{i}.pgm")), read(&cv)));
    }
    assert!(seen[0] == seen[1]);
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let csv = write(dir.path(), "a.csv", &common::csv_from_table(&common::random_table(&mut common::rng(9), 6, 6, 0.0)));
    let cfg = write(dir.path(), "run.cfg", "# settings\nmethod = mpk\nvariogram = gaussian\nbins = 8\n");
    let o = run(&["--config", &cfg, "fit", &csv, "--out", "m.txt", "--variogram", "exponential"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("method: MPK"), "{out}");
    assert!(out.contains("variogram: exponential"), "{out}");
    let model = std::fs::read_to_string(dir.path().join("m.txt")).unwrap();
    assert!(model.contains("n_bins = 8"), "{model}");
}

#[test]
fn usage_and_domain_errors_have_distinct_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(&["fit"], dir.path()).status.code(), Some(2));
    assert_eq!(run(&["cv", "x.csv", "--method", "kriging"], dir.path()).status.code(), Some(2));
    assert_eq!(run(&["surface", "m.txt", "--out", "g.csv", "--resolution", "1x9"], dir.path()).status.code(), Some(1));
    let bad = write(dir.path(), "bad.txt", "not a model\n");
    let o = run(&["surface", &bad, "--out", "g.csv"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("error: bad-model:"), "{}", stderr(&o));
    let cfg = write(dir.path(), "bad.cfg", "colour = blue\n");
    let o = run(&["--config", &cfg, "cv", "x.csv"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("error: invalid-argument:"));
}

#[test]
fn truncated_model_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let csv = write(dir.path(), "c.csv", &constant_csv());
    assert!(run(&["fit", &csv, "--out", "m.txt"], dir.path()).status.success());
    let full = std::fs::read_to_string(dir.path().join("m.txt")).unwrap();
    write(dir.path(), "cut.txt", &full[..full.len() / 2]);
    let o = run(&["surface", "cut.txt", "--out", "g.csv"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("error: bad-model:"));
}

#[test]
fn inputs_resolve_through_data_directory() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("sets");
    std::fs::create_dir(&data).unwrap();
    write(&data, "c.csv", &constant_csv());
    let o = bin()
        .args(["fit", "c.csv", "--out", "m.txt"])
        .current_dir(dir.path())
        .env("POLISHKRIGE_DATA", &data)
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    std::fs::create_dir(dir.path().join("data")).unwrap();
    write(&dir.path().join("data"), "d.csv", &constant_csv());
    assert!(run(&["fit", "d.csv", "--out", "m2.txt"], dir.path()).status.success());
}

// Both methods krige the same median-polish residuals with the same
// variogram, and the reported variance is the kriging variance alone, so
// the variance maps coincide while the value maps differ.
#[test]
fn methods_share_variance_maps_but_not_surfaces() {
    let dir = tempfile::tempdir().unwrap();
    let synth = common::synthetic_path();
    let p = synth.to_str().unwrap();
    for m in ["mpk", "impk"] {
        let model = format!("{m}.txt");
        assert!(run(&["fit", p, "--method", m, "--out", &model], dir.path()).status.success());
        let (val, var) = (format!("{m}_val.csv"), format!("{m}_var.csv"));
        assert!(run(&["surface", &model, "--resolution", "40x30", "--out", &val, "--variance-out", &var], dir.path())
            .status
            .success());
    }
    let read = |n: &str| std::fs::read(dir.path().join(n)).unwrap();
    assert_ne!(read("mpk_val.csv"), read("impk_val.csv"));
    assert_eq!(read("mpk_var.csv"), read("impk_var.csv"));
}
