#![allow(dead_code)]

pub mod oracle;

use std::path::PathBuf;

use polishkrige::spatial::CsvOptions;
use polishkrige::{load_observations_csv, to_grid, GridLattice, GridTable};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const COAL_ASH_FILE: &str = "coal_ash.csv";

pub fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

/// Coal-ash CSV from `$POLISHKRIGE_DATA` or the repository `data/` dir.
pub fn coal_ash_path() -> Option<PathBuf> {
    let mut candidates = Vec::new();
    if let Some(dir) = std::env::var_os("POLISHKRIGE_DATA") {
        candidates.push(PathBuf::from(dir).join(COAL_ASH_FILE));
    }
    candidates.push(data_dir().join(COAL_ASH_FILE));
    candidates.into_iter().find(|p| p.is_file())
}

pub fn coal_ash_grid() -> Option<GridTable> {
    let path = coal_ash_path()?;
    let scatter = load_observations_csv(&path, &CsvOptions::default()).expect("coal-ash csv loads");
    let tol = polishkrige::spatial::default_snap_tolerance(&scatter);
    Some(to_grid(&scatter, tol).expect("coal-ash csv is gridded"))
}

pub fn synthetic_path() -> PathBuf {
    data_dir().join("synthetic_incomplete_grid.csv")
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Integer-spaced lattice, `p` rows by `q` columns.
pub fn unit_lattice(p: usize, q: usize) -> GridLattice {
    GridLattice::new((0..q).map(|l| l as f64).collect(), (0..p).map(|k| k as f64).collect()).unwrap()
}

/// Random table; with `missing` set, about that fraction of cells is
/// dropped while every row and column keeps at least one value.
pub fn random_table(rng: &mut ChaCha8Rng, p: usize, q: usize, missing: f64) -> GridTable {
    let lattice = unit_lattice(p, q);
    loop {
        let cells: Vec<Option<f64>> = (0..p * q)
            .map(|_| {
                if rng.gen::<f64>() < missing {
                    None
                } else {
                    Some(rng.gen_range(-50.0..50.0))
                }
            })
            .collect();
        if let Ok(grid) = GridTable::new(lattice.clone(), cells) {
            return grid;
        }
    }
}

pub fn additive_table(p: usize, q: usize) -> GridTable {
    let lattice = unit_lattice(p, q);
    let cells = (0..p)
        .flat_map(|k| (0..q).map(move |l| Some(3.0 + 2.0 * k as f64 - 0.5 * l as f64)))
        .collect();
    GridTable::new(lattice, cells).unwrap()
}

pub fn csv_from_table(grid: &GridTable) -> String {
    let mut out = String::from("x,y,z\n");
    for (k, l, v) in grid.iter_present() {
        let s = grid.lattice().node(k, l);
        out.push_str(&format!("{},{},{}\n", s.x, s.y, v));
    }
    out
}

/// Largest absolute entry-wise difference relative to `max(1, max |want|)`.
pub fn rel_err(got: &[f64], want: &[f64]) -> f64 {
    assert_eq!(got.len(), want.len());
    let scale = want.iter().fold(1.0f64, |m, w| m.max(w.abs()));
    got.iter().zip(want).fold(0.0f64, |m, (g, w)| m.max((g - w).abs())) / scale
}

pub struct KrigingInstance {
    pub family: polishkrige::VariogramFamily,
    pub nugget: f64,
    pub psill: f64,
    pub range: f64,
    pub observations: Vec<polishkrige::Observation>,
    pub target: polishkrige::Location2D,
}

/// 1 to 6 points in a 10 × 10 square, at least 0.5 apart.
pub fn random_kriging_instance(rng: &mut ChaCha8Rng) -> KrigingInstance {
    use polishkrige::{Location2D, Observation, VariogramFamily};
    let n = rng.gen_range(1..=6);
    let mut observations: Vec<Observation> = Vec::new();
    while observations.len() < n {
        let s = Location2D::new(rng.gen_range(0.0..10.0), rng.gen_range(0.0..10.0));
        if observations.iter().all(|o| o.location.distance(&s) >= 0.5) {
            observations.push(Observation::new(s.x, s.y, rng.gen_range(-10.0..10.0)));
        }
    }
    KrigingInstance {
        family: VariogramFamily::ALL[rng.gen_range(0..3)],
        nugget: if rng.gen_bool(0.3) { 0.0 } else { rng.gen_range(0.0..1.0) },
        psill: rng.gen_range(0.1..5.0),
        range: rng.gen_range(1.0..15.0),
        observations,
        target: Location2D::new(rng.gen_range(-2.0..12.0), rng.gen_range(-2.0..12.0)),
    }
}

/// Runs the library and the exact oracle on one instance; returns
/// (weight error, value error, variance error, |Σλ − 1|).
pub fn compare_with_oracle(inst: &KrigingInstance) -> (f64, f64, f64, f64) {
    use polishkrige::kriging::{ok_predict, ok_solve};
    use polishkrige::{ScatterSet, VariogramModel};
    let scatter = ScatterSet::new(inst.observations.clone()).unwrap();
    let model = VariogramModel::new(inst.family, inst.nugget, inst.psill, inst.range).unwrap();
    let w = ok_solve(&scatter, &model, inst.target).unwrap();
    let pred = ok_predict(&scatter, &model, inst.target).unwrap();
    let exact = oracle::exact_ordinary_kriging(
        inst.family,
        inst.nugget,
        inst.psill,
        inst.range,
        &scatter.locations(),
        &scatter.values(),
        inst.target,
    )
    .expect("oracle system nonsingular");
    let sum: f64 = w.weights.iter().sum();
    let mut got = w.weights.clone();
    got.push(w.lagrange);
    let mut want = exact.weights.clone();
    want.push(exact.lagrange);
    (
        rel_err(&got, &want),
        rel_err(&[pred.value], &[exact.value]),
        rel_err(&[pred.variance], &[exact.variance.max(0.0)]),
        (sum - 1.0).abs(),
    )
}
