//! Observations, lattices and grid tables.
//!
//! Cell and node indices are zero-based throughout. Rows are indexed by the
//! y coordinate (`k`, `0..p`) and columns by the x coordinate (`l`, `0..q`).

use std::path::Path;

use crate::error::{Error, Result};

/// Relative factor applied to the coordinate span to obtain default
/// duplicate and snapping tolerances.
pub const DEFAULT_RELATIVE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Location2D {
    pub x: f64,
    pub y: f64,
}

impl Location2D {
    pub const fn new(x: f64, y: f64) -> Self {
        Location2D { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn distance(&self, other: &Location2D) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observation {
    pub location: Location2D,
    pub value: f64,
}

impl Observation {
    pub const fn new(x: f64, y: f64, value: f64) -> Self {
        Observation {
            location: Location2D::new(x, y),
            value,
        }
    }
}

/// A nonempty set of observations at pairwise distinct locations.
#[derive(Debug, Clone, PartialEq)]
pub struct ScatterSet {
    observations: Vec<Observation>,
}

impl ScatterSet {
    /// Builds a scatter set, rejecting duplicates closer than the default
    /// tolerance (`1e-9` times the coordinate span).
    pub fn new(observations: Vec<Observation>) -> Result<Self> {
        let tol = DEFAULT_RELATIVE_TOLERANCE * coordinate_span(&observations);
        Self::with_tolerance(observations, tol)
    }

    pub fn with_tolerance(observations: Vec<Observation>, tolerance: f64) -> Result<Self> {
        let rows: Vec<usize> = (1..=observations.len()).collect();
        Self::build(observations, tolerance, &rows)
    }

    /// `rows` labels each observation in duplicate-location errors.
    fn build(observations: Vec<Observation>, tolerance: f64, rows: &[usize]) -> Result<Self> {
        if observations.is_empty() {
            return Err(Error::InsufficientData("scatter set is empty".into()));
        }
        for (obs, &row) in observations.iter().zip(rows) {
            if !obs.location.is_finite() || !obs.value.is_finite() {
                return Err(Error::Parse {
                    row,
                    message: "non-finite coordinate or value".into(),
                });
            }
        }
        if let Some((a, b)) = find_duplicate(&observations, tolerance) {
            let loc = observations[a].location;
            return Err(Error::DuplicateLocation {
                x: loc.x,
                y: loc.y,
                first: rows[a],
                second: rows[b],
            });
        }
        Ok(ScatterSet { observations })
    }

    pub fn len(&self) -> usize {
        self.observations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observations.is_empty()
    }

    pub fn observations(&self) -> &[Observation] {
        &self.observations
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Observation> {
        self.observations.iter()
    }

    pub fn locations(&self) -> Vec<Location2D> {
        self.observations.iter().map(|o| o.location).collect()
    }

    pub fn values(&self) -> Vec<f64> {
        self.observations.iter().map(|o| o.value).collect()
    }

    pub fn max_pairwise_distance(&self) -> f64 {
        let obs = &self.observations;
        let mut best = 0.0_f64;
        for i in 0..obs.len() {
            for j in (i + 1)..obs.len() {
                best = best.max(obs[i].location.distance(&obs[j].location));
            }
        }
        best
    }
}

fn coordinate_span(observations: &[Observation]) -> f64 {
    let mut xmin = f64::INFINITY;
    let mut xmax = f64::NEG_INFINITY;
    let mut ymin = f64::INFINITY;
    let mut ymax = f64::NEG_INFINITY;
    for o in observations {
        xmin = xmin.min(o.location.x);
        xmax = xmax.max(o.location.x);
        ymin = ymin.min(o.location.y);
        ymax = ymax.max(o.location.y);
    }
    let span = (xmax - xmin).max(ymax - ymin);
    if span.is_finite() {
        span
    } else {
        0.0
    }
}

/// Returns the first pair (in original order) of observations within
/// `tolerance` of each other.
fn find_duplicate(observations: &[Observation], tolerance: f64) -> Option<(usize, usize)> {
    let mut order: Vec<usize> = (0..observations.len()).collect();
    order.sort_by(|&a, &b| {
        observations[a]
            .location
            .x
            .total_cmp(&observations[b].location.x)
            .then(a.cmp(&b))
    });
    let mut found: Option<(usize, usize)> = None;
    for (pos, &i) in order.iter().enumerate() {
        let li = observations[i].location;
        for &j in &order[pos + 1..] {
            let lj = observations[j].location;
            if lj.x - li.x > tolerance {
                break;
            }
            if li.distance(&lj) <= tolerance {
                let pair = (i.min(j), i.max(j));
                found = Some(match found {
                    Some(prev) if (prev.1, prev.0) <= (pair.1, pair.0) => prev,
                    _ => pair,
                });
            }
        }
    }
    found
}

/// Column mapping and delimiter for [`load_observations_csv`].
#[derive(Debug, Clone, PartialEq)]
pub struct CsvOptions {
    pub x_column: String,
    pub y_column: String,
    pub value_column: String,
    pub delimiter: u8,
}

impl Default for CsvOptions {
    fn default() -> Self {
        CsvOptions {
            x_column: "x".into(),
            y_column: "y".into(),
            value_column: "z".into(),
            delimiter: b',',
        }
    }
}

/// Reads one observation per data row. Row numbers in errors are file line
/// numbers (the header is line 1).
pub fn load_observations_csv(path: impl AsRef<Path>, options: &CsvOptions) -> Result<ScatterSet> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_observations_csv(&bytes, options)
}

pub fn parse_observations_csv(bytes: &[u8], options: &CsvOptions) -> Result<ScatterSet> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(options.delimiter)
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(bytes);

    let headers = reader
        .headers()
        .map_err(|e| Error::Parse {
            row: 1,
            message: e.to_string(),
        })?
        .clone();
    let column = |name: &str| {
        headers.iter().position(|h| h == name).ok_or_else(|| Error::Parse {
            row: 1,
            message: format!("missing column `{name}` in header"),
        })
    };
    let xi = column(&options.x_column)?;
    let yi = column(&options.y_column)?;
    let vi = column(&options.value_column)?;

    let mut observations = Vec::new();
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::Parse {
            row: e.position().map_or(0, |p| p.line() as usize),
            message: e.to_string(),
        })?;
        let row = record.position().map_or(0, |p| p.line() as usize);
        if record.iter().all(str::is_empty) {
            continue;
        }
        let field = |idx: usize, name: &str| -> Result<f64> {
            let raw = record.get(idx).unwrap_or("");
            raw.parse::<f64>().map_err(|_| Error::Parse {
                row,
                message: format!("non-numeric {name} field `{raw}`"),
            })
        };
        observations.push(Observation::new(
            field(xi, &options.x_column)?,
            field(yi, &options.y_column)?,
            field(vi, &options.value_column)?,
        ));
        rows.push(row);
    }
    let tol = DEFAULT_RELATIVE_TOLERANCE * coordinate_span(&observations);
    ScatterSet::build(observations, tol, &rows)
}

/// Which side of the lattice a coordinate falls on along one axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AxisSide {
    Below,
    Inside,
    Above,
}

/// Result of [`GridLattice::cell_containing`]. `col` and `row` index the
/// lower-left node of the designated cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CellLocation {
    pub col: usize,
    pub row: usize,
    pub x_side: AxisSide,
    pub y_side: AxisSide,
}

impl CellLocation {
    pub fn is_inside(&self) -> bool {
        self.x_side == AxisSide::Inside && self.y_side == AxisSide::Inside
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridLattice {
    x_coords: Vec<f64>,
    y_coords: Vec<f64>,
}

impl GridLattice {
    pub fn new(x_coords: Vec<f64>, y_coords: Vec<f64>) -> Result<Self> {
        for (name, coords) in [("x", &x_coords), ("y", &y_coords)] {
            if coords.len() < 2 {
                return Err(Error::InvalidGrid(format!(
                    "need at least 2 distinct {name} coordinates, got {}",
                    coords.len()
                )));
            }
            if coords.iter().any(|c| !c.is_finite()) {
                return Err(Error::InvalidGrid(format!("non-finite {name} coordinate")));
            }
            if coords.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidGrid(format!(
                    "{name} coordinates are not strictly increasing"
                )));
            }
        }
        Ok(GridLattice { x_coords, y_coords })
    }

    /// Evenly spaced lattice with `q` columns over `[x0, x1]` and `p` rows
    /// over `[y0, y1]`.
    pub fn uniform(x0: f64, x1: f64, q: usize, y0: f64, y1: f64, p: usize) -> Result<Self> {
        let axis = |a: f64, b: f64, n: usize| -> Vec<f64> {
            if n < 2 {
                return vec![a; n];
            }
            (0..n)
                .map(|i| {
                    if i == n - 1 {
                        b
                    } else {
                        a + (b - a) * (i as f64) / ((n - 1) as f64)
                    }
                })
                .collect()
        };
        GridLattice::new(axis(x0, x1, q), axis(y0, y1, p))
    }

    pub fn x_coords(&self) -> &[f64] {
        &self.x_coords
    }

    pub fn y_coords(&self) -> &[f64] {
        &self.y_coords
    }

    /// Number of columns (distinct x coordinates).
    pub fn q(&self) -> usize {
        self.x_coords.len()
    }

    /// Number of rows (distinct y coordinates).
    pub fn p(&self) -> usize {
        self.y_coords.len()
    }

    pub fn node(&self, row: usize, col: usize) -> Location2D {
        Location2D::new(self.x_coords[col], self.y_coords[row])
    }

    /// All nodes in row-major order (y outer, x inner).
    pub fn nodes(&self) -> Vec<Location2D> {
        self.y_coords
            .iter()
            .flat_map(|&y| self.x_coords.iter().map(move |&x| Location2D::new(x, y)))
            .collect()
    }

    pub fn bounds(&self) -> (Location2D, Location2D) {
        (
            Location2D::new(self.x_coords[0], self.y_coords[0]),
            Location2D::new(*self.x_coords.last().unwrap(), *self.y_coords.last().unwrap()),
        )
    }

    /// Locates the cell whose linear interpolation governs `s`.
    ///
    /// Inside the hull the returned cell satisfies `x[col] <= s.x <= x[col+1]`
    /// (and likewise for rows); a coordinate on an interior edge goes to the
    /// lower-index cell. Outside the hull the nearest end cell is designated
    /// for linear extrapolation and the side is reported.
    pub fn cell_containing(&self, s: Location2D) -> CellLocation {
        let (col, x_side) = axis_cell(&self.x_coords, s.x);
        let (row, y_side) = axis_cell(&self.y_coords, s.y);
        CellLocation {
            col,
            row,
            x_side,
            y_side,
        }
    }
}

fn axis_cell(coords: &[f64], v: f64) -> (usize, AxisSide) {
    let last = coords.len() - 1;
    if v < coords[0] {
        (0, AxisSide::Below)
    } else if v > coords[last] {
        (last - 1, AxisSide::Above)
    } else {
        // Smallest cell whose upper node is >= v.
        let idx = coords[1..].partition_point(|&c| c < v);
        (idx.min(last - 1), AxisSide::Inside)
    }
}

/// A p×q table of optional values laid out on a lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct GridTable {
    lattice: GridLattice,
    cells: Vec<Option<f64>>,
}

impl GridTable {
    /// `cells` is row-major with `p` rows of `q` entries.
    pub fn new(lattice: GridLattice, cells: Vec<Option<f64>>) -> Result<Self> {
        let (p, q) = (lattice.p(), lattice.q());
        if cells.len() != p * q {
            return Err(Error::InvalidGrid(format!(
                "expected {} cells for a {p}x{q} lattice, got {}",
                p * q,
                cells.len()
            )));
        }
        if cells.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::InvalidGrid("non-finite cell value".into()));
        }
        for k in 0..p {
            if (0..q).all(|l| cells[k * q + l].is_none()) {
                return Err(Error::InvalidGrid(format!(
                    "row {k} (y = {}) has no observations",
                    lattice.y_coords[k]
                )));
            }
        }
        for l in 0..q {
            if (0..p).all(|k| cells[k * q + l].is_none()) {
                return Err(Error::InvalidGrid(format!(
                    "column {l} (x = {}) has no observations",
                    lattice.x_coords[l]
                )));
            }
        }
        Ok(GridTable { lattice, cells })
    }

    pub fn from_rows(lattice: GridLattice, rows: &[Vec<Option<f64>>]) -> Result<Self> {
        GridTable::new(lattice, rows.iter().flatten().copied().collect())
    }

    pub fn lattice(&self) -> &GridLattice {
        &self.lattice
    }

    pub fn p(&self) -> usize {
        self.lattice.p()
    }

    pub fn q(&self) -> usize {
        self.lattice.q()
    }

    pub fn cells(&self) -> &[Option<f64>] {
        &self.cells
    }

    pub fn get(&self, row: usize, col: usize) -> Option<f64> {
        self.cells[row * self.q() + col]
    }

    pub fn present_count(&self) -> usize {
        self.cells.iter().filter(|c| c.is_some()).count()
    }

    /// Present cells as `(row, col, value)` in row-major order.
    pub fn iter_present(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        let q = self.q();
        self.cells
            .iter()
            .enumerate()
            .filter_map(move |(i, c)| c.map(|v| (i / q, i % q, v)))
    }

    /// Copy of the table with one cell marked missing. Fails if that empties
    /// a row or column.
    pub fn without_cell(&self, row: usize, col: usize) -> Result<GridTable> {
        let mut cells = self.cells.clone();
        cells[row * self.q() + col] = None;
        GridTable::new(self.lattice.clone(), cells)
    }

    /// Applies `f` to every present value.
    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> Result<GridTable> {
        GridTable::new(
            self.lattice.clone(),
            self.cells.iter().map(|c| c.map(&f)).collect(),
        )
    }

    pub fn to_scatter(&self) -> ScatterSet {
        let obs = self
            .iter_present()
            .map(|(k, l, v)| Observation {
                location: self.lattice.node(k, l),
                value: v,
            })
            .collect();
        ScatterSet { observations: obs }
    }

    /// Max minus min of the present values.
    pub fn value_range(&self) -> f64 {
        let (lo, hi) = self
            .cells
            .iter()
            .flatten()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
        hi - lo
    }
}

pub fn default_snap_tolerance(scatter: &ScatterSet) -> f64 {
    DEFAULT_RELATIVE_TOLERANCE * coordinate_span(scatter.observations())
}

/// Recovers the lattice underlying `scatter`.
///
/// Sorted coordinates closer than `snap_tolerance` to their predecessor are
/// merged; each merged group is represented by its mean.
pub fn to_grid(scatter: &ScatterSet, snap_tolerance: f64) -> Result<GridTable> {
    if !(snap_tolerance >= 0.0) {
        return Err(Error::InvalidArgument(
            "snap tolerance must be nonnegative".into(),
        ));
    }
    let obs = scatter.observations();
    let (x_coords, x_index) = snap_axis(obs.iter().map(|o| o.location.x), snap_tolerance);
    let (y_coords, y_index) = snap_axis(obs.iter().map(|o| o.location.y), snap_tolerance);
    let lattice = GridLattice::new(x_coords, y_coords)?;
    let q = lattice.q();
    let mut cells = vec![None; lattice.p() * q];
    let mut owner = vec![usize::MAX; cells.len()];
    for (i, o) in obs.iter().enumerate() {
        let cell = y_index[i] * q + x_index[i];
        if owner[cell] != usize::MAX {
            return Err(Error::DuplicateLocation {
                x: lattice.x_coords[x_index[i]],
                y: lattice.y_coords[y_index[i]],
                first: owner[cell] + 1,
                second: i + 1,
            });
        }
        owner[cell] = i;
        cells[cell] = Some(o.value);
    }
    GridTable::new(lattice, cells)
}

/// Returns the snapped coordinate list and each input's index into it.
fn snap_axis(values: impl Iterator<Item = f64>, tol: f64) -> (Vec<f64>, Vec<usize>) {
    let values: Vec<f64> = values.collect();
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut coords = Vec::new();
    let mut index = vec![0; values.len()];
    let mut group: Vec<f64> = Vec::new();
    let mut prev = f64::NEG_INFINITY;
    for &i in &order {
        let v = values[i];
        if !group.is_empty() && v - prev > tol {
            coords.push(group.iter().sum::<f64>() / group.len() as f64);
            group.clear();
        }
        group.push(v);
        prev = v;
        index[i] = coords.len();
    }
    if !group.is_empty() {
        coords.push(group.iter().sum::<f64>() / group.len() as f64);
    }
    (coords, index)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lattice_3x2() -> GridLattice {
        GridLattice::new(vec![0.0, 1.0, 2.0], vec![0.0, 1.0]).unwrap()
    }

    #[test]
    fn parses_three_rows() {
        let csv = b"x,y,z\n0,0,1.5\n1,0,2\n0,1,3\n";
        let s = parse_observations_csv(csv, &CsvOptions::default()).unwrap();
        assert_eq!(s.len(), 3);
        assert_eq!(s.observations()[1], Observation::new(1.0, 0.0, 2.0));
    }

    #[test]
    fn blank_lines_ignored_and_columns_remapped() {
        let csv = b"val;east;north\n\n1;0;0\n\n2;1;0\n";
        let opts = CsvOptions {
            x_column: "east".into(),
            y_column: "north".into(),
            value_column: "val".into(),
            delimiter: b';',
        };
        let s = parse_observations_csv(csv, &opts).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s.observations()[1], Observation::new(1.0, 0.0, 2.0));
    }

    #[test]
    fn duplicate_location_names_both_rows() {
        let csv = b"x,y,z\n1.0,2.0,5\n0,0,1\n1.0,2.0,6\n";
        match parse_observations_csv(csv, &CsvOptions::default()) {
            Err(Error::DuplicateLocation { first, second, x, y }) => {
                assert_eq!((first, second), (2, 4));
                assert_eq!((x, y), (1.0, 2.0));
            }
            other => panic!("expected duplicate error, got {other:?}"),
        }
    }

    #[test]
    fn non_numeric_reports_line() {
        let csv = b"x,y,z\n0,0,1\n1,0,abc\n";
        match parse_observations_csv(csv, &CsvOptions::default()) {
            Err(Error::Parse { row, .. }) => assert_eq!(row, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn missing_column_is_reported() {
        let csv = b"a,b,c\n0,0,1\n";
        assert!(matches!(
            parse_observations_csv(csv, &CsvOptions::default()),
            Err(Error::Parse { row: 1, .. })
        ));
    }

    #[test]
    fn unreadable_file() {
        let err = load_observations_csv("/nonexistent/file.csv", &CsvOptions::default()).unwrap_err();
        assert_eq!(err.category(), "io");
    }

    #[test]
    fn complete_two_by_two_grid() {
        let s = ScatterSet::new(vec![
            Observation::new(0.0, 0.0, 1.0),
            Observation::new(0.0, 1.0, 2.0),
            Observation::new(1.0, 0.0, 3.0),
            Observation::new(1.0, 1.0, 4.0),
        ])
        .unwrap();
        let g = to_grid(&s, default_snap_tolerance(&s)).unwrap();
        assert_eq!((g.p(), g.q()), (2, 2));
        assert_eq!(g.present_count(), 4);
        assert_eq!(g.get(0, 1), Some(3.0));
        assert_eq!(g.get(1, 0), Some(2.0));
    }

    #[test]
    fn incomplete_grid_has_missing_cell() {
        let s = ScatterSet::new(vec![
            Observation::new(0.0, 0.0, 1.0),
            Observation::new(0.0, 1.0, 2.0),
            Observation::new(1.0, 0.0, 3.0),
        ])
        .unwrap();
        let g = to_grid(&s, 0.0).unwrap();
        assert_eq!(g.get(1, 1), None);
        assert_eq!(g.present_count(), 3);
    }

    #[test]
    fn snapping_merges_noisy_coordinates() {
        let s = ScatterSet::with_tolerance(
            vec![
                Observation::new(0.0, 0.0, 1.0),
                Observation::new(1e-12, 1.0, 2.0),
                Observation::new(1.0, 1e-12, 3.0),
                Observation::new(1.0 - 1e-12, 1.0, 4.0),
            ],
            0.0,
        )
        .unwrap();
        let g = to_grid(&s, 1e-9).unwrap();
        assert_eq!((g.p(), g.q()), (2, 2));
        assert_eq!(g.present_count(), 4);
    }

    #[test]
    fn to_grid_rejects_same_cell_and_single_axis() {
        let s = ScatterSet::with_tolerance(
            vec![
                Observation::new(0.0, 0.0, 1.0),
                Observation::new(1e-12, 0.0, 2.0),
                Observation::new(1.0, 1.0, 3.0),
            ],
            0.0,
        )
        .unwrap();
        assert_eq!(to_grid(&s, 1e-9).unwrap_err().category(), "duplicate-location");

        let line = ScatterSet::new(vec![Observation::new(0.0, 0.0, 1.0), Observation::new(0.0, 1.0, 2.0)]).unwrap();
        assert_eq!(to_grid(&line, 0.0).unwrap_err().category(), "invalid-grid");
    }

    #[test]
    fn empty_row_rejected() {
        let lat = lattice_3x2();
        let err = GridTable::new(lat, vec![Some(1.0), Some(2.0), Some(3.0), None, None, None]).unwrap_err();
        assert_eq!(err.category(), "invalid-grid");
    }

    #[test]
    fn lattice_validation() {
        assert!(GridLattice::new(vec![0.0], vec![0.0, 1.0]).is_err());
        assert!(GridLattice::new(vec![0.0, 0.0], vec![0.0, 1.0]).is_err());
        assert!(GridLattice::new(vec![1.0, 0.0], vec![0.0, 1.0]).is_err());
    }

    #[test]
    fn cell_containing_interior_corner_and_outside() {
        let lat = lattice_3x2();
        let c = lat.cell_containing(Location2D::new(0.5, 0.5));
        assert_eq!((c.col, c.row), (0, 0));
        assert!(c.is_inside());

        let c = lat.cell_containing(Location2D::new(2.0, 1.0));
        assert_eq!((c.col, c.row), (1, 0));
        assert!(c.is_inside());

        let c = lat.cell_containing(Location2D::new(-0.5, 0.5));
        assert_eq!((c.col, c.row), (0, 0));
        assert_eq!(c.x_side, AxisSide::Below);
        assert_eq!(c.y_side, AxisSide::Inside);

        let c = lat.cell_containing(Location2D::new(7.0, -3.0));
        assert_eq!((c.col, c.row), (1, 0));
        assert_eq!((c.x_side, c.y_side), (AxisSide::Above, AxisSide::Below));
    }

    #[test]
    fn interior_edge_goes_to_lower_cell() {
        let c = lattice_3x2().cell_containing(Location2D::new(1.0, 0.0));
        assert_eq!((c.col, c.row), (0, 0));
    }

    #[test]
    fn uniform_lattice_hits_endpoints() {
        let lat = GridLattice::uniform(1.0, 16.0, 61, 1.0, 23.0, 89).unwrap();
        assert_eq!(lat.x_coords()[60], 16.0);
        assert_eq!(lat.y_coords()[88], 23.0);
        assert_eq!(lat.nodes().len(), 61 * 89);
    }
}
