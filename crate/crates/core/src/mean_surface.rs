//! Mean-surface interpolators.
//!
//! [`LinearMeanModel`] interpolates median-polish effects piecewise-linearly
//! between lattice nodes and extends the end segments linearly outside the
//! lattice. [`BiharmonicModel`] is a minimum-curvature spline built as a sum
//! of biharmonic Green functions centred on the data,
//! `w(s) = Σ α_j φ_m(|s − s_j|)`.

use crate::error::{Error, Result};
use crate::linalg::{LuFactorization, Matrix};
use crate::median_polish::MedianPolishFit;
use crate::spatial::{GridLattice, Location2D};

/// Biharmonic Green function `φ_m(r)` for dimension `m ∈ 1..=6`.
///
/// | m | φ_m(r)         |
/// |---|----------------|
/// | 1 | r³             |
/// | 2 | r² (ln r − 1)  |
/// | 3 | r              |
/// | 4 | ln r           |
/// | 5 | r⁻¹            |
/// | 6 | r⁻²            |
///
/// At `r = 0` dimensions 1–3 take their continuous limit 0; dimensions 4–6
/// are unbounded there and return [`Error::GreenSingularity`].
pub fn green_function(dimension: usize, r: f64) -> Result<f64> {
    if !(1..=6).contains(&dimension) {
        return Err(Error::InvalidArgument(format!(
            "green function dimension must be in 1..=6, got {dimension}"
        )));
    }
    if !(r >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "green function distance must be >= 0, got {r}"
        )));
    }
    if r == 0.0 {
        return if dimension <= 3 {
            Ok(0.0)
        } else {
            Err(Error::GreenSingularity { dimension })
        };
    }
    Ok(match dimension {
        1 => r * r * r,
        2 => r * r * (r.ln() - 1.0),
        3 => r,
        4 => r.ln(),
        5 => r.recip(),
        _ => (r * r).recip(),
    })
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

#[derive(Debug, Clone, PartialEq)]
pub struct BiharmonicModel {
    dimension: usize,
    /// Flattened `N × dimension` coordinates.
    centers: Vec<f64>,
    strengths: Vec<f64>,
    regularization: f64,
}

impl BiharmonicModel {
    /// Solves `(G + εI) α = w` with `G_ij = φ_m(|s_i − s_j|)`.
    ///
    /// `centers` is a flattened `N × dimension` array. Because `φ_m(0) = 0`
    /// the matrix has a zero diagonal when `ε = 0`; a single center with
    /// `ε = 0` is therefore always singular.
    pub fn fit(dimension: usize, centers: &[f64], values: &[f64], regularization: f64) -> Result<Self> {
        if !(1..=3).contains(&dimension) {
            // φ_m(0) is unbounded for m >= 4, so the fit matrix has no diagonal.
            return if (4..=6).contains(&dimension) {
                Err(Error::GreenSingularity { dimension })
            } else {
                Err(Error::InvalidArgument(format!(
                    "spline dimension must be in 1..=6, got {dimension}"
                )))
            };
        }
        if !(regularization >= 0.0) || !regularization.is_finite() {
            return Err(Error::InvalidArgument(
                "regularization must be finite and >= 0".into(),
            ));
        }
        let n = values.len();
        if n == 0 {
            return Err(Error::InsufficientData("spline needs at least one center".into()));
        }
        if centers.len() != n * dimension {
            return Err(Error::InvalidArgument(format!(
                "expected {} coordinates for {n} centers in {dimension}-D, got {}",
                n * dimension,
                centers.len()
            )));
        }
        if centers.iter().chain(values).any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("non-finite center or value".into()));
        }
        let point = |i: usize| &centers[i * dimension..(i + 1) * dimension];
        for i in 0..n {
            for j in (i + 1)..n {
                if distance(point(i), point(j)) == 0.0 {
                    return Err(Error::DuplicateLocation {
                        x: point(i)[0],
                        y: point(i).get(1).copied().unwrap_or(0.0),
                        first: i + 1,
                        second: j + 1,
                    });
                }
            }
        }

        let mut g = Matrix::zeros(n);
        for i in 0..n {
            for j in (i + 1)..n {
                let v = green_function(dimension, distance(point(i), point(j)))?;
                g.set(i, j, v);
                g.set(j, i, v);
            }
        }
        g.add_diagonal(regularization);
        let lu = LuFactorization::new(g, "biharmonic spline")?;
        let strengths = lu.solve(values);
        if strengths.iter().any(|a| !a.is_finite()) {
            return Err(Error::SingularSystem {
                context: "biharmonic spline",
                condition: lu.condition_indicator(),
            });
        }
        Ok(BiharmonicModel {
            dimension,
            centers: centers.to_vec(),
            strengths,
            regularization,
        })
    }

    pub fn fit_1d(centers: &[f64], values: &[f64], regularization: f64) -> Result<Self> {
        Self::fit(1, centers, values, regularization)
    }

    pub fn fit_2d(centers: &[Location2D], values: &[f64], regularization: f64) -> Result<Self> {
        let flat: Vec<f64> = centers.iter().flat_map(|c| [c.x, c.y]).collect();
        Self::fit(2, &flat, values, regularization)
    }

    /// Rebuilds a model from stored parameters without refitting.
    pub fn from_parts(
        dimension: usize,
        centers: Vec<f64>,
        strengths: Vec<f64>,
        regularization: f64,
    ) -> Result<Self> {
        if !(1..=6).contains(&dimension)
            || strengths.is_empty()
            || centers.len() != strengths.len() * dimension
            || strengths.iter().chain(&centers).any(|v| !v.is_finite())
        {
            return Err(Error::InvalidArgument("inconsistent spline parameters".into()));
        }
        Ok(BiharmonicModel {
            dimension,
            centers,
            strengths,
            regularization,
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn len(&self) -> usize {
        self.strengths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.strengths.is_empty()
    }

    pub fn centers(&self) -> &[f64] {
        &self.centers
    }

    pub fn strengths(&self) -> &[f64] {
        &self.strengths
    }

    pub fn regularization(&self) -> f64 {
        self.regularization
    }

    pub fn eval(&self, point: &[f64]) -> Result<f64> {
        if point.len() != self.dimension {
            return Err(Error::InvalidArgument(format!(
                "query has {} coordinates, model is {}-D",
                point.len(),
                self.dimension
            )));
        }
        let mut sum = 0.0;
        for (center, alpha) in self.centers.chunks_exact(self.dimension).zip(&self.strengths) {
            sum += alpha * green_function(self.dimension, distance(center, point))?;
        }
        Ok(sum)
    }

    pub fn eval_2d(&self, s: Location2D) -> Result<f64> {
        self.eval(&[s.x, s.y])
    }
}

/// Piecewise-linear mean surface `â + r̂(y) + ĉ(x)` from a median-polish fit.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearMeanModel {
    fit: MedianPolishFit,
    lattice: GridLattice,
}

impl LinearMeanModel {
    pub fn new(fit: MedianPolishFit, lattice: GridLattice) -> Result<Self> {
        if fit.p() != lattice.p() || fit.q() != lattice.q() {
            return Err(Error::InvalidArgument(format!(
                "fit is {}x{} but lattice is {}x{}",
                fit.p(),
                fit.q(),
                lattice.p(),
                lattice.q()
            )));
        }
        Ok(LinearMeanModel { fit, lattice })
    }

    pub fn fit(&self) -> &MedianPolishFit {
        &self.fit
    }

    pub fn lattice(&self) -> &GridLattice {
        &self.lattice
    }

    /// Inside the lattice this interpolates the row and column effects of the
    /// enclosing cell; outside, the first or last adjacent pair of nodes is
    /// extended linearly along each offending axis.
    pub fn mean_at(&self, s: Location2D) -> f64 {
        let cell = self.lattice.cell_containing(s);
        let row_part = segment_value(self.lattice.y_coords(), &self.fit.row_effects, cell.row, s.y);
        let col_part = segment_value(self.lattice.x_coords(), &self.fit.col_effects, cell.col, s.x);
        self.fit.overall + row_part + col_part
    }
}

/// Line through `(coords[i], effects[i])` and `(coords[i+1], effects[i+1])`
/// evaluated at `v`. Written as a convex combination so nodes are hit exactly.
fn segment_value(coords: &[f64], effects: &[f64], i: usize, v: f64) -> f64 {
    let t = (v - coords[i]) / (coords[i + 1] - coords[i]);
    if t == 0.0 {
        effects[i]
    } else if t == 1.0 {
        effects[i + 1]
    } else {
        (1.0 - t) * effects[i] + t * effects[i + 1]
    }
}
