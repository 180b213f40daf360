//! Tukey median polish of a two-way table with missing cells.
//!
//! The table is decomposed as `value = overall + row_effect + col_effect +
//! residual`. Each sweep removes row medians of the residuals into the row
//! effects, re-centres the column effects into the overall term, then does
//! the same for columns. Missing cells are skipped by every median.

use crate::error::{Error, Result};
use crate::spatial::{GridLattice, GridTable, Observation, ScatterSet};

pub const DEFAULT_MAX_SWEEPS: usize = 100;
/// Convergence tolerance relative to the range of the data.
pub const DEFAULT_RELATIVE_TOL: f64 = 1e-9;

/// Median with missing-value skipping; an even count yields the mean of the
/// two central order statistics. Returns `None` for an empty input.
pub fn median(values: &mut [f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(f64::total_cmp);
    let n = values.len();
    Some(if n % 2 == 0 {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    } else {
        values[n / 2]
    })
}

/// Default convergence tolerance for `grid`: `1e-9 × (max − min)`, falling
/// back to an absolute `1e-9` scale for constant tables.
pub fn default_tolerance(grid: &GridTable) -> f64 {
    let range = grid.value_range();
    if range > 0.0 {
        DEFAULT_RELATIVE_TOL * range
    } else {
        let scale = grid.cells().iter().flatten().fold(1.0_f64, |m, v| m.max(v.abs()));
        DEFAULT_RELATIVE_TOL * scale
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MedianPolishFit {
    pub overall: f64,
    /// One per lattice row (y coordinate).
    pub row_effects: Vec<f64>,
    /// One per lattice column (x coordinate).
    pub col_effects: Vec<f64>,
    /// Row-major p×q; present exactly where the input cell is present.
    pub residuals: Vec<Option<f64>>,
    pub sweeps: usize,
    pub converged: bool,
}

impl MedianPolishFit {
    pub fn p(&self) -> usize {
        self.row_effects.len()
    }

    pub fn q(&self) -> usize {
        self.col_effects.len()
    }

    pub fn residual(&self, row: usize, col: usize) -> Option<f64> {
        self.residuals[row * self.q() + col]
    }

    /// Additive mean at lattice node `(row, col)`.
    pub fn node_mean(&self, row: usize, col: usize) -> Result<f64> {
        if row >= self.p() || col >= self.q() {
            return Err(Error::InvalidArgument(format!(
                "node ({row}, {col}) outside {}x{} table",
                self.p(),
                self.q()
            )));
        }
        Ok(self.overall + self.row_effects[row] + self.col_effects[col])
    }

    /// Node means for every lattice node, row-major.
    pub fn node_means(&self) -> Vec<f64> {
        self.row_effects
            .iter()
            .flat_map(|r| self.col_effects.iter().map(move |c| self.overall + r + c))
            .collect()
    }

    /// Present residuals as observations at their lattice nodes, row-major.
    pub fn residuals_as_scatter(&self, lattice: &GridLattice) -> Result<ScatterSet> {
        if lattice.p() != self.p() || lattice.q() != self.q() {
            return Err(Error::InvalidArgument(format!(
                "fit is {}x{} but lattice is {}x{}",
                self.p(),
                self.q(),
                lattice.p(),
                lattice.q()
            )));
        }
        let q = self.q();
        let obs: Vec<Observation> = self
            .residuals
            .iter()
            .enumerate()
            .filter_map(|(i, r)| {
                r.map(|v| Observation {
                    location: lattice.node(i / q, i % q),
                    value: v,
                })
            })
            .collect();
        ScatterSet::with_tolerance(obs, 0.0)
    }

    /// Largest magnitude among residual row medians, residual column medians
    /// and the medians of both effect vectors.
    pub fn max_median_deviation(&self) -> f64 {
        let (p, q) = (self.p(), self.q());
        let mut worst = 0.0_f64;
        let mut buf = Vec::with_capacity(p.max(q));
        for k in 0..p {
            buf.clear();
            buf.extend((0..q).filter_map(|l| self.residuals[k * q + l]));
            worst = worst.max(median(&mut buf).unwrap_or(0.0).abs());
        }
        for l in 0..q {
            buf.clear();
            buf.extend((0..p).filter_map(|k| self.residuals[k * q + l]));
            worst = worst.max(median(&mut buf).unwrap_or(0.0).abs());
        }
        let mut rows = self.row_effects.clone();
        let mut cols = self.col_effects.clone();
        worst
            .max(median(&mut rows).unwrap_or(0.0).abs())
            .max(median(&mut cols).unwrap_or(0.0).abs())
    }
}

/// Runs median polish until every median checked by
/// [`MedianPolishFit::max_median_deviation`] is at most `tol`, or until
/// `max_sweeps` sweeps have run. Non-convergence is reported in the fit, not
/// as an error.
pub fn decompose(grid: &GridTable, tol: f64, max_sweeps: usize) -> Result<MedianPolishFit> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument("median polish tol must be > 0".into()));
    }
    if max_sweeps == 0 {
        return Err(Error::InvalidArgument("max_sweeps must be >= 1".into()));
    }
    let (p, q) = (grid.p(), grid.q());
    let mut fit = MedianPolishFit {
        overall: 0.0,
        row_effects: vec![0.0; p],
        col_effects: vec![0.0; q],
        residuals: grid.cells().to_vec(),
        sweeps: 0,
        converged: false,
    };
    let mut buf = Vec::with_capacity(p.max(q));

    while fit.sweeps < max_sweeps {
        fit.sweeps += 1;

        for k in 0..p {
            buf.clear();
            buf.extend((0..q).filter_map(|l| fit.residuals[k * q + l]));
            let m = median(&mut buf).expect("grid rows have a present cell");
            for l in 0..q {
                if let Some(r) = fit.residuals[k * q + l].as_mut() {
                    *r -= m;
                }
            }
            fit.row_effects[k] += m;
        }
        buf.clear();
        buf.extend_from_slice(&fit.col_effects);
        let m = median(&mut buf).unwrap_or(0.0);
        fit.col_effects.iter_mut().for_each(|c| *c -= m);
        fit.overall += m;

        for l in 0..q {
            buf.clear();
            buf.extend((0..p).filter_map(|k| fit.residuals[k * q + l]));
            let m = median(&mut buf).expect("grid columns have a present cell");
            for k in 0..p {
                if let Some(r) = fit.residuals[k * q + l].as_mut() {
                    *r -= m;
                }
            }
            fit.col_effects[l] += m;
        }
        buf.clear();
        buf.extend_from_slice(&fit.row_effects);
        let m = median(&mut buf).unwrap_or(0.0);
        fit.row_effects.iter_mut().for_each(|r| *r -= m);
        fit.overall += m;

        if fit.max_median_deviation() <= tol {
            fit.converged = true;
            break;
        }
    }
    Ok(fit)
}
