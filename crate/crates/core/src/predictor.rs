//! MPK and IMPK surface predictors and leave-one-out cross-validation.
//!
//! Both methods share the same pipeline: median polish of the grid, a mean
//! surface built from the polish effects, and ordinary kriging of the polish
//! residuals. They differ only in the mean surface: MPK interpolates the
//! effects piecewise-linearly, IMPK passes a 2-D biharmonic spline through
//! the node means `â + r̂_k + ĉ_l`.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kriging::{
    empirical_semivariogram, fit_variogram, ok_predict, FitOptions, KrigingPrediction, OrdinaryKriging,
    VariogramFamily, VariogramFit, DEFAULT_BINS,
};
use crate::mean_surface::{BiharmonicModel, LinearMeanModel};
use crate::median_polish::{decompose, default_tolerance, MedianPolishFit, DEFAULT_MAX_SWEEPS};
use crate::spatial::{GridLattice, GridTable, Location2D, ScatterSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Mpk,
    Impk,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Mpk => "MPK",
            Method::Impk => "IMPK",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mpk" => Ok(Method::Mpk),
            "impk" => Ok(Method::Impk),
            other => Err(Error::InvalidArgument(format!("unknown method `{other}`"))),
        }
    }
}

/// Which lattice nodes anchor the IMPK mean spline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SplineCenters {
    /// Nodes whose grid cell holds an observation.
    #[default]
    Observed,
    /// Every lattice node, including nodes of missing cells.
    AllNodes,
}

impl SplineCenters {
    pub fn name(&self) -> &'static str {
        match self {
            SplineCenters::Observed => "observed",
            SplineCenters::AllNodes => "all",
        }
    }
}

impl FromStr for SplineCenters {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "observed" => Ok(SplineCenters::Observed),
            "all" | "all-nodes" => Ok(SplineCenters::AllNodes),
            other => Err(Error::InvalidArgument(format!("unknown spline centers `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitConfig {
    /// Median-polish tolerance; `None` uses `1e-9 × data range`.
    pub polish_tol: Option<f64>,
    pub max_sweeps: usize,
    pub family: VariogramFamily,
    pub n_bins: usize,
    /// `None` uses half the largest pairwise residual distance.
    pub max_lag: Option<f64>,
    pub zero_nugget: bool,
    /// Ridge added to the spline matrix diagonal.
    pub epsilon: f64,
    pub spline_centers: SplineCenters,
    /// Krige each target from its k nearest residuals instead of all of them.
    pub neighbors: Option<usize>,
}

impl Default for FitConfig {
    fn default() -> Self {
        FitConfig {
            polish_tol: None,
            max_sweeps: DEFAULT_MAX_SWEEPS,
            family: VariogramFamily::Spherical,
            n_bins: DEFAULT_BINS,
            max_lag: None,
            zero_nugget: false,
            epsilon: 0.0,
            spline_centers: SplineCenters::Observed,
            neighbors: None,
        }
    }
}

#[derive(Debug, Clone)]
pub enum MeanComponent {
    Linear(LinearMeanModel),
    /// Spline through the node means minus `offset` (the overall effect),
    /// evaluated as `offset + spline(s)`.
    Biharmonic { spline: BiharmonicModel, offset: f64 },
}

impl MeanComponent {
    pub fn eval(&self, s: Location2D) -> Result<f64> {
        match self {
            MeanComponent::Linear(m) => Ok(m.mean_at(s)),
            MeanComponent::Biharmonic { spline, offset } => Ok(offset + spline.eval_2d(s)?),
        }
    }
}

#[derive(Debug, Clone)]
enum ResidualKriging {
    Global(OrdinaryKriging),
    Local(usize),
    /// Zero-sill variogram: the residual field is taken to be its mean.
    Constant(f64),
}

/// A fitted MPK or IMPK predictor.
#[derive(Debug, Clone)]
pub struct SurfaceModel {
    method: Method,
    mean: MeanComponent,
    polish: MedianPolishFit,
    residual_scatter: ScatterSet,
    variogram: VariogramFit,
    source_grid: GridTable,
    config: FitConfig,
    kriging: ResidualKriging,
}

/// Fits the variogram of the median-polish residuals of `grid`.
pub fn residual_variogram(residuals: &ScatterSet, config: &FitConfig) -> Result<VariogramFit> {
    let emp = empirical_semivariogram(residuals, config.n_bins, config.max_lag)?;
    fit_variogram(
        &emp,
        config.family,
        FitOptions {
            zero_nugget: config.zero_nugget,
        },
    )
}

pub fn fit(grid: &GridTable, method: Method, config: &FitConfig) -> Result<SurfaceModel> {
    fit_with_variogram(grid, method, config, None)
}

/// As [`fit`], but reuses `variogram` instead of fitting one when given.
pub fn fit_with_variogram(
    grid: &GridTable,
    method: Method,
    config: &FitConfig,
    variogram: Option<VariogramFit>,
) -> Result<SurfaceModel> {
    let tol = config.polish_tol.unwrap_or_else(|| default_tolerance(grid));
    let polish = decompose(grid, tol, config.max_sweeps)?;
    let lattice = grid.lattice();
    let residual_scatter = polish.residuals_as_scatter(lattice)?;
    let variogram = match variogram {
        Some(v) => v,
        None => residual_variogram(&residual_scatter, config)?,
    };
    let mean = build_mean(&polish, grid, method, config)?;
    SurfaceModel::assemble(method, mean, polish, residual_scatter, variogram, grid.clone(), config.clone())
}

fn build_mean(polish: &MedianPolishFit, grid: &GridTable, method: Method, config: &FitConfig) -> Result<MeanComponent> {
    let lattice = grid.lattice();
    Ok(match method {
        Method::Mpk => MeanComponent::Linear(LinearMeanModel::new(polish.clone(), lattice.clone())?),
        Method::Impk => {
            let offset = polish.overall;
            let (centers, values): (Vec<Location2D>, Vec<f64>) = match config.spline_centers {
                SplineCenters::AllNodes => lattice
                    .nodes()
                    .into_iter()
                    .zip(polish.node_means().into_iter().map(|m| m - offset))
                    .unzip(),
                SplineCenters::Observed => grid
                    .iter_present()
                    .map(|(k, l, _)| (lattice.node(k, l), polish.row_effects[k] + polish.col_effects[l]))
                    .unzip(),
            };
            MeanComponent::Biharmonic {
                spline: BiharmonicModel::fit_2d(&centers, &values, config.epsilon)?,
                offset,
            }
        }
    })
}

impl SurfaceModel {
    /// Assembles a model from already-fitted parts; used when loading a
    /// stored model.
    pub fn assemble(
        method: Method,
        mean: MeanComponent,
        polish: MedianPolishFit,
        residual_scatter: ScatterSet,
        variogram: VariogramFit,
        source_grid: GridTable,
        config: FitConfig,
    ) -> Result<Self> {
        let consistent = matches!(
            (&mean, method),
            (MeanComponent::Linear(_), Method::Mpk) | (MeanComponent::Biharmonic { .. }, Method::Impk)
        );
        if !consistent {
            return Err(Error::InvalidArgument(format!("mean component does not match method {method}")));
        }
        let kriging = if variogram.model.sill() == 0.0 {
            let n = residual_scatter.len() as f64;
            ResidualKriging::Constant(residual_scatter.iter().map(|o| o.value).sum::<f64>() / n)
        } else {
            match config.neighbors {
                Some(k) if k < residual_scatter.len() => {
                    if k == 0 {
                        return Err(Error::InvalidArgument("neighbors must be >= 1".into()));
                    }
                    ResidualKriging::Local(k)
                }
                _ => ResidualKriging::Global(OrdinaryKriging::new(&residual_scatter, variogram.model)?),
            }
        };
        Ok(SurfaceModel {
            method,
            mean,
            polish,
            residual_scatter,
            variogram,
            source_grid,
            config,
            kriging,
        })
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn mean_component(&self) -> &MeanComponent {
        &self.mean
    }

    pub fn polish(&self) -> &MedianPolishFit {
        &self.polish
    }

    pub fn residual_scatter(&self) -> &ScatterSet {
        &self.residual_scatter
    }

    pub fn variogram(&self) -> &VariogramFit {
        &self.variogram
    }

    pub fn source_grid(&self) -> &GridTable {
        &self.source_grid
    }

    pub fn config(&self) -> &FitConfig {
        &self.config
    }

    pub fn mean_at(&self, s: Location2D) -> Result<f64> {
        self.mean.eval(s)
    }

    /// Kriged residual and its variance at `s`.
    pub fn residual_at(&self, s: Location2D) -> Result<KrigingPrediction> {
        match &self.kriging {
            ResidualKriging::Global(ok) => ok.predict(s),
            ResidualKriging::Constant(c) => Ok(KrigingPrediction {
                value: *c,
                variance: 0.0,
            }),
            ResidualKriging::Local(k) => {
                let obs = self.residual_scatter.observations();
                let mut order: Vec<usize> = (0..obs.len()).collect();
                order.sort_by(|&a, &b| {
                    obs[a]
                        .location
                        .distance(&s)
                        .total_cmp(&obs[b].location.distance(&s))
                        .then(a.cmp(&b))
                });
                order.truncate(*k);
                order.sort_unstable();
                let subset = ScatterSet::with_tolerance(order.iter().map(|&i| obs[i]).collect(), 0.0)?;
                ok_predict(&subset, &self.variogram.model, s)
            }
        }
    }

    /// Mean surface plus kriged residual; the variance is the residual
    /// kriging variance alone.
    pub fn predict(&self, s: Location2D) -> Result<KrigingPrediction> {
        if !s.is_finite() {
            return Err(Error::InvalidArgument("non-finite prediction location".into()));
        }
        let mean = self.mean_at(s)?;
        let residual = self.residual_at(s)?;
        Ok(KrigingPrediction {
            value: mean + residual.value,
            variance: residual.variance,
        })
    }

    /// Predicts on a uniform `rows × cols` lattice spanning the source
    /// grid's bounding box.
    pub fn predict_grid(&self, rows: usize, cols: usize) -> Result<PredictionGrid> {
        if rows < 2 || cols < 2 {
            return Err(Error::InvalidArgument(format!(
                "output resolution must be at least 2x2, got {rows}x{cols}"
            )));
        }
        let (lo, hi) = self.source_grid.lattice().bounds();
        let lattice = GridLattice::uniform(lo.x, hi.x, cols, lo.y, hi.y, rows)?;
        let predictions: Vec<KrigingPrediction> = lattice
            .nodes()
            .into_par_iter()
            .map(|s| self.predict(s))
            .collect::<Result<_>>()?;
        Ok(PredictionGrid {
            values: predictions.iter().map(|p| p.value).collect(),
            variances: predictions.iter().map(|p| p.variance).collect(),
            lattice,
        })
    }
}

/// Values and variances on an output lattice, row-major (y outer).
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionGrid {
    pub lattice: GridLattice,
    pub values: Vec<f64>,
    pub variances: Vec<f64>,
}

impl PredictionGrid {
    pub fn iter(&self) -> impl Iterator<Item = (Location2D, f64, f64)> + '_ {
        self.lattice
            .nodes()
            .into_iter()
            .zip(self.values.iter().copied().zip(self.variances.iter().copied()))
            .map(|(s, (v, var))| (s, v, var))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CvPoint {
    pub location: Location2D,
    pub observed: f64,
    pub predicted: f64,
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SkippedFold {
    pub location: Location2D,
    pub observed: f64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CvReport {
    pub method: Method,
    pub per_point: Vec<CvPoint>,
    pub skipped: Vec<SkippedFold>,
    pub rmse: f64,
    pub config: FitConfig,
    pub freeze_variogram: bool,
}

impl CvReport {
    /// Builds a report from completed folds, computing the RMSE.
    pub fn from_points(
        method: Method,
        per_point: Vec<CvPoint>,
        skipped: Vec<SkippedFold>,
        config: FitConfig,
        freeze_variogram: bool,
    ) -> Result<Self> {
        let errors: Vec<f64> = per_point.iter().map(|p| p.error).collect();
        let rmse = rmse(&errors)?;
        Ok(CvReport {
            method,
            per_point,
            skipped,
            rmse,
            config,
            freeze_variogram,
        })
    }
}

pub fn rmse(errors: &[f64]) -> Result<f64> {
    if errors.is_empty() {
        return Err(Error::InsufficientData("rmse of an empty error list".into()));
    }
    Ok((errors.iter().map(|e| e * e).sum::<f64>() / errors.len() as f64).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CvOptions {
    /// Fit the residual variogram once on the full grid and reuse it in
    /// every fold.
    pub freeze_variogram: bool,
}

/// Leave-one-out cross-validation: every present cell is deleted in turn,
/// the whole pipeline is refitted on the reduced grid and the deleted value
/// is predicted. Folds that cannot be fitted are reported as skipped.
pub fn loocv(grid: &GridTable, method: Method, config: &FitConfig, options: CvOptions) -> Result<CvReport> {
    let frozen = if options.freeze_variogram {
        let tol = config.polish_tol.unwrap_or_else(|| default_tolerance(grid));
        let polish = decompose(grid, tol, config.max_sweeps)?;
        Some(residual_variogram(&polish.residuals_as_scatter(grid.lattice())?, config)?)
    } else {
        None
    };

    let cells: Vec<(usize, usize, f64)> = grid.iter_present().collect();
    let folds: Vec<std::result::Result<CvPoint, SkippedFold>> = cells
        .par_iter()
        .map(|&(k, l, observed)| {
            let location = grid.lattice().node(k, l);
            let attempt = || -> Result<f64> {
                let reduced = grid.without_cell(k, l)?;
                let model = fit_with_variogram(&reduced, method, config, frozen)?;
                Ok(model.predict(location)?.value)
            };
            match attempt() {
                Ok(predicted) => Ok(CvPoint {
                    location,
                    observed,
                    predicted,
                    error: predicted - observed,
                }),
                Err(e) => Err(SkippedFold {
                    location,
                    observed,
                    reason: format!("{}: {e}", e.category()),
                }),
            }
        })
        .collect();

    let mut per_point = Vec::with_capacity(folds.len());
    let mut skipped = Vec::new();
    for fold in folds {
        match fold {
            Ok(p) => per_point.push(p),
            Err(s) => skipped.push(s),
        }
    }
    CvReport::from_points(method, per_point, skipped, config.clone(), options.freeze_variogram)
}

/// Convenience for building observations on a lattice in tests and tools.
pub fn grid_from_fn(lattice: GridLattice, f: impl Fn(Location2D) -> Option<f64>) -> Result<GridTable> {
    let cells = lattice.nodes().into_iter().map(f).collect();
    GridTable::new(lattice, cells)
}
