//! Median polish kriging for two-dimensional surrogate modeling.
//!
//! A gridded response is split by median polish into an additive trend and
//! residuals. The trend is carried between nodes either piecewise-linearly
//! (MPK) or by a biharmonic Green-function spline (IMPK), and the residuals
//! are predicted by ordinary kriging. Leave-one-out cross-validation compares
//! the two.

pub mod cli;
pub mod error;
pub mod kriging;
pub mod linalg;
pub mod mean_surface;
pub mod median_polish;
pub mod model_io;
pub mod predictor;
pub mod spatial;

pub use error::{Error, Result};
pub use kriging::{KrigingPrediction, VariogramFamily, VariogramModel};
pub use mean_surface::{green_function, BiharmonicModel, LinearMeanModel};
pub use median_polish::{decompose, MedianPolishFit};
pub use predictor::{fit, loocv, CvOptions, CvReport, FitConfig, Method, SplineCenters, SurfaceModel};
pub use spatial::{load_observations_csv, to_grid, CsvOptions, GridLattice, GridTable, Location2D, Observation, ScatterSet};
