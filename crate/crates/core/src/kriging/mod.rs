//! Semivariogram estimation and ordinary kriging.

mod ordinary;
mod variogram;

pub use ordinary::{ok_predict, ok_solve, KrigingPrediction, KrigingWeights, OrdinaryKriging, VARIANCE_CLAMP};
pub use variogram::{
    empirical_semivariogram, fit_variogram, EmpiricalVariogram, FitOptions, VariogramFamily, VariogramFit,
    VariogramModel, DEFAULT_BINS,
};
