use crate::error::{Error, Result};
use crate::kriging::variogram::VariogramModel;
use crate::linalg::{LuFactorization, Matrix};
use crate::spatial::{Location2D, ScatterSet};

/// Variances down to this (relative to `C(0)`) are rounding noise and are
/// clamped to zero.
pub const VARIANCE_CLAMP: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct KrigingWeights {
    pub weights: Vec<f64>,
    /// Multiplier of the unit-sum constraint.
    pub lagrange: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KrigingPrediction {
    pub value: f64,
    pub variance: f64,
}

/// Factorized ordinary-kriging system for one data set and variogram.
///
/// Solves
/// ```text
/// [ K   1 ] [ λ   ]   [ k ]
/// [ 1ᵀ  0 ] [ μ_L ] = [ 1 ]
/// ```
/// with `K_ij = C(|s_i − s_j|)` and `k_i = C(|s_i − s|)`. The covariances
/// are divided by `C(0)` before factorization so the pivot threshold is
/// independent of the data scale; the multiplier is rescaled on output.
#[derive(Debug, Clone)]
pub struct OrdinaryKriging {
    locations: Vec<Location2D>,
    values: Vec<f64>,
    model: VariogramModel,
    scale: f64,
    lu: LuFactorization,
}

impl OrdinaryKriging {
    pub fn new(scatter: &ScatterSet, model: VariogramModel) -> Result<Self> {
        let locations = scatter.locations();
        let n = locations.len();
        let c0 = model.sill();
        let scale = if c0 > 0.0 { c0 } else { 1.0 };
        let a = Matrix::from_fn(n + 1, |i, j| {
            if i == n && j == n {
                0.0
            } else if i == n || j == n {
                1.0
            } else if i == j {
                c0 / scale
            } else {
                model.cov(locations[i].distance(&locations[j])) / scale
            }
        });
        let lu = LuFactorization::new(a, "ordinary kriging")?;
        Ok(OrdinaryKriging {
            locations,
            values: scatter.values(),
            model,
            scale,
            lu,
        })
    }

    pub fn model(&self) -> &VariogramModel {
        &self.model
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn condition_indicator(&self) -> f64 {
        self.lu.condition_indicator()
    }

    fn rhs(&self, target: Location2D) -> Vec<f64> {
        let mut b: Vec<f64> = self
            .locations
            .iter()
            .map(|s| self.model.cov(s.distance(&target)) / self.scale)
            .collect();
        b.push(1.0);
        b
    }

    pub fn weights(&self, target: Location2D) -> KrigingWeights {
        let mut x = self.lu.solve(&self.rhs(target));
        let lagrange = x.pop().unwrap() * self.scale;
        KrigingWeights { weights: x, lagrange }
    }

    /// Value `Σ λ_i Z(s_i)` and variance `C(0) − Σ λ_i k_i − μ_L`.
    pub fn predict(&self, target: Location2D) -> Result<KrigingPrediction> {
        if !target.is_finite() {
            return Err(Error::InvalidArgument("non-finite prediction location".into()));
        }
        let w = self.weights(target);
        let value = w.weights.iter().zip(&self.values).map(|(l, z)| l * z).sum();
        let explained: f64 = w
            .weights
            .iter()
            .zip(&self.locations)
            .map(|(l, s)| l * self.model.cov(s.distance(&target)))
            .sum();
        let c0 = self.model.sill();
        let mut variance = c0 - explained - w.lagrange;
        if variance < 0.0 {
            if variance >= -VARIANCE_CLAMP * c0.max(1.0) {
                variance = 0.0;
            } else {
                return Err(Error::SingularSystem {
                    context: "ordinary kriging (negative variance)",
                    condition: self.lu.condition_indicator(),
                });
            }
        }
        Ok(KrigingPrediction { value, variance })
    }
}

pub fn ok_solve(scatter: &ScatterSet, model: &VariogramModel, target: Location2D) -> Result<KrigingWeights> {
    Ok(OrdinaryKriging::new(scatter, *model)?.weights(target))
}

pub fn ok_predict(scatter: &ScatterSet, model: &VariogramModel, target: Location2D) -> Result<KrigingPrediction> {
    OrdinaryKriging::new(scatter, *model)?.predict(target)
}
