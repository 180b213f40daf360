use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::spatial::ScatterSet;

pub const DEFAULT_BINS: usize = 15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum VariogramFamily {
    #[default]
    Spherical,
    Exponential,
    Gaussian,
}

impl VariogramFamily {
    pub const ALL: [VariogramFamily; 3] = [
        VariogramFamily::Spherical,
        VariogramFamily::Exponential,
        VariogramFamily::Gaussian,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            VariogramFamily::Spherical => "spherical",
            VariogramFamily::Exponential => "exponential",
            VariogramFamily::Gaussian => "gaussian",
        }
    }

    /// Normalized structure `γ(h)/partial_sill` for `h > 0`; exponential and
    /// gaussian use the practical range (95% of the sill at `h = range`).
    fn shape(&self, h: f64, range: f64) -> f64 {
        let t = h / range;
        match self {
            VariogramFamily::Spherical => {
                if t >= 1.0 {
                    1.0
                } else {
                    1.5 * t - 0.5 * t * t * t
                }
            }
            VariogramFamily::Exponential => 1.0 - (-3.0 * t).exp(),
            VariogramFamily::Gaussian => 1.0 - (-3.0 * t * t).exp(),
        }
    }
}

impl fmt::Display for VariogramFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for VariogramFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "spherical" | "sph" => Ok(VariogramFamily::Spherical),
            "exponential" | "exp" => Ok(VariogramFamily::Exponential),
            "gaussian" | "gau" => Ok(VariogramFamily::Gaussian),
            other => Err(Error::InvalidArgument(format!("unknown variogram family `{other}`"))),
        }
    }
}

/// Isotropic parametric semivariogram.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VariogramModel {
    pub family: VariogramFamily,
    pub nugget: f64,
    pub partial_sill: f64,
    pub range: f64,
}

impl VariogramModel {
    pub fn new(family: VariogramFamily, nugget: f64, partial_sill: f64, range: f64) -> Result<Self> {
        if !(nugget >= 0.0 && nugget.is_finite()) {
            return Err(Error::InvalidArgument(format!("nugget must be >= 0, got {nugget}")));
        }
        if !(partial_sill >= 0.0 && partial_sill.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "partial sill must be >= 0, got {partial_sill}"
            )));
        }
        if !(range > 0.0 && range.is_finite()) {
            return Err(Error::InvalidArgument(format!("range must be > 0, got {range}")));
        }
        Ok(VariogramModel {
            family,
            nugget,
            partial_sill,
            range,
        })
    }

    pub fn sill(&self) -> f64 {
        self.nugget + self.partial_sill
    }

    /// `γ(h)`, with `γ(0) = 0`. Negative lags are treated by magnitude.
    pub fn semivariance(&self, h: f64) -> f64 {
        let h = h.abs();
        if h == 0.0 {
            0.0
        } else {
            self.nugget + self.partial_sill * self.family.shape(h, self.range)
        }
    }

    /// `C(h) = sill − γ(h)`, so `C(0)` is the full sill.
    pub fn covariance(&self, h: f64) -> Result<f64> {
        if !(h >= 0.0) {
            return Err(Error::InvalidArgument(format!("lag must be >= 0, got {h}")));
        }
        Ok(self.cov(h))
    }

    #[inline]
    pub(crate) fn cov(&self, h: f64) -> f64 {
        self.sill() - self.semivariance(h)
    }
}

/// Method-of-moments semivariogram estimate on equal-width lag bins.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalVariogram {
    pub lag_centers: Vec<f64>,
    pub gamma: Vec<f64>,
    pub pair_counts: Vec<usize>,
    /// Upper edge of the last bin; also caps the fitted range.
    pub max_lag: f64,
}

impl EmpiricalVariogram {
    pub fn new(lag_centers: Vec<f64>, gamma: Vec<f64>, pair_counts: Vec<usize>, max_lag: f64) -> Result<Self> {
        if lag_centers.len() != gamma.len() || gamma.len() != pair_counts.len() {
            return Err(Error::InvalidArgument("variogram lists differ in length".into()));
        }
        if pair_counts.iter().any(|&c| c == 0) || gamma.iter().any(|&g| !(g >= 0.0)) {
            return Err(Error::InvalidArgument(
                "variogram bins need positive counts and nonnegative gamma".into(),
            ));
        }
        if !(max_lag > 0.0) {
            return Err(Error::InvalidArgument("max lag must be > 0".into()));
        }
        Ok(EmpiricalVariogram {
            lag_centers,
            gamma,
            pair_counts,
            max_lag,
        })
    }

    pub fn len(&self) -> usize {
        self.gamma.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gamma.is_empty()
    }
}

/// `γ̂(h) = (1 / 2N(h)) Σ (Z(s_i) − Z(s_j))²` over pairs whose separation
/// falls in each of `n_bins` equal bins on `(0, max_lag]`. Bins are
/// half-open `[lo, hi)` except the last, which includes `max_lag`. Empty
/// bins are dropped. `max_lag` defaults to half the largest pairwise
/// distance.
pub fn empirical_semivariogram(
    scatter: &ScatterSet,
    n_bins: usize,
    max_lag: Option<f64>,
) -> Result<EmpiricalVariogram> {
    if scatter.len() < 2 {
        return Err(Error::InsufficientData("variogram needs at least two observations".into()));
    }
    if n_bins == 0 {
        return Err(Error::InvalidArgument("n_bins must be >= 1".into()));
    }
    let max_lag = match max_lag {
        Some(m) => m,
        None => 0.5 * scatter.max_pairwise_distance(),
    };
    if !(max_lag > 0.0 && max_lag.is_finite()) {
        return Err(Error::InvalidArgument(format!("max lag must be > 0, got {max_lag}")));
    }
    let width = max_lag / n_bins as f64;
    let mut sums = vec![0.0; n_bins];
    let mut counts = vec![0usize; n_bins];
    let obs = scatter.observations();
    for i in 0..obs.len() {
        for j in (i + 1)..obs.len() {
            let h = obs[i].location.distance(&obs[j].location);
            if h > max_lag {
                continue;
            }
            let mut bin = ((h / width) as usize).min(n_bins - 1);
            // Edges are b·width; keep the [lo, hi) rule exact at them.
            if bin > 0 && h < bin as f64 * width {
                bin -= 1;
            } else if bin + 1 < n_bins && h >= (bin + 1) as f64 * width {
                bin += 1;
            }
            let d = obs[i].value - obs[j].value;
            sums[bin] += d * d;
            counts[bin] += 1;
        }
    }
    let mut lag_centers = Vec::new();
    let mut gamma = Vec::new();
    let mut pair_counts = Vec::new();
    for b in 0..n_bins {
        if counts[b] > 0 {
            lag_centers.push((b as f64 + 0.5) * width);
            gamma.push(sums[b] / (2.0 * counts[b] as f64));
            pair_counts.push(counts[b]);
        }
    }
    if gamma.is_empty() {
        return Err(Error::InsufficientData(format!(
            "no observation pairs within max lag {max_lag}"
        )));
    }
    Ok(EmpiricalVariogram {
        lag_centers,
        gamma,
        pair_counts,
        max_lag,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VariogramFit {
    pub model: VariogramModel,
    /// Pair-count weighted sum of squared errors at the optimum.
    pub weighted_sse: f64,
    /// Set when every γ̂ is zero; the returned model then has zero sill.
    pub degenerate: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FitOptions {
    /// Holds the nugget at zero and fits only partial sill and range.
    pub zero_nugget: bool,
}

fn weighted_sse(emp: &EmpiricalVariogram, model: &VariogramModel) -> f64 {
    emp.lag_centers
        .iter()
        .zip(&emp.gamma)
        .zip(&emp.pair_counts)
        .map(|((&h, &g), &n)| {
            let d = g - model.semivariance(h);
            n as f64 * d * d
        })
        .sum()
}

/// Best `(nugget, partial_sill)` for a fixed range, with both `>= 0`.
/// For fixed range the model is linear in these two, so the constrained
/// least-squares problem is solved by checking the interior solution and
/// the faces.
fn profile_coefficients(emp: &EmpiricalVariogram, family: VariogramFamily, range: f64, zero_nugget: bool) -> (f64, f64) {
    let (mut sw, mut ss, mut sss, mut sy, mut ssy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for ((&h, &g), &n) in emp.lag_centers.iter().zip(&emp.gamma).zip(&emp.pair_counts) {
        let w = n as f64;
        let sh = family.shape(h, range);
        sw += w;
        ss += w * sh;
        sss += w * sh * sh;
        sy += w * g;
        ssy += w * sh * g;
    }
    let sse = |c0: f64, c1: f64| -> f64 {
        emp.lag_centers
            .iter()
            .zip(&emp.gamma)
            .zip(&emp.pair_counts)
            .map(|((&h, &g), &n)| {
                let d = g - c0 - c1 * family.shape(h, range);
                n as f64 * d * d
            })
            .sum()
    };
    let slope_only = if sss > 0.0 { (ssy / sss).max(0.0) } else { 0.0 };
    if zero_nugget {
        return (0.0, slope_only);
    }
    let mut candidates = vec![(0.0, slope_only), ((sy / sw).max(0.0), 0.0)];
    let det = sw * sss - ss * ss;
    if det > 1e-12 * sw * sss {
        let c0 = (sss * sy - ss * ssy) / det;
        let c1 = (sw * ssy - ss * sy) / det;
        if c0 >= 0.0 && c1 >= 0.0 {
            candidates.insert(0, (c0, c1));
        }
    }
    let mut best = candidates[0];
    let mut best_f = sse(best.0, best.1);
    for &(c0, c1) in &candidates[1..] {
        let f = sse(c0, c1);
        if f < best_f {
            best = (c0, c1);
            best_f = f;
        }
    }
    best
}

/// Derivative of the structure with respect to the range.
fn shape_range_derivative(family: VariogramFamily, h: f64, range: f64) -> f64 {
    let t = h / range;
    let ds_dt = match family {
        VariogramFamily::Spherical => {
            if t >= 1.0 {
                0.0
            } else {
                1.5 - 1.5 * t * t
            }
        }
        VariogramFamily::Exponential => 3.0 * (-3.0 * t).exp(),
        VariogramFamily::Gaussian => 6.0 * t * (-3.0 * t * t).exp(),
    };
    -ds_dt * t / range
}

/// Weighted least-squares fit of `family` to `emp`, weights = pair counts.
///
/// Nugget and partial sill are profiled out in closed form, leaving a
/// one-dimensional problem in the range on `[1e-6·max_lag, max_lag]`. A
/// log-spaced scan picks the best bracket, and the minimum inside it is
/// located by bisection on the sign of the analytic derivative, so the
/// result does not depend on optimizer step noise. When a pure-nugget
/// model fits as well as the optimum it is preferred.
pub fn fit_variogram(emp: &EmpiricalVariogram, family: VariogramFamily, options: FitOptions) -> Result<VariogramFit> {
    let gmax = emp.gamma.iter().fold(0.0_f64, |m, &g| m.max(g));
    if gmax == 0.0 {
        return Ok(VariogramFit {
            model: VariogramModel::new(family, 0.0, 0.0, emp.max_lag)?,
            weighted_sse: 0.0,
            degenerate: true,
        });
    }
    if emp.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "variogram fit needs at least 3 nonempty lag bins, got {}",
            emp.len()
        )));
    }

    let range_lo = 1e-6 * emp.max_lag;
    let range_hi = emp.max_lag;
    let zero_nugget = options.zero_nugget;
    let model_at = |range: f64| -> VariogramModel {
        let (nugget, partial_sill) = profile_coefficients(emp, family, range, zero_nugget);
        VariogramModel {
            family,
            nugget,
            partial_sill,
            range,
        }
    };
    let slope = |range: f64| -> f64 {
        let m = model_at(range);
        emp.lag_centers
            .iter()
            .zip(&emp.gamma)
            .zip(&emp.pair_counts)
            .map(|((&h, &g), &n)| {
                2.0 * n as f64 * (m.semivariance(h) - g) * m.partial_sill * shape_range_derivative(family, h, range)
            })
            .sum()
    };

    const SCAN: usize = 121;
    let ratio = range_hi / range_lo;
    let ranges: Vec<f64> = (0..SCAN)
        .map(|i| {
            if i == SCAN - 1 {
                range_hi
            } else {
                range_lo * ratio.powf(i as f64 / (SCAN - 1) as f64)
            }
        })
        .collect();
    let mut best_i = 0;
    let mut best_f = f64::INFINITY;
    for (i, &r) in ranges.iter().enumerate() {
        let f = weighted_sse(emp, &model_at(r));
        if f < best_f {
            best_f = f;
            best_i = i;
        }
    }

    let mut lo = ranges[best_i.saturating_sub(1)];
    let mut hi = ranges[(best_i + 1).min(SCAN - 1)];
    let range = if slope(lo) >= 0.0 && best_i == 0 {
        lo
    } else if slope(hi) <= 0.0 && best_i == SCAN - 1 {
        hi
    } else {
        // Descend from the scan point towards the sign change on either side.
        let center = ranges[best_i];
        if slope(center) > 0.0 {
            hi = center;
        } else {
            lo = center;
        }
        if slope(lo) >= 0.0 {
            lo
        } else if slope(hi) <= 0.0 {
            hi
        } else {
            loop {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if slope(mid) > 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            lo
        }
    };
    let mut model = model_at(range);
    let mut sse = weighted_sse(emp, &model);
    let scan_model = model_at(ranges[best_i]);
    if best_f < sse {
        model = scan_model;
        sse = best_f;
    }

    if !zero_nugget {
        let total: f64 = emp.pair_counts.iter().map(|&n| n as f64).sum();
        let mean = emp
            .gamma
            .iter()
            .zip(&emp.pair_counts)
            .map(|(&g, &n)| g * n as f64)
            .sum::<f64>()
            / total;
        let pure = VariogramModel {
            family,
            nugget: mean,
            partial_sill: 0.0,
            range: range_hi,
        };
        let pure_sse = weighted_sse(emp, &pure);
        let scale: f64 = emp.gamma.iter().zip(&emp.pair_counts).map(|(&g, &n)| n as f64 * g * g).sum();
        if pure_sse <= sse + 1e-12 * scale {
            model = pure;
            sse = pure_sse;
        }
    }

    Ok(VariogramFit {
        model,
        weighted_sse: sse,
        degenerate: false,
    })
}
