//! Exact-rational reference computations.

use num::rational::BigRational;
use num::{One, ToPrimitive, Zero};
use polishkrige::{Location2D, VariogramFamily};

fn rat(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite")
}

/// Covariance written out directly from the family formulas (practical
/// range: the correlation drops to about 5 % at `range`).
pub fn covariance(family: VariogramFamily, nugget: f64, psill: f64, range: f64, h: f64) -> f64 {
    if h == 0.0 {
        return nugget + psill;
    }
    let t = h / range;
    let corr = match family {
        VariogramFamily::Spherical => {
            if t >= 1.0 {
                0.0
            } else {
                1.0 - 1.5 * t + 0.5 * t * t * t
            }
        }
        VariogramFamily::Exponential => (-3.0 * t).exp(),
        VariogramFamily::Gaussian => (-3.0 * t * t).exp(),
    };
    psill * corr
}

/// Gauss-Jordan elimination without pivoting on a rational matrix.
/// Returns `None` when a zero pivot appears.
pub fn solve_exact(mut a: Vec<Vec<BigRational>>, mut b: Vec<BigRational>) -> Option<Vec<BigRational>> {
    let n = b.len();
    for c in 0..n {
        if a[c][c].is_zero() {
            return None;
        }
        for r in (c + 1)..n {
            if a[r][c].is_zero() {
                continue;
            }
            let f = &a[r][c] / &a[c][c];
            for k in c..n {
                let d = &f * &a[c][k];
                a[r][k] -= d;
            }
            let d = &f * &b[c];
            b[r] -= d;
        }
    }
    let mut x = vec![BigRational::zero(); n];
    for r in (0..n).rev() {
        let mut s = b[r].clone();
        for k in (r + 1)..n {
            s -= &a[r][k] * &x[k];
        }
        x[r] = s / &a[r][r];
    }
    Some(x)
}

pub struct ExactKriging {
    pub weights: Vec<f64>,
    pub lagrange: f64,
    pub value: f64,
    pub variance: f64,
    pub weight_sum: f64,
}

/// Ordinary kriging solved in exact arithmetic from the f64 covariances.
pub fn exact_ordinary_kriging(
    family: VariogramFamily,
    nugget: f64,
    psill: f64,
    range: f64,
    locations: &[Location2D],
    values: &[f64],
    target: Location2D,
) -> Option<ExactKriging> {
    let n = locations.len();
    let cov = |a: &Location2D, b: &Location2D| {
        let h = ((a.x - b.x).powi(2) + (a.y - b.y).powi(2)).sqrt();
        covariance(family, nugget, psill, range, h)
    };
    let mut a = vec![vec![BigRational::zero(); n + 1]; n + 1];
    let mut b = vec![BigRational::zero(); n + 1];
    for i in 0..n {
        for j in 0..n {
            a[i][j] = rat(cov(&locations[i], &locations[j]));
        }
        a[i][n] = BigRational::one();
        a[n][i] = BigRational::one();
        b[i] = rat(cov(&locations[i], &target));
    }
    b[n] = BigRational::one();
    let rhs = b.clone();
    let x = solve_exact(a, b)?;
    let mut value = BigRational::zero();
    let mut explained = BigRational::zero();
    let mut sum = BigRational::zero();
    for i in 0..n {
        value += &x[i] * rat(values[i]);
        explained += &x[i] * &rhs[i];
        sum += &x[i];
    }
    let c0 = rat(nugget + psill);
    let variance = c0 - explained - &x[n];
    let f = |r: &BigRational| r.to_f64().unwrap();
    Some(ExactKriging {
        weights: x[..n].iter().map(f).collect(),
        lagrange: f(&x[n]),
        value: f(&value),
        variance: f(&variance),
        weight_sum: f(&sum),
    })
}
