//! Plain-text model files.
//!
//! ```text
//! polishkrige-model 1
//! method = IMPK
//!
//! [config]
//! polish_tol = auto
//! ...
//! [lattice]
//! x = 1 2 3
//! y = 1 2
//! [grid]
//! cells = 8.1 NA 9.7 ...
//! [polish]
//! ...
//! [variogram]
//! ...
//! [spline]            # IMPK only
//! ...
//! ```
//!
//! Numbers are written in Rust's shortest round-trip form, so a loaded model
//! predicts bit-identically to the one that was saved. Missing cells are
//! written as `NA`.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::kriging::{VariogramFit, VariogramModel};
use crate::mean_surface::{BiharmonicModel, LinearMeanModel};
use crate::median_polish::MedianPolishFit;
use crate::predictor::{FitConfig, MeanComponent, Method, SurfaceModel};
use crate::spatial::{GridLattice, GridTable};

pub const FORMAT_HEADER: &str = "polishkrige-model 1";

fn join(values: &[f64]) -> String {
    values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
}

fn join_opt(values: &[Option<f64>]) -> String {
    values
        .iter()
        .map(|v| v.map_or_else(|| "NA".to_string(), |x| x.to_string()))
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn write_model(model: &SurfaceModel) -> String {
    let mut out = String::new();
    let cfg = model.config();
    let grid = model.source_grid();
    let polish = model.polish();
    let vario = model.variogram();

    // Writing to a String cannot fail.
    let _ = writeln!(out, "{FORMAT_HEADER}");
    let _ = writeln!(out, "method = {}", model.method());
    let _ = writeln!(out, "\n[config]");
    let _ = writeln!(out, "polish_tol = {}", cfg.polish_tol.map_or("auto".into(), |v| v.to_string()));
    let _ = writeln!(out, "max_sweeps = {}", cfg.max_sweeps);
    let _ = writeln!(out, "family = {}", cfg.family);
    let _ = writeln!(out, "n_bins = {}", cfg.n_bins);
    let _ = writeln!(out, "max_lag = {}", cfg.max_lag.map_or("auto".into(), |v| v.to_string()));
    let _ = writeln!(out, "zero_nugget = {}", cfg.zero_nugget);
    let _ = writeln!(out, "epsilon = {}", cfg.epsilon);
    let _ = writeln!(out, "spline_centers = {}", cfg.spline_centers.name());
    let _ = writeln!(out, "neighbors = {}", cfg.neighbors.map_or("none".into(), |k| k.to_string()));

    let _ = writeln!(out, "\n[lattice]");
    let _ = writeln!(out, "x = {}", join(grid.lattice().x_coords()));
    let _ = writeln!(out, "y = {}", join(grid.lattice().y_coords()));

    let _ = writeln!(out, "\n[grid]");
    let _ = writeln!(out, "cells = {}", join_opt(grid.cells()));

    let _ = writeln!(out, "\n[polish]");
    let _ = writeln!(out, "overall = {}", polish.overall);
    let _ = writeln!(out, "row_effects = {}", join(&polish.row_effects));
    let _ = writeln!(out, "col_effects = {}", join(&polish.col_effects));
    let _ = writeln!(out, "residuals = {}", join_opt(&polish.residuals));
    let _ = writeln!(out, "sweeps = {}", polish.sweeps);
    let _ = writeln!(out, "converged = {}", polish.converged);

    let _ = writeln!(out, "\n[variogram]");
    let _ = writeln!(out, "family = {}", vario.model.family);
    let _ = writeln!(out, "nugget = {}", vario.model.nugget);
    let _ = writeln!(out, "partial_sill = {}", vario.model.partial_sill);
    let _ = writeln!(out, "range = {}", vario.model.range);
    let _ = writeln!(out, "weighted_sse = {}", vario.weighted_sse);
    let _ = writeln!(out, "degenerate = {}", vario.degenerate);

    if let MeanComponent::Biharmonic { spline, offset } = model.mean_component() {
        let _ = writeln!(out, "\n[spline]");
        let _ = writeln!(out, "offset = {offset}");
        let _ = writeln!(out, "dimension = {}", spline.dimension());
        let _ = writeln!(out, "regularization = {}", spline.regularization());
        let _ = writeln!(out, "centers = {}", join(spline.centers()));
        let _ = writeln!(out, "strengths = {}", join(spline.strengths()));
    }
    out
}

pub fn save_model(model: &SurfaceModel, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, write_model(model)).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load_model(path: impl AsRef<Path>) -> Result<SurfaceModel> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::BadModel(format!("{}: {e}", path.display())))?;
    read_model(&text)
}

struct Sections<'a> {
    map: HashMap<(String, String), &'a str>,
}

impl<'a> Sections<'a> {
    fn parse(text: &'a str) -> Result<Self> {
        let mut lines = text.lines();
        match lines.next() {
            Some(first) if first.trim() == FORMAT_HEADER => {}
            Some(first) => {
                return Err(Error::BadModel(format!(
                    "unsupported header `{}` (expected `{FORMAT_HEADER}`)",
                    first.trim()
                )))
            }
            None => return Err(Error::BadModel("empty model file".into())),
        }
        let mut section = String::new();
        let mut map = HashMap::new();
        for (i, line) in lines.enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                section = name.to_string();
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::BadModel(format!("line {}: expected `key = value`", i + 2)))?;
            map.insert((section.clone(), key.trim().to_string()), value.trim());
        }
        Ok(Sections { map })
    }

    fn has_section(&self, section: &str) -> bool {
        self.map.keys().any(|(s, _)| s == section)
    }

    fn raw(&self, section: &str, key: &str) -> Result<&'a str> {
        self.map
            .get(&(section.to_string(), key.to_string()))
            .copied()
            .ok_or_else(|| Error::BadModel(format!("missing `{key}` in [{section}]")))
    }

    fn parse_as<T: std::str::FromStr>(&self, section: &str, key: &str) -> Result<T> {
        let raw = self.raw(section, key)?;
        raw.parse()
            .map_err(|_| Error::BadModel(format!("bad value `{raw}` for `{key}` in [{section}]")))
    }

    fn optional<T: std::str::FromStr>(&self, section: &str, key: &str, none: &str) -> Result<Option<T>> {
        if self.raw(section, key)? == none {
            Ok(None)
        } else {
            self.parse_as(section, key).map(Some)
        }
    }

    fn floats(&self, section: &str, key: &str) -> Result<Vec<f64>> {
        self.raw(section, key)?
            .split_whitespace()
            .map(|t| {
                t.parse::<f64>()
                    .map_err(|_| Error::BadModel(format!("bad number `{t}` in `{key}` of [{section}]")))
            })
            .collect()
    }

    fn optional_floats(&self, section: &str, key: &str) -> Result<Vec<Option<f64>>> {
        self.raw(section, key)?
            .split_whitespace()
            .map(|t| {
                if t == "NA" {
                    Ok(None)
                } else {
                    t.parse::<f64>()
                        .map(Some)
                        .map_err(|_| Error::BadModel(format!("bad number `{t}` in `{key}` of [{section}]")))
                }
            })
            .collect()
    }
}

fn bad(e: Error) -> Error {
    match e {
        Error::BadModel(_) => e,
        other => Error::BadModel(other.to_string()),
    }
}

pub fn read_model(text: &str) -> Result<SurfaceModel> {
    let s = Sections::parse(text)?;
    let method: Method = s.parse_as("", "method")?;

    let config = FitConfig {
        polish_tol: s.optional("config", "polish_tol", "auto")?,
        max_sweeps: s.parse_as("config", "max_sweeps")?,
        family: s.parse_as("config", "family")?,
        n_bins: s.parse_as("config", "n_bins")?,
        max_lag: s.optional("config", "max_lag", "auto")?,
        zero_nugget: s.parse_as("config", "zero_nugget")?,
        epsilon: s.parse_as("config", "epsilon")?,
        spline_centers: s.parse_as("config", "spline_centers")?,
        neighbors: s.optional("config", "neighbors", "none")?,
    };

    let lattice = GridLattice::new(s.floats("lattice", "x")?, s.floats("lattice", "y")?).map_err(bad)?;
    let grid = GridTable::new(lattice.clone(), s.optional_floats("grid", "cells")?).map_err(bad)?;

    let polish = MedianPolishFit {
        overall: s.parse_as("polish", "overall")?,
        row_effects: s.floats("polish", "row_effects")?,
        col_effects: s.floats("polish", "col_effects")?,
        residuals: s.optional_floats("polish", "residuals")?,
        sweeps: s.parse_as("polish", "sweeps")?,
        converged: s.parse_as("polish", "converged")?,
    };
    if polish.row_effects.len() != lattice.p()
        || polish.col_effects.len() != lattice.q()
        || polish.residuals.len() != lattice.p() * lattice.q()
        || polish
            .residuals
            .iter()
            .zip(grid.cells())
            .any(|(r, c)| r.is_some() != c.is_some())
    {
        return Err(Error::BadModel("polish section does not match the grid".into()));
    }
    let residual_scatter = polish.residuals_as_scatter(&lattice).map_err(bad)?;

    let variogram = VariogramFit {
        model: VariogramModel::new(
            s.parse_as("variogram", "family")?,
            s.parse_as("variogram", "nugget")?,
            s.parse_as("variogram", "partial_sill")?,
            s.parse_as("variogram", "range")?,
        )
        .map_err(bad)?,
        weighted_sse: s.parse_as("variogram", "weighted_sse")?,
        degenerate: s.parse_as("variogram", "degenerate")?,
    };

    let mean = match method {
        Method::Mpk => MeanComponent::Linear(LinearMeanModel::new(polish.clone(), lattice).map_err(bad)?),
        Method::Impk => {
            if !s.has_section("spline") {
                return Err(Error::BadModel("IMPK model without [spline] section".into()));
            }
            MeanComponent::Biharmonic {
                spline: BiharmonicModel::from_parts(
                    s.parse_as("spline", "dimension")?,
                    s.floats("spline", "centers")?,
                    s.floats("spline", "strengths")?,
                    s.parse_as("spline", "regularization")?,
                )
                .map_err(bad)?,
                offset: s.parse_as("spline", "offset")?,
            }
        }
    };

    SurfaceModel::assemble(method, mean, polish, residual_scatter, variogram, grid, config).map_err(bad)
}
