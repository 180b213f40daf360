//! Command-line front end.
//!
//! Settings resolve in three layers: built-in defaults, then an optional
//! `key = value` file given with `--config`, then command-line flags. Keys in
//! the file are the long flag names without dashes prefix, e.g.
//! `variogram = exponential` or `max-lag = 6.5`.
//!
//! Exit codes: 0 success, 1 pipeline or domain error (stderr line
//! `error: <category>: <message>`), 2 usage error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::error::{Error, Result};
use crate::kriging::VariogramFamily;
use crate::model_io::{load_model, save_model};
use crate::predictor::{fit, loocv, CvOptions, CvReport, FitConfig, Method, PredictionGrid, SplineCenters, SurfaceModel};
use crate::spatial::{default_snap_tolerance, load_observations_csv, to_grid, CsvOptions, GridTable};

pub const DATA_DIR_ENV: &str = "POLISHKRIGE_DATA";
pub const DEFAULT_RESOLUTION: (usize, usize) = (100, 100);

#[derive(Debug, Parser)]
#[command(name = "polishkrige", version, about = "Median polish kriging (MPK / IMPK) surface prediction")]
struct Cli {
    /// Optional key=value configuration file; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fit a model to a CSV of gridded observations and write a model file.
    Fit {
        input: PathBuf,
        #[arg(long, short)]
        out: PathBuf,
        #[command(flatten)]
        opts: PipelineFlags,
    },
    /// Predict value and variance grids from a model file.
    Surface {
        model: PathBuf,
        /// Output grid CSV (x,y,value).
        #[arg(long, short)]
        out: PathBuf,
        /// Variance grid CSV (x,y,value).
        #[arg(long)]
        variance_out: Option<PathBuf>,
        /// Output resolution as ROWSxCOLS, e.g. 92x64.
        #[arg(long)]
        resolution: Option<String>,
        /// Also write ASCII PGM heatmaps next to each CSV.
        #[arg(long)]
        pgm: bool,
    },
    /// Leave-one-out cross-validation.
    Cv {
        input: PathBuf,
        /// Per-point report CSV; printed to stdout when omitted.
        #[arg(long, short)]
        out: Option<PathBuf>,
        /// Run both MPK and IMPK and print a comparison table.
        #[arg(long)]
        both: bool,
        /// Fit the residual variogram once on the full data.
        #[arg(long)]
        freeze_variogram: bool,
        #[command(flatten)]
        opts: PipelineFlags,
    },
}

#[derive(Debug, Args, Default)]
struct PipelineFlags {
    #[arg(long, value_parser = ["mpk", "impk"])]
    method: Option<String>,
    #[arg(long, value_parser = ["spherical", "exponential", "gaussian"])]
    variogram: Option<String>,
    #[arg(long)]
    bins: Option<usize>,
    #[arg(long)]
    max_lag: Option<f64>,
    /// Ridge added to the biharmonic spline system.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Median-polish convergence tolerance (default 1e-9 × data range).
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_sweeps: Option<usize>,
    /// Fix the variogram nugget at zero.
    #[arg(long)]
    zero_nugget: bool,
    /// IMPK spline anchors: observed cells or all lattice nodes.
    #[arg(long, value_parser = ["observed", "all"])]
    spline_centers: Option<String>,
    /// Krige from the k nearest residuals instead of all of them.
    #[arg(long)]
    neighbors: Option<usize>,
    #[arg(long)]
    x_col: Option<String>,
    #[arg(long)]
    y_col: Option<String>,
    #[arg(long)]
    z_col: Option<String>,
    #[arg(long)]
    delimiter: Option<char>,
    /// Reserved; no default code path is random.
    #[arg(long)]
    seed: Option<u64>,
}

/// Fully resolved settings for one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub method: Method,
    pub fit: FitConfig,
    pub resolution: (usize, usize),
    pub freeze_variogram: bool,
    pub csv: CsvOptions,
    pub seed: Option<u64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            method: Method::Impk,
            fit: FitConfig::default(),
            resolution: DEFAULT_RESOLUTION,
            freeze_variogram: false,
            csv: CsvOptions::default(),
            seed: None,
        }
    }
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

fn parse_value<T: std::str::FromStr>(key: &str, raw: &str) -> Result<T> {
    raw.trim()
        .parse()
        .map_err(|_| invalid(format!("bad value `{raw}` for `{key}`")))
}

fn parse_bool(key: &str, raw: &str) -> Result<bool> {
    match raw.trim() {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        other => Err(invalid(format!("bad boolean `{other}` for `{key}`"))),
    }
}

pub fn parse_resolution(raw: &str) -> Result<(usize, usize)> {
    let (p, q) = raw
        .trim()
        .split_once(['x', 'X'])
        .ok_or_else(|| invalid(format!("resolution must look like ROWSxCOLS, got `{raw}`")))?;
    let p: usize = parse_value("resolution", p)?;
    let q: usize = parse_value("resolution", q)?;
    if p < 2 || q < 2 {
        return Err(invalid("resolution must be at least 2x2"));
    }
    Ok((p, q))
}

impl RunConfig {
    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key = key.trim().replace('_', "-");
        match key.as_str() {
            "method" => self.method = value.trim().parse()?,
            "variogram" => self.fit.family = value.trim().parse::<VariogramFamily>()?,
            "bins" => self.fit.n_bins = parse_value(&key, value)?,
            "max-lag" => self.fit.max_lag = Some(parse_value(&key, value)?),
            "epsilon" => self.fit.epsilon = parse_value(&key, value)?,
            "tol" => self.fit.polish_tol = Some(parse_value(&key, value)?),
            "max-sweeps" => self.fit.max_sweeps = parse_value(&key, value)?,
            "zero-nugget" => self.fit.zero_nugget = parse_bool(&key, value)?,
            "spline-centers" => self.fit.spline_centers = value.trim().parse::<SplineCenters>()?,
            "neighbors" => self.fit.neighbors = Some(parse_value(&key, value)?),
            "resolution" => self.resolution = parse_resolution(value)?,
            "freeze-variogram" => self.freeze_variogram = parse_bool(&key, value)?,
            "x-col" => self.csv.x_column = value.trim().to_string(),
            "y-col" => self.csv.y_column = value.trim().to_string(),
            "z-col" => self.csv.value_column = value.trim().to_string(),
            "delimiter" => {
                let v = value.trim();
                let mut chars = v.chars();
                match (chars.next(), chars.next()) {
                    (Some(c), None) if c.is_ascii() => self.csv.delimiter = c as u8,
                    _ => return Err(invalid(format!("delimiter must be one ASCII character, got `{v}`"))),
                }
            }
            "seed" => self.seed = Some(parse_value(&key, value)?),
            other => return Err(invalid(format!("unknown configuration key `{other}`"))),
        }
        Ok(())
    }

    /// Applies every setting of a `key = value` file; `#` starts a comment.
    pub fn apply_file_contents(&mut self, text: &str) -> Result<()> {
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| invalid(format!("config line {}: expected key = value", i + 1)))?;
            self.set(k, v)?;
        }
        Ok(())
    }

    fn apply_flags(&mut self, f: &PipelineFlags) -> Result<()> {
        let pairs: [(&str, Option<String>); 14] = [
            ("method", f.method.clone()),
            ("variogram", f.variogram.clone()),
            ("bins", f.bins.map(|v| v.to_string())),
            ("max-lag", f.max_lag.map(|v| v.to_string())),
            ("epsilon", f.epsilon.map(|v| v.to_string())),
            ("tol", f.tol.map(|v| v.to_string())),
            ("max-sweeps", f.max_sweeps.map(|v| v.to_string())),
            ("zero-nugget", f.zero_nugget.then(|| "true".into())),
            ("spline-centers", f.spline_centers.clone()),
            ("neighbors", f.neighbors.map(|v| v.to_string())),
            ("x-col", f.x_col.clone()),
            ("y-col", f.y_col.clone()),
            ("z-col", f.z_col.clone()),
            ("delimiter", f.delimiter.map(|c| c.to_string())),
        ];
        for (k, v) in pairs {
            if let Some(v) = v {
                self.set(k, &v)?;
            }
        }
        if let Some(seed) = f.seed {
            self.seed = Some(seed);
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let f = &self.fit;
        if f.n_bins == 0 {
            return Err(invalid("bins must be >= 1"));
        }
        if f.max_sweeps == 0 {
            return Err(invalid("max-sweeps must be >= 1"));
        }
        if let Some(m) = f.max_lag {
            if !(m > 0.0 && m.is_finite()) {
                return Err(invalid("max-lag must be > 0"));
            }
        }
        if let Some(t) = f.polish_tol {
            if !(t > 0.0 && t.is_finite()) {
                return Err(invalid("tol must be > 0"));
            }
        }
        if !(f.epsilon >= 0.0 && f.epsilon.is_finite()) {
            return Err(invalid("epsilon must be >= 0"));
        }
        if f.neighbors == Some(0) {
            return Err(invalid("neighbors must be >= 1"));
        }
        Ok(())
    }
}

/// Resolves an input path: as given if it exists, otherwise relative to
/// `$POLISHKRIGE_DATA`, otherwise relative to `./data`.
pub fn resolve_input(path: &Path) -> PathBuf {
    if path.exists() || path.is_absolute() {
        return path.to_path_buf();
    }
    let mut candidates = Vec::new();
    if let Some(dir) = std::env::var_os(DATA_DIR_ENV) {
        candidates.push(PathBuf::from(dir).join(path));
    }
    candidates.push(Path::new("data").join(path));
    candidates
        .into_iter()
        .find(|c| c.exists())
        .unwrap_or_else(|| path.to_path_buf())
}

pub fn load_grid(path: &Path, csv: &CsvOptions) -> Result<GridTable> {
    let scatter = load_observations_csv(resolve_input(path), csv)?;
    to_grid(&scatter, default_snap_tolerance(&scatter))
}

pub fn fit_summary(model: &SurfaceModel) -> String {
    let grid = model.source_grid();
    let polish = model.polish();
    let v = model.variogram();
    let mut lines = vec![
        format!("method: {}", model.method()),
        format!(
            "grid: {} rows x {} columns, {} observations",
            grid.p(),
            grid.q(),
            grid.present_count()
        ),
        format!(
            "median polish: {} sweeps, {}",
            polish.sweeps,
            if polish.converged { "converged" } else { "not converged" }
        ),
        format!(
            "variogram: {} nugget={} sill={} partial_sill={} range={}",
            v.model.family,
            v.model.nugget,
            v.model.sill(),
            v.model.partial_sill,
            v.model.range
        ),
    ];
    if v.degenerate {
        lines.push("warning: degenerate-variogram: all empirical semivariances are zero".into());
    }
    lines.join("\n") + "\n"
}

/// Long-format grid CSV with header `x,y,value`, row-major, 6 decimals.
pub fn grid_csv(grid: &PredictionGrid, variances: bool) -> String {
    let mut out = String::from("x,y,value\n");
    for (s, v, var) in grid.iter() {
        let z = if variances { var } else { v };
        out.push_str(&format!("{:.6},{:.6},{:.6}\n", s.x, s.y, z));
    }
    out
}

/// ASCII P2 heatmap; the first image row is the largest y. Values are
/// min-max scaled to 0..=255 (all-equal grids map to 0).
pub fn grid_pgm(grid: &PredictionGrid, variances: bool) -> String {
    let data = if variances { &grid.variances } else { &grid.values };
    let (p, q) = (grid.lattice.p(), grid.lattice.q());
    let lo = data.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = data.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = hi - lo;
    let mut out = format!("P2\n{q} {p}\n255\n");
    for k in (0..p).rev() {
        let row: Vec<String> = (0..q)
            .map(|l| {
                let v = data[k * q + l];
                let level = if span > 0.0 { ((v - lo) / span * 255.0).round() } else { 0.0 };
                (level as u8).to_string()
            })
            .collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

/// Per-point CSV followed by `RMSE,<method>,<value>`.
pub fn format_cv_report(report: &CvReport) -> String {
    let mut out = String::from("x,y,observed,predicted,error\n");
    for p in &report.per_point {
        out.push_str(&format!(
            "{:.6},{:.6},{:.6},{:.6},{:.6}\n",
            p.location.x, p.location.y, p.observed, p.predicted, p.error
        ));
    }
    out.push_str(&format!("RMSE,{},{:.6}\n", report.method, report.rmse));
    out
}

pub fn format_comparison(reports: &[CvReport]) -> String {
    let mut out = String::from("method,rmse,folds,skipped\n");
    for r in reports {
        out.push_str(&format!(
            "{},{:.6},{},{}\n",
            r.method,
            r.rmse,
            r.per_point.len(),
            r.skipped.len()
        ));
    }
    out
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn with_suffix(path: &Path, suffix: &str, ext: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}{suffix}.{ext}"))
}

fn base_config(config_file: Option<&Path>) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    if let Some(path) = config_file {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        cfg.apply_file_contents(&text)?;
    }
    Ok(cfg)
}

fn execute(cli: Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<()> {
    let mut cfg = base_config(cli.config.as_deref())?;
    let io_err = |source: std::io::Error| Error::Io {
        path: PathBuf::from("<stdout>"),
        source,
    };
    match cli.command {
        Command::Fit { input, out, opts } => {
            cfg.apply_flags(&opts)?;
            cfg.validate()?;
            let grid = load_grid(&input, &cfg.csv)?;
            let model = fit(&grid, cfg.method, &cfg.fit)?;
            save_model(&model, &out)?;
            write!(stdout, "{}", fit_summary(&model)).map_err(io_err)?;
            writeln!(stdout, "model: {}", out.display()).map_err(io_err)?;
        }
        Command::Surface {
            model,
            out,
            variance_out,
            resolution,
            pgm,
        } => {
            if let Some(r) = resolution {
                cfg.set("resolution", &r)?;
            }
            let model = load_model(&model)?;
            let (rows, cols) = cfg.resolution;
            let grid = model.predict_grid(rows, cols)?;
            write_file(&out, &grid_csv(&grid, false))?;
            if pgm {
                write_file(&with_suffix(&out, "", "pgm"), &grid_pgm(&grid, false))?;
            }
            if let Some(vout) = variance_out {
                write_file(&vout, &grid_csv(&grid, true))?;
                if pgm {
                    write_file(&with_suffix(&vout, "", "pgm"), &grid_pgm(&grid, true))?;
                }
            }
            writeln!(stdout, "surface: {rows}x{cols} {} grid written to {}", model.method(), out.display())
                .map_err(io_err)?;
        }
        Command::Cv {
            input,
            out,
            both,
            freeze_variogram,
            opts,
        } => {
            cfg.apply_flags(&opts)?;
            if freeze_variogram {
                cfg.freeze_variogram = true;
            }
            cfg.validate()?;
            let grid = load_grid(&input, &cfg.csv)?;
            let methods = if both {
                vec![Method::Mpk, Method::Impk]
            } else {
                vec![cfg.method]
            };
            let options = CvOptions {
                freeze_variogram: cfg.freeze_variogram,
            };
            let mut reports = Vec::new();
            for method in methods {
                let report = loocv(&grid, method, &cfg.fit, options)?;
                if !report.skipped.is_empty() {
                    writeln!(stderr, "{}: skipped {} fold(s)", method, report.skipped.len()).map_err(io_err)?;
                    for s in &report.skipped {
                        writeln!(stderr, "  ({}, {}): {}", s.location.x, s.location.y, s.reason).map_err(io_err)?;
                    }
                }
                reports.push(report);
            }
            match (&out, both) {
                (Some(path), false) => write_file(path, &format_cv_report(&reports[0]))?,
                (Some(path), true) => {
                    for r in &reports {
                        let suffix = format!("_{}", r.method.name().to_ascii_lowercase());
                        write_file(&with_suffix(path, &suffix, "csv"), &format_cv_report(r))?;
                    }
                }
                (None, false) => write!(stdout, "{}", format_cv_report(&reports[0])).map_err(io_err)?,
                (None, true) => {}
            }
            if both {
                write!(stdout, "{}", format_comparison(&reports)).map_err(io_err)?;
            } else if out.is_some() {
                writeln!(stdout, "RMSE,{},{:.6}", reports[0].method, reports[0].rmse).map_err(io_err)?;
            }
        }
    }
    Ok(())
}

/// Runs the CLI with explicit arguments and streams; returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let _ = write!(stderr, "{}", e.render());
            return if code == 0 { 0 } else { 2 };
        }
    };
    match execute(cli, stdout, stderr) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {}: {e}", e.category());
            1
        }
    }
}
