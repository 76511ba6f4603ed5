//! The `beltrami` command line: `basis`, `verify`, `bvp` and `example`.
//!
//! Exit codes: 0 success, 1 a verification check failed, 2 invalid
//! configuration or unusable paths, 3 numerical failure.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::beltrami::{
    alpha_b3_scale, beltrami_residual, div_alpha_residual, maineq_residual, BeltramiBasis, ScalarBasisElement,
    VectorField,
};
use crate::bvp::{self, CollocationProblem};
use crate::error::Error;
use crate::field::{ComplexField, Grid, Rect, ScalarField};
use crate::formal_powers::{Family, RecursionOptions};
use crate::profile::{AlphaSpec, GeneratingFunction, ProfileConfig};
use crate::quadrature;
use crate::vekua::{second_kind_residual, vekua_residual};

#[derive(Debug, Parser)]
#[command(name = "beltrami", version, about = "Planar Beltrami fields rot B + αB = 0 for α = α(y)")]
pub struct Cli {
    /// Run configuration (JSON); the built-in example is used when omitted.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    /// Override the highest formal power order.
    #[arg(long, global = true)]
    pub nmax: Option<usize>,
    /// Override the quadrature tolerance.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build the basis and write a manifest plus one CSV per element.
    Basis,
    /// Check every element against the residual thresholds.
    Verify {
        /// Directory of element CSVs (as written by `basis`) to check
        /// against freshly generated values.
        #[arg(long)]
        fields: Option<PathBuf>,
    },
    /// Solve a Dirichlet collocation problem.
    Bvp {
        /// Problem specification (JSON).
        #[arg(long)]
        problem: PathBuf,
    },
    /// Compare the generated basis with the closed forms for α = (1 − y²)^(−1/2).
    Example,
}

/// `[lo, hi, count]` in each direction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub x: [f64; 3],
    pub y: [f64; 3],
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { x: [-0.9, 0.9, 19.0], y: [-0.9, 0.9, 19.0] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    pub quadrature: f64,
    pub nodes: usize,
    pub beltrami: f64,
    pub div_alpha: f64,
    pub maineq: f64,
    pub vekua: f64,
    pub second_kind: f64,
    pub csv: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            quadrature: quadrature::DEFAULT_TOL,
            nodes: quadrature::DEFAULT_NODES,
            beltrami: 1e-5,
            div_alpha: 1e-8,
            maineq: 1e-5,
            vekua: 1e-6,
            second_kind: 1e-6,
            csv: 1e-10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    #[serde(flatten)]
    pub profile: ProfileConfig,
    #[serde(default)]
    pub z0: [f64; 2],
    #[serde(default = "default_n_max")]
    pub n_max: usize,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default)]
    pub tolerances: Tolerances,
}

fn default_n_max() -> usize {
    3
}

impl RunConfig {
    /// `α = (1 − y²)^(−1/2)` on `[−0.95, 0.95]`, `c1 = 0`, `c2 = 1`, `z0 = 0`.
    pub fn example() -> Self {
        Self {
            profile: ProfileConfig {
                alpha: AlphaSpec::Preset { preset: "example_inv_sqrt".into(), k: None },
                domain: [-0.95, 0.95],
                c1: 0.0,
                c2: 1.0,
                y_ref: Some(0.0),
                anchor: None,
            },
            z0: [0.0, 0.0],
            n_max: 3,
            grid: GridSpec::default(),
            tolerances: Tolerances::default(),
        }
    }

    /// Hex SHA-256 of the canonical JSON serialization.
    pub fn hash(&self) -> String {
        let text = serde_json::to_string(self).expect("config serializes");
        Sha256::digest(text.as_bytes()).iter().fold(String::new(), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
    }

    fn grid(&self) -> Result<Grid, CliError> {
        let count = |v: f64, axis: &str| {
            if v.fract() != 0.0 || !(3.0..=1e6).contains(&v) {
                return Err(CliError::Config(format!("grid {axis} count must be an integer ≥ 3, got {v}")));
            }
            Ok(v as usize)
        };
        let (gx, gy) = (&self.grid.x, &self.grid.y);
        let rect = Rect::new(gx[0], gx[1], gy[0], gy[1]).map_err(|e| CliError::Config(format!("grid: {e}")))?;
        Grid::new(rect, count(gx[2], "x")?, count(gy[2], "y")?).map_err(|e| CliError::Config(format!("grid: {e}")))
    }

    fn generator(&self) -> Result<GeneratingFunction, CliError> {
        let t = &self.tolerances;
        if !(t.quadrature > 0.0) || t.nodes < 32 {
            return Err(CliError::Config("tolerances.quadrature must be positive and tolerances.nodes ≥ 32".into()));
        }
        self.profile.generating_function(t.quadrature, t.nodes).map_err(CliError::from)
    }

    fn basis(&self, n_max: usize) -> Result<BeltramiBasis, CliError> {
        let g = self.generator()?;
        let opts = RecursionOptions { tol: self.tolerances.quadrature, nodes: self.tolerances.nodes };
        let z0 = Complex64::new(self.z0[0], self.z0[1]);
        BeltramiBasis::build_with(g, z0, n_max, opts).map_err(CliError::from)
    }

    fn meta(&self) -> Value {
        json!({
            "config_hash": self.hash(),
            "tolerances": self.tolerances,
            "generator": concat!("beltrami ", env!("CARGO_PKG_VERSION")),
        })
    }

    fn csv_header(&self) -> String {
        let t = &self.tolerances;
        format!(
            "# config_hash: {}\n# tolerances: quadrature={:?} nodes={} beltrami={:?} div_alpha={:?} maineq={:?} vekua={:?} second_kind={:?}\n",
            self.hash(),
            t.quadrature,
            t.nodes,
            t.beltrami,
            t.div_alpha,
            t.maineq,
            t.vekua,
            t.second_kind
        )
    }
}

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numerical(String),
    Check(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Check(_) => 1,
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
            CliError::Check(m) => write!(f, "verification failed: {m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::NonConvergence { .. }
            | Error::NonFiniteSample { .. }
            | Error::Compatibility { .. }
            | Error::Residual { .. }
            | Error::IllConditioned { .. } => CliError::Numerical(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

/// Parses `args` and runs the command; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(summary) => {
            println!("{summary}");
            0
        }
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}

/// Loads the configuration and applies the command line overrides.
pub fn load_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut config = match &cli.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
            serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?
        }
        None => RunConfig::example(),
    };
    if let Some(n) = cli.nmax {
        config.n_max = n;
    }
    if let Some(t) = cli.tol {
        config.tolerances.quadrature = t;
    }
    Ok(config)
}

pub fn execute(cli: &Cli) -> Result<String, CliError> {
    let config = load_config(cli)?;
    fs::create_dir_all(&cli.out).map_err(|e| CliError::Config(format!("cannot create {}: {e}", cli.out.display())))?;
    match &cli.command {
        Command::Basis => cmd_basis(&config, &cli.out),
        Command::Verify { fields } => cmd_verify(&config, &cli.out, fields.as_deref()),
        Command::Bvp { problem } => cmd_bvp(&config, &cli.out, problem),
        Command::Example => cmd_example(&config, &cli.out),
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))
}

/// Writes `value` with its `meta` block, if any, as the first key.
fn write_json(path: &Path, value: &Value) -> Result<(), CliError> {
    let value = match value {
        Value::Object(map) if map.contains_key("meta") => {
            let mut ordered = serde_json::Map::new();
            ordered.insert("meta".into(), map["meta"].clone());
            ordered.extend(map.iter().filter(|(k, _)| *k != "meta").map(|(k, v)| (k.clone(), v.clone())));
            Value::Object(ordered)
        }
        other => other.clone(),
    };
    let mut text = serde_json::to_string_pretty(&value).expect("json value serializes");
    text.push('\n');
    write_file(path, &text)
}

/// File name of an element's CSV, e.g. `B3_2_v.csv`.
pub fn element_file(e: &ScalarBasisElement) -> String {
    format!("B3_{}_{}.csv", e.n(), if e.flavor() == crate::beltrami::Flavor::U { "u" } else { "v" })
}

fn field_csv(config: &RunConfig, field: &dyn VectorField, grid: &Grid) -> String {
    let mut s = config.csv_header();
    s.push_str("x,y,B1,B2,B3\n");
    for (x, y) in grid.points() {
        let b = field.components(x, y);
        let _ = writeln!(s, "{x:?},{y:?},{:?},{:?},{:?}", b[0], b[1], b[2]);
    }
    s
}

fn check_grid_in_window(basis: &BeltramiBasis, grid: &Grid) -> Result<(), CliError> {
    let window = basis.formal_powers().y_interval();
    if !window.contains_interval(&grid.rect().y) {
        return Err(CliError::Config(format!(
            "grid y-range [{}, {}] leaves the working window [{}, {}]",
            grid.rect().y.lo(),
            grid.rect().y.hi(),
            window.lo(),
            window.hi()
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
struct ElementReport {
    index: usize,
    name: String,
    n: usize,
    flavor: crate::beltrami::Flavor,
    first: f64,
    second: f64,
    third: f64,
    third_relative: f64,
    div_alpha: f64,
    maineq: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    vekua: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    second_kind: Option<f64>,
}

fn element_report(basis: &BeltramiBasis, index: usize, grid: &Grid, with_vekua: bool) -> ElementReport {
    let e = &basis.elements()[index];
    let field = e.field();
    let alpha = basis.alpha();
    let r = beltrami_residual(&field, alpha, grid);
    let scale = alpha_b3_scale(&field, alpha, grid);
    let (vekua, second_kind) = if with_vekua {
        let fp = basis.formal_powers().clone();
        let a = e.flavor().coefficient();
        let n = e.n();
        let (w_fp, o_fp) = (fp.clone(), fp.clone());
        let w = ComplexField::new(
            move |x, y| w_fp.first_kind(a, n, Complex64::new(x, y)).unwrap_or(Complex64::new(f64::NAN, f64::NAN)),
            grid.clone(),
        );
        let omega = ComplexField::new(
            move |x, y| o_fp.formal_power(a, n, Complex64::new(x, y)).unwrap_or(Complex64::new(f64::NAN, f64::NAN)),
            grid.clone(),
        );
        let (g1, g2) = (basis.generator().clone(), basis.generator().clone());
        let f0 = ScalarField::with_grad(move |_, y| g1.f0(y), move |_, y| (0.0, g2.f0_deriv(y)));
        (Some(vekua_residual(&w, &f0)), Some(second_kind_residual(&omega, basis.generator())))
    } else {
        (None, None)
    };
    ElementReport {
        index,
        name: e.name(),
        n: e.n(),
        flavor: e.flavor(),
        first: r.first,
        second: r.second,
        third: r.third,
        third_relative: if scale > 0.0 { r.third / scale } else { r.third },
        div_alpha: div_alpha_residual(&field, alpha, grid),
        maineq: maineq_residual(&e.to_scalar_field(), alpha, grid),
        vekua,
        second_kind,
    }
}

fn cmd_basis(config: &RunConfig, out: &Path) -> Result<String, CliError> {
    let grid = config.grid()?;
    let basis = config.basis(config.n_max)?;
    check_grid_in_window(&basis, &grid)?;
    let mut entries = Vec::new();
    for (i, e) in basis.elements().iter().enumerate() {
        let file = element_file(e);
        write_file(&out.join(&file), &field_csv(config, &e.field(), &grid))?;
        let report = element_report(&basis, i, &grid, false);
        entries.push(json!({
            "index": i,
            "name": e.name(),
            "n": e.n(),
            "flavor": e.flavor(),
            "file": file,
            "residuals": {
                "first": report.first,
                "second": report.second,
                "third": report.third,
                "third_relative": report.third_relative,
                "div_alpha": report.div_alpha,
                "maineq": report.maineq,
            },
        }));
    }
    let g = basis.generator();
    let manifest = json!({
        "meta": config.meta(),
        "profile": {
            "alpha": basis.alpha().name(),
            "positivity": [g.positivity().lo(), g.positivity().hi()],
            "working": [g.working_interval().lo(), g.working_interval().hi()],
        },
        "z0": config.z0,
        "n_max": config.n_max,
        "elements": entries,
    });
    write_json(&out.join("manifest.json"), &manifest)?;
    let mut summary = format!("wrote {} elements to {}", basis.elements().len(), out.display());
    if let Some(k) = basis.alpha().is_constant() {
        let check = constant_alpha_check(config, &basis, k)?;
        let worst = check["max_deviation"].as_f64().unwrap_or(f64::NAN);
        write_json(&out.join("constant_alpha_check.json"), &check)?;
        let _ = write!(summary, "; constant-alpha cross-check max deviation {worst:e}");
    }
    Ok(summary)
}

/// Closed forms for `α ≡ k`: `𝒜 = k(y − y_ref)`, `f0 = ±(c1 sin 𝒜 + c2 cos 𝒜)/√k`,
/// `r = −k²`, and with `t = 𝒜 + atan2(c2, c1)`, `R = |(c1, c2)|`,
/// `Y(1) = (R²/k²)[t/2 − sin(2t)/4]` and `Ỹ(1) = −(1/R²)[cot t]`, both taken
/// from `y0`.
fn constant_alpha_check(config: &RunConfig, basis: &BeltramiBasis, k: f64) -> Result<Value, CliError> {
    let g = basis.generator();
    let (c1, c2) = g.constants().expect("constant profile has generating constants");
    let y_ref = config.profile.y_ref()?;
    let radius = c1.hypot(c2);
    let shift = c2.atan2(c1);
    let y0 = config.z0[1];
    let t = |y: f64| k * (y - y_ref) + shift;
    let y1_at = |y: f64| t(y) / 2.0 - (2.0 * t(y)).sin() / 4.0;
    let y1 = |y: f64| radius * radius / (k * k) * (y1_at(y) - y1_at(y0));
    let y1t = |y: f64| -(t(y).tan().recip() - t(y0).tan().recip()) / (radius * radius);
    let ys = g.working_interval().linspace(201);
    let phase = g.phase().expect("constant profile has a phase table");
    let alpha = basis.alpha();
    let table = basis.formal_powers().table();
    let (mut d_phase, mut d_f0, mut d_r, mut d_y1, mut d_y1t) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for &y in &ys {
        let a = k * (y - y_ref);
        d_phase = d_phase.max((phase.value_unchecked(y) - a).abs());
        d_f0 = d_f0.max((g.f0(y) - (c1 * a.sin() + c2 * a.cos()) / k.sqrt()).abs());
        d_r = d_r.max((alpha.potential(y)? + k * k).abs());
        d_y1 = d_y1.max((table.value(Family::Plain, 1, y)? - y1(y)).abs());
        d_y1t = d_y1t.max(((table.value(Family::Tilde, 1, y)? - y1t(y)) / y1t(y).abs().max(1.0)).abs());
    }
    let worst = d_phase.max(d_f0).max(d_r).max(d_y1).max(d_y1t);
    Ok(json!({
        "meta": config.meta(),
        "k": k,
        "samples": ys.len(),
        "phase": d_phase,
        "f0": d_f0,
        "potential": d_r,
        "Y1": d_y1,
        "Ytilde1_relative": d_y1t,
        "max_deviation": worst,
    }))
}

fn cmd_verify(config: &RunConfig, out: &Path, fields: Option<&Path>) -> Result<String, CliError> {
    let grid = config.grid()?;
    let basis = config.basis(config.n_max)?;
    check_grid_in_window(&basis, &grid)?;
    let t = &config.tolerances;
    let mut failures: Vec<String> = Vec::new();
    let mut reports = Vec::new();
    for i in 0..basis.elements().len() {
        let r = element_report(&basis, i, &grid, true);
        let checks = [
            ("first", r.first, t.beltrami),
            ("second", r.second, t.beltrami),
            ("third", r.third, t.beltrami),
            ("div_alpha", r.div_alpha, t.div_alpha),
            ("maineq", r.maineq, t.maineq),
            ("vekua", r.vekua.unwrap_or(f64::NAN), t.vekua),
            ("second_kind", r.second_kind.unwrap_or(f64::NAN), t.second_kind),
        ];
        for (what, value, limit) in checks {
            if !(value <= limit) {
                failures.push(format!("{} {what} residual {value:e} exceeds {limit:e}", r.name));
            }
        }
        reports.push(r);
    }
    let mut csv_checks = Vec::new();
    if let Some(dir) = fields {
        for e in basis.elements() {
            let (deviation, problem) = compare_csv(&dir.join(element_file(e)), &e.field(), t.csv);
            if let Some(p) = &problem {
                failures.push(format!("{} field file: {p}", e.name()));
            }
            csv_checks.push(json!({ "name": e.name(), "file": element_file(e), "max_deviation": deviation, "problem": problem }));
        }
    }
    let report = json!({
        "meta": config.meta(),
        "n_max": config.n_max,
        "elements": reports,
        "field_files": csv_checks,
        "passed": failures.is_empty(),
        "first_failure": failures.first(),
    });
    write_json(&out.join("verify.json"), &report)?;
    match failures.first() {
        None => Ok(format!("verified {} elements: all checks passed", basis.elements().len())),
        Some(first) => Err(CliError::Check(first.clone())),
    }
}

// Largest relative deviation between a CSV and regenerated components, and
// a description of the first problem found.
fn compare_csv(path: &Path, field: &dyn VectorField, tol: f64) -> (f64, Option<String>) {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => return (f64::NAN, Some(format!("cannot read {}: {e}", path.display()))),
    };
    let mut rows = text.lines().filter(|l| !l.starts_with('#') && !l.trim().is_empty());
    if rows.next().map(str::trim) != Some("x,y,B1,B2,B3") {
        return (f64::NAN, Some("missing header x,y,B1,B2,B3".into()));
    }
    let mut worst = 0.0f64;
    for (line_no, row) in rows.enumerate() {
        let values: Vec<f64> = match row.split(',').map(|v| v.trim().parse::<f64>()).collect() {
            Ok(v) => v,
            Err(_) => return (f64::NAN, Some(format!("row {} is not numeric", line_no + 1))),
        };
        if values.len() != 5 {
            return (f64::NAN, Some(format!("row {} has {} columns", line_no + 1, values.len())));
        }
        let b = field.components(values[0], values[1]);
        for k in 0..3 {
            let d = (values[2 + k] - b[k]).abs() / b[k].abs().max(1.0);
            if !(d <= tol) {
                return (d, Some(format!("row {} component B{} deviates by {d:e}", line_no + 1, k + 1)));
            }
            worst = worst.max(d);
        }
    }
    (worst, None)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveSpec {
    Circle { r: f64, center: [f64; 2], count: usize },
    Rectangle { x: [f64; 2], y: [f64; 2], count: usize },
    Points(Vec<[f64; 2]>),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DataSpec {
    Values(Vec<f64>),
    Preset { preset_trace: String },
}

/// A boundary value problem as read by `bvp --problem`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub curve: CurveSpec,
    pub data: DataSpec,
    pub n_max: usize,
    #[serde(default)]
    pub reg: f64,
}

impl ProblemSpec {
    fn boundary(&self) -> Result<Vec<(f64, f64)>, CliError> {
        Ok(match &self.curve {
            CurveSpec::Circle { r, center, count } => bvp::circle((center[0], center[1]), *r, *count),
            CurveSpec::Rectangle { x, y, count } => {
                let rect = Rect::new(x[0], x[1], y[0], y[1]).map_err(CliError::from)?;
                bvp::rectangle(rect, *count)
            }
            CurveSpec::Points(p) => p.iter().map(|q| (q[0], q[1])).collect(),
        })
    }

    fn data(&self, boundary: &[(f64, f64)], basis: &BeltramiBasis) -> Result<Vec<f64>, CliError> {
        match &self.data {
            DataSpec::Values(v) => Ok(v.clone()),
            DataSpec::Preset { preset_trace } => {
                let trace: Box<dyn Fn(f64, f64) -> Result<f64, Error>> = match preset_trace.as_str() {
                    "exp_x_cos_y" => Box::new(|x: f64, y: f64| Ok(x.exp() * y.cos())),
                    "sqrt_one_minus_y2" => Box::new(|_, y: f64| Ok((1.0 - y * y).sqrt())),
                    name => {
                        let e = basis
                            .elements()
                            .iter()
                            .find(|e| e.name() == name)
                            .ok_or_else(|| CliError::Config(format!("unknown preset trace '{name}'")))?
                            .clone();
                        Box::new(move |x, y| e.eval(x, y))
                    }
                };
                boundary.iter().map(|&(x, y)| trace(x, y).map_err(CliError::from)).collect()
            }
        }
    }
}

fn cmd_bvp(config: &RunConfig, out: &Path, problem_path: &Path) -> Result<String, CliError> {
    let text = fs::read_to_string(problem_path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", problem_path.display())))?;
    let spec: ProblemSpec =
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", problem_path.display())))?;
    let grid = config.grid()?;
    let basis = config.basis(spec.n_max)?;
    check_grid_in_window(&basis, &grid)?;
    let boundary = spec.boundary()?;
    let data = spec.data(&boundary, &basis)?;
    let problem = CollocationProblem::new(boundary, data, spec.n_max).with_regularization(spec.reg);
    let fit = bvp::fit(&problem, &basis)?;
    let report = bvp::evaluate_interior(&fit.solution, &grid);
    let names: Vec<String> = basis.elements().iter().map(|e| e.name()).collect();
    let coefficients: Vec<Value> = names
        .iter()
        .zip(fit.solution.element_vector())
        .map(|(n, c)| json!({ "name": n, "value": c }))
        .collect();
    let result = json!({
        "meta": config.meta(),
        "problem": spec,
        "coefficients": coefficients,
        "residual_norm": fit.residual_norm,
        "condition": fit.condition,
        "interior_residuals": report.residuals,
    });
    write_json(&out.join("coefficients.json"), &result)?;
    let mut csv = config.csv_header();
    csv.push_str("x,y,B1,B2,B3\n");
    for s in &report.samples {
        let _ = writeln!(csv, "{:?},{:?},{:?},{:?},{:?}", s[0], s[1], s[2], s[3], s[4]);
    }
    write_file(&out.join("interior.csv"), &csv)?;
    Ok(format!(
        "fitted {} coefficients: relative boundary residual {:e}, condition {:e}",
        names.len(),
        fit.residual_norm,
        fit.condition
    ))
}

/// Closed forms of the first formal powers and Beltrami fields for
/// `α = (1 − y²)^(−1/2)`, `f0 = (1 − y²)^(3/4)`, `z0 = 0`.
pub mod closed_forms {
    use num_complex::Complex64;

    fn s(y: f64) -> f64 {
        (1.0 - y * y).sqrt()
    }

    pub fn y1(y: f64) -> f64 {
        y * s(y).powi(3) / 4.0 + 3.0 * y * s(y) / 8.0 + 3.0 * y.asin() / 8.0
    }

    pub fn y2(y: f64) -> f64 {
        y * y / 4.0 + 0.75 * y * y.asin() / s(y)
    }

    pub fn y3(y: f64) -> f64 {
        let q = 1.0 - y * y;
        -3.0 / 24.0 * y * q.powf(2.5) + 3.0 / 96.0 * y * q.powf(1.5) + y * q.sqrt() * (51.0 / 128.0 - 9.0 / 64.0 * y * y)
            - 9.0 / 16.0 * q * q * y.asin()
            + 33.0 / 128.0 * y.asin()
    }

    pub fn y1_tilde(y: f64) -> f64 {
        y / s(y)
    }

    pub fn y2_tilde(y: f64) -> f64 {
        y * y - 0.5 * y.powi(4)
    }

    pub fn y3_tilde(y: f64) -> f64 {
        0.75 * y * (1.0 + y * y) / s(y) - 0.75 * y.asin()
    }

    /// `*Z(n)(a, 0; z)` for `n ∈ 1..=3`, `a ∈ {1, i}`.
    pub fn formal_power(n: usize, imaginary: bool, x: f64, y: f64) -> Complex64 {
        match (n, imaginary) {
            (1, false) => Complex64::new(x, y1(y)),
            (1, true) => Complex64::new(-y1_tilde(y), x),
            (2, false) => Complex64::new(x * x - y2(y), 2.0 * x * y1(y)),
            (2, true) => Complex64::new(-2.0 * x * y1_tilde(y), x * x - y2_tilde(y)),
            (3, false) => Complex64::new(x.powi(3) - 3.0 * x * y2(y), 3.0 * x * x * y1(y) - y3(y)),
            (3, true) => Complex64::new(-3.0 * x * x * y1_tilde(y) + y3_tilde(y), x.powi(3) - 3.0 * x * y2_tilde(y)),
            _ => panic!("closed forms are tabulated for n = 1, 2, 3 only"),
        }
    }

    /// The vectors `(B1, B2, B3)` for the elements in emitted order `0..7`.
    pub fn field(index: usize, x: f64, y: f64) -> [f64; 3] {
        let (r, a) = (s(y), y.asin());
        match index {
            0 => [y, 0.0, r],
            1 => [x * y, 1.0 - y * y, x * r],
            2 => [r, 0.0, -y],
            3 => [0.75 * r * a + y * (x * x - 0.75 * y * y + 1.25), 2.0 * x * (1.0 - y * y), r * (x * x - 0.25 * y * y) - 0.75 * y * a],
            4 => [2.0 * x * r, -2.0 * y * r, -2.0 * x * y],
            5 => [
                2.25 * x * r * a + y * (x.powi(3) - 2.25 * x * y * y + 3.75 * x),
                (3.0 * x * x - 0.75 * y * y) * (1.0 - y * y) - 2.25 * y * r * a,
                r * (x.powi(3) - 0.75 * x * y * y) - 2.25 * x * y * a,
            ],
            6 => [
                -(2.25 * y * y - 3.0 * x * x) * r - 0.75 * y * a,
                -6.0 * x * y * r,
                -3.0 * x * x * y + 0.75 * y * (1.0 + y * y) - 0.75 * r * a,
            ],
            _ => panic!("closed forms are tabulated for the first seven fields only"),
        }
    }
}

/// `count` points of the Halton sequence (bases 2 and 3, starting at index
/// 1) mapped area-uniformly onto the disk of radius `radius`.
pub fn halton_disk(count: usize, radius: f64) -> Vec<(f64, f64)> {
    fn radical_inverse(mut i: usize, base: usize) -> f64 {
        let (mut value, mut scale) = (0.0, 1.0 / base as f64);
        while i > 0 {
            value += (i % base) as f64 * scale;
            i /= base;
            scale /= base as f64;
        }
        value
    }
    (1..=count)
        .map(|i| {
            let r = radius * radical_inverse(i, 2).sqrt();
            let t = 2.0 * std::f64::consts::PI * radical_inverse(i, 3);
            (r * t.cos(), r * t.sin())
        })
        .collect()
}

/// Acceptance threshold for the closed-form comparisons of `example`.
pub const EXAMPLE_TOL: f64 = 1e-8;

fn cmd_example(config: &RunConfig, out: &Path) -> Result<String, CliError> {
    let mut config = config.clone();
    let example = RunConfig::example();
    config.profile = example.profile;
    config.z0 = example.z0;
    config.n_max = config.n_max.max(3);
    let basis = config.basis(3)?;
    let fp = basis.formal_powers();
    let points = halton_disk(200, 0.9);
    let mut powers = Vec::new();
    let mut worst = 0.0f64;
    for n in 1..=3 {
        for imaginary in [false, true] {
            let a = if imaginary { Complex64::i() } else { Complex64::new(1.0, 0.0) };
            let mut dev = 0.0f64;
            for &(x, y) in &points {
                let z = Complex64::new(x, y);
                dev = dev.max((fp.formal_power(a, n, z)? - closed_forms::formal_power(n, imaginary, x, y)).norm());
            }
            worst = worst.max(dev);
            powers.push(json!({ "n": n, "a": if imaginary { "i" } else { "1" }, "max_deviation": dev }));
        }
    }
    let mut table = config.csv_header();
    table.push_str("x,y,element,B1,B2,B3,B1_closed,B2_closed,B3_closed\n");
    let mut fields = Vec::new();
    for (i, e) in basis.elements().iter().enumerate() {
        let f = e.field();
        let mut dev = 0.0f64;
        for &(x, y) in &points {
            let (got, want) = (f.components(x, y), closed_forms::field(i, x, y));
            for k in 0..3 {
                dev = dev.max((got[k] - want[k]).abs());
            }
            let _ = writeln!(
                table,
                "{x:?},{y:?},{},{:?},{:?},{:?},{:?},{:?},{:?}",
                e.name(),
                got[0],
                got[1],
                got[2],
                want[0],
                want[1],
                want[2]
            );
        }
        worst = worst.max(dev);
        fields.push(json!({ "vector": format!("B{i}"), "element": e.name(), "max_deviation": dev }));
    }
    let passed = worst < EXAMPLE_TOL;
    let report = json!({
        "meta": config.meta(),
        "points": points.len(),
        "radius": 0.9,
        "formal_powers": powers,
        "fields": fields,
        "max_deviation": worst,
        "tolerance": EXAMPLE_TOL,
        "passed": passed,
    });
    write_json(&out.join("example.json"), &report)?;
    write_file(&out.join("example_table.csv"), &table)?;
    if passed {
        Ok(format!("example reproduced: max deviation {worst:e} over {} points", points.len()))
    } else {
        Err(CliError::Check(format!("example deviation {worst:e} exceeds {EXAMPLE_TOL:e}")))
    }
}
