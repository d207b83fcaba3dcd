use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use zs_spps::direct::{default_rho_grid, solve_direct, DirectConfig, DirectSolution, EigenvalueFilterReport, ScatteringData};
use zs_spps::inverse::{solve_inverse, InverseConfig, InverseSolution, InverseSummary, INNER_FRACTION};
use zs_spps::numerics::UniformGrid;
use zs_spps::potential::{evaluate, PotentialSpec, Preset, SampledTable};
use zs_spps::{json, Complex64, Error};

/// Direct and inverse Zakharov-Shabat scattering by spectral parameter power series.
#[derive(Debug, Parser)]
#[command(name = "zs-spps", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compute scattering data of a potential.
    Direct {
        #[command(flatten)]
        potential: PotentialArgs,
        #[command(flatten)]
        forward: ForwardArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Recover a potential from a scattering data file.
    Inverse {
        /// Scattering data JSON as written by `direct`.
        #[arg(long)]
        data: PathBuf,
        #[command(flatten)]
        inverse: InverseArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Run `direct` then `inverse` and compare with the input potential.
    Roundtrip {
        #[command(flatten)]
        potential: PotentialArgs,
        #[command(flatten)]
        forward: ForwardArgs,
        #[command(flatten)]
        inverse: InverseArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Check unitarity, parity and eigenvalue pairing of a scattering data file.
    Validate {
        #[arg(long)]
        data: PathBuf,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// List the built-in potentials.
    Presets,
}

#[derive(Debug, Args)]
struct PotentialArgs {
    /// `preset:NAME` or `file:PATH` (CSV with columns x,q).
    #[arg(long, value_parser = parse_potential)]
    potential: PotentialSource,
    /// Parameter of the preset, where it takes one.
    #[arg(long)]
    mu: Option<f64>,
}

#[derive(Debug, Clone)]
enum PotentialSource {
    Preset(String),
    File(PathBuf),
}

#[derive(Debug, Args)]
struct ForwardArgs {
    #[arg(long, default_value_t = 15.0, value_parser = parse_half_width)]
    half_width: f64,
    #[arg(long, default_value_t = 4001, value_parser = parse_grid_points)]
    grid_points: usize,
    #[arg(long, default_value_t = 30.0, value_parser = parse_half_width)]
    rho_max: f64,
    #[arg(long, default_value_t = 4000, value_parser = parse_rho_count)]
    rho_count: usize,
    /// Truncation order, or `auto` to choose it from the sum rules.
    #[arg(long, default_value = "auto", value_parser = parse_terms)]
    n_terms: Terms,
    /// Number of coefficients computed before truncation.
    #[arg(long, default_value_t = zs_spps::coeffs::DEFAULT_N_MAX)]
    n_max: usize,
}

#[derive(Debug, Args)]
struct InverseArgs {
    /// Half-width of the recovery grid; defaults to the forward one.
    #[arg(long, value_parser = parse_half_width)]
    inverse_half_width: Option<f64>,
    /// Nodes of the recovery grid; defaults to the forward grid.
    #[arg(long, value_parser = parse_grid_points)]
    inverse_grid_points: Option<usize>,
    /// Truncation order of the inverse series, or `auto`.
    #[arg(long, default_value = "auto", value_parser = parse_terms)]
    inverse_n_terms: Terms,
    /// Collocation points taken from the data; all of them by default.
    #[arg(long)]
    collocation: Option<usize>,
    /// Nodes used when choosing the truncation order.
    #[arg(long, default_value_t = 81)]
    selection_points: usize,
}

#[derive(Debug, Args)]
struct OutputArgs {
    #[arg(long, default_value = ".")]
    output_dir: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Both)]
    format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Both,
}

impl OutputArgs {
    fn json(&self) -> bool {
        self.format != Format::Csv
    }

    fn csv(&self) -> bool {
        self.format != Format::Json
    }
}

#[derive(Debug, Clone, Copy)]
enum Terms {
    Auto,
    Fixed(usize),
}

impl Terms {
    fn fixed(self) -> Option<usize> {
        match self {
            Terms::Auto => None,
            Terms::Fixed(n) => Some(n),
        }
    }
}

fn parse_potential(s: &str) -> Result<PotentialSource, String> {
    match s.split_once(':') {
        Some(("preset", name)) if !name.is_empty() => Ok(PotentialSource::Preset(name.to_owned())),
        Some(("file", path)) if !path.is_empty() => Ok(PotentialSource::File(PathBuf::from(path))),
        _ => Err("expected preset:NAME or file:PATH".into()),
    }
}

fn parse_half_width(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() && v > 0.0 => Ok(v),
        _ => Err("must be a positive number".into()),
    }
}

fn parse_grid_points(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(n) if n >= 3 && n % 2 == 1 => Ok(n),
        _ => Err("must be an odd integer >= 3".into()),
    }
}

fn parse_rho_count(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(n) if n >= 2 => Ok(n),
        _ => Err("must be an integer >= 2".into()),
    }
}

fn parse_terms(s: &str) -> Result<Terms, String> {
    if s == "auto" {
        return Ok(Terms::Auto);
    }
    s.parse().map(Terms::Fixed).map_err(|_| "must be `auto` or a non-negative integer".into())
}

#[derive(Serialize)]
struct Complex {
    re: f64,
    im: f64,
}

impl From<Complex64> for Complex {
    fn from(c: Complex64) -> Self {
        Self { re: c.re, im: c.im }
    }
}

#[derive(Serialize)]
struct GridInfo {
    half_width: f64,
    points: usize,
}

impl From<&UniformGrid> for GridInfo {
    fn from(g: &UniformGrid) -> Self {
        Self { half_width: g.half_width(), points: g.len() }
    }
}

#[derive(Serialize)]
struct DirectReport {
    potential: String,
    grid: GridInfo,
    rho_max: f64,
    rho_count: usize,
    n_terms: usize,
    n_left: usize,
    n_right: usize,
    sum_rule_gap: f64,
    eigenvalues: Vec<Complex>,
    norming_constants: Vec<Complex>,
    unitarity_defect: f64,
    filter: EigenvalueFilterReport,
}

impl DirectReport {
    fn new(s: &DirectSolution, rho_max: f64) -> Self {
        let t = &s.truncation;
        Self {
            potential: s.potential.description.clone(),
            grid: (&s.potential.grid).into(),
            rho_max,
            rho_count: s.data.rho.len(),
            n_terms: s.n_terms,
            n_left: t.n_left,
            n_right: t.n_right,
            sum_rule_gap: t.eps_left[s.n_terms].max(t.eps_right[s.n_terms]),
            eigenvalues: s.data.eigenvalues.iter().map(|e| e.rho.into()).collect(),
            norming_constants: s.data.norming.iter().map(|&c| c.into()).collect(),
            unitarity_defect: s.data.unitarity_defect(),
            filter: s.filter_report.clone(),
        }
    }
}

#[derive(Serialize)]
struct InverseReport<'a> {
    grid: GridInfo,
    #[serde(flatten)]
    summary: &'a InverseSummary,
}

#[derive(Serialize)]
struct RoundtripReport {
    potential: String,
    n_terms_direct: usize,
    n_terms_inverse: usize,
    inner_fraction: f64,
    max_abs_error: f64,
    max_abs_error_from_a0: f64,
    max_abs_error_from_b0: f64,
}

#[derive(Serialize)]
struct ValidateReport {
    rho_count: usize,
    unitarity_defect: f64,
    parity_defect_a: f64,
    parity_defect_b: f64,
    /// Largest distance from `-conj ρ` to the nearest listed eigenvalue.
    pairing_defect: f64,
    eigenvalues: usize,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(e)) => {
            eprintln!("error[{}]: {e}", e.name());
            ExitCode::from(1)
        }
        Err(Failure::Compute(e)) => {
            eprintln!("error[{}]: {e}", e.name());
            ExitCode::from(2)
        }
    }
}

/// Bad arguments that clap cannot catch are usage errors; everything else
/// comes from the computation.
enum Failure {
    Usage(Error),
    Compute(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Compute(e)
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Direct { potential, forward, out } => {
            let s = direct(&potential, &forward)?;
            Ok(write_direct(&s, forward.rho_max, &out)?)
        }
        Command::Inverse { data, inverse, out } => {
            let sd = ScatteringData::read_json(&data)?;
            let grid = inverse_grid(&inverse, 15.0, 4001)?;
            let s = solve(&sd, &inverse, grid)?;
            Ok(write_inverse(&s, &out)?)
        }
        Command::Roundtrip { potential, forward, inverse, out } => {
            let d = direct(&potential, &forward)?;
            write_direct(&d, forward.rho_max, &out)?;
            let grid = inverse_grid(&inverse, forward.half_width, forward.grid_points)?;
            let s = solve(&d.data, &inverse, grid)?;
            write_inverse(&s, &out)?;
            let q = evaluate(&spec(&potential)?, grid)?.q;
            let inner = grid.inner_range(INNER_FRACTION);
            let err = |v: &[f64]| inner.clone().map(|j| (v[j] - q[j]).abs()).fold(0.0, f64::max);
            let report = RoundtripReport {
                potential: d.potential.description.clone(),
                n_terms_direct: d.n_terms,
                n_terms_inverse: s.summary.n_terms,
                inner_fraction: INNER_FRACTION,
                max_abs_error: err(&s.potential.chosen),
                max_abs_error_from_a0: err(&s.potential.q_from_a0),
                max_abs_error_from_b0: err(&s.potential.q_from_b0),
            };
            println!("max |q - q_recovered| on the inner window: {:.6e}", report.max_abs_error);
            Ok(write_json(&out, "roundtrip.json", &report)?)
        }
        Command::Validate { data, out } => {
            let sd = ScatteringData::read_json(&data)?;
            let report = validate(&sd)?;
            println!("unitarity defect: {:.6e}", report.unitarity_defect);
            println!("parity defects: a {:.6e}, b {:.6e}", report.parity_defect_a, report.parity_defect_b);
            println!("eigenvalue pairing defect: {:.6e}", report.pairing_defect);
            Ok(write_json(&out, "validate.json", &report)?)
        }
        Command::Presets => {
            for (name, q) in [
                ("zero", "q = 0"),
                ("sech_scaled", "mu sech(mu x), default mu = pi"),
                ("sech_amplitude", "mu sech(x), default mu = 5 + pi/7"),
                ("example3", "mu cosh(x)^(-pi/3) - exp(-(x-2)^2), default mu = pi/7"),
                ("example4", "-4 sqrt2 (sqrt2-1) / ((sqrt2-1)^2 e^(-2 sqrt2 x) + e^(2 sqrt2 x))"),
            ] {
                println!("{name:<16}{q}");
            }
            println!("aliases: example1 = sech_scaled, example2 = sech_amplitude");
            Ok(())
        }
    }
}

fn spec(p: &PotentialArgs) -> Result<PotentialSpec, Failure> {
    match &p.potential {
        PotentialSource::Preset(name) => Ok(Preset::from_name(name, p.mu).map_err(Failure::Usage)?.into()),
        PotentialSource::File(path) => {
            if p.mu.is_some() {
                return Err(Failure::Usage(Error::InvalidInput("--mu applies only to presets".into())));
            }
            Ok(PotentialSpec::Sampled(SampledTable::read_csv(path)?))
        }
    }
}

fn direct(p: &PotentialArgs, f: &ForwardArgs) -> Result<DirectSolution, Failure> {
    let mut cfg = DirectConfig::new(UniformGrid::new(f.half_width, f.grid_points)?);
    cfg.rho = default_rho_grid(f.rho_max, f.rho_count);
    cfg.n_terms = f.n_terms.fixed();
    cfg.n_max = f.n_max;
    let s = solve_direct(&spec(p)?, &cfg)?;
    println!("potential: {}", s.potential.description);
    println!("truncation N = {} (left {}, right {})", s.n_terms, s.truncation.n_left, s.truncation.n_right);
    println!("eigenvalues: {}", s.data.eigenvalues.len());
    for e in &s.data.eigenvalues {
        println!("  rho = {:.15} {:+.15}i", e.rho.re, e.rho.im);
    }
    println!("unitarity defect: {:.6e}", s.data.unitarity_defect());
    Ok(s)
}

fn inverse_grid(a: &InverseArgs, half_width: f64, points: usize) -> Result<UniformGrid, Error> {
    UniformGrid::new(a.inverse_half_width.unwrap_or(half_width), a.inverse_grid_points.unwrap_or(points))
}

fn solve(sd: &ScatteringData, a: &InverseArgs, grid: UniformGrid) -> Result<InverseSolution, Error> {
    let mut cfg = InverseConfig::new(grid);
    cfg.n_terms = a.inverse_n_terms.fixed();
    cfg.k = a.collocation;
    cfg.selection_points = a.selection_points;
    let s = solve_inverse(sd, &cfg)?;
    let m = &s.summary;
    println!("inverse truncation N = {} on a {}x{} system per node", m.n_terms, m.rows, m.cols);
    println!("max residual: {:.6e} (relative {:.6e})", m.max_residual, m.max_relative_residual);
    println!("max condition estimate: {:.6e}", m.max_condition);
    Ok(s)
}

fn validate(sd: &ScatteringData) -> Result<ValidateReport, Error> {
    let k = sd.rho.len();
    let mut pa: f64 = 0.0;
    let mut pb: f64 = 0.0;
    for i in 0..k {
        // mirror node of -rho, if the grid has one
        let j = k - 1 - i;
        if (sd.rho[i] + sd.rho[j]).abs() > 1e-12 * sd.rho[i].abs().max(1.0) {
            return Err(Error::InvalidInput("parity checks need a grid symmetric about 0".into()));
        }
        pa = pa.max((sd.a[j] - sd.a[i].conj()).norm());
        pb = pb.max((sd.b[j] - sd.b[i].conj()).norm());
    }
    let pairing = sd
        .eigenvalues
        .iter()
        .map(|e| {
            let m = -e.rho.conj();
            sd.eigenvalues.iter().map(|f| (f.rho - m).norm()).fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max);
    Ok(ValidateReport {
        rho_count: k,
        unitarity_defect: sd.unitarity_defect(),
        parity_defect_a: pa,
        parity_defect_b: pb,
        pairing_defect: pairing,
        eigenvalues: sd.eigenvalues.len(),
    })
}

fn write_direct(s: &DirectSolution, rho_max: f64, out: &OutputArgs) -> Result<(), Error> {
    if out.json() {
        write_file(&out.output_dir, "scattering.json", s.data.to_json()?.as_bytes())?;
        write_json(out, "direct_summary.json", &DirectReport::new(s, rho_max))?;
    }
    if out.csv() {
        let mut buf = Vec::new();
        s.data.write_csv(&mut buf)?;
        write_file(&out.output_dir, "scattering.csv", &buf)?;
    }
    Ok(())
}

fn write_inverse(s: &InverseSolution, out: &OutputArgs) -> Result<(), Error> {
    if out.json() {
        let report = InverseReport { grid: (&s.coefficients.grid).into(), summary: &s.summary };
        write_json(out, "inverse_summary.json", &report)?;
    }
    if out.csv() {
        let mut buf = Vec::new();
        s.potential.write_csv(&s.coefficients, &mut buf)?;
        write_file(&out.output_dir, "potential.csv", &buf)?;
    }
    Ok(())
}

fn write_json<T: Serialize>(out: &OutputArgs, name: &str, value: &T) -> Result<(), Error> {
    if !out.json() {
        return Ok(());
    }
    write_file(&out.output_dir, name, json::to_string(value)?.as_bytes())
}

fn write_file(dir: &Path, name: &str, bytes: &[u8]) -> Result<(), Error> {
    fs::create_dir_all(dir).map_err(|source| Error::Io { path: dir.to_owned(), source })?;
    let path = dir.join(name);
    fs::write(&path, bytes).map_err(|source| Error::Io { path, source })
}
