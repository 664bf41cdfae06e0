use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use extremal_domains::approx::{self, ApproximationReport, ApproximationResult, Bounds, SolverOptions, Verdict};
use extremal_domains::conformal::{self, ConformalReport};
use extremal_domains::geometry::PlanarDomain;
use extremal_domains::laurent::LaurentSum;
use extremal_domains::perturb::perturb_domain;
use extremal_domains::quaddiff::{boundary_identity, build_stokes_graph, QuadraticDifferential};
use extremal_domains::quadrature::{flow_identities, quadrature_residual, FlowReport};
use extremal_domains::schwarz::droplet_grid_search;
use extremal_domains::serrin::{self, SerrinReport};
use extremal_domains::svg::stokes_svg;
use extremal_domains::Error;

const THREADS_ENV: &str = "EXTREMAL_DOMAINS_THREADS";

#[derive(Parser, Debug)]
#[command(name = "extremal-domains", version, about = "Analytic content and extremality checks for planar domains")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Domain description (JSON).
    #[arg(long)]
    input: PathBuf,
    /// Directory receiving the reports; created if missing.
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    /// Basis degree; each subcommand has its own default.
    #[arg(long)]
    degree: Option<usize>,
    /// Boundary samples per component for the minimax solve.
    #[arg(long)]
    samples: Option<usize>,
    /// Tolerance for verdicts and convergence.
    #[arg(long, default_value_t = 1e-3)]
    tol: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Analytic content, bounds and extremality verdict.
    Analyze(Common),
    /// Area versus boundary means over a power basis, plus flow identities.
    Quadrature(Common),
    /// Dirichlet oscillation of the Neumann problem `Δu = 1`, `∂u/∂n = A/P`.
    Serrin(Common),
    /// Stokes and anti-Stokes graphs of a quadratic differential.
    Stokes {
        #[command(flatten)]
        common: Common,
        /// `φ′` as a Laurent-term file or inline JSON; defaults to the
        /// derivative of the fitted certificate.
        #[arg(long)]
        qd: Option<String>,
    },
    /// Conformal map of a doubly-connected domain onto an annulus.
    Conformal(Common),
    /// Best fit of the outer curve to the droplet equation.
    Droplet(Common),
    /// Seeded radial Fourier perturbation of a circle-bounded domain.
    Perturb {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        amplitude: f64,
        #[arg(long, default_value_t = 3)]
        mode: u32,
        /// Output file name inside the output directory.
        #[arg(long, default_value = "perturbed.json")]
        output: String,
    },
}

#[derive(Debug)]
enum Failure {
    Input(String),
    NoConvergence(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Numerical(_) | Error::CheckFailed(_) => Failure::NoConvergence(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(f) = configure_threads() {
        return report(f);
    }
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => report(f),
    }
}

fn report(f: Failure) -> ExitCode {
    match f {
        Failure::Input(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Failure::NoConvergence(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}

fn configure_threads() -> CliResult<()> {
    let Ok(value) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::Input(format!("{THREADS_ENV} must be a positive integer, got {value:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Input(format!("cannot configure thread pool: {e}")))
}

fn run(command: Command) -> CliResult<()> {
    match command {
        Command::Analyze(c) => cmd_analyze(&c),
        Command::Quadrature(c) => cmd_quadrature(&c),
        Command::Serrin(c) => cmd_serrin(&c),
        Command::Stokes { common, qd } => cmd_stokes(&common, qd.as_deref()),
        Command::Conformal(c) => cmd_conformal(&c),
        Command::Droplet(c) => cmd_droplet(&c),
        Command::Perturb {
            common,
            amplitude,
            mode,
            output,
        } => cmd_perturb(&common, amplitude, mode, &output),
    }
}

fn check_common(c: &Common) -> CliResult<()> {
    if !(c.tol > 0.0) {
        return Err(Failure::Input(format!("--tol must be positive, got {}", c.tol)));
    }
    if c.degree == Some(0) {
        return Err(Failure::Input("--degree must be at least 1".into()));
    }
    if c.samples == Some(0) {
        return Err(Failure::Input("--samples must be at least 1".into()));
    }
    Ok(())
}

fn load_domain(c: &Common) -> CliResult<PlanarDomain> {
    check_common(c)?;
    let text = fs::read_to_string(&c.input)
        .map_err(|e| Failure::Input(format!("cannot read {}: {e}", c.input.display())))?;
    PlanarDomain::from_json_str(&text).map_err(|e| Failure::Input(format!("{}: {e}", c.input.display())))
}

fn write_output(c: &Common, name: &str, contents: &str) -> CliResult<PathBuf> {
    fs::create_dir_all(&c.out_dir)
        .map_err(|e| Failure::Input(format!("cannot create {}: {e}", c.out_dir.display())))?;
    let path = c.out_dir.join(name);
    fs::write(&path, contents).map_err(|e| Failure::Input(format!("cannot write {}: {e}", path.display())))?;
    println!("wrote {}", path.display());
    Ok(path)
}

fn write_json<T: Serialize>(c: &Common, name: &str, value: &T) -> CliResult<PathBuf> {
    let text = serde_json::to_string_pretty(value).expect("report serializes") + "\n";
    write_output(c, name, &text)
}

/// Runs the minimax solve. Returns an error when the discrete bracket
/// `[λ_lower, λ̂]` is wider than `tol·√(A/π)`.
fn solve(domain: &PlanarDomain, c: &Common) -> CliResult<ApproximationResult> {
    let options = SolverOptions {
        samples: c.samples,
        ..SolverOptions::default()
    };
    let result = approx::analytic_content(domain, c.degree.unwrap_or(approx::DEFAULT_DEGREE), &options)?;
    let bracket = result.lambda_hat - result.lambda_lower;
    if bracket > c.tol * result.bounds.upper {
        return Err(Failure::NoConvergence(format!(
            "minimax iteration stalled after {} iterations: λ̂ = {:.9}, certified lower value {:.9}",
            result.iterations, result.lambda_hat, result.lambda_lower
        )));
    }
    Ok(result)
}

#[derive(Serialize)]
struct AnalyzeReport {
    bounds: Bounds,
    lambda_hat: f64,
    gap_lower: f64,
    gap_upper: f64,
    extremality_residual: f64,
    verdict: Verdict,
    approximation: ApproximationReport,
}

fn cmd_analyze(c: &Common) -> CliResult<()> {
    let domain = load_domain(c)?;
    let result = solve(&domain, c)?;
    let residual = approx::extremality_residual(&domain, &result);
    let verdict = approx::classify(&domain, &result, &residual, c.tol);
    let report = AnalyzeReport {
        bounds: result.bounds,
        lambda_hat: result.lambda_hat,
        gap_lower: result.gap_lower,
        gap_upper: result.gap_upper,
        extremality_residual: residual.max,
        verdict,
        approximation: ApproximationReport::new(&result, &residual),
    };
    write_json(c, "analyze.json", &report)?;
    println!(
        "lambda_hat = {:.9}  gap_lower = {:.3e}  residual = {:.3e}  verdict: {verdict}",
        result.lambda_hat, result.gap_lower, residual.max
    );
    Ok(())
}

#[derive(Serialize)]
struct QuadratureSummary {
    max_degree: usize,
    residual: f64,
    lambda_hat: f64,
    flow: FlowReport,
}

fn cmd_quadrature(c: &Common) -> CliResult<()> {
    let domain = load_domain(c)?;
    let max_degree = c.degree.unwrap_or(8);
    let table = quadrature_residual(&domain, max_degree);
    let result = solve(
        &domain,
        &Common {
            degree: None,
            ..c.clone()
        },
    )?;
    let flow = flow_identities(&domain, &result);
    write_output(c, "quadrature.csv", &table.to_csv())?;
    write_json(
        c,
        "quadrature.json",
        &QuadratureSummary {
            max_degree,
            residual: table.residual,
            lambda_hat: result.lambda_hat,
            flow,
        },
    )?;
    println!("quadrature residual = {:.3e}", table.residual);
    Ok(())
}

fn cmd_serrin(c: &Common) -> CliResult<()> {
    let domain = load_domain(c)?;
    let solution = serrin::solve_neumann(&domain, c.degree.unwrap_or(serrin::DEFAULT_DEGREE))?;
    let report = SerrinReport::new(&domain, &solution);
    write_json(c, "serrin.json", &report)?;
    let osc = report.osc.iter().cloned().fold(0.0, f64::max);
    println!("osc = {osc:.3e}");
    Ok(())
}

fn parse_qd(arg: &str) -> CliResult<QuadraticDifferential> {
    let trimmed = arg.trim_start();
    let (text, source) = if trimmed.starts_with('{') {
        (arg.to_string(), "--qd".to_string())
    } else {
        let text = fs::read_to_string(arg).map_err(|e| Failure::Input(format!("cannot read {arg}: {e}")))?;
        (text, arg.to_string())
    };
    QuadraticDifferential::from_json_str(&text).map_err(|e| Failure::Input(format!("{source}: {e}")))
}

#[derive(Serialize)]
struct StokesSummary<'a> {
    phi_prime: extremal_domains::laurent::LaurentFile,
    #[serde(flatten)]
    graph: &'a extremal_domains::quaddiff::StokesGraph,
    boundary_identity: Option<extremal_domains::quaddiff::BoundaryIdentity>,
}

fn cmd_stokes(c: &Common, qd: Option<&str>) -> CliResult<()> {
    let domain = load_domain(c)?;
    let (qd, identity) = match qd {
        Some(arg) => (parse_qd(arg)?, None),
        None => {
            let result = solve(&domain, c)?;
            let qd = QuadraticDifferential::from_phi(&result.phi());
            let identity = boundary_identity(&domain, result.lambda_hat, &qd);
            (qd, Some(identity))
        }
    };
    let graph = build_stokes_graph(&domain, &qd)?;
    write_json(
        c,
        "stokes.json",
        &StokesSummary {
            phi_prime: qd.phi_prime().to_file(),
            graph: &graph,
            boundary_identity: identity,
        },
    )?;
    write_output(c, "stokes.svg", &stokes_svg(&domain, &graph))?;
    println!("{} zeros, {} arcs", graph.zeros.len(), graph.arcs.len());
    Ok(())
}

fn cmd_conformal(c: &Common) -> CliResult<()> {
    let domain = load_domain(c)?;
    if domain.connectivity() != 2 {
        return Err(Failure::Input(format!(
            "conformal maps need a doubly-connected domain, got connectivity {}",
            domain.connectivity()
        )));
    }
    let map = conformal::map_to_annulus(&domain, c.degree.unwrap_or(conformal::DEFAULT_DEGREE))?;
    let result = solve(
        &domain,
        &Common {
            degree: None,
            ..c.clone()
        },
    )?;
    let phi_prime = result.phi().derivative();
    let c_fit = if is_negligible(&phi_prime) {
        None
    } else {
        Some(conformal::lemma_l1_check(&domain, &result, &map).c_fit)
    };
    let mobius = conformal::mobius_check(&domain, &map);
    let report = ConformalReport {
        r1: map.r1,
        r2: map.r2,
        modulus: map.modulus,
        c_fit,
        mobius_defect: mobius.defect,
        boundary_defect: map.boundary_defect,
    };
    write_json(c, "conformal.json", &report)?;
    println!("modulus = {:.9}  mobius_defect = {:.3e}", report.modulus, report.mobius_defect);
    Ok(())
}

fn is_negligible(f: &LaurentSum) -> bool {
    f.terms().iter().all(|(c, _)| c.norm() < 1e-12)
}

fn cmd_droplet(c: &Common) -> CliResult<()> {
    let domain = load_domain(c)?;
    let search = droplet_grid_search(domain.outer())?;
    write_json(c, "droplet.json", &search)?;
    println!("min residual = {:.3e}", search.min_residual);
    Ok(())
}

fn cmd_perturb(c: &Common, amplitude: f64, mode: u32, output: &str) -> CliResult<()> {
    let domain = load_domain(c)?;
    if Path::new(output).file_name().map(|n| n != output).unwrap_or(true) {
        return Err(Failure::Input(format!("--output must be a bare file name, got {output:?}")));
    }
    let perturbed = perturb_domain(&domain, amplitude, mode, c.seed)?;
    write_output(c, output, &perturbed.to_json_string())?;
    Ok(())
}
