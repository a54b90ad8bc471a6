use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use ssps_core::dde::{
    simulate, uniform_grid, verify_ssps, HistorySegment, SimulationConfig, SolutionWithDerivative,
    Tolerances,
};
use ssps_core::hamiltonian::Nonlinearity;
use ssps_core::solutions::{exp_ssps, sine_ssps, ExpSsps, SineSsps};
use ssps_core::{Error, THRESHOLD};

mod output;

use output::{emit, num, to_json, Csv, ReportDocument, SampleDocument, TOOL_VERSION};

#[derive(Parser)]
#[command(name = "ssps", version, about = "Closed-form period-2 solutions of x'(t) = -∫₀¹ f(x(t-s)) ds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample the closed-form solution over one period.
    Construct {
        #[arg(long, value_enum)]
        model: Model,
        #[arg(long)]
        r: f64,
        #[arg(long, default_value_t = 2001)]
        samples: usize,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the delay equation, half-period symmetry and period on a grid.
    Verify {
        #[arg(long, value_enum)]
        model: Model,
        #[arg(long)]
        r: f64,
        #[arg(long, default_value_t = 2001)]
        grid: usize,
        #[arg(long, default_value_t = 32)]
        quad_order: usize,
        /// Applied to the residual, symmetry and period checks alike.
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tabulate the solution over a range of r.
    Sweep {
        #[arg(long, value_enum)]
        model: Model,
        #[arg(long = "from", alias = "r-from")]
        r_from: f64,
        #[arg(long = "to", alias = "r-to")]
        r_to: f64,
        #[arg(long, default_value_t = 20)]
        points: usize,
        #[arg(long, default_value_t = 2001)]
        grid: usize,
        #[arg(long, default_value_t = 32)]
        quad_order: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Integrate the delay equation forward from a history on [-1, 0].
    Simulate {
        #[arg(long, value_enum)]
        model: Model,
        #[arg(long)]
        r: f64,
        #[arg(long, default_value_t = 6.0)]
        horizon: f64,
        #[arg(long, default_value_t = 1e-3)]
        step: f64,
        #[arg(long, value_enum, default_value_t = Seed::ClosedForm)]
        seed: Seed,
        #[arg(long, default_value_t = 1e3)]
        divergence_bound: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Model {
    Sine,
    Exp,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Seed {
    ClosedForm,
    Zero,
}

enum Failure {
    Usage(String),
    Core(Error),
    Io(std::io::Error),
    Verification(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Core(Error::NoSolution { .. }) => 2,
            Failure::Core(Error::InvalidArgument(_)) => 1,
            Failure::Core(Error::Stability { .. } | Error::Domain(_)) => 4,
            Failure::Core(_) | Failure::Verification(_) => 3,
            Failure::Io(_) => 1,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Usage(m) | Failure::Verification(m) => f.write_str(m),
            Failure::Core(e) => write!(f, "{e}"),
            Failure::Io(e) => write!(f, "cannot write output: {e}"),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

type Outcome = Result<(), Failure>;

enum Built {
    Sine(SineSsps),
    Exp(ExpSsps),
}

impl Built {
    fn new(model: Model, r: f64) -> Result<Built, Failure> {
        if !r.is_finite() {
            return Err(Failure::Usage(format!("r must be finite, got {r}")));
        }
        Ok(match model {
            Model::Sine => Built::Sine(sine_ssps(r)?),
            Model::Exp => Built::Exp(exp_ssps(r)?),
        })
    }

    fn name(&self) -> &'static str {
        match self {
            Built::Sine(_) => "sine",
            Built::Exp(_) => "exp",
        }
    }

    fn modulus(&self) -> f64 {
        match self {
            Built::Sine(s) => s.modulus().k(),
            Built::Exp(e) => e.modulus.k(),
        }
    }

    /// k' is carried separately; k itself rounds to 1 for large r.
    fn complement(&self) -> f64 {
        match self {
            Built::Sine(s) => s.modulus().complement(),
            Built::Exp(e) => e.modulus.complement(),
        }
    }

    fn offset_c(&self) -> f64 {
        match self {
            Built::Sine(_) => 0.0,
            Built::Exp(e) => e.c,
        }
    }

    fn amplitude(&self) -> f64 {
        match self {
            Built::Sine(s) => s.amplitude(),
            Built::Exp(e) => e.amplitude(),
        }
    }

    fn nonlinearity(&self) -> Nonlinearity {
        match self {
            Built::Sine(s) => Nonlinearity::SineR { r: s.r() },
            Built::Exp(e) => Nonlinearity::ExpM1R { r: e.r },
        }
    }

    fn solution(&self) -> &dyn SolutionWithDerivative {
        match self {
            Built::Sine(s) => s,
            Built::Exp(e) => e,
        }
    }
}

fn construct(model: Model, r: f64, samples: usize, format: Format, out: Option<PathBuf>) -> Outcome {
    if samples < 2 {
        return Err(Failure::Usage("--samples must be at least 2".into()));
    }
    let built = Built::new(model, r)?;
    let sol = built.solution();
    let t: Vec<f64> = uniform_grid(0.0, 2.0, samples).collect();
    let x: Vec<f64> = t.iter().map(|&t| sol.x(t)).collect();
    let dx: Vec<f64> = t.iter().map(|&t| sol.dx(t)).collect();
    let body = match format {
        Format::Csv => {
            let mut csv = Csv::new();
            csv.meta("model", built.name());
            csv.meta("r", num(r));
            csv.meta("modulus", num(built.modulus()));
            csv.meta("complement", num(built.complement()));
            csv.meta("c", num(built.offset_c()));
            csv.meta("period", num(2.0));
            csv.meta("tool_version", TOOL_VERSION);
            csv.header(&["t", "x", "dx"]);
            for i in 0..samples {
                csv.row(&[t[i], x[i], dx[i]]);
            }
            csv.into_string()
        }
        Format::Json => to_json(&SampleDocument {
            model: built.name(),
            r,
            modulus: built.modulus(),
            c: built.offset_c(),
            period: 2.0,
            tool_version: TOOL_VERSION,
            t,
            x,
            dx,
        }),
    };
    emit(out.as_deref(), &body)?;
    if out.is_some() {
        println!("{} r={r}: modulus {:.12}, {samples} samples", built.name(), built.modulus());
    }
    Ok(())
}

fn verify(model: Model, r: f64, grid: usize, quad_order: usize, tol: f64, out: Option<PathBuf>) -> Outcome {
    if !(tol > 0.0) {
        return Err(Failure::Usage("--tol must be positive".into()));
    }
    let built = Built::new(model, r)?;
    let rep = verify_ssps(built.solution(), &built.nonlinearity(), grid, quad_order, Tolerances::uniform(tol))?;
    let doc = ReportDocument {
        model: built.name(),
        r,
        modulus: built.modulus(),
        offset_c: rep.offset_c,
        period: built.solution().declared_period(),
        residual_max: rep.residual_max,
        antisymmetry_max: rep.antisymmetry_max,
        period_defect_max: rep.period_defect_max,
        quad_order: rep.quad_order,
        grid_points: rep.grid_points,
        pass: rep.pass,
        tool_version: TOOL_VERSION,
    };
    emit(out.as_deref(), &to_json(&doc))?;
    if out.is_some() {
        println!(
            "{} r={r}: residual {:.3e}, antisymmetry {:.3e}, period {:.3e} -> {}",
            doc.model,
            doc.residual_max,
            doc.antisymmetry_max,
            doc.period_defect_max,
            if doc.pass { "pass" } else { "FAIL" }
        );
    }
    if rep.pass {
        Ok(())
    } else {
        Err(Failure::Verification(format!("verification failed at tolerance {tol:e}")))
    }
}

#[allow(clippy::too_many_arguments)]
fn sweep(
    model: Model,
    r_from: f64,
    r_to: f64,
    points: usize,
    grid: usize,
    quad_order: usize,
    out: Option<PathBuf>,
) -> Outcome {
    if !(r_from.is_finite() && r_to.is_finite()) || points < 2 || !(r_to > r_from) {
        return Err(Failure::Usage("sweep needs finite --from < --to and --points >= 2".into()));
    }
    if r_from <= THRESHOLD {
        return Err(Error::NoSolution { r: r_from }.into());
    }
    let rs: Vec<f64> = uniform_grid(r_from, r_to, points).collect();
    // Ordered collect keeps the rows in r order whatever the scheduling.
    let rows: Vec<[f64; 6]> = rs
        .par_iter()
        .map(|&r| -> Result<[f64; 6], Failure> {
            let built = Built::new(model, r)?;
            let rep = verify_ssps(built.solution(), &built.nonlinearity(), grid, quad_order, Tolerances::default())?;
            Ok([
                r,
                built.modulus(),
                built.offset_c(),
                built.amplitude(),
                rep.residual_max,
                built.complement(),
            ])
        })
        .collect::<Result<_, _>>()?;
    let mut csv = Csv::new();
    csv.meta("model", if matches!(model, Model::Sine) { "sine" } else { "exp" });
    csv.meta("grid_points", grid);
    csv.meta("quad_order", quad_order);
    csv.meta("tool_version", TOOL_VERSION);
    csv.header(&["r", "modulus", "offset_c", "amplitude", "residual_max", "complement"]);
    for row in &rows {
        csv.row(row);
    }
    emit(out.as_deref(), &csv.into_string())?;
    if out.is_some() {
        println!("{points} rows, r in [{r_from}, {r_to}]");
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn simulate_cmd(
    model: Model,
    r: f64,
    horizon: f64,
    step: f64,
    seed: Seed,
    divergence_bound: f64,
    out: Option<PathBuf>,
) -> Outcome {
    if !(step > 0.0 && step <= 1.0) {
        return Err(Failure::Usage(format!("--step must lie in (0, 1], got {step}")));
    }
    let inv = 1.0 / step;
    let n = inv.round();
    if (inv - n).abs() > 1e-9 * n {
        return Err(Failure::Usage(format!("1/step must be an integer, got 1/{step} = {inv}")));
    }
    let n = n as usize;
    if !(horizon >= 1.0 && horizon.is_finite()) {
        return Err(Failure::Usage(format!("--horizon must be at least 1, got {horizon}")));
    }
    if !r.is_finite() {
        return Err(Failure::Usage(format!("r must be finite, got {r}")));
    }
    let (f, closed): (Nonlinearity, Option<Built>) = match seed {
        Seed::ClosedForm => {
            let built = Built::new(model, r)?;
            (built.nonlinearity(), Some(built))
        }
        Seed::Zero => {
            let f = match model {
                Model::Sine => Nonlinearity::sine(r)?,
                Model::Exp => Nonlinearity::exp_m1(r)?,
            };
            (f, None)
        }
    };
    let reference = |t: f64| closed.as_ref().map_or(0.0, |b| b.solution().x(t));
    let history = HistorySegment::from_fn(n, reference)?;
    let mut config = SimulationConfig::new(horizon, step);
    config.divergence_bound = divergence_bound;
    let traj = simulate(&f, &history, &config)?;

    let mut csv = Csv::new();
    csv.meta("model", if matches!(model, Model::Sine) { "sine" } else { "exp" });
    csv.meta("r", num(r));
    csv.meta("seed", if closed.is_some() { "closed-form" } else { "zero" });
    csv.meta("step", num(step));
    csv.meta("horizon", num(horizon));
    csv.meta("tool_version", TOOL_VERSION);
    csv.header(&["t", "x_sim", "x_closed", "abs_err"]);
    let mut worst = 0.0f64;
    for (t, x) in traj.forward() {
        let xc = reference(t);
        let err = (x - xc).abs();
        worst = worst.max(err);
        csv.row(&[t, x, xc, err]);
    }
    csv.meta("max_abs_err", num(worst));
    emit(out.as_deref(), &csv.into_string())?;
    if out.is_some() {
        println!("simulated to t={horizon} with h={step}: max |x_sim - x_closed| = {worst:.3e}");
    }
    Ok(())
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Construct { model, r, samples, format, out } => construct(model, r, samples, format, out),
        Command::Verify { model, r, grid, quad_order, tol, out } => verify(model, r, grid, quad_order, tol, out),
        Command::Sweep { model, r_from, r_to, points, grid, quad_order, out } => {
            sweep(model, r_from, r_to, points, grid, quad_order, out)
        }
        Command::Simulate { model, r, horizon, step, seed, divergence_bound, out } => {
            simulate_cmd(model, r, horizon, step, seed, divergence_bound, out)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {failure}");
            ExitCode::from(failure.code())
        }
    }
}
