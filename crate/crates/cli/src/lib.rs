//! The `jc` command line. [`run`] parses arguments, executes one subcommand
//! and returns the process exit code: 0 on success, 1 on numerical failure
//! or a failing verification, 2 on usage errors (bad arguments, parameters
//! or input files). Failures other than verification print a JSON error on
//! stderr.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use jacobi_cherednik::green::{green_apply, poisson_residual};
use jacobi_cherednik::heat::{heat_kernel, semigroup_apply, HeatKernelField, SemigroupRoute};
use jacobi_cherednik::markov::{simulate_paths, simulation_nodes, write_paths_csv, MassReference, TransitionTable};
use jacobi_cherednik::quadrature::QuadratureConfig;
use jacobi_cherednik::specfun::eigenfunction_g;
use jacobi_cherednik::transform::{
    forward, inverse, read_sampled_csv, read_spectral_json, write_sampled_csv, write_spectral_json, OutputKind,
};
use jacobi_cherednik::verify::{self, Suite, VerifyOptions};
use jacobi_cherednik::{Error, Params, Result};

#[derive(Debug, Parser)]
#[command(name = "jc", version, about = "Jacobi–Cherednik operator calculus")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Global {
    /// Relative tolerance of every adaptive quadrature.
    #[arg(long, global = true, default_value_t = QuadratureConfig::default().rel_tol)]
    rel_tol: f64,
    /// Absolute tolerance of every adaptive quadrature.
    #[arg(long, global = true, default_value_t = QuadratureConfig::default().abs_tol)]
    abs_tol: f64,
    /// Largest truncation radius for integrals over the real line.
    #[arg(long, global = true, default_value_t = QuadratureConfig::default().max_radius)]
    max_radius: f64,
    /// Worker threads for parallel fills (default: available parallelism).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Seed for random draws in `verify` and `simulate`.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
}

impl Global {
    fn config(&self) -> Result<QuadratureConfig> {
        let cfg = QuadratureConfig {
            max_radius: self.max_radius,
            ..QuadratureConfig::default().with_tolerances(self.rel_tol, self.abs_tol)
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Args, Clone, Copy)]
struct ParamArgs {
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    alpha: f64,
    #[arg(long, default_value_t = -0.5, allow_negative_numbers = true)]
    beta: f64,
}

impl ParamArgs {
    fn params(self) -> Result<Params> {
        Params::new(self.alpha, self.beta)
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Prints the eigenfunction G_λ(x).
    EvalG {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, allow_negative_numbers = true)]
        lambda: f64,
        #[arg(long, allow_negative_numbers = true)]
        x: f64,
        #[arg(long)]
        json: bool,
    },
    /// Prints the heat kernel p_t(x, y) and its error estimate.
    HeatKernel {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        t: f64,
        #[arg(long, allow_negative_numbers = true)]
        x: f64,
        #[arg(long, allow_negative_numbers = true)]
        y: f64,
        /// Print a one-point heat-kernel field as JSON instead.
        #[arg(long)]
        json: bool,
    },
    /// Forward transform of sampled data, or inverse transform of a spectrum.
    Transform {
        #[arg(value_enum)]
        direction: Direction,
        #[command(flatten)]
        params: ParamArgs,
        /// Forward: `x,re[,im]` CSV. Inverse: spectral-function JSON.
        #[arg(long = "in")]
        input: PathBuf,
        /// One-column CSV of λ nodes (forward) or x nodes (inverse).
        #[arg(long)]
        nodes: PathBuf,
        /// Forward: spectral-function JSON. Inverse: `x,re,im` CSV.
        #[arg(long)]
        out: PathBuf,
        /// Inverse only: project the output onto the real axis.
        #[arg(long)]
        real: bool,
    },
    /// Applies the heat semigroup P_t to sampled data on its own grid.
    Semigroup {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        t: f64,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = RouteArg::Spectral)]
        route: RouteArg,
        #[arg(long)]
        out: PathBuf,
    },
    /// Solves the modified Poisson equation with the Green operator.
    Poisson {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Simulates paths of the killed Markov process.
    Simulate {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        t_step: f64,
        #[arg(long)]
        steps: usize,
        #[arg(long)]
        paths: usize,
        #[arg(long, allow_negative_numbers = true)]
        x0: f64,
        /// Spacing of the transition table's x nodes.
        #[arg(long, default_value_t = 0.25)]
        node_spacing: f64,
        /// Survival probability per step: the measured kernel mass or e^{-tρ²/2}.
        #[arg(long, value_enum, default_value_t = MassArg::Measured)]
        mass: MassArg,
        #[arg(long)]
        out: PathBuf,
    },
    /// Runs property suites; exits 0 iff every property passes.
    Verify {
        #[arg(long, value_enum, default_value_t = SuiteArg::All)]
        suite: SuiteArg,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Direction {
    Forward,
    Inverse,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum RouteArg {
    Spectral,
    Convolution,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MassArg {
    Measured,
    Formula,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SuiteArg {
    Specfun,
    Operator,
    Transform,
    Heat,
    Rkhs,
    Green,
    Markov,
    All,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Self {
        match s {
            SuiteArg::Specfun => Suite::Specfun,
            SuiteArg::Operator => Suite::Operator,
            SuiteArg::Transform => Suite::Transform,
            SuiteArg::Heat => Suite::Heat,
            SuiteArg::Rkhs => Suite::Rkhs,
            SuiteArg::Green => Suite::Green,
            SuiteArg::Markov => Suite::Markov,
            SuiteArg::All => Suite::All,
        }
    }
}

/// Parses `argv` (including the program name), runs the subcommand and
/// returns the exit code.
pub fn run<I, A>(argv: I) -> i32
where
    I: IntoIterator<Item = A>,
    A: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.global.threads {
        if n == 0 {
            eprintln!("error: --threads must be at least 1");
            return 2;
        }
        builder = builder.num_threads(n);
    }
    let pool = match builder.build() {
        Ok(p) => p,
        Err(e) => return report(&Error::InvalidConfig(e.to_string())),
    };
    let stdout = io::stdout();
    match pool.install(|| execute(&cli, &mut stdout.lock())) {
        Ok(code) => code,
        Err(e) => report(&e),
    }
}

/// Prints `e` as JSON on stderr. Bad arguments or input files are usage
/// errors (2); everything else is a numerical failure (1).
fn report(e: &Error) -> i32 {
    let body = json!({"error": {"kind": e.kind(), "message": e.to_string()}});
    eprintln!("{body}");
    match e {
        Error::InvalidParams(_) | Error::InvalidConfig(_) | Error::InvalidInput(_) | Error::Io(_) | Error::Format(_) => 2,
        _ => 1,
    }
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// One number per row in the first column; a non-numeric first row is a header.
fn read_nodes(path: &Path) -> Result<Vec<f64>> {
    let mut rd = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(open(path)?);
    let mut out = Vec::new();
    for (i, rec) in rd.records().enumerate() {
        let rec = rec?;
        let field = rec.get(0).unwrap_or("");
        match field.parse::<f64>() {
            Ok(v) => out.push(v),
            Err(_) if i == 0 => {}
            Err(_) => return Err(Error::Format(format!("row {}: not a number: {field:?}", i + 1))),
        }
    }
    if out.is_empty() {
        return Err(Error::Format(format!("{}: no nodes", path.display())));
    }
    Ok(out)
}

fn execute(cli: &Cli, stdout: &mut impl Write) -> Result<i32> {
    let cfg = cli.global.config()?;
    match &cli.command {
        Command::EvalG { params, lambda, x, json } => {
            let g = eigenfunction_g(&params.params()?, *lambda, *x)?;
            if *json {
                let body = json!({
                    "alpha": params.alpha, "beta": params.beta, "lambda": lambda, "x": x,
                    "re": g.re, "im": g.im,
                });
                writeln!(stdout, "{body}")?;
            } else if g.im == 0.0 {
                writeln!(stdout, "{}", g.re)?;
            } else {
                writeln!(stdout, "{} {:+}i", g.re, g.im)?;
            }
        }
        Command::HeatKernel { params, t, x, y, json } => {
            let p = params.params()?;
            if *json {
                let field = HeatKernelField::compute(&p, *t, &[*x], &[*y], &cfg)?;
                field.write_json(&mut *stdout)?;
                writeln!(stdout)?;
            } else {
                let e = heat_kernel(&p, *t, *x, *y, &cfg)?;
                writeln!(stdout, "{} {:e}", e.value, e.error)?;
            }
        }
        Command::Transform {
            direction,
            params,
            input,
            nodes,
            out,
            real,
        } => {
            let p = params.params()?;
            let nodes = read_nodes(nodes)?;
            match direction {
                Direction::Forward => {
                    let f = read_sampled_csv(open(input)?)?;
                    let g = forward(&p, &f, &nodes, &cfg)?;
                    let mut w = create(out)?;
                    write_spectral_json(&mut w, &g)?;
                    w.flush()?;
                }
                Direction::Inverse => {
                    let g = read_spectral_json(open(input)?)?;
                    if g.params() != &p {
                        return Err(Error::Mismatch(format!(
                            "spectrum has parameters {:?}, command line has {:?}",
                            g.params(),
                            p
                        )));
                    }
                    let kind = if *real { OutputKind::Real } else { OutputKind::Complex };
                    let r = inverse(&p, &g, &nodes, kind, &cfg)?;
                    write_sampled_csv(create(out)?, &r.function)?;
                }
            }
        }
        Command::Semigroup {
            params,
            t,
            input,
            route,
            out,
        } => {
            let p = params.params()?;
            let f = read_sampled_csv(open(input)?)?;
            let route = match route {
                RouteArg::Spectral => SemigroupRoute::Spectral,
                RouteArg::Convolution => SemigroupRoute::Convolution,
            };
            let r = semigroup_apply(&p, *t, &f, f.grid(), route, &cfg)?;
            write_sampled_csv(create(out)?, &r.output)?;
        }
        Command::Poisson { params, input, out } => {
            let p = params.params()?;
            let f = read_sampled_csv(open(input)?)?;
            let xs = f.grid().to_vec();
            let u = green_apply(&p, &f, &xs, &cfg)?;
            let res = poisson_residual(&p, &f, &u.function, &xs)?;
            let mut w = csv::Writer::from_writer(create(out)?);
            w.write_record(["x", "green", "residual"])?;
            for ((x, v), r) in xs.iter().zip(u.function.values()).zip(&res) {
                w.write_record([x.to_string(), v.re.to_string(), r.norm().to_string()])?;
            }
            w.flush()?;
        }
        Command::Simulate {
            params,
            t_step,
            steps,
            paths,
            x0,
            node_spacing,
            mass,
            out,
        } => {
            let p = params.params()?;
            if !(*node_spacing > 0.0) {
                return Err(Error::InvalidInput(format!("node spacing must be positive, got {node_spacing}")));
            }
            let nodes = simulation_nodes(&p, *t_step, *steps, *x0, *node_spacing);
            let reference = match mass {
                MassArg::Measured => MassReference::Measured,
                MassArg::Formula => MassReference::Formula,
            };
            let table = TransitionTable::with_auto_grid(&p, *t_step, &nodes, reference, &cfg)?;
            let sampled = simulate_paths(&table, *x0, *steps, *paths, cli.global.seed)?;
            let mut w = create(out)?;
            write_paths_csv(&sampled, &mut w)?;
            w.flush()?;
        }
        Command::Verify { suite, json } => {
            let opts = VerifyOptions {
                cfg,
                seed: cli.global.seed,
            };
            let report = verify::run((*suite).into(), &opts);
            if *json {
                writeln!(stdout, "{}", report.to_json())?;
            } else {
                for p in &report.properties {
                    let err = p.max_err.map_or_else(|| "error".to_string(), |e| format!("{e:.3e}"));
                    let verdict = if p.pass { "PASS" } else { "FAIL" };
                    write!(stdout, "{verdict} {:40} max_err {err:>10} tol {:.1e}", p.name, p.tol)?;
                    if let Some(msg) = &p.error {
                        write!(stdout, " ({msg})")?;
                    }
                    writeln!(stdout)?;
                }
            }
            return Ok(if report.passed() { 0 } else { 1 });
        }
    }
    Ok(0)
}
