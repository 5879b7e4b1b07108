mod input;

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hdlrt::montecarlo::Scenario;
use hdlrt::oracle::martingale_trace;
use hdlrt::output::{histogram_csv, rates_csv, summary_json, z_csv};
use hdlrt::{
    block_constants, block_test_with, correlation_constants, correlation_test, default_deltas,
    eqcov_constants, eqcov_test, power_curve, run_histogram, run_level, with_threads,
    BlockPartition, DataMatrix, DistributionSpec, GroupedSample, LogDetRoute, SimulationPlan,
    TestReport,
};
use input::{parse_csv, InputError};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(
    name = "hdlrt",
    version,
    about = "Likelihood ratio tests for covariance structure in high dimension"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a test on observed data.
    #[command(subcommand)]
    Test(TestCommand),
    /// Monte Carlo size, power and null distribution.
    #[command(subcommand)]
    Simulate(SimulateCommand),
    #[command(subcommand, hide = true)]
    Debug(DebugCommand),
}

#[derive(Subcommand)]
enum TestCommand {
    /// Block-diagonal covariance.
    Block {
        input: PathBuf,
        /// Block sizes, e.g. `2,2,3` or `30x2`.
        #[arg(long)]
        partition: BlockPartition,
        #[arg(long, value_enum, default_value_t = Route::Projection)]
        route: Route,
        #[command(flatten)]
        out: TestOutput,
    },
    /// Diagonal covariance via the sample correlation determinant.
    Corr {
        input: PathBuf,
        #[command(flatten)]
        out: TestOutput,
    },
    /// Equal covariance matrices across groups: one file per group, or a
    /// single file split by `--groups`.
    Eqcov {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        /// Consecutive group sizes when a single file is given, e.g. `50,60`.
        #[arg(long)]
        groups: Option<String>,
        #[command(flatten)]
        out: TestOutput,
    },
}

#[derive(Args)]
struct TestOutput {
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum Route {
    Projection,
    Cholesky,
}

#[derive(Clone, Copy, ValueEnum)]
enum TestName {
    Block,
    Corr,
    Eqcov,
}

#[derive(Subcommand)]
enum SimulateCommand {
    /// Rejection rate under the null hypothesis.
    Level {
        #[command(flatten)]
        sim: SimArgs,
    },
    /// Rejection rates over a grid of compound-symmetry strengths.
    Power {
        #[command(flatten)]
        sim: SimArgs,
        /// Comma-separated deltas in [0, 1); defaults to 0, 0.01, ..., 0.12.
        #[arg(long, value_delimiter = ',')]
        deltas: Option<Vec<f64>>,
    },
    /// Standardized statistics under the null hypothesis. CSV output lists
    /// one row per replication; JSON output carries the binned histogram.
    Hist {
        #[command(flatten)]
        sim: SimArgs,
        #[arg(long, default_value_t = hdlrt::Histogram::DEFAULT_BINS)]
        bins: usize,
        /// Also write the binned histogram as CSV.
        #[arg(long)]
        histogram_output: Option<PathBuf>,
    },
}

#[derive(Args)]
struct SimArgs {
    #[arg(long, value_enum, default_value_t = TestName::Block)]
    test: TestName,
    /// Sample size (block and correlation tests).
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    p: usize,
    /// Block sizes, e.g. `30x2`.
    #[arg(long, conflicts_with = "scenario")]
    blocks: Option<BlockPartition>,
    /// 1: three equal blocks; 2: p/2 - 1 singles and one block of p/2 + 1.
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
    scenario: Option<u8>,
    /// Group sizes for the equal-covariance test, e.g. `100,100,100`.
    #[arg(long)]
    groups: Option<String>,
    #[arg(long, default_value = "normal")]
    dist: DistributionSpec,
    #[arg(long, default_value_t = 1000)]
    reps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// Worker threads; never affects results.
    #[arg(long, env = "HDLRT_THREADS")]
    threads: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum DebugCommand {
    /// Per-step projection diagnostics of the block statistic.
    Trace {
        input: PathBuf,
        #[arg(long)]
        partition: BlockPartition,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

enum Failure {
    Input(InputError),
    Design(hdlrt::Error),
    Usage(String),
}

impl From<InputError> for Failure {
    fn from(e: InputError) -> Self {
        Failure::Input(e)
    }
}

impl From<hdlrt::Error> for Failure {
    fn from(e: hdlrt::Error) -> Self {
        Failure::Design(e)
    }
}

type Outcome<T> = Result<T, Failure>;

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_output(path: Option<&PathBuf>, text: &str) -> Outcome<()> {
    let io = |e| Failure::Input(InputError::Io(e));
    match path {
        Some(p) => std::fs::write(p, text).map_err(io),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(io),
    }
}

fn read(path: &Path) -> Outcome<DataMatrix> {
    parse_csv(path).map_err(|e| {
        Failure::Input(match e {
            InputError::Io(io) => InputError::Io(std::io::Error::new(
                io.kind(),
                format!("{}: {io}", path.display()),
            )),
            other => other,
        })
    })
}

fn parse_sizes(s: &str) -> Outcome<Vec<usize>> {
    let part: BlockPartition = s
        .parse()
        .map_err(|_| Failure::Usage(format!("cannot parse group sizes `{s}`")))?;
    Ok(part.sizes().to_vec())
}

/// Report fields plus design constants, in a stable key order.
fn report_value(
    test: &str,
    n: usize,
    p: usize,
    extra: Vec<(&str, Value)>,
    report: &TestReport,
) -> Value {
    let mut v = json!({ "test": test, "n": n, "p": p });
    let map = v.as_object_mut().unwrap();
    for (k, x) in extra {
        map.insert(k.to_string(), x);
    }
    if let Value::Object(fields) = serde_json::to_value(report).unwrap() {
        map.extend(fields);
    }
    v
}

fn render_report(v: &Value, format: Format) -> String {
    match format {
        Format::Json => serde_json::to_string_pretty(v).unwrap() + "\n",
        Format::Csv => {
            let mut out = String::from("field,value\n");
            for (k, x) in v.as_object().unwrap() {
                let cell = match x {
                    Value::Number(n) if !n.is_u64() && !n.is_i64() => num(n.as_f64().unwrap()),
                    Value::String(s) => s.replace(',', ";"),
                    Value::Array(a) => a
                        .iter()
                        .map(|e| match e {
                            Value::String(s) => s.replace(',', ";"),
                            other => other.to_string(),
                        })
                        .collect::<Vec<_>>()
                        .join(" | "),
                    other => other.to_string(),
                };
                writeln!(out, "{k},{cell}").unwrap();
            }
            out
        }
    }
}

fn run_test(cmd: TestCommand) -> Outcome<()> {
    match cmd {
        TestCommand::Block {
            input,
            partition,
            route,
            out,
        } => {
            let data = read(&input)?;
            let route = match route {
                Route::Projection => LogDetRoute::Projection,
                Route::Cholesky => LogDetRoute::Cholesky,
            };
            let report = block_test_with(&data, &partition, out.alpha, route)?;
            let c = block_constants(data.n(), &partition)?;
            let v = report_value(
                "block",
                data.n(),
                data.p(),
                vec![
                    ("partition", json!(partition.to_string())),
                    ("mu_n", json!(c.mu_n)),
                    ("sigma_n", json!(c.sigma_n)),
                ],
                &report,
            );
            write_output(out.output.as_ref(), &render_report(&v, out.format))
        }
        TestCommand::Corr { input, out } => {
            let data = read(&input)?;
            let report = correlation_test(&data, out.alpha)?;
            let c = correlation_constants(data.n(), data.p())?;
            let v = report_value(
                "corr",
                data.n(),
                data.p(),
                vec![("mu_n", json!(c.mu_n)), ("sigma_n", json!(c.sigma_n))],
                &report,
            );
            write_output(out.output.as_ref(), &render_report(&v, out.format))
        }
        TestCommand::Eqcov {
            inputs,
            groups,
            out,
        } => {
            let sample = match (inputs.len(), groups) {
                (1, Some(g)) => GroupedSample::split(&read(&inputs[0])?, &parse_sizes(&g)?)?,
                (1, None) => {
                    return Err(Failure::Usage(
                        "a single input file needs --groups, or pass one file per group".into(),
                    ))
                }
                (_, Some(_)) => {
                    return Err(Failure::Usage(
                        "--groups applies to a single input file".into(),
                    ))
                }
                (_, None) => {
                    GroupedSample::new(inputs.iter().map(|p| read(p)).collect::<Outcome<_>>()?)?
                }
            };
            let report = eqcov_test(&sample, out.alpha)?;
            let c = eqcov_constants(&sample.sizes(), sample.p())?;
            let v = report_value(
                "eqcov",
                sample.n(),
                sample.p(),
                vec![
                    ("groups", json!(sample.sizes())),
                    ("mu_n", json!(c.mu_n)),
                    ("sigma_n", json!(c.sigma_n)),
                ],
                &report,
            );
            write_output(out.output.as_ref(), &render_report(&v, out.format))
        }
    }
}

fn build_plan(sim: &SimArgs) -> Outcome<SimulationPlan> {
    let need_n = || {
        sim.n
            .ok_or_else(|| Failure::Usage("--n is required for this test".into()))
    };
    let plan = match sim.test {
        TestName::Block => {
            let part = match (&sim.blocks, sim.scenario) {
                (Some(b), _) => b.clone(),
                (None, Some(1)) => Scenario::ThreeEqual.partition(sim.p)?,
                (None, Some(_)) => Scenario::SinglesPlusOne.partition(sim.p)?,
                (None, None) => {
                    return Err(Failure::Usage(
                        "block test needs --blocks or --scenario".into(),
                    ))
                }
            };
            if part.p() != sim.p {
                return Err(Failure::Design(hdlrt::Error::DimensionMismatch {
                    expected: sim.p,
                    actual: part.p(),
                }));
            }
            SimulationPlan::block(need_n()?, part)
        }
        TestName::Corr => SimulationPlan::correlation(need_n()?, sim.p),
        TestName::Eqcov => {
            let sizes = parse_sizes(
                sim.groups
                    .as_deref()
                    .ok_or_else(|| Failure::Usage("eqcov needs --groups".into()))?,
            )?;
            if let Some(n) = sim.n {
                if n != sizes.iter().sum::<usize>() {
                    return Err(Failure::Usage(format!(
                        "--n {n} disagrees with the group sizes"
                    )));
                }
            }
            SimulationPlan::eqcov(sizes, sim.p)
        }
    };
    let plan = plan
        .with_dist(sim.dist)
        .with_reps(sim.reps)
        .with_seed(sim.seed)
        .with_alpha(sim.alpha);
    plan.validate()?;
    Ok(plan)
}

fn in_pool<R: Send>(threads: Option<usize>, f: impl FnOnce() -> R + Send) -> Outcome<R> {
    match threads {
        Some(0) => Err(Failure::Usage("--threads must be positive".into())),
        Some(t) => Ok(with_threads(t, f)?),
        None => Ok(f()),
    }
}

fn run_simulation(cmd: SimulateCommand) -> Outcome<()> {
    let start = Instant::now();
    let (sim, text, extra) = match cmd {
        SimulateCommand::Level { sim } => {
            let plan = build_plan(&sim)?;
            let res = in_pool(sim.threads, || run_level(&plan))??;
            let text = match sim.format {
                Format::Csv => rates_csv(std::slice::from_ref(&res), plan.seed),
                Format::Json => summary_json(&plan, &[res], None) + "\n",
            };
            (sim, text, None)
        }
        SimulateCommand::Power { sim, deltas } => {
            let plan = build_plan(&sim)?;
            let deltas = deltas.unwrap_or_else(default_deltas);
            let curve = in_pool(sim.threads, || power_curve(&plan, &deltas))??;
            let text = match sim.format {
                Format::Csv => rates_csv(&curve, plan.seed),
                Format::Json => summary_json(&plan, &curve, None) + "\n",
            };
            (sim, text, None)
        }
        SimulateCommand::Hist {
            sim,
            bins,
            histogram_output,
        } => {
            let plan = build_plan(&sim)?;
            let (res, hist) = in_pool(sim.threads, || run_histogram(&plan, bins))??;
            let text = match sim.format {
                Format::Csv => z_csv(&res),
                Format::Json => summary_json(&plan, std::slice::from_ref(&res), Some(&hist)) + "\n",
            };
            (
                sim,
                text,
                histogram_output.map(|p| (p, histogram_csv(&hist))),
            )
        }
    };
    write_output(sim.output.as_ref(), &text)?;
    if let Some((path, csv)) = extra {
        write_output(Some(&path), &csv)?;
    }
    eprintln!("runtime_seconds: {:.3}", start.elapsed().as_secs_f64());
    Ok(())
}

fn run_debug(cmd: DebugCommand) -> Outcome<()> {
    let DebugCommand::Trace {
        input,
        partition,
        format,
        output,
    } = cmd;
    let data = read(&input)?;
    let trace = martingale_trace(&data, &partition)?;
    let text = match format {
        Format::Json => serde_json::to_string_pretty(&trace).unwrap() + "\n",
        Format::Csv => {
            let mut out = String::from("column,quad_form,block_quad_form,x,block_x\n");
            for k in 0..data.p() {
                let (x, bx) = match k.checked_sub(trace.first_column) {
                    Some(i) => (num(trace.x_terms[i]), num(trace.block_x_terms[i])),
                    None => (String::new(), String::new()),
                };
                writeln!(
                    out,
                    "{k},{},{},{x},{bx}",
                    num(trace.quad_forms[k]),
                    num(trace.block_quad_forms[k])
                )
                .unwrap();
            }
            writeln!(out, "sigma1_sum,{},,,", num(trace.sigma1_sum)).unwrap();
            out
        }
    };
    write_output(output.as_ref(), &text)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Test(cmd) => run_test(cmd),
        Command::Simulate(cmd) => run_simulation(cmd),
        Command::Debug(cmd) => run_debug(cmd),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(Failure::Design(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
