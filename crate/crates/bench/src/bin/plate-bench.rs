use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use plate_bench::checks::run_property_suite;
use plate_bench::config::{parse_positive, parse_t_list};
use plate_bench::{
    emit_table, loglog_data, run_sweep, BenchError, InitialData, NormChoice, OutputFormat, Scheme,
    SweepConfig,
};

/// Null-control sweeps over the terminal time for the damped plate system.
#[derive(Debug, Parser)]
#[command(name = "plate-bench", version)]
struct Cli {
    /// Discretization: fdm or fem.
    #[arg(long, default_value = "fdm")]
    scheme: String,
    /// Interior points per axis.
    #[arg(long, default_value_t = 32)]
    n: usize,
    /// Damping coefficient.
    #[arg(long, default_value = "5/2")]
    rho: String,
    /// Side length of the square domain (expressions such as `pi` allowed).
    #[arg(long, default_value = "pi")]
    side: String,
    /// Time step, e.g. `0.2` or `1/1536`.
    #[arg(long, default_value = "0.2")]
    dt: String,
    /// Terminal times: `2^1..2^6` or a comma list.
    #[arg(long, default_value = "2^1..2^6")]
    t_list: String,
    /// `test-problem` or `v0=<expr>;w0=<expr>` in x, y.
    #[arg(long, default_value = "test-problem")]
    init: String,
    /// csv, markdown or json.
    #[arg(long, default_value = "csv")]
    format: String,
    /// Finite-difference norm: euclidean or grid-l2.
    #[arg(long, default_value = "euclidean")]
    norm: String,
    /// Write the table here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write gnuplot columns `T energy unorm T^(-3/2)` here.
    #[arg(long)]
    loglog: Option<PathBuf>,
    /// Finite-element mesh files: NODES ELEMENTS.
    #[arg(long, num_args = 2, value_names = ["NODES", "ELEMENTS"])]
    mesh: Option<Vec<PathBuf>>,
    /// Run the property suite instead of a sweep.
    #[arg(long)]
    check: bool,
}

fn config_from(cli: &Cli) -> Result<(SweepConfig, OutputFormat), BenchError> {
    let config = SweepConfig {
        scheme: cli.scheme.parse::<Scheme>()?,
        n: cli.n,
        rho: parse_positive("rho", &cli.rho)?,
        side: parse_positive("side", &cli.side)?,
        dt: parse_positive("dt", &cli.dt)?,
        t_list: parse_t_list(&cli.t_list)?,
        init: cli.init.parse::<InitialData>()?,
        norm: cli.norm.parse::<NormChoice>()?,
        mesh: cli.mesh.as_ref().map(|m| (m[0].clone(), m[1].clone())),
    };
    config.validate()?;
    Ok((config, cli.format.parse()?))
}

fn run(cli: &Cli) -> Result<(), BenchError> {
    let (config, format) = config_from(cli)?;
    let table = run_sweep(&config)?;
    let text = emit_table(&table, format)?;
    match &cli.out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    if let Some(path) = &cli.loglog {
        std::fs::write(path, loglog_data(&table))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if cli.check {
        let results = run_property_suite();
        for r in &results {
            println!(
                "{} {} ({})",
                if r.passed { "PASS" } else { "FAIL" },
                r.name,
                r.detail
            );
        }
        return if results.iter().all(|r| r.passed) {
            ExitCode::SUCCESS
        } else {
            ExitCode::from(1)
        };
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("plate-bench: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
