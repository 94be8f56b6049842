use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use sntrup_cli::bench::{bench_keygen, bench_mul, DEFAULT_SIZES, MIN_RUNS};
use sntrup_cli::keyfiles::write_keys;
use sntrup_cli::{parse_param, parse_param_list};
use sntrup_core::ParamSet;
use sntrup_handshake::{timer_run, KeySource, Server, TimerReport};

#[derive(Parser)]
#[command(name = "sntrup", version, about = "Streamlined NTRU Prime with batch key generation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a batch of key pairs into DIR as key_<i>.pk / key_<i>.sk.
    Keygen {
        #[arg(long, value_parser = parse_param)]
        param: ParamSet,
        #[arg(long, default_value_t = 32, value_parser = clap::value_parser!(u32).range(1..))]
        batch: u32,
        #[arg(long)]
        out: PathBuf,
    },
    /// Time batch key generation over a range of batch sizes.
    BenchKeygen {
        #[arg(long, value_parser = parse_param)]
        param: ParamSet,
        #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_SIZES)]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = MIN_RUNS)]
        runs: usize,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Time the ring operations behind key generation.
    BenchMul {
        #[arg(long, value_parser = parse_param)]
        param: ParamSet,
        #[arg(long, default_value_t = 21)]
        runs: usize,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Accept handshakes until interrupted.
    Serve {
        #[arg(long, default_value = "127.0.0.1:4433")]
        listen: String,
        #[arg(long, value_parser = parse_param_list, default_value = "653,761,857")]
        params: Vec<ParamSet>,
    },
    /// Time sequential handshakes against a server.
    Timer(TimerArgs),
}

#[derive(Args)]
struct TimerArgs {
    #[arg(long, default_value = "127.0.0.1:4433")]
    connect: String,
    #[arg(long, value_parser = parse_param)]
    param: ParamSet,
    #[arg(long, default_value_t = 8192)]
    count: usize,
    #[arg(long, default_value_t = 100)]
    samples: usize,
    /// Fresh key generation for every connection.
    #[arg(long)]
    fresh: bool,
    /// Keys from a pool sized by NTRUP_POOL_SIZE (the default). With
    /// --fresh as well, both are run and compared.
    #[arg(long)]
    pool: bool,
    #[arg(long)]
    csv: Option<PathBuf>,
}

fn csv_out(path: Option<&Path>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(File::create(p).with_context(|| format!("creating {}", p.display()))?),
        None => Box::new(io::stdout()),
    })
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().unwrap_or_default().to_string_lossy();
    let name = match path.extension() {
        Some(ext) => format!("{stem}-{suffix}.{}", ext.to_string_lossy()),
        None => format!("{stem}-{suffix}"),
    };
    path.with_file_name(name)
}

fn timer(args: TimerArgs) -> anyhow::Result<()> {
    let mut modes = Vec::new();
    if args.fresh {
        modes.push(("fresh", KeySource::Fresh));
    }
    if args.pool || !args.fresh {
        modes.push(("pool", KeySource::pool(args.param)?));
    }
    let both = modes.len() == 2;
    let mut reports: Vec<TimerReport> = Vec::new();
    for (name, source) in &modes {
        let report = timer_run(args.connect.as_str(), args.param, args.count, args.samples, source)
            .with_context(|| format!("timing handshakes against {}", args.connect))?;
        let csv = match (&args.csv, both) {
            (Some(p), true) => Some(with_suffix(p, name)),
            (p, _) => p.clone(),
        };
        report.write_csv(csv_out(csv.as_deref())?)?;
        println!("{report}");
        reports.push(report);
    }
    if let [fresh, pool] = &reports[..] {
        println!(
            "median conn/s: fresh {:.1}, pool {:.1} ({:.2}x)",
            fresh.median(),
            pool.median(),
            pool.median() / fresh.median()
        );
    }
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Keygen { param, batch, out } => {
            let summary = write_keys(&out, param, batch as usize)?;
            println!(
                "{param}: wrote {} files to {}, {:.3} ms per key",
                summary.files.len(),
                out.display(),
                summary.amortized().as_secs_f64() * 1e3
            );
        }
        Command::BenchKeygen { param, sizes, runs, csv } => {
            if sizes.contains(&0) {
                bail!("batch sizes must be positive");
            }
            let report = bench_keygen(param, &sizes, runs);
            report.write_csv(csv_out(csv.as_deref())?)?;
            if csv.is_some() {
                for r in &report.rows {
                    println!("{param} n={:<4} {:>12.0} ns/key", r.n, r.amortized_ns);
                }
            }
        }
        Command::BenchMul { param, runs, csv } => {
            let report = bench_mul(param, runs);
            report.write_csv(csv_out(csv.as_deref())?)?;
        }
        Command::Serve { listen, params } => {
            let server = Server::bind(listen.as_str(), &params)
                .with_context(|| format!("binding {listen}"))?;
            let names: Vec<String> = params.iter().map(ToString::to_string).collect();
            println!("listening on {} ({})", server.local_addr()?, names.join(", "));
            server.run()?;
        }
        Command::Timer(args) => timer(args)?,
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
