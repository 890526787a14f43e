//! `dprony`: command-line driver for decimated Prony solves, bounds,
//! Fourier reconstruction and experiment sweeps.
//!
//! Exit codes: 0 success, 2 invalid input, 3 solver failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use decimated_prony::fourier::{synthetic_signal, SignalOptions};
use decimated_prony::harness::{
    csv_string, emit_csv, emit_svg, random_simple_model, run_sweep, AxesSpec, SolverChoice, SweepConfig,
};
use decimated_prony::io::{
    model_from_json, model_to_json, read_text, reconstruction_to_json, samples_from_json, samples_to_json,
    signal_from_json, signal_to_json, window_from_text, window_to_text, write_text,
};
use decimated_prony::{
    add_noise, decimated_solve, error_bounds, evaluate_moments, reconstruct, signal_coeffs, PronyError, SamplingScheme,
    Structure,
};

#[derive(Parser)]
#[command(name = "dprony", version, about = "Decimated polynomial Prony solver and Gibbs-free Fourier reconstruction")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random model, signal, or the coefficient window of a signal.
    #[command(subcommand)]
    Gen(Gen),
    /// Evaluate the moments of a model on a sampling scheme.
    Moments {
        #[arg(long)]
        model: PathBuf,
        /// Offset, stride and count, e.g. `0,4,32`.
        #[arg(long, value_parser = parse_scheme)]
        scheme: SamplingScheme,
        /// Disk noise radius.
        #[arg(long, default_value_t = 0.0)]
        noise: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Solve a Prony system from a samples file.
    Solve {
        #[arg(long)]
        samples: PathBuf,
        /// Node multiplicities, e.g. `1,1,2`.
        #[arg(long, value_parser = parse_structure)]
        structure: Structure,
        /// Solve on this subset of the samples (offset,stride,count).
        #[arg(long, value_parser = parse_scheme)]
        scheme: Option<SamplingScheme>,
        #[arg(long, value_enum, default_value_t = SolverArg::Hankel)]
        solver: SolverArg,
        /// Coarse node arguments for branch selection, one per node.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        hints: Option<Vec<f64>>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Print the first-order node and coefficient error bounds.
    Bounds {
        #[arg(long)]
        model: PathBuf,
        /// Noise level ε.
        #[arg(long)]
        eps: f64,
        /// Strides p.
        #[arg(long, value_delimiter = ',', default_value = "1")]
        strides: Vec<usize>,
        /// Offset t.
        #[arg(long, default_value_t = 0)]
        offset: usize,
        /// Constant of the coefficient bound.
        #[arg(long = "C", default_value_t = 1.0)]
        constant: f64,
    },
    /// Recover jumps and magnitudes from a coefficient window.
    Reconstruct {
        /// Window file (`k re im` lines).
        #[arg(long)]
        window: PathBuf,
        #[arg(long)]
        d: usize,
        #[arg(long = "K")]
        k: usize,
        /// Lower bound on the jump separation.
        #[arg(long = "J")]
        j: f64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run an experiment sweep described by a JSON config.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Override the worker count of the config.
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum Gen {
    /// Random model with simple, separated nodes.
    Model {
        #[arg(long)]
        nodes: usize,
        #[arg(long, default_value_t = 0.3)]
        min_separation: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Random piecewise-smooth signal.
    Signal {
        #[arg(long)]
        d: usize,
        #[arg(long = "K")]
        k: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        psi: PsiArgs,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Fourier coefficients `|k| ≤ M` of a signal file.
    Window {
        #[arg(long)]
        signal: PathBuf,
        #[arg(long = "M")]
        m: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args)]
struct PsiArgs {
    /// Degree of the smooth part.
    #[arg(long, default_value_t = 8192)]
    psi_degree: usize,
    /// Decay constant of the smooth part.
    #[arg(long, default_value_t = 0.5)]
    psi_bound: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum SolverArg {
    Hankel,
    Esprit,
    Annihilation,
    Lm,
}

impl From<SolverArg> for SolverChoice {
    fn from(s: SolverArg) -> Self {
        match s {
            SolverArg::Hankel => SolverChoice::Hankel,
            SolverArg::Esprit => SolverChoice::Esprit,
            SolverArg::Annihilation => SolverChoice::Annihilation,
            SolverArg::Lm => SolverChoice::Lm,
        }
    }
}

fn parse_scheme(s: &str) -> Result<SamplingScheme, String> {
    let v: Vec<usize> =
        s.split(',').map(|x| x.trim().parse::<usize>().map_err(|e| e.to_string())).collect::<Result<_, _>>()?;
    match v.as_slice() {
        [t, p, n] => SamplingScheme::new(*t, *p, *n).map_err(|e| e.to_string()),
        _ => Err("expected offset,stride,count".into()),
    }
}

fn parse_structure(s: &str) -> Result<Structure, String> {
    let v: Vec<usize> =
        s.split(',').map(|x| x.trim().parse::<usize>().map_err(|e| e.to_string())).collect::<Result<_, _>>()?;
    Structure::new(v).map_err(|e| e.to_string())
}

fn emit(path: Option<&Path>, text: &str) -> Result<(), PronyError> {
    match path {
        Some(p) => write_text(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<(), PronyError> {
    match cli.command {
        Command::Gen(Gen::Model { nodes, min_separation, seed, output }) => {
            let m = random_simple_model(nodes, min_separation, seed)?;
            emit(output.as_deref(), &model_to_json(&m))
        }
        Command::Gen(Gen::Signal { d, k, seed, psi, output }) => {
            let options =
                SignalOptions { psi_degree: psi.psi_degree, psi_decay_bound: psi.psi_bound, ..Default::default() };
            let s = synthetic_signal(d, k, seed, options)?;
            emit(output.as_deref(), &signal_to_json(&s))
        }
        Command::Gen(Gen::Window { signal, m, output }) => {
            let s = signal_from_json(&read_text(&signal)?)?;
            emit(output.as_deref(), &window_to_text(&signal_coeffs(&s, m)))
        }
        Command::Moments { model, scheme, noise, seed, output } => {
            let m = model_from_json(&read_text(&model)?)?;
            let samples = add_noise(&evaluate_moments(&m, &scheme)?, noise, seed)?;
            emit(output.as_deref(), &samples_to_json(&samples))
        }
        Command::Solve { samples, structure, scheme, solver, hints, output } => {
            let mut s = samples_from_json(&read_text(&samples)?)?;
            if let Some(scheme) = scheme {
                s = s.subsample(scheme)?;
            }
            let options = SolverChoice::from(solver).options();
            let (model, report) = decimated_solve(&s, &structure, hints.as_deref(), options)?;
            eprintln!(
                "method {} iterations {} residual {:e} flags [{}]",
                report.method_tag(),
                report.iterations,
                report.residual,
                report.flags_tag()
            );
            emit(output.as_deref(), &model_to_json(&model))
        }
        Command::Bounds { model, eps, strides, offset, constant } => {
            let m = model_from_json(&read_text(&model)?)?;
            println!("p\tnode\tdelta_p\tnode_bound\tcoefficient_bounds");
            for p in strides {
                let b = error_bounds(&m, offset, p, eps, constant)?;
                for (j, nb) in b.node_bounds.iter().enumerate() {
                    let cb: Vec<String> = b.coefficient_bounds[j].iter().map(|v| format!("{v:.6e}")).collect();
                    println!("{p}\t{j}\t{:.6e}\t{nb:.6e}\t{}", b.separation, cb.join(","));
                }
            }
            Ok(())
        }
        Command::Reconstruct { window, d, k, j, output } => {
            let w = window_from_text(&read_text(&window)?)?;
            let r = reconstruct(&w, d, k, j)?;
            emit(output.as_deref(), &reconstruction_to_json(&r))
        }
        Command::Sweep { config, workers, csv, svg } => {
            let mut c = SweepConfig::from_json(&read_text(&config)?)?;
            if workers.is_some() {
                c.workers = workers;
            }
            c.validate()?;
            let out = run_sweep(&c)?;
            let csv = csv.or(c.output.csv.clone());
            let svg = svg.or(c.output.svg.clone());
            match &csv {
                Some(p) => emit_csv(&out.table, p)?,
                None => print!("{}", csv_string(&out.table)?),
            }
            if let Some(p) = &svg {
                emit_svg(&out.table, p, &AxesSpec::for_kind(c.kind))?;
            }
            let failed = out.table.rows.iter().filter(|r| r.error.is_none()).count();
            eprintln!("{} rows, {failed} failed", out.table.rows.len());
            for q in out.table.quantities() {
                let med: Vec<String> = out.table.medians(q).iter().map(|(p, e)| format!("{p}:{e:.3e}")).collect();
                eprintln!("median {q}: {}", med.join(" "));
            }
            for fit in &out.slopes {
                match &fit.slope {
                    Ok(s) => eprintln!("slope {}: {s:.3}", fit.quantity),
                    Err(e) => eprintln!("slope {}: {e}", fit.quantity),
                }
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_validation() { 2 } else { 3 })
        }
    }
}
