use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use specgraph::bounds::{self, BoundArgs};
use specgraph::detect::{misclassification_rate, spectral_cluster, SpectralMode};
use specgraph::experiments::{
    self, ExperimentConfig, Figure2Config, GridModel, PhaseConfig, PhaseMethod, Regularization,
};
use specgraph::models::{sample, ModelSpec};
use specgraph::regularize::{choose_tau, degree_regularize, laplacian, regularized_laplacian, remove_high_degree};
use specgraph::{spectral_norm, top_eigs, Error, Graph, LabelVector, Result, SymmetricOperator, Which};

#[derive(Parser)]
#[command(name = "specgraph", version, about = "Random graph spectra, regularization and community detection")]
struct Cli {
    /// Master seed.
    #[arg(long, global = true, env = "SPECGRAPH_SEED", default_value_t = 0)]
    seed: u64,

    /// Worker threads; defaults to the number of available cores.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a graph and its community labels.
    Gen(GenArgs),
    /// Regularize a graph.
    Reg(RegArgs),
    /// Extreme eigenvalues of a graph operator.
    Eigs(EigsArgs),
    /// Spectral community detection.
    Detect(DetectArgs),
    /// Concentration sweep over a grid of models.
    Sweep(SweepArgs),
    /// Leading Laplacian eigenvectors of a small planted-partition draw.
    FigEigvec(FigArgs),
    /// Detection accuracy across an SNR grid.
    Phase(PhaseArgs),
    /// Evaluate closed-form bounds and thresholds.
    Bounds(BoundsArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelKind {
    Er,
    Pp,
    Sbm,
    Dcsbm,
    Lsm,
    Ierm,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    model: Option<ModelKind>,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    a: Option<f64>,
    #[arg(long)]
    b: Option<f64>,
    /// JSON model description; required for sbm, dcsbm, lsm and ierm.
    #[arg(long)]
    spec: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    labels_out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum RegMode {
    Cap,
    Remove,
    Tau,
}

#[derive(Args)]
struct RegArgs {
    #[arg(long, value_enum)]
    mode: RegMode,
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    report: Option<PathBuf>,
    /// Degree scale; defaults to the average degree of the input.
    #[arg(long)]
    d_hat: Option<f64>,
    #[arg(long, default_value_t = 2.0)]
    multiplier: f64,
    /// Degree threshold for `remove`; defaults to `multiplier * d_hat`.
    #[arg(long)]
    threshold: Option<f64>,
    /// Explicit tau for `tau`; otherwise `rho * average degree`.
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    rho: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum OperatorKind {
    Adjacency,
    Laplacian,
    TauLaplacian,
}

#[derive(Clone, Copy, ValueEnum)]
enum WhichArg {
    LargestAlgebraic,
    SmallestAlgebraic,
    LargestMagnitude,
}

#[derive(Args)]
struct EigsArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, default_value_t = 2)]
    k: usize,
    #[arg(long, value_enum, default_value = "largest-algebraic")]
    which: WhichArg,
    #[arg(long, value_enum, default_value = "adjacency")]
    operator: OperatorKind,
    #[arg(long, default_value_t = 1.0)]
    rho: f64,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DetectArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, default_value = "laplacian-second-largest")]
    method: String,
    #[arg(long, default_value_t = 2)]
    k: usize,
    /// `tau = rho * average degree` for the Laplacian; 0 uses the plain one.
    #[arg(long, default_value_t = 1.0)]
    tau_rho: f64,
    /// Cap degrees at this multiple of the average degree before
    /// adjacency-based methods.
    #[arg(long)]
    cap_multiplier: Option<f64>,
    #[arg(long)]
    truth: Option<PathBuf>,
    #[arg(long)]
    labels_out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum GridKind {
    Er,
    Pp,
}

#[derive(Clone, Copy, ValueEnum)]
enum SweepMode {
    None,
    DegreeCap,
    VertexRemoval,
    TauLaplacian,
}

#[derive(Args)]
struct SweepArgs {
    /// JSON experiment configuration; replaces the grid flags.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "er")]
    model: GridKind,
    #[arg(long, value_delimiter = ',')]
    d: Vec<f64>,
    /// `a:b` pairs for the planted partition model.
    #[arg(long, value_delimiter = ',')]
    pairs: Vec<String>,
    #[arg(long, value_delimiter = ',')]
    n: Vec<usize>,
    #[arg(long, default_value_t = 20)]
    replicates: usize,
    #[arg(long, value_enum, default_value = "none")]
    mode: SweepMode,
    #[arg(long, default_value_t = 2.0)]
    multiplier: f64,
    #[arg(long, default_value_t = 1.0)]
    rho: f64,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    /// Add closed-form bound values next to the measurements.
    #[arg(long)]
    scorecard: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FigArgs {
    #[arg(long, default_value_t = 50)]
    n: usize,
    #[arg(long, default_value_t = 5.0)]
    a: f64,
    #[arg(long, default_value_t = 0.1)]
    b: f64,
    #[arg(long, default_value_t = 0.1)]
    rho: f64,
    /// Summarize this many seeded draws instead of printing one table.
    #[arg(long)]
    draws: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PhaseArgs {
    #[arg(long, default_value_t = 10.0)]
    d: f64,
    #[arg(long, value_delimiter = ',', default_value = "0,2,5,10,15")]
    snr: Vec<f64>,
    #[arg(long, default_value_t = 4000)]
    n: usize,
    #[arg(long, default_value_t = 50)]
    replicates: usize,
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "regularized-adjacency,regularized-laplacian"
    )]
    methods: Vec<String>,
    #[arg(long, default_value_t = 1.0)]
    rho: f64,
    #[arg(long, default_value_t = 2.0)]
    cap_multiplier: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BoundsArgs {
    /// One of bai-yin, bernstein, bvh, benaych, thm51, thm54.
    #[arg(long, conflicts_with_all = ["thresholds", "regime"])]
    bound: Option<String>,
    /// Recovery thresholds for `a`, `b`, `n`.
    #[arg(long)]
    thresholds: bool,
    /// Regime label for `n`, `d`.
    #[arg(long)]
    regime: bool,
    #[arg(long, default_value_t = 0.0)]
    d: f64,
    #[arg(long, default_value_t = 2)]
    n: usize,
    #[arg(long, default_value_t = 1.0)]
    c: f64,
    #[arg(long, default_value_t = 1.0)]
    r: f64,
    #[arg(long, default_value_t = 1.0)]
    tau: f64,
    #[arg(long, default_value_t = 0.0)]
    a: f64,
    #[arg(long, default_value_t = 0.0)]
    b: f64,
}

fn usage(msg: impl Into<String>) -> Error {
    Error::Parameter(msg.into())
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn read_graph(path: &Path) -> Result<Graph> {
    Graph::read_tsv(BufReader::new(File::open(path)?))
}

fn read_labels(path: &Path) -> Result<LabelVector> {
    LabelVector::read_text(BufReader::new(File::open(path)?))
}

fn float(x: f64) -> String {
    format!("{x:.16e}")
}

fn gen(args: GenArgs, seed: u64) -> Result<()> {
    let spec = match (&args.spec, args.model) {
        (Some(path), _) => serde_json::from_reader(BufReader::new(File::open(path)?))?,
        (None, Some(ModelKind::Er)) => ModelSpec::ErdosRenyi {
            p: args.p.ok_or_else(|| usage("--model er needs --p"))?,
        },
        (None, Some(ModelKind::Pp)) => ModelSpec::PlantedPartition {
            a: args.a.ok_or_else(|| usage("--model pp needs --a"))?,
            b: args.b.ok_or_else(|| usage("--model pp needs --b"))?,
        },
        (None, Some(_)) => return Err(usage("this model needs a --spec file")),
        (None, None) => return Err(usage("give --model or --spec")),
    };
    let (graph, labels) = sample(&spec, args.n, seed)?;
    let mut out = output(args.out.as_deref())?;
    graph.write_tsv(&mut out)?;
    out.flush()?;
    if let Some(path) = &args.labels_out {
        let mut w = BufWriter::new(File::create(path)?);
        labels.write_text(&mut w)?;
        w.flush()?;
    }
    Ok(())
}

fn write_report(path: Option<&Path>, value: &serde_json::Value, fallback_stdout: bool) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    match path {
        Some(p) => std::fs::write(p, text + "\n")?,
        None if fallback_stdout => println!("{text}"),
        None => eprintln!("{text}"),
    }
    Ok(())
}

fn reg(args: RegArgs) -> Result<()> {
    let graph = read_graph(&args.input)?;
    let d_hat = args.d_hat.unwrap_or_else(|| graph.average_degree());
    match args.mode {
        RegMode::Cap => {
            let (out_graph, report) = degree_regularize(&graph, d_hat, args.multiplier)?;
            let mut out = output(args.out.as_deref())?;
            out_graph.write_tsv(&mut out)?;
            out.flush()?;
            let mut value = serde_json::to_value(&report)?;
            value["mode"] = json!("cap");
            write_report(args.report.as_deref(), &value, false)
        }
        RegMode::Remove => {
            let threshold = args.threshold.unwrap_or(args.multiplier * d_hat);
            let out_graph = remove_high_degree(&graph, threshold)?;
            let mut out = output(args.out.as_deref())?;
            out_graph.write_tsv(&mut out)?;
            out.flush()?;
            let removed: Vec<usize> = (0..graph.n())
                .filter(|&i| graph.degrees()[i] > threshold)
                .collect();
            let value = json!({
                "mode": "remove",
                "threshold": threshold,
                "removed": removed,
                "edges_before": graph.edge_count(),
                "edges_after": out_graph.edge_count(),
            });
            write_report(args.report.as_deref(), &value, false)
        }
        RegMode::Tau => {
            let tau = match args.tau {
                Some(t) if t >= 0.0 => t,
                Some(t) => return Err(usage(format!("tau = {t} must be non-negative"))),
                None => choose_tau(&graph, args.rho)?,
            };
            let value = json!({
                "mode": "tau",
                "tau": tau,
                "rho": args.tau.is_none().then_some(args.rho),
                "n": graph.n(),
                "average_degree": graph.average_degree(),
                "rank_one_entry": if graph.n() > 0 { tau / graph.n() as f64 } else { 0.0 },
            });
            write_report(args.report.as_deref(), &value, true)
        }
    }
}

fn graph_operator(graph: &Graph, kind: OperatorKind, rho: f64) -> Result<SymmetricOperator> {
    match kind {
        OperatorKind::Adjacency => Ok(SymmetricOperator::from_graph(graph)),
        OperatorKind::Laplacian => Ok(laplacian(graph)),
        OperatorKind::TauLaplacian => {
            let tau = if rho == 0.0 { 0.0 } else { choose_tau(graph, rho)? };
            if tau > 0.0 {
                regularized_laplacian(graph, tau)
            } else {
                Ok(laplacian(graph))
            }
        }
    }
}

fn eigs(args: EigsArgs, seed: u64) -> Result<()> {
    let graph = read_graph(&args.input)?;
    let op = graph_operator(&graph, args.operator, args.rho)?;
    let which = match args.which {
        WhichArg::LargestAlgebraic => Which::LargestAlgebraic,
        WhichArg::SmallestAlgebraic => Which::SmallestAlgebraic,
        WhichArg::LargestMagnitude => Which::LargestMagnitude,
    };
    let pairs = top_eigs(&op, args.k, which, args.tol, seed)?;
    let mut out = output(args.out.as_deref())?;
    writeln!(out, "index,value")?;
    for (i, p) in pairs.iter().enumerate() {
        writeln!(out, "{},{}", i + 1, float(p.value))?;
    }
    writeln!(out, "norm,{}", float(spectral_norm(&op, args.tol)?))?;
    out.flush()?;
    Ok(())
}

fn detect(args: DetectArgs, seed: u64) -> Result<()> {
    let mode: SpectralMode = args.method.parse()?;
    let graph = read_graph(&args.input)?;
    let op = match mode {
        SpectralMode::LaplacianSecondLargest => graph_operator(&graph, OperatorKind::TauLaplacian, args.tau_rho)?,
        _ => match args.cap_multiplier {
            Some(m) => {
                let (capped, _) = degree_regularize(&graph, graph.average_degree().max(f64::MIN_POSITIVE), m)?;
                SymmetricOperator::from_graph(&capped)
            }
            None => SymmetricOperator::from_graph(&graph),
        },
    };
    let labels = spectral_cluster(&op, args.k, mode, seed)?;
    let truth = args.truth.as_deref().map(read_labels).transpose()?;
    match (&args.labels_out, &truth) {
        (Some(path), _) => {
            let mut w = BufWriter::new(File::create(path)?);
            labels.write_text(&mut w)?;
            w.flush()?;
        }
        (None, None) => {
            let mut out = output(None)?;
            labels.write_text(&mut out)?;
            out.flush()?;
        }
        (None, Some(_)) => {}
    }
    if let Some(truth) = truth {
        let rate = misclassification_rate(&labels, &truth)?;
        let record = json!({
            "n": graph.n(),
            "k": args.k,
            "method": args.method,
            "misclassification": rate,
            "errors": (rate * graph.n() as f64).round() as usize,
        });
        println!("{record}");
    }
    Ok(())
}

fn parse_pair(s: &str) -> Result<(f64, f64)> {
    let (a, b) = s
        .split_once(':')
        .ok_or_else(|| usage(format!("expected a:b, got `{s}`")))?;
    let parse = |x: &str| x.trim().parse::<f64>().map_err(|e| usage(format!("`{x}`: {e}")));
    Ok((parse(a)?, parse(b)?))
}

fn sweep(args: SweepArgs, seed: u64) -> Result<()> {
    let config = match &args.config {
        Some(path) => serde_json::from_reader(BufReader::new(File::open(path)?))?,
        None => {
            let model = match args.model {
                GridKind::Er => GridModel::ErdosRenyi { degrees: args.d.clone() },
                GridKind::Pp => GridModel::PlantedPartition {
                    pairs: args.pairs.iter().map(|s| parse_pair(s)).collect::<Result<_>>()?,
                },
            };
            let regularization = match args.mode {
                SweepMode::None => Regularization::None,
                SweepMode::DegreeCap => Regularization::DegreeCap { multiplier: args.multiplier },
                SweepMode::VertexRemoval => Regularization::VertexRemoval { multiplier: args.multiplier },
                SweepMode::TauLaplacian => Regularization::TauLaplacian { rho: args.rho },
            };
            ExperimentConfig {
                model,
                n_grid: args.n.clone(),
                replicates: args.replicates,
                regularization,
                seed,
                tol: args.tol,
            }
        }
    };
    let result = if args.scorecard {
        experiments::bound_scorecard(&config)?
    } else {
        experiments::measure_concentration(&config)?
    };
    let mut out = output(args.out.as_deref())?;
    result.write_csv(&mut out)?;
    out.flush()?;
    Ok(())
}

fn fig_eigvec(args: FigArgs, seed: u64) -> Result<()> {
    let config = Figure2Config {
        n: args.n,
        a: args.a,
        b: args.b,
        rho: args.rho,
        seed,
    };
    if let Some(draws) = args.draws {
        let summary = experiments::figure2_batch(&config, draws)?;
        let value = json!({
            "draws": summary.draws,
            "median_misclassification_plain": summary.median_plain,
            "median_misclassification_regularized": summary.median_regularized,
            "fraction_regularized_at_most_three": summary.fraction_regularized_at_most_three,
            "fraction_plain_localized": summary.fraction_plain_localized,
        });
        let mut out = output(args.out.as_deref())?;
        writeln!(out, "{}", serde_json::to_string_pretty(&value)?)?;
        out.flush()?;
        return Ok(());
    }
    let result = experiments::figure2(&config)?;
    let mut out = output(args.out.as_deref())?;
    result.write_csv(&mut out)?;
    out.flush()?;
    eprintln!(
        "{}",
        json!({
            "tau": result.tau,
            "misclassification_plain": result.misclassification_plain,
            "misclassification_regularized": result.misclassification_regularized,
            "participation_plain": result.participation_plain,
        })
    );
    Ok(())
}

fn phase(args: PhaseArgs, seed: u64) -> Result<()> {
    let methods = args
        .methods
        .iter()
        .map(|m| m.parse::<PhaseMethod>())
        .collect::<Result<Vec<_>>>()?;
    let config = PhaseConfig {
        d: args.d,
        snr_grid: args.snr,
        n: args.n,
        replicates: args.replicates,
        methods,
        seed,
        rho: args.rho,
        cap_multiplier: args.cap_multiplier,
    };
    let result = experiments::phase_sweep(&config)?;
    let mut out = output(args.out.as_deref())?;
    result.write_csv(&mut out)?;
    out.flush()?;
    Ok(())
}

fn bounds_cmd(args: BoundsArgs) -> Result<()> {
    if args.thresholds {
        let t = bounds::recovery_thresholds(args.a, args.b, args.n)?;
        println!("{}", serde_json::to_string_pretty(&t)?);
    } else if args.regime {
        println!("{}", bounds::classify_regime(args.n, args.d)?);
    } else {
        let name = args
            .bound
            .as_deref()
            .ok_or_else(|| usage("give --bound, --thresholds or --regime"))?;
        let value = bounds::evaluate_named(
            name,
            BoundArgs {
                d: args.d,
                n: args.n,
                c: args.c,
                r: args.r,
                tau: args.tau,
            },
        )?;
        println!("{value}");
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    if let Some(threads) = cli.threads {
        if threads == 0 {
            return Err(usage("--threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| usage(e.to_string()))?;
    }
    let seed = cli.seed;
    match cli.command {
        Command::Gen(a) => gen(a, seed),
        Command::Reg(a) => reg(a),
        Command::Eigs(a) => eigs(a, seed),
        Command::Detect(a) => detect(a, seed),
        Command::Sweep(a) => sweep(a, seed),
        Command::FigEigvec(a) => fig_eigvec(a, seed),
        Command::Phase(a) => phase(a, seed),
        Command::Bounds(a) => bounds_cmd(a),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Numerical { .. } => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
    }
}
