use std::fs;
use std::io::Write;
use std::net::{IpAddr, SocketAddr};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use seedgrow_core::io::{self as cio, CsvOptions};
use seedgrow_core::{
    assign_new, benchmark, cluster_recovery, evaluate, run, Bench, BenchmarkSpec,
    DEFAULT_MAX_ITERATIONS,
};

#[derive(Parser)]
#[command(
    name = "seedgrow",
    version,
    about = "Grow clusters from a few seed labels"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum BenchArg {
    #[value(name = "1d")]
    OneD,
    #[value(name = "2d")]
    TwoD,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic benchmark: data.csv, spec.txt and seeds.csv.
    Generate {
        #[arg(long)]
        bench: BenchArg,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Cluster a dataset from seed labels: results.csv, model.json, report.txt.
    Cluster {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        seeds: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = DEFAULT_MAX_ITERATIONS)]
        max_iter: usize,
        /// Column to exclude from the features (default: `label` if present).
        #[arg(long)]
        label_column: Option<String>,
        /// Column holding point ids (default: row order).
        #[arg(long)]
        id_column: Option<String>,
    },
    /// Compare predicted labels with ground truth.
    Evaluate {
        /// Results CSV (id,label,score).
        #[arg(long)]
        pred: PathBuf,
        /// CSV holding a truth label column.
        #[arg(long)]
        truth: PathBuf,
        #[arg(long, default_value = "label")]
        truth_column: String,
        /// Benchmark spec; adds per-cluster recovery (the truth file must
        /// then be the benchmark's data.csv).
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long, default_value_t = 2.0, requires = "spec")]
        radius: f64,
        /// Also write the report as key-value text.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Assign new points to the clusters of a saved model.
    Predict {
        #[arg(long)]
        model: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
        /// Output CSV (default: stdout).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        label_column: Option<String>,
    },
    /// Start the HTTP service.
    Serve {
        #[arg(long)]
        port: u16,
        #[arg(long)]
        data_dir: PathBuf,
        #[arg(long, default_value = "127.0.0.1")]
        host: IpAddr,
        /// Directory of static files served outside /api.
        #[arg(long)]
        static_dir: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Generate { bench, seed, out } => generate(bench, seed, &out),
        Command::Cluster {
            data,
            seeds,
            out,
            max_iter,
            label_column,
            id_column,
        } => cluster(&data, &seeds, &out, max_iter, label_column, id_column),
        Command::Evaluate {
            pred,
            truth,
            truth_column,
            spec,
            radius,
            out,
        } => evaluate_cmd(
            &pred,
            &truth,
            &truth_column,
            spec.as_deref(),
            radius,
            out.as_deref(),
        ),
        Command::Predict {
            model,
            input,
            out,
            label_column,
        } => predict(&model, &input, out.as_deref(), label_column),
        Command::Serve {
            port,
            data_dir,
            host,
            static_dir,
        } => serve(SocketAddr::new(host, port), data_dir, static_dir),
    }
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn generate(bench: BenchArg, seed: u64, out: &Path) -> Result<()> {
    let bench = match bench {
        BenchArg::OneD => Bench::OneD,
        BenchArg::TwoD => Bench::TwoD,
    };
    let (dataset, spec, seeds) = benchmark(bench, seed)?;
    create_dir(out)?;
    cio::save_csv(&out.join("data.csv"), &dataset)?;
    write_text(&out.join("spec.txt"), &spec.to_kv())?;
    cio::save_seeds(&out.join("seeds.csv"), &seeds)?;
    println!(
        "wrote {} points, {} seeds to {}",
        dataset.len(),
        seeds.len(),
        out.display()
    );
    Ok(())
}

/// Explicit columns win; otherwise a column named `label` is treated as
/// truth and left out of the features.
fn csv_options(
    path: &Path,
    label_column: Option<String>,
    id_column: Option<String>,
) -> Result<CsvOptions> {
    let label_column = match label_column {
        Some(c) => Some(c),
        None => cio::csv_header(path)?
            .iter()
            .any(|h| h == "label")
            .then(|| "label".to_string()),
    };
    Ok(CsvOptions {
        label_column,
        id_column,
    })
}

fn cluster(
    data: &Path,
    seeds: &Path,
    out: &Path,
    max_iter: usize,
    label_column: Option<String>,
    id_column: Option<String>,
) -> Result<()> {
    let options = csv_options(data, label_column, id_column)?;
    let dataset = cio::load_csv(data, &options)?;
    let seeds = cio::load_seeds(seeds)?;
    let (assignment, report) = run(&dataset, &seeds, max_iter)?;
    create_dir(out)?;
    cio::save_results(&out.join("results.csv"), &assignment)?;
    cio::save_model(&out.join("model.json"), &assignment.models)?;
    write_text(&out.join("report.txt"), &cio::report_to_kv(&report))?;
    let anomalies = assignment.labels.iter().filter(|l| l.is_anomaly()).count();
    println!(
        "{} points, {} clusters, {} anomalies; {} passes, converged: {}",
        dataset.len(),
        assignment.models.len(),
        anomalies,
        report.passes,
        report.converged.as_str()
    );
    Ok(())
}

fn evaluate_cmd(
    pred: &Path,
    truth: &Path,
    truth_column: &str,
    spec: Option<&Path>,
    radius: f64,
    out: Option<&Path>,
) -> Result<()> {
    let (labels, _) = cio::load_results(pred)?;
    let truth_labels = cio::load_labels(truth, truth_column)?;
    let report = evaluate(&labels, &truth_labels)?;
    let mut table = report.to_table();
    let mut kv = report.to_kv();
    if let Some(spec_path) = spec {
        let text = fs::read_to_string(spec_path)
            .with_context(|| format!("reading {}", spec_path.display()))?;
        let spec = BenchmarkSpec::from_kv(&text)?;
        let options = CsvOptions {
            label_column: Some(truth_column.to_string()),
            id_column: None,
        };
        let dataset = cio::load_csv(truth, &options)?;
        let recovery = cluster_recovery(&labels, &dataset, &spec, radius)?;
        table.push_str(&format!("\nrecovery within {radius} std:\n"));
        for (c, r) in &recovery {
            let shown = r.map_or_else(|| "undefined".to_string(), |v| format!("{v:.6}"));
            table.push_str(&format!("{c:>8} {shown:>10}\n"));
            kv.push_str(&format!(
                "recovery.{c} = {}\n",
                r.map_or_else(|| "undefined".to_string(), |v| v.to_string())
            ));
        }
    }
    if let Some(out) = out {
        write_text(out, &kv)?;
    }
    print!("{table}");
    Ok(())
}

fn predict(
    model: &Path,
    input: &Path,
    out: Option<&Path>,
    label_column: Option<String>,
) -> Result<()> {
    let models = cio::load_model(model)?;
    let options = csv_options(input, label_column, None)?;
    let dataset = cio::load_csv(input, &options)?;
    let mut labels = Vec::with_capacity(dataset.len());
    let mut scores = Vec::with_capacity(dataset.len());
    for p in dataset.points() {
        let (l, s) = assign_new(&models, p)?;
        labels.push(l);
        scores.push(s);
    }
    match out {
        Some(path) => {
            let file =
                fs::File::create(path).with_context(|| format!("writing {}", path.display()))?;
            cio::write_results(file, &labels, &scores)?;
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            cio::write_results(&mut lock, &labels, &scores)?;
            lock.flush()?;
        }
    }
    Ok(())
}

fn serve(addr: SocketAddr, data_dir: PathBuf, static_dir: Option<PathBuf>) -> Result<()> {
    if let Some(dir) = &static_dir {
        if !dir.is_dir() {
            bail!("static directory {} does not exist", dir.display());
        }
    }
    let runtime = tokio::runtime::Runtime::new().context("starting runtime")?;
    eprintln!("listening on http://{addr}");
    runtime
        .block_on(seedgrow_service::serve(addr, data_dir, static_dir))
        .with_context(|| format!("serving on {addr}"))
}
