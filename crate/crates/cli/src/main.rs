//! `sa`: batch front end and server launcher for discrepancy dendrograms.

use std::fs;
use std::net::{IpAddr, SocketAddr};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use discrepancy::{
    analyze, load_dataset, shepard_matrix, synth, ColorBounds, Dataset64, DiamKind, Linkage,
    NormMode, SessionConfig,
};
use discrepancy_service::AppState;
use serde::Serialize;

#[derive(Parser)]
#[command(name = "sa", version, about = "Sensitivity analysis with discrepancy dendrograms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Load a manifest and report any violations.
    Validate { manifest: PathBuf },
    /// Compute a discrepancy dendrogram and its annotation.
    Dendrogram(DendrogramArgs),
    /// Compute the Shepard matrix of all space pairs.
    Shepard {
        manifest: PathBuf,
        #[arg(long, value_enum)]
        norm: Norm,
        #[arg(long)]
        out: PathBuf,
    },
    /// Serve the HTTP API for one dataset until interrupted.
    Serve {
        manifest: PathBuf,
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: IpAddr,
    },
    /// Generate synthetic datasets.
    #[command(subcommand)]
    Synth(Synth),
}

#[derive(Args)]
struct DendrogramArgs {
    manifest: PathBuf,
    #[arg(long)]
    primary: String,
    #[arg(long)]
    alt: String,
    #[arg(long)]
    leaf: Option<String>,
    #[arg(long, value_enum)]
    linkage: Link,
    #[arg(long, value_enum)]
    diam: Option<Link>,
    #[arg(long, value_enum)]
    norm: Norm,
    #[arg(long, value_enum, default_value_t = Bounds::Theoretical)]
    bounds: Bounds,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Synth {
    /// X uniform on [-4, 4] with endpoints, Y = x^2.
    Parabola {
        #[arg(long, default_value_t = 64)]
        n: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Link {
    Complete,
    Average,
}

#[derive(Clone, Copy, ValueEnum)]
enum Norm {
    Rank,
    Minmax,
}

#[derive(Clone, Copy, ValueEnum)]
enum Bounds {
    Theoretical,
    Data,
}

impl From<Link> for Linkage {
    fn from(l: Link) -> Self {
        match l {
            Link::Complete => Linkage::Complete,
            Link::Average => Linkage::Average,
        }
    }
}

impl From<Norm> for NormMode {
    fn from(n: Norm) -> Self {
        match n {
            Norm::Rank => NormMode::Rank,
            Norm::Minmax => NormMode::Minmax,
        }
    }
}

/// Exit 1 for bad input, 2 for anything else.
enum Failure {
    Input(String),
    Internal(String),
}

impl From<discrepancy::Error> for Failure {
    fn from(e: discrepancy::Error) -> Self {
        Failure::Input(report(&e))
    }
}

fn report(e: &discrepancy::Error) -> String {
    let mut msg = e.to_string();
    for v in e.violations() {
        msg.push_str(&format!("\n  {v}"));
    }
    msg
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Internal(msg)) => {
            eprintln!("internal error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Validate { manifest } => {
            let ds: Dataset64 = load_dataset(&manifest)?;
            println!(
                "ok: {} ({} cases, {} spaces)",
                ds.name(),
                ds.n(),
                ds.spaces().len()
            );
            Ok(())
        }
        Command::Dendrogram(args) => dendrogram(args),
        Command::Shepard { manifest, norm, out } => {
            let ds: Dataset64 = load_dataset(&manifest)?;
            write_json(&out, &shepard_matrix(&ds, norm.into())?)
        }
        Command::Serve {
            manifest,
            port,
            host,
        } => serve(&manifest, SocketAddr::new(host, port)),
        Command::Synth(Synth::Parabola { n, out }) => {
            let ds: Dataset64 = synth::parabola(n)?;
            let path = ds.write_manifest(&out)?;
            println!("{}", path.display());
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct DendrogramFile<'a> {
    dendrogram: &'a discrepancy::Dendrogram64,
    annotation: &'a discrepancy::Annotation64,
}

fn dendrogram(args: DendrogramArgs) -> Result<(), Failure> {
    let ds: Dataset64 = load_dataset(&args.manifest)?;
    let config = SessionConfig {
        leaf_space: args.leaf,
        diam_kind: args.diam.map(|d| DiamKind::from(Linkage::from(d))),
        color_bounds: match args.bounds {
            Bounds::Theoretical => ColorBounds::Theoretical,
            Bounds::Data => ColorBounds::Data,
        },
        ..SessionConfig::new(args.primary, args.alt, args.linkage.into(), args.norm.into())
    };
    let analysis = analyze(&ds, &config)?;
    write_json(
        &args.out,
        &DendrogramFile {
            dendrogram: &analysis.dendrogram,
            annotation: &analysis.annotation,
        },
    )
}

fn write_json<S: Serialize>(path: &Path, value: &S) -> Result<(), Failure> {
    let mut bytes = serde_json::to_vec_pretty(value).map_err(|e| Failure::Internal(e.to_string()))?;
    bytes.push(b'\n');
    fs::write(path, bytes).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn serve(manifest: &Path, addr: SocketAddr) -> Result<(), Failure> {
    let ds: Dataset64 = load_dataset(manifest)?;
    let rt = tokio::runtime::Runtime::new().map_err(|e| Failure::Internal(e.to_string()))?;
    rt.block_on(async move {
        let listener = discrepancy_service::bind(addr).await.map_err(|e| match e.kind() {
            std::io::ErrorKind::AddrInUse => Failure::Input(format!("PortInUse: {addr}")),
            _ => Failure::Input(format!("cannot bind {addr}: {e}")),
        })?;
        eprintln!("serving {} on http://{addr}", ds.name());
        discrepancy_service::serve(listener, Arc::new(AppState::new(ds)))
            .await
            .map_err(|e| Failure::Internal(e.to_string()))
    })
}
