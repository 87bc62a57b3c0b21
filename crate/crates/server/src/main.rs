use std::path::PathBuf;
use std::sync::Arc;
use std::time::Duration;

use clap::{Parser, Subcommand};
use manipos::http::WATCH_PERIOD;
use manipos::{router, watch_files, Config, Workspace};
use manipos_core::interp::FuelPolicy;
use manipos_core::synth::Pcfg;

#[derive(Parser)]
#[command(name = "manipos", version, about = "Live-programming canvas server")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Serve every file in DIR at http://localhost:PORT/<file>.
    Serve {
        dir: PathBuf,
        /// Overridden by MANIPOS_PORT.
        #[arg(long, default_value_t = 1111)]
        port: u16,
        /// Grammar file with rule probabilities for synthesis.
        #[arg(long)]
        pcfg: Option<PathBuf>,
        #[arg(long, default_value_t = 10)]
        synth_timeout_s: u64,
        /// Evaluation steps per top-level binding.
        #[arg(long, default_value_t = 1000)]
        fuel: i64,
    },
}

#[tokio::main]
async fn main() -> Result<(), Box<dyn std::error::Error>> {
    let Command::Serve { dir, port, pcfg, synth_timeout_s, fuel } = Cli::parse().command;
    let port = match std::env::var("MANIPOS_PORT") {
        Ok(p) => p.parse()?,
        Err(_) => port,
    };
    let grammar = match pcfg {
        Some(path) => Some(Arc::new(Pcfg::parse(&std::fs::read_to_string(path)?)?)),
        None => None,
    };
    let config = Config {
        fuel: FuelPolicy { per_top_binding: fuel, ..FuelPolicy::default() },
        synth_timeout: Duration::from_secs(synth_timeout_s),
        grammar,
        ..Config::default()
    };
    let ws = Workspace::new(dir, config);
    tokio::spawn(watch_files(ws.clone(), WATCH_PERIOD));
    let listener = tokio::net::TcpListener::bind(("127.0.0.1", port)).await?;
    eprintln!("serving on http://{}", listener.local_addr()?);
    axum::serve(listener, router(ws)).await?;
    Ok(())
}
