use std::net::SocketAddr;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use aw_core::config::Config;
use clap::Parser;

#[derive(Parser)]
#[command(name = "aw-server", version, about = "Serves the curation JSON API")]
struct Args {
    /// TOML configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value = "127.0.0.1:8080")]
    bind: SocketAddr,
}

fn main() -> ExitCode {
    tracing_subscriber::fmt().with_writer(std::io::stderr).init();
    let args = Args::parse();
    let config = match args.config.as_deref().map(Config::load).transpose() {
        Ok(c) => c.unwrap_or_default(),
        Err(e) => {
            eprintln!("aw-server: {e}");
            return ExitCode::from(2);
        }
    };
    // Built outside the runtime: the outbound HTTP client is blocking.
    let app = match aw_server::build_app(&config) {
        Ok(app) => Arc::new(app),
        Err(e) => {
            eprintln!("aw-server: {e}");
            return ExitCode::from(1);
        }
    };

    let runtime = tokio::runtime::Runtime::new().expect("tokio runtime");
    let served = runtime.block_on(async {
        let listener = tokio::net::TcpListener::bind(args.bind).await?;
        tracing::info!(addr = %args.bind, "listening");
        axum::serve(listener, aw_server::router(app.clone()))
            .with_graceful_shutdown(async {
                let _ = tokio::signal::ctrl_c().await;
            })
            .await
    });
    drop(runtime);
    if let Err(e) = served {
        eprintln!("aw-server: {e}");
        return ExitCode::from(1);
    }
    if let Err(e) = aw_server::save_index(&app, &config.index_path) {
        eprintln!("aw-server: could not save the search index: {e}");
    }
    ExitCode::SUCCESS
}
