use std::net::SocketAddr;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use dataedron_arxiv::ArxivClient;
use dataedron_core::facet::ReducedFacet;
use dataedron_service::{Engine, NavigateRequest, SearchRequest, ServiceError, SessionStore, DATA_DIR_ENV};

#[derive(Parser)]
#[command(name = "dataedron", version, about = "Faceted exploration of Arxiv search results")]
struct Cli {
    /// Directory holding session files.
    #[arg(long, global = true, env = DATA_DIR_ENV, default_value = "dataedron-sessions")]
    data_dir: PathBuf,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a query and store the results in a new (or existing) session.
    Search {
        query: String,
        #[arg(long, short = 'n', default_value_t = dataedron_service::DEFAULT_N)]
        max_results: usize,
        #[arg(long, short = 'w', default_value_t = dataedron_service::DEFAULT_W)]
        top_words: usize,
        /// Reference type used to build facets.
        #[arg(long)]
        rho: Option<String>,
        /// Continue this session instead of creating one.
        #[arg(long)]
        session: Option<String>,
        /// Read Atom feeds from this directory instead of the network.
        #[arg(long, value_name = "DIR")]
        offline: Option<PathBuf>,
    },
    /// Print the facet of a type for a stored session.
    Facet {
        sid: String,
        alpha: String,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Navigate from a selection of vertices in one facet to another type.
    Navigate {
        sid: String,
        alpha: String,
        /// Comma-separated vertex labels.
        #[arg(long, value_delimiter = ',', required = true)]
        select: Vec<String>,
        #[arg(long)]
        target: String,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Print the query history of a session.
    History { sid: String },
    /// Start the HTTP service.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: std::net::IpAddr,
        #[arg(long, value_name = "DIR")]
        offline: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Dot,
}

/// Link thickness range of the dot export.
const T_MIN: f64 = 1.0;
const T_MAX: f64 = 8.0;

/// `println!` that stops quietly when stdout is closed early, e.g. by `head`.
macro_rules! emit {
    () => { emit_line(String::new()) };
    ($($arg:tt)*) => { emit_line(format!($($arg)*)) };
}

fn emit_line(mut line: String) {
    use std::io::Write;
    line.push('\n');
    if let Err(e) = std::io::stdout().lock().write_all(line.as_bytes()) {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            std::process::exit(0);
        }
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}

struct Failure {
    code: u8,
    message: String,
}

impl From<ServiceError> for Failure {
    fn from(e: ServiceError) -> Self {
        let code = match e {
            ServiceError::Parse(_) | ServiceError::Query(_) | ServiceError::InvalidParams(_) => 2,
            _ => 1,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn runtime(message: impl ToString) -> Failure {
    Failure {
        code: 1,
        message: message.to_string(),
    }
}

fn engine(data_dir: PathBuf, offline: Option<PathBuf>) -> Result<Engine, Failure> {
    let store = SessionStore::open(data_dir)?;
    let client = match offline {
        Some(dir) => ArxivClient::offline(dir),
        None => ArxivClient::http(),
    };
    Ok(Engine::new(store, client))
}

fn render(f: &ReducedFacet, format: Format, name: &str) -> Result<String, Failure> {
    match format {
        Format::Json => Ok(f.to_json()),
        Format::Dot => {
            let layout = f.hbgraph().extra_node_layout(T_MIN, T_MAX).map_err(runtime)?;
            Ok(layout.to_dot(name))
        }
    }
}

fn truncate(s: &str, width: usize) -> String {
    if s.chars().count() <= width {
        s.to_owned()
    } else {
        let mut t: String = s.chars().take(width.saturating_sub(1)).collect();
        t.push('…');
        t
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Search {
            query,
            max_results,
            top_words,
            rho,
            session,
            offline,
        } => {
            let engine = engine(cli.data_dir, offline)?;
            let summary = engine.search(&SearchRequest {
                query,
                n: Some(max_results),
                w: Some(top_words),
                rho,
                session_id: session,
            })?;
            emit!("session {}", summary.session_id);
            emit!("query   {}", summary.query);
            emit!("facets  {}", summary.facets.join(", "));
            emit!();
            for (i, e) in summary.entries.iter().enumerate() {
                emit!(
                    "{:>3}  {:<16}  {:<60}  {}",
                    i + 1,
                    e.id,
                    truncate(&e.title, 60),
                    truncate(&e.authors.join("; "), 40)
                );
            }
        }
        Command::Facet { sid, alpha, format } => {
            let engine = engine(cli.data_dir, None)?;
            let f = engine.facet(&sid, &alpha)?;
            emit!("{}", render(&f, format, &alpha)?);
        }
        Command::Navigate {
            sid,
            alpha,
            select,
            target,
            format,
        } => {
            let engine = engine(cli.data_dir, None)?;
            let nav = engine.navigate(&NavigateRequest {
                sid,
                alpha,
                selection: select.into_iter().map(|s| s.trim().to_owned()).collect(),
                target_alpha: target.clone(),
            })?;
            match format {
                Format::Json => emit!("{}", serde_json::to_string(&nav).map_err(runtime)?),
                Format::Dot => emit!("{}", render(&nav.facet, format, &target)?),
            }
        }
        Command::History { sid } => {
            let engine = engine(cli.data_dir, None)?;
            let h = engine.history(&sid)?;
            emit!("{}", serde_json::to_string(&h).map_err(runtime)?);
        }
        Command::Serve { port, host, offline } => {
            let engine = Arc::new(engine(cli.data_dir, offline)?);
            let rt = tokio::runtime::Runtime::new().map_err(runtime)?;
            rt.block_on(dataedron_service::serve(engine, SocketAddr::new(host, port)))
                .map_err(runtime)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env()
                .unwrap_or_else(|_| "warn,dataedron_service::api=info".into()),
        )
        .with_writer(std::io::stderr)
        .init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
