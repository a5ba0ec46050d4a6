use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::builder::BoolishValueParser;
use clap::{Args, Parser, Subcommand};
use oga_archive::ImportOptions;
use oga_core::analysis::{analyze, AnalysisConfig, AnalysisError, DEFAULT_VERTEX_THRESHOLD};
use oga_core::formats::{self, FormatId, ParseOptions};
use oga_core::generators::{mutate_rome, north_provenance, rome_provenance, sanitize_north, MutationConfig};
use oga_core::metadata::Tag;
use oga_core::Graph;
use oga_server::config::{DEFAULT_LAYOUT_NODE_LIMIT, DEFAULT_LISTEN_ADDR, DEFAULT_MAX_UPLOAD_BYTES};
use oga_server::{issue_token, open_store, serve, ServerConfig};
use serde::Deserialize;

type CliResult = Result<(), Box<dyn std::error::Error>>;

#[derive(Parser)]
#[command(name = "oga", version, about = "Open graph archive: service and tools")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct DataDir {
    /// Archive directory.
    #[arg(long, env = "OGA_DATA_DIR", default_value = "oga-data")]
    data_dir: PathBuf,
}

#[derive(Args)]
struct ServeArgs {
    #[command(flatten)]
    data: DataDir,
    #[arg(long, env = "OGA_LISTEN_ADDR", default_value = DEFAULT_LISTEN_ADDR)]
    listen: String,
    /// Accept writes without a token.
    #[arg(long, env = "OGA_OPEN_MODE", value_parser = BoolishValueParser::new(), num_args = 0..=1,
          default_value_t = false, default_missing_value = "true")]
    open_mode: bool,
    /// Graphs with at least this many nodes only get basic statistics.
    #[arg(long, env = "OGA_VERTEX_THRESHOLD", default_value_t = DEFAULT_VERTEX_THRESHOLD)]
    vertex_threshold: usize,
    /// Per-graph analysis budget in seconds; 0 disables it.
    #[arg(long, default_value_t = 60)]
    time_budget_secs: u64,
    #[arg(long, default_value_t = DEFAULT_LAYOUT_NODE_LIMIT)]
    layout_node_limit: usize,
    #[arg(long, default_value_t = DEFAULT_MAX_UPLOAD_BYTES)]
    max_upload_bytes: usize,
    /// Cap on the summed size of stored originals.
    #[arg(long)]
    max_archive_bytes: Option<u64>,
    /// Require `license_ack=true` on uploads.
    #[arg(long, env = "OGA_REQUIRE_LICENSE_ACK", value_parser = BoolishValueParser::new(), num_args = 0..=1,
          default_value_t = false, default_missing_value = "true")]
    require_license_ack: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run the HTTP service and its analysis worker.
    Serve(ServeArgs),
    /// Convert a graph file between formats; losses go to stderr.
    Convert {
        input: PathBuf,
        output: PathBuf,
        /// Input format; sniffed from the content when omitted.
        #[arg(long)]
        from: Option<FormatId>,
        /// Output format; taken from the output extension when omitted.
        #[arg(long)]
        to: Option<FormatId>,
        /// Flatten or drop unsupported constructs instead of failing.
        #[arg(long)]
        lenient: bool,
    },
    /// Print the structural properties of a graph file as JSON.
    Analyze {
        file: PathBuf,
        #[arg(long)]
        format: Option<FormatId>,
        #[arg(long, env = "OGA_VERTEX_THRESHOLD", default_value_t = DEFAULT_VERTEX_THRESHOLD)]
        vertex_threshold: usize,
    },
    /// Build a graph collection from seed graphs.
    Generate {
        #[command(subcommand)]
        kind: Generate,
    },
    /// Import a zip of graph files straight into the archive.
    Import {
        zip: PathBuf,
        #[command(flatten)]
        data: DataDir,
        #[arg(long)]
        creator: String,
        /// Comma separated tags for every imported graph.
        #[arg(long)]
        tags: Option<String>,
    },
    /// Manage API tokens.
    Token {
        #[command(subcommand)]
        action: TokenAction,
    },
    /// Check that every stored graph still matches its original bytes.
    Audit {
        #[command(flatten)]
        data: DataDir,
    },
}

#[derive(Subcommand)]
enum Generate {
    /// Mutate seed graphs into small connected variants.
    Rome {
        /// Seed graph file; repeatable.
        #[arg(long = "seed", required = true)]
        seeds: Vec<PathBuf>,
        /// JSON mutation configuration; defaults apply to missing fields.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "gml")]
        format: FormatId,
    },
    /// Deduplicate digraphs and make them connected and acyclic.
    North {
        /// Input digraph file; repeatable.
        #[arg(long = "seed", required = true)]
        inputs: Vec<PathBuf>,
        /// JSON object with `rng_seed`.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "gml")]
        format: FormatId,
    },
}

#[derive(Subcommand)]
enum TokenAction {
    /// Create a token for an account and print it.
    Issue {
        owner: String,
        #[command(flatten)]
        data: DataDir,
    },
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct NorthConfig {
    rng_seed: u64,
}

fn read_graph(path: &Path, format: Option<FormatId>, options: ParseOptions) -> Result<Graph, Box<dyn std::error::Error>> {
    let bytes = std::fs::read(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let format = match format {
        Some(f) => f,
        None => formats::detect_format(&bytes).map_err(|e| format!("{}: {e}", path.display()))?,
    };
    let (graph, report) = formats::parse_with(&bytes, format, options).map_err(|e| format!("{}: {e}", path.display()))?;
    if !report.lossless() {
        eprintln!("{}: flattened on read: {report}", path.display());
    }
    Ok(graph)
}

fn read_json<T: serde::de::DeserializeOwned + Default>(path: Option<&Path>) -> Result<T, Box<dyn std::error::Error>> {
    match path {
        None => Ok(T::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()))?;
            Ok(serde_json::from_str(&text).map_err(|e| format!("{}: {e}", p.display()))?)
        }
    }
}

fn write_graphs(out: &Path, prefix: &str, graphs: &[Graph], format: FormatId) -> CliResult {
    std::fs::create_dir_all(out)?;
    for (i, g) in graphs.iter().enumerate() {
        let (bytes, report) = formats::serialize(g, format)?;
        if !report.lossless() {
            eprintln!("{prefix}{i}: {report}");
        }
        std::fs::write(out.join(format!("{prefix}{i}.{}", format.extension())), bytes)?;
    }
    Ok(())
}

fn stem(path: &Path) -> String {
    path.file_stem().map_or_else(|| "seed".into(), |s| s.to_string_lossy().into_owned())
}

fn run(cli: Cli) -> CliResult {
    match cli.command {
        Command::Serve(a) => {
            let mut config = ServerConfig::new(a.data.data_dir);
            config.listen_addr = a.listen;
            config.open_mode = a.open_mode;
            config.require_license_ack = a.require_license_ack;
            config.max_upload_bytes = a.max_upload_bytes;
            config.max_archive_bytes = a.max_archive_bytes;
            config.worker.analysis = AnalysisConfig {
                vertex_threshold: a.vertex_threshold,
                time_budget: (a.time_budget_secs > 0).then(|| Duration::from_secs(a.time_budget_secs)),
            };
            config.worker.layout_node_limit = a.layout_node_limit;
            let runtime = tokio::runtime::Runtime::new()?;
            runtime.block_on(serve(config))?;
        }
        Command::Convert {
            input,
            output,
            from,
            to,
            lenient,
        } => {
            let to = match to {
                Some(f) => f,
                None => output
                    .to_str()
                    .and_then(FormatId::from_extension)
                    .ok_or("cannot tell the output format from its extension; pass --to")?,
            };
            let options = if lenient { ParseOptions::lenient() } else { ParseOptions::default() };
            let g = read_graph(&input, from, options)?;
            let (bytes, report) = formats::serialize(&g, to)?;
            std::fs::write(&output, bytes)?;
            if !report.lossless() {
                eprintln!("dropped: {report}");
            }
        }
        Command::Analyze {
            file,
            format,
            vertex_threshold,
        } => {
            let g = read_graph(&file, format, ParseOptions::default())?;
            let cfg = AnalysisConfig {
                vertex_threshold,
                ..AnalysisConfig::default()
            };
            let props = match analyze(&g, &cfg) {
                Ok(p) => p,
                Err(AnalysisError::TimeBudgetExceeded { partial }) => *partial,
                Err(e) => return Err(e.into()),
            };
            println!("{}", serde_json::to_string_pretty(&props)?);
        }
        Command::Generate { kind } => match kind {
            Generate::Rome {
                seeds,
                config,
                out,
                format,
            } => {
                let cfg: MutationConfig = read_json(config.as_deref())?;
                let mut provenance = String::new();
                let mut total = 0;
                for path in &seeds {
                    let seed = read_graph(path, None, ParseOptions::default())?;
                    let name = stem(path);
                    let graphs = mutate_rome(&seed, &cfg)?;
                    write_graphs(&out, &format!("{name}-"), &graphs, format)?;
                    provenance.push_str(&rome_provenance(&cfg, &name));
                    provenance.push('\n');
                    total += graphs.len();
                }
                std::fs::write(out.join("provenance.txt"), provenance)?;
                println!("wrote {total} graphs to {}", out.display());
            }
            Generate::North {
                inputs,
                config,
                out,
                format,
            } => {
                let cfg: NorthConfig = read_json(config.as_deref())?;
                let graphs = inputs
                    .iter()
                    .map(|p| read_graph(p, None, ParseOptions::default()))
                    .collect::<Result<Vec<_>, _>>()?;
                let cleaned = sanitize_north(&graphs, cfg.rng_seed)?;
                write_graphs(&out, "north-", &cleaned, format)?;
                std::fs::write(
                    out.join("provenance.txt"),
                    north_provenance(cfg.rng_seed, graphs.len(), cleaned.len()),
                )?;
                println!("wrote {} graphs to {}", cleaned.len(), out.display());
            }
        },
        Command::Import {
            zip,
            data,
            creator,
            tags,
        } => {
            let store = open_store(&ServerConfig::new(data.data_dir))?;
            let tags = tags
                .iter()
                .flat_map(|t| t.split(','))
                .filter(|t| !t.trim().is_empty())
                .map(Tag::freeform)
                .collect::<Result<Vec<_>, _>>()?;
            let options = ImportOptions {
                creator,
                tags,
                ..ImportOptions::default()
            };
            let mut failed = 0;
            for entry in store.import_zip(&std::fs::read(&zip)?, &options)? {
                match entry.result {
                    Ok(id) => println!("{}\t{id}", entry.filename),
                    Err(e) => {
                        failed += 1;
                        println!("{}\terror: {e}", entry.filename);
                    }
                }
            }
            if failed > 0 {
                return Err(format!("{failed} entries failed to import").into());
            }
        }
        Command::Token {
            action: TokenAction::Issue { owner, data },
        } => {
            let store = open_store(&ServerConfig::new(data.data_dir))?;
            println!("{}", issue_token(&store, &owner)?.token);
        }
        Command::Audit { data } => {
            let store = open_store(&ServerConfig::new(data.data_dir))?;
            let issues = store.audit()?;
            for issue in &issues {
                println!("{}\t{}", issue.id, issue.problem);
            }
            if !issues.is_empty() {
                return Err(format!("{} records failed the audit", issues.len()).into());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    tracing_subscriber::fmt().with_writer(std::io::stderr).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
