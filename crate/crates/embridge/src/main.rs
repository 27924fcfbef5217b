use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use embridge::core::align::{build_dictionary, default_dictionary_size, learn_projection, rank_aligned_ids};
use embridge::core::eval::{ContentProtocolInput, ProtocolConfig, ProtocolSetup, SampleSize, DEFAULT_THRESHOLD, RANDOM_POOL};
use embridge::core::{EmbeddingMatrix, Error as CoreError, FrequencyTable, TrainConfig, Variant, WalkConfig, WalkCorpus};
use embridge::formats::{self, write_path};
use embridge::{parallel, report, Error, Result, RunRecord};

#[derive(Parser)]
#[command(name = "embridge", version, about = "Align node and content embeddings of a document network")]
struct Cli {
    /// Seed for walks, training and sampling.
    #[arg(long, env = "EMBRIDGE_SEED", global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads. One worker gives bit-identical output across runs.
    #[arg(long, global = true, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    workers: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print document, link, content and isolation counts.
    Stats {
        #[arg(long)]
        edges: PathBuf,
        #[arg(long)]
        content: Option<PathBuf>,
    },
    /// Generate truncated random walks and node frequencies.
    Walks {
        #[arg(long)]
        edges: PathBuf,
        /// Walk dump, one walk per line.
        #[arg(long)]
        out: PathBuf,
        /// Frequency table, `id<TAB>count` per node.
        #[arg(long)]
        freq: PathBuf,
        #[command(flatten)]
        walk: WalkArgs,
    },
    /// Train node embeddings with skip-gram over random walks.
    TrainNodes {
        /// Walk dump to train on.
        #[arg(long, conflicts_with = "edges", required_unless_present = "edges")]
        walks: Option<PathBuf>,
        /// Edge list to generate walks from instead.
        #[arg(long)]
        edges: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        walk: WalkArgs,
        #[command(flatten)]
        train: TrainArgs,
    },
    /// Train content embeddings with paragraph vectors.
    TrainDocs {
        #[arg(long)]
        content: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        train: TrainArgs,
        #[arg(long, value_enum, default_value_t = ContentVariant::DvDm)]
        variant: ContentVariant,
    },
    /// Learn the orthogonal map from content space to node space.
    Align {
        #[arg(long)]
        nodes: PathBuf,
        #[arg(long)]
        content: PathBuf,
        /// Frequency table ranking dictionary candidates; without it, the
        /// node file order is used.
        #[arg(long)]
        freq: Option<PathBuf>,
        /// Dictionary size; defaults to 65% of documents with both vectors.
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Map embeddings through a projection.
    Translate {
        #[arg(long)]
        projection: PathBuf,
        #[arg(long)]
        embeddings: PathBuf,
        #[arg(long, value_enum)]
        direction: Direction,
        #[arg(long)]
        out: PathBuf,
    },
    /// Leave-one-out recovery of hidden links.
    EvalLinks {
        #[command(flatten)]
        eval: EvalArgs,
        /// Content embeddings of the full corpus; trained here when absent.
        #[arg(long)]
        content_emb: Option<PathBuf>,
        /// Precision cut-offs.
        #[arg(long, value_delimiter = ',', default_values_t = vec![5usize, 10, 20, 50])]
        n_values: Vec<usize>,
    },
    /// Leave-one-out recovery of similar documents for hidden content.
    EvalContent {
        #[command(flatten)]
        eval: EvalArgs,
        /// Node embeddings of the full network; trained here when absent.
        #[arg(long, requires = "freq")]
        node_emb: Option<PathBuf>,
        /// Frequency table for `--node-emb`.
        #[arg(long)]
        freq: Option<PathBuf>,
        /// Cosine above which documents count as similar.
        #[arg(long, default_value_t = DEFAULT_THRESHOLD, allow_negative_numbers = true)]
        threshold: f64,
    },
}

#[derive(Args, Clone)]
struct WalkArgs {
    /// Walks started from every node [default: 80, eval: 10].
    #[arg(long)]
    walks_per_node: Option<usize>,
    /// Nodes per walk [default: 80, eval: 40].
    #[arg(long)]
    walk_length: Option<usize>,
}

#[derive(Args, Clone)]
struct TrainArgs {
    /// Embedding dimension [default: 500, eval: 64].
    #[arg(long)]
    dim: Option<usize>,
    /// Maximum context window [default: 10, eval: 5].
    #[arg(long)]
    window: Option<usize>,
    /// Negative samples per positive pair.
    #[arg(long, default_value_t = 5)]
    negatives: usize,
    /// Passes over the data [default: 5, eval: 3].
    #[arg(long)]
    epochs: Option<usize>,
    /// Initial learning rate, decayed linearly.
    #[arg(long, default_value_t = 0.025)]
    lr: f64,
    /// Words rarer than this are dropped from content.
    #[arg(long, default_value_t = 2)]
    min_count: u64,
}

#[derive(Args, Clone)]
struct EvalArgs {
    #[arg(long)]
    edges: PathBuf,
    /// Content file, `id<TAB>text` per line.
    #[arg(long)]
    content: PathBuf,
    /// Documents to leave out: a count or `all`.
    #[arg(long, default_value = "100", value_parser = parse_sample)]
    sample: SampleSize,
    /// Dictionary size; defaults to 65% of documents with both vectors.
    #[arg(long)]
    m: Option<usize>,
    /// Human-readable report.
    #[arg(long)]
    report: PathBuf,
    /// Per-document `id<TAB>method<TAB>metric<TAB>value` lines.
    #[arg(long)]
    flat: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = ContentVariant::DvDm)]
    variant: ContentVariant,
    /// Passes over the text when training content vectors. Paragraph
    /// vectors need more passes than node vectors before documents separate.
    #[arg(long, default_value_t = 20)]
    content_epochs: usize,
    #[command(flatten)]
    walk: WalkArgs,
    #[command(flatten)]
    train: TrainArgs,
}

#[derive(ValueEnum, Clone, Copy)]
enum ContentVariant {
    DvDm,
    DvDbow,
}

impl From<ContentVariant> for Variant {
    fn from(v: ContentVariant) -> Self {
        match v {
            ContentVariant::DvDm => Variant::DvDm,
            ContentVariant::DvDbow => Variant::DvDbow,
        }
    }
}

#[derive(ValueEnum, Clone, Copy)]
enum Direction {
    ContentToNode,
    NodeToContent,
}

fn parse_sample(s: &str) -> std::result::Result<SampleSize, String> {
    if s.eq_ignore_ascii_case("all") {
        return Ok(SampleSize::All);
    }
    s.parse().map(SampleSize::Count).map_err(|_| format!("expected a count or `all`, got {s:?}"))
}

fn sample_name(s: SampleSize) -> String {
    match s {
        SampleSize::All => "all".into(),
        SampleSize::Count(n) => n.to_string(),
    }
}

/// Full-scale defaults for standalone stages, reduced ones for the
/// leave-one-out loops, which retrain once per document.
#[derive(Clone, Copy)]
enum Scale {
    Full,
    Desk,
}

impl WalkArgs {
    fn resolve(&self, scale: Scale, seed: u64) -> WalkConfig {
        let (walks, length) = match scale {
            Scale::Full => (80, 80),
            Scale::Desk => (10, 40),
        };
        WalkConfig {
            walks_per_node: self.walks_per_node.unwrap_or(walks),
            walk_length: self.walk_length.unwrap_or(length),
            seed,
        }
    }
}

impl TrainArgs {
    fn resolve(&self, scale: Scale, variant: Variant, seed: u64) -> TrainConfig {
        let (dim, window, epochs) = match scale {
            Scale::Full => (500, 10, 5),
            Scale::Desk => (64, 5, 3),
        };
        TrainConfig {
            dim: self.dim.unwrap_or(dim),
            window: self.window.unwrap_or(window),
            negatives: self.negatives,
            epochs: self.epochs.unwrap_or(epochs),
            initial_lr: self.lr,
            min_count: self.min_count,
            seed,
            variant,
        }
    }
}

fn record_walks(r: &mut RunRecord, cfg: &WalkConfig) {
    r.set("walks_per_node", cfg.walks_per_node).set("walk_length", cfg.walk_length).set("walk_seed", cfg.seed);
}

fn record_train(r: &mut RunRecord, prefix: &str, cfg: &TrainConfig) {
    let key = |k: &str| format!("{prefix}{k}");
    r.set(&key("variant"), cfg.variant.name())
        .set(&key("dim"), cfg.dim)
        .set(&key("window"), cfg.window)
        .set(&key("negatives"), cfg.negatives)
        .set(&key("epochs"), cfg.epochs)
        .set(&key("lr"), cfg.initial_lr)
        .set(&key("min_count"), cfg.min_count)
        .set(&key("seed"), cfg.seed);
}

fn path_str(p: &Path) -> String {
    p.display().to_string()
}

fn save_embeddings(path: &Path, emb: &EmbeddingMatrix) -> Result<()> {
    write_path(path, |w| formats::write_embeddings(emb, w))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn log_losses(losses: &[f64]) {
    for (e, l) in losses.iter().enumerate() {
        log::info!("epoch {}: mean loss {l:.6}", e + 1);
    }
}

/// Frequencies listing each node once, so ranking falls back to file order.
fn uniform_frequencies(nodes: &EmbeddingMatrix) -> FrequencyTable {
    FrequencyTable { entries: nodes.ids().iter().map(|id| (id.clone(), 1)).collect() }
}

fn run(cli: Cli) -> Result<()> {
    let seed = cli.seed;
    let workers = cli.workers as usize;
    match cli.command {
        Command::Stats { edges, content } => {
            let (net, ingest) = formats::load_network(&edges, content.as_deref())?;
            print!("{}", report::stats_table(&net.stats(), &ingest));
        }

        Command::Walks { edges, out, freq, walk } => {
            let (net, _) = formats::load_edge_list(&edges)?;
            let cfg = walk.resolve(Scale::Full, seed);
            let corpus = parallel::generate_walks(&net, &cfg, workers)?;
            write_path(&out, |w| formats::write_walks(&corpus, w))?;
            write_path(&freq, |w| formats::write_frequencies(&corpus.frequency_table(), w))?;
            let mut r = RunRecord::new("walks");
            r.set("edges", path_str(&edges)).set("out", path_str(&out)).set("freq", path_str(&freq));
            record_walks(&mut r, &cfg);
            r.write_sidecar(&out)?;
        }

        Command::TrainNodes { walks, edges, out, walk, train } => {
            let mut r = RunRecord::new("train-nodes");
            let corpus: WalkCorpus = match (walks, edges) {
                (Some(path), _) => {
                    r.set("walks", path_str(&path));
                    formats::load_walks(&path)?
                }
                (None, Some(path)) => {
                    let (net, _) = formats::load_edge_list(&path)?;
                    let cfg = walk.resolve(Scale::Full, seed);
                    r.set("edges", path_str(&path));
                    record_walks(&mut r, &cfg);
                    parallel::generate_walks(&net, &cfg, workers)?
                }
                (None, None) => unreachable!("clap requires one input"),
            };
            let cfg = train.resolve(Scale::Full, Variant::NodeSgns, seed);
            let trained = parallel::train_nodes(&corpus, &cfg, workers)?;
            log_losses(&trained.epoch_losses);
            save_embeddings(&out, &trained.embeddings)?;
            record_train(&mut r, "", &cfg);
            r.set("workers", workers).set("out", path_str(&out));
            r.write_sidecar(&out)?;
        }

        Command::TrainDocs { content, out, train, variant } => {
            let docs = formats::load_content(&content)?;
            let cfg = train.resolve(Scale::Full, variant.into(), seed);
            let trained =
                parallel::train_content(docs.iter().map(|(id, t)| (id.as_str(), t.as_slice())), &cfg, workers)?;
            log_losses(&trained.epoch_losses);
            save_embeddings(&out, &trained.embeddings)?;
            let mut r = RunRecord::new("train-docs");
            r.set("content", path_str(&content)).set("workers", workers).set("out", path_str(&out));
            record_train(&mut r, "", &cfg);
            r.write_sidecar(&out)?;
        }

        Command::Align { nodes, content, freq, m, out } => {
            let a = formats::load_embeddings(&nodes)?;
            let b = formats::load_embeddings(&content)?;
            if a.dim() != b.dim() {
                return Err(CoreError::DimensionMismatch { expected: a.dim(), found: b.dim() }.into());
            }
            let table = match &freq {
                Some(path) => formats::load_frequencies(path)?,
                None => uniform_frequencies(&a),
            };
            let m = m.unwrap_or_else(|| default_dictionary_size(rank_aligned_ids(&table, &a, &b).len()));
            let dict = build_dictionary(&table, &a, &b, m)?;
            let w = learn_projection(&a, &b, &dict)?;
            write_path(&out, |f| formats::write_projection(&w, f))?;
            println!("dictionary size: {}", dict.m());
            println!("orthogonality residual: {:e}", w.orthogonality_residual());
            let mut r = RunRecord::new("align");
            r.set("nodes", path_str(&nodes)).set("content", path_str(&content)).set("m", dict.m()).set("out", path_str(&out));
            r.set("freq", freq.as_deref().map(path_str).unwrap_or_else(|| "(node file order)".into()));
            r.write_sidecar(&out)?;
        }

        Command::Translate { projection, embeddings, direction, out } => {
            let w = formats::load_projection(&projection)?;
            let e = formats::load_embeddings(&embeddings)?;
            let mapped = match direction {
                Direction::ContentToNode => e.map_rows(w.dim(), |v| w.content_to_node(v))?,
                Direction::NodeToContent => e.map_rows(w.dim(), |v| w.node_to_content(v))?,
            };
            save_embeddings(&out, &mapped)?;
            let mut r = RunRecord::new("translate");
            r.set("projection", path_str(&projection)).set("embeddings", path_str(&embeddings)).set("out", path_str(&out));
            r.set("direction", match direction {
                Direction::ContentToNode => "content-to-node",
                Direction::NodeToContent => "node-to-content",
            });
            r.write_sidecar(&out)?;
        }

        Command::EvalLinks { eval, content_emb, n_values } => {
            let (net, _) = formats::load_network(&eval.edges, Some(&eval.content))?;
            let walk_cfg = eval.walk.resolve(Scale::Desk, seed);
            let node_cfg = eval.train.resolve(Scale::Desk, Variant::NodeSgns, seed);
            let content_cfg = eval.content_config(seed);
            let mut r = RunRecord::new("eval-links");
            let content = match &content_emb {
                Some(path) => {
                    r.set("content_emb", path_str(path));
                    formats::load_embeddings(path)?
                }
                None => {
                    record_train(&mut r, "content_", &content_cfg);
                    parallel::train_content(net.documents(), &content_cfg, workers)?.embeddings
                }
            };
            if n_values.iter().any(|&n| n >= RANDOM_POOL) {
                log::warn!("P@n with n >= {RANDOM_POOL} exceeds the random200 candidates; it scores the available prefix");
            }
            let setup = ProtocolSetup {
                walks: walk_cfg,
                train: node_cfg,
                dictionary_size: eval.m,
                protocol: ProtocolConfig { sample_size: eval.sample, threshold: DEFAULT_THRESHOLD, n_values, seed },
            };
            let result = parallel::run_link_protocol(&net, &content, &setup, workers)?;
            record_eval(&mut r, &eval, &setup, workers);
            record_train(&mut r, "node_", &node_cfg);
            r.set("n_values", setup.protocol.n_values.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(","));
            write_text(&eval.report, &report::link_table(&result, &r))?;
            if let Some(flat) = &eval.flat {
                write_text(flat, &report::link_flat(&result, &r))?;
            }
            print!("{}", report::link_summary(&result));
        }

        Command::EvalContent { eval, node_emb, freq, threshold } => {
            let (net, _) = formats::load_network(&eval.edges, Some(&eval.content))?;
            let walk_cfg = eval.walk.resolve(Scale::Desk, seed);
            let node_cfg = eval.train.resolve(Scale::Desk, Variant::NodeSgns, seed);
            let content_cfg = eval.content_config(seed);
            let mut r = RunRecord::new("eval-content");
            let (nodes, frequencies) = match (&node_emb, &freq) {
                (Some(path), Some(freq)) => {
                    r.set("node_emb", path_str(path)).set("freq", path_str(freq));
                    (formats::load_embeddings(path)?, formats::load_frequencies(freq)?)
                }
                _ => {
                    record_train(&mut r, "node_", &node_cfg);
                    let corpus = parallel::generate_walks(&net, &walk_cfg, workers)?;
                    let nodes = parallel::train_nodes(&corpus, &node_cfg, workers)?.embeddings;
                    (nodes, corpus.frequency_table())
                }
            };
            let content = parallel::train_content(net.documents(), &content_cfg, workers)?.embeddings;
            let setup = ProtocolSetup {
                walks: walk_cfg,
                train: content_cfg,
                dictionary_size: eval.m,
                protocol: ProtocolConfig { sample_size: eval.sample, threshold, n_values: vec![1], seed },
            };
            let input = ContentProtocolInput { net: &net, nodes: &nodes, frequencies: &frequencies, content: &content };
            let result = parallel::run_content_protocol(&input, &setup, workers)?;
            record_eval(&mut r, &eval, &setup, workers);
            record_train(&mut r, "content_", &content_cfg);
            r.set("threshold", threshold);
            write_text(&eval.report, &report::content_table(&result, &r))?;
            if let Some(flat) = &eval.flat {
                write_text(flat, &report::content_flat(&result, &r))?;
            }
            print!("{}", report::content_summary(&result));
        }
    }
    Ok(())
}

impl EvalArgs {
    fn content_config(&self, seed: u64) -> TrainConfig {
        TrainConfig { epochs: self.content_epochs, ..self.train.resolve(Scale::Desk, self.variant.into(), seed) }
    }
}

fn record_eval(r: &mut RunRecord, eval: &EvalArgs, setup: &ProtocolSetup, workers: usize) {
    r.set("edges", path_str(&eval.edges))
        .set("content", path_str(&eval.content))
        .set("sample", sample_name(eval.sample))
        .set("m", eval.m.map(|m| m.to_string()).unwrap_or_else(|| "default (65%)".into()))
        .set("seed", setup.protocol.seed)
        .set("workers", workers);
    record_walks(r, &setup.walks);
}

fn main() -> std::process::ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => std::process::ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            std::process::ExitCode::from(e.exit_code() as u8)
        }
    }
}
