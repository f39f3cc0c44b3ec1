use std::collections::BTreeSet;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use vprdf_core::convert::{
    convert_graph, ConversionConfig, Thresholds, VpVocabulary, DEFAULT_LINK_NAME,
    DEFAULT_VOCAB_NAMESPACE,
};
use vprdf_core::model::{load_model, save_model, ModelError, ViewpointModel};
use vprdf_core::mvo::{MvoError, MvpOntology};
use vprdf_core::query::{
    consensual_filter_indexed, evaluate, viewpoint_filter_indexed, GoldError, GoldLabels,
    LinkIndex, RelevanceScore, Scope,
};
use vprdf_core::rdf::{normalize_label, parse_ntriples, Graph};
use vprdf_core::synth::{generate_synthetic, SynthParams};

#[derive(Parser, Debug)]
#[command(
    name = "vprdf",
    version,
    about = "Learn viewpoints from ontologies and convert RDF to VP-RDF"
)]
struct Cli {
    /// JSON file with default option values; command-line flags win.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Train a viewpoint model from ontology files.
    Train {
        #[arg(required = true, value_name = "ONTOLOGY")]
        ontologies: Vec<PathBuf>,
        #[arg(long, value_name = "MODEL")]
        out: PathBuf,
        #[command(flatten)]
        thresholds: ThresholdArgs,
    },
    /// Rewrite an N-Triples document into VP-RDF.
    Convert {
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        model: ModelArg,
        #[command(flatten)]
        vocab: VocabArgs,
        #[command(flatten)]
        thresholds: ThresholdArgs,
        /// Link resources through reified statements.
        #[arg(long)]
        reified: bool,
        /// Include the vocabulary's schema axioms in the output.
        #[arg(long)]
        emit_schema: bool,
    },
    /// Print the predicted viewpoints of each label.
    Predict {
        #[arg(required = true)]
        labels: Vec<String>,
        #[command(flatten)]
        model: ModelArg,
        #[command(flatten)]
        thresholds: ThresholdArgs,
        /// Treat the labels as predicates.
        #[arg(long)]
        predicate: bool,
    },
    /// Print the triples of a VP-RDF graph relevant to a viewpoint.
    Query {
        graph: PathBuf,
        #[arg(
            long,
            required_unless_present = "consensual",
            conflicts_with = "consensual"
        )]
        viewpoint: Option<String>,
        /// Triples linked to no viewpoint.
        #[arg(long)]
        consensual: bool,
        #[command(flatten)]
        vocab: VocabArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Score viewpoint queries against gold labels.
    Eval {
        graph: PathBuf,
        gold: PathBuf,
        /// Evaluate one viewpoint; by default every gold viewpoint and the
        /// consensual scope are scored.
        #[arg(long)]
        viewpoint: Option<String>,
        #[command(flatten)]
        vocab: VocabArgs,
        /// Also write the scores as JSON.
        #[arg(long, value_name = "FILE")]
        report: Option<PathBuf>,
    },
    /// Write a seeded synthetic corpus: ontologies, graph and gold labels.
    Synth {
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 3)]
        viewpoints: usize,
        #[arg(long, default_value_t = 20)]
        concepts: usize,
        #[arg(long, default_value_t = 50)]
        individuals: usize,
        #[arg(long, default_value_t = 2000)]
        triples: usize,
        #[arg(long, default_value_t = 0.0)]
        noise: f64,
        #[arg(long, default_value_t = 5)]
        ontologies: usize,
    },
}

#[derive(Args, Debug)]
struct ModelArg {
    /// Model file.
    #[arg(long, env = "VPRDF_MODEL")]
    model: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ThresholdArgs {
    #[arg(long)]
    theta: Option<f64>,
    #[arg(long)]
    min_support: Option<u32>,
}

#[derive(Args, Debug)]
struct VocabArgs {
    /// Namespace of the VP-RDF vocabulary.
    #[arg(long)]
    namespace: Option<String>,
    /// Local name of the link predicate.
    #[arg(long)]
    link_name: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    model: Option<PathBuf>,
    namespace: Option<String>,
    link_name: Option<String>,
    theta: Option<f64>,
    min_support: Option<u32>,
    #[serde(default)]
    reified: bool,
    #[serde(default)]
    emit_schema: bool,
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Invalid(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{0}")]
    Parse(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Invalid(_) => 2,
            CliError::Io { .. } | CliError::Parse(_) => 1,
        }
    }
}

type Result<T, E = CliError> = std::result::Result<T, E>;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let file = match &cli.config {
        Some(p) => serde_json::from_str::<FileConfig>(&read(p)?)
            .map_err(|e| CliError::Parse(format!("{}: {e}", p.display())))?,
        None => FileConfig::default(),
    };
    match cli.command {
        Command::Train {
            ontologies,
            out,
            thresholds,
        } => cmd_train(&ontologies, &out, &thresholds, &file),
        Command::Convert {
            input,
            out,
            model,
            vocab,
            thresholds,
            reified,
            emit_schema,
        } => {
            let cfg = ConversionConfig {
                vocabulary: vocabulary(&vocab, &file)?,
                emit_schema: emit_schema || file.emit_schema,
                reified: reified || file.reified,
                thresholds: thresholds_override(&thresholds, &file, None)?,
            };
            let model = open_model(&model, &file)?;
            cmd_convert(&input, &out, &model, &cfg)
        }
        Command::Predict {
            labels,
            model,
            thresholds,
            predicate,
        } => {
            let mut model = open_model(&model, &file)?;
            if let Some(t) = thresholds_override(&thresholds, &file, Some(&model))? {
                model = model
                    .with_thresholds(t.theta(), t.min_support())
                    .map_err(|e| CliError::Invalid(e.to_string()))?;
            }
            cmd_predict(&labels, &model, predicate)
        }
        Command::Query {
            graph,
            viewpoint,
            consensual,
            vocab,
            out,
        } => {
            let scope = match (viewpoint, consensual) {
                (_, true) => Scope::Consensual,
                (Some(v), false) => Scope::Viewpoint(v),
                (None, false) => {
                    return Err(CliError::Usage("give --viewpoint or --consensual".into()))
                }
            };
            cmd_query(&graph, &scope, &vocabulary(&vocab, &file)?, out.as_deref())
        }
        Command::Eval {
            graph,
            gold,
            viewpoint,
            vocab,
            report,
        } => cmd_eval(
            &graph,
            &gold,
            viewpoint.as_deref(),
            &vocabulary(&vocab, &file)?,
            report.as_deref(),
        ),
        Command::Synth {
            out_dir,
            seed,
            viewpoints,
            concepts,
            individuals,
            triples,
            noise,
            ontologies,
        } => cmd_synth(
            &out_dir,
            &SynthParams {
                seed,
                n_viewpoints: viewpoints,
                n_concepts: concepts,
                n_individuals: individuals,
                n_triples: triples,
                noise_rate: noise,
                n_ontologies: ontologies,
            },
        ),
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes through a temporary file in the target directory so that a
/// failed run never leaves a partial file behind.
fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let io_err = |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    };
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err)?;
    tmp.write_all(contents.as_bytes()).map_err(io_err)?;
    tmp.persist(path).map_err(|e| io_err(e.error))?;
    Ok(())
}

fn vocabulary(args: &VocabArgs, file: &FileConfig) -> Result<VpVocabulary> {
    let ns = args
        .namespace
        .as_deref()
        .or(file.namespace.as_deref())
        .unwrap_or(DEFAULT_VOCAB_NAMESPACE);
    let link = args
        .link_name
        .as_deref()
        .or(file.link_name.as_deref())
        .unwrap_or(DEFAULT_LINK_NAME);
    VpVocabulary::with_link_name(ns, link).map_err(|e| CliError::Invalid(e.to_string()))
}

/// Thresholds given by flag or config file. Unset halves are filled from
/// `base` when a model is at hand, else from the library defaults.
fn thresholds_override(
    args: &ThresholdArgs,
    file: &FileConfig,
    base: Option<&ViewpointModel>,
) -> Result<Option<Thresholds>> {
    let theta = args.theta.or(file.theta);
    let min_support = args.min_support.or(file.min_support);
    if theta.is_none() && min_support.is_none() {
        return Ok(None);
    }
    let theta = theta
        .or(base.map(|m| m.theta()))
        .unwrap_or(vprdf_core::model::DEFAULT_THETA);
    let min_support = min_support
        .or(base.map(|m| m.min_support()))
        .unwrap_or(vprdf_core::model::DEFAULT_MIN_SUPPORT);
    Thresholds::new(theta, min_support)
        .map(Some)
        .map_err(|e| CliError::Invalid(e.to_string()))
}

fn open_model(arg: &ModelArg, file: &FileConfig) -> Result<ViewpointModel> {
    let path =
        arg.model.as_ref().or(file.model.as_ref()).ok_or_else(|| {
            CliError::Usage("no model given; pass --model or set VPRDF_MODEL".into())
        })?;
    load_model(&read(path)?).map_err(|e| {
        let msg = format!("{}: {e}", path.display());
        match e {
            ModelError::Json(_) | ModelError::Malformed(_) => CliError::Parse(msg),
            _ => CliError::Invalid(msg),
        }
    })
}

fn cmd_train(paths: &[PathBuf], out: &Path, args: &ThresholdArgs, file: &FileConfig) -> Result<()> {
    let thresholds = thresholds_override(args, file, None)?;
    let mut seen = BTreeSet::new();
    let mut ontologies = Vec::new();
    for p in paths {
        if !seen.insert(p) {
            log::warn!(
                "{} is listed more than once and is counted each time",
                p.display()
            );
        }
        let onto = MvpOntology::from_json(&read(p)?).map_err(|e| {
            let msg = format!("{}: {e}", p.display());
            match e {
                MvoError::Parse(_) => CliError::Parse(msg),
                _ => CliError::Invalid(msg),
            }
        })?;
        ontologies.push(onto);
    }
    let (theta, min_support) = thresholds.map_or(
        (
            vprdf_core::model::DEFAULT_THETA,
            vprdf_core::model::DEFAULT_MIN_SUPPORT,
        ),
        |t| (t.theta(), t.min_support()),
    );
    let model = ViewpointModel::train(&ontologies, theta, min_support)
        .map_err(|e| CliError::Invalid(e.to_string()))?;
    write_atomic(out, &save_model(&model))?;

    let vps: Vec<&str> = model.viewpoints().into_iter().collect();
    println!("ontologies: {}", ontologies.len());
    println!("labels:     {}", model.labels().count());
    println!("viewpoints: {} ({})", vps.len(), vps.join(", "));
    println!("theta {theta}, min_support {min_support}");
    Ok(())
}

fn read_graph(path: &Path) -> Result<Graph> {
    parse_ntriples(&read(path)?).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

fn cmd_convert(
    input: &Path,
    out: &Path,
    model: &ViewpointModel,
    cfg: &ConversionConfig,
) -> Result<()> {
    let graph = read_graph(input)?;
    let (output, report) = convert_graph(&graph, model, cfg);
    write_atomic(out, &output.to_ntriples())?;
    println!("{report}");
    Ok(())
}

fn cmd_predict(labels: &[String], model: &ViewpointModel, predicate: bool) -> Result<()> {
    let stdout = io::stdout();
    let mut w = stdout.lock();
    for raw in labels {
        let label = normalize_label(raw);
        let preds = if predicate {
            model.predict_predicate(&label)
        } else {
            model.predict_term(&label)
        };
        let rendered = if preds.is_empty() {
            "(none)".to_string()
        } else {
            preds
                .iter()
                .map(|p| format!("{} {:.3}", p.viewpoint, p.confidence))
                .collect::<Vec<_>>()
                .join(", ")
        };
        writeln!(w, "{label}: {rendered}").map_err(stdout_err)?;
    }
    Ok(())
}

fn stdout_err(source: io::Error) -> CliError {
    CliError::Io {
        path: PathBuf::from("<stdout>"),
        source,
    }
}

fn cmd_query(graph: &Path, scope: &Scope, vocab: &VpVocabulary, out: Option<&Path>) -> Result<()> {
    let graph = read_graph(graph)?;
    let index = LinkIndex::from_graph(&graph, vocab);
    let result = match scope {
        Scope::Viewpoint(v) => viewpoint_filter_indexed(&graph, &index, v, vocab),
        Scope::Consensual => consensual_filter_indexed(&graph, &index, vocab),
    };
    let text = result.triples.to_ntriples();
    match out {
        Some(p) => write_atomic(p, &text),
        None => io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(stdout_err),
    }
}

#[derive(Serialize)]
struct EvalEntry {
    scope: String,
    #[serde(flatten)]
    score: RelevanceScore,
}

#[derive(Serialize)]
struct EvalReport {
    scores: Vec<EvalEntry>,
    pooled: Option<RelevanceScore>,
}

fn cmd_eval(
    graph: &Path,
    gold: &Path,
    viewpoint: Option<&str>,
    vocab: &VpVocabulary,
    report: Option<&Path>,
) -> Result<()> {
    let graph = read_graph(graph)?;
    let labels = GoldLabels::from_json(&read(gold)?).map_err(|e| {
        let msg = format!("{}: {e}", gold.display());
        match e {
            GoldError::Json(_) => CliError::Parse(msg),
            _ => CliError::Invalid(msg),
        }
    })?;
    labels
        .check_against(&graph, vocab)
        .map_err(|e| CliError::Invalid(format!("{}: {e}", gold.display())))?;

    let index = LinkIndex::from_graph(&graph, vocab);
    let scopes: Vec<Scope> = match viewpoint {
        Some(v) => vec![Scope::Viewpoint(normalize_label(v))],
        None => labels
            .viewpoints()
            .into_iter()
            .map(Scope::Viewpoint)
            .chain([Scope::Consensual])
            .collect(),
    };
    let mut entries = Vec::new();
    for scope in scopes {
        let result = match &scope {
            Scope::Viewpoint(v) => viewpoint_filter_indexed(&graph, &index, v, vocab),
            Scope::Consensual => consensual_filter_indexed(&graph, &index, vocab),
        };
        let name = match &scope {
            Scope::Viewpoint(v) => v.clone(),
            Scope::Consensual => "(consensual)".to_string(),
        };
        entries.push(EvalEntry {
            scope: name,
            score: evaluate(&result, &labels),
        });
    }
    let pooled =
        (entries.len() > 1).then(|| RelevanceScore::pooled(entries.iter().map(|e| &e.score)));

    let line = |name: &str, s: &RelevanceScore| {
        format!(
            "{name:<24} precision {:>5.1}%  recall {:>5.1}%  returned {:>6}  relevant {:>6}  hits {:>6}",
            s.precision * 100.0,
            s.recall * 100.0,
            s.returned_count,
            s.relevant_count,
            s.hit_count
        )
    };
    for e in &entries {
        println!("{}", line(&e.scope, &e.score));
    }
    if let Some(p) = &pooled {
        println!("{}", line("(pooled)", p));
    }
    if let Some(path) = report {
        let doc = EvalReport {
            scores: entries,
            pooled,
        };
        let mut text = serde_json::to_string_pretty(&doc).expect("report serializes");
        text.push('\n');
        write_atomic(path, &text)?;
    }
    Ok(())
}

fn cmd_synth(out_dir: &Path, params: &SynthParams) -> Result<()> {
    let corpus = generate_synthetic(params).map_err(|e| CliError::Invalid(e.to_string()))?;
    fs::create_dir_all(out_dir).map_err(|source| CliError::Io {
        path: out_dir.to_path_buf(),
        source,
    })?;
    for (i, onto) in corpus.ontologies.iter().enumerate() {
        write_atomic(
            &out_dir.join(format!("ontology_{i:02}.json")),
            &onto.to_json(),
        )?;
    }
    write_atomic(&out_dir.join("graph.nt"), &corpus.graph.to_ntriples())?;
    write_atomic(&out_dir.join("gold.json"), &corpus.gold.to_json())?;
    println!(
        "wrote {} ontologies, {} triples and gold labels to {}",
        corpus.ontologies.len(),
        corpus.graph.len(),
        out_dir.display()
    );
    Ok(())
}
