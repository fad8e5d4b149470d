//! The `getgoing` command line.
//!
//! Exit codes: 0 success, 1 usage error, 2 data or validation error.

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use getgoing_core::assets;
use getgoing_core::delivery::DeliveryMode;
use getgoing_core::directions::{
    plan_driving, plan_transit, resolve_location, steps_to_language, Itinerary, MapDataset,
};
use getgoing_core::nlu::{
    evaluate_tagger, expand_templates, export_asr_hints, format_clock, make_splits,
    parse_templates, parse_time, read_dataset, train_tagger_with, write_dataset, ExpandConfig,
    Sampling, SlotLexicon, SplitConfig, TaggerModel, Template, TimeSpec, TrainConfig,
    DEFAULT_NOISE_EXAMPLES, DEFAULT_SAMPLES_PER_TEMPLATE, DEFAULT_WORD_DROPOUT,
};
use getgoing_core::trip::MAX_ALTERNATIVES;
use thiserror::Error;
use tokio::net::TcpListener;
use tokio::sync::mpsc;

use crate::log::check_log_dir;
use crate::session::Shared;
use crate::stream::{run_session, wall_clock, Connection, Service};
use crate::wire::WireMessage;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
        }
    }
}

fn data(e: impl std::fmt::Display) -> CliError {
    CliError::Data(e.to_string())
}

fn with_path(path: &Path) -> impl Fn(io::Error) -> CliError + '_ {
    move |e| CliError::Data(format!("{}: {e}", path.display()))
}

#[derive(Debug, Parser)]
#[command(
    name = "getgoing",
    version,
    about = "Trip-planning dialog system for older riders"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the WebSocket and TCP session server.
    Serve(ServeArgs),
    /// Talk to the system from the terminal.
    Chat(ChatArgs),
    /// Generate a tagged training set from templates and a lexicon.
    GenData(GenDataArgs),
    /// Train the slot tagger.
    Train(TrainArgs),
    /// Run the unseen-slot and unseen-template experiments.
    EvalNlu(EvalArgs),
    /// Plan one trip and print the itinerary.
    Plan(PlanArgs),
    /// Write the speech-recognition hint phrases.
    ExportHints(HintArgs),
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long, default_value_t = 8080)]
    pub port: u16,
    /// Port for newline-delimited JSON over TCP; defaults to port + 1.
    #[arg(long)]
    pub tcp_port: Option<u16>,
    #[arg(long, default_value = "127.0.0.1")]
    pub host: String,
    /// Map dataset; defaults to the built-in Pittsburgh demo map.
    #[arg(long)]
    pub data: Option<PathBuf>,
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long, default_value = "logs")]
    pub logs: PathBuf,
    /// Start clock for every session, such as 10:00 or 17:30.
    #[arg(long)]
    pub clock: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Built chat client assets, served under /ui.
    #[arg(long, default_value = "webchat/dist")]
    pub ui: PathBuf,
    /// Send chunks without waiting out their pauses.
    #[arg(long)]
    pub no_pacing: bool,
}

#[derive(Debug, Args)]
pub struct ChatArgs {
    #[arg(long, value_parser = parse_mode)]
    pub mode: Option<DeliveryMode>,
    /// Server address for TCP mode; without it the dialog runs in this process.
    #[arg(long)]
    pub connect: Option<String>,
    /// Tagger model, for in-process chat.
    #[arg(long)]
    pub model: Option<PathBuf>,
    #[arg(long)]
    pub data: Option<PathBuf>,
    #[arg(long)]
    pub clock: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value = "terminal")]
    pub client_id: String,
    /// Where to write the session log, for in-process chat.
    #[arg(long)]
    pub logs: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenDataArgs {
    /// Templates file; defaults to the built-in grammar.
    #[arg(long)]
    pub templates: Option<PathBuf>,
    /// Lexicon JSON; defaults to the built-in lexicon.
    #[arg(long)]
    pub lexicon: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, conflicts_with = "samples")]
    pub exhaustive: bool,
    /// Value combinations per template.
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write only the training side of the evaluation split for this seed.
    #[arg(long)]
    pub train_split: bool,
    /// Slot-free utterances of made-up words to add.
    #[arg(long, default_value_t = DEFAULT_NOISE_EXAMPLES)]
    pub noise: usize,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 10)]
    pub epochs: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_WORD_DROPOUT)]
    pub dropout: f64,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Evaluate this model instead of training one on the split. It should
    /// come from `gen-data --train-split` with the same seed.
    #[arg(long)]
    pub model: Option<PathBuf>,
    #[arg(long)]
    pub templates: Option<PathBuf>,
    #[arg(long)]
    pub lexicon: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 10)]
    pub epochs: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PlanMode {
    Transit,
    Driving,
}

#[derive(Debug, Args)]
pub struct PlanArgs {
    #[arg(long)]
    pub from: String,
    #[arg(long)]
    pub to: String,
    /// Departure time such as "5 pm", "17:30" or "now".
    #[arg(long, default_value = "now")]
    pub time: String,
    #[arg(long, value_enum, default_value_t = PlanMode::Transit)]
    pub mode: PlanMode,
    #[arg(long)]
    pub data: Option<PathBuf>,
    #[arg(long, default_value_t = MAX_ALTERNATIVES)]
    pub alternatives: usize,
    /// Print the itineraries as JSON.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct HintArgs {
    #[arg(long)]
    pub lexicon: Option<PathBuf>,
    /// Map dataset supplying intersection names.
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_mode(s: &str) -> Result<DeliveryMode, String> {
    s.parse()
        .map_err(|_| format!("expected setd or sd, got {s:?}"))
}

/// A start clock: any fixed time of day the tagger understands.
pub fn parse_clock(s: &str) -> Result<u32, CliError> {
    match parse_time(s) {
        Ok(TimeSpec::ClockTime(m)) => Ok(u32::from(m)),
        _ => Err(CliError::Usage(format!(
            "--clock {s:?} is not a time of day such as 10:00"
        ))),
    }
}

fn load_map(path: Option<&Path>) -> Result<MapDataset, CliError> {
    match path {
        Some(p) => MapDataset::load(p).map_err(|e| CliError::Data(format!("{}: {e}", p.display()))),
        None => assets::demo_map().map_err(data),
    }
}

fn load_model(path: &Path) -> Result<TaggerModel, CliError> {
    let file = File::open(path).map_err(with_path(path))?;
    TaggerModel::load(BufReader::new(file))
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

fn load_templates(path: Option<&Path>) -> Result<Vec<Template>, CliError> {
    match path {
        Some(p) => parse_templates(&fs::read_to_string(p).map_err(with_path(p))?).map_err(data),
        None => assets::templates().map_err(data),
    }
}

fn load_lexicon(path: Option<&Path>) -> Result<SlotLexicon, CliError> {
    let lexicon = match path {
        Some(p) => {
            SlotLexicon::from_json(&fs::read_to_string(p).map_err(with_path(p))?).map_err(data)?
        }
        None => assets::lexicon().map_err(data)?,
    };
    lexicon.validate().map_err(data)?;
    Ok(lexicon)
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    Ok(BufWriter::new(File::create(path).map_err(with_path(path))?))
}

fn runtime() -> Result<tokio::runtime::Runtime, CliError> {
    tokio::runtime::Runtime::new().map_err(data)
}

pub fn serve(args: ServeArgs) -> Result<(), CliError> {
    let clock = args.clock.as_deref().map(parse_clock).transpose()?;
    let shared = Shared::new(
        load_model(&args.model)?,
        assets::prompt_bank().map_err(data)?,
        load_map(args.data.as_deref())?,
    );
    check_log_dir(&args.logs).map_err(with_path(&args.logs))?;
    let mut service = Service::new(Arc::new(shared))
        .with_logs(args.logs.clone())
        .with_pacing(!args.no_pacing);
    if let Some(c) = clock {
        service = service.with_clock(c);
    }
    if let Some(s) = args.seed {
        service = service.with_seed(s);
    }
    let ui = args.ui.is_dir().then(|| args.ui.clone());
    if ui.is_none() {
        tracing::warn!(path = %args.ui.display(), "no chat client assets; /ui is not served");
    }
    let tcp_port = args.tcp_port.unwrap_or(args.port.wrapping_add(1));
    runtime()?.block_on(async move {
        let http = TcpListener::bind((args.host.as_str(), args.port))
            .await
            .map_err(data)?;
        let tcp = TcpListener::bind((args.host.as_str(), tcp_port))
            .await
            .map_err(data)?;
        tracing::info!(
            "listening: ws://{}/ws, tcp {}",
            http.local_addr().map_err(data)?,
            tcp.local_addr().map_err(data)?
        );
        crate::net::serve(Arc::new(service), http, Some(tcp), ui)
            .await
            .map_err(data)
    })
}

pub fn chat(args: ChatArgs) -> Result<(), CliError> {
    let clock = args.clock.as_deref().map(parse_clock).transpose()?;
    let start = WireMessage::Start {
        mode: args.mode,
        client_id: args.client_id.clone(),
        clock,
    };
    if let Some(addr) = &args.connect {
        return runtime()?.block_on(async {
            let conn = crate::chat::connect_tcp(addr).await.map_err(data)?;
            crate::chat::run(conn, start).await.map_err(data)
        });
    }
    let Some(model) = &args.model else {
        return Err(CliError::Usage(
            "chat needs --connect ADDR or --model FILE".into(),
        ));
    };
    let shared = Shared::new(
        load_model(model)?,
        assets::prompt_bank().map_err(data)?,
        load_map(args.data.as_deref())?,
    );
    let mut service = Service::new(Arc::new(shared));
    if let Some(dir) = &args.logs {
        check_log_dir(dir).map_err(with_path(dir))?;
        service = service.with_logs(dir.clone());
    }
    if let Some(s) = args.seed {
        service = service.with_seed(s);
    }
    let service = Arc::new(service);
    runtime()?.block_on(async move {
        let (tx, inbound) = mpsc::channel(64);
        let (out, rx) = mpsc::channel(64);
        let actor = tokio::spawn(run_session(service, inbound, out));
        let outcome = crate::chat::run(Connection { tx, rx }, start).await;
        // The actor writes the log once the connection is gone.
        actor.await.map_err(data)?;
        outcome.map_err(data)
    })
}

pub fn gen_data(args: GenDataArgs) -> Result<(), CliError> {
    let templates = load_templates(args.templates.as_deref())?;
    let lexicon = load_lexicon(args.lexicon.as_deref())?;
    let examples = if args.train_split {
        let mut config = SplitConfig::with_seed(args.seed);
        if let Some(n) = args.samples {
            config.samples_per_template = n;
        }
        config.noise = args.noise;
        make_splits(&templates, &lexicon, config)
            .map_err(data)?
            .train
    } else {
        let sampling = match (args.exhaustive, args.samples) {
            (true, _) => Sampling::Exhaustive,
            (false, n) => Sampling::PerTemplate(n.unwrap_or(DEFAULT_SAMPLES_PER_TEMPLATE)),
        };
        expand_templates(
            &templates,
            &lexicon,
            ExpandConfig {
                sampling,
                seed: args.seed,
                noise: args.noise,
            },
        )
        .map_err(data)?
    };
    let mut out = create(&args.out)?;
    write_dataset(&mut out, &examples).map_err(data)?;
    out.flush().map_err(with_path(&args.out))?;
    println!(
        "{} examples from {} templates -> {}",
        examples.len(),
        templates.len(),
        args.out.display()
    );
    Ok(())
}

pub fn train(args: TrainArgs) -> Result<(), CliError> {
    let file = File::open(&args.data).map_err(with_path(&args.data))?;
    let dataset = read_dataset(BufReader::new(file))
        .map_err(|e| CliError::Data(format!("{}: {e}", args.data.display())))?;
    let config = TrainConfig {
        epochs: args.epochs,
        seed: args.seed,
        word_dropout: args.dropout,
    };
    let model = train_tagger_with(&dataset, config).map_err(data)?;
    let mut out = create(&args.out)?;
    model.save(&mut out).map_err(data)?;
    out.flush().map_err(with_path(&args.out))?;
    println!(
        "trained on {} examples, {} epochs -> {}",
        dataset.len(),
        args.epochs,
        args.out.display()
    );
    Ok(())
}

pub fn eval_nlu(args: EvalArgs) -> Result<(), CliError> {
    let templates = load_templates(args.templates.as_deref())?;
    let lexicon = load_lexicon(args.lexicon.as_deref())?;
    let splits =
        make_splits(&templates, &lexicon, SplitConfig::with_seed(args.seed)).map_err(data)?;
    let model = match &args.model {
        Some(p) => load_model(p)?,
        None => train_tagger_with(&splits.train, TrainConfig::new(args.epochs, args.seed))
            .map_err(data)?,
    };
    println!(
        "seed {}: train {}, unseen slots {}, unseen templates {}",
        args.seed,
        splits.train.len(),
        splits.unseen_slots.len(),
        splits.unseen_templates.len()
    );
    for (name, set) in [
        ("unseen slots", &splits.unseen_slots),
        ("unseen templates", &splits.unseen_templates),
    ] {
        let s = evaluate_tagger(&model, set).map_err(data)?;
        println!(
            "{name}: token accuracy {:.4}, slot F1 {:.4}",
            s.token_accuracy, s.slot_f1
        );
    }
    Ok(())
}

fn describe(i: usize, it: &Itinerary) -> String {
    let mut out = format!(
        "route {}: leave {}, arrive {}, {} minutes",
        i + 1,
        format_clock(it.depart()),
        format_clock(it.arrive()),
        it.total_minutes
    );
    let buses = it.line_sequence();
    if !buses.is_empty() {
        out.push_str(&format!(", buses {}", buses.join(" then ")));
    }
    for (n, step) in steps_to_language(it).iter().enumerate() {
        out.push_str(&format!("\n  {}. {}", n + 1, step.text));
    }
    out
}

pub fn plan(args: PlanArgs) -> Result<(), CliError> {
    let map = load_map(args.data.as_deref())?;
    let time = match parse_time(&args.time) {
        Ok(t) => t.resolve(wall_clock()),
        Err(_) => {
            return Err(CliError::Usage(format!(
                "--time {:?} is not a time",
                args.time
            )))
        }
    };
    let from = resolve_location(&map, &args.from).map_err(data)?.place;
    let to = resolve_location(&map, &args.to).map_err(data)?.place;
    let routes = match args.mode {
        PlanMode::Transit => plan_transit(&map, from, to, time, args.alternatives.max(1)),
        PlanMode::Driving => vec![plan_driving(&map, from, to, time).map_err(data)?],
    };
    if routes.is_empty() {
        return Err(CliError::Data(format!(
            "no route from {} to {} after {}",
            from.canonical_name,
            to.canonical_name,
            format_clock(time)
        )));
    }
    if args.json {
        println!("{}", serde_json::to_string_pretty(&routes).map_err(data)?);
    } else {
        println!("{} to {}", from.canonical_name, to.canonical_name);
        for (i, it) in routes.iter().enumerate() {
            println!("{}", describe(i, it));
        }
    }
    Ok(())
}

pub fn export_hints(args: HintArgs) -> Result<(), CliError> {
    let lexicon = load_lexicon(args.lexicon.as_deref())?;
    let map = load_map(args.data.as_deref())?;
    let hints = export_asr_hints(&lexicon, &map.intersection_names());
    let text: String = hints.iter().map(|h| format!("{h}\n")).collect();
    match &args.out {
        Some(p) => fs::write(p, text).map_err(with_path(p))?,
        None => print!("{text}"),
    }
    Ok(())
}

pub fn execute(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Serve(a) => serve(a),
        Command::Chat(a) => chat(a),
        Command::GenData(a) => gen_data(a),
        Command::Train(a) => train(a),
        Command::EvalNlu(a) => eval_nlu(a),
        Command::Plan(a) => plan(a),
        Command::ExportHints(a) => export_hints(a),
    }
}

/// Parse arguments, run, and map the outcome to an exit code.
pub fn main<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let _ = tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "info".into()),
        )
        .with_writer(io::stderr)
        .try_init();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
