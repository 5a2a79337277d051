use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use irony_core::alignment::{
    mine_opposite_phrases, read_bitext, read_phrase_table, train_aligner, write_bitext, write_phrase_table,
    AlignerConfig, Bitext, Heuristic, OppositePhraseTable, SymmetricAligner, DEFAULT_MAX_PHRASE_LEN,
};
use irony_core::analysis::{
    agreement_histogram, cohen_kappa, evaluate, incongruity_crosstab, marker_crosstab, per_hearer_distribution,
    strategy_distribution_with, Denominator,
};
use irony_core::corpus::{load_pairs, load_parses, validate_corpus, Corpus, PairsFormat, ParseMap};
use irony_core::lexicons::LexiconBundle;
use irony_core::markers::{
    detect_corpus_markers, marker_prevalence, read_markers, write_markers, MarkerDetector, MarkerRules,
};
use irony_core::rq::{load_training_data, train_rq_classifier, Embeddings, RqConfig, RqModel};
use irony_core::strategies::{classify_corpus, read_labels, write_labels, CascadeConfig, Resources, StrategySet};
use irony_core::{Error, Result};
use serde::Serialize;

const ST_BITEXT: &str = "bitext.tsv";
const HH_BITEXT: &str = "hh_bitext.tsv";

#[derive(Debug, Parser)]
#[command(name = "irony", version, about = "Detect and analyse the strategies hearers use to interpret ironic messages")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a corpus and its parses and print a summary.
    Validate(ValidateArgs),
    /// Word alignment and opposite-phrase mining.
    #[command(subcommand)]
    Align(AlignCommand),
    /// Label every pair with the strategies its hearer used.
    Classify(ClassifyArgs),
    /// Train the rhetorical-question classifier.
    TrainRq(TrainRqArgs),
    /// Detect irony markers in the ironic messages.
    Markers(MarkersArgs),
    /// Distribution, cross-tabulation, per-hearer and agreement reports.
    Report(ReportArgs),
    /// Score predicted labels against gold strategies.
    Evaluate(EvaluateArgs),
    /// Cohen's kappa between two label columns.
    Kappa(KappaArgs),
}

#[derive(Debug, Args)]
struct CorpusArgs {
    /// Pairs file (TSV or JSONL).
    #[arg(long)]
    pairs: PathBuf,
    /// CoNLL-U parses keyed by utterance id.
    #[arg(long)]
    parses: Option<PathBuf>,
    /// Mark interpretations that copy the message as invalid.
    #[arg(long)]
    flag_copies: bool,
}

impl CorpusArgs {
    fn load(&self) -> Result<(Corpus, ParseMap)> {
        let mut corpus = load_pairs(&self.pairs, PairsFormat::from_path(&self.pairs))?;
        if self.flag_copies {
            let n = corpus.flag_copies();
            log::info!("flagged {n} copied interpretations");
        }
        let parses = match &self.parses {
            Some(p) => load_parses(p)?,
            None => ParseMap::new(),
        };
        Ok((corpus, parses))
    }
}

#[derive(Debug, Args)]
struct ValidateArgs {
    #[command(flatten)]
    corpus: CorpusArgs,
}

#[derive(Debug, Subcommand)]
enum AlignCommand {
    /// Train both alignment directions on the message/interpretation bitext.
    Train(AlignTrainArgs),
    /// Build and filter the opposite-phrase table with a trained model.
    MinePhrases(MineArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum HeuristicArg {
    Intersection,
    GrowDiagFinal,
}

impl From<HeuristicArg> for Heuristic {
    fn from(h: HeuristicArg) -> Self {
        match h {
            HeuristicArg::Intersection => Heuristic::Intersection,
            HeuristicArg::GrowDiagFinal => Heuristic::GrowDiagFinal,
        }
    }
}

#[derive(Debug, Args)]
struct AlignTrainArgs {
    /// Pairs file the bitexts are built from.
    #[arg(long)]
    bitext: PathBuf,
    #[arg(long)]
    parses: Option<PathBuf>,
    #[arg(long, default_value_t = 5)]
    iters_m1: usize,
    #[arg(long, default_value_t = 5)]
    iters_hmm: usize,
    #[arg(long, value_enum, default_value = "grow-diag-final")]
    heuristic: HeuristicArg,
    /// Model directory; also receives the two bitexts.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct MineArgs {
    #[arg(long)]
    model: PathBuf,
    /// Interpretation/interpretation bitext (defaults to the one stored with the model).
    #[arg(long)]
    hh_bitext: Option<PathBuf>,
    /// Message/interpretation bitext (defaults to the one stored with the model).
    #[arg(long)]
    bitext: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_MAX_PHRASE_LEN)]
    max_len: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct ClassifyArgs {
    #[command(flatten)]
    corpus: CorpusArgs,
    /// Aligner directory from `align train`.
    #[arg(long)]
    model: Option<PathBuf>,
    /// Opposite-phrase table.
    #[arg(long)]
    phrases: Option<PathBuf>,
    #[arg(long)]
    rq_model: Option<PathBuf>,
    #[arg(long)]
    embeddings: Option<PathBuf>,
    /// Lexicon configuration (TOML); the bundled lexicons otherwise.
    #[arg(long)]
    lexicons: Option<PathBuf>,
    #[arg(long, default_value_t = CascadeConfig::default().weaken_margin)]
    weaken_margin: f64,
    #[arg(long, default_value_t = CascadeConfig::default().desiderative_max_gap)]
    desiderative_max_gap: usize,
    /// Also classify pairs marked invalid.
    #[arg(long)]
    include_invalid: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct TrainRqArgs {
    /// `label<TAB>text` lines with label RQ or INFO.
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    embeddings: Option<PathBuf>,
    #[arg(long)]
    lexicons: Option<PathBuf>,
    #[arg(long, default_value_t = RqConfig::default().lambda)]
    lambda: f64,
    #[arg(long, default_value_t = RqConfig::default().learning_rate)]
    learning_rate: f64,
    #[arg(long, default_value_t = RqConfig::default().max_epochs)]
    max_epochs: usize,
    #[arg(long, default_value_t = RqConfig::default().seed)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct MarkersArgs {
    #[command(flatten)]
    corpus: CorpusArgs,
    /// Marker rule file (JSON); the bundled rules otherwise.
    #[arg(long)]
    rules: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum DenominatorArg {
    Instances,
    Pairs,
}

#[derive(Debug, Args)]
struct ReportArgs {
    #[arg(long)]
    labels: PathBuf,
    #[arg(long)]
    pairs: PathBuf,
    #[arg(long)]
    markers: Option<PathBuf>,
    #[arg(long, default_value = "dataset")]
    dataset: String,
    #[arg(long, default_value_t = 500)]
    min_shared: usize,
    #[arg(long, value_enum, default_value = "instances")]
    denominator: DenominatorArg,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct EvaluateArgs {
    #[arg(long)]
    predicted: PathBuf,
    /// Pairs file with gold strategies.
    #[arg(long)]
    gold: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct KappaArgs {
    /// First rater: a file with one label per line, or a column name with --table.
    #[arg(long)]
    a: String,
    #[arg(long)]
    b: String,
    /// TSV with a header row holding both columns.
    #[arg(long)]
    table: Option<PathBuf>,
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let text = serde_json::to_string_pretty(value)?;
    fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    File::create(path).map(BufWriter::new).map_err(|e| Error::io(path, e))
}

fn finish(mut w: BufWriter<File>, path: &Path) -> Result<()> {
    w.flush().map_err(|e| Error::io(path, e))
}

fn lexicons(path: Option<&Path>) -> Result<LexiconBundle> {
    match path {
        Some(p) => LexiconBundle::load(p),
        None => Ok(LexiconBundle::bundled()),
    }
}

fn embeddings(path: Option<&Path>) -> Result<Option<Embeddings>> {
    path.map(Embeddings::load).transpose()
}

fn validate(args: ValidateArgs) -> Result<()> {
    let (corpus, parses) = args.corpus.load()?;
    let report = validate_corpus(&corpus, &parses);
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(())
}

fn align_train(args: AlignTrainArgs) -> Result<()> {
    let corpus = CorpusArgs {
        pairs: args.bitext,
        parses: args.parses,
        flag_copies: true,
    };
    let (corpus, parses) = corpus.load()?;
    let st = Bitext::from_corpus(&corpus, &parses)?;
    let hh = Bitext::interpretations_from_corpus(&corpus, &parses)?;
    let config = AlignerConfig {
        model1_iterations: args.iters_m1,
        hmm_iterations: args.iters_hmm,
        heuristic: args.heuristic.into(),
        ..Default::default()
    };
    let (aligner, log) = train_aligner(&st, &config)?;
    aligner.save(&args.out, &log)?;
    write_bitext(&st, args.out.join(ST_BITEXT))?;
    write_bitext(&hh, args.out.join(HH_BITEXT))?;
    println!(
        "trained on {} sentence pairs; {} interpretation pairs stored for mining",
        st.len(),
        hh.len()
    );
    Ok(())
}

fn align_mine(args: MineArgs) -> Result<()> {
    let (aligner, log) = SymmetricAligner::load(&args.model)?;
    let st = read_bitext(args.bitext.unwrap_or_else(|| args.model.join(ST_BITEXT)))?;
    let hh_path = args.hh_bitext.unwrap_or_else(|| args.model.join(HH_BITEXT));
    let hh = if fs::metadata(&hh_path).map(|m| m.len() > 0).unwrap_or(false) {
        read_bitext(&hh_path)?
    } else {
        Bitext::default()
    };
    let config = AlignerConfig {
        max_phrase_len: args.max_len,
        ..log.config
    };
    let table = mine_opposite_phrases(&st, &aligner, &hh, &config)?;
    write_phrase_table(&table.table, &args.out)?;
    println!("{}", serde_json::to_string_pretty(&table.report)?);
    Ok(())
}

fn classify(args: ClassifyArgs) -> Result<()> {
    let (corpus, parses) = args.corpus.load()?;
    let lexicons = lexicons(args.lexicons.as_deref())?;
    let aligner = args.model.as_deref().map(SymmetricAligner::load).transpose()?.map(|(a, _)| a);
    let phrases = match &args.phrases {
        Some(p) => {
            let table = read_phrase_table(p)?;
            let mut out = OppositePhraseTable::default();
            for (e, f, _) in table.iter() {
                out.insert(e, f);
            }
            Some(out)
        }
        None => None,
    };
    let rq = args.rq_model.as_deref().map(RqModel::load).transpose()?;
    let embeddings = embeddings(args.embeddings.as_deref())?;
    let mut res = Resources::new(&lexicons, &parses);
    res.aligner = aligner.as_ref();
    res.opposite_phrases = phrases.as_ref();
    res.rq_model = rq.as_ref();
    res.embeddings = embeddings.as_ref();
    res.config = CascadeConfig {
        weaken_margin: args.weaken_margin,
        desiderative_max_gap: args.desiderative_max_gap,
    };
    let sets = classify_corpus(&corpus, &res, args.include_invalid);
    for s in &sets {
        s.check()?;
    }
    let mut w = create(&args.out)?;
    write_labels(&sets, &mut w)?;
    finish(w, &args.out)?;
    println!("labeled {} pairs", sets.len());
    Ok(())
}

fn train_rq(args: TrainRqArgs) -> Result<()> {
    let data = load_training_data(&args.data)?;
    let lexicons = lexicons(args.lexicons.as_deref())?;
    let embeddings = embeddings(args.embeddings.as_deref())?;
    let config = RqConfig {
        lambda: args.lambda,
        learning_rate: args.learning_rate,
        max_epochs: args.max_epochs,
        seed: args.seed,
        ..Default::default()
    };
    let model = train_rq_classifier(&data, &config, &lexicons.negation, embeddings.as_ref())?;
    model.save(&args.out)?;
    println!("{}", serde_json::to_string_pretty(&model.metadata)?);
    Ok(())
}

fn markers(args: MarkersArgs) -> Result<()> {
    let (corpus, parses) = args.corpus.load()?;
    let rules = match &args.rules {
        Some(p) => MarkerRules::load(p)?,
        None => MarkerRules::bundled(),
    };
    let detector = MarkerDetector::new(&rules)?;
    let sets = detect_corpus_markers(&detector, &corpus, &parses);
    let mut w = create(&args.out)?;
    write_markers(&sets, &mut w)?;
    finish(w, &args.out)?;
    println!("{}", serde_json::to_string_pretty(&marker_prevalence(&corpus, &sets))?);
    Ok(())
}

/// Label sets from a file, rejecting ones whose evidence and labels disagree.
fn read_checked_labels(path: &Path) -> Result<Vec<StrategySet>> {
    let sets = read_labels(path)?;
    for (k, set) in sets.iter().enumerate() {
        set.check()
            .map_err(|e| Error::malformed(&path.display().to_string(), k + 1, e.to_string()))?;
    }
    Ok(sets)
}

fn report(args: ReportArgs) -> Result<()> {
    let sets = read_checked_labels(&args.labels)?;
    let corpus = load_pairs(&args.pairs, PairsFormat::from_path(&args.pairs))?;
    let denominator = match args.denominator {
        DenominatorArg::Instances => Denominator::Instances,
        DenominatorArg::Pairs => Denominator::Pairs,
    };
    let dist = strategy_distribution_with(&sets, &args.dataset, denominator);
    let incongruity = incongruity_crosstab(&sets, &corpus);
    let markers = match &args.markers {
        Some(p) => read_markers(p)?,
        None => Default::default(),
    };
    let marker_tab = marker_crosstab(&sets, &corpus, &markers);
    let hearers = per_hearer_distribution(&sets, &corpus, args.min_shared);
    let agreement = agreement_histogram(&sets, &corpus);
    write_json(&args.out.join("distribution.json"), &dist)?;
    write_json(&args.out.join("crosstab_incongruity.json"), &incongruity)?;
    write_json(&args.out.join("crosstab_markers.json"), &marker_tab)?;
    write_json(&args.out.join("per_hearer.json"), &hearers)?;
    write_json(&args.out.join("agreement.json"), &agreement)?;
    if args.markers.is_some() {
        write_json(&args.out.join("marker_prevalence.json"), &marker_prevalence(&corpus, &markers))?;
    }
    println!("{dist}\n{incongruity}\n{marker_tab}\n{hearers}\n{agreement}");
    Ok(())
}

fn evaluate_cmd(args: EvaluateArgs) -> Result<()> {
    let predicted = read_checked_labels(&args.predicted)?;
    let gold = load_pairs(&args.gold, PairsFormat::from_path(&args.gold))?;
    let report = evaluate(&predicted, &gold)?;
    write_json(&args.out, &report)?;
    print!("{report}");
    Ok(())
}

fn read_column_file(path: &Path) -> Result<Vec<String>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(text.lines().map(str::trim).filter(|l| !l.is_empty()).map(String::from).collect())
}

fn read_table_columns(path: &Path, a: &str, b: &str) -> Result<(Vec<String>, Vec<String>)> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let origin = path.display().to_string();
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines.next().ok_or_else(|| Error::EmptyInput(format!("{origin} has no header")))?;
    let names: Vec<&str> = header.split('\t').map(str::trim).collect();
    let find = |c: &str| {
        names
            .iter()
            .position(|n| *n == c)
            .ok_or_else(|| Error::malformed(&origin, 1, format!("no column `{c}`")))
    };
    let (ka, kb) = (find(a)?, find(b)?);
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for (n, line) in lines {
        let fields: Vec<&str> = line.split('\t').map(str::trim).collect();
        let (Some(x), Some(y)) = (fields.get(ka), fields.get(kb)) else {
            return Err(Error::malformed(&origin, n + 1, "row is missing a rater column"));
        };
        xs.push(x.to_string());
        ys.push(y.to_string());
    }
    Ok((xs, ys))
}

fn kappa(args: KappaArgs) -> Result<()> {
    let (a, b) = match &args.table {
        Some(t) => read_table_columns(t, &args.a, &args.b)?,
        None => (read_column_file(Path::new(&args.a))?, read_column_file(Path::new(&args.b))?),
    };
    let k = cohen_kappa(&a, &b)?;
    eprintln!("{k}");
    println!("{}", serde_json::to_string_pretty(&k)?);
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Validate(a) => validate(a),
        Command::Align(AlignCommand::Train(a)) => align_train(a),
        Command::Align(AlignCommand::MinePhrases(a)) => align_mine(a),
        Command::Classify(a) => classify(a),
        Command::TrainRq(a) => train_rq(a),
        Command::Markers(a) => markers(a),
        Command::Report(a) => report(a),
        Command::Evaluate(a) => evaluate_cmd(a),
        Command::Kappa(a) => kappa(a),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
