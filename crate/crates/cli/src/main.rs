use std::fs;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use spandep::bench;
use spandep::conllu::unlabeled;
use spandep::scorefile::read_scores;
use spandep::trainer::TrainConfig;
use spandep::{
    count_trees, decode, evaluate, parse, read_conllu, train, tree_score, write_conllu, Algorithm,
    Component, ConlluDocument, LabeledTree, LinearModel, Oracle, PunctPolicy, RootMode, ScoreSet,
    Sentence,
};

const DEFAULT_SEED: u64 = 20220501;

#[derive(Parser)]
#[command(name = "spandep", version, about = "Projective dependency decoding with headed-span scores")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a CoNLL-U file with a trained model or external scores.
    Decode(DecodeArgs),
    /// Train a linear model with the max-margin objective.
    Train(TrainArgs),
    /// Attachment scores of a prediction file against gold.
    Eval(EvalArgs),
    /// Compare every decoder against exhaustive search on random scores.
    OracleCheck(OracleArgs),
    /// Time decoders and fit the growth exponent.
    Bench(BenchArgs),
    /// Count projective trees through the decoder charts.
    Count(CountArgs),
}

#[derive(Args)]
struct DecodeArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, conflicts_with = "scores", required_unless_present = "scores")]
    model: Option<PathBuf>,
    /// JSON-lines score file, one record per sentence.
    #[arg(long)]
    scores: Option<PathBuf>,
    /// Defaults to the model's algorithm; required with --scores.
    #[arg(long)]
    algorithm: Option<Algorithm>,
    #[arg(long)]
    output: PathBuf,
    #[arg(long, default_value = "single")]
    root_mode: RootMode,
    /// Write each sentence's maximal score here, one per line.
    #[arg(long)]
    score_log: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long)]
    train: PathBuf,
    #[arg(long)]
    dev: Option<PathBuf>,
    #[arg(long, default_value = "eisner2o-headsplit")]
    algorithm: Algorithm,
    #[arg(long, default_value_t = 10)]
    epochs: usize,
    #[arg(long, default_value_t = 1.0)]
    lr: f64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long)]
    model_out: PathBuf,
    #[arg(long)]
    no_shuffle: bool,
    /// Evaluate on the dev set every this many epochs.
    #[arg(long, default_value_t = 1)]
    eval_every: usize,
    /// Cost of a mismatched sibling pair (second-order model only).
    #[arg(long)]
    sibling_cost: Option<f64>,
    #[arg(long, default_value = "single")]
    root_mode: RootMode,
    #[arg(long, value_enum, default_value_t = Punct::ScoreAll)]
    punct: Punct,
}

#[derive(Clone, Copy, ValueEnum)]
enum Punct {
    ScoreAll,
    ExcludePunct,
}

impl From<Punct> for PunctPolicy {
    fn from(p: Punct) -> Self {
        match p {
            Punct::ScoreAll => PunctPolicy::ScoreAll,
            Punct::ExcludePunct => PunctPolicy::ExcludePunct,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportFormat {
    Text,
    Kv,
    Both,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    gold: PathBuf,
    #[arg(long)]
    pred: PathBuf,
    #[arg(long, value_enum, default_value_t = Punct::ScoreAll)]
    punct: Punct,
    #[arg(long, value_enum, default_value_t = ReportFormat::Both)]
    format: ReportFormat,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long, default_value_t = 7)]
    n_max: usize,
    #[arg(long, default_value_t = 20)]
    trials: usize,
    /// A single algorithm; all four when omitted.
    #[arg(long)]
    algorithm: Option<Algorithm>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, default_value = "single")]
    root_mode: RootMode,
    /// Only print failures and the summary.
    #[arg(long)]
    quiet: bool,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    algorithm: Algorithm,
    #[arg(long, value_delimiter = ',', default_value = "20,40,80,160")]
    lengths: Vec<usize>,
    #[arg(long, default_value_t = 3)]
    repeats: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
}

#[derive(Args)]
struct CountArgs {
    #[arg(long)]
    algorithm: Option<Algorithm>,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value = "single")]
    root_mode: RootMode,
}

/// A failed check, as opposed to a usage or I/O error.
#[derive(Debug)]
struct CheckFailed(String);

impl std::fmt::Display for CheckFailed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for CheckFailed {}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Decode(a) => cmd_decode(a),
        Command::Train(a) => cmd_train(a),
        Command::Eval(a) => cmd_eval(a),
        Command::OracleCheck(a) => cmd_oracle_check(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Count(a) => cmd_count(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if e.is::<CheckFailed>() => {
            eprintln!("spandep: {e}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("spandep: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn read_doc(path: &Path) -> Result<ConlluDocument> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    read_conllu(&text).with_context(|| format!("parsing {}", path.display()))
}

fn read_model(path: &Path) -> Result<LinearModel> {
    let f = fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
    LinearModel::read(BufReader::new(f)).with_context(|| format!("loading {}", path.display()))
}

fn cmd_decode(a: DecodeArgs) -> Result<()> {
    let doc = read_doc(&a.input)?;
    let sentences: Vec<&Sentence> = doc.sentences.iter().map(|s| &s.sentence).collect();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(a.jobs.max(1)).build()?;
    let start = Instant::now();

    let results: Vec<(LabeledTree, f64)> = if let Some(path) = &a.model {
        let model = read_model(path)?;
        if let Some(alg) = a.algorithm {
            if alg != model.algorithm {
                bail!("model was trained for {}, not {alg}", model.algorithm);
            }
        }
        pool.install(|| {
            sentences
                .par_iter()
                .map(|x| parse(x, &model, a.root_mode))
                .collect::<spandep::Result<Vec<_>>>()
        })?
    } else {
        let path = a.scores.as_ref().expect("clap enforces a score source");
        let alg = a.algorithm.context("--algorithm is required with --scores")?;
        let f = fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
        let scores = read_scores(BufReader::new(f)).with_context(|| format!("loading {}", path.display()))?;
        if scores.len() != sentences.len() {
            bail!("{} score records for {} sentences", scores.len(), sentences.len());
        }
        for (i, (s, x)) in scores.iter().zip(&sentences).enumerate() {
            if s.n() != x.len() {
                bail!("score record {} has n = {}, sentence has {} words", i + 1, s.n(), x.len());
            }
        }
        pool.install(|| {
            scores
                .par_iter()
                .map(|s| decode(alg, s, a.root_mode).map(|r| (unlabeled(r.tree), r.score)))
                .collect::<spandep::Result<Vec<_>>>()
        })?
    };
    let elapsed = start.elapsed().as_secs_f64();

    let (trees, maxima): (Vec<LabeledTree>, Vec<f64>) = results.into_iter().unzip();
    let out = write_conllu(&doc, Some(&trees))?;
    fs::write(&a.output, out).with_context(|| format!("writing {}", a.output.display()))?;
    if let Some(path) = &a.score_log {
        let mut w = BufWriter::new(fs::File::create(path)?);
        for v in &maxima {
            writeln!(w, "{v:.17e}")?;
        }
        w.flush()?;
    }
    eprintln!(
        "decoded {} sentences in {:.3}s ({:.1} sentences/sec)",
        trees.len(),
        elapsed,
        trees.len() as f64 / elapsed.max(1e-9)
    );
    Ok(())
}

fn cmd_train(a: TrainArgs) -> Result<()> {
    let train_doc = read_doc(&a.train)?;
    let dev_doc = a.dev.as_deref().map(read_doc).transpose()?;
    let corpus: Vec<Sentence> = train_doc.sentences.into_iter().map(|s| s.sentence).collect();
    let dev: Option<Vec<Sentence>> = dev_doc.map(|d| d.sentences.into_iter().map(|s| s.sentence).collect());

    let mut cfg = TrainConfig::new(a.algorithm);
    cfg.epochs = a.epochs;
    cfg.learning_rate = a.lr;
    cfg.seed = a.seed;
    cfg.shuffle = !a.no_shuffle;
    cfg.eval_every = a.eval_every;
    cfg.root_mode = a.root_mode;
    cfg.punct = a.punct.into();
    if let Some(c) = a.sibling_cost {
        cfg.cost.sibling = c;
    }
    let out = train(&corpus, dev.as_deref(), &cfg, |s| println!("{}", s.log_line()))?;
    if out.skipped > 0 {
        eprintln!("skipped {} sentences without a projective gold tree", out.skipped);
    }
    println!("best_epoch={}", out.best_epoch);
    let f = fs::File::create(&a.model_out).with_context(|| format!("creating {}", a.model_out.display()))?;
    let mut w = BufWriter::new(f);
    out.model.write(&mut w)?;
    w.flush()?;
    Ok(())
}

fn cmd_eval(a: EvalArgs) -> Result<()> {
    let gold = read_doc(&a.gold)?;
    let pred = read_doc(&a.pred)?;
    let r = evaluate(&gold, &pred, a.punct.into())?;
    let stdout = io::stdout();
    let mut out = stdout.lock();
    if matches!(a.format, ReportFormat::Text | ReportFormat::Both) {
        writeln!(out, "{r}")?;
    }
    if matches!(a.format, ReportFormat::Both) {
        writeln!(out)?;
    }
    if matches!(a.format, ReportFormat::Kv | ReportFormat::Both) {
        write!(out, "{}", r.key_values())?;
    }
    Ok(())
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
}

fn cmd_oracle_check(a: OracleArgs) -> Result<()> {
    if !(1..=spandep::oracle::MAX_ENUMERATION_N).contains(&a.n_max) {
        bail!("--n-max must lie in 1..={}", spandep::oracle::MAX_ENUMERATION_N);
    }
    let algorithms: Vec<Algorithm> = match a.algorithm {
        Some(alg) => vec![alg],
        None => Algorithm::ALL.to_vec(),
    };
    let all = [Component::Sib, Component::Span, Component::Left, Component::Right];
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let (mut checks, mut failures) = (0usize, 0usize);
    for n in 1..=a.n_max {
        let oracle = Oracle::new(n, a.root_mode)?;
        for &alg in &algorithms {
            let count = count_trees(alg, n, a.root_mode)?;
            let ok = count == oracle.len() as u128;
            checks += 1;
            if !ok {
                failures += 1;
            }
            if !ok || !a.quiet {
                println!(
                    "count n={n} {alg} chart={count} enumerated={} {}",
                    oracle.len(),
                    if ok { "pass" } else { "FAIL" }
                );
            }
        }
        for trial in 1..=a.trials {
            let s = ScoreSet::filled_with(n, &all, || rng.gen_range(-1.0..1.0))?;
            for &alg in &algorithms {
                let want = oracle.argmax(&s, alg)?;
                let got = decode(alg, &s, a.root_mode)?;
                let rescored = tree_score(&got.tree, &s, alg)?;
                let ok = close(got.score, want.score) && close(rescored, want.score);
                checks += 1;
                if !ok {
                    failures += 1;
                }
                if !ok || !a.quiet {
                    println!(
                        "n={n} trial={trial} {alg} dp={:.12} oracle={:.12} {}",
                        got.score,
                        want.score,
                        if ok { "pass" } else { "FAIL" }
                    );
                }
            }
        }
    }
    println!("checks={checks} failures={failures}");
    if failures > 0 {
        return Err(CheckFailed(format!("{failures} of {checks} checks failed")).into());
    }
    Ok(())
}

fn cmd_bench(a: BenchArgs) -> Result<()> {
    if a.lengths.is_empty() || a.lengths.contains(&0) {
        bail!("--lengths must be a list of positive sentence lengths");
    }
    let rows = bench::run(a.algorithm, &a.lengths, a.repeats, a.seed)?;
    println!("algorithm\tn\trepeats\tmean_ms\tmin_ms");
    for r in &rows {
        println!(
            "{}\t{}\t{}\t{:.4}\t{:.4}",
            a.algorithm,
            r.n,
            r.repeats,
            r.mean_secs * 1e3,
            r.min_secs * 1e3
        );
    }
    match bench::fitted_exponent(&rows) {
        Some(slope) => println!("slope\t{slope:.3}"),
        None => println!("slope\tnan"),
    }
    Ok(())
}

fn cmd_count(a: CountArgs) -> Result<()> {
    let algorithms: Vec<Algorithm> = match a.algorithm {
        Some(alg) => vec![alg],
        None => Algorithm::ALL.to_vec(),
    };
    for alg in algorithms {
        println!("{alg}\t{}", count_trees(alg, a.n, a.root_mode)?);
    }
    Ok(())
}
