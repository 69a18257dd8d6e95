use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use careertrace::cache::{sha256_hex, Cache};
use careertrace::config::{ConfigFile, Settings};
use careertrace::io::{self, ReadError, EU28_SCHEME};
use careertrace::manifest::RunManifest;
use careertrace::pipeline::Run;
use careertrace::{report, tables};
use careertrace_core::indicators::MetricFamily;
use careertrace_core::synth::{self, Noise, ScenarioConfig};
use careertrace_core::{AuthorIndex, Corpus, HostAttribution, RegionScheme, TieRule};

#[derive(Parser)]
#[command(name = "careertrace", version, about = "Researcher mobility and citation indicators from publication metadata")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a corpus; diagnostics go to standard error.
    Validate(CorpusArgs),
    /// Yearly career positions of every author.
    Timelines {
        #[command(flatten)]
        input: CorpusArgs,
        /// Output file (standard output when omitted).
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Move and mobility-state tables.
    Moves {
        #[command(flatten)]
        input: CorpusArgs,
        /// Output directory for moves.csv and states.csv.
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Yearly researcher stocks per mobility class.
    Stocks {
        #[command(flatten)]
        input: CorpusArgs,
        /// Output file (standard output when omitted).
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Citation-impact and collaboration indicators, one file per family.
    Indicators {
        #[command(flatten)]
        input: CorpusArgs,
        /// Output directory.
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Generate a synthetic corpus and its ground truth.
    Synth(SynthArgs),
    /// Pivot tables and SVG charts from an indicator directory.
    Report {
        /// Directory written by `indicators` (and optionally `stocks`).
        dir: PathBuf,
        /// Output directory (default: `<dir>/report`).
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args)]
struct CorpusArgs {
    /// Line-delimited JSON corpus.
    corpus: PathBuf,
    /// Region scheme file (default: CHN, USA, EU28, OTHER).
    #[arg(long)]
    scheme: Option<PathBuf>,
    /// TOML configuration; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Home region label (default: CHN).
    #[arg(long)]
    home: Option<String>,
    /// Last year of the data set (default: last publication year).
    #[arg(long)]
    end_year: Option<i32>,
    /// Years an author stays counted after the last publication (default: 2).
    #[arg(long)]
    grace_years: Option<i32>,
    /// First year of the stock table (default: first publication year).
    #[arg(long)]
    stock_start: Option<i32>,
    /// Dominant-region rule on tied weights (default: hysteresis).
    #[arg(long, value_enum)]
    tie_rule: Option<TieArg>,
    /// Host credited to a returnee with several inbound moves (default: latest).
    #[arg(long, value_enum)]
    host_attribution: Option<HostArg>,
    /// Count a record as international only if two distinct authors carry
    /// the distinct countries.
    #[arg(long)]
    intl_requires_distinct_authors: Option<bool>,
    /// Metric families, comma separated: pp10, shares, direction.
    #[arg(long, value_delimiter = ',')]
    metrics: Option<Vec<String>>,
    /// Earliest accepted publication year.
    #[arg(long)]
    year_min: Option<i32>,
    /// Latest accepted publication year.
    #[arg(long)]
    year_max: Option<i32>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
    /// Directory of cached intermediate tables.
    #[arg(long, default_value = ".careertrace-cache")]
    cache_dir: PathBuf,
    /// Compute every stage without reading or writing the cache.
    #[arg(long)]
    no_cache: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum TieArg {
    Hysteresis,
    LabelOrder,
}

#[derive(Clone, Copy, ValueEnum)]
enum HostArg {
    First,
    Latest,
}

#[derive(Args)]
struct SynthArgs {
    /// TOML scenario; unset keys take default values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Random seed, overriding the scenario.
    #[arg(long)]
    seed: Option<u64>,
    /// Number of authors, overriding the scenario.
    #[arg(long)]
    authors: Option<usize>,
    /// Region scheme file (default: CHN, USA, EU28, OTHER).
    #[arg(long)]
    scheme: Option<PathBuf>,
    /// Probability of dropping an author's publications of a whole year.
    #[arg(long, default_value_t = 0.0)]
    gap_probability: f64,
    /// Probability of adding a guest affiliation to an authorship.
    #[arg(long, default_value_t = 0.0)]
    dual_affiliation_probability: f64,
    /// Corpus output file.
    #[arg(short, long)]
    output: PathBuf,
    /// Ground-truth output file.
    #[arg(long)]
    truth: PathBuf,
    /// Worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
}

/// Failure carrying its exit code.
enum Failure {
    Usage(anyhow::Error),
    Data(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Data(e)
    }
}

fn usage(e: anyhow::Error) -> Failure {
    Failure::Usage(e)
}

type Outcome = std::result::Result<(), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            eprintln!("usage: careertrace <validate|timelines|moves|stocks|indicators|synth|report> [options]; see --help");
            ExitCode::from(2)
        }
        Err(Failure::Data(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Validate(args) => validate(&args),
        Command::Timelines { input, output } => timelines(&input, output.as_deref()),
        Command::Moves { input, output } => moves(&input, &output),
        Command::Stocks { input, output } => stocks(&input, output.as_deref()),
        Command::Indicators { input, output } => indicators(&input, &output),
        Command::Synth(args) => synthesize(&args),
        Command::Report { dir, output } => render_report(&dir, output),
    }
}

fn set_threads(threads: Option<usize>) -> Outcome {
    if let Some(n) = threads {
        if n == 0 {
            return Err(usage(anyhow!("--threads must be at least 1")));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| anyhow!("starting thread pool: {e}"))?;
    }
    Ok(())
}

/// Scheme and the SHA-256 of its source text.
fn load_scheme(path: Option<&Path>) -> std::result::Result<(RegionScheme, String), Failure> {
    let text = match path {
        Some(p) => fs::read_to_string(p)
            .with_context(|| format!("reading scheme {}", p.display()))
            .map_err(usage)?,
        None => EU28_SCHEME.to_string(),
    };
    let scheme = io::parse_scheme(&text).map_err(|e| usage(e.into()))?;
    Ok((scheme, sha256_hex(text.as_bytes())))
}

fn settings(args: &CorpusArgs) -> std::result::Result<Settings, Failure> {
    let file = match &args.config {
        Some(p) => ConfigFile::load(p).map_err(usage)?,
        None => ConfigFile::default(),
    };
    let flags = ConfigFile {
        home: args.home.clone(),
        end_year: args.end_year,
        grace_years: args.grace_years,
        tie_rule: args.tie_rule.map(|t| match t {
            TieArg::Hysteresis => TieRule::Hysteresis,
            TieArg::LabelOrder => TieRule::LabelOrder,
        }),
        host_attribution: args.host_attribution.map(|h| match h {
            HostArg::First => HostAttribution::First,
            HostArg::Latest => HostAttribution::Latest,
        }),
        intl_requires_distinct_authors: args.intl_requires_distinct_authors,
        metrics: args.metrics.clone(),
        year_min: args.year_min,
        year_max: args.year_max,
        stock_start: args.stock_start,
    };
    Settings::resolve(file.overridden_by(flags)).map_err(usage)
}

struct Loaded {
    corpus: Corpus,
    corpus_hash: String,
    scheme_hash: String,
    settings: Settings,
}

fn load(args: &CorpusArgs) -> std::result::Result<Loaded, Failure> {
    set_threads(args.threads)?;
    let settings = settings(args)?;
    let (scheme, scheme_hash) = load_scheme(args.scheme.as_deref())?;
    if scheme.id(&settings.home).is_none() {
        return Err(usage(anyhow!(
            "home region {:?} is not a label of the scheme",
            settings.home
        )));
    }
    let bytes = fs::read(&args.corpus)
        .with_context(|| format!("reading corpus {}", args.corpus.display()))?;
    let corpus_hash = sha256_hex(&bytes);
    let corpus = match io::parse_corpus(bytes.as_slice(), &scheme, settings.window) {
        Ok(c) => c,
        Err(ReadError::Invalid(diags)) => {
            for d in &diags {
                eprintln!("{}: {d}", args.corpus.display());
            }
            return Err(Failure::Data(anyhow!("{} invalid record(s)", diags.len())));
        }
        Err(e) => return Err(Failure::Data(e.into())),
    };
    Ok(Loaded {
        corpus,
        corpus_hash,
        scheme_hash,
        settings,
    })
}

fn manifest_for(sub: &str, l: &Loaded) -> Result<RunManifest> {
    let mut m = RunManifest::new(sub, serde_json::to_value(&l.settings)?);
    m.corpus_sha256 = Some(l.corpus_hash.clone());
    m.scheme_sha256 = Some(l.scheme_hash.clone());
    Ok(m)
}

fn new_run<'a>(l: &'a Loaded, args: &CorpusArgs, manifest: &'a mut RunManifest) -> Run<'a> {
    Run {
        corpus: &l.corpus,
        settings: &l.settings,
        corpus_hash: l.corpus_hash.clone(),
        scheme_hash: l.scheme_hash.clone(),
        cache: (!args.no_cache).then(|| Cache::new(&args.cache_dir)),
        manifest,
    }
}

/// Writes `bytes` to `path`, or to standard output without a path.
fn emit(path: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match path {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir)?;
            }
            fs::write(p, bytes).with_context(|| format!("writing {}", p.display()))
        }
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)?;
            Ok(out.flush()?)
        }
    }
}

/// Records a single-file output and writes the manifest beside it.
fn finish_file(mut manifest: RunManifest, path: Option<&Path>, bytes: &[u8]) -> Result<()> {
    emit(path, bytes)?;
    if let Some(p) = path {
        let name = p.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        manifest.output(&name, bytes);
        let dir = p.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
        manifest.write(dir)?;
    }
    Ok(())
}

fn validate(args: &CorpusArgs) -> Outcome {
    let l = load(args)?;
    let authors = AuthorIndex::new(&l.corpus).len();
    eprintln!(
        "{}: {} records, {} authors, valid",
        args.corpus.display(),
        l.corpus.len(),
        authors
    );
    Ok(())
}

fn timelines(args: &CorpusArgs, output: Option<&Path>) -> Outcome {
    let l = load(args)?;
    let mut manifest = manifest_for("timelines", &l)?;
    let index = AuthorIndex::new(&l.corpus);
    let t = new_run(&l, args, &mut manifest).timelines(&index)?;
    let mut buf = Vec::new();
    tables::write_timelines(&t, l.corpus.scheme(), &mut buf).map_err(anyhow::Error::from)?;
    finish_file(manifest, output, &buf)?;
    Ok(())
}

fn moves(args: &CorpusArgs, output: &Path) -> Outcome {
    let l = load(args)?;
    let mut manifest = manifest_for("moves", &l)?;
    let index = AuthorIndex::new(&l.corpus);
    let mut run = new_run(&l, args, &mut manifest);
    let t = run.timelines(&index)?;
    let m = run.mobility(&t)?;
    let scheme = l.corpus.scheme();
    let mut mv = Vec::new();
    tables::write_moves(&m.moves, scheme, &mut mv).map_err(anyhow::Error::from)?;
    let mut st = Vec::new();
    tables::write_states(&t, &m.states, scheme, &mut st).map_err(anyhow::Error::from)?;
    write_dir(output, manifest, &[("moves.csv", mv), ("states.csv", st)])?;
    Ok(())
}

fn stocks(args: &CorpusArgs, output: Option<&Path>) -> Outcome {
    let l = load(args)?;
    let mut manifest = manifest_for("stocks", &l)?;
    let index = AuthorIndex::new(&l.corpus);
    let mut run = new_run(&l, args, &mut manifest);
    let t = run.timelines(&index)?;
    let m = run.mobility(&t)?;
    let cells = run.stocks(&t, &m.states)?;
    let mut buf = Vec::new();
    tables::write_stocks(&cells, l.corpus.scheme(), &mut buf).map_err(anyhow::Error::from)?;
    finish_file(manifest, output, &buf)?;
    Ok(())
}

fn indicators(args: &CorpusArgs, output: &Path) -> Outcome {
    let l = load(args)?;
    let mut manifest = manifest_for("indicators", &l)?;
    let index = AuthorIndex::new(&l.corpus);
    let mut run = new_run(&l, args, &mut manifest);
    let t = run.timelines(&index)?;
    let m = run.mobility(&t)?;
    let table = run.indicators(&index, &m.states)?;
    let mut files = Vec::new();
    for family in &l.settings.metrics {
        let mut buf = Vec::new();
        tables::write_family(&table, *family, &mut buf).map_err(anyhow::Error::from)?;
        files.push((family_file(*family), buf));
    }
    write_dir(output, manifest, &files)?;
    Ok(())
}

fn family_file(f: MetricFamily) -> &'static str {
    match f {
        MetricFamily::Pp10 => "pp10.csv",
        MetricFamily::Shares => "shares.csv",
        MetricFamily::Direction => "direction.csv",
    }
}

fn write_dir(dir: &Path, mut manifest: RunManifest, files: &[(&str, Vec<u8>)]) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    for (name, bytes) in files {
        fs::write(dir.join(name), bytes).with_context(|| format!("writing {name}"))?;
        manifest.output(name, bytes);
    }
    manifest.write(dir)?;
    Ok(())
}

fn synthesize(args: &SynthArgs) -> Outcome {
    set_threads(args.threads)?;
    let (scheme, scheme_hash) = load_scheme(args.scheme.as_deref())?;
    let mut config: ScenarioConfig = match &args.config {
        Some(p) => {
            let text = fs::read_to_string(p)
                .with_context(|| format!("reading {}", p.display()))
                .map_err(usage)?;
            toml::from_str(&text)
                .with_context(|| format!("parsing {}", p.display()))
                .map_err(usage)?
        }
        None => ScenarioConfig::default(),
    };
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(n) = args.authors {
        config.n_authors = n;
    }
    config.validate(&scheme).map_err(|e| usage(e.into()))?;
    let (corpus, truth) = synth::generate(&config, &scheme).map_err(anyhow::Error::from)?;
    let noise = Noise {
        seed: config.seed ^ 0x9e37_79b9_7f4a_7c15,
        gap_probability: args.gap_probability,
        dual_affiliation_probability: args.dual_affiliation_probability,
    };
    let corpus = if noise.gap_probability > 0.0 || noise.dual_affiliation_probability > 0.0 {
        synth::degrade(&corpus, &truth, &noise).map_err(|e| usage(e.into()))?
    } else {
        corpus
    };

    let mut corpus_bytes = Vec::new();
    io::write_corpus(&corpus, &mut corpus_bytes).map_err(anyhow::Error::from)?;
    let mut truth_bytes = Vec::new();
    io::write_truth(&truth, &scheme, &mut truth_bytes).map_err(anyhow::Error::from)?;
    emit(Some(&args.output), &corpus_bytes)?;
    emit(Some(&args.truth), &truth_bytes)?;

    let mut manifest = RunManifest::new(
        "synth",
        serde_json::json!({ "scenario": config, "noise": noise }),
    );
    manifest.corpus_sha256 = Some(sha256_hex(&corpus_bytes));
    manifest.scheme_sha256 = Some(scheme_hash);
    let name = |p: &Path| p.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    manifest.output(&name(&args.output), &corpus_bytes);
    manifest.output(&name(&args.truth), &truth_bytes);
    let dir = args
        .output
        .parent()
        .filter(|d| !d.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    manifest.write(dir).map_err(anyhow::Error::from)?;
    eprintln!(
        "wrote {} records by {} authors",
        corpus.len(),
        truth.authors.len()
    );
    Ok(())
}

fn render_report(dir: &Path, output: Option<PathBuf>) -> Outcome {
    if !dir.is_dir() {
        return Err(usage(anyhow!("{} is not a directory", dir.display())));
    }
    let out = output.unwrap_or_else(|| dir.join("report"));
    let source = RunManifest::read(dir).ok();
    let written = report::render(dir, &out)?;
    if written.is_empty() {
        return Err(Failure::Data(anyhow!("no indicator or stock tables in {}", dir.display())));
    }
    let config = source
        .as_ref()
        .map(|m| m.config.clone())
        .unwrap_or(serde_json::Value::Null);
    let mut manifest = RunManifest::new("report", config);
    if let Some(src) = &source {
        manifest.corpus_sha256 = src.corpus_sha256.clone();
        manifest.scheme_sha256 = src.scheme_sha256.clone();
    }
    for (name, bytes) in &written {
        manifest.output(name, bytes);
    }
    manifest.write(&out).map_err(anyhow::Error::from)?;
    eprintln!("wrote {} files to {}", written.len(), out.display());
    Ok(())
}
