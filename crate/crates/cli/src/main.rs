use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use kh_cli::record::Timings;
use kh_cli::{Cache, DiagramInfo, RunRecord, TOOL_VERSION};
use kh_core::complex::{BuildOptions, DEFAULT_MAX_GENERATORS};
use kh_core::spectral::{analyze, compare_pages, compute, truncation_squares, PageDifference};
use kh_core::tqft::{
    check_triangle_with, grading_shift_surface, grading_shift_word_str, hfl_generator_matrix, Generator,
    GeneratorWord, GradingShift,
};
use kh_core::{parse_pd, ArcId, Complex, ComplexError, DiagramError, ExecMode, Flavor, Move, PlanarDiagram};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

#[derive(Parser)]
#[command(name = "kh", version, about = "Khovanov homology over F2 and the spectral sequence of its filtered cube complex")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Global {
    /// Reduced theory (default for compute and ss).
    #[arg(long, global = true, conflicts_with = "unreduced")]
    reduced: bool,
    #[arg(long, global = true)]
    unreduced: bool,
    /// Arc label carrying the basepoint.
    #[arg(long, global = true)]
    basepoint: Option<u32>,
    #[arg(long, global = true, value_enum)]
    output: Option<Output>,
    /// Directory for cached run records.
    #[arg(long, global = true, env = "KH_CACHE_DIR")]
    cache: Option<PathBuf>,
    /// Worker threads (default: logical cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Refuse complexes with more generators than this.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_GENERATORS)]
    max_generators: u64,
    /// Include wall-clock timings in records (makes output run-dependent).
    #[arg(long, global = true)]
    timings: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Output {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Homology and every page of the spectral sequence for one diagram.
    Compute(DiagramArgs),
    /// Like compute, printing pages up to `--max-page`.
    Ss {
        #[command(flatten)]
        diagram: DiagramArgs,
        #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
        max_page: Option<u64>,
    },
    /// Collapse report over a corpus file of `name,pd` lines.
    Probe { corpus: PathBuf },
    /// Compare pages of two diagrams, or of a diagram and its images under a move script.
    Invariance {
        /// One or two PD codes (text or @file).
        #[arg(long, required = true, num_args = 1, action = clap::ArgAction::Append)]
        pd: Vec<String>,
        /// Moves such as `R1:3:+ R2:1:2`, separated by spaces, commas or newlines (text or @file).
        #[arg(long)]
        moves: Option<String>,
    },
    /// Check the two TQFTs agree on random generator words.
    TqftCheck {
        #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
        count: u64,
        #[arg(long, default_value_t = 12)]
        max_len: usize,
        #[arg(long, default_value_t = 6)]
        max_size: usize,
        /// Corrupt one entry of every Lambda generator (harness control).
        #[arg(long, hide = true)]
        corrupt: bool,
    },
    /// Grading shift of a word of elementary cobordisms, or of a surface.
    Grading {
        /// Kinds: pos-stab neg-stab pos-destab neg-destab birth death saddle isotopy.
        kinds: Vec<String>,
        /// `χ(F),χ(R+),χ(R-)` instead of a word.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, conflicts_with = "kinds")]
        surface: Option<Vec<i64>>,
    },
}

#[derive(Args)]
struct DiagramArgs {
    /// PD code text, or @path to a file holding one.
    #[arg(long)]
    pd: String,
    #[arg(long, default_value = "diagram")]
    name: String,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure { code, message: message.into() }
    }
}

impl From<DiagramError> for Failure {
    fn from(e: DiagramError) -> Self {
        Failure::new(2, e.to_string())
    }
}

impl From<ComplexError> for Failure {
    fn from(e: ComplexError) -> Self {
        let code = match e {
            ComplexError::TooLarge { .. } | ComplexError::TooManyCrossings(_) => 3,
            _ => 1,
        };
        Failure::new(code, e.to_string())
    }
}

type CmdResult = Result<(), Failure>;

fn read_arg(text: &str) -> Result<String, Failure> {
    match text.strip_prefix('@') {
        Some(path) => std::fs::read_to_string(path).map_err(|e| Failure::new(2, format!("{path}: {e}"))),
        None => Ok(text.to_string()),
    }
}

impl Global {
    fn flavor(&self) -> Option<Flavor> {
        match (self.reduced, self.unreduced) {
            (true, _) => Some(Flavor::Reduced),
            (_, true) => Some(Flavor::Unreduced),
            _ => None,
        }
    }

    fn flavors(&self) -> Vec<Flavor> {
        self.flavor().map(|f| vec![f]).unwrap_or_else(|| vec![Flavor::Reduced, Flavor::Unreduced])
    }

    fn options(&self) -> BuildOptions {
        BuildOptions { max_generators: self.max_generators, mode: ExecMode::Parallel, ..Default::default() }
    }

    fn diagram(&self, pd: &str) -> Result<PlanarDiagram, Failure> {
        let d = parse_pd(&read_arg(pd)?)?;
        Ok(match self.basepoint {
            Some(arc) => d.with_basepoint(ArcId(arc))?,
            None => d,
        })
    }
}

/// Builds, checks and analyzes one complex, consulting the cache first.
fn run_record(g: &Global, name: &str, d: &PlanarDiagram, flavor: Flavor) -> Result<RunRecord, Failure> {
    let info = DiagramInfo::new(name, d);
    let cache = g.cache.as_ref().map(Cache::new);
    if let Some(hit) = cache.as_ref().and_then(|c| c.load(&info.hash, flavor.name(), TOOL_VERSION)) {
        log::info!("cache hit for {}", info.hash);
        if !g.timings {
            return Ok(RunRecord { diagram: info, ..hit });
        }
    }
    let t0 = Instant::now();
    let c = Complex::build_with(d, flavor, g.options())?;
    let violations = c.d_squared_violations();
    if violations > 0 {
        return Err(Failure::new(1, format!("internal error: d^2 has {violations} nonzero entries")));
    }
    let build_us = t0.elapsed().as_micros() as u64;
    let t1 = Instant::now();
    let s = analyze(&c, ExecMode::Parallel);
    if !s.consistent {
        return Err(Failure::new(1, "internal error: page differentials are inconsistent"));
    }
    let pages_us = t1.elapsed().as_micros() as u64;
    let mut record = RunRecord::new(info, &s, truncation_squares(&c));
    if let Some(cache) = &cache {
        match cache.store(&record) {
            Ok(path) => log::info!("stored {}", path.display()),
            Err(e) => log::warn!("cache write failed: {e}"),
        }
    }
    if g.timings {
        record.meta.timings = Some(Timings { build_us, pages_us });
    }
    Ok(record)
}

fn print_json<T: Serialize>(value: &T) {
    println!("{}", serde_json::to_string_pretty(value).expect("serializable output"));
}

fn cmd_compute(g: &Global, args: &DiagramArgs, max_page: Option<usize>) -> CmdResult {
    let d = g.diagram(&args.pd)?;
    let record = run_record(g, &args.name, &d, g.flavor().unwrap_or(Flavor::Reduced))?.truncated(max_page);
    match g.output.unwrap_or(Output::Json) {
        Output::Json => print_json(&record),
        Output::Csv => print!("{}", record.csv()),
    }
    Ok(())
}

#[derive(Serialize)]
struct ProbeRow {
    name: String,
    flavor: String,
    crossings: usize,
    collapse_page: Option<usize>,
    /// Pages `r > 2` carrying a nonzero differential.
    late_differentials: Vec<usize>,
    status: String,
}

fn probe_row(g: &Global, name: &str, d: &PlanarDiagram, flavor: Flavor) -> Result<ProbeRow, Failure> {
    let base = |status: &str| ProbeRow {
        name: name.to_string(),
        flavor: flavor.name().to_string(),
        crossings: d.crossing_count(),
        collapse_page: None,
        late_differentials: vec![],
        status: status.to_string(),
    };
    match compute(d, flavor, g.options()) {
        Ok(s) => {
            let late: Vec<usize> =
                s.pages.iter().filter(|p| p.r > 2 && p.dr_ranks.values().any(|&x| x > 0)).map(|p| p.r).collect();
            let status = if late.is_empty() { "collapse" } else { "NONCOLLAPSE" };
            Ok(ProbeRow { collapse_page: Some(s.collapse_page), late_differentials: late, ..base(status) })
        }
        Err(ComplexError::TooLarge { .. }) => Ok(base("TOO_LARGE")),
        Err(e) => Err(e.into()),
    }
}

fn cmd_probe(g: &Global, corpus: &PathBuf) -> CmdResult {
    let entries = kh_core::diagram::load_corpus(corpus)?;
    let jobs: Vec<(&String, &PlanarDiagram, Flavor)> =
        entries.iter().flat_map(|(n, d)| g.flavors().into_iter().map(move |f| (n, d, f))).collect();
    let rows = jobs.par_iter().map(|&(n, d, f)| probe_row(g, n, d, f)).collect::<Result<Vec<_>, _>>()?;
    let flagged = rows.iter().filter(|r| r.status == "NONCOLLAPSE").count();
    if flagged > 0 {
        log::warn!("{flagged} rows flagged NONCOLLAPSE");
    }
    match g.output.unwrap_or(Output::Csv) {
        Output::Json => print_json(&rows),
        Output::Csv => {
            println!("name,flavor,crossings,collapse_page,late_differentials,status");
            for r in &rows {
                let late: Vec<String> = r.late_differentials.iter().map(|x| x.to_string()).collect();
                let page = r.collapse_page.map(|p| p.to_string()).unwrap_or_default();
                println!("{},{},{},{},{},{}", r.name, r.flavor, r.crossings, page, late.join(";"), r.status);
            }
        }
    }
    Ok(())
}

fn parse_moves(script: &str) -> Result<Vec<Move>, Failure> {
    script
        .lines()
        .map(|l| l.split('#').next().unwrap_or(""))
        .flat_map(|l| l.split(|c: char| c == ',' || c.is_whitespace()))
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<Move>().map_err(Failure::from))
        .collect()
}

fn describe(diff: PageDifference) -> String {
    let (r, (h, q), a, b) = diff;
    format!("E^{r} differs at (h,q)=({h},{q}): {a} vs {b}")
}

fn cmd_invariance(g: &Global, pds: &[String], moves: Option<&str>) -> CmdResult {
    let first = g.diagram(&pds[0])?;
    let mut others: Vec<(String, PlanarDiagram)> = Vec::new();
    match (pds.get(1), moves) {
        (Some(_), Some(_)) | (None, None) => {
            return Err(Failure::new(2, "give either a second --pd or --moves"));
        }
        (Some(second), None) => others.push(("second diagram".to_string(), g.diagram(second)?)),
        (None, Some(script)) => {
            let mut d = first.clone();
            for mv in parse_moves(&read_arg(script)?)? {
                d = d.apply(&mv)?;
                others.push((format!("after {mv}"), d.clone()));
            }
        }
    }
    let mut mismatches = 0;
    for flavor in g.flavors() {
        let base = compute(&first, flavor, g.options())?;
        for (label, d) in &others {
            match compare_pages(&base, &compute(d, flavor, g.options())?) {
                Ok(()) => println!("{} {label}: equal", flavor.name()),
                Err(diff) => {
                    mismatches += 1;
                    println!("{} {label}: differ", flavor.name());
                    eprintln!("{} {label} ({d}): {}", flavor.name(), describe(diff));
                }
            }
        }
    }
    if mismatches > 0 {
        return Err(Failure::new(4, format!("{mismatches} comparisons differ")));
    }
    Ok(())
}

#[derive(Serialize)]
struct TqftReport {
    words: u64,
    seed: u64,
    passed: u64,
    failed: u64,
    first_failure: Option<String>,
    minimal_failing: Option<String>,
}

fn cmd_tqft_check(g: &Global, count: u64, max_len: usize, max_size: usize, corrupt: bool) -> CmdResult {
    let seed = g.seed.unwrap_or(42);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let honest = |gen: &Generator| hfl_generator_matrix(gen);
    let corrupted = |gen: &Generator| {
        let m = hfl_generator_matrix(gen)?;
        Ok(if matches!(gen, Generator::Lambda { .. } | Generator::ILambda { .. }) { m.with_toggled(0, 0) } else { m })
    };
    let hfl: &dyn Fn(&Generator) -> _ = if corrupt { &corrupted } else { &honest };
    let mut report = TqftReport { words: count, seed, passed: 0, failed: 0, first_failure: None, minimal_failing: None };
    for _ in 0..count {
        let w = GeneratorWord::random(&mut rng, max_len, max_size);
        let r = check_triangle_with(&w, hfl).map_err(|e| Failure::new(1, e.to_string()))?;
        if r.holds {
            report.passed += 1;
        } else {
            report.failed += 1;
            if report.first_failure.is_none() {
                report.first_failure = Some(w.to_string());
                report.minimal_failing = r.minimal_failing.map(|m| m.to_string());
            }
        }
    }
    match g.output {
        Some(Output::Json) => print_json(&report),
        _ => {
            println!("words={} seed={} passed={} failed={}", report.words, seed, report.passed, report.failed);
            if let (Some(w), Some(m)) = (&report.first_failure, &report.minimal_failing) {
                println!("first failing word: {w}");
                println!("minimal failing subword: {m}");
            }
        }
    }
    if report.failed > 0 {
        return Err(Failure::new(1, format!("{} words break the triangle", report.failed)));
    }
    Ok(())
}

#[derive(Serialize)]
struct GradingOut {
    #[serde(flatten)]
    shift: GradingShift,
    display: String,
}

fn cmd_grading(g: &Global, kinds: &[String], surface: Option<&[i64]>) -> CmdResult {
    let shift = match surface {
        Some([chi, plus, minus]) => grading_shift_surface(*chi, *plus, *minus),
        Some(_) => return Err(Failure::new(2, "--surface takes three integers")),
        None => {
            let words: Vec<&str> = kinds.iter().map(String::as_str).collect();
            grading_shift_word_str(&words).map_err(|e| Failure::new(2, e.to_string()))?
        }
    };
    match g.output {
        Some(Output::Json) => print_json(&GradingOut { shift, display: shift.to_string() }),
        Some(Output::Csv) => println!("alexander2,maslov2,delta2\n{},{},{}", shift.alexander2, shift.maslov2, shift.delta2),
        None => println!("{shift}"),
    }
    Ok(())
}

fn run(cli: Cli) -> CmdResult {
    let g = &cli.global;
    if let Some(n) = g.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::new(2, format!("--threads: {e}")))?;
    }
    match &cli.command {
        Command::Compute(args) => cmd_compute(g, args, None),
        Command::Ss { diagram, max_page } => cmd_compute(g, diagram, max_page.map(|r| r as usize)),
        Command::Probe { corpus } => cmd_probe(g, corpus),
        Command::Invariance { pd, moves } => {
            if pd.len() > 2 {
                return Err(Failure::new(2, "at most two --pd codes"));
            }
            cmd_invariance(g, pd, moves.as_deref())
        }
        Command::TqftCheck { count, max_len, max_size, corrupt } => cmd_tqft_check(g, *count, *max_len, *max_size, *corrupt),
        Command::Grading { kinds, surface } => cmd_grading(g, kinds, surface.as_deref()),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("kh: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
