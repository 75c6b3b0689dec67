//! `slc`: check, measure, reduce and typecheck soft lambda-calculus
//! programs, run the library demos, and verify the reduction-length bound.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use softlc::calculus::analyze;
use softlc::gen::enumerate_well_formed;
use softlc::metrics::{certificate, snapshot, MetricsError};
use softlc::reduction::{normalize, ExploreOptions, Fault, NormalizeOptions, ReductionError, Strategy};
use softlc::stdlib::{self, Alphabet3, DemoRun, MapFn, StdlibError};
use softlc::syntax::{parse, parse_term, print, to_engine, Definition, Name, SourceModule, Term};
use softlc::types::{check_module, Outcome};
use softlc::verify;

/// Human-readable traces are cut after this many steps.
const SHOWN_STEPS: usize = 50;

#[derive(Parser)]
#[command(name = "slc", version, about = "Soft lambda-calculus toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Report termhood and well-formedness of every definition.
    Check(FileArgs),
    /// Print weight, measure, rank and the step-count certificate.
    Stats {
        #[command(flatten)]
        file: FileArgs,
        /// Weight parameter; defaults to max(1, rank).
        #[arg(long)]
        n: Option<u64>,
    },
    /// Normalize a definition and print the trace.
    Reduce {
        #[command(flatten)]
        file: FileArgs,
        #[arg(long, value_enum, default_value_t = StrategyArg::Lo)]
        strategy: StrategyArg,
        /// Seed for the random strategy.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Check every step against the weight and measure conditions.
        #[arg(long)]
        monitor: bool,
        /// Weight parameter for the monitor; defaults to max(1, rank).
        #[arg(long)]
        n: Option<u64>,
    },
    /// Typecheck the ascribed definitions.
    Type(FileArgs),
    /// Run the sort or map program of the library.
    Demo {
        #[arg(value_enum)]
        program: DemoProgram,
        /// Comma-separated digits 0, 1, 2.
        #[arg(long, default_value = "")]
        list: String,
        /// The integer packaged with the list; defaults to its length.
        #[arg(long)]
        slack: Option<u64>,
        /// Function mapped by `map`.
        #[arg(long = "fn", value_enum, default_value_t = FnArg::Id)]
        function: FnArg,
        #[arg(long)]
        monitor: bool,
        #[arg(long)]
        json: bool,
    },
    /// Explore every reduction sequence of every well-formed term up to a
    /// size and compare lengths with the certificate.
    BoundCheck {
        #[arg(long, default_value_t = 6)]
        max_size: usize,
        /// Worker threads; defaults to the available parallelism.
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long)]
        json: bool,
        #[arg(long, value_enum, hide = true)]
        fault: Option<FaultArg>,
    },
}

#[derive(Args)]
struct FileArgs {
    /// Source file: definitions, or a single term.
    file: PathBuf,
    /// Only this definition (by default every definition for check and
    /// type, the last one for stats and reduce).
    #[arg(long = "def")]
    def: Option<String>,
    /// Emit one JSON document on stdout.
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Lo,
    Ri,
    Random,
}

#[derive(Clone, Copy, ValueEnum)]
enum DemoProgram {
    Sort,
    Map,
}

#[derive(Clone, Copy, ValueEnum)]
enum FnArg {
    Id,
    Succ,
}

#[derive(Clone, Copy, ValueEnum)]
enum FaultArg {
    DropArgument,
}

/// A failure and the exit code it maps to.
enum Failure {
    Usage(String),
    Static(String),
    Dynamic(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Static(_) => 2,
            Failure::Dynamic(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Static(m) | Failure::Dynamic(m) => m,
        }
    }
}

type Res<T> = Result<T, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            if !f.message().is_empty() {
                eprintln!("error: {}", f.message());
            }
            ExitCode::from(f.code())
        }
    }
}

fn run(cmd: Command) -> Res<()> {
    match cmd {
        Command::Check(args) => cmd_check(&args),
        Command::Stats { file, n } => cmd_stats(&file, n),
        Command::Reduce { file, strategy, seed, monitor, n } => {
            let strategy = match strategy {
                StrategyArg::Lo => Strategy::LeftmostOutermost,
                StrategyArg::Ri => Strategy::RightmostInnermost,
                StrategyArg::Random => Strategy::Random(seed),
            };
            cmd_reduce(&file, strategy, monitor, n)
        }
        Command::Type(args) => cmd_type(&args),
        Command::Demo { program, list, slack, function, monitor, json } => {
            let f = match function {
                FnArg::Id => MapFn::Id,
                FnArg::Succ => MapFn::Succ,
            };
            cmd_demo(program, &list, slack, f, monitor, json)
        }
        Command::BoundCheck { max_size, threads, json, fault } => {
            let fault = fault.map(|FaultArg::DropArgument| Fault::DropArgument);
            cmd_bound_check(max_size, threads.unwrap_or_else(verify::default_threads), json, fault)
        }
    }
}

fn emit(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("JSON values serialize"));
}

/// Library definitions available to every input file. `SLC_STDLIB` names a
/// replacement file; otherwise the bundled typed or bare library is used.
fn prelude(typed: bool) -> Res<SourceModule> {
    match std::env::var_os("SLC_STDLIB") {
        Some(path) => load_module(Path::new(&path)),
        None if typed => Ok(stdlib::typed_stdlib().clone()),
        None => Ok(stdlib::stdlib_env().clone()),
    }
}

/// Parse a file of definitions; a file holding a single term becomes a
/// definition named `main`.
fn load_module(path: &Path) -> Res<SourceModule> {
    let src = std::fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    match parse(&src) {
        Ok(m) => Ok(m),
        Err(module_err) => match parse_term(&src) {
            Ok(body) => Ok(SourceModule {
                defs: vec![Definition { name: Name::new("main"), ascription: None, body, line: 1, col: 1 }],
            }),
            Err(_) => Err(Failure::Usage(format!("{}: {module_err}", path.display()))),
        },
    }
}

/// The input file, the file behind the prelude, and the selected names.
struct Input {
    file: SourceModule,
    linked: SourceModule,
    selected: Vec<Name>,
}

fn load_input(args: &FileArgs, typed: bool, all_by_default: bool) -> Res<Input> {
    let file = load_module(&args.file)?;
    let selected = match &args.def {
        Some(d) => {
            let def = file.get(d).ok_or_else(|| Failure::Usage(format!("no definition named `{d}`")))?;
            vec![def.name.clone()]
        }
        None if all_by_default => file.defs.iter().map(|d| d.name.clone()).collect(),
        None => match file.defs.last() {
            Some(d) => vec![d.name.clone()],
            None => return Err(Failure::Usage(format!("{} has no definitions", args.file.display()))),
        },
    };
    let linked = file.with_prelude(&prelude(typed)?);
    Ok(Input { file, linked, selected })
}

impl Input {
    fn engine_term(&self, name: &Name) -> Term {
        to_engine(&self.linked.resolve(name.as_str()).expect("selected names are defined"))
    }
}

fn cmd_check(args: &FileArgs) -> Res<()> {
    let input = load_input(args, false, true)?;
    let mut rows = Vec::new();
    let mut text = String::new();
    let mut bad = 0;
    for name in &input.selected {
        let info = analyze(&input.engine_term(name)).map_err(|e| Failure::Static(e.to_string()))?;
        if !info.is_well_formed {
            bad += 1;
        }
        let verdict = match (&info.failure_witness, info.is_well_formed) {
            (Some(w), _) => format!("not a term: {} at path {:?}", w.clause, w.path),
            (None, true) => "well-formed".to_string(),
            (None, false) => {
                let temps: Vec<_> = info.temp_vars.iter().map(Name::as_str).collect();
                format!("a term, not well-formed (temporary variables {})", temps.join(", "))
            }
        };
        let free: Vec<_> = info.free_vars.iter().map(Name::as_str).collect();
        let _ = writeln!(
            text,
            "{name}: {verdict}; size {}, depth {}, rank {}, free {{{}}}",
            info.size,
            info.depth,
            info.rank,
            free.join(", ")
        );
        rows.push(json!({ "name": name.as_str(), "info": info }));
    }
    if args.json {
        emit(&json!({ "definitions": rows, "all_well_formed": bad == 0 }));
    } else {
        print!("{text}");
    }
    if bad > 0 {
        return Err(Failure::Static(format!("{bad} definition(s) are not well-formed")));
    }
    Ok(())
}

fn metrics_failure(e: MetricsError) -> Failure {
    Failure::Static(e.to_string())
}

fn cmd_stats(args: &FileArgs, n: Option<u64>) -> Res<()> {
    let input = load_input(args, false, false)?;
    let name = &input.selected[0];
    let t = input.engine_term(name);
    let info = analyze(&t).map_err(|e| Failure::Static(e.to_string()))?;
    let n = n.unwrap_or(info.rank.max(1) as u64);
    let snap = snapshot(&t, n).map_err(metrics_failure)?;
    let cert = certificate(&t).map_err(metrics_failure)?;
    if args.json {
        emit(&json!({ "name": name.as_str(), "metrics": snap, "certificate": cert }));
    } else {
        println!("{name}");
        println!("  size      {}", snap.size);
        println!("  depth     {}", snap.depth);
        println!("  rank      {}", snap.rank);
        println!("  n         {}", snap.n);
        println!("  weight    {}", snap.weight);
        println!("  nlet      {}", snap.nlet);
        println!("  measure   {}", snap.measure);
        println!("  bound     {}^{} = {}", cert.size, 3 * (cert.depth + 1), cert.bound);
    }
    Ok(())
}

fn reduction_failure(e: ReductionError) -> Failure {
    match e {
        ReductionError::NotATerm(w) => {
            Failure::Static(format!("not a term: {} at path {:?}", w.clause, w.path))
        }
        ReductionError::Metrics(m) => metrics_failure(m),
        ReductionError::NotARedex { .. } => Failure::Static(e.to_string()),
        ReductionError::MonitorViolation(report) => Failure::Dynamic(format!("{report}\n  term: {}", report.term_before)),
        ReductionError::StepCapExceeded { .. } => Failure::Dynamic(e.to_string()),
    }
}

fn cmd_reduce(args: &FileArgs, strategy: Strategy, monitor: bool, n: Option<u64>) -> Res<()> {
    let input = load_input(args, false, false)?;
    let t = input.engine_term(&input.selected[0]);
    let opts = NormalizeOptions { strategy, monitor, n, ..Default::default() };
    let trace = normalize(&t, &opts).map_err(reduction_failure)?;
    if args.json {
        emit(&serde_json::to_value(&trace).expect("traces serialize"));
        return Ok(());
    }
    println!("strategy: {strategy}");
    for (i, s) in trace.steps.iter().take(SHOWN_STEPS).enumerate() {
        let metrics = s.snapshot.map(|m| format!(", weight {}, measure {}", m.weight, m.measure)).unwrap_or_default();
        println!("{:>5}  {:<8} at {:?}  (size {}{metrics})", i + 1, s.rule.to_string(), s.path, s.size_after);
    }
    if trace.len() > SHOWN_STEPS {
        println!("  ... {} more steps (use --json for the full trace)", trace.len() - SHOWN_STEPS);
    }
    println!("steps: {}", trace.len());
    println!("bound: {}", trace.certificate.bound);
    if monitor {
        println!("monitor: ok");
    }
    println!("normal form: {}", print(&trace.final_term));
    Ok(())
}

fn cmd_type(args: &FileArgs) -> Res<()> {
    let input = load_input(args, true, true)?;
    let report = check_module(&input.linked);
    // The file's definitions are the last entries of the report.
    let own = &report.entries[report.entries.len() - input.file.defs.len()..];
    let mut rows = Vec::new();
    let mut failed = 0;
    for (name, outcome) in own.iter().filter(|(n, _)| input.selected.contains(n)) {
        let row = match outcome {
            Outcome::Typed(f) => {
                if !args.json {
                    println!("{name} : {f}");
                }
                json!({ "name": name.as_str(), "status": "typed", "formula": f.to_string() })
            }
            Outcome::Failed(e) => {
                failed += 1;
                if !args.json {
                    println!("{name}: {e}");
                }
                json!({ "name": name.as_str(), "status": "failed", "error": e })
            }
            Outcome::Unchecked => {
                if !args.json {
                    println!("{name}: unchecked (no ascription and no inferable type)");
                }
                json!({ "name": name.as_str(), "status": "unchecked" })
            }
        };
        rows.push(row);
    }
    if args.json {
        emit(&json!({ "definitions": rows, "all_ok": failed == 0 }));
    }
    if failed > 0 {
        return Err(Failure::Static(format!("{failed} definition(s) failed to typecheck")));
    }
    Ok(())
}

fn parse_list(s: &str) -> Res<Vec<Alphabet3>> {
    s.split(',')
        .map(str::trim)
        .filter(|d| !d.is_empty())
        .map(|d| {
            d.parse::<u8>()
                .ok()
                .and_then(Alphabet3::from_digit)
                .ok_or_else(|| Failure::Usage(format!("list elements must be 0, 1 or 2, got `{d}`")))
        })
        .collect()
}

fn show(xs: &[Alphabet3]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

fn cmd_demo(
    program: DemoProgram,
    list: &str,
    slack: Option<u64>,
    f: MapFn,
    monitor: bool,
    json_out: bool,
) -> Res<()> {
    let xs = parse_list(list)?;
    let slack = slack.unwrap_or(xs.len() as u64);
    let opts = NormalizeOptions { monitor, ..Default::default() };
    let (run, expected): (Result<DemoRun, StdlibError>, Vec<Alphabet3>) = match program {
        DemoProgram::Sort => {
            let mut sorted = xs.clone();
            sorted.sort();
            (stdlib::run_sort_with(&xs, slack, &opts), sorted)
        }
        DemoProgram::Map => {
            let mapped = xs.iter().rev().map(|&x| f.apply(x)).collect();
            (stdlib::run_map_with(f, &xs, slack, &opts), mapped)
        }
    };
    let run = run.map_err(|e| match e {
        StdlibError::SlackTooSmall { .. } => Failure::Usage(e.to_string()),
        StdlibError::Reduction(r) => reduction_failure(*r),
        other => Failure::Dynamic(other.to_string()),
    })?;
    let cert = run.certificate();
    if json_out {
        emit(&json!({
            "program": match program { DemoProgram::Sort => "sort", DemoProgram::Map => "map" },
            "function": matches!(program, DemoProgram::Map).then_some(f),
            "input": show(&xs),
            "slack": slack,
            "output": show(&run.output),
            "counter": run.counter,
            "steps": run.steps(),
            "certificate": cert,
            "within_bound": run.trace.within_bound(),
            "monitor": if monitor { "ok" } else { "off" },
        }));
    } else {
        println!("input:       {}", show(&xs));
        println!("slack:       {slack}");
        println!("output:      {}", show(&run.output));
        println!("steps:       {}", run.steps());
        println!("certificate: {}^{} ({} digits)", cert.size, 3 * (cert.depth + 1), cert.bound.to_string().len());
        println!("monitor:     {}", if monitor { "ok" } else { "off" });
    }
    if run.output != expected {
        return Err(Failure::Dynamic(format!("expected {}, got {}", show(&expected), show(&run.output))));
    }
    if run.counter != slack {
        return Err(Failure::Dynamic(format!("integer changed from {slack} to {}", run.counter)));
    }
    if !run.trace.within_bound() {
        return Err(Failure::Dynamic("reduction exceeded its certificate".into()));
    }
    Ok(())
}

fn cmd_bound_check(max_size: usize, threads: usize, json_out: bool, fault: Option<Fault>) -> Res<()> {
    let terms = enumerate_well_formed(max_size);
    let opts = ExploreOptions { fault, ..Default::default() };
    let report = verify::check_all(&terms, &opts, threads);
    if json_out {
        emit(&json!({ "max_size": max_size, "ok": report.ok(), "report": report }));
    } else {
        println!("{:>4} {:>8} {:>10} {:>8} {:>10}", "size", "terms", "sequences", "longest", "max fill");
        for (size, row) in &report.by_size {
            println!(
                "{size:>4} {:>8} {:>10} {:>8} {:>9.3}%",
                row.terms, row.sequences, row.longest, row.max_fill_percent
            );
        }
        println!("checked {} terms", report.terms);
    }
    match report.counterexamples.first() {
        None => Ok(()),
        Some(c) => Err(Failure::Dynamic(format!(
            "{} counterexample(s); first: {}",
            report.counterexamples.len(),
            serde_json::to_string(c).expect("counterexamples serialize")
        ))),
    }
}
