//! The `csq` command line: parse, reduce and translate terms of the six
//! calculi, check encodings against their criteria, and run the demos.

pub mod demos;
pub mod tracefile;

use std::ffi::OsString;
use std::io::Write;

use clap::{Args, Parser, Subcommand, ValueEnum};
use csq_core::calculus::{self, CalculusId, Term};
use csq_core::encodings::{self, Encoding, Mutation, ENCODINGS};
use csq_core::harness::gen::DEFAULT_SEED;
use csq_core::harness::oracle::OracleMode;
use csq_core::harness::{self, CheckConfig, Suite, Verdict};
use csq_core::name::Name;
use csq_core::process::{self, ProcessBounds};
use csq_core::trace::{Status, Strategy};

use tracefile::TraceFile;

pub const EXIT_PASS: u8 = 0;
pub const EXIT_FAIL: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_INCONCLUSIVE: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "csq", version, about = "Interpreters, translations and encoding checks for λ, SK/SF, π and CPC")]
pub struct Cli {
    /// Print λ, •, ν and friends instead of ASCII.
    #[arg(long, global = true)]
    unicode: bool,
    /// Machine-readable output.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse a term and print its canonical form.
    Parse {
        #[arg(long, value_parser = parse_calculus)]
        calculus: CalculusId,
        text: String,
    },
    /// Reduce a term, or replay a JSON trace with --replay.
    Reduce(ReduceArgs),
    /// Translate a term along an encoding.
    Translate {
        #[arg(long, value_parser = parse_calculus)]
        from: CalculusId,
        #[arg(long, value_parser = parse_calculus)]
        to: CalculusId,
        /// Pick a specific encoding, e.g. sf-cpc-alt.
        #[arg(long)]
        encoding: Option<String>,
        /// Result channel of the channel-parametrised encodings.
        #[arg(long, default_value = "c")]
        chan: String,
        text: String,
    },
    /// Check an encoding against its criteria.
    Check(CheckArgs),
    /// Run a demo: parallel-or, self-reducer, factorise or sf-machine.
    Demo {
        name: String,
        #[command(flatten)]
        bounds: BoundArgs,
    },
}

#[derive(Args, Debug)]
struct ReduceArgs {
    #[arg(long, value_parser = parse_calculus, required_unless_present = "replay")]
    calculus: Option<CalculusId>,
    #[arg(long, value_enum, default_value_t = StrategyArg::Leftmost)]
    strategy: StrategyArg,
    #[arg(long, default_value_t = 1000)]
    max_steps: usize,
    /// Print every step.
    #[arg(long)]
    trace: bool,
    #[arg(long, default_value_t = 2)]
    repl_budget: usize,
    /// Replay the steps of a JSON trace file and compare every result.
    #[arg(long, conflicts_with = "text")]
    replay: Option<std::path::PathBuf>,
    #[arg(required_unless_present = "replay")]
    text: Option<String>,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum StrategyArg {
    Leftmost,
    RightToLeft,
}

#[derive(Args, Debug)]
struct BoundArgs {
    /// Rounds of the bisimulation game.
    #[arg(long, default_value_t = 6)]
    depth: usize,
    #[arg(long, default_value_t = 2)]
    repl_budget: usize,
    #[arg(long, default_value_t = 20_000)]
    max_states: usize,
    #[arg(long, default_value_t = 300)]
    max_steps: usize,
}

#[derive(Args, Debug)]
struct CheckArgs {
    /// One of lambda-sk, sk-lambda, sk-sf, lambdav-pi, sf-cpc, sf-cpc-alt, sk-cpc, pi-cpc.
    encoding: String,
    /// Run only these suites.
    #[arg(long)]
    suite: Vec<String>,
    /// Break the encoding on purpose; the checks should catch it.
    #[arg(long)]
    mutation: Option<String>,
    /// Check these source terms instead of the generated corpus.
    #[arg(long)]
    term: Vec<String>,
    #[arg(long, env = "CSQ_SEED", default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long)]
    corpus_size: Option<usize>,
    #[arg(long, value_enum, default_value_t = OracleArg::Bisim)]
    oracle: OracleArg,
    #[command(flatten)]
    bounds: BoundArgs,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum OracleArg {
    /// Bounded weak barbed bisimulation confirms every match.
    Bisim,
    /// Matches are taken up to canonical form only.
    Canonical,
}

fn parse_calculus(s: &str) -> Result<CalculusId, String> {
    s.parse().map_err(|_| {
        let ids: Vec<&str> = CalculusId::ALL.iter().map(|c| c.as_str()).collect();
        format!("unknown calculus `{s}` (expected one of {})", ids.join(", "))
    })
}

/// Output streams and the exit code of one invocation.
struct Io<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

macro_rules! say {
    ($w:expr, $($arg:tt)*) => { { let _ = writeln!($w, $($arg)*); } };
}

/// Runs the command line and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{text}");
            } else {
                let _ = write!(out, "{text}");
            }
            return code;
        }
    };
    let mut io = Io { out, err };
    match &cli.command {
        Command::Parse { calculus, text } => cmd_parse(&mut io, &cli, *calculus, text),
        Command::Reduce(a) => cmd_reduce(&mut io, &cli, a),
        Command::Translate { from, to, encoding, chan, text } => {
            cmd_translate(&mut io, &cli, *from, *to, encoding.as_deref(), chan, text)
        }
        Command::Check(a) => cmd_check(&mut io, &cli, a),
        Command::Demo { name, bounds } => cmd_demo(&mut io, &cli, name, bounds),
    }
}

fn parse_term(io: &mut Io, calculus: CalculusId, text: &str) -> Result<Term, u8> {
    calculus::parse(calculus, text).map_err(|e| {
        say!(io.err, "error: {e}");
        EXIT_USAGE
    })
}

fn cmd_parse(io: &mut Io, cli: &Cli, calculus: CalculusId, text: &str) -> u8 {
    match parse_term(io, calculus, text) {
        Ok(t) => {
            if cli.json {
                say!(io.out, "{}", serde_json::json!({ "calculus": calculus.as_str(), "term": t.render(false) }));
            } else {
                say!(io.out, "{}", t.render(cli.unicode));
            }
            EXIT_PASS
        }
        Err(code) => code,
    }
}

/// Reduces `t` and records the run as a trace file.
pub fn reduce_to_file(calculus: CalculusId, t: &Term, strategy: Strategy, max_steps: usize, repl_budget: usize) -> TraceFile {
    match t {
        Term::Lambda(l) => {
            let mode = calculus.lambda_mode().expect("λ calculus");
            TraceFile::new(calculus, &l.reduce(mode, strategy, max_steps), Term::Lambda)
        }
        Term::Comb(c) => {
            let def = calculus.combinatory().expect("combinatory calculus");
            TraceFile::new(calculus, &def.reduce(c, strategy, max_steps), Term::Comb)
        }
        Term::Pi(p) => TraceFile::new(calculus, &process::reduce_process(p, repl_budget, max_steps), Term::Pi),
        Term::Cpc(p) => TraceFile::new(calculus, &process::reduce_process(p, repl_budget, max_steps), Term::Cpc),
    }
}

fn cmd_reduce(io: &mut Io, cli: &Cli, a: &ReduceArgs) -> u8 {
    if let Some(path) = &a.replay {
        return cmd_replay(io, path);
    }
    let calculus = a.calculus.expect("required by clap");
    let text = a.text.as_deref().expect("required by clap");
    let t = match parse_term(io, calculus, text) {
        Ok(t) => t,
        Err(code) => return code,
    };
    let strategy = match a.strategy {
        StrategyArg::Leftmost => Strategy::Leftmost,
        StrategyArg::RightToLeft => Strategy::RightToLeft,
    };
    let file = reduce_to_file(calculus, &t, strategy, a.max_steps, a.repl_budget);
    if cli.json {
        say!(io.out, "{}", serde_json::to_string_pretty(&file).expect("serializable"));
        return EXIT_PASS;
    }
    // text output re-renders through the term so --unicode applies
    let render = |s: &str| {
        if cli.unicode {
            calculus::parse(calculus, s).map(|t| t.render(true)).unwrap_or_else(|_| s.to_string())
        } else {
            s.to_string()
        }
    };
    if a.trace {
        say!(io.out, "   {}", render(&file.initial));
        for s in &file.steps {
            say!(io.out, "-> {}   [{} at {:?}]", render(&s.result), s.rule, s.path);
        }
    } else {
        say!(io.out, "{}", render(file.steps.last().map_or(&file.initial, |s| &s.result)));
    }
    let n = file.steps.len();
    say!(io.out, "{n} step{} ({})", if n == 1 { "" } else { "s" }, file.status);
    if file.status == Status::Cutoff {
        EXIT_INCONCLUSIVE
    } else {
        EXIT_PASS
    }
}

fn cmd_replay(io: &mut Io, path: &std::path::Path) -> u8 {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            say!(io.err, "error: {}: {e}", path.display());
            return EXIT_USAGE;
        }
    };
    let file: TraceFile = match serde_json::from_str(&text) {
        Ok(f) => f,
        Err(e) => {
            say!(io.err, "error: {}: not a trace: {e}", path.display());
            return EXIT_USAGE;
        }
    };
    match tracefile::replay(&file) {
        Ok(()) => {
            say!(io.out, "replayed {} steps: every result matches", file.steps.len());
            EXIT_PASS
        }
        Err(e) => {
            say!(io.out, "replay failed: {e}");
            EXIT_FAIL
        }
    }
}

fn cmd_translate(io: &mut Io, cli: &Cli, from: CalculusId, to: CalculusId, id: Option<&str>, chan: &str, text: &str) -> u8 {
    let enc: &Encoding = match id {
        Some(id) => match encodings::by_id(id) {
            Some(e) if e.target == to => e,
            Some(e) => {
                say!(io.err, "error: {} translates into {}, not {to}", e.id, e.target);
                return EXIT_USAGE;
            }
            None => {
                say!(io.err, "error: no such encoding `{id}`");
                return EXIT_USAGE;
            }
        },
        None => match encodings::between(from, to) {
            Some(e) => e,
            None => {
                say!(io.err, "error: no such encoding from {from} to {to}");
                return EXIT_USAGE;
            }
        },
    };
    let chan = match Name::try_user(chan) {
        Ok(c) => c,
        Err(e) => {
            say!(io.err, "error: --chan: {e}");
            return EXIT_USAGE;
        }
    };
    let t = match parse_term(io, from, text) {
        Ok(t) => t,
        Err(code) => return code,
    };
    match encodings::translate(enc, &t, &chan, None) {
        Ok(image) => {
            if cli.json {
                say!(
                    io.out,
                    "{}",
                    serde_json::json!({ "encoding": enc.id, "source": t.render(false), "image": image.render(false) })
                );
            } else {
                say!(io.out, "{}", image.render(cli.unicode));
            }
            EXIT_PASS
        }
        Err(e) => {
            say!(io.err, "error: {e}");
            EXIT_USAGE
        }
    }
}

pub fn exit_code(v: Verdict) -> u8 {
    match v {
        Verdict::Pass => EXIT_PASS,
        Verdict::Fail => EXIT_FAIL,
        Verdict::InconclusiveBound => EXIT_INCONCLUSIVE,
    }
}

fn cmd_check(io: &mut Io, cli: &Cli, a: &CheckArgs) -> u8 {
    let Some(enc) = encodings::by_id(&a.encoding) else {
        let ids: Vec<&str> = ENCODINGS.iter().map(|e| e.id).collect();
        say!(io.err, "error: unknown encoding `{}` (expected one of {})", a.encoding, ids.join(", "));
        return EXIT_USAGE;
    };
    let mutation = match a.mutation.as_deref().map(str::parse::<Mutation>) {
        None => None,
        Some(Ok(m)) if m.encoding().id == enc.id => Some(m),
        Some(Ok(m)) => {
            say!(io.err, "error: mutation `{}` breaks {}, not {}", m.as_str(), m.encoding().id, enc.id);
            return EXIT_USAGE;
        }
        Some(Err(e)) => {
            say!(io.err, "error: {e}");
            return EXIT_USAGE;
        }
    };
    let mut suites = Vec::new();
    for s in &a.suite {
        match s.parse::<Suite>() {
            Ok(s) if harness::suites_for(enc).contains(&s) => suites.push(s),
            Ok(s) => {
                say!(io.err, "error: suite {} does not apply to {}", s.as_str(), enc.id);
                return EXIT_USAGE;
            }
            Err(e) => {
                say!(io.err, "error: {e}");
                return EXIT_USAGE;
            }
        }
    }
    if suites.is_empty() {
        suites = harness::suites_for(enc).to_vec();
    }
    let cfg = CheckConfig {
        seed: a.seed,
        depth: a.bounds.depth,
        repl_budget: a.bounds.repl_budget,
        max_states: a.bounds.max_states,
        max_steps: a.bounds.max_steps,
        mode: match a.oracle {
            OracleArg::Bisim => OracleMode::BoundedWeakBarbedBisim,
            OracleArg::Canonical => OracleMode::CanonicalEquality,
        },
        mutation,
        terms: (!a.term.is_empty()).then(|| a.term.clone()),
        corpus_size: a.corpus_size,
    };
    let mut reports = Vec::new();
    for s in suites {
        match harness::run_suite(enc, s, &cfg) {
            Ok(r) => reports.push(r),
            Err(e) => {
                say!(io.err, "error: {e}");
                return EXIT_USAGE;
            }
        }
    }
    let report = harness::CriteriaReport::new(enc.id, mutation.map(|m| m.as_str().into()), cfg.seed, reports);
    if cli.json {
        say!(io.out, "{}", serde_json::to_string_pretty(&report).expect("serializable"));
    } else {
        let _ = write!(io.out, "{}", report.summary());
        for s in &report.suites {
            for n in &s.notes {
                say!(io.out, "  {}: {n}", s.criterion);
            }
        }
        say!(io.out, "{}: {} (seed {})", enc.id, report.verdict, report.seed);
        if let Some(cx) = report.first_failure().and_then(|s| s.counterexample.as_ref()) {
            say!(io.out, "counterexample: {}", cx.term);
            say!(io.out, "reason: {}", cx.reason);
        }
    }
    exit_code(report.verdict)
}

fn cmd_demo(io: &mut Io, cli: &Cli, name: &str, b: &BoundArgs) -> u8 {
    let bounds = ProcessBounds { depth: b.max_steps, max_states: b.max_states, repl_budget: b.repl_budget };
    let Some(report) = demos::run(name, bounds, cli.unicode) else {
        say!(io.err, "error: unknown demo `{name}` (expected one of {})", demos::NAMES.join(", "));
        return EXIT_USAGE;
    };
    if cli.json {
        say!(io.out, "{}", serde_json::to_string_pretty(&report.json).expect("serializable"));
    } else {
        let _ = write!(io.out, "{}", report.text);
    }
    if report.ok {
        EXIT_PASS
    } else {
        EXIT_FAIL
    }
}
