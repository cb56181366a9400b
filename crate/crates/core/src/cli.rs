//! The `membrane` command line.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::policy::multiset::{infer_explained, ResidentRecord};
use crate::policy::satisfaction::DEFAULT_BOUND;
use crate::policy::Regime;
use crate::runtime::{
    run, verify_reachable_safety, verify_subject_reduction, Engine, MembraneKind, Mode, Report,
};
use crate::syntax::{
    parse_agent, parse_dfa_bundle, parse_system_named, parse_theta, render, DfaBundle, Diagnostic,
};
use crate::system::System;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_UNKNOWN: i32 = 3;

#[derive(Parser, Debug, Clone)]
#[command(name = "membrane", version, about = "Check, run and verify systems of sites guarded by policy membranes")]
pub struct CliConfig {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub options: Options,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Coherence and well-formedness of a system.
    Check { file: PathBuf },
    /// Simulate a system with a seeded scheduler.
    Run { file: PathBuf },
    /// Check subject reduction and safety on the reachable state space.
    Verify { file: PathBuf },
    /// Print the least multiset policy an agent satisfies.
    Infer { agent: String },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum RegimeArg {
    Set,
    Multiset,
    Dfa,
}

impl From<RegimeArg> for Regime {
    fn from(r: RegimeArg) -> Regime {
        match r {
            RegimeArg::Set => Regime::Set,
            RegimeArg::Multiset => Regime::Multiset,
            RegimeArg::Dfa => Regime::Dfa,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum MembraneArg {
    Entry,
    Static,
    Dynamic,
}

impl From<MembraneArg> for MembraneKind {
    fn from(m: MembraneArg) -> MembraneKind {
        match m {
            MembraneArg::Entry => MembraneKind::Entry,
            MembraneArg::Static => MembraneKind::Static,
            MembraneArg::Dynamic => MembraneKind::Dynamic,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Report,
}

#[derive(Args, Debug, Clone)]
pub struct Options {
    #[arg(long, value_enum, default_value = "set", global = true)]
    pub regime: RegimeArg,
    #[arg(long, value_enum, default_value = "entry", global = true)]
    pub membrane: MembraneArg,
    /// Automaton bundle resolving `@name` policies.
    #[arg(long, global = true)]
    pub dfa: Option<PathBuf>,
    /// Resident record for dynamic membranes.
    #[arg(long, global = true)]
    pub theta: Option<PathBuf>,
    /// Exploration depth for `verify`.
    #[arg(long, default_value_t = 5, global = true)]
    pub depth: usize,
    /// Maximum number of reductions for `run`.
    #[arg(long, default_value_t = 20, global = true)]
    pub steps: usize,
    #[arg(long, default_value_t = 0, global = true)]
    pub seed: u64,
    /// Pair budget of automaton satisfaction searches.
    #[arg(long, default_value_t = DEFAULT_BOUND, global = true)]
    pub bound: usize,
    #[arg(long, value_enum, default_value = "text", global = true)]
    pub format: Format,
}

/// Output streams of a command.
pub struct Io<'a> {
    pub out: &'a mut dyn Write,
    pub err: &'a mut dyn Write,
}

/// An input problem; reported on the error stream with exit code 2.
#[derive(Debug)]
struct InputError(Vec<String>);

impl InputError {
    fn one(msg: impl Into<String>) -> Self {
        InputError(vec![msg.into()])
    }

    fn diags(diags: Vec<Diagnostic>) -> Self {
        InputError(diags.iter().map(ToString::to_string).collect())
    }
}

struct Loaded {
    system: System,
    engine: Engine,
    theta_derived: bool,
}

fn read(path: &Path) -> Result<String, InputError> {
    std::fs::read_to_string(path).map_err(|e| InputError::one(format!("{}: {e}", path.display())))
}

fn mode(opts: &Options) -> Result<Mode, InputError> {
    Mode::new(opts.regime.into(), opts.membrane.into()).map_err(|e| InputError::one(e.to_string()))
}

fn bundle(opts: &Options, regime: Regime) -> Result<DfaBundle, InputError> {
    match (&opts.dfa, regime) {
        (Some(path), _) => {
            let text = read(path)?;
            let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("dfa");
            parse_dfa_bundle(&path.display().to_string(), &text, stem).map_err(InputError::diags)
        }
        (None, Regime::Dfa) => Err(InputError::one("the dfa regime needs an automaton bundle (--dfa)")),
        (None, _) => Ok(DfaBundle::new()),
    }
}

fn load(file: &Path, opts: &Options) -> Result<Loaded, InputError> {
    let mode = mode(opts)?;
    let dfas = bundle(opts, mode.regime())?;
    let text = read(file)?;
    let system =
        parse_system_named(&file.display().to_string(), &text, mode.regime(), &dfas).map_err(InputError::diags)?;
    let mut engine = Engine::new(mode).with_bound(opts.bound.max(1));
    if let Some(path) = &opts.theta {
        let theta = parse_theta(&path.display().to_string(), &read(path)?).map_err(InputError::diags)?;
        engine = engine.with_theta(theta);
    }
    let mut theta_derived = false;
    if mode.membrane() == MembraneKind::Dynamic && engine.theta.is_none() {
        let theta = ResidentRecord::from_system(&system)
            .ok_or_else(|| InputError::one("cannot derive a resident record: some trustworthy site has no policy"))?;
        engine = engine.with_theta(theta);
        theta_derived = true;
    }
    Ok(Loaded { system, engine, theta_derived })
}

fn report_input_error(io: &mut Io<'_>, e: InputError) -> i32 {
    for line in e.0 {
        let _ = writeln!(io.err, "{line}");
    }
    EXIT_INPUT
}

pub fn cmd_check(file: &Path, opts: &Options, io: &mut Io<'_>) -> i32 {
    let loaded = match load(file, opts) {
        Ok(l) => l,
        Err(e) => return report_input_error(io, e),
    };
    let Loaded { system, engine, theta_derived } = loaded;
    let wf = engine.wellformedness(&system);
    let mut out = String::new();
    out.push_str(&format!("mode: {}\n", engine.mode));
    if theta_derived {
        out.push_str("resident record: derived from the initial system\n");
    }
    if wf.coherent() {
        out.push_str("coherent: yes\n");
    } else {
        out.push_str("coherent: no\n");
        for (k, l) in &wf.incoherent {
            out.push_str(&format!("  {k} trusts {l} above {l}'s own assessment\n"));
        }
    }
    let verdict = match wf.verdict() {
        Some(true) => "yes",
        Some(false) if wf.failures.is_empty() => "no (incoherent)",
        Some(false) => "no",
        None => "unknown",
    };
    out.push_str(&format!("well-formed: {verdict}\n"));
    for f in &wf.failures {
        out.push_str(&format!("  {f}\n"));
    }
    for f in &wf.inconclusive {
        out.push_str(&format!("  undecided: {f}\n"));
    }
    let _ = io.out.write_all(out.as_bytes());
    match wf.verdict() {
        Some(true) => EXIT_OK,
        Some(false) => EXIT_FAIL,
        None => EXIT_UNKNOWN,
    }
}

pub fn cmd_run(file: &Path, opts: &Options, io: &mut Io<'_>) -> i32 {
    let Loaded { system, engine, .. } = match load(file, opts) {
        Ok(l) => l,
        Err(e) => return report_input_error(io, e),
    };
    let trace = run(&system, &engine, opts.steps, opts.seed);
    let mut out = String::new();
    for ev in &trace.events {
        out.push_str(&format!("{ev}\n"));
    }
    for d in &trace.stuck {
        out.push_str(&format!("# stuck for good: {} -> {} (budgets only shrink)\n", d.from, d.to));
    }
    out.push_str("final:\n");
    out.push_str(&render(&trace.final_system));
    let _ = io.out.write_all(out.as_bytes());
    EXIT_OK
}

pub fn cmd_verify(file: &Path, opts: &Options, io: &mut Io<'_>) -> i32 {
    let Loaded { system, engine, .. } = match load(file, opts) {
        Ok(l) => l,
        Err(e) => return report_input_error(io, e),
    };
    let mut report = Report::default();
    report.merge(verify_subject_reduction(&system, &engine, opts.depth));
    report.merge(verify_reachable_safety(&system, &engine, opts.depth, opts.depth));
    let mut out = String::new();
    if opts.format == Format::Text {
        out.push_str(&format!("mode: {}\n", engine.mode));
        out.push_str("site\tthread\ttrace\treason\n");
    }
    out.push_str(&report.to_string());
    let _ = io.out.write_all(out.as_bytes());
    if !report.is_clean() {
        EXIT_FAIL
    } else if report.unknown > 0 {
        EXIT_UNKNOWN
    } else {
        EXIT_OK
    }
}

pub fn cmd_infer(agent: &str, io: &mut Io<'_>) -> i32 {
    let p = match parse_agent(agent, Regime::Multiset, &DfaBundle::new()) {
        Ok(p) => p,
        Err(d) => return report_input_error(io, InputError::diags(d)),
    };
    match infer_explained(&p) {
        Ok(t) => {
            let _ = writeln!(io.out, "{t}");
        }
        Err(r) => {
            let _ = writeln!(io.out, "undefined");
            let _ = writeln!(io.err, "{r}");
        }
    }
    EXIT_OK
}

/// Runs a parsed command line and returns the process exit code.
pub fn execute(cfg: &CliConfig, io: &mut Io<'_>) -> i32 {
    match &cfg.command {
        Command::Check { file } => cmd_check(file, &cfg.options, io),
        Command::Run { file } => cmd_run(file, &cfg.options, io),
        Command::Verify { file } => cmd_verify(file, &cfg.options, io),
        Command::Infer { agent } => cmd_infer(agent, io),
    }
}
