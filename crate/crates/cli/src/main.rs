//! `mcsa`: model checking and minimal cut set generation from the command line.
//!
//! Exit codes: 0 success (property holds, families equal), 1 counterexample
//! found or families differ, 2 usage, input or parse error, 3 oracle bound
//! exceeded.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use mcsa_core::cex::{find_counterexample, path_json, trace};
use mcsa_core::cutset::{run_naive, run_systematic, Mode};
use mcsa_core::encode::VarOrder;
use mcsa_core::fixpoint::AnalysisSession;
use mcsa_core::ltl::{negate_property, parse_ltl, Ltl};
use mcsa_core::model::{parse_model, Model};
use mcsa_core::oracle::{brute_force_mcs, enumerate, OracleError, DEFAULT_STATE_BOUND};
use mcsa_core::random::{random_model, random_propositions, RandomModelConfig, Schema};
use mcsa_core::report::{diff_families, format_set, parse_family, Format, McsReport};

#[derive(Parser)]
#[command(
    name = "mcsa",
    version,
    about = "Symbolic LTL model checking and minimal cut set generation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a property; exit 1 with a counterexample trace if it fails.
    Check(CheckArgs),
    /// Compute the minimal cut sets of a property violation.
    Mcs(McsArgs),
    /// Minimal cut sets by explicit-state brute force.
    Oracle(OracleArgs),
    /// Compare the cut set families of two reports.
    Diff(DiffArgs),
    /// Print a seeded random model.
    GenRandomModel(GenArgs),
}

#[derive(Args)]
struct Input {
    /// Model file.
    #[arg(long)]
    model: PathBuf,
    /// LTL property: a file name or the formula itself.
    #[arg(long)]
    prop: String,
    /// File listing variable names in BDD order, top first.
    #[arg(long)]
    order: Option<PathBuf>,
}

#[derive(Args)]
struct Output {
    #[arg(long, value_enum, default_value_t = OutFormat::Text)]
    format: OutFormat,
    /// Write the result here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CheckArgs {
    #[command(flatten)]
    input: Input,
    #[command(flatten)]
    output: Output,
    /// Also write the reachable states as a Graphviz BDD.
    #[arg(long)]
    dot: Option<PathBuf>,
}

#[derive(Args)]
struct McsArgs {
    #[command(flatten)]
    input: Input,
    #[command(flatten)]
    output: Output,
    #[arg(long, value_enum, default_value_t = StrategyArg::Systematic)]
    strategy: StrategyArg,
    /// Counterexample generation for the naive strategy.
    #[arg(long, value_enum, default_value_t = ModeArg::Directed)]
    mode: ModeArg,
    /// Leave wall-clock times out of the report.
    #[arg(long)]
    no_timings: bool,
}

#[derive(Args)]
struct OracleArgs {
    #[command(flatten)]
    input: Input,
    #[command(flatten)]
    output: Output,
    #[arg(long, default_value_t = DEFAULT_STATE_BOUND)]
    oracle_state_bound: usize,
}

#[derive(Args)]
struct DiffArgs {
    a: PathBuf,
    b: PathBuf,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 3)]
    vars: usize,
    #[arg(long, default_value_t = 3)]
    max_domain: usize,
    #[arg(long, default_value_t = 3)]
    flags: usize,
    #[arg(long, default_value_t = 5)]
    blocks: usize,
    /// Also write a random property of this shape to `--prop-out`.
    #[arg(long, value_enum, requires = "prop_out")]
    schema: Option<SchemaArg>,
    #[arg(long)]
    prop_out: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutFormat {
    Json,
    Csv,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Naive,
    Systematic,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Directed,
    Onthefly,
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemaArg {
    Always,
    Eventually,
    Response,
    InfinitelyOften,
}

impl From<SchemaArg> for Schema {
    fn from(s: SchemaArg) -> Self {
        match s {
            SchemaArg::Always => Schema::Always,
            SchemaArg::Eventually => Schema::Eventually,
            SchemaArg::Response => Schema::Response,
            SchemaArg::InfinitelyOften => Schema::InfinitelyOften,
        }
    }
}

impl From<OutFormat> for Format {
    fn from(f: OutFormat) -> Self {
        match f {
            OutFormat::Json => Format::Json,
            OutFormat::Csv => Format::Csv,
            OutFormat::Text => Format::Text,
        }
    }
}

/// Error carrying its exit status.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl From<anyhow::Error> for Failure {
    fn from(error: anyhow::Error) -> Self {
        Failure { code: 2, error }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

impl Input {
    fn load(&self) -> Result<(Model, Ltl, VarOrder)> {
        let model = parse_model(&read(&self.model)?)
            .map_err(|e| anyhow!("{}: {e}", self.model.display()))?;
        let text = if Path::new(&self.prop).is_file() {
            read(Path::new(&self.prop))?
        } else {
            self.prop.clone()
        };
        let prop = parse_ltl(&text).map_err(|e| anyhow!("property: {e}"))?;
        prop.check_atoms(&model)
            .map_err(|e| anyhow!("property: {e}"))?;
        let order = match &self.order {
            Some(p) => VarOrder::from_text(&read(p)?),
            None => VarOrder::Declaration,
        };
        Ok((model, prop, order))
    }

    fn session(&self) -> Result<AnalysisSession> {
        let (model, prop, order) = self.load()?;
        AnalysisSession::for_property(&model, &prop, &order).map_err(|e| anyhow!("{e}"))
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("cannot write {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn check(args: &CheckArgs) -> Result<u8, Failure> {
    let mut sess = args.input.session()?;
    if let Some(dot) = &args.dot {
        let reach = sess.reachable();
        let map = &sess.aug.base.map;
        let m = &sess.aug.base.model;
        let name = |v: u32| {
            (0..m.variables.len())
                .find_map(|id| {
                    let bits = &map.bits(id).cur;
                    bits.iter().position(|&b| b == v).map(|i| {
                        if bits.len() == 1 {
                            m.variables[id].name.clone()
                        } else {
                            format!("{}[{i}]", m.variables[id].name)
                        }
                    })
                })
                .unwrap_or_else(|| format!("v{v}"))
        };
        let text = sess.mgr.to_dot(reach, &name);
        fs::write(dot, text).with_context(|| format!("cannot write {}", dot.display()))?;
    }
    let tt = sess.mgr.tt();
    let path = find_counterexample(&mut sess, tt, None);
    let text = match (args.output.format, &path) {
        (OutFormat::Json, _) => {
            let value = serde_json::json!({
                "holds": path.is_none(),
                "counterexample": path.as_ref().map(|p| path_json(&sess, p)),
            });
            format!(
                "{}\n",
                serde_json::to_string_pretty(&value).context("serialising")?
            )
        }
        (_, None) => "property holds\n".to_string(),
        (_, Some(p)) => format!("property violated\n{}", trace(&sess, p)),
    };
    emit(args.output.out.as_deref(), &text)?;
    Ok(if path.is_some() { 1 } else { 0 })
}

fn write_report(report: &McsReport, output: &Output) -> Result<()> {
    emit(output.out.as_deref(), &report.render(output.format.into()))
}

fn mcs(args: &McsArgs) -> Result<u8, Failure> {
    let mut sess = args.input.session()?;
    let mut report = match args.strategy {
        StrategyArg::Systematic => run_systematic(&mut sess),
        StrategyArg::Naive => run_naive(
            &mut sess,
            match args.mode {
                ModeArg::Directed => Mode::Directed,
                ModeArg::Onthefly => Mode::Onthefly,
            },
        ),
    };
    if args.no_timings {
        report = report.without_timings();
    }
    write_report(&report, &args.output)?;
    // per-round data for plotting goes wherever the report does not
    let rounds = report.rounds_csv();
    if args.output.out.is_some() {
        print!("{rounds}");
    } else {
        eprint!("{rounds}");
    }
    Ok(0)
}

fn oracle(args: &OracleArgs) -> Result<u8, Failure> {
    let (model, prop, _) = args.input.load()?;
    let bound = |e: OracleError| match e {
        OracleError::StateBound(_) | OracleError::TooManyFlags { .. } => Failure {
            code: 3,
            error: e.into(),
        },
        other => Failure::from(anyhow::Error::from(other)),
    };
    let g = enumerate(&model, args.oracle_state_bound).map_err(bound)?;
    let family = brute_force_mcs(&g, &negate_property(&prop)).map_err(bound)?;
    write_report(
        &McsReport::from_oracle(g.flag_names(), family),
        &args.output,
    )?;
    Ok(0)
}

fn diff(args: &DiffArgs) -> Result<u8, Failure> {
    let load = |p: &Path| -> Result<_> {
        parse_family(&read(p)?).map_err(|e| anyhow!("{}: {e}", p.display()))
    };
    let d = diff_families(&load(&args.a)?, &load(&args.b)?);
    if d.is_empty() {
        println!("families are equal");
        return Ok(0);
    }
    for s in &d.only_a {
        println!("only in {}: {}", args.a.display(), format_set(s));
    }
    for s in &d.only_b {
        println!("only in {}: {}", args.b.display(), format_set(s));
    }
    Ok(1)
}

fn gen_random_model(args: &GenArgs) -> Result<u8, Failure> {
    let cfg = RandomModelConfig {
        vars: args.vars,
        max_domain: args.max_domain.max(1),
        flags: args.flags,
        blocks: args.blocks,
    };
    let m = random_model(&cfg, args.seed);
    emit(args.out.as_deref(), &m.to_string())?;
    if let (Some(schema), Some(path)) = (args.schema, &args.prop_out) {
        let (p, q) = random_propositions(&m, args.seed);
        let prop = Schema::from(schema).instantiate(p, q);
        fs::write(path, format!("{prop}\n"))
            .with_context(|| format!("cannot write {}", path.display()))?;
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let result = match &cli.command {
        Command::Check(a) => check(a),
        Command::Mcs(a) => mcs(a),
        Command::Oracle(a) => oracle(a),
        Command::Diff(a) => diff(a),
        Command::GenRandomModel(a) => gen_random_model(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}
