//! The `reqmon` command-line pipeline: requirement checking, formalization,
//! package generation, bus simulation and plain-language explanations.
//!
//! Exit codes: 0 success, 1 usage, 2 parse or validation, 3 generation,
//! 4 simulation input or output.

mod explain;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use reqmon_core::cgen::{fired_lines, step_trace_csv, COptions};
use reqmon_core::formalize::{make_component_spec, Rate};
use reqmon_core::nodegen::{gen_package, load_varmap, plan_nodes, PackageName, DEFAULT_PREFIX};
use reqmon_core::reqlang::{parse_requirements_file, parse_var_decls, split_requirement_blocks, validate};
use reqmon_core::simbus::{Bus, BusOptions, EvalPolicy, ReplayTrace};
use reqmon_core::streamc::compile_monitor;
use reqmon_core::{ComponentSpec, MonitorSpec, SourceRequirement};
use thiserror::Error;

pub use explain::explain_requirement;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_GENERATION: i32 = 3;
pub const EXIT_SIMULATION: i32 = 4;

pub const DEFAULT_PACKAGE: &str = "copilot_monitor";

#[derive(Debug, Parser)]
#[command(name = "reqmon", version, about = "Turn structured requirements into runtime monitors")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse and validate requirements against variable declarations.
    Check(FrontArgs),
    /// Write the component specification (JSON) for a requirement file.
    Formalize {
        #[command(flatten)]
        front: FrontArgs,
        /// Output file; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate the C99 monitor and the node package from a specification.
    Gen(GenArgs),
    /// Replay a message trace through the generated nodes on a simulated bus.
    Simulate(SimArgs),
    /// Describe each requirement in plain words.
    Explain {
        reqs: PathBuf,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
        rate: u32,
    },
}

#[derive(Debug, Args)]
struct FrontArgs {
    /// Requirement file made of `# id: <ID>` blocks.
    reqs: PathBuf,
    /// Variable declarations, one `name : numeric|boolean` per line.
    #[arg(long)]
    vars: PathBuf,
    /// Evaluation steps per time unit.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    rate: u32,
}

#[derive(Debug, Args)]
struct GenArgs {
    /// Component specification written by `formalize`.
    spec: PathBuf,
    /// Variable-to-topic mapping (JSON).
    #[arg(long)]
    varmap: PathBuf,
    /// Directory receiving the package tree.
    #[arg(long)]
    out: PathBuf,
    /// Namespace of the violation topics.
    #[arg(long, default_value = DEFAULT_PREFIX)]
    prefix: String,
    #[arg(long, default_value = DEFAULT_PACKAGE)]
    package: String,
    /// One package per requirement, named `<package>_<id>`.
    #[arg(long)]
    split: bool,
    /// Declare numeric inputs as `float`.
    #[arg(long)]
    c_float: bool,
    /// Also write the compiled stream program as JSON.
    #[arg(long, conflicts_with = "split")]
    dump_monitor: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SimArgs {
    spec: PathBuf,
    #[arg(long)]
    varmap: PathBuf,
    /// JSON Lines message trace: `{"t": .., "topic": .., "value": ..}`.
    #[arg(long)]
    trace: PathBuf,
    /// `any`, `all` or `clock:<period>`.
    #[arg(long, default_value = "any", value_parser = parse_policy)]
    policy: EvalPolicy,
    /// Under the `any` policy, step on every message instead of once per
    /// instant. Inputs published together then advance the monitor several
    /// steps.
    #[arg(long)]
    per_message: bool,
    #[arg(long, default_value = DEFAULT_PREFIX)]
    prefix: String,
    /// Write the bus log (JSON Lines).
    #[arg(long)]
    log: Option<PathBuf>,
    /// Write the per-step input table the monitor observed (CSV).
    #[arg(long)]
    steps_csv: Option<PathBuf>,
    /// Write `step,handler` lines for every violation.
    #[arg(long)]
    fired: Option<PathBuf>,
}

fn parse_policy(s: &str) -> Result<EvalPolicy, String> {
    match s {
        "any" => Ok(EvalPolicy::OnAnyMessage),
        "all" => Ok(EvalPolicy::OnAllInputsChanged),
        _ => {
            let period = s
                .strip_prefix("clock:")
                .ok_or_else(|| format!("unknown policy `{s}` (expected any, all or clock:<period>)"))?;
            let period: f64 = period
                .parse()
                .map_err(|_| format!("invalid clock period `{period}`"))?;
            EvalPolicy::fixed_clock(period).map_err(|e| e.to_string())
        }
    }
}

/// A failed command, classified by pipeline stage.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Generation(String),
    #[error("{0}")]
    Simulation(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::Generation(_) => EXIT_GENERATION,
            CliError::Simulation(_) => EXIT_SIMULATION,
        }
    }
}

/// Runs the command line `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{text}");
                    EXIT_USAGE
                }
            };
        }
    };
    let result = match cli.command {
        Command::Check(front) => cmd_check(&front, out, err),
        Command::Formalize { front, out: path } => cmd_formalize(&front, path.as_deref(), out, err),
        Command::Gen(args) => cmd_gen(&args, out),
        Command::Simulate(args) => cmd_simulate(&args, out),
        Command::Explain { reqs, rate } => cmd_explain(&reqs, rate, out),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.code()
        }
    }
}

fn read(path: &Path, class: fn(String) -> CliError) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| class(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, contents: &str, class: fn(String) -> CliError) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| class(format!("{}: {e}", dir.display())))?;
    }
    std::fs::write(path, contents).map_err(|e| class(format!("{}: {e}", path.display())))
}

fn io_out(e: std::io::Error) -> CliError {
    CliError::Input(format!("writing output: {e}"))
}

/// Parses, validates, formalizes and compiles; every problem found is
/// returned as a diagnostic line.
fn front_end(args: &FrontArgs) -> Result<(Vec<SourceRequirement>, ComponentSpec), Vec<String>> {
    let reqs_path = args.reqs.display();
    let fail = |msg: String| vec![msg];
    let src = read(&args.reqs, CliError::Input).map_err(|e| fail(e.to_string()))?;
    let decls_src = read(&args.vars, CliError::Input).map_err(|e| fail(e.to_string()))?;
    let decls = parse_var_decls(&decls_src)
        .map_err(|e| fail(format!("{}: {e}", args.vars.display())))?;
    let blocks = split_requirement_blocks(&src).map_err(|e| fail(format!("{reqs_path}: {e}")))?;

    let mut diagnostics = Vec::new();
    let mut reqs = Vec::new();
    for block in &blocks {
        match block.parse() {
            Ok(req) => {
                for e in validate(&req, &decls) {
                    diagnostics.push(format!("{reqs_path}: requirement `{}`: {e}", req.id));
                }
                reqs.push(req);
            }
            Err(e) => diagnostics.push(format!("{reqs_path}: {e}")),
        }
    }
    if !diagnostics.is_empty() {
        return Err(diagnostics);
    }
    let rate = Rate::new(args.rate).map_err(|e| fail(e.to_string()))?;
    let spec = make_component_spec(&reqs, &decls, rate).map_err(|e| fail(format!("{reqs_path}: {e}")))?;
    compile_monitor(&spec).map_err(|e| fail(format!("{reqs_path}: {e}")))?;
    Ok((reqs, spec))
}

fn cmd_check(args: &FrontArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    match front_end(args) {
        Ok((reqs, spec)) => {
            if reqs.is_empty() {
                let _ = writeln!(err, "warning: {} contains no requirements", args.reqs.display());
            } else {
                writeln!(
                    out,
                    "ok: {} requirement(s) for component `{}`",
                    reqs.len(),
                    spec.component
                )
                .map_err(io_out)?;
            }
            Ok(())
        }
        Err(diagnostics) => {
            for d in &diagnostics {
                let _ = writeln!(err, "error: {d}");
            }
            Err(CliError::Input(format!("{} problem(s) found", diagnostics.len())))
        }
    }
}

fn cmd_formalize(
    args: &FrontArgs,
    path: Option<&Path>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<(), CliError> {
    let (_, spec) = front_end(args).map_err(|diagnostics| {
        for d in &diagnostics[1..] {
            let _ = writeln!(err, "error: {d}");
        }
        CliError::Input(diagnostics[0].clone())
    })?;
    let json = spec.to_json();
    match path {
        Some(p) => write_file(p, &json, CliError::Input),
        None => out.write_all(json.as_bytes()).map_err(io_out),
    }
}

fn load_spec(path: &Path) -> Result<ComponentSpec, CliError> {
    let src = read(path, CliError::Input)?;
    ComponentSpec::from_json(&src).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn compile(spec: &ComponentSpec) -> Result<MonitorSpec, CliError> {
    compile_monitor(spec).map_err(|e| CliError::Generation(e.to_string()))
}

/// Lowercase id with every other character replaced by `_`.
pub fn package_suffix(id: &str) -> String {
    id.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() {
                c.to_ascii_lowercase()
            } else {
                '_'
            }
        })
        .collect()
}

fn cmd_gen(args: &GenArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let gen_err = |e: &dyn std::fmt::Display| CliError::Generation(e.to_string());
    let spec = load_spec(&args.spec)?;
    let varmap_src = read(&args.varmap, CliError::Generation)?;
    let vm = load_varmap(&varmap_src)
        .map_err(|e| CliError::Generation(format!("{}: {e}", args.varmap.display())))?;
    let base = PackageName::new(&args.package).map_err(|e| gen_err(&e))?;
    let opts = COptions { float: args.c_float };

    let units: Vec<(PackageName, ComponentSpec)> = if args.split {
        let mut units: Vec<(PackageName, ComponentSpec)> = Vec::new();
        for part in spec.split() {
            let name = format!("{}_{}", base.as_str(), package_suffix(&part.requirements[0].id));
            let name = PackageName::new(&name).map_err(|e| gen_err(&e))?;
            if units.iter().any(|(n, _)| n == &name) {
                return Err(CliError::Generation(format!(
                    "two requirements map to package `{}`",
                    name.as_str()
                )));
            }
            units.push((name, part));
        }
        units
    } else {
        vec![(base, spec)]
    };

    let mut written = Vec::new();
    for (name, part) in &units {
        let m = compile(part)?;
        let plan = plan_nodes(&m, &vm, &args.prefix).map_err(|e| gen_err(&e))?;
        let pkg = gen_package(&plan, &m, name, opts);
        pkg.write_to(&args.out)
            .map_err(|e| CliError::Generation(format!("{}: {e}", args.out.display())))?;
        written.extend(pkg.files.keys().cloned());
        if let Some(path) = &args.dump_monitor {
            write_file(path, &m.to_debug_json(), CliError::Generation)?;
        }
    }
    for f in written {
        writeln!(out, "{}", args.out.join(f).display()).map_err(io_out)?;
    }
    Ok(())
}

fn cmd_simulate(args: &SimArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let spec = load_spec(&args.spec)?;
    let m = compile(&spec)?;
    let varmap_src = read(&args.varmap, CliError::Generation)?;
    let vm = load_varmap(&varmap_src)
        .map_err(|e| CliError::Generation(format!("{}: {e}", args.varmap.display())))?;
    let plan = plan_nodes(&m, &vm, &args.prefix).map_err(|e| CliError::Generation(e.to_string()))?;

    let trace_src = read(&args.trace, CliError::Simulation)?;
    let trace = ReplayTrace::parse_jsonl(&trace_src)
        .map_err(|e| CliError::Simulation(format!("{}: {e}", args.trace.display())))?;
    let sim_err = |e: reqmon_core::simbus::SimError| CliError::Simulation(e.to_string());
    let mut bus = Bus::new(BusOptions {
        coalesce_instants: !args.per_message,
    });
    let node = bus.attach_monitor(&plan, &m, args.policy).map_err(sim_err)?;
    bus.attach_logger(&plan).map_err(sim_err)?;
    let log = bus.replay(&trace).map_err(sim_err)?;
    let report = bus.report(node).expect("monitor stays attached");

    if let Some(path) = &args.log {
        write_file(path, &log.to_jsonl(), CliError::Simulation)?;
    }
    if let Some(path) = &args.steps_csv {
        let csv = step_trace_csv(&m, &report.induced_trace())
            .expect("the induced trace has a column per input");
        write_file(path, &csv, CliError::Simulation)?;
    }
    if let Some(path) = &args.fired {
        write_file(path, &fired_lines(&report.fired_steps()), CliError::Simulation)?;
    }
    for (id, count) in log.violation_counts(&[&m]) {
        writeln!(out, "{id}: {count}").map_err(io_out)?;
    }
    Ok(())
}

fn cmd_explain(path: &Path, rate: u32, out: &mut dyn Write) -> Result<(), CliError> {
    let src = read(path, CliError::Input)?;
    let reqs = parse_requirements_file(&src)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let rate = Rate::new(rate).map_err(|e| CliError::Input(e.to_string()))?;
    for (i, req) in reqs.iter().enumerate() {
        if i > 0 {
            writeln!(out).map_err(io_out)?;
        }
        let text = explain_requirement(req, rate).map_err(|e| CliError::Input(e.to_string()))?;
        out.write_all(text.as_bytes()).map_err(io_out)?;
    }
    Ok(())
}
