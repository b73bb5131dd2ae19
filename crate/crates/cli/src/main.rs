use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use binres::driver::{self, DesingReport, PipelineGoal, ResolutionTree, DEFAULT_BUDGET};
use binres::eorder::max_eord;
use binres::field::parse_q;
use binres::invariant::resolution_function;
use binres::io::emit::{json_string, tree_json};
use binres::io::{emit_tree, read_tree, Format, IdealFile};
use binres::{Chart, Error, Stratum};

#[derive(Parser)]
#[command(name = "binres", version, about = "Resolution of singularities of binomial ideals")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a pipeline (locally monomial by default) and print the tree.
    Resolve(RunArgs),
    /// Log-resolution: the total transform becomes a monomial in the exceptional divisors.
    Logres(RunArgs),
    /// Embedded desingularization of the subvariety, with its certificate.
    Desing(RunArgs),
    /// Print the resolution function at one stratum of the root chart.
    Invariant(InvariantArgs),
    /// Re-check a tree written with `--emit json`, or fresh runs on a seeded corpus.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Goal {
    Locmon,
    Logres,
    Desing,
}

#[derive(Clone, Copy, ValueEnum)]
enum Emit {
    Json,
    Dot,
    Text,
}

#[derive(Args)]
struct Common {
    /// Override the characteristic declared in the file.
    #[arg(long = "char")]
    characteristic: Option<u64>,
}

#[derive(Args)]
struct RunArgs {
    /// Ideal file.
    input: PathBuf,
    #[command(flatten)]
    common: Common,
    /// Pipeline for `resolve`; the other subcommands fix it.
    #[arg(long, value_enum)]
    goal: Option<Goal>,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    max_steps: usize,
    #[arg(long, value_enum, default_value = "text")]
    emit: Emit,
    /// Write the output here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct InvariantArgs {
    input: PathBuf,
    #[command(flatten)]
    common: Common,
    /// Comma-separated 1-based variable numbers; empty for the generic stratum.
    #[arg(long, allow_hyphen_values = true)]
    stratum: String,
    /// Control, an integer or fraction; defaults to the maximal E-order.
    #[arg(long)]
    control: Option<String>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Tree file in JSON.
    input: Option<PathBuf>,
    /// Instead of a file, resolve and verify pseudo-random ideals from this seed.
    #[arg(long, conflicts_with = "input")]
    seed: Option<u64>,
    #[arg(long, default_value_t = 20, requires = "seed")]
    count: usize,
    #[arg(long, value_enum, default_value = "locmon", requires = "seed")]
    goal: Goal,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    max_steps: usize,
}

/// A failure with its exit code.
struct Fail {
    code: u8,
    msg: String,
}

impl From<Error> for Fail {
    fn from(e: Error) -> Fail {
        let code = match e {
            Error::Input(_) | Error::Parse { .. } | Error::Precondition(_) => 2,
            Error::Budget(_) => 3,
            Error::Certification(_) | Error::Algebra(_) | Error::NoMaximalContact(_) => 1,
        };
        Fail { code, msg: e.to_string() }
    }
}

fn input_fail(msg: String) -> Fail {
    Fail { code: 2, msg }
}

fn read(path: &Path) -> Result<String, Fail> {
    fs::read_to_string(path).map_err(|e| input_fail(format!("{}: {e}", path.display())))
}

fn load(path: &Path, common: &Common) -> Result<Chart, Fail> {
    let mut file = IdealFile::parse(&read(path)?).map_err(|e| input_fail(format!("{}: {e}", path.display())))?;
    if let Some(p) = common.characteristic {
        binres::field::check_char(p)?;
        file.characteristic = p;
    }
    file.chart().map_err(|e| input_fail(format!("{}: {e}", path.display())))
}

fn write_out(out: &Option<PathBuf>, text: &str) -> Result<(), Fail> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| input_fail(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn render(tree: &ResolutionTree, emit: Emit, report: Option<&DesingReport>, error: Option<&Error>) -> String {
    match emit {
        Emit::Json => {
            let mut doc = tree_json(tree);
            if let Some(r) = report {
                doc["certificate"] = serde_json::to_value(r).expect("report serializes");
            }
            if let Some(e) = error {
                doc["meta"]["error"] = serde_json::Value::String(e.to_string());
            }
            json_string(&doc)
        }
        Emit::Dot => emit_tree(tree, Format::Dot),
        Emit::Text => {
            let mut s = emit_tree(tree, Format::Text);
            if let Some(r) = report {
                for c in &r.centers {
                    let on = if c.contained { "on" } else { "off" };
                    s.push_str(&format!("center at node {} ({on} the subvariety): {:?}\n", c.node, c.verdict));
                }
                for l in &r.leaves {
                    s.push_str(&format!("leaf {}: codims {:?} verdicts {:?}\n", l.node, l.codims, l.verdicts));
                }
            }
            s
        }
    }
}

fn run(args: &RunArgs, goal: PipelineGoal) -> Result<(), Fail> {
    if args.max_steps == 0 {
        return Err(input_fail("--max-steps must be positive".into()));
    }
    let chart = load(&args.input, &args.common)?;
    let outcome = match goal {
        PipelineGoal::Desingularization => {
            driver::embedded_desingularize(&chart, args.max_steps).map(|(t, r)| (t, Some(r)))
        }
        g => driver::resolve(&chart, g, args.max_steps).map(|t| (t, None)),
    };
    match outcome {
        Ok((tree, report)) => write_out(&args.out, &render(&tree, args.emit, report.as_ref(), None)),
        Err(f) => {
            if !f.tree.nodes.is_empty() {
                write_out(&args.out, &render(&f.tree, args.emit, None, Some(&f.error)))?;
            }
            Err(f.error.into())
        }
    }
}

fn parse_stratum(s: &str, dim: usize) -> Result<Stratum, Fail> {
    let mut idx = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let i: usize = part.parse().map_err(|_| input_fail(format!("bad variable number {part:?} in --stratum")))?;
        if i == 0 || i > dim {
            return Err(input_fail(format!("variable number {i} out of range 1..={dim}")));
        }
        idx.push(i - 1);
    }
    Ok(Stratum::from_indices(idx))
}

fn invariant(args: &InvariantArgs) -> Result<(), Fail> {
    let chart = load(&args.input, &args.common)?.detect_hyperbolic_and_relabel()?;
    let lam = parse_stratum(&args.stratum, chart.dim())?;
    if !lam.is_subset(chart.x_vars()) {
        return Err(input_fail(format!("stratum {lam} involves invertible variables")));
    }
    let c = match &args.control {
        Some(s) => parse_q(s).ok_or_else(|| input_fail(format!("bad control {s:?}")))?,
        None => max_eord(&chart)?,
    };
    println!("{}", resolution_function(&chart, lam, &c)?);
    Ok(())
}

fn verify(args: &VerifyArgs) -> Result<(), Fail> {
    let mut problems = Vec::new();
    if let Some(path) = &args.input {
        let (tree, mut p) = read_tree(&read(path)?).map_err(|e| input_fail(format!("{}: {e}", path.display())))?;
        let rep = driver::verify(&tree);
        p.extend(rep.problems);
        println!("{}: {} nodes, {} blow-ups", path.display(), rep.nodes, rep.blowups);
        problems = p;
    } else if let Some(seed) = args.seed {
        let goal = pipeline(args.goal);
        for (k, chart) in binres::corpus::corpus(seed, args.count).iter().enumerate() {
            let tree = match goal {
                PipelineGoal::Desingularization => driver::embedded_desingularize(chart, args.max_steps).map(|r| r.0),
                g => driver::resolve(chart, g, args.max_steps),
            };
            match tree {
                Ok(t) => {
                    let rep = driver::verify(&t);
                    println!("ideal {k}: {} nodes, {} steps, {} problems", rep.nodes, t.steps, rep.problems.len());
                    problems.extend(rep.problems.into_iter().map(|m| format!("ideal {k}: {m}")));
                }
                Err(f) => {
                    println!("ideal {k}: {}", f.error);
                    problems.push(format!("ideal {k}: {}", f.error));
                }
            }
        }
    } else {
        return Err(input_fail("verify needs a tree file or --seed".into()));
    }
    if problems.is_empty() {
        println!("ok");
        return Ok(());
    }
    for p in &problems {
        println!("mismatch: {p}");
    }
    Err(Fail { code: 1, msg: format!("{} problems found", problems.len()) })
}

fn pipeline(g: Goal) -> PipelineGoal {
    match g {
        Goal::Locmon => PipelineGoal::LocallyMonomial,
        Goal::Logres => PipelineGoal::LogResolution,
        Goal::Desing => PipelineGoal::Desingularization,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let result = match &cli.cmd {
        Cmd::Resolve(a) => run(a, pipeline(a.goal.unwrap_or(Goal::Locmon))),
        Cmd::Logres(a) => run(a, PipelineGoal::LogResolution),
        Cmd::Desing(a) => run(a, PipelineGoal::Desingularization),
        Cmd::Invariant(a) => invariant(a),
        Cmd::Verify(a) => verify(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("binres: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
