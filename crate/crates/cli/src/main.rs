//! `padic`: exact p-adic lattice operations and property checks from the
//! command line. Results are printed as JSON.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use padic_lattice::json::{lattice_json, matrix_json, parse_lattice, parse_matrix, parse_relation, parse_vector, relation_json};
use padic_lattice::random::RandomSpec;
use padic_lattice::relation::{graph_approx, graph_threshold};
use padic_lattice::verify::{self, Report};
use padic_lattice::{compose, Error, Lattice, PadicContext, Relation};

#[derive(Parser)]
#[command(name = "padic", version, about = "Lattices in p-adic space and the semigroup of lattice relations")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Write the JSON result to this file instead of standard output.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Read operands (a JSON array) or a check configuration from this file.
    #[arg(long, global = true, value_name = "PATH")]
    json: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct CheckArgs {
    #[arg(long, default_value_t = 2)]
    p: u64,
    #[arg(long, default_value_t = 2)]
    n: usize,
    /// Exponent bound B.
    #[arg(long, default_value_t = 3)]
    bound: u32,
    #[arg(long, default_value_t = 100)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Canonical basis of a lattice.
    Canon { lattice: Option<String> },
    /// Complex distance k(R, S).
    Dist { r: Option<String>, s: Option<String> },
    /// L + M.
    Sum { l: Option<String>, m: Option<String> },
    /// L ∩ M.
    Meet { l: Option<String>, m: Option<String> },
    /// Dual lattice.
    Dual { lattice: Option<String> },
    /// Norm exponent of a vector with respect to a lattice.
    Norm { lattice: Option<String>, vector: Option<String> },
    /// Membership of a vector in a lattice.
    Member { lattice: Option<String>, vector: Option<String> },
    /// dom, im, ker and indef of a relation.
    RelParts { relation: Option<String> },
    /// Image of a lattice under a relation.
    RelAct { relation: Option<String>, lattice: Option<String> },
    /// Product G∘H (H acts first).
    RelCompose { g: Option<String>, h: Option<String> },
    /// Structure map of a relation and the decomposition identity on dom.
    RelStructure { relation: Option<String> },
    /// Lattice relation approximating the graph of an invertible matrix.
    GraphApprox {
        matrix: Option<String>,
        /// Lattice used to compute the stabilization threshold (default O^n).
        lattice: Option<String>,
        /// Approximation index; defaults to the computed threshold.
        #[arg(long, allow_hyphen_values = true)]
        j: Option<i64>,
    },
    /// Randomized check of the compression theorem.
    CheckTheorem(#[command(flatten)] CheckArgs),
    /// Randomized checks of the supporting lemmas and semigroup laws.
    CheckLemmas(#[command(flatten)] CheckArgs),
    /// Compare lattice operations with the finite brute-force oracle.
    OracleDiff {
        #[command(flatten)]
        check: CheckArgs,
        /// Window radius a: elements live in (Z/p^2a)^n.
        #[arg(long, default_value_t = 1)]
        window: u32,
    },
}

enum Failure {
    /// A malformed or inconsistent input.
    Input { field: String, message: String },
    /// A check found violations; the report has already been printed.
    Violations,
}

impl Failure {
    fn input(field: impl Into<String>, message: impl Into<String>) -> Self {
        Failure::Input {
            field: field.into(),
            message: message.into(),
        }
    }

    fn from_error(field: &str, e: Error) -> Self {
        match e {
            Error::Parse { field: inner, message } if ["lattice", "relation", "matrix", "vector"].contains(&inner.as_str()) => {
                Failure::input(field, message)
            }
            Error::Parse { field: inner, message } => Failure::input(format!("{field}.{inner}"), message),
            Error::ContextMismatch { .. } => Failure::input(format!("{field}.p"), e.to_string()),
            other => Failure::input(field, other.to_string()),
        }
    }
}

type CliResult<T> = Result<T, Failure>;

/// Operand sources: positional arguments first, then entries of `--json`.
struct Operands {
    positional: Vec<Option<String>>,
    bundle: Option<Vec<Value>>,
}

impl Operands {
    fn new(positional: Vec<Option<String>>, json_path: Option<&Path>) -> CliResult<Self> {
        let bundle = match json_path {
            None => None,
            Some(path) => {
                let text = read(path, "json")?;
                match serde_json::from_str::<Value>(&text) {
                    Ok(Value::Array(items)) => Some(items),
                    Ok(_) => return Err(Failure::input("json", "expected an array of operands")),
                    Err(e) => return Err(Failure::input("json", e.to_string())),
                }
            }
        };
        Ok(Operands { positional, bundle })
    }

    /// Text of operand `i`, named `field` in diagnostics. A positional
    /// argument is inline JSON when it starts with `{` or `[`, a path otherwise.
    fn text(&self, i: usize, field: &str) -> CliResult<Option<String>> {
        if let Some(Some(arg)) = self.positional.get(i) {
            let trimmed = arg.trim_start();
            if trimmed.starts_with('{') || trimmed.starts_with('[') {
                return Ok(Some(arg.clone()));
            }
            return read(Path::new(arg), field).map(Some);
        }
        Ok(self.bundle.as_ref().and_then(|b| b.get(i)).map(|v| v.to_string()))
    }

    fn required(&self, i: usize, field: &str) -> CliResult<String> {
        self.text(i, field)?
            .ok_or_else(|| Failure::input(field, "missing operand"))
    }

    fn lattice(&self, i: usize, field: &str) -> CliResult<Lattice> {
        parse_lattice(&self.required(i, field)?).map_err(|e| Failure::from_error(field, e))
    }

    fn relation(&self, i: usize, field: &str) -> CliResult<Relation> {
        parse_relation(&self.required(i, field)?).map_err(|e| Failure::from_error(field, e))
    }
}

fn read(path: &Path, field: &str) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| Failure::input(field, format!("{}: {e}", path.display())))
}

fn lift<T>(field: &str, r: padic_lattice::Result<T>) -> CliResult<T> {
    r.map_err(|e| Failure::from_error(field, e))
}

fn check_spec(args: &CheckArgs, json_path: Option<&Path>) -> CliResult<RandomSpec> {
    let mut spec = RandomSpec {
        seed: args.seed,
        p: args.p,
        n: args.n,
        bound: args.bound,
        trials: args.trials,
    };
    if let Some(path) = json_path {
        let text = read(path, "json")?;
        spec = serde_json::from_str(&text).map_err(|e| Failure::input("json", e.to_string()))?;
    }
    PadicContext::new(spec.p).map_err(|e| Failure::input("p", e.to_string()))?;
    if spec.n == 0 {
        return Err(Failure::input("n", "dimension must be positive"));
    }
    Ok(spec)
}

/// Folds several reports into one `{trials, violations, first_counterexample}`.
fn aggregate(reports: &[Report]) -> Value {
    let trials: u64 = reports.iter().map(|r| r.trials).sum();
    let violations: u64 = reports.iter().map(|r| r.violations).sum();
    let first = reports
        .iter()
        .find(|r| !r.passed())
        .map(|r| json!({ "check": r.name, "instance": r.first_counterexample }));
    json!({
        "trials": trials,
        "violations": violations,
        "first_counterexample": first,
        "reports": reports,
    })
}

fn run(cli: &Cli) -> CliResult<(Value, bool)> {
    let json_path = cli.json.as_deref();
    let ops = |positional: Vec<&Option<String>>| Operands::new(positional.into_iter().cloned().collect(), json_path);
    let value = match &cli.command {
        Command::Canon { lattice } => lattice_json(&ops(vec![lattice])?.lattice(0, "lattice")?),
        Command::Dist { r, s } => {
            let o = ops(vec![r, s])?;
            let (r, s) = (o.lattice(0, "R")?, o.lattice(1, "S")?);
            json!(lift("S", r.complex_distance(&s))?)
        }
        Command::Sum { l, m } => {
            let o = ops(vec![l, m])?;
            lattice_json(&lift("M", o.lattice(0, "L")?.sum(&o.lattice(1, "M")?))?)
        }
        Command::Meet { l, m } => {
            let o = ops(vec![l, m])?;
            lattice_json(&lift("M", o.lattice(0, "L")?.meet(&o.lattice(1, "M")?))?)
        }
        Command::Dual { lattice } => lattice_json(&ops(vec![lattice])?.lattice(0, "lattice")?.dual()),
        Command::Norm { lattice, vector } | Command::Member { lattice, vector } => {
            let o = ops(vec![lattice, vector])?;
            let l = o.lattice(0, "lattice")?;
            let v = lift("vector", parse_vector(&o.required(1, "vector")?))?;
            if matches!(cli.command, Command::Norm { .. }) {
                match lift("vector", l.norm(&v))?.finite() {
                    Some(m) => json!({ "norm": m }),
                    None => json!({ "norm": "-inf" }),
                }
            } else {
                json!({ "member": lift("vector", l.member(&v))? })
            }
        }
        Command::RelParts { relation } => {
            let h = ops(vec![relation])?.relation(0, "relation")?;
            json!({
                "dom": lattice_json(&h.dom()),
                "im": lattice_json(&h.im()),
                "ker": lattice_json(&h.ker()),
                "indef": lattice_json(&h.indef()),
            })
        }
        Command::RelAct { relation, lattice } => {
            let o = ops(vec![relation, lattice])?;
            let h = o.relation(0, "relation")?;
            lattice_json(&lift("lattice", h.act(&o.lattice(1, "lattice")?))?)
        }
        Command::RelCompose { g, h } => {
            let o = ops(vec![g, h])?;
            relation_json(&lift("H", compose(&o.relation(0, "G")?, &o.relation(1, "H")?))?)
        }
        Command::RelStructure { relation } => {
            let h = ops(vec![relation])?.relation(0, "relation")?;
            let g = h.structure_map();
            json!({
                "g": matrix_json(h.ctx(), &g),
                "decomposition_holds": lift("relation", h.decomposition_identity(&h.dom()))?,
            })
        }
        Command::GraphApprox { matrix, lattice, j } => {
            let o = ops(vec![matrix, lattice])?;
            let (ctx, g) = lift("matrix", parse_matrix(&o.required(0, "matrix")?))?;
            if !g.is_square() {
                return Err(Failure::input("matrix.rows", "matrix must be square"));
            }
            let r = match o.text(1, "lattice")? {
                Some(text) => lift("lattice", parse_lattice(&text))?,
                None => Lattice::standard(ctx, g.rows()),
            };
            let threshold = lift("matrix", graph_threshold(&g, &r))?;
            let j = j.unwrap_or(threshold);
            let z = lift("matrix", graph_approx(ctx, &g, j))?;
            json!({
                "j": j,
                "threshold": threshold,
                "stabilized": j >= threshold,
                "relation": relation_json(&z),
                "action": lattice_json(&lift("lattice", z.act(&r))?),
            })
        }
        Command::CheckTheorem(args) => {
            let report = verify::check_theorem(&check_spec(args, json_path)?);
            let ok = report.passed();
            let mut value = serde_json::to_value(&report).expect("serializable");
            value["strict_compressions"] = json!(report.strict_compressions.unwrap_or(0));
            return Ok((value, ok));
        }
        Command::CheckLemmas(args) => {
            let reports = verify::check_lemmas(&check_spec(args, json_path)?);
            let ok = reports.iter().all(Report::passed);
            return Ok((aggregate(&reports), ok));
        }
        Command::OracleDiff { check, window } => {
            let spec = check_spec(check, json_path)?;
            if *window == 0 {
                return Err(Failure::input("window", "radius must be positive"));
            }
            let reports = verify::oracle_diff(&spec, *window);
            let ok = reports.iter().all(Report::passed);
            let mut value = aggregate(&reports);
            value["skipped"] = json!(reports.iter().map(|r| r.skipped).sum::<u64>());
            return Ok((value, ok));
        }
    };
    Ok((value, true))
}

fn emit(value: &Value, out: Option<&Path>) -> CliResult<()> {
    let text = serde_json::to_string_pretty(value).expect("serializable");
    match out {
        Some(path) => fs::write(path, text + "\n").map_err(|e| Failure::input("out", e.to_string())),
        None => match writeln!(io::stdout().lock(), "{text}") {
            Err(e) if e.kind() != io::ErrorKind::BrokenPipe => Err(Failure::input("out", e.to_string())),
            _ => Ok(()),
        },
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = run(&cli).and_then(|(value, ok)| {
        emit(&value, cli.out.as_deref())?;
        if ok {
            Ok(())
        } else {
            Err(Failure::Violations)
        }
    });
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Violations) => ExitCode::from(1),
        Err(Failure::Input { field, message }) => {
            eprintln!("error: invalid `{field}`: {message}");
            ExitCode::from(2)
        }
    }
}
