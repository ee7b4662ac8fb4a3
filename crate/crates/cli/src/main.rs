//! Command-line front end: parse instance files, dispatch to the norm
//! formulas, tail diagnostics, isometry checks, brute-force oracle, and the
//! packaged example configurations, and emit JSON (or tables with
//! `--pretty`).
//!
//! Exit codes: 0 success, 2 validation error, 3 internal invariant
//! violation.

use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use tree_hardy::criteria::{self, NormReport};
use tree_hardy::error::Error as CoreError;
use tree_hardy::json::{instance_to_spec, FunctionSpec, InstanceSpec, TreeSpec};
use tree_hardy::operators::OperatorInstance;
use tree_hardy::oracle::{oracle_opnorm, OracleStrategy};
use tree_hardy::spaces::{self, Exponent};
use tree_hardy::tree::TruncatedTree;
use tree_hardy::{examples, rel_close};

const DEFAULT_MAX_VERTICES: usize = 100_000;
const EXAMPLE_EXPONENT: f64 = 2.0;

#[derive(Parser)]
#[command(name = "tree-hardy", version, about = "Operator diagnostics on truncated rooted trees")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Instance file (JSON)
    #[arg(long, global = true)]
    input: Option<PathBuf>,

    /// Comparison tolerance; overrides the instance file's `tol`
    #[arg(long, global = true)]
    tol: Option<f64>,

    /// Human-readable tables instead of JSON
    #[arg(long, global = true)]
    pretty: bool,

    /// Seed for randomized commands (required by them)
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Restart budget for the random-ascent oracle
    #[arg(long, global = true, default_value_t = 1000)]
    budget: usize,

    /// Oracle strategy
    #[arg(long, global = true, value_enum, default_value_t = StrategyArg::Concentration)]
    strategy: StrategyArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    #[value(name = "concentration")]
    Concentration,
    #[value(name = "random_ascent", alias = "random-ascent")]
    RandomAscent,
}

#[derive(Subcommand)]
enum Command {
    /// Norm of a function under the instance's (sigma1, p)
    Norm {
        /// Function JSON: inline object or a path to a file
        #[arg(long)]
        function: String,
    },
    /// Every operator-norm report applicable to the instance's exponents
    Opnorm,
    /// One tail diagnostic sequence with its verdict
    Tail {
        /// inf_inf | p_inf | inf_p | pp_sufficient | pp_necessary | mult
        criterion: String,
    },
    /// Isometry check (p = q = inf) or refutation (finite p, target inf)
    Isometry,
    /// Brute-force operator-norm estimate over the unit ball
    Oracle,
    /// Run one packaged example configuration on a homogeneous tree
    Example {
        id: u32,
        #[arg(long, default_value_t = 3)]
        depth: usize,
        #[arg(long, default_value_t = 2)]
        arity: usize,
    },
}

enum CliError {
    Validation(String),
    Internal(String),
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        CliError::Validation(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| run(&cli)));
    let (value, code) = match outcome {
        Ok(Ok(value)) => (value, ExitCode::SUCCESS),
        Ok(Err(CliError::Validation(message))) => (
            json!({"error": {"kind": "validation", "message": message}}),
            ExitCode::from(2),
        ),
        Ok(Err(CliError::Internal(message))) => (
            json!({"error": {"kind": "internal", "message": message}}),
            ExitCode::from(3),
        ),
        Err(panic) => {
            let message = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            (
                json!({"error": {"kind": "internal", "message": message}}),
                ExitCode::from(3),
            )
        }
    };
    let text = if cli.pretty {
        render_pretty(&value)
    } else {
        serde_json::to_string(&value).expect("serializable")
    };
    // tolerate a downstream reader that stopped consuming
    use std::io::Write;
    let _ = writeln!(std::io::stdout(), "{text}");
    code
}

fn run(cli: &Cli) -> Result<Value, CliError> {
    match &cli.command {
        Command::Norm { function } => cmd_norm(cli, function),
        Command::Opnorm => cmd_opnorm(cli),
        Command::Tail { criterion } => cmd_tail(cli, criterion),
        Command::Isometry => cmd_isometry(cli),
        Command::Oracle => cmd_oracle(cli),
        Command::Example { id, depth, arity } => cmd_example(cli, *id, *depth, *arity),
    }
}

fn max_vertices() -> Result<usize, CliError> {
    match std::env::var("TREE_HARDY_MAX_VERTICES") {
        Ok(raw) => raw.parse().map_err(|_| {
            CliError::Validation(format!(
                "TREE_HARDY_MAX_VERTICES must be a nonnegative integer, got {raw:?}"
            ))
        }),
        Err(_) => Ok(DEFAULT_MAX_VERTICES),
    }
}

fn load_instance(cli: &Cli) -> Result<(InstanceSpec, OperatorInstance, f64), CliError> {
    let path = cli
        .input
        .as_ref()
        .ok_or_else(|| CliError::Validation("--input FILE is required".into()))?;
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Validation(format!("cannot read {}: {e}", path.display())))?;
    let spec: InstanceSpec = serde_json::from_str(&text)
        .map_err(|e| CliError::Validation(format!("invalid instance file: {e}")))?;
    let inst = spec.build(max_vertices()?)?;
    if let Some(warning) = inst.tree.growth_warning() {
        eprintln!("warning: {warning}");
    }
    let tol = match cli.tol {
        Some(t) if t.is_finite() && t >= 0.0 => t,
        Some(t) => {
            return Err(CliError::Validation(format!(
                "--tol must be a nonnegative number, got {t}"
            )))
        }
        None => spec.tol,
    };
    Ok((spec, inst, tol))
}

fn parse_function(raw: &str, inst: &OperatorInstance) -> Result<spaces::TreeFunction, CliError> {
    let text = if raw.trim_start().starts_with('{') {
        raw.to_string()
    } else {
        std::fs::read_to_string(raw)
            .map_err(|e| CliError::Validation(format!("cannot read function file {raw}: {e}")))?
    };
    let spec: FunctionSpec = serde_json::from_str(&text)
        .map_err(|e| CliError::Validation(format!("invalid function JSON: {e}")))?;
    Ok(spec.build(&inst.tree)?)
}

fn cmd_norm(cli: &Cli, function: &str) -> Result<Value, CliError> {
    let (_, inst, _) = load_instance(cli)?;
    let f = parse_function(function, &inst)?;
    let value = spaces::norm(&inst.tree, &inst.sigma1, inst.p, &f);
    let per_level: Vec<f64> = match inst.p {
        Exponent::Finite(p) => (0..=inst.tree.depth())
            .map(|n| spaces::level_mean(&inst.tree, &inst.sigma1, p, n, &f))
            .collect::<Result<_, _>>()?,
        Exponent::Infinity => (0..=inst.tree.depth())
            .map(|n| {
                Ok(inst
                    .tree
                    .level(n)?
                    .map(|v| {
                        let v = tree_hardy::tree::VertexId(v);
                        (inst.sigma1.at(v) * f.evaluate(v)).abs()
                    })
                    .fold(0.0, f64::max))
            })
            .collect::<Result<_, CoreError>>()?,
    };
    Ok(json!({"norm": value, "per_level_means": per_level}))
}

fn cmd_opnorm(cli: &Cli) -> Result<Value, CliError> {
    let (_, inst, _) = load_instance(cli)?;
    let mut reports: Vec<NormReport> = Vec::new();
    match (inst.p, inst.q) {
        (Exponent::Infinity, _) => {
            reports.push(criteria::opnorm_inf_to_p(&inst)?);
            if inst.q == Exponent::Infinity && inst.phi.is_identity() {
                reports.push(criteria::opnorm_mult_pp(&inst)?);
            }
        }
        (Exponent::Finite(_), Exponent::Infinity) => {
            reports.push(criteria::opnorm_p_to_inf(&inst)?);
        }
        (Exponent::Finite(p), Exponent::Finite(q)) if p == q => {
            reports.push(criteria::opnorm_pp_lower(&inst)?);
            reports.push(criteria::opnorm_pp_exact(&inst)?);
            reports.push(criteria::opnorm_pp_upper(&inst)?);
            reports.push(criteria::opnorm_pp_nmn_bound(&inst)?);
            let unit_weights = inst.sigma1.values().iter().all(|&v| v == 1.0)
                && inst.sigma2.values().iter().all(|&v| v == 1.0);
            if unit_weights && inst.psi.values().iter().all(|&v| v == 1.0) {
                reports.push(criteria::opnorm_composition_pp(&inst)?);
            }
            if inst.phi.is_identity() {
                reports.push(criteria::opnorm_mult_pp(&inst)?);
            }
        }
        (Exponent::Finite(p), Exponent::Finite(q)) => {
            return Err(CliError::Validation(format!(
                "no operator-norm results apply to finite p = {p} ≠ q = {q}"
            )));
        }
    }
    Ok(json!({ "reports": reports }))
}

fn cmd_tail(cli: &Cli, criterion: &str) -> Result<Value, CliError> {
    let (_, inst, tol) = load_instance(cli)?;
    let criterion = criteria::TailCriterion::parse(criterion)?;
    let seq = criteria::tail(&inst, criterion, tol)?;
    Ok(json!({
        "criterion_id": seq.criterion_id,
        "tail": seq.values,
        "verdict": seq.verdict,
    }))
}

fn cmd_isometry(cli: &Cli) -> Result<Value, CliError> {
    let (_, inst, tol) = load_instance(cli)?;
    match (inst.p, inst.q) {
        (Exponent::Infinity, Exponent::Infinity) => {
            let verdict = criteria::isometry_inf_inf_check(&inst, tol)?;
            Ok(serde_json::to_value(&verdict).expect("serializable"))
        }
        (Exponent::Finite(_), Exponent::Infinity) => {
            let refutation = criteria::isometry_p_inf_refuter(&inst)?;
            let gap = (refutation.domain_norm - refutation.image_norm).abs();
            Ok(json!({
                "verdict": "refuted",
                "witness": FunctionSpec::Explicit { values: refutation.witness.values().to_vec() },
                "domain_norm": refutation.domain_norm,
                "image_norm": refutation.image_norm,
                "gap": gap,
            }))
        }
        (p, q) => Err(CliError::Validation(format!(
            "no isometry result applies to exponents p = {p}, q = {q}"
        ))),
    }
}

fn cmd_oracle(cli: &Cli) -> Result<Value, CliError> {
    let (_, inst, _) = load_instance(cli)?;
    let (strategy, seed) = match cli.strategy {
        StrategyArg::Concentration => (OracleStrategy::Concentration, 0),
        StrategyArg::RandomAscent => {
            let seed = cli.seed.ok_or_else(|| {
                CliError::Validation("--seed is required for the random_ascent strategy".into())
            })?;
            (OracleStrategy::RandomAscent, seed)
        }
    };
    let result = oracle_opnorm(&inst, strategy, cli.budget, seed)?;

    // the reported value must be attained by a feasible function
    let feasibility = spaces::norm(&inst.tree, &inst.sigma1, inst.p, &result.extremal);
    let attained = spaces::norm(
        &inst.tree,
        &inst.sigma2,
        inst.q,
        &tree_hardy::operators::apply(&inst, &result.extremal),
    );
    if feasibility > 1.0 + 1e-12 || !rel_close(attained, result.value, 1e-12) {
        return Err(CliError::Internal(format!(
            "oracle extremal violates its contract: ball norm {feasibility}, attained {attained}, reported {}",
            result.value
        )));
    }

    Ok(json!({
        "value": result.value,
        "strategy": result.strategy,
        "iterations": result.iterations,
        "extremal": FunctionSpec::Explicit { values: result.extremal.values().to_vec() },
    }))
}

fn cmd_example(cli: &Cli, id: u32, depth: usize, arity: usize) -> Result<Value, CliError> {
    let tree = Arc::new(TruncatedTree::build_homogeneous(arity, depth)?);
    if tree.vertex_count() > max_vertices()? {
        return Err(CliError::Validation(format!(
            "tree has {} vertices, exceeding the cap",
            tree.vertex_count()
        )));
    }
    let tol = match cli.tol {
        Some(t) if t.is_finite() && t >= 0.0 => t,
        Some(t) => {
            return Err(CliError::Validation(format!(
                "--tol must be a nonnegative number, got {t}"
            )))
        }
        None => 1e-9,
    };
    let case = examples::example(id, &tree, EXAMPLE_EXPONENT, tol)?;
    let spec = instance_to_spec(&case.instance, TreeSpec::Homogeneous { arity, depth });
    let warnings: Vec<&str> = case.warning.as_deref().into_iter().collect();
    Ok(json!({
        "instance": spec,
        "assertions": case.assertions,
        "warnings": warnings,
    }))
}

fn render_pretty(value: &Value) -> String {
    use std::fmt::Write;
    let mut out = String::new();
    if let Some(error) = value.get("error") {
        let _ = write!(
            out,
            "error ({}): {}",
            error["kind"].as_str().unwrap_or("?"),
            error["message"].as_str().unwrap_or("?")
        );
        return out;
    }
    if let Some(reports) = value.get("reports").and_then(Value::as_array) {
        let _ = write!(out, "{:<34} {:<12} value", "formula", "kind");
        for r in reports {
            let _ = write!(
                out,
                "\n{:<34} {:<12} {}",
                r["formula_id"].as_str().unwrap_or("?"),
                r["kind"].as_str().unwrap_or("?"),
                r["value"]
            );
        }
        return out;
    }
    if let Some(tail) = value.get("tail").and_then(Value::as_array) {
        let _ = write!(
            out,
            "tail diagnostic {} (verdict {})",
            value["criterion_id"].as_str().unwrap_or("?"),
            value["verdict"].as_str().unwrap_or("?")
        );
        for (m, v) in tail.iter().enumerate() {
            let _ = write!(out, "\n  m = {m:<3} {v}");
        }
        return out;
    }
    if let Some(assertions) = value.get("assertions").and_then(Value::as_array) {
        let _ = write!(out, "{:<44} {:<6} lhs vs rhs", "assertion", "pass");
        for a in assertions {
            let _ = write!(
                out,
                "\n{:<44} {:<6} {} vs {}",
                a["name"].as_str().unwrap_or("?"),
                a["pass"],
                a["lhs"],
                a["rhs"]
            );
        }
        if let Some(warnings) = value.get("warnings").and_then(Value::as_array) {
            for w in warnings {
                let _ = write!(out, "\nwarning: {}", w.as_str().unwrap_or("?"));
            }
        }
        return out;
    }
    serde_json::to_string_pretty(value).unwrap_or_else(|_| value.to_string())
}
