//! `warrant`: warranted-enclosure analysis from the command line.
//!
//! Every command prints one JSON document on stdout. Exit codes: 0 success or
//! decided, 2 unreadable or unparsable input, 3 undetermined classification,
//! 4 sampling budget exceeded (partial output is still printed).

mod report;

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use warrant_core::audit::{check_classification, check_enclosure, check_witness, AuditError};
use warrant_core::blind::ComparisonReport;
use warrant_core::enclosure::EnvGrid;
use warrant_core::{
    blind_compare, classify, enclosure, eval, forget_tokens, parse, to_affine, token_consistent,
    under_approx_samples, Dim, EnclosureOutcome, Expr, Family, FamilySpec, Interval, Mode, Rational,
    RewriteClass, Sample, SampleConfig, TokenEnv,
};

use report::*;

const EXIT_INPUT: u8 = 2;
const EXIT_UNDETERMINED: u8 = 3;
const EXIT_BUDGET: u8 = 4;
const EXIT_AUDIT: u8 = 70;

#[derive(Parser)]
#[command(name = "warrant", version, about = "Token-sensitive enclosures and rewrite classes")]
struct Cli {
    #[command(flatten)]
    opts: Opts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Opts {
    /// Sample points per token on the non-affine path, endpoints included.
    #[arg(long, global = true, default_value_t = warrant_core::enclosure::DEFAULT_GRID)]
    grid: usize,
    /// Maximum number of sampled environments.
    #[arg(long, global = true, default_value_t = warrant_core::enclosure::DEFAULT_BUDGET)]
    budget: usize,
    /// Single-line JSON output (default).
    #[arg(long, global = true, conflicts_with = "pretty")]
    json: bool,
    /// Indented JSON output.
    #[arg(long, global = true)]
    pretty: bool,
    /// Warn on stderr when dimension tags disagree.
    #[arg(long, global = true)]
    dim_lint: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate an expression in an environment.
    Eval { expr: PathBuf, env: PathBuf },
    /// Report the warranted enclosure of an expression.
    Enclosure { expr: PathBuf },
    /// Classify the rewrite from SRC to TGT.
    Classify { src: PathBuf, tgt: PathBuf },
    /// Compare two expressions after erasing tokens.
    Blind {
        left: PathBuf,
        right: PathBuf,
        target: Option<PathBuf>,
    },
    /// Build and classify one instance of a rewrite family.
    Demo(DemoArgs),
    /// Dump every sampled environment and its value.
    Oracle { expr: PathBuf },
}

#[derive(Args)]
struct DemoArgs {
    /// cancellation, background or division
    #[arg(long)]
    family: String,
    /// same or distinct
    #[arg(long)]
    mode: String,
    /// Measured interval, or the background interval for `background`. `[lo,hi]` or `lo,hi`.
    #[arg(long, allow_hyphen_values = true)]
    interval: String,
    /// Signal interval for `background`.
    #[arg(long, allow_hyphen_values = true)]
    signal: Option<String>,
    #[arg(long, default_value = "d")]
    dim: String,
}

/// A failure that ends the command with a fixed exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Failure {
        Failure {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }
}

impl From<AuditError> for Failure {
    fn from(e: AuditError) -> Failure {
        Failure {
            code: EXIT_AUDIT,
            message: format!("self-audit failed: {e}"),
        }
    }
}

struct Outcome {
    text: String,
    code: u8,
}

fn outcome(report: impl Serialize, code: u8, opts: &Opts) -> Result<Outcome, Failure> {
    let text = if opts.pretty {
        serde_json::to_string_pretty(&report)
    } else {
        serde_json::to_string(&report)
    };
    let text = text.map_err(|e| Failure {
        code: EXIT_AUDIT,
        message: e.to_string(),
    })?;
    Ok(Outcome { text, code })
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn load_expr(path: &Path) -> Result<Expr, Failure> {
    parse(&read(path)?).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn lint(enabled: bool, exprs: &[&Expr]) {
    if !enabled {
        return;
    }
    let dims: BTreeSet<Dim> = exprs.iter().flat_map(|e| e.dims()).collect();
    if dims.len() > 1 {
        let tags: Vec<&str> = dims.iter().map(Dim::tag).collect();
        eprintln!("warning: mixed dimension tags: {}", tags.join(", "));
    }
}

fn cmd_eval(expr: &Path, env: &Path, opts: &Opts) -> Result<Outcome, Failure> {
    let e = load_expr(expr)?;
    let sigma = TokenEnv::parse(&read(env)?).map_err(|err| Failure::input(format!("{}: {err}", env.display())))?;
    lint(opts.dim_lint, &[&e]);
    let (effective_intervals, infeasible_token) = match e.effective_intervals() {
        Ok(boxes) => (Some(boxes), None),
        Err(bad) => (None, Some(bad.0)),
    };
    outcome(
        EvalReport {
            command: "eval",
            expr: e.to_string(),
            value: eval(&sigma, &e),
            consistent: token_consistent(&sigma, &e),
            env: sigma,
            effective_intervals,
            infeasible_token,
        },
        0,
        opts,
    )
}

fn sample(env: TokenEnv, e: &Expr) -> Sample {
    Sample {
        value: eval(&env, e),
        env,
    }
}

fn cmd_enclosure(expr: &Path, cfg: &SampleConfig, opts: &Opts) -> Result<Outcome, Failure> {
    let e = load_expr(expr)?;
    lint(opts.dim_lint, &[&e]);
    let outcome_ = enclosure(&e, cfg);
    check_enclosure(&e, &outcome_)?;
    let mut budget_exceeded = None;
    let witnesses = match &outcome_ {
        EnclosureOutcome::EmptySet => Vec::new(),
        EnclosureOutcome::ExactInterval(_) => {
            let form = to_affine(&e).expect("exact enclosures come from affine forms");
            let mut ends = vec![sample(form.corner(false), &e)];
            if !form.range().is_point() {
                ends.push(sample(form.corner(true), &e));
            }
            ends
        }
        EnclosureOutcome::Unknown { under, .. } => {
            if let Err(over) = under_approx_samples(&e, cfg) {
                budget_exceeded = Some(Overflow {
                    required: over.required,
                    budget: over.budget,
                });
            }
            under.clone()
        }
    };
    for w in &witnesses {
        check_witness(&e, &w.env, &w.value)?;
    }
    let code = if budget_exceeded.is_some() { EXIT_BUDGET } else { 0 };
    outcome(
        EnclosureReport {
            command: "enclosure",
            expr: e.to_string(),
            grid: cfg.grid,
            budget: cfg.budget,
            enclosure: outcome_,
            witnesses,
            budget_exceeded,
        },
        code,
        opts,
    )
}

fn class_code(class: RewriteClass) -> u8 {
    if class.is_decided() {
        0
    } else {
        EXIT_UNDETERMINED
    }
}

fn cmd_classify(src: &Path, tgt: &Path, cfg: &SampleConfig, opts: &Opts) -> Result<Outcome, Failure> {
    let (s, t) = (load_expr(src)?, load_expr(tgt)?);
    lint(opts.dim_lint, &[&s, &t]);
    let classification = classify(&s, &t, cfg);
    check_classification(&s, &t, &classification)?;
    let code = class_code(classification.class);
    outcome(
        ClassifyReport {
            command: "classify",
            source: s.to_string(),
            target: t.to_string(),
            classification,
        },
        code,
        opts,
    )
}

fn audit_comparison(left: &Expr, right: &Expr, target: Option<&Expr>, r: &ComparisonReport) -> Result<(), AuditError> {
    use warrant_core::blind::ClassComparison;
    match (&r.classes, target) {
        (ClassComparison::AgainstTarget { left: l, right: rr }, Some(t)) => {
            check_classification(left, t, l)?;
            check_classification(right, t, rr)
        }
        (ClassComparison::Mutual { classification }, None) => check_classification(left, right, classification),
        _ => unreachable!("comparison mode follows the target argument"),
    }
}

fn cmd_blind(left: &Path, right: &Path, target: Option<&Path>, cfg: &SampleConfig, opts: &Opts) -> Result<Outcome, Failure> {
    let (l, r) = (load_expr(left)?, load_expr(right)?);
    let t = target.map(load_expr).transpose()?;
    let mut all = vec![&l, &r];
    all.extend(t.as_ref());
    lint(opts.dim_lint, &all);
    let blind = blind_compare(&l, &r, t.as_ref(), cfg);
    audit_comparison(&l, &r, t.as_ref(), &blind)?;
    outcome(
        BlindReport {
            command: "blind",
            left: l.to_string(),
            right: r.to_string(),
            target: t.as_ref().map(Expr::to_string),
            left_erased: forget_tokens(&l).to_string(),
            right_erased: forget_tokens(&r).to_string(),
            blind,
        },
        0,
        opts,
    )
}

fn parse_interval(text: &str) -> Result<Interval, Failure> {
    let inner = text.trim();
    let inner = inner
        .strip_prefix('[')
        .and_then(|s| s.strip_suffix(']'))
        .unwrap_or(inner);
    let bad = || Failure::input(format!("invalid interval `{text}`, expected [lo,hi]"));
    let (lo, hi) = inner.split_once(',').ok_or_else(bad)?;
    let lo: Rational = lo.trim().parse().map_err(|_| bad())?;
    let hi: Rational = hi.trim().parse().map_err(|_| bad())?;
    Interval::new(lo, hi).map_err(|e| Failure::input(e.to_string()))
}

fn cmd_demo(args: &DemoArgs, cfg: &SampleConfig, opts: &Opts) -> Result<Outcome, Failure> {
    let spec = FamilySpec {
        family: args.family.parse::<Family>().map_err(|e| Failure::input(e.to_string()))?,
        mode: args.mode.parse::<Mode>().map_err(|e| Failure::input(e.to_string()))?,
        interval: parse_interval(&args.interval)?,
        signal: args.signal.as_deref().map(parse_interval).transpose()?,
        dim: Dim::new(&args.dim),
    };
    let (source, target) = spec.pair().map_err(|e| Failure::input(e.to_string()))?;
    let (other, _) = spec.counterpart().pair().map_err(|e| Failure::input(e.to_string()))?;
    lint(opts.dim_lint, &[&source, &target]);
    let classification = classify(&source, &target, cfg);
    check_classification(&source, &target, &classification)?;
    let blind = blind_compare(&source, &other, Some(&target), cfg);
    audit_comparison(&source, &other, Some(&target), &blind)?;
    let expected = spec.expected();
    let computed = classification.class;
    outcome(
        DemoReport {
            command: "demo",
            family: spec.family.to_string(),
            mode: spec.mode.to_string(),
            source: source.to_string(),
            target: target.to_string(),
            counterpart: other.to_string(),
            expected,
            computed,
            matches: expected == computed,
            classification,
            blind,
        },
        class_code(computed),
        opts,
    )
}

fn cmd_oracle(expr: &Path, cfg: &SampleConfig, opts: &Opts) -> Result<Outcome, Failure> {
    let e = load_expr(expr)?;
    lint(opts.dim_lint, &[&e]);
    let required = match e.effective_intervals() {
        Ok(boxes) => EnvGrid::new(&boxes, cfg.grid).size(),
        Err(_) => 0,
    };
    let (rows, complete) = match under_approx_samples(&e, cfg) {
        Ok(rows) => (rows, true),
        Err(over) => (over.partial, false),
    };
    for row in &rows {
        check_witness(&e, &row.env, &row.value)?;
    }
    outcome(
        OracleReport {
            command: "oracle",
            expr: e.to_string(),
            grid: cfg.grid,
            budget: cfg.budget,
            required,
            complete,
            rows,
        },
        if complete { 0 } else { EXIT_BUDGET },
        opts,
    )
}

fn run(cli: &Cli) -> Result<Outcome, Failure> {
    let opts = &cli.opts;
    let cfg = SampleConfig::new(opts.grid, opts.budget).map_err(|e| Failure::input(e.to_string()))?;
    match &cli.command {
        Command::Eval { expr, env } => cmd_eval(expr, env, opts),
        Command::Enclosure { expr } => cmd_enclosure(expr, &cfg, opts),
        Command::Classify { src, tgt } => cmd_classify(src, tgt, &cfg, opts),
        Command::Blind { left, right, target } => cmd_blind(left, right, target.as_deref(), &cfg, opts),
        Command::Demo(args) => cmd_demo(args, &cfg, opts),
        Command::Oracle { expr } => cmd_oracle(expr, &cfg, opts),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            println!("{}", out.text);
            ExitCode::from(out.code)
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
