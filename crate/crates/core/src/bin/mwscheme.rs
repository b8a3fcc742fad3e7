use std::fmt::Write as _;
use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use mwscheme::builtins::builtin;
use mwscheme::equilibrium::{pure_nash, CertifiedProfile, EquilibriumCertificate};
use mwscheme::eval::DEFAULT_PROFILE_BUDGET;
use mwscheme::extensive::{backward_induction, make_centipede_scheme, normal_representation, verify_centipede_equilibrium};
use mwscheme::game::{format_number, unflatten};
use mwscheme::io::{describe_parse_error, load_source, mixed_from_json, scheme_to_json, Source};
use mwscheme::oracle::{compare_paths, dense_payoff_mixed, DENSE_DIMENSION_LIMIT};
use mwscheme::profile::{format_profile, parse_profile};
use mwscheme::{induced_game_with_budget, Error, Evaluator, NormalFormGame, SchemeSpec, DEFAULT_EPSILON};

const PROFILE_HELP: &str = "\
Profiles are written `<control digits>;<operators>`: one projector digit per
player, then one operator per operation slot in slot order. Operators are
`I` (identity), `X` (shift by one) and `Sk` (shift by k, for qudits).
Example: `100;I,I,X`.

Exit codes: 0 success, 2 malformed input, 3 validation failure,
4 enumeration budget exceeded, 1 anything else.";

#[derive(Parser)]
#[command(name = "mwscheme", version, about = "Quantum game schemes with selectable initial states", after_help = PROFILE_HELP)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[arg(long, value_enum, global = true, default_value_t = Format::Table)]
    format: Format,
    /// Cross-check payoffs against the dense matrix implementation.
    #[arg(long, global = true)]
    verify: bool,
    /// Maximum number of pure profiles to enumerate.
    #[arg(long, global = true, default_value_t = DEFAULT_PROFILE_BUDGET)]
    budget: u128,
    /// Tolerance for equilibrium comparisons, in (0, 1e-3].
    #[arg(long, global = true, default_value_t = DEFAULT_EPSILON)]
    epsilon: f64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Args)]
struct InputArgs {
    /// Scheme, game tree or normal-form game JSON; `-` reads stdin.
    input: Option<PathBuf>,
    /// Use a built-in example instead of a file (pd3, pd3-classical,
    /// centipede4, centipede4-classical, centipede<n>-quantum, centipede<n>-classical).
    #[arg(long, conflicts_with = "input")]
    builtin: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Check a document and list every invariant violation.
    Validate(InputArgs),
    /// Payoffs of one pure or mixed profile.
    Eval {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, conflicts_with = "mixed", required_unless_present = "mixed")]
        profile: Option<String>,
        /// Mixed profile JSON, inline or a file path.
        #[arg(long)]
        mixed: Option<String>,
    },
    /// The induced normal-form game.
    Table {
        #[command(flatten)]
        input: InputArgs,
        /// Label strategies by digit code (`100`) instead of operator form.
        #[arg(long)]
        compact: bool,
    },
    /// Pure Nash equilibria of the induced game.
    Nash {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        compact: bool,
    },
    /// Build the n-stage quantum centipede and certify its designated profile.
    Centipede {
        n: usize,
        /// Where to write the scheme JSON (`-` for stdout, which sends the report to stderr).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            e if e.is_parse() => 2,
            Error::BudgetExceeded { .. } => 4,
            Error::DimensionTooLarge { .. } => 1,
            _ => 3,
        };
        Failure {
            code,
            message: describe_parse_error(&e),
        }
    }
}

fn fail(code: u8, message: impl Into<String>) -> Failure {
    Failure {
        code,
        message: message.into(),
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: &Cli) -> CliResult<String> {
    if !(cli.epsilon > 0.0 && cli.epsilon <= 1e-3) {
        return Err(fail(2, format!("--epsilon must lie in (0, 1e-3], got {}", cli.epsilon)));
    }
    if cli.budget < 1 {
        return Err(fail(2, "--budget must be at least 1"));
    }
    match &cli.command {
        Command::Validate(input) => validate(&load(input)?),
        Command::Eval {
            input,
            profile,
            mixed,
        } => {
            let spec = require_scheme(load(input)?)?;
            match (profile, mixed) {
                (Some(p), _) => eval_pure(cli, &spec, p),
                (None, Some(m)) => eval_mixed(cli, &spec, m),
                (None, None) => Err(fail(2, "eval needs --profile or --mixed")),
            }
        }
        Command::Table { input, compact } => {
            let source = load(input)?;
            let (game, labels) = game_of(cli, &source, *compact)?;
            let mut out = match cli.format {
                Format::Json => relabel(&game, &labels).to_json()? + "\n",
                Format::Csv => relabel(&game, &labels).to_csv(),
                Format::Table => game.render_table(&labels),
            };
            out += &verification(cli, &source)?;
            Ok(out)
        }
        Command::Nash { input, compact } => {
            let source = load(input)?;
            let (game, labels) = game_of(cli, &source, *compact)?;
            let mut out = nash_report(cli, &game, &labels, &source);
            out += &verification(cli, &source)?;
            Ok(out)
        }
        Command::Centipede { n, out } => centipede(cli, *n, out.as_ref()),
    }
}

fn load(input: &InputArgs) -> CliResult<Source> {
    if let Some(name) = &input.builtin {
        return Ok(builtin(name)?);
    }
    let path = input
        .input
        .as_ref()
        .ok_or_else(|| fail(2, "no input: give a JSON path, `-` for stdin, or --builtin"))?;
    let text = if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| fail(1, format!("reading stdin: {e}")))?;
        s
    } else {
        std::fs::read_to_string(path).map_err(|e| fail(1, format!("reading {}: {e}", path.display())))?
    };
    Ok(load_source(&text)?)
}

fn require_scheme(source: Source) -> CliResult<SchemeSpec> {
    match source {
        Source::Scheme(spec) => {
            spec.ensure_valid()?;
            Ok(spec)
        }
        other => Err(fail(3, format!("expected a scheme, got a {}", other.kind()))),
    }
}

fn validate(source: &Source) -> CliResult<String> {
    match source {
        Source::Scheme(spec) => {
            let violations = spec.validate();
            if violations.is_empty() {
                Ok(format!(
                    "valid scheme: {} players, {} operation slots, {} branch(es)\n",
                    spec.players,
                    spec.operation_layout.len(),
                    spec.branches.len()
                ))
            } else {
                let lines: Vec<String> = violations.iter().map(|v| format!("  {v}")).collect();
                Err(fail(
                    3,
                    format!("{} violation(s)\n{}", violations.len(), lines.join("\n")),
                ))
            }
        }
        // trees and games are checked while loading
        other => Ok(format!("valid {}\n", other.kind())),
    }
}

fn numbers(values: &[f64]) -> String {
    values.iter().map(|&v| format_number(v)).collect::<Vec<_>>().join(" ")
}

fn render_payoffs(cli: &Cli, profile: &str, payoffs: &[f64]) -> String {
    match cli.format {
        Format::Json => {
            json!({ "profile": profile, "payoffs": payoffs }).to_string() + "\n"
        }
        Format::Csv => {
            let head: Vec<String> = (1..=payoffs.len()).map(|p| format!("payoff{p}")).collect();
            let row: Vec<String> = payoffs.iter().map(|&v| format_number(v)).collect();
            format!("{}\n{}\n", head.join(","), row.join(","))
        }
        Format::Table => numbers(payoffs) + "\n",
    }
}

fn eval_pure(cli: &Cli, spec: &SchemeSpec, text: &str) -> CliResult<String> {
    let profile = parse_profile(spec, text)?;
    let payoffs = Evaluator::new(spec).payoff(&profile)?;
    let mut out = render_payoffs(cli, &format_profile(spec, &profile), &payoffs);
    if cli.verify {
        let d = compare_paths(spec, &[profile])?;
        let _ = writeln!(out, "oracle discrepancy: {d:.3e}");
    }
    Ok(out)
}

fn eval_mixed(cli: &Cli, spec: &SchemeSpec, arg: &str) -> CliResult<String> {
    let text = if arg.trim_start().starts_with(['{', '[']) {
        arg.to_string()
    } else {
        std::fs::read_to_string(arg).map_err(|e| fail(1, format!("reading {arg}: {e}")))?
    };
    let mixed = mixed_from_json(&text)?;
    let payoffs = Evaluator::new(spec).payoff_mixed(&mixed)?;
    let mut out = render_payoffs(cli, "mixed", &payoffs);
    if cli.verify {
        let mut worst: f64 = 0.0;
        for (p, &v) in payoffs.iter().enumerate() {
            worst = worst.max((dense_payoff_mixed(spec, &mixed, p + 1)? - v).abs());
        }
        let _ = writeln!(out, "oracle discrepancy: {worst:.3e}");
    }
    Ok(out)
}

/// The normal-form game behind a source with display labels.
fn game_of(cli: &Cli, source: &Source, compact: bool) -> CliResult<(NormalFormGame, Vec<Vec<String>>)> {
    let game = match source {
        Source::Scheme(spec) => {
            spec.ensure_valid()?;
            induced_game_with_budget(spec, cli.budget)?
        }
        Source::Tree(tree) => normal_representation(tree, cli.budget)?,
        Source::Game(game) => {
            let required: u128 = game.strategy_counts.iter().map(|&c| c as u128).product();
            if required > cli.budget {
                return Err(Error::BudgetExceeded {
                    required,
                    budget: cli.budget,
                }
                .into());
            }
            game.clone()
        }
    };
    let labels = match (source, compact) {
        (Source::Scheme(spec), true) => spec
            .strategies()
            .players
            .iter()
            .map(|ps| ps.iter().map(|s| s.code(&ps.owned_radices)).collect())
            .collect(),
        _ => game.strategy_labels.clone(),
    };
    Ok((game, labels))
}

fn relabel(game: &NormalFormGame, labels: &[Vec<String>]) -> NormalFormGame {
    let mut g = game.clone();
    g.strategy_labels = labels.to_vec();
    g
}

fn profile_labels(labels: &[Vec<String>], profile: &[usize]) -> Vec<String> {
    profile.iter().enumerate().map(|(p, &s)| labels[p][s].clone()).collect()
}

fn nash_report(cli: &Cli, game: &NormalFormGame, labels: &[Vec<String>], source: &Source) -> String {
    let found = pure_nash(game, cli.epsilon);
    let indices = |c: &EquilibriumCertificate| match &c.profile {
        CertifiedProfile::Pure(p) => p.clone(),
        CertifiedProfile::Mixed(_) => Vec::new(),
    };
    match cli.format {
        Format::Json => {
            let items: Vec<_> = found
                .iter()
                .map(|c| {
                    json!({
                        "strategies": profile_labels(labels, &indices(c)),
                        "certificate": c,
                    })
                })
                .collect();
            serde_json::to_string_pretty(&json!({ "pure_nash": items })).unwrap_or_default() + "\n"
        }
        Format::Csv => {
            let head: Vec<String> = (1..=game.players)
                .map(|p| format!("player{p}_strategy"))
                .chain((1..=game.players).map(|p| format!("payoff{p}")))
                .collect();
            let mut out = vec![head.join(",")];
            for c in &found {
                let mut cells = profile_labels(labels, &indices(c));
                cells.extend(c.payoffs.iter().map(|&v| format_number(v)));
                out.push(cells.join(","));
            }
            out.join("\n") + "\n"
        }
        Format::Table => {
            let mut out = format!("{} pure Nash equilibria\n", found.len());
            for c in &found {
                let _ = writeln!(
                    out,
                    "  ({})  payoffs ({})",
                    profile_labels(labels, &indices(c)).join(", "),
                    numbers(&c.payoffs).replace(' ', ", ")
                );
            }
            if let Source::Tree(tree) = source {
                let (value, _) = backward_induction(tree);
                let _ = writeln!(out, "backward induction: ({})", numbers(&value).replace(' ', ", "));
            }
            out
        }
    }
}

/// Oracle cross-check over every profile, or an evenly spaced sample of 50
/// when there are more than 4096.
fn verification(cli: &Cli, source: &Source) -> CliResult<String> {
    let Source::Scheme(spec) = source else {
        return Ok(if cli.verify {
            "oracle discrepancy: n/a (no quantum scheme)\n".into()
        } else {
            String::new()
        });
    };
    if !cli.verify {
        return Ok(String::new());
    }
    let dim = spec.control_layout.checked_dimension().zip(spec.operation_layout.checked_dimension());
    if !matches!(dim, Some((c, o)) if c.saturating_mul(o) <= DENSE_DIMENSION_LIMIT) {
        return Ok("oracle discrepancy: skipped (dimension above the dense limit)\n".into());
    }
    let eval = Evaluator::new(spec);
    let counts = eval.strategies().counts();
    let total: usize = counts.iter().product();
    let picks: Vec<usize> = if total <= 4096 {
        (0..total).collect()
    } else {
        (0..50).map(|i| i * (total - 1) / 49).collect()
    };
    let profiles: Vec<_> = picks.iter().map(|&f| eval.profile(&unflatten(&counts, f))).collect();
    let d = compare_paths(spec, &profiles)?;
    Ok(format!("oracle discrepancy: {d:.3e} over {} profiles\n", profiles.len()))
}

fn centipede(cli: &Cli, n: usize, out: Option<&PathBuf>) -> CliResult<String> {
    let v = verify_centipede_equilibrium(n, cli.epsilon)?;
    let (spec, profile) = make_centipede_scheme(n)?;
    let profile_text = format_profile(&spec, &profile);
    let mut report = String::new();
    // with `--out -` stdout carries only the document and the report moves to stderr
    let mut document = None;
    if let Some(path) = out {
        let text = scheme_to_json(&spec) + "\n";
        if path.as_os_str() == "-" {
            document = Some(text);
        } else {
            std::fs::write(path, text).map_err(|e| fail(1, format!("writing {}: {e}", path.display())))?;
        }
    }
    let c = &v.certificate;
    match cli.format {
        Format::Json => {
            let doc = json!({
                "stages": n,
                "profile": profile_text,
                "certificate": c,
                "player1_classical_cap": v.player1_classical_cap,
            });
            report += &(serde_json::to_string_pretty(&doc).unwrap_or_default() + "\n");
        }
        Format::Csv => {
            report += "stages,profile,payoff1,payoff2,slack1,slack2,player1_classical_cap,verdict\n";
            let _ = writeln!(
                report,
                "{n},\"{profile_text}\",{},{},{},{},{},{}",
                format_number(c.payoffs[0]),
                format_number(c.payoffs[1]),
                format_number(c.slack[0]),
                format_number(c.slack[1]),
                format_number(v.player1_classical_cap),
                if c.is_valid() { "VALID" } else { "INVALID" }
            );
        }
        Format::Table => {
            let _ = writeln!(report, "stages: {n}");
            let _ = writeln!(report, "profile: {profile_text}");
            let _ = writeln!(report, "payoffs: {}", numbers(&c.payoffs));
            let _ = writeln!(report, "best deviation payoffs: {}", numbers(&c.best_deviation_payoffs));
            let _ = writeln!(report, "slack: {}", numbers(&c.slack));
            let _ = writeln!(report, "player 1 classical cap: {}", format_number(v.player1_classical_cap));
            let _ = writeln!(report, "verdict: {}", if c.is_valid() { "VALID" } else { "INVALID" });
        }
    }
    match document {
        Some(text) => {
            eprint!("{report}");
            Ok(text)
        }
        None => Ok(report),
    }
}
