mod report;

use std::collections::BTreeSet;
use std::fs;
use std::io::{self, Read};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use baselab::oracles::{compare_with_fallback, intuitionistic_valid, map_extrinsic, classical_valid};
use baselab::support::DEFAULT_MAX_ENUM;
use baselab::{
    base_to_formula, derivation_trace, derives, formula_to_base, parse_base, parse_formula,
    render_base, Atom, Base, BasisLevel, BasisSpec, Formula, Strategy, SupportContext,
};
use clap::{Args, Parser, Subcommand, ValueEnum};

use report::{CompareRow, ConfigReport, Query, Report, StatsReport};

#[derive(Parser, Debug)]
#[command(name = "baselab", version, about = "Base-extension semantics over finite atomic systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Is an atom derivable from assumptions in a base?
    Derive {
        #[arg(long)]
        base: PathBuf,
        /// Comma-separated assumption atoms.
        #[arg(long, value_delimiter = ',')]
        assume: Vec<String>,
        goal: String,
        /// Print a witness derivation.
        #[arg(long)]
        trace: bool,
        #[arg(long)]
        json: bool,
    },
    /// Is a formula supported at a base? With --hyp, checks entailment.
    Support(JudgmentArgs),
    /// Do the hypotheses entail the formula at a base?
    Entails(JudgmentArgs),
    /// Is a formula supported at every base of the basis?
    Valid(FormulaArgs),
    /// Print a base at which a formula is not supported.
    Countermodel(FormulaArgs),
    /// Convert between rule files and clausal formulas.
    Translate {
        #[arg(value_enum)]
        direction: Direction,
        /// The text to translate, or `-` for standard input.
        #[arg(required_unless_present = "file", conflicts_with = "file")]
        input: Option<String>,
        /// Read the text to translate from a file.
        #[arg(long)]
        file: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Decide a formula classically or intuitionistically.
    Oracle {
        formula: String,
        #[arg(long, value_enum, default_value_t = Logic::Both)]
        logic: Logic,
        #[arg(long)]
        json: bool,
    },
    /// Compare validity with the matching oracle, one row per formula.
    Compare {
        #[command(flatten)]
        config: ConfigArgs,
        /// File with one formula per line; `#` starts a comment.
        #[arg(long)]
        corpus: Option<PathBuf>,
        formulas: Vec<String>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Direction {
    ToFormula,
    ToBase,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Logic {
    Classical,
    Intuitionistic,
    Both,
}

#[derive(Args, Debug, Clone)]
struct ConfigArgs {
    #[arg(long, default_value = "b2")]
    basis: BasisLevel,
    /// Comma-separated vocabulary; defaults to the atoms of the inputs.
    #[arg(long, value_delimiter = ',')]
    vocab: Option<Vec<String>>,
    /// Fresh atoms `_f1, _f2, ...` added to the vocabulary.
    #[arg(long, default_value_t = 1)]
    fresh: usize,
    #[arg(long, default_value_t = 2)]
    max_premises: usize,
    #[arg(long, default_value_t = 1)]
    max_discharge: usize,
    /// A positive number, or `unbounded`.
    #[arg(long, default_value = "3", value_parser = parse_max_rules)]
    max_rules: MaxRules,
    /// `auto`, `lattice` or `recursive`.
    #[arg(long, default_value = "auto")]
    strategy: Strategy,
    #[arg(long)]
    json: bool,
    /// Check validity at every base instead of only the empty one.
    #[arg(long)]
    paranoid: bool,
}

#[derive(Clone, Copy, Debug)]
struct MaxRules(Option<usize>);

fn parse_max_rules(s: &str) -> Result<MaxRules, String> {
    match s {
        "unbounded" => Ok(MaxRules(None)),
        _ => match s.parse::<usize>() {
            Ok(0) => Err("max-rules must be positive".into()),
            Ok(n) => Ok(MaxRules(Some(n))),
            Err(e) => Err(e.to_string()),
        },
    }
}

#[derive(Args, Debug)]
struct JudgmentArgs {
    #[command(flatten)]
    config: ConfigArgs,
    /// Base file; the empty base if omitted.
    #[arg(long)]
    base: Option<PathBuf>,
    /// Semicolon-separated hypotheses.
    #[arg(long)]
    hyp: Option<String>,
    formula: String,
}

#[derive(Args, Debug)]
struct FormulaArgs {
    #[command(flatten)]
    config: ConfigArgs,
    formula: String,
}

type Failure = Box<dyn std::error::Error>;

/// Outcome of a command: the positive/negative judgment and what to print.
struct Outcome {
    positive: bool,
    text: String,
    report: Report,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let json = match &cli.command {
        Command::Derive { json, .. } | Command::Translate { json, .. } | Command::Oracle { json, .. } => *json,
        Command::Support(a) | Command::Entails(a) => a.config.json,
        Command::Valid(a) | Command::Countermodel(a) => a.config.json,
        Command::Compare { config, .. } => config.json,
    };
    match run(cli.command) {
        Ok(mut out) => {
            out.report.stats.wall_ms = start.elapsed().as_millis() as u64;
            if json {
                println!("{}", serde_json::to_string_pretty(&out.report).expect("serializable report"));
            } else {
                print!("{}", out.text);
            }
            if out.positive {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Result<Outcome, Failure> {
    match command {
        Command::Derive { base, assume, goal, trace, .. } => cmd_derive(&base, &assume, &goal, trace),
        Command::Support(a) if a.hyp.is_some() => cmd_judgment(a, "entails"),
        Command::Support(a) => cmd_judgment(a, "support"),
        Command::Entails(a) => cmd_judgment(a, "entails"),
        Command::Valid(a) => cmd_valid(a, false),
        Command::Countermodel(a) => cmd_valid(a, true),
        Command::Translate { direction, input, file, .. } => {
            let text = match (input, file) {
                (_, Some(path)) => fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?,
                (Some(input), None) => read_input(&input)?,
                (None, None) => unreachable!("clap requires one of input and --file"),
            };
            cmd_translate(direction, &text)
        }
        Command::Oracle { formula, logic, .. } => cmd_oracle(&formula, logic),
        Command::Compare { config, corpus, formulas } => cmd_compare(&config, corpus.as_deref(), &formulas),
    }
}

fn read_base(path: &Path) -> Result<Base, Failure> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    parse_base(&text).map_err(|e| format!("{}: {e}", path.display()).into())
}

fn max_enum() -> Result<u128, Failure> {
    match std::env::var("BASELAB_MAX_ENUM") {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| format!("BASELAB_MAX_ENUM must be a non-negative integer, got `{v}`").into()),
        Err(_) => Ok(DEFAULT_MAX_ENUM),
    }
}

fn build_spec(config: &ConfigArgs, formulas: &[&Formula], bases: &[&Base]) -> Result<BasisSpec, Failure> {
    if config.max_premises == 0 {
        return Err("max-premises must be positive".into());
    }
    let vocab: BTreeSet<Atom> = match &config.vocab {
        Some(names) => names.iter().map(|n| Atom::new(n.trim())).collect::<Result<_, _>>()?,
        None => formulas
            .iter()
            .flat_map(|f| f.atoms())
            .chain(bases.iter().flat_map(|b| b.atoms()))
            .collect(),
    };
    Ok(BasisSpec::new(vocab, config.basis)
        .with_max_premises(config.max_premises)
        .with_max_discharge(config.max_discharge)
        .with_max_rules(config.max_rules.0)
        .with_fresh(config.fresh))
}

fn build_context(config: &ConfigArgs, formulas: &[&Formula], bases: &[&Base]) -> Result<SupportContext, Failure> {
    let spec = build_spec(config, formulas, bases)?;
    let mut ctx = SupportContext::with_options(spec, config.strategy, max_enum()?)?;
    ctx.set_paranoid(config.paranoid);
    Ok(ctx)
}

fn config_report(config: &ConfigArgs, ctx: &SupportContext) -> ConfigReport {
    ConfigReport::new(ctx.spec(), config.fresh, config.strategy, config.paranoid)
}

fn stats_of(ctx: &SupportContext) -> StatsReport {
    let mut s = StatsReport::default();
    s.add(ctx.stats());
    s
}

fn one_line(b: &Base) -> String {
    render_base(b).trim_end().replace('\n', " ")
}

fn cmd_derive(base: &Path, assume: &[String], goal: &str, trace: bool) -> Result<Outcome, Failure> {
    let b = read_base(base)?;
    let gamma: BTreeSet<Atom> = assume.iter().map(|a| Atom::new(a.trim())).collect::<Result<_, _>>()?;
    let goal = Atom::new(goal)?;
    let positive = derives(&b, &gamma, &goal);
    let witness = if positive && trace {
        derivation_trace(&b, &gamma, &goal).map(|d| d.to_string())
    } else {
        None
    };
    let mut text = format!("{}\n", if positive { "derivable" } else { "not derivable" });
    if let Some(w) = &witness {
        text.push_str(w);
        if !w.ends_with('\n') {
            text.push('\n');
        }
    }
    Ok(Outcome {
        positive,
        text,
        report: Report {
            query: Query {
                command: "derive",
                formula: Some(goal.to_string()),
                base: Some(one_line(&b)),
                assumptions: gamma.iter().map(|a| a.to_string()).collect(),
                ..Query::default()
            },
            config: None,
            verdict: if positive { "derivable" } else { "not_derivable" },
            witness,
            rows: None,
            stats: StatsReport::default(),
        },
    })
}

fn cmd_judgment(a: JudgmentArgs, command: &'static str) -> Result<Outcome, Failure> {
    let f = parse_formula(&a.formula)?;
    let b = match &a.base {
        Some(p) => read_base(p)?,
        None => Base::new(),
    };
    let hyps: Vec<Formula> = a
        .hyp
        .as_deref()
        .unwrap_or("")
        .split(';')
        .filter(|s| !s.trim().is_empty())
        .map(parse_formula)
        .collect::<Result<_, _>>()?;
    let mut all: Vec<&Formula> = hyps.iter().collect();
    all.push(&f);
    let ctx = build_context(&a.config, &all, &[&b])?;
    let positive = if command == "support" {
        ctx.supports(&b, &f)?
    } else {
        ctx.entails(&b, &hyps, &f)?
    };
    let (yes, no) = if command == "support" {
        ("supported", "not_supported")
    } else {
        ("entailed", "not_entailed")
    };
    let verdict = if positive { yes } else { no };
    Ok(Outcome {
        positive,
        text: format!("{}\n", verdict.replace('_', " ")),
        report: Report {
            query: Query {
                command,
                formula: Some(f.to_string()),
                base: Some(one_line(&b)),
                hypotheses: hyps.iter().map(|h| h.to_string()).collect(),
                ..Query::default()
            },
            config: Some(config_report(&a.config, &ctx)),
            verdict,
            witness: None,
            rows: None,
            stats: stats_of(&ctx),
        },
    })
}

fn cmd_valid(a: FormulaArgs, want_countermodel: bool) -> Result<Outcome, Failure> {
    let f = parse_formula(&a.formula)?;
    let ctx = build_context(&a.config, &[&f], &[])?;
    let valid = ctx.valid(&f)?;
    let (positive, verdict, text, witness) = if want_countermodel {
        match ctx.countermodel(&f)? {
            None => (false, "none", "# no countermodel: the formula is valid\n".to_string(), None),
            Some(cm) => {
                let mut text = String::from("# countermodel\n");
                if cm.is_empty() {
                    text.push_str("# (the empty base)\n");
                }
                text.push_str(&render_base(&cm));
                if let Some(why) = ctx.explain_failure(&cm, &f)? {
                    text.push_str(&format!(
                        "# the {} clause fails at the extension: {}\n",
                        why.clause,
                        if why.extension.is_empty() { "(empty)".to_string() } else { one_line(&why.extension) }
                    ));
                    if let Some(p) = why.atom {
                        text.push_str(&format!("#   for the atom {p}\n"));
                    }
                }
                (true, "countermodel", text, Some(render_base(&cm)))
            }
        }
    } else {
        let verdict = if valid { "valid" } else { "invalid" };
        (valid, verdict, format!("{verdict}\n"), None)
    };
    Ok(Outcome {
        positive,
        text,
        report: Report {
            query: Query {
                command: if want_countermodel { "countermodel" } else { "valid" },
                formula: Some(f.to_string()),
                ..Query::default()
            },
            config: Some(config_report(&a.config, &ctx)),
            verdict,
            witness,
            rows: None,
            stats: stats_of(&ctx),
        },
    })
}

fn read_input(input: &str) -> Result<String, Failure> {
    if input == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        Ok(input.to_string())
    }
}

fn cmd_translate(direction: Direction, text: &str) -> Result<Outcome, Failure> {
    let (out, command) = match direction {
        Direction::ToFormula => (base_to_formula(&parse_base(text)?)?.to_string(), "translate_to_formula"),
        Direction::ToBase => (render_base(&formula_to_base(&parse_formula(text)?)?).trim_end().to_string(), "translate_to_base"),
    };
    Ok(Outcome {
        positive: true,
        text: format!("{out}\n"),
        report: Report {
            query: Query {
                command,
                formula: Some(text.trim().to_string()),
                ..Query::default()
            },
            config: None,
            verdict: "translated",
            witness: Some(out),
            rows: None,
            stats: StatsReport::default(),
        },
    })
}

fn cmd_oracle(formula: &str, logic: Logic) -> Result<Outcome, Failure> {
    let f = parse_formula(formula)?;
    let mapped = map_extrinsic(&f)?;
    let mut lines = vec![format!("mapped: {mapped}")];
    let mut positive = true;
    if logic != Logic::Intuitionistic {
        let v = classical_valid(&mapped)?;
        lines.push(format!("classical: {}", if v { "valid" } else { "invalid" }));
        positive &= v;
    }
    if logic != Logic::Classical {
        let v = intuitionistic_valid(&mapped);
        lines.push(format!("intuitionistic: {}", if v { "valid" } else { "invalid" }));
        positive &= v;
    }
    Ok(Outcome {
        positive,
        text: lines.join("\n") + "\n",
        report: Report {
            query: Query {
                command: "oracle",
                formula: Some(f.to_string()),
                ..Query::default()
            },
            config: None,
            verdict: if positive { "valid" } else { "invalid" },
            witness: Some(mapped.to_string()),
            rows: None,
            stats: StatsReport::default(),
        },
    })
}

fn cmd_compare(config: &ConfigArgs, corpus: Option<&Path>, formulas: &[String]) -> Result<Outcome, Failure> {
    let mut texts: Vec<String> = formulas.to_vec();
    if let Some(path) = corpus {
        let content = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        texts.extend(
            content
                .lines()
                .map(|l| l.split('#').next().unwrap_or("").trim())
                .filter(|l| !l.is_empty())
                .map(String::from),
        );
    }
    if texts.is_empty() {
        return Err("no formulas to compare".into());
    }
    let parsed: Vec<Formula> = texts.iter().map(|t| parse_formula(t)).collect::<Result<_, _>>()?;
    let template = build_spec(config, &[], &[])?;
    let cap = max_enum()?;
    let mut rows = Vec::new();
    let mut text = String::new();
    let mut stats = StatsReport::default();
    for f in &parsed {
        let template = match &config.vocab {
            Some(_) => template.clone(),
            None => BasisSpec { vocab: BTreeSet::new(), ..template.clone() },
        };
        let (c, stopped) = if config.vocab.is_some() {
            let ctx = build_context(config, &[f], &[])?;
            (baselab::compare(&ctx, f)?, None)
        } else {
            compare_with_fallback(&template, f, config.fresh, config.fresh + 1, config.strategy, cap)?
        };
        text.push_str(&format!(
            "{:<9} support {:<7} {} {:<7} fresh {}  {}\n",
            if c.agree { "agree" } else { "DISAGREE" },
            if c.support_valid { "valid" } else { "invalid" },
            c.oracle,
            if c.oracle_valid { "valid" } else { "invalid" },
            c.fresh,
            f
        ));
        stats.add(c.stats);
        if let Some(e) = stopped {
            text.push_str(&format!("          (retry with more fresh atoms stopped: {e})\n"));
        }
        rows.push(CompareRow {
            formula: f.to_string(),
            support_valid: c.support_valid,
            oracle: c.oracle.to_string(),
            oracle_valid: c.oracle_valid,
            agree: c.agree,
            fresh: c.fresh,
            countermodel: c.countermodel.as_ref().map(one_line),
        });
    }
    let positive = rows.iter().all(|r| r.agree);
    let disagreements = rows.iter().filter(|r| !r.agree).count();
    text.push_str(&format!("{} formulas, {disagreements} disagreements\n", rows.len()));
    let spec_for_report = build_spec(config, &parsed.iter().collect::<Vec<_>>(), &[])?;
    Ok(Outcome {
        positive,
        text,
        report: Report {
            query: Query {
                command: "compare",
                ..Query::default()
            },
            config: Some(ConfigReport::new(&spec_for_report, config.fresh, config.strategy, config.paranoid)),
            verdict: if positive { "agree" } else { "disagree" },
            witness: None,
            rows: Some(rows),
            stats,
        },
    })
}
