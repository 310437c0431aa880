//! `adl` — command-line front end for Aleatoric Description Logic.
//!
//! Exit codes: 0 on success, 1 on domain errors (bad files, unsatisfiable
//! requests, numerical failures), 2 on usage errors.

mod repro;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use adl_core::consistency::{self, Direction, SolveConfig, Verdict};
use adl_core::functional::{adl_translate, measure, monte_carlo_measure};
use adl_core::kb::{kb_satisfied_by, simplify, KnowledgeBase};
use adl_core::learning::{concept_learn, role_update, Observation};
use adl_core::rational::{display, parse_prob, to_decimal};
use adl_core::{evaluate, parse_concept, parse_formula, BeliefModel, Error, PointedModel, Q};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "adl", version, about = "Aleatoric Description Logic toolkit")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, global = true, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    /// Human-readable text.
    Text,
    /// Tab-separated `key, rational, decimal` rows.
    Table,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate a formula at an individual of a belief model.
    Eval {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        at: String,
        #[arg(long)]
        formula: String,
    },
    /// Check belief models (`.adm`) and knowledge bases (`.akb`) for well-formedness.
    Validate {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Translate an ALC concept into an ADL formula with the same probability.
    Translate {
        #[arg(long)]
        alc: String,
    },
    /// Probability that a sampling of the model satisfies an ALC concept.
    Measure {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        at: String,
        #[arg(long)]
        alc: String,
        /// Exact measure from accepted trees (the default).
        #[arg(long, conflicts_with = "mc")]
        exact: bool,
        /// Monte-Carlo estimate from this many samplings.
        #[arg(long, requires = "seed")]
        mc: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Knowledge-base operations.
    #[command(subcommand)]
    Kb(KbCommand),
    /// Belief revision.
    #[command(subcommand)]
    Learn(LearnCommand),
    /// Re-run the worked examples and compare with the published figures.
    Repro {
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

#[derive(Args, Debug)]
struct Budget {
    /// Base seed of the multi-start search.
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 64)]
    starts: usize,
    #[arg(long, default_value_t = 400)]
    iters: usize,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
}

impl Budget {
    fn config(&self) -> SolveConfig {
        SolveConfig { starts: self.starts, iters: self.iters, tol: self.tol, seed: self.seed, ..SolveConfig::default() }
    }
}

#[derive(Subcommand, Debug)]
enum KbCommand {
    /// Report well-formedness, simplicity and acyclicity.
    Check { kb: PathBuf },
    /// Print the equisatisfiable simple knowledge base.
    Simplify { kb: PathBuf },
    /// Check whether a belief model satisfies the knowledge base.
    SatisfiedBy {
        kb: PathBuf,
        #[arg(long)]
        model: PathBuf,
    },
    /// Decide consistency by polynomial constraint solving.
    Consistent {
        kb: PathBuf,
        #[command(flatten)]
        budget: Budget,
        /// Print the generated constraint system.
        #[arg(long)]
        emit: bool,
        /// Print the witness model.
        #[arg(long)]
        witness: bool,
    },
    /// Ask whether some model gives a name exactly / at most / at least a probability.
    Query {
        kb: PathBuf,
        #[arg(long)]
        name: String,
        #[arg(long)]
        formula: String,
        #[arg(long)]
        p: String,
        #[arg(long, value_enum, default_value_t = Bound::Exactly)]
        bound: Bound,
        #[command(flatten)]
        budget: Budget,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Bound {
    Exactly,
    AtMost,
    AtLeast,
}

#[derive(Subcommand, Debug)]
enum LearnCommand {
    /// Condition one role row on an observation `[α|β]_ρ`.
    Role {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        at: String,
        #[arg(long)]
        obs: String,
        /// Rescale the updated row to sum to one.
        #[arg(long)]
        normalize: bool,
    },
    /// Learn a concept likelihood from an observation.
    Concept {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        at: String,
        #[arg(long)]
        concept: String,
        #[arg(long)]
        obs: String,
        /// Also print the extended model after the id update.
        #[arg(long)]
        keep_extension: bool,
    },
}

/// Collects output lines in the selected format.
struct Out {
    format: Format,
    lines: Vec<String>,
}

impl Out {
    fn value(&mut self, key: &str, v: &Q) {
        match self.format {
            Format::Text => self.lines.push(format!("{key}: {}", display(v))),
            Format::Table => self.lines.push(format!("{key}\t{v}\t{}", to_decimal(v, 10))),
        }
    }

    fn bare(&mut self, key: &str, v: &Q) {
        match self.format {
            Format::Text => self.lines.push(display(v)),
            Format::Table => self.value(key, v),
        }
    }

    fn text(&mut self, s: impl Into<String>) {
        self.lines.push(s.into());
    }
}

fn read(path: &Path) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(|e| Error::Precondition(format!("cannot read {}: {e}", path.display())))
}

fn load_model(path: &Path) -> Result<BeliefModel, Error> {
    BeliefModel::parse_valid(&read(path)?)
}

fn load_kb(path: &Path) -> Result<KnowledgeBase, Error> {
    KnowledgeBase::parse(&read(path)?)
}

fn run(cli: Cli) -> Result<Vec<String>, Error> {
    let mut out = Out { format: cli.format, lines: Vec::new() };
    match cli.command {
        Command::Eval { model, at, formula } => {
            let pm = PointedModel::at(load_model(&model)?, &at)?;
            let f = parse_formula(&formula, Some(&pm.model.signature()))?.desugar();
            out.bare("value", &evaluate(&pm, &f)?);
        }
        Command::Validate { files } => {
            for f in files {
                let text = read(&f)?;
                if f.extension().is_some_and(|e| e == "akb") {
                    KnowledgeBase::parse(&text)?;
                } else {
                    BeliefModel::parse_valid(&text)?;
                }
                out.text(format!("{}: ok", f.display()));
            }
        }
        Command::Translate { alc } => {
            let c = parse_concept(&alc, None)?;
            out.text(adl_translate(&c)?.to_string());
        }
        Command::Measure { model, at, alc, exact: _, mc, seed } => {
            let pm = PointedModel::at(load_model(&model)?, &at)?;
            let c = parse_concept(&alc, Some(&pm.model.signature()))?;
            match mc {
                Some(n) => {
                    let e = monte_carlo_measure(&pm, &c, n, seed.expect("clap enforces --seed"))?;
                    out.text(format!(
                        "estimate {:.6} ({}/{}) 99% interval [{:.6}, {:.6}]",
                        e.estimate, e.successes, e.samples, e.lower, e.upper
                    ));
                }
                None => {
                    let r = measure(&pm, &c)?;
                    out.bare("measure", &r.value);
                    if out.format == Format::Text {
                        out.text(format!("accepted trees: {}", r.trees.len()));
                    }
                }
            }
        }
        Command::Kb(cmd) => kb_command(cmd, &mut out)?,
        Command::Learn(cmd) => learn_command(cmd, &mut out)?,
        Command::Repro { seed } => out.lines.extend(repro::run(seed)?),
    }
    Ok(out.lines)
}

fn kb_command(cmd: KbCommand, out: &mut Out) -> Result<(), Error> {
    match cmd {
        KbCommand::Check { kb } => {
            let kb = load_kb(&kb)?;
            out.text("well-formed: yes");
            out.text(format!("simple: {}", if kb.is_simple() { "yes" } else { "no" }));
            let s = simplify(&kb);
            let acyclic = s.kb.is_acyclic()?;
            out.text(format!("acyclic after simplification: {}", if acyclic { "yes" } else { "no" }));
        }
        KbCommand::Simplify { kb } => {
            let s = simplify(&load_kb(&kb)?);
            out.text(s.kb.to_text().trim_end());
        }
        KbCommand::SatisfiedBy { kb, model } => {
            let kb = load_kb(&kb)?;
            let m = load_model(&model)?;
            let v = kb_satisfied_by(&m, &kb)?;
            if v.is_empty() {
                out.text("SATISFIED");
            } else {
                out.text(format!("VIOLATED ({} axioms)", v.len()));
                for x in v {
                    out.text(format!("  {x}"));
                }
            }
        }
        KbCommand::Consistent { kb, budget, emit, witness } => {
            let kb = load_kb(&kb)?;
            if emit {
                let prepared = consistency::prepare(&kb)?;
                out.text(prepared.system.emit().trim_end());
            }
            let v = consistency::check_consistency(&kb, &budget.config())?;
            out.text(v.to_string());
            if let Verdict::Consistent(w) = &v {
                if let Some(note) = &w.note {
                    out.text(format!("note: {note}"));
                }
                if witness {
                    out.text(w.model.to_string().trim_end());
                }
            }
        }
        KbCommand::Query { kb, name, formula, p, bound, budget } => {
            let kb = load_kb(&kb)?;
            let f = parse_formula(&formula, Some(&kb.signature))?.desugar();
            let p = parse_prob(&p)?;
            let dir = match bound {
                Bound::Exactly => Direction::Exactly,
                Bound::AtMost => Direction::AtMost,
                Bound::AtLeast => Direction::AtLeast,
            };
            let v = consistency::query_bound(&kb, &name, &f, p, dir, &budget.config())?;
            out.text(v.to_string());
        }
    }
    Ok(())
}

fn learn_command(cmd: LearnCommand, out: &mut Out) -> Result<(), Error> {
    match cmd {
        LearnCommand::Role { model, at, obs, normalize } => {
            let pm = PointedModel::at(load_model(&model)?, &at)?;
            let f = parse_formula(&obs, Some(&pm.model.signature()))?.desugar();
            let obs = Observation::from_formula(&f)?;
            let r = role_update(&pm, &obs, normalize)?;
            out.value("evidence", &r.evidence);
            out.value("raw row sum", &r.raw_sum);
            for (j, w) in r.model.row(&obs.role, pm.point).iter().enumerate() {
                if !num::Zero::is_zero(w) {
                    out.value(&format!("{}({at},{})", obs.role, r.model.individual_name(j)), w);
                }
            }
            if out.format == Format::Text {
                out.text(r.model.to_string().trim_end());
            }
        }
        LearnCommand::Concept { model, at, concept, obs, keep_extension } => {
            let pm = PointedModel::at(load_model(&model)?, &at)?;
            let f = parse_formula(&obs, Some(&pm.model.signature()))?.desugar();
            let r = concept_learn(&pm, &concept, &f)?;
            let star = r.extended.individual_name(r.star).to_string();
            let i = pm.point;
            out.value(&format!("{concept}({at}) extended"), &r.extended.likelihood(&concept, i));
            out.value(&format!("{concept}({star}) extended"), &r.extended.likelihood(&concept, r.star));
            out.value(&format!("observation at {at}"), &r.evidence.0);
            out.value(&format!("observation at {star}"), &r.evidence.1);
            out.value(&format!("id weight {at}"), &r.weights.0);
            out.value(&format!("id weight {star}"), &r.weights.1);
            out.value(&format!("{concept}({at}) learnt"), &r.model.likelihood(&concept, i));
            if out.format == Format::Text {
                if keep_extension {
                    out.text("# extended model after the id update");
                    out.text(r.updated.to_string().trim_end());
                }
                out.text("# learnt model");
                out.text(r.model.to_string().trim_end());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(lines) => {
            let mut stdout = std::io::stdout().lock();
            for l in lines {
                // A closed pipe (e.g. `| head`) is not an error worth reporting.
                if writeln!(stdout, "{l}").is_err() {
                    break;
                }
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
