//! Command-line front end.
//!
//! Exit codes: 0 success, 1 a check failed, 2 usage error.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::classifier::{classify, example_verdicts, IdealExpr, GOLDEN};
use crate::egorovlab::{self, IntervalSet, TreeDocument};
use crate::error::Error;
use crate::ground::{FiniteSet, SetDescription};
use crate::ideals::{Budget, Verdict};
use crate::pathology::{hull, pathology_scan, Family};
use crate::reductions::suites::{default_level, CONSTRUCTIONS};
use crate::reductions::{run_construction, RunReport};
use crate::submeasures::{check_axioms, Submeasure};

pub const BUDGET_ENV: &str = "IDEALC_BUDGET";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Exhaustive,
    Reduced,
}

#[derive(Debug, Parser)]
#[command(name = "idealc", version, about = "Finite-scale workbench for ideals on ω")]
pub struct Cli {
    #[arg(long, global = true, value_enum, default_value = "json")]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Value of a catalogue submeasure on a finite set of codes.
    Eval {
        #[arg(long)]
        submeasure: String,
        /// Codes separated by spaces or commas.
        #[arg(long)]
        set: String,
    },
    /// Monotonicity and subadditivity audit.
    Axioms {
        #[arg(long)]
        submeasure: String,
        #[arg(long, default_value_t = 64)]
        prefix: u64,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        #[arg(long)]
        seed: u64,
    },
    /// Membership verdict for a described set.
    Member {
        #[arg(long)]
        ideal: String,
        /// Set description, e.g. "(column 0)".
        #[arg(long)]
        set: String,
        /// Prefix length N for empirical verdicts.
        #[arg(long, env = BUDGET_ENV, default_value_t = 1024)]
        budget: u64,
        /// Divergence level k.
        #[arg(long, default_value_t = 5)]
        level: u64,
        #[arg(long, default_value_t = 8)]
        depth: u32,
    },
    /// Non-pathological hull on a finite ground.
    Pathology {
        #[arg(long)]
        submeasure: String,
        /// Ground codes; defaults to the first `prefix` codes.
        #[arg(long)]
        ground: Option<String>,
        #[arg(long, default_value_t = 12)]
        prefix: u64,
        /// Objective codes; defaults to the whole ground.
        #[arg(long)]
        set: Option<String>,
        #[arg(long, value_enum, default_value = "exhaustive")]
        family: FamilyArg,
        /// Scan this many random subsets instead of one objective.
        #[arg(long, requires = "seed")]
        samples: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Rudin-Keisler constructions.
    Rk {
        #[command(subcommand)]
        action: RkAction,
    },
    /// Egorov classification and the interval machine.
    Egorov {
        #[command(subcommand)]
        action: EgorovAction,
    },
    /// Catalogue contents.
    Catalogue {
        #[command(subcommand)]
        action: CatalogueAction,
    },
    /// Classification of the fixed verdict table.
    Golden,
}

#[derive(Debug, Subcommand)]
pub enum RkAction {
    Run {
        #[arg(long)]
        construction: String,
        #[arg(long)]
        level: Option<u32>,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Re-run the construction recorded in a report and compare.
    Verify {
        #[arg(long)]
        report: PathBuf,
    },
}

#[derive(Debug, Subcommand)]
pub enum EgorovAction {
    Classify {
        #[arg(long)]
        ideal: String,
    },
    Construct {
        #[arg(long)]
        witness: String,
        #[arg(long, default_value_t = 4)]
        depth: u32,
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    Violate {
        #[arg(long)]
        tree: PathBuf,
        /// Union of intervals, e.g. "[0, 1/4) ∪ [1/2, 3/4)".
        #[arg(long)]
        set: String,
        #[arg(long)]
        level: u32,
    },
}

#[derive(Debug, Subcommand)]
pub enum CatalogueAction {
    List,
}

/// What a command produced.
struct Outcome {
    json: serde_json::Value,
    text: String,
    ok: bool,
}

enum Failure {
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn outcome(value: &impl Serialize, text: String, ok: bool) -> Outcome {
    Outcome {
        json: serde_json::to_value(value).expect("reports serialize"),
        text,
        ok,
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure::Usage(message.into())
}

fn parse_codes(text: &str) -> Result<Vec<u64>, Failure> {
    text.split(|c: char| c.is_whitespace() || c == ',')
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<u64>().map_err(|_| usage(format!("bad code {t:?}"))))
        .collect()
}

fn write_json(path: &PathBuf, value: &impl Serialize) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).expect("reports serialize");
    fs::write(path, text + "\n").map_err(|e| usage(format!("cannot write {}: {e}", path.display())))
}

fn read_json<T: serde::de::DeserializeOwned>(path: &PathBuf) -> Result<T, Failure> {
    let text =
        fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn verdict_text(v: &Verdict) -> String {
    match v {
        Verdict::ProvedIn { certificate } | Verdict::ProvedOut { certificate } => {
            let steps: Vec<String> = certificate.iter().map(|s| format!("  {} {}", s.rule, s.detail)).collect();
            format!("{}\n{}", v.name(), steps.join("\n"))
        }
        other => other.to_string(),
    }
}

fn execute(cli: Cli) -> Result<Outcome, Failure> {
    match cli.command {
        Command::Eval { submeasure, set } => {
            let phi = Submeasure::catalogue(&submeasure)?;
            let set = FiniteSet::new(phi.space.clone(), parse_codes(&set)?)?;
            let value = phi.eval(&set)?;
            let text = format!("{}({:?}) = {value}", phi.label, set.codes());
            let j = json!({ "submeasure": phi.label, "set": set.codes(), "value": value });
            Ok(outcome(&j, text, true))
        }
        Command::Axioms {
            submeasure,
            prefix,
            trials,
            seed,
        } => {
            let phi = Submeasure::catalogue(&submeasure)?;
            let r = check_axioms(&phi, prefix, trials, seed);
            let text = format!(
                "{}: {} exhaustive pairs, {} random pairs (seed {}), {} violations",
                r.submeasure, r.exhaustive_pairs, r.random_pairs, r.seed, r.violation_count
            );
            let ok = r.passed;
            Ok(outcome(&r, text, ok))
        }
        Command::Member {
            ideal,
            set,
            budget,
            level,
            depth,
        } => {
            let e = IdealExpr::parse(&ideal)?;
            let oracle = e.oracle()?;
            let d: SetDescription = set.parse()?;
            let budget = Budget {
                prefix: budget,
                level,
                depth,
            };
            let v = oracle.decide(&d, budget)?;
            let text = format!("{e} ∋ {d}: {}", verdict_text(&v));
            let j = json!({ "ideal": e.to_string(), "set": d.to_string(), "budget": budget, "result": v });
            Ok(outcome(&j, text, true))
        }
        Command::Pathology {
            submeasure,
            ground,
            prefix,
            set,
            family,
            samples,
            seed,
        } => {
            let phi = Submeasure::catalogue(&submeasure)?;
            let ground = match ground {
                Some(g) => FiniteSet::new(phi.space.clone(), parse_codes(&g)?)?,
                None => FiniteSet::prefix(phi.space.clone(), prefix)?,
            };
            let family = match family {
                FamilyArg::Exhaustive => Family::Exhaustive,
                FamilyArg::Reduced => Family::Reduced,
            };
            if let Some(samples) = samples {
                let seed = seed.ok_or_else(|| usage("--samples needs --seed"))?;
                let r = pathology_scan(&phi, &ground, samples, seed, family)?;
                let text = format!("{} samples (seed {seed}): {:?}", r.reports.len(), r.summary);
                return Ok(outcome(&r, text, true));
            }
            let a = match set {
                Some(s) => FiniteSet::new(phi.space.clone(), parse_codes(&s)?)?,
                None => ground.clone(),
            };
            let r = hull(&phi, &ground, &a, family)?;
            let text = format!(
                "φ = {}, hull = {}, gap = {}, {} constraints, feasible {}",
                r.phi_value,
                crate::rational::format_rational(&r.hull_value),
                crate::rational::format_rational(&r.gap),
                r.constraints,
                r.feasible
            );
            let ok = r.feasible && r.exhaustive_check != Some(false);
            Ok(outcome(&r, text, ok))
        }
        Command::Rk { action } => match action {
            RkAction::Run {
                construction,
                level,
                report,
            } => {
                let level = level.unwrap_or_else(|| default_level(&construction));
                let r = run_construction(&construction, level)?;
                if let Some(path) = &report {
                    write_json(path, &r)?;
                }
                Ok(rk_outcome(&r))
            }
            RkAction::Verify { report } => {
                let stored: RunReport = read_json(&report)?;
                let fresh = run_construction(&stored.construction, stored.level)?;
                let same = fresh == stored;
                let mut o = rk_outcome(&fresh);
                o.ok &= same;
                o.text = format!("{}\nreport reproduced: {same}", o.text);
                o.json = json!({ "reproduced": same, "run": o.json });
                Ok(o)
            }
        },
        Command::Egorov { action } => match action {
            EgorovAction::Classify { ideal } => {
                let e = IdealExpr::parse(&ideal)?;
                let c = classify(&e);
                let a = &c.attributes;
                let text = format!(
                    "{e}\n  egorov: {} ({})\n  analytic: {}  tall: {}  countably generated: {}  non-pathological F_sigma: {}",
                    a.egorov.value,
                    a.egorov.provenance.as_deref().unwrap_or("no rule applies"),
                    a.analytic.value,
                    a.tall.value,
                    a.countably_generated.value,
                    a.nonpath_fsigma.value
                );
                let ok = c.conflicts.is_empty();
                Ok(outcome(&c, text, ok))
            }
            EgorovAction::Construct {
                witness,
                depth,
                emit,
            } => {
                let (_, _, doc) = egorovlab::construct(&witness, depth)?;
                if let Some(path) = &emit {
                    write_json(path, &doc)?;
                }
                let ok = doc.witness_audit.passed() && doc.tree_audit.passed();
                let text = format!(
                    "{} at depth {}: {} nodes, witness audit {}, tree audit {}",
                    doc.witness,
                    doc.depth,
                    doc.nodes.len(),
                    doc.witness_audit.passed(),
                    doc.tree_audit.passed()
                );
                Ok(outcome(&doc, text, ok))
            }
            EgorovAction::Violate { tree, set, level } => {
                let doc: TreeDocument = read_json(&tree)?;
                let (w, t) = egorovlab::load(&doc)?;
                let m: IntervalSet = set.parse()?;
                let r = egorovlab::violation_check(&t, &w, &m, level)?;
                let text = format!(
                    "α = {}, level {}: best ratio {}, {} hits, φ(hits) = {}, passed {}",
                    crate::rational::format_rational(&r.alpha),
                    r.level,
                    crate::rational::format_rational(&r.best_ratio),
                    r.hit_children.len(),
                    r.phi_of_hits,
                    r.passed()
                );
                let ok = r.passed();
                Ok(outcome(&r, text, ok))
            }
        },
        Command::Catalogue { action: CatalogueAction::List } => {
            let ideals: Vec<&str> = GOLDEN.iter().map(|(_, e, _)| *e).collect();
            let j = json!({
                "submeasures": Submeasure::catalogue_ids(),
                "ideals": ideals,
                "constructions": CONSTRUCTIONS,
                "witnesses": ["ib"],
            });
            let text = format!(
                "submeasures: {}\nideals: {}\nconstructions: {}\nwitnesses: ib",
                Submeasure::catalogue_ids().join(", "),
                ideals.join(", "),
                CONSTRUCTIONS.join(", ")
            );
            Ok(outcome(&j, text, true))
        }
        Command::Golden => {
            let rows = example_verdicts();
            let ok = rows.iter().all(|r| r.passed());
            let lines: Vec<String> = rows
                .iter()
                .map(|r| {
                    format!(
                        "{:<18} {:<20} expected {:<3} derived {:<7} via {:<8} {}",
                        r.name,
                        r.expr,
                        r.expected.to_string(),
                        r.derived.to_string(),
                        r.rule,
                        if r.passed() { "ok" } else { "FAIL" }
                    )
                })
                .collect();
            Ok(outcome(&rows, lines.join("\n"), ok))
        }
    }
}

fn rk_outcome(r: &RunReport) -> Outcome {
    let failures = &r.report.failures;
    let text = format!(
        "{} at level {}: {} checks, consistent {}{}",
        r.construction,
        r.level,
        r.report.checks.len(),
        r.report.consistent,
        if failures.is_empty() {
            String::new()
        } else {
            format!("\n  {}", failures.join("\n  "))
        }
    );
    outcome(r, text, r.report.consistent)
}

/// Parse `args` (including the program name), run, and print to `out` / `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return code;
        }
    };
    let format = cli.format;
    match execute(cli) {
        Ok(o) => {
            let body = match format {
                Format::Json => serde_json::to_string_pretty(&o.json).expect("json"),
                Format::Text => o.text,
            };
            let _ = writeln!(out, "{body}");
            if o.ok {
                0
            } else {
                1
            }
        }
        Err(Failure::Usage(message)) => {
            let _ = writeln!(err, "error: {message}");
            2
        }
    }
}
