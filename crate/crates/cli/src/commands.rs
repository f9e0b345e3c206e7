use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use serde_json::json;

use sepsub::axiomgen::{generate_axioms, render_native, render_tptp, AxiomGenerator, AxiomReport};
use sepsub::game::{check_membership_game, GamePosition, GameSolver, Survival};
use sepsub::logic::parse::{formula_from_sexpr, read_sexprs};
use sepsub::logic::{eval_sentence, print_formula, simplify, FiniteStructure, Signature};
use sepsub::schemes::{builtin_scheme, parse_scheme_file};
use sepsub::separation::{
    check_membership_direct, check_pseudoelementary, satisfies_superclass, to_pseudoelementary, SeparationRule,
    SeparationScheme, Verdict,
};

use crate::report::{Report, EXIT_NO, EXIT_YES};
use crate::{Command, Format, Method};

pub struct Outcome {
    pub report: Report,
    /// Set when stdout carries the command's payload.
    pub report_to_stderr: bool,
}

impl From<Report> for Outcome {
    fn from(report: Report) -> Self {
        Outcome { report, report_to_stderr: false }
    }
}

const BUILTIN_PREFIX: &str = "builtin:";

fn load_scheme(arg: &str) -> Result<SeparationScheme> {
    if let Some(label) = arg.strip_prefix(BUILTIN_PREFIX) {
        return Ok(builtin_scheme(label)?);
    }
    let text = fs::read_to_string(arg).with_context(|| format!("reading scheme {arg}"))?;
    parse_scheme_file(&text).with_context(|| format!("parsing scheme {arg}"))
}

fn load_structure(path: &Path, sig: Option<&Signature>) -> Result<FiniteStructure> {
    let text = fs::read_to_string(path).with_context(|| format!("reading structure {}", path.display()))?;
    FiniteStructure::from_json(&text, sig).with_context(|| format!("parsing structure {}", path.display()))
}

/// The explicit bound, or the last explicit conjunct; generated rules need an explicit bound.
fn max_index(scheme: &SeparationScheme, given: Option<usize>) -> Result<usize> {
    match given {
        Some(i) => Ok(i),
        None => scheme
            .default_max_index()
            .ok_or_else(|| anyhow!("--max-index is required for schemes with generated closure rules")),
    }
}

/// Writes to a temporary file beside `path`, then renames it into place.
fn write_atomically(path: &Path, contents: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let mut tmp =
        tempfile::NamedTempFile::new_in(&dir).with_context(|| format!("creating a file in {}", dir.display()))?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

/// Writes the payload to `output` or stdout; in the latter case the report goes to stderr.
fn emit(report: Report, output: Option<&Path>, payload: &str) -> Result<Outcome> {
    match output {
        Some(path) => {
            write_atomically(path, payload)?;
            Ok(report.into())
        }
        None => {
            print!("{payload}");
            Ok(Outcome { report, report_to_stderr: true })
        }
    }
}

fn membership_exit(v: Verdict) -> i32 {
    if v == Verdict::In {
        EXIT_YES
    } else {
        EXIT_NO
    }
}

pub fn run(command: Command) -> Result<Outcome> {
    match command {
        Command::Check { structure, scheme, max_index: i, method, size_cap } => {
            check(&structure, &scheme.scheme, i, method, size_cap)
        }
        Command::Game { structure, scheme, rule, rounds, omega, survival, reduced, max_index: i, cap } => {
            game(&structure, &scheme.scheme, rule, rounds, omega, survival, reduced, i, cap)
        }
        Command::Axioms { scheme, rounds, max_index: i, format, simplify, output, node_cap } => {
            axioms(&scheme.scheme, rounds, i, format, simplify, output.as_deref(), node_cap)
        }
        Command::Eval { structure, formulas, scheme } => eval(&structure, &formulas, scheme.as_deref()),
        Command::Crosscheck { structure, scheme, rounds, max_index: i, node_cap } => {
            crosscheck(&structure, &scheme.scheme, rounds, i, node_cap)
        }
        Command::Pseudo { scheme, max_index: i, output } => pseudo(&scheme.scheme, i, output.as_deref()),
        Command::PseudoCheck { structure, scheme, max_index: i, bit_cap } => {
            pseudo_check(&structure, &scheme.scheme, i, bit_cap)
        }
        Command::Scheme { name, output } => export(&name, output.as_deref()),
    }
}

fn check(path: &Path, scheme_arg: &str, i: Option<usize>, method: Method, size_cap: usize) -> Result<Outcome> {
    let mut report = Report::new("check");
    let scheme = load_scheme(scheme_arg)?;
    let a = load_structure(path, Some(scheme.signature()))?;
    let i = max_index(&scheme, i)?;
    report.detail("max_index", i);
    let mut direct = None;
    let mut by_game = None;
    if method != Method::Game {
        let t = Instant::now();
        direct = Some(check_membership_direct(&a, &scheme, i, size_cap)?);
        report.time("direct", t);
    }
    if method != Method::Direct {
        let t = Instant::now();
        by_game = Some(check_membership_game(&a, &scheme, i)?);
        report.time("game", t);
    }
    let verdict = match (direct, by_game) {
        (Some(d), Some(g)) if d != g => {
            bail!("direct enumeration says {d} but the game solver says {g}; this is a bug")
        }
        (Some(d), Some(_)) => {
            report.detail("method", "both");
            report.detail("agree", true);
            d
        }
        (Some(d), None) => {
            report.detail("method", "direct");
            d
        }
        (None, Some(g)) => {
            report.detail("method", "game");
            g
        }
        (None, None) => unreachable!("at least one method runs"),
    };
    report.verdict(verdict, membership_exit(verdict));
    Ok(report.into())
}

#[allow(clippy::too_many_arguments)]
fn game(
    path: &Path,
    scheme_arg: &str,
    rule_id: usize,
    rounds: Option<u32>,
    omega: bool,
    survival: bool,
    reduced: bool,
    i: Option<usize>,
    cap: u32,
) -> Result<Outcome> {
    let mut report = Report::new("game");
    let scheme = load_scheme(scheme_arg)?;
    let a = load_structure(path, Some(scheme.signature()))?;
    let rule = scheme.rule(rule_id).ok_or_else(|| anyhow!("scheme has no rule {rule_id}"))?;
    let i = match i {
        Some(i) => i,
        None => rule
            .as_positive()
            .ok_or_else(|| anyhow!("rule {rule_id} has order 0; games need a positive rule"))?
            .tau()
            .default_max_index()
            .ok_or_else(|| anyhow!("--max-index is required for generated closure rules"))?,
    };
    let mut solver = GameSolver::new(&a, rule, i)?;
    report.detail("rule", rule_id);
    report.detail("max_index", i);
    let t = Instant::now();
    if let Some(r) = rounds {
        let won = solver.has_r_strategy(GamePosition::EMPTY, r, !reduced)?;
        report.detail("mode", "rounds");
        report.detail("rounds", r);
        report.detail("reduced", reduced);
        report.verdict(won, if won { EXIT_YES } else { EXIT_NO });
    } else if omega {
        let won = solver.has_omega_strategy()?;
        report.detail("mode", "omega");
        report.verdict(if won { "omega" } else { "finite" }, if won { EXIT_YES } else { EXIT_NO });
    } else if survival {
        let s = solver.max_survival_rounds(cap)?;
        report.detail("mode", "survival");
        report.detail("cap", cap);
        let exit = if matches!(s, Survival::NoStrategy) { EXIT_NO } else { EXIT_YES };
        report.verdict(s, exit);
    } else {
        bail!("choose one of --rounds R, --omega or --survival");
    }
    report.time("solve", t);
    report.detail("positions", solver.explored_positions());
    Ok(report.into())
}

fn axioms(
    scheme_arg: &str,
    rounds: usize,
    i: Option<usize>,
    format: Format,
    simplify_output: bool,
    output: Option<&Path>,
    node_cap: usize,
) -> Result<Outcome> {
    let mut report = Report::new("axioms");
    let scheme = load_scheme(scheme_arg)?;
    let i = max_index(&scheme, i)?;
    let t = Instant::now();
    let mut sentences = generate_axioms(&scheme, rounds, i, node_cap)?;
    if simplify_output {
        for a in &mut sentences {
            a.sentence = simplify(&a.sentence);
        }
    }
    report.time("generate", t);
    let payload = match format {
        Format::Sexpr => render_native(&sentences),
        Format::Tptp => render_tptp(&sentences)?,
    };
    let universality = AxiomReport::new(&sentences);
    report.detail("sentences", sentences.len());
    report.detail("rounds", rounds);
    report.detail("max_index", i);
    report.detail("universal", universality.all_universal());
    if !universality.all_universal() {
        report.detail("non_universal", universality.non_universal.join(","));
    }
    if let Some(p) = output {
        report.detail("output", p.display().to_string());
    }
    report.verdict("written", EXIT_YES);
    emit(report, output, &payload)
}

fn eval(path: &Path, formulas: &Path, scheme_arg: Option<&str>) -> Result<Outcome> {
    let mut report = Report::new("eval");
    let scheme = scheme_arg.map(load_scheme).transpose()?;
    let a = load_structure(path, scheme.as_ref().map(|s| s.signature()))?;
    let sig = match &scheme {
        Some(s) => s.signature().clone(),
        None => a.signature(),
    };
    let text = fs::read_to_string(formulas).with_context(|| format!("reading {}", formulas.display()))?;
    let mut all = true;
    let mut results = Vec::new();
    for e in read_sexprs(&text)? {
        let f = formula_from_sexpr(&e, &sig)?;
        if !f.is_closed() {
            bail!("formula at line {} has free variables: {}", e.pos().line, print_formula(&f));
        }
        let holds = eval_sentence(&a, &f)?;
        all &= holds;
        results.push(json!(holds));
    }
    report.detail("formulas", results.len());
    report.detail("results", serde_json::Value::Array(results));
    report.verdict(all, if all { EXIT_YES } else { EXIT_NO });
    Ok(report.into())
}

fn crosscheck(path: &Path, scheme_arg: &str, rounds: usize, i: Option<usize>, node_cap: usize) -> Result<Outcome> {
    let mut report = Report::new("crosscheck");
    let scheme = load_scheme(scheme_arg)?;
    let a = load_structure(path, Some(scheme.signature()))?;
    let i_max = max_index(&scheme, i)?;
    let mut cells = 0usize;
    let mut mismatches = Vec::new();
    let t = Instant::now();
    for (id, rule) in scheme.rules().iter().enumerate() {
        let SeparationRule::Positive(p) = rule else { continue };
        let gen = AxiomGenerator::new(id).with_node_cap(node_cap);
        for i in 0..=p.tau().effective_max_index(i_max) {
            let mut solver = GameSolver::new(&a, rule, i)?;
            for r in 0..=rounds {
                let by_formula = eval_sentence(&a, &gen.beta_hat(rule, r, i)?)?;
                let by_game = solver.has_r_strategy(GamePosition::EMPTY, r as u32, true)?;
                cells += 1;
                if by_formula != by_game {
                    mismatches.push(format!("rule{id}_r{r}_i{i}"));
                }
            }
        }
    }
    report.time("cells", t);
    report.detail("cells", cells);
    report.detail("mismatches", mismatches.len());
    if !mismatches.is_empty() {
        report.detail("mismatched", mismatches.join(","));
        report.verdict("mismatch", EXIT_NO);
    } else {
        report.verdict("agree", EXIT_YES);
    }
    Ok(report.into())
}

fn truncated(scheme: SeparationScheme, i: Option<usize>) -> Result<SeparationScheme> {
    if !scheme.has_generated_rules() {
        return Ok(scheme);
    }
    let i = i.ok_or_else(|| anyhow!("--max-index is required for schemes with generated closure rules"))?;
    Ok(scheme.truncated(i))
}

fn pseudo(scheme_arg: &str, i: Option<usize>, output: Option<&Path>) -> Result<Outcome> {
    let mut report = Report::new("pseudo");
    let scheme = truncated(load_scheme(scheme_arg)?, i)?;
    let theory = to_pseudoelementary(&scheme)?;
    let mut payload = format!("; signature {}\n", theory.signature);
    for s in &theory.sentences {
        payload.push_str(&format!("; {}\n{}\n", s.label, print_formula(&s.formula)));
    }
    report.detail("sentences", theory.sentences.len());
    report.detail(
        "fresh_relations",
        theory.fresh.iter().map(|f| format!("{}/{}", f.name, f.arity)).collect::<Vec<_>>().join(","),
    );
    if let Some(p) = output {
        report.detail("output", p.display().to_string());
    }
    report.verdict("written", EXIT_YES);
    emit(report, output, &payload)
}

fn pseudo_check(path: &Path, scheme_arg: &str, i: Option<usize>, bit_cap: usize) -> Result<Outcome> {
    let mut report = Report::new("pseudo-check");
    let scheme = truncated(load_scheme(scheme_arg)?, i)?;
    let a = load_structure(path, Some(scheme.signature()))?;
    let t = Instant::now();
    let verdict = if !satisfies_superclass(&a, &scheme)? {
        Verdict::SuperclassViolation
    } else if check_pseudoelementary(&a, &to_pseudoelementary(&scheme)?, bit_cap)? {
        Verdict::In
    } else {
        Verdict::Out
    };
    report.time("search", t);
    report.verdict(verdict, membership_exit(verdict));
    Ok(report.into())
}

fn export(name: &str, output: Option<&Path>) -> Result<Outcome> {
    let mut report = Report::new("scheme");
    let label = name.strip_prefix(BUILTIN_PREFIX).unwrap_or(name);
    let scheme = builtin_scheme(label)?;
    report.detail("name", label);
    report.detail("rules", scheme.rules().len());
    if let Some(p) = output {
        report.detail("output", p.display().to_string());
    }
    report.verdict("written", EXIT_YES);
    emit(report, output, &sepsub::separation::print_scheme(&scheme))
}
