use std::fmt::Write as _;

use crate::logic::{fof_axiom, is_universal, print_formula};

use super::{AxiomError, GeneratedAxiom};

/// Deterministic tag: `rule{id}` for order-0 rules, `rule{id}_r{r}_i{i}` otherwise.
pub fn sentence_name(a: &GeneratedAxiom) -> String {
    match (a.round, a.index) {
        (Some(r), Some(i)) => format!("rule{}_r{r}_i{i}", a.rule),
        _ => format!("rule{}", a.rule),
    }
}

fn header(a: &GeneratedAxiom) -> String {
    match (a.round, a.index) {
        (Some(r), Some(i)) => format!("rule {} r {r} i {i}", a.rule),
        _ => format!("rule {} order 0", a.rule),
    }
}

/// Which emitted sentences are universal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomReport {
    pub total: usize,
    pub non_universal: Vec<String>,
}

impl AxiomReport {
    pub fn new(axioms: &[GeneratedAxiom]) -> Self {
        let non_universal =
            axioms.iter().filter(|a| !is_universal(&a.sentence).unwrap_or(false)).map(sentence_name).collect();
        AxiomReport { total: axioms.len(), non_universal }
    }

    pub fn all_universal(&self) -> bool {
        self.non_universal.is_empty()
    }

    fn footer(&self) -> String {
        if self.all_universal() {
            format!("universal: yes ({} of {})", self.total, self.total)
        } else {
            format!(
                "universal: no ({} of {}; not universal: {})",
                self.total - self.non_universal.len(),
                self.total,
                self.non_universal.join(" ")
            )
        }
    }
}

/// One S-expression per line, each preceded by a `;` header, with a universality footer.
pub fn render_native(axioms: &[GeneratedAxiom]) -> String {
    let mut out = String::new();
    for a in axioms {
        let _ = writeln!(out, "; {}\n{}", header(a), print_formula(&a.sentence));
    }
    let _ = writeln!(out, "; {}", AxiomReport::new(axioms).footer());
    out
}

/// `fof` lines named by [`sentence_name`], with `%` comments.
pub fn render_tptp(axioms: &[GeneratedAxiom]) -> Result<String, AxiomError> {
    let mut out = String::new();
    for a in axioms {
        let _ = writeln!(out, "% {}\n{}", header(a), fof_axiom(&sentence_name(a), &a.sentence)?);
    }
    let _ = writeln!(out, "% {}", AxiomReport::new(axioms).footer());
    Ok(out)
}
