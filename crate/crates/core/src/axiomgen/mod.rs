//! First-order axioms for separation rules.
//!
//! For a positive rule, `alpha(Z, Zbar, r, i)` says that the existential player survives
//! `r` more rounds of the game restricted to conjuncts `0..=i`, where the variables in
//! `Z_k` and `Zbar_k` name the elements already decided into and out of `C_k`. Monadic
//! atoms are replaced by equalities with those variables, so every formula is in the
//! base signature. `beta` adds the opening round and `beta_hat` starts from nothing.

mod output;

use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

use crate::logic::{Formula, Symbol, Term, TptpError};
use crate::separation::{ClosureConjunct, PositiveRule, SeparationError, SeparationRule, SeparationScheme};

pub use output::{render_native, render_tptp, sentence_name, AxiomReport};

/// Default cap on the estimated node count of one generated sentence.
pub const DEFAULT_NODE_CAP: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AxiomError {
    #[error("variable {0} is already in use by the decided-variable sets")]
    NotFresh(Symbol),
    #[error("pad translation needs a quantifier-free formula")]
    Quantified,
    #[error("rule {rule} at r={r}, i={i}: estimated {estimate:.3e} nodes exceeds the cap of {cap}")]
    SizeGuard { rule: usize, r: usize, i: usize, estimate: f64, cap: usize },
    #[error("rule {rule} has order {found}, the variable sets have {expected} entries")]
    OrderMismatch { rule: usize, expected: usize, found: usize },
    #[error(transparent)]
    Separation(#[from] SeparationError),
    #[error(transparent)]
    Tptp(#[from] TptpError),
}

/// Variables naming elements decided into (`inside[k-1]`) and out of (`outside[k-1]`) `C_k`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VarSetVector {
    pub inside: Vec<Vec<Symbol>>,
    pub outside: Vec<Vec<Symbol>>,
}

impl VarSetVector {
    pub fn empty(order: usize) -> Self {
        VarSetVector { inside: vec![Vec::new(); order], outside: vec![Vec::new(); order] }
    }

    pub fn order(&self) -> usize {
        self.inside.len()
    }

    pub fn names(&self) -> BTreeSet<Symbol> {
        self.inside.iter().chain(&self.outside).flatten().cloned().collect()
    }

    fn contains(&self, v: &Symbol) -> bool {
        self.inside.iter().chain(&self.outside).any(|s| s.contains(v))
    }

    /// Largest `|Z_k| + |Zbar_k|`.
    fn width(&self) -> usize {
        self.inside.iter().zip(&self.outside).map(|(a, b)| a.len() + b.len()).max().unwrap_or(0)
    }
}

/// A map from `vars x {1..K}` to `{0, 1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChoiceFunction {
    order: usize,
    bits: Vec<bool>,
}

impl ChoiceFunction {
    pub fn new(vars: usize, order: usize, value: impl Fn(usize, usize) -> bool) -> Self {
        let bits = (0..vars).flat_map(|p| (1..=order).map(move |k| (p, k))).map(|(p, k)| value(p, k)).collect();
        ChoiceFunction { order, bits }
    }

    /// Value at variable position `pos` and predicate `k` (1-based).
    pub fn get(&self, pos: usize, k: usize) -> bool {
        self.bits[pos * self.order + k - 1]
    }

    /// All functions on `vars` positions, lexicographic in `(position, k)` from all zeros.
    pub fn all(vars: usize, order: usize) -> impl Iterator<Item = ChoiceFunction> {
        let width = vars * order;
        (0..1u64 << width)
            .map(move |c| ChoiceFunction { order, bits: (0..width).map(|b| c >> (width - 1 - b) & 1 == 1).collect() })
    }
}

/// Adds each `ys[p]` to `Z_k` or `Zbar_k` according to `f(p, k)`.
pub fn delta(z: &VarSetVector, ys: &[Symbol], f: &ChoiceFunction) -> Result<VarSetVector, AxiomError> {
    if let Some(y) = ys.iter().find(|y| z.contains(y)) {
        return Err(AxiomError::NotFresh(y.clone()));
    }
    let mut out = z.clone();
    for (p, y) in ys.iter().enumerate() {
        for k in 1..=z.order() {
            let side = if f.get(p, k) { &mut out.inside } else { &mut out.outside };
            side[k - 1].push(y.clone());
        }
    }
    Ok(out)
}

/// `and_k and_{z in Z_k, w in Zbar_k} not (z = w)`.
pub fn disjointness_formula(z: &VarSetVector) -> Formula {
    let mut parts = Vec::new();
    for (ins, outs) in z.inside.iter().zip(&z.outside) {
        for a in ins {
            for b in outs {
                parts.push(Formula::not(Formula::eq(Term::Var(a.clone()), Term::Var(b.clone()))));
            }
        }
    }
    Formula::conj(parts)
}

/// Replaces `C_k(t)` by `or_{z in Z_k} t = z`.
pub fn pad_translate(psi: &Formula, z: &VarSetVector) -> Result<Formula, AxiomError> {
    if !psi.is_quantifier_free() {
        return Err(AxiomError::Quantified);
    }
    Ok(psi.replace_monadic(&mut |k, t| {
        let zs = z.inside.get(k - 1).map(Vec::as_slice).unwrap_or(&[]);
        Formula::disj(zs.iter().map(|v| Formula::eq(t.clone(), Term::Var(v.clone()))).collect())
    }))
}

fn pad(psi: &Formula, z: &VarSetVector) -> Formula {
    psi.replace_monadic(&mut |k, t| {
        Formula::disj(z.inside[k - 1].iter().map(|v| Formula::eq(t.clone(), Term::Var(v.clone()))).collect())
    })
}

/// Builds the formulas for one rule, naming variables after `rule_index`.
#[derive(Debug, Clone, Copy)]
pub struct AxiomGenerator {
    pub rule_index: usize,
    pub node_cap: usize,
}

impl Default for AxiomGenerator {
    fn default() -> Self {
        AxiomGenerator { rule_index: 0, node_cap: DEFAULT_NODE_CAP }
    }
}

struct Renamed {
    vars: Vec<Symbol>,
    guard: Formula,
    body: Formula,
}

impl AxiomGenerator {
    pub fn new(rule_index: usize) -> Self {
        AxiomGenerator { rule_index, ..Default::default() }
    }

    pub fn with_node_cap(mut self, cap: usize) -> Self {
        self.node_cap = cap;
        self
    }

    /// Conjunct `j` at `depth` with fresh names for its tuple and bound variables.
    fn rename_conjunct(&self, c: &ClosureConjunct, depth: usize, j: usize) -> Renamed {
        let r = self.rule_index;
        let vars: Vec<Symbol> = (0..c.vars.len()).map(|p| format!("y_{r}_{depth}_{j}_{p}").into()).collect();
        let map: HashMap<Symbol, Symbol> = c.vars.iter().cloned().zip(vars.iter().cloned()).collect();
        let mut n = 0;
        let guard = c.gamma.standardize(&map, &mut || {
            n += 1;
            format!("b_{r}_{depth}_{j}_{}", n - 1).into()
        });
        Renamed { vars, guard, body: c.psi.rename_free(&map) }
    }

    fn estimate_alpha(&self, conjuncts: &[ClosureConjunct], order: usize, width: usize, rounds: usize) -> f64 {
        if rounds == 0 {
            let half = width as f64 / 2.0;
            return 1.0 + order as f64 * half * half * 4.0;
        }
        1.0 + conjuncts
            .iter()
            .map(|c| {
                let m = c.vars.len();
                let w = width + m;
                let branches = 2f64.powi((order * m) as i32);
                let padded = c.psi.node_count() as f64 + c.psi.monadic_atom_count() as f64 * (3 * w + 1) as f64;
                3.0 + m as f64
                    + c.gamma.node_count() as f64
                    + branches * (1.0 + padded + self.estimate_alpha(conjuncts, order, w, rounds - 1))
            })
            .sum::<f64>()
    }

    fn estimate_beta(&self, p: &PositiveRule, conjuncts: &[ClosureConjunct], width: usize, r: usize) -> f64 {
        let n = p.vars().len();
        let w = width + n;
        let branches = 2f64.powi((p.order() * n) as i32);
        let padded = p.eta().node_count() as f64 + p.eta().monadic_atom_count() as f64 * (3 * w + 1) as f64;
        3.0 + n as f64
            + p.mu().node_count() as f64
            + branches * (1.0 + padded + self.estimate_alpha(conjuncts, p.order(), w, r))
    }

    fn guard(&self, estimate: f64, r: usize, i: usize) -> Result<(), AxiomError> {
        if estimate > self.node_cap as f64 {
            return Err(AxiomError::SizeGuard { rule: self.rule_index, r, i, estimate, cap: self.node_cap });
        }
        Ok(())
    }

    fn check_order(&self, p: &PositiveRule, z: &VarSetVector) -> Result<(), AxiomError> {
        if z.order() != p.order() || z.outside.len() != p.order() {
            return Err(AxiomError::OrderMismatch { rule: self.rule_index, expected: z.order(), found: p.order() });
        }
        Ok(())
    }

    fn alpha_rec(
        &self,
        conjuncts: &[ClosureConjunct],
        z: &VarSetVector,
        rounds: usize,
        depth: usize,
    ) -> Result<Formula, AxiomError> {
        if rounds == 0 {
            return Ok(disjointness_formula(z));
        }
        let mut parts = Vec::with_capacity(conjuncts.len());
        for (j, c) in conjuncts.iter().enumerate() {
            let c = self.rename_conjunct(c, depth, j);
            let mut branches = Vec::new();
            for f in ChoiceFunction::all(c.vars.len(), z.order()) {
                let next = delta(z, &c.vars, &f)?;
                let rest = self.alpha_rec(conjuncts, &next, rounds - 1, depth + 1)?;
                branches.push(Formula::And(vec![pad(&c.body, &next), rest]));
            }
            parts.push(Formula::forall(c.vars, Formula::implies(c.guard, Formula::disj(branches))));
        }
        Ok(Formula::conj(parts))
    }

    /// Survival of `r` further rounds from the position named by `z`, conjuncts `0..=i`.
    pub fn alpha(&self, p: &PositiveRule, z: &VarSetVector, r: usize, i: usize) -> Result<Formula, AxiomError> {
        self.check_order(p, z)?;
        let conjuncts = p.conjuncts(i);
        self.guard(self.estimate_alpha(&conjuncts, p.order(), z.width(), r), r, i)?;
        self.alpha_rec(&conjuncts, z, r, 1)
    }

    /// The opening round followed by `alpha`, universally closed over the rule's variables.
    pub fn beta(&self, p: &PositiveRule, z: &VarSetVector, r: usize, i: usize) -> Result<Formula, AxiomError> {
        self.check_order(p, z)?;
        let conjuncts = p.conjuncts(i);
        self.guard(self.estimate_beta(p, &conjuncts, z.width(), r), r, i)?;
        let rx = self.rule_index;
        let xs: Vec<Symbol> = (0..p.vars().len()).map(|q| format!("x_{rx}_0_0_{q}").into()).collect();
        let map: HashMap<Symbol, Symbol> = p.vars().iter().cloned().zip(xs.iter().cloned()).collect();
        let mut n = 0;
        let mu = p.mu().standardize(&map, &mut || {
            n += 1;
            format!("b_{rx}_0_0_{}", n - 1).into()
        });
        let eta = p.eta().rename_free(&map);
        let mut branches = Vec::new();
        for f in ChoiceFunction::all(xs.len(), p.order()) {
            let next = delta(z, &xs, &f)?;
            let rest = self.alpha_rec(&conjuncts, &next, r, 1)?;
            branches.push(Formula::And(vec![pad(&eta, &next), rest]));
        }
        Ok(Formula::forall(xs, Formula::implies(mu, Formula::disj(branches))))
    }

    /// `beta` from the empty position; an order-0 rule is returned as is.
    pub fn beta_hat(&self, rule: &SeparationRule, r: usize, i: usize) -> Result<Formula, AxiomError> {
        match rule {
            SeparationRule::Order0(f) => Ok(f.clone()),
            SeparationRule::Positive(p) => self.beta(p, &VarSetVector::empty(p.order()), r, i),
        }
    }
}

pub fn alpha(p: &PositiveRule, z: &VarSetVector, r: usize, i: usize) -> Result<Formula, AxiomError> {
    AxiomGenerator::default().alpha(p, z, r, i)
}

pub fn beta(p: &PositiveRule, z: &VarSetVector, r: usize, i: usize) -> Result<Formula, AxiomError> {
    AxiomGenerator::default().beta(p, z, r, i)
}

pub fn beta_hat(rule: &SeparationRule, r: usize, i: usize) -> Result<Formula, AxiomError> {
    AxiomGenerator::default().beta_hat(rule, r, i)
}

/// One emitted sentence; `round` and `index` are `None` for order-0 rules.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedAxiom {
    pub rule: usize,
    pub round: Option<usize>,
    pub index: Option<usize>,
    pub sentence: Formula,
}

/// Every `beta_hat` with `r <= r_max` and `i <= i_max` (capped at the last explicit
/// conjunct), plus each order-0 rule once, ordered by rule, then `r`, then `i`.
pub fn generate_axioms(
    scheme: &SeparationScheme,
    r_max: usize,
    i_max: usize,
    node_cap: usize,
) -> Result<Vec<GeneratedAxiom>, AxiomError> {
    let mut out = Vec::new();
    for (id, rule) in scheme.rules().iter().enumerate() {
        let gen = AxiomGenerator::new(id).with_node_cap(node_cap);
        match rule {
            SeparationRule::Order0(f) => {
                out.push(GeneratedAxiom { rule: id, round: None, index: None, sentence: f.clone() });
            }
            SeparationRule::Positive(p) => {
                let last = p.tau().effective_max_index(i_max);
                for r in 0..=r_max {
                    for i in 0..=last {
                        let sentence = gen.beta_hat(rule, r, i)?;
                        out.push(GeneratedAxiom { rule: id, round: Some(r), index: Some(i), sentence });
                    }
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests;
