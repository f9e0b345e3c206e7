use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use crate::logic::{Formula, Signature, Symbol};

use super::SeparationError;

/// One clause `forall ys (gamma -> psi)` of a closure rule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosureConjunct {
    pub vars: Vec<Symbol>,
    /// Pure first-order guard.
    pub gamma: Formula,
    /// Quantifier-free, may mention `C_1..C_K`.
    pub psi: Formula,
}

impl ClosureConjunct {
    pub fn new(vars: Vec<Symbol>, gamma: Formula, psi: Formula) -> Self {
        ClosureConjunct { vars, gamma, psi }
    }

    pub(crate) fn validate(&self, order: usize, what: &str) -> Result<(), SeparationError> {
        let bound: BTreeSet<Symbol> = self.vars.iter().cloned().collect();
        if bound.len() != self.vars.len() {
            return Err(SeparationError::invalid(format!("{what}: repeated bound variable")));
        }
        if !self.gamma.is_pure() {
            return Err(SeparationError::invalid(format!("{what}: guard contains a monadic atom")));
        }
        if !self.psi.is_quantifier_free() {
            return Err(SeparationError::invalid(format!("{what}: body is not quantifier-free")));
        }
        check_free(&self.gamma, &bound, &format!("{what} guard"))?;
        check_free(&self.psi, &bound, &format!("{what} body"))?;
        check_monadic(&self.psi, order, &format!("{what} body"))
    }
}

pub(crate) fn check_free(f: &Formula, allowed: &BTreeSet<Symbol>, what: &str) -> Result<(), SeparationError> {
    if let Some(v) = f.free_vars().into_iter().find(|v| !allowed.contains(v)) {
        return Err(SeparationError::invalid(format!("{what}: free variable `{v}` is not bound by the rule")));
    }
    Ok(())
}

fn check_monadic(f: &Formula, order: usize, what: &str) -> Result<(), SeparationError> {
    let k = f.max_monadic_index();
    if k > order {
        return Err(SeparationError::invalid(format!("{what}: uses C_{k} but the rule has order {order}")));
    }
    Ok(())
}

pub type ConjunctGenerator = Arc<dyn Fn(usize) -> ClosureConjunct + Send + Sync>;

/// The closure part of a positive rule.
#[derive(Clone)]
pub enum ClosureRule {
    /// No conjuncts at all.
    Top,
    /// A finite, non-empty list indexed from 0.
    Explicit(Vec<ClosureConjunct>),
    /// An infinite list produced on demand.
    Generated { name: String, args: Vec<String>, generator: ConjunctGenerator },
}

impl fmt::Debug for ClosureRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClosureRule::Top => f.write_str("Top"),
            ClosureRule::Explicit(cs) => f.debug_tuple("Explicit").field(cs).finish(),
            ClosureRule::Generated { name, args, .. } => {
                f.debug_struct("Generated").field("name", name).field("args", args).finish_non_exhaustive()
            }
        }
    }
}

impl PartialEq for ClosureRule {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (ClosureRule::Top, ClosureRule::Top) => true,
            (ClosureRule::Explicit(a), ClosureRule::Explicit(b)) => a == b,
            (ClosureRule::Generated { name: n1, args: a1, .. }, ClosureRule::Generated { name: n2, args: a2, .. }) => {
                n1 == n2 && a1 == a2
            }
            _ => false,
        }
    }
}

impl ClosureRule {
    pub fn generated(
        name: impl Into<String>,
        args: Vec<String>,
        generator: impl Fn(usize) -> ClosureConjunct + Send + Sync + 'static,
    ) -> Self {
        ClosureRule::Generated { name: name.into(), args, generator: Arc::new(generator) }
    }

    /// Conjuncts with index at most `max_index`.
    pub fn truncate(&self, max_index: usize) -> Vec<ClosureConjunct> {
        match self {
            ClosureRule::Top => Vec::new(),
            ClosureRule::Explicit(cs) => cs.iter().take(max_index.saturating_add(1)).cloned().collect(),
            ClosureRule::Generated { generator, .. } => (0..=max_index).map(|i| generator(i)).collect(),
        }
    }

    /// Number of conjuncts, or `None` for a generated rule.
    pub fn len(&self) -> Option<usize> {
        match self {
            ClosureRule::Top => Some(0),
            ClosureRule::Explicit(cs) => Some(cs.len()),
            ClosureRule::Generated { .. } => None,
        }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, ClosureRule::Top)
    }

    pub fn is_generated(&self) -> bool {
        matches!(self, ClosureRule::Generated { .. })
    }

    /// Largest meaningful index: the last explicit conjunct, 0 for `Top`, `None` if generated.
    pub fn default_max_index(&self) -> Option<usize> {
        self.len().map(|n| n.saturating_sub(1))
    }

    /// Clamps `i` to the last index that adds a conjunct.
    pub fn effective_max_index(&self, i: usize) -> usize {
        match self.default_max_index() {
            Some(last) => i.min(last),
            None => i,
        }
    }
}

/// A positive-order rule `forall xs (mu -> exists C_1..C_K (eta and tau))`.
#[derive(Debug, Clone, PartialEq)]
pub struct PositiveRule {
    order: usize,
    vars: Vec<Symbol>,
    mu: Formula,
    eta: Formula,
    tau: ClosureRule,
}

impl PositiveRule {
    pub fn new(
        order: usize,
        vars: Vec<Symbol>,
        mu: Formula,
        eta: Formula,
        tau: ClosureRule,
    ) -> Result<Self, SeparationError> {
        if order == 0 {
            return Err(SeparationError::invalid("positive rule must have order >= 1"));
        }
        let bound: BTreeSet<Symbol> = vars.iter().cloned().collect();
        if bound.len() != vars.len() {
            return Err(SeparationError::invalid("repeated round-0 variable"));
        }
        if !mu.is_pure() {
            return Err(SeparationError::invalid("premise contains a monadic atom"));
        }
        check_free(&mu, &bound, "premise")?;
        if !eta.is_quantifier_free() {
            return Err(SeparationError::invalid("initial condition is not quantifier-free"));
        }
        check_free(&eta, &bound, "initial condition")?;
        check_monadic(&eta, order, "initial condition")?;
        match &tau {
            ClosureRule::Explicit(cs) if cs.is_empty() => {
                return Err(SeparationError::invalid("explicit closure rule needs at least one conjunct; use top"))
            }
            ClosureRule::Explicit(cs) => {
                for (i, c) in cs.iter().enumerate() {
                    c.validate(order, &format!("conjunct {i}"))?;
                }
            }
            ClosureRule::Generated { generator, .. } => generator(0).validate(order, "conjunct 0")?,
            ClosureRule::Top => {}
        }
        Ok(PositiveRule { order, vars, mu, eta, tau })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn vars(&self) -> &[Symbol] {
        &self.vars
    }

    pub fn mu(&self) -> &Formula {
        &self.mu
    }

    pub fn eta(&self) -> &Formula {
        &self.eta
    }

    pub fn tau(&self) -> &ClosureRule {
        &self.tau
    }

    pub fn conjuncts(&self, max_index: usize) -> Vec<ClosureConjunct> {
        self.tau.truncate(max_index)
    }

    /// Same rule with a generated closure replaced by its first `max_index + 1` conjuncts.
    pub fn truncated(&self, max_index: usize) -> PositiveRule {
        let tau = match &self.tau {
            ClosureRule::Generated { .. } => ClosureRule::Explicit(self.tau.truncate(max_index)),
            other => other.clone(),
        };
        PositiveRule { tau, ..self.clone() }
    }

    fn check_signature(&self, sig: &Signature) -> Result<(), SeparationError> {
        sig.check_formula(&self.mu)?;
        sig.check_formula(&self.eta)?;
        if let ClosureRule::Explicit(cs) = &self.tau {
            for c in cs {
                sig.check_formula(&c.gamma)?;
                sig.check_formula(&c.psi)?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SeparationRule {
    /// A plain first-order sentence.
    Order0(Formula),
    Positive(PositiveRule),
}

impl SeparationRule {
    pub fn order0(sentence: Formula) -> Result<Self, SeparationError> {
        if !sentence.is_pure() {
            return Err(SeparationError::invalid("order-0 rule contains a monadic atom"));
        }
        if let Some(v) = sentence.free_vars().into_iter().next() {
            return Err(SeparationError::invalid(format!("order-0 rule has free variable `{v}`")));
        }
        Ok(SeparationRule::Order0(sentence))
    }

    pub fn positive(
        order: usize,
        vars: Vec<Symbol>,
        mu: Formula,
        eta: Formula,
        tau: ClosureRule,
    ) -> Result<Self, SeparationError> {
        PositiveRule::new(order, vars, mu, eta, tau).map(SeparationRule::Positive)
    }

    pub fn order(&self) -> usize {
        match self {
            SeparationRule::Order0(_) => 0,
            SeparationRule::Positive(p) => p.order,
        }
    }

    pub fn as_positive(&self) -> Option<&PositiveRule> {
        match self {
            SeparationRule::Positive(p) => Some(p),
            SeparationRule::Order0(_) => None,
        }
    }

    pub fn check_signature(&self, sig: &Signature) -> Result<(), SeparationError> {
        match self {
            SeparationRule::Order0(f) => Ok(sig.check_formula(f)?),
            SeparationRule::Positive(p) => p.check_signature(sig),
        }
    }
}

/// A signature, the sentences axiomatising the ambient class, and the rules.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparationScheme {
    signature: Signature,
    superclass: Vec<Formula>,
    rules: Vec<SeparationRule>,
}

impl SeparationScheme {
    pub fn new(
        signature: Signature,
        superclass: Vec<Formula>,
        rules: Vec<SeparationRule>,
    ) -> Result<Self, SeparationError> {
        for (i, f) in superclass.iter().enumerate() {
            if !f.is_pure() || !f.is_closed() {
                return Err(SeparationError::invalid(format!("superclass axiom {i} must be a pure sentence")));
            }
            signature.check_formula(f)?;
        }
        for r in &rules {
            r.check_signature(&signature)?;
        }
        Ok(SeparationScheme { signature, superclass, rules })
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn superclass(&self) -> &[Formula] {
        &self.superclass
    }

    pub fn rules(&self) -> &[SeparationRule] {
        &self.rules
    }

    pub fn rule(&self, id: usize) -> Option<&SeparationRule> {
        self.rules.get(id)
    }

    pub fn has_generated_rules(&self) -> bool {
        self.rules.iter().any(|r| r.as_positive().is_some_and(|p| p.tau.is_generated()))
    }

    /// Replaces every generated closure rule by its conjuncts up to `max_index`.
    pub fn truncated(&self, max_index: usize) -> SeparationScheme {
        let rules = self
            .rules
            .iter()
            .map(|r| match r {
                SeparationRule::Positive(p) => SeparationRule::Positive(p.truncated(max_index)),
                other => other.clone(),
            })
            .collect();
        SeparationScheme { rules, ..self.clone() }
    }

    /// Largest useful index over all rules, or `None` when some rule is generated.
    pub fn default_max_index(&self) -> Option<usize> {
        self.rules
            .iter()
            .filter_map(SeparationRule::as_positive)
            .map(|p| p.tau.default_max_index())
            .try_fold(0, |acc, i| i.map(|i| acc.max(i)))
    }
}
