//! The scheme file format.
//!
//! ```text
//! (scheme
//!   (signature (rel E 2) (const c) (fn f 1))
//!   (superclass f*)
//!   (rule (order 0) f)
//!   (rule (order K) (vars (x ...)) (mu f) (eta f)
//!         (tau top | (conjuncts ((vars (y ...)) (gamma f) (psi f))*) | (generated NAME ARG*))))
//! ```

use std::fmt::Write as _;

use crate::logic::parse::{formula_from_sexpr, read_sexpr, Pos, SExpr};
use crate::logic::{print_formula, sym, ParseError, Signature, Symbol};

use super::{ClosureConjunct, ClosureRule, SeparationError, SeparationRule, SeparationScheme};

/// Maps a generated-rule name and its arguments to a closure rule.
pub type GeneratorResolver<'a> = &'a dyn Fn(&str, &[String]) -> Result<ClosureRule, String>;

fn syntax<T>(pos: Pos, msg: impl Into<String>) -> Result<T, SeparationError> {
    Err(ParseError::syntax(pos, msg).into())
}

fn atom(e: &SExpr) -> Result<&str, SeparationError> {
    match e.as_atom() {
        Some(a) => Ok(a),
        None => syntax(e.pos(), "expected an atom"),
    }
}

fn number(e: &SExpr) -> Result<usize, SeparationError> {
    match atom(e)?.parse() {
        Ok(n) => Ok(n),
        Err(_) => syntax(e.pos(), "expected a non-negative integer"),
    }
}

fn var_list(e: &SExpr) -> Result<Vec<Symbol>, SeparationError> {
    let Some(items) = e.as_list() else {
        return syntax(e.pos(), "expected a variable list");
    };
    items.iter().map(|v| atom(v).map(sym)).collect()
}

/// Finds the single `(keyword ...)` item among `items`.
fn field<'e>(items: &'e [SExpr], keyword: &str, pos: Pos) -> Result<&'e [SExpr], SeparationError> {
    let mut found = items.iter().filter_map(|i| i.tagged(keyword));
    match (found.next(), found.next()) {
        (Some(f), None) => Ok(f),
        (None, _) => syntax(pos, format!("missing ({keyword} ...)")),
        (Some(_), Some(_)) => syntax(pos, format!("duplicate ({keyword} ...)")),
    }
}

fn one<'e>(args: &'e [SExpr], pos: Pos, what: &str) -> Result<&'e SExpr, SeparationError> {
    match args {
        [x] => Ok(x),
        _ => syntax(pos, format!("expected exactly one {what}")),
    }
}

fn parse_signature(items: &[SExpr]) -> Result<Signature, SeparationError> {
    let mut sig = Signature::new();
    for item in items {
        let pos = item.pos();
        let parts = item.as_list().unwrap_or(&[]);
        match (item.head(), parts) {
            (Some("rel"), [_, name, arity]) => sig.add_relation(atom(name)?, number(arity)?)?,
            (Some("const"), [_, name]) => sig.add_constant(atom(name)?)?,
            (Some("fn"), [_, name, arity]) => sig.add_function(atom(name)?, number(arity)?)?,
            _ => return syntax(pos, "expected (rel NAME ARITY), (const NAME) or (fn NAME ARITY)"),
        }
    }
    Ok(sig)
}

fn parse_tau(e: &SExpr, sig: &Signature, resolve: GeneratorResolver) -> Result<ClosureRule, SeparationError> {
    if e.as_atom() == Some("top") {
        return Ok(ClosureRule::Top);
    }
    if let Some(conjuncts) = e.tagged("conjuncts") {
        let list = conjuncts
            .iter()
            .map(|c| {
                let Some(parts) = c.as_list() else {
                    return syntax(c.pos(), "expected ((vars ...) (gamma f) (psi f))");
                };
                let vars = var_list(one(field(parts, "vars", c.pos())?, c.pos(), "variable list")?)?;
                let gamma = formula_from_sexpr(one(field(parts, "gamma", c.pos())?, c.pos(), "guard")?, sig)?;
                let psi = formula_from_sexpr(one(field(parts, "psi", c.pos())?, c.pos(), "body")?, sig)?;
                Ok(ClosureConjunct::new(vars, gamma, psi))
            })
            .collect::<Result<Vec<_>, _>>()?;
        return Ok(ClosureRule::Explicit(list));
    }
    if let Some(gen) = e.tagged("generated") {
        let Some((name, args)) = gen.split_first() else {
            return syntax(e.pos(), "expected (generated NAME ARG*)");
        };
        let name = atom(name)?;
        let args = args.iter().map(|a| atom(a).map(str::to_string)).collect::<Result<Vec<_>, _>>()?;
        return resolve(name, &args).map_err(|msg| SeparationError::UnknownGenerator(format!("{name}: {msg}")));
    }
    syntax(e.pos(), "expected top, (conjuncts ...) or (generated ...)")
}

fn parse_rule(
    args: &[SExpr],
    pos: Pos,
    sig: &Signature,
    resolve: GeneratorResolver,
) -> Result<SeparationRule, SeparationError> {
    let order = number(one(field(args, "order", pos)?, pos, "order")?)?;
    if order == 0 {
        let rest: Vec<&SExpr> = args.iter().filter(|a| a.tagged("order").is_none()).collect();
        let [sentence] = rest.as_slice() else {
            return syntax(pos, "order-0 rule takes exactly one sentence");
        };
        return SeparationRule::order0(formula_from_sexpr(sentence, sig)?);
    }
    let vars = var_list(one(field(args, "vars", pos)?, pos, "variable list")?)?;
    let mu = formula_from_sexpr(one(field(args, "mu", pos)?, pos, "premise")?, sig)?;
    let eta = formula_from_sexpr(one(field(args, "eta", pos)?, pos, "initial condition")?, sig)?;
    let tau = parse_tau(one(field(args, "tau", pos)?, pos, "closure rule")?, sig, resolve)?;
    SeparationRule::positive(order, vars, mu, eta, tau)
}

/// Parses a scheme file, resolving `(generated ...)` closure rules through `resolve`.
pub fn parse_scheme(text: &str, resolve: GeneratorResolver) -> Result<SeparationScheme, SeparationError> {
    let root = read_sexpr(text)?;
    let Some(items) = root.tagged("scheme") else {
        return syntax(root.pos(), "expected (scheme ...)");
    };
    let sig = parse_signature(field(items, "signature", root.pos())?)?;
    let superclass = match items.iter().filter_map(|i| i.tagged("superclass")).collect::<Vec<_>>().as_slice() {
        [] => Vec::new(),
        [fs] => fs.iter().map(|f| formula_from_sexpr(f, &sig)).collect::<Result<_, _>>()?,
        _ => return syntax(root.pos(), "duplicate (superclass ...)"),
    };
    let mut rules = Vec::new();
    for item in items {
        match item.head() {
            Some("rule") => rules.push(parse_rule(item.tagged("rule").unwrap(), item.pos(), &sig, resolve)?),
            Some("signature" | "superclass") => {}
            _ => return syntax(item.pos(), "expected (signature ...), (superclass ...) or (rule ...)"),
        }
    }
    SeparationScheme::new(sig, superclass, rules)
}

fn vars_text(vs: &[Symbol]) -> String {
    vs.iter().map(|v| v.as_ref()).collect::<Vec<_>>().join(" ")
}

/// Renders a scheme; [`parse_scheme`] reads it back.
pub fn print_scheme(scheme: &SeparationScheme) -> String {
    let mut out = String::from("(scheme\n  (signature");
    let sig = scheme.signature();
    for (n, a) in sig.relations() {
        let _ = write!(out, " (rel {n} {a})");
    }
    for c in sig.constants() {
        let _ = write!(out, " (const {c})");
    }
    for (n, a) in sig.functions() {
        let _ = write!(out, " (fn {n} {a})");
    }
    out.push_str(")\n  (superclass");
    for f in scheme.superclass() {
        let _ = write!(out, "\n    {}", print_formula(f));
    }
    out.push(')');
    for rule in scheme.rules() {
        match rule {
            SeparationRule::Order0(f) => {
                let _ = write!(out, "\n  (rule (order 0)\n    {})", print_formula(f));
            }
            SeparationRule::Positive(p) => {
                let _ = write!(
                    out,
                    "\n  (rule (order {})\n    (vars ({}))\n    (mu {})\n    (eta {})\n    (tau ",
                    p.order(),
                    vars_text(p.vars()),
                    print_formula(p.mu()),
                    print_formula(p.eta())
                );
                match p.tau() {
                    ClosureRule::Top => out.push_str("top"),
                    ClosureRule::Explicit(cs) => {
                        out.push_str("(conjuncts");
                        for c in cs {
                            let _ = write!(
                                out,
                                "\n      ((vars ({})) (gamma {}) (psi {}))",
                                vars_text(&c.vars),
                                print_formula(&c.gamma),
                                print_formula(&c.psi)
                            );
                        }
                        out.push(')');
                    }
                    ClosureRule::Generated { name, args, .. } => {
                        out.push_str("(generated ");
                        out.push_str(name);
                        for a in args {
                            out.push(' ');
                            out.push_str(a);
                        }
                        out.push(')');
                    }
                }
                out.push_str("))");
            }
        }
    }
    out.push_str(")\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn no_generators(name: &str, _: &[String]) -> Result<ClosureRule, String> {
        Err(format!("unknown generator {name}"))
    }

    const TEXT: &str = r#"
; two colours
(scheme
  (signature (rel E 2))
  (superclass (forall (x) (not (rel E x x))))
  (rule (order 2)
    (vars (x))
    (mu (true))
    (eta (true))
    (tau (conjuncts
      ((vars (y)) (gamma (true)) (psi (or (mon 1 y) (mon 2 y))))
      ((vars (y z)) (gamma (rel E y z)) (psi (not (and (mon 1 y) (mon 1 z))))))))
  (rule (order 0) (forall (x y) (implies (rel E x y) (rel E y x))))
  (rule (order 1) (vars ()) (mu (true)) (eta (true)) (tau top)))
"#;

    #[test]
    fn parse_and_print_round_trip() {
        let s = parse_scheme(TEXT, &no_generators).unwrap();
        assert_eq!(s.rules().len(), 3);
        assert_eq!(s.superclass().len(), 1);
        let printed = print_scheme(&s);
        let again = parse_scheme(&printed, &no_generators).unwrap();
        assert_eq!(s, again);
        assert_eq!(printed, print_scheme(&again));
    }

    #[test]
    fn reports_unknown_generators_and_bad_rules() {
        let text = "(scheme (signature (rel E 2)) (rule (order 1) (vars (x)) (mu (true)) (eta (true)) (tau (generated nope))))";
        assert!(matches!(parse_scheme(text, &no_generators), Err(SeparationError::UnknownGenerator(_))));
        let text = "(scheme (signature (rel E 2)) (rule (order 1) (vars (x)) (mu (true)) (eta (mon 2 x)) (tau top)))";
        assert!(matches!(parse_scheme(text, &no_generators), Err(SeparationError::InvalidRule(_))));
        let text = "(scheme (signature (rel E 2)) (rule (order 1) (vars (x)) (mu (rel F x)) (eta (true)) (tau top)))";
        assert!(matches!(
            parse_scheme(text, &no_generators),
            Err(SeparationError::Parse(ParseError::Undeclared { .. }))
        ));
    }
}
