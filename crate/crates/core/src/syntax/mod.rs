//! Abstract syntax of epistemic logic programs together with the text front
//! end (lexer, parser, printer) and the grounder.
//!
//! Rules have the restricted form
//!
//! ```text
//! F1 or ... or Fn :- G1, ..., Gk, not Gk+1, ..., not Gm.
//! ```
//!
//! where the `F`s are objective literals, `G1..Gk` are objective or subjective
//! literals and the literals under `not` are objective.

mod ground;
mod lexer;
mod parser;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

pub use ground::{ground, GroundError};
pub use parser::{parse_literal, parse_literal_list, parse_program, ParseError, QueryLiteral};

/// Predicate of the fresh literal used to give constraints a head.
pub const TRUE_PREDICATE: &str = "true";

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Term {
    Const(String),
    Var(String),
}

impl Term {
    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }

    pub fn name(&self) -> &str {
        match self {
            Term::Const(s) | Term::Var(s) => s,
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Atom {
    pub predicate: String,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(predicate: impl Into<String>, args: Vec<Term>) -> Self {
        Self {
            predicate: predicate.into(),
            args,
        }
    }

    pub fn arity(&self) -> usize {
        self.args.len()
    }

    pub fn is_ground(&self) -> bool {
        !self.args.iter().any(Term::is_var)
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.predicate)?;
        if !self.args.is_empty() {
            f.write_str("(")?;
            for (i, t) in self.args.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{t}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

/// An atom or a classically negated atom.
///
/// The derived ordering sorts by predicate, then arguments, then sign with the
/// positive literal first. This is the canonical literal order used for all
/// printed output.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ObjectiveLiteral {
    pub atom: Atom,
    pub negated: bool,
}

impl ObjectiveLiteral {
    pub fn pos(atom: Atom) -> Self {
        Self {
            atom,
            negated: false,
        }
    }

    pub fn neg(atom: Atom) -> Self {
        Self {
            atom,
            negated: true,
        }
    }

    /// The contrary literal.
    pub fn complement(&self) -> Self {
        Self {
            atom: self.atom.clone(),
            negated: !self.negated,
        }
    }

    pub fn is_ground(&self) -> bool {
        self.atom.is_ground()
    }

    /// Convenience constructor for ground literals: `lit("p", &["a"])`,
    /// `lit("-p", &["a"])`.
    pub fn ground(predicate: &str, args: &[&str]) -> Self {
        let (negated, name) = match predicate.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, predicate),
        };
        Self {
            atom: Atom::new(
                name,
                args.iter().map(|a| Term::Const((*a).to_string())).collect(),
            ),
            negated,
        }
    }
}

impl fmt::Display for ObjectiveLiteral {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            f.write_str("-")?;
        }
        write!(f, "{}", self.atom)
    }
}

pub type LitSet = BTreeSet<ObjectiveLiteral>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Modality {
    K,
    M,
}

impl fmt::Display for Modality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Modality::K => "K",
            Modality::M => "M",
        })
    }
}

/// `K l`, `M l`, `-K l` or `-M l`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SubjectiveLiteral {
    pub base: ObjectiveLiteral,
    pub modality: Modality,
    pub negated: bool,
}

impl SubjectiveLiteral {
    pub fn new(modality: Modality, negated: bool, base: ObjectiveLiteral) -> Self {
        Self {
            base,
            modality,
            negated,
        }
    }

    /// Same modality and base, outer negation flipped.
    pub fn negate(&self) -> Self {
        Self {
            base: self.base.clone(),
            modality: self.modality,
            negated: !self.negated,
        }
    }
}

impl fmt::Display for SubjectiveLiteral {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            f.write_str("-")?;
        }
        write!(f, "{} {}", self.modality, self.base)
    }
}

/// The four subjective literals built from one objective literal.
pub fn sublit(lit: &ObjectiveLiteral) -> [SubjectiveLiteral; 4] {
    [
        SubjectiveLiteral::new(Modality::K, false, lit.clone()),
        SubjectiveLiteral::new(Modality::M, false, lit.clone()),
        SubjectiveLiteral::new(Modality::K, true, lit.clone()),
        SubjectiveLiteral::new(Modality::M, true, lit.clone()),
    ]
}

pub fn sublit_closure<'a>(
    lits: impl IntoIterator<Item = &'a ObjectiveLiteral>,
) -> BTreeSet<SubjectiveLiteral> {
    lits.into_iter().flat_map(sublit).collect()
}

/// One element of the positive part of a rule body.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum BodyElem {
    Objective(ObjectiveLiteral),
    Subjective(SubjectiveLiteral),
}

impl BodyElem {
    /// The objective literal this element mentions, directly or under a modality.
    pub fn base(&self) -> &ObjectiveLiteral {
        match self {
            BodyElem::Objective(l) => l,
            BodyElem::Subjective(s) => &s.base,
        }
    }
}

impl fmt::Display for BodyElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BodyElem::Objective(l) => write!(f, "{l}"),
            BodyElem::Subjective(s) => write!(f, "{s}"),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Rule {
    pub head: Vec<ObjectiveLiteral>,
    pub body_pos: Vec<BodyElem>,
    pub body_neg: Vec<ObjectiveLiteral>,
}

impl Rule {
    pub fn new(
        head: Vec<ObjectiveLiteral>,
        body_pos: Vec<BodyElem>,
        body_neg: Vec<ObjectiveLiteral>,
    ) -> Self {
        Self {
            head,
            body_pos,
            body_neg,
        }
    }

    pub fn fact(head: ObjectiveLiteral) -> Self {
        Self::new(vec![head], vec![], vec![])
    }

    pub fn head(&self) -> LitSet {
        self.head.iter().cloned().collect()
    }

    /// Objective body literals plus the base of every subjective body literal.
    pub fn pos(&self) -> LitSet {
        self.body_pos.iter().map(|e| e.base().clone()).collect()
    }

    pub fn neg(&self) -> LitSet {
        self.body_neg.iter().cloned().collect()
    }

    pub fn lit(&self) -> LitSet {
        let mut out = self.head();
        out.extend(self.pos());
        out.extend(self.neg());
        out
    }

    pub fn objective_body(&self) -> impl Iterator<Item = &ObjectiveLiteral> {
        self.body_pos.iter().filter_map(|e| match e {
            BodyElem::Objective(l) => Some(l),
            BodyElem::Subjective(_) => None,
        })
    }

    pub fn subjective_body(&self) -> impl Iterator<Item = &SubjectiveLiteral> {
        self.body_pos.iter().filter_map(|e| match e {
            BodyElem::Subjective(s) => Some(s),
            BodyElem::Objective(_) => None,
        })
    }

    pub fn has_subjective(&self) -> bool {
        self.subjective_body().next().is_some()
    }

    pub fn is_ground(&self) -> bool {
        self.head.iter().all(ObjectiveLiteral::is_ground)
            && self.body_pos.iter().all(|e| e.base().is_ground())
            && self.body_neg.iter().all(ObjectiveLiteral::is_ground)
    }

    /// Heads, positive body and negative body each sorted and deduplicated.
    pub fn canonical(&self) -> Self {
        fn sorted<T: Ord + Clone>(v: &[T]) -> Vec<T> {
            let set: BTreeSet<T> = v.iter().cloned().collect();
            set.into_iter().collect()
        }
        Self {
            head: sorted(&self.head),
            body_pos: sorted(&self.body_pos),
            body_neg: sorted(&self.body_neg),
        }
    }

    fn variables(&self) -> Vec<String> {
        let mut seen = Vec::new();
        let terms = self
            .head
            .iter()
            .chain(self.body_pos.iter().map(BodyElem::base))
            .chain(self.body_neg.iter())
            .flat_map(|l| l.atom.args.iter());
        for t in terms {
            if let Term::Var(v) = t {
                if !seen.contains(v) {
                    seen.push(v.clone());
                }
            }
        }
        seen
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, h) in self.head.iter().enumerate() {
            if i > 0 {
                f.write_str(" or ")?;
            }
            write!(f, "{h}")?;
        }
        if !self.body_pos.is_empty() || !self.body_neg.is_empty() {
            f.write_str(if self.head.is_empty() { ":- " } else { " :- " })?;
            let mut first = true;
            for e in &self.body_pos {
                if !first {
                    f.write_str(", ")?;
                }
                first = false;
                write!(f, "{e}")?;
            }
            for l in &self.body_neg {
                if !first {
                    f.write_str(", ")?;
                }
                first = false;
                write!(f, "not {l}")?;
            }
        }
        f.write_str(".")
    }
}

/// An epistemic logic program: an ordered list of rules.
///
/// Rule order is kept for diagnostics and printing; semantic operations treat
/// the program as a set.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Program {
    pub rules: Vec<Rule>,
}

impl Program {
    pub fn new(rules: Vec<Rule>) -> Self {
        Self { rules }
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Rule> {
        self.rules.iter()
    }

    /// `Lit(Π)`: the union of `lit(r)` over all rules.
    pub fn literals(&self) -> LitSet {
        self.rules.iter().flat_map(|r| r.lit()).collect()
    }

    /// Literals occurring in some rule head.
    pub fn head_literals(&self) -> LitSet {
        self.rules
            .iter()
            .flat_map(|r| r.head.iter().cloned())
            .collect()
    }

    /// Constant symbols appearing in the program text.
    pub fn constants(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for r in &self.rules {
            let lits = r
                .head
                .iter()
                .chain(r.body_pos.iter().map(BodyElem::base))
                .chain(r.body_neg.iter());
            for l in lits {
                for t in &l.atom.args {
                    if let Term::Const(c) = t {
                        out.insert(c.clone());
                    }
                }
            }
        }
        out
    }

    /// Whether any rule body mentions `K` or `M`.
    pub fn has_subjective(&self) -> bool {
        self.rules.iter().any(Rule::has_subjective)
    }

    pub fn has_default_negation(&self) -> bool {
        self.rules.iter().any(|r| !r.body_neg.is_empty())
    }

    pub fn subjective_literals(&self) -> BTreeSet<SubjectiveLiteral> {
        self.rules
            .iter()
            .flat_map(|r| r.subjective_body().cloned())
            .collect()
    }

    pub fn is_ground(&self) -> bool {
        self.rules.iter().all(Rule::is_ground)
    }

    /// Rewrites every rule with an empty head to have head `-true`, adding the
    /// fact `true.` once when at least one such rule exists.
    pub fn normalize_empty_heads(&self) -> Self {
        let true_lit = ObjectiveLiteral::pos(Atom::new(TRUE_PREDICATE, vec![]));
        let mut rules = Vec::with_capacity(self.rules.len() + 1);
        let mut rewrote = false;
        for r in &self.rules {
            if r.head.is_empty() {
                rewrote = true;
                let mut r = r.clone();
                r.head.push(true_lit.complement());
                rules.push(r);
            } else {
                rules.push(r.clone());
            }
        }
        let fact = Rule::fact(true_lit);
        if rewrote && !rules.contains(&fact) {
            rules.push(fact);
        }
        Self { rules }
    }

    /// Sorted, deduplicated rules with canonical rule bodies.
    pub fn canonical(&self) -> Self {
        let set: BTreeSet<Rule> = self.rules.iter().map(Rule::canonical).collect();
        Self {
            rules: set.into_iter().collect(),
        }
    }

    /// Set union preserving first-occurrence order.
    pub fn union(&self, other: &Program) -> Self {
        let mut rules = self.rules.clone();
        for r in &other.rules {
            if !rules.contains(r) {
                rules.push(r.clone());
            }
        }
        Self { rules }
    }

    /// Set equality of the canonical rules.
    pub fn same_rules(&self, other: &Program) -> bool {
        self.canonical() == other.canonical()
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rules {
            writeln!(f, "{r}")?;
        }
        Ok(())
    }
}

impl FromIterator<Rule> for Program {
    fn from_iter<I: IntoIterator<Item = Rule>>(iter: I) -> Self {
        Self {
            rules: iter.into_iter().collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l(s: &str) -> ObjectiveLiteral {
        ObjectiveLiteral::ground(s, &[])
    }

    #[test]
    fn complement_is_an_involution() {
        let p = ObjectiveLiteral::ground("p", &["a"]);
        assert_ne!(p, p.complement());
        assert_eq!(p, p.complement().complement());
    }

    #[test]
    fn sublit_closure_sizes() {
        assert!(sublit_closure(&LitSet::new()).is_empty());
        let p = l("p");
        let one = sublit_closure([&p]);
        assert_eq!(one.len(), 4);
        assert!(one.contains(&SubjectiveLiteral::new(Modality::K, false, p.clone())));
        assert!(one.contains(&SubjectiveLiteral::new(Modality::M, false, p.clone())));
        assert!(one.contains(&SubjectiveLiteral::new(Modality::K, true, p.clone())));
        assert!(one.contains(&SubjectiveLiteral::new(Modality::M, true, p.clone())));
        let both: LitSet = [p.clone(), p.complement()].into_iter().collect();
        assert_eq!(sublit_closure(&both).len(), 8);
    }

    #[test]
    fn rule_accessors() {
        let r = parse_program("e :- a, M -b, not c, K d.").unwrap().rules[0].clone();
        assert_eq!(r.head(), [l("e")].into_iter().collect());
        assert_eq!(r.pos(), [l("a"), l("-b"), l("d")].into_iter().collect());
        assert_eq!(r.neg(), [l("c")].into_iter().collect());
        let mut union = r.head();
        union.extend(r.pos());
        union.extend(r.neg());
        assert_eq!(r.lit(), union);
    }

    #[test]
    fn empty_heads_become_minus_true() {
        let p = parse_program(":- a.\n:- b.\na.").unwrap();
        let n = p.normalize_empty_heads();
        assert_eq!(n.len(), 4);
        assert!(n.rules.iter().all(|r| !r.head.is_empty()));
        assert_eq!(n.rules[0].to_string(), "-true :- a.");
        assert_eq!(n.rules[3].to_string(), "true.");
        // idempotent
        assert_eq!(n.normalize_empty_heads(), n);
    }

    #[test]
    fn literal_order_is_predicate_args_sign() {
        let mut v = [
            ObjectiveLiteral::ground("-p", &["b"]),
            ObjectiveLiteral::ground("q", &["a"]),
            ObjectiveLiteral::ground("p", &["b"]),
            ObjectiveLiteral::ground("-p", &["a"]),
        ];
        v.sort();
        let shown: Vec<String> = v.iter().map(|l| l.to_string()).collect();
        assert_eq!(shown, ["-p(a)", "p(b)", "-p(b)", "q(a)"]);
    }
}
