//! The guardedness check: no two top rules with contrary heads can fire
//! together under a collection that satisfies the bottom.
//!
//! The search for a counterexample collection is encoded as propositional
//! satisfiability over membership variables `x[s][l]` ("set `s` contains
//! literal `l`") and handed to a small DPLL solver. Every literal's truth
//! with respect to a collection only depends on whether it is in all sets and
//! whether it is in some set, so any witness can be shrunk to one containing
//! at most two sets per relevant literal. Searching collections of that size
//! is therefore exhaustive.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::syntax::{BodyElem, LitSet, Modality, ObjectiveLiteral, Program, Rule};

use super::split;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GuardConfig {
    /// Largest number of relevant literals for which the exhaustive search
    /// (with `2 * literals` sets) is attempted.
    pub max_literals: usize,
    /// Number of sets searched when the exhaustive bound is out of reach.
    pub fallback_sets: usize,
}

impl Default for GuardConfig {
    fn default() -> Self {
        Self {
            max_literals: 12,
            fallback_sets: 3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Guardedness {
    Guarded,
    NotGuarded {
        /// Indices into the top program of the two rules with contrary heads.
        rules: (usize, usize),
        witness: Vec<LitSet>,
    },
    /// The bounded search found no witness but was not exhaustive.
    Unknown,
}

impl Guardedness {
    pub fn is_guarded(&self) -> bool {
        matches!(self, Guardedness::Guarded)
    }
}

/// Decides whether `p` is guarded with respect to the splitting set `u`.
/// Empty heads must already be normalized. Returns `Unknown` only when the
/// relevant literals exceed `cfg.max_literals` and the bounded search found
/// nothing.
///
/// Only non-empty collections are searched, and `not l` counts as true with
/// respect to a collection when `l` is not true in it.
pub fn is_guarded(
    p: &Program,
    u: &LitSet,
    cfg: &GuardConfig,
) -> Result<Guardedness, super::SplitError> {
    if !p.has_subjective() {
        return Ok(Guardedness::Guarded);
    }
    let parts = split(p, u)?;
    let top = &parts.top.rules;
    let mut exhaustive = true;
    for i in 0..top.len() {
        for j in i..top.len() {
            if !contrary_heads(&top[i], &top[j]) {
                continue;
            }
            let mut relevant: LitSet = parts.bottom.literals();
            relevant.extend(body_literals(&top[i]));
            relevant.extend(body_literals(&top[j]));
            let sets = if relevant.len() <= cfg.max_literals {
                (2 * relevant.len()).max(1)
            } else {
                exhaustive = false;
                cfg.fallback_sets.max(1)
            };
            let enc = Encoding::new(relevant, sets);
            if let Some(witness) = enc.find_witness(&parts.bottom.rules, &top[i], &top[j]) {
                return Ok(Guardedness::NotGuarded {
                    rules: (i, j),
                    witness,
                });
            }
        }
    }
    Ok(if exhaustive {
        Guardedness::Guarded
    } else {
        Guardedness::Unknown
    })
}

fn contrary_heads(a: &Rule, b: &Rule) -> bool {
    a.head.iter().any(|h| b.head.contains(&h.complement()))
}

fn body_literals(r: &Rule) -> impl Iterator<Item = ObjectiveLiteral> + '_ {
    r.body_pos
        .iter()
        .map(|e| e.base().clone())
        .chain(r.body_neg.iter().cloned())
}

/// A body element as a formula over membership variables.
enum Formula {
    All(Vec<i32>),
    Any(Vec<i32>),
}

struct Encoding {
    lits: Vec<ObjectiveLiteral>,
    index: BTreeMap<ObjectiveLiteral, usize>,
    sets: usize,
    next_var: i32,
    clauses: Vec<Vec<i32>>,
}

impl Encoding {
    fn new(relevant: LitSet, sets: usize) -> Self {
        let lits: Vec<_> = relevant.into_iter().collect();
        let index = lits
            .iter()
            .enumerate()
            .map(|(i, l)| (l.clone(), i))
            .collect();
        let next_var = (lits.len() * sets) as i32 + 1;
        Self {
            lits,
            index,
            sets,
            next_var,
            clauses: Vec::new(),
        }
    }

    /// Variable for "set `s` contains literal `l`" (1-based).
    fn member(&self, s: usize, l: &ObjectiveLiteral) -> i32 {
        (s * self.lits.len() + self.index[l]) as i32 + 1
    }

    fn fresh(&mut self) -> i32 {
        let v = self.next_var;
        self.next_var += 1;
        v
    }

    fn in_all(&self, l: &ObjectiveLiteral) -> Vec<i32> {
        (0..self.sets).map(|s| self.member(s, l)).collect()
    }

    fn out_of_all(&self, l: &ObjectiveLiteral) -> Vec<i32> {
        (0..self.sets).map(|s| -self.member(s, l)).collect()
    }

    fn body(&self, r: &Rule) -> Vec<Formula> {
        let mut out = Vec::new();
        for e in &r.body_pos {
            out.push(match e {
                BodyElem::Objective(l) => Formula::All(self.in_all(l)),
                BodyElem::Subjective(s) => match (s.modality, s.negated) {
                    (Modality::K, false) => Formula::All(self.in_all(&s.base)),
                    (Modality::M, false) => Formula::Any(self.in_all(&s.base)),
                    (Modality::K, true) => Formula::Any(self.out_of_all(&s.base)),
                    (Modality::M, true) => Formula::All(self.out_of_all(&s.base)),
                },
            });
        }
        for l in &r.body_neg {
            out.push(Formula::Any(self.out_of_all(l)));
        }
        out
    }

    fn require_body(&mut self, r: &Rule) {
        for f in self.body(r) {
            match f {
                Formula::All(vs) => self.clauses.extend(vs.into_iter().map(|v| vec![v])),
                Formula::Any(vs) => self.clauses.push(vs),
            }
        }
    }

    /// Body true implies some head literal true in every set.
    fn require_rule(&mut self, r: &Rule) {
        let mut clause = Vec::new();
        for f in self.body(r) {
            let b = self.fresh();
            match f {
                Formula::All(vs) => {
                    let mut c: Vec<i32> = vs.iter().map(|v| -v).collect();
                    c.push(b);
                    self.clauses.push(c);
                }
                Formula::Any(vs) => {
                    for v in vs {
                        self.clauses.push(vec![-v, b]);
                    }
                }
            }
            clause.push(-b);
        }
        for h in &r.head {
            let t = self.fresh();
            for v in self.in_all(h) {
                self.clauses.push(vec![-t, v]);
            }
            clause.push(t);
        }
        self.clauses.push(clause);
    }

    fn find_witness(mut self, bottom: &[Rule], r1: &Rule, r2: &Rule) -> Option<Vec<LitSet>> {
        for r in bottom {
            self.require_rule(r);
        }
        self.require_body(r1);
        self.require_body(r2);
        let model = dpll((self.next_var - 1) as usize, &self.clauses)?;
        let mut witness: Vec<LitSet> = (0..self.sets)
            .map(|s| {
                self.lits
                    .iter()
                    .filter(|l| model[self.member(s, l) as usize])
                    .cloned()
                    .collect()
            })
            .collect();
        witness.sort();
        witness.dedup();
        Some(witness)
    }
}

/// Satisfiability by DPLL with unit propagation. Returns a model indexed by
/// variable (index 0 unused).
pub(crate) fn dpll(vars: usize, clauses: &[Vec<i32>]) -> Option<Vec<bool>> {
    let mut assign = vec![0i8; vars + 1];
    if search(clauses, &mut assign) {
        Some(assign.iter().map(|&v| v > 0).collect())
    } else {
        None
    }
}

fn value(assign: &[i8], lit: i32) -> i8 {
    let v = assign[lit.unsigned_abs() as usize];
    if lit > 0 {
        v
    } else {
        -v
    }
}

fn search(clauses: &[Vec<i32>], assign: &mut Vec<i8>) -> bool {
    // unit propagation to fixpoint
    loop {
        let mut changed = false;
        for c in clauses {
            let mut unassigned = None;
            let mut open = 0;
            let mut sat = false;
            for &l in c {
                match value(assign, l) {
                    1 => {
                        sat = true;
                        break;
                    }
                    0 => {
                        open += 1;
                        unassigned = Some(l);
                    }
                    _ => {}
                }
            }
            if sat {
                continue;
            }
            match (open, unassigned) {
                (0, _) => return false,
                (1, Some(l)) => {
                    assign[l.unsigned_abs() as usize] = if l > 0 { 1 } else { -1 };
                    changed = true;
                }
                _ => {}
            }
        }
        if !changed {
            break;
        }
    }
    let branch = clauses
        .iter()
        .filter(|c| !c.iter().any(|&l| value(assign, l) == 1))
        .flat_map(|c| c.iter())
        .find(|&&l| value(assign, l) == 0)
        .copied();
    let Some(l) = branch else {
        return true;
    };
    for choice in [l, -l] {
        let mut next = assign.clone();
        next[choice.unsigned_abs() as usize] = if choice > 0 { 1 } else { -1 };
        if search(clauses, &mut next) {
            *assign = next;
            return true;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semantics::{BeliefSet, WorldView};
    use crate::syntax::{ground, parse_program, SubjectiveLiteral};

    fn prog(text: &str) -> Program {
        ground(&parse_program(text).unwrap(), 5000)
            .unwrap()
            .normalize_empty_heads()
    }

    fn l(s: &str) -> ObjectiveLiteral {
        match s.split_once('(') {
            Some((p, rest)) => ObjectiveLiteral::ground(p, &[rest.trim_end_matches(')')]),
            None => ObjectiveLiteral::ground(s, &[]),
        }
    }

    fn set(lits: &[&str]) -> LitSet {
        lits.iter().map(|s| l(s)).collect()
    }

    /// Truth of a rule body with respect to a collection, straight from the
    /// definitions.
    fn body_true(w: &WorldView, r: &Rule) -> bool {
        r.body_pos.iter().all(|e| match e {
            BodyElem::Objective(l) => w.entails(l),
            BodyElem::Subjective(s) => w.satisfies(s),
        }) && r.body_neg.iter().all(|l| !w.entails(l))
    }

    fn satisfies_rule(w: &WorldView, r: &Rule) -> bool {
        !body_true(w, r) || r.head.iter().any(|h| w.entails(h))
    }

    fn as_view(sets: &[LitSet]) -> WorldView {
        // Witness sets may hold contrary pairs; keep them as raw sets.
        WorldView::new(sets.iter().map(|s| BeliefSet::Consistent(s.clone())))
    }

    #[test]
    fn dpll_basics() {
        assert!(dpll(1, &[vec![1], vec![-1]]).is_none());
        let m = dpll(3, &[vec![1, 2], vec![-1], vec![-2, 3]]).unwrap();
        assert!(!m[1] && m[2] && m[3]);
        assert!(dpll(0, &[]).is_some());
        assert!(dpll(1, &[vec![]]).is_none());
    }

    #[test]
    fn disjunctive_bottom_is_not_guarded() {
        let p = prog("p(a) or p(b).\np(c) :- M p(b).\np(d) :- p(b).\n-p(d) :- p(b).");
        let u = set(&["p(a)", "-p(a)", "p(b)", "-p(b)", "p(c)", "-p(c)"]);
        let g = is_guarded(&p, &u, &GuardConfig::default()).unwrap();
        let Guardedness::NotGuarded { rules, witness } = g else {
            panic!("expected a witness, got {g:?}");
        };
        assert_eq!(rules, (0, 1));
        let w = as_view(&witness);
        let parts = split(&p, &u).unwrap();
        assert!(parts.bottom.rules.iter().all(|r| satisfies_rule(&w, r)));
        assert!(body_true(&w, &parts.top.rules[0]) && body_true(&w, &parts.top.rules[1]));
        // the hand witness works too
        let hand = as_view(&[set(&["p(b)", "p(c)"])]);
        assert!(parts.bottom.rules.iter().all(|r| satisfies_rule(&hand, r)));
        assert!(body_true(&hand, &parts.top.rules[0]));
    }

    #[test]
    fn subjective_free_programs_are_guarded() {
        let p = prog("a or b.\nc :- a.\n-c :- a.");
        let u = set(&["a", "b"]);
        assert_eq!(
            is_guarded(&p, &u, &GuardConfig::default()).unwrap(),
            Guardedness::Guarded
        );
    }

    #[test]
    fn possibility_program_is_guarded() {
        let p = prog("p(a) or p(b).\np(c).\nq(d).\n-p(X) :- -M p(X).");
        let u = set(&[
            "p(a)", "-p(a)", "p(b)", "-p(b)", "p(c)", "-p(c)", "q(d)", "-q(d)",
        ]);
        let parts = split(&p, &u).unwrap();
        assert_eq!(parts.top.len(), 1);
        assert_eq!(
            is_guarded(&p, &u, &GuardConfig::default()).unwrap(),
            Guardedness::Guarded
        );
    }

    #[test]
    fn bottom_can_rule_out_the_conflict() {
        // a is forced into every set, so -K a never holds next to a.
        let p = prog("a.\nc :- -K a.\n-c :- a.");
        let u = set(&["a", "-a"]);
        assert!(is_splitting_set_ok(&p, &u));
        assert_eq!(
            is_guarded(&p, &u, &GuardConfig::default()).unwrap(),
            Guardedness::Guarded
        );
    }

    fn is_splitting_set_ok(p: &Program, u: &LitSet) -> bool {
        super::super::is_splitting_set(u, p)
    }

    #[test]
    fn fallback_bound_reports_unknown() {
        let p = prog("a.\nc :- -K a.\n-c :- a.");
        let u = set(&["a", "-a"]);
        let tight = GuardConfig {
            max_literals: 0,
            fallback_sets: 1,
        };
        assert_eq!(is_guarded(&p, &u, &tight).unwrap(), Guardedness::Unknown);
    }

    #[test]
    fn absence_is_unconstrained_by_the_bottom() {
        // Bottom rules only force literals in; b may sit in a set freely.
        let p = prog("a.\nb :- K a, not a.\nc :- a, M a.\n-c :- b.");
        let u = set(&["a", "-a", "b", "-b"]);
        assert!(!is_guarded(&p, &u, &GuardConfig::default())
            .unwrap()
            .is_guarded());
    }

    #[test]
    fn witness_needs_two_sets() {
        // Bodies need M x and -K x at once, so a single set cannot do it.
        let p = prog("x or y.\nc :- M x, -K x.\n-c :- M y.");
        let u = set(&["x", "-x", "y", "-y"]);
        let g = is_guarded(&p, &u, &GuardConfig::default()).unwrap();
        let Guardedness::NotGuarded { witness, .. } = g else {
            panic!("expected a witness");
        };
        assert!(witness.len() >= 2);
        let w = as_view(&witness);
        let mx = SubjectiveLiteral::new(Modality::M, false, l("x"));
        assert!(
            w.satisfies(&mx) && w.satisfies(&SubjectiveLiteral::new(Modality::K, true, l("x")))
        );
    }
}
