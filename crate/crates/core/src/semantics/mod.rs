//! Belief sets and world views by exhaustive enumeration.
//!
//! Three layers:
//! - positive programs (no `not`, no modalities): minimal closed sets;
//! - extended disjunctive programs: guess a candidate, check it against its
//!   GL reduct;
//! - epistemic programs: guess the truth of every modal atom, compute the
//!   belief sets of the reduced program and keep the collection if it
//!   reproduces the guess.
//!
//! This is the reference engine. The splitting and stratified solvers are
//! checked against it.

pub(crate) mod engine;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::syntax::{
    BodyElem, LitSet, Modality, ObjectiveLiteral, Program, Rule, SubjectiveLiteral,
};

use engine::{evaluate_atoms, guesses, Indexed, ModalAtom};

/// Resource guards for enumeration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Limits {
    /// Upper bound on ground rules produced by grounding.
    pub max_ground: usize,
    /// Upper bound on distinct modal atoms (guess space `2^n`).
    pub max_modal: usize,
    /// Upper bound on `|Lit(Π)|` for belief-set enumeration.
    pub max_lits: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Self {
            max_ground: 5000,
            max_modal: 20,
            max_lits: 22,
        }
    }
}

/// Hard ceiling for any configured bound on an enumerated exponent.
pub const MAX_EXPONENT: usize = 62;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum LimitError {
    #[error("program has {found} literals, limit is {limit}")]
    TooManyLiterals { found: usize, limit: usize },
    #[error("program has {found} modal atoms, limit is {limit}")]
    TooManyModalAtoms { found: usize, limit: usize },
    #[error("program has {found} literals under `not`, more than can be enumerated")]
    TooManyNegated { found: usize },
}

/// A belief set: a consistent set of objective literals, or the inconsistent
/// belief set `Lit` containing every literal.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum BeliefSet {
    Consistent(LitSet),
    Inconsistent,
}

impl BeliefSet {
    pub fn contains(&self, l: &ObjectiveLiteral) -> bool {
        match self {
            BeliefSet::Consistent(s) => s.contains(l),
            BeliefSet::Inconsistent => true,
        }
    }

    pub fn is_consistent(&self) -> bool {
        matches!(self, BeliefSet::Consistent(_))
    }

    pub fn literals(&self) -> Option<&LitSet> {
        match self {
            BeliefSet::Consistent(s) => Some(s),
            BeliefSet::Inconsistent => None,
        }
    }

    /// Builds a belief set from literals, collapsing to `Inconsistent` when a
    /// contrary pair is present.
    pub fn from_literals(lits: impl IntoIterator<Item = ObjectiveLiteral>) -> Self {
        let set: LitSet = lits.into_iter().collect();
        if set.iter().any(|l| set.contains(&l.complement())) {
            BeliefSet::Inconsistent
        } else {
            BeliefSet::Consistent(set)
        }
    }
}

impl fmt::Display for BeliefSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BeliefSet::Inconsistent => f.write_str("Lit"),
            BeliefSet::Consistent(s) => {
                f.write_str("{")?;
                for (i, l) in s.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{l}")?;
                }
                f.write_str("}")
            }
        }
    }
}

/// A collection of belief sets, kept in canonical order.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct WorldView(BTreeSet<BeliefSet>);

impl WorldView {
    pub fn new(sets: impl IntoIterator<Item = BeliefSet>) -> Self {
        Self(sets.into_iter().collect())
    }

    /// Shorthand for a collection of consistent belief sets.
    pub fn from_sets<I, J>(sets: I) -> Self
    where
        I: IntoIterator<Item = J>,
        J: IntoIterator<Item = ObjectiveLiteral>,
    {
        Self::new(sets.into_iter().map(BeliefSet::from_literals))
    }

    pub fn belief_sets(&self) -> &BTreeSet<BeliefSet> {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = &BeliefSet> + Clone {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// False iff the view contains the inconsistent belief set.
    pub fn is_consistent(&self) -> bool {
        !self.0.contains(&BeliefSet::Inconsistent)
    }

    pub fn satisfies(&self, s: &SubjectiveLiteral) -> bool {
        let holds = match s.modality {
            Modality::K => self.0.iter().all(|b| b.contains(&s.base)),
            Modality::M => self.0.iter().any(|b| b.contains(&s.base)),
        };
        holds != s.negated
    }

    /// An objective literal is true in a collection when it belongs to every
    /// set of it.
    pub fn entails(&self, l: &ObjectiveLiteral) -> bool {
        self.0.iter().all(|b| b.contains(l))
    }
}

impl fmt::Display for WorldView {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, b) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{b}")?;
        }
        f.write_str("}")
    }
}

impl FromIterator<BeliefSet> for WorldView {
    fn from_iter<T: IntoIterator<Item = BeliefSet>>(iter: T) -> Self {
        Self::new(iter)
    }
}

pub fn satisfies_subjective(w: &WorldView, s: &SubjectiveLiteral) -> bool {
    w.satisfies(s)
}

pub fn is_consistent_world_view(w: &WorldView) -> bool {
    w.is_consistent()
}

/// A truth value for every modal atom `(K|M, l)` of a program. `¬K l` and
/// `¬M l` are read off the entry of `K l` / `M l`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct ModalGuess(BTreeMap<(Modality, ObjectiveLiteral), bool>);

impl ModalGuess {
    /// The guess induced by evaluating every modal atom of `p` against `w`.
    pub fn induced(p: &Program, w: &WorldView) -> Self {
        let atoms = modal_atoms(p);
        let values = evaluate_atoms(&atoms, w.iter());
        Self(atoms.into_iter().zip(values).collect())
    }

    pub fn get(&self, s: &SubjectiveLiteral) -> Option<bool> {
        self.0
            .get(&(s.modality, s.base.clone()))
            .map(|&v| v != s.negated)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// The modal atoms of `p` in canonical order.
pub(crate) fn modal_atoms(p: &Program) -> Vec<ModalAtom> {
    p.subjective_literals()
        .into_iter()
        .map(|s| (s.modality, s.base))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect()
}

pub(crate) fn check_modal(n: usize, limits: &Limits) -> Result<(), LimitError> {
    if n > limits.max_modal.min(MAX_EXPONENT) {
        return Err(LimitError::TooManyModalAtoms {
            found: n,
            limit: limits.max_modal,
        });
    }
    Ok(())
}

pub(crate) fn check_negated(p: &Program) -> Result<(), LimitError> {
    let n = p
        .rules
        .iter()
        .flat_map(|r| r.body_neg.iter())
        .collect::<BTreeSet<_>>()
        .len();
    if n > MAX_EXPONENT {
        return Err(LimitError::TooManyNegated { found: n });
    }
    Ok(())
}

/// Belief sets of a program without `not` and without subjective literals.
pub fn belief_sets_positive(
    p: &Program,
    limits: &Limits,
) -> Result<BTreeSet<BeliefSet>, LimitError> {
    debug_assert!(!p.has_default_negation() && !p.has_subjective());
    let idx = Indexed::new(p, &[]);
    idx.check_limits(limits)?;
    let rules: Vec<_> = idx.rules.iter().collect();
    Ok(idx
        .positive_belief_sets(&rules)
        .iter()
        .map(|b| idx.to_belief_set(b))
        .collect())
}

/// `Π^A`: drop rules blocked by `not L` with `L ∈ A`, strip the remaining
/// `not` literals.
pub fn gl_reduct(p: &Program, a: &BeliefSet) -> Program {
    p.rules
        .iter()
        .filter(|r| !r.body_neg.iter().any(|l| a.contains(l)))
        .map(|r| Rule::new(r.head.clone(), r.body_pos.clone(), Vec::new()))
        .collect()
}

/// Belief sets of a program without subjective literals.
pub fn belief_sets(p: &Program, limits: &Limits) -> Result<BTreeSet<BeliefSet>, LimitError> {
    debug_assert!(!p.has_subjective());
    let idx = Indexed::new(p, &[]);
    idx.check_limits(limits)?;
    check_negated(p)?;
    Ok(idx
        .belief_sets(idx.rules.iter())
        .iter()
        .map(|b| idx.to_belief_set(b))
        .collect())
}

/// `Π^W`: drop rules with a subjective literal false in `w`, strip the rest.
pub fn modal_reduct(p: &Program, w: &WorldView) -> Program {
    p.rules
        .iter()
        .filter(|r| r.subjective_body().all(|s| w.satisfies(s)))
        .map(strip_subjective)
        .collect()
}

/// Reduct by a modal guess instead of a collection.
pub fn guess_reduct(p: &Program, guess: &ModalGuess) -> Program {
    p.rules
        .iter()
        .filter(|r| r.subjective_body().all(|s| guess.get(s).unwrap_or(false)))
        .map(strip_subjective)
        .collect()
}

fn strip_subjective(r: &Rule) -> Rule {
    Rule::new(
        r.head.clone(),
        r.body_pos
            .iter()
            .filter(|e| matches!(e, BodyElem::Objective(_)))
            .cloned()
            .collect(),
        r.body_neg.clone(),
    )
}

/// Result of world-view enumeration.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct WorldViews {
    /// Non-empty world views in canonical order.
    pub views: Vec<WorldView>,
    /// Whether the empty collection is a world view (the reduct has no belief
    /// sets). Reported separately, never listed in `views`.
    pub empty: bool,
}

impl WorldViews {
    pub fn consistent(&self) -> impl Iterator<Item = &WorldView> {
        self.views.iter().filter(|w| w.is_consistent())
    }

    pub fn consistent_set(&self) -> BTreeSet<WorldView> {
        self.consistent().cloned().collect()
    }
}

/// All world views of a ground program.
///
/// Enumerates the `2^n` truth assignments to the program's `n` modal atoms
/// rather than all collections of literal sets: the modal reduct depends on a
/// collection only through the truth of those atoms.
pub fn world_views(p: &Program, limits: &Limits) -> Result<WorldViews, LimitError> {
    let atoms = modal_atoms(p);
    check_modal(atoms.len(), limits)?;
    let idx = Indexed::new(p, &atoms);
    idx.check_limits(limits)?;
    check_negated(p)?;

    let mut found = BTreeSet::new();
    let mut empty = false;
    for guess in guesses(atoms.len()) {
        let raw = idx.belief_sets(idx.active_rules(&guess));
        let view: WorldView = raw.iter().map(|b| idx.to_belief_set(b)).collect();
        if evaluate_atoms(&atoms, view.iter()) != guess {
            continue;
        }
        if view.is_empty() {
            empty = true;
        } else {
            found.insert(view);
        }
    }
    Ok(WorldViews {
        views: found.into_iter().collect(),
        empty,
    })
}

/// Independent fixpoint check: `w` is exactly the set of belief sets of `Π^w`.
pub fn is_world_view(p: &Program, w: &WorldView, limits: &Limits) -> Result<bool, LimitError> {
    let bs = belief_sets(&modal_reduct(p, w), limits)?;
    Ok(&bs == w.belief_sets())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{ground, parse_program};

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

    fn bs(lits: &[&str]) -> BeliefSet {
        BeliefSet::from_literals(lits.iter().map(|s| l(s)))
    }

    fn sub(m: Modality, neg: bool, s: &str) -> SubjectiveLiteral {
        SubjectiveLiteral::new(m, neg, l(s))
    }

    /// Subset-enumeration oracle for positive programs.
    fn brute_positive(p: &Program) -> BTreeSet<BeliefSet> {
        let lits: Vec<ObjectiveLiteral> = p.literals().into_iter().collect();
        let n = lits.len();
        let closed = |a: &LitSet| {
            p.rules.iter().all(|r| {
                !r.objective_body().all(|b| a.contains(b)) || r.head.iter().any(|h| a.contains(h))
            })
        };
        let mut consistent_closed = Vec::new();
        for mask in 0u32..(1 << n) {
            let a: LitSet = (0..n)
                .filter(|k| mask >> k & 1 == 1)
                .map(|k| lits[k].clone())
                .collect();
            if a.iter().any(|x| a.contains(&x.complement())) {
                continue;
            }
            if closed(&a) {
                consistent_closed.push(a);
            }
        }
        if consistent_closed.is_empty() {
            return [BeliefSet::Inconsistent].into_iter().collect();
        }
        consistent_closed
            .iter()
            .filter(|a| !consistent_closed.iter().any(|b| b != *a && b.is_subset(a)))
            .map(|a| BeliefSet::Consistent(a.clone()))
            .collect()
    }

    /// Guess-and-check oracle for EDLPs over every subset of `Lit(Π)`.
    fn brute_edlp(p: &Program) -> BTreeSet<BeliefSet> {
        let lits: Vec<ObjectiveLiteral> = p.literals().into_iter().collect();
        let n = lits.len();
        let mut out = BTreeSet::new();
        let mut candidates: Vec<BeliefSet> = (0u32..(1 << n))
            .map(|mask| {
                BeliefSet::from_literals(
                    (0..n)
                        .filter(|k| mask >> k & 1 == 1)
                        .map(|k| lits[k].clone()),
                )
            })
            .filter(BeliefSet::is_consistent)
            .collect();
        candidates.push(BeliefSet::Inconsistent);
        for a in candidates {
            if brute_positive(&gl_reduct(p, &a)).contains(&a) {
                out.insert(a);
            }
        }
        out
    }

    #[test]
    fn satisfaction_on_a_two_set_world_view() {
        let w = WorldView::new([
            bs(&["q(d)", "p(a)", "p(c)", "-p(d)"]),
            bs(&["q(d)", "p(b)", "p(c)", "-p(d)"]),
        ]);
        assert!(w.satisfies(&sub(Modality::K, false, "q(d)")));
        assert!(w.satisfies(&sub(Modality::M, false, "p(b)")));
        assert!(!w.satisfies(&sub(Modality::K, false, "p(a)")));
    }

    #[test]
    fn satisfaction_edge_cases() {
        let empty = WorldView::default();
        assert!(empty.satisfies(&sub(Modality::K, false, "x")));
        assert!(!empty.satisfies(&sub(Modality::M, false, "x")));
        let w = WorldView::new([bs(&["p"])]);
        assert!(!w.satisfies(&sub(Modality::M, true, "p")));
    }

    #[test]
    fn positive_belief_sets() {
        let limits = Limits::default();
        assert_eq!(
            belief_sets_positive(&prog("p."), &limits).unwrap(),
            [bs(&["p"])].into_iter().collect()
        );
        let disj = prog("a or b.");
        let expected: BTreeSet<_> = [bs(&["a"]), bs(&["b"])].into_iter().collect();
        assert_eq!(brute_positive(&disj), expected);
        assert_eq!(belief_sets_positive(&disj, &limits).unwrap(), expected);
        assert_eq!(
            belief_sets_positive(&prog("p. -p."), &limits).unwrap(),
            [BeliefSet::Inconsistent].into_iter().collect()
        );
    }

    #[test]
    fn gl_reduct_cases() {
        let p = prog("p :- not q.");
        assert_eq!(gl_reduct(&p, &bs(&[])).to_string(), "p.\n");
        assert!(gl_reduct(&p, &bs(&["q"])).is_empty());
        let p = prog("p :- r, not q.");
        assert_eq!(gl_reduct(&p, &bs(&["p"])).to_string(), "p :- r.\n");
    }

    #[test]
    fn edlp_belief_sets() {
        let limits = Limits::default();
        let cases: [(&str, Vec<BeliefSet>); 3] = [
            ("p :- not q.", vec![bs(&["p"])]),
            ("p :- not p.", vec![]),
            (
                "p(a) or p(b).\np(c).",
                vec![bs(&["p(a)", "p(c)"]), bs(&["p(b)", "p(c)"])],
            ),
        ];
        for (text, expected) in cases {
            let p = prog(text);
            let expected: BTreeSet<_> = expected.into_iter().collect();
            assert_eq!(brute_edlp(&p), expected, "oracle on {text}");
            assert_eq!(belief_sets(&p, &limits).unwrap(), expected, "{text}");
        }
    }

    #[test]
    fn edlp_agrees_with_subset_oracle() {
        let limits = Limits::default();
        for text in [
            "a :- not b. b :- not a.",
            "a or b. c :- a, not d. d :- b.",
            "a :- not -a. -a :- not a.",
            "a. -a :- not b. b :- not c.",
            "a or -a. b :- a. -b :- a.",
            "p :- not q. q :- not r. r :- not p.",
            ":- a. a or b. c :- not b.",
        ] {
            let p = prog(text);
            assert_eq!(belief_sets(&p, &limits).unwrap(), brute_edlp(&p), "{text}");
        }
    }

    #[test]
    fn modal_reduct_cases() {
        let p = prog("e :- K p.");
        let w = WorldView::new([bs(&["p"])]);
        assert_eq!(modal_reduct(&p, &w).to_string(), "e.\n");
        let q = prog("a :- b, not c.");
        assert_eq!(modal_reduct(&q, &w), q);
    }

    #[test]
    fn possibility_program() {
        let p = prog("p(a) or p(b).\np(c).\nq(d).\n-p(X) :- -M p(X).");
        let w = WorldView::new([
            bs(&["q(d)", "p(a)", "p(c)", "-p(d)"]),
            bs(&["q(d)", "p(b)", "p(c)", "-p(d)"]),
        ]);
        let reduct = modal_reduct(&p, &w);
        assert_eq!(reduct.len(), 4);
        assert!(reduct.rules.contains(&Rule::fact(l("-p(d)"))));
        assert!(is_world_view(&p, &w, &Limits::default()).unwrap());

        // The published view is not the only fixpoint: committing to one
        // disjunct makes the other impossible, so `-M` fires for it.
        let left = WorldView::new([bs(&["p(a)", "-p(b)", "p(c)", "-p(d)", "q(d)"])]);
        let right = WorldView::new([bs(&["-p(a)", "p(b)", "p(c)", "-p(d)", "q(d)"])]);
        assert!(is_world_view(&p, &left, &Limits::default()).unwrap());
        assert!(is_world_view(&p, &right, &Limits::default()).unwrap());
        let got = world_views(&p, &Limits::default()).unwrap();
        let mut expected = vec![w, left, right];
        expected.sort();
        assert_eq!(got.views, expected);
        assert!(!got.empty);
    }

    #[test]
    fn mutual_and_self_denial() {
        let limits = Limits::default();
        let two = world_views(&prog("p(a) :- -M q(a).\nq(a) :- -M p(a)."), &limits).unwrap();
        let mut expected = vec![
            WorldView::new([bs(&["q(a)"])]),
            WorldView::new([bs(&["p(a)"])]),
        ];
        expected.sort();
        assert_eq!(two.views, expected);
        let three = world_views(&prog("p(a) :- -K p(a)."), &limits).unwrap();
        assert!(three.views.is_empty());
        assert!(!three.empty);
    }

    #[test]
    fn empty_world_view_is_flagged() {
        let got = world_views(&prog("p :- not p."), &Limits::default()).unwrap();
        assert!(got.views.is_empty());
        assert!(got.empty);
    }

    #[test]
    fn subjective_free_program_has_one_view() {
        let p = prog("a or b. c :- a, not d.");
        let got = world_views(&p, &Limits::default()).unwrap();
        let bsets = belief_sets(&p, &Limits::default()).unwrap();
        assert_eq!(got.views, vec![WorldView::new(bsets)]);
    }

    #[test]
    fn inconsistent_world_view() {
        let got = world_views(&prog("p. -p."), &Limits::default()).unwrap();
        assert_eq!(got.views, vec![WorldView::new([BeliefSet::Inconsistent])]);
        assert!(!got.views[0].is_consistent());
        assert!(is_consistent_world_view(&WorldView::new([bs(&["p"])])));
        assert!(is_consistent_world_view(&WorldView::default()));
    }

    #[test]
    fn guess_reduct_matches_modal_reduct() {
        let p = prog("p(a) or p(b).\np(c).\nq(d).\n-p(X) :- -M p(X).\nr :- K q(d), M p(b).");
        let w = world_views(&p, &Limits::default()).unwrap().views[0].clone();
        let g = ModalGuess::induced(&p, &w);
        assert_eq!(g.len(), 5);
        assert_eq!(guess_reduct(&p, &g), modal_reduct(&p, &w));
    }

    #[test]
    fn limits() {
        let p = prog("a or b or c or d.");
        let tight = Limits {
            max_lits: 3,
            ..Limits::default()
        };
        assert_eq!(
            belief_sets(&p, &tight),
            Err(LimitError::TooManyLiterals { found: 4, limit: 3 })
        );
        let q = prog("a :- K b, M c. b. c.");
        let tight = Limits {
            max_modal: 1,
            ..Limits::default()
        };
        assert!(matches!(
            world_views(&q, &tight),
            Err(LimitError::TooManyModalAtoms { found: 2, .. })
        ));
    }
}
