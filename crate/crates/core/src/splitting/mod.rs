//! Splitting sets for epistemic programs.
//!
//! A splitting set `U` cuts a program into a bottom (rules whose literals all
//! lie in `U`) and a top. World views of the whole program are assembled from
//! a world view `X` of the bottom and a multi-view of the partially evaluated
//! tops, one per belief set of `X`.
//!
//! The combination is only sound when the program is safe with respect to
//! `U`. Safety is not decided here; instead [`solve_by_splitting`] reports
//! [`SplitError::PossiblyUnsafeSplit`] when a bottom belief set has no
//! consistent extension into the top, which is the situation in which the
//! bottom's subjective literals can change truth value.

mod guard;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::semantics::engine::{evaluate_atoms, guesses, Indexed, ModalAtom};
use crate::semantics::{
    self, check_modal, check_negated, BeliefSet, LimitError, Limits, WorldView,
};
use crate::syntax::{BodyElem, LitSet, ObjectiveLiteral, Program, Rule};

pub use guard::{is_guarded, GuardConfig, Guardedness};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SplitError {
    #[error("not a splitting set: {0}")]
    NotASplittingSet(String),
    #[error("literal {0} occurs subjectively in the program being partially evaluated")]
    SubjectiveOverlap(ObjectiveLiteral),
    #[error("possibly unsafe split: bottom belief set {belief_set} has no consistent extension")]
    PossiblyUnsafeSplit { belief_set: BeliefSet },
    #[error(transparent)]
    Limit(#[from] LimitError),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitDecomposition {
    pub u: LitSet,
    pub bottom: Program,
    pub top: Program,
}

/// Why `u` fails to split `p`, if it does.
pub fn splitting_violation(u: &LitSet, p: &Program) -> Option<String> {
    for r in &p.rules {
        if r.head.iter().any(|h| u.contains(h)) {
            if let Some(l) = r.lit().into_iter().find(|l| !u.contains(l)) {
                return Some(format!(
                    "rule `{r}` has a head literal in U but {l} is outside U"
                ));
            }
        }
    }
    if p.has_subjective() {
        let lits = p.literals();
        for l in u.iter().filter(|l| lits.contains(*l)) {
            if !u.contains(&l.complement()) {
                return Some(format!(
                    "the program is modal and U contains {l} but not {}",
                    l.complement()
                ));
            }
        }
    }
    None
}

pub fn is_splitting_set(u: &LitSet, p: &Program) -> bool {
    splitting_violation(u, p).is_none()
}

/// Bottom = rules with `lit(r) ⊆ u`, top = the rest.
pub fn split(p: &Program, u: &LitSet) -> Result<SplitDecomposition, SplitError> {
    if let Some(why) = splitting_violation(u, p) {
        return Err(SplitError::NotASplittingSet(why));
    }
    let (bottom, top): (Vec<Rule>, Vec<Rule>) = p
        .rules
        .iter()
        .cloned()
        .partition(|r| r.lit().iter().all(|l| u.contains(l)));
    Ok(SplitDecomposition {
        u: u.clone(),
        bottom: Program::new(bottom),
        top: Program::new(top),
    })
}

/// `Π^{r(U,W)}`: the modal reduct applied only to subjective literals whose
/// base lies in `u`. Other subjective literals are left in place.
pub fn restricted_reduct(p: &Program, u: &LitSet, w: &WorldView) -> Program {
    p.rules
        .iter()
        .filter(|r| {
            r.subjective_body()
                .filter(|s| u.contains(&s.base))
                .all(|s| w.satisfies(s))
        })
        .map(|r| Rule {
            head: r.head.clone(),
            body_pos: r
                .body_pos
                .iter()
                .filter(|e| match e {
                    BodyElem::Subjective(s) => !u.contains(&s.base),
                    BodyElem::Objective(_) => true,
                })
                .cloned()
                .collect(),
            body_neg: r.body_neg.clone(),
        })
        .collect()
}

/// `e_U(Π, X)`: keep rules whose `u`-part of the body agrees with `x`, then
/// delete every body literal (positive or under `not`) that lies in `u`.
pub fn partial_eval(p: &Program, u: &LitSet, x: &LitSet) -> Result<Program, SplitError> {
    for s in p.rules.iter().flat_map(|r| r.subjective_body()) {
        if u.contains(&s.base) || x.contains(&s.base) {
            return Err(SplitError::SubjectiveOverlap(s.base.clone()));
        }
    }
    Ok(p.rules
        .iter()
        .filter(|r| {
            r.objective_body()
                .filter(|l| u.contains(*l))
                .all(|l| x.contains(l))
                && !r.body_neg.iter().any(|l| u.contains(l) && x.contains(l))
        })
        .map(|r| Rule {
            head: r.head.clone(),
            body_pos: r
                .body_pos
                .iter()
                .filter(|e| !u.contains(e.base()))
                .cloned()
                .collect(),
            body_neg: r
                .body_neg
                .iter()
                .filter(|l| !u.contains(*l))
                .cloned()
                .collect(),
        })
        .collect())
}

/// `W|_U`: intersect every set of `w` with `u`. The inconsistent belief set
/// stays inconsistent.
pub fn restrict(w: &WorldView, u: &LitSet) -> WorldView {
    w.iter()
        .map(|b| match b {
            BeliefSet::Consistent(s) => BeliefSet::Consistent(s.intersection(u).cloned().collect()),
            BeliefSet::Inconsistent => BeliefSet::Inconsistent,
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultiView {
    pub collection: WorldView,
    /// For each input program, the belief sets of its reduct by `collection`.
    pub restricted_views: Vec<BTreeSet<BeliefSet>>,
}

impl MultiView {
    pub fn is_consistent(&self) -> bool {
        self.collection != WorldView::new([BeliefSet::Inconsistent])
    }
}

/// Combines the answers of each program into the candidate collection: the
/// union minus `Lit` when some program has a consistent belief set, `{Lit}`
/// otherwise.
fn combine(answers: &[BTreeSet<BeliefSet>]) -> WorldView {
    let any_consistent = answers.iter().flatten().any(BeliefSet::is_consistent);
    if any_consistent {
        answers
            .iter()
            .flatten()
            .filter(|b| b.is_consistent())
            .cloned()
            .collect()
    } else {
        WorldView::new([BeliefSet::Inconsistent])
    }
}

/// All multi-views of `programs`.
///
/// Guesses range jointly over the modal atoms of every program since each
/// reduct is taken against the same collection.
pub fn multi_views(programs: &[Program], limits: &Limits) -> Result<Vec<MultiView>, LimitError> {
    let joint = Program::new(
        programs
            .iter()
            .flat_map(|p| p.rules.iter().cloned())
            .collect(),
    );
    let atoms: Vec<ModalAtom> = semantics::modal_atoms(&joint);
    check_modal(atoms.len(), limits)?;
    let indexed: Vec<Indexed> = programs
        .iter()
        .map(|p| {
            let idx = Indexed::new(p, &atoms);
            idx.check_limits(limits)?;
            check_negated(p)?;
            Ok(idx)
        })
        .collect::<Result<_, LimitError>>()?;

    let mut out = Vec::new();
    for guess in guesses(atoms.len()) {
        let answers: Vec<BTreeSet<BeliefSet>> = indexed
            .iter()
            .map(|idx| {
                idx.belief_sets(idx.active_rules(&guess))
                    .iter()
                    .map(|b| idx.to_belief_set(b))
                    .collect()
            })
            .collect();
        let collection = combine(&answers);
        if evaluate_atoms(&atoms, collection.iter()) == guess {
            out.push(MultiView {
                collection,
                restricted_views: answers,
            });
        }
    }
    out.sort_by(|a, b| a.collection.cmp(&b.collection));
    Ok(out)
}

/// Independent check of the multi-view equation for a given collection.
pub fn is_multi_view(
    programs: &[Program],
    w: &WorldView,
    limits: &Limits,
) -> Result<bool, LimitError> {
    let answers = programs
        .iter()
        .map(|p| semantics::belief_sets(&semantics::modal_reduct(p, w), limits))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(&combine(&answers) == w)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitOptions {
    /// Raise [`SplitError::PossiblyUnsafeSplit`] when a bottom belief set has
    /// no consistent extension. Disabling it reproduces the unguarded
    /// combination, which may return collections that are not world views.
    pub detect_unsafe: bool,
    /// Fire the detector even for programs without subjective literals.
    pub strict: bool,
}

impl Default for SplitOptions {
    fn default() -> Self {
        Self {
            detect_unsafe: true,
            strict: false,
        }
    }
}

/// World views produced by combining one bottom world view with the top.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Extension {
    pub views: BTreeSet<WorldView>,
    /// Consistent multi-views whose combination was empty.
    pub empty_combinations: usize,
    /// Subjective literals left in the top after the restricted reduct, summed
    /// over bottom world views.
    pub residual_subjective: usize,
}

/// Extends a consistent, non-empty world view `x` of the bottom through
/// `top`. `modal` tells whether the whole program contains subjective
/// literals (the detector only matters then, unless `opts.strict`).
pub fn extend(
    top: &Program,
    u: &LitSet,
    x: &WorldView,
    modal: bool,
    limits: &Limits,
    opts: SplitOptions,
) -> Result<Extension, SplitError> {
    let reduced = restricted_reduct(top, u, x);
    let residual = reduced
        .rules
        .iter()
        .flat_map(|r| r.subjective_body())
        .count();
    let bottoms: Vec<&LitSet> = x.iter().filter_map(BeliefSet::literals).collect();
    let tops = bottoms
        .iter()
        .map(|xj| partial_eval(&reduced, u, xj))
        .collect::<Result<Vec<_>, _>>()?;

    let mut ext = Extension {
        residual_subjective: residual,
        ..Extension::default()
    };
    for y in multi_views(&tops, limits)? {
        // An inconsistent multi-view is only inspected in strict mode, where
        // it is the sole candidate.
        if !y.is_consistent() && !opts.strict {
            continue;
        }
        let mut sets = BTreeSet::new();
        for (xj, view) in bottoms.iter().zip(&y.restricted_views) {
            let mut extended = false;
            for yk in view.iter().filter_map(BeliefSet::literals) {
                let joined = BeliefSet::from_literals(xj.iter().chain(yk).cloned());
                if joined.is_consistent() {
                    sets.insert(joined);
                    extended = true;
                }
            }
            if !extended && opts.detect_unsafe && (modal || opts.strict) {
                return Err(SplitError::PossiblyUnsafeSplit {
                    belief_set: BeliefSet::Consistent((*xj).clone()),
                });
            }
        }
        if !y.is_consistent() {
            continue;
        }
        if sets.is_empty() {
            ext.empty_combinations += 1;
        } else {
            ext.views.insert(WorldView::new(sets));
        }
    }
    Ok(ext)
}

/// Consistent world views of `p` obtained through the splitting set `u`.
pub fn solve_by_splitting(
    p: &Program,
    u: &LitSet,
    limits: &Limits,
    opts: SplitOptions,
) -> Result<Vec<WorldView>, SplitError> {
    let parts = split(p, u)?;
    let modal = p.has_subjective();
    let bottom_views = semantics::world_views(&parts.bottom, limits)?;
    let mut views = BTreeSet::new();
    for x in bottom_views.consistent() {
        let ext = extend(&parts.top, u, x, modal, limits, opts)?;
        views.extend(ext.views);
    }
    Ok(views.into_iter().collect())
}

/// Closes `seed` under the splitting conditions: for every rule whose head
/// meets the set, add all of its literals; add complements when the program
/// is modal. The result always splits `p`.
pub fn splitting_closure(p: &Program, seed: &LitSet) -> LitSet {
    let modal = p.has_subjective();
    let mut u = seed.clone();
    loop {
        let before = u.len();
        if modal {
            let comps: Vec<_> = u.iter().map(ObjectiveLiteral::complement).collect();
            u.extend(comps);
        }
        for r in &p.rules {
            if r.head.iter().any(|h| u.contains(h)) {
                u.extend(r.lit());
            }
        }
        if u.len() == before {
            break;
        }
    }
    u
}
