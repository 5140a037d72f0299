//! Index-based evaluation shared by every solver entry point.
//!
//! Literals of one program are numbered in canonical order so that sorted
//! index lists compare exactly like sorted literal lists.

use std::collections::{BTreeSet, HashMap};

use crate::syntax::{BodyElem, LitSet, Modality, ObjectiveLiteral, Program};

use super::{BeliefSet, LimitError, Limits};

/// A fixed-width bit set over literal indices.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub(crate) struct Bits(Vec<u64>);

impl Bits {
    pub fn new(n: usize) -> Self {
        Bits(vec![0; n.div_ceil(64).max(1)])
    }

    pub fn contains(&self, i: u32) -> bool {
        self.0[(i / 64) as usize] >> (i % 64) & 1 == 1
    }

    pub fn insert(&mut self, i: u32) {
        self.0[(i / 64) as usize] |= 1 << (i % 64);
    }

    pub fn is_subset(&self, other: &Bits) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a & !b == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = u32> + '_ {
        self.0.iter().enumerate().flat_map(|(w, &word)| {
            (0..64u32)
                .filter(move |b| word >> b & 1 == 1)
                .map(move |b| w as u32 * 64 + b)
        })
    }
}

/// A modal atom `(modality, literal)`; `¬K l` and `¬M l` share the entry of
/// `K l` and `M l`.
pub(crate) type ModalAtom = (Modality, ObjectiveLiteral);

#[derive(Clone, Debug)]
pub(crate) struct IRule {
    pub head: Vec<u32>,
    pub pos: Vec<u32>,
    pub neg: Vec<u32>,
    /// (index into the modal atom table, outer negation)
    pub subj: Vec<(usize, bool)>,
}

#[derive(Clone, Debug)]
pub(crate) struct Indexed {
    pub lits: Vec<ObjectiveLiteral>,
    pub complement: Vec<Option<u32>>,
    pub rules: Vec<IRule>,
}

/// A computed belief set: `None` is the inconsistent belief set `Lit`.
pub(crate) type RawBeliefSet = Option<Bits>;

impl Indexed {
    /// Indexes `program`; subjective literals are resolved against
    /// `modal_atoms`, which must contain every modal atom of the program.
    pub fn new(program: &Program, modal_atoms: &[ModalAtom]) -> Self {
        let lits: Vec<ObjectiveLiteral> = program.literals().into_iter().collect();
        let index: HashMap<ObjectiveLiteral, u32> = lits
            .iter()
            .enumerate()
            .map(|(i, l)| (l.clone(), i as u32))
            .collect();
        let complement = lits
            .iter()
            .map(|l| index.get(&l.complement()).copied())
            .collect();
        let modal_index: HashMap<&ModalAtom, usize> = modal_atoms
            .iter()
            .enumerate()
            .map(|(i, a)| (a, i))
            .collect();
        let rules = program
            .rules
            .iter()
            .map(|r| {
                let mut rule = IRule {
                    head: r.head.iter().map(|l| index[l]).collect(),
                    pos: Vec::new(),
                    neg: r.body_neg.iter().map(|l| index[l]).collect(),
                    subj: Vec::new(),
                };
                for e in &r.body_pos {
                    match e {
                        BodyElem::Objective(l) => rule.pos.push(index[l]),
                        BodyElem::Subjective(s) => {
                            let key = (s.modality, s.base.clone());
                            rule.subj.push((modal_index[&key], s.negated));
                        }
                    }
                }
                rule.head.sort_unstable();
                rule.head.dedup();
                rule
            })
            .collect();
        Self {
            lits,
            complement,
            rules,
        }
    }

    pub fn len(&self) -> usize {
        self.lits.len()
    }

    pub fn check_limits(&self, limits: &Limits) -> Result<(), LimitError> {
        if self.lits.len() > limits.max_lits {
            return Err(LimitError::TooManyLiterals {
                found: self.lits.len(),
                limit: limits.max_lits,
            });
        }
        Ok(())
    }

    /// Rules whose subjective body literals all hold under `guess`.
    pub fn active_rules<'a>(&'a self, guess: &'a [bool]) -> impl Iterator<Item = &'a IRule> + 'a {
        self.rules
            .iter()
            .filter(move |r| r.subj.iter().all(|&(a, neg)| guess[a] != neg))
    }

    /// Belief sets of the EDLP made of `rules` (subjective literals ignored:
    /// callers pass rules already filtered by a modal guess).
    pub fn belief_sets<'a>(
        &self,
        rules: impl Iterator<Item = &'a IRule>,
    ) -> BTreeSet<RawBeliefSet> {
        let rules: Vec<&IRule> = rules.collect();
        let negated: Vec<u32> = {
            let mut v: Vec<u32> = rules.iter().flat_map(|r| r.neg.iter().copied()).collect();
            v.sort_unstable();
            v.dedup();
            v
        };
        let mut out = BTreeSet::new();
        // The GL reduct depends on a candidate only through its intersection
        // with the literals under `not`, so guess that intersection.
        for mask in 0u64..(1u64 << negated.len()) {
            let mut assumed = Bits::new(self.len());
            for (k, &l) in negated.iter().enumerate() {
                if mask >> k & 1 == 1 {
                    assumed.insert(l);
                }
            }
            let reduct: Vec<&IRule> = rules
                .iter()
                .copied()
                .filter(|r| !r.neg.iter().any(|&l| assumed.contains(l)))
                .collect();
            for bs in self.positive_belief_sets(&reduct) {
                let agrees = match &bs {
                    Some(a) => negated
                        .iter()
                        .all(|&l| a.contains(l) == assumed.contains(l)),
                    None => mask == (1u64 << negated.len()) - 1,
                };
                if agrees {
                    out.insert(bs);
                }
            }
        }
        out
    }

    /// Minimal closed consistent sets of a positive program (`neg` and `subj`
    /// of the given rules are ignored), or `{Lit}` when none exists.
    pub fn positive_belief_sets(&self, rules: &[&IRule]) -> BTreeSet<RawBeliefSet> {
        let mut closed = BTreeSet::new();
        self.search(rules, Bits::new(self.len()), &mut closed);
        if closed.is_empty() {
            return [None].into_iter().collect();
        }
        let closed: Vec<Bits> = closed.into_iter().collect();
        closed
            .iter()
            .filter(|a| !closed.iter().any(|b| b != *a && b.is_subset(a)))
            .map(|a| Some(a.clone()))
            .collect()
    }

    /// Branches on the head of each violated disjunctive rule. Every minimal
    /// consistent closed set is reached because the branch containing it is
    /// always open; non-minimal results are filtered by the caller.
    fn search(&self, rules: &[&IRule], mut set: Bits, out: &mut BTreeSet<Bits>) {
        loop {
            let mut changed = false;
            let mut branch: Option<&IRule> = None;
            for r in rules {
                if !r.pos.iter().all(|&l| set.contains(l)) {
                    continue;
                }
                if r.head.iter().any(|&l| set.contains(l)) {
                    continue;
                }
                match r.head.as_slice() {
                    [] => return,
                    [h] => {
                        if self.complement[*h as usize].is_some_and(|c| set.contains(c)) {
                            return;
                        }
                        set.insert(*h);
                        changed = true;
                    }
                    _ => {
                        if branch.is_none() {
                            branch = Some(r);
                        }
                    }
                }
            }
            if changed {
                continue;
            }
            match branch {
                None => {
                    out.insert(set);
                }
                Some(r) => {
                    for &h in &r.head {
                        if self.complement[h as usize].is_some_and(|c| set.contains(c)) {
                            continue;
                        }
                        let mut next = set.clone();
                        next.insert(h);
                        self.search(rules, next, out);
                    }
                }
            }
            return;
        }
    }

    pub fn to_belief_set(&self, raw: &RawBeliefSet) -> BeliefSet {
        match raw {
            None => BeliefSet::Inconsistent,
            Some(bits) => BeliefSet::Consistent(
                bits.iter()
                    .map(|i| self.lits[i as usize].clone())
                    .collect::<LitSet>(),
            ),
        }
    }
}

/// Truth of every modal atom with respect to a collection of belief sets.
pub(crate) fn evaluate_atoms<'a>(
    atoms: &[ModalAtom],
    sets: impl Iterator<Item = &'a BeliefSet> + Clone,
) -> Vec<bool> {
    atoms
        .iter()
        .map(|(m, l)| match m {
            Modality::K => sets.clone().all(|b| b.contains(l)),
            Modality::M => sets.clone().any(|b| b.contains(l)),
        })
        .collect()
}

/// All truth assignments over `n` atoms, in binary counting order.
pub(crate) fn guesses(n: usize) -> impl Iterator<Item = Vec<bool>> {
    (0u64..(1u64 << n)).map(move |mask| (0..n).map(|k| mask >> k & 1 == 1).collect())
}
