//! Stratified programs and their stage-by-stage solver.
//!
//! Literals are grouped so that contraries and literals sharing a rule head
//! land together. A head depends *weakly* on its positive objective body and
//! *strictly* on literals under `not` and on the bases of subjective literals.
//! A program is stratified when no strongly connected group of literals has a
//! strict dependency inside it.

use std::collections::{BTreeMap, BTreeSet};

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::semantics::{self, BeliefSet, LimitError, Limits, WorldView};
use crate::splitting::{extend, is_splitting_set, SplitError, SplitOptions};
use crate::syntax::{BodyElem, LitSet, ObjectiveLiteral, Program};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum StratError {
    #[error("the program is not stratified")]
    NotStratified,
    #[error("stratum {stratum}: literals up to it do not split the program ({reason})")]
    ChainInvalid { stratum: usize, reason: String },
    #[error("possibly unsafe split at stratum {stratum}: belief set {belief_set} has no consistent extension")]
    PossiblyUnsafeSplit {
        stratum: usize,
        belief_set: BeliefSet,
    },
    #[error("stratum {stratum} kept {count} subjective literals after the reduct")]
    ResidualSubjective { stratum: usize, count: usize },
    #[error("stratum {stratum} produced {count} world views")]
    NotUnique { stratum: usize, count: usize },
    #[error(transparent)]
    Split(SplitError),
    #[error(transparent)]
    Limit(#[from] LimitError),
}

impl From<SplitError> for StratError {
    fn from(e: SplitError) -> Self {
        match e {
            SplitError::Limit(l) => StratError::Limit(l),
            other => StratError::Split(other),
        }
    }
}

/// How the condensed dependency graph is cut into strata.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Layering {
    /// Each group goes into the lowest stratum its dependencies allow; gives
    /// the fewest strata.
    #[default]
    Greedy,
    /// Every strongly connected group gets a stratum of its own.
    PerComponent,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stratification {
    pub strata: Vec<LitSet>,
    /// Rules grouped by the stratum of their head.
    pub rule_strata: Vec<Program>,
}

impl Stratification {
    pub fn len(&self) -> usize {
        self.strata.len()
    }

    pub fn is_empty(&self) -> bool {
        self.strata.is_empty()
    }

    pub fn stratum_of(&self, l: &ObjectiveLiteral) -> Option<usize> {
        self.strata.iter().position(|s| s.contains(l))
    }

    /// Cumulative unions of the strata, starting with the lowest one.
    pub fn chain(&self) -> Vec<LitSet> {
        let mut acc = LitSet::new();
        self.strata
            .iter()
            .map(|s| {
                acc.extend(s.iter().cloned());
                acc.clone()
            })
            .collect()
    }
}

fn universe(p: &Program) -> LitSet {
    let mut lits = p.literals();
    let comps: Vec<_> = lits.iter().map(ObjectiveLiteral::complement).collect();
    lits.extend(comps);
    lits
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, mut i: usize) -> usize {
        while self.0[i] != i {
            self.0[i] = self.0[self.0[i]];
            i = self.0[i];
        }
        i
    }

    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a != b {
            self.0[a.max(b)] = a.min(b);
        }
    }
}

/// A stratification of `p`, or `None` if there is none. Rules with empty
/// heads have no stratum; normalize them first.
pub fn find_stratification(p: &Program, layering: Layering) -> Option<Stratification> {
    if p.rules.iter().any(|r| r.head.is_empty()) {
        return None;
    }
    let lits: Vec<ObjectiveLiteral> = universe(p).into_iter().collect();
    let index: BTreeMap<&ObjectiveLiteral, usize> =
        lits.iter().enumerate().map(|(i, l)| (l, i)).collect();
    let mut uf = UnionFind((0..lits.len()).collect());
    for (i, l) in lits.iter().enumerate() {
        uf.union(i, index[&l.complement()]);
    }
    for r in &p.rules {
        let first = index[&r.head[0]];
        for h in &r.head[1..] {
            uf.union(first, index[h]);
        }
    }

    // One node per merged group; edges point from head to body, weight
    // `true` for strict.
    let roots: BTreeSet<usize> = (0..lits.len()).map(|i| uf.find(i)).collect();
    let mut graph: DiGraph<usize, bool> = DiGraph::new();
    let node: BTreeMap<usize, NodeIndex> = roots.iter().map(|&r| (r, graph.add_node(r))).collect();
    let mut edges = BTreeSet::new();
    for r in &p.rules {
        let h = node[&uf.find(index[&r.head[0]])];
        for e in &r.body_pos {
            let strict = matches!(e, BodyElem::Subjective(_));
            edges.insert((h, node[&uf.find(index[e.base()])], strict));
        }
        for l in &r.body_neg {
            edges.insert((h, node[&uf.find(index[l])], true));
        }
    }
    for &(a, b, strict) in &edges {
        graph.add_edge(a, b, strict);
    }

    // Tarjan yields components with dependencies before dependents.
    let sccs = tarjan_scc(&graph);
    let mut comp_of = vec![0usize; graph.node_count()];
    for (c, members) in sccs.iter().enumerate() {
        for n in members {
            comp_of[n.index()] = c;
        }
    }
    let mut level = vec![0usize; sccs.len()];
    for (c, members) in sccs.iter().enumerate() {
        for &n in members {
            for &(_, b, strict) in edges.iter().filter(|e| e.0 == n) {
                let d = comp_of[b.index()];
                if d == c {
                    if strict {
                        return None;
                    }
                    continue;
                }
                level[c] = level[c].max(level[d] + strict as usize);
            }
        }
    }

    let groups: Vec<LitSet> = sccs
        .iter()
        .map(|members| {
            let reps: BTreeSet<usize> = members.iter().map(|n| graph[*n]).collect();
            (0..lits.len())
                .filter(|&i| reps.contains(&uf.find(i)))
                .map(|i| lits[i].clone())
                .collect()
        })
        .collect();

    let order: Vec<usize> = match layering {
        Layering::Greedy => (0..sccs.len()).collect(),
        Layering::PerComponent => per_component_order(&sccs, &comp_of, &edges, &level, &groups),
    };
    let mut strata: Vec<LitSet> = Vec::new();
    match layering {
        Layering::Greedy => {
            let height = level.iter().max().map_or(0, |m| m + 1);
            strata.resize(height, LitSet::new());
            for c in order {
                strata[level[c]].extend(groups[c].iter().cloned());
            }
        }
        Layering::PerComponent => {
            strata = order.into_iter().map(|c| groups[c].clone()).collect();
        }
    }

    let mut rule_strata = vec![Vec::new(); strata.len()];
    for r in &p.rules {
        let s = strata.iter().position(|s| s.contains(&r.head[0]))?;
        rule_strata[s].push(r.clone());
    }
    Some(Stratification {
        strata,
        rule_strata: rule_strata.into_iter().map(Program::new).collect(),
    })
}

/// Topological order of components (dependencies first); among ready
/// components the lowest greedy level, then the smallest literal, goes first.
fn per_component_order(
    sccs: &[Vec<NodeIndex>],
    comp_of: &[usize],
    edges: &BTreeSet<(NodeIndex, NodeIndex, bool)>,
    level: &[usize],
    groups: &[LitSet],
) -> Vec<usize> {
    let n = sccs.len();
    let mut deps: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    for &(a, b, _) in edges {
        let (ca, cb) = (comp_of[a.index()], comp_of[b.index()]);
        if ca != cb {
            deps[ca].insert(cb);
        }
    }
    let key = |c: usize| (level[c], groups[c].first().cloned(), c);
    let mut done = vec![false; n];
    let mut order = Vec::with_capacity(n);
    while order.len() < n {
        let next = (0..n)
            .filter(|&c| !done[c] && deps[c].iter().all(|&d| done[d]))
            .min_by_key(|&c| key(c))
            .expect("condensation is acyclic");
        done[next] = true;
        order.push(next);
    }
    order
}

/// Checks the stratification conditions directly. Returns the first
/// violation found.
pub fn stratification_violation(s: &Stratification, p: &Program) -> Option<String> {
    let lits = universe(p);
    let mut seen = LitSet::new();
    for (i, stratum) in s.strata.iter().enumerate() {
        for l in stratum {
            if !seen.insert(l.clone()) {
                return Some(format!("{l} occurs in two strata"));
            }
            if !stratum.contains(&l.complement()) {
                return Some(format!(
                    "{l} and its complement are in different strata (stratum {i})"
                ));
            }
        }
    }
    if let Some(l) = lits.iter().find(|l| !seen.contains(*l)) {
        return Some(format!("{l} is in no stratum"));
    }
    let at = |l: &ObjectiveLiteral| s.stratum_of(l).unwrap_or(usize::MAX);
    for r in &p.rules {
        let Some(first) = r.head.first() else {
            return Some(format!("rule `{r}` has an empty head"));
        };
        let i = at(first);
        if r.head.iter().any(|h| at(h) != i) {
            return Some(format!("heads of `{r}` span several strata"));
        }
        if !s
            .rule_strata
            .get(i)
            .is_some_and(|prog| prog.rules.contains(r))
        {
            return Some(format!("rule `{r}` is not listed under stratum {i}"));
        }
        for e in &r.body_pos {
            let j = at(e.base());
            let ok = match e {
                BodyElem::Objective(_) => j <= i,
                BodyElem::Subjective(_) => j < i,
            };
            if !ok {
                return Some(format!("`{r}`: body element {e} sits in stratum {j}"));
            }
        }
        for l in &r.body_neg {
            if at(l) >= i {
                return Some(format!("`{r}`: not {l} sits in stratum {}", at(l)));
            }
        }
    }
    let listed: usize = s.rule_strata.iter().map(Program::len).sum();
    (listed != p.len()).then(|| format!("{listed} rules listed for a program of {}", p.len()))
}

/// The chain of splitting sets induced by `s`, each verified against `p`.
pub fn splitting_chain(s: &Stratification, p: &Program) -> Result<Vec<LitSet>, StratError> {
    let chain = s.chain();
    for (i, u) in chain.iter().enumerate() {
        if !is_splitting_set(u, p) {
            let reason = crate::splitting::splitting_violation(u, p).unwrap_or_default();
            return Err(StratError::ChainInvalid { stratum: i, reason });
        }
    }
    Ok(chain)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StratifiedSolution {
    pub view: WorldView,
    pub stratification: Stratification,
}

/// Computes the world view of a stratified program one stratum at a time:
/// the belief sets of the lowest stratum, then repeated splitting along the
/// chain. Every stage is checked for the unsafety pattern, including an
/// inconsistent lowest stratum.
pub fn solve_stratified(
    p: &Program,
    layering: Layering,
    limits: &Limits,
) -> Result<StratifiedSolution, StratError> {
    let stratification = find_stratification(p, layering).ok_or(StratError::NotStratified)?;
    let chain = splitting_chain(&stratification, p)?;
    if stratification.is_empty() {
        return Ok(StratifiedSolution {
            view: WorldView::from_sets([LitSet::new()]),
            stratification,
        });
    }

    let base = &stratification.rule_strata[0];
    let count = base.subjective_literals().len();
    if count > 0 {
        return Err(StratError::ResidualSubjective { stratum: 0, count });
    }
    let sets = semantics::belief_sets(base, limits)?;
    let consistent: Vec<BeliefSet> = sets.into_iter().filter(BeliefSet::is_consistent).collect();
    if consistent.is_empty() {
        return Err(StratError::PossiblyUnsafeSplit {
            stratum: 0,
            belief_set: BeliefSet::Inconsistent,
        });
    }
    let mut view = WorldView::new(consistent);

    let opts = SplitOptions {
        detect_unsafe: true,
        strict: true,
    };
    for i in 1..stratification.len() {
        let ext = extend(
            &stratification.rule_strata[i],
            &chain[i - 1],
            &view,
            true,
            limits,
            opts,
        )
        .map_err(|e| match e {
            SplitError::PossiblyUnsafeSplit { belief_set } => StratError::PossiblyUnsafeSplit {
                stratum: i,
                belief_set,
            },
            other => other.into(),
        })?;
        if ext.residual_subjective > 0 {
            return Err(StratError::ResidualSubjective {
                stratum: i,
                count: ext.residual_subjective,
            });
        }
        if ext.views.len() != 1 {
            return Err(StratError::NotUnique {
                stratum: i,
                count: ext.views.len(),
            });
        }
        view = ext.views.into_iter().next().expect("one view");
    }
    Ok(StratifiedSolution {
        view,
        stratification,
    })
}
