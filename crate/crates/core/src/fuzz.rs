//! Differential fuzzing: random ground programs are solved naively and by
//! splitting / stratification, and the consistent world views compared.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::semantics::{self, LimitError, Limits, WorldView};
use crate::splitting::{
    is_guarded, is_splitting_set, solve_by_splitting, splitting_closure, GuardConfig, Guardedness,
    SplitError, SplitOptions,
};
use crate::stratification::{find_stratification, solve_stratified, Layering, StratError};
use crate::syntax::{
    parse_literal_list, parse_program, Atom, BodyElem, LitSet, Modality, ObjectiveLiteral,
    ParseError, Program, Rule, SubjectiveLiteral, Term,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    Split,
    Stratified,
}

/// A hand-written instance run alongside the generated ones.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusEntry {
    pub program: String,
    /// Splitting set, one literal per element. Without it the split engine
    /// skips the entry.
    #[serde(default)]
    pub split_set: Option<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FuzzConfig {
    pub seed: u64,
    pub count: usize,
    pub max_predicates: usize,
    pub max_constants: usize,
    pub max_rules: usize,
    pub max_body: usize,
    pub prob_disjunction: f64,
    pub prob_not: f64,
    pub prob_k: f64,
    pub prob_m: f64,
    pub prob_classical_negation: f64,
    /// Chance that a subjective literal carries `-`.
    pub prob_subjective_negation: f64,
    pub stratified_only: bool,
    pub guarded_only: bool,
    pub engines: Vec<Engine>,
    /// Run the split engine with the unsafety detector. Without it, unsafe
    /// combinations surface as divergences.
    pub fallback: bool,
    pub minimize: bool,
    /// Draws per instance before giving up on the structural filters.
    pub max_attempts: usize,
    pub limits: Limits,
    pub guard: GuardConfig,
    pub corpus: Vec<CorpusEntry>,
}

impl Default for FuzzConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            count: 100,
            max_predicates: 4,
            max_constants: 3,
            max_rules: 10,
            max_body: 3,
            prob_disjunction: 0.25,
            prob_not: 0.2,
            prob_k: 0.15,
            prob_m: 0.15,
            prob_classical_negation: 0.25,
            prob_subjective_negation: 0.3,
            stratified_only: false,
            guarded_only: false,
            engines: vec![Engine::Split, Engine::Stratified],
            fallback: true,
            minimize: true,
            max_attempts: 200,
            limits: Limits::default(),
            guard: GuardConfig::default(),
            corpus: Vec::new(),
        }
    }
}

#[derive(Debug, Error)]
pub enum FuzzError {
    #[error("invalid fuzz configuration: {0}")]
    Config(String),
    #[error("corpus entry {index}: {source}")]
    Corpus { index: usize, source: ParseError },
    #[error("corpus entry {index}: {source}")]
    CorpusLimit { index: usize, source: LimitError },
}

impl FuzzConfig {
    pub fn validate(&self) -> Result<(), FuzzError> {
        let probs = [
            ("prob_disjunction", self.prob_disjunction),
            ("prob_not", self.prob_not),
            ("prob_k", self.prob_k),
            ("prob_m", self.prob_m),
            ("prob_classical_negation", self.prob_classical_negation),
            ("prob_subjective_negation", self.prob_subjective_negation),
        ];
        for (name, p) in probs {
            if !(0.0..=1.0).contains(&p) {
                return Err(FuzzError::Config(format!("{name} = {p} is outside [0, 1]")));
            }
        }
        if self.prob_k + self.prob_m > 1.0 {
            return Err(FuzzError::Config("prob_k + prob_m exceeds 1".into()));
        }
        if self.max_predicates == 0 || self.max_predicates > PREDICATES.len() {
            return Err(FuzzError::Config(format!(
                "max_predicates must be in 1..={}",
                PREDICATES.len()
            )));
        }
        if self.max_constants > CONSTANTS.len() {
            return Err(FuzzError::Config(format!(
                "max_constants must be at most {}",
                CONSTANTS.len()
            )));
        }
        if self.max_rules == 0 || self.max_attempts == 0 {
            return Err(FuzzError::Config(
                "max_rules and max_attempts must be positive".into(),
            ));
        }
        Ok(())
    }
}

const PREDICATES: [&str; 6] = ["p", "q", "r", "s", "t", "u"];
const CONSTANTS: [&str; 5] = ["a", "b", "c", "d", "e"];

/// Draws a random ground program.
pub fn generate(cfg: &FuzzConfig, rng: &mut impl Rng) -> Program {
    let preds = rng.random_range(1..=cfg.max_predicates);
    let consts = cfg.max_constants;
    let arities: Vec<usize> = (0..preds)
        .map(|_| {
            if consts > 0 && rng.random_bool(0.5) {
                1
            } else {
                0
            }
        })
        .collect();
    let atom = |rng: &mut dyn rand::RngCore| {
        let p = rng.random_range(0..preds);
        let args = if arities[p] == 1 {
            vec![Term::Const(
                CONSTANTS[rng.random_range(0..consts)].to_string(),
            )]
        } else {
            vec![]
        };
        Atom::new(PREDICATES[p], args)
    };
    let literal = |rng: &mut dyn rand::RngCore| {
        let a = atom(rng);
        if rng.random_bool(cfg.prob_classical_negation) {
            ObjectiveLiteral::neg(a)
        } else {
            ObjectiveLiteral::pos(a)
        }
    };
    let rules = rng.random_range(1..=cfg.max_rules);
    let mut out = Vec::with_capacity(rules);
    for _ in 0..rules {
        let mut head = vec![literal(rng)];
        while head.len() < 3 && rng.random_bool(cfg.prob_disjunction) {
            head.push(literal(rng));
        }
        let mut body_pos = Vec::new();
        let mut body_neg = Vec::new();
        if cfg.max_body > 0 && rng.random_bool(0.7) {
            for _ in 0..rng.random_range(1..=cfg.max_body) {
                let roll: f64 = rng.random();
                let base = literal(rng);
                if roll < cfg.prob_k + cfg.prob_m {
                    let modality = if roll < cfg.prob_k {
                        Modality::K
                    } else {
                        Modality::M
                    };
                    let negated = rng.random_bool(cfg.prob_subjective_negation);
                    body_pos.push(BodyElem::Subjective(SubjectiveLiteral::new(
                        modality, negated, base,
                    )));
                } else if rng.random_bool(cfg.prob_not) {
                    body_neg.push(base);
                } else {
                    body_pos.push(BodyElem::Objective(base));
                }
            }
        }
        out.push(Rule::new(head, body_pos, body_neg).canonical());
    }
    let mut seen = BTreeSet::new();
    out.retain(|r| seen.insert(r.clone()));
    Program::new(out)
}

/// Nontrivial splitting sets: closures of single literals (with their
/// complements) that leave both bottom and top non-empty. Tried in random
/// order; the first hit is returned.
pub fn pick_splitting_set(p: &Program, rng: &mut impl Rng) -> Option<LitSet> {
    let mut seeds: Vec<ObjectiveLiteral> = p.literals().into_iter().collect();
    seeds.shuffle(rng);
    seeds.into_iter().find_map(|l| {
        let seed: LitSet = [l.complement(), l].into_iter().collect();
        let u = splitting_closure(p, &seed);
        let bottom = p.rules.iter().filter(|r| r.lit().is_subset(&u)).count();
        (bottom > 0 && bottom < p.len()).then_some(u)
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Agree,
    /// The engine raised the unsafety flag; the naive answer stands.
    Flagged,
    Diverged {
        naive: Vec<WorldView>,
        engine: Vec<WorldView>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Outcome {
    /// `instance N` or `corpus N`.
    pub source: String,
    pub program: Program,
    pub split_set: Option<LitSet>,
    pub guarded: Option<Guardedness>,
    pub stratified: bool,
    pub split: Option<Verdict>,
    pub strat: Option<Verdict>,
    /// Naive consistent world views.
    pub naive: Vec<WorldView>,
    /// Emitted world views that fail the independent fixpoint re-check
    /// (divergent engine answers excluded).
    pub recheck_failures: usize,
    /// The structural filters were never met; nothing was checked.
    pub exhausted: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Divergence {
    pub source: String,
    pub engine: Engine,
    pub program: String,
    pub split_set: Option<Vec<String>>,
    pub naive: Vec<String>,
    pub engine_views: Vec<String>,
    pub minimized: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FuzzReport {
    pub seed: u64,
    pub instances: usize,
    pub exhausted: usize,
    pub split_checked: usize,
    pub split_agree: usize,
    pub split_flagged: usize,
    /// Flagged instances that `is_guarded` accepted.
    pub guarded_flagged: usize,
    pub strat_checked: usize,
    pub strat_agree: usize,
    pub strat_flagged: usize,
    pub recheck_failures: usize,
    pub divergences: Vec<Divergence>,
    #[serde(skip)]
    pub outcomes: Vec<Outcome>,
}

impl FuzzReport {
    pub fn exit_code(&self) -> i32 {
        if self.divergences.is_empty() {
            0
        } else {
            1
        }
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "seed: {}", self.seed);
        let _ = writeln!(
            out,
            "instances: {} ({} exhausted)",
            self.instances, self.exhausted
        );
        let _ = writeln!(
            out,
            "split: {} checked, {} agree, {} flagged ({} guarded)",
            self.split_checked, self.split_agree, self.split_flagged, self.guarded_flagged
        );
        let _ = writeln!(
            out,
            "stratified: {} checked, {} agree, {} flagged",
            self.strat_checked, self.strat_agree, self.strat_flagged
        );
        let _ = writeln!(out, "fixpoint re-check failures: {}", self.recheck_failures);
        let _ = writeln!(out, "divergences: {}", self.divergences.len());
        for d in &self.divergences {
            let engine = match d.engine {
                Engine::Split => "split",
                Engine::Stratified => "stratified",
            };
            let _ = writeln!(out, "--- {} ({engine})", d.source);
            if let Some(u) = &d.split_set {
                let _ = writeln!(out, "splitting set: {{{}}}", u.join(", "));
            }
            let _ = writeln!(out, "naive:  {}", d.naive.join(" "));
            let _ = writeln!(out, "engine: {}", d.engine_views.join(" "));
            let _ = writeln!(out, "program:\n{}", d.program.trim_end());
            let _ = writeln!(out, "minimized:\n{}", d.minimized.trim_end());
        }
        out
    }
}

fn consistent_naive(p: &Program, limits: &Limits) -> Result<Vec<WorldView>, LimitError> {
    Ok(semantics::world_views(p, limits)?
        .consistent_set()
        .into_iter()
        .collect())
}

fn split_verdict(
    p: &Program,
    u: &LitSet,
    naive: &[WorldView],
    cfg: &FuzzConfig,
) -> Result<Verdict, LimitError> {
    let opts = SplitOptions {
        detect_unsafe: cfg.fallback,
        strict: false,
    };
    match solve_by_splitting(p, u, &cfg.limits, opts) {
        Ok(views) if views == naive => Ok(Verdict::Agree),
        Ok(views) => Ok(Verdict::Diverged {
            naive: naive.to_vec(),
            engine: views,
        }),
        Err(SplitError::PossiblyUnsafeSplit { .. }) => Ok(Verdict::Flagged),
        Err(SplitError::Limit(l)) => Err(l),
        Err(e) => unreachable!("split set was validated: {e}"),
    }
}

fn strat_verdict(
    p: &Program,
    naive: &[WorldView],
    cfg: &FuzzConfig,
) -> Result<Option<Verdict>, LimitError> {
    match solve_stratified(p, Layering::Greedy, &cfg.limits) {
        Ok(sol) if naive == [sol.view.clone()] => Ok(Some(Verdict::Agree)),
        Ok(sol) => Ok(Some(Verdict::Diverged {
            naive: naive.to_vec(),
            engine: vec![sol.view],
        })),
        Err(StratError::PossiblyUnsafeSplit { .. }) => Ok(Some(Verdict::Flagged)),
        Err(StratError::NotStratified) => Ok(None),
        Err(StratError::Limit(l)) => Err(l),
        Err(e) => unreachable!("stratified solver invariant broken: {e}"),
    }
}

fn recheck(p: &Program, views: &[WorldView], limits: &Limits) -> Result<usize, LimitError> {
    let mut bad = 0;
    for w in views {
        if !semantics::is_world_view(p, w, limits)? {
            bad += 1;
        }
    }
    Ok(bad)
}

/// Runs every enabled engine on one program.
fn check(
    source: String,
    p: Program,
    split_set: Option<LitSet>,
    cfg: &FuzzConfig,
) -> Result<Outcome, LimitError> {
    let naive = consistent_naive(&p, &cfg.limits)?;
    let recheck_failures = recheck(&p, &naive, &cfg.limits)?;
    let stratified = find_stratification(&p, Layering::Greedy).is_some();
    let mut outcome = Outcome {
        source,
        guarded: None,
        stratified,
        split: None,
        strat: None,
        naive,
        recheck_failures,
        exhausted: false,
        split_set: None,
        program: p,
    };
    if cfg.engines.contains(&Engine::Split) {
        if let Some(u) = split_set.filter(|u| is_splitting_set(u, &outcome.program)) {
            outcome.guarded = is_guarded(&outcome.program, &u, &cfg.guard).ok();
            let v = split_verdict(&outcome.program, &u, &outcome.naive, cfg)?;
            outcome.split = Some(v);
            outcome.split_set = Some(u);
        }
    }
    if cfg.engines.contains(&Engine::Stratified) && stratified {
        outcome.strat = strat_verdict(&outcome.program, &outcome.naive, cfg)?;
    }
    // Agreeing engines emit the naive views, so re-checking those suffices.
    Ok(outcome)
}

fn instance(cfg: &FuzzConfig, index: usize) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(index as u64);
    let wants_split = cfg.engines.contains(&Engine::Split);
    let mut last = None;
    for _ in 0..cfg.max_attempts {
        let p = generate(cfg, &mut rng);
        if cfg.stratified_only && find_stratification(&p, Layering::Greedy).is_none() {
            continue;
        }
        let u = if wants_split {
            match pick_splitting_set(&p, &mut rng) {
                Some(u) => Some(u),
                None => continue,
            }
        } else {
            None
        };
        if cfg.guarded_only {
            let ok = u
                .as_ref()
                .is_some_and(|u| matches!(is_guarded(&p, u, &cfg.guard), Ok(Guardedness::Guarded)));
            if !ok {
                continue;
            }
        }
        match check(format!("instance {index}"), p.clone(), u, cfg) {
            Ok(o) => return o,
            Err(_) => last = Some(p),
        }
    }
    Outcome {
        source: format!("instance {index}"),
        program: last.unwrap_or_default(),
        split_set: None,
        guarded: None,
        stratified: false,
        split: None,
        strat: None,
        naive: Vec::new(),
        recheck_failures: 0,
        exhausted: true,
    }
}

fn diverges(p: &Program, u: Option<&LitSet>, engine: Engine, cfg: &FuzzConfig) -> bool {
    let Ok(naive) = consistent_naive(p, &cfg.limits) else {
        return false;
    };
    let verdict = match engine {
        Engine::Split => {
            let Some(u) = u else { return false };
            let u: LitSet = u.intersection(&p.literals()).cloned().collect();
            if !is_splitting_set(&u, p) {
                return false;
            }
            split_verdict(p, &u, &naive, cfg).ok()
        }
        Engine::Stratified => strat_verdict(p, &naive, cfg).ok().flatten(),
    };
    matches!(verdict, Some(Verdict::Diverged { .. }))
}

/// Greedy shrinking: drop single rules, then every rule mentioning a
/// constant, as long as the divergence persists; repeat until stable.
pub fn minimize(p: &Program, u: Option<&LitSet>, engine: Engine, cfg: &FuzzConfig) -> Program {
    let mut cur = p.clone();
    loop {
        let mut changed = false;
        let mut i = 0;
        while i < cur.len() {
            let mut cand = cur.clone();
            cand.rules.remove(i);
            if diverges(&cand, u, engine, cfg) {
                cur = cand;
                changed = true;
            } else {
                i += 1;
            }
        }
        for c in cur.constants() {
            let cand: Program = cur
                .rules
                .iter()
                .filter(|r| {
                    !r.lit()
                        .iter()
                        .any(|l| l.atom.args.iter().any(|t| t.name() == c))
                })
                .cloned()
                .collect();
            if cand.len() < cur.len() && diverges(&cand, u, engine, cfg) {
                cur = cand;
                changed = true;
            }
        }
        if !changed {
            return cur;
        }
    }
}

fn views_text(views: &[WorldView]) -> Vec<String> {
    views.iter().map(|w| w.to_string()).collect()
}

fn corpus_outcomes(cfg: &FuzzConfig) -> Result<Vec<Outcome>, FuzzError> {
    cfg.corpus
        .iter()
        .enumerate()
        .map(|(index, entry)| {
            let p = parse_program(&entry.program)
                .map_err(|source| FuzzError::Corpus { index, source })?;
            let p = crate::syntax::ground(&p, cfg.limits.max_ground)
                .map_err(|e| FuzzError::Config(format!("corpus entry {index}: {e}")))?;
            let p = if p.rules.iter().any(|r| r.head.is_empty()) {
                p.normalize_empty_heads()
            } else {
                p
            };
            let u = entry
                .split_set
                .as_ref()
                .map(|lits| parse_literal_list(&lits.join("\n")))
                .transpose()
                .map_err(|source| FuzzError::Corpus { index, source })?
                .map(|v| v.into_iter().collect::<LitSet>());
            check(format!("corpus {index}"), p, u, cfg)
                .map_err(|source| FuzzError::CorpusLimit { index, source })
        })
        .collect()
}

/// Runs the corpus and `cfg.count` generated instances. Instances run in
/// parallel; the report is assembled in index order.
pub fn run_fuzz(cfg: &FuzzConfig) -> Result<FuzzReport, FuzzError> {
    cfg.validate()?;
    let mut outcomes = corpus_outcomes(cfg)?;
    let generated: Vec<Outcome> = (0..cfg.count)
        .into_par_iter()
        .map(|i| instance(cfg, i))
        .collect();
    outcomes.extend(generated);

    let mut report = FuzzReport {
        seed: cfg.seed,
        instances: outcomes.len(),
        ..FuzzReport::default()
    };
    for o in &outcomes {
        if o.exhausted {
            report.exhausted += 1;
            continue;
        }
        report.recheck_failures += o.recheck_failures;
        let guarded = matches!(o.guarded, Some(Guardedness::Guarded));
        for (engine, verdict) in [(Engine::Split, &o.split), (Engine::Stratified, &o.strat)] {
            let Some(v) = verdict else { continue };
            let (checked, agree, flagged) = match engine {
                Engine::Split => (
                    &mut report.split_checked,
                    &mut report.split_agree,
                    &mut report.split_flagged,
                ),
                Engine::Stratified => (
                    &mut report.strat_checked,
                    &mut report.strat_agree,
                    &mut report.strat_flagged,
                ),
            };
            *checked += 1;
            match v {
                Verdict::Agree => *agree += 1,
                Verdict::Flagged => {
                    *flagged += 1;
                    if engine == Engine::Split && guarded {
                        report.guarded_flagged += 1;
                    }
                }
                Verdict::Diverged { naive, engine: got } => {
                    let minimized = if cfg.minimize {
                        minimize(&o.program, o.split_set.as_ref(), engine, cfg)
                    } else {
                        o.program.clone()
                    };
                    report.divergences.push(Divergence {
                        source: o.source.clone(),
                        engine,
                        program: o.program.to_string(),
                        split_set: o
                            .split_set
                            .as_ref()
                            .filter(|_| engine == Engine::Split)
                            .map(|u| u.iter().map(|l| l.to_string()).collect()),
                        naive: views_text(naive),
                        engine_views: views_text(got),
                        minimized: minimized.to_string(),
                    });
                }
            }
        }
    }
    report.outcomes = outcomes;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    const UNSAFE_SPLIT: &str = "p(a) or p(b).\np(c) :- M p(b).\np(d) :- p(b).\n-p(d) :- p(b).";

    fn unsafe_split_entry() -> CorpusEntry {
        CorpusEntry {
            program: UNSAFE_SPLIT.into(),
            split_set: Some(
                ["p(a)", "-p(a)", "p(b)", "-p(b)", "p(c)", "-p(c)"]
                    .iter()
                    .map(|s| s.to_string())
                    .collect(),
            ),
        }
    }

    #[test]
    fn replay_is_identical() {
        let cfg = FuzzConfig {
            seed: 7,
            count: 30,
            ..FuzzConfig::default()
        };
        let a = run_fuzz(&cfg).unwrap();
        let b = run_fuzz(&cfg).unwrap();
        assert_eq!(a.render_text(), b.render_text());
        assert_eq!(a.outcomes, b.outcomes);
        let other = run_fuzz(&FuzzConfig { seed: 8, ..cfg }).unwrap();
        assert_ne!(a.outcomes, other.outcomes);
    }

    #[test]
    fn generated_programs_respect_bounds() {
        let cfg = FuzzConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let p = generate(&cfg, &mut rng);
            assert!(!p.is_empty() && p.len() <= cfg.max_rules);
            assert!(p.is_ground());
            let preds: BTreeSet<_> = p
                .literals()
                .iter()
                .map(|l| l.atom.predicate.clone())
                .collect();
            assert!(preds.len() <= cfg.max_predicates);
            assert!(p.constants().len() <= cfg.max_constants);
        }
    }

    #[test]
    fn picked_sets_split_nontrivially() {
        let cfg = FuzzConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut found = 0;
        for _ in 0..200 {
            let p = generate(&cfg, &mut rng);
            if let Some(u) = pick_splitting_set(&p, &mut rng) {
                assert!(is_splitting_set(&u, &p));
                let bottom = p.rules.iter().filter(|r| r.lit().is_subset(&u)).count();
                assert!(bottom > 0 && bottom < p.len());
                found += 1;
            }
        }
        assert!(found > 20);
    }

    #[test]
    fn unsafe_corpus_entry_diverges_without_detection() {
        let cfg = FuzzConfig {
            count: 0,
            fallback: false,
            engines: vec![Engine::Split],
            corpus: vec![unsafe_split_entry()],
            ..FuzzConfig::default()
        };
        let report = run_fuzz(&cfg).unwrap();
        assert_eq!(report.divergences.len(), 1);
        let d = &report.divergences[0];
        assert_eq!(d.naive, ["{{p(a)}}"]);
        assert_eq!(d.engine_views, ["{{p(a), p(c)}}"]);
        assert_eq!(report.exit_code(), 1);
        // The minimizer keeps the program, every rule is needed.
        assert_eq!(d.minimized.lines().count(), 4);

        let detected = run_fuzz(&FuzzConfig {
            fallback: true,
            ..cfg
        })
        .unwrap();
        assert!(detected.divergences.is_empty());
        assert_eq!(detected.split_flagged, 1);
    }

    #[test]
    fn bad_configs_are_rejected() {
        for cfg in [
            FuzzConfig {
                prob_not: 1.5,
                ..FuzzConfig::default()
            },
            FuzzConfig {
                max_predicates: 0,
                ..FuzzConfig::default()
            },
            FuzzConfig {
                max_constants: 9,
                ..FuzzConfig::default()
            },
            FuzzConfig {
                prob_k: 0.6,
                prob_m: 0.6,
                ..FuzzConfig::default()
            },
        ] {
            assert!(matches!(run_fuzz(&cfg), Err(FuzzError::Config(_))));
        }
    }

    #[test]
    fn config_from_json_uses_defaults() {
        let cfg: FuzzConfig =
            serde_json::from_str(r#"{"seed": 3, "count": 5, "guarded_only": true}"#).unwrap();
        assert_eq!(cfg.seed, 3);
        assert!(cfg.guarded_only);
        assert_eq!(cfg.max_rules, FuzzConfig::default().max_rules);
    }
}
