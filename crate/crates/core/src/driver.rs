//! End-to-end solving: text in, report out. Shared by the binary and the
//! fuzzing harness.

use std::fmt::{self, Write as _};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::semantics::{self, LimitError, Limits, WorldView};
use crate::splitting::{self, SplitError, SplitOptions};
use crate::stratification::{self, Layering, StratError, Stratification};
use crate::syntax::{
    ground, parse_literal, parse_program, GroundError, LitSet, ParseError, Program, QueryLiteral,
};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Auto,
    Naive,
    Split,
    Stratified,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Auto => "auto",
            Mode::Naive => "naive",
            Mode::Split => "split",
            Mode::Stratified => "stratified",
        })
    }
}

#[derive(Debug, Error)]
pub enum DriverError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Ground(#[from] GroundError),
    #[error(transparent)]
    Limit(#[from] LimitError),
    #[error("not a splitting set: {0}")]
    NotASplittingSet(String),
    #[error("{0}")]
    Invalid(String),
    #[error("{engine} engine failed without fallback: {reason}")]
    NoFallback { engine: Mode, reason: String },
}

impl DriverError {
    /// Process exit status for this failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            DriverError::Parse(_) | DriverError::Invalid(_) | DriverError::NoFallback { .. } => 1,
            DriverError::Ground(_) | DriverError::Limit(_) => 2,
            DriverError::NotASplittingSet(_) => 4,
        }
    }
}

impl From<SplitError> for DriverError {
    fn from(e: SplitError) -> Self {
        match e {
            SplitError::NotASplittingSet(why) => DriverError::NotASplittingSet(why),
            SplitError::Limit(l) => DriverError::Limit(l),
            other => DriverError::Invalid(other.to_string()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveOptions {
    pub mode: Mode,
    /// Splitting set for split mode; the empty set when absent.
    pub split_set: Option<LitSet>,
    pub limits: Limits,
    pub layering: Layering,
    /// Fall back to the naive engine when the chosen engine cannot vouch for
    /// its answer. Without it, split mode combines regardless of safety and
    /// stratified mode reports the failure as an error.
    pub fallback: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            mode: Mode::Auto,
            split_set: None,
            limits: Limits::default(),
            layering: Layering::Greedy,
            fallback: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fallback {
    pub from: Mode,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveReport {
    pub mode: Mode,
    /// The engine whose answer is reported.
    pub engine: Mode,
    pub world_views: Vec<WorldView>,
    pub consistent: Vec<bool>,
    /// Whether the empty collection also satisfies the fixpoint (naive engine
    /// only).
    pub empty_view: bool,
    pub fallbacks: Vec<Fallback>,
    pub strata: Option<Vec<LitSet>>,
    #[serde(skip)]
    pub timings: Vec<(String, Duration)>,
}

impl SolveReport {
    pub fn has_consistent(&self) -> bool {
        self.consistent.iter().any(|&c| c)
    }

    /// 0 with at least one consistent world view, 3 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.has_consistent() {
            0
        } else {
            3
        }
    }

    pub fn render_text(&self, show_strata: bool) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "mode: {} (engine: {})", self.mode, self.engine);
        for fb in &self.fallbacks {
            let _ = writeln!(out, "fallback: {} -> naive: {}", fb.from, fb.reason);
        }
        if show_strata {
            match &self.strata {
                Some(strata) => {
                    for (i, s) in strata.iter().enumerate() {
                        let lits: Vec<String> = s.iter().map(|l| l.to_string()).collect();
                        let _ = writeln!(out, "stratum {i}: {{{}}}", lits.join(", "));
                    }
                }
                None => out.push_str("strata: none\n"),
            }
        }
        if self.world_views.is_empty() {
            out.push_str("no world view\n");
        } else {
            let _ = writeln!(out, "world views: {}", self.world_views.len());
            for (w, c) in self.world_views.iter().zip(&self.consistent) {
                let _ = writeln!(out, "{w}{}", if *c { "" } else { "  (inconsistent)" });
            }
        }
        if self.empty_view {
            out.push_str("note: the empty collection is also a fixpoint\n");
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        // A belief set is an array of literal strings; `Lit` is null.
        let views: Vec<Vec<Option<Vec<String>>>> = self
            .world_views
            .iter()
            .map(|w| {
                w.iter()
                    .map(|b| {
                        b.literals()
                            .map(|s| s.iter().map(|l| l.to_string()).collect())
                    })
                    .collect()
            })
            .collect();
        let strata = self.strata.as_ref().map(|s| {
            s.iter()
                .map(|set| set.iter().map(|l| l.to_string()).collect::<Vec<_>>())
                .collect::<Vec<_>>()
        });
        serde_json::json!({
            "mode": self.mode,
            "engine": self.engine,
            "world_views": views,
            "consistent": self.consistent,
            "empty_view": self.empty_view,
            "fallbacks": self.fallbacks,
            "strata": strata,
        })
    }
}

/// Parses, grounds and normalizes a program text. Constraints get the head
/// `-true` together with the fact `true`.
pub fn prepare(text: &str, limits: &Limits) -> Result<Program, DriverError> {
    let parsed = parse_program(text)?;
    let grounded = ground(&parsed, limits.max_ground)?;
    Ok(if grounded.rules.iter().any(|r| r.head.is_empty()) {
        grounded.normalize_empty_heads()
    } else {
        grounded
    })
}

fn timed<T>(timings: &mut Vec<(String, Duration)>, stage: &str, f: impl FnOnce() -> T) -> T {
    let start = Instant::now();
    let out = f();
    timings.push((stage.to_string(), start.elapsed()));
    out
}

fn naive(p: &Program, limits: &Limits, report: &mut SolveReport) -> Result<(), DriverError> {
    let found = timed(&mut report.timings, "naive", || {
        semantics::world_views(p, limits)
    })?;
    report.engine = Mode::Naive;
    report.consistent = found.views.iter().map(WorldView::is_consistent).collect();
    report.world_views = found.views;
    report.empty_view = found.empty;
    Ok(())
}

fn set_views(report: &mut SolveReport, engine: Mode, views: Vec<WorldView>) {
    report.engine = engine;
    report.consistent = views.iter().map(WorldView::is_consistent).collect();
    report.world_views = views;
}

/// Solves a prepared program.
pub fn solve(p: &Program, opts: &SolveOptions) -> Result<SolveReport, DriverError> {
    let mut report = SolveReport {
        mode: opts.mode,
        engine: opts.mode,
        world_views: Vec::new(),
        consistent: Vec::new(),
        empty_view: false,
        fallbacks: Vec::new(),
        strata: None,
        timings: Vec::new(),
    };
    let limits = &opts.limits;
    match opts.mode {
        Mode::Naive => naive(p, limits, &mut report)?,
        Mode::Split => {
            let u = opts.split_set.clone().unwrap_or_default();
            let split_opts = SplitOptions {
                detect_unsafe: opts.fallback,
                strict: false,
            };
            let result = timed(&mut report.timings, "split", || {
                splitting::solve_by_splitting(p, &u, limits, split_opts)
            });
            match result {
                Ok(views) => set_views(&mut report, Mode::Split, views),
                Err(SplitError::PossiblyUnsafeSplit { belief_set }) => {
                    report.fallbacks.push(Fallback {
                        from: Mode::Split,
                        reason: format!("possibly unsafe split at bottom belief set {belief_set}"),
                    });
                    naive(p, limits, &mut report)?;
                }
                Err(e) => return Err(e.into()),
            }
        }
        Mode::Stratified | Mode::Auto => {
            let result = timed(&mut report.timings, "stratified", || {
                stratification::solve_stratified(p, opts.layering, limits)
            });
            match result {
                Ok(sol) => {
                    report.strata = Some(sol.stratification.strata);
                    set_views(&mut report, Mode::Stratified, vec![sol.view]);
                }
                Err(e @ (StratError::NotStratified | StratError::PossiblyUnsafeSplit { .. })) => {
                    if opts.mode == Mode::Stratified && !opts.fallback {
                        return Err(DriverError::NoFallback {
                            engine: Mode::Stratified,
                            reason: e.to_string(),
                        });
                    }
                    report.strata =
                        stratification::find_stratification(p, opts.layering).map(|s| s.strata);
                    report.fallbacks.push(Fallback {
                        from: Mode::Stratified,
                        reason: e.to_string(),
                    });
                    naive(p, limits, &mut report)?;
                }
                Err(StratError::Limit(l)) => return Err(l.into()),
                Err(e) => return Err(DriverError::Invalid(e.to_string())),
            }
        }
    }
    Ok(report)
}

/// Parses and solves `text`.
pub fn run_solve(text: &str, opts: &SolveOptions) -> Result<SolveReport, DriverError> {
    let p = prepare(text, &opts.limits)?;
    solve(&p, opts)
}

/// The stratification of a prepared program, if any.
pub fn strata_of(p: &Program, layering: Layering) -> Option<Stratification> {
    stratification::find_stratification(p, layering)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryReport {
    pub literal: String,
    /// True in every world view (vacuously true when there is none).
    pub holds: bool,
    pub per_view: Vec<bool>,
    /// The literal's base does not occur in the program.
    pub unknown: bool,
}

impl QueryReport {
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        if self.unknown {
            let _ = writeln!(
                out,
                "warning: {} does not occur in the program",
                self.literal
            );
        }
        for (i, v) in self.per_view.iter().enumerate() {
            let _ = writeln!(out, "world view {i}: {v}");
        }
        let _ = writeln!(out, "{}: {}", self.literal, self.holds);
        out
    }
}

/// Truth of a literal with respect to the world views in `report`: an
/// objective literal must be in every belief set, a subjective one satisfied
/// by every view.
pub fn run_query(
    p: &Program,
    report: &SolveReport,
    literal: &str,
) -> Result<QueryReport, DriverError> {
    let q = parse_literal(literal)?;
    let lits = p.literals();
    let (per_view, base) = match &q {
        QueryLiteral::Objective(l) => (
            report
                .world_views
                .iter()
                .map(|w| w.entails(l))
                .collect::<Vec<_>>(),
            l,
        ),
        QueryLiteral::Subjective(s) => (
            report.world_views.iter().map(|w| w.satisfies(s)).collect(),
            &s.base,
        ),
    };
    Ok(QueryReport {
        literal: q.to_string(),
        holds: per_view.iter().all(|&b| b),
        per_view,
        unknown: !lits.contains(base),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::ObjectiveLiteral;

    const POSSIBILITY: &str = "p(a) or p(b).\np(c).\nq(d).\n-p(X) :- -M p(X).";
    const UNSAFE_SPLIT: &str = "p(a) or p(b).\np(c) :- M p(b).\np(d) :- p(b).\n-p(d) :- p(b).";

    fn opts(mode: Mode) -> SolveOptions {
        SolveOptions {
            mode,
            ..SolveOptions::default()
        }
    }

    fn unsafe_split_set() -> LitSet {
        ["a", "b", "c"]
            .iter()
            .flat_map(|c| {
                let l = ObjectiveLiteral::ground("p", &[c]);
                [l.complement(), l]
            })
            .collect()
    }

    #[test]
    fn auto_falls_back_on_unstratified_input() {
        let r = run_solve(POSSIBILITY, &opts(Mode::Auto)).unwrap();
        assert_eq!(r.engine, Mode::Naive);
        assert_eq!(r.fallbacks.len(), 1);
        assert_eq!(r.exit_code(), 0);
        assert_eq!(
            r.world_views,
            run_solve(POSSIBILITY, &opts(Mode::Naive))
                .unwrap()
                .world_views
        );
    }

    #[test]
    fn no_world_view_exits_three_in_every_mode() {
        for mode in [Mode::Auto, Mode::Naive, Mode::Split, Mode::Stratified] {
            let r = run_solve("p(a) :- -K p(a).", &opts(mode)).unwrap();
            assert!(r.world_views.is_empty());
            assert_eq!(r.exit_code(), 3, "{mode}");
            assert!(r.render_text(false).contains("no world view"));
        }
    }

    #[test]
    fn split_mode_records_the_fallback() {
        let mut o = opts(Mode::Split);
        o.split_set = Some(unsafe_split_set());
        let r = run_solve(UNSAFE_SPLIT, &o).unwrap();
        assert_eq!(r.fallbacks.len(), 1);
        assert_eq!(r.world_views.len(), 1);
        assert_eq!(r.world_views[0].to_string(), "{{p(a)}}");
        o.fallback = false;
        let wrong = run_solve(UNSAFE_SPLIT, &o).unwrap();
        assert!(wrong.fallbacks.is_empty());
        assert_eq!(wrong.world_views[0].to_string(), "{{p(a), p(c)}}");
    }

    #[test]
    fn error_codes() {
        assert_eq!(
            run_solve("p(a", &opts(Mode::Naive))
                .unwrap_err()
                .exit_code(),
            1
        );
        let mut o = opts(Mode::Split);
        o.split_set = Some(
            [ObjectiveLiteral::ground("p", &["c"])]
                .into_iter()
                .collect(),
        );
        assert_eq!(run_solve(UNSAFE_SPLIT, &o).unwrap_err().exit_code(), 4);
        let mut tight = opts(Mode::Naive);
        tight.limits.max_ground = 2;
        assert_eq!(run_solve(POSSIBILITY, &tight).unwrap_err().exit_code(), 2);
        let mut strict = opts(Mode::Stratified);
        strict.fallback = false;
        assert_eq!(run_solve(POSSIBILITY, &strict).unwrap_err().exit_code(), 1);
    }

    #[test]
    fn queries() {
        let p = prepare(POSSIBILITY, &Limits::default()).unwrap();
        let r = solve(&p, &opts(Mode::Naive)).unwrap();
        assert!(run_query(&p, &r, "K q(d)").unwrap().holds);
        let t = run_query(&p, &r, "K t").unwrap();
        assert!(!t.holds && t.unknown);
        let p2 = prepare("p(a) :- -M q(a).\nq(a) :- -M p(a).", &Limits::default()).unwrap();
        let r2 = solve(&p2, &opts(Mode::Naive)).unwrap();
        let q = run_query(&p2, &r2, "p(a)").unwrap();
        assert!(!q.holds);
        assert_eq!(q.per_view.len(), 2);
    }

    #[test]
    fn constraints_are_normalized() {
        let r = run_solve("a or b.\n:- a.", &opts(Mode::Auto)).unwrap();
        assert_eq!(r.engine, Mode::Stratified);
        assert_eq!(r.world_views[0].to_string(), "{{b, true}}");
    }

    #[test]
    fn reports_are_deterministic() {
        let a = run_solve(POSSIBILITY, &opts(Mode::Auto)).unwrap();
        let b = run_solve(POSSIBILITY, &opts(Mode::Auto)).unwrap();
        assert_eq!(a.render_text(true), b.render_text(true));
        assert_eq!(a.to_json(), b.to_json());
        assert!(a.to_json()["world_views"].is_array());
    }
}
