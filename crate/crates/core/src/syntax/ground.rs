use std::collections::{BTreeMap, HashSet};

use thiserror::Error;

use super::{Atom, BodyElem, ObjectiveLiteral, Program, Rule, Term};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum GroundError {
    #[error("grounding produces more than {limit} rules")]
    TooManyRules { limit: usize },
}

fn subst_lit(l: &ObjectiveLiteral, env: &BTreeMap<&str, &str>) -> ObjectiveLiteral {
    let args = l
        .atom
        .args
        .iter()
        .map(|t| match t {
            Term::Var(v) => Term::Const(env[v.as_str()].to_string()),
            c => c.clone(),
        })
        .collect();
    ObjectiveLiteral {
        atom: Atom::new(l.atom.predicate.clone(), args),
        negated: l.negated,
    }
}

fn subst(rule: &Rule, env: &BTreeMap<&str, &str>) -> Rule {
    Rule {
        head: rule.head.iter().map(|l| subst_lit(l, env)).collect(),
        body_pos: rule
            .body_pos
            .iter()
            .map(|e| match e {
                BodyElem::Objective(l) => BodyElem::Objective(subst_lit(l, env)),
                BodyElem::Subjective(s) => {
                    let mut s = s.clone();
                    s.base = subst_lit(&s.base, env);
                    BodyElem::Subjective(s)
                }
            })
            .collect(),
        body_neg: rule.body_neg.iter().map(|l| subst_lit(l, env)).collect(),
    }
}

/// Replaces every rule by all its instances over the program's constants.
/// Duplicate ground rules are dropped; first-occurrence order is kept.
pub fn ground(program: &Program, max_rules: usize) -> Result<Program, GroundError> {
    let constants: Vec<String> = program.constants().into_iter().collect();
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    let mut push = |r: Rule, out: &mut Vec<Rule>| -> Result<(), GroundError> {
        if seen.insert(r.clone()) {
            if out.len() >= max_rules {
                return Err(GroundError::TooManyRules { limit: max_rules });
            }
            out.push(r);
        }
        Ok(())
    };

    for rule in &program.rules {
        let vars = rule.variables();
        if vars.is_empty() {
            push(rule.clone(), &mut out)?;
            continue;
        }
        if constants.is_empty() {
            continue;
        }
        let mut idx = vec![0usize; vars.len()];
        'instances: loop {
            let env: BTreeMap<&str, &str> = vars
                .iter()
                .zip(&idx)
                .map(|(v, &i)| (v.as_str(), constants[i].as_str()))
                .collect();
            push(subst(rule, &env), &mut out)?;
            let mut k = vars.len();
            loop {
                if k == 0 {
                    break 'instances;
                }
                k -= 1;
                idx[k] += 1;
                if idx[k] < constants.len() {
                    break;
                }
                idx[k] = 0;
            }
        }
    }
    Ok(Program::new(out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_program;

    #[test]
    fn possibility_rule_over_four_constants() {
        let p = parse_program("p(a) or p(b).\np(c).\nq(d).\n-p(X) :- -M p(X).").unwrap();
        let g = ground(&p, 5000).unwrap();
        assert_eq!(g.len(), 7);
        let shown: Vec<String> = g.rules[3..].iter().map(|r| r.to_string()).collect();
        assert_eq!(
            shown,
            [
                "-p(a) :- -M p(a).",
                "-p(b) :- -M p(b).",
                "-p(c) :- -M p(c).",
                "-p(d) :- -M p(d).",
            ]
        );
        assert!(g.is_ground());
    }

    #[test]
    fn ground_program_is_unchanged() {
        let p = parse_program("a or b :- c, K d, not e.\nc.").unwrap();
        assert_eq!(ground(&p, 10).unwrap(), p);
    }

    #[test]
    fn cartesian_count() {
        let p = parse_program("e(a). e(b). e(c).\nr(X, Y) :- e(X), e(Y).").unwrap();
        let g = ground(&p, 100).unwrap();
        assert_eq!(g.len(), 3 + 9);
    }

    #[test]
    fn limit() {
        let p = parse_program("e(a). e(b). e(c).\nr(X, Y) :- e(X), e(Y).").unwrap();
        assert_eq!(ground(&p, 5), Err(GroundError::TooManyRules { limit: 5 }));
    }

    #[test]
    fn adding_a_constant_keeps_instances() {
        let p = parse_program("e(a). e(b).\nr(X) :- e(X), not s(X).").unwrap();
        let q = p.union(&parse_program("s(c).").unwrap());
        let gp = ground(&p, 100).unwrap();
        let gq = ground(&q, 100).unwrap();
        assert!(gp.rules.iter().all(|r| gq.rules.contains(r)));
        assert!(gq.len() > gp.len());
    }
}
