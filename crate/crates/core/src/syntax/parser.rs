use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use super::lexer::{lex, Pos, Spanned, Tok};
use super::{Atom, BodyElem, Modality, ObjectiveLiteral, Program, Rule, SubjectiveLiteral, Term};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("{line}:{col}: syntax error: {message}")]
    Syntax {
        line: usize,
        col: usize,
        message: String,
    },
    #[error(
        "{line}:{col}: predicate `{predicate}` used with arity {found}, previously {expected}"
    )]
    Arity {
        predicate: String,
        expected: usize,
        found: usize,
        line: usize,
        col: usize,
    },
    #[error(
        "{line}:{col}: unsafe variable `{variable}`: it must occur in a positive body literal"
    )]
    UnsafeVariable {
        variable: String,
        line: usize,
        col: usize,
    },
    #[error("{line}:{col}: expected a ground literal, found variable `{variable}`")]
    NotGround {
        variable: String,
        line: usize,
        col: usize,
    },
}

impl ParseError {
    fn syntax(pos: Pos, message: impl Into<String>) -> Self {
        ParseError::Syntax {
            line: pos.line,
            col: pos.col,
            message: message.into(),
        }
    }

    pub fn line(&self) -> usize {
        match self {
            ParseError::Syntax { line, .. }
            | ParseError::Arity { line, .. }
            | ParseError::UnsafeVariable { line, .. }
            | ParseError::NotGround { line, .. } => *line,
        }
    }
}

/// A literal given on the command line for querying.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum QueryLiteral {
    Objective(ObjectiveLiteral),
    Subjective(SubjectiveLiteral),
}

impl fmt::Display for QueryLiteral {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QueryLiteral::Objective(l) => write!(f, "{l}"),
            QueryLiteral::Subjective(s) => write!(f, "{s}"),
        }
    }
}

struct Parser {
    toks: Vec<Spanned>,
    i: usize,
    end: Pos,
}

impl Parser {
    fn new(text: &str) -> Result<Self, ParseError> {
        let toks = lex(text).map_err(|(pos, msg)| ParseError::syntax(pos, msg))?;
        let end = end_pos(text);
        Ok(Self { toks, i: 0, end })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.i).map(|t| &t.tok)
    }

    fn peek2(&self) -> Option<&Tok> {
        self.toks.get(self.i + 1).map(|t| &t.tok)
    }

    fn pos(&self) -> Pos {
        self.toks.get(self.i).map(|t| t.pos).unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.i).map(|t| t.tok.clone());
        self.i += 1;
        t
    }

    fn at_end(&self) -> bool {
        self.i >= self.toks.len()
    }

    fn unexpected(&self, wanted: &str) -> ParseError {
        match self.peek() {
            Some(t) => ParseError::syntax(self.pos(), format!("expected {wanted}, found {t}")),
            None => {
                ParseError::syntax(self.pos(), format!("expected {wanted}, found end of input"))
            }
        }
    }

    fn expect(&mut self, tok: Tok, wanted: &str) -> Result<(), ParseError> {
        if self.peek() == Some(&tok) {
            self.i += 1;
            Ok(())
        } else {
            Err(self.unexpected(wanted))
        }
    }

    fn rule(&mut self) -> Result<Rule, ParseError> {
        let mut rule = Rule::default();
        if self.peek() != Some(&Tok::If) {
            rule.head.push(self.objlit()?);
            while self.peek() == Some(&Tok::Or) {
                self.bump();
                rule.head.push(self.objlit()?);
            }
        }
        if self.peek() == Some(&Tok::If) {
            self.bump();
            self.body_elem(&mut rule)?;
            while self.peek() == Some(&Tok::Comma) {
                self.bump();
                self.body_elem(&mut rule)?;
            }
        }
        self.expect(Tok::Dot, "`.`")?;
        Ok(rule)
    }

    fn body_elem(&mut self, rule: &mut Rule) -> Result<(), ParseError> {
        match self.peek() {
            Some(Tok::Not) => {
                self.bump();
                // `not` in front of a subjective literal is the same as its
                // outer negation, since subjective literals are never unknown.
                if matches!(self.peek(), Some(Tok::K | Tok::M | Tok::Glued(..))) {
                    let s = self.subjective(true)?;
                    rule.body_pos.push(BodyElem::Subjective(s));
                } else if self.peek() == Some(&Tok::Minus)
                    && matches!(self.peek2(), Some(Tok::K | Tok::M | Tok::Glued(..)))
                {
                    return Err(ParseError::syntax(
                        self.pos(),
                        "`not -K`/`not -M` is not supported; write `K`/`M` instead",
                    ));
                } else {
                    rule.body_neg.push(self.objlit()?);
                }
            }
            Some(Tok::Minus) if matches!(self.peek2(), Some(Tok::K | Tok::M | Tok::Glued(..))) => {
                self.bump();
                let s = self.subjective(true)?;
                rule.body_pos.push(BodyElem::Subjective(s));
            }
            Some(Tok::K | Tok::M | Tok::Glued(..)) => {
                let s = self.subjective(false)?;
                rule.body_pos.push(BodyElem::Subjective(s));
            }
            _ => rule.body_pos.push(BodyElem::Objective(self.objlit()?)),
        }
        Ok(())
    }

    fn subjective(&mut self, negated: bool) -> Result<SubjectiveLiteral, ParseError> {
        match self.bump() {
            Some(Tok::K) => Ok(SubjectiveLiteral::new(Modality::K, negated, self.objlit()?)),
            Some(Tok::M) => Ok(SubjectiveLiteral::new(Modality::M, negated, self.objlit()?)),
            Some(Tok::Glued(m, name)) => {
                let args = self.args()?;
                Ok(SubjectiveLiteral::new(
                    m,
                    negated,
                    ObjectiveLiteral::pos(Atom::new(name, args)),
                ))
            }
            _ => unreachable!("caller checked for a modality"),
        }
    }

    fn objlit(&mut self) -> Result<ObjectiveLiteral, ParseError> {
        let negated = if self.peek() == Some(&Tok::Minus) {
            self.bump();
            true
        } else {
            false
        };
        let name = match self.peek() {
            Some(Tok::Ident(s)) => s.clone(),
            _ => return Err(self.unexpected("a literal")),
        };
        self.bump();
        let args = self.args()?;
        Ok(ObjectiveLiteral {
            atom: Atom::new(name, args),
            negated,
        })
    }

    fn args(&mut self) -> Result<Vec<Term>, ParseError> {
        let mut args = Vec::new();
        if self.peek() != Some(&Tok::LParen) {
            return Ok(args);
        }
        self.bump();
        loop {
            let t = match self.peek() {
                Some(Tok::Ident(s)) => Term::Const(s.clone()),
                Some(Tok::Var(s)) => Term::Var(s.clone()),
                Some(Tok::K) => Term::Var("K".into()),
                Some(Tok::M) => Term::Var("M".into()),
                Some(Tok::Glued(m, s)) => Term::Var(format!("{m}{s}")),
                _ => return Err(self.unexpected("a term")),
            };
            self.bump();
            args.push(t);
            match self.peek() {
                Some(Tok::Comma) => {
                    self.bump();
                }
                Some(Tok::RParen) => {
                    self.bump();
                    return Ok(args);
                }
                _ => return Err(self.unexpected("`,` or `)`")),
            }
        }
    }
}

fn end_pos(text: &str) -> Pos {
    let line = text.lines().count().max(1);
    let col = text
        .lines()
        .last()
        .map(|l| l.chars().count() + 1)
        .unwrap_or(1);
    Pos { line, col }
}

/// Every variable must occur in some positive body element. Subjective body
/// literals count: their arguments range over the whole constant set anyway.
fn check_safety(rule: &Rule, pos: Pos) -> Result<(), ParseError> {
    let bound: Vec<&str> = rule
        .body_pos
        .iter()
        .flat_map(|e| e.base().atom.args.iter())
        .filter(|t| t.is_var())
        .map(Term::name)
        .collect();
    for v in rule.variables() {
        if !bound.contains(&v.as_str()) {
            return Err(ParseError::UnsafeVariable {
                variable: v,
                line: pos.line,
                col: pos.col,
            });
        }
    }
    Ok(())
}

fn check_arity(
    rule: &Rule,
    pos: Pos,
    arities: &mut BTreeMap<String, usize>,
) -> Result<(), ParseError> {
    let atoms = rule
        .head
        .iter()
        .chain(rule.body_pos.iter().map(BodyElem::base))
        .chain(rule.body_neg.iter())
        .map(|l| &l.atom);
    for a in atoms {
        let expected = *arities.entry(a.predicate.clone()).or_insert(a.arity());
        if expected != a.arity() {
            return Err(ParseError::Arity {
                predicate: a.predicate.clone(),
                expected,
                found: a.arity(),
                line: pos.line,
                col: pos.col,
            });
        }
    }
    Ok(())
}

/// Parses a program text. Rules keep their textual order; predicate arities
/// and variable safety are validated.
pub fn parse_program(text: &str) -> Result<Program, ParseError> {
    let mut p = Parser::new(text)?;
    let mut rules = Vec::new();
    let mut arities = BTreeMap::new();
    while !p.at_end() {
        let start = p.pos();
        let rule = p.rule()?;
        check_arity(&rule, start, &mut arities)?;
        check_safety(&rule, start)?;
        rules.push(rule);
    }
    Ok(Program::new(rules))
}

fn ground_check(lit: &ObjectiveLiteral, pos: Pos) -> Result<(), ParseError> {
    match lit.atom.args.iter().find(|t| t.is_var()) {
        Some(v) => Err(ParseError::NotGround {
            variable: v.name().to_string(),
            line: pos.line,
            col: pos.col,
        }),
        None => Ok(()),
    }
}

/// Parses a single ground literal, objective (`p(a)`, `-p(a)`) or subjective
/// (`K p(a)`, `-M p(a)`). A trailing `.` is allowed.
pub fn parse_literal(text: &str) -> Result<QueryLiteral, ParseError> {
    let mut p = Parser::new(text)?;
    let start = p.pos();
    let mut rule = Rule::default();
    p.body_elem(&mut rule)?;
    if p.peek() == Some(&Tok::Dot) {
        p.bump();
    }
    if !p.at_end() {
        return Err(p.unexpected("end of literal"));
    }
    if !rule.body_neg.is_empty() {
        return Err(ParseError::syntax(start, "`not` is not allowed in a query"));
    }
    let elem = rule.body_pos.pop().expect("one element parsed");
    ground_check(elem.base(), start)?;
    Ok(match elem {
        BodyElem::Objective(l) => QueryLiteral::Objective(l),
        BodyElem::Subjective(s) => QueryLiteral::Subjective(s),
    })
}

/// Parses a list of ground objective literals, one per line. Blank lines and
/// `%` comments are skipped; a trailing `.` on a line is allowed.
pub fn parse_literal_list(text: &str) -> Result<Vec<ObjectiveLiteral>, ParseError> {
    let mut p = Parser::new(text)?;
    let mut out = Vec::new();
    while !p.at_end() {
        let start = p.pos();
        let lit = p.objlit()?;
        ground_check(&lit, start)?;
        if p.peek() == Some(&Tok::Dot) || p.peek() == Some(&Tok::Comma) {
            p.bump();
        }
        out.push(lit);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_fact() {
        let p = parse_program("p(a).").unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!(p.rules[0].head, vec![ObjectiveLiteral::ground("p", &["a"])]);
        assert_eq!(p.constants().into_iter().collect::<Vec<_>>(), ["a"]);
    }

    #[test]
    fn negated_possibility_rule() {
        let p = parse_program("q(d).\n-p(X) :- not M p(X).").unwrap();
        let r = &p.rules[1];
        let x = Atom::new("p", vec![Term::Var("X".into())]);
        assert_eq!(r.head, vec![ObjectiveLiteral::neg(x.clone())]);
        assert_eq!(
            r.body_pos,
            vec![BodyElem::Subjective(SubjectiveLiteral::new(
                Modality::M,
                true,
                ObjectiveLiteral::pos(x)
            ))]
        );
        assert!(r.body_neg.is_empty());
        // the explicit form parses to the same rule
        let q = parse_program("q(d).\n-p(X) :- - M p(X).").unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn dangling_modality_is_a_syntax_error() {
        let err = parse_program("p(a) :- not q(a), K").unwrap_err();
        assert!(matches!(err, ParseError::Syntax { line: 1, .. }), "{err}");
        let err = parse_program("p(a) :- not q(a), K.").unwrap_err();
        assert!(
            matches!(
                err,
                ParseError::Syntax {
                    line: 1,
                    col: 20,
                    ..
                }
            ),
            "{err}"
        );
    }

    #[test]
    fn glued_modality() {
        let a = parse_program("c :- Kb, -Md(x).").unwrap();
        let b = parse_program("c :- K b, -M d(x).").unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn modality_letters_are_variables_inside_arguments() {
        let p = parse_program("p(K, M) :- q(K), r(M).").unwrap();
        assert_eq!(p.rules[0].head[0].atom.args[0], Term::Var("K".into()));
    }

    #[test]
    fn arity_mismatch() {
        let err = parse_program("p(a).\nq :- p(a, b).").unwrap_err();
        assert_eq!(
            err,
            ParseError::Arity {
                predicate: "p".into(),
                expected: 1,
                found: 2,
                line: 2,
                col: 1
            }
        );
    }

    #[test]
    fn unsafe_variables() {
        assert!(matches!(
            parse_program("p(X).").unwrap_err(),
            ParseError::UnsafeVariable { .. }
        ));
        assert!(matches!(
            parse_program("p(a) :- q(a), not r(Y).").unwrap_err(),
            ParseError::UnsafeVariable { .. }
        ));
        assert!(matches!(
            parse_program("p(X) :- q(a), not r(X).").unwrap_err(),
            ParseError::UnsafeVariable {
                line: 1,
                col: 1,
                ..
            }
        ));
        // bound through an objective or a subjective body literal
        parse_program("p(X) :- q(X), not r(X).").unwrap();
        parse_program("p(X) :- K q(X).").unwrap();
    }

    #[test]
    fn misc_syntax_errors() {
        for bad in [
            "p",
            "p :- .",
            "p(a,).",
            "p(). ",
            "or p.",
            "p :- not K.",
            "p : q.",
            "p :- q; r.",
        ] {
            assert!(
                matches!(parse_program(bad), Err(ParseError::Syntax { .. })),
                "{bad:?} should fail"
            );
        }
    }

    #[test]
    fn constraints_and_comments() {
        let p = parse_program("% nothing\n:- a, not b. % trailing\na or b.").unwrap();
        assert_eq!(p.len(), 2);
        assert!(p.rules[0].head.is_empty());
        assert_eq!(p.rules[0].to_string(), ":- a, not b.");
        assert_eq!(p.rules[1].to_string(), "a or b.");
    }

    #[test]
    fn literals() {
        assert_eq!(
            parse_literal("K q(d)").unwrap(),
            QueryLiteral::Subjective(SubjectiveLiteral::new(
                Modality::K,
                false,
                ObjectiveLiteral::ground("q", &["d"])
            ))
        );
        assert_eq!(
            parse_literal("-p(a).").unwrap(),
            QueryLiteral::Objective(ObjectiveLiteral::ground("-p", &["a"]))
        );
        assert!(parse_literal("p(X)").is_err());
        assert!(parse_literal("p q").is_err());
        let list = parse_literal_list("p(a)\n-p(a).\n% c\n\np(b)\n").unwrap();
        assert_eq!(list.len(), 3);
        assert_eq!(list[1], ObjectiveLiteral::ground("-p", &["a"]));
    }
}
