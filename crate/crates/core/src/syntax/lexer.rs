use std::fmt;

use super::Modality;

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Tok {
    /// Lowercase- or digit-initial name: predicate or constant.
    Ident(String),
    /// Uppercase- or underscore-initial name. `K` and `M` are lexed as
    /// modalities instead and only turn back into variables inside argument
    /// lists.
    Var(String),
    K,
    M,
    /// `Mp`, `Kq`: a modality written flush against a lowercase name.
    Glued(Modality, String),
    Not,
    Or,
    Minus,
    If,
    LParen,
    RParen,
    Comma,
    Dot,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) | Tok::Var(s) => write!(f, "`{s}`"),
            Tok::K => f.write_str("`K`"),
            Tok::M => f.write_str("`M`"),
            Tok::Glued(m, s) => write!(f, "`{m}{s}`"),
            Tok::Not => f.write_str("`not`"),
            Tok::Or => f.write_str("`or`"),
            Tok::Minus => f.write_str("`-`"),
            Tok::If => f.write_str("`:-`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Dot => f.write_str("`.`"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct Pos {
    pub line: usize,
    pub col: usize,
}

#[derive(Clone, Debug)]
pub(crate) struct Spanned {
    pub tok: Tok,
    pub pos: Pos,
}

fn glued_modality(word: &str) -> Option<Modality> {
    let mut cs = word.chars();
    let m = match cs.next()? {
        'K' => Modality::K,
        'M' => Modality::M,
        _ => return None,
    };
    cs.next()
        .filter(|c| c.is_lowercase() || c.is_ascii_digit())
        .map(|_| m)
}

pub(crate) fn lex(text: &str) -> Result<Vec<Spanned>, (Pos, String)> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut col) = (1usize, 1usize);

    while let Some(&c) = chars.peek() {
        let pos = Pos { line, col };
        if c == '\n' {
            chars.next();
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            chars.next();
            col += 1;
            continue;
        }
        if c == '%' {
            while let Some(&c) = chars.peek() {
                if c == '\n' {
                    break;
                }
                chars.next();
            }
            continue;
        }
        if c.is_alphanumeric() || c == '_' {
            let mut word = String::new();
            while let Some(&c) = chars.peek() {
                if c.is_alphanumeric() || c == '_' {
                    word.push(c);
                    chars.next();
                    col += 1;
                } else {
                    break;
                }
            }
            let tok = match word.as_str() {
                "not" => Tok::Not,
                "or" => Tok::Or,
                "K" => Tok::K,
                "M" => Tok::M,
                _ => match glued_modality(&word) {
                    Some(m) => Tok::Glued(m, word[1..].to_string()),
                    None if word.starts_with(|c: char| c.is_uppercase() || c == '_') => {
                        Tok::Var(word)
                    }
                    None => Tok::Ident(word),
                },
            };
            out.push(Spanned { tok, pos });
            continue;
        }
        chars.next();
        col += 1;
        let tok = match c {
            '-' => Tok::Minus,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ',' => Tok::Comma,
            '.' => Tok::Dot,
            ':' => {
                if chars.peek() == Some(&'-') {
                    chars.next();
                    col += 1;
                    Tok::If
                } else {
                    return Err((pos, "expected `:-`".into()));
                }
            }
            other => return Err((pos, format!("unexpected character `{other}`"))),
        };
        out.push(Spanned { tok, pos });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<Tok> {
        lex(s).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn modalities_and_keywords() {
        assert_eq!(
            toks("-p(X) :- not M p(X). % trailing"),
            vec![
                Tok::Minus,
                Tok::Ident("p".into()),
                Tok::LParen,
                Tok::Var("X".into()),
                Tok::RParen,
                Tok::If,
                Tok::Not,
                Tok::M,
                Tok::Ident("p".into()),
                Tok::LParen,
                Tok::Var("X".into()),
                Tok::RParen,
                Tok::Dot,
            ]
        );
        assert_eq!(toks("Mp"), vec![Tok::Glued(Modality::M, "p".into())]);
        assert_eq!(toks("MX"), vec![Tok::Var("MX".into())]);
        assert_eq!(
            toks("nota or_b"),
            vec![Tok::Ident("nota".into()), Tok::Ident("or_b".into())]
        );
    }

    #[test]
    fn positions() {
        let t = lex("a.\n  b :- c.").unwrap();
        assert_eq!(t[2].pos, Pos { line: 2, col: 3 });
        assert_eq!(t[3].pos, Pos { line: 2, col: 5 });
        let err = lex("a :\n").unwrap_err();
        assert_eq!(err.0, Pos { line: 1, col: 3 });
    }
}
