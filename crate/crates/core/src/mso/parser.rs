//! Concrete syntax.
//!
//! ```text
//! formula := or ('->' formula)?
//! or      := and ('|' and)*
//! and     := unary ('&' unary)*
//! unary   := '~' unary | ('E'|'A') ident '.' formula | '(' formula ')' | atom
//! atom    := adj(x,y) | arc(x,y) | lab_NAME(x) | x = y | x in X
//! ```
//!
//! `#` starts a comment running to the end of the line.

use thiserror::Error;

use super::ast::{is_set_var, Formula};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("{line}:{col}: {message}")]
    Syntax {
        line: usize,
        col: usize,
        message: String,
    },
    #[error("{line}:{col}: `{name}` is a {found} variable but a {expected} variable is required here")]
    KindMismatch {
        line: usize,
        col: usize,
        name: String,
        expected: &'static str,
        found: &'static str,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    LParen,
    RParen,
    Comma,
    Dot,
    Eq,
    Not,
    And,
    Or,
    Arrow,
    End,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    for (li, line) in text.lines().enumerate() {
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let (line, col) = (li + 1, i + 1);
            let push = |out: &mut Vec<Token>, tok| out.push(Token { tok, line, col });
            match c {
                '#' => break,
                c if c.is_whitespace() => {}
                '(' => push(&mut out, Tok::LParen),
                ')' => push(&mut out, Tok::RParen),
                ',' => push(&mut out, Tok::Comma),
                '.' => push(&mut out, Tok::Dot),
                '=' => push(&mut out, Tok::Eq),
                '~' => push(&mut out, Tok::Not),
                '&' => push(&mut out, Tok::And),
                '|' => push(&mut out, Tok::Or),
                '-' if chars.get(i + 1) == Some(&'>') => {
                    push(&mut out, Tok::Arrow);
                    i += 1;
                }
                c if c.is_ascii_alphabetic() || c == '_' => {
                    let start = i;
                    while i + 1 < chars.len()
                        && (chars[i + 1].is_ascii_alphanumeric() || chars[i + 1] == '_')
                    {
                        i += 1;
                    }
                    let word: String = chars[start..=i].iter().collect();
                    push(&mut out, Tok::Ident(word));
                }
                other => {
                    return Err(ParseError::Syntax {
                        line,
                        col,
                        message: format!("unexpected character `{other}`"),
                    })
                }
            }
            i += 1;
        }
    }
    let (line, col) = out.last().map_or((1, 1), |t| (t.line, t.col + 1));
    out.push(Token {
        tok: Tok::End,
        line,
        col,
    });
    Ok(out)
}

fn is_reserved(name: &str) -> bool {
    matches!(name, "E" | "A" | "in" | "adj" | "arc") || name.starts_with("lab_")
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn next(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, t: &Token, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::Syntax {
            line: t.line,
            col: t.col,
            message: message.into(),
        })
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ParseError> {
        let t = self.next();
        if t.tok == tok {
            Ok(())
        } else {
            self.error(&t, format!("expected {what}, found {}", describe(&t.tok)))
        }
    }

    fn variable(&mut self, set: bool) -> Result<String, ParseError> {
        let t = self.next();
        let Tok::Ident(name) = &t.tok else {
            return self.error(&t, format!("expected a variable, found {}", describe(&t.tok)));
        };
        if is_reserved(name) {
            return self.error(&t, format!("`{name}` is reserved"));
        }
        if is_set_var(name) != set {
            let kind = |s: bool| if s { "set" } else { "vertex" };
            return Err(ParseError::KindMismatch {
                line: t.line,
                col: t.col,
                name: name.clone(),
                expected: kind(set),
                found: kind(!set),
            });
        }
        Ok(name.clone())
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.or()?;
        if self.peek().tok == Tok::Arrow {
            self.next();
            let rhs = self.formula()?;
            return Ok(Formula::Implies(Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.and()?;
        while self.peek().tok == Tok::Or {
            self.next();
            let rhs = self.and()?;
            lhs = Formula::Or(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.unary()?;
        while self.peek().tok == Tok::And {
            self.next();
            let rhs = self.unary()?;
            lhs = Formula::And(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        let t = self.peek().clone();
        match &t.tok {
            Tok::Not => {
                self.next();
                Ok(Formula::Not(Box::new(self.unary()?)))
            }
            Tok::LParen => {
                self.next();
                let f = self.formula()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            Tok::Ident(q) if q == "E" || q == "A" => {
                self.next();
                let var_tok = self.peek().clone();
                let Tok::Ident(var) = &var_tok.tok else {
                    return self.error(&var_tok, "expected a variable after quantifier");
                };
                let set = is_set_var(var);
                let var = self.variable(set)?;
                self.expect(Tok::Dot, "`.` after quantified variable")?;
                let body = Box::new(self.formula()?);
                Ok(match (q.as_str(), set) {
                    ("E", false) => Formula::ExistsVertex(var, body),
                    ("A", false) => Formula::ForallVertex(var, body),
                    ("E", true) => Formula::ExistsSet(var, body),
                    _ => Formula::ForallSet(var, body),
                })
            }
            Tok::Ident(_) => self.atom(),
            other => self.error(&t, format!("expected a formula, found {}", describe(other))),
        }
    }

    fn atom(&mut self) -> Result<Formula, ParseError> {
        let t = self.next();
        let Tok::Ident(word) = &t.tok else {
            unreachable!()
        };
        if word == "adj" || word == "arc" {
            self.expect(Tok::LParen, "`(`")?;
            let x = self.variable(false)?;
            self.expect(Tok::Comma, "`,`")?;
            let y = self.variable(false)?;
            self.expect(Tok::RParen, "`)`")?;
            return Ok(if word == "adj" {
                Formula::Adj(x, y)
            } else {
                Formula::Arc(x, y)
            });
        }
        if let Some(label) = word.strip_prefix("lab_") {
            if label.is_empty() {
                return self.error(&t, "empty label name");
            }
            self.expect(Tok::LParen, "`(`")?;
            let x = self.variable(false)?;
            self.expect(Tok::RParen, "`)`")?;
            return Ok(Formula::Label(label.to_string(), x));
        }
        // infix atoms: push the variable back and re-read it with a kind check
        self.pos -= 1;
        let x = self.variable(false)?;
        let op = self.next();
        match &op.tok {
            Tok::Eq => Ok(Formula::Eq(x, self.variable(false)?)),
            Tok::Ident(w) if w == "in" => Ok(Formula::In(x, self.variable(true)?)),
            other => self.error(&op, format!("expected `=` or `in`, found {}", describe(other))),
        }
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("`{s}`"),
        Tok::LParen => "`(`".into(),
        Tok::RParen => "`)`".into(),
        Tok::Comma => "`,`".into(),
        Tok::Dot => "`.`".into(),
        Tok::Eq => "`=`".into(),
        Tok::Not => "`~`".into(),
        Tok::And => "`&`".into(),
        Tok::Or => "`|`".into(),
        Tok::Arrow => "`->`".into(),
        Tok::End => "end of input".into(),
    }
}

pub fn parse(text: &str) -> Result<Formula, ParseError> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
    };
    let f = p.formula()?;
    let t = p.peek().clone();
    if t.tok != Tok::End {
        return p.error(&t, format!("unexpected {} after formula", describe(&t.tok)));
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mso::ast::build::*;

    #[test]
    fn precedence_and_associativity() {
        let f = parse("adj(x,y) | x = y & ~x = z -> adj(y,z) -> y = z").unwrap();
        let expected = implies(
            or(adj("x", "y"), and(eq("x", "y"), not(eq("x", "z")))),
            implies(adj("y", "z"), eq("y", "z")),
        );
        assert_eq!(f, expected);
        let f = parse("x = x & y = y & z = z").unwrap();
        assert_eq!(f, and(and(eq("x", "x"), eq("y", "y")), eq("z", "z")));
    }

    #[test]
    fn quantifier_scope_extends_right() {
        let f = parse("E x. adj(x,y) & A X. x in X").unwrap();
        assert_eq!(
            f,
            exists("x", and(adj("x", "y"), forall("X", is_in("x", "X"))))
        );
    }

    #[test]
    fn kind_mismatch_is_reported() {
        assert!(matches!(parse("x in y"), Err(ParseError::KindMismatch { .. })));
        assert!(matches!(parse("adj(X,y)"), Err(ParseError::KindMismatch { .. })));
    }

    #[test]
    fn syntax_errors_carry_positions() {
        match parse("E x.\n  adj(x,") {
            Err(ParseError::Syntax { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        match parse("x = y )") {
            Err(ParseError::Syntax { line, col, .. }) => assert_eq!((line, col), (1, 7)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn comments_and_labels() {
        let f = parse("# a comment\nlab_V1(x) # trailing\n").unwrap();
        assert_eq!(f, lab("V1", "x"));
    }
}
