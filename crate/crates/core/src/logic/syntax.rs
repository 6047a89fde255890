//! Prefix syntax: `(letter a x)`, `(le x y)`, `(class M e x y)`,
//! `(pclass M e x)`, `(sclass M e x)`, `(and ...)`, `(or ...)`, `(not f)`,
//! `(exists x f)`, `(forall x f)`, `(true)`.

use crate::alphabet::Alphabet;
use crate::error::{Error, Result};
use crate::twoway::Sym;

use super::Formula;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Open,
    Close,
    Atom(String),
}

struct Lexed {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(text: &str, line0: usize, col0: usize) -> Vec<Lexed> {
    let mut out = Vec::new();
    for (li, line) in text.lines().enumerate() {
        let line_no = line0 + li;
        let base = if li == 0 { col0 } else { 1 };
        let chars: Vec<(usize, char)> = line.char_indices().collect();
        let mut i = 0;
        while i < chars.len() {
            let (pos, c) = chars[i];
            let column = base + line[..pos].chars().count();
            match c {
                '#' => break,
                '(' => {
                    out.push(Lexed { tok: Tok::Open, line: line_no, column });
                    i += 1;
                }
                ')' => {
                    out.push(Lexed { tok: Tok::Close, line: line_no, column });
                    i += 1;
                }
                c if c.is_whitespace() => i += 1,
                _ => {
                    let start = pos;
                    while i < chars.len() && !chars[i].1.is_whitespace() && !matches!(chars[i].1, '(' | ')' | '#') {
                        i += 1;
                    }
                    let end = if i < chars.len() { chars[i].0 } else { line.len() };
                    out.push(Lexed {
                        tok: Tok::Atom(line[start..end].to_string()),
                        line: line_no,
                        column,
                    });
                }
            }
        }
    }
    out
}

struct Parser<'a> {
    toks: Vec<Lexed>,
    pos: usize,
    alphabet: &'a Alphabet,
    end: (usize, usize),
}

impl Parser<'_> {
    fn err_at(&self, i: usize, message: impl Into<String>) -> Error {
        let (line, column) = self.toks.get(i).map_or(self.end, |t| (t.line, t.column));
        Error::Syntax {
            line,
            column,
            message: message.into(),
        }
    }

    fn next(&mut self) -> Result<&Tok> {
        let i = self.pos;
        if i >= self.toks.len() {
            return Err(self.err_at(i, "unexpected end of formula"));
        }
        self.pos += 1;
        Ok(&self.toks[i].tok)
    }

    fn atom(&mut self, what: &str) -> Result<String> {
        let i = self.pos;
        match self.next()? {
            Tok::Atom(a) => Ok(a.clone()),
            _ => Err(self.err_at(i, format!("expected {what}"))),
        }
    }

    fn var(&mut self) -> Result<String> {
        let i = self.pos;
        let v = self.atom("a variable")?;
        if v.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_') {
            Ok(v)
        } else {
            Err(self.err_at(i, format!("`{v}` is not a variable name")))
        }
    }

    fn number(&mut self) -> Result<usize> {
        let i = self.pos;
        let v = self.atom("an element index")?;
        v.parse().map_err(|_| self.err_at(i, format!("`{v}` is not an element index")))
    }

    fn close(&mut self) -> Result<()> {
        let i = self.pos;
        match self.next()? {
            Tok::Close => Ok(()),
            _ => Err(self.err_at(i, "expected `)`")),
        }
    }

    fn formula(&mut self) -> Result<Formula> {
        let open = self.pos;
        match self.next()? {
            Tok::Open => {}
            _ => return Err(self.err_at(open, "expected `(`")),
        }
        let head_at = self.pos;
        let head = self.atom("a connective")?;
        let f = match head.as_str() {
            "true" => Formula::True,
            "letter" => {
                let at = self.pos;
                let sym = self.atom("a symbol")?;
                let sym = Sym::parse(self.alphabet, &sym).map_err(|_| self.err_at(at, format!("unknown symbol `{sym}`")))?;
                Formula::Letter(sym, self.var()?)
            }
            "le" => Formula::Le(self.var()?, self.var()?),
            "class" => Formula::FactorClass {
                monoid: self.atom("a monoid name")?,
                element: self.number()?,
                x: self.var()?,
                y: self.var()?,
            },
            "pclass" => Formula::PrefixClass {
                monoid: self.atom("a monoid name")?,
                element: self.number()?,
                x: self.var()?,
            },
            "sclass" => Formula::SuffixClass {
                monoid: self.atom("a monoid name")?,
                element: self.number()?,
                x: self.var()?,
            },
            "and" | "or" => {
                let mut parts = Vec::new();
                while self.toks.get(self.pos).is_some_and(|t| t.tok == Tok::Open) {
                    parts.push(self.formula()?);
                }
                if head == "and" {
                    Formula::And(parts)
                } else {
                    Formula::Or(parts)
                }
            }
            "not" => Formula::Not(Box::new(self.formula()?)),
            "exists" => Formula::Exists(self.var()?, Box::new(self.formula()?)),
            "forall" => Formula::Forall(self.var()?, Box::new(self.formula()?)),
            other => return Err(self.err_at(head_at, format!("unknown connective `{other}`"))),
        };
        self.close()?;
        Ok(f)
    }
}

/// Parses a formula whose first character sits at `line`, `column`
/// (1-based) of its enclosing file.
pub(crate) fn parse_formula_at(text: &str, alphabet: &Alphabet, line: usize, column: usize) -> Result<Formula> {
    let toks = lex(text, line, column);
    let last_line = line + text.lines().count().saturating_sub(1);
    let end_col = text.lines().last().map_or(column, |l| {
        if text.lines().count() <= 1 {
            column + l.chars().count()
        } else {
            1 + l.chars().count()
        }
    });
    let mut p = Parser {
        toks,
        pos: 0,
        alphabet,
        end: (last_line, end_col),
    };
    let f = p.formula()?;
    if p.pos < p.toks.len() {
        return Err(p.err_at(p.pos, "trailing input after formula"));
    }
    Ok(f)
}

pub fn parse_formula(text: &str, alphabet: &Alphabet) -> Result<Formula> {
    parse_formula_at(text, alphabet, 1, 1)
}

pub fn serialize_formula(f: &Formula, alphabet: &Alphabet) -> String {
    let mut out = String::new();
    write(f, alphabet, &mut out);
    out
}

fn write(f: &Formula, alphabet: &Alphabet, out: &mut String) {
    match f {
        Formula::True => out.push_str("(true)"),
        Formula::Letter(s, x) => {
            out.push_str(&format!("(letter {} {x})", s.format(alphabet)));
        }
        Formula::Le(x, y) => out.push_str(&format!("(le {x} {y})")),
        Formula::FactorClass { monoid, element, x, y } => {
            out.push_str(&format!("(class {monoid} {element} {x} {y})"));
        }
        Formula::PrefixClass { monoid, element, x } => out.push_str(&format!("(pclass {monoid} {element} {x})")),
        Formula::SuffixClass { monoid, element, x } => out.push_str(&format!("(sclass {monoid} {element} {x})")),
        Formula::And(ps) | Formula::Or(ps) => {
            out.push_str(if matches!(f, Formula::And(_)) { "(and" } else { "(or" });
            for p in ps {
                out.push(' ');
                write(p, alphabet, out);
            }
            out.push(')');
        }
        Formula::Not(p) => {
            out.push_str("(not ");
            write(p, alphabet, out);
            out.push(')');
        }
        Formula::Exists(x, p) | Formula::Forall(x, p) => {
            out.push_str(if matches!(f, Formula::Exists(..)) { "(exists " } else { "(forall " });
            out.push_str(x);
            out.push(' ');
            write(p, alphabet, out);
            out.push(')');
        }
    }
}
