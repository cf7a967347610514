//! S-expression reader with line/column tracking.

use super::PddlError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Sexpr {
    Atom(String, Pos),
    List(Vec<Sexpr>, Pos),
}

impl Sexpr {
    pub fn pos(&self) -> Pos {
        match self {
            Sexpr::Atom(_, p) | Sexpr::List(_, p) => *p,
        }
    }

    pub fn as_atom(&self) -> Option<&str> {
        match self {
            Sexpr::Atom(s, _) => Some(s),
            Sexpr::List(..) => None,
        }
    }

    pub fn as_list(&self) -> Option<&[Sexpr]> {
        match self {
            Sexpr::List(v, _) => Some(v),
            Sexpr::Atom(..) => None,
        }
    }

    /// The leading keyword of a list, e.g. `and` for `(and ...)`.
    pub fn head(&self) -> Option<&str> {
        self.as_list().and_then(|v| v.first()).and_then(Sexpr::as_atom)
    }
}

/// Parses exactly one top-level expression. Symbols are lowercased.
pub fn parse(text: &str) -> Result<Sexpr, PddlError> {
    let mut reader = Reader::new(text);
    reader.skip_ws();
    let expr = reader.expr()?;
    reader.skip_ws();
    if let Some((pos, _)) = reader.peek() {
        return Err(PddlError::syntax(pos, "trailing input after top-level expression"));
    }
    Ok(expr)
}

struct Reader<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    col: usize,
}

impl<'a> Reader<'a> {
    fn new(text: &'a str) -> Self {
        Reader {
            chars: text.chars().peekable(),
            line: 1,
            col: 1,
        }
    }

    fn pos(&self) -> Pos {
        Pos {
            line: self.line,
            col: self.col,
        }
    }

    fn peek(&mut self) -> Option<(Pos, char)> {
        let pos = self.pos();
        self.chars.peek().map(|&c| (pos, c))
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn skip_ws(&mut self) {
        while let Some((_, c)) = self.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == ';' {
                while let Some(c) = self.bump() {
                    if c == '\n' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }

    fn expr(&mut self) -> Result<Sexpr, PddlError> {
        let pos = self.pos();
        match self.peek() {
            None => Err(PddlError::syntax(pos, "unexpected end of input")),
            Some((_, '(')) => {
                self.bump();
                let mut items = Vec::new();
                loop {
                    self.skip_ws();
                    match self.peek() {
                        None => return Err(PddlError::syntax(pos, "unclosed parenthesis")),
                        Some((_, ')')) => {
                            self.bump();
                            return Ok(Sexpr::List(items, pos));
                        }
                        Some(_) => items.push(self.expr()?),
                    }
                }
            }
            Some((_, ')')) => Err(PddlError::syntax(pos, "unexpected `)`")),
            Some(_) => {
                let mut s = String::new();
                while let Some((_, c)) = self.peek() {
                    if c.is_whitespace() || c == '(' || c == ')' || c == ';' {
                        break;
                    }
                    s.push(c.to_ascii_lowercase());
                    self.bump();
                }
                Ok(Sexpr::Atom(s, pos))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_nested_lists_with_positions() {
        let e = parse("; comment\n(define (Domain x)\n  (:predicates (p)))").unwrap();
        let items = e.as_list().unwrap();
        assert_eq!(items[0].as_atom(), Some("define"));
        assert_eq!(items[1].head(), Some("domain"));
        assert_eq!(items[2].pos(), Pos { line: 3, col: 3 });
    }

    #[test]
    fn reports_unclosed_paren() {
        let err = parse("(define (domain x)").unwrap_err();
        assert!(matches!(err, PddlError::Syntax { line: 1, col: 1, .. }));
    }

    #[test]
    fn rejects_trailing_input() {
        assert!(parse("(a) (b)").is_err());
    }
}
