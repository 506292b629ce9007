//! Text grammar for presentations.
//!
//! ```text
//! presentation := ('<' | '⟨') names '|' [expr (',' expr)*] ('>' | '⟩')
//! expr         := factor ('*' factor)*
//! factor       := atom ('^' exponent)*
//! exponent     := ['-'] integer        power
//!               | ['-'] atom           conjugation x^g = g^-1 x g
//! atom         := name | '1' | '(' expr ')' | '{' expr '}' | '(' expr ',' expr (',' expr)* ')'
//! ```
//!
//! `(x, y)` is the commutator `x^-1 y^-1 x y`; longer tuples are left-normed.
//! The file format is line based: `gens: u w`, then `rel: <expr>` lines,
//! with `#` starting a comment.

use crate::error::ParseError;
use crate::presentation::Presentation;
use crate::words::{commutator, conjugate, Word};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Name(String),
    Int(i64),
    Star,
    Caret,
    Minus,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Bar,
    Open,
    Close,
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str, line0: usize) -> Result<Vec<Spanned>, ParseError> {
    let mut out = Vec::new();
    let mut line = line0;
    let mut col = 0;
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        col += 1;
        let start = col;
        let single = match c {
            '*' | '·' => Some(Tok::Star),
            '^' => Some(Tok::Caret),
            '-' | '−' => Some(Tok::Minus),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '{' => Some(Tok::LBrace),
            '}' => Some(Tok::RBrace),
            ',' => Some(Tok::Comma),
            '|' => Some(Tok::Bar),
            '<' | '⟨' => Some(Tok::Open),
            '>' | '⟩' => Some(Tok::Close),
            _ => None,
        };
        if let Some(t) = single {
            out.push(Spanned { tok: t, line, col: start });
            i += 1;
            continue;
        }
        if c == '\n' {
            line += 1;
            col = 0;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c.is_ascii_digit() {
            let mut j = i;
            while j < chars.len() && chars[j].is_ascii_digit() {
                j += 1;
            }
            let s: String = chars[i..j].iter().collect();
            let v = s.parse::<i64>().map_err(|_| ParseError::Syntax {
                line,
                column: start,
                message: format!("integer `{s}` out of range"),
            })?;
            out.push(Spanned { tok: Tok::Int(v), line, col: start });
            col += j - i - 1;
            i = j;
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let mut j = i;
            while j < chars.len() && (chars[j].is_alphanumeric() || chars[j] == '_' || chars[j] == '\'') {
                j += 1;
            }
            let s: String = chars[i..j].iter().collect();
            out.push(Spanned { tok: Tok::Name(s), line, col: start });
            col += j - i - 1;
            i = j;
            continue;
        }
        return Err(ParseError::Syntax { line, column: start, message: format!("unexpected character `{c}`") });
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Spanned>,
    pos: usize,
    names: &'a [String],
    end_line: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    fn here(&self) -> (usize, usize) {
        match self.toks.get(self.pos) {
            Some(s) => (s.line, s.col),
            None => self.toks.last().map(|s| (s.line, s.col + 1)).unwrap_or((self.end_line, 1)),
        }
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        let (line, column) = self.here();
        Err(ParseError::Syntax { line, column, message: message.into() })
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<(), ParseError> {
        if self.peek() == Some(&t) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected {what}"))
        }
    }

    fn expr(&mut self) -> Result<Word, ParseError> {
        let mut w = self.factor()?;
        while self.peek() == Some(&Tok::Star) {
            self.pos += 1;
            w = w.mul(&self.factor()?);
        }
        Ok(w)
    }

    fn factor(&mut self) -> Result<Word, ParseError> {
        let mut w = self.atom()?;
        while self.peek() == Some(&Tok::Caret) {
            self.pos += 1;
            let negate = if self.peek() == Some(&Tok::Minus) {
                self.pos += 1;
                true
            } else {
                false
            };
            if let Some(Tok::Int(n)) = self.peek() {
                let n = *n;
                self.pos += 1;
                w = w.pow(if negate { -n } else { n });
            } else {
                let g = self.atom()?;
                let g = if negate { g.inverse() } else { g };
                w = conjugate(&w, &g);
            }
        }
        Ok(w)
    }

    fn atom(&mut self) -> Result<Word, ParseError> {
        let (line, column) = self.here();
        match self.peek().cloned() {
            Some(Tok::Name(n)) => {
                self.pos += 1;
                match self.names.iter().position(|m| *m == n) {
                    Some(i) => Ok(Word::generator(i)),
                    None => Err(ParseError::UndeclaredGenerator { name: n, line, column }),
                }
            }
            Some(Tok::Int(1)) => {
                self.pos += 1;
                Ok(Word::identity())
            }
            Some(Tok::LBrace) => {
                self.pos += 1;
                let w = self.expr()?;
                self.expect(Tok::RBrace, "`}`")?;
                Ok(w)
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let mut w = self.expr()?;
                while self.peek() == Some(&Tok::Comma) {
                    self.pos += 1;
                    let y = self.expr()?;
                    w = commutator(&w, &y);
                }
                self.expect(Tok::RParen, "`)`")?;
                Ok(w)
            }
            Some(t) => self.err(format!("unexpected token {t:?}")),
            None => self.err("unexpected end of input"),
        }
    }
}

fn parse_names(toks: &[Spanned]) -> Result<Vec<String>, ParseError> {
    let mut names = Vec::new();
    for t in toks {
        match &t.tok {
            Tok::Name(n) => names.push(n.clone()),
            Tok::Comma => {}
            other => {
                return Err(ParseError::Syntax {
                    line: t.line,
                    column: t.col,
                    message: format!("expected generator name, found {other:?}"),
                })
            }
        }
    }
    Ok(names)
}

/// Parses a word expression over the given generator names.
pub fn parse_word(text: &str, names: &[String]) -> Result<Word, ParseError> {
    let toks = lex(text, 1)?;
    let mut p = Parser { toks, pos: 0, names, end_line: 1 };
    let w = p.expr()?;
    if p.pos != p.toks.len() {
        return p.err("trailing input");
    }
    Ok(w)
}

/// Parses `<gens | relators>`.
pub fn parse_presentation(text: &str) -> Result<Presentation, ParseError> {
    let toks = lex(text, 1)?;
    let open = toks.iter().position(|t| t.tok == Tok::Open);
    let bar = toks.iter().position(|t| t.tok == Tok::Bar);
    let close = toks.iter().rposition(|t| t.tok == Tok::Close);
    let (open, bar, close) = match (open, bar, close) {
        (Some(0), Some(b), Some(c)) if b < c && c == toks.len() - 1 => (0, b, c),
        _ => {
            let (line, column) = toks.first().map(|t| (t.line, t.col)).unwrap_or((1, 1));
            return Err(ParseError::Syntax { line, column, message: "expected `<gens | relators>`".into() });
        }
    };
    let names = parse_names(&toks[open + 1..bar])?;
    let body: Vec<Spanned> = toks[bar + 1..close].to_vec();
    let mut relators = Vec::new();
    if !body.is_empty() {
        let mut p = Parser { toks: body, pos: 0, names: &names, end_line: 1 };
        loop {
            relators.push(p.expr()?);
            match p.peek() {
                Some(Tok::Comma) => p.pos += 1,
                None => break,
                _ => return p.err("expected `,` between relators"),
            }
        }
    }
    Presentation::new(names, relators)
}

/// Parses the line-based `.pres` file format.
pub fn parse_pres_file(text: &str) -> Result<Presentation, ParseError> {
    let mut names: Option<Vec<String>> = None;
    let mut relators = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("gens:") {
            if names.is_some() {
                return Err(ParseError::Syntax { line: lineno, column: 1, message: "second `gens:` line".into() });
            }
            let toks = lex(rest, lineno)?;
            names = Some(parse_names(&toks)?);
        } else if let Some(rest) = line.strip_prefix("rel:") {
            let Some(ns) = names.as_ref() else {
                return Err(ParseError::Syntax { line: lineno, column: 1, message: "`rel:` before `gens:`".into() });
            };
            let toks = lex(rest, lineno)?;
            let mut p = Parser { toks, pos: 0, names: ns, end_line: lineno };
            relators.push(p.expr()?);
            if p.pos != p.toks.len() {
                return p.err("trailing input after relator");
            }
        } else {
            return Err(ParseError::Syntax {
                line: lineno,
                column: 1,
                message: "expected `gens:` or `rel:`".into(),
            });
        }
    }
    let names = names.ok_or(ParseError::Syntax { line: 1, column: 1, message: "missing `gens:` line".into() })?;
    Presentation::new(names, relators)
}

/// One word per line (or comma separated); `#` starts a comment.
pub fn parse_word_list(text: &str, names: &[String]) -> Result<Vec<Word>, ParseError> {
    let mut out = Vec::new();
    for line in text.lines() {
        let line = line.split('#').next().unwrap_or("");
        for part in split_top_level(line) {
            let part = part.trim();
            if !part.is_empty() {
                out.push(parse_word(part, names)?);
            }
        }
    }
    Ok(out)
}

/// Splits on commas outside parentheses.
fn split_top_level(s: &str) -> Vec<&str> {
    let mut parts = Vec::new();
    let (mut depth, mut start) = (0i32, 0);
    for (i, ch) in s.char_indices() {
        match ch {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            ',' if depth == 0 => {
                parts.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(&s[start..]);
    parts
}

/// Accepts either the bracket form or the `.pres` file form.
pub fn parse_any(text: &str) -> Result<Presentation, ParseError> {
    let trimmed = text.trim_start();
    if trimmed.starts_with('<') || trimmed.starts_with('⟨') {
        parse_presentation(text)
    } else {
        parse_pres_file(text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn word_lists() {
        let names = vec!["u".to_string(), "w".to_string()];
        let ws = parse_word_list("w^(u*w), (u,w)  # two\n\nu^-1\n", &names).unwrap();
        assert_eq!(ws.len(), 3);
        assert_eq!(ws[2], Word::generator(0).inverse());
        assert!(parse_word_list("v", &names).is_err());
    }

    #[test]
    fn gamma_bar_bracket_form() {
        let p = parse_presentation("⟨u,w | u^3, w^3, (u, w*u*w^-1*u*w), (u*w)^8⟩").unwrap();
        assert_eq!(p.ngens(), 2);
        let lens: Vec<usize> = p.relators().iter().map(|r| r.len()).collect();
        // (u, wuw^-1uw) = u^-1 (w^-1 u^-1 w u^-1 w^-1) u (w u w^-1 u w), cyclically reduced
        assert_eq!(lens[0], 3);
        assert_eq!(lens[1], 3);
        assert_eq!(lens[3], 16);
        assert_eq!(lens[2], 12);
    }

    #[test]
    fn free_group_of_rank_one() {
        let p = parse_presentation("⟨x | ⟩").unwrap();
        assert_eq!(p.ngens(), 1);
        assert!(p.relators().is_empty());
    }

    #[test]
    fn triangle_relator_expanded() {
        let p = parse_presentation("⟨x,y | x^3, y^3, (x*y)^3⟩").unwrap();
        assert_eq!(p.relators()[2].letters(), &[1, 2, 1, 2, 1, 2]);
    }

    #[test]
    fn conjugation_and_commutator_notation() {
        let names: Vec<String> = vec!["u".into(), "w".into()];
        assert_eq!(parse_word("w^(u*w)", &names).unwrap().letters(), &[-2, -1, 2, 1, 2]);
        assert_eq!(parse_word("w^{u*w}", &names).unwrap().letters(), &[-2, -1, 2, 1, 2]);
        // w^(w^u) with w^u = u^-1 w u
        assert_eq!(parse_word("w^(w^u)", &names).unwrap().letters(), &[-1, -2, 1, 2, -1, 2, 1]);
        assert_eq!(parse_word("(u,w^-1)", &names).unwrap().letters(), &[-1, 2, 1, -2]);
        assert_eq!(parse_word("u^-2", &names).unwrap().letters(), &[-1, -1]);
        assert!(parse_word("1", &names).unwrap().is_empty());
    }

    #[test]
    fn errors_carry_positions() {
        match parse_presentation("<x | x^3, y>") {
            Err(ParseError::UndeclaredGenerator { name, line, column }) => {
                assert_eq!(name, "y");
                assert_eq!((line, column), (1, 11));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse_presentation("<x | x^>"), Err(ParseError::Syntax { .. })));
        assert!(matches!(parse_presentation("<x | (x,x>"), Err(ParseError::Syntax { .. })));
    }

    #[test]
    fn pres_file_format() {
        let text = "# triangle group\ngens: x y\nrel: x^3\nrel: y^3   # rotation\nrel: (x*y)^3\n";
        let p = parse_pres_file(text).unwrap();
        assert_eq!(p.ngens(), 2);
        assert_eq!(p.relators().len(), 3);
        let again = parse_pres_file(&p.to_pres_string()).unwrap();
        assert_eq!(again, p);
        assert!(parse_pres_file("rel: x\n").is_err());
        assert!(matches!(
            parse_pres_file("gens: x\nrel: x*z\n"),
            Err(ParseError::UndeclaredGenerator { line: 2, .. })
        ));
    }

    #[test]
    fn round_trip_through_pretty_printer() {
        let p = parse_presentation("<u,w | u^3, w^3, (u, w*u*w^-1*u*w), (u*w)^8>").unwrap();
        let q = parse_presentation(&p.to_bracket_string()).unwrap();
        assert_eq!(p, q);
        let r = parse_any(&p.to_pres_string()).unwrap();
        assert_eq!(p, r);
    }
}
