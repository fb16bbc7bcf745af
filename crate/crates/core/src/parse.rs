//! Lexer and recursive-descent parsers for formulas, queries and theories.

use std::fmt;

use thiserror::Error;

use crate::syntax::{Formula, Literal, Query};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Span {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{span}: {message}")]
pub struct SyntaxError {
    pub span: Span,
    pub message: String,
}

fn err<T>(span: Span, message: impl Into<String>) -> Result<T, SyntaxError> {
    Err(SyntaxError { span, message: message.into() })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    Tilde,
    Amp,
    Bar,
    Arrow,
    DoubleArrow,
    FatArrow,
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Lt,
    Gt,
    Semi,
    Comma,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::Ident(s) => return write!(f, "`{s}`"),
            Tok::Tilde => "`~`",
            Tok::Amp => "`&`",
            Tok::Bar => "`|`",
            Tok::Arrow => "`->`",
            Tok::DoubleArrow => "`<->`",
            Tok::FatArrow => "`=>`",
            Tok::LParen => "`(`",
            Tok::RParen => "`)`",
            Tok::LBrace => "`{`",
            Tok::RBrace => "`}`",
            Tok::LBracket => "`[`",
            Tok::RBracket => "`]`",
            Tok::Lt => "`<`",
            Tok::Gt => "`>`",
            Tok::Semi => "`;`",
            Tok::Comma => "`,`",
            Tok::Eof => "end of input",
        };
        f.write_str(s)
    }
}

pub(crate) fn lex(text: &str) -> Result<Vec<(Tok, Span)>, SyntaxError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        let span = Span { line, col };
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            col += i - start;
            out.push((Tok::Ident(word), span));
            continue;
        }
        let rest = |n: usize| chars.get(i + n).copied();
        let (tok, len) = match c {
            '~' => (Tok::Tilde, 1),
            '&' => (Tok::Amp, 1),
            '|' => (Tok::Bar, 1),
            '(' => (Tok::LParen, 1),
            ')' => (Tok::RParen, 1),
            '{' => (Tok::LBrace, 1),
            '}' => (Tok::RBrace, 1),
            '[' => (Tok::LBracket, 1),
            ']' => (Tok::RBracket, 1),
            ';' => (Tok::Semi, 1),
            ',' => (Tok::Comma, 1),
            '>' => (Tok::Gt, 1),
            '-' if rest(1) == Some('>') => (Tok::Arrow, 2),
            '=' if rest(1) == Some('>') => (Tok::FatArrow, 2),
            '<' if rest(1) == Some('-') && rest(2) == Some('>') => (Tok::DoubleArrow, 3),
            '<' => (Tok::Lt, 1),
            other => return err(span, format!("unexpected character `{other}`")),
        };
        out.push((tok, span));
        i += len;
        col += len;
    }
    out.push((Tok::Eof, Span { line, col }));
    Ok(out)
}

pub(crate) struct Parser {
    toks: Vec<(Tok, Span)>,
    pos: usize,
}

impl Parser {
    pub(crate) fn new(text: &str) -> Result<Parser, SyntaxError> {
        Ok(Parser { toks: lex(text)?, pos: 0 })
    }

    pub(crate) fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    pub(crate) fn span(&self) -> Span {
        self.toks[self.pos].1
    }

    pub(crate) fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    pub(crate) fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.bump();
            true
        } else {
            false
        }
    }

    pub(crate) fn expect(&mut self, t: &Tok) -> Result<(), SyntaxError> {
        if self.eat(t) {
            Ok(())
        } else {
            err(self.span(), format!("expected {t}, found {}", self.peek()))
        }
    }

    pub(crate) fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    pub(crate) fn expect_ident(&mut self, what: &str) -> Result<(String, Span), SyntaxError> {
        let span = self.span();
        match self.peek().clone() {
            Tok::Ident(s) if s != "true" && s != "false" => {
                self.bump();
                Ok((s, span))
            }
            other => err(span, format!("expected {what}, found {other}")),
        }
    }

    pub(crate) fn expect_end(&mut self) -> Result<(), SyntaxError> {
        match self.peek() {
            Tok::Eof => Ok(()),
            other => err(self.span(), format!("unexpected {other} after formula")),
        }
    }

    pub(crate) fn formula(&mut self) -> Result<Formula, SyntaxError> {
        self.iff()
    }

    fn iff(&mut self) -> Result<Formula, SyntaxError> {
        let lhs = self.imp()?;
        if self.eat(&Tok::DoubleArrow) {
            let rhs = self.iff()?;
            return Ok(Formula::iff(lhs, rhs));
        }
        Ok(lhs)
    }

    fn imp(&mut self) -> Result<Formula, SyntaxError> {
        let lhs = self.or()?;
        if self.eat(&Tok::Arrow) {
            let rhs = self.imp()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Formula, SyntaxError> {
        let mut lhs = self.and()?;
        while self.eat(&Tok::Bar) {
            lhs = Formula::or(lhs, self.and()?);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Formula, SyntaxError> {
        let mut lhs = self.unary()?;
        while self.eat(&Tok::Amp) {
            lhs = Formula::and(lhs, self.unary()?);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, SyntaxError> {
        let span = self.span();
        match self.bump() {
            Tok::Tilde => Ok(Formula::not(self.unary()?)),
            Tok::LParen => {
                let f = self.formula()?;
                self.expect(&Tok::RParen)?;
                Ok(f)
            }
            Tok::Ident(s) if s == "true" => Ok(Formula::True),
            Tok::Ident(s) if s == "false" => Ok(Formula::False),
            Tok::Ident(s) => Ok(Formula::atom(&s)),
            Tok::LBracket | Tok::Lt => err(span, "modal operator not allowed here (modal depth is limited to 1)"),
            other => err(span, format!("expected a formula, found {other}")),
        }
    }

    pub(crate) fn literal(&mut self) -> Result<(Literal, Span), SyntaxError> {
        let span = self.span();
        let negated = self.eat(&Tok::Tilde);
        let (name, _) = self.expect_ident("a fluent name")?;
        let l = if negated { Literal::neg(name.as_str()) } else { Literal::pos(name.as_str()) };
        Ok((l, span))
    }

    /// `[a] F` or `<a> [true]`, positioned on the opening bracket.
    fn modality(&mut self, antecedent: Formula) -> Result<Query, SyntaxError> {
        if self.eat(&Tok::LBracket) {
            let (action, _) = self.expect_ident("an action name")?;
            self.expect(&Tok::RBracket)?;
            let consequent = self.formula()?;
            return Ok(Query::Box { action, antecedent, consequent });
        }
        self.expect(&Tok::Lt)?;
        let (action, _) = self.expect_ident("an action name")?;
        self.expect(&Tok::Gt)?;
        if !matches!(self.peek(), Tok::Eof) {
            let span = self.span();
            let f = self.formula()?;
            if f != Formula::True {
                return err(span, "only `<a> true` is supported after a diamond");
            }
        }
        Ok(Query::Diamond { action, antecedent })
    }

    pub(crate) fn query(&mut self) -> Result<Query, SyntaxError> {
        if matches!(self.peek(), Tok::LBracket | Tok::Lt) {
            return self.modality(Formula::True);
        }
        let lhs = self.formula()?;
        if self.eat(&Tok::FatArrow) {
            if !matches!(self.peek(), Tok::LBracket | Tok::Lt) {
                return err(self.span(), format!("expected `[` or `<` after `=>`, found {}", self.peek()));
            }
            return self.modality(lhs);
        }
        Ok(Query::Classical(lhs))
    }
}

/// Parse a classical formula. Unknown atoms are not an error here.
pub fn parse_formula(text: &str) -> Result<Formula, SyntaxError> {
    let mut p = Parser::new(text)?;
    let f = p.formula()?;
    p.expect_end()?;
    Ok(f)
}

/// Parse a depth-one query: `F`, `F => [a] G`, `[a] G`, `F => <a> true`, `<a> true`.
pub fn parse_query(text: &str) -> Result<Query, SyntaxError> {
    let mut p = Parser::new(text)?;
    let q = p.query()?;
    p.expect_end()?;
    Ok(q)
}
