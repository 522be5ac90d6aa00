//! The declarative evolution language: lexing, parsing, validation and
//! canonical formatting.

mod ast;
mod lexer;
mod validate;

use std::fmt;

pub use ast::{EqCond, JoinCond, Literal, PropertyRef, Statement, Transfer};
pub use lexer::{is_identifier, tokenize, Keyword, LexError, Position, Token, TokenKind};
pub use validate::{has_errors, validate_statement, Diagnostic, Location, Rule, Severity};

use crate::model::AtomicValue;

/// A validation diagnostic paired with where it points in the source text.
#[derive(Debug, Clone, PartialEq)]
pub struct Located {
    pub pos: Position,
    pub diagnostic: Diagnostic,
}

impl fmt::Display for Located {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.pos, self.diagnostic)
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ParseError {
    #[error("{}: lexical error: {}", .0.pos, .0.message)]
    Lexical(LexError),
    #[error("{pos}: syntax error: expected {}, found {found}", expected.join(" or "))]
    Syntax {
        pos: Position,
        expected: Vec<String>,
        found: String,
    },
    #[error("{}", render_invalid(.0))]
    Invalid(Vec<Located>),
}

impl ParseError {
    pub fn position(&self) -> Position {
        match self {
            ParseError::Lexical(e) => e.pos,
            ParseError::Syntax { pos, .. } => *pos,
            ParseError::Invalid(d) => d.first().map_or(Position { line: 1, column: 1 }, |l| l.pos),
        }
    }
}

fn render_invalid(diags: &[Located]) -> String {
    diags.iter().map(ToString::to_string).collect::<Vec<_>>().join("\n")
}

/// Source positions of the statement parts diagnostics can point at.
#[derive(Debug, Clone, Default)]
pub struct Spans {
    pub statement: Option<Position>,
    pub subject: Option<Position>,
    pub destination: Option<Position>,
    pub value: Option<Position>,
    pub join: Option<Position>,
    pub conditions: Vec<Position>,
}

impl Spans {
    pub fn resolve(&self, loc: Location) -> Position {
        let start = self.statement.unwrap_or(Position { line: 1, column: 1 });
        match loc {
            Location::Statement => Some(start),
            Location::Subject => self.subject,
            Location::Destination => self.destination,
            Location::Value => self.value,
            Location::Join => self.join,
            Location::Condition(i) => self.conditions.get(i).copied(),
        }
        .unwrap_or(start)
    }
}

/// A parsed statement with its validation diagnostics, which at this point
/// are warnings only.
#[derive(Debug, Clone)]
pub struct Parsed {
    pub statement: Statement,
    pub warnings: Vec<Located>,
}

/// Parses and validates one statement. Errors from validation reject the
/// statement; warnings come back alongside it.
pub fn parse(text: &str) -> Result<Parsed, ParseError> {
    let (statement, spans) = parse_unchecked(text)?;
    let (errors, warnings): (Vec<_>, Vec<_>) = validate_statement(&statement)
        .into_iter()
        .map(|d| Located {
            pos: spans.resolve(d.location),
            diagnostic: d,
        })
        .partition(|l| l.diagnostic.is_error());
    if errors.is_empty() {
        Ok(Parsed { statement, warnings })
    } else {
        Err(ParseError::Invalid(errors))
    }
}

pub fn parse_statement(text: &str) -> Result<Statement, ParseError> {
    parse(text).map(|p| p.statement)
}

/// Grammar only, no validation.
pub fn parse_unchecked(text: &str) -> Result<(Statement, Spans), ParseError> {
    let tokens = tokenize(text).map_err(ParseError::Lexical)?;
    let end = end_position(text);
    let mut p = Parser {
        tokens,
        at: 0,
        end,
        spans: Spans::default(),
    };
    let stmt = p.statement()?;
    if let Some(tok) = p.peek() {
        return Err(p.syntax(tok.pos, &["end of input"], describe(Some(tok))));
    }
    Ok((stmt, p.spans))
}

fn end_position(text: &str) -> Position {
    let mut pos = Position { line: 1, column: 1 };
    for c in text.chars() {
        if c == '\n' {
            pos.line += 1;
            pos.column = 1;
        } else {
            pos.column += 1;
        }
    }
    pos
}

fn describe(tok: Option<&Token>) -> String {
    tok.map_or_else(|| "end of input".to_owned(), |t| t.kind.to_string())
}

struct Parser {
    tokens: Vec<Token>,
    at: usize,
    end: Position,
    spans: Spans,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.at)
    }

    fn pos(&self) -> Position {
        self.peek().map_or(self.end, |t| t.pos)
    }

    fn syntax(&self, pos: Position, expected: &[&str], found: String) -> ParseError {
        ParseError::Syntax {
            pos,
            expected: expected.iter().map(|s| (*s).to_owned()).collect(),
            found,
        }
    }

    fn fail<T>(&self, expected: &[&str]) -> Result<T, ParseError> {
        Err(self.syntax(self.pos(), expected, describe(self.peek())))
    }

    fn eat_keyword(&mut self, kw: Keyword) -> bool {
        if matches!(self.peek(), Some(Token { kind: TokenKind::Keyword(k), .. }) if *k == kw) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn expect_keyword(&mut self, kw: Keyword) -> Result<(), ParseError> {
        if self.eat_keyword(kw) {
            Ok(())
        } else {
            self.fail(&[&format!("`{}`", kw.as_str())])
        }
    }

    fn expect(&mut self, kind: TokenKind, label: &str) -> Result<(), ParseError> {
        if self.peek().map(|t| &t.kind) == Some(&kind) {
            self.at += 1;
            Ok(())
        } else {
            self.fail(&[label])
        }
    }

    fn ident(&mut self, label: &str) -> Result<String, ParseError> {
        if let Some(Token {
            kind: TokenKind::Ident(s),
            ..
        }) = self.peek()
        {
            let s = s.clone();
            self.at += 1;
            Ok(s)
        } else {
            self.fail(&[label])
        }
    }

    fn literal(&mut self) -> Result<AtomicValue, ParseError> {
        if let Some(Token {
            kind: TokenKind::Literal(v),
            ..
        }) = self.peek()
        {
            let v = v.clone();
            self.at += 1;
            Ok(v)
        } else {
            self.fail(&["literal"])
        }
    }

    fn property(&mut self) -> Result<PropertyRef, ParseError> {
        let kind = self.ident("kind name")?;
        self.expect(TokenKind::Dot, "`.`")?;
        let name = self.ident("property name")?;
        Ok(PropertyRef { kind, name })
    }

    fn statement(&mut self) -> Result<Statement, ParseError> {
        self.spans.statement = Some(self.pos());
        let op = match self.peek() {
            Some(Token {
                kind: TokenKind::Keyword(k),
                ..
            }) => *k,
            _ => return self.fail(&["`add`", "`delete`", "`rename`", "`move`", "`copy`"]),
        };
        if !matches!(
            op,
            Keyword::Add | Keyword::Delete | Keyword::Rename | Keyword::Move | Keyword::Copy
        ) {
            return self.fail(&["`add`", "`delete`", "`rename`", "`move`", "`copy`"]);
        }
        self.at += 1;
        self.spans.subject = Some(self.pos());
        let target = self.property()?;
        match op {
            Keyword::Add => {
                self.expect(TokenKind::Eq, "`=`")?;
                self.spans.value = Some(self.pos());
                let value = self.literal()?;
                let selection = self.selection()?;
                Ok(Statement::Add {
                    target,
                    value,
                    selection,
                })
            }
            Keyword::Delete => Ok(Statement::Delete {
                target,
                selection: self.selection()?,
            }),
            Keyword::Rename => {
                self.expect_keyword(Keyword::To)?;
                self.spans.destination = Some(self.pos());
                let new_name = self.ident("property name")?;
                Ok(Statement::Rename {
                    target,
                    new_name,
                    selection: self.selection()?,
                })
            }
            _ => {
                self.expect_keyword(Keyword::To)?;
                self.spans.destination = Some(self.pos());
                let target_kind = self.ident("kind name")?;
                let (join, conds) = self.complex_cond()?;
                let t = Transfer {
                    source: target,
                    target_kind,
                    join,
                    conds,
                };
                Ok(if op == Keyword::Move {
                    Statement::Move(t)
                } else {
                    Statement::Copy(t)
                })
            }
        }
    }

    /// `[ "where" cond { "and" cond } ]`
    fn selection(&mut self) -> Result<Vec<EqCond>, ParseError> {
        let mut conds = Vec::new();
        if !self.eat_keyword(Keyword::Where) {
            return Ok(conds);
        }
        loop {
            self.spans.conditions.push(self.pos());
            let prop = self.property()?;
            self.expect(TokenKind::Eq, "`=`")?;
            conds.push(EqCond {
                prop,
                value: self.literal()?,
            });
            if !self.eat_keyword(Keyword::And) {
                return Ok(conds);
            }
        }
    }

    /// `[ "where" (joincond | conds | joincond "and" conds) ]`
    fn complex_cond(&mut self) -> Result<(Option<JoinCond>, Vec<EqCond>), ParseError> {
        let mut join = None;
        let mut conds = Vec::new();
        if !self.eat_keyword(Keyword::Where) {
            return Ok((join, conds));
        }
        let mut first = true;
        loop {
            let pos = self.pos();
            let prop = self.property()?;
            self.expect(TokenKind::Eq, "`=`")?;
            let rhs_is_property = matches!(
                self.peek(),
                Some(Token {
                    kind: TokenKind::Ident(_),
                    ..
                })
            );
            if rhs_is_property && first {
                self.spans.join = Some(pos);
                join = Some(JoinCond {
                    left: prop,
                    right: self.property()?,
                });
            } else if rhs_is_property {
                return self.fail(&["literal"]);
            } else if first {
                self.spans.conditions.push(pos);
                conds.push(EqCond {
                    prop,
                    value: match self.literal() {
                        Ok(v) => v,
                        Err(_) => return self.fail(&["literal", "property"]),
                    },
                });
            } else {
                self.spans.conditions.push(pos);
                conds.push(EqCond {
                    prop,
                    value: self.literal()?,
                });
            }
            first = false;
            if !self.eat_keyword(Keyword::And) {
                return Ok((join, conds));
            }
        }
    }
}

/// Canonical source text for `lit`; parses back to an equal literal.
pub fn format_literal(lit: &AtomicValue) -> String {
    match lit {
        AtomicValue::Text(s) => serde_json::to_string(s).expect("strings always serialize"),
        AtomicValue::Int(i) => i.to_string(),
        AtomicValue::Bool(b) => b.to_string(),
        AtomicValue::Float(f) => {
            let s = format!("{f:?}");
            if s.contains('.') || !f.is_finite() {
                s
            } else if let Some(e) = s.find('e') {
                format!("{}.0{}", &s[..e], &s[e..])
            } else {
                format!("{s}.0")
            }
        }
    }
}

fn push_conds(out: &mut String, conds: &[EqCond], mut first: bool) {
    for c in conds {
        out.push_str(if first { " where " } else { " and " });
        first = false;
        out.push_str(&format!("{} = {}", c.prop, format_literal(&c.value)));
    }
}

pub fn format_statement(stmt: &Statement) -> String {
    let mut out = String::new();
    match stmt {
        Statement::Add {
            target,
            value,
            selection,
        } => {
            out.push_str(&format!("add {target} = {}", format_literal(value)));
            push_conds(&mut out, selection, true);
        }
        Statement::Delete { target, selection } => {
            out.push_str(&format!("delete {target}"));
            push_conds(&mut out, selection, true);
        }
        Statement::Rename {
            target,
            new_name,
            selection,
        } => {
            out.push_str(&format!("rename {target} to {new_name}"));
            push_conds(&mut out, selection, true);
        }
        Statement::Move(t) | Statement::Copy(t) => {
            out.push_str(&format!("{} {} to {}", stmt.op_name(), t.source, t.target_kind));
            if let Some(j) = &t.join {
                out.push_str(&format!(" where {} = {}", j.left, j.right));
            }
            push_conds(&mut out, &t.conds, t.join.is_none());
        }
    }
    out
}
